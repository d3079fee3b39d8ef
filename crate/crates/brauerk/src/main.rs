fn main() {
    std::process::exit(brauerk::cli::run());
}
