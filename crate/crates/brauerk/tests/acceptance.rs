//! End-to-end verification corpus, one test per check. Each test calls the
//! same function the binary's `selftest` subcommand runs and fails with the
//! check's own diagnostic when the property does not hold.

use brauerk::cli;
use brauerk::config::Config;

fn run(check: fn(&Config) -> brauerk::error::Result<String>) -> String {
    match check(&Config::default()) {
        Ok(detail) => detail,
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn azumaya_certification() {
    let detail = run(cli::check_azumaya_certification);
    println!("azumaya certification: {detail}");
}

#[test]
fn projective_generator_tri_criterion() {
    let detail = run(cli::check_generator_tri_criterion);
    println!("projective generator tri-criterion: {detail}");
}

#[test]
fn brauer_triviality_by_enumeration() {
    let detail = run(cli::check_brauer_triviality);
    println!("brauer triviality by enumeration: {detail}");
}

#[test]
fn opposite_algebras_certify_inverses() {
    let detail = run(cli::check_opposite_inverses);
    println!("opposite algebras certify inverses: {detail}");
}

#[test]
fn picard_identification() {
    let detail = run(cli::check_picard_identification);
    println!("picard identification: {detail}");
}

#[test]
fn segal_specialness() {
    let detail = run(cli::check_segal_specialness);
    println!("segal specialness: {detail}");
}

#[test]
fn delooping_realizes_the_class_group() {
    let detail = run(cli::check_delooping);
    println!("delooping realizes the class group: {detail}");
}

#[test]
fn pushforward_functoriality() {
    let detail = run(cli::check_pushforward_functoriality);
    println!("pushforward functoriality: {detail}");
}

#[test]
fn relative_sequence_bookkeeping() {
    let detail = run(cli::check_relative_sequence);
    println!("relative sequence bookkeeping: {detail}");
}

#[test]
fn five_units_never_occur() {
    let detail = run(cli::check_five_units);
    println!("five units never occur: {detail}");
}
