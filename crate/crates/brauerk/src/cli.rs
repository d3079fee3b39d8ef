//! Command-line surface: ring summaries, Azumaya certification, Morita
//! witnesses, Picard/Brauer computation, deloopings of groupoid files,
//! relative reports along ring maps, and a built-in verification corpus.
//!
//! Exit codes: 0 on success, 1 on errors or failed verification, 2 when a
//! size cap or search budget decided the outcome (or an enumeration reports
//! itself incomplete). Every JSON report is emitted pretty-printed with keys
//! in declaration order, so re-parsing and re-serializing is byte-identical.

use std::fs;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::abelian::AbGroup;
use crate::algebra::{
    algebra_from_extension, algebra_tensor, matrix_algebra, regular_algebra, StructuredAlgebra,
};
use crate::azumaya::is_azumaya;
use crate::brauer::{
    brauer_automorphisms, brauer_data, brauer_group, generator_bound, relative_report,
    trivialization,
};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::gamma::{
    deloop_check, deloop_pi1_map, gamma_hom, gamma_level, pushforward_morphism,
    pushforward_object, segal_check, GammaMorphism, GammaObject, PointedMap,
};
use crate::module::{
    direct_sum, enumerate_modules, is_projective, module_from_group, module_isomorphic,
    rank_function, trace_ideal, FGModule, FreeModule,
};
use crate::picard::picard_data;
use crate::ring::{local_decomposition, parse_ring, FiniteCommRing, LocalFactor, RingMap};
use crate::smc::{
    from_abelian_group, strict_hom_functor, synthetic_picard, FiniteSymMonGroupoid, SCHEMA,
};
use crate::tensor::tensor_over;

/// Default module-order bound for enumeration searches (`--bound` overrides).
pub const DEFAULT_BOUND: u64 = 16;

/// The standard ring corpus exercised by `selftest`.
pub const RING_CORPUS: [&str; 7] = ["Z/2", "Z/3", "GF(4)", "Z/4", "Z/6", "Z/9", "Z/4 x Z/2"];

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Envelope for every JSON report.
#[derive(Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub config: ConfigEcho,
    pub complete: bool,
    pub result: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

/// Effective configuration echoed into each report.
#[derive(Debug, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub max_ring_order: u64,
    pub max_module_order: u64,
    pub gamma_budget: u64,
    pub iso_node_budget: u64,
    pub enumeration_node_budget: u64,
    pub nerve_cell_budget: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub output: String,
}

impl ConfigEcho {
    fn of(config: &Config) -> Self {
        ConfigEcho {
            max_ring_order: config.max_ring_order,
            max_module_order: config.max_module_order,
            gamma_budget: config.gamma_budget,
            iso_node_budget: config.iso_node_budget,
            enumeration_node_budget: config.enumeration_node_budget,
            nerve_cell_budget: config.nerve_cell_budget,
            seed: config.seed,
            output: "json".into(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RingInfoPayload {
    pub ring: String,
    pub presentation: String,
    pub order: u64,
    pub characteristic: u64,
    pub additive_invariants: Vec<u64>,
    pub unit_count: usize,
    pub unit_invariants: Vec<u64>,
    pub idempotents: usize,
    pub primitive_idempotents: usize,
    pub local_factors: Vec<LocalFactorInfo>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LocalFactorInfo {
    pub order: u64,
    pub residue_order: u64,
    pub maximal_ideal_size: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AzumayaPayload {
    pub ring: String,
    pub algebra: String,
    pub order: u64,
    pub ranks: Vec<u64>,
    pub projective: bool,
    pub rank_positive: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sandwich_bijective: Option<bool>,
    pub azumaya: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failed_stage: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MoritaPayload {
    pub ring: String,
    pub algebra: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator_bound: Option<u64>,
    pub trivial: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessInfo>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct WitnessInfo {
    pub generator_orders: Vec<u64>,
    pub generator_ranks: Vec<u64>,
    pub end_order: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BrauerPayload {
    pub ring: String,
    pub bound: u64,
    pub br: Vec<u64>,
    pub pic: Vec<u64>,
    pub gl1: Vec<u64>,
    pub azumaya_algebras: usize,
    pub brauer_classes: usize,
    pub automorphisms_match_picard: bool,
    pub complete: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PicardPayload {
    pub ring: String,
    pub pic: Vec<u64>,
    pub gl1: Vec<u64>,
    pub classes: usize,
    pub unit_count: usize,
    pub class_orders: Vec<u64>,
    pub complete: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DeloopPayload {
    pub input: String,
    pub objects: usize,
    pub morphisms: usize,
    pub pi0_components: usize,
    pub pi1_torsion: Vec<u64>,
    pub pi1_free_rank: usize,
    pub expected: Vec<u64>,
    pub ok: bool,
    pub dim3_elided: bool,
    pub edges: usize,
    pub triangles: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SelftestPayload {
    pub checks: Vec<CheckOutcome>,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub status: String,
    pub detail: String,
}

// ---------------------------------------------------------------------------
// Input files
// ---------------------------------------------------------------------------

/// Interchange format for a structured algebra over a named ring: the module
/// presentation (cyclic orders plus the full scalar action on generators)
/// and the generator products.
#[derive(Debug, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<String>,
    pub orders: Vec<u64>,
    /// `action[r][i]`: coordinates of `r * g_i`.
    pub action: Vec<Vec<Vec<u32>>>,
    pub one: u64,
    /// `mul[i][j]`: the product `g_i g_j`, encoded.
    pub mul: Vec<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub descriptor: Option<String>,
}

pub fn algebra_to_file(a: &StructuredAlgebra) -> AlgebraFile {
    let m = &a.module;
    let action = (0..m.ring.order)
        .map(|r| (0..m.ngens()).map(|i| m.act_coords(r as u32, i).to_vec()).collect())
        .collect();
    AlgebraFile {
        schema: SCHEMA.into(),
        ring: Some(m.ring.descriptor.clone()),
        orders: m.orders.clone(),
        action,
        one: a.one,
        mul: a.mul_gens.clone(),
        descriptor: Some(a.descriptor.clone()),
    }
}

pub fn algebra_from_file(
    af: &AlgebraFile,
    ring: &Arc<FiniteCommRing>,
    config: &Config,
) -> Result<StructuredAlgebra> {
    if af.schema != SCHEMA {
        return Err(Error::Parse(format!("unsupported algebra file schema {:?}", af.schema)));
    }
    if let Some(r) = &af.ring {
        if *r != ring.descriptor {
            return Err(Error::Validation(format!(
                "algebra file is over {r}, not over {}",
                ring.descriptor
            )));
        }
    }
    let module = FGModule::new(ring.clone(), af.orders.clone(), af.action.clone())?;
    let free = recover_free(&module, ring, config);
    let descriptor = af.descriptor.clone().unwrap_or_else(|| "algebra from file".into());
    StructuredAlgebra::new(module, af.mul.clone(), af.one, descriptor, free)
}

/// Reattach the free-module marker when the file presentation coincides with
/// the standard free presentation, re-enabling the matrix fast paths.
fn recover_free(
    module: &Arc<FGModule>,
    ring: &Arc<FiniteCommRing>,
    config: &Config,
) -> Option<FreeModule> {
    let k0 = ring.additive_basis().gens.len();
    if k0 == 0 || module.ngens() % k0 != 0 {
        return None;
    }
    let free = FreeModule::new(ring, module.ngens() / k0, config).ok()?;
    if free.module.same_presentation(module) {
        Some(free)
    } else {
        None
    }
}

/// Interchange format for a ring homomorphism: images of source elements.
#[derive(Debug, Serialize, Deserialize)]
pub struct RingMapFile {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub src: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tgt: Option<String>,
    pub map: Vec<u32>,
}

/// Structural bounds check for a groupoid file, so malformed indices are
/// rejected before any computation dereferences them.
pub fn validate_groupoid(g: &FiniteSymMonGroupoid) -> Result<()> {
    let fail = |msg: String| Err(Error::Validation(format!("groupoid file: {msg}")));
    if g.schema != SCHEMA {
        return fail(format!("unsupported schema {:?}", g.schema));
    }
    let n = g.objects;
    let m = g.nmor();
    if n == 0 {
        return fail("no objects".into());
    }
    if g.mor_tgt.len() != m {
        return fail("morphism endpoint lists differ in length".into());
    }
    if g.mor_src.iter().chain(g.mor_tgt.iter()).any(|&x| x >= n) {
        return fail("morphism endpoint out of range".into());
    }
    if g.unit >= n {
        return fail("unit object out of range".into());
    }
    if g.identity.len() != n
        || g.identity.iter().enumerate().any(|(x, &f)| {
            f >= m || g.mor_src[f] != x || g.mor_tgt[f] != x
        })
    {
        return fail("identity table malformed".into());
    }
    if g.compose.len() != m || g.compose.iter().any(|row| row.len() != m) {
        return fail("composition table has wrong shape".into());
    }
    for gm in 0..m {
        for fm in 0..m {
            match g.compose[gm][fm] {
                Some(h) => {
                    if h >= m
                        || g.mor_tgt[fm] != g.mor_src[gm]
                        || g.mor_src[h] != g.mor_src[fm]
                        || g.mor_tgt[h] != g.mor_tgt[gm]
                    {
                        return fail("composition table inconsistent".into());
                    }
                }
                None => {
                    if g.mor_tgt[fm] == g.mor_src[gm] {
                        return fail("composable pair left undefined".into());
                    }
                }
            }
        }
    }
    if g.tensor_obj.len() != n || g.tensor_obj.iter().any(|row| row.len() != n) {
        return fail("object tensor table has wrong shape".into());
    }
    if g.tensor_obj.iter().flatten().any(|&x| x >= n) {
        return fail("object tensor out of range".into());
    }
    if g.tensor_mor.len() != m || g.tensor_mor.iter().any(|row| row.len() != m) {
        return fail("morphism tensor table has wrong shape".into());
    }
    for f in 0..m {
        for h in 0..m {
            let t = g.tensor_mor[f][h];
            if t >= m
                || g.mor_src[t] != g.tensor_obj[g.mor_src[f]][g.mor_src[h]]
                || g.mor_tgt[t] != g.tensor_obj[g.mor_tgt[f]][g.mor_tgt[h]]
            {
                return fail("morphism tensor inconsistent".into());
            }
        }
    }
    if g.associator.len() != n
        || g.associator.iter().any(|p| p.len() != n || p.iter().any(|r| r.len() != n))
    {
        return fail("associator table has wrong shape".into());
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let a = g.associator[x][y][z];
                if a >= m
                    || g.mor_src[a] != g.tensor_obj[g.tensor_obj[x][y]][z]
                    || g.mor_tgt[a] != g.tensor_obj[x][g.tensor_obj[y][z]]
                {
                    return fail("associator endpoints inconsistent".into());
                }
            }
        }
    }
    if g.lunitor.len() != n
        || g.lunitor.iter().enumerate().any(|(x, &f)| {
            f >= m || g.mor_src[f] != g.tensor_obj[g.unit][x] || g.mor_tgt[f] != x
        })
    {
        return fail("left unitor malformed".into());
    }
    if g.runitor.len() != n
        || g.runitor.iter().enumerate().any(|(x, &f)| {
            f >= m || g.mor_src[f] != g.tensor_obj[x][g.unit] || g.mor_tgt[f] != x
        })
    {
        return fail("right unitor malformed".into());
    }
    if g.symmetry.len() != n * n {
        return fail("symmetry table has wrong length".into());
    }
    for x in 0..n {
        for y in 0..n {
            let s = g.symmetry[x * n + y];
            if s >= m
                || g.mor_src[s] != g.tensor_obj[x][y]
                || g.mor_tgt[s] != g.tensor_obj[y][x]
            {
                return fail("symmetry endpoints inconsistent".into());
            }
        }
    }
    for f in 0..m {
        if g.inverse_of(f).is_none() {
            return fail("a morphism has no inverse".into());
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Argument grammar
// ---------------------------------------------------------------------------

#[derive(Debug, Parser)]
#[command(
    name = "brauerk",
    version,
    disable_help_subcommand = true,
    about = "Exact invariants of finite commutative rings: Azumaya certification, \
             Morita witnesses, Picard and Brauer groups, and groupoid deloopings"
)]
pub struct Cli {
    /// Emit a machine-readable JSON report on stdout
    #[arg(long, global = true)]
    pub json: bool,
    /// Module-order bound for enumeration searches (default 16)
    #[arg(long, global = true, value_name = "N")]
    pub bound: Option<u64>,
    /// Override every internal search budget with one value
    #[arg(long, global = true, value_name = "N")]
    pub budget: Option<u64>,
    /// Shuffle seed for search order (fuzzing only; omit for the
    /// deterministic canonical order)
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inspect a ring built from the generator grammar
    Ring {
        #[command(subcommand)]
        action: RingAction,
    },
    /// Certify or refute the Azumaya property of an algebra file
    Azumaya {
        #[command(subcommand)]
        action: AzumayaAction,
    },
    /// Search for Morita trivializations
    Morita {
        #[command(subcommand)]
        action: MoritaAction,
    },
    /// Brauer group by exhaustive enumeration up to the bound
    Brauer {
        #[command(subcommand)]
        action: BrauerAction,
    },
    /// Picard group and unit group
    Picard {
        #[command(subcommand)]
        action: PicardAction,
    },
    /// Gamma-space constructions over a groupoid file
    Gamma {
        #[command(subcommand)]
        action: GammaAction,
    },
    /// Map unit, Picard, and Brauer data along a ring homomorphism
    Relative {
        /// Source ring, an optional "->" separator, and target ring
        #[arg(num_args = 2..=3, allow_hyphen_values = true, value_name = "SPEC")]
        rings: Vec<String>,
        /// JSON file with the element map
        #[arg(long, value_name = "FILE")]
        map: PathBuf,
    },
    /// Run the built-in verification corpus
    Selftest,
}

#[derive(Debug, Subcommand)]
pub enum RingAction {
    /// Orders, units, idempotents, and the local decomposition
    Info { spec: String },
}

#[derive(Debug, Subcommand)]
pub enum AzumayaAction {
    /// Run the projectivity, rank, and sandwich tests
    Check {
        spec: String,
        /// JSON algebra file
        #[arg(long, value_name = "FILE")]
        algebra: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum MoritaAction {
    /// Search a projective generator presenting the algebra as endomorphisms
    Witness {
        spec: String,
        /// JSON algebra file
        #[arg(long, value_name = "FILE")]
        algebra: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum BrauerAction {
    /// Enumerate Azumaya algebras and classify them up to Morita equivalence
    Compute { spec: String },
}

#[derive(Debug, Subcommand)]
pub enum PicardAction {
    /// Enumerate invertible modules and the unit group
    Compute { spec: String },
}

#[derive(Debug, Subcommand)]
pub enum GammaAction {
    /// Deloop a coherent group-like groupoid and report circle invariants
    Deloop {
        /// JSON groupoid file
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
    },
}

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

pub fn run() -> i32 {
    let argv: Vec<String> = std::env::args().collect();
    run_from(&argv)
}

/// Full command execution on an explicit argument vector; returns the exit
/// code and prints exactly what the binary would print.
pub fn run_from(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let config = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let started = Instant::now();
    match dispatch(&cli, &config) {
        Ok(out) => {
            if cli.json {
                let report = Report {
                    schema: SCHEMA.into(),
                    command: argv.iter().skip(1).cloned().collect::<Vec<_>>().join(" "),
                    config: ConfigEcho::of(&config),
                    complete: out.complete,
                    result: out.payload,
                    wall_ms: out.timed.then(|| started.elapsed().as_millis() as u64),
                };
                match serde_json::to_string_pretty(&report) {
                    Ok(s) => println!("{s}"),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return 1;
                    }
                }
            } else {
                print!("{}", out.text);
            }
            if out.failed {
                1
            } else if !out.complete {
                2
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_inconclusive() {
                2
            } else {
                1
            }
        }
    }
}

fn load_config(cli: &Cli) -> Result<Config> {
    let mut config = match std::env::var_os("BRAUERK_CONFIG") {
        Some(path) => serde_json::from_str(&fs::read_to_string(&path)?)?,
        None => Config::default(),
    };
    if let Some(b) = cli.budget {
        config.gamma_budget = b;
        config.iso_node_budget = b;
        config.enumeration_node_budget = b;
        config.nerve_cell_budget = b;
    }
    if cli.seed.is_some() {
        config.seed = cli.seed;
    }
    Ok(config)
}

struct Outcome {
    payload: Value,
    text: String,
    complete: bool,
    failed: bool,
    timed: bool,
}

impl Outcome {
    fn done<T: Serialize>(payload: &T, text: String, complete: bool) -> Result<Outcome> {
        Ok(Outcome {
            payload: serde_json::to_value(payload)?,
            text,
            complete,
            failed: false,
            timed: true,
        })
    }
}

fn dispatch(cli: &Cli, config: &Config) -> Result<Outcome> {
    let bound = cli.bound.unwrap_or(DEFAULT_BOUND);
    match &cli.command {
        Command::Ring { action: RingAction::Info { spec } } => ring_info(spec, config),
        Command::Azumaya { action: AzumayaAction::Check { spec, algebra } } => {
            azumaya_check(spec, algebra, config)
        }
        Command::Morita { action: MoritaAction::Witness { spec, algebra } } => {
            morita_witness(spec, algebra, config)
        }
        Command::Brauer { action: BrauerAction::Compute { spec } } => {
            brauer_compute(spec, bound, config)
        }
        Command::Picard { action: PicardAction::Compute { spec } } => picard_compute(spec, config),
        Command::Gamma { action: GammaAction::Deloop { input } } => gamma_deloop(input, config),
        Command::Relative { rings, map } => relative_command(rings, map, bound, config),
        Command::Selftest => selftest(config),
    }
}

// ---------------------------------------------------------------------------
// Command handlers
// ---------------------------------------------------------------------------

fn ring_info(spec: &str, config: &Config) -> Result<Outcome> {
    let ring = parse_ring(spec, config)?;
    let dec = local_decomposition(&ring)?;
    let (unit_group, units) = ring.unit_group();
    let mut characteristic = 1u64;
    let mut x = ring.one;
    while x != ring.zero {
        x = ring.add(x, ring.one);
        characteristic += 1;
    }
    let payload = RingInfoPayload {
        ring: ring.descriptor.clone(),
        presentation: ring.presentation.clone(),
        order: ring.order as u64,
        characteristic,
        additive_invariants: ring.additive_invariants(),
        unit_count: units.len(),
        unit_invariants: unit_group.invariant_factors(),
        idempotents: ring.idempotents().len(),
        primitive_idempotents: ring.primitive_idempotents().len(),
        local_factors: dec
            .factors
            .iter()
            .map(|f| LocalFactorInfo {
                order: f.ring.order as u64,
                residue_order: f.residue_field.order as u64,
                maximal_ideal_size: f.maximal_ideal.len(),
            })
            .collect(),
    };
    let mut text = format!("ring {} (order {})\n", payload.ring, payload.order);
    if !payload.presentation.is_empty() {
        text += &format!("presentation: {}\n", payload.presentation);
    }
    text += &format!("characteristic: {}\n", payload.characteristic);
    text += &format!("additive invariants: {:?}\n", payload.additive_invariants);
    text += &format!(
        "units: {} with invariants {:?}\n",
        payload.unit_count, payload.unit_invariants
    );
    text += &format!(
        "idempotents: {} ({} primitive)\n",
        payload.idempotents, payload.primitive_idempotents
    );
    text += "local factors:\n";
    for f in &payload.local_factors {
        text += &format!(
            "  order {}, residue field order {}, maximal ideal size {}\n",
            f.order, f.residue_order, f.maximal_ideal_size
        );
    }
    Outcome::done(&payload, text, true)
}

fn read_algebra(
    path: &PathBuf,
    ring: &Arc<FiniteCommRing>,
    config: &Config,
) -> Result<StructuredAlgebra> {
    let af: AlgebraFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    algebra_from_file(&af, ring, config)
}

fn azumaya_check(spec: &str, algebra: &PathBuf, config: &Config) -> Result<Outcome> {
    let ring = parse_ring(spec, config)?;
    let dec = local_decomposition(&ring)?;
    let a = read_algebra(algebra, &ring, config)?;
    let cert = is_azumaya(&a, &dec, config)?;
    let payload = AzumayaPayload {
        ring: ring.descriptor.clone(),
        algebra: a.descriptor.clone(),
        order: a.order(),
        ranks: cert.ranks.clone(),
        projective: cert.projective,
        rank_positive: cert.rank_positive,
        sandwich_bijective: cert.sandwich_bijective,
        azumaya: cert.azumaya,
        failed_stage: cert.failed_stage.map(String::from),
    };
    let mut text = format!(
        "algebra {} (order {}) over {}\n",
        payload.algebra, payload.order, payload.ring
    );
    text += &format!("local ranks: {:?}\n", payload.ranks);
    text += &format!("projective: {}\n", payload.projective);
    text += &format!("rank everywhere positive: {}\n", payload.rank_positive);
    match payload.sandwich_bijective {
        Some(b) => text += &format!("sandwich map bijective: {b}\n"),
        None => text += "sandwich map bijective: not evaluated\n",
    }
    text += &format!("azumaya: {}\n", payload.azumaya);
    if let Some(stage) = &payload.failed_stage {
        text += &format!("failed stage: {stage}\n");
    }
    Outcome::done(&payload, text, true)
}

fn morita_witness(spec: &str, algebra: &PathBuf, config: &Config) -> Result<Outcome> {
    let ring = parse_ring(spec, config)?;
    let dec = local_decomposition(&ring)?;
    let a = read_algebra(algebra, &ring, config)?;
    let bound = generator_bound(&a, &dec)?;
    let witness = trivialization(&a, &dec, config)?;
    let payload = MoritaPayload {
        ring: ring.descriptor.clone(),
        algebra: a.descriptor.clone(),
        generator_bound: bound,
        trivial: witness.is_some(),
        witness: witness.map(|w| WitnessInfo {
            generator_orders: w.generator.orders.clone(),
            generator_ranks: w.ranks.clone(),
            end_order: w.end_order,
        }),
    };
    let mut text = format!("algebra {} over {}\n", payload.algebra, payload.ring);
    match payload.generator_bound {
        Some(b) => text += &format!("generator search bound: {b}\n"),
        None => text += "generator search bound: none (local ranks are not squares)\n",
    }
    text += &format!("morita trivial: {}\n", payload.trivial);
    if let Some(w) = &payload.witness {
        text += &format!(
            "witness generator with cyclic orders {:?}, ranks {:?}, endomorphism algebra order {}\n",
            w.generator_orders, w.generator_ranks, w.end_order
        );
    }
    Outcome::done(&payload, text, true)
}

fn brauer_compute(spec: &str, bound: u64, config: &Config) -> Result<Outcome> {
    let ring = parse_ring(spec, config)?;
    let data = brauer_data(&ring, bound, config)?;
    let (br, pic, gl1) = data.invariant_triple();
    let mut notes = data.brauer.notes.clone();
    notes.extend(data.picard.notes.iter().cloned());
    notes.extend(data.automorphisms.notes.iter().cloned());
    let complete = data.brauer.complete && data.picard.complete;
    let payload = BrauerPayload {
        ring: ring.descriptor.clone(),
        bound: data.brauer.bound,
        br,
        pic,
        gl1,
        azumaya_algebras: data.brauer.algebras.len(),
        brauer_classes: data.brauer.reps.len(),
        automorphisms_match_picard: data.automorphisms.matches_picard,
        complete,
        notes,
    };
    let mut text = format!("ring {} (bound {})\n", payload.ring, payload.bound);
    text += &format!("brauer invariants: {:?}\n", payload.br);
    text += &format!("picard invariants: {:?}\n", payload.pic);
    text += &format!("unit invariants: {:?}\n", payload.gl1);
    text += &format!(
        "azumaya algebras: {} in {} classes\n",
        payload.azumaya_algebras, payload.brauer_classes
    );
    text += &format!(
        "automorphisms of the trivial class match picard: {}\n",
        payload.automorphisms_match_picard
    );
    text += &format!("complete: {}\n", payload.complete);
    for n in &payload.notes {
        text += &format!("note: {n}\n");
    }
    Outcome::done(&payload, text, complete)
}

fn picard_compute(spec: &str, config: &Config) -> Result<Outcome> {
    let ring = parse_ring(spec, config)?;
    let pd = picard_data(&ring, config)?;
    let payload = PicardPayload {
        ring: ring.descriptor.clone(),
        pic: pd.pic_invariants(),
        gl1: pd.gl1_invariants(),
        classes: pd.reps.len(),
        unit_count: pd.units.len(),
        class_orders: pd.reps.iter().map(|r| r.module.order()).collect(),
        complete: pd.complete,
        notes: pd.notes.clone(),
    };
    let mut text = format!("ring {}\n", payload.ring);
    text += &format!("picard invariants: {:?}\n", payload.pic);
    text += &format!("unit invariants: {:?} ({} units)\n", payload.gl1, payload.unit_count);
    text += &format!(
        "invertible classes: {} with module orders {:?}\n",
        payload.classes, payload.class_orders
    );
    text += &format!("complete: {}\n", payload.complete);
    for n in &payload.notes {
        text += &format!("note: {n}\n");
    }
    Outcome::done(&payload, text, pd.complete)
}

fn gamma_deloop(input: &PathBuf, config: &Config) -> Result<Outcome> {
    let amb: FiniteSymMonGroupoid = serde_json::from_str(&fs::read_to_string(input)?)?;
    validate_groupoid(&amb)?;
    let rep = deloop_check(&amb, config)?;
    let payload = DeloopPayload {
        input: input.display().to_string(),
        objects: amb.objects,
        morphisms: amb.nmor(),
        pi0_components: rep.pi0_components,
        pi1_torsion: rep.pi1_torsion.clone(),
        pi1_free_rank: rep.pi1_free_rank,
        expected: rep.expected.clone(),
        ok: rep.ok,
        dim3_elided: rep.dim3_elided,
        edges: rep.edges,
        triangles: rep.triangles,
    };
    let mut text = format!(
        "groupoid {} ({} objects, {} morphisms)\n",
        payload.input, payload.objects, payload.morphisms
    );
    text += &format!("circle evaluation components: {}\n", payload.pi0_components);
    text += &format!(
        "fundamental group invariants: {:?} (free rank {})\n",
        payload.pi1_torsion, payload.pi1_free_rank
    );
    text += &format!("iso-class group invariants: {:?}\n", payload.expected);
    text += &format!("delooping check: {}\n", if payload.ok { "ok" } else { "failed" });
    text += &format!(
        "three-skeleton: {}\n",
        if payload.dim3_elided { "elided (budget)" } else { "materialized" }
    );
    text += &format!("edges: {}, triangles: {}\n", payload.edges, payload.triangles);
    Outcome::done(&payload, text, true)
}

fn relative_command(
    rings: &[String],
    map: &PathBuf,
    bound: u64,
    config: &Config,
) -> Result<Outcome> {
    let (src_spec, tgt_spec) = match rings {
        [s, t] => (s, t),
        [s, arrow, t] if arrow == "->" => (s, t),
        _ => {
            return Err(Error::Parse(
                "expected SOURCE [->] TARGET ring specifications".into(),
            ))
        }
    };
    let src = parse_ring(src_spec, config)?;
    let tgt = parse_ring(tgt_spec, config)?;
    let mf: RingMapFile = serde_json::from_str(&fs::read_to_string(map)?)?;
    if mf.schema != SCHEMA {
        return Err(Error::Parse(format!("unsupported map file schema {:?}", mf.schema)));
    }
    if let Some(s) = &mf.src {
        if *s != src.descriptor {
            return Err(Error::Validation(format!("map file source is {s}, not {}", src.descriptor)));
        }
    }
    if let Some(t) = &mf.tgt {
        if *t != tgt.descriptor {
            return Err(Error::Validation(format!("map file target is {t}, not {}", tgt.descriptor)));
        }
    }
    let f = RingMap::new(src, tgt, mf.map.clone())?;
    let rep = relative_report(&f, bound, config)?;
    let complete = rep.complete;
    let mut text = format!("ring map {} -> {}\n", rep.src, rep.tgt);
    for (label, s) in [("units", &rep.gl1), ("picard", &rep.pic), ("brauer", &rep.br)] {
        text += &format!(
            "{label}: {} -> {} with kernel {}, image {}, cokernel {} (orders consistent: {})\n",
            s.src_order, s.tgt_order, s.kernel, s.image, s.cokernel, s.orders_consistent
        );
    }
    text += &format!(
        "fiber orders: pi2 {}, pi1 {}, pi0 {}, pi-1 {}\n",
        rep.fiber.pi2, rep.fiber.pi1, rep.fiber.pi0, rep.fiber.pi_neg1
    );
    text += &format!("alternating order identity: {}\n", rep.alternating_identity);
    text += &format!("cardinality relation: {}\n", rep.cardinality_identity);
    text += &format!("complete: {}\n", rep.complete);
    for n in &rep.notes {
        text += &format!("note: {n}\n");
    }
    Outcome::done(&rep, text, complete)
}

fn selftest(config: &Config) -> Result<Outcome> {
    let checks = run_verification(config);
    let passed = checks.iter().filter(|c| c.status == "ok").count();
    let failed = checks.iter().filter(|c| c.status == "fail").count();
    let inconclusive = checks.iter().filter(|c| c.status == "inconclusive").count();
    let mut text = String::new();
    for c in &checks {
        let tag = match c.status.as_str() {
            "ok" => "ok  ",
            "fail" => "FAIL",
            _ => "INC ",
        };
        text += &format!("{tag} {}: {}\n", c.name, c.detail);
    }
    text += &format!("{passed} passed, {failed} failed, {inconclusive} inconclusive\n");
    let payload = SelftestPayload { checks, passed, failed, inconclusive };
    Ok(Outcome {
        payload: serde_json::to_value(&payload)?,
        text,
        complete: inconclusive == 0,
        failed: failed > 0,
        timed: false,
    })
}

// ---------------------------------------------------------------------------
// Verification corpus
// ---------------------------------------------------------------------------

type CheckFn = fn(&Config) -> Result<String>;

/// The named checks behind `selftest`, in a fixed order.
pub fn verification_checks() -> Vec<(&'static str, CheckFn)> {
    vec![
        ("azumaya certification", check_azumaya_certification as CheckFn),
        ("projective generator tri-criterion", check_generator_tri_criterion),
        ("brauer triviality by enumeration", check_brauer_triviality),
        ("opposite algebras certify inverses", check_opposite_inverses),
        ("picard identification", check_picard_identification),
        ("segal specialness", check_segal_specialness),
        ("delooping realizes the class group", check_delooping),
        ("pushforward functoriality", check_pushforward_functoriality),
        ("relative sequence bookkeeping", check_relative_sequence),
        ("five units never occur", check_five_units),
    ]
}

pub fn run_verification(config: &Config) -> Vec<CheckOutcome> {
    verification_checks()
        .into_iter()
        .map(|(name, check)| match check(config) {
            Ok(detail) => CheckOutcome { name: name.into(), status: "ok".into(), detail },
            Err(e) if e.is_inconclusive() => {
                CheckOutcome { name: name.into(), status: "inconclusive".into(), detail: e.to_string() }
            }
            Err(e) => CheckOutcome { name: name.into(), status: "fail".into(), detail: e.to_string() },
        })
        .collect()
}

fn check_fail(msg: String) -> Error {
    Error::Validation(msg)
}

/// The degree-two unramified extension of `Z/4`: adjoin a root of
/// `x^2 + x + 1`, so `x^2 = 3 + 3x`. Elements `a + bx` are coded `4a + b`.
fn galois_ring_4_2() -> Result<Arc<FiniteCommRing>> {
    let n = 16usize;
    let code = |a: u32, b: u32| a * 4 + b;
    let mut add = vec![0u32; n * n];
    let mut mul = vec![0u32; n * n];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let x = code(a, b) as usize;
                    let y = code(c, d) as usize;
                    add[x * n + y] = code((a + c) % 4, (b + d) % 4);
                    mul[x * n + y] =
                        code((a * c + 3 * b * d) % 4, (a * d + b * c + 3 * b * d) % 4);
                }
            }
        }
    }
    FiniteCommRing::from_tables(n, add, mul, code(0, 0), code(1, 0), "Z/4[x]/(x^2+x+1)".into())
}

/// The unital ring map from a ring generated by `1` (any `Z/n`) into `tgt`.
fn scalar_extension_map(
    src: &Arc<FiniteCommRing>,
    tgt: &Arc<FiniteCommRing>,
) -> Result<RingMap> {
    let mut map = vec![u32::MAX; src.order];
    let (mut x, mut y) = (src.zero, tgt.zero);
    loop {
        map[x as usize] = y;
        x = src.add(x, src.one);
        y = tgt.add(y, tgt.one);
        if x == src.zero {
            break;
        }
    }
    if map.iter().any(|&v| v == u32::MAX) {
        return Err(check_fail("base ring is not generated by its unit".into()));
    }
    RingMap::new(src.clone(), tgt.clone(), map)
}

fn extension_fixtures(config: &Config) -> Result<Vec<(Arc<FiniteCommRing>, Arc<FiniteCommRing>)>> {
    Ok(vec![
        (parse_ring("Z/2", config)?, parse_ring("GF(4)", config)?),
        (parse_ring("Z/3", config)?, parse_ring("GF(9)", config)?),
        (parse_ring("Z/4", config)?, galois_ring_4_2()?),
        (parse_ring("Z/2", config)?, parse_ring("Z/2 x Z/2", config)?),
        (parse_ring("Z/3", config)?, parse_ring("Z/3 x Z/3", config)?),
    ])
}

/// Matrix algebras over the ring corpus certify as Azumaya, and proper
/// commutative extensions fail exactly at sandwich bijectivity.
pub fn check_azumaya_certification(config: &Config) -> Result<String> {
    let mut certified = 0usize;
    for spec in RING_CORPUS {
        let ring = parse_ring(spec, config)?;
        let dec = local_decomposition(&ring)?;
        for n in 1..=2 {
            let a = matrix_algebra(&ring, n, config)?;
            let cert = is_azumaya(&a, &dec, config)?;
            if !cert.azumaya {
                return Err(check_fail(format!(
                    "{n} by {n} matrices over {spec} failed at stage {:?}",
                    cert.failed_stage
                )));
            }
            certified += 1;
        }
    }
    let mut rejected = 0usize;
    for (base, ext) in extension_fixtures(config)? {
        let f = scalar_extension_map(&base, &ext)?;
        let a = algebra_from_extension(&f)?;
        let dec = local_decomposition(&base)?;
        let cert = is_azumaya(&a, &dec, config)?;
        if cert.azumaya || cert.sandwich_bijective != Some(false) {
            return Err(check_fail(format!(
                "extension {} over {} was not rejected by the sandwich test",
                ext.descriptor, base.descriptor
            )));
        }
        rejected += 1;
    }
    Ok(format!(
        "{certified} matrix algebras certified, {rejected} commutative extensions rejected"
    ))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The local factor `eR` as an `R`-module.
fn factor_module(ring: &Arc<FiniteCommRing>, f: &LocalFactor) -> Result<Arc<FGModule>> {
    let fr = f.ring.clone();
    let elems: Vec<u64> = (0..fr.order as u64).collect();
    let zero = fr.zero as u64;
    let fr_add = fr.clone();
    let add = move |a: u64, b: u64| fr_add.add(a as u32, b as u32) as u64;
    let proj = f.proj.clone();
    let fr_act = fr.clone();
    let act = move |r: u32, x: u64| fr_act.mul(proj[r as usize], x as u32) as u64;
    Ok(module_from_group(ring, &elems, zero, &add, &act)?.0)
}

/// A complement `Q` with `P (x) Q` free, built from the rank profile out of
/// local factors and verified by an explicit isomorphism. `None` when the
/// rank has a zero (no complement is attempted) or the verification leaves
/// the small-search regime.
fn tensor_complement(
    p: &Arc<FGModule>,
    ranks: &[u64],
    dec: &crate::ring::LocalDecomposition,
    config: &Config,
) -> Result<Option<usize>> {
    if ranks.iter().any(|&r| r == 0) {
        return Ok(None);
    }
    let mut n = 1u64;
    for &r in ranks {
        n = n / gcd(n, r) * r;
    }
    let ring = &p.ring;
    if n > 5 || (ring.order as u128).pow(n as u32) > 1024 {
        return Ok(None);
    }
    let mut q: Option<Arc<FGModule>> = None;
    for (i, f) in dec.factors.iter().enumerate() {
        let local = factor_module(ring, f)?;
        for _ in 0..(n / ranks[i]) {
            q = Some(match q {
                None => local.clone(),
                Some(prev) => direct_sum(&prev, &local, config)?.module,
            });
        }
    }
    let q = q.ok_or_else(|| check_fail("empty local decomposition".into()))?;
    let t = tensor_over(p, &q, config)?;
    let free = FreeModule::new(ring, n as usize, config)?;
    if module_isomorphic(&t.module, &free.module, config)?.is_none() {
        return Err(check_fail("constructed tensor complement is not free".into()));
    }
    Ok(Some(n as usize))
}

/// On a corpus of projective modules, the three generator tests (trace ideal
/// full, rank everywhere positive, tensor complement to a free module) never
/// disagree where conclusive.
pub fn check_generator_tri_criterion(config: &Config) -> Result<String> {
    let mut total = 0usize;
    let mut witnesses = 0usize;
    for spec in RING_CORPUS {
        let ring = parse_ring(spec, config)?;
        let dec = local_decomposition(&ring)?;
        let mut taken = 0usize;
        for m in enumerate_modules(&ring, 32, config)? {
            if taken >= 12 {
                break;
            }
            if m.ngens() == 0 || is_projective(&m, &dec, config)?.is_none() {
                continue;
            }
            taken += 1;
            total += 1;
            let ranks = rank_function(&m, &dec)?;
            let positive = ranks.iter().all(|&r| r > 0);
            let full_trace = trace_ideal(&m, config)?.len() == ring.order;
            if positive != full_trace {
                return Err(check_fail(format!(
                    "rank and trace tests disagree over {spec} on a module with orders {:?}",
                    m.orders
                )));
            }
            match tensor_complement(&m, &ranks, &dec, config)? {
                Some(_) if !positive => {
                    return Err(check_fail(format!(
                        "tensor complement found for a rank-deficient module over {spec}"
                    )))
                }
                Some(_) => witnesses += 1,
                None => {}
            }
        }
    }
    if total < 30 {
        return Err(check_fail(format!("projective corpus too small: {total} modules")));
    }
    if witnesses < 10 {
        return Err(check_fail(format!("too few tensor complements verified: {witnesses}")));
    }
    Ok(format!(
        "{total} projective modules, rank and trace criteria agree, {witnesses} tensor complements verified"
    ))
}

/// Exhaustive enumeration up to the default bound finds only the trivial
/// Brauer class, and every Azumaya algebra carries a Morita witness.
pub fn check_brauer_triviality(config: &Config) -> Result<String> {
    let mut algebras = 0usize;
    for spec in RING_CORPUS {
        let ring = parse_ring(spec, config)?;
        let bg = brauer_group(&ring, DEFAULT_BOUND, config)?;
        if !bg.complete {
            return Err(Error::Inconclusive { stage: "azumaya enumeration", limit: bg.bound });
        }
        if !bg.invariants().is_empty() {
            return Err(check_fail(format!(
                "brauer group of {spec} came out {:?}",
                bg.invariants()
            )));
        }
        if bg.class_of.iter().any(|&c| c != bg.unit_class) {
            return Err(check_fail(format!("a nontrivial class appeared over {spec}")));
        }
        if bg.trivial_witnesses.iter().any(|w| w.is_none()) {
            return Err(check_fail(format!("an algebra over {spec} lacks a Morita witness")));
        }
        if bg.certificates.iter().any(|c| !c.azumaya) {
            return Err(check_fail(format!("a non-Azumaya candidate was kept over {spec}")));
        }
        algebras += bg.algebras.len();
    }
    Ok(format!(
        "{algebras} Azumaya algebras over {} rings, every class trivial with a Morita witness",
        RING_CORPUS.len()
    ))
}

/// Every enumerated Azumaya algebra certifies the inverse path through its
/// opposite: the sandwich map is an isomorphism onto the endomorphisms of a
/// projective generator.
pub fn check_opposite_inverses(config: &Config) -> Result<String> {
    let mut certs = 0usize;
    for spec in RING_CORPUS {
        let ring = parse_ring(spec, config)?;
        let bg = brauer_group(&ring, DEFAULT_BOUND, config)?;
        if bg.opposite_certs.len() != bg.algebras.len() {
            return Err(check_fail(format!("missing opposite certificates over {spec}")));
        }
        for cert in &bg.opposite_certs {
            if !cert.sandwich_bijective || cert.generator_ranks.iter().any(|&r| r == 0) {
                return Err(check_fail(format!("inverse path not certified over {spec}")));
            }
        }
        certs += bg.opposite_certs.len();
        let dec = local_decomposition(&ring)?;
        let r_alg = regular_algebra(&ring, config)?;
        let t = algebra_tensor(&r_alg, &r_alg.opposite(), config)?;
        if trivialization(&t, &dec, config)?.is_none() {
            return Err(check_fail(format!(
                "the regular algebra tensored with its opposite failed to trivialize over {spec}"
            )));
        }
    }
    Ok(format!(
        "{certs} opposite-inverse certificates: sandwich bijective onto the endomorphisms of a projective generator"
    ))
}

/// Automorphisms of the trivial Brauer class realize the Picard group, and
/// the Picard/unit data match direct enumeration; the composite-ring triple
/// comes out as expected.
pub fn check_picard_identification(config: &Config) -> Result<String> {
    let z12 = parse_ring("Z/12", config)?;
    let data = brauer_data(&z12, DEFAULT_BOUND, config)?;
    let (br, pic, gl1) = data.invariant_triple();
    if !br.is_empty() || !pic.is_empty() || gl1 != vec![2, 2] {
        return Err(check_fail(format!("Z/12 triple came out ({br:?}, {pic:?}, {gl1:?})")));
    }
    if !data.automorphisms.matches_picard {
        return Err(check_fail("Z/12 automorphisms do not match picard".into()));
    }
    let mut checked = 1usize;
    for spec in RING_CORPUS.iter().copied().chain(["GF(7)"]) {
        let ring = parse_ring(spec, config)?;
        let pd = picard_data(&ring, config)?;
        if !pd.complete {
            return Err(Error::Inconclusive { stage: "picard enumeration", limit: ring.order as u64 });
        }
        if pd.gl1_invariants() != ring.unit_group().0.invariant_factors() {
            return Err(check_fail(format!("unit invariants of {spec} disagree with the table")));
        }
        if !pd.pic_invariants().is_empty() || pd.reps.len() != 1 {
            return Err(check_fail(format!("picard group of {spec} is not trivial")));
        }
        let free1 = FreeModule::new(&ring, 1, config)?;
        if module_isomorphic(&pd.reps[0].module, &free1.module, config)?.is_none() {
            return Err(check_fail(format!("the invertible class over {spec} is not free")));
        }
        let aut = brauer_automorphisms(&ring, &pd, config)?;
        if !aut.matches_picard {
            return Err(check_fail(format!("automorphisms over {spec} do not realize picard")));
        }
        checked += 1;
    }
    Ok(format!(
        "{checked} rings: unit and picard data match direct enumeration, automorphisms realize picard"
    ))
}

fn discrete_corpus() -> Vec<AbGroup> {
    vec![
        AbGroup::from_cyclic_orders(&[2]),
        AbGroup::from_cyclic_orders(&[3]),
        AbGroup::from_cyclic_orders(&[4]),
        AbGroup::from_cyclic_orders(&[2, 2]),
    ]
}

fn small_group_corpus() -> Vec<AbGroup> {
    vec![
        AbGroup::trivial(),
        AbGroup::from_cyclic_orders(&[2]),
        AbGroup::from_cyclic_orders(&[3]),
        AbGroup::from_cyclic_orders(&[4]),
        AbGroup::from_cyclic_orders(&[2, 2]),
    ]
}

/// Restriction to singleton supports is an equivalence at levels two and
/// three, for discrete groups and for two-stage synthetic groupoids.
pub fn check_segal_specialness(config: &Config) -> Result<String> {
    let mut checks = 0usize;
    for g in discrete_corpus() {
        let amb = from_abelian_group(&g);
        for n in [2usize, 3] {
            if !segal_check(&amb, n, config)?.equivalent {
                return Err(check_fail(format!(
                    "comparison failed at level {n} for the discrete group of order {}",
                    g.order
                )));
            }
            checks += 1;
        }
    }
    for p0 in small_group_corpus() {
        for p1 in small_group_corpus() {
            let amb = synthetic_picard(&p0, &p1);
            for n in [2usize, 3] {
                if !segal_check(&amb, n, config)?.equivalent {
                    return Err(check_fail(format!(
                        "comparison failed at level {n} for the synthetic pair ({}, {})",
                        p0.order, p1.order
                    )));
                }
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} comparison functors are equivalences"))
}

/// The circle evaluation of every group-like corpus groupoid is connected
/// with fundamental group the group of iso-classes.
pub fn check_delooping(config: &Config) -> Result<String> {
    let mut checks = 0usize;
    let mut elided = 0usize;
    let mut ambients: Vec<(String, FiniteSymMonGroupoid)> = Vec::new();
    for g in discrete_corpus() {
        ambients.push((format!("discrete group of order {}", g.order), from_abelian_group(&g)));
    }
    for p0 in small_group_corpus() {
        for p1 in small_group_corpus() {
            ambients.push((
                format!("synthetic pair ({}, {})", p0.order, p1.order),
                synthetic_picard(&p0, &p1),
            ));
        }
    }
    for (label, amb) in &ambients {
        let rep = deloop_check(amb, config)?;
        if !rep.ok {
            return Err(check_fail(format!(
                "delooping of the {label} gave {} components with invariants {:?}, expected {:?}",
                rep.pi0_components, rep.pi1_torsion, rep.expected
            )));
        }
        if rep.dim3_elided {
            elided += 1;
        }
        checks += 1;
    }
    Ok(format!(
        "{checks} deloopings realize the class group on a connected evaluation ({elided} with the three-skeleton elided)"
    ))
}

fn pointed_maps(k: usize, l: usize) -> Vec<PointedMap> {
    let mut out = Vec::new();
    let mut map = vec![0usize; k + 1];
    loop {
        out.push(PointedMap::new(k, l, map.clone()).expect("pointed map within range"));
        let mut t = 1;
        while t <= k {
            map[t] += 1;
            if map[t] <= l {
                break;
            }
            map[t] = 0;
            t += 1;
        }
        if t > k {
            break;
        }
    }
    out
}

/// Pushforward along pointed maps is strictly functorial on objects and
/// morphisms, and the induced map on delooped fundamental groups of the
/// two-to-one group map is the expected surjection.
pub fn check_pushforward_functoriality(config: &Config) -> Result<String> {
    let two = AbGroup::from_cyclic_orders(&[2]);
    let ambients = vec![from_abelian_group(&two), synthetic_picard(&two, &two)];
    let mut object_checks = 0usize;
    let mut morphism_checks = 0usize;
    for amb in &ambients {
        let mut levels: Vec<Vec<GammaObject>> = Vec::new();
        for n in 0..=3 {
            levels.push(gamma_level(amb, n, config)?);
        }
        let mut auts: Vec<Vec<Vec<GammaMorphism>>> = Vec::new();
        for objs in &levels {
            let mut per = Vec::new();
            for a in objs {
                per.push(gamma_hom(amb, a, a)?);
            }
            auts.push(per);
        }
        let maps: Vec<Vec<Vec<PointedMap>>> = (0..=3)
            .map(|k| (0..=3).map(|l| pointed_maps(k, l)).collect())
            .collect();
        for k in 0..=3usize {
            for l in 0..=3usize {
                for m in 0..=3usize {
                    for beta in &maps[k][l] {
                        for alpha in &maps[l][m] {
                            let both = alpha.compose(beta)?;
                            for (a, fs) in levels[k].iter().zip(&auts[k]) {
                                let staged = pushforward_object(
                                    amb,
                                    alpha,
                                    &pushforward_object(amb, beta, a)?,
                                )?;
                                if pushforward_object(amb, &both, a)? != staged {
                                    return Err(check_fail(
                                        "object pushforward is not functorial".into(),
                                    ));
                                }
                                object_checks += 1;
                                for f in fs {
                                    let direct = pushforward_morphism(&both, f);
                                    let via = pushforward_morphism(
                                        alpha,
                                        &pushforward_morphism(beta, f),
                                    );
                                    if direct != via {
                                        return Err(check_fail(
                                            "morphism pushforward is not functorial".into(),
                                        ));
                                    }
                                    morphism_checks += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let four = AbGroup::from_cyclic_orders(&[4]);
    let g4 = from_abelian_group(&four);
    let g2 = from_abelian_group(&two);
    let functor = strict_hom_functor(&g4, &g2, &[0, 1, 0, 1]);
    let dm = deloop_pi1_map(&g4, &g2, &functor, config)?;
    if dm.src.invariant_factors() != vec![4] || dm.tgt.invariant_factors() != vec![2] {
        return Err(check_fail("delooped groups of the two-to-one map are wrong".into()));
    }
    if dm.map.image_group(&dm.tgt).order != 2 {
        return Err(check_fail("induced map on delooped groups is not surjective".into()));
    }
    Ok(format!(
        "{object_checks} object and {morphism_checks} morphism instances commute; the delooped two-to-one map is surjective"
    ))
}

/// Kernel, image, and cokernel orders balance through unit, Picard, and
/// Brauer maps for residue-style ring maps.
pub fn check_relative_sequence(config: &Config) -> Result<String> {
    let fixtures: Vec<(&str, &str, Vec<u32>)> = vec![
        ("Z/4", "Z/2", vec![0, 1, 0, 1]),
        ("Z/9", "Z/3", vec![0, 1, 2, 0, 1, 2, 0, 1, 2]),
        ("Z/6", "Z/2", vec![0, 1, 0, 1, 0, 1]),
    ];
    let count = fixtures.len();
    for (s, t, map) in fixtures {
        let src = parse_ring(s, config)?;
        let tgt = parse_ring(t, config)?;
        let f = RingMap::new(src, tgt, map)?;
        let rep = relative_report(&f, DEFAULT_BOUND, config)?;
        if !rep.complete {
            return Err(Error::Inconclusive { stage: "relative report", limit: DEFAULT_BOUND });
        }
        if !rep.alternating_identity || !rep.cardinality_identity {
            return Err(check_fail(format!("order identities failed for {s} -> {t}")));
        }
        for (label, sm) in [("unit", &rep.gl1), ("picard", &rep.pic), ("brauer", &rep.br)] {
            if !sm.orders_consistent {
                return Err(check_fail(format!(
                    "{label} map orders are inconsistent for {s} -> {t}"
                )));
            }
        }
    }
    Ok(format!("{count} ring maps: kernel, image, and cokernel orders balance"))
}

/// Every ring the generator grammar can build with order at most `max`.
pub fn constructible_specs(max: u64) -> Vec<String> {
    let mut atoms: Vec<(String, u64)> = Vec::new();
    for n in 2..=max {
        atoms.push((format!("Z/{n}"), n));
    }
    for q in 2..=max {
        if crate::abelian::is_prime_power(q).is_some() {
            atoms.push((format!("GF({q})"), q));
        }
    }
    fn extend(
        atoms: &[(String, u64)],
        start: usize,
        order: u64,
        parts: &mut Vec<String>,
        max: u64,
        out: &mut Vec<String>,
    ) {
        if !parts.is_empty() {
            out.push(parts.join(" x "));
        }
        for i in start..atoms.len() {
            let next = order * atoms[i].1;
            if next <= max {
                parts.push(atoms[i].0.clone());
                extend(atoms, i, next, parts, max, out);
                parts.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(&atoms, 0, 1, &mut Vec::new(), max, &mut out);
    out
}

/// No constructible ring of order at most 64 has a unit group of order five.
pub fn check_five_units(config: &Config) -> Result<String> {
    let specs = constructible_specs(64);
    for spec in &specs {
        let ring = parse_ring(spec, config)?;
        if ring.units().len() == 5 {
            return Err(check_fail(format!("{spec} has exactly five units")));
        }
    }
    if specs.len() < 100 {
        return Err(check_fail(format!("generator corpus unexpectedly small: {}", specs.len())));
    }
    Ok(format!(
        "{} constructible rings of order at most 64, none with exactly five units",
        specs.len()
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(line: &[&str]) -> Vec<String> {
        line.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn galois_ring_fixture_is_local_with_quartic_residue_field() {
        let r = galois_ring_4_2().unwrap();
        assert_eq!(r.order, 16);
        let dec = local_decomposition(&r).unwrap();
        assert_eq!(dec.factors.len(), 1);
        assert_eq!(dec.factors[0].residue_field.order, 4);
        let f = scalar_extension_map(&parse_ring("Z/4", &Config::default()).unwrap(), &r).unwrap();
        assert_eq!(f.apply(3), 12);
    }

    #[test]
    fn algebra_files_round_trip_with_the_free_marker() {
        let config = Config::default();
        let ring = parse_ring("Z/4", &config).unwrap();
        let a = matrix_algebra(&ring, 2, &config).unwrap();
        let file = algebra_to_file(&a);
        let json = serde_json::to_string(&file).unwrap();
        let parsed: AlgebraFile = serde_json::from_str(&json).unwrap();
        let b = algebra_from_file(&parsed, &ring, &config).unwrap();
        assert!(b.free.is_some());
        assert!(a.same_structure(&b));
    }

    #[test]
    fn algebra_files_reject_schema_and_ring_mismatches() {
        let config = Config::default();
        let ring = parse_ring("Z/4", &config).unwrap();
        let mut file = algebra_to_file(&matrix_algebra(&ring, 1, &config).unwrap());
        file.schema = "v0".into();
        assert!(algebra_from_file(&file, &ring, &config).is_err());
        file.schema = SCHEMA.into();
        let other = parse_ring("Z/2", &config).unwrap();
        assert!(algebra_from_file(&file, &other, &config).is_err());
    }

    #[test]
    fn groupoid_validation_rejects_corrupt_tables() {
        let g = from_abelian_group(&AbGroup::from_cyclic_orders(&[2]));
        assert!(validate_groupoid(&g).is_ok());
        let mut bad = g.clone();
        bad.compose[0][0] = None;
        assert!(validate_groupoid(&bad).is_err());
        let mut bad = g.clone();
        bad.symmetry[0] = 99;
        assert!(validate_groupoid(&bad).is_err());
        let mut bad = g;
        bad.schema = "v2".into();
        assert!(validate_groupoid(&bad).is_err());
    }

    #[test]
    fn exit_codes_separate_errors_from_success() {
        assert_eq!(run_from(&args(&["brauerk", "ring", "info", "Z/6"])), 0);
        assert_eq!(run_from(&args(&["brauerk", "ring", "info", "Z/1"])), 1);
        assert_eq!(run_from(&args(&["brauerk", "ring", "info", "Z/banana"])), 1);
        assert_eq!(run_from(&args(&["brauerk", "nonsense"])), 1);
        assert_eq!(run_from(&args(&["brauerk", "--help"])), 0);
    }

    #[test]
    fn reports_round_trip_byte_identically() {
        let report = Report {
            schema: SCHEMA.into(),
            command: "picard compute Z/12".into(),
            config: ConfigEcho::of(&Config::default()),
            complete: true,
            result: serde_json::json!({"zeta": 1, "alpha": [2, 2], "mid": {"b": 1, "a": 2}}),
            wall_ms: Some(7),
        };
        let first = serde_json::to_string_pretty(&report).unwrap();
        let reparsed: Report = serde_json::from_str(&first).unwrap();
        assert_eq!(serde_json::to_string_pretty(&reparsed).unwrap(), first);
        let value: Value = serde_json::from_str(&first).unwrap();
        assert_eq!(serde_json::to_string_pretty(&value).unwrap(), first);
    }

    #[test]
    fn pointed_map_families_have_the_right_size() {
        assert_eq!(pointed_maps(0, 3).len(), 1);
        assert_eq!(pointed_maps(2, 1).len(), 4);
        assert_eq!(pointed_maps(3, 3).len(), 64);
    }

    #[test]
    fn constructible_corpus_contains_products_and_fields() {
        let specs = constructible_specs(16);
        assert!(specs.iter().any(|s| s == "Z/16"));
        assert!(specs.iter().any(|s| s == "GF(16)"));
        assert!(specs.iter().any(|s| s == "Z/2 x Z/8"));
        assert!(specs.iter().any(|s| s == "Z/2 x Z/2 x Z/2 x Z/2"));
        assert!(specs.iter().all(|s| !s.contains("Z/32")));
    }
}
