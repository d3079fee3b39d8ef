//! Brauer classes of a finite commutative ring: exhaustive Azumaya
//! enumeration organized into a group by certified Morita comparisons,
//! opposite-algebra inverse certificates through the sandwich map,
//! automorphisms of the trivial class, scalar extension along ring maps,
//! and the long-exact-sequence bookkeeping of a relative Brauer report.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::abelian::{AbGroup, AbMap};
use crate::algebra::{algebra_tensor, base_change_algebra, regular_algebra, StructuredAlgebra};
use crate::azumaya::{
    balanced_tensor, bimodule_invertible, bimodule_isomorphic, enumerate_azumaya, is_azumaya,
    morita_trivialization, sandwich_map, AzumayaCertificate, Bimodule, MoritaWitness,
};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::module::{
    enumerate_modules, is_projective, module_isomorphic, rank_function, FGModule,
    SplittingCertificate,
};
use crate::picard::{picard_data, PicardData};
use crate::ring::{local_decomposition, FiniteCommRing, LocalDecomposition, RingMap};
use crate::smc::SCHEMA;
use crate::tensor::base_change;

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Largest order a projective generator can have if its endomorphism
/// algebra is `t`: the generator is locally free of the square root of
/// `t`'s local rank. `None` when some local rank is not a perfect square,
/// which already rules out Morita triviality.
pub fn generator_bound(t: &StructuredAlgebra, dec: &LocalDecomposition) -> Result<Option<u64>> {
    let ranks = rank_function(&t.module, dec)?;
    let mut bound = 1u64;
    for (i, &m) in ranks.iter().enumerate() {
        let n = isqrt(m);
        if n * n != m {
            return Ok(None);
        }
        let r = dec.factors[i].ring.order as u64;
        bound = bound.saturating_mul(r.saturating_pow(n as u32));
    }
    Ok(Some(bound))
}

/// Morita triviality of an algebra, searching generators only up to the
/// order forced by the local ranks.
pub fn trivialization(
    a: &StructuredAlgebra,
    dec: &LocalDecomposition,
    config: &Config,
) -> Result<Option<MoritaWitness>> {
    let Some(bound) = generator_bound(a, dec)? else {
        return Ok(None);
    };
    morita_trivialization(a, dec, bound, config)
}

/// Whether `a` and `b` represent the same Brauer class, decided by
/// trivializing `a (x) b°`; the witness generator is returned on success.
pub fn same_brauer_class(
    a: &StructuredAlgebra,
    b: &StructuredAlgebra,
    dec: &LocalDecomposition,
    config: &Config,
) -> Result<Option<MoritaWitness>> {
    let t = algebra_tensor(a, &b.opposite(), config)?;
    trivialization(&t, dec, config)
}

/// Certified inverse path for a class: the sandwich map is a verified
/// algebra homomorphism `A (x) A° -> End_R(A)`, bijective exactly for
/// Azumaya algebras, and `End_R(A)` is Morita-trivial because the module
/// of `A` is a projective generator, which the rank and splitting data
/// certify directly.
pub struct OppositeCertificate {
    pub sandwich_bijective: bool,
    /// Everywhere-positive local ranks of the generator module.
    pub generator_ranks: Vec<u64>,
    pub splitting: SplittingCertificate,
    /// `|End_R(A)| = |A (x) A°|`, determined by the local ranks.
    pub end_order: u64,
}

pub fn opposite_inverse_certificate(
    a: &StructuredAlgebra,
    dec: &LocalDecomposition,
    config: &Config,
) -> Result<OppositeCertificate> {
    let s = sandwich_map(a, config)?;
    let sandwich_bijective = s.bijective(dec);
    if !sandwich_bijective {
        return Err(Error::Validation(
            "sandwich map is not bijective; the algebra is not Azumaya".into(),
        ));
    }
    let generator_ranks = rank_function(&a.module, dec)?;
    if generator_ranks.iter().any(|&r| r == 0) {
        return Err(Error::Validation("algebra module is not a generator".into()));
    }
    let splitting = is_projective(&a.module, dec, config)?
        .ok_or_else(|| Error::Validation("algebra module is not projective".into()))?;
    let mut end_order = 1u64;
    for (i, &n) in generator_ranks.iter().enumerate() {
        let r = dec.factors[i].ring.order as u64;
        end_order = end_order.saturating_mul(r.saturating_pow((n * n) as u32));
    }
    Ok(OppositeCertificate { sandwich_bijective, generator_ranks, splitting, end_order })
}

/// The Brauer group discovered from an exhaustive Azumaya enumeration up to
/// a module-order bound. Classes are certified on both sides: membership by
/// a Morita witness, the group law by classified tensor products.
pub struct BrauerComputation {
    pub group: AbGroup,
    pub unit_class: usize,
    /// One algebra per class; index matches the group element.
    pub reps: Vec<StructuredAlgebra>,
    /// Every enumerated Azumaya algebra up to isomorphism.
    pub algebras: Vec<StructuredAlgebra>,
    pub certificates: Vec<AzumayaCertificate>,
    /// Brauer class of each enumerated algebra.
    pub class_of: Vec<usize>,
    /// Morita witness for each enumerated algebra in the trivial class.
    pub trivial_witnesses: Vec<Option<MoritaWitness>>,
    /// Inverse certificate for each enumerated algebra.
    pub opposite_certs: Vec<OppositeCertificate>,
    pub bound: u64,
    pub complete: bool,
    pub notes: Vec<String>,
}

impl BrauerComputation {
    /// Class index of an Azumaya algebra within the computed group.
    pub fn classify(
        &self,
        a: &StructuredAlgebra,
        dec: &LocalDecomposition,
        config: &Config,
    ) -> Result<usize> {
        if trivialization(a, dec, config)?.is_some() {
            return Ok(self.unit_class);
        }
        for (c, rep) in self.reps.iter().enumerate() {
            if c == self.unit_class {
                continue;
            }
            if same_brauer_class(a, rep, dec, config)?.is_some() {
                return Ok(c);
            }
        }
        Err(Error::Validation(
            "algebra does not match any Brauer class discovered up to the bound".into(),
        ))
    }

    pub fn invariants(&self) -> Vec<u64> {
        self.group.invariant_factors()
    }
}

pub fn brauer_group(
    ring: &Arc<FiniteCommRing>,
    bound: u64,
    config: &Config,
) -> Result<BrauerComputation> {
    let dec = local_decomposition(ring)?;
    let bound = bound.max(ring.order as u64);
    let en = enumerate_azumaya(ring, &dec, bound, config)?;
    let mut notes = en.notes;
    // the trivial class is represented by the ring itself
    let mut reps = vec![regular_algebra(ring, config)?];
    let unit_class = 0usize;
    let mut class_of = Vec::with_capacity(en.algebras.len());
    let mut trivial_witnesses = Vec::with_capacity(en.algebras.len());
    for a in &en.algebras {
        if let Some(w) = trivialization(a, &dec, config)? {
            class_of.push(unit_class);
            trivial_witnesses.push(Some(w));
            continue;
        }
        trivial_witnesses.push(None);
        let mut found = None;
        for (c, rep) in reps.iter().enumerate().skip(1) {
            if same_brauer_class(a, rep, &dec, config)?.is_some() {
                found = Some(c);
                break;
            }
        }
        match found {
            Some(c) => class_of.push(c),
            None => {
                reps.push(a.clone());
                class_of.push(reps.len() - 1);
            }
        }
    }
    // group law: classify every product of representatives
    let k = reps.len();
    let mut table = vec![0u32; k * k];
    for i in 0..k {
        for j in 0..k {
            let t = algebra_tensor(&reps[i], &reps[j], config)?;
            let mut cls = None;
            if trivialization(&t, &dec, config)?.is_some() {
                cls = Some(unit_class);
            } else {
                for (c, rep) in reps.iter().enumerate().skip(1) {
                    if same_brauer_class(&t, rep, &dec, config)?.is_some() {
                        cls = Some(c);
                        break;
                    }
                }
            }
            let Some(c) = cls else {
                return Err(Error::Validation(
                    "product of Brauer classes left the discovered classes".into(),
                ));
            };
            table[i * k + j] = c as u32;
        }
    }
    let group = AbGroup::from_table(k, table, unit_class as u32);
    let mut opposite_certs = Vec::with_capacity(en.algebras.len());
    for a in &en.algebras {
        opposite_certs.push(opposite_inverse_certificate(a, &dec, config)?);
    }
    if !en.complete {
        notes.push("enumeration was cut by a budget; classes may be missing".into());
    }
    Ok(BrauerComputation {
        group,
        unit_class,
        reps,
        algebras: en.algebras,
        certificates: en.certificates,
        class_of,
        trivial_witnesses,
        opposite_certs,
        bound,
        complete: en.complete,
        notes,
    })
}

/// Scalar extension of an Azumaya algebra, re-certified over the target.
pub fn azumaya_base_change(
    f: &RingMap,
    a: &StructuredAlgebra,
    config: &Config,
) -> Result<(StructuredAlgebra, AzumayaCertificate)> {
    let b = base_change_algebra(f, a, config)?;
    let dec = local_decomposition(&f.tgt)?;
    let cert = is_azumaya(&b, &dec, config)?;
    if !cert.azumaya {
        return Err(Error::Validation(format!(
            "scalar extension of {} lost the Azumaya property at stage {:?}",
            a.descriptor, cert.failed_stage
        )));
    }
    Ok((b, cert))
}

/// The ring acting on a module by scalars on both sides, as a bimodule
/// over the regular algebra.
pub fn scalar_bimodule(r_alg: &StructuredAlgebra, m: &Arc<FGModule>) -> Result<Bimodule> {
    let ring = &m.ring;
    let basis = ring.additive_basis();
    let ka = r_alg.module.ngens();
    let km = m.ngens();
    if ka != basis.gens.len() {
        return Err(Error::Validation("regular algebra generators do not match the ring basis".into()));
    }
    let left: Vec<Vec<u64>> = (0..ka)
        .map(|i| (0..km).map(|j| m.scalar(basis.gens[i] as u32, m.gen_elem(j))).collect())
        .collect();
    let right: Vec<Vec<u64>> = (0..km)
        .map(|j| (0..ka).map(|i| m.scalar(basis.gens[i] as u32, m.gen_elem(j))).collect())
        .collect();
    Bimodule::new(r_alg.clone(), r_alg.clone(), m.clone(), left, right)
}

/// Automorphisms of the trivial Brauer class: invertible symmetric
/// bimodules over the ring. The report verifies, over every module of ring
/// order, that bimodule invertibility coincides with membership in the
/// Picard classes, and that tensor composition realizes the Picard group.
pub struct AutBrauerReport {
    pub group: AbGroup,
    pub invertible_classes: usize,
    pub scanned: usize,
    pub matches_picard: bool,
    pub notes: Vec<String>,
}

pub fn brauer_automorphisms(
    ring: &Arc<FiniteCommRing>,
    pd: &PicardData,
    config: &Config,
) -> Result<AutBrauerReport> {
    let r_alg = regular_algebra(ring, config)?;
    let mut bims = Vec::with_capacity(pd.reps.len());
    for rep in &pd.reps {
        let b = scalar_bimodule(&r_alg, &rep.module)?;
        let inv = bimodule_invertible(&b, config)?;
        if !inv.invertible {
            return Err(Error::Validation(format!(
                "invertible module gives a non-invertible bimodule (stage {:?})",
                inv.failed_stage
            )));
        }
        bims.push(b);
    }
    // exhaustive converse: over all modules of ring order, bimodule
    // invertibility must single out exactly the Picard classes
    let mut scanned = 0usize;
    let mut invertible_classes = 0usize;
    let mut equivalence_holds = true;
    let mut notes = Vec::new();
    for m in enumerate_modules(ring, ring.order as u64, config)? {
        if m.order() != ring.order as u64 {
            continue;
        }
        scanned += 1;
        let b = scalar_bimodule(&r_alg, &m)?;
        let inv = bimodule_invertible(&b, config)?.invertible;
        if inv {
            invertible_classes += 1;
        }
        let mut in_picard = false;
        for rep in &pd.reps {
            if module_isomorphic(&m, &rep.module, config)?.is_some() {
                in_picard = true;
                break;
            }
        }
        if inv != in_picard {
            equivalence_holds = false;
            notes.push(format!(
                "module of order {} is {} as a bimodule but {} a Picard class",
                m.order(),
                if inv { "invertible" } else { "not invertible" },
                if in_picard { "is" } else { "is not" },
            ));
        }
    }
    // composition by tensor over the ring, classified up to bimodule
    // isomorphism
    let k = bims.len();
    let mut table = vec![0u32; k * k];
    for i in 0..k {
        for j in 0..k {
            let t = balanced_tensor(&bims[i], &bims[j], config)?;
            let mut cls = None;
            for (c, b) in bims.iter().enumerate() {
                if bimodule_isomorphic(&t.bimodule, b, config)?.is_some() {
                    cls = Some(c);
                    break;
                }
            }
            let Some(c) = cls else {
                return Err(Error::Validation(
                    "tensor of invertible bimodules left the Picard classes".into(),
                ));
            };
            table[i * k + j] = c as u32;
        }
    }
    let group = AbGroup::from_table(k, table, pd.unit_class as u32);
    let matches_picard = equivalence_holds
        && invertible_classes == pd.reps.len()
        && group.invariant_factors() == pd.pic.invariant_factors();
    Ok(AutBrauerReport { group, invertible_classes, scanned, matches_picard, notes })
}

/// The full invariant package of a ring: Brauer classes, Picard group,
/// units, and the automorphism comparison.
pub struct BrauerData {
    pub brauer: BrauerComputation,
    pub picard: PicardData,
    pub automorphisms: AutBrauerReport,
}

impl BrauerData {
    pub fn invariant_triple(&self) -> (Vec<u64>, Vec<u64>, Vec<u64>) {
        (
            self.brauer.invariants(),
            self.picard.pic_invariants(),
            self.picard.gl1_invariants(),
        )
    }
}

pub fn brauer_data(ring: &Arc<FiniteCommRing>, bound: u64, config: &Config) -> Result<BrauerData> {
    let picard = picard_data(ring, config)?;
    let brauer = brauer_group(ring, bound, config)?;
    let automorphisms = brauer_automorphisms(ring, &picard, config)?;
    Ok(BrauerData { brauer, picard, automorphisms })
}

/// Order bookkeeping of one induced map between invariant groups.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapSummary {
    pub src_invariants: Vec<u64>,
    pub tgt_invariants: Vec<u64>,
    pub src_order: u64,
    pub tgt_order: u64,
    pub kernel: u64,
    pub image: u64,
    pub cokernel: u64,
    pub orders_consistent: bool,
}

fn summarize(map: &AbMap, src: &AbGroup, tgt: &AbGroup) -> MapSummary {
    let kernel = map.kernel(src, tgt).len() as u64;
    let image = map.image().len() as u64;
    let cokernel = map.cokernel(tgt).order as u64;
    let src_order = src.order as u64;
    let tgt_order = tgt.order as u64;
    MapSummary {
        src_invariants: src.invariant_factors(),
        tgt_invariants: tgt.invariant_factors(),
        src_order,
        tgt_order,
        kernel,
        image,
        cokernel,
        orders_consistent: kernel * image == src_order && image * cokernel == tgt_order,
    }
}

/// Homotopy orders of the fiber of the induced map of Brauer spaces,
/// assembled from the six-term exact sequence of kernels and cokernels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiberSummary {
    pub pi2: u64,
    pub pi1: u64,
    pub pi0: u64,
    pub pi_neg1: u64,
    /// The middle orders are products of a kernel and a cokernel; when both
    /// factors are nontrivial the group extension is not determined by the
    /// orders alone.
    pub pi1_extension_ambiguous: bool,
    pub pi0_extension_ambiguous: bool,
}

/// Comparison of the invariant groups along a ring map, with fiber orders
/// and the two global consistency identities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelativeReport {
    pub schema: String,
    pub src: String,
    pub tgt: String,
    pub gl1: MapSummary,
    pub pic: MapSummary,
    pub br: MapSummary,
    pub fiber: FiberSummary,
    pub alternating_identity: bool,
    pub cardinality_identity: bool,
    pub complete: bool,
    pub notes: Vec<String>,
}

pub fn relative_report(f: &RingMap, bound: u64, config: &Config) -> Result<RelativeReport> {
    let pd_src = picard_data(&f.src, config)?;
    let pd_tgt = picard_data(&f.tgt, config)?;
    let mut notes = Vec::new();

    // units map through the ring map elementwise
    let gl1_map = {
        let mut map = Vec::with_capacity(pd_src.units.len());
        for &u in &pd_src.units {
            let img = f.apply(u);
            let pos = pd_tgt
                .units
                .iter()
                .position(|&v| v == img)
                .ok_or_else(|| Error::Validation("ring map sent a unit to a non-unit".into()))?;
            map.push(pos as u32);
        }
        AbMap::new(&pd_src.gl1, &pd_tgt.gl1, map)
    };

    // Picard classes map by scalar extension of modules
    let pic_map = {
        let mut map = Vec::with_capacity(pd_src.reps.len());
        for rep in &pd_src.reps {
            let bc = base_change(f, &rep.module, config)?;
            let mut cls = None;
            for (c, trep) in pd_tgt.reps.iter().enumerate() {
                if module_isomorphic(&bc.module, &trep.module, config)?.is_some() {
                    cls = Some(c as u32);
                    break;
                }
            }
            map.push(cls.ok_or_else(|| {
                Error::Validation("scalar extension left the enumerated Picard classes".into())
            })?);
        }
        AbMap::new(&pd_src.pic, &pd_tgt.pic, map)
    };

    // Brauer classes map by scalar extension of algebras
    let br_src = brauer_group(&f.src, bound, config)?;
    let br_tgt = brauer_group(&f.tgt, bound, config)?;
    let dec_tgt = local_decomposition(&f.tgt)?;
    let br_map = {
        let mut map = Vec::with_capacity(br_src.reps.len());
        for rep in &br_src.reps {
            let (b, _) = azumaya_base_change(f, rep, config)?;
            map.push(br_tgt.classify(&b, &dec_tgt, config)? as u32);
        }
        AbMap::new(&br_src.group, &br_tgt.group, map)
    };

    let gl1 = summarize(&gl1_map, &pd_src.gl1, &pd_tgt.gl1);
    let pic = summarize(&pic_map, &pd_src.pic, &pd_tgt.pic);
    let br = summarize(&br_map, &br_src.group, &br_tgt.group);

    let fiber = FiberSummary {
        pi2: gl1.kernel,
        pi1: gl1.cokernel * pic.kernel,
        pi0: pic.cokernel * br.kernel,
        pi_neg1: br.cokernel,
        pi1_extension_ambiguous: gl1.cokernel > 1 && pic.kernel > 1,
        pi0_extension_ambiguous: pic.cokernel > 1 && br.kernel > 1,
    };

    // exact sequence
    //   1 -> pi2 F -> gl1 R -> gl1 S -> pi1 F -> Pic R -> Pic S
    //     -> pi0 F -> Br R -> Br S -> pi_-1 F -> 1
    // alternates to an order identity
    let odd = [fiber.pi2, gl1.tgt_order, pic.src_order, fiber.pi0, br.tgt_order]
        .iter()
        .map(|&x| x as u128)
        .product::<u128>();
    let even = [gl1.src_order, fiber.pi1, pic.tgt_order, br.src_order, fiber.pi_neg1]
        .iter()
        .map(|&x| x as u128)
        .product::<u128>();
    let alternating_identity = odd == even;
    let cardinality_identity =
        pic.cokernel != 0 && fiber.pi0 % pic.cokernel == 0 && fiber.pi0 / pic.cokernel == br.kernel;

    let complete = pd_src.complete && pd_tgt.complete && br_src.complete && br_tgt.complete;
    for n in pd_src
        .notes
        .iter()
        .chain(&pd_tgt.notes)
        .chain(&br_src.notes)
        .chain(&br_tgt.notes)
    {
        notes.push(n.clone());
    }

    Ok(RelativeReport {
        schema: SCHEMA.to_string(),
        src: f.src.descriptor.clone(),
        tgt: f.tgt.descriptor.clone(),
        gl1,
        pic,
        br,
        fiber,
        alternating_identity,
        cardinality_identity,
        complete,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{algebra_isomorphic, matrix_algebra};
    use crate::ring::parse_ring;

    fn cfg() -> Config {
        Config::default()
    }

    #[test]
    fn matrix_algebras_are_trivial_with_witness() {
        let r = parse_ring("Z/2", &cfg()).unwrap();
        let dec = local_decomposition(&r).unwrap();
        let a = matrix_algebra(&r, 2, &cfg()).unwrap();
        let w = trivialization(&a, &dec, &cfg()).unwrap().unwrap();
        assert_eq!(w.generator.order(), 4);
        assert_eq!(w.end_order, 16);
    }

    #[test]
    fn opposite_certificate_certifies_the_inverse_path() {
        let r = parse_ring("Z/3", &cfg()).unwrap();
        let dec = local_decomposition(&r).unwrap();
        let a = matrix_algebra(&r, 2, &cfg()).unwrap();
        let cert = opposite_inverse_certificate(&a, &dec, &cfg()).unwrap();
        assert!(cert.sandwich_bijective);
        // the tensor square has the order of the endomorphism algebra of
        // the rank-four underlying module
        assert_eq!(cert.end_order, 43046721);
        assert_eq!(cert.generator_ranks, vec![4]);
        // on a small case the tensor square really is the endomorphism
        // algebra up to isomorphism
        let small = parse_ring("Z/2", &cfg()).unwrap();
        let dec2 = local_decomposition(&small).unwrap();
        let b = regular_algebra(&small, &cfg()).unwrap();
        let t = algebra_tensor(&b, &b.opposite(), &cfg()).unwrap();
        let cert2 = opposite_inverse_certificate(&b, &dec2, &cfg()).unwrap();
        assert_eq!(t.order(), cert2.end_order);
        let end = crate::algebra::end_algebra(&b.module, &cfg()).unwrap();
        assert!(algebra_isomorphic(&t, &end.algebra, &cfg()).unwrap().is_some());
    }

    #[test]
    fn brauer_group_of_f2_is_discovered_trivial() {
        let r = parse_ring("Z/2", &cfg()).unwrap();
        let bc = brauer_group(&r, 16, &cfg()).unwrap();
        assert!(bc.complete);
        assert_eq!(bc.invariants(), Vec::<u64>::new());
        assert_eq!(bc.group.order, 1);
        // the enumeration found the matrix algebra and trivialized it
        assert!(bc.algebras.len() >= 2);
        assert!(bc.class_of.iter().all(|&c| c == bc.unit_class));
        assert!(bc.trivial_witnesses.iter().all(|w| w.is_some()));
        assert!(bc.opposite_certs.iter().all(|c| c.sandwich_bijective));
    }

    #[test]
    fn brauer_group_of_composite_rings() {
        for spec in ["Z/4", "Z/6", "GF(4)"] {
            let r = parse_ring(spec, &cfg()).unwrap();
            let bc = brauer_group(&r, r.order as u64, &cfg()).unwrap();
            assert_eq!(bc.group.order, 1, "{spec}");
            assert!(bc.complete, "{spec}");
            assert!(bc.trivial_witnesses.iter().all(|w| w.is_some()), "{spec}");
        }
    }

    #[test]
    fn automorphisms_of_the_trivial_class_match_picard() {
        for spec in ["Z/6", "Z/4", "GF(4)"] {
            let r = parse_ring(spec, &cfg()).unwrap();
            let pd = picard_data(&r, &cfg()).unwrap();
            let aut = brauer_automorphisms(&r, &pd, &cfg()).unwrap();
            assert!(aut.matches_picard, "{spec}: {:?}", aut.notes);
            assert_eq!(aut.invertible_classes, 1, "{spec}");
            assert!(aut.scanned >= 1, "{spec}");
        }
    }

    #[test]
    fn invariant_triple_of_z12() {
        let r = parse_ring("Z/12", &cfg()).unwrap();
        let data = brauer_data(&r, 12, &cfg()).unwrap();
        let (br, pic, gl1) = data.invariant_triple();
        assert_eq!(br, Vec::<u64>::new());
        assert_eq!(pic, Vec::<u64>::new());
        assert_eq!(gl1, vec![2, 2]);
        assert!(data.automorphisms.matches_picard);
    }

    #[test]
    fn base_change_recertifies_and_is_monoidal() {
        let z4 = parse_ring("Z/4", &cfg()).unwrap();
        let z2 = parse_ring("Z/2", &cfg()).unwrap();
        let f = RingMap::new(z4.clone(), z2.clone(), vec![0, 1, 0, 1]).unwrap();
        let a = matrix_algebra(&z4, 2, &cfg()).unwrap();
        let (b, cert) = azumaya_base_change(&f, &a, &cfg()).unwrap();
        assert!(cert.azumaya);
        assert_eq!(b.order(), 16);
        let m2 = matrix_algebra(&z2, 2, &cfg()).unwrap();
        assert!(algebra_isomorphic(&b, &m2, &cfg()).unwrap().is_some());
        // scalar extension commutes with tensor product on a small case
        let r = regular_algebra(&z4, &cfg()).unwrap();
        let t_then = azumaya_base_change(&f, &algebra_tensor(&r, &r, &cfg()).unwrap(), &cfg())
            .unwrap()
            .0;
        let then_t = algebra_tensor(
            &azumaya_base_change(&f, &r, &cfg()).unwrap().0,
            &azumaya_base_change(&f, &r, &cfg()).unwrap().0,
            &cfg(),
        )
        .unwrap();
        assert!(algebra_isomorphic(&t_then, &then_t, &cfg()).unwrap().is_some());
    }

    #[test]
    fn relative_report_orders_balance() {
        let z4 = parse_ring("Z/4", &cfg()).unwrap();
        let z2 = parse_ring("Z/2", &cfg()).unwrap();
        let f = RingMap::new(z4.clone(), z2.clone(), vec![0, 1, 0, 1]).unwrap();
        let rep = relative_report(&f, 4, &cfg()).unwrap();
        assert!(rep.complete);
        assert!(rep.alternating_identity);
        assert!(rep.cardinality_identity);
        assert!(rep.gl1.orders_consistent && rep.pic.orders_consistent && rep.br.orders_consistent);
        // units 1, 3 of Z/4 both land on the unit of Z/2
        assert_eq!(rep.gl1.src_order, 2);
        assert_eq!(rep.gl1.tgt_order, 1);
        assert_eq!(rep.gl1.kernel, 2);
        assert_eq!(rep.fiber.pi2, 2);
        assert_eq!(rep.fiber.pi1, 1);
        assert_eq!(rep.fiber.pi0, 1);
        assert_eq!(rep.fiber.pi_neg1, 1);
        assert!(!rep.fiber.pi1_extension_ambiguous);
        let text = serde_json::to_string(&rep).unwrap();
        let back: RelativeReport = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn relative_report_of_residue_maps() {
        let cases = [("Z/9", "Z/3", vec![0u32, 1, 2, 0, 1, 2, 0, 1, 2]), (
            "Z/6",
            "Z/2",
            vec![0, 1, 0, 1, 0, 1],
        )];
        for (s, t, map) in cases {
            let src = parse_ring(s, &cfg()).unwrap();
            let tgt = parse_ring(t, &cfg()).unwrap();
            let f = RingMap::new(src, tgt, map).unwrap();
            let rep = relative_report(&f, 1, &cfg()).unwrap();
            assert!(rep.alternating_identity, "{s} -> {t}");
            assert!(rep.cardinality_identity, "{s} -> {t}");
            assert!(rep.gl1.orders_consistent, "{s} -> {t}");
        }
    }
}
