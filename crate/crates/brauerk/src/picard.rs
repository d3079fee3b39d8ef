//! Invertible modules and the Picard group of a finite commutative ring:
//! exhaustive enumeration with tensor-inverse witnesses, the group of
//! iso-classes, a unit-group cross-check, and a skeletal symmetric monoidal
//! groupoid assembled from class representatives.

use std::collections::HashMap;
use std::sync::Arc;

use crate::abelian::AbGroup;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::module::{
    enumerate_modules, hom_module, module_isomorphic, FGModule, FreeModule, ModuleMap,
};
use crate::ring::FiniteCommRing;
use crate::smc::{FiniteSymMonGroupoid, SCHEMA};
use crate::tensor::{tensor_over, TensorProduct};

/// An invertible module together with its tensor inverse and the
/// isomorphism from their tensor product onto the free rank-one module.
#[derive(Debug, Clone)]
pub struct InvertibleModule {
    pub module: Arc<FGModule>,
    pub inverse: Arc<FGModule>,
    pub witness: ModuleMap,
}

#[derive(Debug, Clone)]
pub struct PicardEnumeration {
    /// One entry per isomorphism class of invertible modules.
    pub modules: Vec<InvertibleModule>,
    /// Whether every candidate was decided within budget.
    pub complete: bool,
    pub notes: Vec<String>,
}

/// Enumerate all invertible modules of order at most `bound` up to
/// isomorphism, pairing each class with an inverse and a witness. An
/// invertible module is locally free of rank one over each local factor, so
/// its order equals the ring order; candidates of any other order are
/// rejected without tensor work.
pub fn invertible_modules(
    ring: &Arc<FiniteCommRing>,
    bound: u64,
    config: &Config,
) -> Result<PicardEnumeration> {
    let free1 = FreeModule::new(ring, 1, config)?;
    let mut notes = Vec::new();
    let mut complete = true;
    if bound > config.max_module_order {
        notes.push(format!(
            "bound {bound} clamped to module cap {}",
            config.max_module_order
        ));
        complete = false;
    }
    let all = enumerate_modules(ring, bound, config)?;
    let candidates: Vec<&Arc<FGModule>> =
        all.iter().filter(|m| m.order() == ring.order as u64).collect();
    let mut modules = Vec::new();
    for &m in &candidates {
        let mut found = None;
        for &n in &candidates {
            let t = tensor_over(m, n, config)?;
            if t.module.order() != ring.order as u64 {
                continue;
            }
            match module_isomorphic(&t.module, &free1.module, config) {
                Ok(Some(w)) => {
                    found = Some(InvertibleModule {
                        module: m.clone(),
                        inverse: n.clone(),
                        witness: w,
                    });
                    break;
                }
                Ok(None) => {}
                Err(e) if e.is_inconclusive() => {
                    complete = false;
                    notes.push(format!("isomorphism test inconclusive: {e}"));
                }
                Err(e) => return Err(e),
            }
        }
        if let Some(inv) = found {
            modules.push(inv);
        }
    }
    Ok(PicardEnumeration { modules, complete, notes })
}

/// The Picard group and unit group of a ring, as abstract abelian groups.
#[derive(Debug, Clone)]
pub struct PicardData {
    pub pic: AbGroup,
    pub gl1: AbGroup,
    /// One invertible module per element of `pic`, in element order.
    pub reps: Vec<InvertibleModule>,
    /// Index of the free class among the representatives.
    pub unit_class: usize,
    /// Unit elements of the ring, in the element order of `gl1`.
    pub units: Vec<u32>,
    pub complete: bool,
    pub notes: Vec<String>,
}

impl PicardData {
    pub fn pic_invariants(&self) -> Vec<u64> {
        self.pic.invariant_factors()
    }

    pub fn gl1_invariants(&self) -> Vec<u64> {
        self.gl1.invariant_factors()
    }
}

fn class_index(
    reps: &[InvertibleModule],
    m: &Arc<FGModule>,
    config: &Config,
) -> Result<(usize, ModuleMap)> {
    for (k, rep) in reps.iter().enumerate() {
        if let Some(iso) = module_isomorphic(m, &rep.module, config)? {
            return Ok((k, iso));
        }
    }
    Err(Error::Validation(
        "tensor product of invertible modules left the enumerated classes".into(),
    ))
}

/// Compute Pic(R) and GL_1(R). The Picard group is discovered by exhaustive
/// enumeration, never assumed trivial; the unit group is cross-checked
/// against the automorphisms of R as a module over itself.
pub fn picard_data(ring: &Arc<FiniteCommRing>, config: &Config) -> Result<PicardData> {
    let enumeration = invertible_modules(ring, ring.order as u64, config)?;
    if enumeration.modules.is_empty() {
        return Err(Error::Validation(
            "no invertible modules found; the free module of rank one is always invertible".into(),
        ));
    }
    let reps = &enumeration.modules;
    let k = reps.len();
    let free1 = FreeModule::new(ring, 1, config)?;
    let mut unit_class = None;
    for (i, rep) in reps.iter().enumerate() {
        if module_isomorphic(&rep.module, &free1.module, config)?.is_some() {
            unit_class = Some(i);
            break;
        }
    }
    let unit_class =
        unit_class.ok_or_else(|| Error::Validation("free class missing from enumeration".into()))?;
    let mut table = vec![0u32; k * k];
    for i in 0..k {
        for j in 0..k {
            let t = tensor_over(&reps[i].module, &reps[j].module, config)?;
            let (c, _) = class_index(reps, &t.module, config)?;
            table[i * k + j] = c as u32;
        }
    }
    let pic = AbGroup::from_table(k, table, unit_class as u32);

    let (gl1, units) = ring.unit_group();
    let auts: Vec<ModuleMap> = hom_module(&free1.module, &free1.module, config)?
        .into_iter()
        .filter(|m| m.is_bijective())
        .collect();
    if auts.len() != units.len() {
        return Err(Error::Validation(format!(
            "module automorphisms of the ring ({}) do not match its units ({})",
            auts.len(),
            units.len()
        )));
    }
    let ngens = free1.module.ngens();
    let key = |m: &ModuleMap| -> Vec<u64> {
        (0..ngens).map(|g| m.apply(free1.module.gen_elem(g))).collect()
    };
    let mut index: HashMap<Vec<u64>, u64> = HashMap::new();
    for (i, a) in auts.iter().enumerate() {
        index.insert(key(a), i as u64);
    }
    let id_idx = index[&key(&ModuleMap::identity(&free1.module))];
    let labels: Vec<u64> = (0..auts.len() as u64).collect();
    let (aut_group, _) = AbGroup::from_closure(&labels, id_idx, |a, b| {
        let c = auts[a as usize].compose(&auts[b as usize]).expect("endomorphisms compose");
        index[&key(&c)]
    });
    if aut_group.invariant_factors() != gl1.invariant_factors() {
        return Err(Error::Validation(
            "unit group and module automorphism group disagree".into(),
        ));
    }

    Ok(PicardData {
        pic,
        gl1,
        reps: enumeration.modules,
        unit_class,
        units,
        complete: enumeration.complete,
        notes: enumeration.notes,
    })
}

/// Express `target` as a nonnegative combination of `values` inside `m`,
/// returning one multiplicity per value. Breadth-first search over the
/// subgroup generated by the values.
fn combination_in(m: &FGModule, values: &[u64], target: u64) -> Option<Vec<u64>> {
    let zero = 0u64;
    if target == zero {
        return Some(vec![0; values.len()]);
    }
    let mut parent: HashMap<u64, (u64, usize)> = HashMap::new();
    parent.insert(zero, (zero, usize::MAX));
    let mut frontier = vec![zero];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &x in &frontier {
            for (vi, &v) in values.iter().enumerate() {
                let y = m.add_elems(x, v);
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(y) {
                    e.insert((x, vi));
                    if y == target {
                        let mut counts = vec![0u64; values.len()];
                        let mut cur = y;
                        while cur != zero {
                            let (prev, idx) = parent[&cur];
                            counts[idx] += 1;
                            cur = prev;
                        }
                        return Some(counts);
                    }
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    None
}

/// Build the module map out of a tensor product determined by prescribed
/// images of the pure-tensor symbols. Each generator of the tensor module is
/// expressed as a combination of symbols and sent to the matching
/// combination of images; validity is certified by the map constructor.
fn map_from_symbols(
    t: &TensorProduct,
    tgt: &Arc<FGModule>,
    image_of_symbol: &[u64],
) -> Result<ModuleMap> {
    let m = &t.module;
    let symbols = t.symbol_images();
    let mut images = Vec::with_capacity(m.ngens());
    for g in 0..m.ngens() {
        let counts = combination_in(m, &symbols, m.gen_elem(g)).ok_or_else(|| {
            Error::Validation("pure tensors fail to generate the tensor module".into())
        })?;
        let mut img = 0u64;
        for (s, &c) in counts.iter().enumerate() {
            if c > 0 {
                img = tgt.add_elems(img, tgt.int_scale(c, image_of_symbol[s]));
            }
        }
        images.push(img);
    }
    ModuleMap::new(m.clone(), tgt.clone(), images)
}

struct Skeleton {
    reps: Vec<Arc<FGModule>>,
    auts: Vec<Vec<ModuleMap>>,
    offsets: Vec<usize>,
    index: Vec<HashMap<Vec<u64>, usize>>,
    table: Vec<Vec<usize>>,
    red: Vec<Vec<ModuleMap>>,
    tens: Vec<Vec<TensorProduct>>,
}

impl Skeleton {
    fn aut_key(&self, i: usize, m: &ModuleMap) -> Vec<u64> {
        let rep = &self.reps[i];
        (0..rep.ngens()).map(|g| m.apply(rep.gen_elem(g))).collect()
    }

    fn global_id(&self, i: usize, m: &ModuleMap) -> Result<usize> {
        let local = self.index[i].get(&self.aut_key(i, m)).copied().ok_or_else(|| {
            Error::Validation("composite map is not an enumerated automorphism".into())
        })?;
        Ok(self.offsets[i] + local)
    }
}

/// The Picard groupoid of a ring as a skeletal symmetric monoidal groupoid:
/// one object per isomorphism class of invertible modules, morphisms the
/// module automorphisms of the chosen representatives, with tensor,
/// associator, unitor and symmetry cells computed from the honest tensor
/// products and transported along the fixed reduction isomorphisms.
pub fn picard_smc(ring: &Arc<FiniteCommRing>, config: &Config) -> Result<FiniteSymMonGroupoid> {
    let enumeration = invertible_modules(ring, ring.order as u64, config)?;
    if !enumeration.complete {
        return Err(Error::Inconclusive { stage: "invertible module enumeration", limit: 0 });
    }
    let free1 = FreeModule::new(ring, 1, config)?;
    let reps: Vec<Arc<FGModule>> =
        enumeration.modules.iter().map(|m| m.module.clone()).collect();
    let k = reps.len();

    let mut unit_class = None;
    let mut eta = None;
    for (i, rep) in reps.iter().enumerate() {
        if let Some(iso) = module_isomorphic(rep, &free1.module, config)? {
            unit_class = Some(i);
            eta = Some(iso);
            break;
        }
    }
    let unit_class =
        unit_class.ok_or_else(|| Error::Validation("free class missing from enumeration".into()))?;
    let eta = eta.expect("set together with unit_class");

    let mut auts = Vec::with_capacity(k);
    for rep in &reps {
        let a: Vec<ModuleMap> =
            hom_module(rep, rep, config)?.into_iter().filter(|m| m.is_bijective()).collect();
        auts.push(a);
    }
    let mut offsets = vec![0usize; k];
    for i in 1..k {
        offsets[i] = offsets[i - 1] + auts[i - 1].len();
    }
    let nmor: usize = offsets[k - 1] + auts[k - 1].len();

    let mut tens: Vec<Vec<TensorProduct>> = Vec::with_capacity(k);
    let mut red: Vec<Vec<ModuleMap>> = Vec::with_capacity(k);
    let mut table = vec![vec![0usize; k]; k];
    for i in 0..k {
        let mut trow = Vec::with_capacity(k);
        let mut rrow = Vec::with_capacity(k);
        for j in 0..k {
            let t = tensor_over(&reps[i], &reps[j], config)?;
            let mut hit = None;
            for (c, rep) in reps.iter().enumerate() {
                if let Some(iso) = module_isomorphic(&t.module, rep, config)? {
                    hit = Some((c, iso));
                    break;
                }
            }
            let (c, iso) = hit.ok_or_else(|| {
                Error::Validation("tensor product left the enumerated classes".into())
            })?;
            table[i][j] = c;
            trow.push(t);
            rrow.push(iso);
        }
        tens.push(trow);
        red.push(rrow);
    }

    let mut index: Vec<HashMap<Vec<u64>, usize>> = Vec::with_capacity(k);
    let sk = Skeleton { reps, auts, offsets, index: Vec::new(), table, red, tens };
    for i in 0..k {
        let mut m = HashMap::new();
        for (l, a) in sk.auts[i].iter().enumerate() {
            m.insert(sk.aut_key(i, a), l);
        }
        index.push(m);
    }
    let sk = Skeleton { index, ..sk };

    let mut mor_src = vec![0usize; nmor];
    for i in 0..k {
        for l in 0..sk.auts[i].len() {
            mor_src[sk.offsets[i] + l] = i;
        }
    }
    let mor_tgt = mor_src.clone();
    let mut identity = vec![0usize; k];
    for i in 0..k {
        identity[i] = sk.global_id(i, &ModuleMap::identity(&sk.reps[i]))?;
    }
    let class_of_mor = mor_src.clone();
    let local_of = |g: usize| g - sk.offsets[class_of_mor[g]];
    let mut compose = vec![vec![None; nmor]; nmor];
    for g in 0..nmor {
        for f in 0..nmor {
            let (ci, cj) = (class_of_mor[g], class_of_mor[f]);
            if ci != cj {
                continue;
            }
            let composed = sk.auts[ci][local_of(f)].compose(&sk.auts[ci][local_of(g)])?;
            compose[g][f] = Some(sk.global_id(ci, &composed)?);
        }
    }

    let mut tensor_mor = vec![vec![0usize; nmor]; nmor];
    for f in 0..nmor {
        for g in 0..nmor {
            let (i, j) = (class_of_mor[f], class_of_mor[g]);
            let (fa, ga) = (&sk.auts[i][local_of(f)], &sk.auts[j][local_of(g)]);
            let t = &sk.tens[i][j];
            let symbols: Vec<u64> = {
                let (li, lj) = (sk.reps[i].ngens(), sk.reps[j].ngens());
                let mut out = Vec::with_capacity(li * lj);
                for a in 0..li {
                    for b in 0..lj {
                        out.push(t.bilinear(
                            fa.apply(sk.reps[i].gen_elem(a)),
                            ga.apply(sk.reps[j].gen_elem(b)),
                        ));
                    }
                }
                out
            };
            let on_tensor = map_from_symbols(t, &t.module, &symbols)?;
            let r = &sk.red[i][j];
            let cell = r.inverse()?.compose(&on_tensor)?.compose(r)?;
            tensor_mor[f][g] = sk.global_id(sk.table[i][j], &cell)?;
        }
    }

    // associator: both legs of
    //   (M_i x M_j) x M_l -> M_r
    // evaluated on triples of generators; the cell is the unique
    // automorphism of M_r carrying the left-leg images to the right-leg
    // images
    let mut associator = vec![vec![vec![0usize; k]; k]; k];
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                let p = sk.table[i][j];
                let q = sk.table[j][l];
                let r = sk.table[p][l];
                debug_assert_eq!(r, sk.table[i][q]);
                let rep_r = &sk.reps[r];
                let (ni, nj, nl) =
                    (sk.reps[i].ngens(), sk.reps[j].ngens(), sk.reps[l].ngens());
                let mut left = Vec::with_capacity(ni * nj * nl);
                let mut right = Vec::with_capacity(ni * nj * nl);
                for x in 0..ni {
                    let gx = sk.reps[i].gen_elem(x);
                    for y in 0..nj {
                        let gy = sk.reps[j].gen_elem(y);
                        let u = sk.red[i][j].apply(sk.tens[i][j].bilinear(gx, gy));
                        let s_part = |gz| sk.red[j][l].apply(sk.tens[j][l].bilinear(gy, gz));
                        for z in 0..nl {
                            let gz = sk.reps[l].gen_elem(z);
                            left.push(sk.red[p][l].apply(sk.tens[p][l].bilinear(u, gz)));
                            right.push(
                                sk.red[i][q].apply(sk.tens[i][q].bilinear(gx, s_part(gz))),
                            );
                        }
                    }
                }
                let mut images = Vec::with_capacity(rep_r.ngens());
                for g in 0..rep_r.ngens() {
                    let counts =
                        combination_in(rep_r, &left, rep_r.gen_elem(g)).ok_or_else(|| {
                            Error::Validation(
                                "iterated pure tensors fail to generate".into(),
                            )
                        })?;
                    let mut img = 0u64;
                    for (s, &c) in counts.iter().enumerate() {
                        if c > 0 {
                            img = rep_r.add_elems(img, rep_r.int_scale(c, right[s]));
                        }
                    }
                    images.push(img);
                }
                let cell = ModuleMap::new(rep_r.clone(), rep_r.clone(), images)?;
                associator[i][j][l] = sk.global_id(r, &cell)?;
            }
        }
    }

    // unitors: transport the scalar action along eta: M_unit -> R
    let ring_of = |a: u64| free1.elem_to_vec(eta.apply(a))[0];
    let mut lunitor = vec![0usize; k];
    let mut runitor = vec![0usize; k];
    for i in 0..k {
        let rep = &sk.reps[i];
        let t = &sk.tens[unit_class][i];
        let (nu, ni) = (sk.reps[unit_class].ngens(), rep.ngens());
        let mut symbols = Vec::with_capacity(nu * ni);
        for a in 0..nu {
            let ra = ring_of(sk.reps[unit_class].gen_elem(a));
            for x in 0..ni {
                symbols.push(rep.scalar(ra, rep.gen_elem(x)));
            }
        }
        let canonical = map_from_symbols(t, rep, &symbols)?;
        let cell = sk.red[unit_class][i].inverse()?.compose(&canonical)?;
        lunitor[i] = sk.global_id(i, &cell)?;

        let t = &sk.tens[i][unit_class];
        let mut symbols = Vec::with_capacity(ni * nu);
        for x in 0..ni {
            let gx = rep.gen_elem(x);
            for a in 0..nu {
                let ra = ring_of(sk.reps[unit_class].gen_elem(a));
                symbols.push(rep.scalar(ra, gx));
            }
        }
        let canonical = map_from_symbols(t, rep, &symbols)?;
        let cell = sk.red[i][unit_class].inverse()?.compose(&canonical)?;
        runitor[i] = sk.global_id(i, &cell)?;
    }

    let mut symmetry = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let t = &sk.tens[i][j];
            let back = &sk.tens[j][i];
            let (ni, nj) = (sk.reps[i].ngens(), sk.reps[j].ngens());
            let mut symbols = Vec::with_capacity(ni * nj);
            for a in 0..ni {
                for b in 0..nj {
                    symbols.push(
                        back.bilinear(sk.reps[j].gen_elem(b), sk.reps[i].gen_elem(a)),
                    );
                }
            }
            let swap = map_from_symbols(t, &back.module, &symbols)?;
            let cell = sk.red[i][j].inverse()?.compose(&swap)?.compose(&sk.red[j][i])?;
            symmetry.push(sk.global_id(sk.table[i][j], &cell)?);
        }
    }

    Ok(FiniteSymMonGroupoid {
        schema: SCHEMA.into(),
        objects: k,
        mor_src,
        mor_tgt,
        identity,
        compose,
        unit: unit_class,
        tensor_obj: sk.table.iter().map(|r| r.to_vec()).collect(),
        tensor_mor,
        associator,
        lunitor,
        runitor,
        symmetry,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_ring;
    use crate::smc::{check_coherence, is_group_like, pi0_monoid};

    fn cfg() -> Config {
        Config::default()
    }

    #[test]
    fn only_full_order_modules_pair_to_the_ring() {
        // independent check of the order filter: over Z/6, scan all pairs of
        // enumerated modules and confirm every pair whose tensor is free of
        // rank one consists of modules of order 6
        let ring = parse_ring("Z/6", &cfg()).unwrap();
        let free1 = FreeModule::new(&ring, 1, &cfg()).unwrap();
        let all = enumerate_modules(&ring, 6, &cfg()).unwrap();
        for a in &all {
            for b in &all {
                let t = tensor_over(a, b, &cfg()).unwrap();
                if module_isomorphic(&t.module, &free1.module, &cfg()).unwrap().is_some() {
                    assert_eq!(a.order(), 6);
                    assert_eq!(b.order(), 6);
                }
            }
        }
    }

    #[test]
    fn z6_has_exactly_one_invertible_class() {
        let ring = parse_ring("Z/6", &cfg()).unwrap();
        let e = invertible_modules(&ring, 6, &cfg()).unwrap();
        assert!(e.complete);
        assert_eq!(e.modules.len(), 1);
        let inv = &e.modules[0];
        assert_eq!(inv.module.order(), 6);
        assert!(inv.witness.is_bijective());
    }

    #[test]
    fn z4_invertibles_exclude_the_residue_field() {
        let ring = parse_ring("Z/4", &cfg()).unwrap();
        let e = invertible_modules(&ring, 4, &cfg()).unwrap();
        assert!(e.complete);
        assert_eq!(e.modules.len(), 1);
        // Z/2 x Z/2 and Z/2 are modules here but not invertible
        let all = enumerate_modules(&ring, 4, &cfg()).unwrap();
        assert!(all.len() > 1);
    }

    #[test]
    fn picard_data_of_z12() {
        let ring = parse_ring("Z/12", &cfg()).unwrap();
        let d = picard_data(&ring, &cfg()).unwrap();
        assert!(d.complete);
        assert!(d.pic_invariants().is_empty());
        assert_eq!(d.gl1_invariants(), vec![2, 2]);
    }

    #[test]
    fn picard_data_of_small_fields_and_products() {
        let cases: [(&str, Vec<u64>, Vec<u64>); 3] = [
            ("GF(4)", Vec::new(), vec![3]),
            ("Z/9", Vec::new(), vec![6]),
            ("Z/2 x Z/3", Vec::new(), vec![2]),
        ];
        for (spec, pic, gl1) in cases {
            let ring = parse_ring(spec, &cfg()).unwrap();
            let d = picard_data(&ring, &cfg()).unwrap();
            assert!(d.complete, "{spec}");
            assert_eq!(d.pic_invariants(), pic, "{spec}");
            assert_eq!(d.gl1_invariants(), gl1, "{spec}");
        }
    }

    #[test]
    fn picard_groupoid_of_z6_is_coherent() {
        let ring = parse_ring("Z/6", &cfg()).unwrap();
        let v = picard_smc(&ring, &cfg()).unwrap();
        assert_eq!(v.objects, 1);
        assert_eq!(v.nmor(), 2);
        let report = check_coherence(&v);
        assert!(report.ok(), "{:?}", report.violations);
        assert!(is_group_like(&v).unwrap());
        let p = pi0_monoid(&v).unwrap();
        assert!(p.as_group().unwrap().is_trivial());
    }

    #[test]
    fn picard_groupoid_of_z4_is_coherent() {
        let ring = parse_ring("Z/4", &cfg()).unwrap();
        let v = picard_smc(&ring, &cfg()).unwrap();
        assert_eq!(v.objects, 1);
        assert_eq!(v.nmor(), 2);
        let report = check_coherence(&v);
        assert!(report.ok(), "{:?}", report.violations);
    }

    #[test]
    fn picard_groupoid_automorphisms_match_units() {
        for spec in ["GF(4)", "Z/6", "Z/9"] {
            let ring = parse_ring(spec, &cfg()).unwrap();
            let v = picard_smc(&ring, &cfg()).unwrap();
            assert_eq!(v.hom(v.unit, v.unit).len(), ring.units().len(), "{spec}");
        }
    }

    #[test]
    fn combination_solver_expresses_generators() {
        let ring = parse_ring("Z/4", &cfg()).unwrap();
        let free2 = FreeModule::new(&ring, 2, &cfg()).unwrap();
        let m = &free2.module;
        let values = vec![m.gen_elem(0), m.gen_elem(1)];
        let target = m.add_elems(m.gen_elem(0), m.int_scale(3, m.gen_elem(1)));
        let counts = combination_in(m, &values, target).unwrap();
        let mut acc = 0u64;
        for (i, &c) in counts.iter().enumerate() {
            acc = m.add_elems(acc, m.int_scale(c, values[i]));
        }
        assert_eq!(acc, target);
    }
}
