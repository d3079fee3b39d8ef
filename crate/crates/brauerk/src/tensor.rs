//! Tensor products over the base ring, and base change along a ring map.
//!
//! The general construction works in a scratch group: the integral tensor
//! product of the two cyclic decompositions, a mixed-radix group with one
//! digit of order `gcd(d_i, d'_j)` per generator pair. The balancing
//! relations `(r x) (x) y - x (x) (r y)` are additively generated by the
//! relations on generator pairs with `r` running over an additive basis of
//! the ring, so the quotient by their closure is the tensor product. The
//! descended ring action is checked for well-definedness on the relation
//! subgroup, and the resulting module is validated from scratch.
//!
//! Tensors of free modules skip the scratch group entirely: the result is
//! free on the products of basis vectors.

use std::sync::Arc;

use crate::abelian::{gcd_u64, CyclicBasis};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::module::{module_from_group, FGModule, FreeModule, ModuleMap};
use crate::ring::RingMap;

/// Mixed-radix coordinate group; digits of order 1 are allowed and inert.
struct Radix {
    orders: Vec<u64>,
}

impl Radix {
    fn size(&self) -> u128 {
        self.orders.iter().map(|&d| d as u128).product()
    }

    fn decode(&self, mut x: u64) -> Vec<u64> {
        let mut c = Vec::with_capacity(self.orders.len());
        for &d in &self.orders {
            c.push(x % d);
            x /= d;
        }
        c
    }

    fn encode(&self, coords: &[u64]) -> u64 {
        let mut x = 0u64;
        for (i, &d) in self.orders.iter().enumerate().rev() {
            x = x * d + coords[i] % d;
        }
        x
    }

    fn add(&self, x: u64, y: u64) -> u64 {
        let (mut a, mut b, mut out, mut mult) = (x, y, 0u64, 1u64);
        for &d in &self.orders {
            out += ((a % d + b % d) % d) * mult;
            mult *= d;
            a /= d;
            b /= d;
        }
        out
    }

    fn closure(&self, gens: &[u64]) -> Vec<u64> {
        let mut seen = std::collections::HashSet::new();
        seen.insert(0u64);
        let mut elems = vec![0u64];
        let mut frontier = vec![0u64];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.add(x, g);
                if seen.insert(y) {
                    elems.push(y);
                    frontier.push(y);
                }
            }
        }
        elems.sort_unstable();
        elems
    }

    /// Minimal coset representative for every element.
    fn coset_reps(&self, sub: &[u64]) -> Vec<u64> {
        let n = self.size() as usize;
        let mut rep = vec![u64::MAX; n];
        for x in 0..n as u64 {
            if rep[x as usize] != u64::MAX {
                continue;
            }
            for &s in sub {
                rep[self.add(x, s) as usize] = x;
            }
        }
        rep
    }
}

pub struct TensorProduct {
    pub module: Arc<FGModule>,
    kind: TensorKind,
}

enum TensorKind {
    General {
        a: Arc<FGModule>,
        b: Arc<FGModule>,
        scratch_orders: Vec<u64>,
        to_quotient: Vec<u64>,
    },
    FreeFree {
        fa: FreeModule,
        fb: FreeModule,
        result: FreeModule,
    },
}

impl TensorProduct {
    /// The canonical balanced bilinear map on elements.
    pub fn bilinear(&self, x: u64, y: u64) -> u64 {
        match &self.kind {
            TensorKind::General { a, b, scratch_orders, to_quotient } => {
                let scratch = Radix { orders: scratch_orders.clone() };
                let (cx, cy) = (a.decode(x), b.decode(y));
                let l = b.ngens();
                let mut coords = vec![0u64; scratch.orders.len()];
                for (i, &xi) in cx.iter().enumerate() {
                    if xi == 0 {
                        continue;
                    }
                    for (j, &yj) in cy.iter().enumerate() {
                        let d = scratch.orders[i * l + j];
                        coords[i * l + j] = (coords[i * l + j] + xi as u64 * yj as u64) % d;
                    }
                }
                to_quotient[scratch.encode(&coords) as usize]
            }
            TensorKind::FreeFree { fa, fb, result } => {
                let (va, vb) = (fa.elem_to_vec(x), fb.elem_to_vec(y));
                let ring = fa.ring();
                let mut v = Vec::with_capacity(va.len() * vb.len());
                for &p in &va {
                    for &q in &vb {
                        v.push(ring.mul(p, q));
                    }
                }
                result.vec_to_elem(&v)
            }
        }
    }

    /// Images of the scratch symbols `g_i (x) h_j` in the tensor module, row
    /// major in `(i, j)`. These generate the module.
    pub fn symbol_images(&self) -> Vec<u64> {
        match &self.kind {
            TensorKind::General { a, b, .. } => {
                let mut out = Vec::with_capacity(a.ngens() * b.ngens());
                for i in 0..a.ngens() {
                    for j in 0..b.ngens() {
                        out.push(self.bilinear(a.gen_elem(i), b.gen_elem(j)));
                    }
                }
                out
            }
            TensorKind::FreeFree { fa, fb, .. } => {
                let mut out = Vec::new();
                for i in 0..fa.module.ngens() {
                    for j in 0..fb.module.ngens() {
                        out.push(self.bilinear(fa.module.gen_elem(i), fb.module.gen_elem(j)));
                    }
                }
                out
            }
        }
    }

    pub fn left(&self) -> &Arc<FGModule> {
        match &self.kind {
            TensorKind::General { a, .. } => a,
            TensorKind::FreeFree { fa, .. } => &fa.module,
        }
    }

    pub fn right(&self) -> &Arc<FGModule> {
        match &self.kind {
            TensorKind::General { b, .. } => b,
            TensorKind::FreeFree { fb, .. } => &fb.module,
        }
    }

    pub fn free_result(&self) -> Option<&FreeModule> {
        match &self.kind {
            TensorKind::FreeFree { result, .. } => Some(result),
            TensorKind::General { .. } => None,
        }
    }
}

pub fn tensor_over(a: &Arc<FGModule>, b: &Arc<FGModule>, config: &Config) -> Result<TensorProduct> {
    if !a.ring.same_tables(&b.ring) {
        return Err(Error::MixedRings);
    }
    let ring = &a.ring;
    let (k, l) = (a.ngens(), b.ngens());
    let mut scratch_orders = Vec::with_capacity(k * l);
    for i in 0..k {
        for j in 0..l {
            scratch_orders.push(gcd_u64(a.orders[i], b.orders[j]));
        }
    }
    let scratch = Radix { orders: scratch_orders.clone() };
    if scratch.size() > config.max_module_order as u128 {
        return Err(Error::CapExceeded {
            what: "tensor scratch group",
            size: scratch.size().min(u64::MAX as u128) as u64,
            cap: config.max_module_order,
        });
    }
    let ring_basis = ring.additive_basis();
    // balancing relations on generator pairs, over an additive basis of R
    let mut relations = Vec::new();
    for &r in &ring_basis.gens {
        let r = r as u32;
        for i in 0..k {
            for j in 0..l {
                let mut coords = vec![0u64; k * l];
                for (ai, &c) in a.act_coords(r, i).iter().enumerate() {
                    let d = scratch.orders[ai * l + j];
                    coords[ai * l + j] = (coords[ai * l + j] + c as u64) % d;
                }
                for (bj, &c) in b.act_coords(r, j).iter().enumerate() {
                    let d = scratch.orders[i * l + bj];
                    coords[i * l + bj] = (coords[i * l + bj] + d - c as u64 % d) % d;
                }
                let elem = scratch.encode(&coords);
                if elem != 0 {
                    relations.push(elem);
                }
            }
        }
    }
    let sub = scratch.closure(&relations);
    let reps = scratch.coset_reps(&sub);
    // ring action on scratch symbols
    let act_scratch = |r: u32, x: u64| -> u64 {
        let cx = scratch.decode(x);
        let mut coords = vec![0u64; k * l];
        for i in 0..k {
            for j in 0..l {
                let c = cx[i * l + j];
                if c == 0 {
                    continue;
                }
                for (ai, &v) in a.act_coords(r, i).iter().enumerate() {
                    let d = scratch.orders[ai * l + j];
                    coords[ai * l + j] = (coords[ai * l + j] + c * v as u64) % d;
                }
            }
        }
        scratch.encode(&coords)
    };
    // the action must descend to the quotient
    for &s in &sub {
        for &r in &ring_basis.gens {
            if reps[act_scratch(r as u32, s) as usize] != 0 {
                return Err(Error::Validation("ring action does not descend to the tensor quotient".into()));
            }
        }
    }
    let mut rep_elems: Vec<u64> = reps.iter().copied().collect();
    rep_elems.sort_unstable();
    rep_elems.dedup();
    let add = |x: u64, y: u64| reps[scratch.add(x, y) as usize];
    let act = |r: u32, x: u64| reps[act_scratch(r, x) as usize];
    let (module, translate) = module_from_group(ring, &rep_elems, 0, &add, &act)?;
    let to_quotient: Vec<u64> = reps.iter().map(|&r| translate[&r]).collect();
    Ok(TensorProduct {
        module,
        kind: TensorKind::General { a: a.clone(), b: b.clone(), scratch_orders, to_quotient },
    })
}

/// Tensor of free modules: free on pairwise products of basis vectors.
pub fn tensor_free(fa: &FreeModule, fb: &FreeModule, config: &Config) -> Result<TensorProduct> {
    if !fa.ring().same_tables(fb.ring()) {
        return Err(Error::MixedRings);
    }
    let result = FreeModule::new(fa.ring(), fa.rank * fb.rank, config)?;
    Ok(TensorProduct {
        module: result.module.clone(),
        kind: TensorKind::FreeFree { fa: fa.clone(), fb: fb.clone(), result },
    })
}

/// Factor a balanced bilinear map through the tensor product: build the
/// induced linear map and verify the factorization on every pair. A
/// successful return certifies the universal property for this map.
pub fn factor_bilinear(
    t: &TensorProduct,
    target: &Arc<FGModule>,
    beta: &dyn Fn(u64, u64) -> u64,
) -> Result<ModuleMap> {
    let (a, b) = (t.left().clone(), t.right().clone());
    let symbol_values: Vec<u64> = {
        let mut out = Vec::with_capacity(a.ngens() * b.ngens());
        for i in 0..a.ngens() {
            for j in 0..b.ngens() {
                out.push(beta(a.gen_elem(i), b.gen_elem(j)));
            }
        }
        out
    };
    // find a scratch preimage for each module generator and push it through
    let k = t.module.ngens();
    let mut images = vec![0u64; k];
    for gi in 0..k {
        let gen = t.module.gen_elem(gi);
        let preimage = symbol_combination(t, gen)
            .ok_or_else(|| Error::Validation("tensor generator not reachable from symbols".into()))?;
        let mut acc = 0u64;
        for (s, &c) in preimage.iter().enumerate() {
            if c != 0 {
                acc = target.add_elems(acc, target.int_scale(c, symbol_values[s]));
            }
        }
        images[gi] = acc;
    }
    let map = ModuleMap::new(t.module.clone(), target.clone(), images)?;
    for x in 0..a.order() {
        for y in 0..b.order() {
            if map.apply(t.bilinear(x, y)) != beta(x, y) {
                return Err(Error::Validation("bilinear map does not factor through the tensor".into()));
            }
        }
    }
    Ok(map)
}

/// Integer combination of symbols mapping to the given element, by BFS over
/// the symbol-generated subgroup (which is the whole module).
pub fn symbol_combination(t: &TensorProduct, target: u64) -> Option<Vec<u64>> {
    let symbols = t.symbol_images();
    let m = &t.module;
    let mut combo: std::collections::HashMap<u64, Vec<u64>> = std::collections::HashMap::new();
    combo.insert(0, vec![0u64; symbols.len()]);
    let mut frontier = vec![0u64];
    while let Some(x) = frontier.pop() {
        if combo.contains_key(&target) {
            break;
        }
        let base = combo[&x].clone();
        for (s, &sym) in symbols.iter().enumerate() {
            let y = m.add_elems(x, sym);
            if !combo.contains_key(&y) {
                let mut c = base.clone();
                c[s] += 1;
                combo.insert(y, c);
                frontier.push(y);
            }
        }
    }
    combo.remove(&target)
}

// ---------------------------------------------------------------------------
// Base change
// ---------------------------------------------------------------------------

/// `S (x)_R M` along `f: R -> S`, with the pure-tensor map.
pub struct BaseChange {
    pub module: Arc<FGModule>,
    s_basis: CyclicBasis,
    scratch_orders: Vec<u64>,
    to_quotient: Vec<u64>,
    m: Arc<FGModule>,
}

impl BaseChange {
    /// Pure tensor `s (x) x`.
    pub fn pure(&self, s: u32, x: u64) -> u64 {
        let scratch = Radix { orders: self.scratch_orders.clone() };
        let cs = &self.s_basis.coords[&(s as u64)];
        let cx = self.m.decode(x);
        let l = self.m.ngens();
        let mut coords = vec![0u64; scratch.orders.len()];
        for (i, &si) in cs.iter().enumerate() {
            if si == 0 {
                continue;
            }
            for (j, &xj) in cx.iter().enumerate() {
                let d = scratch.orders[i * l + j];
                coords[i * l + j] = (coords[i * l + j] + si as u64 * xj as u64) % d;
            }
        }
        self.to_quotient[scratch.encode(&coords) as usize]
    }

    /// The canonical map `M -> S (x)_R M`, `x -> 1 (x) x`, as a function.
    pub fn unit_map(&self, one: u32, x: u64) -> u64 {
        self.pure(one, x)
    }

    pub fn source(&self) -> &Arc<FGModule> {
        &self.m
    }
}

pub fn base_change(f: &RingMap, m: &Arc<FGModule>, config: &Config) -> Result<BaseChange> {
    if !f.src.same_tables(&m.ring) {
        return Err(Error::MixedRings);
    }
    let s_ring = &f.tgt;
    let s_basis = s_ring.additive_basis();
    let k = s_basis.gens.len();
    let l = m.ngens();
    let mut scratch_orders = Vec::with_capacity(k * l);
    for i in 0..k {
        for j in 0..l {
            scratch_orders.push(gcd_u64(s_basis.orders[i], m.orders[j]));
        }
    }
    let scratch = Radix { orders: scratch_orders.clone() };
    if scratch.size() > config.max_module_order as u128 {
        return Err(Error::CapExceeded {
            what: "base change scratch group",
            size: scratch.size().min(u64::MAX as u128) as u64,
            cap: config.max_module_order,
        });
    }
    let r_basis = m.ring.additive_basis();
    // (f(r) s_i) (x) m_j - s_i (x) (r m_j)
    let mut relations = Vec::new();
    for &r in &r_basis.gens {
        let r = r as u32;
        for i in 0..k {
            for j in 0..l {
                let mut coords = vec![0u64; k * l];
                let fs = s_ring.mul(f.apply(r), s_basis.gens[i] as u32);
                for (si, &c) in s_basis.coords[&(fs as u64)].iter().enumerate() {
                    let d = scratch.orders[si * l + j];
                    coords[si * l + j] = (coords[si * l + j] + c as u64) % d;
                }
                for (mj, &c) in m.act_coords(r, j).iter().enumerate() {
                    let d = scratch.orders[i * l + mj];
                    coords[i * l + mj] = (coords[i * l + mj] + d - c as u64 % d) % d;
                }
                let elem = scratch.encode(&coords);
                if elem != 0 {
                    relations.push(elem);
                }
            }
        }
    }
    let sub = scratch.closure(&relations);
    let reps = scratch.coset_reps(&sub);
    let act_scratch = |s: u32, x: u64| -> u64 {
        let cx = scratch.decode(x);
        let mut coords = vec![0u64; k * l];
        for i in 0..k {
            for j in 0..l {
                let c = cx[i * l + j];
                if c == 0 {
                    continue;
                }
                let prod = s_ring.mul(s, s_basis.gens[i] as u32);
                for (si, &v) in s_basis.coords[&(prod as u64)].iter().enumerate() {
                    let d = scratch.orders[si * l + j];
                    coords[si * l + j] = (coords[si * l + j] + c * v as u64) % d;
                }
            }
        }
        scratch.encode(&coords)
    };
    for &sb in &sub {
        for &s in &s_basis.gens {
            if reps[act_scratch(s as u32, sb) as usize] != 0 {
                return Err(Error::Validation("scalar extension does not descend to the quotient".into()));
            }
        }
    }
    let mut rep_elems: Vec<u64> = reps.iter().copied().collect();
    rep_elems.sort_unstable();
    rep_elems.dedup();
    let add = |x: u64, y: u64| reps[scratch.add(x, y) as usize];
    let act = |s: u32, x: u64| reps[act_scratch(s, x) as usize];
    let (module, translate) = module_from_group(s_ring, &rep_elems, 0, &add, &act)?;
    let to_quotient: Vec<u64> = reps.iter().map(|&r| translate[&r]).collect();
    Ok(BaseChange { module, s_basis, scratch_orders, to_quotient, m: m.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::{direct_sum, module_isomorphic};
    use crate::ring::{parse_ring, ring_homs, FiniteCommRing};

    fn cfg() -> Config {
        Config::default()
    }

    fn cyclic_module(ring: &Arc<FiniteCommRing>, m: u64) -> Arc<FGModule> {
        let action: Vec<Vec<Vec<u32>>> =
            (0..ring.order as u64).map(|r| vec![vec![(r % m) as u32]]).collect();
        FGModule::new(ring.clone(), vec![m], action).unwrap()
    }

    #[test]
    fn coprime_cyclics_tensor_to_zero() {
        let r = parse_ring("Z/6", &cfg()).unwrap();
        let m2 = cyclic_module(&r, 2);
        let m3 = cyclic_module(&r, 3);
        let t = tensor_over(&m2, &m3, &cfg()).unwrap();
        assert_eq!(t.module.order(), 1);
        assert_eq!(t.bilinear(1, 2), 0);
    }

    #[test]
    fn mixed_tensor_order() {
        let r = parse_ring("Z/6", &cfg()).unwrap();
        let m2 = cyclic_module(&r, 2);
        let m6 = cyclic_module(&r, 6);
        let s = direct_sum(&m2, &m6, &cfg()).unwrap();
        let t = tensor_over(&s.module, &m2, &cfg()).unwrap();
        assert_eq!(t.module.order(), 4);
    }

    #[test]
    fn unit_constraint() {
        let r = parse_ring("Z/6", &cfg()).unwrap();
        let f1 = FreeModule::new(&r, 1, &cfg()).unwrap();
        for m in [cyclic_module(&r, 2), cyclic_module(&r, 3), f1.module.clone()] {
            let t = tensor_over(&f1.module, &m, &cfg()).unwrap();
            assert!(module_isomorphic(&t.module, &m, &cfg()).unwrap().is_some());
            // the canonical map x -> 1 (x) x realizes the isomorphism
            let one = f1.vec_to_elem(&[r.one]);
            let images: Vec<u64> = (0..m.ngens()).map(|i| t.bilinear(one, m.gen_elem(i))).collect();
            let map = ModuleMap::new(m.clone(), t.module.clone(), images).unwrap();
            assert!(map.is_bijective());
        }
    }

    #[test]
    fn symmetry_via_factorization() {
        let r = parse_ring("Z/12", &cfg()).unwrap();
        let m2 = cyclic_module(&r, 2);
        let m6 = cyclic_module(&r, 6);
        let s = direct_sum(&m2, &m6, &cfg()).unwrap();
        let t_ab = tensor_over(&s.module, &m6, &cfg()).unwrap();
        let t_ba = tensor_over(&m6, &s.module, &cfg()).unwrap();
        let swap = |x: u64, y: u64| t_ba.bilinear(y, x);
        let map = factor_bilinear(&t_ab, &t_ba.module, &swap).unwrap();
        assert!(map.is_bijective());
    }

    #[test]
    fn free_path_agrees_with_general() {
        let r = parse_ring("Z/4", &cfg()).unwrap();
        let fa = FreeModule::new(&r, 2, &cfg()).unwrap();
        let fb = FreeModule::new(&r, 1, &cfg()).unwrap();
        let fast = tensor_free(&fa, &fb, &cfg()).unwrap();
        let general = tensor_over(&fa.module, &fb.module, &cfg()).unwrap();
        assert_eq!(fast.module.order(), general.module.order());
        let beta = |x: u64, y: u64| fast.bilinear(x, y);
        let map = factor_bilinear(&general, &fast.module, &beta).unwrap();
        assert!(map.is_bijective());
    }

    #[test]
    fn tensor_with_zero_module() {
        let r = parse_ring("Z/4", &cfg()).unwrap();
        let z = FGModule::zero_module(r.clone());
        let f1 = FreeModule::new(&r, 1, &cfg()).unwrap();
        let t = tensor_over(&f1.module, &z, &cfg()).unwrap();
        assert_eq!(t.module.order(), 1);
    }

    #[test]
    fn base_change_of_free_line() {
        let z4 = parse_ring("Z/4", &cfg()).unwrap();
        let z2 = parse_ring("Z/2", &cfg()).unwrap();
        let f = ring_homs(&z4, &z2).into_iter().next().unwrap();
        let free1 = FreeModule::new(&z4, 1, &cfg()).unwrap();
        let bc = base_change(&f, &free1.module, &cfg()).unwrap();
        assert_eq!(bc.module.order(), 2);
        assert!(bc.module.ring.same_tables(&z2));
        // 1 (x) 1 generates
        assert_ne!(bc.pure(z2.one, free1.vec_to_elem(&[z4.one])), 0);
    }

    #[test]
    fn base_change_kills_coprime_part() {
        let z6 = parse_ring("Z/6", &cfg()).unwrap();
        let z3 = parse_ring("Z/3", &cfg()).unwrap();
        let f = ring_homs(&z6, &z3).into_iter().next().unwrap();
        let m2 = cyclic_module(&z6, 2);
        let bc = base_change(&f, &m2, &cfg()).unwrap();
        assert_eq!(bc.module.order(), 1);
        let free1 = FreeModule::new(&z6, 1, &cfg()).unwrap();
        let bc_line = base_change(&f, &free1.module, &cfg()).unwrap();
        assert_eq!(bc_line.module.order(), 3);
    }

    #[test]
    fn tensor_cap_respected() {
        let r = parse_ring("Z/4", &cfg()).unwrap();
        let small = Config { max_module_order: 8, ..Config::default() };
        let fa = FreeModule::new(&r, 1, &small).unwrap();
        let err = tensor_over(&fa.module, &fa.module, &Config { max_module_order: 8, ..Config::default() });
        assert!(err.is_ok()); // 4 * 4 = 16 scratch digits of gcd 4 -> size 4
        let fb = FreeModule::new(&r, 2, &cfg()).unwrap();
        let err2 = tensor_over(&fb.module, &fb.module, &Config { max_module_order: 8, ..Config::default() });
        assert!(matches!(err2, Err(Error::CapExceeded { .. })));
    }
}
