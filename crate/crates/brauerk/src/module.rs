//! Finitely generated modules over a finite commutative ring.
//!
//! A module is stored as a cyclic decomposition of its additive group: orders
//! `d_1..d_k` plus, for every ring element `r`, the coordinate vectors of
//! `r * g_i`. Elements are mixed-radix encodings (little-endian) in a `u64`,
//! so a module of order up to the configured cap never materializes an
//! operation table.
//!
//! Validation checks the action table on generators: identity action,
//! additivity and multiplicativity in the ring argument, and well-definedness
//! (`d_i * (r g_i) = 0`). The coordinatewise extension to all elements is
//! Z-linear, so these generator checks pin down the module axioms.

use std::collections::HashMap;
use std::sync::Arc;

use crate::abelian::{cyclic_basis, gcd_u64, invariants_from_cyclic_orders, CyclicBasis};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::ring::{derivations, ring_generators, Derivation, FiniteCommRing, LocalDecomposition};

#[derive(Debug, Clone)]
pub struct FGModule {
    pub ring: Arc<FiniteCommRing>,
    pub orders: Vec<u64>,
    action: Vec<Vec<Vec<u32>>>,
}

impl FGModule {
    pub fn new(ring: Arc<FiniteCommRing>, orders: Vec<u64>, action: Vec<Vec<Vec<u32>>>) -> Result<Arc<Self>> {
        let k = orders.len();
        if orders.iter().any(|&d| d < 2) {
            return Err(Error::Validation("cyclic orders must be at least 2".into()));
        }
        let total: u128 = orders.iter().map(|&d| d as u128).product();
        if total > 1u128 << 32 {
            return Err(Error::CapExceeded { what: "module order", size: u64::MAX, cap: 1 << 32 });
        }
        if action.len() != ring.order {
            return Err(Error::Validation("action table must cover every ring element".into()));
        }
        for row in &action {
            if row.len() != k || row.iter().any(|c| c.len() != k) {
                return Err(Error::Validation("action table shape mismatch".into()));
            }
            for c in row {
                for (j, &v) in c.iter().enumerate() {
                    if v as u64 >= orders[j] {
                        return Err(Error::Validation("action coordinate out of range".into()));
                    }
                }
            }
        }
        let m = FGModule { ring, orders, action };
        m.validate()?;
        Ok(Arc::new(m))
    }

    fn validate(&self) -> Result<()> {
        let k = self.ngens();
        let ring = &self.ring;
        let fail = |msg: &str| Err(Error::Validation(format!("module action: {}", msg)));
        for i in 0..k {
            for j in 0..k {
                let expect = if i == j { 1 } else { 0 };
                if self.action[ring.one as usize][i][j] != expect {
                    return fail("identity must act as identity");
                }
            }
            // d_i * (r g_i) = 0 for every r
            for r in 0..ring.order {
                let c = &self.action[r][i];
                for j in 0..k {
                    if (self.orders[i] as u128 * c[j] as u128) % self.orders[j] as u128 != 0 {
                        return fail("action not well defined on cyclic generators");
                    }
                }
            }
        }
        for r in 0..ring.order as u32 {
            for s in 0..ring.order as u32 {
                let sum = ring.add(r, s) as usize;
                let prod = ring.mul(r, s) as usize;
                for i in 0..k {
                    for j in 0..k {
                        let lhs = self.action[sum][i][j] as u64;
                        let rhs =
                            (self.action[r as usize][i][j] as u64 + self.action[s as usize][i][j] as u64) % self.orders[j];
                        if lhs != rhs {
                            return fail("action not additive in the ring argument");
                        }
                    }
                }
                for i in 0..k {
                    let via_table = self.encode(&self.action[prod][i]);
                    let stepped = self.scalar(r, self.encode(&self.action[s as usize][i]));
                    if via_table != stepped {
                        return fail("action not multiplicative in the ring argument");
                    }
                }
            }
        }
        Ok(())
    }

    pub fn zero_module(ring: Arc<FiniteCommRing>) -> Arc<Self> {
        let action = vec![Vec::new(); ring.order];
        Self::new(ring, Vec::new(), action).expect("zero module is valid")
    }

    pub fn ngens(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    pub fn decode(&self, mut x: u64) -> Vec<u32> {
        let mut c = Vec::with_capacity(self.orders.len());
        for &d in &self.orders {
            c.push((x % d) as u32);
            x /= d;
        }
        c
    }

    pub fn encode(&self, coords: &[u32]) -> u64 {
        let mut x = 0u64;
        for (i, &d) in self.orders.iter().enumerate().rev() {
            x = x * d + coords[i] as u64;
        }
        x
    }

    pub fn gen_elem(&self, i: usize) -> u64 {
        let mut c = vec![0u32; self.ngens()];
        c[i] = 1;
        self.encode(&c)
    }

    pub fn add_elems(&self, x: u64, y: u64) -> u64 {
        let (mut a, mut b, mut out, mut mult) = (x, y, 0u64, 1u64);
        for &d in &self.orders {
            out += ((a % d + b % d) % d) * mult;
            mult *= d;
            a /= d;
            b /= d;
        }
        out
    }

    pub fn neg_elem(&self, x: u64) -> u64 {
        let (mut a, mut out, mut mult) = (x, 0u64, 1u64);
        for &d in &self.orders {
            out += ((d - a % d) % d) * mult;
            mult *= d;
            a /= d;
        }
        out
    }

    pub fn sub_elems(&self, x: u64, y: u64) -> u64 {
        let (mut a, mut b, mut out, mut mult) = (x, y, 0u64, 1u64);
        for &d in &self.orders {
            out += ((a % d + (d - b % d)) % d) * mult;
            mult *= d;
            a /= d;
            b /= d;
        }
        out
    }

    pub fn int_scale(&self, n: u64, x: u64) -> u64 {
        let (mut a, mut out, mut mult) = (x, 0u64, 1u64);
        for &d in &self.orders {
            out += ((a % d) * (n % d) % d) * mult;
            mult *= d;
            a /= d;
        }
        out
    }

    pub fn scalar(&self, r: u32, x: u64) -> u64 {
        let mut out = 0u64;
        let mut a = x;
        for (i, &d) in self.orders.iter().enumerate() {
            let xi = a % d;
            a /= d;
            if xi == 0 {
                continue;
            }
            let row = self.encode(&self.action[r as usize][i]);
            out = self.add_elems(out, self.int_scale(xi, row));
        }
        out
    }

    pub fn element_add_order(&self, x: u64) -> u64 {
        let cx = self.decode(x);
        let mut o = 1u64;
        for (i, &d) in self.orders.iter().enumerate() {
            let g = crate::abelian::gcd_u64(cx[i] as u64, d);
            o = crate::abelian::lcm_u64(o, d / g);
        }
        o
    }

    pub fn additive_invariants(&self) -> Vec<u64> {
        invariants_from_cyclic_orders(&self.orders)
    }

    pub fn same_presentation(&self, other: &FGModule) -> bool {
        self.ring.same_tables(&other.ring) && self.orders == other.orders && self.action == other.action
    }

    pub fn act_coords(&self, r: u32, i: usize) -> &[u32] {
        &self.action[r as usize][i]
    }
}

/// Build a module from a group of `u64`-labelled elements with explicit
/// operations and a ring action. Returns the module plus the relabelling from
/// ambient labels to module encodings. Validation of the resulting action
/// table certifies the construction.
pub fn module_from_group(
    ring: &Arc<FiniteCommRing>,
    elems: &[u64],
    zero: u64,
    add: &dyn Fn(u64, u64) -> u64,
    act: &dyn Fn(u32, u64) -> u64,
) -> Result<(Arc<FGModule>, HashMap<u64, u64>)> {
    let basis = cyclic_basis(elems, zero, add);
    let k = basis.gens.len();
    let mut action = Vec::with_capacity(ring.order);
    for r in 0..ring.order as u32 {
        let mut row = Vec::with_capacity(k);
        for i in 0..k {
            let image = act(r, basis.gens[i]);
            let coords = basis
                .coords
                .get(&image)
                .ok_or_else(|| Error::Validation("ring action leaves the group".into()))?;
            row.push(coords.clone());
        }
        action.push(row);
    }
    let module = FGModule::new(ring.clone(), basis.orders.clone(), action)?;
    let translate: HashMap<u64, u64> = basis
        .coords
        .iter()
        .map(|(&e, coords)| (e, module.encode(coords)))
        .collect();
    Ok((module, translate))
}

// ---------------------------------------------------------------------------
// Module maps
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ModuleMap {
    pub src: Arc<FGModule>,
    pub tgt: Arc<FGModule>,
    pub images: Vec<u64>,
}

impl ModuleMap {
    pub fn new(src: Arc<FGModule>, tgt: Arc<FGModule>, images: Vec<u64>) -> Result<Self> {
        if images.len() != src.ngens() {
            return Err(Error::Validation("one image per generator required".into()));
        }
        for (i, &y) in images.iter().enumerate() {
            if tgt.int_scale(src.orders[i], y) != 0 {
                return Err(Error::Validation("generator image has incompatible additive order".into()));
            }
        }
        let map = ModuleMap { src, tgt, images };
        for r in 0..map.src.ring.order as u32 {
            for i in 0..map.src.ngens() {
                let lhs = map.apply(map.src.scalar(r, map.src.gen_elem(i)));
                let rhs = map.tgt.scalar(r, map.images[i]);
                if lhs != rhs {
                    return Err(Error::Validation("map is not linear over the ring".into()));
                }
            }
        }
        Ok(map)
    }

    pub fn identity(m: &Arc<FGModule>) -> Self {
        let images = (0..m.ngens()).map(|i| m.gen_elem(i)).collect();
        ModuleMap { src: m.clone(), tgt: m.clone(), images }
    }

    pub fn zero_map(src: &Arc<FGModule>, tgt: &Arc<FGModule>) -> Self {
        ModuleMap { src: src.clone(), tgt: tgt.clone(), images: vec![0; src.ngens()] }
    }

    pub fn apply(&self, x: u64) -> u64 {
        let cx = self.src.decode(x);
        let mut acc = 0u64;
        for (i, &c) in cx.iter().enumerate() {
            if c != 0 {
                acc = self.tgt.add_elems(acc, self.tgt.int_scale(c as u64, self.images[i]));
            }
        }
        acc
    }

    pub fn compose(&self, then: &ModuleMap) -> Result<ModuleMap> {
        if !self.tgt.same_presentation(&then.src) {
            return Err(Error::Validation("composition endpoints do not match".into()));
        }
        let images = self.images.iter().map(|&y| then.apply(y)).collect();
        ModuleMap::new(self.src.clone(), then.tgt.clone(), images)
    }

    pub fn is_bijective(&self) -> bool {
        if self.src.order() != self.tgt.order() {
            return false;
        }
        let mut seen = vec![false; self.tgt.order() as usize];
        for x in 0..self.src.order() {
            let y = self.apply(x) as usize;
            if seen[y] {
                return false;
            }
            seen[y] = true;
        }
        true
    }

    pub fn inverse(&self) -> Result<ModuleMap> {
        if !self.is_bijective() {
            return Err(Error::Validation("cannot invert a non-bijective map".into()));
        }
        let mut table = vec![0u64; self.tgt.order() as usize];
        for x in 0..self.src.order() {
            table[self.apply(x) as usize] = x;
        }
        let images = (0..self.tgt.ngens()).map(|i| table[self.tgt.gen_elem(i) as usize]).collect();
        ModuleMap::new(self.tgt.clone(), self.src.clone(), images)
    }

    pub fn is_identity(&self) -> bool {
        self.src.same_presentation(&self.tgt) && (0..self.src.ngens()).all(|i| self.images[i] == self.src.gen_elem(i))
    }

    pub fn kernel_elements(&self) -> Vec<u64> {
        (0..self.src.order()).filter(|&x| self.apply(x) == 0).collect()
    }
}

/// All module homomorphisms, by backtracking over generator images with a
/// node budget.
pub fn hom_module(src: &Arc<FGModule>, tgt: &Arc<FGModule>, config: &Config) -> Result<Vec<ModuleMap>> {
    if !src.ring.same_tables(&tgt.ring) {
        return Err(Error::MixedRings);
    }
    let k = src.ngens();
    let mut candidates: Vec<Vec<u64>> = Vec::with_capacity(k);
    for i in 0..k {
        let d = src.orders[i];
        candidates.push((0..tgt.order()).filter(|&y| tgt.int_scale(d, y) == 0).collect());
    }
    let mut out = Vec::new();
    let mut images = vec![0u64; k];
    let mut nodes = 0u64;
    hom_dfs(src, tgt, &candidates, &mut images, 0, &mut nodes, config, &mut |map| {
        out.push(map);
        true
    })?;
    Ok(out)
}

/// Visit homomorphisms one at a time; the visitor returns `false` to stop.
fn hom_dfs(
    src: &Arc<FGModule>,
    tgt: &Arc<FGModule>,
    candidates: &[Vec<u64>],
    images: &mut Vec<u64>,
    depth: usize,
    nodes: &mut u64,
    config: &Config,
    visit: &mut dyn FnMut(ModuleMap) -> bool,
) -> Result<bool> {
    if depth == images.len() {
        *nodes += 1;
        if *nodes > config.iso_node_budget {
            return Err(Error::Inconclusive { stage: "module hom enumeration", limit: config.iso_node_budget });
        }
        if let Ok(map) = ModuleMap::new(src.clone(), tgt.clone(), images.clone()) {
            return Ok(visit(map));
        }
        return Ok(true);
    }
    for &y in &candidates[depth] {
        images[depth] = y;
        if !hom_dfs(src, tgt, candidates, images, depth + 1, nodes, config, visit)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Isomorphism search with additive-invariant pruning.
pub fn module_isomorphic(
    a: &Arc<FGModule>,
    b: &Arc<FGModule>,
    config: &Config,
) -> Result<Option<ModuleMap>> {
    if !a.ring.same_tables(&b.ring) {
        return Err(Error::MixedRings);
    }
    if a.order() != b.order() || a.additive_invariants() != b.additive_invariants() {
        return Ok(None);
    }
    let k = a.ngens();
    let mut candidates: Vec<Vec<u64>> = Vec::with_capacity(k);
    for i in 0..k {
        let d = a.orders[i];
        candidates.push((0..b.order()).filter(|&y| b.element_add_order(y) == d).collect());
    }
    let mut found = None;
    let mut images = vec![0u64; k];
    let mut nodes = 0u64;
    hom_dfs(a, b, &candidates, &mut images, 0, &mut nodes, config, &mut |map| {
        if map.is_bijective() {
            found = Some(map);
            false
        } else {
            true
        }
    })?;
    Ok(found)
}

// ---------------------------------------------------------------------------
// Free modules
// ---------------------------------------------------------------------------

/// `R^n` with explicit translation between module encodings and vectors of
/// ring elements.
#[derive(Debug, Clone)]
pub struct FreeModule {
    pub module: Arc<FGModule>,
    pub rank: usize,
    basis: CyclicBasis,
    ring_decode: Vec<u64>,
}

impl FreeModule {
    pub fn new(ring: &Arc<FiniteCommRing>, rank: usize, config: &Config) -> Result<Self> {
        let size: u128 = (ring.order as u128).pow(rank as u32);
        if size > config.max_module_order as u128 {
            return Err(Error::CapExceeded {
                what: "free module order",
                size: size.min(u64::MAX as u128) as u64,
                cap: config.max_module_order,
            });
        }
        let basis = ring.additive_basis();
        let k0 = basis.gens.len();
        let k = k0 * rank;
        let mut orders = Vec::with_capacity(k);
        for _ in 0..rank {
            orders.extend_from_slice(&basis.orders);
        }
        let mut action = Vec::with_capacity(ring.order);
        for r in 0..ring.order as u32 {
            let mut row = Vec::with_capacity(k);
            for t in 0..rank {
                for i in 0..k0 {
                    let image = ring.mul(r, basis.gens[i] as u32) as u64;
                    let ring_coords = &basis.coords[&image];
                    let mut c = vec![0u32; k];
                    c[t * k0..(t + 1) * k0].copy_from_slice(ring_coords);
                    row.push(c);
                }
            }
            action.push(row);
        }
        let module = FGModule::new(ring.clone(), orders, action)?;
        // positional code of a ring element's coordinate vector -> element
        let mut ring_decode = vec![u64::MAX; ring.order];
        for (&elem, coords) in &basis.coords {
            let mut code = 0u64;
            for (i, &d) in basis.orders.iter().enumerate().rev() {
                code = code * d + coords[i] as u64;
            }
            ring_decode[code as usize] = elem;
        }
        Ok(FreeModule { module, rank, basis, ring_decode })
    }

    pub fn ring(&self) -> &Arc<FiniteCommRing> {
        &self.module.ring
    }

    pub fn vec_to_elem(&self, v: &[u32]) -> u64 {
        assert_eq!(v.len(), self.rank);
        let k0 = self.basis.gens.len();
        let mut coords = vec![0u32; k0 * self.rank];
        for (t, &r) in v.iter().enumerate() {
            coords[t * k0..(t + 1) * k0].copy_from_slice(&self.basis.coords[&(r as u64)]);
        }
        self.module.encode(&coords)
    }

    pub fn elem_to_vec(&self, x: u64) -> Vec<u32> {
        let k0 = self.basis.gens.len();
        let coords = self.module.decode(x);
        (0..self.rank)
            .map(|t| {
                let mut code = 0u64;
                for i in (0..k0).rev() {
                    code = code * self.basis.orders[i] + coords[t * k0 + i] as u64;
                }
                self.ring_decode[code as usize] as u32
            })
            .collect()
    }

    /// Standard basis vector with `r` in position `t`.
    pub fn unit_vec(&self, t: usize, r: u32) -> u64 {
        let mut v = vec![self.ring().zero; self.rank];
        v[t] = r;
        self.vec_to_elem(&v)
    }
}

// ---------------------------------------------------------------------------
// Direct sums
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct DirectSum {
    pub module: Arc<FGModule>,
    pub left_order: u64,
}

impl DirectSum {
    pub fn pair(&self, x: u64, y: u64) -> u64 {
        x + self.left_order * y
    }

    pub fn split(&self, z: u64) -> (u64, u64) {
        (z % self.left_order, z / self.left_order)
    }
}

pub fn direct_sum(a: &Arc<FGModule>, b: &Arc<FGModule>, config: &Config) -> Result<DirectSum> {
    if !a.ring.same_tables(&b.ring) {
        return Err(Error::MixedRings);
    }
    let size = a.order() as u128 * b.order() as u128;
    if size > config.max_module_order as u128 {
        return Err(Error::CapExceeded {
            what: "direct sum order",
            size: size.min(u64::MAX as u128) as u64,
            cap: config.max_module_order,
        });
    }
    let (ka, kb) = (a.ngens(), b.ngens());
    let mut orders = a.orders.clone();
    orders.extend_from_slice(&b.orders);
    let mut action = Vec::with_capacity(a.ring.order);
    for r in 0..a.ring.order {
        let mut row = Vec::with_capacity(ka + kb);
        for i in 0..ka {
            let mut c = vec![0u32; ka + kb];
            c[..ka].copy_from_slice(&a.action[r][i]);
            row.push(c);
        }
        for i in 0..kb {
            let mut c = vec![0u32; ka + kb];
            c[ka..].copy_from_slice(&b.action[r][i]);
            row.push(c);
        }
        action.push(row);
    }
    let module = FGModule::new(a.ring.clone(), orders, action)?;
    Ok(DirectSum { module, left_order: a.order() })
}

// ---------------------------------------------------------------------------
// Fibers, rank, projectivity
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Fiber {
    /// The fiber as a vector space over the residue field.
    pub space: Arc<FGModule>,
    /// Source element -> fiber encoding.
    pub proj: Vec<u64>,
    pub dim: u64,
}

pub(crate) fn subgroup_closure_elems(m: &FGModule, gens: &[u64]) -> Vec<u64> {
    let mut seen: HashMap<u64, ()> = HashMap::new();
    seen.insert(0, ());
    let mut elems = vec![0u64];
    let mut frontier = vec![0u64];
    while let Some(x) = frontier.pop() {
        for &g in gens {
            let y = m.add_elems(x, g);
            if seen.insert(y, ()).is_none() {
                elems.push(y);
                frontier.push(y);
            }
        }
    }
    elems.sort_unstable();
    elems
}

/// Minimal coset representative for every element of the subset `carrier`
/// (which must be a union of cosets of the subgroup).
pub(crate) fn coset_reps(m: &FGModule, carrier: &[u64], sub: &[u64]) -> HashMap<u64, u64> {
    let mut rep: HashMap<u64, u64> = HashMap::with_capacity(carrier.len());
    for &x in carrier {
        if rep.contains_key(&x) {
            continue;
        }
        for &s in sub {
            rep.insert(m.add_elems(x, s), x);
        }
    }
    rep
}

/// Fiber of the module at the i-th local factor: the quotient by the radical
/// action, carrying its vector-space structure over the residue field.
pub fn fiber_at(m: &Arc<FGModule>, dec: &LocalDecomposition, i: usize) -> Result<Fiber> {
    let ring = &m.ring;
    let factor = &dec.factors[i];
    let e = factor.embed[factor.ring.one as usize];
    // carrier e*M and its radical subgroup
    let mut carrier: Vec<u64> = (0..m.order()).map(|x| m.scalar(e, x)).collect();
    carrier.sort_unstable();
    carrier.dedup();
    let radical: Vec<u32> = factor.maximal_ideal.iter().map(|&a| factor.embed[a as usize]).collect();
    let mut subgens = Vec::new();
    for &r in &radical {
        for t in 0..m.ngens() {
            subgens.push(m.scalar(r, m.gen_elem(t)));
        }
    }
    let sub = subgroup_closure_elems(m, &subgens);
    let reps = coset_reps(m, &carrier, &sub);
    let kappa = &factor.residue_field;
    // one ring lift per residue element
    let mut lift = vec![u32::MAX; kappa.order];
    for r in 0..ring.order as u32 {
        let res = dec.residue_of(i, r);
        if lift[res as usize] == u32::MAX {
            // force the lift into the factor so it kills the other components
            lift[res as usize] = m.ring.mul(e, r);
        }
    }
    let mut rep_elems: Vec<u64> = reps.values().copied().collect();
    rep_elems.sort_unstable();
    rep_elems.dedup();
    let add = |x: u64, y: u64| reps[&m.add_elems(x, y)];
    let act = |c: u32, x: u64| reps[&m.scalar(lift[c as usize], x)];
    let (space, translate) = module_from_group(kappa, &rep_elems, reps[&0], &add, &act)?;
    let q = kappa.order as u64;
    let mut dim = 0u64;
    let mut pw = 1u64;
    while pw < space.order() {
        pw *= q;
        dim += 1;
    }
    if pw != space.order() {
        return Err(Error::Validation("fiber size is not a power of the residue field order".into()));
    }
    let mut proj = vec![0u64; m.order() as usize];
    for x in 0..m.order() {
        proj[x as usize] = translate[&reps[&m.scalar(e, x)]];
    }
    Ok(Fiber { space, proj, dim })
}

/// Ranks of the module at each local factor.
pub fn rank_function(m: &Arc<FGModule>, dec: &LocalDecomposition) -> Result<Vec<u64>> {
    (0..dec.factors.len()).map(|i| Ok(fiber_at(m, dec, i)?.dim)).collect()
}

/// Finitely generated with everywhere-positive rank.
pub fn is_generator(m: &Arc<FGModule>, dec: &LocalDecomposition) -> Result<bool> {
    Ok(rank_function(m, dec)?.iter().all(|&r| r > 0))
}

/// Trace ideal: additive span of all images of maps into the ring.
pub fn trace_ideal(m: &Arc<FGModule>, config: &Config) -> Result<Vec<u32>> {
    let free1 = FreeModule::new(&m.ring, 1, config)?;
    let homs = hom_module(m, &free1.module, config)?;
    let ring = &m.ring;
    let mut seen = vec![false; ring.order];
    seen[ring.zero as usize] = true;
    let mut elems = vec![ring.zero];
    let mut frontier = vec![ring.zero];
    let mut values = Vec::new();
    for h in &homs {
        for x in 0..m.order() {
            values.push(free1.elem_to_vec(h.apply(x))[0]);
        }
    }
    values.sort_unstable();
    values.dedup();
    while let Some(x) = frontier.pop() {
        for &v in &values {
            let y = ring.add(x, v);
            if !seen[y as usize] {
                seen[y as usize] = true;
                elems.push(y);
                frontier.push(y);
            }
        }
    }
    elems.sort_unstable();
    Ok(elems)
}

#[derive(Debug, Clone)]
pub struct SplittingCertificate {
    pub free: FreeModule,
    pub projection: ModuleMap,
    pub section: ModuleMap,
}

/// Projectivity over a finite commutative ring, decided factor by factor by
/// exact counting, and certified by an explicitly constructed splitting of
/// the generator surjection. The certificate is re-verified pointwise.
pub fn is_projective(
    m: &Arc<FGModule>,
    dec: &LocalDecomposition,
    config: &Config,
) -> Result<Option<SplittingCertificate>> {
    let ring = &m.ring;
    let k = m.ngens();
    let free = FreeModule::new(ring, k, config)?;
    let proj_images: Vec<u64> = {
        let k0 = free.basis.gens.len();
        let mut v = Vec::with_capacity(k * k0);
        for t in 0..k {
            for i in 0..k0 {
                v.push(m.scalar(free.basis.gens[i] as u32, m.gen_elem(t)));
            }
        }
        v
    };
    let projection = ModuleMap::new(free.module.clone(), m.clone(), proj_images)?;
    if k == 0 {
        let section = ModuleMap::new(m.clone(), free.module.clone(), Vec::new())?;
        return Ok(Some(SplittingCertificate { free, projection, section }));
    }
    // per-factor free bases of e_i M, with coordinates
    let mut section_images = vec![0u64; k];
    for (fi, factor) in dec.factors.iter().enumerate() {
        let e = factor.embed[factor.ring.one as usize];
        let mut carrier: Vec<u64> = (0..m.order()).map(|x| m.scalar(e, x)).collect();
        carrier.sort_unstable();
        carrier.dedup();
        let fiber = fiber_at(m, dec, fi)?;
        let r_i = fiber.dim as usize;
        let size_if_free = (factor.ring.order as u128).pow(r_i as u32);
        if carrier.len() as u128 != size_if_free {
            return Ok(None);
        }
        // choose elements whose fiber images span: the span of chosen images
        // is tracked as an explicit subset of the fiber
        let mut basis: Vec<u64> = Vec::new();
        let mut span: Vec<u64> = vec![0];
        for &x in &carrier {
            if basis.len() == r_i {
                break;
            }
            let px = fiber.proj[x as usize];
            if span.contains(&px) {
                continue;
            }
            basis.push(x);
            let mut next = Vec::new();
            for &s in &span {
                for c in 0..factor.residue_field.order as u32 {
                    let mult = fiber.space.scalar(c, px);
                    next.push(fiber.space.add_elems(s, mult));
                }
            }
            next.sort_unstable();
            next.dedup();
            span = next;
        }
        if basis.len() != r_i {
            return Ok(None);
        }
        // coordinates: the factor-linear map R_i^{r_i} -> e_i M must be a
        // bijection; materialize it and keep the inverse
        let mut coords: HashMap<u64, Vec<u32>> = HashMap::with_capacity(carrier.len());
        let mut tuple = vec![0u32; r_i];
        loop {
            let mut val = 0u64;
            for (j, &a) in tuple.iter().enumerate() {
                val = m.add_elems(val, m.scalar(factor.embed[a as usize], basis[j]));
            }
            if coords.insert(val, tuple.clone()).is_some() {
                return Err(Error::Validation("counting said free but coordinates collide".into()));
            }
            let mut j = 0;
            loop {
                if j == r_i {
                    break;
                }
                tuple[j] += 1;
                if (tuple[j] as usize) < factor.ring.order {
                    break;
                }
                tuple[j] = 0;
                j += 1;
            }
            if j == r_i {
                break;
            }
        }
        if coords.len() != carrier.len() {
            return Err(Error::Validation("free coordinates do not cover the carrier".into()));
        }
        // basis elements pulled back to the free cover through their integer
        // coordinates
        let lifts: Vec<u64> = basis
            .iter()
            .map(|&b| {
                let c = m.decode(b);
                let v: Vec<u32> = (0..k).map(|t| ring.int_mul(c[t] as u64, ring.one)).collect();
                free.vec_to_elem(&v)
            })
            .collect();
        for t in 0..k {
            let target = m.scalar(e, m.gen_elem(t));
            let a = &coords[&target];
            let mut acc = section_images[t];
            for (j, &aj) in a.iter().enumerate() {
                let scaled = free.module.scalar(factor.embed[aj as usize], lifts[j]);
                acc = free.module.add_elems(acc, scaled);
            }
            section_images[t] = acc;
        }
    }
    let section = ModuleMap::new(m.clone(), free.module.clone(), section_images)?;
    for x in 0..m.order() {
        if projection.apply(section.apply(x)) != x {
            return Err(Error::Validation("constructed section does not split the projection".into()));
        }
    }
    Ok(Some(SplittingCertificate { free, projection, section }))
}

// ---------------------------------------------------------------------------
// Module enumeration
// ---------------------------------------------------------------------------

/// Mixed-radix arithmetic for a bare abelian group shape, used while a
/// candidate ring action is still being searched and no validated module
/// exists yet.
struct Shape {
    orders: Vec<u64>,
}

impl Shape {
    fn size(&self) -> u64 {
        self.orders.iter().product()
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
            x = x * d + coords[i];
        }
        x
    }

    fn gen_elem(&self, i: usize) -> u64 {
        let mut coords = vec![0u64; self.orders.len()];
        coords[i] = 1;
        self.encode(&coords)
    }

    fn add(&self, x: u64, y: u64) -> u64 {
        let (cx, cy) = (self.decode(x), self.decode(y));
        let sum: Vec<u64> =
            self.orders.iter().enumerate().map(|(i, &d)| (cx[i] + cy[i]) % d).collect();
        self.encode(&sum)
    }

    fn scale(&self, n: u64, x: u64) -> u64 {
        let c = self.decode(x);
        let scaled: Vec<u64> =
            self.orders.iter().enumerate().map(|(i, &d)| (c[i] * (n % d)) % d).collect();
        self.encode(&scaled)
    }

    /// Apply the endomorphism with the given generator images.
    fn apply(&self, images: &[u64], x: u64) -> u64 {
        let c = self.decode(x);
        let mut acc = 0u64;
        for (i, &ci) in c.iter().enumerate() {
            if ci != 0 {
                acc = self.add(acc, self.scale(ci, images[i]));
            }
        }
        acc
    }

    fn compose(&self, f: &[u64], g: &[u64]) -> Vec<u64> {
        g.iter().map(|&y| self.apply(f, y)).collect()
    }

    fn add_endo(&self, f: &[u64], g: &[u64]) -> Vec<u64> {
        f.iter().zip(g).map(|(&a, &b)| self.add(a, b)).collect()
    }
}

/// Ascending divisor chains `d_1 | d_2 | ... | d_k` of the characteristic with
/// product at most `bound`. Each chain is the invariant-factor shape of one
/// abelian group with exponent dividing the characteristic, and every such
/// group appears exactly once.
fn invariant_chains(characteristic: u64, bound: u64) -> Vec<Vec<u64>> {
    fn rec(divs: &[u64], bound: u64, prod: u64, last: u64, chain: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        for &d in divs {
            if d % last != 0 {
                continue;
            }
            match prod.checked_mul(d) {
                Some(p) if p <= bound => {
                    chain.push(d);
                    out.push(chain.clone());
                    rec(divs, bound, p, d, chain, out);
                    chain.pop();
                }
                _ => {}
            }
        }
    }
    let divs: Vec<u64> = (2..=characteristic).filter(|d| characteristic % d == 0).collect();
    let mut out = Vec::new();
    rec(&divs, bound, 1, 1, &mut Vec::new(), &mut out);
    out
}

fn realize_action(
    ring: &Arc<FiniteCommRing>,
    ders: &[Derivation],
    shape: &Shape,
    gen_images: &[Vec<u64>],
) -> Result<Option<Arc<FGModule>>> {
    let n = ring.order;
    let k = shape.orders.len();
    let identity: Vec<u64> = (0..k).map(|i| shape.gen_elem(i)).collect();
    let mut endos: Vec<Option<Vec<u64>>> = (0..n).map(|_| None).collect();
    let mut remaining = n;
    while remaining > 0 {
        let mut progressed = false;
        for x in 0..n {
            if endos[x].is_some() {
                continue;
            }
            let v = match ders[x] {
                Derivation::Zero => Some(vec![0u64; k]),
                Derivation::One => Some(identity.clone()),
                Derivation::Gen(i) => Some(gen_images[i].clone()),
                Derivation::Add(a, b) => match (&endos[a as usize], &endos[b as usize]) {
                    (Some(f), Some(g)) => Some(shape.add_endo(f, g)),
                    _ => None,
                },
                Derivation::Mul(a, b) => match (&endos[a as usize], &endos[b as usize]) {
                    (Some(f), Some(g)) => Some(shape.compose(f, g)),
                    _ => None,
                },
            };
            if let Some(v) = v {
                endos[x] = Some(v);
                remaining -= 1;
                progressed = true;
            }
        }
        if !progressed {
            return Err(Error::Validation("derivation trace is incomplete".into()));
        }
    }
    let action: Vec<Vec<Vec<u32>>> = endos
        .into_iter()
        .map(|e| {
            e.unwrap().into_iter().map(|img| shape.decode(img).into_iter().map(|c| c as u32).collect()).collect()
        })
        .collect();
    match FGModule::new(ring.clone(), shape.orders.clone(), action) {
        Ok(m) => Ok(Some(m)),
        Err(Error::Validation(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Every module over the ring of order at most `bound`, up to isomorphism,
/// excluding the zero module. Candidate additive groups run over
/// invariant-factor shapes with exponent dividing the characteristic; for
/// each shape, every assignment of ring-generator images to group
/// endomorphisms is extended through the expression trace of the ring and the
/// resulting action table is validated exhaustively. Survivors are
/// deduplicated by the isomorphism search.
pub fn enumerate_modules(
    ring: &Arc<FiniteCommRing>,
    bound: u64,
    config: &Config,
) -> Result<Vec<Arc<FGModule>>> {
    let bound = bound.min(config.max_module_order);
    let mut characteristic = 1u64;
    let mut acc = ring.one;
    while acc != ring.zero {
        acc = ring.add(acc, ring.one);
        characteristic += 1;
    }
    let gens = ring_generators(ring);
    let ders = derivations(ring, &gens)
        .ok_or_else(|| Error::Validation("ring generators do not generate the ring".into()))?;
    let gen_add_orders: Vec<u64> = gens
        .iter()
        .map(|&g| {
            let mut o = 1u64;
            let mut a = g;
            while a != ring.zero {
                a = ring.add(a, g);
                o += 1;
            }
            o
        })
        .collect();
    let mut out: Vec<Arc<FGModule>> = Vec::new();
    let mut nodes = 0u64;
    for shape_orders in invariant_chains(characteristic, bound) {
        let shape = Shape { orders: shape_orders };
        let k = shape.orders.len();
        // candidate images per (generator, slot), annihilated by both the
        // slot order and the generator's additive order
        let slot_cands: Vec<Vec<u64>> = (0..gens.len() * k)
            .map(|s| {
                let ann = gcd_u64(shape.orders[s % k], gen_add_orders[s / k]);
                (0..shape.size()).filter(|&y| shape.scale(ann, y) == 0).collect()
            })
            .collect();
        let total_slots = gens.len() * k;
        let mut idx = vec![0usize; total_slots];
        loop {
            nodes += 1;
            if nodes > config.enumeration_node_budget {
                return Err(Error::Budget {
                    stage: "module structure enumeration",
                    limit: config.enumeration_node_budget,
                });
            }
            let gen_images: Vec<Vec<u64>> = (0..gens.len())
                .map(|gi| (0..k).map(|i| slot_cands[gi * k + i][idx[gi * k + i]]).collect())
                .collect();
            if let Some(m) = realize_action(ring, &ders, &shape, &gen_images)? {
                let mut dup = false;
                for rep in &out {
                    if rep.order() == m.order() && module_isomorphic(rep, &m, config)?.is_some() {
                        dup = true;
                        break;
                    }
                }
                if !dup {
                    out.push(m);
                }
            }
            // advance the odometer
            let mut pos = 0;
            while pos < total_slots {
                idx[pos] += 1;
                if idx[pos] < slot_cands[pos].len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == total_slots {
                break;
            }
        }
    }
    out.sort_by_key(|m| m.order());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{local_decomposition, parse_ring};

    fn cfg() -> Config {
        Config::default()
    }

    /// Z/m as a module over Z/n (m | n), action through reduction.
    fn cyclic_module(ring: &Arc<FiniteCommRing>, m: u64) -> Arc<FGModule> {
        let action: Vec<Vec<Vec<u32>>> =
            (0..ring.order as u64).map(|r| vec![vec![(r % m) as u32]]).collect();
        FGModule::new(ring.clone(), vec![m], action).unwrap()
    }

    #[test]
    fn free_rank_one_matches_ring() {
        let r = parse_ring("Z/6", &cfg()).unwrap();
        let f = FreeModule::new(&r, 1, &cfg()).unwrap();
        assert_eq!(f.module.order(), 6);
        for x in 0..6u32 {
            for s in 0..6u32 {
                let e = f.vec_to_elem(&[x]);
                assert_eq!(f.elem_to_vec(f.module.scalar(s, e)), vec![r.mul(s, x)]);
            }
        }
    }

    #[test]
    fn rank_of_free_modules() {
        let r = parse_ring("Z/6", &cfg()).unwrap();
        let dec = local_decomposition(&r).unwrap();
        let f2 = FreeModule::new(&r, 2, &cfg()).unwrap();
        assert_eq!(rank_function(&f2.module, &dec).unwrap(), vec![2, 2]);
    }

    #[test]
    fn z2_over_z6_rank_and_generator() {
        let r = parse_ring("Z/6", &cfg()).unwrap();
        let dec = local_decomposition(&r).unwrap();
        let m = cyclic_module(&r, 2);
        assert_eq!(rank_function(&m, &dec).unwrap(), vec![1, 0]);
        assert!(!is_generator(&m, &dec).unwrap());
        // trace ideal is the proper ideal {0, 3}
        assert_eq!(trace_ideal(&m, &cfg()).unwrap(), vec![0, 3]);
    }

    #[test]
    fn mixed_sum_is_generator() {
        let r = parse_ring("Z/6", &cfg()).unwrap();
        let dec = local_decomposition(&r).unwrap();
        let m2 = cyclic_module(&r, 2);
        let m6 = cyclic_module(&r, 6);
        let s = direct_sum(&m2, &m6, &cfg()).unwrap();
        assert_eq!(s.module.order(), 12);
        assert_eq!(rank_function(&s.module, &dec).unwrap(), vec![2, 1]);
        assert!(is_generator(&s.module, &dec).unwrap());
        assert_eq!(trace_ideal(&s.module, &cfg()).unwrap().len(), 6);
    }

    #[test]
    fn projectivity_with_certificate() {
        let r = parse_ring("Z/6", &cfg()).unwrap();
        let dec = local_decomposition(&r).unwrap();
        let m = cyclic_module(&r, 2);
        let cert = is_projective(&m, &dec, &cfg()).unwrap().expect("direct factor is projective");
        assert!(cert.projection.is_bijective() || m.order() < cert.free.module.order());
        for x in 0..m.order() {
            assert_eq!(cert.projection.apply(cert.section.apply(x)), x);
        }
    }

    #[test]
    fn non_projective_over_z4() {
        let r = parse_ring("Z/4", &cfg()).unwrap();
        let dec = local_decomposition(&r).unwrap();
        let m = cyclic_module(&r, 2);
        assert!(is_projective(&m, &dec, &cfg()).unwrap().is_none());
        // exhaustive oracle: no section of the generator surjection exists
        let free1 = FreeModule::new(&r, 1, &cfg()).unwrap();
        let pi = ModuleMap::new(
            free1.module.clone(),
            m.clone(),
            (0..free1.module.ngens()).map(|i| m.scalar(free1.basis.gens[i] as u32, m.gen_elem(0))).collect(),
        )
        .unwrap();
        for sigma in hom_module(&m, &free1.module, &cfg()).unwrap() {
            let round = sigma.compose(&pi).unwrap();
            assert!(!round.is_identity());
        }
    }

    #[test]
    fn free_modules_are_projective() {
        for spec in ["Z/4", "Z/6", "GF(4)", "Z/4 x GF(2)"] {
            let r = parse_ring(spec, &cfg()).unwrap();
            let dec = local_decomposition(&r).unwrap();
            let f = FreeModule::new(&r, 2, &cfg()).unwrap();
            assert!(is_projective(&f.module, &dec, &cfg()).unwrap().is_some(), "{}", spec);
        }
    }

    #[test]
    fn endomorphism_counts() {
        let z6 = parse_ring("Z/6", &cfg()).unwrap();
        let m = cyclic_module(&z6, 2);
        assert_eq!(hom_module(&m, &m, &cfg()).unwrap().len(), 2);

        let z2 = parse_ring("Z/2", &cfg()).unwrap();
        let f2 = FreeModule::new(&z2, 2, &cfg()).unwrap();
        assert_eq!(hom_module(&f2.module, &f2.module, &cfg()).unwrap().len(), 16);
    }

    #[test]
    fn regular_module_decomposes() {
        let r = parse_ring("Z/6", &cfg()).unwrap();
        let f1 = FreeModule::new(&r, 1, &cfg()).unwrap();
        let m2 = cyclic_module(&r, 2);
        let m3 = {
            let action: Vec<Vec<Vec<u32>>> =
                (0..6u64).map(|s| vec![vec![(s % 3) as u32]]).collect();
            FGModule::new(r.clone(), vec![3], action).unwrap()
        };
        let s = direct_sum(&m2, &m3, &cfg()).unwrap();
        let iso = module_isomorphic(&f1.module, &s.module, &cfg()).unwrap();
        assert!(iso.is_some());
    }

    #[test]
    fn non_isomorphic_modules() {
        let r = parse_ring("Z/4", &cfg()).unwrap();
        let m2 = cyclic_module(&r, 2);
        let f1 = FreeModule::new(&r, 1, &cfg()).unwrap();
        assert!(module_isomorphic(&m2, &f1.module, &cfg()).unwrap().is_none());
    }

    #[test]
    fn zero_module_basics() {
        let r = parse_ring("Z/6", &cfg()).unwrap();
        let dec = local_decomposition(&r).unwrap();
        let z = FGModule::zero_module(r.clone());
        assert_eq!(z.order(), 1);
        assert_eq!(rank_function(&z, &dec).unwrap(), vec![0, 0]);
        assert!(!is_generator(&z, &dec).unwrap());
        assert!(is_projective(&z, &dec, &cfg()).unwrap().is_some());
    }

    #[test]
    fn invalid_action_rejected() {
        let r = parse_ring("Z/4", &cfg()).unwrap();
        // "action" sending r to multiplication by r on Z/3 is not well defined
        let action: Vec<Vec<Vec<u32>>> = (0..4u64).map(|r| vec![vec![(r % 3) as u32]]).collect();
        assert!(FGModule::new(r, vec![3], action).is_err());
    }

    #[test]
    fn map_validation_and_inverse() {
        let r = parse_ring("Z/6", &cfg()).unwrap();
        let f = FreeModule::new(&r, 1, &cfg()).unwrap();
        let double: Vec<u64> = (0..f.module.ngens())
            .map(|i| f.module.int_scale(2, f.module.gen_elem(i)))
            .collect();
        let map = ModuleMap::new(f.module.clone(), f.module.clone(), double).unwrap();
        assert!(!map.is_bijective());
        assert_eq!(map.kernel_elements().len(), 2);
        let id = ModuleMap::identity(&f.module);
        assert!(id.is_bijective());
        assert!(id.inverse().unwrap().is_identity());
    }

    #[test]
    fn enumerate_modules_over_z6() {
        // Z/6 has no ring generators beyond 1, so each admissible abelian
        // group carries exactly one module structure.
        let r = parse_ring("Z/6", &cfg()).unwrap();
        let mods = enumerate_modules(&r, 12, &cfg()).unwrap();
        let mut orders: Vec<u64> = mods.iter().map(|m| m.order()).collect();
        orders.sort_unstable();
        assert_eq!(orders, vec![2, 3, 4, 6, 8, 9, 12]);
        let twelve = mods.iter().find(|m| m.order() == 12).unwrap();
        assert_eq!(twelve.additive_invariants(), vec![2, 6]);
    }

    #[test]
    fn enumerate_modules_over_gf4() {
        // vector spaces only, and only even dimensional groups over the
        // prime field admit a scalar action
        let r = parse_ring("GF(4)", &cfg()).unwrap();
        let mods = enumerate_modules(&r, 16, &cfg()).unwrap();
        let orders: Vec<u64> = mods.iter().map(|m| m.order()).collect();
        assert_eq!(orders, vec![4, 16]);
    }

    #[test]
    fn enumerate_modules_budget_is_reported() {
        let r = parse_ring("GF(4)", &cfg()).unwrap();
        let mut tight = cfg();
        tight.enumeration_node_budget = 3;
        match enumerate_modules(&r, 16, &tight) {
            Err(Error::Budget { stage, .. }) => assert_eq!(stage, "module structure enumeration"),
            other => panic!("expected budget error, got {:?}", other.map(|v| v.len())),
        }
    }
}
