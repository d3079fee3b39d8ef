//! Associative unital algebras over a finite commutative ring, not
//! necessarily commutative.
//!
//! An algebra is a module plus the products of its additive generators, so
//! multiplication is the Z-bilinear expansion of `mul_gens`. Validation
//! checks well-definedness, bilinearity over the ring, associativity on
//! generator triples, and the unit; the bilinear extension then satisfies
//! the algebra axioms everywhere.

use std::collections::HashMap;
use std::sync::Arc;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::module::{
    hom_module, module_from_group, module_isomorphic, FGModule, FreeModule, ModuleMap,
};
use crate::ring::{FiniteCommRing, RingMap};
use crate::tensor::{base_change, tensor_free, tensor_over};

#[derive(Debug, Clone)]
pub struct StructuredAlgebra {
    pub module: Arc<FGModule>,
    /// `mul_gens[i][j]` is the product `g_i g_j`.
    pub mul_gens: Vec<Vec<u64>>,
    pub one: u64,
    pub descriptor: String,
    /// Present when the underlying module is explicitly free; enables the
    /// matrix fast paths.
    pub free: Option<FreeModule>,
}

impl StructuredAlgebra {
    pub fn new(
        module: Arc<FGModule>,
        mul_gens: Vec<Vec<u64>>,
        one: u64,
        descriptor: String,
        free: Option<FreeModule>,
    ) -> Result<Self> {
        let k = module.ngens();
        if mul_gens.len() != k || mul_gens.iter().any(|row| row.len() != k) {
            return Err(Error::Validation("product table must cover generator pairs".into()));
        }
        if one >= module.order() {
            return Err(Error::Validation("unit element out of range".into()));
        }
        let alg = StructuredAlgebra { module, mul_gens, one, descriptor, free };
        alg.validate()?;
        Ok(alg)
    }

    fn validate(&self) -> Result<()> {
        let m = &self.module;
        let ring = &m.ring;
        let k = m.ngens();
        let fail = |msg: &str| Err(Error::Validation(format!("algebra {}: {}", self.descriptor, msg)));
        for i in 0..k {
            for j in 0..k {
                let p = self.mul_gens[i][j];
                if m.int_scale(m.orders[i], p) != 0 || m.int_scale(m.orders[j], p) != 0 {
                    return fail("generator products are not well defined");
                }
            }
        }
        for r in 0..ring.order as u32 {
            for i in 0..k {
                for j in 0..k {
                    let scaled = m.scalar(r, self.mul_gens[i][j]);
                    if self.mul(m.scalar(r, m.gen_elem(i)), m.gen_elem(j)) != scaled {
                        return fail("multiplication is not linear in the left factor");
                    }
                    if self.mul(m.gen_elem(i), m.scalar(r, m.gen_elem(j))) != scaled {
                        return fail("multiplication is not linear in the right factor");
                    }
                }
            }
        }
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    let left = self.mul(self.mul_gens[i][j], m.gen_elem(l));
                    let right = self.mul(m.gen_elem(i), self.mul_gens[j][l]);
                    if left != right {
                        return fail("multiplication is not associative");
                    }
                }
            }
        }
        for i in 0..k {
            let g = m.gen_elem(i);
            if self.mul(self.one, g) != g || self.mul(g, self.one) != g {
                return fail("unit does not act as identity");
            }
        }
        Ok(())
    }

    pub fn ring(&self) -> &Arc<FiniteCommRing> {
        &self.module.ring
    }

    pub fn order(&self) -> u64 {
        self.module.order()
    }

    pub fn mul(&self, x: u64, y: u64) -> u64 {
        let m = &self.module;
        let (cx, cy) = (m.decode(x), m.decode(y));
        let mut acc = 0u64;
        for (i, &a) in cx.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in cy.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                acc = m.add_elems(acc, m.int_scale(a as u64 * b as u64, self.mul_gens[i][j]));
            }
        }
        acc
    }

    pub fn is_commutative(&self) -> bool {
        let k = self.module.ngens();
        (0..k).all(|i| (0..k).all(|j| self.mul_gens[i][j] == self.mul_gens[j][i]))
    }

    pub fn center_elements(&self) -> Vec<u64> {
        let m = &self.module;
        (0..m.order())
            .filter(|&z| (0..m.ngens()).all(|i| {
                let g = m.gen_elem(i);
                self.mul(z, g) == self.mul(g, z)
            }))
            .collect()
    }

    pub fn idempotents(&self) -> Vec<u64> {
        (0..self.module.order()).filter(|&x| self.mul(x, x) == x).collect()
    }

    pub fn primitive_idempotents(&self) -> Vec<u64> {
        let idem = self.idempotents();
        idem.iter()
            .copied()
            .filter(|&e| {
                e != 0
                    && !idem.iter().any(|&f| {
                        f != 0 && f != e && self.mul(e, f) == f && self.mul(f, e) == f
                    })
            })
            .collect()
    }

    /// Two-sided invertible elements; quadratic scan, intended for small
    /// algebras.
    pub fn unit_count(&self) -> u64 {
        let n = self.module.order();
        (0..n)
            .filter(|&x| (0..n).any(|y| self.mul(x, y) == self.one && self.mul(y, x) == self.one))
            .count() as u64
    }

    pub fn opposite(&self) -> StructuredAlgebra {
        let k = self.module.ngens();
        let mul_gens = (0..k).map(|i| (0..k).map(|j| self.mul_gens[j][i]).collect()).collect();
        StructuredAlgebra {
            module: self.module.clone(),
            mul_gens,
            one: self.one,
            descriptor: format!("({})^op", self.descriptor),
            free: self.free.clone(),
        }
    }

    pub fn same_structure(&self, other: &StructuredAlgebra) -> bool {
        self.module.same_presentation(&other.module)
            && self.mul_gens == other.mul_gens
            && self.one == other.one
    }

    /// The image of the base ring, `r -> r * 1`.
    pub fn scalar_embed(&self, r: u32) -> u64 {
        self.module.scalar(r, self.one)
    }
}

/// `n x n` matrices. Basis entries are row-major `E_{pq}`, and a module
/// element encodes the matrix through the free-module vector of its entries.
pub fn matrix_algebra(ring: &Arc<FiniteCommRing>, n: usize, config: &Config) -> Result<StructuredAlgebra> {
    let free = FreeModule::new(ring, n * n, config)?;
    let m = &free.module;
    let k0 = m.ngens() / (n * n).max(1);
    let k = m.ngens();
    let mut mul_gens = vec![vec![0u64; k]; k];
    // generator (pos, i) is the matrix with ring basis element b_i at pos
    let basis = ring.additive_basis();
    for pos1 in 0..n * n {
        let (p, q) = (pos1 / n, pos1 % n);
        for i in 0..k0 {
            for pos2 in 0..n * n {
                let (r, s) = (pos2 / n, pos2 % n);
                for j in 0..k0 {
                    let g1 = pos1 * k0 + i;
                    let g2 = pos2 * k0 + j;
                    if q != r {
                        continue; // product is zero
                    }
                    let prod = ring.mul(basis.gens[i] as u32, basis.gens[j] as u32);
                    mul_gens[g1][g2] = free.unit_vec(p * n + s, prod);
                }
            }
        }
    }
    let mut one_vec = vec![ring.zero; n * n];
    for p in 0..n {
        one_vec[p * n + p] = ring.one;
    }
    let one = free.vec_to_elem(&one_vec);
    StructuredAlgebra::new(
        m.clone(),
        mul_gens,
        one,
        format!("M{}({})", n, ring.descriptor),
        Some(free),
    )
}

/// A commutative ring extension as an algebra over the source of the map.
pub fn algebra_from_extension(f: &RingMap) -> Result<StructuredAlgebra> {
    let (r, s) = (&f.src, &f.tgt);
    let basis = s.additive_basis();
    let k = basis.gens.len();
    let mut action = Vec::with_capacity(r.order);
    for a in 0..r.order as u32 {
        let fa = f.apply(a);
        let row: Vec<Vec<u32>> = (0..k)
            .map(|i| basis.coords[&(s.mul(fa, basis.gens[i] as u32) as u64)].clone())
            .collect();
        action.push(row);
    }
    let module = FGModule::new(r.clone(), basis.orders.clone(), action)?;
    let encode = |x: u32| module.encode(&basis.coords[&(x as u64)]);
    let mul_gens: Vec<Vec<u64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| encode(s.mul(basis.gens[i] as u32, basis.gens[j] as u32)))
                .collect()
        })
        .collect();
    let one = encode(s.one);
    StructuredAlgebra::new(
        module,
        mul_gens,
        one,
        format!("{} over {}", s.descriptor, r.descriptor),
        None,
    )
}

/// The ring itself as an algebra over itself.
pub fn regular_algebra(ring: &Arc<FiniteCommRing>, config: &Config) -> Result<StructuredAlgebra> {
    let free = FreeModule::new(ring, 1, config)?;
    let m = &free.module;
    let basis = ring.additive_basis();
    let k = m.ngens();
    let mul_gens: Vec<Vec<u64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| free.vec_to_elem(&[ring.mul(basis.gens[i] as u32, basis.gens[j] as u32)]))
                .collect()
        })
        .collect();
    StructuredAlgebra::new(
        m.clone(),
        mul_gens,
        free.vec_to_elem(&[ring.one]),
        ring.descriptor.clone(),
        Some(free),
    )
}

// ---------------------------------------------------------------------------
// Endomorphism algebras
// ---------------------------------------------------------------------------

pub struct EndAlgebra {
    pub algebra: StructuredAlgebra,
    pub maps: Vec<ModuleMap>,
    /// map index -> algebra element
    pub elem_of_map: Vec<u64>,
}

impl EndAlgebra {
    pub fn map_index_of(&self, elem: u64) -> Option<usize> {
        self.elem_of_map.iter().position(|&e| e == elem)
    }
}

/// Endomorphism algebra of an arbitrary module, built from the full hom
/// enumeration. Composition order: `(f g)(x) = f(g(x))`.
pub fn end_algebra(p: &Arc<FGModule>, config: &Config) -> Result<EndAlgebra> {
    let maps = hom_module(p, p, config)?;
    let index: HashMap<Vec<u64>, usize> =
        maps.iter().enumerate().map(|(i, h)| (h.images.clone(), i)).collect();
    let zero_label = *index
        .get(&vec![0u64; p.ngens()])
        .ok_or_else(|| Error::Validation("zero endomorphism missing".into()))? as u64;
    let id_label = *index
        .get(&(0..p.ngens()).map(|i| p.gen_elem(i)).collect::<Vec<_>>())
        .ok_or_else(|| Error::Validation("identity endomorphism missing".into()))? as u64;
    let labels: Vec<u64> = (0..maps.len() as u64).collect();
    let add = |a: u64, b: u64| {
        let (fa, fb) = (&maps[a as usize], &maps[b as usize]);
        let images: Vec<u64> =
            fa.images.iter().zip(&fb.images).map(|(&x, &y)| p.add_elems(x, y)).collect();
        index[&images] as u64
    };
    let act = |r: u32, a: u64| {
        let images: Vec<u64> = maps[a as usize].images.iter().map(|&x| p.scalar(r, x)).collect();
        index[&images] as u64
    };
    let (module, translate) = module_from_group(&p.ring, &labels, zero_label, &add, &act)?;
    let compose = |a: usize, b: usize| -> usize {
        let (fa, fb) = (&maps[a], &maps[b]);
        let images: Vec<u64> = fb.images.iter().map(|&x| fa.apply(x)).collect();
        index[&images]
    };
    // labels of the module generators via the inverse relabelling
    let mut label_of_elem: HashMap<u64, u64> = HashMap::new();
    for (&label, &elem) in &translate {
        label_of_elem.insert(elem, label);
    }
    let k = module.ngens();
    let gen_labels: Vec<usize> =
        (0..k).map(|i| label_of_elem[&module.gen_elem(i)] as usize).collect();
    let mul_gens: Vec<Vec<u64>> = (0..k)
        .map(|i| (0..k).map(|j| translate[&(compose(gen_labels[i], gen_labels[j]) as u64)]).collect())
        .collect();
    let one = translate[&id_label];
    let algebra = StructuredAlgebra::new(
        module,
        mul_gens,
        one,
        "End".to_string(),
        None,
    )?;
    let elem_of_map: Vec<u64> = (0..maps.len()).map(|i| translate[&(i as u64)]).collect();
    Ok(EndAlgebra { algebra, maps, elem_of_map })
}

// ---------------------------------------------------------------------------
// Tensor and base change of algebras
// ---------------------------------------------------------------------------

pub fn algebra_tensor(
    a: &StructuredAlgebra,
    b: &StructuredAlgebra,
    config: &Config,
) -> Result<StructuredAlgebra> {
    let descriptor = format!("({}) (x) ({})", a.descriptor, b.descriptor);
    if let (Some(fa), Some(fb)) = (&a.free, &b.free) {
        let t = tensor_free(fa, fb, config)?;
        let result = t.free_result().expect("free tensor has a free result").clone();
        let m = &result.module;
        let k = m.ngens();
        let ring = a.ring();
        let basis = ring.additive_basis();
        let k0 = basis.gens.len();
        let nb = fb.rank;
        // generator (pos (t,u), i) is the pure tensor (b_i e_t) (x) e_u
        let pure_parts = |g: usize| -> (u64, u64) {
            let pos = g / k0;
            let i = g % k0;
            let (ta, ub) = (pos / nb, pos % nb);
            (fa.unit_vec(ta, basis.gens[i] as u32), fb.unit_vec(ub, ring.one))
        };
        let mut mul_gens = vec![vec![0u64; k]; k];
        for g1 in 0..k {
            let (x1, y1) = pure_parts(g1);
            for g2 in 0..k {
                let (x2, y2) = pure_parts(g2);
                mul_gens[g1][g2] = t.bilinear(a.mul(x1, x2), b.mul(y1, y2));
            }
        }
        let one = t.bilinear(a.one, b.one);
        return StructuredAlgebra::new(m.clone(), mul_gens, one, descriptor, Some(result));
    }
    let t = tensor_over(&a.module, &b.module, config)?;
    let m = t.module.clone();
    let (ka, kb) = (a.module.ngens(), b.module.ngens());
    // products of scratch symbols
    let mut symprod = vec![vec![0u64; ka * kb]; ka * kb];
    for i in 0..ka {
        for j in 0..kb {
            for u in 0..ka {
                for v in 0..kb {
                    let left = a.mul(a.module.gen_elem(i), a.module.gen_elem(u));
                    let right = b.mul(b.module.gen_elem(j), b.module.gen_elem(v));
                    symprod[i * kb + j][u * kb + v] = t.bilinear(left, right);
                }
            }
        }
    }
    let k = m.ngens();
    let combos: Vec<Vec<u64>> = (0..k)
        .map(|gi| {
            crate::tensor::symbol_combination(&t, m.gen_elem(gi))
                .ok_or_else(|| Error::Validation("tensor generator unreachable".into()))
        })
        .collect::<Result<_>>()?;
    let mut mul_gens = vec![vec![0u64; k]; k];
    for g1 in 0..k {
        for g2 in 0..k {
            let mut acc = 0u64;
            for (s1, &c1) in combos[g1].iter().enumerate() {
                if c1 == 0 {
                    continue;
                }
                for (s2, &c2) in combos[g2].iter().enumerate() {
                    if c2 == 0 {
                        continue;
                    }
                    acc = m.add_elems(acc, m.int_scale(c1 * c2, symprod[s1][s2]));
                }
            }
            mul_gens[g1][g2] = acc;
        }
    }
    let one = t.bilinear(a.one, b.one);
    StructuredAlgebra::new(m, mul_gens, one, descriptor, None)
}

/// Scalar extension of an algebra along a ring map.
pub fn base_change_algebra(
    f: &RingMap,
    a: &StructuredAlgebra,
    config: &Config,
) -> Result<StructuredAlgebra> {
    let bc = base_change(f, &a.module, config)?;
    let m = bc.module.clone();
    let s_ring = &f.tgt;
    let s_basis = s_ring.additive_basis();
    let (ks, ka) = (s_basis.gens.len(), a.module.ngens());
    let mut symprod = vec![vec![0u64; ks * ka]; ks * ka];
    for i in 0..ks {
        for j in 0..ka {
            for u in 0..ks {
                for v in 0..ka {
                    let s = s_ring.mul(s_basis.gens[i] as u32, s_basis.gens[u] as u32);
                    let x = a.mul(a.module.gen_elem(j), a.module.gen_elem(v));
                    symprod[i * ka + j][u * ka + v] = bc.pure(s, x);
                }
            }
        }
    }
    let k = m.ngens();
    let combos: Vec<Vec<u64>> = (0..k)
        .map(|gi| {
            base_change_symbol_combination(&bc, &s_basis.gens, ka, m.gen_elem(gi))
                .ok_or_else(|| Error::Validation("scalar extension generator unreachable".into()))
        })
        .collect::<Result<_>>()?;
    let mut mul_gens = vec![vec![0u64; k]; k];
    for g1 in 0..k {
        for g2 in 0..k {
            let mut acc = 0u64;
            for (s1, &c1) in combos[g1].iter().enumerate() {
                if c1 == 0 {
                    continue;
                }
                for (s2, &c2) in combos[g2].iter().enumerate() {
                    if c2 == 0 {
                        continue;
                    }
                    acc = m.add_elems(acc, m.int_scale(c1 * c2, symprod[s1][s2]));
                }
            }
            mul_gens[g1][g2] = acc;
        }
    }
    let one = bc.pure(s_ring.one, a.one);
    StructuredAlgebra::new(
        m,
        mul_gens,
        one,
        format!("{} along {} -> {}", a.descriptor, f.src.descriptor, f.tgt.descriptor),
        None,
    )
}

fn base_change_symbol_combination(
    bc: &crate::tensor::BaseChange,
    s_gens: &[u64],
    ka: usize,
    target: u64,
) -> Option<Vec<u64>> {
    let m = &bc.module;
    let mut symbols = Vec::with_capacity(s_gens.len() * ka);
    for &s in s_gens {
        for j in 0..ka {
            symbols.push(bc.pure(s as u32, bc.source().gen_elem(j)));
        }
    }
    let mut combo: HashMap<u64, Vec<u64>> = HashMap::new();
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
// Isomorphism search
// ---------------------------------------------------------------------------

/// Unital algebra isomorphism: a bijective module map preserving products and
/// the unit. Invariant pruning, then generator-image backtracking with a node
/// budget.
pub fn algebra_isomorphic(
    a: &StructuredAlgebra,
    b: &StructuredAlgebra,
    config: &Config,
) -> Result<Option<ModuleMap>> {
    if a.same_structure(b) {
        return Ok(Some(ModuleMap::identity(&a.module)));
    }
    if !a.ring().same_tables(b.ring()) {
        return Err(Error::MixedRings);
    }
    if a.order() != b.order()
        || a.module.additive_invariants() != b.module.additive_invariants()
        || a.is_commutative() != b.is_commutative()
        || a.center_elements().len() != b.center_elements().len()
        || a.idempotents().len() != b.idempotents().len()
    {
        return Ok(None);
    }
    if module_isomorphic(&a.module, &b.module, config)?.is_none() {
        return Ok(None);
    }
    let k = a.module.ngens();
    let mut candidates: Vec<Vec<u64>> = Vec::with_capacity(k);
    for i in 0..k {
        let d = a.module.orders[i];
        candidates.push((0..b.order()).filter(|&y| b.module.element_add_order(y) == d).collect());
    }
    let mut images = vec![0u64; k];
    let mut nodes = 0u64;
    algebra_iso_dfs(a, b, &candidates, &mut images, 0, &mut nodes, config)
}

fn algebra_iso_dfs(
    a: &StructuredAlgebra,
    b: &StructuredAlgebra,
    candidates: &[Vec<u64>],
    images: &mut Vec<u64>,
    depth: usize,
    nodes: &mut u64,
    config: &Config,
) -> Result<Option<ModuleMap>> {
    if depth == images.len() {
        *nodes += 1;
        if *nodes > config.iso_node_budget {
            return Err(Error::Inconclusive { stage: "algebra isomorphism", limit: config.iso_node_budget });
        }
        if let Ok(map) = ModuleMap::new(a.module.clone(), b.module.clone(), images.clone()) {
            if map.apply(a.one) == b.one && map.is_bijective() {
                let k = a.module.ngens();
                let multiplicative = (0..k).all(|i| {
                    (0..k).all(|j| map.apply(a.mul_gens[i][j]) == b.mul(map.images[i], map.images[j]))
                });
                if multiplicative {
                    return Ok(Some(map));
                }
            }
        }
        return Ok(None);
    }
    for &y in &candidates[depth] {
        images[depth] = y;
        if let Some(found) = algebra_iso_dfs(a, b, candidates, images, depth + 1, nodes, config)? {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{parse_ring, ring_homs};

    fn cfg() -> Config {
        Config::default()
    }

    #[test]
    fn matrix_algebra_over_f2() {
        let r = parse_ring("GF(2)", &cfg()).unwrap();
        let a = matrix_algebra(&r, 2, &cfg()).unwrap();
        assert_eq!(a.order(), 16);
        assert!(!a.is_commutative());
        assert_eq!(a.center_elements().len(), 2);
        assert_eq!(a.unit_count(), 6); // |GL_2(F_2)|
    }

    #[test]
    fn end_of_free_rank_two_is_matrices() {
        let r = parse_ring("Z/2", &cfg()).unwrap();
        let f = FreeModule::new(&r, 2, &cfg()).unwrap();
        let end = end_algebra(&f.module, &cfg()).unwrap();
        assert_eq!(end.algebra.order(), 16);
        let m2 = matrix_algebra(&r, 2, &cfg()).unwrap();
        assert!(algebra_isomorphic(&end.algebra, &m2, &cfg()).unwrap().is_some());
    }

    #[test]
    fn end_of_cyclic_over_z6() {
        let r = parse_ring("Z/6", &cfg()).unwrap();
        let action: Vec<Vec<Vec<u32>>> = (0..6u64).map(|s| vec![vec![(s % 2) as u32]]).collect();
        let m = FGModule::new(r.clone(), vec![2], action).unwrap();
        let end = end_algebra(&m, &cfg()).unwrap();
        assert_eq!(end.algebra.order(), 2);
        assert!(end.algebra.is_commutative());
    }

    #[test]
    fn opposite_of_matrices_is_isomorphic() {
        let r = parse_ring("GF(2)", &cfg()).unwrap();
        let a = matrix_algebra(&r, 2, &cfg()).unwrap();
        let op = a.opposite();
        assert!(algebra_isomorphic(&a, &op, &cfg()).unwrap().is_some());
    }

    #[test]
    fn field_extension_tensor_splits() {
        let f2 = parse_ring("GF(2)", &cfg()).unwrap();
        let f4 = parse_ring("GF(4)", &cfg()).unwrap();
        let incl = ring_homs(&f2, &f4).into_iter().next().unwrap();
        let a = algebra_from_extension(&incl).unwrap();
        assert_eq!(a.order(), 4);
        assert!(a.is_commutative());
        let t = algebra_tensor(&a, &a, &cfg()).unwrap();
        assert_eq!(t.order(), 16);
        assert!(t.is_commutative());
        // GF(4) (x) GF(4) = GF(4) x GF(4): exactly two primitive idempotents
        assert_eq!(t.primitive_idempotents().len(), 2);
    }

    #[test]
    fn regular_algebra_is_the_ring() {
        let r = parse_ring("Z/6", &cfg()).unwrap();
        let a = regular_algebra(&r, &cfg()).unwrap();
        assert_eq!(a.order(), 6);
        assert!(a.is_commutative());
        assert_eq!(a.unit_count(), 2);
    }

    #[test]
    fn tensor_of_matrix_algebras_is_kronecker() {
        let r = parse_ring("GF(2)", &cfg()).unwrap();
        let m2 = matrix_algebra(&r, 2, &cfg()).unwrap();
        let t = algebra_tensor(&m2, &m2, &cfg()).unwrap();
        assert_eq!(t.order(), 1 << 16);
        let m4 = matrix_algebra(&r, 4, &cfg()).unwrap();
        // explicit Kronecker isomorphism: E_pq (x) E_rs -> E_(2p+r)(2q+s)
        assert!(t.free.is_some());
        let m4f = m4.free.as_ref().unwrap();
        let images: Vec<u64> = (0..16)
            .map(|pos| {
                let (pos_a, pos_b) = (pos / 4, pos % 4);
                let (p, q) = (pos_a / 2, pos_a % 2);
                let (rr, s) = (pos_b / 2, pos_b % 2);
                m4f.unit_vec((2 * p + rr) * 4 + (2 * q + s), r.one)
            })
            .collect();
        let map = ModuleMap::new(t.module.clone(), m4.module.clone(), images).unwrap();
        assert!(map.is_bijective());
        assert_eq!(map.apply(t.one), m4.one);
        for i in 0..16 {
            for j in 0..16 {
                assert_eq!(
                    map.apply(t.mul_gens[i][j]),
                    m4.mul(map.images[i], map.images[j])
                );
            }
        }
    }

    #[test]
    fn base_change_of_matrices() {
        let z4 = parse_ring("Z/4", &cfg()).unwrap();
        let z2 = parse_ring("Z/2", &cfg()).unwrap();
        let f = ring_homs(&z4, &z2).into_iter().next().unwrap();
        let a = matrix_algebra(&z4, 2, &cfg()).unwrap();
        let bc = base_change_algebra(&f, &a, &cfg()).unwrap();
        assert_eq!(bc.order(), 16);
        assert!(bc.ring().same_tables(&z2));
        let m2 = matrix_algebra(&z2, 2, &cfg()).unwrap();
        assert!(algebra_isomorphic(&bc, &m2, &cfg()).unwrap().is_some());
    }
}
