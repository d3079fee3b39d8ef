//! Finite commutative rings with dense operation tables.
//!
//! Rings are small (default cap 256), so both operation tables are compiled
//! once at construction and every axiom is checked exhaustively over element
//! triples. Generator syntax:
//!
//! ```text
//! atom ::= "Z/" nat | "GF(" primepower ")" | "table:" path
//! spec ::= atom { " x " atom }
//! ```
//!
//! Galois fields use a fixed published irreducible polynomial per `(p, k)`
//! from a built-in table; the constructor re-verifies that the quotient is a
//! field, so a corrupt table entry cannot produce a wrong ring. The zero ring
//! is rejected everywhere.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::abelian::{cyclic_basis, is_prime_power, AbGroup, CyclicBasis};
use crate::config::Config;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct FiniteCommRing {
    pub order: usize,
    pub zero: u32,
    pub one: u32,
    /// Parseable generator-grammar name (or `table:` path) for this ring.
    pub descriptor: String,
    /// Extra construction detail (e.g. the field polynomial), display only.
    pub presentation: String,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
}

/// Structure-constant file format: dense tables over indices `0..order`.
#[derive(Debug, Serialize, Deserialize)]
pub struct RingTablesFile {
    pub order: usize,
    pub add: Vec<Vec<u32>>,
    pub mul: Vec<Vec<u32>>,
    pub zero: u32,
    pub one: u32,
}

/// Reduction vectors `x^k = r_0 + r_1 x + ...` for the built-in irreducible
/// polynomials, one per supported prime power with k >= 2.
const GF_REDUCTIONS: &[(u64, u32, &[u32])] = &[
    (2, 2, &[1, 1]),
    (2, 3, &[1, 1, 0]),
    (2, 4, &[1, 1, 0, 0]),
    (2, 5, &[1, 0, 1, 0, 0]),
    (2, 6, &[1, 1, 0, 1, 1, 0]),
    (2, 7, &[1, 1, 0, 0, 0, 0, 0]),
    (2, 8, &[1, 0, 1, 1, 1, 0, 0, 0]),
    (3, 2, &[1, 1]),
    (3, 3, &[2, 1, 0]),
    (3, 4, &[1, 0, 0, 1]),
    (3, 5, &[2, 1, 0, 0, 0]),
    (5, 2, &[3, 1]),
    (5, 3, &[2, 2, 0]),
    (7, 2, &[4, 1]),
    (11, 2, &[9, 4]),
    (13, 2, &[11, 1]),
];

impl FiniteCommRing {
    /// Build from explicit tables and verify every axiom exhaustively.
    pub fn from_tables(
        order: usize,
        add: Vec<u32>,
        mul: Vec<u32>,
        zero: u32,
        one: u32,
        descriptor: String,
    ) -> Result<Arc<Self>> {
        if order == 0 || (zero as usize) >= order || (one as usize) >= order {
            return Err(Error::Validation("element indices out of range".into()));
        }
        if zero == one {
            return Err(Error::ZeroRing);
        }
        if add.len() != order * order || mul.len() != order * order {
            return Err(Error::Validation("table dimensions do not match order".into()));
        }
        for &v in add.iter().chain(mul.iter()) {
            if v as usize >= order {
                return Err(Error::Validation("table entry out of range".into()));
            }
        }
        let mut neg = vec![u32::MAX; order];
        for a in 0..order {
            for b in 0..order {
                if add[a * order + b] == zero {
                    neg[a] = b as u32;
                }
            }
        }
        let ring = FiniteCommRing { order, zero, one, descriptor, presentation: String::new(), add, mul, neg };
        ring.validate()?;
        Ok(Arc::new(ring))
    }

    fn validate(&self) -> Result<()> {
        let n = self.order;
        let fail = |msg: &str| Err(Error::Validation(format!("{} ({})", msg, self.descriptor)));
        for a in 0..n as u32 {
            if self.add(a, self.zero) != a {
                return fail("additive identity");
            }
            if self.neg[a as usize] == u32::MAX {
                return fail("missing additive inverse");
            }
            if self.mul(a, self.one) != a {
                return fail("multiplicative identity");
            }
            if self.mul(a, self.zero) != self.zero {
                return fail("zero absorption");
            }
        }
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                if self.add(a, b) != self.add(b, a) {
                    return fail("additive commutativity");
                }
                if self.mul(a, b) != self.mul(b, a) {
                    return fail("multiplicative commutativity");
                }
            }
        }
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                for c in 0..n as u32 {
                    if self.add(self.add(a, b), c) != self.add(a, self.add(b, c)) {
                        return fail("additive associativity");
                    }
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return fail("multiplicative associativity");
                    }
                    if self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c)) {
                        return fail("distributivity");
                    }
                }
            }
        }
        Ok(())
    }

    pub fn zn(n: u64) -> Result<Arc<Self>> {
        if n < 2 {
            return Err(Error::ZeroRing);
        }
        let order = n as usize;
        let mut add = vec![0u32; order * order];
        let mut mul = vec![0u32; order * order];
        for a in 0..order {
            for b in 0..order {
                add[a * order + b] = ((a + b) % order) as u32;
                mul[a * order + b] = ((a * b) % order) as u32;
            }
        }
        Self::from_tables(order, add, mul, 0, 1, format!("Z/{}", n))
    }

    /// Galois field of order `q = p^k` using the built-in polynomial table.
    /// Elements are polynomial coefficient vectors encoded little-endian in
    /// base `p`.
    pub fn gf(q: u64) -> Result<Arc<Self>> {
        let Some((p, k)) = is_prime_power(q) else {
            return Err(Error::Parse(format!("GF({}) needs a prime power", q)));
        };
        if k == 1 {
            let ring = Self::zn(p)?;
            let mut r = (*ring).clone();
            r.descriptor = format!("GF({})", q);
            r.presentation = format!("prime field of characteristic {}", p);
            return Ok(Arc::new(r));
        }
        let reduction = GF_REDUCTIONS
            .iter()
            .find(|&&(rp, rk, _)| rp == p && rk == k)
            .map(|&(_, _, r)| r)
            .ok_or_else(|| Error::Unsupported(format!("no irreducible polynomial on file for GF({})", q)))?;
        let order = q as usize;
        let kk = k as usize;
        let decode = |mut x: usize| -> Vec<u32> {
            let mut v = vec![0u32; kk];
            for c in v.iter_mut() {
                *c = (x as u64 % p) as u32;
                x /= p as usize;
            }
            v
        };
        let encode = |v: &[u32]| -> usize {
            let mut x = 0usize;
            for &c in v.iter().rev() {
                x = x * p as usize + c as usize;
            }
            x
        };
        let mut add = vec![0u32; order * order];
        let mut mul = vec![0u32; order * order];
        for a in 0..order {
            let va = decode(a);
            for b in 0..order {
                let vb = decode(b);
                let sum: Vec<u32> = va.iter().zip(&vb).map(|(x, y)| ((x + y) as u64 % p) as u32).collect();
                add[a * order + b] = encode(&sum) as u32;
                // schoolbook product then reduce powers >= k by the table row
                let mut prod = vec![0u64; 2 * kk - 1];
                for i in 0..kk {
                    for j in 0..kk {
                        prod[i + j] += va[i] as u64 * vb[j] as u64;
                    }
                }
                for d in (kk..prod.len()).rev() {
                    let c = prod[d] % p;
                    prod[d] = 0;
                    if c != 0 {
                        for (i, &r) in reduction.iter().enumerate() {
                            prod[d - kk + i] += c * r as u64;
                        }
                    }
                }
                let vv: Vec<u32> = prod[..kk].iter().map(|&x| (x % p) as u32).collect();
                mul[a * order + b] = encode(&vv) as u32;
            }
        }
        let mut poly = String::new();
        write!(poly, "x^{}=", k).unwrap();
        let terms: Vec<String> = reduction
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => format!("{}", c),
                (i, 1) => format!("x^{}", i),
                (i, c) => format!("{}x^{}", c, i),
            })
            .collect();
        write!(poly, "{}", terms.join("+")).unwrap();
        let ring = Self::from_tables(order, add, mul, 0, 1, format!("GF({})", q))?;
        // the quotient must be a field; this certifies irreducibility
        for a in 1..order as u32 {
            if !(1..order as u32).any(|b| ring.mul(a, b) == ring.one) {
                return Err(Error::Validation(format!("GF({}) table polynomial is reducible", q)));
            }
        }
        let mut r = (*ring).clone();
        r.presentation = poly;
        Ok(Arc::new(r))
    }

    /// Direct product; element indices are little-endian mixed radix.
    pub fn product(rings: &[Arc<FiniteCommRing>]) -> Result<Arc<Self>> {
        assert!(!rings.is_empty());
        if rings.len() == 1 {
            return Ok(rings[0].clone());
        }
        let order: usize = rings.iter().map(|r| r.order).product();
        let decode = |mut x: usize| -> Vec<u32> {
            let mut v = Vec::with_capacity(rings.len());
            for r in rings {
                v.push((x % r.order) as u32);
                x /= r.order;
            }
            v
        };
        let encode = |v: &[u32]| -> usize {
            let mut x = 0usize;
            for (i, r) in rings.iter().enumerate().rev() {
                x = x * r.order + v[i] as usize;
            }
            x
        };
        let mut add = vec![0u32; order * order];
        let mut mul = vec![0u32; order * order];
        for a in 0..order {
            let va = decode(a);
            for b in 0..order {
                let vb = decode(b);
                let s: Vec<u32> = rings.iter().enumerate().map(|(i, r)| r.add(va[i], vb[i])).collect();
                let m: Vec<u32> = rings.iter().enumerate().map(|(i, r)| r.mul(va[i], vb[i])).collect();
                add[a * order + b] = encode(&s) as u32;
                mul[a * order + b] = encode(&m) as u32;
            }
        }
        let zero = encode(&rings.iter().map(|r| r.zero).collect::<Vec<_>>()) as u32;
        let one = encode(&rings.iter().map(|r| r.one).collect::<Vec<_>>()) as u32;
        let descriptor = rings.iter().map(|r| r.descriptor.clone()).collect::<Vec<_>>().join(" x ");
        Self::from_tables(order, add, mul, zero, one, descriptor)
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    /// Integer scalar `k * a` in the additive group.
    pub fn int_mul(&self, k: u64, a: u32) -> u32 {
        let mut acc = self.zero;
        let mut base = a;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn same_tables(&self, other: &FiniteCommRing) -> bool {
        self.order == other.order
            && self.zero == other.zero
            && self.one == other.one
            && self.add == other.add
            && self.mul == other.mul
    }

    pub fn inverse(&self, a: u32) -> Option<u32> {
        (0..self.order as u32).find(|&b| self.mul(a, b) == self.one)
    }

    pub fn is_unit(&self, a: u32) -> bool {
        self.inverse(a).is_some()
    }

    /// Unit elements in ascending index order.
    pub fn units(&self) -> Vec<u32> {
        (0..self.order as u32).filter(|&a| self.is_unit(a)).collect()
    }

    /// The unit group as an explicit abelian group plus the unit list.
    pub fn unit_group(&self) -> (AbGroup, Vec<u32>) {
        let units = self.units();
        let (g, _) = AbGroup::from_closure(
            &units.iter().map(|&u| u as u64).collect::<Vec<_>>(),
            self.one as u64,
            |a, b| self.mul(a as u32, b as u32) as u64,
        );
        (g, units)
    }

    pub fn idempotents(&self) -> Vec<u32> {
        (0..self.order as u32).filter(|&e| self.mul(e, e) == e).collect()
    }

    pub fn primitive_idempotents(&self) -> Vec<u32> {
        let idem = self.idempotents();
        idem.iter()
            .copied()
            .filter(|&e| {
                e != self.zero
                    && !idem
                        .iter()
                        .any(|&f| f != self.zero && f != e && self.mul(e, f) == f)
            })
            .collect()
    }

    /// Cyclic decomposition of the additive group, with coordinates for every
    /// element.
    pub fn additive_basis(&self) -> CyclicBasis {
        let elems: Vec<u64> = (0..self.order as u64).collect();
        let add = |a: u64, b: u64| self.add(a as u32, b as u32) as u64;
        cyclic_basis(&elems, self.zero as u64, &add)
    }

    pub fn additive_invariants(&self) -> Vec<u64> {
        let elems: Vec<u64> = (0..self.order as u64).collect();
        let (g, _) = AbGroup::from_closure(&elems, self.zero as u64, |a, b| {
            self.add(a as u32, b as u32) as u64
        });
        g.invariant_factors()
    }
}

// ---------------------------------------------------------------------------
// Generator grammar
// ---------------------------------------------------------------------------

pub fn parse_ring(spec: &str, config: &Config) -> Result<Arc<FiniteCommRing>> {
    let atoms: Vec<&str> = spec.split(" x ").map(str::trim).collect();
    if atoms.iter().any(|a| a.is_empty()) {
        return Err(Error::Parse(format!("empty atom in {:?}", spec)));
    }
    let mut parts = Vec::new();
    for atom in atoms {
        parts.push(parse_atom(atom)?);
    }
    let order: u64 = parts.iter().map(|r| r.order as u64).product();
    if order > config.max_ring_order {
        return Err(Error::CapExceeded { what: "ring order", size: order, cap: config.max_ring_order });
    }
    FiniteCommRing::product(&parts)
}

fn parse_atom(atom: &str) -> Result<Arc<FiniteCommRing>> {
    if let Some(n) = atom.strip_prefix("Z/") {
        let n: u64 = n.parse().map_err(|_| Error::Parse(format!("bad modulus in {:?}", atom)))?;
        return FiniteCommRing::zn(n);
    }
    if let Some(rest) = atom.strip_prefix("GF(") {
        let Some(q) = rest.strip_suffix(')') else {
            return Err(Error::Parse(format!("unterminated {:?}", atom)));
        };
        let q: u64 = q.parse().map_err(|_| Error::Parse(format!("bad prime power in {:?}", atom)))?;
        return FiniteCommRing::gf(q);
    }
    if let Some(path) = atom.strip_prefix("table:") {
        let data = std::fs::read_to_string(path)?;
        let file: RingTablesFile = serde_json::from_str(&data)?;
        let add = file.add.into_iter().flatten().collect();
        let mul = file.mul.into_iter().flatten().collect();
        return FiniteCommRing::from_tables(file.order, add, mul, file.zero, file.one, atom.to_string());
    }
    Err(Error::Parse(format!("unrecognized atom {:?}", atom)))
}

/// All ring descriptors buildable from the generator grammar (without table
/// atoms) whose order is at most `bound`, as atom multisets.
pub fn generator_corpus_specs(bound: u64) -> Vec<String> {
    let mut atoms: Vec<(u64, String)> = Vec::new();
    for n in 2..=bound {
        atoms.push((n, format!("Z/{}", n)));
        if is_prime_power(n).is_some() {
            atoms.push((n, format!("GF({})", n)));
        }
    }
    let mut out = Vec::new();
    let mut stack: Vec<(usize, u64, Vec<String>)> = vec![(0, 1, Vec::new())];
    while let Some((start, prod, chosen)) = stack.pop() {
        if !chosen.is_empty() {
            out.push(chosen.join(" x "));
        }
        for (i, (n, name)) in atoms.iter().enumerate().skip(start) {
            if prod * n <= bound {
                let mut next = chosen.clone();
                next.push(name.clone());
                stack.push((i, prod * n, next));
            }
        }
    }
    out.sort();
    out
}

// ---------------------------------------------------------------------------
// Local decomposition
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct LocalFactor {
    pub idempotent: u32,
    /// The factor ring `eR` with unit `e`.
    pub ring: Arc<FiniteCommRing>,
    /// Projection `R -> eR` on indices.
    pub proj: Vec<u32>,
    /// Inclusion of factor elements back into `R`.
    pub embed: Vec<u32>,
    /// Indices (in the factor) of the unique maximal ideal.
    pub maximal_ideal: Vec<u32>,
    pub residue_field: Arc<FiniteCommRing>,
    /// Projection factor -> residue field on indices.
    pub residue_proj: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct LocalDecomposition {
    pub factors: Vec<LocalFactor>,
}

impl LocalDecomposition {
    /// Residue projection `R -> kappa_i` composed through the factor.
    pub fn residue_of(&self, i: usize, r: u32) -> u32 {
        let f = &self.factors[i];
        f.residue_proj[f.proj[r as usize] as usize]
    }

    /// Elements of `R` whose i-th component is a non-unit.
    pub fn radical_preimage(&self, i: usize, ring: &FiniteCommRing) -> Vec<u32> {
        let f = &self.factors[i];
        (0..ring.order as u32)
            .filter(|&r| f.maximal_ideal.contains(&f.proj[r as usize]))
            .collect()
    }
}

pub fn local_decomposition(ring: &Arc<FiniteCommRing>) -> Result<LocalDecomposition> {
    let prims = ring.primitive_idempotents();
    // distinct primitive idempotents must be orthogonal and sum to one
    let mut total = ring.zero;
    for (i, &e) in prims.iter().enumerate() {
        total = ring.add(total, e);
        for &f in prims.iter().skip(i + 1) {
            if ring.mul(e, f) != ring.zero {
                return Err(Error::Validation("primitive idempotents not orthogonal".into()));
            }
        }
    }
    if total != ring.one {
        return Err(Error::Validation("primitive idempotents do not sum to one".into()));
    }
    let mut factors = Vec::new();
    for &e in &prims {
        let mut elems: Vec<u32> = (0..ring.order as u32).map(|r| ring.mul(e, r)).collect();
        elems.sort_unstable();
        elems.dedup();
        let index: HashMap<u32, u32> =
            elems.iter().enumerate().map(|(i, &x)| (x, i as u32)).collect();
        let n = elems.len();
        let mut add = vec![0u32; n * n];
        let mut mul = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                add[i * n + j] = index[&ring.add(elems[i], elems[j])];
                mul[i * n + j] = index[&ring.mul(elems[i], elems[j])];
            }
        }
        let factor = FiniteCommRing::from_tables(
            n,
            add,
            mul,
            index[&ring.zero],
            index[&e],
            format!("{}|e{}", ring.descriptor, e),
        )?;
        let proj: Vec<u32> = (0..ring.order as u32).map(|r| index[&ring.mul(e, r)]).collect();
        // local: non-units must form an ideal
        let maximal_ideal: Vec<u32> =
            (0..n as u32).filter(|&x| !factor.is_unit(x)).collect();
        for &a in &maximal_ideal {
            for &b in &maximal_ideal {
                let s = factor.add(a, b);
                if factor.is_unit(s) {
                    return Err(Error::Validation(format!(
                        "factor at idempotent {} is not local",
                        e
                    )));
                }
            }
        }
        // residue field = factor / maximal ideal
        let in_ideal: Vec<bool> = {
            let mut v = vec![false; n];
            for &m in &maximal_ideal {
                v[m as usize] = true;
            }
            v
        };
        let mut class_of = vec![u32::MAX; n];
        let mut reps: Vec<u32> = Vec::new();
        for x in 0..n as u32 {
            if class_of[x as usize] != u32::MAX {
                continue;
            }
            let mut coset: Vec<u32> = maximal_ideal.iter().map(|&m| factor.add(x, m)).collect();
            coset.sort_unstable();
            let id = reps.len() as u32;
            for &c in &coset {
                class_of[c as usize] = id;
            }
            reps.push(coset[0]);
        }
        let _ = in_ideal;
        let q = reps.len();
        let mut radd = vec![0u32; q * q];
        let mut rmul = vec![0u32; q * q];
        for i in 0..q {
            for j in 0..q {
                radd[i * q + j] = class_of[factor.add(reps[i], reps[j]) as usize];
                rmul[i * q + j] = class_of[factor.mul(reps[i], reps[j]) as usize];
            }
        }
        let residue = FiniteCommRing::from_tables(
            q,
            radd,
            rmul,
            class_of[factor.zero as usize],
            class_of[factor.one as usize],
            format!("{}|e{}|res", ring.descriptor, e),
        )?;
        // residue ring of a finite local ring must be a field of prime power order
        if is_prime_power(q as u64).is_none() {
            return Err(Error::Validation("residue field order is not a prime power".into()));
        }
        for x in 0..q as u32 {
            if x != residue.zero && !residue.is_unit(x) {
                return Err(Error::Validation("residue ring is not a field".into()));
            }
        }
        factors.push(LocalFactor {
            idempotent: e,
            ring: factor,
            proj,
            embed: elems,
            maximal_ideal,
            residue_field: residue,
            residue_proj: class_of,
        });
    }
    Ok(LocalDecomposition { factors })
}

// ---------------------------------------------------------------------------
// Ring maps and isomorphism search
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct RingMap {
    pub src: Arc<FiniteCommRing>,
    pub tgt: Arc<FiniteCommRing>,
    pub map: Vec<u32>,
}

impl RingMap {
    pub fn new(src: Arc<FiniteCommRing>, tgt: Arc<FiniteCommRing>, map: Vec<u32>) -> Result<Self> {
        if map.len() != src.order {
            return Err(Error::Validation("ring map length mismatch".into()));
        }
        if map[src.one as usize] != tgt.one {
            return Err(Error::Validation("ring map does not preserve one".into()));
        }
        for a in 0..src.order as u32 {
            for b in 0..src.order as u32 {
                if map[src.add(a, b) as usize] != tgt.add(map[a as usize], map[b as usize]) {
                    return Err(Error::Validation("ring map not additive".into()));
                }
                if map[src.mul(a, b) as usize] != tgt.mul(map[a as usize], map[b as usize]) {
                    return Err(Error::Validation("ring map not multiplicative".into()));
                }
            }
        }
        Ok(RingMap { src, tgt, map })
    }

    pub fn apply(&self, a: u32) -> u32 {
        self.map[a as usize]
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.tgt.order];
        for &v in &self.map {
            if seen[v as usize] {
                return false;
            }
            seen[v as usize] = true;
        }
        self.map.len() == self.tgt.order
    }
}

/// Greedy ring generating set: elements that, together with 1, generate under
/// + and *.
pub fn ring_generators(ring: &FiniteCommRing) -> Vec<u32> {
    let mut gens: Vec<u32> = Vec::new();
    let mut span = ring_closure(ring, &gens);
    while span.iter().filter(|&&b| b).count() < ring.order {
        let next = (0..ring.order as u32).find(|&x| !span[x as usize]).unwrap();
        gens.push(next);
        span = ring_closure(ring, &gens);
    }
    gens
}

fn ring_closure(ring: &FiniteCommRing, gens: &[u32]) -> Vec<bool> {
    let mut seen = vec![false; ring.order];
    let mut frontier = vec![ring.zero, ring.one];
    seen[ring.zero as usize] = true;
    seen[ring.one as usize] = true;
    for &g in gens {
        if !seen[g as usize] {
            seen[g as usize] = true;
            frontier.push(g);
        }
    }
    let mut all: Vec<u32> = frontier.clone();
    while let Some(x) = frontier.pop() {
        let mut discovered = Vec::new();
        for &y in &all {
            for z in [ring.add(x, y), ring.mul(x, y)] {
                if !seen[z as usize] {
                    seen[z as usize] = true;
                    discovered.push(z);
                }
            }
        }
        for z in discovered {
            all.push(z);
            frontier.push(z);
        }
    }
    seen
}

/// Expression trace of the closure: how each ring element is derived from the
/// generators, so a candidate generator assignment extends to a full map.
pub(crate) enum Derivation {
    Zero,
    One,
    Gen(usize),
    Add(u32, u32),
    Mul(u32, u32),
}

pub(crate) fn derivations(ring: &FiniteCommRing, gens: &[u32]) -> Option<Vec<Derivation>> {
    let n = ring.order;
    let mut der: Vec<Option<Derivation>> = (0..n).map(|_| None).collect();
    der[ring.zero as usize] = Some(Derivation::Zero);
    der[ring.one as usize] = Some(Derivation::One);
    for (i, &g) in gens.iter().enumerate() {
        if der[g as usize].is_none() {
            der[g as usize] = Some(Derivation::Gen(i));
        }
    }
    let mut known: Vec<u32> = (0..n as u32).filter(|&x| der[x as usize].is_some()).collect();
    let mut head = 0;
    while head < known.len() {
        let x = known[head];
        head += 1;
        for idx in 0..known.len() {
            let y = known[idx];
            let s = ring.add(x, y);
            if der[s as usize].is_none() {
                der[s as usize] = Some(Derivation::Add(x, y));
                known.push(s);
            }
            let m = ring.mul(x, y);
            if der[m as usize].is_none() {
                der[m as usize] = Some(Derivation::Mul(x, y));
                known.push(m);
            }
        }
    }
    if known.len() == n {
        Some(der.into_iter().map(Option::unwrap).collect())
    } else {
        None
    }
}

fn evaluate_map(
    ring: &FiniteCommRing,
    tgt: &FiniteCommRing,
    der: &[Derivation],
    images: &[u32],
) -> Option<Vec<u32>> {
    let n = ring.order;
    let mut map = vec![u32::MAX; n];
    // evaluate in dependency order by iterating until stable
    let mut remaining = n;
    while remaining > 0 {
        let mut progressed = false;
        for x in 0..n {
            if map[x] != u32::MAX {
                continue;
            }
            let v = match der[x] {
                Derivation::Zero => Some(tgt.zero),
                Derivation::One => Some(tgt.one),
                Derivation::Gen(i) => Some(images[i]),
                Derivation::Add(a, b) => {
                    let (ma, mb) = (map[a as usize], map[b as usize]);
                    if ma != u32::MAX && mb != u32::MAX {
                        Some(tgt.add(ma, mb))
                    } else {
                        None
                    }
                }
                Derivation::Mul(a, b) => {
                    let (ma, mb) = (map[a as usize], map[b as usize]);
                    if ma != u32::MAX && mb != u32::MAX {
                        Some(tgt.mul(ma, mb))
                    } else {
                        None
                    }
                }
            };
            if let Some(v) = v {
                map[x] = v;
                remaining -= 1;
                progressed = true;
            }
        }
        if !progressed {
            return None;
        }
    }
    Some(map)
}

/// All unital ring homomorphisms, by backtracking over generator images.
pub fn ring_homs(src: &Arc<FiniteCommRing>, tgt: &Arc<FiniteCommRing>) -> Vec<RingMap> {
    let gens = ring_generators(src);
    let der = derivations(src, &gens).expect("generators span");
    let mut out = Vec::new();
    let mut images = vec![0u32; gens.len()];
    enumerate_hom_images(src, tgt, &gens, &der, &mut images, 0, &mut out);
    out
}

fn enumerate_hom_images(
    src: &Arc<FiniteCommRing>,
    tgt: &Arc<FiniteCommRing>,
    gens: &[u32],
    der: &[Derivation],
    images: &mut Vec<u32>,
    depth: usize,
    out: &mut Vec<RingMap>,
) {
    if depth == gens.len() {
        if let Some(map) = evaluate_map(src, tgt, der, images) {
            if let Ok(hom) = RingMap::new(src.clone(), tgt.clone(), map) {
                out.push(hom);
            }
        }
        return;
    }
    // the image's additive order must divide the generator's
    let g = gens[depth];
    let g_ord = additive_order(src, g);
    for cand in 0..tgt.order as u32 {
        if g_ord % additive_order(tgt, cand) != 0 {
            continue;
        }
        images[depth] = cand;
        enumerate_hom_images(src, tgt, gens, der, images, depth + 1, out);
    }
}

fn additive_order(ring: &FiniteCommRing, a: u32) -> u64 {
    let mut x = a;
    let mut k = 1u64;
    while x != ring.zero {
        x = ring.add(x, a);
        k += 1;
    }
    k
}

/// Isomorphism search with invariant pruning and a node budget. Returns the
/// witness map, `None` if provably non-isomorphic, or an inconclusive error on
/// budget exhaustion.
pub fn ring_isomorphic(
    a: &Arc<FiniteCommRing>,
    b: &Arc<FiniteCommRing>,
    config: &Config,
) -> Result<Option<RingMap>> {
    if a.order != b.order {
        return Ok(None);
    }
    if a.additive_invariants() != b.additive_invariants() {
        return Ok(None);
    }
    if a.units().len() != b.units().len() {
        return Ok(None);
    }
    if a.idempotents().len() != b.idempotents().len() {
        return Ok(None);
    }
    let gens = ring_generators(a);
    let der = derivations(a, &gens).expect("generators span");
    let mut nodes = 0u64;
    let mut images = vec![0u32; gens.len()];
    search_iso(a, b, &gens, &der, &mut images, 0, &mut nodes, config)
}

fn search_iso(
    a: &Arc<FiniteCommRing>,
    b: &Arc<FiniteCommRing>,
    gens: &[u32],
    der: &[Derivation],
    images: &mut Vec<u32>,
    depth: usize,
    nodes: &mut u64,
    config: &Config,
) -> Result<Option<RingMap>> {
    if depth == gens.len() {
        *nodes += 1;
        if *nodes > config.iso_node_budget {
            return Err(Error::Inconclusive { stage: "ring isomorphism", limit: config.iso_node_budget });
        }
        if let Some(map) = evaluate_map(a, b, der, images) {
            if let Ok(hom) = RingMap::new(a.clone(), b.clone(), map) {
                if hom.is_bijective() {
                    return Ok(Some(hom));
                }
            }
        }
        return Ok(None);
    }
    let g = gens[depth];
    let g_ord = additive_order(a, g);
    let g_unit = a.is_unit(g);
    let g_idem = a.mul(g, g) == g;
    for cand in 0..b.order as u32 {
        if additive_order(b, cand) != g_ord {
            continue;
        }
        if b.is_unit(cand) != g_unit {
            continue;
        }
        if (b.mul(cand, cand) == cand) != g_idem {
            continue;
        }
        images[depth] = cand;
        if let Some(found) = search_iso(a, b, gens, der, images, depth + 1, nodes, config)? {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

/// Certified reconstruction: the canonical map from `R` to the product of its
/// local factors, verified to be a ring isomorphism.
pub fn reconstruction_iso(ring: &Arc<FiniteCommRing>, dec: &LocalDecomposition) -> Result<RingMap> {
    let parts: Vec<Arc<FiniteCommRing>> = dec.factors.iter().map(|f| f.ring.clone()).collect();
    let product = FiniteCommRing::product(&parts)?;
    let mut map = Vec::with_capacity(ring.order);
    for r in 0..ring.order as u32 {
        let mut idx = 0usize;
        for f in dec.factors.iter().rev() {
            idx = idx * f.ring.order + f.proj[r as usize] as usize;
        }
        map.push(idx as u32);
    }
    let hom = RingMap::new(ring.clone(), product, map)?;
    if !hom.is_bijective() {
        return Err(Error::Validation("local reconstruction is not bijective".into()));
    }
    Ok(hom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> Config {
        Config::default()
    }

    #[test]
    fn z12_units_and_invariants() {
        let r = parse_ring("Z/12", &cfg()).unwrap();
        assert_eq!(r.units(), vec![1, 5, 7, 11]);
        let (g, _) = r.unit_group();
        assert_eq!(g.invariant_factors(), vec![2, 2]);
    }

    #[test]
    fn gf4_is_a_field_with_advertised_presentation() {
        let r = parse_ring("GF(4)", &cfg()).unwrap();
        assert_eq!(r.order, 4);
        for a in 1..4 {
            assert!(r.is_unit(a), "nonzero element {} must be invertible", a);
        }
        // x * x = x + 1 where x is index 2 and x+1 is index 3
        assert_eq!(r.mul(2, 2), 3);
        assert_eq!(r.descriptor, "GF(4)");
        assert!(r.presentation.contains("x^2=1+x^1"));
    }

    #[test]
    fn all_tabled_fields_construct() {
        for &(p, k, _) in GF_REDUCTIONS {
            let q = p.pow(k);
            let r = FiniteCommRing::gf(q).unwrap();
            assert_eq!(r.order as u64, q);
            assert_eq!(r.units().len() as u64, q - 1);
        }
    }

    #[test]
    fn zero_ring_rejected() {
        assert!(matches!(parse_ring("Z/1", &cfg()), Err(Error::ZeroRing)));
    }

    #[test]
    fn ring_order_cap() {
        let err = parse_ring("Z/257", &cfg()).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }

    #[test]
    fn product_parsing() {
        let r = parse_ring("Z/4 x GF(2)", &cfg()).unwrap();
        assert_eq!(r.order, 8);
        assert_eq!(r.descriptor, "Z/4 x GF(2)");
        let dec = local_decomposition(&r).unwrap();
        assert_eq!(dec.factors.len(), 2);
    }

    #[test]
    fn z6_local_decomposition() {
        let r = parse_ring("Z/6", &cfg()).unwrap();
        assert_eq!(r.idempotents(), vec![0, 1, 3, 4]);
        assert_eq!(r.primitive_idempotents(), vec![3, 4]);
        let dec = local_decomposition(&r).unwrap();
        let orders: Vec<usize> = dec.factors.iter().map(|f| f.ring.order).collect();
        assert_eq!(orders, vec![2, 3]);
        // oracle: the factor rings match Z/2 and Z/3 element-for-element
        let z2 = parse_ring("Z/2", &cfg()).unwrap();
        let z3 = parse_ring("Z/3", &cfg()).unwrap();
        assert!(ring_isomorphic(&dec.factors[0].ring, &z2, &cfg()).unwrap().is_some());
        assert!(ring_isomorphic(&dec.factors[1].ring, &z3, &cfg()).unwrap().is_some());
    }

    #[test]
    fn gf4_is_local() {
        let r = parse_ring("GF(4)", &cfg()).unwrap();
        let dec = local_decomposition(&r).unwrap();
        assert_eq!(dec.factors.len(), 1);
        assert_eq!(dec.factors[0].residue_field.order, 4);
    }

    #[test]
    fn z4_is_not_isomorphic_to_gf4() {
        let a = parse_ring("Z/4", &cfg()).unwrap();
        let b = parse_ring("GF(4)", &cfg()).unwrap();
        assert!(ring_isomorphic(&a, &b, &cfg()).unwrap().is_none());
    }

    #[test]
    fn z6_is_isomorphic_to_z2_x_z3() {
        let a = parse_ring("Z/6", &cfg()).unwrap();
        let b = parse_ring("Z/2 x Z/3", &cfg()).unwrap();
        let iso = ring_isomorphic(&a, &b, &cfg()).unwrap();
        assert!(iso.is_some());
    }

    #[test]
    fn reconstruction_from_local_factors() {
        for spec in ["Z/6", "Z/12", "GF(4)", "Z/4 x GF(2)", "Z/36"] {
            let r = parse_ring(spec, &cfg()).unwrap();
            let dec = local_decomposition(&r).unwrap();
            reconstruction_iso(&r, &dec).unwrap();
        }
    }

    #[test]
    fn quotient_hom_exists_and_is_unique() {
        let z4 = parse_ring("Z/4", &cfg()).unwrap();
        let z2 = parse_ring("Z/2", &cfg()).unwrap();
        let homs = ring_homs(&z4, &z2);
        assert_eq!(homs.len(), 1);
        assert_eq!(homs[0].map, vec![0, 1, 0, 1]);
        // no homomorphism in the other direction
        assert!(ring_homs(&z2, &z4).is_empty());
    }

    #[test]
    fn generator_corpus_bounds() {
        let specs = generator_corpus_specs(8);
        assert!(specs.contains(&"Z/8".to_string()));
        assert!(specs.contains(&"GF(8)".to_string()));
        assert!(specs.contains(&"Z/2 x Z/2 x Z/2".to_string()));
        assert!(specs.contains(&"Z/2 x GF(4)".to_string()));
        assert!(!specs.iter().any(|s| {
            let r = parse_ring(s, &cfg()).unwrap();
            r.order > 8
        }));
    }

    #[test]
    fn table_atom_round_trip() {
        let r = parse_ring("Z/6", &cfg()).unwrap();
        let file = RingTablesFile {
            order: r.order,
            add: (0..r.order)
                .map(|i| (0..r.order).map(|j| r.add(i as u32, j as u32)).collect())
                .collect(),
            mul: (0..r.order)
                .map(|i| (0..r.order).map(|j| r.mul(i as u32, j as u32)).collect())
                .collect(),
            zero: r.zero,
            one: r.one,
        };
        let dir = std::env::temp_dir().join("brauerk-ring-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("z6.json");
        std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
        let spec = format!("table:{}", path.display());
        let loaded = parse_ring(&spec, &cfg()).unwrap();
        assert!(loaded.same_tables(&r));
    }
}
