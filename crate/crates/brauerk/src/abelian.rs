//! Finite abelian groups and exact integer linear algebra.
//!
//! Everything here is exact: groups are given by explicit operation tables or
//! by closures over encoded elements, and presentations are reduced with
//! integer Smith/Hermite normal forms over `i128`. Invariant factors are
//! reported in ascending divisibility order `d_1 | d_2 | ... | d_k` with
//! trivial factors dropped, so the trivial group is the empty list.

use std::collections::{HashMap, HashSet};

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd_u64(a, b) * b
    }
}

/// Prime factorization by trial division, `n >= 1`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n > 1 && factorize(n).len() == 1 && factorize(n)[0].1 == 1
}

/// Invariant factors `d_1 | d_2 | ... | d_k` of the direct sum of the given
/// cyclic groups, without materializing the group.
pub fn invariants_from_cyclic_orders(orders: &[u64]) -> Vec<u64> {
    let mut per_prime: std::collections::BTreeMap<u64, Vec<u32>> = std::collections::BTreeMap::new();
    for &d in orders {
        for (p, e) in factorize(d) {
            per_prime.entry(p).or_default().push(e);
        }
    }
    for parts in per_prime.values_mut() {
        parts.sort_unstable_by(|x, y| y.cmp(x));
    }
    let k = per_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut factors = Vec::new();
    for i in 0..k {
        let mut d = 1u64;
        for (&p, parts) in &per_prime {
            if i < parts.len() {
                d *= p.pow(parts[i]);
            }
        }
        factors.push(d);
    }
    factors.reverse();
    factors
}

pub fn is_prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let f = factorize(n);
    if f.len() == 1 {
        Some(f[0])
    } else {
        None
    }
}

/// Extended gcd: returns `(g, x, y)` with `g = ax + by`, `g > 0`.
fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i128, 0i128);
    let (mut y0, mut y1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

// ---------------------------------------------------------------------------
// Smith normal form
// ---------------------------------------------------------------------------

/// Result of diagonalizing an integer relation matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithResult {
    /// Diagonal entries `> 1`, ascending divisibility order.
    pub torsion: Vec<u64>,
    /// Number of generators not constrained by any relation.
    pub free_rank: usize,
}

impl SmithResult {
    pub fn order(&self) -> Option<u64> {
        if self.free_rank == 0 {
            Some(self.torsion.iter().product())
        } else {
            None
        }
    }
}

/// Smith normal form invariants of the matrix whose rows are relations among
/// `ncols` generators: the cokernel of the row lattice is
/// `Z^free_rank + sum Z/d` over the torsion entries.
pub fn smith_invariants(rows: &[Vec<i128>], ncols: usize) -> SmithResult {
    let mut m: Vec<Vec<i128>> = rows.iter().filter(|r| r.iter().any(|&x| x != 0)).cloned().collect();
    for r in &m {
        assert_eq!(r.len(), ncols);
    }
    let mut diag: Vec<i128> = Vec::new();
    let mut t = 0usize;
    'stage: while t < m.len() && t < ncols {
        let mut piv: Option<(usize, usize, i128)> = None;
        for i in t..m.len() {
            for j in t..ncols {
                let a = m[i][j].abs();
                if a != 0 && piv.map_or(true, |(_, _, b)| a < b) {
                    piv = Some((i, j, a));
                }
            }
        }
        let Some((pi, pj, _)) = piv else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in (t + 1)..m.len() {
                if m[i][t] != 0 {
                    let q = m[i][t].div_euclid(m[t][t]);
                    if q != 0 {
                        for j in t..ncols {
                            let s = q * m[t][j];
                            m[i][j] -= s;
                        }
                    }
                    if m[i][t] != 0 {
                        m.swap(t, i);
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            for j in (t + 1)..ncols {
                if m[t][j] != 0 {
                    let q = m[t][j].div_euclid(m[t][t]);
                    if q != 0 {
                        for i in 0..m.len() {
                            let s = q * m[i][t];
                            m[i][j] -= s;
                        }
                    }
                    if m[t][j] != 0 {
                        for row in m.iter_mut() {
                            row.swap(t, j);
                        }
                        dirty = true;
                    }
                }
            }
            if !dirty {
                break;
            }
        }
        // the pivot must divide every remaining entry; repair and redo if not
        let p = m[t][t];
        for i in (t + 1)..m.len() {
            for j in (t + 1)..ncols {
                if m[i][j] % p != 0 {
                    for k in t..ncols {
                        let s = m[i][k];
                        m[t][k] += s;
                    }
                    continue 'stage;
                }
            }
        }
        diag.push(p.abs());
        t += 1;
    }
    let free_rank = ncols - diag.len();
    let torsion: Vec<u64> = diag.iter().filter(|&&d| d > 1).map(|&d| d as u64).collect();
    SmithResult { torsion, free_rank }
}

// ---------------------------------------------------------------------------
// Hermite-form lattices and finitely presented abelian groups
// ---------------------------------------------------------------------------

/// Integer row lattice kept in echelon form (each row's first nonzero entry is
/// its pivot, pivot columns strictly increase). Supports membership tests and
/// canonical coset representatives.
#[derive(Debug, Clone)]
pub struct IntLattice {
    pub ncols: usize,
    rows: Vec<Vec<i128>>,
    pivots: Vec<usize>,
}

impl IntLattice {
    pub fn from_rows(input: &[Vec<i128>], ncols: usize) -> Self {
        let mut lat = IntLattice { ncols, rows: Vec::new(), pivots: Vec::new() };
        for r in input {
            lat.insert(r.clone());
        }
        lat
    }

    fn insert(&mut self, mut v: Vec<i128>) {
        assert_eq!(v.len(), self.ncols);
        loop {
            let Some(col) = v.iter().position(|&x| x != 0) else { return };
            match self.pivots.iter().position(|&p| p == col) {
                Some(i) => {
                    let a = self.rows[i][col];
                    let b = v[col];
                    if b % a == 0 {
                        let q = b / a;
                        for j in col..self.ncols {
                            let s = q * self.rows[i][j];
                            v[j] -= s;
                        }
                    } else {
                        let (g, x, y) = egcd(a, b);
                        let old = self.rows[i].clone();
                        let mut newr = vec![0i128; self.ncols];
                        for j in 0..self.ncols {
                            newr[j] = x * old[j] + y * v[j];
                        }
                        debug_assert_eq!(newr[col].abs(), g);
                        let qa = a / newr[col];
                        let qb = b / newr[col];
                        let mut rem_old = vec![0i128; self.ncols];
                        let mut rem_v = vec![0i128; self.ncols];
                        for j in 0..self.ncols {
                            rem_old[j] = old[j] - qa * newr[j];
                            rem_v[j] = v[j] - qb * newr[j];
                        }
                        debug_assert_eq!(rem_old[col], 0);
                        debug_assert_eq!(rem_v[col], 0);
                        self.rows[i] = newr;
                        self.insert(rem_old);
                        v = rem_v;
                    }
                }
                None => {
                    let pos = self.pivots.iter().position(|&p| p > col).unwrap_or(self.pivots.len());
                    self.rows.insert(pos, v);
                    self.pivots.insert(pos, col);
                    return;
                }
            }
        }
    }

    /// Canonical representative of `v` modulo the lattice: residues at pivot
    /// columns lie in `[0, |pivot|)`.
    pub fn reduce(&self, v: &[i128]) -> Vec<i128> {
        let mut v = v.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            let q = v[p].div_euclid(self.rows[i][p]);
            if q != 0 {
                for j in p..self.ncols {
                    let s = q * self.rows[i][j];
                    v[j] -= s;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[i128]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Finitely presented abelian group `Z^ngens / <relations>`.
#[derive(Debug, Clone)]
pub struct FpAbGroup {
    pub ngens: usize,
    pub relations: Vec<Vec<i128>>,
    lattice: IntLattice,
}

impl FpAbGroup {
    pub fn new(ngens: usize, relations: Vec<Vec<i128>>) -> Self {
        let lattice = IntLattice::from_rows(&relations, ngens);
        FpAbGroup { ngens, relations, lattice }
    }

    pub fn invariants(&self) -> SmithResult {
        smith_invariants(&self.relations, self.ngens)
    }

    pub fn is_finite(&self) -> bool {
        self.lattice.rank() == self.ngens
    }

    pub fn order(&self) -> Option<u64> {
        self.invariants().order()
    }

    pub fn reduce(&self, v: &[i128]) -> Vec<i128> {
        self.lattice.reduce(v)
    }

    /// Materialize as an explicit group together with the images of the
    /// presentation generators. Requires finiteness.
    pub fn materialize(&self) -> (AbGroup, Vec<u32>) {
        assert!(self.is_finite(), "cannot materialize an infinite group");
        let mut index: HashMap<Vec<i128>, u32> = HashMap::new();
        let mut elems: Vec<Vec<i128>> = Vec::new();
        let zero = self.reduce(&vec![0; self.ngens]);
        index.insert(zero.clone(), 0);
        elems.push(zero);
        let mut frontier = vec![0u32];
        while let Some(cur) = frontier.pop() {
            for g in 0..self.ngens {
                let mut v = elems[cur as usize].clone();
                v[g] += 1;
                let v = self.reduce(&v);
                if !index.contains_key(&v) {
                    let id = elems.len() as u32;
                    index.insert(v.clone(), id);
                    elems.push(v);
                    frontier.push(id);
                }
            }
        }
        let n = elems.len();
        let mut op = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut v = elems[i].clone();
                for k in 0..self.ngens {
                    v[k] += elems[j][k];
                }
                op[i * n + j] = index[&self.reduce(&v)];
            }
        }
        let group = AbGroup::from_table(n, op, 0);
        let gens = (0..self.ngens)
            .map(|g| {
                let mut v = vec![0i128; self.ngens];
                v[g] = 1;
                index[&self.reduce(&v)]
            })
            .collect();
        (group, gens)
    }
}

// ---------------------------------------------------------------------------
// Explicit finite abelian groups
// ---------------------------------------------------------------------------

/// Finite abelian group on indices `0..order` with a dense operation table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbGroup {
    pub order: usize,
    op: Vec<u32>,
    inv: Vec<u32>,
    pub zero: u32,
}

impl AbGroup {
    pub fn from_table(order: usize, op: Vec<u32>, zero: u32) -> Self {
        assert_eq!(op.len(), order * order);
        let mut inv = vec![u32::MAX; order];
        for a in 0..order {
            for b in 0..order {
                if op[a * order + b] == zero {
                    inv[a] = b as u32;
                }
            }
        }
        let g = AbGroup { order, op, inv, zero };
        g.validate();
        g
    }

    /// Build from encoded elements and an operation closure; returns the group
    /// and the encoding-to-index map.
    pub fn from_closure<F>(elements: &[u64], zero: u64, op: F) -> (Self, HashMap<u64, u32>)
    where
        F: Fn(u64, u64) -> u64,
    {
        let mut index = HashMap::new();
        for (i, &e) in elements.iter().enumerate() {
            assert!(index.insert(e, i as u32).is_none(), "duplicate element");
        }
        let n = elements.len();
        let mut table = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                table[i * n + j] = index[&op(elements[i], elements[j])];
            }
        }
        (AbGroup::from_table(n, table, index[&zero]), index)
    }

    pub fn trivial() -> Self {
        AbGroup { order: 1, op: vec![0], inv: vec![0], zero: 0 }
    }

    /// Direct product of cyclic groups of the given orders.
    pub fn from_cyclic_orders(orders: &[u64]) -> Self {
        let n: u64 = orders.iter().product();
        assert!(n <= 1 << 16, "group too large to materialize");
        let n = n as usize;
        let decode = |mut x: usize| -> Vec<u64> {
            let mut v = Vec::with_capacity(orders.len());
            for &d in orders {
                v.push((x as u64) % d);
                x /= d as usize;
            }
            v
        };
        let encode = |v: &[u64]| -> usize {
            let mut x = 0usize;
            for (i, &d) in orders.iter().enumerate().rev() {
                x = x * d as usize + v[i] as usize;
            }
            x
        };
        let mut op = vec![0u32; n * n];
        for i in 0..n {
            let vi = decode(i);
            for j in 0..n {
                let vj = decode(j);
                let sum: Vec<u64> = vi.iter().zip(&vj).zip(orders).map(|((a, b), d)| (a + b) % d).collect();
                op[i * n + j] = encode(&sum) as u32;
            }
        }
        AbGroup::from_table(n, op, 0)
    }

    fn validate(&self) {
        let n = self.order;
        for a in 0..n as u32 {
            assert_eq!(self.add(a, self.zero), a, "identity law");
            assert!(self.inv[a as usize] != u32::MAX, "missing inverse");
            for b in 0..n as u32 {
                assert_eq!(self.add(a, b), self.add(b, a), "commutativity");
            }
        }
        // full associativity sweep only at sizes where the cubic cost is mild
        if n <= 512 {
            for a in 0..n as u32 {
                for b in 0..n as u32 {
                    for c in 0..n as u32 {
                        assert_eq!(self.add(self.add(a, b), c), self.add(a, self.add(b, c)), "associativity");
                    }
                }
            }
        }
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.op[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    pub fn scalar(&self, k: u64, a: u32) -> u32 {
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

    pub fn element_order(&self, a: u32) -> u64 {
        let mut x = a;
        let mut k = 1u64;
        while x != self.zero {
            x = self.add(x, a);
            k += 1;
        }
        k
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// Invariant factors `d_1 | d_2 | ... | d_k` via element-order counting in
    /// each primary component.
    pub fn invariant_factors(&self) -> Vec<u64> {
        let n = self.order as u64;
        if n == 1 {
            return Vec::new();
        }
        let fact = factorize(n);
        let mut per_prime: Vec<Vec<u32>> = Vec::new();
        for &(p, a) in &fact {
            let mut exps = vec![0u32; a as usize + 1];
            for i in 0..=a {
                let pi = p.pow(i);
                let count = (0..self.order).filter(|&x| self.scalar(pi, x as u32) == self.zero).count() as u64;
                let mut c = count;
                let mut e = 0u32;
                while c > 1 {
                    assert_eq!(c % p, 0, "order-counting invariant violated");
                    c /= p;
                    e += 1;
                }
                exps[i as usize] = e;
            }
            // #parts >= i equals exps[i] - exps[i-1]; conjugate back to parts
            let ge_counts: Vec<u32> = (1..=a as usize).map(|i| exps[i] - exps[i - 1]).collect();
            let mut parts: Vec<u32> = Vec::new();
            for (i, &ge) in ge_counts.iter().enumerate() {
                let next = if i + 1 < ge_counts.len() { ge_counts[i + 1] } else { 0 };
                for _ in 0..(ge - next) {
                    parts.push(i as u32 + 1);
                }
            }
            parts.sort_unstable_by(|x, y| y.cmp(x));
            per_prime.push(parts);
        }
        let k = per_prime.iter().map(|v| v.len()).max().unwrap_or(0);
        let mut factors = Vec::new();
        for i in 0..k {
            let mut d = 1u64;
            for (pi, parts) in per_prime.iter().enumerate() {
                if i < parts.len() {
                    d *= fact[pi].0.pow(parts[i]);
                }
            }
            factors.push(d);
        }
        factors.reverse();
        debug_assert_eq!(factors.iter().product::<u64>(), n);
        factors
    }

    pub fn subgroup_closure(&self, gens: &[u32]) -> Vec<u32> {
        let mut seen = vec![false; self.order];
        seen[self.zero as usize] = true;
        let mut elems = vec![self.zero];
        let mut frontier = vec![self.zero];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.add(x, g);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    elems.push(y);
                    frontier.push(y);
                }
            }
        }
        elems.sort_unstable();
        elems
    }

    /// Quotient by a subgroup (its sorted element list); returns the quotient
    /// and the projection map on indices.
    pub fn quotient(&self, sub: &[u32]) -> (AbGroup, Vec<u32>) {
        let mut class_of = vec![u32::MAX; self.order];
        let mut reps: Vec<u32> = Vec::new();
        for x in 0..self.order as u32 {
            if class_of[x as usize] != u32::MAX {
                continue;
            }
            let mut coset: Vec<u32> = sub.iter().map(|&s| self.add(x, s)).collect();
            coset.sort_unstable();
            let id = reps.len() as u32;
            for &c in &coset {
                class_of[c as usize] = id;
            }
            reps.push(coset[0]);
        }
        let n = reps.len();
        let mut op = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                op[i * n + j] = class_of[self.add(reps[i], reps[j]) as usize];
            }
        }
        let proj = (0..self.order).map(|x| class_of[x]).collect();
        (AbGroup::from_table(n, op, class_of[self.zero as usize]), proj)
    }
}

/// Homomorphism between explicit groups, as an image table.
#[derive(Debug, Clone)]
pub struct AbMap {
    pub map: Vec<u32>,
}

impl AbMap {
    pub fn new(src: &AbGroup, tgt: &AbGroup, map: Vec<u32>) -> Self {
        assert_eq!(map.len(), src.order);
        for a in 0..src.order as u32 {
            for b in 0..src.order as u32 {
                assert_eq!(
                    map[src.add(a, b) as usize],
                    tgt.add(map[a as usize], map[b as usize]),
                    "not a homomorphism"
                );
            }
        }
        AbMap { map }
    }

    pub fn kernel(&self, src: &AbGroup, tgt: &AbGroup) -> Vec<u32> {
        (0..src.order as u32).filter(|&x| self.map[x as usize] == tgt.zero).collect()
    }

    pub fn kernel_group(&self, src: &AbGroup, tgt: &AbGroup) -> AbGroup {
        let ker = self.kernel(src, tgt);
        let (g, _) = AbGroup::from_closure(
            &ker.iter().map(|&x| x as u64).collect::<Vec<_>>(),
            src.zero as u64,
            |a, b| src.add(a as u32, b as u32) as u64,
        );
        g
    }

    pub fn image(&self) -> Vec<u32> {
        let mut img: Vec<u32> = self.map.clone();
        img.sort_unstable();
        img.dedup();
        img
    }

    pub fn image_group(&self, tgt: &AbGroup) -> AbGroup {
        let (g, _) = AbGroup::from_closure(
            &self.image().iter().map(|&x| x as u64).collect::<Vec<_>>(),
            tgt.zero as u64,
            |a, b| tgt.add(a as u32, b as u32) as u64,
        );
        g
    }

    pub fn cokernel(&self, tgt: &AbGroup) -> AbGroup {
        let (q, _) = tgt.quotient(&self.image());
        q
    }
}

// ---------------------------------------------------------------------------
// Cyclic basis extraction
// ---------------------------------------------------------------------------

/// A basis of a finite abelian group over encoded elements: independent
/// generators of prime-power order whose spans exhaust the group, plus the
/// coordinates of every element.
#[derive(Debug, Clone)]
pub struct CyclicBasis {
    pub gens: Vec<u64>,
    pub orders: Vec<u64>,
    pub coords: HashMap<u64, Vec<u32>>,
}

struct Ops<'a> {
    add: &'a dyn Fn(u64, u64) -> u64,
    zero: u64,
}

impl Ops<'_> {
    fn scalar(&self, k: u64, x: u64) -> u64 {
        let mut acc = self.zero;
        let mut base = x;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = (self.add)(acc, base);
            }
            base = (self.add)(base, base);
            k >>= 1;
        }
        acc
    }

    fn order_ppow(&self, x: u64, p: u64) -> u64 {
        let mut o = 1u64;
        let mut y = x;
        while y != self.zero {
            y = self.scalar(p, y);
            o *= p;
        }
        o
    }
}

fn p_group_basis(elems: &[u64], p: u64, ops: &Ops) -> Vec<(u64, u64)> {
    if elems.len() == 1 {
        return Vec::new();
    }
    // peel off one cyclic summand per round: the subgroup generated so far
    // is a direct summand, so an element of maximal order in the quotient
    // lifts to an element of the same order, and surjectivity plus counting
    // make the extended family a basis again
    let mut out: Vec<(u64, u64)> = Vec::new();
    let mut sub: HashSet<u64> = HashSet::new();
    sub.insert(ops.zero);
    let mut sub_list = vec![ops.zero];
    while sub_list.len() < elems.len() {
        let ord_mod = |x: u64| -> u64 {
            let mut o = 1u64;
            let mut cur = x;
            while !sub.contains(&cur) {
                cur = ops.scalar(p, cur);
                o *= p;
            }
            o
        };
        let (mut g, mut ord) = (ops.zero, 1u64);
        for &x in elems {
            let o = ord_mod(x);
            if o > ord {
                g = x;
                ord = o;
            }
        }
        let lift = sub_list
            .iter()
            .map(|&h| (ops.add)(g, h))
            .find(|&y| ops.order_ppow(y, p) == ord)
            .expect("maximal cyclic subgroup must split off");
        out.push((lift, ord));
        let mut mult = ops.zero;
        let mut added: Vec<u64> = Vec::new();
        for _ in 1..ord {
            mult = (ops.add)(mult, lift);
            for &h in &sub_list {
                let e = (ops.add)(h, mult);
                if sub.insert(e) {
                    added.push(e);
                }
            }
        }
        sub_list.extend(added);
    }
    out
}

/// Find a cyclic basis of the finite abelian group on `elements` (closed under
/// the operation). Coordinates are verified to enumerate the whole group
/// bijectively, so a successful return is a certificate.
pub fn cyclic_basis(elements: &[u64], zero: u64, add: &dyn Fn(u64, u64) -> u64) -> CyclicBasis {
    let n = elements.len() as u64;
    let ops = Ops { add, zero };
    let mut gens: Vec<u64> = Vec::new();
    let mut orders: Vec<u64> = Vec::new();
    for (p, a) in factorize(n) {
        let pa = p.pow(a);
        let cofactor = n / pa;
        let comp: Vec<u64> = elements.iter().copied().filter(|&x| ops.scalar(pa, x) == zero).collect();
        assert_eq!(comp.len() as u64, pa, "primary component size");
        let _ = cofactor;
        for (g, o) in p_group_basis(&comp, p, &ops) {
            gens.push(g);
            orders.push(o);
        }
    }
    let k = gens.len();
    // multiples table: mult[i][c] = c * gens[i]
    let mult: Vec<Vec<u64>> = gens
        .iter()
        .zip(&orders)
        .map(|(&g, &o)| {
            let mut row = Vec::with_capacity(o as usize);
            let mut cur = zero;
            for _ in 0..o {
                row.push(cur);
                cur = add(cur, g);
            }
            row
        })
        .collect();
    let mut coords: HashMap<u64, Vec<u32>> = HashMap::with_capacity(elements.len());
    let mut tuple = vec![0u32; k];
    loop {
        let mut value = zero;
        for i in 0..k {
            value = add(value, mult[i][tuple[i] as usize]);
        }
        assert!(coords.insert(value, tuple.clone()).is_none(), "basis not independent");
        let mut i = 0;
        loop {
            if i == k {
                assert_eq!(coords.len(), elements.len(), "basis does not span");
                return CyclicBasis { gens, orders, coords };
            }
            tuple[i] += 1;
            if (tuple[i] as u64) < orders[i] {
                break;
            }
            tuple[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smith_diagonal_examples() {
        let r = smith_invariants(&[vec![2, 0], vec![0, 4]], 2);
        assert_eq!(r.torsion, vec![2, 4]);
        assert_eq!(r.free_rank, 0);

        // Z^3 / <e0+e1-e2> is free of rank 2
        let r = smith_invariants(&[vec![1, 1, -1]], 3);
        assert!(r.torsion.is_empty());
        assert_eq!(r.free_rank, 2);

        // requires a divisibility repair step; |det| = 144 = 2*6*12
        let r = smith_invariants(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]], 3);
        assert_eq!(r.torsion, vec![2, 6, 12]);
        assert_eq!(r.free_rank, 0);

        // cross-check another dense matrix against gcds of minors:
        // d1 = 2, d2 = 4, d3 = |det| = 624
        let r = smith_invariants(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]], 3);
        assert_eq!(r.torsion, vec![2, 2, 156]);
        assert_eq!(r.free_rank, 0);
    }

    #[test]
    fn smith_empty_and_unit_rows() {
        let r = smith_invariants(&[], 3);
        assert!(r.torsion.is_empty());
        assert_eq!(r.free_rank, 3);
        let r = smith_invariants(&[vec![1, 0], vec![0, 1]], 2);
        assert!(r.torsion.is_empty());
        assert_eq!(r.free_rank, 0);
    }

    #[test]
    fn lattice_membership() {
        let lat = IntLattice::from_rows(&[vec![2, 0], vec![0, 3]], 2);
        assert!(lat.contains(&[4, 3]));
        assert!(!lat.contains(&[1, 0]));
        assert_eq!(lat.reduce(&[5, 7]), vec![1, 1]);
    }

    #[test]
    fn lattice_gcd_combination() {
        // rows 2e0 and 3e0 span e0
        let lat = IntLattice::from_rows(&[vec![2, 0], vec![3, 0]], 2);
        assert!(lat.contains(&[1, 0]));
        assert!(!lat.contains(&[0, 1]));
    }

    #[test]
    fn fp_group_materializes_z6() {
        let g = FpAbGroup::new(2, vec![vec![2, 0], vec![0, 3]]);
        assert_eq!(g.order(), Some(6));
        let (ab, gens) = g.materialize();
        assert_eq!(ab.order, 6);
        assert_eq!(ab.element_order(gens[0]), 2);
        assert_eq!(ab.element_order(gens[1]), 3);
        assert_eq!(ab.invariant_factors(), vec![6]);
    }

    #[test]
    fn invariant_factors_by_counting() {
        assert_eq!(AbGroup::from_cyclic_orders(&[2, 2]).invariant_factors(), vec![2, 2]);
        assert_eq!(AbGroup::from_cyclic_orders(&[4, 2, 3]).invariant_factors(), vec![2, 12]);
        assert_eq!(AbGroup::from_cyclic_orders(&[8, 9]).invariant_factors(), vec![72]);
        assert!(AbGroup::trivial().invariant_factors().is_empty());
    }

    #[test]
    fn quotient_and_maps() {
        let g = AbGroup::from_cyclic_orders(&[4]);
        let sub = g.subgroup_closure(&[2]);
        assert_eq!(sub, vec![0, 2]);
        let (q, proj) = g.quotient(&sub);
        assert_eq!(q.order, 2);
        assert_eq!(proj[1], proj[3]);
        let doubling = AbMap::new(&g, &g, (0..4).map(|x| g.scalar(2, x)).collect());
        assert_eq!(doubling.kernel(&g, &g), vec![0, 2]);
        assert_eq!(doubling.cokernel(&g).order, 2);
    }

    #[test]
    fn cyclic_basis_of_mixed_group() {
        let elems: Vec<u64> = (0..12).collect();
        let add = |a: u64, b: u64| (a + b) % 12;
        let basis = cyclic_basis(&elems, 0, &add);
        let mut orders = basis.orders.clone();
        orders.sort_unstable();
        assert_eq!(orders, vec![3, 4]);
        assert_eq!(basis.coords.len(), 12);
    }

    #[test]
    fn cyclic_basis_of_elementary_group() {
        let elems: Vec<u64> = (0..8).collect();
        let add = |a: u64, b: u64| a ^ b;
        let basis = cyclic_basis(&elems, 0, &add);
        assert_eq!(basis.orders, vec![2, 2, 2]);
    }

    #[test]
    fn cyclic_basis_matches_counting_invariants() {
        for orders in [vec![2u64, 4], vec![6], vec![2, 2, 9], vec![16]] {
            let g = AbGroup::from_cyclic_orders(&orders);
            let elems: Vec<u64> = (0..g.order as u64).collect();
            let add = |a: u64, b: u64| g.add(a as u32, b as u32) as u64;
            let basis = cyclic_basis(&elems, 0, &add);
            let product: u64 = basis.orders.iter().product();
            assert_eq!(product, g.order as u64);
        }
    }
}
