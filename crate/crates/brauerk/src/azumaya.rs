//! Azumaya algebras and Morita theory over a finite commutative ring: the
//! sandwich map `A (x) A^op -> End_R(A)`, faithfulness and projectivity
//! certificates, invertible bimodules with explicit inverse constructions,
//! Morita trivializations, and exhaustive enumeration of Azumaya algebras
//! up to isomorphism.

use std::collections::HashMap;
use std::sync::Arc;

use crate::algebra::{algebra_isomorphic, end_algebra, EndAlgebra, StructuredAlgebra};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::module::{
    coset_reps, enumerate_modules, hom_module, is_projective, module_from_group,
    module_isomorphic, rank_function, subgroup_closure_elems, FGModule, FreeModule, ModuleMap,
    SplittingCertificate,
};
use crate::ring::{FiniteCommRing, LocalDecomposition};
use crate::tensor::{symbol_combination, tensor_over, TensorProduct};

/// Allocation-free mixed-radix arithmetic over a module's cyclic
/// presentation, with full operation tables when the module is small enough
/// for them to pay off. The search loops below spend nearly all their time
/// in these two operations.
struct FastOps {
    orders: Vec<u64>,
    order: u64,
    add_tab: Option<Vec<u32>>,
    scal_tab: Option<Vec<u32>>,
}

impl FastOps {
    fn new(m: &FGModule, with_scalar: bool) -> FastOps {
        let order = m.order();
        let add_tab = if order * order <= 1 << 22 {
            let mut t = Vec::with_capacity((order * order) as usize);
            for x in 0..order {
                for y in 0..order {
                    t.push(m.add_elems(x, y) as u32);
                }
            }
            Some(t)
        } else {
            None
        };
        let ring_order = m.ring.order as u64;
        let scal_tab = if with_scalar && ring_order * order <= 1 << 22 {
            let mut t = Vec::with_capacity((ring_order * order) as usize);
            for r in 0..m.ring.order as u32 {
                for x in 0..order {
                    t.push(m.scalar(r, x) as u32);
                }
            }
            Some(t)
        } else {
            None
        };
        FastOps { orders: m.orders.clone(), order, add_tab, scal_tab }
    }

    #[inline]
    fn add(&self, x: u64, y: u64) -> u64 {
        if let Some(t) = &self.add_tab {
            return t[(x * self.order + y) as usize] as u64;
        }
        let (mut a, mut b, mut out, mut mult) = (x, y, 0u64, 1u64);
        for &d in &self.orders {
            out += ((a % d + b % d) % d) * mult;
            mult *= d;
            a /= d;
            b /= d;
        }
        out
    }

    #[inline]
    fn int_scale(&self, n: u64, x: u64) -> u64 {
        let (mut a, mut out, mut mult) = (x, 0u64, 1u64);
        for &d in &self.orders {
            out += ((n % d) * (a % d) % d) * mult;
            mult *= d;
            a /= d;
        }
        out
    }

    #[inline]
    fn scal(&self, m: &FGModule, r: u32, x: u64) -> u64 {
        if let Some(t) = &self.scal_tab {
            return t[r as usize * self.order as usize + x as usize] as u64;
        }
        m.scalar(r, x)
    }
}

/// Row rank of a matrix over a field, by Gaussian elimination.
fn field_rank(field: &FiniteCommRing, mut rows: Vec<Vec<u32>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][col] != field.zero) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = field.inverse(rows[rank][col]).expect("pivot is a unit");
        for c in col..ncols {
            rows[rank][c] = field.mul(inv, rows[rank][c]);
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != field.zero {
                let f = rows[r][col];
                for c in col..ncols {
                    let s = field.mul(f, rows[rank][c]);
                    rows[r][c] = field.sub(rows[r][c], s);
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// A square matrix over the ring is invertible exactly when its reduction
/// modulo every maximal ideal has full rank over the residue field.
fn matrix_invertible(dec: &LocalDecomposition, mat: &[Vec<u32>]) -> bool {
    let n = mat.len();
    (0..dec.factors.len()).all(|i| {
        let field = &dec.factors[i].residue_field;
        let rows: Vec<Vec<u32>> = mat
            .iter()
            .map(|row| row.iter().map(|&e| dec.residue_of(i, e)).collect())
            .collect();
        field_rank(field, rows) == n
    })
}

/// The verified homomorphism `A (x) A^op -> End_R(A)` sending `a (x) b` to
/// `x -> a x b`. Free algebras keep it as a square matrix in the canonical
/// bases; everything else materializes the tensor product and the
/// endomorphism module.
pub enum SandwichMap {
    /// Column `(t, u)` holds the matrix of `x -> e_t x e_u` on the basis of
    /// the free underlying module, flattened row major into the rows.
    Free { rank: usize, matrix: Vec<Vec<u32>> },
    Concrete { map: ModuleMap },
}

impl SandwichMap {
    pub fn bijective(&self, dec: &LocalDecomposition) -> bool {
        match self {
            SandwichMap::Free { matrix, .. } => matrix_invertible(dec, matrix),
            SandwichMap::Concrete { map } => map.is_bijective(),
        }
    }
}

fn sandwich_free(a: &StructuredAlgebra, free: &FreeModule) -> Result<SandwichMap> {
    let ring = a.ring();
    let n = free.rank;
    let nn = n * n;
    let units: Vec<u64> = (0..n).map(|t| free.unit_vec(t, ring.one)).collect();
    // column (t, u): entry (w, v) is the e_w coefficient of e_t e_v e_u
    let mut cols: Vec<Vec<u32>> = Vec::with_capacity(nn);
    for t in 0..n {
        for u in 0..n {
            let mut col = vec![ring.zero; nn];
            for v in 0..n {
                let prod = a.mul(a.mul(units[t], units[v]), units[u]);
                let coords = free.elem_to_vec(prod);
                for w in 0..n {
                    col[w * n + v] = coords[w];
                }
            }
            cols.push(col);
        }
    }
    let matmul = |x: &[u32], y: &[u32]| -> Vec<u32> {
        let mut out = vec![ring.zero; nn];
        for w in 0..n {
            for s in 0..n {
                let xe = x[w * n + s];
                if xe == ring.zero {
                    continue;
                }
                for v in 0..n {
                    let t = ring.mul(xe, y[s * n + v]);
                    out[w * n + v] = ring.add(out[w * n + v], t);
                }
            }
        }
        out
    };
    // sum of columns weighted by the coefficient vectors of two algebra
    // elements; this is the image of their tensor symbol
    let combine = |c: &[u32], d: &[u32]| -> Vec<u32> {
        let mut out = vec![ring.zero; nn];
        for (s1, &cs) in c.iter().enumerate() {
            if cs == ring.zero {
                continue;
            }
            for (s2, &ds) in d.iter().enumerate() {
                if ds == ring.zero {
                    continue;
                }
                let coeff = ring.mul(cs, ds);
                let col = &cols[s1 * n + s2];
                for e in 0..nn {
                    out[e] = ring.add(out[e], ring.mul(coeff, col[e]));
                }
            }
        }
        out
    };
    // multiplicativity on basis symbols: the product of two symbol images
    // must match the image of (e_t e_p) (x) (e_q e_u); both sides are
    // bilinear in the symbols, so this decides the homomorphism property
    let mut prod_vecs: Vec<Vec<u32>> = Vec::with_capacity(nn);
    for t in 0..n {
        for p in 0..n {
            prod_vecs.push(free.elem_to_vec(a.mul(units[t], units[p])));
        }
    }
    for t in 0..n {
        for u in 0..n {
            for p in 0..n {
                for q in 0..n {
                    let lhs = matmul(&cols[t * n + u], &cols[p * n + q]);
                    let c = &prod_vecs[t * n + p];
                    let d = &prod_vecs[q * n + u];
                    if lhs != combine(c, d) {
                        return Err(Error::Validation(
                            "sandwich map fails multiplicativity".into(),
                        ));
                    }
                }
            }
        }
    }
    let z = free.elem_to_vec(a.one);
    let unit_image = combine(&z, &z);
    let identity: Vec<u32> = (0..nn)
        .map(|e| if e / n == e % n { ring.one } else { ring.zero })
        .collect();
    if unit_image != identity {
        return Err(Error::Validation("sandwich map fails unitality".into()));
    }
    let matrix: Vec<Vec<u32>> = (0..nn).map(|r| (0..nn).map(|c| cols[c][r]).collect()).collect();
    Ok(SandwichMap::Free { rank: n, matrix })
}

fn sandwich_concrete(a: &StructuredAlgebra, config: &Config) -> Result<SandwichMap> {
    let m = &a.module;
    let k = m.ngens();
    let t = tensor_over(m, m, config)?;
    let end = end_algebra(m, config)?;
    // endomorphism x -> g_i x g_j for each symbol (i, j), as gen images
    let mut sym_endo: Vec<Vec<u64>> = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let (gi, gj) = (m.gen_elem(i), m.gen_elem(j));
            sym_endo.push((0..k).map(|s| a.mul(a.mul(gi, m.gen_elem(s)), gj)).collect());
        }
    }
    let endo_index: HashMap<Vec<u64>, usize> = end
        .maps
        .iter()
        .enumerate()
        .map(|(i, h)| (h.images.clone(), i))
        .collect();
    let mut images = Vec::with_capacity(t.module.ngens());
    for g in 0..t.module.ngens() {
        let combo = symbol_combination(&t, t.module.gen_elem(g))
            .ok_or_else(|| Error::Validation("tensor generator escapes the symbol span".into()))?;
        let mut endo = vec![0u64; k];
        for (sym, &mult) in combo.iter().enumerate() {
            if mult == 0 {
                continue;
            }
            for x in 0..k {
                endo[x] = m.add_elems(endo[x], m.int_scale(mult, sym_endo[sym][x]));
            }
        }
        let idx = *endo_index
            .get(&endo)
            .ok_or_else(|| Error::Validation("sandwich image is not an endomorphism".into()))?;
        images.push(end.elem_of_map[idx]);
    }
    let map = ModuleMap::new(t.module.clone(), end.algebra.module.clone(), images)?;
    // multiplicativity on spanning symbols; the opposite factor reverses
    // the second slot
    for i in 0..k {
        for j in 0..k {
            for p in 0..k {
                for q in 0..k {
                    let lhs = end.algebra.mul(
                        map.apply(t.bilinear(m.gen_elem(i), m.gen_elem(j))),
                        map.apply(t.bilinear(m.gen_elem(p), m.gen_elem(q))),
                    );
                    let rhs = map.apply(t.bilinear(
                        a.mul(m.gen_elem(i), m.gen_elem(p)),
                        a.mul(m.gen_elem(q), m.gen_elem(j)),
                    ));
                    if lhs != rhs {
                        return Err(Error::Validation(
                            "sandwich map fails multiplicativity".into(),
                        ));
                    }
                }
            }
        }
    }
    if map.apply(t.bilinear(a.one, a.one)) != end.algebra.one {
        return Err(Error::Validation("sandwich map fails unitality".into()));
    }
    Ok(SandwichMap::Concrete { map })
}

pub fn sandwich_map(a: &StructuredAlgebra, config: &Config) -> Result<SandwichMap> {
    match &a.free {
        Some(free) => sandwich_free(a, free),
        None => sandwich_concrete(a, config),
    }
}

/// Outcome of the two-part Azumaya test: the module conditions (finitely
/// generated projective of everywhere-positive rank) and bijectivity of the
/// sandwich map.
#[derive(Debug, Clone)]
pub struct AzumayaCertificate {
    pub ranks: Vec<u64>,
    pub projective: bool,
    pub rank_positive: bool,
    /// `None` when the verdict was already negative and the sandwich side
    /// exceeded its caps before deciding.
    pub sandwich_bijective: Option<bool>,
    pub azumaya: bool,
    pub failed_stage: Option<&'static str>,
}

pub fn is_azumaya(
    a: &StructuredAlgebra,
    dec: &LocalDecomposition,
    config: &Config,
) -> Result<AzumayaCertificate> {
    let ranks = rank_function(&a.module, dec)?;
    let rank_positive = ranks.iter().all(|&r| r > 0);
    let projective = a.free.is_some() || is_projective(&a.module, dec, config)?.is_some();
    let module_ok = projective && rank_positive;
    let sandwich_bijective = match sandwich_map(a, config) {
        Ok(s) => Some(s.bijective(dec)),
        Err(e) if !module_ok && e.is_inconclusive() => None,
        Err(e) => return Err(e),
    };
    let failed_stage = if !projective {
        Some("projectivity")
    } else if !rank_positive {
        Some("rank")
    } else if sandwich_bijective != Some(true) {
        Some("sandwich")
    } else {
        None
    };
    Ok(AzumayaCertificate {
        ranks,
        projective,
        rank_positive,
        sandwich_bijective,
        azumaya: failed_stage.is_none(),
        failed_stage,
    })
}

/// A left/right bimodule over two algebras with the same base ring. Action
/// tables live on generators and extend bilinearly; validation checks
/// unitality, both associativities, commutation of the two actions, and
/// agreement of the induced scalar actions with the module's own, all on
/// generators, which pins every element since each side is additive in
/// every argument.
#[derive(Clone)]
pub struct Bimodule {
    pub left: StructuredAlgebra,
    pub right: StructuredAlgebra,
    pub module: Arc<FGModule>,
    left_gens: Vec<Vec<u64>>,
    right_gens: Vec<Vec<u64>>,
}

impl Bimodule {
    pub fn new(
        left: StructuredAlgebra,
        right: StructuredAlgebra,
        module: Arc<FGModule>,
        left_gens: Vec<Vec<u64>>,
        right_gens: Vec<Vec<u64>>,
    ) -> Result<Bimodule> {
        let ring = &module.ring;
        if !left.ring().same_tables(ring) || !right.ring().same_tables(ring) {
            return Err(Error::MixedRings);
        }
        let (ka, km, kb) = (left.module.ngens(), module.ngens(), right.module.ngens());
        if left_gens.len() != ka || left_gens.iter().any(|r| r.len() != km) {
            return Err(Error::Validation("left action table has wrong shape".into()));
        }
        if right_gens.len() != km || right_gens.iter().any(|r| r.len() != kb) {
            return Err(Error::Validation("right action table has wrong shape".into()));
        }
        for (i, row) in left_gens.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if module.int_scale(left.module.orders[i], v) != 0
                    || module.int_scale(module.orders[j], v) != 0
                {
                    return Err(Error::Validation("left action not well defined".into()));
                }
            }
        }
        for (j, row) in right_gens.iter().enumerate() {
            for (i, &v) in row.iter().enumerate() {
                if module.int_scale(module.orders[j], v) != 0
                    || module.int_scale(right.module.orders[i], v) != 0
                {
                    return Err(Error::Validation("right action not well defined".into()));
                }
            }
        }
        let bm = Bimodule { left, right, module, left_gens, right_gens };
        bm.validate()?;
        Ok(bm)
    }

    fn validate(&self) -> Result<()> {
        let m = &self.module;
        let fail = |msg: &str| Err(Error::Validation(format!("bimodule: {}", msg)));
        let km = m.ngens();
        for j in 0..km {
            let g = m.gen_elem(j);
            if self.act_left(self.left.one, g) != g {
                return fail("left unit does not act as identity");
            }
            if self.act_right(g, self.right.one) != g {
                return fail("right unit does not act as identity");
            }
        }
        let ka = self.left.module.ngens();
        let kb = self.right.module.ngens();
        for i1 in 0..ka {
            let a1 = self.left.module.gen_elem(i1);
            for i2 in 0..ka {
                let a2 = self.left.module.gen_elem(i2);
                let prod = self.left.mul(a1, a2);
                for j in 0..km {
                    let g = m.gen_elem(j);
                    if self.act_left(prod, g) != self.act_left(a1, self.act_left(a2, g)) {
                        return fail("left action is not associative");
                    }
                }
            }
        }
        for i1 in 0..kb {
            let b1 = self.right.module.gen_elem(i1);
            for i2 in 0..kb {
                let b2 = self.right.module.gen_elem(i2);
                let prod = self.right.mul(b1, b2);
                for j in 0..km {
                    let g = m.gen_elem(j);
                    if self.act_right(g, prod) != self.act_right(self.act_right(g, b1), b2) {
                        return fail("right action is not associative");
                    }
                }
            }
        }
        for i in 0..ka {
            let a = self.left.module.gen_elem(i);
            for j in 0..km {
                let g = m.gen_elem(j);
                for l in 0..kb {
                    let b = self.right.module.gen_elem(l);
                    if self.act_right(self.act_left(a, g), b)
                        != self.act_left(a, self.act_right(g, b))
                    {
                        return fail("left and right actions do not commute");
                    }
                }
            }
        }
        let ring = &m.ring;
        for r in 0..ring.order as u32 {
            let la = self.left.scalar_embed(r);
            let rb = self.right.scalar_embed(r);
            for j in 0..km {
                let g = m.gen_elem(j);
                let want = m.scalar(r, g);
                if self.act_left(la, g) != want || self.act_right(g, rb) != want {
                    return fail("scalar action disagrees with the algebra units");
                }
            }
        }
        Ok(())
    }

    pub fn act_left(&self, a: u64, x: u64) -> u64 {
        let ca = self.left.module.decode(a);
        let cx = self.module.decode(x);
        let mut acc = 0u64;
        for (i, &ai) in ca.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &xj) in cx.iter().enumerate() {
                if xj == 0 {
                    continue;
                }
                acc = self
                    .module
                    .add_elems(acc, self.module.int_scale(ai as u64 * xj as u64, self.left_gens[i][j]));
            }
        }
        acc
    }

    pub fn act_right(&self, x: u64, b: u64) -> u64 {
        let cx = self.module.decode(x);
        let cb = self.right.module.decode(b);
        let mut acc = 0u64;
        for (j, &xj) in cx.iter().enumerate() {
            if xj == 0 {
                continue;
            }
            for (i, &bi) in cb.iter().enumerate() {
                if bi == 0 {
                    continue;
                }
                acc = self
                    .module
                    .add_elems(acc, self.module.int_scale(xj as u64 * bi as u64, self.right_gens[j][i]));
            }
        }
        acc
    }

    /// The algebra as a bimodule over itself.
    pub fn regular(a: &StructuredAlgebra) -> Result<Bimodule> {
        let k = a.module.ngens();
        let left_gens: Vec<Vec<u64>> = (0..k)
            .map(|i| (0..k).map(|j| a.mul(a.module.gen_elem(i), a.module.gen_elem(j))).collect())
            .collect();
        let right_gens: Vec<Vec<u64>> = (0..k)
            .map(|j| (0..k).map(|i| a.mul(a.module.gen_elem(j), a.module.gen_elem(i))).collect())
            .collect();
        Bimodule::new(a.clone(), a.clone(), a.module.clone(), left_gens, right_gens)
    }
}

/// All additive maps `src -> tgt` that are linear over the algebra acting on
/// the left of both sides, by generator-image backtracking. Linearity on
/// algebra generators propagates to everything by additivity, so each
/// constraint compares one generator image combination.
fn left_linear_maps(
    alg: &StructuredAlgebra,
    src: &Arc<FGModule>,
    src_act: &dyn Fn(u64, u64) -> u64,
    tgt: &Arc<FGModule>,
    tgt_act: &dyn Fn(u64, u64) -> u64,
    config: &Config,
) -> Result<Vec<ModuleMap>> {
    let k = src.ngens();
    let ka = alg.module.ngens();
    // constraint (ga, j): f(ga . g_j) = ga . f(g_j); the left side expands
    // over src coordinates, so it is checkable once every referenced image
    // is assigned
    struct Constraint {
        ai: usize,
        alg_elem: u64,
        j: usize,
        support: Vec<(usize, u64)>,
    }
    let mut by_trigger: Vec<Vec<Constraint>> = (0..k.max(1)).map(|_| Vec::new()).collect();
    for ai in 0..ka {
        let ga = alg.module.gen_elem(ai);
        for j in 0..k {
            let coords = src.decode(src_act(ga, src.gen_elem(j)));
            let support: Vec<(usize, u64)> = coords
                .iter()
                .enumerate()
                .filter(|&(_, &c)| c != 0)
                .map(|(s, &c)| (s, c as u64))
                .collect();
            let trigger = support.iter().map(|&(s, _)| s).max().unwrap_or(0).max(j);
            by_trigger[trigger].push(Constraint { ai, alg_elem: ga, j, support });
        }
    }
    let fast_tgt = FastOps::new(tgt, false);
    let act_tab: Option<Vec<Vec<u64>>> = if ka as u64 * tgt.order() <= 1 << 22 {
        Some(
            (0..ka)
                .map(|ai| {
                    let ga = alg.module.gen_elem(ai);
                    (0..tgt.order()).map(|y| tgt_act(ga, y)).collect()
                })
                .collect(),
        )
    } else {
        None
    };
    let mut candidates: Vec<Vec<u64>> = Vec::with_capacity(k);
    for j in 0..k {
        let d = src.orders[j];
        candidates.push((0..tgt.order()).filter(|&y| tgt.int_scale(d, y) == 0).collect());
    }
    let mut out = Vec::new();
    let mut images = vec![0u64; k];
    let mut nodes: u64 = 0;
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        depth: usize,
        k: usize,
        candidates: &[Vec<u64>],
        by_trigger: &[Vec<Constraint>],
        src: &Arc<FGModule>,
        tgt: &Arc<FGModule>,
        tgt_act: &dyn Fn(u64, u64) -> u64,
        fast_tgt: &FastOps,
        act_tab: &Option<Vec<Vec<u64>>>,
        images: &mut Vec<u64>,
        out: &mut Vec<ModuleMap>,
        nodes: &mut u64,
        config: &Config,
    ) -> Result<()> {
        if depth == k {
            out.push(ModuleMap::new(src.clone(), tgt.clone(), images.clone())?);
            return Ok(());
        }
        for &y in &candidates[depth] {
            *nodes += 1;
            if *nodes > config.enumeration_node_budget {
                return Err(Error::Budget {
                    stage: "left-linear map enumeration",
                    limit: config.enumeration_node_budget,
                });
            }
            images[depth] = y;
            let ok = by_trigger[depth].iter().all(|c| {
                let mut lhs = 0u64;
                for &(s, cs) in &c.support {
                    lhs = fast_tgt.add(lhs, fast_tgt.int_scale(cs, images[s]));
                }
                let rhs = match act_tab {
                    Some(t) => t[c.ai][images[c.j] as usize],
                    None => tgt_act(c.alg_elem, images[c.j]),
                };
                lhs == rhs
            });
            if ok {
                dfs(
                    depth + 1, k, candidates, by_trigger, src, tgt, tgt_act, fast_tgt, act_tab,
                    images, out, nodes, config,
                )?;
            }
        }
        Ok(())
    }
    if k == 0 {
        out.push(ModuleMap::new(src.clone(), tgt.clone(), Vec::new())?);
        return Ok(out);
    }
    dfs(
        0, k, &candidates, &by_trigger, src, tgt, tgt_act, &fast_tgt, &act_tab, &mut images,
        &mut out, &mut nodes, config,
    )?;
    Ok(out)
}

/// `Hom_A(M, A)` for a bimodule `M` over `(A, B)`, carrying the transposed
/// structure over `(B, A)`: `(b f)(m) = f(m b)` and `(f a)(m) = f(m) a`.
pub struct HomBimodule {
    pub bimodule: Bimodule,
    pub maps: Vec<ModuleMap>,
    /// map index -> element of the bimodule's underlying module
    pub elem_of_map: Vec<u64>,
}

pub fn hom_dual(m: &Bimodule, config: &Config) -> Result<HomBimodule> {
    let a = &m.left;
    let maps = left_linear_maps(
        a,
        &m.module,
        &|x, y| m.act_left(x, y),
        &a.module,
        &|x, y| a.mul(x, y),
        config,
    )?;
    let index: HashMap<Vec<u64>, usize> =
        maps.iter().enumerate().map(|(i, f)| (f.images.clone(), i)).collect();
    let k = m.module.ngens();
    let look = |images: Vec<u64>| -> u64 {
        *index.get(&images).expect("linear maps are closed under the operations") as u64
    };
    let zero = look(vec![0u64; k]);
    let elems: Vec<u64> = (0..maps.len() as u64).collect();
    let am = &a.module;
    let add = |x: u64, y: u64| {
        look((0..k).map(|s| am.add_elems(maps[x as usize].images[s], maps[y as usize].images[s])).collect())
    };
    let act = |r: u32, x: u64| look((0..k).map(|s| am.scalar(r, maps[x as usize].images[s])).collect());
    let (n_mod, translate) = module_from_group(&m.module.ring, &elems, zero, &add, &act)?;
    let elem_of_map: Vec<u64> = (0..maps.len()).map(|i| translate[&(i as u64)]).collect();
    let mut map_of_elem: HashMap<u64, usize> = HashMap::with_capacity(maps.len());
    for (i, &e) in elem_of_map.iter().enumerate() {
        map_of_elem.insert(e, i);
    }
    let kn = n_mod.ngens();
    let kb = m.right.module.ngens();
    let ka = a.module.ngens();
    let mut left_gens = vec![vec![0u64; kn]; kb];
    let mut right_gens = vec![vec![0u64; ka]; kn];
    for nj in 0..kn {
        let f = &maps[map_of_elem[&n_mod.gen_elem(nj)]];
        for (bi, row) in left_gens.iter_mut().enumerate() {
            let b = m.right.module.gen_elem(bi);
            let images: Vec<u64> =
                (0..k).map(|s| f.apply(m.act_right(m.module.gen_elem(s), b))).collect();
            row[nj] = elem_of_map[look(images) as usize];
        }
        for ai in 0..ka {
            let ae = a.module.gen_elem(ai);
            let images: Vec<u64> = (0..k).map(|s| a.mul(f.images[s], ae)).collect();
            right_gens[nj][ai] = elem_of_map[look(images) as usize];
        }
    }
    let bimodule = Bimodule::new(m.right.clone(), m.left.clone(), n_mod, left_gens, right_gens)?;
    Ok(HomBimodule { bimodule, maps, elem_of_map })
}

/// Tensor product of bimodules over the shared middle algebra: the quotient
/// of the base-ring tensor product by the balancing relations
/// `(x b) (x) y - x (x) (b y)`, carrying the outer actions. Both outer
/// actions preserve the balancing subgroup, so any preimage computes them.
pub struct BalancedTensor {
    pub bimodule: Bimodule,
    tensor: TensorProduct,
    to_balanced: Vec<u64>,
}

impl BalancedTensor {
    pub fn pure(&self, x: u64, y: u64) -> u64 {
        self.to_balanced[self.tensor.bilinear(x, y) as usize]
    }
}

pub fn balanced_tensor(m: &Bimodule, n: &Bimodule, config: &Config) -> Result<BalancedTensor> {
    if !m.right.same_structure(&n.left) {
        return Err(Error::Validation("middle algebras do not match".into()));
    }
    let t = tensor_over(&m.module, &n.module, config)?;
    let tm = t.module.clone();
    let mut rels = Vec::new();
    for i in 0..m.module.ngens() {
        for bi in 0..m.right.module.ngens() {
            let b = m.right.module.gen_elem(bi);
            for j in 0..n.module.ngens() {
                let lhs = t.bilinear(m.act_right(m.module.gen_elem(i), b), n.module.gen_elem(j));
                let rhs = t.bilinear(m.module.gen_elem(i), n.act_left(b, n.module.gen_elem(j)));
                let d = tm.sub_elems(lhs, rhs);
                if d != 0 {
                    rels.push(d);
                }
            }
        }
    }
    let sub = subgroup_closure_elems(&tm, &rels);
    let carrier: Vec<u64> = (0..tm.order()).collect();
    let reps = coset_reps(&tm, &carrier, &sub);
    let mut rep_list: Vec<u64> = reps.values().copied().collect();
    rep_list.sort_unstable();
    rep_list.dedup();
    let add = |x: u64, y: u64| reps[&tm.add_elems(x, y)];
    let act = |r: u32, x: u64| reps[&tm.scalar(r, x)];
    let (bal, translate) = module_from_group(&tm.ring, &rep_list, reps[&0], &add, &act)?;
    let to_balanced: Vec<u64> = (0..tm.order()).map(|x| translate[&reps[&x]]).collect();
    let mut rev = HashMap::with_capacity(rep_list.len());
    for &r in &rep_list {
        rev.insert(translate[&r], r);
    }
    let kq = bal.ngens();
    let ka = m.left.module.ngens();
    let kc = n.right.module.ngens();
    let kn = n.module.ngens();
    let mut left_gens = vec![vec![0u64; kq]; ka];
    let mut right_gens = vec![vec![0u64; kc]; kq];
    for qj in 0..kq {
        let pre = rev[&bal.gen_elem(qj)];
        let combo = symbol_combination(&t, pre).expect("symbols span the tensor product");
        for (ai, row) in left_gens.iter_mut().enumerate() {
            let ae = m.left.module.gen_elem(ai);
            let mut acc = 0u64;
            for (sym, &mult) in combo.iter().enumerate() {
                if mult == 0 {
                    continue;
                }
                let (i, j) = (sym / kn, sym % kn);
                let moved = t.bilinear(m.act_left(ae, m.module.gen_elem(i)), n.module.gen_elem(j));
                acc = tm.add_elems(acc, tm.int_scale(mult, moved));
            }
            row[qj] = to_balanced[acc as usize];
        }
        for ci in 0..kc {
            let ce = n.right.module.gen_elem(ci);
            let mut acc = 0u64;
            for (sym, &mult) in combo.iter().enumerate() {
                if mult == 0 {
                    continue;
                }
                let (i, j) = (sym / kn, sym % kn);
                let moved = t.bilinear(m.module.gen_elem(i), n.act_right(n.module.gen_elem(j), ce));
                acc = tm.add_elems(acc, tm.int_scale(mult, moved));
            }
            right_gens[qj][ci] = to_balanced[acc as usize];
        }
    }
    let bimodule = Bimodule::new(m.left.clone(), n.right.clone(), bal, left_gens, right_gens)?;
    Ok(BalancedTensor { bimodule, tensor: t, to_balanced })
}

/// Smallest subset containing the seeds and closed under addition and both
/// generator actions, as a membership mask.
fn bimodule_span(b: &Bimodule, seeds: &[u64]) -> Vec<bool> {
    let order = b.module.order() as usize;
    let mut seen = vec![false; order];
    seen[0] = true;
    let mut list = vec![0u64];
    for &s in seeds {
        if !seen[s as usize] {
            seen[s as usize] = true;
            list.push(s);
        }
    }
    let mut idx = 0;
    while idx < list.len() {
        let e = list[idx];
        let push = |x: u64, seen: &mut Vec<bool>, list: &mut Vec<u64>| {
            if !seen[x as usize] {
                seen[x as usize] = true;
                list.push(x);
            }
        };
        for j in 0..=idx {
            push(b.module.add_elems(e, list[j]), &mut seen, &mut list);
        }
        for ai in 0..b.left.module.ngens() {
            push(b.act_left(b.left.module.gen_elem(ai), e), &mut seen, &mut list);
        }
        for bi in 0..b.right.module.ngens() {
            push(b.act_right(e, b.right.module.gen_elem(bi)), &mut seen, &mut list);
        }
        idx += 1;
    }
    seen
}

fn bimodule_generators(b: &Bimodule) -> Vec<u64> {
    let order = b.module.order();
    let mut gens = Vec::new();
    loop {
        let span = bimodule_span(b, &gens);
        match (0..order).find(|&x| !span[x as usize]) {
            Some(x) => gens.push(x),
            None => return gens,
        }
    }
}

/// Isomorphism of bimodules over identical algebra pairs, by generator-image
/// search with closure propagation under addition and both actions.
pub fn bimodule_isomorphic(
    x: &Bimodule,
    y: &Bimodule,
    config: &Config,
) -> Result<Option<ModuleMap>> {
    if !x.left.same_structure(&y.left) || !x.right.same_structure(&y.right) {
        return Err(Error::Validation(
            "bimodule comparison needs identical algebra pairs".into(),
        ));
    }
    if x.module.order() != y.module.order()
        || x.module.additive_invariants() != y.module.additive_invariants()
    {
        return Ok(None);
    }
    let gens = bimodule_generators(x);
    let order = x.module.order();
    let ka = x.left.module.ngens();
    let kb = x.right.module.ngens();
    let propagate = |images: &[u64]| -> Option<HashMap<u64, u64>> {
        let mut map: HashMap<u64, u64> = HashMap::with_capacity(order as usize);
        map.insert(0, 0);
        let mut list: Vec<(u64, u64)> = vec![(0, 0)];
        let insert = |e: u64, v: u64, map: &mut HashMap<u64, u64>, list: &mut Vec<(u64, u64)>| {
            match map.get(&e) {
                Some(&w) => w == v,
                None => {
                    map.insert(e, v);
                    list.push((e, v));
                    true
                }
            }
        };
        for (g, im) in gens.iter().zip(images) {
            if !insert(*g, *im, &mut map, &mut list) {
                return None;
            }
        }
        let mut idx = 0;
        while idx < list.len() {
            let (e, v) = list[idx];
            for j in 0..=idx {
                let (e2, v2) = list[j];
                if !insert(
                    x.module.add_elems(e, e2),
                    y.module.add_elems(v, v2),
                    &mut map,
                    &mut list,
                ) {
                    return None;
                }
            }
            for ai in 0..ka {
                let ga = x.left.module.gen_elem(ai);
                if !insert(x.act_left(ga, e), y.act_left(ga, v), &mut map, &mut list) {
                    return None;
                }
            }
            for bi in 0..kb {
                let gb = x.right.module.gen_elem(bi);
                if !insert(x.act_right(e, gb), y.act_right(v, gb), &mut map, &mut list) {
                    return None;
                }
            }
            idx += 1;
        }
        Some(map)
    };
    let candidates: Vec<Vec<u64>> = gens
        .iter()
        .map(|&g| {
            let d = x.module.element_add_order(g);
            (0..order).filter(|&v| y.module.element_add_order(v) == d).collect()
        })
        .collect();
    let mut images = vec![0u64; gens.len()];
    let mut nodes: u64 = 0;
    fn dfs(
        depth: usize,
        candidates: &[Vec<u64>],
        images: &mut Vec<u64>,
        propagate: &dyn Fn(&[u64]) -> Option<HashMap<u64, u64>>,
        x: &Bimodule,
        y: &Bimodule,
        nodes: &mut u64,
        config: &Config,
    ) -> Result<Option<ModuleMap>> {
        if depth == candidates.len() {
            *nodes += 1;
            if *nodes > config.iso_node_budget {
                return Err(Error::Inconclusive {
                    stage: "bimodule isomorphism search",
                    limit: config.iso_node_budget,
                });
            }
            let Some(map) = propagate(images) else {
                return Ok(None);
            };
            if map.len() as u64 != x.module.order() {
                return Ok(None);
            }
            let mut seen = vec![false; map.len()];
            for &v in map.values() {
                if seen[v as usize] {
                    return Ok(None);
                }
                seen[v as usize] = true;
            }
            let gen_images: Vec<u64> =
                (0..x.module.ngens()).map(|i| map[&x.module.gen_elem(i)]).collect();
            return Ok(Some(ModuleMap::new(x.module.clone(), y.module.clone(), gen_images)?));
        }
        for &v in &candidates[depth] {
            images[depth] = v;
            if let Some(found) =
                dfs(depth + 1, candidates, images, propagate, x, y, nodes, config)?
            {
                return Ok(Some(found));
            }
        }
        Ok(None)
    }
    dfs(0, &candidates, &mut images, &propagate, x, y, &mut nodes, config)
}

/// Inverse bimodule together with the two collapse isomorphisms
/// `M (x)_B N -> A` and `N (x)_A M -> B`.
pub struct BimoduleInverse {
    pub inverse: Bimodule,
    pub left_collapse: ModuleMap,
    pub right_collapse: ModuleMap,
}

pub struct InvertibilityReport {
    pub invertible: bool,
    pub failed_stage: Option<&'static str>,
    pub witness: Option<BimoduleInverse>,
}

/// Decides invertibility of a bimodule by constructing the candidate inverse
/// `Hom_A(M, A)` and checking both collapses against the regular bimodules.
/// The endomorphism count over the left algebra must match the right algebra
/// first; that gate is cheap and rules out size mismatches before any tensor
/// is built.
pub fn bimodule_invertible(m: &Bimodule, config: &Config) -> Result<InvertibilityReport> {
    let negative = |stage: &'static str| InvertibilityReport {
        invertible: false,
        failed_stage: Some(stage),
        witness: None,
    };
    let a = &m.left;
    let endos = left_linear_maps(
        a,
        &m.module,
        &|x, y| m.act_left(x, y),
        &m.module,
        &|x, y| m.act_left(x, y),
        config,
    )?;
    if endos.len() as u64 != m.right.order() {
        return Ok(negative("endomorphism count"));
    }
    let hom = hom_dual(m, config)?;
    let n = &hom.bimodule;
    let tl = balanced_tensor(m, n, config)?;
    if tl.bimodule.module.order() != a.order() {
        return Ok(negative("left collapse order"));
    }
    let ra = Bimodule::regular(a)?;
    let Some(left_collapse) = bimodule_isomorphic(&tl.bimodule, &ra, config)? else {
        return Ok(negative("left collapse isomorphism"));
    };
    let tr = balanced_tensor(n, m, config)?;
    if tr.bimodule.module.order() != m.right.order() {
        return Ok(negative("right collapse order"));
    }
    let rb = Bimodule::regular(&m.right)?;
    let Some(right_collapse) = bimodule_isomorphic(&tr.bimodule, &rb, config)? else {
        return Ok(negative("right collapse isomorphism"));
    };
    Ok(InvertibilityReport {
        invertible: true,
        failed_stage: None,
        witness: Some(BimoduleInverse { inverse: n.clone(), left_collapse, right_collapse }),
    })
}

/// A projective generator whose endomorphism algebra is isomorphic to the
/// given one; exhibits the algebra as Morita-trivial.
pub struct MoritaWitness {
    pub generator: Arc<FGModule>,
    pub ranks: Vec<u64>,
    pub splitting: SplittingCertificate,
    /// algebra isomorphism from the endomorphism algebra of the generator
    pub iso: ModuleMap,
    pub end_order: u64,
}

/// Searches all modules of order at most `bound` up to isomorphism for a
/// projective generator with `End_R(P)` isomorphic to `a`. The candidate
/// list is exhaustive, so `None` certifies absence up to the bound.
pub fn morita_trivialization(
    a: &StructuredAlgebra,
    dec: &LocalDecomposition,
    bound: u64,
    config: &Config,
) -> Result<Option<MoritaWitness>> {
    for p in enumerate_modules(a.ring(), bound, config)? {
        let ranks = rank_function(&p, dec)?;
        if ranks.iter().any(|&r| r == 0) {
            continue;
        }
        let Some(splitting) = is_projective(&p, dec, config)? else {
            continue;
        };
        if hom_module(&p, &p, config)?.len() as u64 != a.order() {
            continue;
        }
        let end = end_algebra(&p, config)?;
        if let Some(iso) = algebra_isomorphic(&end.algebra, a, config)? {
            let end_order = end.algebra.order();
            return Ok(Some(MoritaWitness { generator: p, ranks, splitting, iso, end_order }));
        }
    }
    Ok(None)
}

/// The endomorphism algebra of a projective generator is Morita-trivial with
/// the generator itself as witness; this builds that witness directly
/// instead of searching.
pub fn end_self_witness(
    p: &Arc<FGModule>,
    dec: &LocalDecomposition,
    config: &Config,
) -> Result<(EndAlgebra, MoritaWitness)> {
    let ranks = rank_function(p, dec)?;
    if ranks.iter().any(|&r| r == 0) {
        return Err(Error::Validation("witness module is not a generator".into()));
    }
    let splitting = is_projective(p, dec, config)?
        .ok_or_else(|| Error::Validation("witness module is not projective".into()))?;
    let end = end_algebra(p, config)?;
    let iso = ModuleMap::identity(&end.algebra.module);
    let end_order = end.algebra.order();
    let witness = MoritaWitness { generator: p.clone(), ranks, splitting, iso, end_order };
    Ok((end, witness))
}

fn is_square(n: u64) -> bool {
    let r = (n as f64).sqrt().round() as u64;
    r * r == n
}

/// Result of the exhaustive Azumaya search: representatives up to algebra
/// isomorphism, with a flag recording whether every candidate branch was
/// fully decided.
pub struct AzumayaEnumeration {
    pub algebras: Vec<StructuredAlgebra>,
    pub certificates: Vec<AzumayaCertificate>,
    pub complete: bool,
    pub notes: Vec<String>,
}

/// Every Azumaya algebra whose underlying module has order at most `bound`,
/// up to isomorphism, by exhaustive structure-constant search with symmetry
/// reduction. Candidate modules must be projective of everywhere-positive
/// square local rank: fibers of an Azumaya algebra are central simple over
/// the residue field, hence of square dimension, so non-square candidates
/// carry none. On free candidates the unit is pinned to the first basis
/// vector: any unit is nonzero in every fiber, hence unimodular, and a basis
/// change moves it to the first slot without changing the isomorphism class.
pub fn enumerate_azumaya(
    ring: &Arc<FiniteCommRing>,
    dec: &LocalDecomposition,
    bound: u64,
    config: &Config,
) -> Result<AzumayaEnumeration> {
    let mut notes = Vec::new();
    let mut complete = true;
    let mut raw: Vec<StructuredAlgebra> = Vec::new();
    let mut nodes: u64 = 0;
    let mut seq = 0usize;
    for p in enumerate_modules(ring, bound, config)? {
        let ranks = rank_function(&p, dec)?;
        if ranks.iter().any(|&r| r == 0 || !is_square(r)) {
            continue;
        }
        if is_projective(&p, dec, config)?.is_none() {
            continue;
        }
        let free_rank = (1..=63u32)
            .find(|&k| (ring.order as u128).pow(k) == p.order() as u128)
            .map(|k| k as usize);
        let mut free = None;
        if let Some(k) = free_rank {
            let f = FreeModule::new(ring, k, config)?;
            if module_isomorphic(&p, &f.module, config)?.is_some() {
                free = Some(f);
            }
        }
        let outcome = match free {
            Some(f) => structures_free(&f, ring, &mut seq, &mut raw, &mut nodes, config),
            None => {
                match structures_general(&p, ring, &mut seq, &mut raw, &mut nodes, config) {
                    Ok(true) => Ok(()),
                    Ok(false) => {
                        complete = false;
                        notes.push(format!(
                            "module of order {} skipped: structure space exceeds the node budget",
                            p.order()
                        ));
                        Ok(())
                    }
                    Err(e) => Err(e),
                }
            }
        };
        match outcome {
            Ok(()) => {}
            Err(e) if e.is_inconclusive() => {
                complete = false;
                notes.push(format!("search on module of order {} stopped: {}", p.order(), e));
            }
            Err(e) => return Err(e),
        }
    }
    let mut algebras: Vec<StructuredAlgebra> = Vec::new();
    let mut certificates = Vec::new();
    for a in raw {
        let cert = match is_azumaya(&a, dec, config) {
            Ok(c) => c,
            Err(e) if e.is_inconclusive() => {
                complete = false;
                notes.push(format!("candidate {} undecided: {}", a.descriptor, e));
                continue;
            }
            Err(e) => return Err(e),
        };
        if !cert.azumaya {
            continue;
        }
        let mut duplicate = false;
        for b in &algebras {
            match algebra_isomorphic(&a, b, config) {
                Ok(Some(_)) => {
                    duplicate = true;
                    break;
                }
                Ok(None) => {}
                Err(e) if e.is_inconclusive() => {
                    complete = false;
                    notes.push(format!(
                        "isomorphism between {} and {} undecided: {}",
                        a.descriptor, b.descriptor, e
                    ));
                }
                Err(e) => return Err(e),
            }
        }
        if !duplicate {
            algebras.push(a);
            certificates.push(cert);
        }
    }
    Ok(AzumayaEnumeration { algebras, certificates, complete, notes })
}

/// Unital structures on a free module with the unit pinned to the first
/// basis vector, filtered down to those with center exactly `R 1` (a
/// necessary condition for Azumaya). Associativity is enforced on basis
/// triples during the search and extends bilinearly.
fn structures_free(
    free: &FreeModule,
    ring: &Arc<FiniteCommRing>,
    seq: &mut usize,
    out: &mut Vec<StructuredAlgebra>,
    nodes: &mut u64,
    config: &Config,
) -> Result<()> {
    let k = free.rank;
    let m = free.module.clone();
    let units: Vec<u64> = (0..k).map(|t| free.unit_vec(t, ring.one)).collect();
    let order = m.order();
    let mut tab: Vec<Option<u64>> = vec![None; k * k];
    for s in 0..k {
        tab[s] = Some(units[s]);
        tab[s * k] = Some(units[s]);
    }
    // entries (i, j) with i, j >= 1, ordered so each new index completes a
    // square block and associativity inside the block binds immediately
    let mut pair_order: Vec<(usize, usize)> = Vec::new();
    for t in 1..k {
        for i in 1..=t {
            for j in 1..=t {
                if i == t || j == t {
                    pair_order.push((i, j));
                }
            }
        }
    }
    let fast = FastOps::new(&m, true);
    let mut elem_vecs: Vec<u32> = Vec::with_capacity(order as usize * k);
    for x in 0..order {
        elem_vecs.extend(free.elem_to_vec(x));
    }
    let mul_elem_gen = |tab: &[Option<u64>], x: u64, c: usize| -> Option<u64> {
        let mut acc = 0u64;
        for s in 0..k {
            let vs = elem_vecs[x as usize * k + s];
            if vs == ring.zero {
                continue;
            }
            acc = fast.add(acc, fast.scal(&m, vs, tab[s * k + c]?));
        }
        Some(acc)
    };
    let mul_gen_elem = |tab: &[Option<u64>], a: usize, x: u64| -> Option<u64> {
        let mut acc = 0u64;
        for s in 0..k {
            let vs = elem_vecs[x as usize * k + s];
            if vs == ring.zero {
                continue;
            }
            acc = fast.add(acc, fast.scal(&m, vs, tab[a * k + s]?));
        }
        Some(acc)
    };
    // None means not yet decidable; Some(false) prunes
    let triple_ok = |tab: &[Option<u64>], a: usize, b: usize, c: usize| -> Option<bool> {
        let ab = tab[a * k + b]?;
        let bc = tab[b * k + c]?;
        let lhs = mul_elem_gen(tab, ab, c)?;
        let rhs = mul_gen_elem(tab, a, bc)?;
        Some(lhs == rhs)
    };
    let scalar_count = ring.order as u64;
    let basis = ring.additive_basis();
    let k0 = basis.gens.len();
    struct Ctx<'a> {
        free: &'a FreeModule,
        ring: &'a Arc<FiniteCommRing>,
        m: Arc<FGModule>,
        units: Vec<u64>,
        pair_order: Vec<(usize, usize)>,
        k: usize,
        k0: usize,
        order: u64,
        scalar_count: u64,
        basis_gens: Vec<u64>,
    }
    let ctx = Ctx {
        free,
        ring,
        m: m.clone(),
        units,
        pair_order,
        k,
        k0,
        order,
        scalar_count,
        basis_gens: basis.gens.clone(),
    };
    fn leaf(
        ctx: &Ctx,
        tab: &[Option<u64>],
        mul_elem_gen: &dyn Fn(&[Option<u64>], u64, usize) -> Option<u64>,
        mul_gen_elem: &dyn Fn(&[Option<u64>], usize, u64) -> Option<u64>,
        seq: &mut usize,
        out: &mut Vec<StructuredAlgebra>,
    ) -> Result<()> {
        // center must be exactly the scalars
        let mut central = 0u64;
        for x in 0..ctx.order {
            let commutes = (1..ctx.k).all(|c| {
                mul_elem_gen(tab, x, c).expect("table is complete")
                    == mul_gen_elem(tab, c, x).expect("table is complete")
            });
            if commutes {
                central += 1;
                if central > ctx.scalar_count {
                    return Ok(());
                }
            }
        }
        if central != ctx.scalar_count {
            return Ok(());
        }
        let kk = ctx.k * ctx.k0;
        let mut mul_gens = vec![vec![0u64; kk]; kk];
        for t in 0..ctx.k {
            for i in 0..ctx.k0 {
                for u in 0..ctx.k {
                    for j in 0..ctx.k0 {
                        let coeff =
                            ctx.ring.mul(ctx.basis_gens[i] as u32, ctx.basis_gens[j] as u32);
                        let p = tab[t * ctx.k + u].expect("table is complete");
                        mul_gens[t * ctx.k0 + i][u * ctx.k0 + j] = ctx.m.scalar(coeff, p);
                    }
                }
            }
        }
        let descriptor = format!("{}-algebra #{} (rank {})", ctx.ring.descriptor, *seq, ctx.k);
        *seq += 1;
        out.push(StructuredAlgebra::new(
            ctx.m.clone(),
            mul_gens,
            ctx.units[0],
            descriptor,
            Some(ctx.free.clone()),
        )?);
        Ok(())
    }
    fn dfs(
        ctx: &Ctx,
        depth: usize,
        tab: &mut Vec<Option<u64>>,
        mul_elem_gen: &dyn Fn(&[Option<u64>], u64, usize) -> Option<u64>,
        mul_gen_elem: &dyn Fn(&[Option<u64>], usize, u64) -> Option<u64>,
        triple_ok: &dyn Fn(&[Option<u64>], usize, usize, usize) -> Option<bool>,
        seq: &mut usize,
        out: &mut Vec<StructuredAlgebra>,
        nodes: &mut u64,
        config: &Config,
    ) -> Result<()> {
        if depth == ctx.pair_order.len() {
            return leaf(ctx, tab, mul_elem_gen, mul_gen_elem, seq, out);
        }
        let (i, j) = ctx.pair_order[depth];
        for v in 0..ctx.order {
            *nodes += 1;
            if *nodes > config.enumeration_node_budget {
                return Err(Error::Budget {
                    stage: "algebra structure enumeration",
                    limit: config.enumeration_node_budget,
                });
            }
            tab[i * ctx.k + j] = Some(v);
            let mut ok = true;
            'triples: for a in 1..ctx.k {
                for b in 1..ctx.k {
                    for c in 1..ctx.k {
                        if triple_ok(tab, a, b, c) == Some(false) {
                            ok = false;
                            break 'triples;
                        }
                    }
                }
            }
            if ok {
                dfs(ctx, depth + 1, tab, mul_elem_gen, mul_gen_elem, triple_ok, seq, out, nodes, config)?;
            }
        }
        tab[i * ctx.k + j] = None;
        Ok(())
    }
    dfs(
        &ctx,
        0,
        &mut tab,
        &mul_elem_gen,
        &mul_gen_elem,
        &triple_ok,
        seq,
        out,
        nodes,
        config,
    )
}

/// Unital structures on a non-free candidate, over all generator products.
/// Returns `false` without searching when the raw structure space exceeds
/// the node budget.
fn structures_general(
    p: &Arc<FGModule>,
    ring: &Arc<FiniteCommRing>,
    seq: &mut usize,
    out: &mut Vec<StructuredAlgebra>,
    nodes: &mut u64,
    config: &Config,
) -> Result<bool> {
    let k = p.ngens();
    let order = p.order();
    let mut candidates: Vec<Vec<u64>> = Vec::with_capacity(k * k);
    let mut space = 1f64;
    for i in 0..k {
        for j in 0..k {
            let cand: Vec<u64> = (0..order)
                .filter(|&v| {
                    p.int_scale(p.orders[i], v) == 0 && p.int_scale(p.orders[j], v) == 0
                })
                .collect();
            space *= cand.len() as f64;
            candidates.push(cand);
        }
    }
    if space > config.enumeration_node_budget as f64 {
        return Ok(false);
    }
    let mul_elem_gen = |tab: &[Option<u64>], x: u64, c: usize| -> Option<u64> {
        let v = p.decode(x);
        let mut acc = 0u64;
        for (s, &vs) in v.iter().enumerate() {
            if vs == 0 {
                continue;
            }
            acc = p.add_elems(acc, p.int_scale(vs as u64, tab[s * k + c]?));
        }
        Some(acc)
    };
    let mul_gen_elem = |tab: &[Option<u64>], a: usize, x: u64| -> Option<u64> {
        let v = p.decode(x);
        let mut acc = 0u64;
        for (s, &vs) in v.iter().enumerate() {
            if vs == 0 {
                continue;
            }
            acc = p.add_elems(acc, p.int_scale(vs as u64, tab[a * k + s]?));
        }
        Some(acc)
    };
    let triple_ok = |tab: &[Option<u64>], a: usize, b: usize, c: usize| -> Option<bool> {
        let ab = tab[a * k + b]?;
        let bc = tab[b * k + c]?;
        Some(mul_elem_gen(tab, ab, c)? == mul_gen_elem(tab, a, bc)?)
    };
    let full_mul = |tab: &[Option<u64>], x: u64, y: u64| -> u64 {
        let v = p.decode(y);
        let mut acc = 0u64;
        for (s, &vs) in v.iter().enumerate() {
            if vs == 0 {
                continue;
            }
            let part = mul_elem_gen(tab, x, s).expect("table is complete");
            acc = p.add_elems(acc, p.int_scale(vs as u64, part));
        }
        acc
    };
    let mut tab: Vec<Option<u64>> = vec![None; k * k];
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for i in 0..k {
        for j in 0..k {
            stack.push((i, j));
        }
    }
    fn dfs(
        p: &Arc<FGModule>,
        ring: &Arc<FiniteCommRing>,
        depth: usize,
        stack: &[(usize, usize)],
        candidates: &[Vec<u64>],
        tab: &mut Vec<Option<u64>>,
        k: usize,
        mul_elem_gen: &dyn Fn(&[Option<u64>], u64, usize) -> Option<u64>,
        mul_gen_elem: &dyn Fn(&[Option<u64>], usize, u64) -> Option<u64>,
        triple_ok: &dyn Fn(&[Option<u64>], usize, usize, usize) -> Option<bool>,
        full_mul: &dyn Fn(&[Option<u64>], u64, u64) -> u64,
        seq: &mut usize,
        out: &mut Vec<StructuredAlgebra>,
        nodes: &mut u64,
        config: &Config,
    ) -> Result<()> {
        if depth == stack.len() {
            // unit search, then the scalar-center gate
            let unit = (0..p.order()).find(|&u| {
                (0..k).all(|j| {
                    let g = p.gen_elem(j);
                    full_mul(tab, u, g) == g && full_mul(tab, g, u) == g
                })
            });
            let Some(unit) = unit else { return Ok(()) };
            let scalar_set: std::collections::HashSet<u64> =
                (0..ring.order as u32).map(|r| p.scalar(r, unit)).collect();
            let mut central = Vec::new();
            for x in 0..p.order() {
                let commutes = (0..k).all(|c| {
                    mul_elem_gen(tab, x, c).expect("table is complete")
                        == mul_gen_elem(tab, c, x).expect("table is complete")
                });
                if commutes {
                    central.push(x);
                    if central.len() > scalar_set.len() {
                        return Ok(());
                    }
                }
            }
            if central.len() != scalar_set.len()
                || central.iter().any(|x| !scalar_set.contains(x))
            {
                return Ok(());
            }
            let mul_gens: Vec<Vec<u64>> = (0..k)
                .map(|i| (0..k).map(|j| tab[i * k + j].expect("table is complete")).collect())
                .collect();
            let descriptor = format!(
                "{}-algebra #{} on invariants {:?}",
                ring.descriptor,
                *seq,
                p.additive_invariants()
            );
            *seq += 1;
            out.push(StructuredAlgebra::new(p.clone(), mul_gens, unit, descriptor, None)?);
            return Ok(());
        }
        let (i, j) = stack[depth];
        for &v in &candidates[i * k + j] {
            *nodes += 1;
            if *nodes > config.enumeration_node_budget {
                return Err(Error::Budget {
                    stage: "algebra structure enumeration",
                    limit: config.enumeration_node_budget,
                });
            }
            tab[i * k + j] = Some(v);
            let mut ok = true;
            'triples: for a in 0..k {
                for b in 0..k {
                    for c in 0..k {
                        if triple_ok(tab, a, b, c) == Some(false) {
                            ok = false;
                            break 'triples;
                        }
                    }
                }
            }
            if ok {
                dfs(
                    p, ring, depth + 1, stack, candidates, tab, k, mul_elem_gen, mul_gen_elem,
                    triple_ok, full_mul, seq, out, nodes, config,
                )?;
            }
        }
        tab[i * k + j] = None;
        Ok(())
    }
    dfs(
        p, ring, 0, &stack, &candidates, &mut tab, k, &mul_elem_gen, &mul_gen_elem, &triple_ok,
        &full_mul, seq, out, nodes, config,
    )?;
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{algebra_from_extension, algebra_tensor, matrix_algebra, regular_algebra};
    use crate::module::direct_sum;
    use crate::ring::{local_decomposition, parse_ring, RingMap};

    fn cfg() -> Config {
        Config::default()
    }

    #[test]
    fn sandwich_regular_is_bijective() {
        for spec in ["Z/6", "Z/4"] {
            let r = parse_ring(spec, &cfg()).unwrap();
            let dec = local_decomposition(&r).unwrap();
            let a = regular_algebra(&r, &cfg()).unwrap();
            let s = sandwich_map(&a, &cfg()).unwrap();
            assert!(matches!(s, SandwichMap::Free { rank: 1, .. }));
            assert!(s.bijective(&dec));
        }
    }

    #[test]
    fn sandwich_matrix_algebra_bijective() {
        let r = parse_ring("GF(2)", &cfg()).unwrap();
        let dec = local_decomposition(&r).unwrap();
        let a = matrix_algebra(&r, 2, &cfg()).unwrap();
        let s = sandwich_map(&a, &cfg()).unwrap();
        assert!(s.bijective(&dec));
    }

    #[test]
    fn sandwich_field_extension_not_bijective() {
        // GF(4) (x) GF(4) over GF(2) has order 16 but its image in the
        // endomorphisms is the multiplication operators, of order 4
        let f2 = parse_ring("GF(2)", &cfg()).unwrap();
        let g4 = parse_ring("GF(4)", &cfg()).unwrap();
        let dec = local_decomposition(&f2).unwrap();
        let f = RingMap::new(f2.clone(), g4.clone(), vec![g4.zero, g4.one]).unwrap();
        let a = algebra_from_extension(&f).unwrap();
        let s = sandwich_map(&a, &cfg()).unwrap();
        assert!(!s.bijective(&dec));
        match &s {
            SandwichMap::Concrete { map } => {
                assert_eq!(map.src.order(), 16);
                assert_eq!(map.kernel_elements().len(), 4);
            }
            SandwichMap::Free { .. } => panic!("extension algebra is not free of rank 1"),
        }
    }

    #[test]
    fn azumaya_matrix_algebras() {
        for spec in ["Z/4", "Z/9"] {
            let r = parse_ring(spec, &cfg()).unwrap();
            let dec = local_decomposition(&r).unwrap();
            let a = matrix_algebra(&r, 2, &cfg()).unwrap();
            let cert = is_azumaya(&a, &dec, &cfg()).unwrap();
            assert!(cert.azumaya, "{} failed: {:?}", spec, cert.failed_stage);
            assert_eq!(cert.ranks, vec![4]);
        }
    }

    #[test]
    fn azumaya_trivial_class_and_rejection() {
        let r = parse_ring("Z/4", &cfg()).unwrap();
        let dec = local_decomposition(&r).unwrap();
        let a = regular_algebra(&r, &cfg()).unwrap();
        assert!(is_azumaya(&a, &dec, &cfg()).unwrap().azumaya);
        // Z/2 as a Z/4-algebra is not projective
        let m = FGModule::new(
            r.clone(),
            vec![2],
            (0..4u64).map(|s| vec![vec![(s % 2) as u32]]).collect(),
        )
        .unwrap();
        let one = m.gen_elem(0);
        let alg = StructuredAlgebra::new(m, vec![vec![one]], one, "Z/2 over Z/4".into(), None)
            .unwrap();
        let cert = is_azumaya(&alg, &dec, &cfg()).unwrap();
        assert!(!cert.azumaya);
        assert_eq!(cert.failed_stage, Some("projectivity"));
    }

    #[test]
    fn regular_bimodule_is_invertible() {
        let r = parse_ring("GF(2)", &cfg()).unwrap();
        let a = matrix_algebra(&r, 2, &cfg()).unwrap();
        let bm = Bimodule::regular(&a).unwrap();
        let rep = bimodule_invertible(&bm, &cfg()).unwrap();
        assert!(rep.invertible);
        let w = rep.witness.unwrap();
        assert_eq!(w.inverse.module.order(), 16);
        assert!(w.left_collapse.is_bijective());

        let z6 = parse_ring("Z/6", &cfg()).unwrap();
        let a6 = regular_algebra(&z6, &cfg()).unwrap();
        let rep6 = bimodule_invertible(&Bimodule::regular(&a6).unwrap(), &cfg()).unwrap();
        assert!(rep6.invertible);
    }

    fn column_bimodule() -> (Bimodule, Config) {
        let config = cfg();
        let f3 = parse_ring("GF(3)", &config).unwrap();
        let a = matrix_algebra(&f3, 2, &config).unwrap();
        let b = regular_algebra(&f3, &config).unwrap();
        let col = FreeModule::new(&f3, 2, &config).unwrap();
        // E_pq e_r = [q == r] e_p
        let left_gens: Vec<Vec<u64>> = (0..4)
            .map(|pos| {
                let (pr, q) = (pos / 2, pos % 2);
                (0..2)
                    .map(|r| if q == r { col.module.gen_elem(pr) } else { 0 })
                    .collect()
            })
            .collect();
        let right_gens: Vec<Vec<u64>> =
            (0..2).map(|r| vec![col.module.gen_elem(r)]).collect();
        let bm = Bimodule::new(a, b, col.module.clone(), left_gens, right_gens).unwrap();
        (bm, config)
    }

    #[test]
    fn column_bimodule_is_invertible() {
        let (bm, config) = column_bimodule();
        let rep = bimodule_invertible(&bm, &config).unwrap();
        assert!(rep.invertible, "failed at {:?}", rep.failed_stage);
        let w = rep.witness.unwrap();
        assert_eq!(w.inverse.module.order(), 9);
    }

    #[test]
    fn balanced_tensor_reassociates() {
        let (bm, config) = column_bimodule();
        let inv = bimodule_invertible(&bm, &config).unwrap().witness.unwrap().inverse;
        let mn = balanced_tensor(&bm, &inv, &config).unwrap();
        let nm = balanced_tensor(&inv, &bm, &config).unwrap();
        let left = balanced_tensor(&mn.bimodule, &bm, &config).unwrap();
        let right = balanced_tensor(&bm, &nm.bimodule, &config).unwrap();
        let iso = bimodule_isomorphic(&left.bimodule, &right.bimodule, &config).unwrap();
        assert!(iso.is_some());
        let back = bimodule_isomorphic(&left.bimodule, &bm, &config).unwrap();
        assert!(back.is_some());
    }

    #[test]
    fn doubled_module_is_not_invertible() {
        let config = cfg();
        let f2 = parse_ring("GF(2)", &config).unwrap();
        let a = matrix_algebra(&f2, 2, &config).unwrap();
        let ds = direct_sum(&a.module, &a.module, &config).unwrap();
        let k = a.module.ngens();
        let mut left_gens = vec![vec![0u64; 2 * k]; k];
        let mut right_gens = vec![vec![0u64; k]; 2 * k];
        for i in 0..k {
            let ga = a.module.gen_elem(i);
            for j in 0..2 * k {
                let g = a.module.gen_elem(j % k);
                let (l, r) = (a.mul(ga, g), a.mul(g, ga));
                left_gens[i][j] = if j < k { ds.pair(l, 0) } else { ds.pair(0, l) };
                right_gens[j][i] = if j < k { ds.pair(r, 0) } else { ds.pair(0, r) };
            }
        }
        let bm = Bimodule::new(a.clone(), a, ds.module.clone(), left_gens, right_gens).unwrap();
        let rep = bimodule_invertible(&bm, &config).unwrap();
        assert!(!rep.invertible);
        // 65536 left-linear endomorphisms against an algebra of order 16:
        // no isomorphism is possible by order count
        assert_eq!(rep.failed_stage, Some("endomorphism count"));
    }

    #[test]
    fn morita_witness_for_matrix_algebra() {
        let config = cfg();
        let f2 = parse_ring("GF(2)", &config).unwrap();
        let dec = local_decomposition(&f2).unwrap();
        let a = matrix_algebra(&f2, 2, &config).unwrap();
        let w = morita_trivialization(&a, &dec, 16, &config).unwrap().unwrap();
        assert_eq!(w.generator.order(), 4);
        assert_eq!(w.generator.additive_invariants(), vec![2, 2]);
        assert_eq!(w.end_order, 16);
    }

    #[test]
    fn morita_witness_for_the_ring_itself() {
        let config = cfg();
        let z6 = parse_ring("Z/6", &config).unwrap();
        let dec = local_decomposition(&z6).unwrap();
        let a = regular_algebra(&z6, &config).unwrap();
        let w = morita_trivialization(&a, &dec, 6, &config).unwrap().unwrap();
        assert_eq!(w.generator.order(), 6);
    }

    #[test]
    fn morita_witness_for_mixed_endomorphisms() {
        // End(Z2 + Z6) over Z/6 has order 48 and the construction is its own
        // witness: the search finds the order 12 generator back
        let config = cfg();
        let z6 = parse_ring("Z/6", &config).unwrap();
        let dec = local_decomposition(&z6).unwrap();
        let p = enumerate_modules(&z6, 12, &config)
            .unwrap()
            .into_iter()
            .find(|m| m.order() == 12)
            .unwrap();
        let end = end_algebra(&p, &config).unwrap();
        assert_eq!(end.algebra.order(), 48);
        let w = morita_trivialization(&end.algebra, &dec, 12, &config).unwrap().unwrap();
        assert_eq!(w.generator.order(), 12);
        let (end2, w2) = end_self_witness(&p, &dec, &config).unwrap();
        assert_eq!(end2.algebra.order(), 48);
        assert!(w2.iso.is_identity());
    }

    #[test]
    fn enumerate_azumaya_small_rings() {
        let config = cfg();
        for (spec, bound) in [("Z/4", 4u64), ("GF(3)", 3)] {
            let r = parse_ring(spec, &config).unwrap();
            let dec = local_decomposition(&r).unwrap();
            let e = enumerate_azumaya(&r, &dec, bound, &config).unwrap();
            assert!(e.complete, "{}: {:?}", spec, e.notes);
            assert_eq!(e.algebras.len(), 1, "{}", spec);
            assert_eq!(e.algebras[0].order(), r.order as u64);
        }
    }

    #[test]
    fn enumerate_azumaya_f2_finds_the_matrix_algebra() {
        let config = cfg();
        let f2 = parse_ring("GF(2)", &config).unwrap();
        let dec = local_decomposition(&f2).unwrap();
        let e = enumerate_azumaya(&f2, &dec, 16, &config).unwrap();
        assert!(e.complete, "{:?}", e.notes);
        let orders: Vec<u64> = e.algebras.iter().map(|a| a.order()).collect();
        assert_eq!(orders, vec![2, 16]);
        let m2 = matrix_algebra(&f2, 2, &config).unwrap();
        assert!(algebra_isomorphic(&e.algebras[1], &m2, &config).unwrap().is_some());
    }

    #[test]
    fn tensor_of_azumaya_is_azumaya() {
        let config = cfg();
        let f2 = parse_ring("GF(2)", &config).unwrap();
        let dec = local_decomposition(&f2).unwrap();
        let a = matrix_algebra(&f2, 2, &config).unwrap();
        let t = algebra_tensor(&a, &a, &config).unwrap();
        assert_eq!(t.order(), 65536);
        let cert = is_azumaya(&t, &dec, &config).unwrap();
        assert!(cert.azumaya);
        // the enveloping tensor with the opposite is the certified route
        // from [A] + [A^op] to the endomorphism class
        let env = algebra_tensor(&a, &a.opposite(), &config).unwrap();
        assert!(is_azumaya(&env, &dec, &config).unwrap().azumaya);
    }
}
