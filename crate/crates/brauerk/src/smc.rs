//! Finite symmetric monoidal groupoids as explicit tables, with exhaustive
//! coherence verification, the iso-class monoid, group-likeness, and an
//! equivalence decision procedure for functors between finite groupoids.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::abelian::AbGroup;
use crate::error::{Error, Result};

/// A symmetric monoidal groupoid with finitely many objects and morphisms,
/// every structure map tabulated. Objects are `0..objects`; morphisms are
/// global ids `0..mor_src.len()`. `compose[g][f]` is `g` after `f` and is
/// present exactly when `mor_tgt[f] == mor_src[g]`. Coherence cells are
/// stored explicitly even when they are identities, so strict and non-strict
/// examples share one code path.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiniteSymMonGroupoid {
    pub schema: String,
    pub objects: usize,
    pub mor_src: Vec<usize>,
    pub mor_tgt: Vec<usize>,
    pub identity: Vec<usize>,
    pub compose: Vec<Vec<Option<usize>>>,
    pub unit: usize,
    pub tensor_obj: Vec<Vec<usize>>,
    pub tensor_mor: Vec<Vec<usize>>,
    /// `associator[x][y][z]: (x □ y) □ z -> x □ (y □ z)`
    pub associator: Vec<Vec<Vec<usize>>>,
    /// `lunitor[x]: e □ x -> x`
    pub lunitor: Vec<usize>,
    /// `runitor[x]: x □ e -> x`
    pub runitor: Vec<usize>,
    /// `symmetry[x][y]: x □ y -> y □ x`
    pub symmetry: Vec<usize>,
}

pub const SCHEMA: &str = "v1";

impl FiniteSymMonGroupoid {
    pub fn nmor(&self) -> usize {
        self.mor_src.len()
    }

    pub fn hom(&self, a: usize, b: usize) -> Vec<usize> {
        (0..self.nmor()).filter(|&f| self.mor_src[f] == a && self.mor_tgt[f] == b).collect()
    }

    /// `g` after `f`, if composable.
    pub fn comp(&self, g: usize, f: usize) -> Option<usize> {
        self.compose[g][f]
    }

    pub fn tensor_m(&self, f: usize, g: usize) -> usize {
        self.tensor_mor[f][g]
    }

    pub fn sym(&self, x: usize, y: usize) -> usize {
        self.symmetry[x * self.objects + y]
    }

    pub fn inverse_of(&self, f: usize) -> Option<usize> {
        let (a, b) = (self.mor_src[f], self.mor_tgt[f]);
        self.hom(b, a).into_iter().find(|&g| {
            self.comp(g, f) == Some(self.identity[a]) && self.comp(f, g) == Some(self.identity[b])
        })
    }

    /// Iso-classes of objects: morphisms in a groupoid are invertible, so
    /// reachability along any morphism is symmetric already.
    pub fn object_classes(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.objects).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for f in 0..self.nmor() {
            let (a, b) = (find(&mut parent, self.mor_src[f]), find(&mut parent, self.mor_tgt[f]));
            if a != b {
                parent[a] = b;
            }
        }
        let mut label: HashMap<usize, usize> = HashMap::new();
        (0..self.objects)
            .map(|x| {
                let r = find(&mut parent, x);
                let next = label.len();
                *label.entry(r).or_insert(next)
            })
            .collect()
    }
}

/// Outcome of an exhaustive coherence run; `violations` names every failed
/// instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub violations: Vec<String>,
}

impl CoherenceReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn shape_violations(v: &FiniteSymMonGroupoid) -> Vec<String> {
    let (n, m) = (v.objects, v.nmor());
    let mut out = Vec::new();
    if v.mor_tgt.len() != m {
        out.push("morphism source and target lists differ in length".into());
    }
    if v.identity.len() != n {
        out.push("one identity per object required".into());
    }
    if v.compose.len() != m || v.compose.iter().any(|row| row.len() != m) {
        out.push("composition table must be square over morphisms".into());
    }
    if v.unit >= n {
        out.push("unit object out of range".into());
    }
    if v.tensor_obj.len() != n || v.tensor_obj.iter().any(|r| r.len() != n) {
        out.push("object tensor table must be square over objects".into());
    }
    if v.tensor_mor.len() != m || v.tensor_mor.iter().any(|r| r.len() != m) {
        out.push("morphism tensor table must be square over morphisms".into());
    }
    if v.associator.len() != n
        || v.associator.iter().any(|p| p.len() != n || p.iter().any(|q| q.len() != n))
    {
        out.push("associator must cover object triples".into());
    }
    if v.lunitor.len() != n || v.runitor.len() != n {
        out.push("one unitor pair per object required".into());
    }
    if v.symmetry.len() != n * n {
        out.push("symmetry must cover object pairs".into());
    }
    let mor_ok = |f: usize| f < m;
    if !v.mor_src.iter().chain(&v.mor_tgt).all(|&x| x < n)
        || !v.identity.iter().all(|&f| mor_ok(f))
        || !v.tensor_obj.iter().flatten().all(|&x| x < n)
        || !v.tensor_mor.iter().flatten().all(|&f| mor_ok(f))
        || !v.associator.iter().flatten().flatten().all(|&f| mor_ok(f))
        || !v.lunitor.iter().chain(&v.runitor).chain(&v.symmetry).all(|&f| mor_ok(f))
        || !v.compose.iter().flatten().flatten().all(|&f| mor_ok(f))
    {
        out.push("index out of range in a structure table".into());
    }
    out
}

/// Exhaustively verify the groupoid axioms, functoriality of the tensor,
/// typing and naturality of every coherence cell, the pentagon, triangle and
/// hexagon equations, symmetry involutivity, and unitor agreement on the
/// unit. Every violated instance is reported.
pub fn check_coherence(v: &FiniteSymMonGroupoid) -> CoherenceReport {
    let mut out = shape_violations(v);
    if !out.is_empty() {
        return CoherenceReport { violations: out };
    }
    let (n, m) = (v.objects, v.nmor());

    for x in 0..n {
        let i = v.identity[x];
        if v.mor_src[i] != x || v.mor_tgt[i] != x {
            out.push(format!("identity of object {x} is not an endomorphism"));
        }
    }
    for g in 0..m {
        for f in 0..m {
            let defined = v.compose[g][f].is_some();
            let composable = v.mor_tgt[f] == v.mor_src[g];
            if defined != composable {
                out.push(format!("composability mismatch at ({g}, {f})"));
            } else if let Some(h) = v.compose[g][f] {
                if v.mor_src[h] != v.mor_src[f] || v.mor_tgt[h] != v.mor_tgt[g] {
                    out.push(format!("composite ({g}, {f}) has wrong endpoints"));
                }
            }
        }
    }
    if !out.is_empty() {
        return CoherenceReport { violations: out };
    }
    for f in 0..m {
        if v.comp(f, v.identity[v.mor_src[f]]) != Some(f)
            || v.comp(v.identity[v.mor_tgt[f]], f) != Some(f)
        {
            out.push(format!("identity law fails at morphism {f}"));
        }
        if v.inverse_of(f).is_none() {
            out.push(format!("morphism {f} has no inverse"));
        }
    }
    for h in 0..m {
        for g in 0..m {
            let Some(hg) = v.comp(h, g) else { continue };
            for f in 0..m {
                let Some(gf) = v.comp(g, f) else { continue };
                if v.comp(hg, f) != v.comp(h, gf) {
                    out.push(format!("composition not associative at ({h}, {g}, {f})"));
                }
            }
        }
    }

    for f in 0..m {
        for g in 0..m {
            let t = v.tensor_m(f, g);
            let want_src = v.tensor_obj[v.mor_src[f]][v.mor_src[g]];
            let want_tgt = v.tensor_obj[v.mor_tgt[f]][v.mor_tgt[g]];
            if v.mor_src[t] != want_src || v.mor_tgt[t] != want_tgt {
                out.push(format!("tensor of morphisms ({f}, {g}) has wrong endpoints"));
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            if v.tensor_m(v.identity[x], v.identity[y]) != v.identity[v.tensor_obj[x][y]] {
                out.push(format!("tensor does not preserve identities at ({x}, {y})"));
            }
        }
    }
    for f2 in 0..m {
        for f1 in 0..m {
            let Some(fc) = v.comp(f2, f1) else { continue };
            for g2 in 0..m {
                for g1 in 0..m {
                    let Some(gc) = v.comp(g2, g1) else { continue };
                    if Some(v.tensor_m(fc, gc)) != v.comp(v.tensor_m(f2, g2), v.tensor_m(f1, g1)) {
                        out.push(format!(
                            "tensor interchange fails at ({f2}∘{f1}, {g2}∘{g1})"
                        ));
                    }
                }
            }
        }
    }

    let cell_typed = |f: usize, src: usize, tgt: usize| v.mor_src[f] == src && v.mor_tgt[f] == tgt;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let a = v.associator[x][y][z];
                let src = v.tensor_obj[v.tensor_obj[x][y]][z];
                let tgt = v.tensor_obj[x][v.tensor_obj[y][z]];
                if !cell_typed(a, src, tgt) {
                    out.push(format!("associator at ({x}, {y}, {z}) has wrong endpoints"));
                }
            }
            let s = v.sym(x, y);
            if !cell_typed(s, v.tensor_obj[x][y], v.tensor_obj[y][x]) {
                out.push(format!("symmetry at ({x}, {y}) has wrong endpoints"));
            }
        }
        if !cell_typed(v.lunitor[x], v.tensor_obj[v.unit][x], x) {
            out.push(format!("left unitor at {x} has wrong endpoints"));
        }
        if !cell_typed(v.runitor[x], v.tensor_obj[x][v.unit], x) {
            out.push(format!("right unitor at {x} has wrong endpoints"));
        }
    }
    if !out.is_empty() {
        return CoherenceReport { violations: out };
    }

    // naturality of each coherence family
    for f in 0..m {
        for g in 0..m {
            for h in 0..m {
                let (x, y, z) = (v.mor_src[f], v.mor_src[g], v.mor_src[h]);
                let (x2, y2, z2) = (v.mor_tgt[f], v.mor_tgt[g], v.mor_tgt[h]);
                let lhs = v.comp(v.associator[x2][y2][z2], v.tensor_m(v.tensor_m(f, g), h));
                let rhs = v.comp(v.tensor_m(f, v.tensor_m(g, h)), v.associator[x][y][z]);
                if lhs != rhs {
                    out.push(format!("associator not natural at ({f}, {g}, {h})"));
                }
            }
            let (x, y) = (v.mor_src[f], v.mor_src[g]);
            let (x2, y2) = (v.mor_tgt[f], v.mor_tgt[g]);
            let lhs = v.comp(v.sym(x2, y2), v.tensor_m(f, g));
            let rhs = v.comp(v.tensor_m(g, f), v.sym(x, y));
            if lhs != rhs {
                out.push(format!("symmetry not natural at ({f}, {g})"));
            }
        }
        let (x, x2) = (v.mor_src[f], v.mor_tgt[f]);
        let e = v.identity[v.unit];
        if v.comp(f, v.lunitor[x]) != v.comp(v.lunitor[x2], v.tensor_m(e, f)) {
            out.push(format!("left unitor not natural at {f}"));
        }
        if v.comp(f, v.runitor[x]) != v.comp(v.runitor[x2], v.tensor_m(f, e)) {
            out.push(format!("right unitor not natural at {f}"));
        }
    }

    // pentagon
    for w in 0..n {
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let wx = v.tensor_obj[w][x];
                    let yz = v.tensor_obj[y][z];
                    let lhs = v.comp(v.associator[w][x][yz], v.associator[wx][y][z]);
                    let rhs = v
                        .comp(v.associator[w][v.tensor_obj[x][y]][z], v.tensor_m(v.associator[w][x][y], v.identity[z]))
                        .and_then(|t| v.comp(v.tensor_m(v.identity[w], v.associator[x][y][z]), t));
                    if lhs != rhs {
                        out.push(format!("pentagon fails at ({w}, {x}, {y}, {z})"));
                    }
                }
            }
        }
    }
    // triangle
    for x in 0..n {
        for y in 0..n {
            let lhs = v.comp(v.tensor_m(v.identity[x], v.lunitor[y]), v.associator[x][v.unit][y]);
            let rhs = Some(v.tensor_m(v.runitor[x], v.identity[y]));
            if lhs != rhs {
                out.push(format!("triangle fails at ({x}, {y})"));
            }
        }
    }
    // hexagon and symmetry involution
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let yz = v.tensor_obj[y][z];
                let lhs =
                    v.comp(v.sym(x, yz), v.associator[x][y][z]).and_then(|t| v.comp(v.associator[y][z][x], t));
                let rhs = v
                    .comp(v.associator[y][x][z], v.tensor_m(v.sym(x, y), v.identity[z]))
                    .and_then(|t| v.comp(v.tensor_m(v.identity[y], v.sym(x, z)), t));
                if lhs != rhs {
                    out.push(format!("hexagon fails at ({x}, {y}, {z})"));
                }
            }
            if v.comp(v.sym(y, x), v.sym(x, y)) != Some(v.identity[v.tensor_obj[x][y]]) {
                out.push(format!("symmetry not involutive at ({x}, {y})"));
            }
        }
    }
    if v.lunitor[v.unit] != v.runitor[v.unit] {
        out.push("unitors disagree on the unit object".into());
    }
    CoherenceReport { violations: out }
}

/// The commutative monoid induced on iso-classes by the tensor.
#[derive(Debug, Clone)]
pub struct Pi0Monoid {
    pub class_of: Vec<usize>,
    pub reps: Vec<usize>,
    pub table: Vec<Vec<usize>>,
    pub unit_class: usize,
}

impl Pi0Monoid {
    pub fn size(&self) -> usize {
        self.reps.len()
    }

    pub fn is_group(&self) -> bool {
        (0..self.size()).all(|c| (0..self.size()).any(|d| self.table[c][d] == self.unit_class))
    }

    /// Materialize as an abelian group; requires group-likeness.
    pub fn as_group(&self) -> Result<AbGroup> {
        let k = self.size();
        if !self.is_group() {
            return Err(Error::Validation("iso-class monoid is not a group".into()));
        }
        for a in 0..k {
            for b in 0..k {
                if self.table[a][b] != self.table[b][a] {
                    return Err(Error::Validation("iso-class monoid is not commutative".into()));
                }
            }
        }
        let mut op = vec![0u32; k * k];
        for a in 0..k {
            for b in 0..k {
                op[a * k + b] = self.table[a][b] as u32;
            }
        }
        Ok(AbGroup::from_table(k, op, self.unit_class as u32))
    }
}

/// Iso-classes under the tensor. The induced product is verified to be
/// constant on classes rather than assumed.
pub fn pi0_monoid(v: &FiniteSymMonGroupoid) -> Result<Pi0Monoid> {
    let class_of = v.object_classes();
    let nclasses = class_of.iter().max().map_or(0, |&c| c + 1);
    let mut reps = vec![usize::MAX; nclasses];
    for x in 0..v.objects {
        if reps[class_of[x]] == usize::MAX {
            reps[class_of[x]] = x;
        }
    }
    let mut table = vec![vec![usize::MAX; nclasses]; nclasses];
    for x in 0..v.objects {
        for y in 0..v.objects {
            let (cx, cy) = (class_of[x], class_of[y]);
            let c = class_of[v.tensor_obj[x][y]];
            if table[cx][cy] == usize::MAX {
                table[cx][cy] = c;
            } else if table[cx][cy] != c {
                return Err(Error::Validation(
                    "tensor is not constant on iso-classes".into(),
                ));
            }
        }
    }
    Ok(Pi0Monoid { class_of: class_of.clone(), reps, table, unit_class: class_of[v.unit] })
}

/// Whether every iso-class has a tensor inverse.
pub fn is_group_like(v: &FiniteSymMonGroupoid) -> Result<bool> {
    Ok(pi0_monoid(v)?.is_group())
}

/// The discrete symmetric monoidal groupoid of a finite abelian group: one
/// object per element, identity morphisms only, tensor given by the group
/// law, every coherence cell an identity.
pub fn from_abelian_group(a: &AbGroup) -> FiniteSymMonGroupoid {
    let n = a.order;
    let identity: Vec<usize> = (0..n).collect();
    let tensor_obj: Vec<Vec<usize>> =
        (0..n).map(|x| (0..n).map(|y| a.add(x as u32, y as u32) as usize).collect()).collect();
    let compose: Vec<Vec<Option<usize>>> =
        (0..n).map(|g| (0..n).map(|f| if g == f { Some(f) } else { None }).collect()).collect();
    let tensor_mor: Vec<Vec<usize>> = tensor_obj.clone();
    let associator: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| (0..n).map(|z| tensor_obj[tensor_obj[x][y]][z]).collect())
                .collect()
        })
        .collect();
    // every cell is the identity of its source object, which for the
    // symmetry of x and y is x □ y
    let mut symmetry = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            symmetry.push(tensor_obj[x][y]);
        }
    }
    FiniteSymMonGroupoid {
        schema: SCHEMA.into(),
        objects: n,
        mor_src: (0..n).collect(),
        mor_tgt: (0..n).collect(),
        identity,
        compose,
        unit: a.zero as usize,
        tensor_obj: tensor_obj.clone(),
        tensor_mor,
        associator,
        lunitor: (0..n).map(|x| tensor_obj[a.zero as usize][x]).collect(),
        runitor: (0..n).map(|x| tensor_obj[x][a.zero as usize]).collect(),
        symmetry,
    }
}

/// A skeletal groupoid with prescribed component group `pi0` and automorphism
/// group `pi1`: one object per element of `pi0`, `hom(x, x) ≅ pi1`, no
/// morphisms between distinct objects, tensor acting by the group laws, all
/// coherence cells identities. Supplies nontrivial-`pi0` inputs that finite
/// commutative rings cannot.
pub fn synthetic_picard(pi0: &AbGroup, pi1: &AbGroup) -> FiniteSymMonGroupoid {
    let n = pi0.order;
    let h = pi1.order;
    let m = n * h;
    let mid = |x: usize, u: usize| x * h + u;
    let mor_src: Vec<usize> = (0..m).map(|i| i / h).collect();
    let identity: Vec<usize> = (0..n).map(|x| mid(x, pi1.zero as usize)).collect();
    let mut compose = vec![vec![None; m]; m];
    for x in 0..n {
        for u in 0..h {
            for w in 0..h {
                compose[mid(x, u)][mid(x, w)] = Some(mid(x, pi1.add(u as u32, w as u32) as usize));
            }
        }
    }
    let tensor_obj: Vec<Vec<usize>> =
        (0..n).map(|x| (0..n).map(|y| pi0.add(x as u32, y as u32) as usize).collect()).collect();
    let mut tensor_mor = vec![vec![0usize; m]; m];
    for f in 0..m {
        for g in 0..m {
            let obj = tensor_obj[f / h][g / h];
            tensor_mor[f][g] = mid(obj, pi1.add((f % h) as u32, (g % h) as u32) as usize);
        }
    }
    let associator: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| {
                    (0..n).map(|z| identity[tensor_obj[tensor_obj[x][y]][z]]).collect()
                })
                .collect()
        })
        .collect();
    let mut symmetry = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            symmetry.push(identity[tensor_obj[x][y]]);
        }
    }
    FiniteSymMonGroupoid {
        schema: SCHEMA.into(),
        objects: n,
        mor_src: mor_src.clone(),
        mor_tgt: mor_src,
        identity: identity.clone(),
        compose,
        unit: pi0.zero as usize,
        tensor_obj: tensor_obj.clone(),
        tensor_mor,
        associator,
        lunitor: (0..n).map(|x| identity[tensor_obj[pi0.zero as usize][x]]).collect(),
        runitor: (0..n).map(|x| identity[tensor_obj[x][pi0.zero as usize]]).collect(),
        symmetry,
    }
}

/// A functor between finite groupoids, presented through hom-set enumerators
/// so that large lazily-materialized groupoids can reuse the same decision
/// procedure. `src_class`/`tgt_class` assign each object its iso-class;
/// morphisms are opaque labels unique within their hom-set.
pub struct FunctorView<'a> {
    pub src_class: Vec<usize>,
    pub tgt_class: Vec<usize>,
    pub hom_src: &'a dyn Fn(usize, usize) -> Vec<u64>,
    pub hom_tgt: &'a dyn Fn(usize, usize) -> Vec<u64>,
    pub map_obj: &'a dyn Fn(usize) -> usize,
    pub map_mor: &'a dyn Fn(usize, usize, u64) -> u64,
}

/// Decide whether the functor is an equivalence: essentially surjective and
/// fully faithful. Hom-set bijectivity transfers along composition with
/// isomorphisms on either side, so checking one representative pair per pair
/// of iso-classes decides every pair.
pub fn groupoid_equivalence(view: &FunctorView) -> bool {
    let nsrc = view.src_class.iter().max().map_or(0, |&c| c + 1);
    let ntgt = view.tgt_class.iter().max().map_or(0, |&c| c + 1);
    let mut src_reps = vec![usize::MAX; nsrc];
    for (x, &c) in view.src_class.iter().enumerate() {
        if src_reps[c] == usize::MAX {
            src_reps[c] = x;
        }
    }
    let mut covered = vec![false; ntgt];
    for &r in &src_reps {
        let img = (view.map_obj)(r);
        covered[view.tgt_class[img]] = true;
    }
    if covered.iter().any(|&c| !c) {
        return false;
    }
    for &a in &src_reps {
        for &b in &src_reps {
            let hs = (view.hom_src)(a, b);
            let (fa, fb) = ((view.map_obj)(a), (view.map_obj)(b));
            let ht: HashSet<u64> = (view.hom_tgt)(fa, fb).into_iter().collect();
            let mut seen = HashSet::new();
            for &l in &hs {
                let img = (view.map_mor)(a, b, l);
                if !ht.contains(&img) || !seen.insert(img) {
                    return false;
                }
            }
            if seen.len() != ht.len() {
                return false;
            }
        }
    }
    true
}

/// Hom-set enumerator for a tabulated groupoid, for plugging into
/// [`FunctorView`]. Labels are global morphism ids.
pub fn table_hom(v: &FiniteSymMonGroupoid, a: usize, b: usize) -> Vec<u64> {
    v.hom(a, b).into_iter().map(|f| f as u64).collect()
}

/// An op-lax symmetric monoidal functor with strict unit between tabulated
/// groupoids: object and morphism maps plus the structure cells
/// `structure[x][y]: F(x □ y) -> F(x) □ F(y)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonoidalFunctorData {
    pub obj_map: Vec<usize>,
    pub mor_map: Vec<usize>,
    pub structure: Vec<Vec<usize>>,
}

/// Exhaustively verify functor laws, strict unitality, naturality of the
/// structure cells, and their compatibility with associators, unitors, and
/// symmetries.
pub fn check_monoidal_functor(
    src: &FiniteSymMonGroupoid,
    tgt: &FiniteSymMonGroupoid,
    data: &MonoidalFunctorData,
) -> CoherenceReport {
    let mut out = Vec::new();
    let (n, m) = (src.objects, src.nmor());
    if data.obj_map.len() != n
        || data.mor_map.len() != m
        || data.structure.len() != n
        || data.structure.iter().any(|r| r.len() != n)
        || data.obj_map.iter().any(|&x| x >= tgt.objects)
        || data.mor_map.iter().any(|&f| f >= tgt.nmor())
        || data.structure.iter().flatten().any(|&f| f >= tgt.nmor())
    {
        return CoherenceReport { violations: vec!["functor tables malformed".into()] };
    }
    let fo = |x: usize| data.obj_map[x];
    let fm = |f: usize| data.mor_map[f];
    for f in 0..m {
        if tgt.mor_src[fm(f)] != fo(src.mor_src[f]) || tgt.mor_tgt[fm(f)] != fo(src.mor_tgt[f]) {
            out.push(format!("image of morphism {f} has wrong endpoints"));
        }
    }
    for x in 0..n {
        if fm(src.identity[x]) != tgt.identity[fo(x)] {
            out.push(format!("identity of {x} not preserved"));
        }
    }
    for g in 0..m {
        for f in 0..m {
            if let Some(gf) = src.comp(g, f) {
                if tgt.comp(fm(g), fm(f)) != Some(fm(gf)) {
                    out.push(format!("composition not preserved at ({g}, {f})"));
                }
            }
        }
    }
    if fo(src.unit) != tgt.unit {
        out.push("unit object not strictly preserved".into());
    }
    if !out.is_empty() {
        return CoherenceReport { violations: out };
    }
    let phi = |x: usize, y: usize| data.structure[x][y];
    for x in 0..n {
        for y in 0..n {
            let c = phi(x, y);
            if tgt.mor_src[c] != fo(src.tensor_obj[x][y])
                || tgt.mor_tgt[c] != tgt.tensor_obj[fo(x)][fo(y)]
            {
                out.push(format!("structure cell at ({x}, {y}) has wrong endpoints"));
            }
        }
    }
    if !out.is_empty() {
        return CoherenceReport { violations: out };
    }
    for f in 0..m {
        for g in 0..m {
            let (x, y) = (src.mor_src[f], src.mor_src[g]);
            let (x2, y2) = (src.mor_tgt[f], src.mor_tgt[g]);
            let lhs = tgt.comp(tgt.tensor_m(fm(f), fm(g)), phi(x, y));
            let rhs = tgt.comp(phi(x2, y2), fm(src.tensor_m(f, g)));
            if lhs != rhs {
                out.push(format!("structure cells not natural at ({f}, {g})"));
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let xy = src.tensor_obj[x][y];
                let yz = src.tensor_obj[y][z];
                let lhs = tgt
                    .comp(phi(x, yz), fm(src.associator[x][y][z]))
                    .and_then(|t| tgt.comp(tgt.tensor_m(tgt.identity[fo(x)], phi(y, z)), t));
                let rhs = tgt
                    .comp(tgt.tensor_m(phi(x, y), tgt.identity[fo(z)]), phi(xy, z))
                    .and_then(|t| tgt.comp(tgt.associator[fo(x)][fo(y)][fo(z)], t));
                if lhs != rhs {
                    out.push(format!("associator compatibility fails at ({x}, {y}, {z})"));
                }
            }
            let lhs = tgt.comp(phi(y, x), fm(src.sym(x, y)));
            let rhs = tgt.comp(tgt.sym(fo(x), fo(y)), phi(x, y));
            if lhs != rhs {
                out.push(format!("symmetry compatibility fails at ({x}, {y})"));
            }
        }
        let lhs = tgt.comp(tgt.lunitor[fo(x)], phi(src.unit, x));
        if lhs != Some(fm(src.lunitor[x])) {
            out.push(format!("left unitor compatibility fails at {x}"));
        }
        let rhs = tgt.comp(tgt.runitor[fo(x)], phi(x, src.unit));
        if rhs != Some(fm(src.runitor[x])) {
            out.push(format!("right unitor compatibility fails at {x}"));
        }
    }
    CoherenceReport { violations: out }
}

/// The strict monoidal functor induced by a homomorphism of abelian groups
/// between their discrete groupoids. `hom[x]` is the image element.
pub fn strict_hom_functor(
    src: &FiniteSymMonGroupoid,
    tgt: &FiniteSymMonGroupoid,
    hom: &[usize],
) -> MonoidalFunctorData {
    let structure =
        (0..src.objects).map(|x| (0..src.objects).map(|y| tgt.identity[hom[src.tensor_obj[x][y]]]).collect()).collect();
    MonoidalFunctorData {
        obj_map: hom.to_vec(),
        mor_map: hom.to_vec(),
        structure,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::AbGroup;

    #[test]
    fn discrete_group_groupoid_is_coherent() {
        let a = AbGroup::from_cyclic_orders(&[3]);
        let v = from_abelian_group(&a);
        let report = check_coherence(&v);
        assert!(report.ok(), "{:?}", report.violations);
        let p = pi0_monoid(&v).unwrap();
        assert_eq!(p.size(), 3);
        assert!(p.is_group());
        assert_eq!(p.as_group().unwrap().invariant_factors(), vec![3]);
    }

    #[test]
    fn discrete_z2_has_expected_tables() {
        let v = from_abelian_group(&AbGroup::from_cyclic_orders(&[2]));
        assert_eq!(v.objects, 2);
        assert_eq!(v.tensor_obj, vec![vec![0, 1], vec![1, 0]]);
        assert!(check_coherence(&v).ok());
    }

    #[test]
    fn trivial_group_gives_terminal_groupoid() {
        let v = from_abelian_group(&AbGroup::trivial());
        assert_eq!(v.objects, 1);
        assert_eq!(v.nmor(), 1);
        assert!(check_coherence(&v).ok());
        assert!(is_group_like(&v).unwrap());
    }

    #[test]
    fn synthetic_groupoid_is_coherent_and_group_like() {
        let p0 = AbGroup::from_cyclic_orders(&[2]);
        let p1 = AbGroup::from_cyclic_orders(&[2]);
        let v = synthetic_picard(&p0, &p1);
        assert_eq!(v.objects, 2);
        assert_eq!(v.nmor(), 4);
        assert_eq!(v.hom(0, 0).len(), 2);
        assert!(v.hom(0, 1).is_empty());
        let report = check_coherence(&v);
        assert!(report.ok(), "{:?}", report.violations);
        let p = pi0_monoid(&v).unwrap();
        assert!(p.is_group());
        assert_eq!(p.as_group().unwrap().invariant_factors(), vec![2]);
    }

    #[test]
    fn synthetic_degenerate_cases_match_discrete() {
        let z3 = AbGroup::from_cyclic_orders(&[3]);
        let v = synthetic_picard(&z3, &AbGroup::trivial());
        let w = from_abelian_group(&z3);
        assert_eq!(v.objects, w.objects);
        assert_eq!(v.nmor(), w.nmor());
        assert_eq!(v.tensor_obj, w.tensor_obj);
        let u = synthetic_picard(&AbGroup::trivial(), &z3);
        assert_eq!(u.objects, 1);
        assert_eq!(u.hom(0, 0).len(), 3);
        assert!(check_coherence(&u).ok());
    }

    #[test]
    fn corrupted_pentagon_is_reported_with_instance() {
        let a = AbGroup::from_cyclic_orders(&[2]);
        let p1 = AbGroup::from_cyclic_orders(&[3]);
        let mut v = synthetic_picard(&a, &p1);
        // replace one associator cell by an order-3 automorphism; the two
        // pentagon legs at (1, 1, 1, 1) then differ by its square
        let obj = v.tensor_obj[v.tensor_obj[1][1]][1];
        v.associator[1][1][1] = obj * 3 + 1;
        let report = check_coherence(&v);
        assert!(!report.ok());
        assert!(
            report.violations.iter().any(|s| s.contains("pentagon") && s.contains("(1, 1, 1, 1)")),
            "{:?}",
            report.violations
        );
    }

    #[test]
    fn sign_symmetry_is_coherent() {
        // flipping s(1, 1) to the nontrivial automorphism gives the groupoid
        // of graded lines: still a valid symmetric monoidal structure
        let a = AbGroup::from_cyclic_orders(&[2]);
        let p1 = AbGroup::from_cyclic_orders(&[2]);
        let mut v = synthetic_picard(&a, &p1);
        let obj = v.tensor_obj[1][1];
        v.symmetry[1 * v.objects + 1] = obj * 2 + 1;
        let report = check_coherence(&v);
        assert!(report.ok(), "{:?}", report.violations);
    }

    #[test]
    fn one_sided_symmetry_corruption_is_reported() {
        let a = AbGroup::from_cyclic_orders(&[2]);
        let p1 = AbGroup::from_cyclic_orders(&[2]);
        let mut v = synthetic_picard(&a, &p1);
        let obj = v.tensor_obj[0][1];
        v.symmetry[1] = obj * 2 + 1;
        let report = check_coherence(&v);
        assert!(!report.ok());
        assert!(
            report.violations.iter().any(|s| s.contains("involutive") && s.contains("(0, 1)")),
            "{:?}",
            report.violations
        );
    }

    #[test]
    fn free_monoid_truncation_is_not_group_like() {
        // objects 0..4 with saturating tensor: no inverse for the generator
        let n = 4usize;
        let sat = |x: usize, y: usize| (x + y).min(n - 1);
        let tensor_obj: Vec<Vec<usize>> = (0..n).map(|x| (0..n).map(|y| sat(x, y)).collect()).collect();
        let v = FiniteSymMonGroupoid {
            schema: SCHEMA.into(),
            objects: n,
            mor_src: (0..n).collect(),
            mor_tgt: (0..n).collect(),
            identity: (0..n).collect(),
            compose: (0..n)
                .map(|g| (0..n).map(|f| if g == f { Some(f) } else { None }).collect())
                .collect(),
            unit: 0,
            tensor_obj: tensor_obj.clone(),
            tensor_mor: tensor_obj.clone(),
            associator: (0..n)
                .map(|x| (0..n).map(|y| (0..n).map(|z| sat(sat(x, y), z)).collect()).collect())
                .collect(),
            lunitor: (0..n).collect(),
            runitor: (0..n).collect(),
            symmetry: (0..n).flat_map(|x| (0..n).map(move |y| sat(x, y))).collect(),
        };
        let p = pi0_monoid(&v).unwrap();
        assert!(!p.is_group());
        assert!(!is_group_like(&v).unwrap());
    }

    #[test]
    fn identity_functor_is_equivalence() {
        let v = synthetic_picard(&AbGroup::from_cyclic_orders(&[2]), &AbGroup::from_cyclic_orders(&[3]));
        let classes = v.object_classes();
        let hom = |a: usize, b: usize| table_hom(&v, a, b);
        let view = FunctorView {
            src_class: classes.clone(),
            tgt_class: classes,
            hom_src: &hom,
            hom_tgt: &hom,
            map_obj: &|x| x,
            map_mor: &|_, _, l| l,
        };
        assert!(groupoid_equivalence(&view));
    }

    #[test]
    fn skeleton_inclusion_is_equivalence_and_constant_functor_is_not() {
        // the contractible groupoid on two objects, plus a disjoint object:
        // morphisms between 0 and 1 in both directions, identities everywhere
        // morphisms: 0:id0, 1:id1, 2:id2, 3: 0->1, 4: 1->0
        let mor_src = vec![0, 1, 2, 0, 1];
        let mor_tgt = vec![0, 1, 2, 1, 0];
        let mut compose = vec![vec![None; 5]; 5];
        let table = [
            (0, 0, 0),
            (1, 1, 1),
            (2, 2, 2),
            (3, 0, 3),
            (1, 3, 3),
            (4, 1, 4),
            (0, 4, 4),
            (4, 3, 0),
            (3, 4, 1),
        ];
        for (g, f, h) in table {
            compose[g][f] = Some(h);
        }
        let hom_all = move |a: usize, b: usize| -> Vec<u64> {
            (0..5).filter(|&f| mor_src[f] == a && mor_tgt[f] == b).map(|f| f as u64).collect()
        };
        let classes = vec![0, 0, 1];
        // skeleton {0, 2} includes as an equivalence
        let view = FunctorView {
            src_class: vec![0, 1],
            tgt_class: classes.clone(),
            hom_src: &|a, b| {
                let amb = [0usize, 2][a];
                let bmb = [0usize, 2][b];
                hom_all(amb, bmb)
            },
            hom_tgt: &hom_all,
            map_obj: &|x| [0, 2][x],
            map_mor: &|_, _, l| l,
        };
        assert!(groupoid_equivalence(&view));
        // the constant functor to object 0 misses the class of 2
        let id_hom = |a: usize, b: usize| -> Vec<u64> { if a == b { vec![a as u64] } else { vec![] } };
        let const_view = FunctorView {
            src_class: vec![0, 1],
            tgt_class: classes,
            hom_src: &id_hom,
            hom_tgt: &hom_all,
            map_obj: &|_| 0,
            map_mor: &|a, _, _| a as u64,
        };
        assert!(!groupoid_equivalence(&const_view));
    }

    #[test]
    fn equivalence_verdict_survives_composition_with_equivalences() {
        // relabeling the source of an equivalence by an isomorphism of
        // groupoids must not change the verdict
        let v = synthetic_picard(&AbGroup::from_cyclic_orders(&[3]), &AbGroup::from_cyclic_orders(&[2]));
        let classes = v.object_classes();
        let perm = [2usize, 0, 1];
        let hom = |a: usize, b: usize| table_hom(&v, a, b);
        let permuted_hom = |a: usize, b: usize| table_hom(&v, perm[a], perm[b]);
        let view = FunctorView {
            src_class: (0..3).map(|x| classes[perm[x]]).collect(),
            tgt_class: classes,
            hom_src: &permuted_hom,
            hom_tgt: &hom,
            map_obj: &|x| perm[x],
            map_mor: &|_, _, l| l,
        };
        assert!(groupoid_equivalence(&view));
    }

    #[test]
    fn strict_hom_functor_checks_out() {
        let z4 = AbGroup::from_cyclic_orders(&[4]);
        let z2 = AbGroup::from_cyclic_orders(&[2]);
        let src = from_abelian_group(&z4);
        let tgt = from_abelian_group(&z2);
        let data = strict_hom_functor(&src, &tgt, &[0, 1, 0, 1]);
        let report = check_monoidal_functor(&src, &tgt, &data);
        assert!(report.ok(), "{:?}", report.violations);
        // a non-homomorphism must fail
        let bad = strict_hom_functor(&src, &tgt, &[0, 1, 1, 1]);
        assert!(!check_monoidal_functor(&src, &tgt, &bad).ok());
    }

    #[test]
    fn groupoid_json_roundtrip() {
        let v = synthetic_picard(&AbGroup::from_cyclic_orders(&[2]), &AbGroup::from_cyclic_orders(&[2]));
        let s = serde_json::to_string(&v).unwrap();
        let w: FiniteSymMonGroupoid = serde_json::from_str(&s).unwrap();
        assert_eq!(w.schema, SCHEMA);
        assert_eq!(w.objects, v.objects);
        assert_eq!(w.tensor_mor, v.tensor_mor);
        assert!(check_coherence(&w).ok());
    }
}
