//! Simplicial sets truncated at dimension three: explicit cell tables with
//! face and degeneracy data, validation of the simplicial identities,
//! connected components, and the abelianized edge-path group of the
//! 2-skeleton.

use std::collections::HashSet;

use crate::abelian::{smith_invariants, FpAbGroup, SmithResult};
use crate::config::shuffled_indices;
use crate::error::{Error, Result};

/// Cells up to dimension three. An edge stores its vertex faces as
/// `[d0, d1]` (target, source); a triangle stores edge ids `[d0, d1, d2]`;
/// a tetrahedron stores triangle ids `[d0, d1, d2, d3]`. Tetrahedra are
/// `None` when the 3-cells were deliberately not materialized; everything
/// at or below dimension two is always present. Degeneracies into
/// dimensions one and two are tabulated so the identities they satisfy can
/// be validated.
#[derive(Debug, Clone)]
pub struct TruncatedSimplicialSet {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub tetrahedra: Option<Vec<[usize; 4]>>,
    /// `s0` of each vertex, as an edge id.
    pub vertex_degeneracy: Vec<usize>,
    /// `[s0, s1]` of each edge, as triangle ids.
    pub edge_degeneracies: Vec<[usize; 2]>,
}

impl TruncatedSimplicialSet {
    pub fn edge_src(&self, e: usize) -> usize {
        self.edges[e][1]
    }

    pub fn edge_tgt(&self, e: usize) -> usize {
        self.edges[e][0]
    }

    /// Check every simplicial identity expressible in the stored range:
    /// face-face identities for triangles and tetrahedra, and the face
    /// behavior of the stored degeneracies.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Validation(msg));
        for (e, f) in self.edges.iter().enumerate() {
            if f[0] >= self.vertices || f[1] >= self.vertices {
                return fail(format!("edge {e} has an out-of-range vertex"));
            }
        }
        for (t, f) in self.triangles.iter().enumerate() {
            if f.iter().any(|&e| e >= self.edges.len()) {
                return fail(format!("triangle {t} has an out-of-range edge"));
            }
            let [e0, e1, e2] = *f;
            if self.edge_tgt(e1) != self.edge_tgt(e0)
                || self.edge_src(e2) != self.edge_src(e1)
                || self.edge_tgt(e2) != self.edge_src(e0)
            {
                return fail(format!("triangle {t} violates the face identities"));
            }
        }
        if let Some(tets) = &self.tetrahedra {
            for (s, f) in tets.iter().enumerate() {
                if f.iter().any(|&t| t >= self.triangles.len()) {
                    return fail(format!("tetrahedron {s} has an out-of-range triangle"));
                }
                for i in 0..4 {
                    for j in (i + 1)..4 {
                        if self.triangles[f[i]][j - 1] != self.triangles[f[j]][i] {
                            return fail(format!(
                                "tetrahedron {s} violates the face identity at ({i}, {j})"
                            ));
                        }
                    }
                }
            }
        }
        if self.vertex_degeneracy.len() != self.vertices {
            return fail("one degenerate edge per vertex required".into());
        }
        for (v, &e) in self.vertex_degeneracy.iter().enumerate() {
            if e >= self.edges.len() || self.edges[e] != [v, v] {
                return fail(format!("degenerate edge of vertex {v} is not a loop at it"));
            }
        }
        if self.edge_degeneracies.len() != self.edges.len() {
            return fail("two degenerate triangles per edge required".into());
        }
        for (e, &[s0, s1]) in self.edge_degeneracies.iter().enumerate() {
            if s0 >= self.triangles.len() || s1 >= self.triangles.len() {
                return fail(format!("degeneracy of edge {e} is out of range"));
            }
            let want0 = [e, e, self.vertex_degeneracy[self.edge_src(e)]];
            if self.triangles[s0] != want0 {
                return fail(format!("s0 of edge {e} has the wrong faces"));
            }
            let want1 = [self.vertex_degeneracy[self.edge_tgt(e)], e, e];
            if self.triangles[s1] != want1 {
                return fail(format!("s1 of edge {e} has the wrong faces"));
            }
        }
        Ok(())
    }

    /// Number of path components of the 1-skeleton.
    pub fn pi0_components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.vertices).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e[0]), find(&mut parent, e[1]));
            if a != b {
                parent[a] = b;
            }
        }
        let roots: HashSet<usize> = (0..self.vertices).map(|v| find(&mut parent, v)).collect();
        roots.len()
    }

    fn spanning_tree(&self, base: usize, order: &[usize]) -> Result<Vec<usize>> {
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.vertices];
        for &e in order {
            let [t, s] = self.edges[e];
            adj[s].push((t, e));
            adj[t].push((s, e));
        }
        let mut seen = vec![false; self.vertices];
        seen[base] = true;
        let mut tree = Vec::new();
        let mut queue = std::collections::VecDeque::from([base]);
        while let Some(v) = queue.pop_front() {
            for &(w, e) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    tree.push(e);
                    queue.push_back(w);
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::Validation("complex is not connected".into()));
        }
        Ok(tree)
    }

    fn pi1_relations(&self, base: usize, order: &[usize]) -> Result<Vec<Vec<i128>>> {
        let ne = self.edges.len();
        let tree = self.spanning_tree(base, order)?;
        let mut rows: Vec<Vec<i128>> = Vec::new();
        let mut seen: HashSet<Vec<i128>> = HashSet::new();
        let mut push = |row: Vec<i128>, rows: &mut Vec<Vec<i128>>| {
            if row.iter().any(|&c| c != 0) && seen.insert(row.clone()) {
                rows.push(row);
            }
        };
        for &e in &tree {
            let mut row = vec![0i128; ne];
            row[e] = 1;
            push(row, &mut rows);
        }
        for &e in &self.vertex_degeneracy {
            let mut row = vec![0i128; ne];
            row[e] = 1;
            push(row, &mut rows);
        }
        for t in &self.triangles {
            let mut row = vec![0i128; ne];
            row[t[1]] += 1;
            row[t[0]] -= 1;
            row[t[2]] -= 1;
            push(row, &mut rows);
        }
        Ok(rows)
    }

    /// Invariant factors of the abelianized edge-path group of the
    /// 2-skeleton: one generator per edge, with spanning-tree edges and
    /// degenerate edges trivial and one relation per triangle.
    pub fn pi1_invariants(&self, base: usize) -> Result<SmithResult> {
        let order: Vec<usize> = (0..self.edges.len()).collect();
        let rows = self.pi1_relations(base, &order)?;
        Ok(smith_invariants(&rows, self.edges.len()))
    }

    /// Same invariants computed from a spanning tree grown in a seeded
    /// shuffled edge order; the result must not depend on the tree.
    pub fn pi1_invariants_seeded(&self, base: usize, seed: u64) -> Result<SmithResult> {
        let order = shuffled_indices(self.edges.len(), seed);
        let rows = self.pi1_relations(base, &order)?;
        Ok(smith_invariants(&rows, self.edges.len()))
    }

    /// The same group as a presentation, for mapping along induced maps of
    /// complexes. Generators are all edges.
    pub fn pi1_presentation(&self, base: usize) -> Result<FpAbGroup> {
        let order: Vec<usize> = (0..self.edges.len()).collect();
        let rows = self.pi1_relations(base, &order)?;
        Ok(FpAbGroup::new(self.edges.len(), rows))
    }
}

/// Count of cells per dimension, for reporting.
#[derive(Debug, Clone, Copy)]
pub struct CellCounts {
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
    pub tetrahedra: Option<usize>,
}

impl TruncatedSimplicialSet {
    pub fn cell_counts(&self) -> CellCounts {
        CellCounts {
            vertices: self.vertices,
            edges: self.edges.len(),
            triangles: self.triangles.len(),
            tetrahedra: self.tetrahedra.as_ref().map(|t| t.len()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// One vertex, one nondegenerate loop. The realization is a circle.
    fn circle() -> TruncatedSimplicialSet {
        // edge 0 is s0 of the vertex, edge 1 the loop
        let edges = vec![[0, 0], [0, 0]];
        // t0 = s0 s0 (v), t1 = s0(e1), t2 = s1(e1)
        let triangles = vec![[0, 0, 0], [1, 1, 0], [0, 1, 1]];
        TruncatedSimplicialSet {
            vertices: 1,
            edges,
            triangles,
            tetrahedra: Some(vec![[0, 0, 0, 0]]),
            vertex_degeneracy: vec![0],
            edge_degeneracies: vec![[0, 0], [1, 2]],
        }
    }

    /// Three vertices, a filled triangle. Contractible.
    fn filled_triangle() -> TruncatedSimplicialSet {
        // edges: 0: 0->1, 1: 1->2, 2: 0->2, then s0 of each vertex as 3,4,5
        let edges = vec![[1, 0], [2, 1], [2, 0], [0, 0], [1, 1], [2, 2]];
        // t0 fills [d0=e1, d1=e2, d2=e0]; then degeneracies of each edge
        let mut triangles = vec![[1, 2, 0]];
        let mut edge_degeneracies = Vec::new();
        for e in 0..6usize {
            let s = edges[e][1];
            let t = edges[e][0];
            let s0 = triangles.len();
            triangles.push([e, e, 3 + s]);
            let s1 = triangles.len();
            triangles.push([3 + t, e, e]);
            edge_degeneracies.push([s0, s1]);
        }
        TruncatedSimplicialSet {
            vertices: 3,
            edges,
            triangles,
            tetrahedra: None,
            vertex_degeneracy: vec![3, 4, 5],
            edge_degeneracies,
        }
    }

    /// One vertex, one loop `a`, one 2-cell reading off `2a = 0`.
    fn half_turn_plane() -> TruncatedSimplicialSet {
        let edges = vec![[0, 0], [0, 0]];
        let mut triangles = vec![[1, 0, 1]];
        let mut edge_degeneracies = Vec::new();
        for e in 0..2usize {
            let s0 = triangles.len();
            triangles.push([e, e, 0]);
            let s1 = triangles.len();
            triangles.push([0, e, e]);
            edge_degeneracies.push([s0, s1]);
        }
        TruncatedSimplicialSet {
            vertices: 1,
            edges,
            triangles,
            tetrahedra: None,
            vertex_degeneracy: vec![0],
            edge_degeneracies,
        }
    }

    #[test]
    fn fixtures_validate() {
        circle().validate().unwrap();
        filled_triangle().validate().unwrap();
        half_turn_plane().validate().unwrap();
    }

    #[test]
    fn corrupted_triangle_is_rejected() {
        let mut x = filled_triangle();
        x.triangles[0] = [2, 1, 0];
        assert!(x.validate().is_err());
    }

    #[test]
    fn circle_has_free_fundamental_group() {
        let x = circle();
        assert_eq!(x.pi0_components(), 1);
        let p = x.pi1_invariants(0).unwrap();
        assert_eq!(p.free_rank, 1);
        assert!(p.torsion.is_empty());
    }

    #[test]
    fn filled_triangle_is_simply_connected() {
        let x = filled_triangle();
        assert_eq!(x.pi0_components(), 1);
        let p = x.pi1_invariants(0).unwrap();
        assert_eq!(p.free_rank, 0);
        assert!(p.torsion.is_empty());
        assert!(p.order() == Some(1));
    }

    #[test]
    fn half_turn_plane_has_two_torsion() {
        let x = half_turn_plane();
        let p = x.pi1_invariants(0).unwrap();
        assert_eq!(p.free_rank, 0);
        assert_eq!(p.torsion, vec![2]);
    }

    #[test]
    fn invariants_do_not_depend_on_the_tree() {
        let x = filled_triangle();
        let want = x.pi1_invariants(0).unwrap();
        for seed in 0..16 {
            let got = x.pi1_invariants_seeded(0, seed).unwrap();
            assert_eq!(got.free_rank, want.free_rank);
            assert_eq!(got.torsion, want.torsion);
        }
    }

    #[test]
    fn disconnected_complex_is_rejected_for_pi1() {
        let x = TruncatedSimplicialSet {
            vertices: 2,
            edges: vec![[0, 0], [1, 1]],
            triangles: vec![[0, 0, 0], [1, 1, 1]],
            tetrahedra: None,
            vertex_degeneracy: vec![0, 1],
            edge_degeneracies: vec![[0, 0], [1, 1]],
        };
        x.validate().unwrap();
        assert_eq!(x.pi0_components(), 2);
        assert!(x.pi1_invariants(0).is_err());
    }

    #[test]
    fn presentation_matches_invariants() {
        let x = half_turn_plane();
        let pres = x.pi1_presentation(0).unwrap();
        assert!(pres.is_finite());
        assert_eq!(pres.order(), Some(2));
        let (g, images) = pres.materialize();
        assert_eq!(g.order, 2);
        assert_eq!(images.len(), x.edges.len());
        // the degenerate edge dies, the loop survives
        assert_eq!(images[0], g.zero);
        assert_ne!(images[1], g.zero);
    }
}
