//! k-graphs, the weight-induced random walk, coarse path sums, and inner
//! connectivity.
//!
//! The k-graph has the k-simplices as vertices; two are adjacent when their
//! union is a (k+1)-simplex (so they share k vertices), and the edge is
//! labeled by that union. The walk induced by the weight has conductance
//! c(e) = m(label), stationary measure nu(tau) = (k+1) m(tau) and transition
//! mu(tau, tau') = m(tau U tau') / ((k+1) m(tau)). Level -1 is special: one
//! vertex with a loop per vertex of the complex, mu(loop v) = m(v)/m(empty).
//!
//! Coarse path sums are exact: pathmu recurses over prescribed edge sets with
//! memoization on (current vertex, remaining depth), never sampling.

use std::collections::{BTreeSet, HashMap};

use crate::complex::{SubsetFamily, WeightedComplex};
use crate::error::{HdxError, Result};
use crate::simplex::Simplex;

/// One edge of a k-graph.
#[derive(Clone, Debug)]
pub struct KEdge {
    /// Endpoint indices into `KGraph::vertices`; equal for loops (k = -1).
    pub ends: (usize, usize),
    /// Index of the labeling (k+1)-simplex in the parent complex
    /// (for k = -1 the loop's vertex index).
    pub label: usize,
}

/// The graph of k-simplices joined through (k+1)-simplices, with the
/// weight-induced walk data.
#[derive(Clone, Debug)]
pub struct KGraph {
    pub k: isize,
    /// Canonical k-simplices of the complex (all of them, in level order).
    pub vertices: Vec<Simplex>,
    pub edges: Vec<KEdge>,
    /// Adjacency: per vertex, (edge index, other endpoint).
    pub adj: Vec<Vec<(usize, usize)>>,
    /// Conductance per edge: m of the labeling simplex.
    pub conductance: Vec<f64>,
    /// Stationary measure per vertex: (k+1) m(tau); m(empty) at level -1.
    pub stationary: Vec<f64>,
}

impl KGraph {
    /// Transition probability along an edge leaving `from`.
    pub fn transition(&self, from: usize, edge: usize) -> f64 {
        self.conductance[edge] / self.stationary[from]
    }

    /// Worst deviation of the per-vertex outgoing transition sums from 1.
    pub fn stochasticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for v in 0..self.vertices.len().max(1) {
            if self.adj.get(v).map_or(true, |a| a.is_empty()) {
                continue;
            }
            let total: f64 = self.adj[v].iter().map(|&(e, _)| self.transition(v, e)).sum();
            worst = worst.max((total - 1.0).abs());
        }
        worst
    }

    /// Worst relative defect of reversibility nu(a) mu(a,b) = nu(b) mu(b,a).
    /// Both sides equal the conductance by construction, so anything beyond
    /// rounding noise in nu * (c / nu) indicates a structural bug.
    pub fn reversibility_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, e) in self.edges.iter().enumerate() {
            let (a, b) = e.ends;
            let lhs = self.stationary[a] * self.transition(a, i);
            let rhs = self.stationary[b] * self.transition(b, i);
            worst = worst.max((lhs - rhs).abs() / self.conductance[i]);
        }
        worst
    }
}

/// Builds the k-graph with its walk data; `-1 <= k <= n-1` (the n-graph is
/// edgeless and is not built).
pub fn build_kgraph(x: &WeightedComplex, k: isize) -> Result<KGraph> {
    let n = x.dim() as isize;
    if k < -1 || k > n - 1 {
        return Err(HdxError::DimensionOutOfRange { k, lo: -1, hi: n - 1 });
    }
    if k == -1 {
        // one vertex, a loop per vertex of the complex
        let nv = x.num_vertices();
        let edges: Vec<KEdge> = (0..nv)
            .map(|v| KEdge { ends: (0, 0), label: v })
            .collect();
        let conductance: Vec<f64> = (0..nv).map(|v| x.weight_at(0, v)).collect();
        let adj = vec![(0..nv).map(|e| (e, 0usize)).collect()];
        return Ok(KGraph {
            k,
            vertices: vec![Simplex::empty()],
            edges,
            adj,
            conductance,
            stationary: vec![x.empty_weight()],
        });
    }
    let vertices: Vec<Simplex> = x.simplices(k).to_vec();
    let mut edges = Vec::new();
    let mut adj = vec![Vec::new(); vertices.len()];
    // Each (k+1)-simplex sigma yields an edge between every pair of its
    // k-faces; the pair intersects in k vertices and unions back to sigma,
    // so no pair is labeled by two different simplices.
    for (label, sigma) in x.simplices(k + 1).iter().enumerate() {
        let face_ids: Vec<usize> = sigma
            .faces()
            .into_iter()
            .map(|f| x.index_of(&f).expect("faces are present"))
            .collect();
        for i in 0..face_ids.len() {
            for j in i + 1..face_ids.len() {
                let e = edges.len();
                edges.push(KEdge {
                    ends: (face_ids[i], face_ids[j]),
                    label,
                });
                adj[face_ids[i]].push((e, face_ids[j]));
                adj[face_ids[j]].push((e, face_ids[i]));
            }
        }
    }
    let conductance: Vec<f64> = edges.iter().map(|e| x.weight_at(k + 1, e.label)).collect();
    let stationary: Vec<f64> = (0..vertices.len())
        .map(|i| (k as f64 + 1.0) * x.weight_at(k, i))
        .collect();
    let g = KGraph {
        k,
        vertices,
        edges,
        adj,
        conductance,
        stationary,
    };
    debug_assert!(g.stochasticity_defect() <= 1e-12);
    Ok(g)
}

/// Vertex and edge subsets of a k-graph selected by a subset family: the
/// k-graph of the subcomplex spanned by the family.
#[derive(Clone, Debug, Default)]
pub struct SpannedKSets {
    pub vertices: BTreeSet<usize>,
    pub edges: BTreeSet<usize>,
}

/// Is every vertex of `s` in a distinct class of the family?
fn spans_distinct_classes(family: &SubsetFamily, s: &Simplex) -> bool {
    let mut used = vec![false; family.len()];
    for &v in s.vertices() {
        match family.class_of(v) {
            Some(c) if !used[c] => used[c] = true,
            _ => return false,
        }
    }
    true
}

/// The restriction X_k(U_0, ..., U_l): vertices are k-simplices lying in k+1
/// distinct classes; edges are those labeled by a (k+1)-simplex lying in k+2
/// distinct classes. At level -1 the vertex is kept and the loops are those
/// at vertices in the union of the family.
pub fn spanned_subgraph(g: &KGraph, family: &SubsetFamily) -> SpannedKSets {
    let mut out = SpannedKSets::default();
    if g.k == -1 {
        out.vertices.insert(0);
        let union = family.union_all();
        for (e, edge) in g.edges.iter().enumerate() {
            if union.contains(&edge.label) {
                out.edges.insert(e);
            }
        }
        return out;
    }
    for (i, s) in g.vertices.iter().enumerate() {
        if spans_distinct_classes(family, s) {
            out.vertices.insert(i);
        }
    }
    for (e, edge) in g.edges.iter().enumerate() {
        let label = g.vertices[edge.ends.0].merge(&g.vertices[edge.ends.1]);
        if spans_distinct_classes(family, &label) {
            out.edges.insert(e);
        }
    }
    out
}

/// Level-k vertex set V_k(U_0, ..., U_l) as canonical simplex indices: the
/// k-simplices with each vertex in a distinct class.
pub fn spanned_vertex_set(
    x: &WeightedComplex,
    k: isize,
    family: &SubsetFamily,
) -> BTreeSet<usize> {
    x.simplices(k)
        .iter()
        .enumerate()
        .filter(|(_, s)| spans_distinct_classes(family, s))
        .map(|(i, _)| i)
        .collect()
}

/// Edge set E_k(U_0, ..., U_{k+1}): edges of the k-graph whose labeling
/// (k+1)-simplex has one vertex in each class of the family.
pub fn spanned_edge_set(g: &KGraph, family: &SubsetFamily) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    if g.k == -1 {
        let union = family.union_all();
        for (e, edge) in g.edges.iter().enumerate() {
            if union.contains(&edge.label) {
                out.insert(e);
            }
        }
        return out;
    }
    for (e, edge) in g.edges.iter().enumerate() {
        let label = g.vertices[edge.ends.0].merge(&g.vertices[edge.ends.1]);
        if spans_distinct_classes(family, &label) {
            out.insert(e);
        }
    }
    out
}

/// Coarse path probability from a single start vertex: the total transition
/// mass of walks whose i-th step uses an edge of `edge_sets[i]`. Exact
/// recursive summation memoized on (vertex, remaining depth).
pub fn path_mu_from(g: &KGraph, start: usize, edge_sets: &[&BTreeSet<usize>]) -> f64 {
    fn rec(
        g: &KGraph,
        v: usize,
        depth: usize,
        edge_sets: &[&BTreeSet<usize>],
        memo: &mut HashMap<(usize, usize), f64>,
    ) -> f64 {
        if depth == edge_sets.len() {
            return 1.0;
        }
        if let Some(&cached) = memo.get(&(v, depth)) {
            return cached;
        }
        let mut total = 0.0;
        for &(e, other) in &g.adj[v] {
            if edge_sets[depth].contains(&e) {
                total += g.transition(v, e) * rec(g, other, depth + 1, edge_sets, memo);
            }
        }
        memo.insert((v, depth), total);
        total
    }
    let mut memo = HashMap::new();
    rec(g, start, 0, edge_sets, &mut memo)
}

/// Coarse path probability from a vertex set.
pub fn path_mu(g: &KGraph, starts: &BTreeSet<usize>, edge_sets: &[&BTreeSet<usize>]) -> f64 {
    starts.iter().map(|&v| path_mu_from(g, v, edge_sets)).sum()
}

/// Coarse path conductance: stationary-weighted path probabilities,
/// `sum over v in starts of nu(v) * pathmu({v}, edge_sets)`.
pub fn path_c(g: &KGraph, starts: &BTreeSet<usize>, edge_sets: &[&BTreeSet<usize>]) -> f64 {
    starts
        .iter()
        .map(|&v| g.stationary[v] * path_mu_from(g, v, edge_sets))
        .sum()
}

/// m(U_0, ..., U_k): total weight of the k-simplices with one vertex in each
/// class of the family.
pub fn m_tuple(x: &WeightedComplex, family: &SubsetFamily) -> f64 {
    let k = family.len() as isize - 1;
    if k > x.dim() as isize {
        return 0.0;
    }
    x.simplices(k)
        .iter()
        .filter(|s| spans_distinct_classes(family, s))
        .map(|s| x.weight(s))
        .sum()
}

/// Inner connectivity of (U_0, ..., U_k): the conditional probability that
/// the second step of the stationary walk on the (k-1)-graph stays inside
/// the spanned subgraph given that the first step did. Zero when some class
/// is empty or the spanned edge set is empty.
pub fn h_inner(x: &WeightedComplex, family: &SubsetFamily) -> Result<f64> {
    let k = family.len() as isize - 1;
    if k < 0 || k > x.dim() as isize - 1 {
        return Err(HdxError::DimensionOutOfRange {
            k,
            lo: 0,
            hi: x.dim() as isize - 1,
        });
    }
    if family.any_set_empty() {
        return Ok(0.0);
    }
    let g = build_kgraph(x, k - 1)?;
    let sub = spanned_subgraph(&g, family);
    if sub.edges.is_empty() {
        return Ok(0.0);
    }
    let one_step = path_c(&g, &sub.vertices, &[&sub.edges]);
    if one_step == 0.0 {
        return Ok(0.0);
    }
    let two_step = path_c(&g, &sub.vertices, &[&sub.edges, &sub.edges]);
    Ok(two_step / one_step)
}

/// The closed form `pathc(V', E', E') / (k (k+1) m(U_0..U_k))` for k >= 1 and
/// `m(U_0)/m(empty)` for k = 0; used to cross-check [`h_inner`].
pub fn h_inner_closed_form(x: &WeightedComplex, family: &SubsetFamily) -> Result<f64> {
    let k = family.len() as isize - 1;
    if family.any_set_empty() {
        return Ok(0.0);
    }
    if k == 0 {
        let m_u: f64 = family.get(0).iter().map(|&v| x.weight_at(0, v)).sum();
        return Ok(m_u / x.empty_weight());
    }
    let m = m_tuple(x, family);
    if m == 0.0 {
        return Ok(0.0);
    }
    let g = build_kgraph(x, k - 1)?;
    let sub = spanned_subgraph(&g, family);
    let two_step = path_c(&g, &sub.vertices, &[&sub.edges, &sub.edges]);
    Ok(two_step / (k as f64 * (k as f64 + 1.0) * m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> WeightedComplex {
        WeightedComplex::from_facets(
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
            None,
        )
        .unwrap()
    }

    fn triangle() -> WeightedComplex {
        WeightedComplex::from_facets(vec![vec![0, 1, 2]], None).unwrap()
    }

    #[test]
    fn zero_graph_of_triangle() {
        let x = triangle();
        let g = build_kgraph(&x, 0).unwrap();
        assert_eq!(g.vertices.len(), 3);
        assert_eq!(g.edges.len(), 3);
        for v in 0..3 {
            assert_eq!(g.stationary[v], 2.0);
            for &(e, _) in &g.adj[v] {
                assert_eq!(g.transition(v, e), 0.5);
            }
        }
        assert!(g.stochasticity_defect() <= 1e-12);
        assert_eq!(g.reversibility_defect(), 0.0);
    }

    #[test]
    fn minus_one_graph() {
        let x = triangle();
        let g = build_kgraph(&x, -1).unwrap();
        assert_eq!(g.vertices.len(), 1);
        assert_eq!(g.edges.len(), 3);
        for e in 0..3 {
            assert!((g.transition(0, e) - 2.0 / 6.0).abs() < 1e-15);
        }
        assert!(g.stochasticity_defect() <= 1e-12);
    }

    #[test]
    fn n_graph_not_built() {
        let x = triangle();
        assert!(build_kgraph(&x, 2).is_err());
    }

    #[test]
    fn pathc_minus_one_product_formula() {
        let x = k4();
        let g = build_kgraph(&x, -1).unwrap();
        let family = SubsetFamily::from_slices(&[&[0], &[1, 2]]).unwrap();
        let e0 = spanned_edge_set(&g, &SubsetFamily::from_slices(&[&[0]]).unwrap());
        let e1 = spanned_edge_set(&g, &SubsetFamily::from_slices(&[&[1, 2]]).unwrap());
        let starts: BTreeSet<usize> = [0].into();
        let pc = path_c(&g, &starts, &[&e0, &e1]);
        // m(U0) m(U1) / m(empty)^1
        let expect = 6.0 * 12.0 / 24.0;
        assert!((pc - expect).abs() < 1e-12);
        let _ = family;
    }

    #[test]
    fn pathc_single_step_is_weight() {
        // pathc_k(V_k(U_0..U_k), E_k(U_0..U_{k+1})) = (k+1) m(U_0..U_{k+1})
        let x = k4();
        for k in 0..=1isize {
            let g = build_kgraph(&x, k).unwrap();
            // the edge family has k+2 classes, the start family its first k+1
            let family = match k {
                0 => SubsetFamily::from_slices(&[&[0], &[1, 2]]).unwrap(),
                _ => SubsetFamily::from_slices(&[&[0], &[1], &[2, 3]]).unwrap(),
            };
            let starts = spanned_vertex_set(&x, k, &family.window(0, k as usize));
            let edges = spanned_edge_set(&g, &family);
            let pc = path_c(&g, &starts, &[&edges]);
            let expect = (k as f64 + 1.0) * m_tuple(&x, &family);
            assert!((pc - expect).abs() < 1e-12, "k={k}: {pc} vs {expect}");
        }
    }

    #[test]
    fn two_step_identity() {
        // pathc_{k-1}(V_{k-1}(U_0..U_k), E_{k-1}(U_0..U_k)) = k(k+1) m(U_0..U_k)
        let x = k4();
        let family = SubsetFamily::from_slices(&[&[0], &[1], &[2, 3]]).unwrap();
        let k = 2usize;
        let g = build_kgraph(&x, k as isize - 1).unwrap();
        let sub = spanned_subgraph(&g, &family);
        let pc = path_c(&g, &sub.vertices, &[&sub.edges]);
        let expect = (k * (k + 1)) as f64 * m_tuple(&x, &family);
        assert!((pc - expect).abs() < 1e-12, "{pc} vs {expect}");
    }

    #[test]
    fn m_tuple_examples() {
        let x = k4();
        let f = SubsetFamily::from_slices(&[&[0], &[1]]).unwrap();
        assert_eq!(m_tuple(&x, &f), 2.0);
        let empty = SubsetFamily::from_slices(&[&[0], &[]]).unwrap();
        assert_eq!(m_tuple(&x, &empty), 0.0);
        // symmetric under permutation of the classes
        let g = SubsetFamily::from_slices(&[&[1], &[0]]).unwrap();
        assert_eq!(m_tuple(&x, &f), m_tuple(&x, &g));
    }

    #[test]
    fn h_inner_examples() {
        let x = triangle();
        // k = 0 singleton: m(v)/m(empty) = 2/6
        let f = SubsetFamily::from_slices(&[&[0]]).unwrap();
        assert!((h_inner(&x, &f).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        // all vertices: 1
        let f = SubsetFamily::from_slices(&[&[0, 1, 2]]).unwrap();
        assert!((h_inner(&x, &f).unwrap() - 1.0).abs() < 1e-12);

        // k = 1 on K4: definition route equals the closed form
        let x = k4();
        let f = SubsetFamily::from_slices(&[&[0], &[1]]).unwrap();
        let a = h_inner(&x, &f).unwrap();
        let b = h_inner_closed_form(&x, &f).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn h_inner_zero_on_empty_class() {
        let x = k4();
        let f = SubsetFamily::from_slices(&[&[0], &[]]).unwrap();
        assert_eq!(h_inner(&x, &f).unwrap(), 0.0);
    }
}
