//! Weighted pure simplicial complexes.
//!
//! A complex is built from its top-dimensional facets; every lower simplex
//! (including the empty simplex) is derived by downward closure, and the
//! weight of a simplex is the sum of the weights of its cofacets. With this
//! recursion a positive weight on the facets determines the weight function
//! everywhere, and `m(tau) = (n-k)! * sum of facet weights over facets
//! containing tau` holds at every dimension.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{HdxError, Result};
use crate::simplex::{factorial, factorial_u128, orderings, OrderedSimplex, Simplex, VertexId};

/// Pairwise-disjoint vertex sets (U_0, ..., U_l).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetFamily {
    sets: Vec<BTreeSet<VertexId>>,
}

impl SubsetFamily {
    pub fn new(sets: Vec<BTreeSet<VertexId>>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for s in &sets {
            for v in s {
                if !seen.insert(*v) {
                    return Err(HdxError::OverlappingSets);
                }
            }
        }
        Ok(SubsetFamily { sets })
    }

    pub fn from_slices(sets: &[&[VertexId]]) -> Result<Self> {
        Self::new(sets.iter().map(|s| s.iter().copied().collect()).collect())
    }

    pub fn sets(&self) -> &[BTreeSet<VertexId>] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn get(&self, i: usize) -> &BTreeSet<VertexId> {
        &self.sets[i]
    }

    pub fn any_set_empty(&self) -> bool {
        self.sets.iter().any(|s| s.is_empty())
    }

    /// Class of `v`: the index of the set containing it, if any.
    pub fn class_of(&self, v: VertexId) -> Option<usize> {
        self.sets.iter().position(|s| s.contains(&v))
    }

    /// The contiguous subfamily (U_i, ..., U_j) inclusive.
    pub fn window(&self, i: usize, j: usize) -> SubsetFamily {
        SubsetFamily {
            sets: self.sets[i..=j].to_vec(),
        }
    }

    /// Union of all member sets.
    pub fn union_all(&self) -> BTreeSet<VertexId> {
        self.sets.iter().flatten().copied().collect()
    }
}

/// One dimension level of the simplex index: canonical simplices in
/// lexicographic order with aligned weights and cofacet adjacency.
#[derive(Clone, Debug)]
struct Level {
    simplices: Vec<Simplex>,
    weights: Vec<f64>,
    /// Per simplex: (added vertex, index of the cofacet one level up).
    cofacets: Vec<Vec<(VertexId, usize)>>,
}

impl Level {
    fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.simplices.binary_search(s).ok()
    }
}

/// A weighted pure n-dimensional simplicial complex.
///
/// Immutable after construction; queries are read-only.
#[derive(Clone, Debug)]
pub struct WeightedComplex {
    n: usize,
    /// levels[d] holds the simplices of dimension d-1 (so levels[0] is the
    /// empty simplex alone).
    levels: Vec<Level>,
    /// Side label per vertex, when the complex is partite.
    partition: Option<Vec<usize>>,
    /// Facet weights were all 1, so homogeneous integer weights are exact.
    homogeneous: bool,
}

impl WeightedComplex {
    /// Builds a complex from facet vertex sets, with optional positive facet
    /// weights (default 1 each, the homogeneous weight).
    pub fn from_facets(facets: Vec<Vec<VertexId>>, facet_weights: Option<Vec<f64>>) -> Result<Self> {
        if facets.is_empty() {
            return Err(HdxError::EmptyComplex);
        }
        let card = facets[0].len();
        if card == 0 {
            return Err(HdxError::EmptyComplex);
        }
        for f in &facets {
            if f.len() != card {
                return Err(HdxError::MixedFacetDimensions {
                    expected: card,
                    found: f.len(),
                });
            }
            let mut sorted = f.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(HdxError::InvalidParameter(format!(
                    "facet {f:?} repeats a vertex"
                )));
            }
        }
        if let Some(w) = &facet_weights {
            if w.len() != facets.len() {
                return Err(HdxError::WeightCountMismatch {
                    facets: facets.len(),
                    weights: w.len(),
                });
            }
            if let Some(&bad) = w.iter().find(|&&x| !(x > 0.0) || !x.is_finite()) {
                return Err(HdxError::NonPositiveWeight(bad));
            }
        }
        let homogeneous = facet_weights
            .as_ref()
            .map_or(true, |w| w.iter().all(|&x| x == 1.0));
        let n = card - 1;

        let mut facet_map: BTreeMap<Simplex, f64> = BTreeMap::new();
        for (i, f) in facets.iter().enumerate() {
            let s = Simplex::new(f.clone());
            let w = facet_weights.as_ref().map_or(1.0, |w| w[i]);
            if facet_map.insert(s, w).is_some() {
                return Err(HdxError::DuplicateFacet(f.clone()));
            }
        }

        // Downward closure with the weight recursion
        // m(tau) = sum over cofacets sigma of m(sigma).
        let mut maps: Vec<BTreeMap<Simplex, f64>> = vec![BTreeMap::new(); n + 2];
        maps[n + 1] = facet_map;
        for d in (0..=n).rev() {
            let (lower, upper) = maps.split_at_mut(d + 1);
            let target = &mut lower[d];
            for (s, w) in &upper[0] {
                for face in s.faces() {
                    *target.entry(face).or_insert(0.0) += *w;
                }
            }
        }

        let mut levels: Vec<Level> = maps
            .into_iter()
            .map(|map| {
                let (simplices, weights): (Vec<_>, Vec<_>) = map.into_iter().unzip();
                let cofacets = vec![Vec::new(); simplices.len()];
                Level {
                    simplices,
                    weights,
                    cofacets,
                }
            })
            .collect();
        for d in 1..levels.len() {
            let (lower, upper) = levels.split_at_mut(d);
            let low = &mut lower[d - 1];
            for (j, s) in upper[0].simplices.iter().enumerate() {
                for (pos, face) in s.faces().into_iter().enumerate() {
                    let i = low
                        .simplices
                        .binary_search(&face)
                        .expect("face present by downward closure");
                    low.cofacets[i].push((s.vertices()[pos], j));
                }
            }
        }

        let complex = WeightedComplex {
            n,
            levels,
            partition: None,
            homogeneous,
        };
        debug_assert!(complex.vertex_ids_dense());
        Ok(complex)
    }

    fn vertex_ids_dense(&self) -> bool {
        self.simplices(0)
            .iter()
            .enumerate()
            .all(|(i, s)| s.vertices() == [i])
    }

    /// Attaches side labels; every facet must have exactly one vertex per
    /// distinct label and the label count must be n+1.
    pub fn with_partition(mut self, sides: Vec<usize>) -> Result<Self> {
        if sides.len() != self.num_vertices() {
            return Err(HdxError::InvalidPartition(format!(
                "{} labels for {} vertices",
                sides.len(),
                self.num_vertices()
            )));
        }
        let labels: BTreeSet<usize> = sides.iter().copied().collect();
        if labels.len() != self.n + 1 {
            return Err(HdxError::InvalidPartition(format!(
                "{} distinct side labels, need {}",
                labels.len(),
                self.n + 1
            )));
        }
        for f in self.facets() {
            let seen: BTreeSet<usize> = f.vertices().iter().map(|&v| sides[v]).collect();
            if seen.len() != self.n + 1 {
                return Err(HdxError::InvalidPartition(format!(
                    "facet {:?} is not transversal to the sides",
                    f.vertices()
                )));
            }
        }
        self.partition = Some(sides);
        Ok(self)
    }

    /// Complex dimension n.
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn num_vertices(&self) -> usize {
        self.levels[1].simplices.len()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous
    }

    pub fn partition(&self) -> Option<&[usize]> {
        self.partition.as_deref()
    }

    /// Side label of a vertex (partite complexes only).
    pub fn side_of(&self, v: VertexId) -> Option<usize> {
        self.partition.as_ref().map(|p| p[v])
    }

    /// Sorted distinct side labels.
    pub fn side_labels(&self) -> Option<Vec<usize>> {
        self.partition
            .as_ref()
            .map(|p| p.iter().copied().collect::<BTreeSet<_>>().into_iter().collect())
    }

    /// Vertices on side `label`.
    pub fn side_vertices(&self, label: usize) -> Vec<VertexId> {
        match &self.partition {
            Some(p) => (0..self.num_vertices()).filter(|&v| p[v] == label).collect(),
            None => Vec::new(),
        }
    }

    /// Canonical simplices of dimension k (k from -1 to n), sorted.
    pub fn simplices(&self, k: isize) -> &[Simplex] {
        assert!(k >= -1 && k <= self.n as isize, "dimension {k} out of range");
        &self.levels[(k + 1) as usize].simplices
    }

    /// Number of canonical k-simplices.
    pub fn num_simplices(&self, k: isize) -> usize {
        self.simplices(k).len()
    }

    pub fn facets(&self) -> &[Simplex] {
        self.simplices(self.n as isize)
    }

    /// Index of a canonical simplex within its dimension level.
    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        if s.dim() > self.n as isize {
            return None;
        }
        self.levels[(s.dim() + 1) as usize].index_of(s)
    }

    pub fn contains_simplex(&self, s: &Simplex) -> bool {
        self.index_of(s).is_some()
    }

    /// Weight m(tau); panics if the simplex is absent.
    pub fn weight(&self, s: &Simplex) -> f64 {
        let level = &self.levels[(s.dim() + 1) as usize];
        level.weights[level.index_of(s).expect("simplex not in complex")]
    }

    pub fn try_weight(&self, s: &Simplex) -> Option<f64> {
        let level = &self.levels[(s.dim() + 1) as usize];
        level.index_of(s).map(|i| level.weights[i])
    }

    /// Weight by (dimension, canonical index).
    pub fn weight_at(&self, k: isize, idx: usize) -> f64 {
        self.levels[(k + 1) as usize].weights[idx]
    }

    /// m(emptyset), the total weight.
    pub fn empty_weight(&self) -> f64 {
        self.levels[0].weights[0]
    }

    /// Sum of m over all k-simplices.
    pub fn total_weight(&self, k: isize) -> f64 {
        self.levels[(k + 1) as usize].weights.iter().sum()
    }

    /// Exact integer weight `(n-k)! * #{facets containing tau}` for the
    /// homogeneous weight; `None` when the complex is not homogeneous.
    pub fn homogeneous_integer_weight(&self, s: &Simplex) -> Option<u128> {
        if !self.homogeneous {
            return None;
        }
        let count = self
            .facets()
            .iter()
            .filter(|f| s.is_face_of(f))
            .count() as u128;
        Some(factorial_u128(self.n + 1 - s.vertices().len()) * count)
    }

    /// All ordered k-simplices, grouped by canonical simplex, permutations in
    /// lexicographic order. `k = -1` yields the single empty tuple.
    pub fn enumerate_ordered(&self, k: isize) -> Result<Vec<OrderedSimplex>> {
        if k < -1 || k > self.n as isize {
            return Err(HdxError::DimensionOutOfRange {
                k,
                lo: -1,
                hi: self.n as isize,
            });
        }
        Ok(self
            .simplices(k)
            .iter()
            .flat_map(orderings)
            .collect())
    }

    /// Cofacet pairs of `s`: each (v, sigma) with sigma = s + v in the complex.
    pub fn cofacets(&self, s: &Simplex) -> Vec<(VertexId, Simplex)> {
        let k = s.dim();
        if k >= self.n as isize {
            return Vec::new();
        }
        let idx = self.index_of(s).expect("simplex not in complex");
        self.cofacet_indices(k, idx)
            .iter()
            .map(|&(v, j)| (v, self.simplices(k + 1)[j].clone()))
            .collect()
    }

    /// Cofacets by index: (added vertex, index at level k+1).
    pub fn cofacet_indices(&self, k: isize, idx: usize) -> &[(VertexId, usize)] {
        &self.levels[(k + 1) as usize].cofacets[idx]
    }

    /// Link of tau: the complex on the vertices joinable with tau, with
    /// weight m_tau(sigma) = m(tau U sigma). Vertices are re-indexed densely
    /// (order-preserving); the returned map sends link ids back to parent ids.
    pub fn link(&self, tau: &Simplex) -> Result<Link> {
        if !self.contains_simplex(tau) {
            return Err(HdxError::SimplexNotInComplex(tau.vertices().to_vec()));
        }
        if tau.dim() >= self.n as isize {
            return Err(HdxError::DimensionOutOfRange {
                k: tau.dim(),
                lo: -1,
                hi: self.n as isize - 1,
            });
        }
        let mut link_facets: Vec<(Simplex, f64)> = Vec::new();
        for f in self.facets() {
            if tau.is_face_of(f) {
                link_facets.push((f.difference(tau), self.weight(f)));
            }
        }
        let verts: BTreeSet<VertexId> = link_facets
            .iter()
            .flat_map(|(s, _)| s.vertices().iter().copied())
            .collect();
        let to_parent: Vec<VertexId> = verts.into_iter().collect();
        let to_link: HashMap<VertexId, VertexId> = to_parent
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        let facets: Vec<Vec<VertexId>> = link_facets
            .iter()
            .map(|(s, _)| s.vertices().iter().map(|v| to_link[v]).collect())
            .collect();
        let weights: Vec<f64> = link_facets.iter().map(|(_, w)| *w).collect();
        let mut complex = WeightedComplex::from_facets(facets, Some(weights))?;
        if let Some(p) = &self.partition {
            let labels: Vec<usize> = to_parent.iter().map(|&v| p[v]).collect();
            // Side labels are inherited from the parent; the link of a
            // j-simplex in an (n+1)-partite complex is (n-j)-partite.
            complex.partition = Some(labels);
        }
        Ok(Link {
            complex,
            to_parent,
            tau: tau.clone(),
        })
    }

    /// Adjacency over the 1-skeleton.
    fn vertex_adjacency(&self) -> Vec<Vec<VertexId>> {
        let mut adj = vec![Vec::new(); self.num_vertices()];
        if self.n >= 1 {
            for e in self.simplices(1) {
                let (a, b) = (e.vertices()[0], e.vertices()[1]);
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        adj
    }

    /// Is the 1-skeleton connected?
    pub fn is_connected(&self) -> bool {
        let v = self.num_vertices();
        if v <= 1 {
            return true;
        }
        if self.n == 0 {
            return false;
        }
        let adj = self.vertex_adjacency();
        let mut seen = vec![false; v];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == v
    }

    /// Components of the facet graph (facets adjacent through shared
    /// (n-1)-faces), as a component id per facet.
    fn facet_components(&self) -> Vec<usize> {
        let facets = self.facets();
        let mut by_ridge: HashMap<Simplex, Vec<usize>> = HashMap::new();
        for (i, f) in facets.iter().enumerate() {
            for r in f.faces() {
                by_ridge.entry(r).or_default().push(i);
            }
        }
        let mut comp = vec![usize::MAX; facets.len()];
        let mut adj = vec![Vec::new(); facets.len()];
        for group in by_ridge.values() {
            for i in 0..group.len() {
                for j in i + 1..group.len() {
                    adj[group[i]].push(group[j]);
                    adj[group[j]].push(group[i]);
                }
            }
        }
        let mut next = 0;
        for start in 0..facets.len() {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = next;
            while let Some(u) = stack.pop() {
                for &w in &adj[u] {
                    if comp[w] == usize::MAX {
                        comp[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Gallery connectivity: every vertex pair is joined by a chain of
    /// facets consecutively sharing (n-1)-faces.
    pub fn is_gallery_connected(&self) -> bool {
        let comp = self.facet_components();
        let facets = self.facets();
        let mut comps_of_vertex: Vec<BTreeSet<usize>> =
            vec![BTreeSet::new(); self.num_vertices()];
        for (i, f) in facets.iter().enumerate() {
            for &v in f.vertices() {
                comps_of_vertex[v].insert(comp[i]);
            }
        }
        let v = self.num_vertices();
        for a in 0..v {
            for b in a + 1..v {
                if comps_of_vertex[a].is_disjoint(&comps_of_vertex[b]) {
                    return false;
                }
            }
        }
        true
    }

    /// Connectivity of the complex, of every link of dimension > 0, and
    /// gallery connectivity.
    pub fn connectivity_report(&self) -> ConnectivityReport {
        let mut links = Vec::new();
        let mut all_connected = true;
        // Links of dimension > 0 come from simplices of dimension <= n-2.
        for k in -1..=(self.n as isize - 2) {
            for tau in self.simplices(k) {
                let link = self.link(tau).expect("simplex is in the complex");
                let connected = link.complex.is_connected();
                all_connected &= connected;
                links.push(LinkConnectivity {
                    tau: tau.vertices().to_vec(),
                    link_dim: link.complex.dim(),
                    connected,
                });
            }
        }
        ConnectivityReport {
            complex_connected: self.is_connected(),
            all_links_connected: all_connected,
            gallery_connected: self.is_gallery_connected(),
            links,
        }
    }

    /// Verifies the defining weight recursion and the factorial identity
    /// `sum_{sigma in X^(l), tau subset sigma} m(sigma) = m(tau) / (l-k)!`
    /// for every tau of dimension k < l. Returns the worst relative error.
    pub fn weight_identity_error(&self, l: isize) -> f64 {
        assert!(l >= 0 && l <= self.n as isize);
        let mut worst: f64 = 0.0;
        for k in -1..l {
            for tau in self.simplices(k) {
                let sum: f64 = self
                    .simplices(l)
                    .iter()
                    .filter(|s| tau.is_face_of(s))
                    .map(|s| self.weight(s))
                    .sum();
                let expected = self.weight(tau) / factorial((l - k) as usize);
                let scale = expected.abs().max(1e-300);
                worst = worst.max((sum - expected).abs() / scale);
            }
        }
        worst
    }

    /// Certificate form of [`WeightedComplex::weight_identity_error`]: the
    /// factorial identity at one level, relative tolerance 1e-12.
    pub fn weight_formula_check(&self, l: isize) -> crate::cert::Certificate {
        crate::cert::Certificate::check_le(
            format!("weights.factorial.l{l}"),
            format!("sum of level-{l} weights over cofaces of tau equals m(tau)/({l}-k)! for all k < {l}"),
            self.weight_identity_error(l),
            0.0,
            1e-12,
        )
    }

    /// Worst relative defect of the one-step recursion
    /// `m(tau) = sum of cofacet weights`.
    pub fn weight_recursion_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in -1..self.n as isize {
            for tau in self.simplices(k) {
                let sum: f64 = self.cofacets(tau).iter().map(|(_, c)| self.weight(c)).sum();
                let m = self.weight(tau);
                worst = worst.max((sum - m).abs() / m.abs().max(1e-300));
            }
        }
        worst
    }

    /// Permutes vertex ids by `perm` (a bijection old -> new). Used to test
    /// relabeling invariance.
    pub fn relabeled(&self, perm: &[VertexId]) -> Result<WeightedComplex> {
        let facets: Vec<Vec<VertexId>> = self
            .facets()
            .iter()
            .map(|f| f.vertices().iter().map(|&v| perm[v]).collect())
            .collect();
        let weights: Vec<f64> = self.facets().iter().map(|f| self.weight(f)).collect();
        let mut c = WeightedComplex::from_facets(facets, Some(weights))?;
        if let Some(p) = &self.partition {
            let mut labels = vec![0usize; p.len()];
            for v in 0..p.len() {
                labels[perm[v]] = p[v];
            }
            c.partition = Some(labels);
        }
        Ok(c)
    }
}

/// A link together with its vertex back-map into the parent complex.
#[derive(Clone, Debug)]
pub struct Link {
    pub complex: WeightedComplex,
    /// link vertex id -> parent vertex id
    pub to_parent: Vec<VertexId>,
    /// The simplex whose link this is (parent ids).
    pub tau: Simplex,
}

impl Link {
    /// Maps a link-local simplex back to parent vertex ids.
    pub fn pull_back(&self, s: &Simplex) -> Simplex {
        Simplex::new(s.vertices().iter().map(|&v| self.to_parent[v]).collect())
    }

    /// Maps a parent simplex (disjoint from tau, all vertices in the link)
    /// to link-local ids; `None` if some vertex is not a link vertex.
    pub fn push_down(&self, s: &Simplex) -> Option<Simplex> {
        let mut verts = Vec::with_capacity(s.vertices().len());
        for &v in s.vertices() {
            let i = self.to_parent.binary_search(&v).ok()?;
            verts.push(i);
        }
        Some(Simplex::from_sorted(verts))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinkConnectivity {
    pub tau: Vec<VertexId>,
    pub link_dim: usize,
    pub connected: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConnectivityReport {
    pub complex_connected: bool,
    pub all_links_connected: bool,
    pub gallery_connected: bool,
    pub links: Vec<LinkConnectivity>,
}

impl ConnectivityReport {
    /// The standing hypothesis: complex connected and all links of
    /// dimension > 0 connected.
    pub fn hypothesis_holds(&self) -> bool {
        self.complex_connected && self.all_links_connected
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4_skeleton() -> WeightedComplex {
        WeightedComplex::from_facets(
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
            None,
        )
        .unwrap()
    }

    #[test]
    fn single_triangle_weights() {
        let x = WeightedComplex::from_facets(vec![vec![0, 1, 2]], None).unwrap();
        assert_eq!(x.dim(), 2);
        for e in x.simplices(1) {
            assert_eq!(x.weight(e), 1.0);
        }
        for v in x.simplices(0) {
            assert_eq!(x.weight(v), 2.0);
        }
        assert_eq!(x.empty_weight(), 6.0);
    }

    #[test]
    fn k4_weights() {
        let x = k4_skeleton();
        for e in x.simplices(1) {
            assert_eq!(x.weight(e), 2.0);
        }
        for v in x.simplices(0) {
            assert_eq!(x.weight(v), 6.0);
        }
        assert_eq!(x.empty_weight(), 24.0);
        assert_eq!(x.weight_recursion_error(), 0.0);
    }

    #[test]
    fn single_vertex_complex() {
        let x = WeightedComplex::from_facets(vec![vec![0]], None).unwrap();
        assert_eq!(x.dim(), 0);
        assert_eq!(x.weight(&Simplex::new(vec![0])), 1.0);
        assert_eq!(x.empty_weight(), 1.0);
    }

    #[test]
    fn build_errors() {
        assert!(matches!(
            WeightedComplex::from_facets(vec![vec![0, 1], vec![0, 1, 2]], None),
            Err(HdxError::MixedFacetDimensions { .. })
        ));
        assert!(matches!(
            WeightedComplex::from_facets(vec![vec![0, 1]], Some(vec![0.0])),
            Err(HdxError::NonPositiveWeight(_))
        ));
        assert!(matches!(
            WeightedComplex::from_facets(vec![vec![0, 1], vec![1, 0]], None),
            Err(HdxError::DuplicateFacet(_))
        ));
    }

    #[test]
    fn weight_factorial_identity() {
        let x = k4_skeleton();
        for l in 0..=2 {
            assert!(x.weight_identity_error(l) < 1e-15);
        }
        // l=1, tau=vertex: m(v)/1! = 6 = 3 edges x weight 2
        let v = Simplex::new(vec![0]);
        let sum: f64 = x
            .simplices(1)
            .iter()
            .filter(|e| v.is_face_of(e))
            .map(|e| x.weight(e))
            .sum();
        assert_eq!(sum, 6.0);
    }

    #[test]
    fn homogeneous_integer_mirror() {
        let x = k4_skeleton();
        for k in -1..=2isize {
            for s in x.simplices(k) {
                let exact = x.homogeneous_integer_weight(s).unwrap();
                assert_eq!(x.weight(s), exact as f64);
            }
        }
    }

    #[test]
    fn link_of_vertex_in_k4() {
        let x = k4_skeleton();
        let link = x.link(&Simplex::new(vec![0])).unwrap();
        assert_eq!(link.complex.dim(), 1);
        assert_eq!(link.complex.num_vertices(), 3);
        assert_eq!(link.to_parent, vec![1, 2, 3]);
        for v in link.complex.simplices(0) {
            assert_eq!(link.complex.weight(v), 2.0);
        }
        for e in link.complex.simplices(1) {
            assert_eq!(link.complex.weight(e), 1.0);
        }
    }

    #[test]
    fn link_of_empty_is_complex() {
        let x = k4_skeleton();
        let link = x.link(&Simplex::empty()).unwrap();
        assert_eq!(link.complex.dim(), 2);
        assert_eq!(link.complex.num_simplices(2), 4);
        assert_eq!(link.complex.empty_weight(), x.empty_weight());
    }

    #[test]
    fn link_of_edge_in_triangle() {
        let x = WeightedComplex::from_facets(vec![vec![0, 1, 2]], None).unwrap();
        let link = x.link(&Simplex::new(vec![0, 1])).unwrap();
        assert_eq!(link.complex.dim(), 0);
        assert_eq!(link.complex.num_vertices(), 1);
        assert_eq!(link.to_parent, vec![2]);
        assert_eq!(link.complex.weight(&Simplex::new(vec![0])), 1.0);
    }

    #[test]
    fn link_composition() {
        // link(link(X, tau), sigma) == link(X, tau U sigma) up to re-indexing
        let x = WeightedComplex::from_facets(
            vec![
                vec![0, 1, 2, 3],
                vec![0, 1, 2, 4],
                vec![0, 1, 3, 4],
                vec![0, 2, 3, 4],
                vec![1, 2, 3, 4],
            ],
            None,
        )
        .unwrap();
        let tau = Simplex::new(vec![0]);
        let l1 = x.link(&tau).unwrap();
        let sigma_parent = Simplex::new(vec![1]);
        let sigma_local = l1.push_down(&sigma_parent).unwrap();
        let l2 = l1.complex.link(&sigma_local).unwrap();
        let direct = x.link(&Simplex::new(vec![0, 1])).unwrap();
        assert_eq!(l2.complex.dim(), direct.complex.dim());
        for k in -1..=l2.complex.dim() as isize {
            assert_eq!(l2.complex.num_simplices(k), direct.complex.num_simplices(k));
            for s in l2.complex.simplices(k) {
                // pull back through both links and compare weights exactly
                let parent = l1.pull_back(&l2.pull_back(s));
                let in_direct = direct.push_down(&parent).unwrap();
                assert_eq!(l2.complex.weight(s), direct.complex.weight(&in_direct));
            }
        }
    }

    #[test]
    fn connectivity_reports() {
        let x = k4_skeleton();
        let rep = x.connectivity_report();
        assert!(rep.complex_connected);
        assert!(rep.all_links_connected);
        assert!(rep.gallery_connected);

        let two = WeightedComplex::from_facets(vec![vec![0, 1, 2], vec![3, 4, 5]], None).unwrap();
        let rep = two.connectivity_report();
        assert!(!rep.complex_connected);
        assert!(!rep.gallery_connected);

        let single = WeightedComplex::from_facets(vec![vec![0, 1, 2]], None).unwrap();
        let rep = single.connectivity_report();
        assert!(rep.complex_connected);
        assert!(rep.all_links_connected);
        assert!(rep.gallery_connected);

        // two triangles sharing one vertex: connected but not gallery connected,
        // and the shared vertex has a disconnected link
        let pinch =
            WeightedComplex::from_facets(vec![vec![0, 1, 2], vec![2, 3, 4]], None).unwrap();
        let rep = pinch.connectivity_report();
        assert!(rep.complex_connected);
        assert!(!rep.all_links_connected);
        assert!(!rep.gallery_connected);
    }

    #[test]
    fn ordered_enumeration() {
        let x = WeightedComplex::from_facets(vec![vec![0, 1, 2]], None).unwrap();
        assert_eq!(x.enumerate_ordered(1).unwrap().len(), 6);
        assert_eq!(x.enumerate_ordered(-1).unwrap(), vec![Vec::<VertexId>::new()]);
        let k4 = k4_skeleton();
        assert_eq!(k4.enumerate_ordered(2).unwrap().len(), 24);
    }

    #[test]
    fn partition_validation() {
        let x = WeightedComplex::from_facets(vec![vec![0, 1], vec![0, 3], vec![2, 1], vec![2, 3]], None)
            .unwrap()
            .with_partition(vec![0, 1, 0, 1])
            .unwrap();
        assert_eq!(x.side_vertices(0), vec![0, 2]);
        let bad = WeightedComplex::from_facets(vec![vec![0, 1]], None)
            .unwrap()
            .with_partition(vec![0, 0]);
        assert!(bad.is_err());
    }
}
