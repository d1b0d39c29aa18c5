//! Simplices on dense vertex indices.
//!
//! A simplex is stored canonically as a strictly increasing vertex list; the
//! empty list is the empty simplex of dimension -1. Ordered simplices are
//! plain vertex sequences whose evaluation order matters only through the
//! parity of the permutation that sorts them.

/// Dense vertex index in `0..num_vertices`.
pub type VertexId = usize;

/// Canonical (sorted, duplicate-free) simplex. The empty simplex is allowed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex {
    verts: Vec<VertexId>,
}

impl Simplex {
    /// The empty simplex of dimension -1.
    pub fn empty() -> Self {
        Simplex { verts: Vec::new() }
    }

    /// Builds a simplex from vertices, sorting them.
    ///
    /// Panics on duplicate vertices.
    pub fn new(mut verts: Vec<VertexId>) -> Self {
        verts.sort_unstable();
        assert!(
            verts.windows(2).all(|w| w[0] < w[1]),
            "simplex vertices must be distinct: {verts:?}"
        );
        Simplex { verts }
    }

    /// Builds from a slice already known to be strictly increasing.
    pub fn from_sorted(verts: Vec<VertexId>) -> Self {
        debug_assert!(verts.windows(2).all(|w| w[0] < w[1]));
        Simplex { verts }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.verts
    }

    /// Dimension, -1 for the empty simplex.
    pub fn dim(&self) -> isize {
        self.verts.len() as isize - 1
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.verts.binary_search(&v).is_ok()
    }

    /// True when every vertex of `self` is a vertex of `other`.
    pub fn is_face_of(&self, other: &Simplex) -> bool {
        let mut it = other.verts.iter();
        self.verts
            .iter()
            .all(|v| it.by_ref().any(|w| w == v))
    }

    /// The face obtained by deleting the vertex at position `i`.
    pub fn face(&self, i: usize) -> Simplex {
        let mut verts = self.verts.clone();
        verts.remove(i);
        Simplex { verts }
    }

    /// All codimension-one faces, in vertex-deletion order.
    pub fn faces(&self) -> Vec<Simplex> {
        (0..self.verts.len()).map(|i| self.face(i)).collect()
    }

    /// Union with a disjoint simplex; panics if the vertex sets meet.
    pub fn union(&self, other: &Simplex) -> Simplex {
        let mut verts = Vec::with_capacity(self.verts.len() + other.verts.len());
        verts.extend_from_slice(&self.verts);
        verts.extend_from_slice(&other.verts);
        Simplex::new(verts)
    }

    /// Set union, deduplicating shared vertices.
    pub fn merge(&self, other: &Simplex) -> Simplex {
        let mut verts = Vec::with_capacity(self.verts.len() + other.verts.len());
        verts.extend_from_slice(&self.verts);
        verts.extend_from_slice(&other.verts);
        verts.sort_unstable();
        verts.dedup();
        Simplex::from_sorted(verts)
    }

    /// Inserts one vertex; panics if already present.
    pub fn with_vertex(&self, v: VertexId) -> Simplex {
        let pos = self
            .verts
            .binary_search(&v)
            .expect_err("vertex already in simplex");
        let mut verts = self.verts.clone();
        verts.insert(pos, v);
        Simplex { verts }
    }

    /// Position `v` would take when inserted into the sorted vertex list.
    pub fn insertion_index(&self, v: VertexId) -> usize {
        match self.verts.binary_search(&v) {
            Ok(i) | Err(i) => i,
        }
    }

    /// Deletes the vertices of `other` (a subset) from `self`.
    pub fn difference(&self, other: &Simplex) -> Simplex {
        let verts: Vec<VertexId> = self
            .verts
            .iter()
            .copied()
            .filter(|v| !other.contains(*v))
            .collect();
        Simplex { verts }
    }
}

/// Ordered simplex: a sequence of distinct vertices, order significant.
pub type OrderedSimplex = Vec<VertexId>;

/// Sign of the permutation sorting `ordered`, together with its canonical
/// simplex. Returns `None` if the vertices are not distinct.
pub fn sort_sign(ordered: &[VertexId]) -> Option<(f64, Simplex)> {
    let mut v: Vec<VertexId> = ordered.to_vec();
    // Insertion sort counting inversions; ordered simplices are tiny.
    let mut inversions = 0usize;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            inversions += 1;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
    Some((sign, Simplex::from_sorted(v)))
}

/// All orderings of a canonical simplex, lexicographic in the permutation.
pub fn orderings(s: &Simplex) -> Vec<OrderedSimplex> {
    use itertools::Itertools;
    if s.is_empty() {
        return vec![Vec::new()];
    }
    s.vertices()
        .iter()
        .copied()
        .permutations(s.vertices().len())
        .collect()
}

/// k! as f64 (exact for the small k used here).
pub fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

/// k! as u128.
pub fn factorial_u128(k: usize) -> u128 {
    (1..=k as u128).product()
}
