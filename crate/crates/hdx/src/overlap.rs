//! Geometric overlap measurement and the desk-scale constructive pieces:
//! brute-force overlap and centerpoint search, balanced partitions, the
//! alpha constant, separated families, and the threshold formulas.
//!
//! Exact overlap search is limited to dimensions 1 and 2, where the covered
//! weight is piecewise constant on the arrangement of the image segments, so
//! the maximum over the plane is attained at a candidate point: an image
//! vertex, a pairwise segment intersection, or a face-interior point. Any
//! dimension is supported in grid-sampling mode at a stated resolution.
//!
//! The threshold formulas are parametric in the unquantified constants
//! omega(n) and c(n); no defaults are invented.

use serde::{Deserialize, Serialize};

use crate::complex::WeightedComplex;
use crate::error::{HdxError, Result};
use crate::geometry::{
    line_meets_hull, point_in_closed_simplex, segment_intersection, Point, GEOM_TOL,
};
use crate::simplex::VertexId;

/// Vertex coordinates in R^d, d = dim of the complex.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Embedding {
    pub coords: Vec<Point>,
}

impl Embedding {
    pub fn new(coords: Vec<Point>) -> Result<Self> {
        if coords.is_empty() {
            return Err(HdxError::InvalidParameter("empty embedding".into()));
        }
        let d = coords[0].len();
        if coords.iter().any(|p| p.len() != d || p.iter().any(|x| !x.is_finite())) {
            return Err(HdxError::InvalidParameter(
                "embedding points must share a dimension and be finite".into(),
            ));
        }
        Ok(Embedding { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords[0].len()
    }

    /// No d+1 of the image points affinely dependent (within tolerance);
    /// implemented for d <= 2 (d = 1: pairwise distinct, d = 2: no collinear
    /// triple).
    pub fn general_position(&self) -> bool {
        match self.dim() {
            1 => {
                for i in 0..self.coords.len() {
                    for j in i + 1..self.coords.len() {
                        if (self.coords[i][0] - self.coords[j][0]).abs() <= GEOM_TOL {
                            return false;
                        }
                    }
                }
                true
            }
            2 => {
                let pts = &self.coords;
                for i in 0..pts.len() {
                    for j in i + 1..pts.len() {
                        for k in j + 1..pts.len() {
                            if crate::geometry::orient2d(&pts[i], &pts[j], &pts[k]).abs()
                                <= GEOM_TOL
                            {
                                return false;
                            }
                        }
                    }
                }
                true
            }
            _ => false,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OverlapResult {
    pub best_point: Point,
    pub covered_weight: f64,
    /// covered_weight / m(top level)
    pub ratio: f64,
    /// Candidate points examined.
    pub candidates: usize,
}

/// Covered weight at one point: total weight of the facets whose affine
/// image contains it.
pub fn covered_weight(x: &WeightedComplex, phi: &Embedding, p: &[f64]) -> f64 {
    x.facets()
        .iter()
        .filter(|f| {
            let verts: Vec<Point> = f.vertices().iter().map(|&v| phi.coords[v].clone()).collect();
            point_in_closed_simplex(p, &verts)
        })
        .map(|f| x.weight(f))
        .sum()
}

/// Exact brute-force overlap for dimensions 1 and 2: maximizes the covered
/// weight over the candidate set (image vertices, pairwise segment
/// intersections, facet-image centroids). Ties break toward the
/// lexicographically smallest point.
pub fn overlap_bruteforce(x: &WeightedComplex, phi: &Embedding) -> Result<OverlapResult> {
    let n = x.dim();
    if phi.coords.len() != x.num_vertices() {
        return Err(HdxError::InvalidParameter(format!(
            "embedding has {} points for {} vertices",
            phi.coords.len(),
            x.num_vertices()
        )));
    }
    if phi.dim() != n {
        return Err(HdxError::InvalidParameter(format!(
            "embedding dimension {} does not match complex dimension {n}",
            phi.dim()
        )));
    }
    if n == 0 || n > 2 {
        return Err(HdxError::OverlapDimension(n));
    }
    let mut candidates: Vec<Point> = phi.coords.clone();
    if n == 2 {
        // segment-segment intersections over all image edges
        let mut segments = Vec::new();
        for e in x.simplices(1) {
            let a = &phi.coords[e.vertices()[0]];
            let b = &phi.coords[e.vertices()[1]];
            segments.push((a.clone(), b.clone()));
        }
        for i in 0..segments.len() {
            for j in i + 1..segments.len() {
                if let Some(p) = segment_intersection(
                    &segments[i].0,
                    &segments[i].1,
                    &segments[j].0,
                    &segments[j].1,
                ) {
                    candidates.push(p);
                }
            }
        }
        // face-interior points: facet-image centroids
        for f in x.facets() {
            let mut c = vec![0.0; 2];
            for &v in f.vertices() {
                c[0] += phi.coords[v][0];
                c[1] += phi.coords[v][1];
            }
            candidates.push(vec![c[0] / 3.0, c[1] / 3.0]);
        }
    }
    evaluate_candidates(x, phi, candidates)
}

/// Grid-sampling overlap for any dimension: `resolution` samples per axis
/// over the bounding box of the image.
pub fn overlap_grid(
    x: &WeightedComplex,
    phi: &Embedding,
    resolution: usize,
) -> Result<OverlapResult> {
    if resolution < 2 {
        return Err(HdxError::InvalidParameter(
            "grid resolution must be at least 2".into(),
        ));
    }
    let d = phi.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in &phi.coords {
        for i in 0..d {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let mut candidates = Vec::new();
    let mut idx = vec![0usize; d];
    loop {
        let p: Point = (0..d)
            .map(|i| lo[i] + (hi[i] - lo[i]) * idx[i] as f64 / (resolution - 1) as f64)
            .collect();
        candidates.push(p);
        let mut pos = 0;
        loop {
            if pos == d {
                return evaluate_candidates(x, phi, candidates);
            }
            idx[pos] += 1;
            if idx[pos] < resolution {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

fn evaluate_candidates(
    x: &WeightedComplex,
    phi: &Embedding,
    candidates: Vec<Point>,
) -> Result<OverlapResult> {
    let total: f64 = x.facets().iter().map(|f| x.weight(f)).sum();
    let mut best_point = None;
    let mut best = f64::NEG_INFINITY;
    for p in &candidates {
        let w = covered_weight(x, phi, p);
        let better = w > best + 1e-15
            || ((w - best).abs() <= 1e-15
                && best_point
                    .as_ref()
                    .map_or(true, |bp: &Point| lex_less(p, bp)));
        if better {
            best = w;
            best_point = Some(p.clone());
        }
    }
    let best_point = best_point.ok_or_else(|| {
        HdxError::InvalidParameter("no candidate points produced".into())
    })?;
    Ok(OverlapResult {
        best_point,
        covered_weight: best,
        ratio: best / total,
        candidates: candidates.len(),
    })
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// General overlap threshold
/// `min{ omega/(2(n+1)^2), A n! c/2 ((c/(2(n+1)))^n - E/A) }`; `applicable`
/// records `E/A < (c/(2(n+1)))^n`. omega and c are caller-supplied.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OverlapThreshold {
    pub epsilon: f64,
    pub applicable: bool,
}

pub fn overlap_threshold(n: usize, a_n: f64, e_n: f64, omega: f64, c: f64) -> OverlapThreshold {
    let nf = n as f64;
    let heavy = omega / (2.0 * (nf + 1.0).powi(2));
    let base = (c / (2.0 * (nf + 1.0))).powi(n as i32);
    let applicable = e_n / a_n < base;
    let second = a_n * crate::simplex::factorial(n) * c / 2.0 * (base - e_n / a_n);
    OverlapThreshold {
        epsilon: heavy.min(second),
        applicable,
    }
}

/// Partite overlap threshold `min{ omega/(n+1)^2, c (c^n - (n+1)! E) }`;
/// `applicable` records `E < c^n / n!`.
pub fn partite_overlap_threshold(n: usize, e_n: f64, omega: f64, c: f64) -> OverlapThreshold {
    let nf = n as f64;
    let heavy = omega / (nf + 1.0).powi(2);
    let second = c * (c.powi(n as i32) - crate::simplex::factorial(n + 1) * e_n);
    OverlapThreshold {
        epsilon: heavy.min(second),
        applicable: e_n < c.powi(n as i32) / crate::simplex::factorial(n),
    }
}

/// Result of the greedy balanced partition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BalancedPartition {
    pub sides: Vec<Vec<VertexId>>,
    pub side_weights: Vec<f64>,
    /// A vertex with weight >= m(V)/(2(n+1)), when one exists; the balance
    /// guarantee only holds without one.
    pub heavy_vertex: Option<(VertexId, f64)>,
}

/// Greedy partition into n+1 sides: vertices in descending weight order,
/// each to the currently lightest side (ties to the lowest index). When no
/// vertex is heavy, every side ends strictly above m(V)/(2(n+1)).
pub fn balanced_partition(weights: &[f64], n: usize) -> Result<BalancedPartition> {
    if weights.is_empty() || weights.iter().any(|&w| !(w > 0.0)) {
        return Err(HdxError::InvalidParameter(
            "weights must be positive and nonempty".into(),
        ));
    }
    let total: f64 = weights.iter().sum();
    let threshold = total / (2.0 * (n as f64 + 1.0));
    let heavy_vertex = weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w >= threshold)
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(v, &w)| (v, w));
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    let mut sides = vec![Vec::new(); n + 1];
    let mut side_weights = vec![0.0f64; n + 1];
    for v in order {
        let lightest = (0..=n)
            .min_by(|&a, &b| side_weights[a].total_cmp(&side_weights[b]))
            .expect("nonempty");
        sides[lightest].push(v);
        side_weights[lightest] += weights[v];
    }
    Ok(BalancedPartition {
        sides,
        side_weights,
        heavy_vertex,
    })
}

/// g(x) = sum_{i=0..n} (1-eps1)^(1-x) eps2^(i(1-x)), strictly increasing on
/// [0, 1); the alpha constant is the largest x with g(x) <= 1 - 1e-6, found
/// by bisection to 1e-10.
pub fn alpha_constant(n: usize, eps1: f64, eps2: f64) -> Result<f64> {
    if !(0.0 < eps1 && eps1 <= eps2 && eps2 < 1.0) {
        return Err(HdxError::InvalidParameter(format!(
            "need 0 < eps1 <= eps2 < 1, got ({eps1}, {eps2})"
        )));
    }
    let g = |x: f64| -> f64 {
        (0..=n)
            .map(|i| (1.0 - eps1).powf(1.0 - x) * eps2.powf(i as f64 * (1.0 - x)))
            .sum()
    };
    if g(0.0) >= 1.0 {
        return Err(HdxError::InvalidParameter(format!(
            "(1-eps1)/(1-eps2) (1-eps2^(n+1)) = {} >= 1",
            g(0.0)
        )));
    }
    let target = 1.0 - 1e-6;
    if g(1.0 - 1e-12) <= target {
        return Ok(1.0 - 1e-12);
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0 - 1e-12;
    while hi - lo > 1e-10 {
        let mid = (lo + hi) / 2.0;
        if g(mid) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// The always-valid choice eps2 = eps1 + (1-eps1) eps1^(n+1).
pub fn default_eps2(n: usize, eps1: f64) -> f64 {
    eps1 + (1.0 - eps1) * eps1.powi(n as i32 + 1)
}

/// A discrete measure in R^d with positive masses summing to 1 after
/// normalization.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    pub points: Vec<Point>,
    pub masses: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(points: Vec<Point>, masses: Vec<f64>) -> Result<Self> {
        if points.len() != masses.len() || points.is_empty() {
            return Err(HdxError::InvalidParameter(
                "measure needs matching nonempty points and masses".into(),
            ));
        }
        if masses.iter().any(|&m| !(m > 0.0)) {
            return Err(HdxError::InvalidParameter("masses must be positive".into()));
        }
        let total: f64 = masses.iter().sum();
        Ok(DiscreteMeasure {
            points,
            masses: masses.into_iter().map(|m| m / total).collect(),
        })
    }

    pub fn uniform(points: Vec<Point>) -> Result<Self> {
        let k = points.len();
        DiscreteMeasure::new(points, vec![1.0; k])
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CenterpointResult {
    pub point: Point,
    pub probability: f64,
    /// probability >= 1/(n+1)! - 1e-9
    pub meets_guarantee: bool,
}

/// Probability that a random simplex (one independent point per measure)
/// contains p.
pub fn containment_probability(measures: &[DiscreteMeasure], p: &[f64]) -> f64 {
    fn rec(measures: &[DiscreteMeasure], p: &[f64], picked: &mut Vec<(Point, f64)>) -> f64 {
        if picked.len() == measures.len() {
            let verts: Vec<Point> = picked.iter().map(|(q, _)| q.clone()).collect();
            let mass: f64 = picked.iter().map(|(_, m)| m).product();
            return if point_in_closed_simplex(p, &verts) {
                mass
            } else {
                0.0
            };
        }
        let i = picked.len();
        let mut total = 0.0;
        for (q, &m) in measures[i].points.iter().zip(&measures[i].masses) {
            picked.push((q.clone(), m));
            total += rec(measures, p, picked);
            picked.pop();
        }
        total
    }
    rec(measures, p, &mut Vec::new())
}

/// Brute-force centerpoint for n+1 discrete measures in R^n (n <= 2): the
/// candidate maximizing the probability that a random transversal simplex
/// contains it, compared against the guarantee 1/(n+1)!.
pub fn centerpoint_bruteforce(measures: &[DiscreteMeasure]) -> Result<CenterpointResult> {
    if measures.is_empty() {
        return Err(HdxError::InvalidParameter("no measures".into()));
    }
    let n = measures[0].points[0].len();
    if measures.len() != n + 1 {
        return Err(HdxError::InvalidParameter(format!(
            "need n+1 = {} measures in R^{n}, got {}",
            n + 1,
            measures.len()
        )));
    }
    if n == 0 || n > 2 {
        return Err(HdxError::OverlapDimension(n));
    }
    let all_points: Vec<Point> = measures
        .iter()
        .flat_map(|m| m.points.iter().cloned())
        .collect();
    let mut candidates = all_points.clone();
    if n == 2 {
        for i in 0..all_points.len() {
            for j in i + 1..all_points.len() {
                for a in 0..all_points.len() {
                    for b in a + 1..all_points.len() {
                        if (a, b) <= (i, j) {
                            continue;
                        }
                        if let Some(p) = segment_intersection(
                            &all_points[i],
                            &all_points[j],
                            &all_points[a],
                            &all_points[b],
                        ) {
                            candidates.push(p);
                        }
                    }
                }
            }
        }
    }
    let mut best_point = candidates[0].clone();
    let mut best = f64::NEG_INFINITY;
    for p in &candidates {
        let prob = containment_probability(measures, p);
        if prob > best + 1e-15 || ((prob - best).abs() <= 1e-15 && lex_less(p, &best_point)) {
            best = prob;
            best_point = p.clone();
        }
    }
    let guarantee = 1.0 / crate::simplex::factorial(n + 1);
    Ok(CenterpointResult {
        point: best_point,
        probability: best,
        meets_guarantee: best >= guarantee - 1e-9,
    })
}

/// Are the convex hulls C_0, ..., C_n together with the point O a separated
/// family in R^n (n <= 2): no hyperplane meets n+1 of the n+2 bodies?
///
/// Candidate hyperplanes pass through pairs of body vertices (including O);
/// a transversal, if one exists, can be slid to such a position.
pub fn separated_family_check(hulls: &[Vec<Point>], o: &[f64]) -> Result<bool> {
    if hulls.is_empty() {
        return Err(HdxError::InvalidParameter("no hulls".into()));
    }
    let n = o.len();
    if hulls.len() != n + 1 {
        return Err(HdxError::InvalidParameter(format!(
            "need n+1 = {} hulls plus the point in R^{n}",
            n + 1
        )));
    }
    let mut bodies: Vec<Vec<Point>> = hulls.to_vec();
    bodies.push(vec![o.to_vec()]);
    match n {
        1 => {
            // hyperplane = point: some point meets two bodies iff two of the
            // intervals intersect
            let intervals: Vec<(f64, f64)> = bodies
                .iter()
                .map(|b| {
                    let lo = b.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
                    let hi = b.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
                    (lo, hi)
                })
                .collect();
            for i in 0..intervals.len() {
                for j in i + 1..intervals.len() {
                    let (a, b) = intervals[i];
                    let (c, d) = intervals[j];
                    if a <= d + GEOM_TOL && c <= b + GEOM_TOL {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        2 => {
            // hyperplane = line: try lines through every pair of vertices and
            // count how many bodies each meets
            let all: Vec<Point> = bodies.iter().flatten().cloned().collect();
            for i in 0..all.len() {
                for j in i + 1..all.len() {
                    if all[i] == all[j] {
                        continue;
                    }
                    let meets = bodies
                        .iter()
                        .filter(|b| line_meets_hull(&all[i], &all[j], b))
                        .count();
                    if meets >= 3 {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        _ => Err(HdxError::OverlapDimension(n)),
    }
}
