//! Low-dimensional geometric primitives: barycentric containment tests,
//! segment intersections, and line-side classification.
//!
//! All tests use closed-hull semantics with the unified tolerance 1e-9:
//! boundary points count as inside.

pub const GEOM_TOL: f64 = 1e-9;

/// Euclidean point, dimension implied by length.
pub type Point = Vec<f64>;

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Distance from p to the segment [a, b].
pub fn point_segment_distance(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab = sub(b, a);
    let ap = sub(p, a);
    let len_sq: f64 = ab.iter().map(|x| x * x).sum();
    if len_sq == 0.0 {
        return norm(&ap);
    }
    let t = (ab.iter().zip(&ap).map(|(x, y)| x * y).sum::<f64>() / len_sq).clamp(0.0, 1.0);
    let proj: Vec<f64> = a.iter().zip(&ab).map(|(x, d)| x + t * d).collect();
    norm(&sub(p, &proj))
}

/// Signed double area of the triangle (a, b, c) in the plane.
pub fn orient2d(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Is p inside the closed simplex spanned by `verts` (d+1 points in R^d)?
///
/// Solves the barycentric system; a degenerate (affinely dependent) simplex
/// falls back to distance-to-hull in dimensions 1 and 2, treating a point
/// within GEOM_TOL of the hull as inside.
pub fn point_in_closed_simplex(p: &[f64], verts: &[Point]) -> bool {
    let d = p.len();
    assert!(verts.iter().all(|v| v.len() == d), "dimension mismatch");
    assert_eq!(verts.len(), d + 1, "need d+1 vertices");
    // Solve sum lambda_i v_i = p, sum lambda_i = 1.
    let m = d + 1;
    let mut a = vec![vec![0.0; m + 1]; m];
    for row in 0..d {
        for (col, v) in verts.iter().enumerate() {
            a[row][col] = v[row];
        }
        a[row][m] = p[row];
    }
    for col in 0..m {
        a[d][col] = 1.0;
    }
    a[d][m] = 1.0;
    // scale for the pivot threshold
    let scale = verts
        .iter()
        .flat_map(|v| v.iter())
        .fold(1.0f64, |acc, &x| acc.max(x.abs()));
    if let Some(lambda) = solve(&mut a, 1e-12 * scale) {
        // a slightly negative coordinate within tolerance counts as inside
        return lambda.iter().all(|&l| l >= -GEOM_TOL);
    }
    // Degenerate simplex: closed-hull distance fallback.
    match d {
        1 => {
            let lo = verts.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
            let hi = verts.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
            p[0] >= lo - GEOM_TOL && p[0] <= hi + GEOM_TOL
        }
        2 => {
            // hull of <= 3 (affinely dependent) points is a segment or point
            let mut best = f64::INFINITY;
            for i in 0..verts.len() {
                for j in i + 1..verts.len() {
                    best = best.min(point_segment_distance(p, &verts[i], &verts[j]));
                }
            }
            for v in verts {
                best = best.min(norm(&sub(p, v)));
            }
            best <= GEOM_TOL
        }
        _ => false,
    }
}

/// Gaussian elimination with partial pivoting on an augmented matrix;
/// `None` when a pivot falls below `tol`.
fn solve(a: &mut [Vec<f64>], tol: f64) -> Option<Vec<f64>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= tol {
            return None;
        }
        a.swap(col, pivot);
        for row in 0..n {
            if row != col {
                let f = a[row][col] / a[col][col];
                for k in col..=n {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

/// Intersection point of the closed segments [a1, a2] and [b1, b2] in the
/// plane, when they cross at a single point (including endpoints touching).
/// Collinear overlaps return `None`; their endpoints are already candidate
/// points for the callers.
pub fn segment_intersection(a1: &[f64], a2: &[f64], b1: &[f64], b2: &[f64]) -> Option<Point> {
    let d1 = sub(a2, a1);
    let d2 = sub(b2, b1);
    let denom = d1[0] * d2[1] - d1[1] * d2[0];
    let scale = norm(&d1).max(norm(&d2)).max(1.0);
    if denom.abs() <= 1e-14 * scale * scale {
        return None;
    }
    let dx = b1[0] - a1[0];
    let dy = b1[1] - a1[1];
    let t = (dx * d2[1] - dy * d2[0]) / denom;
    let s = (dx * d1[1] - dy * d1[0]) / denom;
    let eps = GEOM_TOL / scale;
    if t < -eps || t > 1.0 + eps || s < -eps || s > 1.0 + eps {
        return None;
    }
    Some(vec![a1[0] + t * d1[0], a1[1] + t * d1[1]])
}

/// Does the line through (p, q) meet the convex hull of `body`
/// (within GEOM_TOL)? A body meets the line unless it lies strictly on one
/// side.
pub fn line_meets_hull(p: &[f64], q: &[f64], body: &[Point]) -> bool {
    let scale = norm(&sub(q, p)).max(1.0);
    let mut pos = false;
    let mut neg = false;
    for v in body {
        let s = orient2d(p, q, v);
        if s > GEOM_TOL * scale {
            pos = true;
        } else if s < -GEOM_TOL * scale {
            neg = true;
        } else {
            return true; // touches the line
        }
    }
    pos && neg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_containment() {
        let verts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(point_in_closed_simplex(&[0.25, 0.25], &verts));
        // vertices of the closed simplex count
        assert!(point_in_closed_simplex(&[0.0, 0.0], &verts));
        // boundary
        assert!(point_in_closed_simplex(&[0.5, 0.5], &verts));
        assert!(!point_in_closed_simplex(&[2.0, 2.0], &verts));
        assert!(!point_in_closed_simplex(&[-0.1, 0.5], &verts));
    }

    #[test]
    fn degenerate_triangle_is_a_segment() {
        let verts = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
        assert!(point_in_closed_simplex(&[1.5, 1.5], &verts));
        assert!(!point_in_closed_simplex(&[1.0, 0.0], &verts));
    }

    #[test]
    fn interval_containment() {
        let verts = vec![vec![0.0], vec![2.0]];
        assert!(point_in_closed_simplex(&[1.0], &verts));
        assert!(point_in_closed_simplex(&[0.0], &verts));
        assert!(!point_in_closed_simplex(&[2.1], &verts));
    }

    #[test]
    fn segment_crossing() {
        let p = segment_intersection(&[0.0, 0.0], &[1.0, 1.0], &[0.0, 1.0], &[1.0, 0.0]).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
        assert!(segment_intersection(&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]).is_none());
        // touching at an endpoint counts
        assert!(segment_intersection(&[0.0, 0.0], &[1.0, 0.0], &[1.0, 0.0], &[1.0, 1.0]).is_some());
    }

    #[test]
    fn line_hull_meeting() {
        let body = vec![vec![2.0, 1.0], vec![3.0, 1.0], vec![2.5, 2.0]];
        assert!(!line_meets_hull(&[0.0, 0.0], &[1.0, 0.0], &body));
        assert!(line_meets_hull(&[0.0, 1.5], &[1.0, 1.5], &body));
    }
}
