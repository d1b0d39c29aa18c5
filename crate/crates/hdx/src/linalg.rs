//! Small dense matrices and a cyclic Jacobi eigensolver.
//!
//! Everything here operates on row-major `f64` storage. The complexes are
//! desk-scale, so dense O(n^3) methods are deliberate: they are deterministic
//! and accurate to near machine precision, which the certificate tolerances
//! rely on.

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<f64>,
}

impl DMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DMat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row);
        }
        DMat { rows: r, cols: c, data }
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> DMat {
        let mut t = DMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &DMat) -> DMat {
        assert_eq!(self.cols, other.rows);
        let mut out = DMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = self.row(i);
            out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    pub fn scale(&self, s: f64) -> DMat {
        let mut out = self.clone();
        for x in &mut out.data {
            *x *= s;
        }
        out
    }

    pub fn add(&self, other: &DMat) -> DMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&other.data) {
            *x += *y;
        }
        out
    }

    pub fn sub(&self, other: &DMat) -> DMat {
        self.add(&other.scale(-1.0))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |a, &x| a.max(x.abs()))
    }

    /// Off-diagonal Frobenius norm (square matrices).
    pub fn off_diagonal_frobenius(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    s += self[(i, j)] * self[(i, j)];
                }
            }
        }
        s.sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for DMat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigendecomposition of a symmetric matrix: ascending eigenvalues with the
/// matching eigenvectors as columns of `vectors`.
#[derive(Clone, Debug)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: DMat,
}

/// Cyclic Jacobi eigensolver for symmetric matrices.
///
/// Sweeps all (p, q) pairs rotating away off-diagonal entries until the
/// off-diagonal Frobenius norm drops below `1e-12` relative to the matrix
/// Frobenius norm.
pub fn jacobi_eigen(a: &DMat) -> SymEigen {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut d = a.clone();
    let mut v = DMat::identity(n);
    let scale = a.frobenius().max(f64::MIN_POSITIVE);
    let tol = 1e-12 * scale;
    let max_sweeps = 60;

    for _ in 0..max_sweeps {
        if d.off_diagonal_frobenius() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = d[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = d[(p, p)];
                let aqq = d[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for i in 0..n {
                    if i != p && i != q {
                        let dip = d[(i, p)];
                        let diq = d[(i, q)];
                        d[(i, p)] = c * dip - s * diq;
                        d[(p, i)] = d[(i, p)];
                        d[(i, q)] = s * dip + c * diq;
                        d[(q, i)] = d[(i, q)];
                    }
                }
                d[(p, p)] = app - t * apq;
                d[(q, q)] = aqq + t * apq;
                d[(p, q)] = 0.0;
                d[(q, p)] = 0.0;

                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip - s * viq;
                    v[(i, q)] = s * vip + c * viq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[(i, i)].total_cmp(&d[(j, j)]));
    let values: Vec<f64> = order.iter().map(|&i| d[(i, i)]).collect();
    let mut vectors = DMat::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, col)] = v[(r, i)];
        }
    }
    SymEigen { values, vectors }
}

/// Rank with an absolute singular-value threshold, computed from the
/// eigenvalues of A^T A (or A A^T, whichever is smaller).
pub fn rank(a: &DMat, sv_threshold: f64) -> usize {
    if a.rows == 0 || a.cols == 0 {
        return 0;
    }
    let gram = if a.rows >= a.cols {
        a.transpose().matmul(a)
    } else {
        a.matmul(&a.transpose())
    };
    let eig = jacobi_eigen(&gram);
    let max = eig.values.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    // Gram eigenvalues carry ~eps * ||gram|| of solver noise; without this
    // floor the square root inflates a 1e-15 zero to a 3e-8 singular value.
    let noise_floor = 1e3 * f64::EPSILON * max.max(1.0);
    eig.values
        .iter()
        .filter(|&&x| x > noise_floor && x.sqrt() > sv_threshold)
        .count()
}

/// Euclidean norm.
pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Euclidean inner product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
