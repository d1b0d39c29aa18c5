//! Dense matrices for d, delta, the Laplacians, and the partite side
//! operators, in the canonical-representative basis.
//!
//! In that basis the weighted inner product is the diagonal Gram matrix
//! G_k = diag(m(tau)) over canonical k-simplices (the (k+1)! ordering factor
//! cancels against the orbit count), so an operator A on k-forms is
//! self-adjoint iff G^{1/2} A G^{-1/2} is symmetric.
//!
//! delta is assembled twice, from the explicit weighted formula and as the
//! metric adjoint G_{k-1}^{-1} D^T G_k of the differential, and the two are
//! cross-asserted on every construction.

use std::io::Write;

use crate::complex::WeightedComplex;
use crate::error::{HdxError, Result};
use crate::linalg::DMat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LaplacianKind {
    Up,
    Down,
    Full,
}

/// A linear operator C^{k_in} -> C^{k_out} with the weight metrics of both
/// degrees attached.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub name: String,
    pub k_in: isize,
    pub k_out: isize,
    pub mat: DMat,
    /// m(tau) per canonical simplex of the input degree.
    pub metric_in: Vec<f64>,
    /// m(tau) per canonical simplex of the output degree.
    pub metric_out: Vec<f64>,
}

impl OperatorMatrix {
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.mat.matvec(v)
    }

    pub fn compose(&self, rhs: &OperatorMatrix, name: impl Into<String>) -> OperatorMatrix {
        assert_eq!(self.k_in, rhs.k_out);
        OperatorMatrix {
            name: name.into(),
            k_in: rhs.k_in,
            k_out: self.k_out,
            mat: self.mat.matmul(&rhs.mat),
            metric_in: rhs.metric_in.clone(),
            metric_out: self.metric_out.clone(),
        }
    }

    pub fn add(&self, rhs: &OperatorMatrix, name: impl Into<String>) -> OperatorMatrix {
        assert_eq!((self.k_in, self.k_out), (rhs.k_in, rhs.k_out));
        OperatorMatrix {
            name: name.into(),
            k_in: self.k_in,
            k_out: self.k_out,
            mat: self.mat.add(&rhs.mat),
            metric_in: self.metric_in.clone(),
            metric_out: self.metric_out.clone(),
        }
    }

    pub fn scale(&self, s: f64) -> OperatorMatrix {
        OperatorMatrix {
            mat: self.mat.scale(s),
            ..self.clone()
        }
    }

    pub fn shift_identity(&self, c: f64, name: impl Into<String>) -> OperatorMatrix {
        assert_eq!(self.k_in, self.k_out);
        let mut mat = self.mat.clone();
        for i in 0..mat.rows {
            mat[(i, i)] += c;
        }
        OperatorMatrix {
            name: name.into(),
            mat,
            ..self.clone()
        }
    }

    /// G^{1/2} A G^{-1/2} for square operators.
    pub fn symmetrized(&self) -> DMat {
        assert_eq!(self.k_in, self.k_out);
        let n = self.mat.rows;
        let mut s = DMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                s[(i, j)] = self.metric_out[i].sqrt() * self.mat[(i, j)] / self.metric_in[j].sqrt();
            }
        }
        s
    }

    /// Plain-text export: header `rows cols`, then one row per line.
    pub fn write_text<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "{} {}", self.mat.rows, self.mat.cols)?;
        for i in 0..self.mat.rows {
            let row: Vec<String> = self.mat.row(i).iter().map(|x| format!("{x:.17e}")).collect();
            writeln!(w, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

fn metric(x: &WeightedComplex, k: isize) -> Vec<f64> {
    (0..x.num_simplices(k)).map(|i| x.weight_at(k, i)).collect()
}

/// The differential d_k : C^k -> C^{k+1} as a matrix.
pub fn d_matrix(x: &WeightedComplex, k: isize) -> Result<OperatorMatrix> {
    if k < -1 || k >= x.dim() as isize {
        return Err(HdxError::DimensionOutOfRange {
            k,
            lo: -1,
            hi: x.dim() as isize - 1,
        });
    }
    let mut mat = DMat::zeros(x.num_simplices(k + 1), x.num_simplices(k));
    for (row, s) in x.simplices(k + 1).iter().enumerate() {
        let mut sign = 1.0;
        for i in 0..s.vertices().len() {
            if let Some(col) = x.index_of(&s.face(i)) {
                mat[(row, col)] += sign;
            }
            sign = -sign;
        }
    }
    Ok(OperatorMatrix {
        name: format!("d_{k}"),
        k_in: k,
        k_out: k + 1,
        mat,
        metric_in: metric(x, k),
        metric_out: metric(x, k + 1),
    })
}

/// The codifferential on k-forms, delta : C^k -> C^{k-1}, by the explicit
/// weighted formula; cross-asserted against the metric adjoint of d.
pub fn delta_matrix(x: &WeightedComplex, k: isize) -> Result<OperatorMatrix> {
    if k < 0 || k > x.dim() as isize {
        return Err(HdxError::DimensionOutOfRange {
            k,
            lo: 0,
            hi: x.dim() as isize,
        });
    }
    let rows = x.num_simplices(k - 1);
    let cols = x.num_simplices(k);
    let mut mat = DMat::zeros(rows, cols);
    for (row, tau) in x.simplices(k - 1).iter().enumerate() {
        let m_tau = x.weight_at(k - 1, row);
        for &(v, col) in x.cofacet_indices(k - 1, row) {
            let sign = if tau.insertion_index(v) % 2 == 0 { 1.0 } else { -1.0 };
            mat[(row, col)] += sign * x.weight_at(k, col) / m_tau;
        }
    }
    let op = OperatorMatrix {
        name: format!("delta_{k}"),
        k_in: k,
        k_out: k - 1,
        mat,
        metric_in: metric(x, k),
        metric_out: metric(x, k - 1),
    };
    // Cross-check against the adjoint route.
    let adj = delta_matrix_adjoint(x, k)?;
    let defect = op.mat.sub(&adj.mat).max_abs();
    let scale = op.mat.max_abs().max(1.0);
    assert!(
        defect <= 1e-12 * scale,
        "explicit delta and metric adjoint disagree by {defect:e}"
    );
    Ok(op)
}

/// delta as the metric adjoint of d: G_{k-1}^{-1} D_{k-1}^T G_k.
pub fn delta_matrix_adjoint(x: &WeightedComplex, k: isize) -> Result<OperatorMatrix> {
    let d = d_matrix(x, k - 1)?;
    let mut mat = d.mat.transpose();
    let g_out = metric(x, k - 1);
    let g_in = metric(x, k);
    for i in 0..mat.rows {
        for j in 0..mat.cols {
            mat[(i, j)] *= g_in[j] / g_out[i];
        }
    }
    Ok(OperatorMatrix {
        name: format!("delta_adj_{k}"),
        k_in: k,
        k_out: k - 1,
        mat,
        metric_in: g_in,
        metric_out: g_out,
    })
}

/// Upper, lower, or full Laplacian on k-forms.
pub fn laplacian(x: &WeightedComplex, k: isize, kind: LaplacianKind) -> Result<OperatorMatrix> {
    let n = x.dim() as isize;
    if k < 0 || k > n {
        return Err(HdxError::DimensionOutOfRange { k, lo: 0, hi: n });
    }
    match kind {
        LaplacianKind::Up => {
            if k > n - 1 {
                return Err(HdxError::DimensionOutOfRange { k, lo: 0, hi: n - 1 });
            }
            let d = d_matrix(x, k)?;
            let del = delta_matrix(x, k + 1)?;
            Ok(del.compose(&d, format!("L{k}+")))
        }
        LaplacianKind::Down => {
            let del = delta_matrix(x, k)?;
            let d = d_matrix(x, k - 1)?;
            Ok(d.compose(&del, format!("L{k}-")))
        }
        LaplacianKind::Full => {
            let down = laplacian(x, k, LaplacianKind::Down)?;
            if k == n {
                return Ok(OperatorMatrix {
                    name: format!("L{k}"),
                    ..down
                });
            }
            let up = laplacian(x, k, LaplacianKind::Up)?;
            Ok(up.add(&down, format!("L{k}")))
        }
    }
}

/// Side differential d_(k,j) : C^k -> C^{k+1} of a partite complex: the only
/// surviving term of d is the one deleting the side-j vertex.
pub fn d_partite(x: &WeightedComplex, k: isize, side: usize) -> Result<OperatorMatrix> {
    let labels = x.side_labels().ok_or(HdxError::NotPartite)?;
    if !labels.contains(&side) {
        return Err(HdxError::InvalidParameter(format!("no side labeled {side}")));
    }
    if k < -1 || k >= x.dim() as isize {
        return Err(HdxError::DimensionOutOfRange {
            k,
            lo: -1,
            hi: x.dim() as isize - 1,
        });
    }
    let mut mat = DMat::zeros(x.num_simplices(k + 1), x.num_simplices(k));
    for (row, s) in x.simplices(k + 1).iter().enumerate() {
        // A simplex of a partite complex has at most one vertex per side.
        if let Some(i) = s
            .vertices()
            .iter()
            .position(|&v| x.side_of(v) == Some(side))
        {
            if let Some(col) = x.index_of(&s.face(i)) {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                mat[(row, col)] += sign;
            }
        }
    }
    Ok(OperatorMatrix {
        name: format!("d_({k},{side})"),
        k_in: k,
        k_out: k + 1,
        mat,
        metric_in: metric(x, k),
        metric_out: metric(x, k + 1),
    })
}

/// Side codifferential on k-forms, the adjoint of d_(k-1,j): sums only over
/// added vertices from the given side.
pub fn delta_partite(x: &WeightedComplex, k: isize, side: usize) -> Result<OperatorMatrix> {
    let labels = x.side_labels().ok_or(HdxError::NotPartite)?;
    if !labels.contains(&side) {
        return Err(HdxError::InvalidParameter(format!("no side labeled {side}")));
    }
    if k < 0 || k > x.dim() as isize {
        return Err(HdxError::DimensionOutOfRange {
            k,
            lo: 0,
            hi: x.dim() as isize,
        });
    }
    let rows = x.num_simplices(k - 1);
    let cols = x.num_simplices(k);
    let mut mat = DMat::zeros(rows, cols);
    for (row, tau) in x.simplices(k - 1).iter().enumerate() {
        let m_tau = x.weight_at(k - 1, row);
        for &(v, col) in x.cofacet_indices(k - 1, row) {
            if x.side_of(v) != Some(side) {
                continue;
            }
            let sign = if tau.insertion_index(v) % 2 == 0 { 1.0 } else { -1.0 };
            mat[(row, col)] += sign * x.weight_at(k, col) / m_tau;
        }
    }
    let op = OperatorMatrix {
        name: format!("delta_({k},{side})"),
        k_in: k,
        k_out: k - 1,
        mat,
        metric_in: metric(x, k),
        metric_out: metric(x, k - 1),
    };
    // Adjointness cross-check against d_(k-1, side).
    let d = d_partite(x, k - 1, side)?;
    let mut adj = d.mat.transpose();
    for i in 0..adj.rows {
        for j in 0..adj.cols {
            adj[(i, j)] *= op.metric_in[j] / op.metric_out[i];
        }
    }
    let defect = op.mat.sub(&adj).max_abs();
    assert!(
        defect <= 1e-12 * op.mat.max_abs().max(1.0),
        "side delta and adjoint of side d disagree by {defect:e}"
    );
    Ok(op)
}

/// Side lower Laplacian on k-forms: d_(k-1,j) composed with delta on k-forms
/// restricted to side j.
pub fn lower_partite(x: &WeightedComplex, k: isize, side: usize) -> Result<OperatorMatrix> {
    let del = delta_partite(x, k, side)?;
    let d = d_partite(x, k - 1, side)?;
    Ok(d.compose(&del, format!("L{k}-({side})")))
}

/// Sum over all sides of the side lower Laplacians on k-forms.
pub fn lower_partite_sum(x: &WeightedComplex, k: isize) -> Result<OperatorMatrix> {
    let labels = x.side_labels().ok_or(HdxError::NotPartite)?;
    let mut acc: Option<OperatorMatrix> = None;
    for side in labels {
        let op = lower_partite(x, k, side)?;
        acc = Some(match acc {
            None => op,
            Some(a) => a.add(&op, format!("sum L{k}-(j)")),
        });
    }
    Ok(acc.expect("at least one side"))
}
