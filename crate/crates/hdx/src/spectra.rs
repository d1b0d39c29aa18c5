//! Link spectra, the descent map, and the spectral certificates.
//!
//! The spectral data of every certificate comes from one place: the
//! symmetrization G^{1/2} A G^{-1/2} of a weighted operator followed by the
//! cyclic Jacobi solve, with an explicit eigenpair residual check. Zero
//! eigenvalues are separated with the threshold `1e-8 * max(1, kappa)`,
//! which is far below every spectral gap handled here.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cert::Certificate;
use crate::complex::WeightedComplex;
use crate::error::{HdxError, Result};
use crate::linalg::{dot, jacobi_eigen, norm2, rank, DMat, SymEigen};
use crate::ops::{laplacian, lower_partite_sum, LaplacianKind, OperatorMatrix};
use crate::simplex::Simplex;

pub const ZERO_EIG_REL: f64 = 1e-8;
pub const SPECTRAL_TOL: f64 = 1e-8;

/// Eigenvalues of a self-adjoint operator, ascending, with the gap data.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub eigenvalues: Vec<f64>,
    /// Smallest eigenvalue above the zero threshold.
    pub lambda: Option<f64>,
    /// Largest eigenvalue.
    pub kappa: Option<f64>,
    pub zero_multiplicity: usize,
    pub zero_threshold: f64,
}

impl SpectrumSummary {
    fn from_values(values: Vec<f64>) -> Self {
        let kappa = values.last().copied();
        let threshold = ZERO_EIG_REL * kappa.map_or(1.0, |k: f64| k.abs().max(1.0));
        let zero_multiplicity = values.iter().filter(|x| x.abs() <= threshold).count();
        let lambda = values.iter().copied().find(|x| *x > threshold);
        SpectrumSummary {
            eigenvalues: values,
            lambda,
            kappa,
            zero_multiplicity,
            zero_threshold: threshold,
        }
    }

    /// Nonzero part of the spectrum.
    pub fn nonzero(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .copied()
            .filter(|x| x.abs() > self.zero_threshold)
            .collect()
    }
}

/// Eigenvalues of a self-adjoint operator with respect to its weight metric.
///
/// Fails if the symmetrized matrix is not symmetric to 1e-9 (relative) or if
/// an eigenpair residual exceeds `1e-9 * ||A||`.
pub fn symmetric_spectrum(op: &OperatorMatrix) -> Result<SpectrumSummary> {
    Ok(symmetric_eigen(op)?.0)
}

/// As [`symmetric_spectrum`] but also returns the eigenvectors of the
/// symmetrized matrix (columns, ascending eigenvalue order).
pub fn symmetric_eigen(op: &OperatorMatrix) -> Result<(SpectrumSummary, SymEigen)> {
    let s = op.symmetrized();
    let scale = s.max_abs().max(1.0);
    let defect = s.sub(&s.transpose()).max_abs();
    if defect > 1e-9 * scale {
        return Err(HdxError::NotSelfAdjoint {
            defect,
            tol: 1e-9 * scale,
        });
    }
    // Use the exactly symmetric average to keep Jacobi clean.
    let sym = s.add(&s.transpose()).scale(0.5);
    let eig = jacobi_eigen(&sym);
    // Residual check per eigenpair.
    let norm = eig
        .values
        .iter()
        .fold(0.0f64, |a, &x| a.max(x.abs()))
        .max(1.0);
    for (i, &lam) in eig.values.iter().enumerate() {
        let v: Vec<f64> = (0..sym.rows).map(|r| eig.vectors[(r, i)]).collect();
        let av = sym.matvec(&v);
        let res: Vec<f64> = av.iter().zip(&v).map(|(a, b)| a - lam * b).collect();
        let r = norm2(&res);
        if r > 1e-9 * norm {
            return Err(HdxError::EigenResidual {
                residual: r,
                tol: 1e-9 * norm,
            });
        }
    }
    Ok((SpectrumSummary::from_values(eig.values.clone()), eig))
}

/// The descent map f(x) = 2 - 1/x transporting link spectral bounds down one
/// dimension.
pub fn descent_map(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(HdxError::InvalidParameter(format!(
            "descent map needs a positive argument, got {x}"
        )));
    }
    Ok(2.0 - 1.0 / x)
}

/// j-fold composition of the descent map.
pub fn descent_iterate(x: f64, j: usize) -> Result<f64> {
    let mut y = x;
    for _ in 0..j {
        y = descent_map(y)?;
    }
    Ok(y)
}

/// Spectral profile of the degree-0 upper link Laplacians at one level.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProfileRow {
    /// Dimension of the simplices whose links are measured (-1 for the
    /// complex itself).
    pub k: isize,
    /// Smallest nonzero eigenvalue over all links at this level.
    pub min_lambda: Option<f64>,
    /// Largest eigenvalue over all links at this level.
    pub max_kappa: Option<f64>,
    /// Simplices whose links are disconnected (reported, not fatal).
    pub disconnected: Vec<Vec<usize>>,
}

/// Spectra of the degree-0 upper Laplacian over all links of level-k
/// simplices; the links are solved independently and merged in simplex order.
pub fn link_profile(x: &WeightedComplex, k: isize) -> Result<ProfileRow> {
    if k < -1 || k > x.dim() as isize - 2 {
        return Err(HdxError::DimensionOutOfRange {
            k,
            lo: -1,
            hi: x.dim() as isize - 2,
        });
    }
    let taus: Vec<&Simplex> = x.simplices(k).iter().collect();
    let spectra: Vec<Result<(SpectrumSummary, bool)>> = taus
        .par_iter()
        .map(|tau| {
            let link = x.link(tau)?;
            let up = laplacian(&link.complex, 0, LaplacianKind::Up)?;
            let spec = symmetric_spectrum(&up)?;
            let connected = link.complex.is_connected();
            Ok((spec, connected))
        })
        .collect();

    let mut min_lambda: Option<f64> = None;
    let mut max_kappa: Option<f64> = None;
    let mut disconnected = Vec::new();
    for (tau, entry) in taus.iter().zip(spectra) {
        let (spec, connected) = entry?;
        if !connected {
            disconnected.push(tau.vertices().to_vec());
        }
        if let Some(l) = spec.lambda {
            min_lambda = Some(min_lambda.map_or(l, |m: f64| m.min(l)));
        }
        if let Some(kap) = spec.kappa {
            max_kappa = Some(max_kappa.map_or(kap, |m: f64| m.max(kap)));
        }
    }
    Ok(ProfileRow {
        k,
        min_lambda,
        max_kappa,
        disconnected,
    })
}

/// Observed-vs-predicted intervals for each level below the 1-dimensional
/// links.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DescentProfile {
    /// Measured [lambda, kappa] over the 1-dimensional links.
    pub top_interval: Option<(f64, f64)>,
    pub rows: Vec<DescentRow>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DescentRow {
    pub k: isize,
    pub observed: Option<(f64, f64)>,
    pub predicted: Option<(f64, f64)>,
    /// Always-valid ceiling (n-k)/(n-k-1) at this level.
    pub universal_upper: f64,
}

/// Measured local spectral expansion: [min lambda, max kappa] over the
/// 1-dimensional links (level n-2).
pub fn local_expansion(x: &WeightedComplex) -> Result<(Option<f64>, Option<f64>)> {
    if x.dim() < 1 {
        return Err(HdxError::DimensionOutOfRange {
            k: x.dim() as isize,
            lo: 1,
            hi: isize::MAX,
        });
    }
    let row = link_profile(x, x.dim() as isize - 2)?;
    Ok((row.min_lambda, row.max_kappa))
}

/// Verifies that link spectral bounds trickle down: for every level k below
/// n-2 the observed nonzero link spectra lie inside the interval image of
/// the measured top interval under the iterated descent map, and every level
/// obeys the universal ceiling (n-k)/(n-k-1).
pub fn verify_descent(x: &WeightedComplex) -> Result<(Vec<Certificate>, DescentProfile)> {
    let n = x.dim() as isize;
    let mut certs = Vec::new();
    let mut profile = DescentProfile {
        top_interval: None,
        rows: Vec::new(),
    };
    if n < 2 {
        certs.push(Certificate::not_applicable(
            "descent.containment",
            "trickle-down of link spectral bounds",
            "complex dimension below 2, nothing to descend",
        ));
        return Ok((certs, profile));
    }

    let rows: Result<Vec<ProfileRow>> = (-1..=n - 2).map(|k| link_profile(x, k)).collect();
    let rows = rows?;
    let top = &rows[(n - 1) as usize];
    let (lambda, kappa) = match (top.min_lambda, top.max_kappa) {
        (Some(l), Some(k)) => (l, k),
        _ => {
            certs.push(Certificate::not_applicable(
                "descent.containment",
                "trickle-down of link spectral bounds",
                "a 1-dimensional link has empty nonzero spectrum",
            ));
            return Ok((certs, profile));
        }
    };
    profile.top_interval = Some((lambda, kappa));

    let applicable = lambda > (n as f64 - 1.0) / n as f64
        && x.connectivity_report().hypothesis_holds();
    for row in rows.iter() {
        let k = row.k;
        let j = (n - 2 - k) as usize;
        let universal = (n - k) as f64 / (n - k - 1) as f64;
        let predicted = if applicable {
            Some((descent_iterate(lambda, j)?, descent_iterate(kappa, j)?))
        } else {
            None
        };
        profile.rows.push(DescentRow {
            k,
            observed: row.min_lambda.zip(row.max_kappa),
            predicted,
            universal_upper: universal,
        });

        // Universal ceiling holds unconditionally.
        if let Some(kap) = row.max_kappa {
            certs.push(Certificate::check_le(
                format!("descent.universal.k{k}"),
                format!(
                    "max eigenvalue over level-{k} links <= ({n}-{k})/({n}-{k}-1)"
                ),
                kap,
                universal,
                SPECTRAL_TOL,
            ));
        }

        if k == n - 2 {
            continue;
        }
        if !applicable {
            certs.push(Certificate::not_applicable(
                format!("descent.containment.k{k}"),
                "observed link interval inside descent-map image of the top interval",
                format!("hypothesis failed: lambda = {lambda} <= ({n}-1)/{n} or a top link is disconnected"),
            ));
            continue;
        }
        let (plo, phi) = predicted.expect("applicable");
        match (row.min_lambda, row.max_kappa) {
            (Some(olo), Some(ohi)) => {
                certs.push(
                    Certificate::check_le(
                        format!("descent.containment.k{k}.lower"),
                        format!("predicted f^{j}(lambda) <= observed min gap at level {k}"),
                        plo,
                        olo,
                        SPECTRAL_TOL,
                    )
                    .with_witness(serde_json::json!({
                        "predicted": [plo, phi],
                        "observed": [olo, ohi],
                    })),
                );
                certs.push(Certificate::check_le(
                    format!("descent.containment.k{k}.upper"),
                    format!("observed max eigenvalue at level {k} <= predicted f^{j}(kappa)"),
                    ohi,
                    phi,
                    SPECTRAL_TOL,
                ));
            }
            _ => certs.push(Certificate::not_applicable(
                format!("descent.containment.k{k}"),
                "observed link interval inside predicted",
                "empty nonzero spectrum at this level",
            )),
        }
    }
    Ok((certs, profile))
}

fn kernel_vectors(eig: &SymEigen, spec: &SpectrumSummary) -> Vec<Vec<f64>> {
    let n = eig.vectors.rows;
    (0..spec.eigenvalues.len())
        .filter(|&i| spec.eigenvalues[i].abs() <= spec.zero_threshold)
        .map(|i| (0..n).map(|r| eig.vectors[(r, i)]).collect())
        .collect()
}

/// The global spectral-gap certificates: reduced cohomology vanishing, the
/// kernel decomposition of the k-form space, the spectral inclusions driven
/// by the descent iterates of the measured top interval, and the
/// dimension-only norm ceilings.
pub fn verify_global_gaps(x: &WeightedComplex) -> Result<Vec<Certificate>> {
    let n = x.dim() as isize;
    let mut certs = Vec::new();
    if n < 1 {
        certs.push(Certificate::not_applicable(
            "global.gaps",
            "global Laplacian spectral gaps",
            "0-dimensional complex has no Laplacian calculus",
        ));
        return Ok(certs);
    }
    let (lambda, kappa) = local_expansion(x)?;
    let (lambda, kappa) = match (lambda, kappa) {
        (Some(l), Some(k)) => (l, k),
        _ => {
            certs.push(Certificate::not_applicable(
                "global.gaps",
                "global Laplacian spectral gaps",
                "empty nonzero spectrum on a 1-dimensional link",
            ));
            return Ok(certs);
        }
    };
    let hypothesis =
        lambda > (n as f64 - 1.0) / n as f64 && x.connectivity_report().hypothesis_holds();

    for k in 0..n {
        let up = laplacian(x, k, LaplacianKind::Up)?;
        let down = laplacian(x, k, LaplacianKind::Down)?;
        let full = laplacian(x, k, LaplacianKind::Full)?;
        let (spec_up, eig_up) = symmetric_eigen(&up)?;
        let (spec_down, eig_down) = symmetric_eigen(&down)?;
        let spec_full = symmetric_spectrum(&full)?;
        let dim_ck = x.num_simplices(k);

        // (d) universal ceilings need no gap hypothesis.
        let ceiling = (n as f64 + 1.0) / (n - k) as f64;
        certs.push(Certificate::check_le(
            format!("global.norm.up.k{k}"),
            format!("max eigenvalue of L{k}+ <= (n+1)/(n-k)"),
            spec_up.kappa.unwrap_or(0.0),
            ceiling,
            SPECTRAL_TOL,
        ));
        let down_next = laplacian(x, k + 1, LaplacianKind::Down)?;
        let spec_down_next = symmetric_spectrum(&down_next)?;
        certs.push(Certificate::check_le(
            format!("global.norm.down.k{}", k + 1),
            format!("max eigenvalue of L{}- <= (n+1)/(n-k)", k + 1),
            spec_down_next.kappa.unwrap_or(0.0),
            ceiling,
            SPECTRAL_TOL,
        ));

        if !hypothesis {
            certs.push(Certificate::not_applicable(
                format!("global.gaps.k{k}"),
                "cohomology vanishing, kernel decomposition, spectral inclusions",
                format!("hypothesis failed: measured lambda = {lambda} <= (n-1)/n"),
            ));
            continue;
        }

        // (a) reduced cohomology vanishes: the full Laplacian has trivial
        // kernel, cross-checked through matrix ranks of d.
        let harmonic_dim = spec_full.zero_multiplicity;
        let rank_dk = rank(&crate::ops::d_matrix(x, k)?.mat, 1e-8);
        let rank_dkm1 = rank(&crate::ops::d_matrix(x, k - 1)?.mat, 1e-8);
        let betti = dim_ck as isize - rank_dk as isize - rank_dkm1 as isize;
        certs.push(
            Certificate::check_eq(
                format!("global.cohomology.k{k}"),
                format!("reduced degree-{k} cohomology vanishes"),
                harmonic_dim as f64,
                0.0,
                0.0,
            )
            .with_witness(serde_json::json!({
                "kernel_dim_full_laplacian": harmonic_dim,
                "betti_via_ranks": betti,
            })),
        );
        certs.push(Certificate::check_eq(
            format!("global.cohomology.ranks.k{k}"),
            format!(
                "rank route agrees at degree {k}: dim C - rank d_k - rank d_(k-1) = harmonic dim"
            ),
            betti as f64,
            harmonic_dim as f64,
            0.0,
        ));

        // (b) kernel decomposition of the k-form space.
        let ker_up = kernel_vectors(&eig_up, &spec_up);
        let ker_down = kernel_vectors(&eig_down, &spec_down);
        certs.push(Certificate::check_eq(
            format!("global.decomposition.dim.k{k}"),
            format!("dim ker L{k}+ + dim ker L{k}- = dim of the degree-{k} form space"),
            (ker_up.len() + ker_down.len()) as f64,
            dim_ck as f64,
            0.0,
        ));
        let mut worst_dot: f64 = 0.0;
        for a in &ker_up {
            for b in &ker_down {
                worst_dot = worst_dot.max(dot(a, b).abs());
            }
        }
        certs.push(Certificate::check_le(
            format!("global.decomposition.orth.k{k}"),
            format!("ker L{k}+ orthogonal to ker L{k}- in the weighted inner product"),
            worst_dot,
            0.0,
            1e-9,
        ));

        // (c) spectral inclusions from the descent iterates.
        let j = (n - 1 - k) as usize;
        let lam_k = descent_iterate(lambda, j)?;
        let kap_k = descent_iterate(kappa, j)?;
        let lo = (k as f64 + 1.0) * lam_k - k as f64;
        let hi = (k as f64 + 1.0) * kap_k - k as f64;
        let mut include = |name: String, stmt: String, values: Vec<f64>, lo: f64, hi: f64| {
            if values.is_empty() {
                certs.push(Certificate::not_applicable(name, stmt, "empty nonzero spectrum"));
                return;
            }
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            certs.push(
                Certificate::check_le(
                    format!("{name}.lower"),
                    format!("{stmt}: interval lower bound"),
                    lo,
                    min,
                    SPECTRAL_TOL,
                )
                .with_witness(serde_json::json!({
                    "observed": [min, max],
                    "predicted": [lo, hi],
                })),
            );
            certs.push(Certificate::check_le(
                format!("{name}.upper"),
                format!("{stmt}: interval upper bound"),
                max,
                hi,
                SPECTRAL_TOL,
            ));
        };
        include(
            format!("global.inclusion.up.k{k}"),
            format!("nonzero spectrum of L{k}+ inside [(k+1)f^{j}(lambda)-k, (k+1)f^{j}(kappa)-k]"),
            spec_up.nonzero(),
            lo,
            hi,
        );
        include(
            format!("global.inclusion.down.k{}", k + 1),
            format!("nonzero spectrum of L{}- inside the same interval", k + 1),
            spec_down_next.nonzero(),
            lo,
            hi,
        );
        if k >= 1 {
            // Second estimate family; coincides with the first under the
            // descent map but is checked independently.
            let lo2 = (k as f64 + 1.0) - k as f64 / lam_k;
            let hi2 = (k as f64 + 1.0) - k as f64 / kap_k;
            include(
                format!("global.inclusion.down2.k{k}"),
                format!("nonzero spectrum of L{k}- inside [(k+1)-k/lambda_k, (k+1)-k/kappa_k]"),
                spec_down.nonzero(),
                lo2,
                hi2,
            );
        }
    }
    Ok(certs)
}

/// Partite spectral certificates: the trivial eigenfunctions at (n+1)/n, the
/// dimension of their eigenspace, the explicit projection onto the
/// non-trivial space, the symmetric enclosure of the non-trivial spectrum,
/// and the side-operator norm bound at each degree.
pub fn partite_spectral_suite(x: &WeightedComplex) -> Result<Vec<Certificate>> {
    let labels = x.side_labels().ok_or(HdxError::NotPartite)?;
    let n = x.dim() as f64;
    let nn = x.dim() as isize;
    let mut certs = Vec::new();
    let trivial = (n + 1.0) / n;

    let up0 = laplacian(x, 0, LaplacianKind::Up)?;
    let (spec, _) = symmetric_eigen(&up0)?;

    // (a) each side function (n on the side, -1 off it) is an eigenfunction
    // at (n+1)/n.
    let num_v = x.num_vertices();
    let mut side_funcs: Vec<Vec<f64>> = Vec::new();
    for &side in &labels {
        let phi: Vec<f64> = (0..num_v)
            .map(|v| if x.side_of(v) == Some(side) { n } else { -1.0 })
            .collect();
        let out = up0.apply(&phi);
        let mut res = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..num_v {
            let w = x.weight_at(0, i);
            res += w * (out[i] - trivial * phi[i]).powi(2);
            scale += w * phi[i].powi(2);
        }
        certs.push(Certificate::check_le(
            format!("partite.sidefn.{side}"),
            format!("side function of side {side} is an eigenfunction of L0+ at (n+1)/n"),
            res.sqrt(),
            0.0,
            1e-9 * scale.sqrt(),
        ));
        side_funcs.push(phi);
    }

    // (b) the eigenspace at (n+1)/n is exactly their span: multiplicity
    // equals the rank of the side-function family (n, they sum to zero).
    let cluster_tol = ZERO_EIG_REL * spec.kappa.map_or(1.0, |k| k.abs().max(1.0));
    let multiplicity = spec
        .eigenvalues
        .iter()
        .filter(|&&e| (e - trivial).abs() <= cluster_tol)
        .count();
    let fam = DMat::from_rows(side_funcs.clone());
    let fam_rank = rank(&fam, 1e-8);
    certs.push(
        Certificate::check_eq(
            "partite.trivial.multiplicity",
            "multiplicity of the eigenvalue (n+1)/n equals the rank of the side functions",
            multiplicity as f64,
            fam_rank as f64,
            0.0,
        )
        .with_witness(serde_json::json!({
            "multiplicity": multiplicity,
            "rank": fam_rank,
        })),
    );

    // (c) the projection onto the non-trivial space is
    // phi - (n+1) sum_j L0-(j) phi; cross-checked against the direct
    // projection off the side indicators (which are orthogonal).
    let sum_lower = lower_partite_sum(x, 0)?;
    let mut rng = <rand_chacha::ChaCha20Rng as rand::SeedableRng>::seed_from_u64(0x9d2);
    let mut worst = 0.0f64;
    for _ in 0..16 {
        let phi = crate::cochain::Cochain::random(x, 0, &mut rng);
        let via_ops: Vec<f64> = {
            let p = sum_lower.apply(&phi.values);
            (0..num_v)
                .map(|i| phi.values[i] - (n + 1.0) * p[i])
                .collect()
        };
        // Direct route: subtract the projection onto each side indicator.
        let mut direct = phi.values.clone();
        for &side in &labels {
            let chi: Vec<f64> = (0..num_v)
                .map(|v| if x.side_of(v) == Some(side) { 1.0 } else { 0.0 })
                .collect();
            let ip: f64 = (0..num_v)
                .map(|i| x.weight_at(0, i) * phi.values[i] * chi[i])
                .sum();
            let nsq: f64 = (0..num_v)
                .map(|i| x.weight_at(0, i) * chi[i] * chi[i])
                .sum();
            for i in 0..num_v {
                direct[i] -= ip / nsq * chi[i];
            }
        }
        for i in 0..num_v {
            worst = worst.max((via_ops[i] - direct[i]).abs());
        }
    }
    certs.push(Certificate::check_le(
        "partite.projection",
        "phi - (n+1) sum_j L0-(j) phi equals the projection off the side indicators",
        worst,
        0.0,
        1e-9,
    ));

    // (d) symmetric enclosure of the largest non-trivial eigenvalue.
    let nontrivial: Vec<f64> = spec
        .nonzero()
        .into_iter()
        .filter(|e| (e - trivial).abs() > cluster_tol)
        .collect();
    match (nontrivial.first(), nontrivial.last()) {
        (Some(&lam), Some(&kap)) => {
            let lo = 1.0 + (1.0 - lam) / n;
            let hi = 1.0 + n * (1.0 - lam);
            certs.push(
                Certificate::check_le(
                    "partite.enclosure.upper",
                    "largest non-trivial eigenvalue <= 1 + n(1 - lambda)",
                    kap,
                    hi,
                    SPECTRAL_TOL,
                )
                .with_witness(serde_json::json!({"lambda": lam, "kappa": kap})),
            );
            certs.push(Certificate::check_le(
                "partite.enclosure.lower",
                "1 + (1 - lambda)/n <= largest non-trivial eigenvalue",
                lo,
                kap,
                SPECTRAL_TOL,
            ));
        }
        _ => certs.push(Certificate::not_applicable(
            "partite.enclosure",
            "symmetric enclosure of the non-trivial spectrum",
            "no non-trivial eigenvalues (complex too small)",
        )),
    }

    // (e) side-operator norm bound per degree, from the measured link
    // spectra with the per-level trivial eigenvalue removed.
    for k in 0..nn {
        certs.push(partite_norm_bound(x, k)?);
    }
    Ok(certs)
}

/// The partite operator sandwich at degree k. With [lambda, kappa] enclosing
/// the level-(k-1) link spectra minus their trivial partite eigenvalue and
/// mu = (lambda+kappa)/2:
///
/// || L+ + (n+1-k)/(n-k) L- + (k - (k+1) mu) I
///    - ((n+1-k)^2/(n-k) - (n+1-k) mu) sum_j L-(k,j) || <= (k+1)(kappa-lambda)/2.
fn partite_norm_bound(x: &WeightedComplex, k: isize) -> Result<Certificate> {
    let n = x.dim() as isize;
    let name = format!("partite.normbound.k{k}");
    let stmt = format!("side-operator sandwich for degree-{k} forms");
    // Measure the link spectra at level k-1, dropping the trivial partite
    // eigenvalue (n+1-k)/(n-k) of those links.
    let trivial = (n + 1 - k) as f64 / (n - k) as f64;
    let mut lam = f64::INFINITY;
    let mut kap = f64::NEG_INFINITY;
    for tau in x.simplices(k - 1) {
        let link = x.link(tau)?;
        let up = laplacian(&link.complex, 0, LaplacianKind::Up)?;
        let spec = symmetric_spectrum(&up)?;
        let cluster = ZERO_EIG_REL * spec.kappa.map_or(1.0, |m| m.abs().max(1.0));
        for e in spec.nonzero() {
            if (e - trivial).abs() > cluster {
                lam = lam.min(e);
                kap = kap.max(e);
            }
        }
    }
    if !lam.is_finite() || !kap.is_finite() {
        return Ok(Certificate::not_applicable(
            name,
            stmt,
            "links have no non-trivial eigenvalues at this level",
        ));
    }
    if lam <= k as f64 / (k as f64 + 1.0) {
        return Ok(Certificate::not_applicable(
            name,
            stmt,
            format!("hypothesis failed: lambda = {lam} <= k/(k+1)"),
        ));
    }
    let mu = (lam + kap) / 2.0;
    let a = (n + 1 - k) as f64 / (n - k) as f64;
    let up = laplacian(x, k, LaplacianKind::Up)?;
    let down = laplacian(x, k, LaplacianKind::Down)?;
    let side_sum = lower_partite_sum(x, k)?;
    let c_side = ((n + 1 - k) as f64).powi(2) / (n - k) as f64 - (n + 1 - k) as f64 * mu;
    let op = up
        .add(&down.scale(a), "B")
        .add(&side_sum.scale(-c_side), "B")
        .shift_identity(k as f64 - (k as f64 + 1.0) * mu, "B");
    let spec = symmetric_spectrum(&op)?;
    let norm = spec.eigenvalues.iter().fold(0.0f64, |m, &e| m.max(e.abs()));
    let bound = (k as f64 + 1.0) * (kap - lam) / 2.0;
    Ok(
        Certificate::check_le(name, stmt, norm, bound, 1e-9 * (1.0 + bound))
            .with_witness(serde_json::json!({"lambda": lam, "kappa": kap})),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cert::CertStatus;

    fn complete_skeleton(nv: usize, n: usize) -> WeightedComplex {
        use itertools::Itertools;
        let facets: Vec<Vec<usize>> = (0..nv).combinations(n + 1).collect();
        WeightedComplex::from_facets(facets, None).unwrap()
    }

    #[test]
    fn descent_map_values() {
        assert_eq!(descent_map(1.0).unwrap(), 1.0);
        assert!((descent_map(2.0 / 3.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((descent_map(1.5).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!(descent_map(0.0).is_err());
        assert!(descent_map(-1.0).is_err());
    }

    #[test]
    fn descent_monotone_to_one() {
        let mut prev = descent_iterate(1.5, 1).unwrap();
        for j in 2..=50 {
            let cur = descent_iterate(1.5, j).unwrap();
            assert!(cur < prev);
            assert!(cur > 1.0);
            prev = cur;
        }
        assert!((prev - 1.0).abs() < 0.05);
    }

    #[test]
    fn k4_link_profile() {
        let x = complete_skeleton(4, 2);
        let row = link_profile(&x, 0).unwrap();
        assert!((row.min_lambda.unwrap() - 1.5).abs() < 1e-10);
        assert!((row.max_kappa.unwrap() - 1.5).abs() < 1e-10);
        // level -1: the complex itself, the K4 graph
        let row = link_profile(&x, -1).unwrap();
        assert!((row.min_lambda.unwrap() - 4.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn octahedron_profile() {
        // boundary of the octahedron: vertex links are 4-cycles
        let x = WeightedComplex::from_facets(
            vec![
                vec![0, 2, 4],
                vec![0, 2, 5],
                vec![0, 3, 4],
                vec![0, 3, 5],
                vec![1, 2, 4],
                vec![1, 2, 5],
                vec![1, 3, 4],
                vec![1, 3, 5],
            ],
            None,
        )
        .unwrap();
        let row = link_profile(&x, 0).unwrap();
        assert!((row.min_lambda.unwrap() - 1.0).abs() < 1e-10);
        assert!((row.max_kappa.unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn descent_certificates_on_k5() {
        let x = complete_skeleton(5, 3);
        let (certs, profile) = verify_descent(&x).unwrap();
        assert!(certs.iter().all(|c| c.status == CertStatus::Pass), "{certs:#?}");
        // k=1 links are K3 with gap 3/2; predicted level-0 interval [4/3, 4/3]
        let row = profile.rows.iter().find(|r| r.k == 0).unwrap();
        let (plo, phi) = row.predicted.unwrap();
        assert!((plo - 4.0 / 3.0).abs() < 1e-10);
        assert!((phi - 4.0 / 3.0).abs() < 1e-10);
        let (olo, ohi) = row.observed.unwrap();
        assert!((olo - 4.0 / 3.0).abs() < 1e-9);
        assert!((ohi - 4.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn global_gaps_on_k4() {
        let x = complete_skeleton(4, 2);
        let certs = verify_global_gaps(&x).unwrap();
        assert!(certs.iter().all(|c| c.status == CertStatus::Pass), "{certs:#?}");
        // the nonzero spectrum of L1+ should be {2} exactly
        let up1 = laplacian(&x, 1, LaplacianKind::Up).unwrap();
        let spec = symmetric_spectrum(&up1).unwrap();
        for e in spec.nonzero() {
            assert!((e - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn relabeling_invariance() {
        let x = complete_skeleton(5, 2);
        let y = x.relabeled(&[3, 1, 4, 0, 2]).unwrap();
        let a = symmetric_spectrum(&laplacian(&x, 1, LaplacianKind::Up).unwrap()).unwrap();
        let b = symmetric_spectrum(&laplacian(&y, 1, LaplacianKind::Up).unwrap()).unwrap();
        for (u, v) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn partite_suite_on_k22() {
        let x = WeightedComplex::from_facets(
            vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]],
            None,
        )
        .unwrap()
        .with_partition(vec![0, 0, 1, 1])
        .unwrap();
        let spec = symmetric_spectrum(&laplacian(&x, 0, LaplacianKind::Up).unwrap()).unwrap();
        let expect = [0.0, 1.0, 1.0, 2.0];
        for (a, b) in spec.eigenvalues.iter().zip(expect) {
            assert!((a - b).abs() < 1e-10);
        }
        let certs = partite_spectral_suite(&x).unwrap();
        assert!(certs.iter().all(|c| c.passed()), "{certs:#?}");
        // enclosure collapses: lambda = 1 forces kappa = 1
        let c = certs.iter().find(|c| c.name == "partite.enclosure.upper").unwrap();
        assert_eq!(c.status, CertStatus::Pass);
        assert!((c.lhs - 1.0).abs() < 1e-9);
        assert!((c.rhs - 1.0).abs() < 1e-9);
    }

    #[test]
    fn partite_suite_on_222() {
        let mut facets = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    facets.push(vec![a, 2 + b, 4 + c]);
                }
            }
        }
        let x = WeightedComplex::from_facets(facets, None)
            .unwrap()
            .with_partition(vec![0, 0, 1, 1, 2, 2])
            .unwrap();
        let certs = partite_spectral_suite(&x).unwrap();
        assert!(certs.iter().all(|c| c.passed()), "{certs:#?}");
        // the trivial eigenvalue 3/2 has multiplicity 2 (rank of side functions)
        let c = certs
            .iter()
            .find(|c| c.name == "partite.trivial.multiplicity")
            .unwrap();
        assert_eq!(c.lhs, 2.0);
        assert_eq!(c.status, CertStatus::Pass);
    }
}
