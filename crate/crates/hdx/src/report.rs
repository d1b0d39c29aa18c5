//! End-to-end certificate assembly: runs every applicable suite on a complex
//! and aggregates the results into a deterministic JSON report.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::cert::{Certificate, Report};
use crate::cheeger::{chi_norm_certificates, verify_cheeger};
use crate::cochain::{d, delta, identity_suite, inner_product, Cochain};
use crate::complex::{SubsetFamily, WeightedComplex};
use crate::error::Result;
use crate::mixing::{
    exhaustive_families, exhaustive_partite_families, operator_product_identities,
    random_families, verify_mixing_general, verify_mixing_partite,
};
use crate::ops::{laplacian, LaplacianKind};
use crate::overlap::{overlap_bruteforce, overlap_grid, Embedding};
use crate::spectra::{partite_spectral_suite, symmetric_spectrum, verify_descent, verify_global_gaps};
use crate::walks::{build_kgraph, h_inner, h_inner_closed_form, m_tuple, path_c, spanned_edge_set, spanned_subgraph, spanned_vertex_set};

/// Stages of the full report, selectable with `--only`.
pub const STAGES: &[&str] = &[
    "connectivity",
    "weights",
    "operators",
    "identities",
    "descent",
    "global",
    "partite",
    "walks",
    "cheeger",
    "mixing",
    "overlap",
];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportOptions {
    pub seed: u64,
    /// Random trials per identity.
    pub trials: usize,
    /// Enumeration budget for exhaustive searches.
    pub budget: u64,
    /// Restrict to these stages when nonempty.
    pub only: Vec<String>,
    /// Random families per mixing level when exhaustion exceeds the budget.
    pub mixing_trials: usize,
    /// Embedding for the overlap stage.
    #[serde(skip)]
    pub embedding: Option<Embedding>,
    /// Grid resolution for overlap in dimension > 2.
    pub grid: Option<usize>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            seed: 0,
            trials: 64,
            budget: crate::enumeration_budget(),
            only: Vec::new(),
            mixing_trials: 64,
            embedding: None,
            grid: None,
        }
    }
}

impl ReportOptions {
    fn wants(&self, stage: &str) -> bool {
        self.only.is_empty() || self.only.iter().any(|s| s == stage)
    }
}

/// Weight-function certificates: the defining recursion and the factorial
/// identity at every level, plus the exact integer mirror for homogeneous
/// weights.
pub fn weight_certificates(x: &WeightedComplex) -> Vec<Certificate> {
    let mut certs = Vec::new();
    certs.push(Certificate::check_le(
        "weights.recursion",
        "m(tau) equals the sum of its cofacet weights at every level",
        x.weight_recursion_error(),
        0.0,
        1e-12,
    ));
    let mut worst = 0.0f64;
    for l in 0..=x.dim() as isize {
        worst = worst.max(x.weight_identity_error(l));
    }
    certs.push(Certificate::check_le(
        "weights.factorial",
        "sum of level-l weights over cofaces of tau equals m(tau)/(l-k)!",
        worst,
        0.0,
        1e-12,
    ));
    if x.is_homogeneous() {
        let mut exact = true;
        for k in -1..=x.dim() as isize {
            for s in x.simplices(k) {
                let mirror = x
                    .homogeneous_integer_weight(s)
                    .expect("homogeneous complex");
                if x.weight(s) != mirror as f64 {
                    exact = false;
                }
            }
        }
        certs.push(Certificate::check_eq(
            "weights.integer_mirror",
            "homogeneous weights equal (n-k)! times the facet count, exactly",
            if exact { 0.0 } else { 1.0 },
            0.0,
            0.0,
        ));
    }
    certs
}

/// Operator-algebra certificates: d after d vanishes, d and delta are
/// adjoint, the nonzero spectra of neighbouring up/down Laplacians agree as
/// multisets, and the degree-0 upper Laplacian obeys its universal bounds.
pub fn operator_certificates(
    x: &WeightedComplex,
    trials: usize,
    seed: u64,
) -> Result<Vec<Certificate>> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let n = x.dim() as isize;
    let mut certs = Vec::new();

    let mut worst_dd = 0.0f64;
    let mut worst_adj = 0.0f64;
    for k in 0..n {
        for _ in 0..trials {
            let phi = Cochain::random(x, k, &mut rng);
            if k + 1 < n {
                worst_dd = worst_dd.max(d(x, &d(x, &phi)?)?.max_abs());
            }
            let psi = Cochain::random(x, k + 1, &mut rng);
            let lhs = inner_product(x, &d(x, &phi)?, &psi)?;
            let rhs = inner_product(x, &phi, &delta(x, &psi)?)?;
            let scale = lhs.abs().max(rhs.abs()).max(1.0);
            worst_adj = worst_adj.max((lhs - rhs).abs() / scale);
        }
    }
    certs.push(Certificate::check_le(
        "operators.dd_zero",
        "d after d vanishes",
        worst_dd,
        0.0,
        1e-14,
    ));
    certs.push(Certificate::check_le(
        "operators.adjoint",
        "<d phi, psi> = <phi, delta psi> on random pairs",
        worst_adj,
        0.0,
        1e-10,
    ));

    // Nonzero spectra of L(k-1)+ and Lk- agree as multisets.
    for k in 1..=n {
        let a = symmetric_spectrum(&laplacian(x, k - 1, LaplacianKind::Up)?)?.nonzero();
        let b = symmetric_spectrum(&laplacian(x, k, LaplacianKind::Down)?)?.nonzero();
        let worst = if a.len() != b.len() {
            f64::INFINITY
        } else {
            a.iter()
                .zip(&b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0f64, f64::max)
        };
        certs.push(
            Certificate::check_le(
                format!("operators.hodge.multiset.k{k}"),
                format!("nonzero spectra of L{}+ and L{k}- agree as multisets", k - 1),
                worst,
                0.0,
                1e-8,
            )
            .with_witness(serde_json::json!({"count_up": a.len(), "count_down": b.len()})),
        );
    }

    if n >= 1 {
        let spec = symmetric_spectrum(&laplacian(x, 0, LaplacianKind::Up)?)?;
        let max = spec.kappa.unwrap_or(0.0);
        certs.push(Certificate::check_le(
            "operators.l0.norm",
            "the degree-0 upper Laplacian norm is at most 2",
            max,
            2.0,
            1e-9,
        ));
        if x.num_vertices() >= 2 {
            certs.push(Certificate::check_le(
                "operators.l0.maxeig",
                "the largest eigenvalue of L0+ is at least 1",
                1.0,
                max,
                1e-9,
            ));
        }
    }
    Ok(certs)
}

/// Walk certificates: stochasticity and reversibility of every level walk,
/// the one-step and two-step path-conductance identities on sampled
/// families, and the two computation routes of the inner-connectivity
/// constant.
pub fn walk_certificates(
    x: &WeightedComplex,
    trials: usize,
    seed: u64,
) -> Result<Vec<Certificate>> {
    let n = x.dim() as isize;
    let mut certs = Vec::new();
    let mut worst_stoch = 0.0f64;
    let mut worst_rev = 0.0f64;
    for k in -1..n {
        let g = build_kgraph(x, k)?;
        worst_stoch = worst_stoch.max(g.stochasticity_defect());
        worst_rev = worst_rev.max(g.reversibility_defect());
    }
    certs.push(Certificate::check_le(
        "walks.stochastic",
        "every level walk has unit outgoing mass",
        worst_stoch,
        0.0,
        1e-12,
    ));
    certs.push(Certificate::check_le(
        "walks.reversible",
        "nu(a) mu(a,b) = nu(b) mu(b,a) on every edge",
        worst_rev,
        0.0,
        1e-15,
    ));

    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1.0);
    for k in 0..n {
        // one-step: pathc_k(V_k(U_0..U_k), E_k(U_0..U_{k+1})) = (k+1) m
        let mut worst_one = 0.0f64;
        let fams = random_families(x, k as usize + 1, trials, seed ^ (k as u64) << 8);
        let g = build_kgraph(x, k)?;
        for family in &fams {
            let starts = spanned_vertex_set(x, k, &family.window(0, k as usize));
            let edges = spanned_edge_set(&g, family);
            let pc = path_c(&g, &starts, &[&edges]);
            worst_one = worst_one.max(rel(pc, (k as f64 + 1.0) * m_tuple(x, family)));
        }
        certs.push(Certificate::check_le(
            format!("walks.pathc.onestep.k{k}"),
            format!("one-step path conductance equals (k+1) m at level {k}"),
            worst_one,
            0.0,
            1e-12,
        ));
    }
    for k in 1..=n.min(x.dim() as isize - 1) {
        // two-step: pathc_(k-1)(V(U_0..U_k), E(U_0..U_k)) = k(k+1) m
        let mut worst_two = 0.0f64;
        let mut worst_dual = 0.0f64;
        let fams = random_families(x, k as usize, trials, seed ^ (k as u64) << 16);
        let g = build_kgraph(x, k - 1)?;
        for family in &fams {
            let sub = spanned_subgraph(&g, family);
            let pc = path_c(&g, &sub.vertices, &[&sub.edges]);
            worst_two =
                worst_two.max(rel(pc, (k * (k + 1)) as f64 * m_tuple(x, family)));
            let a = h_inner(x, family)?;
            let b = h_inner_closed_form(x, family)?;
            worst_dual = worst_dual.max((a - b).abs());
            debug_assert!((0.0..=1.0 + 1e-12).contains(&a));
        }
        certs.push(Certificate::check_le(
            format!("walks.pathc.twostep.k{k}"),
            format!("one-step conductance into the level-{k} family equals k(k+1) m"),
            worst_two,
            0.0,
            1e-12,
        ));
        certs.push(Certificate::check_le(
            format!("walks.hinner.dual.k{k}"),
            format!("inner connectivity agrees between definition and closed form at level {k}"),
            worst_dual,
            0.0,
            1e-12,
        ));
    }
    Ok(certs)
}

/// Mixing stage: the operator-product identities on random families and the
/// mixing inequalities, exhaustive when the state count fits the budget and
/// random otherwise.
pub fn mixing_certificates(
    x: &WeightedComplex,
    opts: &ReportOptions,
) -> Result<Vec<Certificate>> {
    let n = x.dim();
    let mut certs = Vec::new();
    if n < 1 {
        return Ok(certs);
    }
    // operator-product identities on a few random families
    for l in 1..=n.min(3) {
        let fams = random_families(x, l, 4, opts.seed ^ 0xabc ^ (l as u64));
        for family in &fams {
            for k in 0..l.min(n) {
                certs.extend(operator_product_identities(x, k as isize, family)?);
            }
        }
    }
    // mixing inequalities
    for l in 1..=n {
        let nv = x.num_vertices() as u32;
        let exhaustive = (l as u128 + 2).pow(nv) <= opts.budget as u128;
        let fams = if exhaustive {
            exhaustive_families(x, l, opts.budget)?
        } else {
            random_families(x, l, opts.mixing_trials, opts.seed ^ 0x51 ^ (l as u64))
        };
        certs.extend(verify_mixing_general(x, l, &fams)?);
        if x.partition().is_some() {
            let fams = exhaustive_partite_families(x, l, opts.budget)?;
            certs.extend(verify_mixing_partite(x, l, &fams)?);
        }
    }
    Ok(certs)
}

fn overlap_certificates(x: &WeightedComplex, opts: &ReportOptions) -> Result<Vec<Certificate>> {
    let mut certs = Vec::new();
    let Some(embedding) = &opts.embedding else {
        return Ok(certs);
    };
    let result = if x.dim() <= 2 && opts.grid.is_none() {
        overlap_bruteforce(x, embedding)?
    } else {
        overlap_grid(x, embedding, opts.grid.unwrap_or(32))?
    };
    certs.push(
        Certificate::check_le(
            "overlap.ratio.range",
            "the covered-weight ratio lies in [0, 1]",
            result.ratio,
            1.0,
            1e-12,
        )
        .with_witness(serde_json::to_value(&result)?),
    );
    certs.push(Certificate::check_le(
        "overlap.ratio.positive",
        "some point is covered by positive weight",
        0.0,
        result.ratio,
        0.0,
    ));
    Ok(certs)
}

/// Runs every requested stage and assembles the deterministic report.
pub fn run_full_report(
    x: &WeightedComplex,
    input: impl Into<String>,
    opts: &ReportOptions,
) -> Result<Report> {
    let mut certs: Vec<Certificate> = Vec::new();

    if opts.wants("connectivity") {
        let rep = x.connectivity_report();
        certs.push(
            Certificate::check_eq(
                "connectivity.hypothesis",
                "the complex and all its links of dimension > 0 are connected",
                if rep.hypothesis_holds() { 0.0 } else { 1.0 },
                0.0,
                0.0,
            )
            .with_witness(serde_json::json!({
                "complex_connected": rep.complex_connected,
                "all_links_connected": rep.all_links_connected,
                "gallery_connected": rep.gallery_connected,
            })),
        );
        if rep.hypothesis_holds() {
            certs.push(Certificate::check_eq(
                "connectivity.gallery",
                "connected links imply gallery connectivity",
                if rep.gallery_connected { 0.0 } else { 1.0 },
                0.0,
                0.0,
            ));
        }
    }
    if opts.wants("weights") {
        certs.extend(weight_certificates(x));
    }
    if opts.wants("operators") && x.dim() >= 1 {
        certs.extend(operator_certificates(x, opts.trials, opts.seed ^ 0x10)?);
    }
    if opts.wants("identities") && x.dim() >= 1 {
        certs.extend(identity_suite(x, opts.trials, opts.seed ^ 0x20)?);
    }
    if opts.wants("descent") && x.dim() >= 1 {
        certs.extend(verify_descent(x)?.0);
    }
    if opts.wants("global") && x.dim() >= 1 {
        certs.extend(verify_global_gaps(x)?);
    }
    if opts.wants("partite") && x.partition().is_some() {
        certs.extend(partite_spectral_suite(x)?);
    }
    if opts.wants("walks") && x.dim() >= 1 {
        certs.extend(walk_certificates(x, opts.trials.min(32), opts.seed ^ 0x30)?);
    }
    if opts.wants("cheeger") && x.dim() >= 1 {
        certs.extend(verify_cheeger(x, opts.budget)?);
        let fams = random_families(x, 1, 8, opts.seed ^ 0x40);
        let mut fams2 = random_families(x, x.dim().max(2) - 1, 8, opts.seed ^ 0x41);
        let mut all = fams;
        all.append(&mut fams2);
        let all: Vec<SubsetFamily> = all
            .into_iter()
            .filter(|f| f.len() as isize - 1 <= x.dim() as isize - 1)
            .collect();
        if !all.is_empty() {
            certs.extend(chi_norm_certificates(x, &all)?);
        }
    }
    if opts.wants("mixing") && x.dim() >= 1 {
        certs.extend(mixing_certificates(x, opts)?);
    }
    if opts.wants("overlap") {
        certs.extend(overlap_certificates(x, opts)?);
    }

    Ok(Report::new(input, opts.seed, certs))
}

/// Serializes a report deterministically (pretty JSON with stable field
/// order).
pub fn report_to_json(report: &Report) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

/// Stage names not recognized by the report.
pub fn unknown_stages(only: &[String]) -> Vec<String> {
    let known: BTreeSet<&str> = STAGES.iter().copied().collect();
    only.iter()
        .filter(|s| !known.contains(s.as_str()))
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{complete_multipartite, complete_skeleton};

    #[test]
    fn full_report_on_k4_passes() {
        let x = complete_skeleton(4, 2).unwrap();
        let opts = ReportOptions {
            trials: 8,
            mixing_trials: 8,
            ..Default::default()
        };
        let report = run_full_report(&x, "k4", &opts).unwrap();
        assert!(report.all_passed(), "{:#?}", report.certificates);
        assert!(report.failed == 0);
        assert!(report.passed > 20);
    }

    #[test]
    fn full_report_partite() {
        let x = complete_multipartite(&[2, 2, 2]).unwrap();
        let opts = ReportOptions {
            trials: 4,
            mixing_trials: 4,
            ..Default::default()
        };
        let report = run_full_report(&x, "222", &opts).unwrap();
        assert!(report.all_passed(), "{:#?}", report.certificates);
        assert!(report
            .certificates
            .iter()
            .any(|c| c.name.starts_with("mixing.partite")));
    }

    #[test]
    fn report_deterministic() {
        let x = complete_skeleton(5, 2).unwrap();
        let opts = ReportOptions {
            seed: 7,
            trials: 4,
            mixing_trials: 4,
            ..Default::default()
        };
        let a = report_to_json(&run_full_report(&x, "k5", &opts).unwrap()).unwrap();
        let b = report_to_json(&run_full_report(&x, "k5", &opts).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn only_filter() {
        let x = complete_skeleton(4, 2).unwrap();
        let opts = ReportOptions {
            only: vec!["descent".into()],
            ..Default::default()
        };
        let report = run_full_report(&x, "k4", &opts).unwrap();
        assert!(report
            .certificates
            .iter()
            .all(|c| c.name.starts_with("descent")));
        assert!(unknown_stages(&["descent".into()]).is_empty());
        assert_eq!(unknown_stages(&["nope".into()]), vec!["nope".to_string()]);
    }
}
