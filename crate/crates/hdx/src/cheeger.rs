//! Indicator k-forms, the boundary and inner-connectivity ratios, the
//! combined Cheeger constant by exhaustive tuple search, and the
//! Cheeger-type certificates.
//!
//! The combined constant at level k is the largest epsilon with
//! `(k/(k+1) + eps) h_inner + 1/(k+1) h_out >= eps` over all tuples of
//! nonempty pairwise-disjoint vertex sets. Solving per tuple turns the
//! definition into a minimum of `(k/(k+1) h_inner + 1/(k+1) h_out) /
//! (1 - h_inner)` over tuples with h_inner < 1; tuples with h_inner = 1
//! impose no constraint. Tuples spanning no k-simplex have a vanishing
//! denominator in h_out and are skipped with a counter (a recorded
//! convention, not forced by the definitions).

use serde::{Deserialize, Serialize};

use crate::cert::Certificate;
use crate::cochain::{norm_sq, Cochain};
use crate::complex::{SubsetFamily, WeightedComplex};
use crate::error::{HdxError, Result};
use crate::simplex::VertexId;
use crate::spectra::{descent_iterate, local_expansion};
use crate::walks::{build_kgraph, m_tuple, path_c, spanned_subgraph, KGraph};

pub const CHEEGER_TOL: f64 = 1e-10;

/// The indicator k-form of (U_0, ..., U_k): +-1 on ordered simplices with one
/// vertex in each class (sign of the class permutation), 0 elsewhere.
pub fn indicator_form(x: &WeightedComplex, family: &SubsetFamily) -> Result<Cochain> {
    let k = family.len() as isize - 1;
    if k > x.dim() as isize {
        return Err(HdxError::DimensionOutOfRange {
            k,
            lo: 0,
            hi: x.dim() as isize,
        });
    }
    let mut out = Cochain::zeros(x, k);
    'simplex: for (i, s) in x.simplices(k).iter().enumerate() {
        let mut classes = Vec::with_capacity(s.vertices().len());
        for &v in s.vertices() {
            match family.class_of(v) {
                Some(c) if !classes.contains(&c) => classes.push(c),
                _ => continue 'simplex,
            }
        }
        // parity of the permutation i -> class of the i-th smallest vertex
        let mut inv = 0;
        for a in 0..classes.len() {
            for b in a + 1..classes.len() {
                if classes[a] > classes[b] {
                    inv += 1;
                }
            }
        }
        out.values[i] = if inv % 2 == 0 { 1.0 } else { -1.0 };
    }
    Ok(out)
}

/// The family extended by the complement of its union (possibly empty).
pub fn with_complement(x: &WeightedComplex, family: &SubsetFamily) -> SubsetFamily {
    let union = family.union_all();
    let complement: std::collections::BTreeSet<VertexId> = (0..x.num_vertices())
        .filter(|v| !union.contains(v))
        .collect();
    let mut sets: Vec<_> = family.sets().to_vec();
    sets.push(complement);
    SubsetFamily::new(sets).expect("complement is disjoint")
}

/// Boundary ratio h_out(U_0, ..., U_k) = m(U_0..U_k, complement) / m(U_0..U_k),
/// zero when the complement is empty. Returns `(value, degenerate)` where
/// `degenerate` flags m(U_0..U_k) = 0.
pub fn h_out(x: &WeightedComplex, family: &SubsetFamily) -> (f64, bool) {
    let m = m_tuple(x, family);
    if m == 0.0 {
        return (0.0, true);
    }
    let extended = with_complement(x, family);
    if extended.sets().last().expect("complement added").is_empty() {
        return (0.0, false);
    }
    (m_tuple(x, &extended) / m, false)
}

/// Norms of the indicator form computed two ways each; used by the
/// certificate suite and tested directly.
#[derive(Clone, Debug)]
pub struct ChiNorms {
    pub norm_sq: f64,
    pub norm_sq_closed: f64,
    pub d_norm_sq: f64,
    pub d_norm_sq_closed: f64,
    pub delta_norm_sq: f64,
    pub delta_norm_sq_closed: f64,
}

/// ||chi||^2 = m(U_0..U_k), ||d chi||^2 = m(U_0..U_k, complement), and
/// ||delta chi||^2 = pathc(V', E', E')/k (k >= 1) or m(U)^2/m(empty) (k = 0),
/// cross-computed against the direct cochain calculus.
pub fn chi_norms(x: &WeightedComplex, family: &SubsetFamily) -> Result<ChiNorms> {
    let k = family.len() as isize - 1;
    let chi = indicator_form(x, family)?;
    let norm = norm_sq(x, &chi);
    let norm_closed = m_tuple(x, family);

    let (d_norm, d_norm_closed) = if k <= x.dim() as isize - 1 {
        let dchi = crate::cochain::d(x, &chi)?;
        let extended = with_complement(x, family);
        let closed = if extended.any_set_empty() {
            0.0
        } else {
            m_tuple(x, &extended)
        };
        // sign check: d chi = (-1)^(k+1) chi of the extended family
        let chi_ext = indicator_form(x, &extended)?;
        let sign = if (k + 1) % 2 == 0 { 1.0 } else { -1.0 };
        let defect = dchi.sub(&chi_ext.scale(sign)).max_abs();
        assert!(
            defect <= 1e-12,
            "d chi differs from the signed extended indicator by {defect:e}"
        );
        (norm_sq(x, &dchi), closed)
    } else {
        (0.0, 0.0)
    };

    let dl = crate::cochain::delta(x, &chi)?;
    let delta_norm = norm_sq(x, &dl);
    let delta_norm_closed = if k == 0 {
        let m_u = m_tuple(x, family);
        m_u * m_u / x.empty_weight()
    } else {
        let g = build_kgraph(x, k - 1)?;
        let sub = spanned_subgraph(&g, family);
        path_c(&g, &sub.vertices, &[&sub.edges, &sub.edges]) / k as f64
    };
    Ok(ChiNorms {
        norm_sq: norm,
        norm_sq_closed: norm_closed,
        d_norm_sq: d_norm,
        d_norm_sq_closed: d_norm_closed,
        delta_norm_sq: delta_norm,
        delta_norm_sq_closed: delta_norm_closed,
    })
}

/// h_out computed from the indicator form, `||d chi||^2 / ||chi||^2`;
/// `None` when the tuple spans no k-simplex.
pub fn h_out_via_forms(x: &WeightedComplex, family: &SubsetFamily) -> Result<Option<f64>> {
    let norms = chi_norms(x, family)?;
    if norms.norm_sq == 0.0 {
        return Ok(None);
    }
    Ok(Some(norms.d_norm_sq / norms.norm_sq))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheegerReport {
    pub k: isize,
    /// The combined constant; `None` means no tuple constrains it (+infinity).
    pub h_k: Option<f64>,
    /// Minimizing family, one vertex list per class.
    pub witness: Option<Vec<Vec<VertexId>>>,
    /// Spectral lower bound f^(n-k-1)(lambda) - k/(k+1), when applicable.
    pub epsilon_bound: Option<f64>,
    pub pass: Option<bool>,
    /// Tuples skipped because they span no k-simplex.
    pub skipped_zero_weight: u64,
    pub tuples_checked: u64,
    pub exhaustive: bool,
}

/// Per-tuple solved bound; `None` when the tuple imposes no constraint
/// (h_inner = 1) or is degenerate (spans no k-simplex).
fn tuple_bound(x: &WeightedComplex, g: &KGraph, family: &SubsetFamily) -> Result<Option<f64>> {
    let k = family.len() as f64 - 1.0;
    if m_tuple(x, family) == 0.0 {
        return Ok(None);
    }
    let h_in = if g.k == -1 {
        let m_u: f64 = family.get(0).iter().map(|&v| x.weight_at(0, v)).sum();
        m_u / x.empty_weight()
    } else {
        let sub = spanned_subgraph(g, family);
        let one = path_c(g, &sub.vertices, &[&sub.edges]);
        if one == 0.0 {
            0.0
        } else {
            path_c(g, &sub.vertices, &[&sub.edges, &sub.edges]) / one
        }
    };
    let (h_o, degenerate) = h_out(x, family);
    debug_assert!(!degenerate);
    if h_in >= 1.0 - 1e-14 {
        return Ok(None);
    }
    Ok(Some(
        (k / (k + 1.0) * h_in + 1.0 / (k + 1.0) * h_o) / (1.0 - h_in),
    ))
}

struct SearchState {
    best: Option<(f64, Vec<Vec<VertexId>>)>,
    skipped: u64,
    checked: u64,
}

impl SearchState {
    fn new() -> Self {
        SearchState {
            best: None,
            skipped: 0,
            checked: 0,
        }
    }

    fn offer(&mut self, bound: f64, witness: Vec<Vec<VertexId>>) {
        let better = match &self.best {
            None => true,
            Some((b, w)) => {
                bound < *b - 1e-15 || ((bound - *b).abs() <= 1e-15 && witness < *w)
            }
        };
        if better {
            self.best = Some((bound, witness));
        }
    }

    fn merge(mut self, other: SearchState) -> SearchState {
        self.skipped += other.skipped;
        self.checked += other.checked;
        if let Some((b, w)) = other.best {
            self.offer(b, w);
        }
        self
    }
}

/// Enumerates assignments of the last nv-1 vertices with the first fixed,
/// scoring each complete tuple.
fn search_prefix(
    x: &WeightedComplex,
    g: &KGraph,
    classes: usize,
    first: usize,
) -> Result<SearchState> {
    let nv = x.num_vertices();
    let mut assignment = vec![0usize; nv];
    assignment[0] = first;
    let mut state = SearchState::new();
    loop {
        let mut sets: Vec<std::collections::BTreeSet<VertexId>> =
            vec![Default::default(); classes];
        for (v, &a) in assignment.iter().enumerate() {
            if a > 0 {
                sets[a - 1].insert(v);
            }
        }
        if sets.iter().all(|s| !s.is_empty()) {
            let family = SubsetFamily::new(sets).expect("disjoint by construction");
            state.checked += 1;
            match tuple_bound(x, g, &family)? {
                Some(bound) => {
                    let witness: Vec<Vec<VertexId>> = family
                        .sets()
                        .iter()
                        .map(|s| s.iter().copied().collect())
                        .collect();
                    state.offer(bound, witness);
                }
                None => {
                    if m_tuple(x, &family) == 0.0 {
                        state.skipped += 1;
                    }
                }
            }
        }
        // advance positions 1.. odometer style; position 0 stays fixed
        let mut pos = 1;
        loop {
            if pos == nv {
                return Ok(state);
            }
            assignment[pos] += 1;
            if assignment[pos] <= classes {
                break;
            }
            assignment[pos] = 0;
            pos += 1;
        }
    }
}

/// Exhaustive combined Cheeger constant at level k: every assignment of the
/// vertices to the k+1 classes or to none, all classes nonempty. No symmetry
/// reduction; correctness first. The search is partitioned by the first
/// vertex's assignment and reduced deterministically (lexicographic witness
/// tie-break).
pub fn h_k_exhaustive(x: &WeightedComplex, k: isize, budget: u64) -> Result<CheegerReport> {
    use rayon::prelude::*;
    if k < 0 || k > x.dim() as isize - 1 {
        return Err(HdxError::DimensionOutOfRange {
            k,
            lo: 0,
            hi: x.dim() as isize - 1,
        });
    }
    let nv = x.num_vertices();
    let states = (k as u128 + 2).pow(nv as u32);
    if states > budget as u128 {
        return Err(HdxError::BudgetExceeded {
            needed: states,
            budget,
        });
    }
    let g = build_kgraph(x, k - 1)?;
    let classes = (k + 1) as usize;
    let per_prefix: Result<Vec<SearchState>> = (0..=classes)
        .into_par_iter()
        .map(|first| search_prefix(x, &g, classes, first))
        .collect();
    let state = per_prefix?
        .into_iter()
        .fold(SearchState::new(), SearchState::merge);
    let (h_k, witness) = match state.best {
        Some((b, w)) => (Some(b), Some(w)),
        None => (None, None),
    };
    Ok(CheegerReport {
        k,
        h_k,
        witness,
        epsilon_bound: None,
        pass: None,
        skipped_zero_weight: state.skipped,
        tuples_checked: state.checked,
        exhaustive: true,
    })
}

/// Sampled variant: `samples` random assignments (lower-confidence report).
pub fn h_k_sampled(x: &WeightedComplex, k: isize, samples: u64, seed: u64) -> Result<CheegerReport> {
    use rand::Rng;
    use rand::SeedableRng;
    if k < 0 || k > x.dim() as isize - 1 {
        return Err(HdxError::DimensionOutOfRange {
            k,
            lo: 0,
            hi: x.dim() as isize - 1,
        });
    }
    let nv = x.num_vertices();
    let classes = (k + 1) as usize;
    let g = build_kgraph(x, k - 1)?;
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<Vec<VertexId>>)> = None;
    let mut skipped = 0u64;
    let mut checked = 0u64;
    for _ in 0..samples {
        let mut sets: Vec<std::collections::BTreeSet<VertexId>> =
            vec![Default::default(); classes];
        for v in 0..nv {
            let a = rng.gen_range(0..=classes);
            if a > 0 {
                sets[a - 1].insert(v);
            }
        }
        if sets.iter().any(|s| s.is_empty()) {
            continue;
        }
        let family = SubsetFamily::new(sets).expect("disjoint");
        checked += 1;
        match tuple_bound(x, &g, &family)? {
            Some(bound) => {
                let witness: Vec<Vec<VertexId>> = family
                    .sets()
                    .iter()
                    .map(|s| s.iter().copied().collect())
                    .collect();
                if best.as_ref().map_or(true, |(b, _)| bound < *b) {
                    best = Some((bound, witness));
                }
            }
            None => {
                if m_tuple(x, &family) == 0.0 {
                    skipped += 1;
                }
            }
        }
    }
    let (h_k, witness) = match best {
        Some((b, w)) => (Some(b), Some(w)),
        None => (None, None),
    };
    Ok(CheegerReport {
        k,
        h_k,
        witness,
        epsilon_bound: None,
        pass: None,
        skipped_zero_weight: skipped,
        tuples_checked: checked,
        exhaustive: false,
    })
}

/// Classic graph Cheeger constant of a 1-dimensional complex:
/// min of h_out(U) over nonempty proper U with m(U) <= m(V)/2.
pub fn h_classic(x: &WeightedComplex) -> Result<f64> {
    if x.dim() != 1 {
        return Err(HdxError::DimensionOutOfRange {
            k: x.dim() as isize,
            lo: 1,
            hi: 1,
        });
    }
    let nv = x.num_vertices();
    let total = x.empty_weight();
    let mut best = f64::INFINITY;
    for mask in 1u64..(1 << nv) {
        let set: std::collections::BTreeSet<VertexId> =
            (0..nv).filter(|v| mask >> v & 1 == 1).collect();
        if set.len() == nv {
            continue;
        }
        let m_u: f64 = set.iter().map(|&v| x.weight_at(0, v)).sum();
        if m_u > total / 2.0 + 1e-12 {
            continue;
        }
        let family = SubsetFamily::new(vec![set]).expect("single set");
        let (h, degenerate) = h_out(x, &family);
        if !degenerate {
            best = best.min(h);
        }
    }
    Ok(best)
}

/// Cheeger-type certificates: h^k >= f^(n-k-1)(lambda) - k/(k+1) at every
/// level, and for 1-dimensional complexes the classic sandwich
/// h^2/2 <= lambda <= 2h and lambda <= h^0 <= 2h.
pub fn verify_cheeger(x: &WeightedComplex, budget: u64) -> Result<Vec<Certificate>> {
    let n = x.dim() as isize;
    let mut certs = Vec::new();
    if n < 1 {
        certs.push(Certificate::not_applicable(
            "cheeger",
            "Cheeger-type inequalities",
            "0-dimensional complex",
        ));
        return Ok(certs);
    }
    let (lambda_opt, _) = local_expansion(x)?;
    let connected = x.is_connected();
    let hypothesis = x.connectivity_report().hypothesis_holds();

    for k in 0..n {
        let name = format!("cheeger.lowerbound.k{k}");
        let stmt = format!("h^{k} >= descent iterate of the link gap minus k/(k+1)");
        if !hypothesis {
            certs.push(Certificate::not_applicable(
                name,
                stmt,
                "the complex or one of its links is disconnected",
            ));
            continue;
        }
        let lambda = match lambda_opt {
            Some(l) => l,
            None => {
                certs.push(Certificate::not_applicable(name, stmt, "no link gap measured"));
                continue;
            }
        };
        if lambda <= (n as f64 - 1.0) / n as f64 {
            certs.push(Certificate::not_applicable(
                name,
                stmt,
                format!("hypothesis failed: lambda = {lambda} <= (n-1)/n"),
            ));
            continue;
        }
        let eps = descent_iterate(lambda, (n - k - 1) as usize)? - k as f64 / (k as f64 + 1.0);
        let report = h_k_exhaustive(x, k, budget)?;
        match report.h_k {
            Some(h) => certs.push(
                Certificate::check_le(name, stmt, eps, h, CHEEGER_TOL).with_witness(
                    serde_json::json!({
                        "h_k": h,
                        "epsilon": eps,
                        "witness": report.witness,
                        "skipped_zero_weight": report.skipped_zero_weight,
                    }),
                ),
            ),
            None => certs.push(Certificate::check_le(
                name,
                stmt,
                eps,
                f64::INFINITY,
                CHEEGER_TOL,
            )),
        }
    }

    if n == 1 {
        let lambda = if connected {
            lambda_opt.unwrap_or(0.0)
        } else {
            0.0
        };
        let h = h_classic(x)?;
        let h0 = h_k_exhaustive(x, 0, budget)?.h_k.unwrap_or(f64::INFINITY);
        certs.push(Certificate::check_le(
            "cheeger.dim1.h2_le_lambda",
            "h^2/2 <= lambda",
            h * h / 2.0,
            lambda,
            CHEEGER_TOL,
        ));
        certs.push(Certificate::check_le(
            "cheeger.dim1.lambda_le_2h",
            "lambda <= 2h",
            lambda,
            2.0 * h,
            CHEEGER_TOL,
        ));
        certs.push(Certificate::check_le(
            "cheeger.dim1.lambda_le_h0",
            "lambda <= h^0",
            lambda,
            h0,
            CHEEGER_TOL,
        ));
        certs.push(Certificate::check_le(
            "cheeger.dim1.h0_le_2h",
            "h^0 <= 2h",
            h0,
            2.0 * h,
            CHEEGER_TOL,
        ));
    }
    Ok(certs)
}

/// Certificates that the indicator-form norms agree with their closed forms
/// on the given families.
pub fn chi_norm_certificates(
    x: &WeightedComplex,
    families: &[SubsetFamily],
) -> Result<Vec<Certificate>> {
    let mut worst_norm = 0.0f64;
    let mut worst_d = 0.0f64;
    let mut worst_delta = 0.0f64;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1.0);
    for family in families {
        let norms = chi_norms(x, family)?;
        worst_norm = worst_norm.max(rel(norms.norm_sq, norms.norm_sq_closed));
        worst_d = worst_d.max(rel(norms.d_norm_sq, norms.d_norm_sq_closed));
        worst_delta = worst_delta.max(rel(norms.delta_norm_sq, norms.delta_norm_sq_closed));
    }
    Ok(vec![
        Certificate::check_le(
            "cheeger.chi.norm",
            "||chi||^2 equals the tuple weight",
            worst_norm,
            0.0,
            1e-12,
        ),
        Certificate::check_le(
            "cheeger.chi.dnorm",
            "||d chi||^2 equals the complement-extended tuple weight",
            worst_d,
            0.0,
            1e-12,
        ),
        Certificate::check_le(
            "cheeger.chi.deltanorm",
            "||delta chi||^2 equals the two-step coarse path conductance over k",
            worst_delta,
            0.0,
            1e-12,
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> WeightedComplex {
        WeightedComplex::from_facets(vec![vec![0, 1], vec![0, 2], vec![1, 2]], None).unwrap()
    }

    fn k4() -> WeightedComplex {
        WeightedComplex::from_facets(
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
            None,
        )
        .unwrap()
    }

    #[test]
    fn indicator_norms_on_k4() {
        let x = k4();
        let family = SubsetFamily::from_slices(&[&[0], &[1]]).unwrap();
        let norms = chi_norms(&x, &family).unwrap();
        assert_eq!(norms.norm_sq, 2.0);
        assert_eq!(norms.norm_sq_closed, 2.0);
        // d chi covers triangles {0,1,x}: two of them, each weight 1
        assert!((norms.d_norm_sq - 2.0).abs() < 1e-12);
        assert!((norms.d_norm_sq_closed - 2.0).abs() < 1e-12);
        assert!((norms.delta_norm_sq - norms.delta_norm_sq_closed).abs() < 1e-12);
    }

    #[test]
    fn indicator_empty_class_is_zero() {
        let x = k4();
        let family = SubsetFamily::from_slices(&[&[0], &[]]).unwrap();
        let chi = indicator_form(&x, &family).unwrap();
        assert_eq!(chi.max_abs(), 0.0);
    }

    #[test]
    fn h_out_examples() {
        let x = k3();
        let single = SubsetFamily::from_slices(&[&[0]]).unwrap();
        assert_eq!(h_out(&x, &single), (1.0, false));
        let all = SubsetFamily::from_slices(&[&[0, 1, 2]]).unwrap();
        assert_eq!(h_out(&x, &all), (0.0, false));
        let pair = SubsetFamily::from_slices(&[&[0, 1]]).unwrap();
        assert_eq!(h_out(&x, &pair), (0.5, false));
        assert!((h_out_via_forms(&x, &pair).unwrap().unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn h0_of_k3_is_three_halves() {
        let x = k3();
        let report = h_k_exhaustive(&x, 0, 1 << 20).unwrap();
        assert!((report.h_k.unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(h_classic(&x).unwrap(), 1.0);
    }

    #[test]
    fn verify_cheeger_k3() {
        let x = k3();
        let certs = verify_cheeger(&x, 1 << 20).unwrap();
        assert!(certs.iter().all(|c| c.passed()), "{certs:#?}");
    }

    #[test]
    fn verify_cheeger_k4_skeleton() {
        let x = k4();
        let certs = verify_cheeger(&x, 1 << 20).unwrap();
        assert!(certs.iter().all(|c| c.passed()), "{certs:#?}");
        // epsilon_1 = lambda_link - 1/2 = 1; exhaustive h^1 >= 1
        let c = certs
            .iter()
            .find(|c| c.name == "cheeger.lowerbound.k1")
            .unwrap();
        assert!((c.lhs - 1.0).abs() < 1e-9, "eps = {}", c.lhs);
        assert!(c.rhs >= 1.0 - 1e-9);
    }

    #[test]
    fn budget_guard() {
        let x = k4();
        assert!(matches!(
            h_k_exhaustive(&x, 1, 3),
            Err(HdxError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn disconnected_graph_degenerate() {
        let x = WeightedComplex::from_facets(vec![vec![0, 1], vec![2, 3]], None).unwrap();
        let certs = verify_cheeger(&x, 1 << 20).unwrap();
        // lambda treated as 0; all the 1-dim bounds hold trivially
        assert!(certs.iter().all(|c| c.passed()), "{certs:#?}");
    }

    #[test]
    fn chi_norm_certs() {
        let x = k4();
        let families = vec![
            SubsetFamily::from_slices(&[&[0], &[1]]).unwrap(),
            SubsetFamily::from_slices(&[&[0, 1], &[2]]).unwrap(),
            SubsetFamily::from_slices(&[&[0], &[1], &[2]]).unwrap(),
        ];
        let certs = chi_norm_certificates(&x, &families).unwrap();
        assert!(certs.iter().all(|c| c.passed()), "{certs:#?}");
    }
}
