//! Random-walk forms, the operator-product identities behind them, and the
//! mixing inequalities (general and partite).
//!
//! Ordered-vs-unordered bookkeeping: every cochain is stored on canonical
//! representatives and evaluated on ordered tuples through the permutation
//! parity, so the identities below are checked on the class-ordered
//! representative of each simplex in the support.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::cert::Certificate;
use crate::cheeger::indicator_form;
use crate::cochain::{inner_product, Cochain};
use crate::complex::{SubsetFamily, WeightedComplex};
use crate::error::{HdxError, Result};
use crate::linalg::DMat;
use crate::ops::{laplacian, LaplacianKind, OperatorMatrix};
use crate::simplex::VertexId;
use crate::spectra::{descent_iterate, local_expansion};
use crate::walks::{build_kgraph, m_tuple, path_c, path_mu_from, spanned_edge_set, spanned_vertex_set};

pub const MIXING_OP_TOL: f64 = 1e-9;
pub const MIXING_SLACK: f64 = 1e-10;

/// Pointwise multiplication by |chi| of the family: the diagonal projection
/// onto forms supported where the family spans.
pub fn projection(x: &WeightedComplex, family: &SubsetFamily) -> Result<OperatorMatrix> {
    let chi = indicator_form(x, family)?;
    let k = chi.k;
    let m = chi.values.len();
    let mut mat = DMat::zeros(m, m);
    for i in 0..m {
        mat[(i, i)] = chi.values[i].abs();
    }
    let metric: Vec<f64> = (0..m).map(|i| x.weight_at(k, i)).collect();
    Ok(OperatorMatrix {
        name: format!("P(k={k})"),
        k_in: k,
        k_out: k,
        mat,
        metric_in: metric.clone(),
        metric_out: metric,
    })
}

/// The level-k random walk form of (U_0, ..., U_l): on class-ordered
/// simplices of (U_0, ..., U_k) it is the coarse walk probability through the
/// edge sets E_k(U_i, ..., U_{k+1+i}); elsewhere zero. Level -1 stores the
/// single value `prod m(U_i) / m(empty)^(l+1)`.
pub fn psi_form(x: &WeightedComplex, k: isize, family: &SubsetFamily) -> Result<Cochain> {
    let l = family.len() as isize - 1;
    if k == -1 {
        let mut value = 1.0;
        for s in family.sets() {
            let m_u: f64 = s.iter().map(|&v| x.weight_at(0, v)).sum();
            value *= m_u / x.empty_weight();
        }
        return Ok(Cochain {
            k: -1,
            values: vec![value],
        });
    }
    if k < 0 || k >= l.min(x.dim() as isize) {
        return Err(HdxError::DimensionOutOfRange {
            k,
            lo: -1,
            hi: l.min(x.dim() as isize) - 1,
        });
    }
    let g = build_kgraph(x, k)?;
    let edge_sets: Vec<BTreeSet<usize>> = (0..(l - k) as usize)
        .map(|i| spanned_edge_set(&g, &family.window(i, i + k as usize + 1)))
        .collect();
    let set_refs: Vec<&BTreeSet<usize>> = edge_sets.iter().collect();
    let mut out = Cochain::zeros(x, k);
    'simplex: for (idx, s) in x.simplices(k).iter().enumerate() {
        // class-ordered sign, as for the indicator form, restricted to the
        // first k+1 classes
        let mut classes = Vec::with_capacity(s.vertices().len());
        for &v in s.vertices() {
            match family.class_of(v) {
                Some(c) if c <= k as usize && !classes.contains(&c) => classes.push(c),
                _ => continue 'simplex,
            }
        }
        let mut inv = 0;
        for a in 0..classes.len() {
            for b in a + 1..classes.len() {
                if classes[a] > classes[b] {
                    inv += 1;
                }
            }
        }
        let sign = if inv % 2 == 0 { 1.0 } else { -1.0 };
        out.values[idx] = sign * path_mu_from(&g, idx, &set_refs);
    }
    Ok(out)
}

/// The vertices of a canonical simplex reordered so vertex i lies in class i.
fn class_ordered(family: &SubsetFamily, s: &crate::simplex::Simplex) -> Option<Vec<VertexId>> {
    let mut ordered = vec![usize::MAX; s.vertices().len()];
    for &v in s.vertices() {
        let c = family.class_of(v)?;
        if c >= ordered.len() || ordered[c] != usize::MAX {
            return None;
        }
        ordered[c] = v;
    }
    Some(ordered)
}

/// pathc_k(U_0, ..., U_l): the coarse path conductance from V_k(U_0..U_k)
/// through the edge sets E_k(U_i..U_{k+1+i}).
pub fn path_c_family(x: &WeightedComplex, k: isize, family: &SubsetFamily) -> Result<f64> {
    let l = family.len() as isize - 1;
    let g = build_kgraph(x, k)?;
    if k == -1 {
        let sets: Vec<BTreeSet<usize>> = (0..=l as usize)
            .map(|i| spanned_edge_set(&g, &family.window(i, i)))
            .collect();
        let refs: Vec<&BTreeSet<usize>> = sets.iter().collect();
        let starts: BTreeSet<usize> = [0].into();
        return Ok(path_c(&g, &starts, &refs));
    }
    let starts = spanned_vertex_set(x, k, &family.window(0, k as usize));
    let sets: Vec<BTreeSet<usize>> = (0..(l - k) as usize)
        .map(|i| spanned_edge_set(&g, &family.window(i, i + k as usize + 1)))
        .collect();
    let refs: Vec<&BTreeSet<usize>> = sets.iter().collect();
    Ok(path_c(&g, &starts, &refs))
}

/// Applies the alternating product (P_{U_i..U_{k+i}} A)_{i=0..count-1} to a
/// cochain vector, rightmost factor first.
fn apply_projected_power(
    x: &WeightedComplex,
    a: &OperatorMatrix,
    family: &SubsetFamily,
    k: isize,
    count: usize,
    v: &[f64],
) -> Result<Vec<f64>> {
    let mut cur = v.to_vec();
    for i in (0..count).rev() {
        cur = a.apply(&cur);
        let p = projection(x, &family.window(i, i + k as usize))?;
        cur = p.apply(&cur);
    }
    Ok(cur)
}

/// The four operator-product identities for one family at levels (k, l).
pub fn operator_product_identities(
    x: &WeightedComplex,
    k: isize,
    family: &SubsetFamily,
) -> Result<Vec<Certificate>> {
    let l = family.len() as isize - 1;
    if !(0 <= k && k < l && k <= x.dim() as isize - 1) {
        return Err(HdxError::DimensionOutOfRange {
            k,
            lo: 0,
            hi: l.min(x.dim() as isize) - 1,
        });
    }
    let mut certs = Vec::new();
    let count = (l - k) as usize;
    let up = laplacian(x, k, LaplacianKind::Up)?;
    let chi_tail = indicator_form(x, &family.window((l - k) as usize, l as usize))?;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1.0);

    // up-product: coefficient times the projected power equals the walk form
    let prod_up = apply_projected_power(x, &up, family, k, count, &chi_tail.values)?;
    let sign = if ((k + 1) * (l - k)) % 2 == 0 { 1.0 } else { -1.0 };
    let coeff = sign / (k as f64 + 1.0).powi((l - k - 1) as i32);
    let psi = psi_form(x, k, family)?;
    let mut worst = 0.0f64;
    for i in 0..psi.values.len() {
        worst = worst.max(rel(coeff * prod_up[i], psi.values[i]));
    }
    certs.push(Certificate::check_le(
        format!("mixing.product.up.k{k}.l{l}"),
        format!("projected power of L{k}+ on the tail indicator equals the walk form"),
        worst,
        0.0,
        MIXING_OP_TOL,
    ));

    // inner product against the head indicator equals the path conductance
    let chi_head = indicator_form(x, &family.window(0, k as usize))?;
    let ip = inner_product(
        x,
        &chi_head,
        &Cochain {
            k,
            values: prod_up,
        },
    )?;
    let pathc = path_c_family(x, k, family)?;
    certs.push(Certificate::check_le(
        format!("mixing.pathc.up.k{k}.l{l}"),
        format!("|<chi, (P L{k}+)^({count}) chi>| = (k+1)^(l-k-2) pathc_{k}"),
        rel(
            ip.abs(),
            (k as f64 + 1.0).powi((l - k - 2) as i32) * pathc,
        ),
        0.0,
        MIXING_OP_TOL,
    ));

    if k >= 1 {
        let down = laplacian(x, k, LaplacianKind::Down)?;
        let prod_down = apply_projected_power(x, &down, family, k, count, &chi_tail.values)?;
        let phi = Cochain {
            k,
            values: prod_down.clone(),
        };
        // vanishing outside the span of (U_0, ..., U_k)
        let mut worst_outside = 0.0f64;
        let mut worst_inside = 0.0f64;
        let sign = if ((l - k) * k) % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = sign / (k as f64).powi((l - k - 1) as i32);
        let psi_down = psi_form(x, k - 1, &family.window(1, l as usize))?;
        for (i, s) in x.simplices(k).iter().enumerate() {
            match class_ordered(&family.window(0, k as usize), s) {
                None => worst_outside = worst_outside.max(prod_down[i].abs()),
                Some(ordered) => {
                    let lhs = coeff * phi.eval(x, &ordered);
                    let rhs = psi_down.eval(x, &ordered[1..]);
                    worst_inside = worst_inside.max(rel(lhs, rhs));
                }
            }
        }
        certs.push(Certificate::check_le(
            format!("mixing.product.down.k{k}.l{l}"),
            format!("projected power of L{k}- localizes to the level-(k-1) walk form"),
            worst_inside.max(worst_outside),
            0.0,
            MIXING_OP_TOL,
        ));

        let ip = inner_product(x, &chi_head, &phi)?;
        let pathc_down = path_c_family(x, k - 1, family)?;
        certs.push(Certificate::check_le(
            format!("mixing.pathc.down.k{k}.l{l}"),
            format!("|<chi, (P L{k}-)^({count}) chi>| = k^(l-1-k) pathc_{}", k - 1),
            rel(ip.abs(), (k as f64).powi((l - 1 - k) as i32) * pathc_down),
            0.0,
            MIXING_OP_TOL,
        ));
    } else {
        // degree-0 lower product collapses to a weighted multiple of the
        // head indicator
        let down = laplacian(x, 0, LaplacianKind::Down)?;
        let chi_last = indicator_form(x, &family.window(l as usize, l as usize))?;
        let prod = apply_projected_power(x, &down, family, 0, l as usize, &chi_last.values)?;
        let mut scale = 1.0;
        for i in 1..=l as usize {
            let m_u: f64 = family.get(i).iter().map(|&v| x.weight_at(0, v)).sum();
            scale *= m_u / x.empty_weight();
        }
        let chi_first = indicator_form(x, &family.window(0, 0))?;
        let mut worst = 0.0f64;
        for i in 0..prod.len() {
            worst = worst.max(rel(prod[i], scale * chi_first.values[i]));
        }
        certs.push(Certificate::check_le(
            format!("mixing.product.lower0.l{l}"),
            "the L0- product sends the last indicator to the scaled first indicator",
            worst,
            0.0,
            MIXING_OP_TOL,
        ));
        let ip = inner_product(x, &chi_first, &Cochain { k: 0, values: prod })?;
        let pathc = path_c_family(x, -1, family)?;
        certs.push(Certificate::check_le(
            format!("mixing.pathc.lower0.l{l}"),
            "<chi, (P L0-)^l chi> equals the loop-walk conductance",
            rel(ip, pathc),
            0.0,
            MIXING_OP_TOL,
        ));
    }
    Ok(certs)
}

/// The aggregate constants of the mixing bound at a target level l.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MixingConstants {
    pub n: usize,
    pub l: usize,
    pub lambda: f64,
    /// `None` in the partite (one-sided) regime.
    pub kappa: Option<f64>,
    pub lambda_j: Vec<f64>,
    pub kappa_j: Vec<f64>,
    pub r_j: Vec<f64>,
    pub eps_j: Vec<f64>,
    /// Main-term coefficient: the r-product (general) or
    /// 1/((n+1) n ... (n-l+1)) (partite).
    pub a_l: f64,
    pub e_l: f64,
    pub applicable: bool,
}

impl MixingConstants {
    /// Two-sided constants from measured (lambda, kappa) on the
    /// 1-dimensional links.
    pub fn general(n: usize, l: usize, lambda: f64, kappa: f64) -> Result<Self> {
        if !(l >= 1 && l <= n) {
            return Err(HdxError::InvalidParameter(format!(
                "mixing level l = {l} outside 1..={n}"
            )));
        }
        let applicable = lambda > (n as f64 - 1.0) / n as f64 && kappa >= lambda;
        let mut lambda_j = Vec::new();
        let mut kappa_j = Vec::new();
        let mut r_j = Vec::new();
        let mut eps_j = Vec::new();
        for j in 0..l {
            let lj = descent_iterate(lambda, n - 1 - j)?;
            let kj = descent_iterate(kappa, n - 1 - j)?;
            let jf = j as f64;
            let lf = l as f64;
            r_j.push((lj + kj) / 2.0);
            eps_j.push(
                (lf - jf)
                    * (jf + 1.0)
                    * (((jf + 1.0) * kj - jf) / 2.0).powi((l - j - 1) as i32)
                    * (kj - lj)
                    / 2.0,
            );
            lambda_j.push(lj);
            kappa_j.push(kj);
        }
        let mut a_l = 1.0;
        for (j, r) in r_j.iter().enumerate() {
            a_l *= r.powi((l - j) as i32);
        }
        let mut e_l = 0.0;
        for i in 0..l {
            let mut tail = 1.0;
            for j in i + 1..l {
                tail *= r_j[j].powi((l - j) as i32);
            }
            e_l += eps_j[i] * tail;
        }
        Ok(MixingConstants {
            n,
            l,
            lambda,
            kappa: Some(kappa),
            lambda_j,
            kappa_j,
            r_j,
            eps_j,
            a_l,
            e_l,
            applicable,
        })
    }

    /// One-sided partite constants from a measured lambda. The error
    /// exponent on (n+1)/(2(n-j)) follows the per-level derivation
    /// (l - j - 1), matching the two-sided case.
    pub fn partite(n: usize, l: usize, lambda: f64) -> Result<Self> {
        if !(l >= 1 && l <= n) {
            return Err(HdxError::InvalidParameter(format!(
                "mixing level l = {l} outside 1..={n}"
            )));
        }
        let applicable = lambda > (n as f64 - 1.0) / n as f64;
        let mut lambda_j = Vec::new();
        let mut r_j = Vec::new();
        let mut eps_j = Vec::new();
        for j in 0..l {
            let lj = descent_iterate(lambda, n - 1 - j)?;
            let nf = n as f64;
            let jf = j as f64;
            let lf = l as f64;
            r_j.push((nf + 1.0 - jf) / (nf - jf));
            eps_j.push(
                (lf - jf)
                    * ((nf + 1.0) / (2.0 * (nf - jf))).powi((l - j - 1) as i32)
                    * (jf + 1.0)
                    * (nf + 1.0 - jf)
                    * (1.0 - lj)
                    / 2.0,
            );
            lambda_j.push(lj);
        }
        // 1/((n+1) n (n-1) ... (n-l+1))
        let mut denom = n as f64 + 1.0;
        for j in 0..l {
            denom *= (n - j) as f64;
        }
        let a_l = 1.0 / denom;
        let mut e_l = 0.0;
        for i in 0..l {
            let mut tail = 1.0;
            for j in i + 1..l {
                tail *= r_j[j].powi((l - j) as i32);
            }
            e_l += eps_j[i] * tail;
        }
        e_l *= n as f64 + 1.0;
        Ok(MixingConstants {
            n,
            l,
            lambda,
            kappa: None,
            lambda_j,
            kappa_j: Vec::new(),
            r_j,
            eps_j,
            a_l,
            e_l,
            applicable,
        })
    }
}

/// One family's worth of mixing data.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MixingWorstCase {
    pub family: Vec<Vec<VertexId>>,
    pub deviation: f64,
    pub bound: f64,
}

fn family_weights(x: &WeightedComplex, family: &SubsetFamily) -> Vec<f64> {
    family
        .sets()
        .iter()
        .map(|s| s.iter().map(|&v| x.weight_at(0, v)).sum())
        .collect()
}

/// Checks both displayed mixing inequalities for the given families using
/// the measured two-sided expansion. Returns certificates carrying the
/// worst-case family.
pub fn verify_mixing_general(
    x: &WeightedComplex,
    l: usize,
    families: &[SubsetFamily],
) -> Result<Vec<Certificate>> {
    let n = x.dim();
    let name1 = format!("mixing.general.minpair.l{l}");
    let name2 = format!("mixing.general.product.l{l}");
    let stmt1 = "tuple weight deviates from the product term by at most E_l min sqrt(m(U_i) m(U_j))";
    let stmt2 = "tuple weight deviates by at most E_l (prod m(U_i))^(1/(l+1))";
    let (lambda, kappa) = local_expansion(x)?;
    let (lambda, kappa) = match (lambda, kappa) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Ok(vec![Certificate::not_applicable(
                name1,
                stmt1,
                "no measured link interval",
            )])
        }
    };
    let consts = MixingConstants::general(n, l, lambda, kappa)?;
    if !consts.applicable {
        return Ok(vec![Certificate::not_applicable(
            name1,
            stmt1,
            format!("hypothesis failed: lambda = {lambda} <= (n-1)/n"),
        )]);
    }
    let total = x.empty_weight();
    let mut worst1: Option<MixingWorstCase> = None;
    let mut worst2: Option<MixingWorstCase> = None;
    let mut margin1 = f64::NEG_INFINITY;
    let mut margin2 = f64::NEG_INFINITY;
    for family in families {
        debug_assert_eq!(family.len(), l + 1);
        if family.any_set_empty() {
            continue;
        }
        let weights = family_weights(x, family);
        let product: f64 = weights.iter().product();
        let main = consts.a_l * product / total.powi(l as i32);
        let deviation = (m_tuple(x, family) - main).abs();
        let mut min_pair = f64::INFINITY;
        for i in 0..weights.len() {
            for j in i + 1..weights.len() {
                min_pair = min_pair.min((weights[i] * weights[j]).sqrt());
            }
        }
        let bound1 = consts.e_l * min_pair;
        let bound2 = consts.e_l * product.powf(1.0 / (l as f64 + 1.0));
        let fam_vec: Vec<Vec<VertexId>> = family
            .sets()
            .iter()
            .map(|s| s.iter().copied().collect())
            .collect();
        if deviation - bound1 > margin1 {
            margin1 = deviation - bound1;
            worst1 = Some(MixingWorstCase {
                family: fam_vec.clone(),
                deviation,
                bound: bound1,
            });
        }
        if deviation - bound2 > margin2 {
            margin2 = deviation - bound2;
            worst2 = Some(MixingWorstCase {
                family: fam_vec,
                deviation,
                bound: bound2,
            });
        }
    }
    let mut certs = Vec::new();
    match (worst1, worst2) {
        (Some(w1), Some(w2)) => {
            certs.push(
                Certificate::check_le(name1, stmt1, w1.deviation, w1.bound, MIXING_SLACK)
                    .with_witness(serde_json::to_value(&w1)?),
            );
            certs.push(
                Certificate::check_le(name2, stmt2, w2.deviation, w2.bound, MIXING_SLACK)
                    .with_witness(serde_json::to_value(&w2)?),
            );
        }
        _ => certs.push(Certificate::not_applicable(
            name1,
            stmt1,
            "no admissible family supplied",
        )),
    }
    Ok(certs)
}

/// Partite mixing inequalities for side-respecting families: each class is a
/// nonempty subset of a distinct side. Normalizations are by the side
/// weights, which all equal m(empty)/(n+1).
pub fn verify_mixing_partite(
    x: &WeightedComplex,
    l: usize,
    families: &[SubsetFamily],
) -> Result<Vec<Certificate>> {
    let n = x.dim();
    let labels = x.side_labels().ok_or(HdxError::NotPartite)?;
    let name1 = format!("mixing.partite.minpair.l{l}");
    let name2 = format!("mixing.partite.product.l{l}");
    let stmt1 =
        "normalized tuple weight deviates by at most E_l min sqrt(m(U_i) m(U_j) / (m(S_i) m(S_j)))";
    let stmt2 = "normalized tuple weight deviates by at most E_l (prod m(U_i)/m(S_i))^(1/(l+1))";
    let (lambda, _) = local_expansion(x)?;
    let lambda = match lambda {
        Some(a) => a,
        None => {
            return Ok(vec![Certificate::not_applicable(
                name1,
                stmt1,
                "no measured link gap",
            )])
        }
    };
    let consts = MixingConstants::partite(n, l, lambda)?;
    if !consts.applicable {
        return Ok(vec![Certificate::not_applicable(
            name1,
            stmt1,
            format!("hypothesis failed: lambda = {lambda} <= (n-1)/n"),
        )]);
    }
    let total = x.empty_weight();
    let side_weight: Vec<f64> = labels
        .iter()
        .map(|&s| {
            x.side_vertices(s)
                .iter()
                .map(|&v| x.weight_at(0, v))
                .sum()
        })
        .collect();
    let side_index =
        |label: usize| labels.iter().position(|&s| s == label).expect("side label");

    let mut worst1: Option<MixingWorstCase> = None;
    let mut worst2: Option<MixingWorstCase> = None;
    let mut margin1 = f64::NEG_INFINITY;
    let mut margin2 = f64::NEG_INFINITY;
    for family in families {
        debug_assert_eq!(family.len(), l + 1);
        if family.any_set_empty() {
            continue;
        }
        // each class inside one side, sides pairwise distinct
        let mut sides = Vec::new();
        let mut ok = true;
        for s in family.sets() {
            let mut labels_here: BTreeSet<usize> = BTreeSet::new();
            for &v in s {
                if let Some(side) = x.side_of(v) {
                    labels_here.insert(side);
                }
            }
            if labels_here.len() != 1 {
                ok = false;
                break;
            }
            let side = *labels_here.iter().next().expect("one side");
            if sides.contains(&side) {
                ok = false;
                break;
            }
            sides.push(side);
        }
        if !ok {
            continue;
        }
        let weights = family_weights(x, family);
        let norm_weights: Vec<f64> = weights
            .iter()
            .zip(&sides)
            .map(|(w, &s)| w / side_weight[side_index(s)])
            .collect();
        let product: f64 = norm_weights.iter().product();
        let main = consts.a_l * product;
        let deviation = (m_tuple(x, family) / total - main).abs();
        let mut min_pair = f64::INFINITY;
        for i in 0..norm_weights.len() {
            for j in i + 1..norm_weights.len() {
                min_pair = min_pair.min((norm_weights[i] * norm_weights[j]).sqrt());
            }
        }
        let bound1 = consts.e_l * min_pair;
        let bound2 = consts.e_l * product.powf(1.0 / (l as f64 + 1.0));
        let fam_vec: Vec<Vec<VertexId>> = family
            .sets()
            .iter()
            .map(|s| s.iter().copied().collect())
            .collect();
        if deviation - bound1 > margin1 {
            margin1 = deviation - bound1;
            worst1 = Some(MixingWorstCase {
                family: fam_vec.clone(),
                deviation,
                bound: bound1,
            });
        }
        if deviation - bound2 > margin2 {
            margin2 = deviation - bound2;
            worst2 = Some(MixingWorstCase {
                family: fam_vec,
                deviation,
                bound: bound2,
            });
        }
    }
    let mut certs = Vec::new();
    match (worst1, worst2) {
        (Some(w1), Some(w2)) => {
            certs.push(
                Certificate::check_le(name1, stmt1, w1.deviation, w1.bound, MIXING_SLACK)
                    .with_witness(serde_json::to_value(&w1)?),
            );
            certs.push(
                Certificate::check_le(name2, stmt2, w2.deviation, w2.bound, MIXING_SLACK)
                    .with_witness(serde_json::to_value(&w2)?),
            );
        }
        _ => certs.push(Certificate::not_applicable(
            name1,
            stmt1,
            "no admissible side-respecting family supplied",
        )),
    }
    Ok(certs)
}

/// All families of l+1 nonempty pairwise-disjoint vertex sets, enumerated by
/// assigning each vertex to a class or to none; guarded by the budget.
pub fn exhaustive_families(
    x: &WeightedComplex,
    l: usize,
    budget: u64,
) -> Result<Vec<SubsetFamily>> {
    let nv = x.num_vertices();
    let states = (l as u128 + 2).pow(nv as u32);
    if states > budget as u128 {
        return Err(HdxError::BudgetExceeded {
            needed: states,
            budget,
        });
    }
    let classes = l + 1;
    let mut assignment = vec![0usize; nv];
    let mut out = Vec::new();
    loop {
        let mut sets: Vec<BTreeSet<VertexId>> = vec![Default::default(); classes];
        for (v, &a) in assignment.iter().enumerate() {
            if a > 0 {
                sets[a - 1].insert(v);
            }
        }
        if sets.iter().all(|s| !s.is_empty()) {
            out.push(SubsetFamily::new(sets).expect("disjoint"));
        }
        let mut pos = 0;
        loop {
            if pos == nv {
                return Ok(out);
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

/// `count` random families of l+1 nonempty pairwise-disjoint sets.
pub fn random_families(
    x: &WeightedComplex,
    l: usize,
    count: usize,
    seed: u64,
) -> Vec<SubsetFamily> {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let nv = x.num_vertices();
    let classes = l + 1;
    let mut out = Vec::new();
    let mut guard = 0;
    while out.len() < count && guard < count * 200 {
        guard += 1;
        let mut sets: Vec<BTreeSet<VertexId>> = vec![Default::default(); classes];
        for v in 0..nv {
            let a = rng.gen_range(0..=classes);
            if a > 0 {
                sets[a - 1].insert(v);
            }
        }
        if sets.iter().all(|s| !s.is_empty()) {
            out.push(SubsetFamily::new(sets).expect("disjoint"));
        }
    }
    out
}

/// All side-respecting families: a choice of l+1 distinct sides and a
/// nonempty subset of each.
pub fn exhaustive_partite_families(
    x: &WeightedComplex,
    l: usize,
    budget: u64,
) -> Result<Vec<SubsetFamily>> {
    use itertools::Itertools;
    let labels = x.side_labels().ok_or(HdxError::NotPartite)?;
    let mut out = Vec::new();
    let mut states: u128 = 0;
    for combo in labels.iter().combinations(l + 1) {
        let side_sets: Vec<Vec<VertexId>> =
            combo.iter().map(|&&s| x.side_vertices(s)).collect();
        let mut per_side: Vec<Vec<BTreeSet<VertexId>>> = Vec::new();
        for verts in &side_sets {
            let mut subsets = Vec::new();
            for mask in 1u64..(1 << verts.len()) {
                subsets.push(
                    verts
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &v)| v)
                        .collect(),
                );
            }
            per_side.push(subsets);
        }
        let combo_states: u128 = per_side.iter().map(|s| s.len() as u128).product();
        states += combo_states;
        if states > budget as u128 {
            return Err(HdxError::BudgetExceeded {
                needed: states,
                budget,
            });
        }
        for pick in per_side.into_iter().multi_cartesian_product() {
            out.push(SubsetFamily::new(pick).expect("sides are disjoint"));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    fn complete_skeleton(nv: usize, n: usize) -> WeightedComplex {
        let facets: Vec<Vec<usize>> = (0..nv).combinations(n + 1).collect();
        WeightedComplex::from_facets(facets, None).unwrap()
    }

    fn partite_222() -> WeightedComplex {
        let mut facets = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    facets.push(vec![a, 2 + b, 4 + c]);
                }
            }
        }
        WeightedComplex::from_facets(facets, None)
            .unwrap()
            .with_partition(vec![0, 0, 1, 1, 2, 2])
            .unwrap()
    }

    #[test]
    fn projection_is_idempotent_and_orthogonal() {
        let x = complete_skeleton(4, 2);
        let f = SubsetFamily::from_slices(&[&[0], &[1]]).unwrap();
        let p = projection(&x, &f).unwrap();
        let twice = p.mat.matmul(&p.mat);
        assert!(twice.sub(&p.mat).max_abs() == 0.0);
        // disjoint vertex-set projections at degree 0 annihilate each other
        let p0 = projection(&x, &SubsetFamily::from_slices(&[&[0]]).unwrap()).unwrap();
        let p1 = projection(&x, &SubsetFamily::from_slices(&[&[1]]).unwrap()).unwrap();
        assert_eq!(p0.mat.matmul(&p1.mat).max_abs(), 0.0);
    }

    #[test]
    fn psi_minus_one_value() {
        let x = complete_skeleton(4, 2);
        let f = SubsetFamily::from_slices(&[&[0], &[1], &[2]]).unwrap();
        let psi = psi_form(&x, -1, &f).unwrap();
        let expect = (6.0 / 24.0f64).powi(3);
        assert!((psi.values[0] - expect).abs() < 1e-15);
    }

    #[test]
    fn psi_zero_on_empty_class() {
        let x = complete_skeleton(4, 2);
        let f = SubsetFamily::from_slices(&[&[0], &[], &[2]]).unwrap();
        let psi = psi_form(&x, 0, &f).unwrap();
        assert_eq!(psi.max_abs(), 0.0);
    }

    #[test]
    fn psi_concatenation_recursion() {
        // psi_k(U_0..U_l)(sigma) = sgn(sigma) sum mu(sigma, sigma') psi_k(U_1..U_l)(sigma')
        let x = complete_skeleton(5, 3);
        let f = SubsetFamily::from_slices(&[&[0], &[1], &[2], &[3]]).unwrap();
        let k = 0isize;
        let l = 3usize;
        let psi_full = psi_form(&x, k, &f).unwrap();
        let psi_tail = psi_form(&x, k, &f.window(1, l)).unwrap();
        let g = build_kgraph(&x, k).unwrap();
        for (idx, s) in x.simplices(k).iter().enumerate() {
            let Some(ordered) = class_ordered(&f.window(0, k as usize), s) else {
                continue;
            };
            let mut sum = 0.0;
            for &(e, other) in &g.adj[idx] {
                // sigma' must lie in U_1 x ... x U_{k+1}
                if class_ordered(&f.window(1, k as usize + 1), &g.vertices[other]).is_some() {
                    sum += g.transition(idx, e) * psi_tail.values[other];
                }
            }
            let lhs = psi_full.eval(&x, &ordered);
            assert!((lhs - sum).abs() < 1e-12, "{lhs} vs {sum}");
        }
    }

    #[test]
    fn operator_products_on_k5() {
        let x = complete_skeleton(5, 2);
        let fams = [
            SubsetFamily::from_slices(&[&[0], &[1], &[2]]).unwrap(),
            SubsetFamily::from_slices(&[&[0, 3], &[1], &[2, 4]]).unwrap(),
        ];
        for f in &fams {
            for k in 0..2isize {
                let certs = operator_product_identities(&x, k, f).unwrap();
                assert!(certs.iter().all(|c| c.passed()), "k={k}: {certs:#?}");
            }
        }
    }

    #[test]
    fn mixing_constants_collapse_at_one() {
        let c = MixingConstants::general(2, 2, 1.0, 1.0).unwrap();
        assert!(c.eps_j.iter().all(|&e| e == 0.0));
        assert!((c.a_l - 1.0).abs() < 1e-15);
        assert_eq!(c.e_l, 0.0);
    }

    #[test]
    fn mixing_constants_worked_example() {
        // n = 2, l = 2, lambda = kappa = 3/2: lambda_1 = 3/2, lambda_0 = 4/3,
        // A_2 = (4/3)^2 (3/2) = 8/3
        let c = MixingConstants::general(2, 2, 1.5, 1.5).unwrap();
        assert!((c.lambda_j[0] - 4.0 / 3.0).abs() < 1e-15);
        assert!((c.lambda_j[1] - 1.5).abs() < 1e-15);
        assert!((c.a_l - 8.0 / 3.0).abs() < 1e-14);
        assert_eq!(c.e_l, 0.0);
    }

    #[test]
    fn partite_constants_leading_coefficient() {
        let c = MixingConstants::partite(2, 2, 1.0).unwrap();
        assert!((c.a_l - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(c.e_l, 0.0);
    }

    #[test]
    fn general_mixing_exact_on_complete() {
        let x = complete_skeleton(6, 2);
        for l in 1..=2usize {
            let fams = exhaustive_families(&x, l, 1 << 24).unwrap();
            let certs = verify_mixing_general(&x, l, &fams).unwrap();
            assert!(certs.iter().all(|c| c.passed()), "l={l}: {certs:#?}");
        }
    }

    #[test]
    fn partite_mixing_exact_on_222() {
        let x = partite_222();
        for l in 1..=2usize {
            let fams = exhaustive_partite_families(&x, l, 1 << 24).unwrap();
            assert!(!fams.is_empty());
            let certs = verify_mixing_partite(&x, l, &fams).unwrap();
            assert!(certs.iter().all(|c| c.passed()), "l={l}: {certs:#?}");
        }
    }

    #[test]
    fn constants_continuity_grid() {
        // A_l -> 1 and E_l -> 0 along a grid approaching (1, 1)
        let mut prev_gap = f64::INFINITY;
        for t in 1..=6 {
            let eps = 0.5f64.powi(t);
            let c = MixingConstants::general(2, 2, 1.0 - eps / 4.0, 1.0 + eps / 4.0).unwrap();
            let gap = (c.a_l - 1.0).abs() + c.e_l;
            assert!(gap <= prev_gap + 1e-12);
            prev_gap = gap;
        }
        assert!(prev_gap < 0.1);
    }
}
