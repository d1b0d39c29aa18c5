//! Antisymmetric k-forms and the coboundary calculus on them.
//!
//! A cochain stores one value per canonical (sorted) k-simplex; evaluation on
//! an arbitrary ordered simplex multiplies by the parity of the sorting
//! permutation. With that convention the weighted inner product over ordered
//! simplices collapses to `sum over canonical tau of m(tau) phi(tau) psi(tau)`
//! because the (k+1)! orderings of each simplex contribute equal terms.
//!
//! Sign convention for the differential on an edge (v0, v1):
//! `d phi = phi(v1) - phi(v0)`, the alternating sum over deleted vertices.
//! This is used everywhere, including the indicator-form calculus.

use rand::Rng;

use crate::complex::{Link, WeightedComplex};
use crate::error::{HdxError, Result};
use crate::simplex::{sort_sign, Simplex, VertexId};

/// A k-form: degree plus one value per canonical k-simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    pub k: isize,
    pub values: Vec<f64>,
}

impl Cochain {
    pub fn zeros(x: &WeightedComplex, k: isize) -> Self {
        Cochain {
            k,
            values: vec![0.0; x.num_simplices(k)],
        }
    }

    pub fn constant(x: &WeightedComplex, k: isize, c: f64) -> Self {
        Cochain {
            k,
            values: vec![c; x.num_simplices(k)],
        }
    }

    /// Random values uniform in [-1, 1].
    pub fn random<R: Rng>(x: &WeightedComplex, k: isize, rng: &mut R) -> Self {
        Cochain {
            k,
            values: (0..x.num_simplices(k)).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        }
    }

    /// Indicator of a single canonical simplex.
    pub fn indicator(x: &WeightedComplex, s: &Simplex) -> Self {
        let mut c = Cochain::zeros(x, s.dim());
        c.values[x.index_of(s).expect("simplex in complex")] = 1.0;
        c
    }

    /// Evaluation on an ordered simplex: parity times the stored value.
    /// Zero if the underlying set is not a simplex of the complex.
    pub fn eval(&self, x: &WeightedComplex, ordered: &[VertexId]) -> f64 {
        match sort_sign(ordered) {
            Some((sign, s)) => match x.index_of(&s) {
                Some(i) if s.dim() == self.k => sign * self.values[i],
                _ => 0.0,
            },
            None => 0.0,
        }
    }

    pub fn scale(&self, s: f64) -> Cochain {
        Cochain {
            k: self.k,
            values: self.values.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        assert_eq!(self.k, other.k);
        Cochain {
            k: self.k,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Cochain) -> Cochain {
        self.add(&other.scale(-1.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, &x| a.max(x.abs()))
    }
}

/// Weighted inner product of two k-forms over canonical representatives.
pub fn inner_product(x: &WeightedComplex, phi: &Cochain, psi: &Cochain) -> Result<f64> {
    if phi.k != psi.k {
        return Err(HdxError::DegreeMismatch(phi.k, psi.k));
    }
    Ok((0..phi.values.len())
        .map(|i| x.weight_at(phi.k, i) * phi.values[i] * psi.values[i])
        .sum())
}

/// Weighted norm squared.
pub fn norm_sq(x: &WeightedComplex, phi: &Cochain) -> f64 {
    inner_product(x, phi, phi).expect("same degree")
}

/// Differential d: C^k -> C^{k+1}, alternating sum over deleted vertices.
pub fn d(x: &WeightedComplex, phi: &Cochain) -> Result<Cochain> {
    let k = phi.k;
    if k >= x.dim() as isize {
        return Err(HdxError::DimensionOutOfRange {
            k,
            lo: -1,
            hi: x.dim() as isize - 1,
        });
    }
    let mut out = Cochain::zeros(x, k + 1);
    for (j, s) in x.simplices(k + 1).iter().enumerate() {
        let mut acc = 0.0;
        let mut sign = 1.0;
        for i in 0..s.vertices().len() {
            let face = s.face(i);
            if let Some(fi) = x.index_of(&face) {
                acc += sign * phi.values[fi];
            }
            sign = -sign;
        }
        out.values[j] = acc;
    }
    Ok(out)
}

/// Codifferential delta: C^k -> C^{k-1} by the explicit weighted formula
/// `delta phi (tau) = sum over v with v tau in the complex of
/// m(v tau)/m(tau) phi(v tau)`, where prepending v to the sorted tau carries
/// the parity of moving v to its sorted position.
pub fn delta(x: &WeightedComplex, phi: &Cochain) -> Result<Cochain> {
    let k = phi.k;
    if k < 0 {
        return Err(HdxError::DimensionOutOfRange {
            k,
            lo: 0,
            hi: x.dim() as isize,
        });
    }
    let mut out = Cochain::zeros(x, k - 1);
    for (i, tau) in x.simplices(k - 1).iter().enumerate() {
        let m_tau = x.weight_at(k - 1, i);
        let mut acc = 0.0;
        for &(v, j) in x.cofacet_indices(k - 1, i) {
            // phi(v tau) = parity(v into tau) * phi(canonical cofacet)
            let sign = if tau.insertion_index(v) % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * x.weight_at(k, j) / m_tau * phi.values[j];
        }
        out.values[i] = acc;
    }
    Ok(out)
}

/// Localization phi_tau(sigma) = phi(tau sigma) for an ordered tau of
/// dimension j; the result is a (k - j - 1)-form on the link of tau.
pub fn localize(
    x: &WeightedComplex,
    link: &Link,
    phi: &Cochain,
    tau_ordered: &[VertexId],
) -> Result<Cochain> {
    let (_, tau) = sort_sign(tau_ordered)
        .ok_or_else(|| HdxError::SimplexNotInComplex(tau_ordered.to_vec()))?;
    if !x.contains_simplex(&tau) {
        return Err(HdxError::SimplexNotInComplex(tau_ordered.to_vec()));
    }
    debug_assert_eq!(link.tau, tau);
    let j = tau.dim();
    let out_k = phi.k - j - 1;
    let mut out = Cochain::zeros(&link.complex, out_k);
    for (i, sigma) in link.complex.simplices(out_k).iter().enumerate() {
        // Evaluate phi on the concatenation (tau_ordered, sigma) in parent
        // ids; eval() resolves the parity of the whole concatenated tuple.
        let mut ordered: Vec<VertexId> = tau_ordered.to_vec();
        ordered.extend(sigma.vertices().iter().map(|&v| link.to_parent[v]));
        out.values[i] = phi.eval(x, &ordered);
    }
    Ok(out)
}

/// Restriction phi^tau(sigma) = phi(sigma) on the link of tau; requires
/// k + dim(tau) + 1 <= n.
pub fn restrict(x: &WeightedComplex, link: &Link, phi: &Cochain) -> Result<Cochain> {
    let l = link.tau.dim();
    if phi.k + l + 1 > x.dim() as isize {
        return Err(HdxError::DimensionOutOfRange {
            k: phi.k + l + 1,
            lo: 0,
            hi: x.dim() as isize,
        });
    }
    let mut out = Cochain::zeros(&link.complex, phi.k);
    for (i, sigma) in link.complex.simplices(phi.k).iter().enumerate() {
        let parent = link.pull_back(sigma);
        out.values[i] = phi.values[x
            .index_of(&parent)
            .expect("link simplices are simplices of the parent")];
    }
    Ok(out)
}

/// Runs the localization and restriction identities on randomized forms and
/// reports one certificate per identity and degree, carrying the worst
/// relative defect over all trials.
///
/// Sums over ordered simplices reduce to sums over canonical representatives
/// times the orbit size, since every summand here is invariant under
/// reordering of the localization simplex.
pub fn identity_suite(
    x: &WeightedComplex,
    trials: usize,
    seed: u64,
) -> Result<Vec<crate::cert::Certificate>> {
    use crate::cert::Certificate;
    use crate::simplex::factorial;
    use rand::SeedableRng;

    const TOL: f64 = 1e-9;
    let n = x.dim() as isize;
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let mut certs = Vec::new();

    // Links of every canonical simplex per level, built once.
    let mut links: Vec<Vec<Link>> = Vec::new();
    for l in -1..n {
        links.push(
            x.simplices(l)
                .iter()
                .map(|tau| x.link(tau).expect("tau is in the complex"))
                .collect(),
        );
    }
    let level = |l: isize| -> &Vec<Link> { &links[(l + 1) as usize] };
    let rel = |lhs: f64, rhs: f64| (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0);

    for k in 0..=n {
        let orbit = factorial(k as usize); // orderings of a (k-1)-simplex
        let mut worst_1a = 0.0f64;
        let mut worst_1b = 0.0f64;
        let mut worst_2 = 0.0f64;
        let mut worst_3 = 0.0f64;
        for _ in 0..trials {
            let phi = Cochain::random(x, k, &mut rng);
            let psi = Cochain::random(x, k, &mut rng);
            let ip = inner_product(x, &phi, &psi)?;

            let mut sum_loc = 0.0;
            let mut sum_delta = 0.0;
            let mut sum_d = 0.0;
            for link in level(k - 1) {
                let tau_ordered = link.tau.vertices().to_vec();
                let phi_t = localize(x, link, &phi, &tau_ordered)?;
                let psi_t = localize(x, link, &psi, &tau_ordered)?;
                sum_loc += inner_product(&link.complex, &phi_t, &psi_t)?;
                let dphi_t = delta(&link.complex, &phi_t)?;
                let dpsi_t = delta(&link.complex, &psi_t)?;
                sum_delta += inner_product(&link.complex, &dphi_t, &dpsi_t)?;
                if k <= n - 1 {
                    let dp = d(&link.complex, &phi_t)?;
                    let dq = d(&link.complex, &psi_t)?;
                    sum_d += inner_product(&link.complex, &dp, &dq)?;
                }
            }
            // (k+1)! <phi, psi> = sum over ordered tau of <phi_tau, psi_tau>
            worst_1a = worst_1a.max(rel(factorial((k + 1) as usize) * ip, orbit * sum_loc));
            // k! <delta phi, delta psi> = sum of <delta phi_tau, delta psi_tau>
            let dphi = delta(x, &phi)?;
            let dpsi = delta(x, &psi)?;
            let ip_delta = inner_product(x, &dphi, &dpsi)?;
            worst_1b =
                worst_1b.max(rel(factorial(k as usize) * ip_delta, orbit * sum_delta));
            if k <= n - 1 {
                let ip_d = inner_product(x, &d(x, &phi)?, &d(x, &psi)?)?;
                // k! <d phi, d psi> = sum (<d phi_tau, d psi_tau> - k/(k+1) <phi_tau, psi_tau>)
                let kf = k as f64;
                worst_2 = worst_2.max(rel(
                    factorial(k as usize) * ip_d,
                    orbit * (sum_d - kf / (kf + 1.0) * sum_loc),
                ));
                if k >= 1 {
                    // k! <d phi, d psi> + k! k <phi, psi> = sum <d phi_tau, d psi_tau>
                    worst_3 = worst_3.max(rel(
                        factorial(k as usize) * ip_d + factorial(k as usize) * kf * ip,
                        orbit * sum_d,
                    ));
                }
            }
        }
        certs.push(Certificate::check_le(
            format!("identity.localization.inner.k{k}"),
            format!("(k+1)! <phi,psi> matches the localized inner products at degree {k}"),
            worst_1a,
            0.0,
            TOL,
        ));
        certs.push(Certificate::check_le(
            format!("identity.localization.delta.k{k}"),
            format!("k! <delta phi, delta psi> matches the localized codifferentials at degree {k}"),
            worst_1b,
            0.0,
            TOL,
        ));
        if k <= n - 1 {
            certs.push(Certificate::check_le(
                format!("identity.localization.d.k{k}"),
                format!("k! <d phi, d psi> matches the localized differentials at degree {k}"),
                worst_2,
                0.0,
                TOL,
            ));
            if k >= 1 {
                certs.push(Certificate::check_le(
                    format!("identity.localization.dirichlet.k{k}"),
                    format!("k!(<d phi,d psi> + k <phi,psi>) matches the localized Dirichlet forms at degree {k}"),
                    worst_3,
                    0.0,
                    TOL,
                ));
            }
        }
    }

    // Restriction identities.
    for k in 0..n {
        for l in 0..=(n - k - 1) {
            let orbit = factorial((l + 1) as usize);
            let mut worst_r1 = 0.0f64;
            let mut worst_r2 = 0.0f64;
            for _ in 0..trials {
                let phi = Cochain::random(x, k, &mut rng);
                let psi = Cochain::random(x, k, &mut rng);
                let ip = inner_product(x, &phi, &psi)?;
                let mut sum_r = 0.0;
                let mut sum_rd = 0.0;
                for link in level(l) {
                    let phi_r = restrict(x, link, &phi)?;
                    let psi_r = restrict(x, link, &psi)?;
                    sum_r += inner_product(&link.complex, &phi_r, &psi_r)?;
                    if k == 0 && n > 1 && l <= n - 2 {
                        let dp = d(&link.complex, &phi_r)?;
                        let dq = d(&link.complex, &psi_r)?;
                        sum_rd += inner_product(&link.complex, &dp, &dq)?;
                    }
                }
                worst_r1 = worst_r1.max(rel(ip, orbit * sum_r));
                if k == 0 && n > 1 && l <= n - 2 {
                    let ip_d = inner_product(x, &d(x, &phi)?, &d(x, &psi)?)?;
                    worst_r2 = worst_r2.max(rel(ip_d, orbit * sum_rd));
                }
            }
            certs.push(Certificate::check_le(
                format!("identity.restriction.inner.k{k}.l{l}"),
                format!("<phi,psi> at degree {k} matches the level-{l} restricted inner products"),
                worst_r1,
                0.0,
                TOL,
            ));
            if k == 0 && n > 1 && l <= n - 2 {
                certs.push(Certificate::check_le(
                    format!("identity.restriction.d.l{l}"),
                    format!("<d phi, d psi> on 0-forms matches the level-{l} restricted differentials"),
                    worst_r2,
                    0.0,
                    TOL,
                ));
            }
        }
    }

    // <L0- phi, phi> = ||delta phi||^2 = ||L0- phi||^2.
    {
        let mut worst = 0.0f64;
        for _ in 0..trials {
            let phi = Cochain::random(x, 0, &mut rng);
            let dl = delta(x, &phi)?;
            let proj = d(x, &dl)?; // only valid when n >= 1
            let a = inner_product(x, &proj, &phi)?;
            let b = norm_sq(x, &dl);
            let c = norm_sq(x, &proj);
            worst = worst.max(rel(a, b)).max(rel(b, c));
        }
        certs.push(Certificate::check_le(
            "identity.lower0.norms",
            "<L0- phi, phi> = ||delta_(-1) phi||^2 = ||L0- phi||^2",
            worst,
            0.0,
            TOL,
        ));
    }

    // Partite localization of the side lower operators.
    if let Some(labels) = x.side_labels() {
        for k in 0..=n {
            let orbit = factorial(k as usize);
            for &side in &labels {
                let op = crate::ops::lower_partite(x, k, side)?;
                let mut worst = 0.0f64;
                for _ in 0..trials.min(16) {
                    let phi = Cochain::random(x, k, &mut rng);
                    let lhs = {
                        let out = Cochain { k, values: op.apply(&phi.values) };
                        factorial(k as usize) * inner_product(x, &out, &phi)?
                    };
                    let mut sum = 0.0;
                    for link in level(k - 1) {
                        // the side operator vanishes on links whose base
                        // simplex already uses the side
                        if !link
                            .complex
                            .side_labels()
                            .map_or(false, |ls| ls.contains(&side))
                        {
                            continue;
                        }
                        let tau_ordered = link.tau.vertices().to_vec();
                        let phi_t = localize(x, link, &phi, &tau_ordered)?;
                        let link_op = crate::ops::lower_partite(&link.complex, 0, side)?;
                        let out = Cochain {
                            k: 0,
                            values: link_op.apply(&phi_t.values),
                        };
                        sum += inner_product(&link.complex, &out, &phi_t)?;
                    }
                    worst = worst.max(rel(lhs, orbit * sum));
                }
                certs.push(Certificate::check_le(
                    format!("identity.partite.lower.k{k}.side{side}"),
                    format!(
                        "k! <L{k}-({side}) phi, phi> matches the localized side operators"
                    ),
                    worst,
                    0.0,
                    TOL,
                ));
            }
        }
    }

    Ok(certs)
}
