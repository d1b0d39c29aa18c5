//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured slack. Tolerances are pinned here, not configurable.

use std::time::Instant;

use hdx::cert::CertStatus;
use hdx::cheeger::{h_classic, h_k_exhaustive, verify_cheeger};
use hdx::cochain::{d, delta, identity_suite, inner_product, Cochain};
use hdx::complex::{SubsetFamily, WeightedComplex};
use hdx::gen::{complete_multipartite, complete_skeleton, flag_random};
use hdx::mixing::{
    exhaustive_families, exhaustive_partite_families, operator_product_identities,
    random_families, verify_mixing_general, verify_mixing_partite,
};
use hdx::ops::{laplacian, LaplacianKind};
use hdx::overlap::{
    balanced_partition, centerpoint_bruteforce, covered_weight, overlap_bruteforce,
    DiscreteMeasure, Embedding,
};
use hdx::spectra::{
    descent_iterate, link_profile, local_expansion, symmetric_spectrum, verify_global_gaps,
};
use hdx::walks::{build_kgraph, m_tuple, path_c, spanned_edge_set, spanned_subgraph, spanned_vertex_set};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn cycle(n: usize) -> WeightedComplex {
    let facets: Vec<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    WeightedComplex::from_facets(facets, None).unwrap()
}

fn path_graph(n: usize) -> WeightedComplex {
    let facets: Vec<Vec<usize>> = (0..n - 1).map(|i| vec![i, i + 1]).collect();
    WeightedComplex::from_facets(facets, None).unwrap()
}

fn octahedron() -> WeightedComplex {
    complete_multipartite(&[2, 2, 2]).unwrap()
}

/// The standing registry of generated complexes exercised by several
/// criteria.
fn registry() -> Vec<(String, WeightedComplex)> {
    let mut out: Vec<(String, WeightedComplex)> = vec![
        ("triangle".into(), complete_skeleton(3, 2).unwrap()),
        ("k4_skeleton".into(), complete_skeleton(4, 2).unwrap()),
        ("k5_skeleton".into(), complete_skeleton(5, 2).unwrap()),
        ("k6_3skeleton".into(), complete_skeleton(6, 3).unwrap()),
        ("k5_graph".into(), complete_skeleton(5, 1).unwrap()),
        ("bipartite_22".into(), complete_multipartite(&[2, 2]).unwrap()),
        ("tripartite_222".into(), octahedron()),
        ("tripartite_122".into(), complete_multipartite(&[1, 2, 2]).unwrap()),
    ];
    for (seed, n, nv, p) in [(1u64, 2usize, 10usize, 0.65), (2, 3, 8, 0.85)] {
        if let Ok(flag) = flag_random(nv, p, n, seed) {
            out.push((format!("flag_n{n}_N{nv}_s{seed}"), flag.complex));
        }
    }
    out
}

#[test]
fn acceptance_01_weight_identities() {
    let start = Instant::now();
    let mut complexes = registry();
    let mut built = 0;
    let mut seed = 0u64;
    while built < 50 {
        let nv = 6 + (seed as usize % 10); // up to 15 vertices
        let n = 1 + (seed as usize % 3); // up to dimension 3
        let p = match n {
            1 => 0.5,
            2 => 0.6,
            _ => 0.75,
        };
        if let Ok(flag) = flag_random(nv, p, n, seed) {
            complexes.push((format!("flag{seed}"), flag.complex));
            built += 1;
        }
        seed += 1;
        assert!(seed < 200, "could not build 50 flag complexes");
    }
    let mut worst = 0.0f64;
    for (name, x) in &complexes {
        let rec = x.weight_recursion_error();
        assert!(rec <= 1e-12, "{name}: recursion error {rec:e}");
        for l in 0..=x.dim() as isize {
            let err = x.weight_identity_error(l);
            assert!(err <= 1e-12, "{name}: level-{l} identity error {err:e}");
            worst = worst.max(err);
        }
        if x.is_homogeneous() {
            for k in -1..=x.dim() as isize {
                for s in x.simplices(k) {
                    let exact = x.homogeneous_integer_weight(s).unwrap() as f64;
                    assert_eq!(x.weight(s), exact, "{name}: integer mirror at {s:?}");
                }
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 1 (weight identities on {} complexes): PASS, worst rel err {worst:.3e}, {elapsed:?}",
        complexes.len()
    );
}

#[test]
fn acceptance_02_operator_algebra() {
    let mut rng = ChaCha20Rng::seed_from_u64(0xa2);
    let mut worst_dd = 0.0f64;
    let mut worst_adj = 0.0f64;
    for (name, x) in registry() {
        let n = x.dim() as isize;
        for k in 0..n {
            for _ in 0..64 {
                let phi = Cochain::random(&x, k, &mut rng);
                if k + 1 < n {
                    let dd = d(&x, &d(&x, &phi).unwrap()).unwrap().max_abs();
                    assert!(dd <= 1e-14, "{name}: ||dd phi|| = {dd:e} at degree {k}");
                    worst_dd = worst_dd.max(dd);
                }
                let psi = Cochain::random(&x, k + 1, &mut rng);
                let lhs = inner_product(&x, &d(&x, &phi).unwrap(), &psi).unwrap();
                let rhs = inner_product(&x, &phi, &delta(&x, &psi).unwrap()).unwrap();
                let rel = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0);
                assert!(rel <= 1e-10, "{name}: adjointness defect {rel:e} at degree {k}");
                worst_adj = worst_adj.max(rel);
            }
        }
    }
    println!(
        "ACCEPTANCE 2 (operator algebra): PASS, worst ||dd|| {worst_dd:.3e}, worst adjoint defect {worst_adj:.3e}"
    );
}

#[test]
fn acceptance_03_localization_restriction() {
    let mut total = 0usize;
    for (name, x) in registry() {
        if x.dim() < 1 {
            continue;
        }
        let certs = identity_suite(&x, 64, 0xa3).unwrap();
        for c in &certs {
            assert_eq!(c.status, CertStatus::Pass, "{name}: {c:#?}");
        }
        total += certs.len();
    }
    println!("ACCEPTANCE 3 (localization/restriction suite): PASS, {total} certificates at rel 1e-9");
}

#[test]
fn acceptance_04_descent_exactness() {
    let mut worst = 0.0f64;
    for n in 1..=3usize {
        for nv in (n + 2)..=8usize {
            let x = complete_skeleton(nv, n).unwrap();
            // links at level k are complete skeletons on nv-k-1 vertices, so
            // the measured interval collapses to (nv-k-1)/(nv-k-2)
            let (lam, kap) = local_expansion(&x).unwrap();
            let (lam, kap) = (lam.unwrap(), kap.unwrap());
            assert!((lam - kap).abs() <= 1e-9);
            for k in -1..=(n as isize - 2) {
                let row = link_profile(&x, k).unwrap();
                let j = (n as isize - 2 - k) as usize;
                let predicted = descent_iterate(lam, j).unwrap();
                let exact = (nv as isize - k - 1) as f64 / (nv as isize - k - 2) as f64;
                for obs in [row.min_lambda.unwrap(), row.max_kappa.unwrap()] {
                    let err = (obs - predicted).abs().max((obs - exact).abs());
                    assert!(err <= 1e-9, "K{nv} n={n} level {k}: err {err:e}");
                    worst = worst.max(err);
                }
            }
        }
    }
    // the worked example: the K4 2-skeleton has link gap 3/2 and global gap 4/3
    let x = complete_skeleton(4, 2).unwrap();
    let spec = symmetric_spectrum(&laplacian(&x, 0, LaplacianKind::Up).unwrap()).unwrap();
    assert!((spec.lambda.unwrap() - 4.0 / 3.0).abs() <= 1e-9);
    let row = link_profile(&x, 0).unwrap();
    assert!((row.min_lambda.unwrap() - 1.5).abs() <= 1e-9);
    println!("ACCEPTANCE 4 (descent exactness on complete skeletons): PASS, worst defect {worst:.3e}");
}

#[test]
fn acceptance_05_global_gaps() {
    let mut checked = 0usize;
    for (name, x) in registry() {
        if x.dim() < 1 {
            continue;
        }
        let (lam, _) = local_expansion(&x).unwrap();
        let n = x.dim() as f64;
        let applicable = x.connectivity_report().hypothesis_holds()
            && lam.is_some_and(|l| l > (n - 1.0) / n);
        let certs = verify_global_gaps(&x).unwrap();
        if applicable {
            for c in &certs {
                assert_eq!(c.status, CertStatus::Pass, "{name}: {c:#?}");
            }
            checked += 1;
        } else {
            for c in &certs {
                assert_ne!(c.status, CertStatus::Fail, "{name}: {c:#?}");
            }
        }
    }
    assert!(checked >= 6);
    println!(
        "ACCEPTANCE 5 (cohomology vanishing + spectral inclusions): PASS on {checked} complexes at tol 1e-8"
    );
}

#[test]
fn acceptance_06_cheeger() {
    let start = Instant::now();

    // h^0(K3) = 3/2 = lambda(K3) exactly
    let k3 = complete_skeleton(3, 1).unwrap();
    let h0 = h_k_exhaustive(&k3, 0, 1 << 22).unwrap().h_k.unwrap();
    assert!((h0 - 1.5).abs() <= 1e-12, "h^0(K3) = {h0}");
    let lam = symmetric_spectrum(&laplacian(&k3, 0, LaplacianKind::Up).unwrap())
        .unwrap()
        .lambda
        .unwrap();
    assert!((lam - 1.5).abs() <= 1e-9);

    // 1-dimensional complexes with at most 8 vertices
    let mut graphs: Vec<(String, WeightedComplex)> = Vec::new();
    for nv in 3..=8 {
        graphs.push((format!("K{nv}"), complete_skeleton(nv, 1).unwrap()));
        graphs.push((format!("C{nv}"), cycle(nv)));
        graphs.push((format!("P{nv}"), path_graph(nv)));
    }
    for (a, b) in [(1, 3), (2, 2), (2, 4), (3, 3), (4, 4), (2, 6)] {
        graphs.push((format!("K{a}{b}"), complete_multipartite(&[a, b]).unwrap()));
    }
    for seed in 0..8u64 {
        if let Ok(flag) = flag_random(8, 0.45, 1, seed) {
            if flag.complex.is_connected() {
                graphs.push((format!("rand{seed}"), flag.complex));
            }
        }
    }
    for (name, g) in &graphs {
        let lam = if g.is_connected() {
            symmetric_spectrum(&laplacian(g, 0, LaplacianKind::Up).unwrap())
                .unwrap()
                .lambda
                .unwrap()
        } else {
            0.0
        };
        let h = h_classic(g).unwrap();
        let h0 = h_k_exhaustive(g, 0, 1 << 22)
            .unwrap()
            .h_k
            .unwrap_or(f64::INFINITY);
        assert!(h * h / 2.0 <= lam + 1e-9, "{name}: h^2/2 > lambda");
        assert!(lam <= 2.0 * h + 1e-9, "{name}: lambda = {lam} > 2h = {}", 2.0 * h);
        assert!(lam <= h0 + 1e-9, "{name}: lambda > h^0");
        assert!(h0 <= 2.0 * h + 1e-9, "{name}: h^0 = {h0} > 2h = {}", 2.0 * h);
    }

    // 2-dimensional complexes with at most 7 vertices: exhaustive h^k against
    // the descent bound with slack 1e-10
    let mut dim2: Vec<(String, WeightedComplex)> = Vec::new();
    for nv in 4..=7 {
        dim2.push((format!("K{nv}_skel"), complete_skeleton(nv, 2).unwrap()));
    }
    dim2.push(("octahedron".into(), octahedron()));
    dim2.push(("tripartite_122".into(), complete_multipartite(&[1, 2, 2]).unwrap()));
    let mut applicable = 0;
    for (name, x) in &dim2 {
        let certs = verify_cheeger(x, 1 << 24).unwrap();
        for c in &certs {
            assert_ne!(c.status, CertStatus::Fail, "{name}: {c:#?}");
            if c.name.starts_with("cheeger.lowerbound") && c.status == CertStatus::Pass {
                applicable += 1;
            }
        }
    }
    assert!(applicable >= 8, "only {applicable} applicable level bounds");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 6 (Cheeger, {} graphs + {} 2-complexes): PASS, {elapsed:?}",
        graphs.len(),
        dim2.len()
    );
}

#[test]
fn acceptance_07_walk_identities() {
    let mut worst = 0.0f64;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1.0);
    let cases = [
        ("triangle", complete_skeleton(3, 2).unwrap()),
        ("k4", complete_skeleton(4, 2).unwrap()),
        ("k5", complete_skeleton(5, 2).unwrap()),
        ("oct", octahedron()),
    ];
    for (name, x) in &cases {
        let n = x.dim() as isize;
        for k in 0..n {
            // one-step identity over every family of k+2 disjoint classes
            let fams = exhaustive_families(x, k as usize + 1, 1 << 24).unwrap();
            let g = build_kgraph(x, k).unwrap();
            for family in &fams {
                let starts = spanned_vertex_set(x, k, &family.window(0, k as usize));
                let edges = spanned_edge_set(&g, family);
                let pc = path_c(&g, &starts, &[&edges]);
                let err = rel(pc, (k as f64 + 1.0) * m_tuple(x, family));
                assert!(err <= 1e-12, "{name} k={k}: one-step err {err:e}");
                worst = worst.max(err);
            }
        }
        for k in 1..=n - 1 {
            // two-step identity over every family of k+1 disjoint classes
            let fams = exhaustive_families(x, k as usize, 1 << 24).unwrap();
            let g = build_kgraph(x, k - 1).unwrap();
            for family in &fams {
                let sub = spanned_subgraph(&g, family);
                let pc = path_c(&g, &sub.vertices, &[&sub.edges]);
                let err = rel(pc, (k * (k + 1)) as f64 * m_tuple(x, family));
                assert!(err <= 1e-12, "{name} k={k}: two-step err {err:e}");
                worst = worst.max(err);
            }
        }
    }
    println!("ACCEPTANCE 7 (path-conductance identities, exhaustive): PASS, worst rel err {worst:.3e}");
}

#[test]
fn acceptance_08_mixing_operator_identities() {
    let cases = [
        ("k5_skeleton", complete_skeleton(5, 2).unwrap()),
        ("k6_3skeleton", complete_skeleton(6, 3).unwrap()),
        ("bipartite_22", complete_multipartite(&[2, 2]).unwrap()),
        ("tripartite_222", octahedron()),
    ];
    let mut total = 0usize;
    for (name, x) in &cases {
        let n = x.dim();
        for l in 1..=n.min(3) {
            let fams = random_families(x, l, 12, 0xa8 ^ l as u64);
            for family in &fams {
                for k in 0..l.min(n) {
                    let certs = operator_product_identities(x, k as isize, family).unwrap();
                    for c in &certs {
                        assert_eq!(c.status, CertStatus::Pass, "{name} k={k} l={l}: {c:#?}");
                    }
                    total += certs.len();
                }
            }
        }
    }
    assert!(total > 100);
    println!("ACCEPTANCE 8 (mixing operator identities): PASS, {total} certificates at rel 1e-9");
}

#[test]
fn acceptance_09_mixing_inequalities() {
    // exhaustive disjoint families on complete 2-skeletons up to 7 vertices
    for nv in 5..=7usize {
        let x = complete_skeleton(nv, 2).unwrap();
        for l in 1..=2usize {
            let fams = exhaustive_families(&x, l, 1 << 26).unwrap();
            let certs = verify_mixing_general(&x, l, &fams).unwrap();
            for c in &certs {
                assert_eq!(c.status, CertStatus::Pass, "K{nv} l={l}: {c:#?}");
            }
        }
    }
    // side-respecting families on the complete 3-partite (2,2,2)
    let x = octahedron();
    for l in 1..=2usize {
        let fams = exhaustive_partite_families(&x, l, 1 << 26).unwrap();
        let certs = verify_mixing_partite(&x, l, &fams).unwrap();
        for c in &certs {
            assert_eq!(c.status, CertStatus::Pass, "partite l={l}: {c:#?}");
        }
    }
    println!("ACCEPTANCE 9 (mixing inequalities, exhaustive families): PASS at slack 1e-10");
}

#[test]
fn acceptance_10_overlap() {
    let start = Instant::now();

    // the square embedding of the K4 2-skeleton covers at least half the
    // weight at the diagonal crossing
    let x = complete_skeleton(4, 2).unwrap();
    let phi = Embedding::new(vec![
        vec![0.0, 0.0],
        vec![1.0, 0.0],
        vec![1.0, 1.0],
        vec![0.0, 1.0],
    ])
    .unwrap();
    let res = overlap_bruteforce(&x, &phi).unwrap();
    assert!(res.ratio >= 0.5 - 1e-12, "ratio = {}", res.ratio);
    let crossing = covered_weight(&x, &phi, &[0.5, 0.5]);
    assert!(crossing / 4.0 >= 0.5 - 1e-12);

    // heavy-vertex branch: a vertex with m(u) >= omega m(X^0)/(2(n+1))
    // covers at least omega/(2(n+1)^2) of the top weight at its own image
    let mut rng = ChaCha20Rng::seed_from_u64(0xa10);
    for trial in 0..20 {
        let n = if trial % 2 == 0 { 2 } else { 1 };
        let x = if n == 2 {
            let facets = vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]];
            let weights = facets
                .iter()
                .map(|f| if f.contains(&0) { 5.0 + rng.gen::<f64>() } else { 1.0 })
                .collect();
            WeightedComplex::from_facets(facets, Some(weights)).unwrap()
        } else {
            let facets: Vec<Vec<usize>> = (0..5).map(|i| vec![i, (i + 1) % 5]).collect();
            let weights = facets
                .iter()
                .map(|f| if f.contains(&0) { 4.0 + rng.gen::<f64>() } else { 1.0 })
                .collect();
            WeightedComplex::from_facets(facets, Some(weights)).unwrap()
        };
        let coords: Vec<Vec<f64>> = (0..x.num_vertices())
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let phi = Embedding::new(coords).unwrap();
        let m_top: f64 = x.facets().iter().map(|f| x.weight(f)).sum();
        let m_total = x.empty_weight();
        let (u, m_u) = (0..x.num_vertices())
            .map(|v| (v, x.weight_at(0, v)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        let omega = 2.0 * (n as f64 + 1.0) * m_u / m_total;
        let covered = covered_weight(&x, &phi, &phi.coords[u]);
        let needed = omega / (2.0 * (n as f64 + 1.0).powi(2)) * m_top;
        assert!(
            covered >= needed - 1e-9,
            "trial {trial}: covered {covered} < {needed}"
        );
    }

    // balanced partition postcondition on 100 random weight vectors; the
    // vector is long enough that no single weight can be heavy
    let mut done = 0;
    let mut seed_rng = ChaCha20Rng::seed_from_u64(0xb9);
    while done < 100 {
        let n = 1 + done % 3;
        let len = 6 * (n + 1) + done % 5;
        let weights: Vec<f64> = (0..len).map(|_| seed_rng.gen_range(0.5..1.5)).collect();
        let total: f64 = weights.iter().sum();
        let threshold = total / (2.0 * (n as f64 + 1.0));
        if weights.iter().any(|&w| w >= threshold) {
            continue; // precondition violated; the guarantee needs no heavy vertex
        }
        let part = balanced_partition(&weights, n).unwrap();
        assert!(part.heavy_vertex.is_none());
        for w in &part.side_weights {
            assert!(*w > threshold, "side weight {w} <= {threshold}");
        }
        done += 1;
    }

    // centerpoint guarantee on 50 random discrete measure tuples
    let mut rng = ChaCha20Rng::seed_from_u64(0xa11);
    for trial in 0..50 {
        let n = if trial % 2 == 0 { 1 } else { 2 };
        let measures: Vec<DiscreteMeasure> = (0..=n)
            .map(|_| {
                let support = 3 + rng.gen_range(0..2);
                let points: Vec<Vec<f64>> = (0..support)
                    .map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect())
                    .collect();
                let masses: Vec<f64> = (0..support).map(|_| rng.gen_range(0.2..1.0)).collect();
                DiscreteMeasure::new(points, masses).unwrap()
            })
            .collect();
        let res = centerpoint_bruteforce(&measures).unwrap();
        assert!(
            res.meets_guarantee,
            "trial {trial} (n={n}): prob {} < 1/{}!",
            res.probability,
            n + 1
        );
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!("ACCEPTANCE 10 (overlap, partitions, centerpoints): PASS, {elapsed:?}");
}

#[test]
fn acceptance_11_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k4.txt");
    let x = complete_skeleton(4, 2).unwrap();
    let mut buf = Vec::new();
    hdx::io::write_complex_text(&x, &mut buf).unwrap();
    std::fs::write(&path, buf).unwrap();
    let run = || {
        std::process::Command::new(env!("CARGO_BIN_EXE_hdx"))
            .args(["verify", path.to_str().unwrap(), "--seed", "7", "--trials", "16"])
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout, "reports differ between runs");
    assert!(!a.stdout.is_empty());
    println!("ACCEPTANCE 11 (deterministic reports): PASS, {} bytes identical", a.stdout.len());
}
