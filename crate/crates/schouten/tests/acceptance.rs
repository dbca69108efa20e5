//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured quantities (run with `--nocapture` to see them). Tolerances
//! are pinned in the constants below.

#![allow(clippy::needless_range_loop)]

use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use schouten::chart::{self, ScalarField};
use schouten::cones::{Cone, ConeType};
use schouten::conformal;
use schouten::construct::{self, VerifySetup};
use schouten::curvature::{self, TangentPlane};
use schouten::eigen;
use schouten::expr;
use schouten::linalg::{self, Mat};
use schouten::manifest::{self, Manifest};
use schouten::sampling;

fn finish(name: &str, start: Instant, budget: Duration, detail: String) {
    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE {name}: PASS ({detail}; {:.2}s of {:.0}s budget)",
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    assert!(
        elapsed < budget,
        "{name} exceeded its runtime budget: {elapsed:?} > {budget:?}"
    );
}

fn mat_gap(a: &Mat, b: &Mat) -> f64 {
    linalg::sup_norm(&linalg::sub(a, b)) / (1.0 + linalg::sup_norm(b))
}

/// Criterion 1: the closed-form conformal laws match direct recomputation of
/// the tensor on e^{2u} g to relative error < 1e-7, over 20 random
/// (metric, polynomial u, tau, n) draws at 5 interior points each.
#[test]
fn criterion_01_conformal_law_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0_f64;
    for trial in 0..20 {
        let n = if trial % 2 == 0 { 3 } else { 4 };
        let tau = match trial % 4 {
            0 => 1.0,
            1 => 2.0,
            2 => 3.0,
            _ => n as f64 - 1.0,
        };
        let (domain, g) = sampling::random_flat_perturbed(&mut rng, n, 0.1);
        let u = ScalarField::expression(sampling::random_polynomial(&mut rng, n, 2, 0.4));
        for _ in 0..5 {
            let x = sampling::random_interior_point(&mut rng, &domain);
            let jets = g.jets(&x).unwrap();
            let curv = curvature::riemann(&jets).unwrap();
            let a_g =
                curvature::modified_schouten(&curv.ric, curv.scal, &jets.g, tau, 1.0).unwrap();
            let cov = conformal::covariant_data(&g, &u, &x).unwrap();
            let closed = if tau == 1.0 {
                conformal::transform_schouten(&a_g, &cov, &jets.g).unwrap()
            } else {
                conformal::transform_modified_schouten(&a_g, &cov, &jets.g, tau).unwrap()
            };
            let direct = conformal::direct_modified_schouten(&g, &u, tau, &x).unwrap();
            let gap = mat_gap(&closed, &direct);
            worst = worst.max(gap);
            assert!(gap < 1e-7, "tau {tau} n {n}: relative gap {gap}");
        }
    }
    finish(
        "1 (conformal-law oracle equivalence)",
        start,
        Duration::from_secs(30),
        format!("worst relative gap {worst:.3e} < 1e-7"),
    );
}

/// Criterion 2: the rescaled operator identity
/// ||V[u] - (n-2)/(tau-1) A^tau(g_u)|| < 1e-9 (1 + ||.||) for tau != 1.
#[test]
fn criterion_02_v_identity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = 0.0_f64;
    for trial in 0..20 {
        let n = if trial % 2 == 0 { 3 } else { 4 };
        let tau = match trial % 3 {
            0 => 2.0,
            1 => 3.0,
            _ => n as f64 - 1.0 + 0.5,
        };
        let rho = (n as f64 - 2.0) / (tau - 1.0);
        let (domain, g) = sampling::random_flat_perturbed(&mut rng, n, 0.1);
        let u = ScalarField::expression(sampling::random_polynomial(&mut rng, n, 2, 0.4));
        for _ in 0..5 {
            let x = sampling::random_interior_point(&mut rng, &domain);
            let jets = g.jets(&x).unwrap();
            let curv = curvature::riemann(&jets).unwrap();
            let a_tau =
                curvature::modified_schouten(&curv.ric, curv.scal, &jets.g, tau, 1.0).unwrap();
            let cov = conformal::covariant_data(&g, &u, &x).unwrap();
            let v = conformal::v_operator(&cov, &linalg::scale(&a_tau, rho), &jets.g, tau)
                .unwrap();
            let a_gu = conformal::transform_modified_schouten(&a_tau, &cov, &jets.g, tau).unwrap();
            let gap = mat_gap(&v, &linalg::scale(&a_gu, rho));
            worst = worst.max(gap);
            assert!(gap < 1e-9, "tau {tau} n {n}: gap {gap}");
        }
    }
    finish(
        "2 (V-identity)",
        start,
        Duration::from_secs(10),
        format!("worst relative gap {worst:.3e} < 1e-9"),
    );
}

/// Criterion 3: the Einstein-normal identity G(n,n) = -K(plane) holds to
/// 1e-7 (1 + |K|) over 10 random dimension-3 metrics x 10 points x 50 planes.
#[test]
fn criterion_03_einstein_normal_identity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = 0.0_f64;
    for _ in 0..10 {
        let eps = rng.random_range(0.05..0.18);
        let (domain, g) = sampling::random_flat_perturbed(&mut rng, 3, eps);
        for _ in 0..10 {
            let x = sampling::random_interior_point(&mut rng, &domain);
            let jets = g.jets(&x).unwrap();
            let curv = curvature::riemann(&jets).unwrap();
            let g_tensor = curvature::einstein(&curv.ric, curv.scal, &jets.g);
            let mut planes = 0;
            while planes < 50 {
                let plane = TangentPlane {
                    v1: (0..3).map(|_| rng.random_range(-1.0..1.0)).collect(),
                    v2: (0..3).map(|_| rng.random_range(-1.0..1.0)).collect(),
                };
                let k = match curvature::sectional(&curv, &jets.g, &plane) {
                    Ok(k) => k,
                    Err(_) => continue,
                };
                planes += 1;
                let normal = curvature::unit_normal(&jets.g, &plane).unwrap();
                let gnn = linalg::quadratic_form(&g_tensor, &normal, &normal);
                let resid = (gnn + k).abs() / (1.0 + k.abs());
                worst = worst.max(resid);
                assert!(resid < 1e-7, "residual {resid} at {x:?}");
            }
        }
    }
    finish(
        "3 (Einstein-normal identity, dim 3)",
        start,
        Duration::from_secs(30),
        format!("worst residual {worst:.3e} < 1e-7; 10x10x50 samples"),
    );
}

/// Criterion 4: boundary constants varrho(Gamma_k) = n/k to 1e-9 for all
/// 1 <= k <= n <= 6; Gamma_1 is type 2 and Gamma_k (k >= 2) type 1; and
/// tau = n-1 is not admissible for the positive orthant.
#[test]
fn criterion_04_cone_constants() {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for n in 1..=6usize {
        for k in 1..=n {
            let cone = Cone::gamma_k(n, k).unwrap();
            let rho = cone.varrho().unwrap();
            let err = (rho - n as f64 / k as f64).abs();
            worst = worst.max(err);
            assert!(err < 1e-9, "varrho(gamma_{k} in R^{n}) off by {err}");
            let ty = cone.classify_type().unwrap();
            if k == 1 {
                assert_eq!(ty, ConeType::Type2, "gamma_1 in R^{n}");
            } else {
                assert_eq!(ty, ConeType::Type1, "gamma_{k} in R^{n}");
            }
        }
    }
    for n in 3..=6usize {
        let orthant = Cone::gamma_k(n, n).unwrap();
        assert!(
            !orthant.tau_admissible(n as f64 - 1.0).unwrap(),
            "tau = n-1 must fall outside the admissible range for gamma_n"
        );
    }
    finish(
        "4 (cone constants)",
        start,
        Duration::from_secs(1),
        format!("worst varrho error {worst:.3e} < 1e-9"),
    );
}

fn positivity_search_manifest(tau: f64) -> Manifest {
    serde_json::from_str(&format!(
        r#"{{"schema":1,"dimension":3,
            "metric":{{"builtin":"flat_perturbed","epsilon":0.1}},
            "potential":{{"linear":[1.0,1.0,0.0,0.0]}},
            "tau":{tau},"alpha":1,
            "cone":{{"kind":"gamma_k","k":3}},
            "grid":9,"mode":"search","search":{{"N_max":64}},"seed":7}}"#
    ))
    .unwrap()
}

/// Criterion 5: tau-family positivity at desk scale. For tau in {2, 3} on
/// the perturbed flat metric with v = 1 + x1, the search finds N* <= 64 with
/// strictly positive cone margin at all 729 grid points.
#[test]
fn criterion_05_positivity_search() {
    let start = Instant::now();
    let mut found = Vec::new();
    for tau in [2.0, 3.0] {
        let m = positivity_search_manifest(tau);
        let out = manifest::run(&m).unwrap();
        assert!(out.verified, "tau {tau} did not verify");
        let search = out.report.search.unwrap();
        let n_star = search.n_star.expect("search must succeed");
        assert!(n_star <= 64);
        let verification = out.report.verification.unwrap();
        assert!(verification.min_margin > 0.0);
        assert_eq!(verification.margins.len(), 729);
        found.push((tau, n_star, verification.min_margin));
    }
    // tau = 2 = n-1 sits outside the orthant's directly-admissible range,
    // yet the construction above succeeded anyway
    let orthant = Cone::gamma_k(3, 3).unwrap();
    assert!(!orthant.tau_admissible(2.0).unwrap());
    finish(
        "5 (positivity search, tau in {2,3})",
        start,
        Duration::from_secs(60),
        format!("{found:?}"),
    );
}

/// Criterion 6: negative sectional curvature at desk scale. With the tau = 2
/// potential from criterion 5, all 729 x 100 sampled sectional curvatures of
/// g_u are negative and the Einstein tensor relative to g_u is positive
/// definite at every grid point.
#[test]
fn criterion_06_negative_sectional() {
    let start = Instant::now();
    let m = positivity_search_manifest(2.0);
    let out = manifest::run(&m).unwrap();
    let n_star = out.report.search.unwrap().n_star.unwrap();

    let (domain, g) = chart::flat_perturbed(3, 0.1, None).unwrap();
    let grid = chart::make_grid(&domain, 9).unwrap();
    let v = ScalarField::linear(vec![1.0, 1.0, 0.0, 0.0]);
    let u = v.exp_scaled(n_star as f64);
    let (summary, per_point_min_eigs) =
        construct::verify_negative_sectional_dim3(&g, &u, &grid, 100, 7).unwrap();
    assert_eq!(per_point_min_eigs.len(), 729);
    assert!(
        summary.max_sectional < 0.0,
        "max sampled K = {}",
        summary.max_sectional
    );
    assert!(
        per_point_min_eigs.iter().all(|&e| e > 0.0),
        "Einstein tensor lost definiteness at some grid point"
    );
    assert!(summary.min_einstein_eig > 0.0);
    assert!(
        summary.einstein_normal_residual_max < 1e-7,
        "Einstein-normal identity drifted: {}",
        summary.einstein_normal_residual_max
    );
    finish(
        "6 (negative sectional curvature, dim 3)",
        start,
        Duration::from_secs(120),
        format!(
            "N* = {n_star}, max K {:.3e} < 0, min Einstein eig {:.3e} > 0, Einstein-normal residual {:.1e}",
            summary.max_sectional, summary.min_einstein_eig, summary.einstein_normal_residual_max
        ),
    );
}

/// Criterion 7: the tau = 1 branch. With Gamma_1 (varrho = 3 > 2) on the
/// same metric family, some N <= 64 puts the eigenvalues of -A(g_u) relative
/// to g strictly inside the cone at every grid point.
#[test]
fn criterion_07_tau_one_branch() {
    let start = Instant::now();
    let (domain, g) = chart::flat_perturbed(3, 0.1, None).unwrap();
    let grid = chart::make_grid(&domain, 9).unwrap();
    let v = ScalarField::linear(vec![1.0, 1.0, 0.0, 0.0]);
    let setup = VerifySetup {
        tau: 1.0,
        alpha: -1.0,
        cone: Cone::gamma_k(3, 1).unwrap(),
    };
    let outcome = construct::search_min_n(&g, &v, &setup, &grid, 64).unwrap();
    let n_star = outcome.n_star.expect("tau = 1 search must succeed");
    assert!(n_star <= 64);
    assert!(outcome.report.min_margin > 0.0);
    assert_eq!(outcome.report.margins.len(), 729);
    finish(
        "7 (tau = 1 branch, gamma_1)",
        start,
        Duration::from_secs(60),
        format!("N* = {n_star}, min margin {:.4}", outcome.report.min_margin),
    );
}

/// Criterion 8: numerical hygiene. Jet derivatives match central finite
/// differences to 1e-6 relative on 50 random expressions, and generalized
/// eigenvalues satisfy |det(T - lambda g)| < 1e-8 ||T||^n on 100 random
/// pairs with n <= 5.
#[test]
fn criterion_08_numerical_hygiene() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut worst_ad = 0.0_f64;
    for trial in 0..50 {
        let dim = 2 + trial % 3;
        let e = sampling::random_expr(&mut rng, dim, 3);
        let x = sampling::random_unit_point(&mut rng, dim);
        let jet = expr::eval_jet2(&e, &x).unwrap();
        let (fd_grad, fd_hess) = sampling::finite_difference_jet(&e, &x, 1e-4).unwrap();
        let scale = 1.0 + jet.val().abs();
        for i in 0..dim {
            let rel = (jet.grad()[i] - fd_grad[i]).abs() / (scale + fd_grad[i].abs());
            worst_ad = worst_ad.max(rel);
            assert!(rel < 1e-6, "grad[{i}] of {e}: {rel}");
            for j in 0..dim {
                let rel =
                    (jet.hess_entry(i, j) - fd_hess[i][j]).abs() / (scale + fd_hess[i][j].abs());
                worst_ad = worst_ad.max(rel);
                assert!(rel < 1e-6, "hess[{i}][{j}] of {e}: {rel}");
            }
        }
    }

    let mut worst_resid = 0.0_f64;
    for _ in 0..100 {
        let n = rng.random_range(2..=5usize);
        let t = sampling::random_symmetric(&mut rng, n);
        let g = sampling::random_spd(&mut rng, n);
        let eigs = eigen::generalized_eigs(&t, &g).unwrap();
        let bound = 1e-8 * linalg::frobenius(&t).powi(n as i32);
        for &lam in eigs.as_slice() {
            let resid = linalg::det(&linalg::sub(&t, &linalg::scale(&g, lam))).abs();
            worst_resid = worst_resid.max(resid / bound);
            assert!(resid < bound, "residual {resid} vs bound {bound}");
        }
    }
    finish(
        "8 (numerical hygiene)",
        start,
        Duration::from_secs(30),
        format!("worst AD gap {worst_ad:.2e} < 1e-6, worst residual/bound {worst_resid:.2e} < 1"),
    );
}

/// Criterion 9: the closed-form spectrum of the amplified tensor matches the
/// assembled-matrix eigenvalues to 1e-10 relative over 200 random draws.
#[test]
fn criterion_09_closed_form_spectrum() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut draws = 0;
    let mut worst = 0.0_f64;
    while draws < 200 {
        let n = rng.random_range(3..=4usize);
        let tau = [2.0, 3.0, 5.0, 1.5][rng.random_range(0..4usize)];
        let gval = sampling::random_spd(&mut rng, n);
        let dv: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let big_n: f64 = rng.random_range(0.1..6.0);
        let v_val: f64 = rng.random_range(1.0..2.0);
        let ginv = linalg::spd_inverse(&gval).unwrap();
        let grad_sq = linalg::quadratic_form(&ginv, &dv, &dv);
        if grad_sq < 1e-3 {
            continue;
        }
        draws += 1;
        let nf = n as f64;
        let (rho, gamma) = (
            (nf - 2.0) / (tau - 1.0),
            (tau - 2.0) * (nf - 2.0) / (2.0 * (tau - 1.0)),
        );
        let w = (big_n * v_val).exp();
        let assembled_matrix = linalg::add(
            &linalg::scale(&gval, (1.0 + gamma * w) * grad_sq),
            &linalg::scale(&linalg::outer(&dv, &dv), rho * (w - 1.0)),
        );
        let assembled = eigen::generalized_eigs(&assembled_matrix, &gval).unwrap();
        let mut closed = construct::amplified_spectrum(grad_sq, v_val, big_n, tau, n).unwrap();
        closed.sort_by(f64::total_cmp);
        let scale = closed.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        for (a, b) in assembled.as_slice().iter().zip(&closed) {
            let rel = (a - b).abs() / scale;
            worst = worst.max(rel);
            assert!(rel < 1e-10, "{a} vs {b} (tau {tau}, n {n}, N {big_n})");
        }
    }
    finish(
        "9 (closed-form spectrum)",
        start,
        Duration::from_secs(5),
        format!("worst relative gap {worst:.3e} < 1e-10 over 200 draws"),
    );
}

/// Criterion 10: determinism. Two runs of the same manifest with the same
/// seed serialize to byte-identical reports, for every mode.
#[test]
fn criterion_10_determinism() {
    let start = Instant::now();
    let mut checked = 0;
    for (mode_patch, grid) in [
        (r#""mode":"search","search":{"N_max":64}"#, 5),
        (r#""mode":"verify-at-N","N":2"#, 5),
        (r#""mode":"sectional-dim3","planes_per_point":20"#, 3),
    ] {
        let text = format!(
            r#"{{"schema":1,"dimension":3,
                "metric":{{"builtin":"flat_perturbed","epsilon":0.1}},
                "potential":{{"linear":[1.0,1.0,0.0,0.0]}},
                "tau":2,"alpha":1,
                "cone":{{"kind":"gamma_k","k":3}},
                "grid":{grid},{mode_patch},"seed":7}}"#
        );
        let m: Manifest = serde_json::from_str(&text).unwrap();
        let first = manifest::report_to_json(&manifest::run(&m).unwrap().report).unwrap();
        let second = manifest::report_to_json(&manifest::run(&m).unwrap().report).unwrap();
        assert_eq!(first.as_bytes(), second.as_bytes(), "mode patch {mode_patch}");
        // and the round-trip through the serialized form is lossless
        let back = manifest::report_from_json(&first).unwrap();
        assert_eq!(manifest::report_to_json(&back).unwrap(), first);
        checked += 1;
    }
    finish(
        "10 (determinism)",
        start,
        Duration::from_secs(60),
        format!("{checked} modes byte-identical across reruns"),
    );
}
