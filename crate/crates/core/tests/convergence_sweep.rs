//! Eigencurve, eigenfunction and minimal-speed convergence of the
//! interior-loss problems to the Robin problem as the heat loss
//! concentrates at the boundary, with the frozen negative control.

mod common;

use kppfront::convergence::{lemma1_gap, speed_convergence, theorem2_sweep, SweepContext};
use kppfront::error::Error;
use kppfront::grid::CrossSectionGrid;
use kppfront::models::{make_quadratic_family, FamilySpec, FlowProfile};

fn ctx(fprime0: f64) -> SweepContext<'static> {
    let fp: &'static dyn Fn(f64) -> f64 = match fprime0 {
        v if v == 1.0 => &|_| 1.0,
        v if v == 2.0 => &|_| 2.0,
        _ => panic!("unsupported test coefficient"),
    };
    SweepContext {
        fprime0: fp,
        flow: &|g: &CrossSectionGrid| Ok(FlowProfile::zero(g)),
        length: 1.0,
        n_ref: 2048,
    }
}

#[test]
fn boundary_flux_gap_for_constant_test_function() {
    // integrate(g_k) = 2 = q * (phi^2 at both walls) for phi == 1.
    for k in [8, 16, 32] {
        let grid = CrossSectionGrid::build(1.0, 32 * k as usize).unwrap();
        let member = make_quadratic_family(k, 1.0, &grid).unwrap();
        let phi = vec![1.0; grid.num_nodes()];
        let gap = lemma1_gap(&member, &grid, &phi, 1.0).unwrap();
        assert!(gap <= 1e-3, "k = {k}: gap {gap}");
    }
}

#[test]
fn boundary_flux_gap_decays_for_linear_test_function() {
    // phi = sqrt(3) y: boundary target q (0 + 3 L^2) = 3; interior term
    // converges at rate O(1/k).
    let mut gaps = Vec::new();
    let ks = [8_u32, 16, 32, 64];
    for &k in &ks {
        let grid = CrossSectionGrid::build(1.0, (32 * k as usize).max(256)).unwrap();
        let member = make_quadratic_family(k, 1.0, &grid).unwrap();
        let phi: Vec<f64> = grid.nodes().iter().map(|&y| 3.0_f64.sqrt() * y).collect();
        gaps.push(lemma1_gap(&member, &grid, &phi, 1.0).unwrap());
    }
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "gaps not decreasing: {gaps:?}");
    // Log-log fitted order in 1/k close to first order.
    let slope = {
        let pts: Vec<(f64, f64)> = ks
            .iter()
            .zip(gaps.iter())
            .map(|(&k, &g)| ((1.0 / k as f64).ln(), g.ln()))
            .collect();
        let n = pts.len() as f64;
        let (sx, sy): (f64, f64) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
        let (sxx, sxy): (f64, f64) = pts
            .iter()
            .fold((0.0, 0.0), |(a, b), p| (a + p.0 * p.0, b + p.0 * p.1));
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    };
    assert!(slope >= 0.8, "fitted order {slope}, gaps {gaps:?}");
}

#[test]
fn disjoint_support_gives_null_flux() {
    let k = 8;
    let grid = CrossSectionGrid::build(1.0, 512).unwrap();
    let member = make_quadratic_family(k, 1.0, &grid).unwrap();
    let phi: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&y| {
            if (0.25..=0.75).contains(&y) {
                ((y - 0.25) * (0.75 - y) * 16.0).powi(2)
            } else {
                0.0
            }
        })
        .collect();
    let gap = lemma1_gap(&member, &grid, &phi, 1.0).unwrap();
    assert!(gap <= 1e-6, "gap {gap}");
}

#[test]
fn eigencurves_converge_to_robin() {
    let family = FamilySpec::Quadratic { q: 1.0 };
    let ks = [4_u32, 8, 16, 32];
    let ctx = ctx(1.0);
    let report = theorem2_sweep(&family, &ks, (-1.0, 1.0), &[0.0, 0.5], &ctx).unwrap();

    let errs: Vec<f64> = report.rows.iter().map(|r| r.sup_window_err).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "sup errors not decreasing: {errs:?}");

    // mu_k(0) -> nu_1(0) = (Robin transcendental root) - 1.
    let nu0 = common::robin_laplace_eigenvalue(1.0, 1.0) - 1.0;
    let mu0 = {
        let grid = CrossSectionGrid::build(1.0, 1024).unwrap();
        let member = make_quadratic_family(32, 1.0, &grid).unwrap();
        let fp = vec![1.0; grid.num_nodes()];
        let flow = FlowProfile::zero(&grid);
        kppfront::eigen::CrossProblem::interior_loss(grid, flow, &member.loss, &fp)
            .unwrap()
            .principal(0.0)
            .unwrap()
            .value
    };
    // The gap decays like ~0.5/k (first order in the layer width):
    // about 1.7e-2 at k = 32.
    assert!((mu0 - nu0).abs() < 2.5e-2, "mu_32(0) = {mu0}, nu(0) = {nu0}");

    // Eigenfunction distances decrease per probe; H^1 energies bounded.
    for p in 0..report.probes.len() {
        let dists: Vec<f64> = report.rows.iter().map(|r| r.l2_dists[p]).collect();
        assert!(
            dists.windows(2).all(|w| w[1] < w[0]),
            "probe {p}: distances not decreasing: {dists:?}"
        );
    }
    let e0 = report.rows[0].dirichlet_max;
    for r in &report.rows {
        assert!(r.dirichlet_max <= 2.0 * e0 + 1.0, "H1 energy blew up at k = {}", r.k);
        assert!(r.limsup_defect <= 1e-10, "limsup chain violated at k = {}", r.k);
    }
    assert!(report.fitted_order > 0.5, "fitted order {}", report.fitted_order);
}

#[test]
fn frozen_family_plateaus() {
    let family = FamilySpec::Frozen { k0: 4, q: 1.0 };
    let ctx = ctx(1.0);
    let report = theorem2_sweep(&family, &[4, 8, 16, 32], (-1.0, 1.0), &[0.5], &ctx).unwrap();
    let errs: Vec<f64> = report.rows.iter().map(|r| r.sup_window_err).collect();
    let spread = (errs.iter().cloned().fold(f64::MIN, f64::max)
        - errs.iter().cloned().fold(f64::MAX, f64::min))
        / errs[0];
    assert!(spread <= 1e-10, "frozen control moved: {errs:?}");
}

#[test]
fn minimal_speeds_converge_when_well_posed() {
    // fprime0 = 2 keeps nu_q(0) < 0.
    let family = FamilySpec::Quadratic { q: 1.0 };
    let ctx = ctx(2.0);
    let report = speed_convergence(&family, &[4, 8, 16, 32], &ctx, 50.0).unwrap();
    assert!(report.nu0 < 0.0);
    let gaps: Vec<f64> = report.rows.iter().map(|r| r.c_gap).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "speed gaps not decreasing: {gaps:?}");
    // Lemma analogue: the roots at the test speed stay in a fixed
    // bracket around lambda_inf and approach it.
    let lambda_ks: Vec<f64> = report.rows.iter().filter_map(|r| r.lambda_k).collect();
    assert_eq!(lambda_ks.len(), 4, "members skipped: {report:?}");
    for &l in &lambda_ks {
        assert!(l > 0.0 && l < report.c_test, "root {l} escapes the bracket");
    }
    let d_first = (lambda_ks[0] - report.lambda_inf).abs();
    let d_last = (lambda_ks[3] - report.lambda_inf).abs();
    assert!(d_last < d_first, "roots not approaching lambda_inf");
    assert!(report.dispersion_defect <= 1e-6, "defect {}", report.dispersion_defect);
}

#[test]
fn ill_posed_speed_sweep_is_a_hypothesis_violation() {
    // fprime0 = 1 with q = 1: nu_q(0) = 0.707... >= 0.
    let family = FamilySpec::Quadratic { q: 1.0 };
    let ctx = ctx(1.0);
    match speed_convergence(&family, &[4, 8], &ctx, 50.0) {
        Err(Error::HypothesisViolation(_)) => {}
        other => panic!("expected hypothesis violation, got {other:?}"),
    }
}
