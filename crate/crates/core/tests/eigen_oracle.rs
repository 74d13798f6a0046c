//! Cross-checks of the principal-eigenvalue machinery against
//! independent oracles: an implicit-shift QL spectrum, the Robin
//! transcendental root, finite-difference slopes, and the variational
//! characterization.

mod common;

use kppfront::eigen::{eigencurve, curve_slope, CrossProblem};
use kppfront::grid::CrossSectionGrid;
use kppfront::models::{make_quadratic_family, FlowProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn robin_problem(n: usize, q: f64, fprime0: f64) -> CrossProblem {
    let grid = CrossSectionGrid::build(1.0, n).unwrap();
    let flow = FlowProfile::zero(&grid);
    let fp = vec![fprime0; grid.num_nodes()];
    CrossProblem::robin(grid, flow, q, &fp).unwrap()
}

fn sheared_member_problem(n: usize, k: u32) -> CrossProblem {
    let grid = CrossSectionGrid::build(1.0, n).unwrap();
    let flow = FlowProfile::cosine(1.0, 1, &grid).unwrap();
    let member = make_quadratic_family(k, 1.0, &grid).unwrap();
    let fp = vec![1.0; grid.num_nodes()];
    CrossProblem::interior_loss(grid, flow, &member.loss, &fp).unwrap()
}

/// nu_q(lambda) at lambda = 0, V = 0 reduces to the Robin Laplacian
/// eigenvalue, whose transcendental root the oracle bisects directly.
#[test]
fn robin_eigenvalue_matches_transcendental_root() {
    let exact = common::robin_laplace_eigenvalue(1.0, 1.0);
    // Sanity-pin the oracle itself.
    assert!((exact - 1.70705).abs() < 1e-4, "oracle root {exact}");
    for (n, tol) in [(64, 2e-3), (512, 1e-4)] {
        let problem = robin_problem(n, 1.0, 0.0);
        let mu = problem.principal(0.0).unwrap().value;
        assert!(
            (mu - exact).abs() < tol,
            "N = {n}: mu = {mu}, exact = {exact}"
        );
    }
}

/// The Sturm-bisection eigenvalue agrees with the QL spectrum of the
/// very same tridiagonal operator, for both boundary conditions, with
/// shear and a concentrated interior loss in the potential.
#[test]
fn principal_eigenvalue_matches_ql_oracle() {
    for lambda in [-0.5, 0.0, 0.7, 1.9] {
        for problem in [robin_problem(128, 1.0, 1.0), sheared_member_problem(256, 8)] {
            let op = problem.assemble(lambda);
            let oracle = common::ql_smallest(&op.diag, &op.off);
            let mu = problem.principal(lambda).unwrap().value;
            assert!(
                (mu - oracle).abs() < 1e-8,
                "lambda = {lambda}: mu = {mu}, oracle = {oracle}"
            );
        }
    }
}

/// Rayleigh quotient of the computed eigenfunction reproduces the
/// eigenvalue.
#[test]
fn rayleigh_consistency() {
    for problem in [robin_problem(64, 1.0, 1.0), sheared_member_problem(256, 8)] {
        for lambda in [-1.0, 0.0, 0.5, 1.5] {
            let pair = problem.principal(lambda).unwrap();
            let quotient = problem.rayleigh(lambda, &pair.eigenfunction).unwrap();
            assert!(
                (quotient - pair.value).abs() < 1e-7,
                "lambda = {lambda}: rayleigh = {quotient}, mu = {}",
                pair.value
            );
        }
    }
}

/// The principal eigenvalue minimizes the Rayleigh quotient: no smooth
/// random trial function may fall below it.
#[test]
fn variational_minimality_over_random_trials() {
    let problem = robin_problem(128, 1.0, 1.0);
    let grid = problem.grid().clone();
    let lambda = 0.6;
    let mu = problem.principal(lambda).unwrap().value;
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for trial_idx in 0..100 {
        let coeffs: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let phi: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&y| {
                let mut v = 1.0;
                for (m, a) in coeffs.iter().enumerate() {
                    v += a * ((m as f64 + 1.0) * std::f64::consts::PI * y).cos();
                }
                v
            })
            .collect();
        let quotient = problem.rayleigh(lambda, &phi).unwrap();
        assert!(
            quotient >= mu - 1e-7,
            "trial {trial_idx}: rayleigh {quotient} below mu {mu}"
        );
    }
}

/// Analytic slope -int u phi^2 against centered differences of the
/// eigenvalue curve.
#[test]
fn curve_slope_matches_finite_differences() {
    let problem = sheared_member_problem(256, 8);
    let delta = 1e-4;
    for lambda in [-0.5, 0.3, 1.1] {
        let pair = problem.principal(lambda).unwrap();
        let slope = curve_slope(&pair, problem.flow(), problem.grid()).unwrap();
        let up = problem.principal(lambda + delta).unwrap().value;
        let dn = problem.principal(lambda - delta).unwrap().value;
        let fd = (up - dn) / (2.0 * delta);
        assert!(
            (slope - fd).abs() < 1e-5,
            "lambda = {lambda}: slope {slope} vs fd {fd}"
        );
    }
}

/// mu(lambda) is concave (infimum of affine functions of lambda).
#[test]
fn eigencurve_is_concave() {
    let problem = sheared_member_problem(256, 4);
    let lambdas: Vec<f64> = (0..41).map(|i| -2.0 + 4.0 * i as f64 / 40.0).collect();
    let curve = eigencurve(&problem, &lambdas).unwrap();
    for w in curve.values.windows(3) {
        let second = w[2] - 2.0 * w[1] + w[0];
        assert!(second <= 1e-8, "second difference {second} > 0");
    }
}

/// nu_q(lambda) is nondecreasing in q at fixed lambda.
#[test]
fn robin_eigenvalue_monotone_in_q() {
    let lambda = 0.7;
    let mut prev = f64::NEG_INFINITY;
    for q in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let mu = robin_problem(128, q, 1.0).principal(lambda).unwrap().value;
        assert!(mu >= prev - 1e-12, "q = {q}: mu {mu} < previous {prev}");
        prev = mu;
    }
}

/// Second-order grid convergence: the N-to-2N eigenvalue difference
/// scales like 1/N^2 with a stable constant.
#[test]
fn grid_convergence_is_second_order() {
    let lambda = 0.4;
    let value_at = |n: usize| robin_problem(n, 1.0, 1.0).principal(lambda).unwrap().value;
    let mut constants = Vec::new();
    for n in [64_usize, 128, 256] {
        let err = (value_at(n) - value_at(2 * n)).abs();
        constants.push(err * (n * n) as f64);
    }
    let cmax = constants.iter().cloned().fold(f64::MIN, f64::max);
    let cmin = constants.iter().cloned().fold(f64::MAX, f64::min);
    assert!(
        cmax <= 2.0 * cmin + 1e-12,
        "convergence constant unstable: {constants:?}"
    );
}

/// Full QL spectrum against the library decomposition used by the
/// separable front solver.
#[test]
fn full_spectrum_matches_ql_oracle() {
    let problem = robin_problem(96, 1.0, 2.0);
    let op = problem.assemble(0.0);
    let oracle = common::ql_eigenvalues(&op.diag, &op.off);
    let (values, _) = kppfront::tridiag::full_decomposition(&op.diag, &op.off, 1e-12).unwrap();
    assert_eq!(values.len(), oracle.len());
    let scale = oracle.last().unwrap().abs().max(1.0);
    for (a, b) in values.iter().zip(oracle.iter()) {
        assert!((a - b).abs() < 1e-8 * scale, "{a} vs oracle {b}");
    }
}
