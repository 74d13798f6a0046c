//! Minimal front speeds and dispersion roots.
//!
//! The minimal speed is c* = min over lambda > 0 of
//! s(lambda) = (lambda^2 - mu(lambda)) / lambda, well defined when
//! mu(0) < 0. Concavity of mu makes s unimodal, so a bracketing scan
//! followed by golden-section refinement finds the unique minimum; each
//! s-evaluation is a fresh eigensolve.

use crate::eigen::{self, CrossProblem};
use crate::error::{Error, Result};

pub const DEFAULT_LAMBDA_MAX: f64 = 50.0;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone)]
pub struct DispersionResult {
    pub c_star: f64,
    pub lambda_star: f64,
    /// mu(0), the well-posedness certificate (must be negative).
    pub mu0: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct LambdaRoot {
    pub lambda: f64,
    /// True when c equals c* and the root is the degenerate double root.
    pub double_root: bool,
}

fn speed_candidate(problem: &CrossProblem, lambda: f64) -> Result<f64> {
    let mu = problem.principal(lambda)?.value;
    Ok((lambda * lambda - mu) / lambda)
}

/// Minimal speed by unimodal minimization of s(lambda) on (0, lambda_max].
pub fn minimal_speed(problem: &CrossProblem, lambda_max: f64) -> Result<DispersionResult> {
    let mu0 = problem.principal(0.0)?.value;
    if mu0 >= 0.0 {
        return Err(Error::HypothesisViolation(format!(
            "mu(0) = {mu0:.6} >= 0: minimal speed undefined"
        )));
    }
    // Multiplicative scan until s increases; s -> +inf at both ends of
    // its monotone pieces, so the first increase brackets the minimum.
    let mut lo = 1e-3_f64.min(lambda_max / 8.0);
    let mut mid = lo;
    let mut s_mid = speed_candidate(problem, mid)?;
    let mut lambda = mid * 1.5;
    let mut bracket = None;
    let mut prev = (mid, s_mid);
    while lambda <= lambda_max {
        let s = speed_candidate(problem, lambda)?;
        if s > s_mid {
            bracket = Some((lo, mid, lambda));
            break;
        }
        lo = prev.0;
        prev = (lambda, s);
        mid = lambda;
        s_mid = s;
        lambda *= 1.5;
    }
    let (mut a, _, mut b) = bracket.ok_or_else(|| {
        Error::Numerical(format!(
            "no dispersion minimum bracketed in lambda <= {lambda_max}"
        ))
    })?;

    // Golden-section refinement.
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = speed_candidate(problem, x1)?;
    let mut f2 = speed_candidate(problem, x2)?;
    while b - a > 1e-9 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = speed_candidate(problem, x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = speed_candidate(problem, x2)?;
        }
    }
    let lambda_star = 0.5 * (a + b);
    let c_star = speed_candidate(problem, lambda_star)?;
    Ok(DispersionResult { c_star, lambda_star, mu0 })
}

/// Smallest positive root of lambda^2 - c lambda = mu(lambda) for c > c*.
pub fn lambda_root(
    problem: &CrossProblem,
    c: f64,
    dispersion: &DispersionResult,
) -> Result<LambdaRoot> {
    if c < dispersion.c_star - 1e-9 {
        return Err(Error::Numerical(format!(
            "no dispersion root: c = {c} below c* = {}",
            dispersion.c_star
        )));
    }
    if c <= dispersion.c_star + 1e-9 {
        return Ok(LambdaRoot { lambda: dispersion.lambda_star, double_root: true });
    }
    let f = |lambda: f64| -> Result<f64> {
        let mu = problem.principal(lambda)?.value;
        Ok(lambda * lambda - c * lambda - mu)
    };
    let mut lo = 1e-9;
    let mut hi = dispersion.lambda_star;
    // f(0+) = -mu(0) > 0; f(lambda*) = (c* - c) lambda* < 0.
    if f(lo)? <= 0.0 {
        return Err(Error::Internal("dispersion function not positive near 0".into()));
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(LambdaRoot { lambda: 0.5 * (lo + hi), double_root: false })
}

/// Margin c - a'(lambda(c)) with a(lambda) = lambda^2 - mu(lambda); the
/// derivative uses the analytic eigencurve slope. Positive for c > c*.
pub fn slope_margin(
    problem: &CrossProblem,
    c: f64,
    dispersion: &DispersionResult,
) -> Result<f64> {
    let root = lambda_root(problem, c, dispersion)?;
    let pair = problem.principal(root.lambda)?;
    let mu_slope = eigen::curve_slope(&pair, problem.flow(), problem.grid())?;
    let margin = c - (2.0 * root.lambda - mu_slope);
    if margin <= 0.0 && c > dispersion.c_star + 1e-6 {
        return Err(Error::Internal(format!(
            "nonpositive slope margin {margin:.3e} at c = {c} > c*"
        )));
    }
    Ok(margin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{BoundaryCondition, CrossProblem};
    use crate::grid::CrossSectionGrid;
    use crate::models::FlowProfile;

    fn constant_problem(v0: f64) -> CrossProblem {
        let grid = CrossSectionGrid::build(1.0, 64).unwrap();
        let flow = FlowProfile::zero(&grid);
        CrossProblem::new(
            grid.clone(),
            flow,
            vec![v0; grid.num_nodes()],
            BoundaryCondition::Neumann,
        )
        .unwrap()
    }

    #[test]
    fn classical_kpp_speed() {
        let problem = constant_problem(-1.0);
        let d = minimal_speed(&problem, DEFAULT_LAMBDA_MAX).unwrap();
        assert!((d.c_star - 2.0).abs() < 1e-7, "c* = {}", d.c_star);
        assert!((d.lambda_star - 1.0).abs() < 1e-6);
    }

    #[test]
    fn quadratic_root_for_constant_curve() {
        let problem = constant_problem(-1.0);
        let d = minimal_speed(&problem, DEFAULT_LAMBDA_MAX).unwrap();
        let root = lambda_root(&problem, 2.5, &d).unwrap();
        assert!(!root.double_root);
        assert!((root.lambda - 0.5).abs() < 1e-9, "root = {}", root.lambda);
        let margin = slope_margin(&problem, 2.5, &d).unwrap();
        assert!((margin - 1.5).abs() < 1e-7);
    }

    #[test]
    fn ill_posed_rejected() {
        let problem = constant_problem(0.5);
        match minimal_speed(&problem, DEFAULT_LAMBDA_MAX) {
            Err(crate::error::Error::HypothesisViolation(_)) => {}
            other => panic!("expected hypothesis violation, got {other:?}"),
        }
    }
}
