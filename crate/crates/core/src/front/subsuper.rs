//! Sub/super-solution construction with k-uniform constants.
//!
//! Super-solution: Tbar_k = phi_{lambda_k}(y) e^{-lambda_k x}.
//! Sub-solutions: Yunder = max(0, 1 - gamma chi(y) e^{-beta x}) and
//! Tunder_k = max(0, phi_{lambda_k}(y) e^{-lambda_k x}
//!                  - delta phi_{lambda_k+eta}(y) e^{-(lambda_k+eta) x}).
//!
//! The root offset eta is a single k-uniform value subject to
//! eta < min(beta, lambda_inf, alpha inf_k lambda_k) together with the
//! positivity of every eps_k = c(lambda_k+eta) - a_k(lambda_k+eta).
//! (Using one offset for the whole list keeps the differential
//! inequality valid at every finite k; an offset tied to lambda_inf
//! alone would exceed beta for the smallest members and break their
//! certificates.) The envelope constants are
//! Lambda1 = lambda_inf - eta/2, Lambda2 = lambda_inf + eta,
//! C1 = K2, C2 = K1, C3 = delta K4.

use crate::dispersion;
use crate::eigen::CrossProblem;
use crate::error::{Error, Result};
use crate::front::solver::{t_residual_fields, y_residual_fields, FrontProblem};
use crate::models::ReactionModel;

/// Y-decay machinery: beta and the auxiliary eigenfunction chi.
#[derive(Debug, Clone)]
pub struct AuxiliaryRates {
    pub beta: f64,
    /// chi_{beta Le}, sup-normalized, on the grid of the plain problem.
    pub chi: Vec<f64>,
    pub chi_min: f64,
    /// rho(beta Le) - beta^2 + c beta Le > 0.
    pub margin: f64,
}

/// Choose beta by halving from beta0 = min(1, inf_lambda / 2) until
/// rho(beta Le) - beta^2 + c beta Le > 0.
pub fn build_auxiliary_rates(
    c: f64,
    le: f64,
    plain: &CrossProblem,
    inf_lambda: f64,
) -> Result<AuxiliaryRates> {
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "traveling fronts require positive speed, got c = {c}"
        )));
    }
    let mut beta = (1.0_f64).min(inf_lambda / 2.0);
    for _ in 0..60 {
        let rho = plain.principal(beta * le)?.value;
        let margin = rho - beta * beta + c * beta * le;
        if margin > 0.0 {
            let pair = plain.principal(beta * le)?;
            let sup = pair
                .eigenfunction
                .iter()
                .cloned()
                .fold(f64::MIN, f64::max);
            let chi: Vec<f64> = pair.eigenfunction.iter().map(|v| v / sup).collect();
            let chi_min = chi.iter().cloned().fold(f64::INFINITY, f64::min);
            return Ok(AuxiliaryRates { beta, chi, chi_min, margin });
        }
        beta *= 0.5;
    }
    Err(Error::Numerical(
        "no admissible Y-decay rate beta after 60 halvings".into(),
    ))
}

/// Per-member spectral data used by the barrier closures.
#[derive(Debug, Clone)]
pub struct MemberFrontData {
    /// Family index; None for the Robin limit member.
    pub k: Option<u32>,
    pub lambda: f64,
    pub c_star: f64,
    /// eps_k = c (lambda_k + eta) - a_k(lambda_k + eta).
    pub eps_k: f64,
    /// Principal eigenfunction at lambda_k (L2-normalized).
    pub phi: Vec<f64>,
    /// Principal eigenfunction at lambda_k + eta.
    pub phi_eta: Vec<f64>,
    /// chi_{beta Le} on the same grid, sup-normalized.
    pub chi: Vec<f64>,
}

/// The k-uniform parameter set of the construction.
#[derive(Debug, Clone)]
pub struct UniformConstants {
    pub c: f64,
    pub le: f64,
    pub lambda_inf: f64,
    pub inf_lambda: f64,
    pub beta: f64,
    pub rho_margin: f64,
    pub chi_min: f64,
    pub eta: f64,
    /// eps = c(lambda_inf + eta) - a(lambda_inf + eta) for the Robin curve.
    pub eps_margin: f64,
    pub gamma: f64,
    pub delta: f64,
    /// Activation abscissa: Yunder follows its smooth branch for x >= x0.
    pub x0: f64,
    /// Abscissa beyond which every Tunder_k is positive.
    pub x_pos: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub s0: f64,
    pub alpha: f64,
    pub defect_m: f64,
    pub max_fprime0: f64,
}

impl UniformConstants {
    /// Minimal admissible cylinder half-length.
    pub fn min_half_length(&self) -> f64 {
        (self.x0 + 5.0 / self.beta).max(5.0 / self.inf_lambda)
    }

    /// Half-length that also leaves a usable positive right tail for the
    /// T sub-solution (the Dirichlet anchor at x = +a).
    pub fn suggested_half_length(&self) -> f64 {
        self.min_half_length().max(self.x_pos + 10.0)
    }

    /// Half-length for clean tail-decay measurements: the last quarter
    /// of the domain must lie beyond the sub-solution's transition zone
    /// (four e-foldings of the offset past x_pos), where the corridor
    /// floor is a pure exponential again.
    pub fn tail_resolved_half_length(&self) -> f64 {
        self.suggested_half_length()
            .max(2.0 * (self.x_pos + 4.0 / self.eta))
    }
}

#[derive(Debug, Clone)]
pub struct FrontContext {
    pub constants: UniformConstants,
    /// Interior-loss members in the order supplied.
    pub members: Vec<MemberFrontData>,
    /// The Robin limit member (lambda_inf data).
    pub robin: MemberFrontData,
}

fn a_of(problem: &CrossProblem, lambda: f64) -> Result<f64> {
    Ok(lambda * lambda - problem.principal(lambda)?.value)
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::MIN), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    })
}

/// Build the k-uniform constants and per-member spectral data for a
/// family of interior-loss problems plus their Robin limit.
pub fn build_front_context(
    c: f64,
    le: f64,
    reaction: &ReactionModel,
    robin_problem: &CrossProblem,
    member_problems: &[(u32, CrossProblem)],
    lambda_max: f64,
) -> Result<FrontContext> {
    if !(le > 0.0) {
        return Err(Error::InvalidArgument(format!("Lewis number must be positive, got {le}")));
    }
    // Dispersion data: the Robin limit and every member. Strict
    // supercriticality is required throughout (double roots rejected).
    let robin_disp = dispersion::minimal_speed(robin_problem, lambda_max)?;
    if c <= robin_disp.c_star + 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "front speed c = {c} must exceed the Robin minimal speed {}",
            robin_disp.c_star
        )));
    }
    let lambda_inf = dispersion::lambda_root(robin_problem, c, &robin_disp)?.lambda;
    dispersion::slope_margin(robin_problem, c, &robin_disp)?;

    struct Raw<'a> {
        k: Option<u32>,
        lambda: f64,
        c_star: f64,
        problem: &'a CrossProblem,
    }
    let mut raws = Vec::new();
    for (k, problem) in member_problems {
        let disp = dispersion::minimal_speed(problem, lambda_max)?;
        if c <= disp.c_star + 1e-9 {
            return Err(Error::HypothesisViolation(format!(
                "c = {c} does not exceed c*_k = {} at k = {k}",
                disp.c_star
            )));
        }
        let lambda = dispersion::lambda_root(problem, c, &disp)?.lambda;
        dispersion::slope_margin(problem, c, &disp)?;
        raws.push(Raw { k: Some(*k), lambda, c_star: disp.c_star, problem });
    }
    raws.push(Raw {
        k: None,
        lambda: lambda_inf,
        c_star: robin_disp.c_star,
        problem: robin_problem,
    });

    let inf_lambda = raws.iter().map(|r| r.lambda).fold(f64::INFINITY, f64::min);

    // beta and chi on the Robin grid.
    let plain = CrossProblem::plain(robin_problem.grid().clone(), robin_problem.flow().clone())?;
    let aux = build_auxiliary_rates(c, le, &plain, inf_lambda)?;

    // Root offset eta: start just below the admissible bound, halve
    // until every eps margin is positive.
    let alpha = reaction.alpha();
    let mut eta = 0.95 * aux.beta.min(lambda_inf).min(alpha * inf_lambda);
    let mut eps_margin = 0.0;
    let mut admissible = false;
    'etasearch: for _ in 0..60 {
        eps_margin = c * (lambda_inf + eta) - a_of(robin_problem, lambda_inf + eta)?;
        if eps_margin > 0.0 {
            let mut ok = true;
            for raw in &raws {
                let eps = c * (raw.lambda + eta) - a_of(raw.problem, raw.lambda + eta)?;
                if eps <= 0.0 {
                    ok = false;
                    break;
                }
            }
            if ok {
                admissible = true;
                break 'etasearch;
            }
        }
        eta *= 0.5;
    }
    if !admissible {
        return Err(Error::Numerical(
            "no admissible root offset eta: dispersion margin never positive".into(),
        ));
    }

    // Member eigenfunctions at lambda_k and lambda_k + eta, plus chi on
    // each member grid.
    let mut members = Vec::new();
    let mut robin_member = None;
    let (mut k1, mut k2) = (f64::INFINITY, f64::MIN);
    let (mut k3, mut k4) = (f64::INFINITY, f64::MIN);
    let mut eps_min = f64::INFINITY;
    for raw in &raws {
        let phi = raw.problem.principal(raw.lambda)?.eigenfunction;
        let phi_eta = raw.problem.principal(raw.lambda + eta)?.eigenfunction;
        let eps_k = c * (raw.lambda + eta) - a_of(raw.problem, raw.lambda + eta)?;
        eps_min = eps_min.min(eps_k);
        let chi = if raw.problem.grid().num_nodes() == aux.chi.len() {
            aux.chi.clone()
        } else {
            let p = CrossProblem::plain(raw.problem.grid().clone(), raw.problem.flow().clone())?;
            let pair = p.principal(aux.beta * le)?;
            let sup = pair.eigenfunction.iter().cloned().fold(f64::MIN, f64::max);
            pair.eigenfunction.iter().map(|v| v / sup).collect()
        };
        let (lo, hi) = min_max(&phi);
        k1 = k1.min(lo);
        k2 = k2.max(hi);
        let (lo, hi) = min_max(&phi_eta);
        k3 = k3.min(lo);
        k4 = k4.max(hi);
        let data = MemberFrontData {
            k: raw.k,
            lambda: raw.lambda,
            c_star: raw.c_star,
            eps_k,
            phi,
            phi_eta,
            chi,
        };
        match raw.k {
            Some(_) => members.push(data),
            None => robin_member = Some(data),
        }
    }
    if !(k1 > 0.0) || !(k3 > 0.0) {
        return Err(Error::Internal(
            "eigenfunction bounds K1/K3 not positive".into(),
        ));
    }

    // gamma: both conditions, with a 1% safety factor on the strict one.
    let max_fp = reaction.max_fprime0();
    let gamma1 = 1.0 / aux.chi_min;
    let gamma2 = k2 * max_fp * le / (aux.margin * aux.chi_min);
    let gamma = gamma1.max(1.01 * gamma2);
    // Yunder >= 0 needs gamma * max(chi) e^{-beta x} <= 1; max(chi) = 1.
    let x0 = (gamma.ln() / aux.beta).max(0.0);

    // delta: nonpositivity on (-inf, x0], the s0 caps, and the
    // eps-competition inequality, all with the k-uniform bounds.
    let mut delta = 0.0_f64;
    for raw_idx in 0..raws.len() {
        let (phi, phi_eta) = if raw_idx < members.len() {
            (&members[raw_idx].phi, &members[raw_idx].phi_eta)
        } else {
            let r = robin_member.as_ref().unwrap();
            (&r.phi, &r.phi_eta)
        };
        let ratio = phi
            .iter()
            .zip(phi_eta.iter())
            .map(|(a, b)| a / b)
            .fold(0.0_f64, f64::max);
        delta = delta.max(ratio * (eta * x0).exp());
    }
    let s0 = reaction.s0();
    let m_defect = reaction.defect_m();
    let delta_e =
        1.05 * (gamma * max_fp * k2 + m_defect * k2.powf(1.0 + alpha)) / (eps_min * k3);
    delta = delta.max(delta_e);
    // The s0 cap: Tunder <= K2 e^{-lambda x0} on its positive set; grow
    // delta only in the unusual case that this cap binds.
    for _ in 0..200 {
        let peak = (0..=400)
            .map(|i| {
                let x = x0 + i as f64 * 0.05 / inf_lambda;
                k2 * (-inf_lambda * x).exp() - delta * k3 * (-(inf_lambda + eta) * x).exp()
            })
            .fold(f64::MIN, f64::max);
        if peak <= s0 {
            break;
        }
        delta *= 2.0;
    }

    let x_pos = ((delta * k4 / k1).ln() / eta).max(x0);

    let constants = UniformConstants {
        c,
        le,
        lambda_inf,
        inf_lambda,
        beta: aux.beta,
        rho_margin: aux.margin,
        chi_min: aux.chi_min,
        eta,
        eps_margin,
        gamma,
        delta,
        x0,
        x_pos,
        k1,
        k2,
        k3,
        k4,
        lambda1: lambda_inf - eta / 2.0,
        lambda2: lambda_inf + eta,
        c1: k2,
        c2: k1,
        c3: delta * k4,
        s0,
        alpha,
        defect_m: m_defect,
        max_fprime0: max_fp,
    };
    Ok(FrontContext {
        constants,
        members,
        robin: robin_member.unwrap(),
    })
}

/// Barrier closures for one member, borrowing the shared constants.
#[derive(Debug, Clone, Copy)]
pub struct SubSuperSolutions<'a> {
    pub constants: &'a UniformConstants,
    pub member: &'a MemberFrontData,
}

impl<'a> SubSuperSolutions<'a> {
    pub fn t_bar(&self, x: f64, j: usize) -> f64 {
        self.member.phi[j] * (-self.member.lambda * x).exp()
    }

    /// The inner (unclipped) expression of the T sub-solution.
    pub fn t_under_inner(&self, x: f64, j: usize) -> f64 {
        let l = self.member.lambda;
        let eta = self.constants.eta;
        self.member.phi[j] * (-l * x).exp()
            - self.constants.delta * self.member.phi_eta[j] * (-(l + eta) * x).exp()
    }

    pub fn t_under(&self, x: f64, j: usize) -> f64 {
        self.t_under_inner(x, j).max(0.0)
    }

    pub fn y_under_inner(&self, x: f64, j: usize) -> f64 {
        1.0 - self.constants.gamma * self.member.chi[j] * (-self.constants.beta * x).exp()
    }

    pub fn y_under(&self, x: f64, j: usize) -> f64 {
        self.y_under_inner(x, j).max(0.0)
    }
}

/// Discrete certificate that (Tbar, 1) and (Tunder, Yunder) form an
/// ordered super/sub-solution pair for the scheme's stencils.
#[derive(Debug, Clone)]
pub struct CertificateReport {
    /// Worst excess of the super-solution residual over its tolerance
    /// (negative margins mean pass).
    pub super_margin: f64,
    /// Worst deficit of the T sub-solution residual below -tolerance.
    pub sub_t_margin: f64,
    /// Worst deficit of the Y sub-solution residual below -tolerance.
    pub sub_y_margin: f64,
    /// Worst violation of the nodewise ordering Tunder <= Tbar.
    pub ordering_margin: f64,
    pub checked_sub_t: usize,
    pub checked_sub_y: usize,
    /// Branch-kink nodes excluded from the sub-solution checks.
    pub excluded_kinks: usize,
    pub pass: bool,
}

/// Evaluate the discrete differential inequalities for the barrier pair
/// on the problem's grid. The second-order discretization error of the
/// exponential profiles is granted as an explicit per-node allowance
/// 2 dx^2 A(y) e^{-r x} (r^4/12 + (c + max|u|) r^3/6) per profile piece;
/// nodes adjacent to a max(0, .) branch switch are excluded.
pub fn verify_ordered_pair(
    problem: &FrontProblem,
    barriers: &SubSuperSolutions,
) -> Result<CertificateReport> {
    let grid = &problem.grid;
    let ny = grid.cross().num_nodes();
    let nx = grid.m() + 1;
    let xs = grid.xs();
    let dx2 = grid.dx() * grid.dx();
    let cons = barriers.constants;
    let member = barriers.member;
    if member.phi.len() != ny {
        return Err(Error::InvalidArgument(
            "barrier eigenfunctions sampled on a different cross-section grid".into(),
        ));
    }
    let cm = problem.c + problem.flow.max_abs();
    let disc = |r: f64| r.powi(4) / 12.0 + cm * r.powi(3) / 6.0;
    let lam = member.lambda;
    let lam2 = lam + cons.eta;

    let mut tbar = vec![0.0; nx * ny];
    let mut tunder = vec![0.0; nx * ny];
    let mut yunder = vec![0.0; nx * ny];
    let mut t_inner = vec![0.0; nx * ny];
    let mut y_inner = vec![0.0; nx * ny];
    let ones = vec![1.0; nx * ny];
    let mut ordering = f64::MIN;
    for i in 0..nx {
        for j in 0..ny {
            let k = i * ny + j;
            tbar[k] = barriers.t_bar(xs[i], j);
            t_inner[k] = barriers.t_under_inner(xs[i], j);
            tunder[k] = t_inner[k].max(0.0);
            y_inner[k] = barriers.y_under_inner(xs[i], j);
            yunder[k] = y_inner[k].max(0.0);
            ordering = ordering.max(tunder[k] - tbar[k]);
        }
    }

    let advection = problem.advection_scheme();
    // Super-solution: residual of (Tbar, Y = 1) must be <= tolerance.
    let (res_sup, sc_sup) = t_residual_fields(problem, &tbar, &ones, advection);
    // T sub-solution against the companion Yunder.
    let (res_sub_t, sc_sub_t) = t_residual_fields(problem, &tunder, &yunder, advection);
    // Y sub-solution against the companion Tbar.
    let (res_sub_y, sc_sub_y) = y_residual_fields(problem, &yunder, &tbar, advection);

    let positive = |v: &[f64], i: usize, j: usize| v[i * ny + j] > 0.0;
    let interior_branch = |v: &[f64], i: usize, j: usize| -> bool {
        if !positive(v, i, j) || i == 0 || i >= nx - 1 {
            return false;
        }
        if !positive(v, i - 1, j) || !positive(v, i + 1, j) {
            return false;
        }
        (j == 0 || positive(v, i, j - 1)) && (j == ny - 1 || positive(v, i, j + 1))
    };

    let mut super_margin = f64::MIN;
    let mut sub_t_margin = f64::MIN;
    let mut sub_y_margin = f64::MIN;
    let mut checked_sub_t = 0;
    let mut checked_sub_y = 0;
    let mut excluded = 0;
    for i in 0..nx - 1 {
        for j in 0..ny {
            let k = i * ny + j;
            let x = xs[i];
            let tol_sup = 2.0 * dx2 * tbar[k] * disc(lam) + 1e-9 * (1.0 + sc_sup[k]);
            super_margin = super_margin.max(res_sup[k] - tol_sup);

            if positive(&t_inner, i, j) {
                if interior_branch(&t_inner, i, j) {
                    checked_sub_t += 1;
                    let amp1 = member.phi[j] * (-lam * x).exp();
                    let amp2 = cons.delta * member.phi_eta[j] * (-lam2 * x).exp();
                    let tol = 2.0 * dx2 * (amp1 * disc(lam) + amp2 * disc(lam2))
                        + 1e-9 * (1.0 + sc_sub_t[k]);
                    sub_t_margin = sub_t_margin.max(-res_sub_t[k] - tol);
                } else {
                    excluded += 1;
                }
            }
            if positive(&y_inner, i, j) {
                if interior_branch(&y_inner, i, j) {
                    checked_sub_y += 1;
                    let amp = cons.gamma * member.chi[j] * (-cons.beta * x).exp();
                    let tol = 2.0
                        * dx2
                        * amp
                        * (cons.beta.powi(4) / (12.0 * problem.le)
                            + cm * cons.beta.powi(3) / 6.0)
                        + 1e-9 * (1.0 + sc_sub_y[k]);
                    sub_y_margin = sub_y_margin.max(-res_sub_y[k] - tol);
                } else {
                    excluded += 1;
                }
            }
        }
    }
    let pass = super_margin <= 0.0
        && sub_t_margin <= 0.0
        && sub_y_margin <= 0.0
        && ordering <= 1e-12
        && checked_sub_t > 0
        && checked_sub_y > 0;
    Ok(CertificateReport {
        super_margin,
        sub_t_margin,
        sub_y_margin,
        ordering_margin: ordering,
        checked_sub_t,
        checked_sub_y,
        excluded_kinks: excluded,
        pass,
    })
}

/// Build the barrier view for one member of a context (index into
/// `members`, or the Robin member when `member_k` is None).
pub fn build_subsupersolutions<'a>(
    ctx: &'a FrontContext,
    member_k: Option<u32>,
) -> Result<SubSuperSolutions<'a>> {
    let member = match member_k {
        None => &ctx.robin,
        Some(k) => ctx
            .members
            .iter()
            .find(|m| m.k == Some(k))
            .ok_or_else(|| Error::InvalidArgument(format!("no member with k = {k}")))?,
    };
    Ok(SubSuperSolutions { constants: &ctx.constants, member })
}
