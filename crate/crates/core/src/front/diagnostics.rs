//! Post-hoc checks on a converged front: the integral energy identity
//! (with truncation flux corrections), the Y gradient-energy bound, the
//! corridor envelopes, the exponential tail decay, and the limit value
//! of Y at the burnt end.

use crate::error::{Error, Result};
use crate::front::solver::{FrontProblem, FrontProfile, FrontVariant};
use crate::front::subsuper::SubSuperSolutions;

#[derive(Debug, Clone)]
pub struct FrontDiagnostics {
    /// Relative defect of the heat balance: the interior loss integral
    /// (or Robin boundary integral) against the reaction integral, with
    /// the end-flux corrections of the truncated cylinder.
    pub energy_defect: f64,
    pub reaction_integral: f64,
    pub loss_integral: f64,
    pub end_flux: f64,
    /// Dirichlet energy of Y and its theoretical bound (Le/2) int |c-u|.
    pub grad_y_energy: f64,
    pub grad_y_bound: f64,
    /// min(Y - Yunder) and min(1 - Y) over the grid.
    pub y_lower_slack: f64,
    pub y_upper_slack: f64,
    /// min over nodes of T - max(0, C2 e^{-Lambda1 x} - C3 e^{-Lambda2 x}).
    pub sandwich_lower_slack: f64,
    /// min over nodes of C1 e^{-lambda_k x} - T.
    pub sandwich_upper_slack: f64,
    /// Fitted log-slope of max_y T over the right tail, and its target
    /// -lambda(c).
    pub tail_slope: f64,
    pub tail_slope_target: f64,
    /// Cross-section average of Y at x = -a (the burnt limit Y_inf).
    pub y_inf: f64,
    pub t_max: f64,
}

/// Compute the diagnostics for a converged profile inside its barrier
/// corridor.
pub fn front_diagnostics(
    problem: &FrontProblem,
    profile: &FrontProfile,
    barriers: &SubSuperSolutions,
) -> Result<FrontDiagnostics> {
    let grid = &problem.grid;
    let cross = grid.cross();
    let ny = cross.num_nodes();
    let nx = grid.m() + 1;
    let xs = grid.xs();
    let dx = grid.dx();
    let (t, y) = (&profile.t, &profile.y);

    // Reaction and loss integrals over the truncated cylinder.
    let mut f_field = vec![0.0; nx * ny];
    for i in 0..nx {
        for j in 0..ny {
            f_field[i * ny + j] = problem.reaction.eval(j, t[i * ny + j]) * y[i * ny + j];
        }
    }
    let reaction_integral = grid.integrate(&f_field)?;
    let loss_integral = match &problem.variant {
        FrontVariant::InteriorLoss(member) => {
            let g = member.loss.g();
            let gt: Vec<f64> = (0..nx * ny).map(|k| g[k % ny] * t[k]).collect();
            grid.integrate(&gt)?
        }
        FrontVariant::RobinLimit => {
            // q times the x-integral of T over both boundary lines.
            let mut total = 0.0;
            for i in 0..nx {
                let wx = if i == 0 || i == nx - 1 { dx * 0.5 } else { dx };
                total += wx * (t[i * ny] + t[i * ny + ny - 1]);
            }
            problem.q * total
        }
    };

    // End fluxes: int_omega [T_x + (c - u) T] dy at x = +a minus x = -a,
    // with one-sided differences for T_x.
    let u = problem.flow.samples();
    let mut right = vec![0.0; ny];
    let mut left = vec![0.0; ny];
    for j in 0..ny {
        let t_a = t[(nx - 1) * ny + j];
        let t_am = t[(nx - 2) * ny + j];
        right[j] = (t_a - t_am) / dx + (problem.c - u[j]) * t_a;
        let t_b = t[j];
        let t_bp = t[ny + j];
        left[j] = (t_bp - t_b) / dx + (problem.c - u[j]) * t_b;
    }
    let end_flux = cross.integrate(&right)? - cross.integrate(&left)?;
    let energy_defect =
        (reaction_integral - loss_integral + end_flux).abs() / reaction_integral.abs().max(1e-300);

    // Dirichlet energy of Y by cell-based differences.
    let dy = cross.dy();
    let mut grad_y_energy = 0.0;
    for i in 0..nx {
        let wx = if i == 0 || i == nx - 1 { dx * 0.5 } else { dx };
        for j in 0..ny - 1 {
            let d = (y[i * ny + j + 1] - y[i * ny + j]) / dy;
            grad_y_energy += wx * dy * d * d;
        }
    }
    for i in 0..nx - 1 {
        for j in 0..ny {
            let wy = cross.weight(j);
            let d = (y[(i + 1) * ny + j] - y[i * ny + j]) / dx;
            grad_y_energy += dx * wy * d * d;
        }
    }
    let abs_cu: Vec<f64> = u.iter().map(|ui| (problem.c - ui).abs()).collect();
    let grad_y_bound = problem.le / 2.0 * cross.integrate(&abs_cu)?;

    // Corridor and sandwich slacks.
    let cons = barriers.constants;
    let lam = barriers.member.lambda;
    let mut y_lower_slack = f64::INFINITY;
    let mut y_upper_slack = f64::INFINITY;
    let mut sandwich_lower_slack = f64::INFINITY;
    let mut sandwich_upper_slack = f64::INFINITY;
    let mut t_max = 0.0_f64;
    for i in 0..nx {
        let x = xs[i];
        let lower_env =
            (cons.c2 * (-cons.lambda1 * x).exp() - cons.c3 * (-cons.lambda2 * x).exp()).max(0.0);
        let upper_env = cons.c1 * (-lam * x).exp();
        for j in 0..ny {
            let k = i * ny + j;
            y_lower_slack = y_lower_slack.min(y[k] - barriers.y_under(x, j));
            y_upper_slack = y_upper_slack.min(1.0 - y[k]);
            sandwich_lower_slack = sandwich_lower_slack.min(t[k] - lower_env);
            sandwich_upper_slack = sandwich_upper_slack.min(upper_env - t[k]);
            t_max = t_max.max(t[k]);
        }
    }

    // Tail decay: least-squares slope of ln(max_y T) over the last
    // quarter of the domain minus five cells.
    let i0 = 3 * (nx - 1) / 4;
    let i1 = nx.saturating_sub(6);
    if i1 <= i0 + 2 {
        return Err(Error::InvalidArgument(
            "domain too short for the tail-decay fit".into(),
        ));
    }
    let mut pts = Vec::new();
    for i in i0..=i1 {
        let m = (0..ny).map(|j| t[i * ny + j]).fold(f64::MIN, f64::max);
        if m > 0.0 {
            pts.push((xs[i], m.ln()));
        }
    }
    if pts.len() < 3 {
        return Err(Error::Numerical(
            "tail-decay fit: profile vanishes over the fit window".into(),
        ));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let sy: f64 = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - sx) * (p.0 - sx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - sx) * (p.1 - sy)).sum();
    let tail_slope = sxy / sxx;

    // Burnt-side limit of Y: cross-section average at x = -a.
    let y_inf = cross.integrate(&y[0..ny])? / cross.length();

    Ok(FrontDiagnostics {
        energy_defect,
        reaction_integral,
        loss_integral,
        end_flux,
        grad_y_energy,
        grad_y_bound,
        y_lower_slack,
        y_upper_slack,
        sandwich_lower_slack,
        sandwich_upper_slack,
        tail_slope,
        tail_slope_target: -lam,
        y_inf,
        t_max,
    })
}
