//! Alternating elliptic solver for the truncated traveling-front system
//!
//!   Delta T + (c - u(y)) T_x + f(y, T) Y - g(y) T = 0,
//!   Le^-1 Delta Y + (c - u(y)) Y_x - f(y, T) Y = 0,
//!
//! with the interior heat loss g replaced by a Robin condition in the
//! limit variant. Each sweep solves the T equation with the reaction
//! source lagged, then the Y equation with its x-averaged absorption
//! treated implicitly, and projects both fields onto the barrier
//! corridor [Tunder, Tbar] x [Yunder, 1]. With zero shear each linear
//! solve is exact (separable); with shear the separable solver
//! preconditions BiCGStab.

use crate::eigen::{assemble_cross_operator, BoundaryCondition, DiscreteOperator};
use crate::error::{Error, Result};
use crate::front::separable::{bicgstab, Advection, SeparableSolver};
use crate::front::subsuper::SubSuperSolutions;
use crate::grid::CylinderGrid;
use crate::models::{DiracFamilyMember, FlowProfile, ReactionModel};

/// Sup-norm stagnation tolerance between sweeps.
pub const SUP_CHANGE_TOL: f64 = 1e-10;
/// Relative residual gate on the converged pair.
pub const RESIDUAL_TOL: f64 = 1e-6;
/// Hard cap on alternating sweeps.
pub const MAX_SWEEPS: usize = 10_000;
/// Warn when the projection clips more than this fraction of nodes.
pub const ACTIVE_FRACTION_WARN: f64 = 0.20;

#[derive(Debug, Clone)]
pub enum FrontVariant {
    /// Interior heat loss g_k from a Dirac-family member.
    InteriorLoss(DiracFamilyMember),
    /// Robin boundary loss with coefficient q.
    RobinLimit,
}

#[derive(Debug, Clone)]
pub struct FrontProblem {
    pub grid: CylinderGrid,
    pub flow: FlowProfile,
    pub reaction: ReactionModel,
    pub c: f64,
    pub le: f64,
    pub q: f64,
    pub variant: FrontVariant,
}

impl FrontProblem {
    pub fn new(
        grid: CylinderGrid,
        flow: FlowProfile,
        reaction: ReactionModel,
        c: f64,
        le: f64,
        q: f64,
        variant: FrontVariant,
    ) -> Result<Self> {
        let ny = grid.cross().num_nodes();
        if flow.samples().len() != ny || reaction.fprime0_samples().len() != ny {
            return Err(Error::InvalidArgument(
                "flow/reaction sampled on a different cross-section grid".into(),
            ));
        }
        if let FrontVariant::InteriorLoss(member) = &variant {
            if member.loss.g().len() != ny {
                return Err(Error::InvalidArgument(
                    "heat-loss member sampled on a different cross-section grid".into(),
                ));
            }
        }
        if !(c > 0.0) || !(le > 0.0) || !(q > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "c, Le, q must be positive (got c={c}, Le={le}, q={q})"
            )));
        }
        Ok(Self { grid, flow, reaction, c, le, q, variant })
    }

    /// Boundary condition of the T equation in y.
    pub fn t_bc(&self) -> BoundaryCondition {
        match self.variant {
            FrontVariant::InteriorLoss(_) => BoundaryCondition::Neumann,
            FrontVariant::RobinLimit => BoundaryCondition::Robin(self.q),
        }
    }

    /// Interior loss g(y), identically zero in the Robin variant.
    pub fn loss_samples(&self) -> Vec<f64> {
        match &self.variant {
            FrontVariant::InteriorLoss(member) => member.loss.g().to_vec(),
            FrontVariant::RobinLimit => vec![0.0; self.grid.cross().num_nodes()],
        }
    }

    /// y-part of the T operator: -d^2/dy^2 + g(y), with the variant's BC.
    pub fn t_yop(&self) -> DiscreteOperator {
        let cross = self.grid.cross();
        let zeros = vec![0.0; cross.num_nodes()];
        assemble_cross_operator(cross, &self.loss_samples(), &zeros, 0.0, self.t_bc())
    }

    /// y-part of the Y operator: -Le^-1 d^2/dy^2, Neumann.
    pub fn y_yop(&self) -> DiscreteOperator {
        let cross = self.grid.cross();
        let zeros = vec![0.0; cross.num_nodes()];
        let mut op =
            assemble_cross_operator(cross, &zeros, &zeros, 0.0, BoundaryCondition::Neumann);
        for d in op.diag.iter_mut() {
            *d /= self.le;
        }
        for o in op.off.iter_mut() {
            *o /= self.le;
        }
        op
    }

    /// Advection scheme by the cell Peclet number of the x-stencil.
    pub fn advection_scheme(&self) -> Advection {
        let pe = (self.c + self.flow.max_abs()) * self.grid.dx() / 2.0;
        if pe > 1.0 { Advection::Upwind } else { Advection::Centered }
    }
}

/// Signed residual of the T equation, res = Delta T + (c-u) T_x + f(T) Y - g T,
/// evaluated with the scheme's stencils (mirror ghost at x = -a). The
/// Dirichlet row i = M is reported as zero. Returns (residuals, scales)
/// where the scale at a node is the sum of term magnitudes.
pub fn t_residual_fields(
    problem: &FrontProblem,
    t: &[f64],
    y: &[f64],
    advection: Advection,
) -> (Vec<f64>, Vec<f64>) {
    let yop = problem.t_yop();
    residual_fields(problem, t, advection, 1.0, &yop, &mut |i: usize, j: usize| {
        problem.reaction.eval(j, t[problem.grid.idx(i, j)]) * y[problem.grid.idx(i, j)]
    })
}

/// Signed residual of the Y equation,
/// res = Le^-1 Delta Y + (c-u) Y_x - f(y, T) Y.
pub fn y_residual_fields(
    problem: &FrontProblem,
    y: &[f64],
    t: &[f64],
    advection: Advection,
) -> (Vec<f64>, Vec<f64>) {
    let yop = problem.y_yop();
    residual_fields(problem, y, advection, 1.0 / problem.le, &yop, &mut |i, j| {
        -problem.reaction.eval(j, t[problem.grid.idx(i, j)]) * y[problem.grid.idx(i, j)]
    })
}

/// Common residual core: res = -kx (-field_xx) + (c-u) field_x - yop(field)
/// + source(i, j), with mirror-ghost row at i = 0.
fn residual_fields(
    problem: &FrontProblem,
    field: &[f64],
    advection: Advection,
    kx: f64,
    yop: &DiscreteOperator,
    source: &mut dyn FnMut(usize, usize) -> f64,
) -> (Vec<f64>, Vec<f64>) {
    let grid = &problem.grid;
    let ny = grid.cross().num_nodes();
    let nx = grid.m() + 1;
    let dx = grid.dx();
    let inv2 = kx / (dx * dx);
    let u = problem.flow.samples();
    let mut res = vec![0.0; nx * ny];
    let mut scale = vec![1.0; nx * ny];
    for i in 0..nx - 1 {
        let row = &field[i * ny..(i + 1) * ny];
        let yapp = yop.apply_physical(row);
        for j in 0..ny {
            let here = field[i * ny + j];
            let up = field[(i + 1) * ny + j];
            let um = if i == 0 { up } else { field[(i - 1) * ny + j] };
            let xdiff = (up - 2.0 * here + um) * inv2;
            let w = problem.c - u[j];
            let adv = match advection {
                Advection::Centered => w * (up - um) / (2.0 * dx),
                Advection::Upwind => {
                    if w >= 0.0 {
                        w * (up - here) / dx
                    } else {
                        w * (here - um) / dx
                    }
                }
            };
            let src = source(i, j);
            res[i * ny + j] = xdiff + adv - yapp[j] + src;
            scale[i * ny + j] = xdiff.abs() + adv.abs() + yapp[j].abs() + src.abs();
        }
    }
    (res, scale)
}

/// Converged front pair with its convergence record.
#[derive(Debug, Clone)]
pub struct FrontProfile {
    pub t: Vec<f64>,
    pub y: Vec<f64>,
    pub iterations: usize,
    pub sup_change: f64,
    pub residual_t: f64,
    pub residual_y: f64,
    pub scale_t: f64,
    pub scale_y: f64,
    /// Fraction of nodes clipped by the corridor projection on the
    /// final sweep.
    pub active_fraction: f64,
    pub warning: Option<String>,
}

/// Solve the coupled front system inside the barrier corridor of a
/// previously verified ordered pair.
pub fn solve_front(problem: &FrontProblem, barriers: &SubSuperSolutions) -> Result<FrontProfile> {
    let cons = barriers.constants;
    let grid = &problem.grid;
    let a = grid.half_length();
    if a + 1e-9 < cons.min_half_length() {
        return Err(Error::InvalidArgument(format!(
            "cylinder half-length {a} below the admissible minimum {}",
            cons.min_half_length()
        )));
    }
    let cross = grid.cross();
    let ny = cross.num_nodes();
    let nx = grid.m() + 1;
    let dx = grid.dx();
    let xs = grid.xs();
    let advection = problem.advection_scheme();

    // Nodal barrier tables.
    let mut t_lo = vec![0.0; nx * ny];
    let mut t_hi = vec![0.0; nx * ny];
    let mut y_lo = vec![0.0; nx * ny];
    for i in 0..nx {
        for j in 0..ny {
            t_lo[i * ny + j] = barriers.t_under(xs[i], j);
            t_hi[i * ny + j] = barriers.t_bar(xs[i], j);
            y_lo[i * ny + j] = barriers.y_under(xs[i], j);
        }
    }
    let dir_t = t_lo[(nx - 1) * ny..].to_vec();
    let dir_y = y_lo[(nx - 1) * ny..].to_vec();

    let t_yop = problem.t_yop();
    let y_yop = problem.y_yop();
    let sep_t = SeparableSolver::new(&t_yop, 1.0, problem.c, nx, dx, advection)?;
    let sep_y = SeparableSolver::new(&y_yop, 1.0 / problem.le, problem.c, nx, dx, advection)?;
    let sheared = !problem.flow.is_zero();

    // Initial iterate: T capped at the corridor ceiling, Y = 1.
    let cap = cons.s0.max(cons.k2);
    let mut t: Vec<f64> = t_hi.iter().map(|&hi| hi.min(cap)).collect();
    let mut y = vec![1.0; nx * ny];
    for k in 0..nx * ny {
        t[k] = t[k].clamp(t_lo[k], t_hi[k]);
    }

    let zeros_vx = vec![0.0; nx];
    let mut iterations = 0;
    let mut sup_change = f64::INFINITY;
    let mut active = 0usize;
    while iterations < MAX_SWEEPS {
        iterations += 1;
        active = 0;

        // T step: source lagged.
        let mut rhs_t = vec![0.0; nx * ny];
        for i in 0..nx {
            for j in 0..ny {
                rhs_t[i * ny + j] = problem.reaction.eval(j, t[i * ny + j]) * y[i * ny + j];
            }
        }
        let mut t_new = linear_solve(
            problem, &sep_t, &t_yop, 1.0, sheared, &rhs_t, &zeros_vx, &dir_t, &t,
        )?;
        for k in 0..nx * ny {
            let clamped = t_new[k].clamp(t_lo[k], t_hi[k]);
            if clamped != t_new[k] {
                active += 1;
            }
            t_new[k] = clamped;
        }

        // Y step: x-averaged absorption implicit, the rest lagged.
        let mut vbar = vec![0.0; nx];
        let mut frow = vec![0.0; ny];
        for i in 0..nx {
            for j in 0..ny {
                frow[j] = problem.reaction.eval(j, t_new[i * ny + j]);
            }
            vbar[i] = cross.integrate(&frow)? / cross.length();
        }
        let mut rhs_y = vec![0.0; nx * ny];
        for i in 0..nx {
            for j in 0..ny {
                let f = problem.reaction.eval(j, t_new[i * ny + j]);
                rhs_y[i * ny + j] = (vbar[i] - f) * y[i * ny + j];
            }
        }
        let mut y_new = linear_solve(
            problem, &sep_y, &y_yop, 1.0 / problem.le, sheared, &rhs_y, &vbar, &dir_y, &y,
        )?;
        for k in 0..nx * ny {
            let clamped = y_new[k].clamp(y_lo[k], 1.0);
            if clamped != y_new[k] {
                active += 1;
            }
            y_new[k] = clamped;
        }

        sup_change = t
            .iter()
            .zip(t_new.iter())
            .chain(y.iter().zip(y_new.iter()))
            .map(|(old, new)| (old - new).abs())
            .fold(0.0, f64::max);
        t = t_new;
        y = y_new;
        if sup_change <= SUP_CHANGE_TOL {
            break;
        }
    }
    if sup_change > SUP_CHANGE_TOL {
        return Err(Error::Numerical(format!(
            "front iteration stalled: sup change {sup_change:.3e} after {iterations} sweeps"
        )));
    }

    // Residual gate over genuine (non-Dirichlet, non-clipped) nodes.
    let (res_t, sc_t) = t_residual_fields(problem, &t, &y, advection);
    let (res_y, sc_y) = y_residual_fields(problem, &y, &t, advection);
    let mut worst_t = 0.0_f64;
    let mut worst_y = 0.0_f64;
    let mut scale_t = 0.0_f64;
    let mut scale_y = 0.0_f64;
    for i in 0..nx - 1 {
        for j in 0..ny {
            let k = i * ny + j;
            scale_t = scale_t.max(sc_t[k]);
            scale_y = scale_y.max(sc_y[k]);
            let t_clipped = t[k] == t_lo[k] || t[k] == t_hi[k];
            if !t_clipped {
                worst_t = worst_t.max(res_t[k].abs());
            }
            let y_clipped = y[k] == y_lo[k] || y[k] == 1.0;
            if !y_clipped {
                worst_y = worst_y.max(res_y[k].abs());
            }
        }
    }
    if worst_t > RESIDUAL_TOL * scale_t || worst_y > RESIDUAL_TOL * scale_y {
        return Err(Error::Numerical(format!(
            "front residual gate failed: |res_T| = {worst_t:.3e} (scale {scale_t:.3e}), \
             |res_Y| = {worst_y:.3e} (scale {scale_y:.3e})"
        )));
    }

    let active_fraction = active as f64 / (2.0 * (nx * ny) as f64);
    let warning = (active_fraction > ACTIVE_FRACTION_WARN).then(|| {
        format!(
            "corridor projection active on {:.1}% of nodes; barriers may be tight",
            100.0 * active_fraction
        )
    });
    Ok(FrontProfile {
        t,
        y,
        iterations,
        sup_change,
        residual_t: worst_t,
        residual_y: worst_y,
        scale_t,
        scale_y,
        active_fraction,
        warning,
    })
}

/// One linear sub-solve: exact separable solve without shear, BiCGStab
/// preconditioned by the separable solve with shear.
#[allow(clippy::too_many_arguments)]
fn linear_solve(
    problem: &FrontProblem,
    sep: &SeparableSolver,
    yop: &DiscreteOperator,
    kx: f64,
    sheared: bool,
    rhs: &[f64],
    vx: &[f64],
    dirichlet: &[f64],
    guess: &[f64],
) -> Result<Vec<f64>> {
    if !sheared {
        return sep.solve(rhs, vx, dirichlet);
    }
    let grid = &problem.grid;
    let ny = grid.cross().num_nodes();
    let nx = grid.m() + 1;
    let advection = problem.advection_scheme();
    let apply = |field: &[f64]| -> Vec<f64> {
        // Full operator, identity on the Dirichlet row:
        // A field = -(residual without source) per row, vx included.
        let (neg, _) = residual_fields(problem, field, advection, kx, yop, &mut |_, _| 0.0);
        let mut out: Vec<f64> = neg.iter().map(|r| -r).collect();
        for i in 0..nx - 1 {
            for j in 0..ny {
                out[i * ny + j] += vx[i] * field[i * ny + j];
            }
        }
        out[(nx - 1) * ny..].copy_from_slice(&field[(nx - 1) * ny..]);
        out
    };
    let mut b = rhs.to_vec();
    b[(nx - 1) * ny..].copy_from_slice(dirichlet);
    let precond =
        |r: &[f64]| -> Result<Vec<f64>> { sep.solve(r, vx, &r[(nx - 1) * ny..]) };
    bicgstab(&apply, &precond, &b, guess, 1e-12, 400)
}
