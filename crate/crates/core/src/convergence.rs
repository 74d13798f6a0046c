//! Empirical reproduction of the concentration limit: eigencurves and
//! minimal speeds of the interior-loss problems converging to the Robin
//! problem as the loss concentrates at the boundary, plus the boundary
//! functional limit (the Lemma-1 gap).
//!
//! Mesh coupling is handled here: the Robin reference uses a fixed fine
//! mesh, each family member uses a mesh resolving its own layer, and
//! cross-mesh comparisons interpolate the reference onto the member grid.

use crate::dispersion;
use crate::eigen::{CrossProblem, EigenPair};
use crate::error::{Error, Result};
use crate::grid::CrossSectionGrid;
use crate::models::{self, DiracFamilyMember, FamilySpec, FlowProfile};

pub const N_REF_DEFAULT: usize = 2048;
/// Points in the sup-window sub-grid.
pub const WINDOW_POINTS: usize = 41;

/// |integral(g_k phi^2) - q * (phi(0)^2 + phi(L)^2)| — the gap closed by
/// the boundary-concentration lemma.
pub fn lemma1_gap(
    member: &DiracFamilyMember,
    grid: &CrossSectionGrid,
    phi: &[f64],
    q: f64,
) -> Result<f64> {
    let needed = models::required_resolution(member.k, grid.length());
    if grid.n() < needed {
        return Err(Error::Resolution { needed, got: grid.n() });
    }
    let integrand: Vec<f64> = member
        .loss
        .g()
        .iter()
        .zip(phi.iter())
        .map(|(g, p)| g * p * p)
        .collect();
    let interior = grid.integrate(&integrand)?;
    let sq: Vec<f64> = phi.iter().map(|p| p * p).collect();
    let boundary = q * grid.boundary_sum(&sq)?;
    Ok((interior - boundary).abs())
}

/// Linear interpolation of nodal values on a uniform grid.
pub fn interp_linear(grid: &CrossSectionGrid, vals: &[f64], y: f64) -> f64 {
    let dy = grid.dy();
    let pos = (y / dy).clamp(0.0, grid.n() as f64);
    let j = (pos.floor() as usize).min(grid.n() - 1);
    let frac = pos - j as f64;
    vals[j] * (1.0 - frac) + vals[j + 1] * frac
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub k: u32,
    pub eps: f64,
    pub n_used: usize,
    /// sup over the lambda window of |mu_k(lambda) - nu_q(lambda)|.
    pub sup_window_err: f64,
    /// L2 eigenfunction distances at the probe lambdas.
    pub l2_dists: Vec<f64>,
    /// Largest Dirichlet energy of the member eigenfunctions (H^1 bound).
    pub dirichlet_max: f64,
    /// Worst defect of mu_k(lambda) <= rayleigh(psi_ref) (limsup chain).
    pub limsup_defect: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub rows: Vec<SweepRow>,
    pub window: (f64, f64),
    pub probes: Vec<f64>,
    /// Least-squares order of sup_window_err in 1/k.
    pub fitted_order: f64,
}

fn fit_order(ks: &[u32], errs: &[f64]) -> f64 {
    // Slope of ln(err) against ln(1/k).
    let pts: Vec<(f64, f64)> = ks
        .iter()
        .zip(errs.iter())
        .filter(|(_, &e)| e > 0.0)
        .map(|(&k, &e)| ((1.0 / k as f64).ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Everything needed to rebuild the physics on a fresh mesh.
pub struct SweepContext<'a> {
    pub fprime0: &'a dyn Fn(f64) -> f64,
    pub flow: &'a dyn Fn(&CrossSectionGrid) -> Result<FlowProfile>,
    pub length: f64,
    pub n_ref: usize,
}

impl<'a> SweepContext<'a> {
    fn robin_problem(&self, q: f64, n: usize) -> Result<CrossProblem> {
        let grid = CrossSectionGrid::build(self.length, n)?;
        let flow = (self.flow)(&grid)?;
        let fp = grid.sample(self.fprime0);
        CrossProblem::robin(grid, flow, q, &fp)
    }

    fn member_problem(
        &self,
        family: &FamilySpec,
        k: u32,
    ) -> Result<(CrossProblem, DiracFamilyMember, usize)> {
        let n = family.resolution_for(k, self.length);
        let grid = CrossSectionGrid::build(self.length, n)?;
        let member = family.member(k, &grid)?;
        let flow = (self.flow)(&grid)?;
        let fp = grid.sample(self.fprime0);
        let problem = CrossProblem::interior_loss(grid, flow, &member.loss, &fp)?;
        Ok((problem, member, n))
    }
}

fn l2_distance_on_member_grid(
    member_grid: &CrossSectionGrid,
    phi: &[f64],
    ref_grid: &CrossSectionGrid,
    psi_ref: &[f64],
) -> Result<f64> {
    let diff_sq: Vec<f64> = member_grid
        .nodes()
        .iter()
        .zip(phi.iter())
        .map(|(&y, &p)| {
            let r = interp_linear(ref_grid, psi_ref, y);
            (p - r) * (p - r)
        })
        .collect();
    Ok(member_grid.integrate(&diff_sq)?.sqrt())
}

/// Eigencurve convergence sweep over the family: sup-window errors,
/// eigenfunction distances, H^1 boundedness and the limsup chain.
pub fn theorem2_sweep(
    family: &FamilySpec,
    ks: &[u32],
    window: (f64, f64),
    probes: &[f64],
    ctx: &SweepContext,
) -> Result<ConvergenceReport> {
    if window.1 <= window.0 {
        return Err(Error::InvalidArgument("empty lambda window".into()));
    }
    let q = family.q();
    let lambdas: Vec<f64> = (0..WINDOW_POINTS)
        .map(|i| window.0 + (window.1 - window.0) * i as f64 / (WINDOW_POINTS - 1) as f64)
        .collect();

    let robin = ctx.robin_problem(q, ctx.n_ref)?;
    let nu: Vec<f64> = lambdas
        .iter()
        .map(|&l| robin.principal(l).map(|p| p.value))
        .collect::<Result<_>>()?;
    let psi_probes: Vec<EigenPair> = probes
        .iter()
        .map(|&l| robin.principal(l))
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let (problem, member, n_used) = ctx.member_problem(family, k)?;
        let mut sup_err = 0.0_f64;
        let mut limsup_defect = 0.0_f64;
        for (i, &lambda) in lambdas.iter().enumerate() {
            let mu = problem.principal(lambda)?.value;
            sup_err = sup_err.max((mu - nu[i]).abs());
        }
        let mut l2_dists = Vec::with_capacity(probes.len());
        let mut dirichlet_max = 0.0_f64;
        for (pi, &lambda) in probes.iter().enumerate() {
            let pair = problem.principal(lambda)?;
            dirichlet_max =
                dirichlet_max.max(problem.grid().dirichlet_energy(&pair.eigenfunction)?);
            l2_dists.push(l2_distance_on_member_grid(
                problem.grid(),
                &pair.eigenfunction,
                robin.grid(),
                &psi_probes[pi].eigenfunction,
            )?);
            // Rayleigh minimality gives mu_k <= R(psi_ref) exactly in the
            // continuum; interpolation onto the member grid adds O(dy^2).
            let psi_on_member: Vec<f64> = problem
                .grid()
                .nodes()
                .iter()
                .map(|&y| interp_linear(robin.grid(), &psi_probes[pi].eigenfunction, y))
                .collect();
            let r = problem.rayleigh(lambda, &psi_on_member)?;
            limsup_defect = limsup_defect.max(pair.value - r);
        }
        rows.push(SweepRow {
            k,
            eps: member.eps,
            n_used,
            sup_window_err: sup_err,
            l2_dists,
            dirichlet_max,
            limsup_defect,
        });
    }
    let errs: Vec<f64> = rows.iter().map(|r| r.sup_window_err).collect();
    let fitted_order = fit_order(ks, &errs);
    Ok(ConvergenceReport { rows, window, probes: probes.to_vec(), fitted_order })
}

#[derive(Debug, Clone)]
pub struct SpeedRow {
    pub k: u32,
    pub c_star_k: f64,
    pub c_gap: f64,
    /// Root at the test speed; None when c_test <= c*_k (member skipped).
    pub lambda_k: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SpeedReport {
    pub c_star_q: f64,
    pub lambda_star_q: f64,
    pub nu0: f64,
    pub c_test: f64,
    pub lambda_inf: f64,
    pub rows: Vec<SpeedRow>,
    /// |nu(lambda_inf) - (lambda_inf^2 - c_test lambda_inf)|.
    pub dispersion_defect: f64,
}

/// Minimal-speed convergence: c*_k against the Robin c*_q, plus the
/// dispersion roots at the fixed test speed c*_q + 0.5.
pub fn speed_convergence(
    family: &FamilySpec,
    ks: &[u32],
    ctx: &SweepContext,
    lambda_max: f64,
) -> Result<SpeedReport> {
    let q = family.q();
    let robin = ctx.robin_problem(q, ctx.n_ref)?;
    let robin_disp = dispersion::minimal_speed(&robin, lambda_max)?;
    let c_test = robin_disp.c_star + 0.5;
    let root_inf = dispersion::lambda_root(&robin, c_test, &robin_disp)?;
    let nu_at_inf = robin.principal(root_inf.lambda)?.value;
    let dispersion_defect =
        (nu_at_inf - (root_inf.lambda * root_inf.lambda - c_test * root_inf.lambda)).abs();

    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let (problem, _, _) = ctx.member_problem(family, k)?;
        let disp = dispersion::minimal_speed(&problem, lambda_max)?;
        let lambda_k = if c_test > disp.c_star + 1e-9 {
            Some(dispersion::lambda_root(&problem, c_test, &disp)?.lambda)
        } else {
            None
        };
        rows.push(SpeedRow {
            k,
            c_star_k: disp.c_star,
            c_gap: (disp.c_star - robin_disp.c_star).abs(),
            lambda_k,
        });
    }
    Ok(SpeedReport {
        c_star_q: robin_disp.c_star,
        lambda_star_q: robin_disp.lambda_star,
        nu0: robin_disp.mu0,
        c_test,
        lambda_inf: root_inf.lambda,
        rows,
        dispersion_defect,
    })
}
