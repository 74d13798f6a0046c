//! The front-convergence experiment: solve the interior-loss front for
//! each family member on its own layer-resolving mesh, solve the Robin
//! limit front on a fine reference mesh, and measure L^2 distances over
//! a fixed compact box. The distances must decrease along the family;
//! a frozen family (negative control) must plateau instead.

use crate::convergence::interp_linear;
use crate::dispersion;
use crate::eigen::CrossProblem;
use crate::error::{Error, Result};
use crate::front::diagnostics::{front_diagnostics, FrontDiagnostics};
use crate::front::solver::{solve_front, FrontProblem, FrontProfile, FrontVariant};
use crate::front::subsuper::{
    build_front_context, build_subsupersolutions, verify_ordered_pair, UniformConstants,
};
use crate::grid::{CrossSectionGrid, CylinderGrid};
use crate::models::{FamilySpec, FlowProfile, ReactionKind, ReactionModel};

/// Everything needed to rebuild the front physics on a fresh mesh.
pub struct FrontSweepContext<'a> {
    pub fprime0: &'a dyn Fn(f64) -> f64,
    pub flow: &'a dyn Fn(&CrossSectionGrid) -> Result<FlowProfile>,
    pub reaction_kind: ReactionKind,
    pub length: f64,
    pub le: f64,
    pub n_ref: usize,
    pub lambda_max: f64,
    /// Target axial spacing; the axial count is derived from it.
    pub dx_target: f64,
    /// Half-width of the compact comparison box [-X, X] x omega.
    pub kbox_half: f64,
}

impl<'a> FrontSweepContext<'a> {
    fn reaction_on(&self, grid: &CrossSectionGrid) -> Result<ReactionModel> {
        ReactionModel::new(self.reaction_kind.clone(), grid.sample(self.fprime0), grid)
    }
}

#[derive(Debug, Clone)]
pub struct FrontConvergenceRow {
    pub k: u32,
    pub n_used: usize,
    pub c_star_k: f64,
    /// L^2(Kbox) distances to the Robin reference front.
    pub dist_t: f64,
    pub dist_y: f64,
    pub t_max_box: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct FrontConvergenceReport {
    pub c: f64,
    pub c_star_q: f64,
    pub lambda_inf: f64,
    pub half_length: f64,
    pub m: usize,
    pub kbox_half: f64,
    pub rows: Vec<FrontConvergenceRow>,
    /// Members skipped because c does not exceed their minimal speed.
    pub skipped: Vec<u32>,
    pub ref_t_max_box: f64,
    /// Largest T sub-solution value over the box (non-triviality floor).
    pub sub_max_box: f64,
    pub monotone_t: bool,
    pub monotone_y: bool,
    /// Largest relative variation of dist_t across rows (plateau metric
    /// for the frozen control).
    pub plateau_variation: f64,
    pub constants: UniformConstants,
    pub ref_diagnostics: FrontDiagnostics,
}

/// L^2 distance over the box between a member field and the reference
/// field, both on the shared x-grid; the member cross-section is
/// interpolated onto the reference cross-section.
fn box_distance(
    cyl_ref: &CylinderGrid,
    field_ref: &[f64],
    member_cross: &CrossSectionGrid,
    field_member: &[f64],
    kbox_half: f64,
) -> Result<f64> {
    let cross = cyl_ref.cross();
    let ny_ref = cross.num_nodes();
    let ny_mem = member_cross.num_nodes();
    let mut total = 0.0;
    for (i, &x) in cyl_ref.xs().iter().enumerate() {
        if x.abs() > kbox_half + 1e-9 {
            continue;
        }
        let mem_row = &field_member[i * ny_mem..(i + 1) * ny_mem];
        let mut row_sq = vec![0.0; ny_ref];
        for (j, &y) in cross.nodes().iter().enumerate() {
            let v = interp_linear(member_cross, mem_row, y);
            let d = v - field_ref[i * ny_ref + j];
            row_sq[j] = d * d;
        }
        total += cyl_ref.dx() * cross.integrate(&row_sq)?;
    }
    Ok(total.sqrt())
}

fn box_max(cyl: &CylinderGrid, field: &[f64], kbox_half: f64) -> f64 {
    let ny = cyl.cross().num_nodes();
    let mut m = f64::MIN;
    for (i, &x) in cyl.xs().iter().enumerate() {
        if x.abs() > kbox_half + 1e-9 {
            continue;
        }
        for j in 0..ny {
            m = m.max(field[i * ny + j]);
        }
    }
    m
}

/// Run the full front-convergence experiment. `c` defaults to the Robin
/// minimal speed plus 0.5 when not supplied.
pub fn corollary_experiment(
    family: &FamilySpec,
    ks: &[u32],
    c: Option<f64>,
    ctx: &FrontSweepContext,
) -> Result<FrontConvergenceReport> {
    if ks.is_empty() {
        return Err(Error::InvalidArgument("empty family index list".into()));
    }
    let q = family.q();

    // Robin reference cross-section and dispersion data.
    let ref_cross = CrossSectionGrid::build(ctx.length, ctx.n_ref)?;
    let ref_flow = (ctx.flow)(&ref_cross)?;
    let ref_reaction = ctx.reaction_on(&ref_cross)?;
    let robin_problem = CrossProblem::robin(
        ref_cross.clone(),
        ref_flow.clone(),
        q,
        ref_reaction.fprime0_samples(),
    )?;
    let robin_disp = dispersion::minimal_speed(&robin_problem, ctx.lambda_max)?;
    let c = c.unwrap_or(robin_disp.c_star + 0.5);

    // Member spectral problems, skipping subcritical members.
    let mut member_data = Vec::new();
    let mut skipped = Vec::new();
    for &k in ks {
        let n = family.resolution_for(k, ctx.length);
        let grid = CrossSectionGrid::build(ctx.length, n)?;
        let member = family.member(k, &grid)?;
        let flow = (ctx.flow)(&grid)?;
        let reaction = ctx.reaction_on(&grid)?;
        let problem =
            CrossProblem::interior_loss(grid, flow, &member.loss, reaction.fprime0_samples())?;
        let disp = dispersion::minimal_speed(&problem, ctx.lambda_max)?;
        if c <= disp.c_star + 1e-9 {
            skipped.push(k);
        } else {
            member_data.push((k, n, member, problem, disp.c_star));
        }
    }
    if member_data.is_empty() {
        return Err(Error::HypothesisViolation(format!(
            "no family member is supercritical at c = {c}"
        )));
    }

    let member_problems: Vec<(u32, CrossProblem)> = member_data
        .iter()
        .map(|(k, _, _, p, _)| (*k, p.clone()))
        .collect();
    let front_ctx = build_front_context(
        c,
        ctx.le,
        &ref_reaction,
        &robin_problem,
        &member_problems,
        ctx.lambda_max,
    )?;
    let cons = &front_ctx.constants;

    // Shared axial grid from the uniform constants.
    let a = cons.suggested_half_length().ceil();
    let m = (((2.0 * a) / ctx.dx_target).ceil() as usize).next_multiple_of(8).max(8);
    if ctx.kbox_half + 10.0 * (2.0 * a / m as f64) > a {
        return Err(Error::InvalidArgument(format!(
            "comparison box half-width {} too close to the truncation at a = {a}",
            ctx.kbox_half
        )));
    }

    // Reference Robin front.
    let ref_cyl = CylinderGrid::build(a, m, ref_cross.clone())?;
    let ref_front = FrontProblem::new(
        ref_cyl.clone(),
        ref_flow,
        ref_reaction,
        c,
        ctx.le,
        q,
        FrontVariant::RobinLimit,
    )?;
    let ref_barriers = build_subsupersolutions(&front_ctx, None)?;
    let cert = verify_ordered_pair(&ref_front, &ref_barriers)?;
    if !cert.pass {
        return Err(Error::Numerical(format!(
            "Robin barrier certificate failed: {cert:?}"
        )));
    }
    let ref_profile = solve_front(&ref_front, &ref_barriers)?;
    let ref_diagnostics = front_diagnostics(&ref_front, &ref_profile, &ref_barriers)?;

    // The sub-solution ceiling over the box (for the non-triviality floor).
    let mut sub_max_box = 0.0_f64;
    for &x in ref_cyl.xs() {
        if x.abs() > ctx.kbox_half + 1e-9 {
            continue;
        }
        for j in 0..ref_cross.num_nodes() {
            sub_max_box = sub_max_box.max(ref_barriers.t_under(x, j));
        }
    }

    // Member fronts; frozen families reuse one solve (identical data).
    let frozen = matches!(family, FamilySpec::Frozen { .. });
    let mut cached: Option<FrontProfile> = None;
    let mut rows = Vec::new();
    for (k, n, member, problem, c_star_k) in member_data {
        let cross = problem.grid().clone();
        let cyl = CylinderGrid::build(a, m, cross.clone())?;
        let flow = (ctx.flow)(&cross)?;
        let reaction = ctx.reaction_on(&cross)?;
        let front = FrontProblem::new(
            cyl.clone(),
            flow,
            reaction,
            c,
            ctx.le,
            q,
            FrontVariant::InteriorLoss(member),
        )?;
        let barriers = build_subsupersolutions(&front_ctx, Some(k))?;
        let profile = match (&cached, frozen) {
            (Some(p), true) => p.clone(),
            _ => {
                let cert = verify_ordered_pair(&front, &barriers)?;
                if !cert.pass {
                    return Err(Error::Numerical(format!(
                        "barrier certificate failed at k = {k}: {cert:?}"
                    )));
                }
                let p = solve_front(&front, &barriers)?;
                if frozen {
                    cached = Some(p.clone());
                }
                p
            }
        };
        let dist_t = box_distance(&ref_cyl, &ref_profile.t, &cross, &profile.t, ctx.kbox_half)?;
        let dist_y = box_distance(&ref_cyl, &ref_profile.y, &cross, &profile.y, ctx.kbox_half)?;
        rows.push(FrontConvergenceRow {
            k,
            n_used: n,
            c_star_k,
            dist_t,
            dist_y,
            t_max_box: box_max(&cyl, &profile.t, ctx.kbox_half),
            iterations: profile.iterations,
        });
    }

    let monotone_t = rows.windows(2).all(|w| w[1].dist_t < w[0].dist_t);
    let monotone_y = rows.windows(2).all(|w| w[1].dist_y < w[0].dist_y);
    let (dmin, dmax) = rows.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), r| {
        (lo.min(r.dist_t), hi.max(r.dist_t))
    });
    let plateau_variation = if dmax > 0.0 { (dmax - dmin) / dmax } else { 0.0 };

    Ok(FrontConvergenceReport {
        c,
        c_star_q: robin_disp.c_star,
        lambda_inf: front_ctx.robin.lambda,
        half_length: a,
        m,
        kbox_half: ctx.kbox_half,
        ref_t_max_box: box_max(&ref_cyl, &ref_profile.t, ctx.kbox_half),
        sub_max_box,
        rows,
        skipped,
        monotone_t,
        monotone_y,
        plateau_variation,
        constants: front_ctx.constants.clone(),
        ref_diagnostics,
    })
}
