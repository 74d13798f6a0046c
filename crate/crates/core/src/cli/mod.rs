//! Command-line entry point: loads a structured-text config, dispatches
//! the experiment pipelines, and emits CSV/JSON/SVG artifacts with a
//! recorded tolerance set.
//!
//! Exit codes: 0 success (all gates passed), 1 usage or config error,
//! 2 hypothesis violation (e.g. the Robin problem admits no minimal
//! speed), 3 numerical failure (non-convergence, failed certificate).
//! Result files are only written on success; every run, including
//! failures, writes a `-meta.json` with the config echo, tolerances and
//! derived parameters.

pub mod config;
pub mod output;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::convergence::{speed_convergence, theorem2_sweep, SweepContext};
use crate::dispersion::{lambda_root, minimal_speed, slope_margin};
use crate::eigen::{eigencurve, CrossProblem};
use crate::error::{Error, Result};
use crate::front::corollary::{corollary_experiment, FrontSweepContext};
use crate::front::{
    build_front_context, build_subsupersolutions, front_diagnostics, solve_front,
    verify_ordered_pair, FrontProblem, FrontVariant, UniformConstants,
};
use crate::grid::{CrossSectionGrid, CylinderGrid};
use crate::models::{check_family_hypotheses, FamilySpec};

use config::{Config, ExperimentKind};
use output::{line_plot_svg, heatmap_svg, OutputSet};

const EXIT_HELP: &str = "Exit codes:\n  0  success, all invariant gates passed\n  1  usage or config error\n  2  hypothesis violation (e.g. no minimal speed exists)\n  3  numerical failure (non-convergence, certificate failure)";

#[derive(Parser)]
#[command(
    name = "kppfront",
    about = "KPP traveling fronts in a cylinder with shear flow and heat loss",
    after_help = EXIT_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Path to the TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides [output].dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit SVG plots alongside CSV/JSON.
    #[arg(long)]
    plots: bool,
    /// Suppress the summary line on stdout.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Principal-eigenvalue curves lambda -> mu(lambda) with slopes.
    Eigencurve(RunArgs),
    /// Minimal speed c*, dispersion roots and slope margins.
    Minspeed(RunArgs),
    /// Validate the concentration hypotheses of a heat-loss family.
    DiracCheck(RunArgs),
    /// Eigencurve / eigenfunction / minimal-speed convergence sweep.
    Converge(RunArgs),
    /// Solve one traveling-front problem and its diagnostics.
    Front(RunArgs),
    /// Front-convergence experiment against the Robin reference front.
    FrontConverge(RunArgs),
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::InvalidArgument(_) => 1,
        Error::HypothesisViolation(_) => 2,
        Error::Resolution { .. }
        | Error::Numerical(_)
        | Error::Internal(_)
        | Error::Io(_) => 3,
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are successful exits.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (experiment, args) = match &cli.command {
        Command::Eigencurve(a) => (ExperimentKind::Eigencurve, a),
        Command::Minspeed(a) => (ExperimentKind::MinSpeed, a),
        Command::DiracCheck(a) => (ExperimentKind::DiracCheck, a),
        Command::Converge(a) => (ExperimentKind::Converge, a),
        Command::Front(a) => (ExperimentKind::Front, a),
        Command::FrontConverge(a) => (ExperimentKind::FrontConverge, a),
    };

    let start = Instant::now();
    let mut cfg = match config::load_config(&args.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    // The subcommand is authoritative over [experiment].kind.
    cfg.experiment = experiment;
    let out_dir = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&cfg.out_dir));

    let mut outputs = OutputSet::new(experiment.name(), &cfg.raw);
    let result = dispatch(experiment, &cfg, &mut outputs, args.plots);

    let (code, derived, error_text) = match &result {
        Ok(derived) => (0, derived.clone(), serde_json::Value::Null),
        Err(e) => (exit_code(e), serde_json::Value::Null, json!(e.to_string())),
    };
    let manifest = if code == 0 {
        match outputs.write_all(&out_dir) {
            Ok(paths) => paths,
            Err(e) => {
                eprintln!("error: {e}");
                return exit_code(&e);
            }
        }
    } else {
        Vec::new()
    };

    let meta = json!({
        "experiment": experiment.name(),
        "config_path": args.config.display().to_string(),
        "config_sha256": full_hash(&cfg.raw),
        "config": cfg.raw,
        "exit_code": code,
        "error": error_text,
        "mesh_rule": "N = max(256, ceil(32 k L)); reference meshes from experiment.n_ref",
        "tolerances": {
            "eigen_abstol": 1e-10,
            "eigen_residual_gate": 1e-8,
            "dispersion_lambda_tol": 1e-9,
            "front_sup_change_tol": 1e-10,
            "front_residual_tol": 1e-6,
        },
        "derived": derived,
        "files": manifest.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "wall_time_ms": start.elapsed().as_millis() as u64,
    });
    if let Err(e) = write_meta(&out_dir, experiment.name(), &cfg.raw, &meta) {
        eprintln!("error: {e}");
        return exit_code(&e);
    }

    match result {
        Ok(_) => {
            if !args.quiet {
                println!(
                    "{}: ok, {} result file(s) in {}",
                    experiment.name(),
                    manifest.len(),
                    out_dir.display()
                );
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            code
        }
    }
}

fn full_hash(raw: &str) -> String {
    let digest = Sha256::digest(raw.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn write_meta(
    dir: &Path,
    experiment: &str,
    raw: &str,
    meta: &serde_json::Value,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let name = format!("{experiment}-{}-meta.json", output::config_hash(raw));
    let body = serde_json::to_string_pretty(meta).expect("meta serialization") + "\n";
    std::fs::write(dir.join(name), body)?;
    Ok(())
}

fn dispatch(
    experiment: ExperimentKind,
    cfg: &Config,
    out: &mut OutputSet,
    plots: bool,
) -> Result<serde_json::Value> {
    match experiment {
        ExperimentKind::Eigencurve => run_eigencurve(cfg, out, plots),
        ExperimentKind::MinSpeed => run_minspeed(cfg, out),
        ExperimentKind::DiracCheck => run_dirac_check(cfg, out),
        ExperimentKind::Converge => run_converge(cfg, out, plots),
        ExperimentKind::Front => run_front(cfg, out, plots),
        ExperimentKind::FrontConverge => run_front_converge(cfg, out, plots),
    }
}

fn robin_problem(cfg: &Config, n: usize) -> Result<CrossProblem> {
    let grid = CrossSectionGrid::build(cfg.length, n)?;
    let flow = cfg.flow.build(&grid)?;
    let reaction = cfg.reaction.build(&grid)?;
    CrossProblem::robin(grid, flow, cfg.q, reaction.fprime0_samples())
}

fn member_problem(cfg: &Config, family: &FamilySpec, k: u32) -> Result<CrossProblem> {
    let n = family.resolution_for(k, cfg.length);
    let grid = CrossSectionGrid::build(cfg.length, n)?;
    let member = family.member(k, &grid)?;
    let flow = cfg.flow.build(&grid)?;
    let reaction = cfg.reaction.build(&grid)?;
    CrossProblem::interior_loss(grid, flow, &member.loss, reaction.fprime0_samples())
}

fn lambda_grid(cfg: &Config, robin: &CrossProblem) -> Result<Vec<f64>> {
    let (lo, hi) = match cfg.lambda_window {
        Some([lo, hi]) => (lo, hi),
        None => match minimal_speed(robin, cfg.lambda_max) {
            Ok(disp) => (-2.0, 2.0 * disp.lambda_star + 1.0),
            // Without a minimal speed the default display window is used.
            Err(Error::HypothesisViolation(_)) => (-2.0, 2.0),
            Err(e) => return Err(e),
        },
    };
    let pts = cfg.lambda_points;
    Ok((0..pts)
        .map(|i| lo + (hi - lo) * i as f64 / (pts - 1) as f64)
        .collect())
}

fn run_eigencurve(cfg: &Config, out: &mut OutputSet, plots: bool) -> Result<serde_json::Value> {
    let robin = robin_problem(cfg, cfg.resolved_n())?;
    let lambdas = lambda_grid(cfg, &robin)?;

    let mut problems: Vec<(String, CrossProblem)> = vec![("robin".into(), robin)];
    if let Some(family) = &cfg.family {
        for &k in &cfg.ks {
            problems.push((format!("k{k}"), member_problem(cfg, family, k)?));
        }
    }

    let mut summary_curves = Vec::new();
    let mut plot_series = Vec::new();
    for (label, problem) in &problems {
        let curve = eigencurve(problem, &lambdas)?;
        let rows: Vec<Vec<f64>> = curve
            .lambdas
            .iter()
            .zip(curve.values.iter())
            .zip(curve.slopes.iter())
            .map(|((&l, &v), &s)| vec![l, v, s])
            .collect();
        out.csv(Some(label), "lambda,value,slope", &rows);
        let mu0 = problem.principal(0.0)?.value;
        summary_curves.push(json!({
            "label": label,
            "n": problem.grid().n(),
            "mu0": mu0,
        }));
        plot_series.push((
            label.clone(),
            curve
                .lambdas
                .iter()
                .zip(curve.values.iter())
                .map(|(&l, &v)| (l, v))
                .collect::<Vec<_>>(),
        ));
    }
    out.json(
        None,
        &json!({
            "lambda_window": [lambdas[0], lambdas[lambdas.len() - 1]],
            "lambda_points": lambdas.len(),
            "curves": summary_curves,
        }),
    );
    if plots {
        let series: Vec<(&str, Vec<(f64, f64)>)> = plot_series
            .iter()
            .map(|(l, pts)| (l.as_str(), pts.clone()))
            .collect();
        out.svg(None, line_plot_svg("principal eigenvalue curves", &series, false));
    }
    Ok(json!({ "n": cfg.resolved_n(), "lambda_points": lambdas.len() }))
}

fn run_minspeed(cfg: &Config, out: &mut OutputSet) -> Result<serde_json::Value> {
    let robin = robin_problem(cfg, cfg.resolved_n())?;
    let disp = minimal_speed(&robin, cfg.lambda_max)?;
    let cs = cfg.c_values.clone().unwrap_or_else(|| {
        vec![disp.c_star + 0.1, disp.c_star + 0.5, disp.c_star + 1.0]
    });
    let mut rows = Vec::new();
    for &c in &cs {
        let root = lambda_root(&robin, c, &disp)?;
        let margin = slope_margin(&robin, c, &disp)?;
        rows.push(vec![c, root.lambda, margin]);
    }
    out.csv(None, "c,lambda,margin", &rows);

    let mut members = Vec::new();
    if let Some(family) = &cfg.family {
        for &k in &cfg.ks {
            let problem = member_problem(cfg, family, k)?;
            let d = minimal_speed(&problem, cfg.lambda_max)?;
            members.push(json!({ "k": k, "c_star": d.c_star, "mu0": d.mu0 }));
        }
    }
    out.json(
        None,
        &json!({
            "c_star": disp.c_star,
            "lambda_star": disp.lambda_star,
            "mu0": disp.mu0,
            "members": members,
        }),
    );
    Ok(json!({ "c_star": disp.c_star, "lambda_star": disp.lambda_star }))
}

fn run_dirac_check(cfg: &Config, out: &mut OutputSet) -> Result<serde_json::Value> {
    let family = cfg.family_required()?;
    let n = cfg.resolved_n();
    let grid = CrossSectionGrid::build(cfg.length, n)?;
    let members = cfg
        .ks
        .iter()
        .map(|&k| family.member(k, &grid))
        .collect::<Result<Vec<_>>>()?;
    let report = check_family_hypotheses(&members, &grid)?;
    let rows: Vec<Vec<f64>> = report
        .rows
        .iter()
        .map(|r| vec![r.k as f64, r.eps, r.sup_outside, r.eps_max_g, r.flux[0], r.flux[1]])
        .collect();
    out.csv(None, "k,eps,sup_outside,eps_max_g,flux_left,flux_right", &rows);
    let pass = report.passes(1e-2);
    out.json(None, &json!({ "q": report.q, "passes": pass, "tolerance": 1e-2 }));
    if !pass {
        return Err(Error::HypothesisViolation(
            "family fails the concentration hypotheses".into(),
        ));
    }
    Ok(json!({ "n": n, "passes": pass }))
}

fn run_converge(cfg: &Config, out: &mut OutputSet, plots: bool) -> Result<serde_json::Value> {
    let family = cfg.family_required()?;
    let fp = cfg.reaction.fprime0();
    let fprime0 = move |_: f64| fp;
    let flow_spec = cfg.flow.clone();
    let flow = move |g: &CrossSectionGrid| flow_spec.build(g);
    let ctx = SweepContext {
        fprime0: &fprime0,
        flow: &flow,
        length: cfg.length,
        n_ref: cfg.n_ref.unwrap_or(2048),
    };
    let window = cfg.lambda_window.unwrap_or([-1.0, 1.0]);
    let report = theorem2_sweep(family, &cfg.ks, (window[0], window[1]), &cfg.probes, &ctx)?;

    let mut header = String::from("k,eps,n_used,sup_window_err,dirichlet_max,limsup_defect");
    for p in &cfg.probes {
        header.push_str(&format!(",l2_dist_lambda_{p}"));
    }
    let rows: Vec<Vec<f64>> = report
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![
                r.k as f64,
                r.eps,
                r.n_used as f64,
                r.sup_window_err,
                r.dirichlet_max,
                r.limsup_defect,
            ];
            row.extend(r.l2_dists.iter().copied());
            row
        })
        .collect();
    out.csv(Some("window"), &header, &rows);

    let speed = speed_convergence(family, &cfg.ks, &ctx, cfg.lambda_max)?;
    let speed_rows: Vec<Vec<f64>> = speed
        .rows
        .iter()
        .map(|r| vec![r.k as f64, r.c_star_k, r.c_gap, r.lambda_k.unwrap_or(f64::NAN)])
        .collect();
    out.csv(Some("speed"), "k,c_star_k,c_gap,lambda_k", &speed_rows);

    let frozen = matches!(family, FamilySpec::Frozen { .. });
    let sup_monotone = report
        .rows
        .windows(2)
        .all(|w| w[1].sup_window_err < w[0].sup_window_err);
    let gap_monotone = speed.rows.windows(2).all(|w| w[1].c_gap < w[0].c_gap);
    out.json(
        None,
        &json!({
            "window": [report.window.0, report.window.1],
            "probes": report.probes,
            "fitted_order": report.fitted_order,
            "sup_err_monotone": sup_monotone,
            "c_gap_monotone": gap_monotone,
            "c_star_q": speed.c_star_q,
            "lambda_star_q": speed.lambda_star_q,
            "nu0": speed.nu0,
            "c_test": speed.c_test,
            "lambda_inf": speed.lambda_inf,
            "dispersion_defect": speed.dispersion_defect,
        }),
    );
    if plots {
        let pts: Vec<(f64, f64)> = report
            .rows
            .iter()
            .map(|r| (r.k as f64, r.sup_window_err.max(1e-300)))
            .collect();
        out.svg(
            None,
            line_plot_svg("eigencurve sup-error vs k (log-log)", &[("sup_err", pts)], true),
        );
    }
    if !frozen && !sup_monotone {
        return Err(Error::Numerical(
            "eigencurve sup-error is not strictly decreasing in k".into(),
        ));
    }
    Ok(json!({
        "n_ref": ctx.n_ref,
        "fitted_order": report.fitted_order,
        "c_star_q": speed.c_star_q,
    }))
}

fn constants_json(cons: &UniformConstants) -> serde_json::Value {
    json!({
        "c": cons.c,
        "le": cons.le,
        "lambda_inf": cons.lambda_inf,
        "inf_lambda": cons.inf_lambda,
        "beta": cons.beta,
        "chi_min": cons.chi_min,
        "eta": cons.eta,
        "eps_margin": cons.eps_margin,
        "gamma": cons.gamma,
        "delta": cons.delta,
        "x0": cons.x0,
        "x_pos": cons.x_pos,
        "k1": cons.k1,
        "k2": cons.k2,
        "k3": cons.k3,
        "k4": cons.k4,
        "lambda1": cons.lambda1,
        "lambda2": cons.lambda2,
        "c1": cons.c1,
        "c2": cons.c2,
        "c3": cons.c3,
    })
}

fn run_front(cfg: &Config, out: &mut OutputSet, plots: bool) -> Result<serde_json::Value> {
    // Member variant when a family is configured (first k of the list),
    // Robin limit otherwise.
    let member_k = cfg.family.as_ref().map(|_| cfg.ks[0]);
    let n = cfg.resolved_n();
    let robin = robin_problem(cfg, n)?;
    let disp = minimal_speed(&robin, cfg.lambda_max)?;
    let c = cfg.c.unwrap_or(disp.c_star + 0.5);

    let mut member_problems = Vec::new();
    let mut member_data = None;
    if let (Some(family), Some(k)) = (&cfg.family, member_k) {
        let problem = member_problem(cfg, family, k)?;
        let member = family.member(k, problem.grid())?;
        member_problems.push((k, problem.clone()));
        member_data = Some((problem, member));
    }

    let ref_grid = CrossSectionGrid::build(cfg.length, n)?;
    let ref_reaction = cfg.reaction.build(&ref_grid)?;
    let ctx = build_front_context(c, cfg.le, &ref_reaction, &robin, &member_problems, cfg.lambda_max)?;
    let a = cfg
        .half_length
        .unwrap_or_else(|| ctx.constants.tail_resolved_half_length().ceil());
    let m = cfg
        .m
        .unwrap_or_else(|| (((2.0 * a) / cfg.dx).ceil() as usize).next_multiple_of(8).max(8));

    let (cross, variant, barriers) = match member_data {
        None => (
            ref_grid.clone(),
            FrontVariant::RobinLimit,
            build_subsupersolutions(&ctx, None)?,
        ),
        Some((problem, member)) => {
            let cross = problem.grid().clone();
            (
                cross,
                FrontVariant::InteriorLoss(member),
                build_subsupersolutions(&ctx, member_k)?,
            )
        }
    };
    let flow = cfg.flow.build(&cross)?;
    let reaction = cfg.reaction.build(&cross)?;
    let cyl = CylinderGrid::build(a, m, cross)?;
    let front = FrontProblem::new(cyl, flow, reaction, c, cfg.le, cfg.q, variant)?;

    let cert = verify_ordered_pair(&front, &barriers)?;
    if !cert.pass {
        return Err(Error::Numerical(format!("barrier certificate failed: {cert:?}")));
    }
    let profile = solve_front(&front, &barriers)?;
    let diag = front_diagnostics(&front, &profile, &barriers)?;

    let ny = front.grid.cross().num_nodes();
    let mut rows = Vec::with_capacity(profile.t.len());
    for (i, &x) in front.grid.xs().iter().enumerate() {
        for (j, &y) in front.grid.cross().nodes().iter().enumerate() {
            rows.push(vec![x, y, profile.t[i * ny + j], profile.y[i * ny + j]]);
        }
    }
    out.csv(None, "x,y,T,Y", &rows);
    out.json(
        None,
        &json!({
            "variant": member_k.map_or("robin_limit".to_string(), |k| format!("interior_loss_k{k}")),
            "c": c,
            "c_star": disp.c_star,
            "iterations": profile.iterations,
            "sup_change": profile.sup_change,
            "residual_t": profile.residual_t,
            "residual_y": profile.residual_y,
            "active_fraction": profile.active_fraction,
            "diagnostics": {
                "energy_defect": diag.energy_defect,
                "reaction_integral": diag.reaction_integral,
                "loss_integral": diag.loss_integral,
                "end_flux": diag.end_flux,
                "grad_y_energy": diag.grad_y_energy,
                "grad_y_bound": diag.grad_y_bound,
                "y_lower_slack": diag.y_lower_slack,
                "y_upper_slack": diag.y_upper_slack,
                "sandwich_lower_slack": diag.sandwich_lower_slack,
                "sandwich_upper_slack": diag.sandwich_upper_slack,
                "tail_slope": diag.tail_slope,
                "tail_slope_target": diag.tail_slope_target,
                "y_inf": diag.y_inf,
                "t_max": diag.t_max,
            },
        }),
    );
    if plots {
        let nx = front.grid.m() + 1;
        out.svg(Some("heatmap"), heatmap_svg("T(x, y)", &profile.t, nx, ny));
        let tail: Vec<(f64, f64)> = front
            .grid
            .xs()
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let row_max = profile.t[i * ny..(i + 1) * ny]
                    .iter()
                    .cloned()
                    .fold(f64::MIN, f64::max);
                (x, row_max.max(1e-300).log10())
            })
            .collect();
        out.svg(
            Some("tail"),
            line_plot_svg("log10 max_y T vs x", &[("log10_maxT", tail)], false),
        );
    }
    Ok(json!({
        "n": n,
        "half_length": a,
        "m": m,
        "c": c,
        "constants": constants_json(&ctx.constants),
    }))
}

fn run_front_converge(cfg: &Config, out: &mut OutputSet, plots: bool) -> Result<serde_json::Value> {
    let family = cfg.family_required()?;
    let fp = cfg.reaction.fprime0();
    let fprime0 = move |_: f64| fp;
    let flow_spec = cfg.flow.clone();
    let flow = move |g: &CrossSectionGrid| flow_spec.build(g);
    let ctx = FrontSweepContext {
        fprime0: &fprime0,
        flow: &flow,
        reaction_kind: cfg.reaction.kind.clone(),
        length: cfg.length,
        le: cfg.le,
        n_ref: cfg.n_ref.unwrap_or(512),
        lambda_max: cfg.lambda_max,
        dx_target: cfg.dx,
        kbox_half: cfg.kbox_half,
    };
    let report = corollary_experiment(family, &cfg.ks, cfg.c, &ctx)?;

    let rows: Vec<Vec<f64>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.k as f64,
                r.n_used as f64,
                r.c_star_k,
                r.dist_t,
                r.dist_y,
                r.t_max_box,
                r.iterations as f64,
            ]
        })
        .collect();
    out.csv(None, "k,n_used,c_star_k,dist_t,dist_y,t_max_box,iterations", &rows);
    out.json(
        None,
        &json!({
            "c": report.c,
            "c_star_q": report.c_star_q,
            "lambda_inf": report.lambda_inf,
            "half_length": report.half_length,
            "m": report.m,
            "kbox_half": report.kbox_half,
            "skipped": report.skipped,
            "monotone_t": report.monotone_t,
            "monotone_y": report.monotone_y,
            "plateau_variation": report.plateau_variation,
            "ref_t_max_box": report.ref_t_max_box,
            "ref_energy_defect": report.ref_diagnostics.energy_defect,
            "ref_tail_slope": report.ref_diagnostics.tail_slope,
            "ref_y_inf": report.ref_diagnostics.y_inf,
        }),
    );
    if plots {
        let t_pts: Vec<(f64, f64)> = report
            .rows
            .iter()
            .map(|r| (r.k as f64, r.dist_t.max(1e-300)))
            .collect();
        let y_pts: Vec<(f64, f64)> = report
            .rows
            .iter()
            .map(|r| (r.k as f64, r.dist_y.max(1e-300)))
            .collect();
        out.svg(
            None,
            line_plot_svg(
                "front L2 distance vs k (log-log)",
                &[("dist_T", t_pts), ("dist_Y", y_pts)],
                true,
            ),
        );
    }

    let frozen = matches!(family, FamilySpec::Frozen { .. });
    if frozen {
        if report.plateau_variation > 1e-9 {
            return Err(Error::Numerical(format!(
                "frozen control did not plateau (variation {:.3e})",
                report.plateau_variation
            )));
        }
    } else if !(report.monotone_t && report.monotone_y) {
        return Err(Error::Numerical(
            "front distances are not strictly decreasing in k".into(),
        ));
    }
    Ok(json!({
        "n_ref": ctx.n_ref,
        "half_length": report.half_length,
        "m": report.m,
        "c": report.c,
        "constants": constants_json(&report.constants),
    }))
}
