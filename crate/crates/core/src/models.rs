//! Physical model ingredients: shear flow, KPP reaction, heat loss, and
//! the Dirac-approximation families concentrating the loss at the boundary.
//!
//! Validators check the structural hypotheses the theory needs: the KPP
//! bound f(y,T) <= f'(y,0) T, positivity and unboundedness of the
//! reaction, nonnegativity and positive mass of the heat loss, and — for
//! families — support concentration, the O(1) bound on eps * ||g_k||_inf,
//! and convergence of the boundary layer flux to the Robin coefficient q.

use crate::error::{Error, Result};
use crate::grid::CrossSectionGrid;

/// Shear profile u(y); zero-average is enforced by mean subtraction.
#[derive(Debug, Clone)]
pub struct FlowProfile {
    samples: Vec<f64>,
    max_abs: f64,
}

impl FlowProfile {
    pub fn from_samples(samples: Vec<f64>, grid: &CrossSectionGrid) -> Result<Self> {
        if samples.len() != grid.num_nodes() {
            return Err(Error::InvalidArgument(format!(
                "flow samples: expected {} entries, got {}",
                grid.num_nodes(),
                samples.len()
            )));
        }
        let mean = grid.integrate(&samples)? / grid.length();
        let samples: Vec<f64> = samples.iter().map(|v| v - mean).collect();
        let max_abs = samples.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        Ok(Self { samples, max_abs })
    }

    pub fn zero(grid: &CrossSectionGrid) -> Self {
        Self {
            samples: vec![0.0; grid.num_nodes()],
            max_abs: 0.0,
        }
    }

    /// u(y) = amplitude * cos(2 pi modes y / L).
    pub fn cosine(amplitude: f64, modes: u32, grid: &CrossSectionGrid) -> Result<Self> {
        let l = grid.length();
        let s = grid.sample(|y| {
            amplitude * (2.0 * std::f64::consts::PI * modes as f64 * y / l).cos()
        });
        Self::from_samples(s, grid)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs == 0.0
    }
}

/// Reaction kinds supported by the solver and validators.
///
/// `Saturating` violates the unboundedness requirement on purpose; it
/// exists as a negative control for the validator.
#[derive(Debug, Clone)]
pub enum ReactionKind {
    /// f(y, T) = a(y) T — equality case of the KPP bound, M = 0.
    Linear,
    /// f(y, T) = a(y) ln(1 + T); KPP with defect M = max(a)/2, alpha = 1.
    LogKpp,
    /// f(y, T) = a(y) T / (1 + T) — bounded, fails the +inf probe.
    Saturating,
}

/// Reaction f(y, T) with its linearization data at T = 0.
#[derive(Debug, Clone)]
pub struct ReactionModel {
    kind: ReactionKind,
    /// Nodal samples of a(y) (which equals f'(y, 0) for all three kinds).
    coeff: Vec<f64>,
    s0: f64,
    alpha: f64,
    defect_m: f64,
}

impl ReactionModel {
    pub fn new(kind: ReactionKind, coeff: Vec<f64>, grid: &CrossSectionGrid) -> Result<Self> {
        if coeff.len() != grid.num_nodes() {
            return Err(Error::InvalidArgument(format!(
                "reaction coefficient: expected {} entries, got {}",
                grid.num_nodes(),
                coeff.len()
            )));
        }
        if coeff.iter().any(|&a| !(a > 0.0)) {
            return Err(Error::InvalidArgument(
                "reaction coefficient a(y) must be strictly positive".into(),
            ));
        }
        let amax = coeff.iter().cloned().fold(f64::MIN, f64::max);
        let (s0, alpha, defect_m) = match kind {
            // ln(1+s) >= s - s^2/2 for s >= 0.
            ReactionKind::LogKpp => (1.0, 1.0, amax / 2.0),
            ReactionKind::Linear => (1.0, 1.0, 0.0),
            ReactionKind::Saturating => (1.0, 1.0, amax),
        };
        Ok(Self { kind, coeff, s0, alpha, defect_m })
    }

    pub fn linear(coeff: Vec<f64>, grid: &CrossSectionGrid) -> Result<Self> {
        Self::new(ReactionKind::Linear, coeff, grid)
    }

    pub fn eval(&self, node: usize, t: f64) -> f64 {
        let a = self.coeff[node];
        match self.kind {
            ReactionKind::Linear => a * t,
            ReactionKind::LogKpp => a * (1.0 + t).ln(),
            ReactionKind::Saturating => a * t / (1.0 + t),
        }
    }

    /// f'(y, 0) at a node.
    pub fn fprime0(&self, node: usize) -> f64 {
        self.coeff[node]
    }

    pub fn fprime0_samples(&self) -> &[f64] {
        &self.coeff
    }

    pub fn max_fprime0(&self) -> f64 {
        self.coeff.iter().cloned().fold(f64::MIN, f64::max)
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn defect_m(&self) -> f64 {
        self.defect_m
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.kind, ReactionKind::Linear)
    }
}

/// One named validation check with the worst observed violation.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub worst: f64,
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &'static str, pass: bool, worst: f64) {
        self.checks.push(Check { name, pass, worst });
    }
}

/// Check the structural reaction hypotheses on a T-sample set in (0, s0]
/// plus a large-T probe of unboundedness.
pub fn validate_reaction(
    model: &ReactionModel,
    grid: &CrossSectionGrid,
    t_samples: &[f64],
) -> ValidationReport {
    let mut report = ValidationReport::default();
    let tol = 1e-12;
    let nodes = grid.num_nodes();

    let mut worst_zero = 0.0_f64;
    let mut worst_pos = f64::INFINITY;
    let mut worst_kpp = 0.0_f64;
    let mut worst_mono = 0.0_f64;
    let mut worst_eqm = 0.0_f64;
    for j in 0..nodes {
        worst_zero = worst_zero.max(model.eval(j, 0.0).abs());
        for &t in t_samples {
            let f = model.eval(j, t);
            worst_pos = worst_pos.min(f);
            worst_kpp = worst_kpp.max(f - model.fprime0(j) * t);
            if t <= model.s0() {
                let lower = model.fprime0(j) * t
                    - model.defect_m() * t.powf(1.0 + model.alpha());
                worst_eqm = worst_eqm.max(lower - f);
            }
        }
        let mut sorted: Vec<f64> = t_samples.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in sorted.windows(2) {
            worst_mono = worst_mono.max(model.eval(j, w[0]) - model.eval(j, w[1]));
        }
    }
    report.push("f(.,0)=0", worst_zero <= tol, worst_zero);
    report.push("f>0 on (0,s0]", worst_pos > 0.0, worst_pos);
    report.push("kpp bound f<=f'(.,0)T", worst_kpp <= tol, worst_kpp);
    report.push("f nondecreasing", worst_mono <= tol, worst_mono);
    report.push("lower bound f>=f'(.,0)s-Ms^(1+alpha)", worst_eqm <= 1e-10, worst_eqm);

    // Unboundedness probe: f must keep growing between widely separated
    // large arguments (bounded reactions stall).
    let mut probe_ok = true;
    let mut worst_ratio = f64::INFINITY;
    for j in 0..nodes {
        let f6 = model.eval(j, 1e6);
        let f12 = model.eval(j, 1e12);
        let ratio = (f12 - f6) / (f6.abs() + 1e-300);
        worst_ratio = worst_ratio.min(ratio);
        if ratio < 1e-3 {
            probe_ok = false;
        }
    }
    report.push("f(.,+inf)=+inf probe", probe_ok, worst_ratio);
    report
}

/// Linear-in-T heat loss h(y, T) = g(y) T with bound K = max g.
#[derive(Debug, Clone)]
pub struct HeatLossModel {
    g: Vec<f64>,
    k_bound: f64,
}

impl HeatLossModel {
    pub fn from_samples(g: Vec<f64>, grid: &CrossSectionGrid) -> Result<Self> {
        if g.len() != grid.num_nodes() {
            return Err(Error::InvalidArgument(format!(
                "heat-loss samples: expected {} entries, got {}",
                grid.num_nodes(),
                g.len()
            )));
        }
        let k_bound = g.iter().cloned().fold(0.0_f64, f64::max);
        Ok(Self { g, k_bound })
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn k_bound(&self) -> f64 {
        self.k_bound
    }
}

pub fn validate_heatloss(model: &HeatLossModel, grid: &CrossSectionGrid) -> ValidationReport {
    let mut report = ValidationReport::default();
    let min_g = model.g().iter().cloned().fold(f64::INFINITY, f64::min);
    report.push("g>=0", min_g >= 0.0, min_g);
    let mass = grid.integrate(model.g()).unwrap_or(f64::NAN);
    report.push("integral(g)>0", mass > 0.0, mass);
    let excess = model.g().iter().cloned().fold(0.0_f64, f64::max) - model.k_bound();
    report.push("h<=KT", excess <= 0.0, excess);
    report
}

/// One member of a Dirac-approximation family: heat loss concentrated in
/// an eps_k-layer at the boundary, targeting Robin coefficient q.
#[derive(Debug, Clone)]
pub struct DiracFamilyMember {
    pub k: u32,
    pub eps: f64,
    pub q: f64,
    pub loss: HeatLossModel,
}

/// g_k(y) = q * 3 k^3 (min(0, d(y, boundary) - 1/k))^2, the paper's
/// quadratic layer profile scaled to target q.
pub fn make_quadratic_family(k: u32, q: f64, grid: &CrossSectionGrid) -> Result<DiracFamilyMember> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("family index k must be >= 2, got {k}")));
    }
    if !(q > 0.0) {
        return Err(Error::InvalidArgument(format!("Robin target q must be positive, got {q}")));
    }
    let eps = 1.0 / k as f64;
    if eps >= grid.length() / 2.0 {
        return Err(Error::InvalidArgument(format!(
            "boundary layers overlap: 1/k = {eps} >= L/2 = {}",
            grid.length() / 2.0
        )));
    }
    let k3 = (k as f64).powi(3);
    let g = grid.sample(|y| {
        let s = (grid.dist_to_boundary(y) - eps).min(0.0);
        q * 3.0 * k3 * s * s
    });
    Ok(DiracFamilyMember {
        k,
        eps,
        q,
        loss: HeatLossModel::from_samples(g, grid)?,
    })
}

/// General mollifier layer: g_k(y) = (q/eps) m(d(y)/eps) inside the
/// layer, 0 outside, for a shape m >= 0 with unit mass and m(1) = 0.
pub fn make_mollifier_family(
    shape: impl Fn(f64) -> f64,
    k: u32,
    q: f64,
    grid: &CrossSectionGrid,
) -> Result<DiracFamilyMember> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("family index k must be >= 2, got {k}")));
    }
    let eps = 1.0 / k as f64;
    if eps >= grid.length() / 2.0 {
        return Err(Error::InvalidArgument(format!(
            "boundary layers overlap: 1/k = {eps} >= L/2 = {}",
            grid.length() / 2.0
        )));
    }
    // Validate the shape on a fine reference grid.
    let m_pts = 4096;
    let mut mass = 0.0;
    for i in 0..=m_pts {
        let s = i as f64 / m_pts as f64;
        let v = shape(s);
        if v < -1e-12 {
            return Err(Error::InvalidArgument(format!(
                "mollifier shape negative at s = {s}: {v}"
            )));
        }
        let w = if i == 0 || i == m_pts { 0.5 } else { 1.0 };
        mass += w * v / m_pts as f64;
    }
    if (mass - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidArgument(format!(
            "mollifier shape mass is {mass}, expected 1"
        )));
    }
    if shape(1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(
            "mollifier shape must vanish at s = 1 (C^1 layer edge)".into(),
        ));
    }
    let g = grid.sample(|y| {
        let d = grid.dist_to_boundary(y);
        if d <= eps { q / eps * shape(d / eps) } else { 0.0 }
    });
    Ok(DiracFamilyMember {
        k,
        eps,
        q,
        loss: HeatLossModel::from_samples(g, grid)?,
    })
}

/// Minimal cross-section resolution for layer width 1/k: 32 nodes per layer.
pub fn required_resolution(k: u32, length: f64) -> usize {
    (32.0 * k as f64 * length).ceil() as usize
}

#[derive(Debug, Clone)]
pub struct FamilyRow {
    pub k: u32,
    pub eps: f64,
    /// sup of g_k outside the eps_k-neighborhood of the boundary.
    pub sup_outside: f64,
    /// eps_k * max(g_k) — must stay O(1).
    pub eps_max_g: f64,
    /// Layer flux at each endpoint — must tend to q.
    pub flux: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct FamilyReport {
    pub rows: Vec<FamilyRow>,
    pub q: f64,
}

impl FamilyReport {
    /// All three hypotheses within `tol` at the largest k.
    pub fn passes(&self, tol: f64) -> bool {
        let bounded = self
            .rows
            .iter()
            .all(|r| r.eps_max_g <= 10.0 * (1.0 + self.q));
        match self.rows.last() {
            Some(last) => {
                bounded
                    && last.sup_outside <= tol
                    && (last.flux[0] - self.q).abs() <= tol
                    && (last.flux[1] - self.q).abs() <= tol
            }
            None => false,
        }
    }
}

/// Check the concentration hypotheses for a sorted family of members.
pub fn check_family_hypotheses(
    members: &[DiracFamilyMember],
    grid: &CrossSectionGrid,
) -> Result<FamilyReport> {
    let mut rows = Vec::with_capacity(members.len());
    let mut q = 0.0;
    for member in members {
        let needed = required_resolution(member.k, grid.length());
        if grid.n() < needed {
            return Err(Error::Resolution { needed, got: grid.n() });
        }
        q = member.q;
        let g = member.loss.g();
        let mut sup_outside = 0.0_f64;
        let half = grid.length() / 2.0;
        let mut left = vec![0.0; grid.num_nodes()];
        let mut right = vec![0.0; grid.num_nodes()];
        for (j, &y) in grid.nodes().iter().enumerate() {
            if grid.dist_to_boundary(y) > member.eps + 1e-12 {
                sup_outside = sup_outside.max(g[j]);
            }
            if y <= half {
                left[j] = g[j];
            }
            if y >= half {
                right[j] = g[j];
            }
        }
        let max_g = g.iter().cloned().fold(0.0_f64, f64::max);
        rows.push(FamilyRow {
            k: member.k,
            eps: member.eps,
            sup_outside,
            eps_max_g: member.eps * max_g,
            flux: [grid.integrate(&left)?, grid.integrate(&right)?],
        });
    }
    Ok(FamilyReport { rows, q })
}

/// Generator for the family used in sweeps, so each k can be sampled on
/// its own (k-coupled) mesh.
#[derive(Debug, Clone)]
pub enum FamilySpec {
    Quadratic { q: f64 },
    /// Affine hat shape m(s) = 2(1 - s).
    MollifierHat { q: f64 },
    /// Negative control: g_k frozen at the k0 member regardless of k.
    Frozen { k0: u32, q: f64 },
}

impl FamilySpec {
    pub fn q(&self) -> f64 {
        match *self {
            FamilySpec::Quadratic { q }
            | FamilySpec::MollifierHat { q }
            | FamilySpec::Frozen { q, .. } => q,
        }
    }

    pub fn member(&self, k: u32, grid: &CrossSectionGrid) -> Result<DiracFamilyMember> {
        match *self {
            FamilySpec::Quadratic { q } => make_quadratic_family(k, q, grid),
            FamilySpec::MollifierHat { q } => {
                make_mollifier_family(|s| 2.0 * (1.0 - s), k, q, grid)
            }
            FamilySpec::Frozen { k0, q } => {
                let mut m = make_quadratic_family(k0, q, grid)?;
                m.k = k;
                Ok(m)
            }
        }
    }

    /// The mesh a member needs for a resolved layer; frozen members keep
    /// their true layer width.
    pub fn resolution_for(&self, k: u32, length: f64) -> usize {
        let keff = match *self {
            FamilySpec::Frozen { k0, .. } => k0,
            _ => k,
        };
        required_resolution(keff, length).max(256)
    }
}
