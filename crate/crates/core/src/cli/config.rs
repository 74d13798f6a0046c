//! Structured-text run configuration: TOML with sections [geometry],
//! [physics], [family], [experiment], [output]. Unknown keys are hard
//! errors so typos cannot silently fall back to defaults; every
//! auto-derived parameter is echoed into the run metadata.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::grid::CrossSectionGrid;
use crate::models::{FamilySpec, FlowProfile, ReactionKind, ReactionModel};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    geometry: GeometrySection,
    physics: PhysicsSection,
    #[serde(default)]
    family: Option<FamilySection>,
    #[serde(default)]
    experiment: ExperimentSection,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometrySection {
    /// Cross-section width L.
    length: f64,
    /// Cross-section intervals; defaults to the family mesh rule.
    n: Option<usize>,
    /// Cylinder half-length a; auto-derived from the barrier constants.
    half_length: Option<f64>,
    /// Axial intervals M; derived from dx when absent.
    m: Option<usize>,
    /// Target axial spacing.
    dx: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct PhysicsSection {
    /// "zero" or "cosine(amplitude, modes)".
    flow: Option<String>,
    /// "linear(a)", "log_kpp(a)" or "saturating(a)".
    reaction: Option<String>,
    le: Option<f64>,
    /// Robin heat-loss rate (also the family's layer mass per side).
    q: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilySection {
    /// "quadratic", "mollifier(hat)" or "frozen(k0)".
    kind: String,
    ks: Option<Vec<u32>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentSection {
    /// Experiment selector; the subcommand takes precedence.
    kind: Option<String>,
    lambda_window: Option<[f64; 2]>,
    lambda_points: Option<usize>,
    probes: Option<Vec<f64>>,
    /// Front speed; defaults to c*_q + 0.5.
    c: Option<f64>,
    /// Speeds for the dispersion-root table.
    c_values: Option<Vec<f64>>,
    /// Half-width of the compact comparison box.
    kbox_half: Option<f64>,
    lambda_max: Option<f64>,
    /// Reference (Robin) mesh resolution.
    n_ref: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    dir: Option<String>,
}

/// A named function spec like `cosine(1.0, 2)`.
fn parse_spec(text: &str) -> Result<(String, Vec<f64>)> {
    let text = text.trim();
    let (name, args) = match text.find('(') {
        None => (text, Vec::new()),
        Some(open) => {
            let close = text
                .rfind(')')
                .ok_or_else(|| Error::Config(format!("unbalanced parentheses in `{text}`")))?;
            if close != text.len() - 1 {
                return Err(Error::Config(format!("trailing junk in `{text}`")));
            }
            let inner = &text[open + 1..close];
            let args = inner
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| Error::Config(format!("bad numeric argument `{s}` in `{text}`")))
                })
                .collect::<Result<Vec<f64>>>()?;
            (&text[..open], args)
        }
    };
    Ok((name.trim().to_string(), args))
}

fn expect_args(name: &str, args: &[f64], n: usize) -> Result<()> {
    if args.len() != n {
        return Err(Error::Config(format!(
            "`{name}` expects {n} argument(s), got {}",
            args.len()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub enum FlowSpec {
    Zero,
    Cosine { amplitude: f64, modes: u32 },
}

impl FlowSpec {
    fn parse(text: &str) -> Result<Self> {
        let (name, args) = parse_spec(text)?;
        match name.as_str() {
            "zero" => {
                expect_args("zero", &args, 0)?;
                Ok(FlowSpec::Zero)
            }
            "cosine" => {
                expect_args("cosine", &args, 2)?;
                if args[1] < 1.0 || args[1].fract() != 0.0 {
                    return Err(Error::Config(format!(
                        "cosine mode count must be a positive integer, got {}",
                        args[1]
                    )));
                }
                Ok(FlowSpec::Cosine { amplitude: args[0], modes: args[1] as u32 })
            }
            other => Err(Error::Config(format!("unknown flow `{other}`"))),
        }
    }

    pub fn build(&self, grid: &CrossSectionGrid) -> Result<FlowProfile> {
        match *self {
            FlowSpec::Zero => Ok(FlowProfile::zero(grid)),
            FlowSpec::Cosine { amplitude, modes } => FlowProfile::cosine(amplitude, modes, grid),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReactionSpec {
    pub kind: ReactionKind,
    /// Constant KPP coefficient a (f'(0) = a for all supported kinds).
    pub coeff: f64,
}

impl ReactionSpec {
    fn parse(text: &str) -> Result<Self> {
        let (name, args) = parse_spec(text)?;
        let kind = match name.as_str() {
            "linear" => ReactionKind::Linear,
            "log_kpp" => ReactionKind::LogKpp,
            "saturating" => ReactionKind::Saturating,
            other => return Err(Error::Config(format!("unknown reaction `{other}`"))),
        };
        expect_args(&name, &args, 1)?;
        if args[0] <= 0.0 {
            return Err(Error::Config(format!(
                "reaction coefficient must be positive, got {}",
                args[0]
            )));
        }
        Ok(ReactionSpec { kind, coeff: args[0] })
    }

    pub fn build(&self, grid: &CrossSectionGrid) -> Result<ReactionModel> {
        ReactionModel::new(self.kind.clone(), vec![self.coeff; grid.num_nodes()], grid)
    }

    pub fn fprime0(&self) -> f64 {
        self.coeff
    }
}

fn parse_family(kind: &str, q: f64) -> Result<FamilySpec> {
    let kind = kind.trim();
    if kind == "quadratic" {
        return Ok(FamilySpec::Quadratic { q });
    }
    if kind == "mollifier(hat)" || kind == "mollifier_hat" {
        return Ok(FamilySpec::MollifierHat { q });
    }
    if let Some(rest) = kind.strip_prefix("frozen(") {
        let inner = rest
            .strip_suffix(')')
            .ok_or_else(|| Error::Config(format!("unbalanced parentheses in `{kind}`")))?;
        let k0 = inner
            .trim()
            .parse::<u32>()
            .map_err(|_| Error::Config(format!("bad frozen index `{inner}`")))?;
        return Ok(FamilySpec::Frozen { k0, q });
    }
    Err(Error::Config(format!("unknown family `{kind}`")))
}

/// The experiment pipelines the CLI can dispatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Eigencurve,
    MinSpeed,
    DiracCheck,
    Converge,
    Front,
    FrontConverge,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Eigencurve => "eigencurve",
            ExperimentKind::MinSpeed => "minspeed",
            ExperimentKind::DiracCheck => "dirac-check",
            ExperimentKind::Converge => "converge",
            ExperimentKind::Front => "front",
            ExperimentKind::FrontConverge => "front-converge",
        }
    }

    fn parse(text: &str) -> Result<Self> {
        match text {
            "eigencurve" => Ok(ExperimentKind::Eigencurve),
            "minspeed" => Ok(ExperimentKind::MinSpeed),
            "dirac-check" => Ok(ExperimentKind::DiracCheck),
            "converge" => Ok(ExperimentKind::Converge),
            "front" => Ok(ExperimentKind::Front),
            "front-converge" => Ok(ExperimentKind::FrontConverge),
            other => Err(Error::Config(format!("unknown experiment `{other}`"))),
        }
    }
}

/// Fully resolved run configuration with defaults applied.
#[derive(Debug, Clone)]
pub struct Config {
    pub length: f64,
    pub n: Option<usize>,
    pub half_length: Option<f64>,
    pub m: Option<usize>,
    pub dx: f64,
    pub flow: FlowSpec,
    pub reaction: ReactionSpec,
    pub le: f64,
    pub q: f64,
    pub family: Option<FamilySpec>,
    pub ks: Vec<u32>,
    pub experiment: ExperimentKind,
    pub lambda_window: Option<[f64; 2]>,
    pub lambda_points: usize,
    pub probes: Vec<f64>,
    pub c: Option<f64>,
    pub c_values: Option<Vec<f64>>,
    pub kbox_half: f64,
    pub lambda_max: f64,
    pub n_ref: Option<usize>,
    pub out_dir: String,
    /// Raw config text; hashed into output file names.
    pub raw: String,
}

impl Config {
    /// Cross-section intervals: explicit, else the family mesh rule at
    /// the largest requested k, else 256.
    pub fn resolved_n(&self) -> usize {
        if let Some(n) = self.n {
            return n;
        }
        match (&self.family, self.ks.iter().max()) {
            (Some(family), Some(&kmax)) => family.resolution_for(kmax, self.length),
            _ => 256,
        }
    }

    pub fn family_required(&self) -> Result<&FamilySpec> {
        self.family.as_ref().ok_or_else(|| {
            Error::Config("this experiment requires a [family] section".into())
        })
    }
}

pub fn parse_config(raw: &str) -> Result<Config> {
    let file: ConfigFile =
        toml::from_str(raw).map_err(|e| Error::Config(format!("config parse error: {e}")))?;

    if file.geometry.length <= 0.0 {
        return Err(Error::Config("geometry.length must be positive".into()));
    }
    if file.physics.q < 0.0 {
        return Err(Error::Config("physics.q must be nonnegative".into()));
    }
    let le = file.physics.le.unwrap_or(1.0);
    if le <= 0.0 {
        return Err(Error::Config("physics.le must be positive".into()));
    }
    let dx = file.geometry.dx.unwrap_or(0.25);
    if dx <= 0.0 {
        return Err(Error::Config("geometry.dx must be positive".into()));
    }

    let flow = FlowSpec::parse(file.physics.flow.as_deref().unwrap_or("zero"))?;
    let reaction = ReactionSpec::parse(file.physics.reaction.as_deref().unwrap_or("linear(1.0)"))?;

    let (family, ks) = match &file.family {
        None => (None, Vec::new()),
        Some(section) => {
            let spec = parse_family(&section.kind, file.physics.q)?;
            let ks = section.ks.clone().unwrap_or_else(|| vec![4, 8, 16, 32]);
            if ks.is_empty() || ks.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Config(
                    "family.ks must be nonempty and strictly increasing".into(),
                ));
            }
            (Some(spec), ks)
        }
    };

    let experiment = ExperimentKind::parse(
        file.experiment.kind.as_deref().unwrap_or("eigencurve"),
    )?;

    let lambda_points = file.experiment.lambda_points.unwrap_or(81);
    if lambda_points < 2 {
        return Err(Error::Config("experiment.lambda_points must be >= 2".into()));
    }
    if let Some([lo, hi]) = file.experiment.lambda_window {
        if hi <= lo {
            return Err(Error::Config("experiment.lambda_window must be increasing".into()));
        }
    }

    Ok(Config {
        length: file.geometry.length,
        n: file.geometry.n,
        half_length: file.geometry.half_length,
        m: file.geometry.m,
        dx,
        flow,
        reaction,
        le,
        q: file.physics.q,
        family,
        ks,
        experiment,
        lambda_window: file.experiment.lambda_window,
        lambda_points,
        probes: file.experiment.probes.unwrap_or_else(|| vec![0.0, 0.5, 1.0]),
        c: file.experiment.c,
        c_values: file.experiment.c_values,
        kbox_half: file.experiment.kbox_half.unwrap_or(20.0),
        lambda_max: file.experiment.lambda_max.unwrap_or(50.0),
        n_ref: file.experiment.n_ref,
        out_dir: file.output.dir.unwrap_or_else(|| "out".into()),
        raw: raw.to_string(),
    })
}

pub fn load_config(path: &Path) -> Result<Config> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&raw)
}
