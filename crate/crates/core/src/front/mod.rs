//! Traveling-front solver on the truncated cylinder: sub/super-solution
//! construction, the alternating elliptic solver, diagnostics, and the
//! front-convergence experiment.

pub mod corollary;
pub mod diagnostics;
pub mod separable;
pub mod solver;
pub mod subsuper;

pub use corollary::{corollary_experiment, FrontConvergenceReport};
pub use diagnostics::{front_diagnostics, FrontDiagnostics};
pub use solver::{solve_front, FrontProblem, FrontProfile, FrontVariant};
pub use subsuper::{
    build_auxiliary_rates, build_front_context, build_subsupersolutions, verify_ordered_pair,
    CertificateReport, FrontContext, SubSuperSolutions, UniformConstants,
};
