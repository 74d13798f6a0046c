//! The lambda-parametrized principal eigenvalue problems on the
//! cross-section:
//!
//!   -phi'' - lambda u(y) phi + V(y) phi = mu(lambda) phi
//!
//! with Neumann or Robin boundary conditions. The shear enters as a
//! potential scaled by lambda, so the operator stays self-adjoint and a
//! symmetric tridiagonal solver applies.
//!
//! Discretization: mirror-ghost Neumann rows, ghost-eliminated Robin
//! rows (second order), symmetrized by the similarity transform induced
//! by the trapezoid half-weights. The physical eigenfunction is
//! recovered by undoing that scaling, sign-fixed positive, and
//! normalized in the trapezoid L^2 norm.

use crate::error::{Error, Result};
use crate::grid::CrossSectionGrid;
use crate::models::{FlowProfile, HeatLossModel};
use crate::tridiag;

/// Absolute bisection tolerance for eigenvalues.
pub const EIG_ABSTOL: f64 = 1e-10;
/// Relative residual gate for accepted eigenpairs.
pub const RESIDUAL_GATE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    Neumann,
    Robin(f64),
}

/// A cross-section eigenproblem with everything fixed except lambda.
#[derive(Debug, Clone)]
pub struct CrossProblem {
    grid: CrossSectionGrid,
    flow: FlowProfile,
    potential: Vec<f64>,
    bc: BoundaryCondition,
}

/// Symmetric tridiagonal discretization of the cross-section operator
/// at a fixed lambda, in the half-weight-scaled coordinates.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    dy: f64,
    n: usize,
}

/// Principal eigenpair: smallest eigenvalue with its positive,
/// trapezoid-L2-normalized eigenfunction (physical coordinates).
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub lambda: f64,
    pub value: f64,
    pub eigenfunction: Vec<f64>,
    pub residual: f64,
}

impl CrossProblem {
    pub fn new(
        grid: CrossSectionGrid,
        flow: FlowProfile,
        potential: Vec<f64>,
        bc: BoundaryCondition,
    ) -> Result<Self> {
        if potential.len() != grid.num_nodes() {
            return Err(Error::InvalidArgument(format!(
                "potential: expected {} samples, got {}",
                grid.num_nodes(),
                potential.len()
            )));
        }
        if let BoundaryCondition::Robin(q) = bc {
            if !(q >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "Robin coefficient must be nonnegative, got {q}"
                )));
            }
        }
        Ok(Self { grid, flow, potential, bc })
    }

    /// Interior-loss problem: V = g - f'(., 0), Neumann.
    pub fn interior_loss(
        grid: CrossSectionGrid,
        flow: FlowProfile,
        loss: &HeatLossModel,
        fprime0: &[f64],
    ) -> Result<Self> {
        let v = loss
            .g()
            .iter()
            .zip(fprime0.iter())
            .map(|(g, f)| g - f)
            .collect();
        Self::new(grid, flow, v, BoundaryCondition::Neumann)
    }

    /// Robin limit problem: V = -f'(., 0), Robin(q).
    pub fn robin(
        grid: CrossSectionGrid,
        flow: FlowProfile,
        q: f64,
        fprime0: &[f64],
    ) -> Result<Self> {
        let v = fprime0.iter().map(|f| -f).collect();
        Self::new(grid, flow, v, BoundaryCondition::Robin(q))
    }

    /// Plain auxiliary problem: V = 0, Neumann (eigenvalue rho).
    pub fn plain(grid: CrossSectionGrid, flow: FlowProfile) -> Result<Self> {
        let n = grid.num_nodes();
        Self::new(grid, flow, vec![0.0; n], BoundaryCondition::Neumann)
    }

    pub fn grid(&self) -> &CrossSectionGrid {
        &self.grid
    }

    pub fn flow(&self) -> &FlowProfile {
        &self.flow
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn assemble(&self, lambda: f64) -> DiscreteOperator {
        assemble_cross_operator(
            &self.grid,
            &self.potential,
            self.flow.samples(),
            lambda,
            self.bc,
        )
    }

    /// Principal eigenpair at a given lambda.
    pub fn principal(&self, lambda: f64) -> Result<EigenPair> {
        let op = self.assemble(lambda);
        let mu = tridiag::smallest_eigenvalue(&op.diag, &op.off, EIG_ABSTOL);
        let psi = tridiag::inverse_iteration(&op.diag, &op.off, mu)?;
        let residual = tridiag::residual(&op.diag, &op.off, mu, &psi);
        if residual > RESIDUAL_GATE {
            return Err(Error::Numerical(format!(
                "eigenpair residual {residual:.3e} exceeds gate at lambda={lambda}"
            )));
        }
        // Undo the half-weight scaling to get the physical eigenfunction.
        let mut phi: Vec<f64> = psi
            .iter()
            .enumerate()
            .map(|(j, &p)| p / op.scale(j))
            .collect();
        // Sign fix: make the largest-magnitude entry positive.
        let (mut imax, mut vmax) = (0, 0.0_f64);
        for (j, &p) in phi.iter().enumerate() {
            if p.abs() > vmax {
                vmax = p.abs();
                imax = j;
            }
        }
        if phi[imax] < 0.0 {
            for p in phi.iter_mut() {
                *p = -*p;
            }
        }
        if phi.iter().any(|&p| p <= 0.0) {
            return Err(Error::Internal(format!(
                "principal eigenfunction changes sign at lambda={lambda}"
            )));
        }
        let norm = self.grid.l2_norm(&phi)?;
        for p in phi.iter_mut() {
            *p /= norm;
        }
        Ok(EigenPair { lambda, value: mu, eigenfunction: phi, residual })
    }

    /// Rayleigh quotient of a trial function at a given lambda.
    ///
    /// The gradient term uses the piecewise-linear cell energy, which is
    /// algebraically consistent with the discrete operator: evaluated on
    /// a computed eigenfunction this reproduces the eigenvalue to
    /// rounding, not merely to O(dy^2).
    pub fn rayleigh(&self, lambda: f64, phi: &[f64]) -> Result<f64> {
        let grid = &self.grid;
        if phi.len() != grid.num_nodes() {
            return Err(Error::InvalidArgument(format!(
                "trial function: expected {} samples, got {}",
                grid.num_nodes(),
                phi.len()
            )));
        }
        let norm2 = {
            let sq: Vec<f64> = phi.iter().map(|p| p * p).collect();
            grid.integrate(&sq)?
        };
        if norm2 <= 0.0 {
            return Err(Error::InvalidArgument("trial function is zero".into()));
        }
        let mut form = grid.dirichlet_energy(phi)?;
        let u = self.flow.samples();
        for j in 0..grid.num_nodes() {
            form += grid.weight(j) * (self.potential[j] - lambda * u[j]) * phi[j] * phi[j];
        }
        if let BoundaryCondition::Robin(q) = self.bc {
            form += q * (phi[0] * phi[0] + phi[grid.n()] * phi[grid.n()]);
        }
        Ok(form / norm2)
    }
}

/// Derivative of the eigencurve via the eigenfunction:
/// mu'(lambda) = -integral of u phi^2.
pub fn curve_slope(pair: &EigenPair, flow: &FlowProfile, grid: &CrossSectionGrid) -> Result<f64> {
    let integrand: Vec<f64> = flow
        .samples()
        .iter()
        .zip(pair.eigenfunction.iter())
        .map(|(u, p)| u * p * p)
        .collect();
    Ok(-grid.integrate(&integrand)?)
}

impl DiscreteOperator {
    /// Half-weight scale factor s_j = sqrt(w_j / dy).
    fn scale(&self, j: usize) -> f64 {
        if j == 0 || j == self.n {
            std::f64::consts::FRAC_1_SQRT_2
        } else {
            1.0
        }
    }

    pub fn size(&self) -> usize {
        self.n + 1
    }

    /// Apply the operator in physical coordinates (A = S^-1 B S).
    pub fn apply_physical(&self, phi: &[f64]) -> Vec<f64> {
        let n = self.n;
        let psi: Vec<f64> = (0..=n).map(|j| phi[j] * self.scale(j)).collect();
        let mut out = vec![0.0; n + 1];
        for j in 0..=n {
            let mut v = self.diag[j] * psi[j];
            if j > 0 {
                v += self.off[j - 1] * psi[j - 1];
            }
            if j < n {
                v += self.off[j] * psi[j + 1];
            }
            out[j] = v / self.scale(j);
        }
        out
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }
}

pub fn assemble_cross_operator(
    grid: &CrossSectionGrid,
    potential: &[f64],
    u: &[f64],
    lambda: f64,
    bc: BoundaryCondition,
) -> DiscreteOperator {
    let n = grid.n();
    let dy = grid.dy();
    let inv2 = 1.0 / (dy * dy);
    let mut diag: Vec<f64> = (0..=n)
        .map(|j| 2.0 * inv2 + potential[j] - lambda * u[j])
        .collect();
    let mut off = vec![-inv2; n];
    off[0] = -std::f64::consts::SQRT_2 * inv2;
    off[n - 1] = -std::f64::consts::SQRT_2 * inv2;
    if let BoundaryCondition::Robin(q) = bc {
        diag[0] += 2.0 * q / dy;
        diag[n] += 2.0 * q / dy;
    }
    DiscreteOperator { diag, off, dy, n }
}

/// Principal eigenvalue samples over a lambda grid, with slopes.
#[derive(Debug, Clone)]
pub struct EigenCurve {
    pub lambdas: Vec<f64>,
    pub values: Vec<f64>,
    pub slopes: Vec<f64>,
    pub pairs: Vec<EigenPair>,
}

/// Sweep the principal eigenvalue over a sorted lambda grid and check
/// discrete concavity (mu is an infimum of affine functions of lambda).
pub fn eigencurve(problem: &CrossProblem, lambdas: &[f64]) -> Result<EigenCurve> {
    if lambdas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "lambda grid must be strictly increasing".into(),
        ));
    }
    let mut values = Vec::with_capacity(lambdas.len());
    let mut slopes = Vec::with_capacity(lambdas.len());
    let mut pairs = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let pair = problem.principal(lambda)?;
        values.push(pair.value);
        slopes.push(curve_slope(&pair, problem.flow(), problem.grid())?);
        pairs.push(pair);
    }
    for i in 1..lambdas.len().saturating_sub(1) {
        let dl = (lambdas[i] - lambdas[i - 1], lambdas[i + 1] - lambdas[i]);
        let left = (values[i] - values[i - 1]) / dl.0;
        let right = (values[i + 1] - values[i]) / dl.1;
        let tol = 1e-8 * (1.0 + values[i].abs());
        if right > left + tol {
            return Err(Error::Internal(format!(
                "eigencurve concavity violated at lambda={}: slopes {left} -> {right}",
                lambdas[i]
            )));
        }
    }
    Ok(EigenCurve { lambdas: lambdas.to_vec(), values, slopes, pairs })
}
