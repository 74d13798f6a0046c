//! Discretizations of the cross-section omega = (0, L) and the truncated
//! cylinder [-a, a] x omega, with trapezoid quadrature and boundary data.
//!
//! The cross-section is one-dimensional (the cylinder is 2-D), so the
//! "boundary integral" over the two endpoints degenerates to an endpoint
//! sum. The trapezoid half-weights at the endpoints are what make the
//! discrete eigenvalue operators self-adjoint under the induced inner
//! product, so every integral in the crate goes through this module.

use crate::error::{Error, Result};

/// Uniform grid on omega = (0, L) with N cells and N + 1 nodes.
#[derive(Debug, Clone)]
pub struct CrossSectionGrid {
    length: f64,
    n: usize,
    dy: f64,
    nodes: Vec<f64>,
}

impl CrossSectionGrid {
    pub fn build(length: f64, n: usize) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "cross-section length must be positive, got {length}"
            )));
        }
        if n < 8 {
            return Err(Error::InvalidArgument(format!(
                "cross-section resolution must be >= 8, got {n}"
            )));
        }
        let dy = length / n as f64;
        let nodes = (0..=n).map(|j| j as f64 * dy).collect();
        Ok(Self { length, n, dy, nodes })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of cells; there are `n() + 1` nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_nodes(&self) -> usize {
        self.n + 1
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Distance to the boundary {0, L}: min(y, L - y), exact.
    pub fn dist_to_boundary(&self, y: f64) -> f64 {
        y.min(self.length - y)
    }

    /// Outward normal at an endpoint node: -1 at y = 0, +1 at y = L.
    pub fn outward_normal(&self, node: usize) -> Result<f64> {
        if node == 0 {
            Ok(-1.0)
        } else if node == self.n {
            Ok(1.0)
        } else {
            Err(Error::InvalidArgument(format!(
                "node {node} is not a boundary node"
            )))
        }
    }

    /// Trapezoid weight of node j: dy/2 at the endpoints, dy inside.
    pub fn weight(&self, j: usize) -> f64 {
        if j == 0 || j == self.n {
            self.dy * 0.5
        } else {
            self.dy
        }
    }

    fn check_len(&self, samples: &[f64]) -> Result<()> {
        if samples.len() != self.num_nodes() {
            return Err(Error::InvalidArgument(format!(
                "expected {} nodal samples, got {}",
                self.num_nodes(),
                samples.len()
            )));
        }
        Ok(())
    }

    /// Trapezoid quadrature over omega; exact for affine samples.
    pub fn integrate(&self, samples: &[f64]) -> Result<f64> {
        self.check_len(samples)?;
        let interior: f64 = samples[1..self.n].iter().sum();
        Ok(self.dy * (0.5 * (samples[0] + samples[self.n]) + interior))
    }

    /// The surface integral over the two-point boundary: samples[0] + samples[N].
    pub fn boundary_sum(&self, samples: &[f64]) -> Result<f64> {
        self.check_len(samples)?;
        Ok(samples[0] + samples[self.n])
    }

    /// Trapezoid L^2 norm.
    pub fn l2_norm(&self, samples: &[f64]) -> Result<f64> {
        let sq: Vec<f64> = samples.iter().map(|v| v * v).collect();
        Ok(self.integrate(&sq)?.sqrt())
    }

    /// Dirichlet energy by the piecewise-linear (cell) gradient:
    /// sum over cells of (phi_{j+1} - phi_j)^2 / dy.
    pub fn dirichlet_energy(&self, samples: &[f64]) -> Result<f64> {
        self.check_len(samples)?;
        Ok(samples
            .windows(2)
            .map(|w| (w[1] - w[0]) * (w[1] - w[0]))
            .sum::<f64>()
            / self.dy)
    }

    /// Sample a function at the nodes.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|&y| f(y)).collect()
    }
}

/// Tensor-product grid on the truncated cylinder [-a, a] x omega.
#[derive(Debug, Clone)]
pub struct CylinderGrid {
    half_length: f64,
    m: usize,
    dx: f64,
    xs: Vec<f64>,
    cross: CrossSectionGrid,
}

impl CylinderGrid {
    pub fn build(half_length: f64, m: usize, cross: CrossSectionGrid) -> Result<Self> {
        if !(half_length > 0.0) || !half_length.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "cylinder half-length must be positive, got {half_length}"
            )));
        }
        if m < 8 {
            return Err(Error::InvalidArgument(format!(
                "axial resolution must be >= 8, got {m}"
            )));
        }
        let dx = 2.0 * half_length / m as f64;
        let xs = (0..=m).map(|i| -half_length + i as f64 * dx).collect();
        Ok(Self { half_length, m, dx, xs, cross })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn cross(&self) -> &CrossSectionGrid {
        &self.cross
    }

    /// Flat index of node (i, j) in x-major storage.
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.cross.num_nodes() + j
    }

    pub fn num_nodes(&self) -> usize {
        (self.m + 1) * self.cross.num_nodes()
    }

    /// Trapezoid quadrature over the full cylinder.
    pub fn integrate(&self, samples: &[f64]) -> Result<f64> {
        if samples.len() != self.num_nodes() {
            return Err(Error::InvalidArgument(format!(
                "expected {} cylinder samples, got {}",
                self.num_nodes(),
                samples.len()
            )));
        }
        let ny = self.cross.num_nodes();
        let mut total = 0.0;
        for i in 0..=self.m {
            let wx = if i == 0 || i == self.m { self.dx * 0.5 } else { self.dx };
            let row = &samples[i * ny..(i + 1) * ny];
            total += wx * self.cross.integrate(row)?;
        }
        Ok(total)
    }
}
