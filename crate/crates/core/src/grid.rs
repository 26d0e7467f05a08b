//! Log-polar annular lattices and nodal scalar fields.
//!
//! Every discretization in this crate lives on an annulus around the
//! singular point, sampled uniformly in `(s, θ) = (log r, arg)`. Radii are
//! geometric, so resolution follows the singular geometry: each octave
//! toward the puncture gets the same number of rings.

use crate::metrics::{ComplexPoint, MetricsError};
use num_complex::Complex64;

/// Log-uniform polar lattice on the annulus
/// `inner_radius ≤ |z − center| ≤ outer_radius`.
///
/// Ring `i` sits at radius `inner_radius · exp(i·h_s)` for
/// `i = 0 … n_s − 1` (both boundary circles included); column `j` sits at
/// angle `2πj/n_theta`. Nodal data is stored radius-major:
/// `index = i · n_theta + j`.
#[derive(Debug, Clone)]
pub struct AnnularGrid {
    center: ComplexPoint,
    inner_radius: f64,
    outer_radius: f64,
    n_s: usize,
    n_theta: usize,
}

impl AnnularGrid {
    pub fn new(
        center: ComplexPoint,
        inner_radius: f64,
        outer_radius: f64,
        n_s: usize,
        n_theta: usize,
    ) -> Result<Self, MetricsError> {
        if !(inner_radius.is_finite() && outer_radius.is_finite())
            || inner_radius <= 0.0
            || outer_radius <= inner_radius
        {
            return Err(MetricsError::InvalidParameter(format!(
                "need 0 < inner_radius < outer_radius, got {inner_radius}, {outer_radius}"
            )));
        }
        if n_s < 3 || n_theta < 4 {
            return Err(MetricsError::InvalidParameter(format!(
                "grid too small: n_s = {n_s}, n_theta = {n_theta}"
            )));
        }
        Ok(Self {
            center,
            inner_radius,
            outer_radius,
            n_s,
            n_theta,
        })
    }

    pub fn center(&self) -> ComplexPoint {
        self.center
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    pub fn n_s(&self) -> usize {
        self.n_s
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn node_count(&self) -> usize {
        self.n_s * self.n_theta
    }

    /// Log-radial step.
    pub fn h_s(&self) -> f64 {
        (self.outer_radius / self.inner_radius).ln() / (self.n_s - 1) as f64
    }

    /// Angular step.
    pub fn h_theta(&self) -> f64 {
        std::f64::consts::TAU / self.n_theta as f64
    }

    /// Radius of ring `i`.
    pub fn radius(&self, i: usize) -> f64 {
        debug_assert!(i < self.n_s);
        self.inner_radius * (i as f64 * self.h_s()).exp()
    }

    /// Angle of column `j`.
    pub fn theta(&self, j: usize) -> f64 {
        debug_assert!(j < self.n_theta);
        j as f64 * self.h_theta()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n_s && j < self.n_theta);
        i * self.n_theta + j
    }

    /// Plane coordinate of node `(i, j)`.
    pub fn node(&self, i: usize, j: usize) -> Complex64 {
        self.center.as_complex() + Complex64::from_polar(self.radius(i), self.theta(j))
    }
}

/// Nodal scalar values over an [`AnnularGrid`], radius-major.
#[derive(Debug, Clone)]
pub struct GridField {
    grid: AnnularGrid,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(grid: AnnularGrid, values: Vec<f64>) -> Result<Self, MetricsError> {
        if values.len() != grid.node_count() {
            return Err(MetricsError::InvalidParameter(format!(
                "expected {} nodal values, got {}",
                grid.node_count(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Sample a pointwise function at every node.
    pub fn sample<F>(grid: &AnnularGrid, f: F) -> Self
    where
        F: Fn(Complex64) -> f64 + Sync + Send,
    {
        let nodes: Vec<Complex64> = (0..grid.node_count())
            .map(|k| grid.node(k / grid.n_theta(), k % grid.n_theta()))
            .collect();
        let values = crate::exec::par_map(&nodes, |&z| f(z));
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &AnnularGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// Mean over ring `i`.
    pub fn circle_mean(&self, i: usize) -> f64 {
        let nt = self.grid.n_theta();
        let row = &self.values[i * nt..(i + 1) * nt];
        row.iter().sum::<f64>() / nt as f64
    }

    /// Max of |value| over ring `i`.
    pub fn circle_sup_abs(&self, i: usize) -> f64 {
        let nt = self.grid.n_theta();
        self.values[i * nt..(i + 1) * nt]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Node-wise difference `self − other` (same grid shape required).
    pub fn sub(&self, other: &GridField) -> Result<GridField, MetricsError> {
        if self.values.len() != other.values.len() {
            return Err(MetricsError::InvalidParameter(
                "grid shape mismatch in field subtraction".into(),
            ));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(GridField {
            grid: self.grid.clone(),
            values,
        })
    }
}
