//! Uniform half-line grids and trapezoid quadrature.

use thiserror::Error;

/// Errors raised by grid construction and validation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid length must be positive, got {0}")]
    NonPositiveLength(f64),
    #[error("grid needs at least 16 points, got {0}")]
    TooFewPoints(usize),
    #[error("grid too small: potential at tau=L is {potential:.3} but needs to exceed {required:.3}")]
    GridTooSmall { potential: f64, required: f64 },
}

/// Uniform discretization of `[0, L]` used for the half-line operator.
///
/// Nodes are `τ_i = i·spacing`, `i = 0..n−1`, with `spacing = L/(n−1)`.
/// The last node carries the artificial Dirichlet wall.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfLineGrid {
    length: f64,
    points: usize,
}

impl HalfLineGrid {
    /// The grid used throughout when nothing else is requested:
    /// `L = 20`, `n = 4001` (spacing `0.005`).
    pub const DEFAULT_LENGTH: f64 = 20.0;
    pub const DEFAULT_POINTS: usize = 4001;

    pub fn new(length: f64, points: usize) -> Result<Self, GridError> {
        if !(length > 0.0) {
            return Err(GridError::NonPositiveLength(length));
        }
        if points < 16 {
            return Err(GridError::TooFewPoints(points));
        }
        Ok(Self { length, points })
    }

    pub fn default_grid() -> Self {
        Self {
            length: Self::DEFAULT_LENGTH,
            points: Self::DEFAULT_POINTS,
        }
    }

    /// Same interval, spacing halved (node count `2n−1`); nodes nest.
    pub fn refined(&self) -> Self {
        Self {
            length: self.length,
            points: 2 * self.points - 1,
        }
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.length / (self.points - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|i| self.node(i))
    }

    /// Trapezoid weight of node `i` (1/2 at both ends, 1 inside).
    pub fn trapezoid_weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.points {
            0.5
        } else {
            1.0
        }
    }

    /// Composite-trapezoid inner product `∫ f g dτ` over the grid.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.points);
        debug_assert_eq!(g.len(), self.points);
        let h = self.spacing();
        let mut acc = 0.0;
        for i in 0..self.points {
            acc += self.trapezoid_weight(i) * f[i] * g[i];
        }
        acc * h
    }

    /// Trapezoid L² norm.
    pub fn norm(&self, f: &[f64]) -> f64 {
        self.inner(f, f).sqrt()
    }

    /// Centered first derivative with second-order one-sided stencils at
    /// both endpoints.
    pub fn derivative(&self, f: &[f64]) -> Vec<f64> {
        debug_assert_eq!(f.len(), self.points);
        let n = self.points;
        let h = self.spacing();
        let mut d = vec![0.0; n];
        d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
        for i in 1..n - 1 {
            d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
        }
        d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
        d
    }
}
