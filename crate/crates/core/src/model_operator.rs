//! The half-line Neumann operator `h(ζ) = −d²/dτ² + (τ+ζ)²`.
//!
//! Discretization: second-order form-based finite differences on a
//! uniform grid, Neumann at `τ = 0` (natural boundary condition of the
//! quadratic form), artificial Dirichlet wall at `τ = L` justified by the
//! super-exponential decay of the states of interest. The resulting
//! pencil `K v = μ M v` has symmetric tridiagonal `K` and diagonal
//! trapezoid mass `M`, so the lowest eigenvalue comes from Sturm
//! bisection and the eigenvector from inverse iteration.

use crate::grid::{GridError, HalfLineGrid};
use crate::linalg::{solve_deflated, LinalgError, SymTridiag};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Eigen(#[from] LinalgError),
    #[error("bracket failure: band minimum not interior to [{0}, {1}]")]
    BracketFailure(f64, f64),
}

/// Ground state of `h(ζ)` on a grid: eigenvalue, normalized samples and
/// the boundary value `u(0)`.
#[derive(Debug, Clone)]
pub struct GroundMode {
    pub zeta: f64,
    pub eigenvalue: f64,
    /// Samples over all grid nodes; the wall node carries the Dirichlet 0.
    pub samples: Vec<f64>,
    pub grid: HalfLineGrid,
}

impl GroundMode {
    pub fn boundary_value(&self) -> f64 {
        self.samples[0]
    }

    /// Second-order one-sided estimate of `u'(0)`; O(spacing²) for the
    /// converged Neumann state.
    pub fn neumann_residual(&self) -> f64 {
        let h = self.grid.spacing();
        (-3.0 * self.samples[0] + 4.0 * self.samples[1] - self.samples[2]) / (2.0 * h)
    }
}

/// Quadratic `λ₂(δ) = a2·δ² + a1·δ + a0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticCoeffs {
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
}

impl QuadraticCoeffs {
    pub fn eval(&self, delta: f64) -> f64 {
        (self.a2 * delta + self.a1) * delta + self.a0
    }
}

/// The universal spectral data of the half-line operator: `ξ₀`, `Θ₀`,
/// `C₁`, `I₂`, and the completed-square form of the second-order
/// eigenvalue correction `λ₂(δ) = a₂((δ−δ₀)² + C₀)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeGennesConstants {
    pub xi0: f64,
    pub theta0: f64,
    pub c1: f64,
    pub i2: f64,
    pub delta0: f64,
    pub c0: f64,
    pub lambda2: QuadraticCoeffs,
    /// Grid the constants were assembled on (values are Richardson
    /// extrapolated from this grid and its half-spacing refinement).
    pub grid: HalfLineGrid,
}

/// Discretization of `h(ζ)` on a fixed grid.
#[derive(Debug, Clone, Copy)]
pub struct ModelOperator {
    grid: HalfLineGrid,
}

impl ModelOperator {
    pub fn new(grid: HalfLineGrid) -> Self {
        Self { grid }
    }

    pub fn grid(&self) -> HalfLineGrid {
        self.grid
    }

    fn check_wall(&self, zeta: f64) -> Result<(), ModelError> {
        let l = self.grid.length();
        let potential = (l + zeta) * (l + zeta);
        let required = 4.0 * zeta.mul_add(zeta, 0.0).max(1.0);
        if potential <= required {
            return Err(GridError::GridTooSmall {
                potential,
                required,
            }
            .into());
        }
        Ok(())
    }

    /// Stiffness and mass of the pencil over the unknown nodes
    /// `0..n−1` (the wall node is eliminated).
    pub(crate) fn assemble(&self, zeta: f64) -> (SymTridiag, Vec<f64>) {
        let n = self.grid.points();
        let m = n - 1;
        let h = self.grid.spacing();
        let mut diag = vec![0.0; m];
        let mut off = vec![-1.0 / h; m - 1];
        for i in 0..m {
            let bonds = if i == 0 { 1.0 } else { 2.0 };
            let tau = self.grid.node(i);
            let v = (tau + zeta) * (tau + zeta);
            let w = if i == 0 { 0.5 } else { 1.0 };
            diag[i] = bonds / h + w * v * h;
        }
        // off is constant; keep the explicit vector for clarity.
        off.iter_mut().for_each(|_| {});
        let mass: Vec<f64> = (0..m).map(|i| if i == 0 { 0.5 * h } else { h }).collect();
        (SymTridiag { diag, off }, mass)
    }

    /// Lowest eigenvalue `μ(ζ)`.
    pub fn mu(&self, zeta: f64) -> Result<f64, ModelError> {
        self.check_wall(zeta)?;
        let (k, mass) = self.assemble(zeta);
        let t = SymTridiag::from_generalized(&k, &mass);
        let (lambda, _) = t.ground_pair(1e-12)?;
        Ok(lambda)
    }

    /// Normalized, sign-fixed-positive ground state of `h(ζ)`.
    pub fn ground_state(&self, zeta: f64) -> Result<GroundMode, ModelError> {
        self.check_wall(zeta)?;
        let (k, mass) = self.assemble(zeta);
        let t = SymTridiag::from_generalized(&k, &mass);
        let (lambda, v) = t.ground_pair(1e-12)?;
        let n = self.grid.points();
        let mut samples = vec![0.0; n];
        for i in 0..n - 1 {
            samples[i] = v[i] / mass[i].sqrt();
        }
        // Sign: the ground state has no node, so fix by its largest component.
        let (imax, _) = samples
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .unwrap();
        if samples[imax] < 0.0 {
            samples.iter_mut().for_each(|x| *x = -*x);
        }
        let norm = self.grid.norm(&samples);
        samples.iter_mut().for_each(|x| *x /= norm);
        Ok(GroundMode {
            zeta,
            eigenvalue: lambda,
            samples,
            grid: self.grid,
        })
    }

    /// Minimize `μ(ζ)` over the bracket `[−2, 0]`: golden section to
    /// width `tol`, then one parabolic refinement. Returns `(ξ₀, Θ₀)`.
    pub fn minimize_band(&self, tol: f64) -> Result<(f64, f64), ModelError> {
        let (mut a, mut b) = (-2.0, 0.0);
        let fa = self.mu(a)?;
        let fm = self.mu(-1.0)?;
        let fb = self.mu(b)?;
        if !(fm < fa && fm < fb) {
            return Err(ModelError::BracketFailure(a, b));
        }
        let tol = tol.max(1e-10);
        let inv_phi = 0.618_033_988_749_894_9_f64;
        let mut x1 = b - inv_phi * (b - a);
        let mut x2 = a + inv_phi * (b - a);
        let mut f1 = self.mu(x1)?;
        let mut f2 = self.mu(x2)?;
        while b - a > tol {
            if f1 < f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = self.mu(x1)?;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = self.mu(x2)?;
            }
        }
        let x = 0.5 * (a + b);
        // Parabolic refinement on a stencil wide enough that curvature
        // dominates eigensolver noise.
        let s = 1e-4;
        let (fl, fc, fr) = (self.mu(x - s)?, self.mu(x)?, self.mu(x + s)?);
        let denom = fl - 2.0 * fc + fr;
        let xv = if denom > 0.0 {
            x - 0.5 * s * (fr - fl) / denom
        } else {
            x
        };
        if !(xv > -2.0 + tol && xv < -tol) {
            return Err(ModelError::BracketFailure(-2.0, 0.0));
        }
        Ok((xv, self.mu(xv)?))
    }

    /// Regularized resolvent: solves `(𝔥₀ − μ₀) w = φ − ⟨φ,u₀⟩u₀` with
    /// `⟨w, u₀⟩ = 0`, where `u₀` is the supplied ground mode and `μ₀` its
    /// eigenvalue. The singular tridiagonal system is deflated by a
    /// rank-two Woodbury correction and solved directly.
    pub fn regularized_resolvent(
        &self,
        phi: &[f64],
        u0: &GroundMode,
    ) -> Result<Vec<f64>, ModelError> {
        assert_eq!(phi.len(), self.grid.points());
        let n = self.grid.points();
        let m = n - 1;
        let (k, mass) = self.assemble(u0.zeta);
        let a = SymTridiag {
            diag: (0..m)
                .map(|i| k.diag[i] - u0.eigenvalue * mass[i])
                .collect(),
            off: k.off.clone(),
        };
        // Project the right-hand side onto the orthogonal complement.
        let coef = self.grid.inner(phi, &u0.samples);
        let mut p = vec![0.0; m];
        for i in 0..m {
            p[i] = phi[i] - coef * u0.samples[i];
        }
        let c: Vec<f64> = (0..m).map(|i| mass[i] * u0.samples[i]).collect();
        let r: Vec<f64> = (0..m).map(|i| mass[i] * p[i]).collect();
        let w = solve_deflated(&a, &c, &r, 1.0, 1.0).map_err(ModelError::Eigen)?;
        let mut out = vec![0.0; n];
        out[..m].copy_from_slice(&w);
        // One re-projection scrubs roundoff from the constraint.
        let drift = self.grid.inner(&out, &u0.samples);
        for i in 0..n {
            out[i] -= drift * u0.samples[i];
        }
        Ok(out)
    }

    /// Residual `‖(𝔥₀ − μ)u‖ / ‖u‖` of a grid function in the discrete
    /// operator sense (wall node excluded).
    pub fn eigen_residual(&self, u: &[f64], mu: f64, zeta: f64) -> f64 {
        let n = self.grid.points();
        let m = n - 1;
        let (k, mass) = self.assemble(zeta);
        let ku = k.apply(&u[..m]);
        let mut res = vec![0.0; n];
        for i in 0..m {
            res[i] = ku[i] / mass[i] - mu * u[i];
        }
        self.grid.norm(&res) / self.grid.norm(u)
    }

    /// `I₂ = ⟨u₀, (τ+ξ₀) R₀ (τ+ξ₀) u₀⟩`.
    pub fn i2(&self, u0: &GroundMode) -> Result<f64, ModelError> {
        let phi: Vec<f64> = self
            .grid
            .nodes()
            .zip(&u0.samples)
            .map(|(tau, &u)| (tau + u0.zeta) * u)
            .collect();
        let w = self.regularized_resolvent(&phi, u0)?;
        Ok(self.grid.inner(&phi, &w))
    }
}

/// `C₁ = u₀(0)²/3` from the converged ground mode at `ξ₀`.
pub fn c1_from_boundary(u0: &GroundMode) -> f64 {
    let b = u0.boundary_value();
    b * b / 3.0
}

/// Richardson extrapolation of a second-order quantity from values at
/// spacing `h` and `h/2`.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    fine + (fine - coarse) / 3.0
}
