//! Formal large-`B` expansion of the weighted boundary operator.
//!
//! In the stretched boundary variable the operator develops as
//! `𝔥(δ,B) = 𝔥₀ + B^(−1/2)𝔥₁ + B^(−1)𝔥₂ + O(B^(−3/2))` with
//!
//! ```text
//! 𝔥₀ = −d²/dτ² + (τ+ξ₀)²
//! 𝔥₁ = d/dτ + 2(τ+ξ₀)(δ − τ²/2) + 2τ(τ+ξ₀)²
//! 𝔥₂ = τ d/dτ + (δ − τ²/2)² + 4τ(τ+ξ₀)(δ − τ²/2) + 3τ²(τ+ξ₀)²
//! ```
//!
//! (the `𝔥₁` tail term carries the square of `(τ+ξ₀)`: it is the first
//! correction of `(1−τ/√B)^(−2)(τ+ξ₀)²`, and only with it does the
//! first-order eigenvalue shift come out as `−C₁`).
//!
//! The module computes the shifts `λ₁ = ⟨u₀,𝔥₁u₀⟩` and
//! `λ₂(δ) = ⟨u₀,𝔥₂u₀⟩ + ⟨u₀,(𝔥₁−λ₁)u₁⟩`, completes the square
//! `λ₂ = a₂((δ−δ₀)² + C₀)`, and assembles the two-corrector trial state
//! whose residual against `Θ₀ + λ₁B^(−1/2) + λ₂B^(−1)` is `O(B^(−3/2))`.

use crate::grid::HalfLineGrid;
use crate::model_operator::{
    c1_from_boundary, richardson, DeGennesConstants, GroundMode, ModelError, ModelOperator,
    QuadraticCoeffs,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PerturbationError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("degenerate leading coefficient |a2| = {0:.3e} in the quadratic fit")]
    DegenerateQuadratic(f64),
    #[error("lambda2 fit needs three distinct delta values")]
    CoincidentNodes,
}

/// First- and second-order correctors `u₁, u₂` at a fixed `δ`; both lie
/// in the range of the regularized resolvent, hence orthogonal to `u₀`.
#[derive(Debug, Clone)]
pub struct CorrectionPair {
    pub delta: f64,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
}

/// Apply `𝔥₁(δ)` to a grid function.
pub fn apply_h1(delta: f64, v: &[f64], grid: &HalfLineGrid, xi0: f64) -> Vec<f64> {
    let dv = grid.derivative(v);
    grid.nodes()
        .enumerate()
        .map(|(i, tau)| {
            let p = tau + xi0;
            dv[i] + (2.0 * p * (delta - 0.5 * tau * tau) + 2.0 * tau * p * p) * v[i]
        })
        .collect()
}

/// Apply `𝔥₂(δ)` to a grid function.
pub fn apply_h2(delta: f64, v: &[f64], grid: &HalfLineGrid, xi0: f64) -> Vec<f64> {
    let dv = grid.derivative(v);
    grid.nodes()
        .enumerate()
        .map(|(i, tau)| {
            let p = tau + xi0;
            let q = delta - 0.5 * tau * tau;
            tau * dv[i] + (q * q + 4.0 * tau * p * q + 3.0 * tau * tau * p * p) * v[i]
        })
        .collect()
}

/// `λ₁(δ) = ⟨u₀, 𝔥₁(δ) u₀⟩`; equals `−C₁` independently of `δ`.
pub fn lambda1(delta: f64, op: &ModelOperator, u0: &GroundMode) -> f64 {
    let h1u = apply_h1(delta, &u0.samples, &op.grid(), u0.zeta);
    op.grid().inner(&u0.samples, &h1u)
}

/// First corrector `u₁ = −R₀ (𝔥₁ − λ₁) u₀`.
pub fn first_corrector(
    delta: f64,
    op: &ModelOperator,
    u0: &GroundMode,
) -> Result<Vec<f64>, PerturbationError> {
    let l1 = lambda1(delta, op, u0);
    let mut rhs = apply_h1(delta, &u0.samples, &op.grid(), u0.zeta);
    for (r, &u) in rhs.iter_mut().zip(&u0.samples) {
        *r -= l1 * u;
    }
    let mut w = op.regularized_resolvent(&rhs, u0)?;
    w.iter_mut().for_each(|x| *x = -*x);
    Ok(w)
}

/// Second-order shift `λ₂(δ) = λ₂,₁ + λ₂,₂`, an exact quadratic in `δ`.
pub fn lambda2(
    delta: f64,
    op: &ModelOperator,
    u0: &GroundMode,
) -> Result<f64, PerturbationError> {
    let grid = op.grid();
    let h2u = apply_h2(delta, &u0.samples, &grid, u0.zeta);
    let l21 = grid.inner(&u0.samples, &h2u);
    let l1 = lambda1(delta, op, u0);
    let u1 = first_corrector(delta, op, u0)?;
    let mut h1u1 = apply_h1(delta, &u1, &grid, u0.zeta);
    for (r, &w) in h1u1.iter_mut().zip(&u1) {
        *r -= l1 * w;
    }
    let l22 = grid.inner(&u0.samples, &h1u1);
    Ok(l21 + l22)
}

/// Correctors `u₁` and `u₂ = −R₀{(𝔥₁−λ₁)u₁ + (𝔥₂−λ₂)u₀}` at a fixed `δ`.
pub fn correction_pair(
    delta: f64,
    op: &ModelOperator,
    u0: &GroundMode,
) -> Result<CorrectionPair, PerturbationError> {
    let grid = op.grid();
    let l1 = lambda1(delta, op, u0);
    let l2 = lambda2(delta, op, u0)?;
    let u1 = first_corrector(delta, op, u0)?;
    let mut rhs = apply_h1(delta, &u1, &grid, u0.zeta);
    let h2u0 = apply_h2(delta, &u0.samples, &grid, u0.zeta);
    for i in 0..rhs.len() {
        rhs[i] += -l1 * u1[i] + h2u0[i] - l2 * u0.samples[i];
    }
    let mut u2 = op.regularized_resolvent(&rhs, u0)?;
    u2.iter_mut().for_each(|x| *x = -*x);
    Ok(CorrectionPair { delta, u1, u2 })
}

/// Complete the square from three evaluations `(δ_i, λ₂(δ_i))`:
/// `λ₂ = a₂((δ−δ₀)² + C₀)`. Returns `(δ₀, C₀, coefficients)`.
pub fn fit_delta0_c0(
    evals: &[(f64, f64); 3],
) -> Result<(f64, f64, QuadraticCoeffs), PerturbationError> {
    let [(x0, f0), (x1, f1), (x2, f2)] = *evals;
    if x0 == x1 || x1 == x2 || x0 == x2 {
        return Err(PerturbationError::CoincidentNodes);
    }
    // Newton divided differences for the exact interpolating quadratic.
    let d01 = (f1 - f0) / (x1 - x0);
    let d12 = (f2 - f1) / (x2 - x1);
    let a2 = (d12 - d01) / (x2 - x0);
    let a1 = d01 - a2 * (x0 + x1);
    let a0 = f0 - x0 * (a1 + a2 * x0);
    if a2.abs() < 1e-8 {
        return Err(PerturbationError::DegenerateQuadratic(a2.abs()));
    }
    let delta0 = -a1 / (2.0 * a2);
    let c0 = a0 / a2 - delta0 * delta0;
    Ok((delta0, c0, QuadraticCoeffs { a2, a1, a0 }))
}

/// Assemble the full constants record. Every scalar is Richardson
/// extrapolated from the requested grid and its half-spacing refinement,
/// which recovers the continuum identities (`Θ₀ = ξ₀²` to ~1e−10) that a
/// single grid only meets at O(spacing²).
pub fn compute_constants(grid: HalfLineGrid) -> Result<DeGennesConstants, PerturbationError> {
    let coarse = ModelOperator::new(grid);
    let fine = ModelOperator::new(grid.refined());

    let mut per_grid = Vec::with_capacity(2);
    for op in [&coarse, &fine] {
        let (xi, _) = op.minimize_band(1e-9)?;
        let u0 = op.ground_state(xi)?;
        let c1 = c1_from_boundary(&u0);
        let i2 = op.i2(&u0)?;
        let evals = [
            (-1.0, lambda2(-1.0, op, &u0)?),
            (0.0, lambda2(0.0, op, &u0)?),
            (1.0, lambda2(1.0, op, &u0)?),
        ];
        let (_, _, quad) = fit_delta0_c0(&evals)?;
        per_grid.push((xi, u0.eigenvalue, c1, i2, quad));
    }
    let (xc, tc, cc, ic, qc) = per_grid[0];
    let (xf, tf, cf, iff, qf) = per_grid[1];
    let lambda2 = QuadraticCoeffs {
        a2: richardson(qc.a2, qf.a2),
        a1: richardson(qc.a1, qf.a1),
        a0: richardson(qc.a0, qf.a0),
    };
    let delta0 = -lambda2.a1 / (2.0 * lambda2.a2);
    let c0 = lambda2.a0 / lambda2.a2 - delta0 * delta0;
    Ok(DeGennesConstants {
        xi0: richardson(xc, xf),
        theta0: richardson(tc, tf),
        c1: richardson(cc, cf),
        i2: richardson(ic, iff),
        delta0,
        c0,
        lambda2,
        grid,
    })
}

/// Choice of the smooth cutoff entering the trial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffPolicy {
    /// `χ(τ B^(−1/4))` with `χ ≡ 1` on `|t| ≤ 1/8` and support in
    /// `[−1/4, 1/4]`. The right choice asymptotically, but at desk-scale
    /// `B` its transition sits inside the bulk of `u₀`.
    QuarterPower,
    /// `χ ≡ 1` up to `√B/2 − width`, decaying to 0 at the Dirichlet wall
    /// over a band of fixed `width`. Keeps the cutoff error below the
    /// expansion residual for moderate `B`.
    WallBand { width: f64 },
}

impl CutoffPolicy {
    pub fn eval(&self, tau: f64, b: f64) -> f64 {
        match *self {
            CutoffPolicy::QuarterPower => {
                let t = tau * b.powf(-0.25);
                smoothstep01((0.25 - t) / 0.125)
            }
            CutoffPolicy::WallBand { width } => {
                let wall = 0.5 * b.sqrt();
                smoothstep01((wall - tau) / width)
            }
        }
    }
}

impl Default for CutoffPolicy {
    fn default() -> Self {
        CutoffPolicy::WallBand { width: 1.0 }
    }
}

/// C^∞ step: 0 for `x ≤ 0`, 1 for `x ≥ 1`, built from `exp(−1/x)`.
fn smoothstep01(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let g = (-1.0 / x).exp();
        let gc = (-1.0 / (1.0 - x)).exp();
        g / (g + gc)
    }
}

/// Cut-off trial state `ψ = χ_B(u₀ + B^(−1/2)u₁ + B^(−1)u₂)` sampled on
/// the weighted interval `[0, √B/2]`.
#[derive(Debug, Clone)]
pub struct TrialState {
    pub delta: f64,
    pub b: f64,
    /// Uniform grid spacing on `[0, √B/2]`.
    pub spacing: f64,
    pub samples: Vec<f64>,
    /// `Θ₀ + λ₁ B^(−1/2) + λ₂ B^(−1)` with the grid-consistent `Θ₀`.
    pub predicted_eigenvalue: f64,
    pub xi0: f64,
}

impl TrialState {
    fn weight(&self, tau: f64) -> f64 {
        1.0 - tau / self.b.sqrt()
    }

    /// Weighted L²((0,√B/2); (1−τ/√B)dτ) norm of the samples.
    pub fn weighted_norm(&self) -> f64 {
        weighted_norm(&self.samples, self.spacing, self.b)
    }

    /// `‖(𝔥(δ,B) − predicted) ψ‖` in the weighted norm, with the full
    /// (non-expanded) operator applied by conservative finite differences.
    pub fn residual(&self) -> f64 {
        let n = self.samples.len();
        let h = self.spacing;
        let eps = 1.0 / self.b.sqrt();
        let mut res = vec![0.0; n];
        for i in 0..n {
            let tau = i as f64 * h;
            let w = self.weight(tau);
            let wp = self.weight(tau + 0.5 * h);
            let wm = self.weight(tau - 0.5 * h);
            let psi = self.samples[i];
            let right = if i + 1 < n { self.samples[i + 1] } else { 0.0 };
            // Ghost reflection implements the zero-flux condition at τ=0.
            let left = if i > 0 { self.samples[i - 1] } else { right };
            let kinetic = -(wp * (right - psi) - wm * (psi - left)) / (h * h * w);
            let p = tau + self.xi0;
            let a = p + eps * (self.delta - 0.5 * tau * tau);
            res[i] = kinetic + (a * a / (w * w) - self.predicted_eigenvalue) * psi;
        }
        weighted_norm(&res, h, self.b)
    }
}

fn weighted_norm(f: &[f64], h: f64, b: f64) -> f64 {
    let n = f.len();
    let sqrt_b = b.sqrt();
    let mut acc = 0.0;
    for (i, &x) in f.iter().enumerate() {
        let tau = i as f64 * h;
        let w = 1.0 - tau / sqrt_b;
        let tz = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
        acc += tz * w * x * x;
    }
    (acc * h).sqrt()
}

fn resample(grid: &HalfLineGrid, f: &[f64], tau: f64) -> f64 {
    if tau >= grid.length() {
        return 0.0;
    }
    let h = grid.spacing();
    let x = tau / h;
    let i = (x.floor() as usize).min(grid.points() - 2);
    let frac = x - i as f64;
    f[i] * (1.0 - frac) + f[i + 1] * frac
}

/// Build the trial state of the expansion at `(δ, B)`.
pub fn build_trial_state(
    delta: f64,
    b: f64,
    op: &ModelOperator,
    u0: &GroundMode,
    cutoff: CutoffPolicy,
) -> Result<TrialState, PerturbationError> {
    assert!(b >= 16.0, "trial state needs B >= 16");
    assert!(delta.abs() <= 10.0, "delta restricted to a bounded set");
    let pair = correction_pair(delta, op, u0)?;
    let l1 = lambda1(delta, op, u0);
    let l2 = lambda2(delta, op, u0)?;
    let eps = 1.0 / b.sqrt();

    let end = 0.5 * b.sqrt();
    let target_h = op.grid().spacing();
    let n = (end / target_h).round() as usize + 1;
    let h = end / (n - 1) as f64;

    let grid = op.grid();
    let mut samples = vec![0.0; n];
    for (i, s) in samples.iter_mut().enumerate() {
        let tau = i as f64 * h;
        let core = resample(&grid, &u0.samples, tau)
            + eps * resample(&grid, &pair.u1, tau)
            + eps * eps * resample(&grid, &pair.u2, tau);
        *s = cutoff.eval(tau, b) * core;
    }
    samples[n - 1] = 0.0;
    Ok(TrialState {
        delta,
        b,
        spacing: h,
        samples,
        predicted_eigenvalue: u0.eigenvalue + l1 * eps + l2 * eps * eps,
        xi0: u0.zeta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    struct Fixture {
        op: ModelOperator,
        u0: GroundMode,
        theta0: f64,
        c1: f64,
        i2: f64,
    }

    fn fixture() -> &'static Fixture {
        static FIX: OnceLock<Fixture> = OnceLock::new();
        FIX.get_or_init(|| {
            let op = ModelOperator::new(HalfLineGrid::default_grid());
            let (xi0, theta0) = op.minimize_band(1e-9).unwrap();
            let u0 = op.ground_state(xi0).unwrap();
            let c1 = c1_from_boundary(&u0);
            let i2 = op.i2(&u0).unwrap();
            Fixture {
                op,
                u0,
                theta0,
                c1,
                i2,
            }
        })
    }

    #[test]
    fn h1_expectation_is_minus_c1_for_any_delta() {
        let f = fixture();
        for delta in [-2.0, -1.0, 0.0, 2.0, 3.0] {
            let val = lambda1(delta, &f.op, &f.u0);
            assert!(
                (val + f.c1).abs() < 1e-4,
                "lambda1({delta}) = {val}, -C1 = {}",
                -f.c1
            );
        }
    }

    #[test]
    fn h1_is_linear() {
        let f = fixture();
        let grid = f.op.grid();
        let v: Vec<f64> = grid.nodes().map(|t| (-(t - 1.0) * (t - 1.0)).exp()).collect();
        let w: Vec<f64> = grid.nodes().map(|t| t * (-t * t / 3.0).exp()).collect();
        let a = 1.7;
        let combo: Vec<f64> = v.iter().zip(&w).map(|(x, y)| a * x + y).collect();
        let lhs = apply_h1(0.5, &combo, &grid, f.u0.zeta);
        let hv = apply_h1(0.5, &v, &grid, f.u0.zeta);
        let hw = apply_h1(0.5, &w, &grid, f.u0.zeta);
        for i in 0..lhs.len() {
            assert!((lhs[i] - (a * hv[i] + hw[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn h1_delta_dependence_is_affine() {
        let f = fixture();
        let grid = f.op.grid();
        let v = &f.u0.samples;
        let delta = 1.3;
        let d1 = apply_h1(delta, v, &grid, f.u0.zeta);
        let d0 = apply_h1(0.0, v, &grid, f.u0.zeta);
        for (i, tau) in grid.nodes().enumerate() {
            let expected = 2.0 * delta * (tau + f.u0.zeta) * v[i];
            assert!((d1[i] - d0[i] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn h2_delta_dependence_is_quadratic_with_unit_leading_term() {
        let f = fixture();
        let grid = f.op.grid();
        let v = &f.u0.samples;
        let (dm, d0, dp) = (
            apply_h2(-1.0, v, &grid, f.u0.zeta),
            apply_h2(0.0, v, &grid, f.u0.zeta),
            apply_h2(1.0, v, &grid, f.u0.zeta),
        );
        // Second difference in δ equals 2v pointwise.
        for i in 0..v.len() {
            assert!((dp[i] - 2.0 * d0[i] + dm[i] - 2.0 * v[i]).abs() < 1e-11);
        }
        // Expectation is quadratic with leading coefficient 1.
        let e = |w: &[f64]| grid.inner(&f.u0.samples, w);
        let lead = (e(&dp) - 2.0 * e(&d0) + e(&dm)) / 2.0;
        assert!((lead - 1.0).abs() < 1e-10);
    }

    #[test]
    fn h2_matches_termwise_assembly_at_zero_delta() {
        let f = fixture();
        let grid = f.op.grid();
        let v = &f.u0.samples;
        let full = apply_h2(0.0, v, &grid, f.u0.zeta);
        let dv = grid.derivative(v);
        for (i, tau) in grid.nodes().enumerate() {
            let p = tau + f.u0.zeta;
            let q = -0.5 * tau * tau;
            let termwise = tau * dv[i]
                + q * q * v[i]
                + 4.0 * tau * p * q * v[i]
                + 3.0 * tau * tau * p * p * v[i];
            assert!((full[i] - termwise).abs() < 1e-10);
        }
    }

    #[test]
    fn lambda2_leading_coefficient_identity() {
        let f = fixture();
        let l = |d: f64| lambda2(d, &f.op, &f.u0).unwrap();
        let lead = (l(1.0) - 2.0 * l(0.0) + l(-1.0)) / 2.0;
        let expected = 1.0 - 4.0 * f.i2;
        assert!(
            (lead - expected).abs() < 1e-10,
            "lead {lead} vs 1-4I2 {expected}"
        );
        let printed = 3.0 * f.c1 * f.theta0.sqrt();
        assert!((lead - printed).abs() < 1e-4, "lead {lead} vs 3C1√Θ0 {printed}");
        assert!((printed - 0.585).abs() < 2e-3);
    }

    #[test]
    fn lambda2_is_an_exact_quadratic() {
        let f = fixture();
        let evals = [
            (-1.0, lambda2(-1.0, &f.op, &f.u0).unwrap()),
            (0.0, lambda2(0.0, &f.op, &f.u0).unwrap()),
            (1.0, lambda2(1.0, &f.op, &f.u0).unwrap()),
        ];
        let (d0, c0, quad) = fit_delta0_c0(&evals).unwrap();
        for delta in [-2.5, -0.7, 0.3, 1.9, 3.4] {
            let direct = lambda2(delta, &f.op, &f.u0).unwrap();
            let square = quad.a2 * ((delta - d0) * (delta - d0) + c0);
            assert!(
                (direct - square).abs() < 1e-8,
                "delta {delta}: {direct} vs {square}"
            );
        }
        // Second δ-difference is constant across base points.
        let second = |base: f64| {
            lambda2(base + 1.0, &f.op, &f.u0).unwrap()
                - 2.0 * lambda2(base, &f.op, &f.u0).unwrap()
                + lambda2(base - 1.0, &f.op, &f.u0).unwrap()
        };
        assert!((second(0.0) - second(1.7)).abs() < 1e-8);
    }

    #[test]
    fn fit_is_invariant_under_node_choice() {
        let f = fixture();
        let ev = |d: f64| lambda2(d, &f.op, &f.u0).unwrap();
        let (d0a, c0a, _) =
            fit_delta0_c0(&[(-1.0, ev(-1.0)), (0.0, ev(0.0)), (1.0, ev(1.0))]).unwrap();
        let (d0b, c0b, _) =
            fit_delta0_c0(&[(0.5, ev(0.5)), (1.7, ev(1.7)), (3.1, ev(3.1))]).unwrap();
        assert!((d0a - d0b).abs() < 1e-7);
        assert!((c0a - c0b).abs() < 1e-7);
        // Vertex evaluation reconstructs a2·C0.
        let (d0v, c0v, quad) =
            fit_delta0_c0(&[(-1.0, ev(-1.0)), (0.0, ev(0.0)), (1.0, ev(1.0))]).unwrap();
        assert!((ev(d0v) - quad.a2 * c0v).abs() < 1e-8);
    }

    #[test]
    fn fit_rejects_degenerate_inputs() {
        assert!(matches!(
            fit_delta0_c0(&[(0.0, 1.0), (0.0, 1.0), (1.0, 2.0)]),
            Err(PerturbationError::CoincidentNodes)
        ));
        assert!(matches!(
            fit_delta0_c0(&[(-1.0, 1.0), (0.0, 2.0), (1.0, 3.0)]),
            Err(PerturbationError::DegenerateQuadratic(_))
        ));
    }

    #[test]
    fn second_order_correction_is_concave_with_coefficient_minus_4i2() {
        // λ₂,₂(δ) is a concave quadratic whose δ² coefficient is −4I₂ < 0.
        // (Pointwise nonpositivity does NOT hold: 𝔥₁ contains d/dτ and is
        // not symmetric on the half line, so λ₂,₂ is not a value of a
        // negative form; it is positive on a small window around δ ≈ −0.4.)
        let f = fixture();
        let grid = f.op.grid();
        let l22 = |delta: f64| {
            let l1 = lambda1(delta, &f.op, &f.u0);
            let u1 = first_corrector(delta, &f.op, &f.u0).unwrap();
            let mut h1u1 = apply_h1(delta, &u1, &grid, f.u0.zeta);
            for (r, &w) in h1u1.iter_mut().zip(&u1) {
                *r -= l1 * w;
            }
            grid.inner(&f.u0.samples, &h1u1)
        };
        assert!(f.i2 > 0.0);
        let lead = (l22(1.0) - 2.0 * l22(0.0) + l22(-1.0)) / 2.0;
        assert!((lead + 4.0 * f.i2).abs() < 1e-9, "lead {lead} vs {}", -4.0 * f.i2);
        for delta in [-3.0, -2.0, 1.0, 2.5, 4.0] {
            assert!(l22(delta) < 0.0, "lambda_2,2({delta}) = {}", l22(delta));
        }
    }

    #[test]
    fn delta0_c0_regression_anchors() {
        // Frozen from this module at base grids (20, 2001) and (20, 4001),
        // which agree to 2e-8; the half-spacing refinement is built in.
        let c = compute_constants(HalfLineGrid::default_grid()).unwrap();
        assert!((c.delta0 - 0.165_369_376).abs() < 1e-5, "delta0 = {}", c.delta0);
        assert!((c.c0 + 0.323_497_251).abs() < 1e-5, "C0 = {}", c.c0);
    }

    #[test]
    fn correctors_are_orthogonal_and_decaying() {
        let f = fixture();
        let grid = f.op.grid();
        let pair = correction_pair(0.7, &f.op, &f.u0).unwrap();
        assert!(grid.inner(&pair.u1, &f.u0.samples).abs() < 1e-10);
        assert!(grid.inner(&pair.u2, &f.u0.samples).abs() < 1e-10);
        let half = grid.points() / 2;
        assert!(pair.u1[half..].iter().all(|&x| x.abs() < 1e-6));
        assert!(pair.u2[half..].iter().all(|&x| x.abs() < 1e-6));
    }

    #[test]
    fn constants_record_is_consistent() {
        let c = compute_constants(HalfLineGrid::default_grid()).unwrap();
        assert!(c.theta0 > 0.5 && c.theta0 < 1.0);
        assert!((c.theta0 - c.xi0 * c.xi0).abs() <= 1e-6);
        assert!(c.c1 > 0.0);
        assert!((c.lambda2.a2 - 3.0 * c.c1 * c.theta0.sqrt()).abs() <= 1e-4);
        // Completed square reproduces (a1, a0).
        let a1 = -2.0 * c.lambda2.a2 * c.delta0;
        let a0 = c.lambda2.a2 * (c.delta0 * c.delta0 + c.c0);
        assert!((a1 - c.lambda2.a1).abs() < 1e-8);
        assert!((a0 - c.lambda2.a0).abs() < 1e-8);
        // 3·C1·|ξ0| < 1 and Θ0 − (3/2)·C1·|ξ0| > 0 (≈ 0.297).
        assert!(3.0 * c.c1 * c.xi0.abs() < 1.0);
        let margin = c.theta0 - 1.5 * c.c1 * c.xi0.abs();
        assert!(margin > 0.0 && (margin - 0.297).abs() < 2e-3);
    }

    #[test]
    fn trial_state_tracks_u0_at_huge_b() {
        let f = fixture();
        let trial = build_trial_state(0.3, 1e6, &f.op, &f.u0, CutoffPolicy::default()).unwrap();
        let grid = f.op.grid();
        let mut worst = 0.0f64;
        for (i, s) in trial.samples.iter().enumerate() {
            let tau = i as f64 * trial.spacing;
            if tau > 5.0 {
                break;
            }
            worst = worst.max((s - resample(&grid, &f.u0.samples, tau)).abs());
        }
        assert!(worst < 1e-2, "max deviation from u0: {worst:.3e}");
    }

    #[test]
    fn trial_state_norm_is_one_up_to_sqrt_b() {
        let f = fixture();
        for b in [100.0, 400.0, 1600.0] {
            let trial = build_trial_state(0.0, b, &f.op, &f.u0, CutoffPolicy::default()).unwrap();
            let norm = trial.weighted_norm();
            assert!((norm - 1.0).abs() <= 5.0 / b.sqrt(), "B={b}: norm {norm}");
        }
    }

    #[test]
    fn trial_state_residual_is_order_b_to_minus_three_halves() {
        let f = fixture();
        let mut scaled = Vec::new();
        for b in [100.0f64, 400.0, 1600.0] {
            let trial = build_trial_state(0.0, b, &f.op, &f.u0, CutoffPolicy::default()).unwrap();
            scaled.push(trial.residual() * b.powf(1.5));
        }
        let max = scaled.iter().cloned().fold(0.0, f64::max);
        let min = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min < 3.0, "fitted constants not stable: {scaled:?}");
    }
}
