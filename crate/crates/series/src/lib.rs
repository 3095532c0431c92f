//! Truncated formal Puiseux series on the `1/8` exponent lattice and the
//! recursive inversion of the critical-field equation.
//!
//! The eigenvalue expansion carries `B^(−j/8)` rungs while the field
//! expansion carries `κ^(−j/4)` rungs; a common exponent quantum of
//! `1/8` keeps composition closed. A [`PuiseuxSeries`] stores real
//! coefficients indexed by exponents `e/8` for integer `e`, hard
//! truncated above `truncation_order`.
//!
//! [`invert_critical_field`] substitutes the ansatz
//!
//! ```text
//! H(κ) = (κ/Θ₀)(1 + C₁k_max/(√Θ₀ κ) − C₁√(3k₂/2) κ^(−3/2)
//!         + κ^(−7/4) Σ_j η_j κ^(−j/4))
//! ```
//!
//! into the eigenvalue series, expands every fractional power
//! binomially, and cancels the coefficient of `κ^((1−j)/4)` to determine
//! `η_j`; the dependence is strictly triangular, so each order is solved
//! by one series evaluation.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // !(x > 0) guards reject NaN

pub mod puiseux;

pub use puiseux::{PuiseuxSeries, SeriesError};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InversionError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("invalid expansion inputs: {0}")]
    InvalidInputs(String),
}

/// Spectral and geometric inputs of the field expansion.
///
/// `zeta` holds the tail coefficients `ζ_j` of the eigenvalue series;
/// entries beyond the supplied length are taken as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionInputs {
    pub theta0: f64,
    pub c1: f64,
    pub k_max: f64,
    pub k2: f64,
    pub zeta: Vec<f64>,
}

impl ExpansionInputs {
    pub fn new(
        theta0: f64,
        c1: f64,
        k_max: f64,
        k2: f64,
        zeta: Vec<f64>,
    ) -> Result<Self, InversionError> {
        if !(theta0 > 0.5 && theta0 < 1.0) {
            return Err(InversionError::InvalidInputs(format!(
                "theta0 = {theta0} outside (0.5, 1)"
            )));
        }
        if !(c1 > 0.0) {
            return Err(InversionError::InvalidInputs(format!("c1 = {c1} <= 0")));
        }
        if !(k2 >= 0.0) {
            return Err(InversionError::InvalidInputs(format!("k2 = {k2} < 0")));
        }
        Ok(Self {
            theta0,
            c1,
            k_max,
            k2,
            zeta,
        })
    }

    /// `C₁ k_max / √Θ₀`: the `κ^(−1)` coefficient of the bracket.
    fn a8(&self) -> f64 {
        self.c1 * self.k_max / self.theta0.sqrt()
    }

    /// `C₁ √(3k₂/2)`: magnitude of the `κ^(−3/2)` bracket coefficient.
    fn c12(&self) -> f64 {
        self.c1 * (1.5 * self.k2).sqrt()
    }

    fn zeta_at(&self, j: usize) -> f64 {
        self.zeta.get(j).copied().unwrap_or(0.0)
    }

    /// The eigenvalue series `λ₁(B)` as a Puiseux series in `B^(−1/8)`
    /// (so `B` itself sits at exponent `−8/8`):
    /// `Θ₀B − C₁k_max B^(1/2) + C₁Θ₀^(1/4)√(3k₂/2) B^(1/4) + B^(1/8)Σζ_j B^(−j/8)`.
    pub fn lambda1_series(&self, tail_len: usize) -> PuiseuxSeries {
        let trunc = tail_len as i32 - 1;
        let mut terms = vec![
            (-8, self.theta0),
            (-4, -self.c1 * self.k_max),
            (-2, self.theta0.powf(0.25) * self.c12()),
        ];
        for j in 0..tail_len {
            terms.push((j as i32 - 1, self.zeta_at(j)));
        }
        PuiseuxSeries::from_terms(&terms, trunc)
    }

    /// The semiclassical series `μ⁽¹⁾(h)` in `h^(1/8)`; related to
    /// [`Self::lambda1_series`] by the exact exponent shift
    /// `λ₁(B) = B² μ⁽¹⁾(1/B)`.
    pub fn mu1_series(&self, tail_len: usize) -> PuiseuxSeries {
        let trunc = 15 + tail_len as i32;
        let mut terms = vec![
            (8, self.theta0),
            (12, -self.c1 * self.k_max),
            (14, self.theta0.powf(0.25) * self.c12()),
        ];
        for j in 0..tail_len {
            terms.push((15 + j as i32, self.zeta_at(j)));
        }
        PuiseuxSeries::from_terms(&terms, trunc)
    }
}

/// Result of the triangular inversion: the `η_j` ladder and the full
/// field series `H(κ)` (a Puiseux series in `κ^(−1/8)`, leading term at
/// exponent `κ^(+1)`).
#[derive(Debug, Clone)]
pub struct CriticalFieldSeries {
    pub eta: Vec<f64>,
    pub h: PuiseuxSeries,
    pub order: usize,
}

/// Bracket series `s(x) = H·Θ₀/κ − 1` for given `η` coefficients, on the
/// lattice of `x = κ^(−1/8)`, truncated at exponent `(14 + 2M)/8`.
fn bracket_series(inputs: &ExpansionInputs, eta: &[f64], order: usize) -> PuiseuxSeries {
    let trunc = 14 + 2 * order as i32;
    let mut terms = vec![(8, inputs.a8()), (12, -inputs.c12())];
    for (j, &e) in eta.iter().enumerate() {
        terms.push((14 + 2 * j as i32, e));
    }
    PuiseuxSeries::from_terms(&terms, trunc)
}

/// `λ₁(κH)/κ² − 1` as a series in `x = κ^(−1/8)` for the ansatz bracket
/// `1 + s`; identically zero exactly when the `η_j` solve the inversion.
fn excess_series(
    inputs: &ExpansionInputs,
    s: &PuiseuxSeries,
    order: usize,
) -> Result<PuiseuxSeries, SeriesError> {
    let trunc = 14 + 2 * order as i32;
    let mut f = s.clone();
    // −a₈ x⁸ (1+s)^(1/2)
    let half = s.fractional_power(0.5)?;
    f = f.add(&half.monomial_mul(-inputs.a8(), 8).truncate_to(trunc))?;
    // +c₁₂ x¹² (1+s)^(1/4)
    let quarter = s.fractional_power(0.25)?;
    f = f.add(&quarter.monomial_mul(inputs.c12(), 12).truncate_to(trunc))?;
    // +Σ ζ_j Θ₀^((j−1)/8) x^(14+2j) (1+s)^((1−j)/8)
    for j in 0.. {
        let shift = 14 + 2 * j as i32;
        if shift > trunc {
            break;
        }
        let z = inputs.zeta_at(j);
        if z != 0.0 {
            let alpha = (1.0 - j as f64) / 8.0;
            let pw = s.fractional_power(alpha)?;
            let coef = z * inputs.theta0.powf((j as f64 - 1.0) / 8.0);
            f = f.add(&pw.monomial_mul(coef, shift).truncate_to(trunc))?;
        }
    }
    Ok(f)
}

/// Solve for `η_0..η_M` by matching the `κ^((1−j)/4)` coefficients to
/// zero, then assemble `H(κ) = (κ/Θ₀)(1 + s)`.
pub fn invert_critical_field(
    inputs: &ExpansionInputs,
    order: usize,
) -> Result<CriticalFieldSeries, InversionError> {
    let mut eta = Vec::with_capacity(order + 1);
    for j in 0..=order {
        let s = bracket_series(inputs, &eta, order);
        let f = excess_series(inputs, &s, order)?;
        // η_j enters the excess linearly with unit coefficient at
        // x^(14+2j); everything else there is already determined.
        eta.push(-f.coeff(14 + 2 * j as i32));
    }
    let s = bracket_series(inputs, &eta, order);
    let one_plus_s = s.add_constant(1.0);
    let h = one_plus_s.monomial_mul(1.0 / inputs.theta0, -8);
    Ok(CriticalFieldSeries {
        eta,
        h,
        order,
    })
}

/// Re-substitution residual `λ₁(κH)/κ² − 1` for solved coefficients;
/// every retained coefficient should vanish to rounding.
pub fn resubstitution_residual(
    inputs: &ExpansionInputs,
    series: &CriticalFieldSeries,
) -> Result<PuiseuxSeries, InversionError> {
    let s = bracket_series(inputs, &series.eta, series.order);
    Ok(excess_series(inputs, &s, series.order)?)
}

/// The translated Bernoff–Sternberg three-term law
/// `κ/Θ₀ + C₁k_max/Θ₀^(3/2) − √(3/2)√k₂ C₁/Θ₀ · κ^(−1/2)`,
/// truncated after the `κ^(−1/2)` term.
///
/// Coefficients are assembled through the same factorizations as the
/// inversion (`x·(1/Θ₀)` rather than `x/Θ₀`), so the agreement with
/// [`invert_critical_field`] through `κ^(−1/2)` is exact to the bit.
pub fn bernoff_sternberg(inputs: &ExpansionInputs) -> PuiseuxSeries {
    let inv_theta = 1.0 / inputs.theta0;
    PuiseuxSeries::from_terms(
        &[
            (-8, 1.0 * inv_theta),
            (0, inputs.a8() * inv_theta),
            (4, -inputs.c12() * inv_theta),
        ],
        4,
    )
}
