//! Tubular boundary coordinates `(s, t)` and the gauge normal form.
//!
//! For a field with `curl ≈ 1` near `∂Ω` there is a gauge in which the
//! tangential potential becomes
//! `Ā₁(s,t) = γ₀ − t + t²k(s)/2 + t²b(s,t)`, `Ā₂ ≡ 0`, with the
//! circulation constant `γ₀ = (∫_Ω curl)/|∂Ω|` and
//! `‖b‖_∞ ≤ C·‖curl−1‖_{C¹}` on the half collar. For the unit constant
//! field the remainder vanishes identically: `Ā₁ = γ₀ − t + t²k(s)/2`.
//!
//! The weighted quadratic form in these coordinates carries the factors
//! `(1−tk)^(−1)` (tangential), `(1−tk)` (normal) against the measure
//! `(1−tk) ds dt`; [`collar_weights`] is the single source of truth for
//! them, shared with the disc boundary solver.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaugeError {
    #[error("perimeter must be positive, got {0}")]
    NonPositivePerimeter(f64),
    #[error("collar width must be positive, got {0}")]
    NonPositiveCollar(f64),
    #[error("diffeomorphism condition fails: 1 - t0*k = {0:.3e} <= 0")]
    CollarTooWide(f64),
    #[error("point (s, t={0}) outside the collar [0, {1}]")]
    CollarViolation(f64, f64),
    #[error("t = {0} outside the half collar [0, {1}]")]
    OutsideHalfCollar(f64, f64),
}

/// Curvature of the boundary as a function of arc length.
#[derive(Debug, Clone)]
pub enum CurvatureProfile {
    Constant(f64),
    /// Uniform periodic samples over one perimeter, evaluated by
    /// trigonometric interpolation.
    Samples(Vec<f64>),
}

/// Arc-length parametrized boundary with a tubular neighborhood of
/// width `t0`.
#[derive(Debug, Clone)]
pub struct BoundaryParametrization {
    perimeter: f64,
    curvature: CurvatureProfile,
    t0: f64,
}

impl BoundaryParametrization {
    pub fn new(
        perimeter: f64,
        curvature: CurvatureProfile,
        t0: f64,
    ) -> Result<Self, GaugeError> {
        if !(perimeter > 0.0) {
            return Err(GaugeError::NonPositivePerimeter(perimeter));
        }
        if !(t0 > 0.0) {
            return Err(GaugeError::NonPositiveCollar(t0));
        }
        let p = Self {
            perimeter,
            curvature,
            t0,
        };
        let min_jac = (0..512)
            .map(|i| 1.0 - t0 * p.curvature(perimeter * i as f64 / 512.0))
            .fold(f64::INFINITY, f64::min);
        if min_jac <= 0.0 {
            return Err(GaugeError::CollarTooWide(min_jac));
        }
        Ok(p)
    }

    /// The unit disc: `k ≡ 1`, perimeter `2π`, collar width `t0`.
    pub fn unit_disc(t0: f64) -> Result<Self, GaugeError> {
        Self::new(
            2.0 * std::f64::consts::PI,
            CurvatureProfile::Constant(1.0),
            t0,
        )
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Curvature at arc length `s` (periodic).
    pub fn curvature(&self, s: f64) -> f64 {
        match &self.curvature {
            CurvatureProfile::Constant(k) => *k,
            CurvatureProfile::Samples(v) => {
                let p = self.perimeter;
                let s = s - p * (s / p).floor();
                trig_interpolate(v, s / p)
            }
        }
    }

    /// Enclosed area, reconstructed from the curvature alone: the
    /// turning angle `θ(s) = ∫k` determines `γ(s)` up to rigid motion,
    /// and the area is `½∮ γ×γ' ds`.
    pub fn area(&self) -> f64 {
        if let CurvatureProfile::Constant(k) = self.curvature {
            // Circle of radius 1/k.
            return std::f64::consts::PI / (k * k);
        }
        let n = 8192usize;
        let h = self.perimeter / n as f64;
        let mut theta = 0.0;
        let (mut x, mut y) = (0.0, 0.0);
        let mut area2 = 0.0;
        for i in 0..n {
            let theta_mid = theta + 0.5 * h * self.curvature(i as f64 * h);
            let (cm, sm) = (theta_mid.cos(), theta_mid.sin());
            area2 += x * sm - y * cm;
            x += h * cm;
            y += h * sm;
            theta += h * self.curvature((i as f64 + 0.5) * h);
        }
        (area2 * h / 2.0).abs()
    }
}

/// Trigonometric interpolation of uniform periodic samples at the
/// fractional position `x ∈ [0,1)` of the period.
fn trig_interpolate(samples: &[f64], x: f64) -> f64 {
    let n = samples.len();
    let nf = n as f64;
    let mut acc = 0.0;
    for (j, &f) in samples.iter().enumerate() {
        let u = x - j as f64 / nf;
        let arg = std::f64::consts::PI * u;
        let s = arg.sin();
        let kernel = if s.abs() < 1e-14 {
            1.0
        } else if n % 2 == 1 {
            (nf * arg).sin() / (nf * s)
        } else {
            (nf * arg).sin() * arg.cos() / (nf * s)
        };
        acc += f * kernel;
    }
    acc
}

/// Magnetic field data on the collar.
pub enum TransverseField<'a> {
    /// `curl ≡ c` everywhere.
    Constant(f64),
    /// `curl` as a function of the collar coordinates `(s, t)`.
    Profile(&'a dyn Fn(f64, f64) -> f64),
}

/// Circulation constant `γ₀ = (∫_Ω curl dx)/|∂Ω|` for a constant field.
pub fn gamma0_constant(p: &BoundaryParametrization, curl: f64) -> f64 {
    curl * p.area() / p.perimeter()
}

/// `γ₀` for a field sampled over the unit disc in polar coordinates,
/// by midpoint quadrature of `∫ curl(r,θ) r dr dθ / 2π`.
pub fn gamma0_disc_samples(curl: impl Fn(f64, f64) -> f64, nr: usize, ntheta: usize) -> f64 {
    let hr = 1.0 / nr as f64;
    let ht = 2.0 * std::f64::consts::PI / ntheta as f64;
    let mut acc = 0.0;
    for i in 0..nr {
        let r = (i as f64 + 0.5) * hr;
        for j in 0..ntheta {
            let th = (j as f64 + 0.5) * ht;
            acc += curl(r, th) * r;
        }
    }
    acc * hr * ht / (2.0 * std::f64::consts::PI)
}

/// The gauge normal form of a field on the collar of a parametrized
/// boundary.
pub struct GaugeNormalForm<'a> {
    pub parametrization: &'a BoundaryParametrization,
    pub field: TransverseField<'a>,
    pub gamma0: f64,
}

impl<'a> GaugeNormalForm<'a> {
    /// Normal form for the unit constant field on the given boundary.
    pub fn unit_field(p: &'a BoundaryParametrization) -> Self {
        Self {
            parametrization: p,
            field: TransverseField::Constant(1.0),
            gamma0: gamma0_constant(p, 1.0),
        }
    }

    /// Tangential potential `Ā₁(s,t)`: exact polynomial for constant
    /// fields, numerically integrated `∂_t Ā₁ = −(1−t'k)·curl` otherwise.
    pub fn a1(&self, s: f64, t: f64) -> Result<f64, GaugeError> {
        let p = self.parametrization;
        if !(0.0..=p.t0()).contains(&t) {
            return Err(GaugeError::CollarViolation(t, p.t0()));
        }
        let k = p.curvature(s);
        match self.field {
            TransverseField::Constant(c) => Ok(self.gamma0 - c * (t - 0.5 * t * t * k)),
            TransverseField::Profile(curl) => {
                let n = ((t / p.t0() * 256.0).ceil() as usize).max(8) * 2;
                let h = t / n as f64;
                let f = |tp: f64| (1.0 - tp * k) * curl(s, tp);
                let mut acc = f(0.0) + f(t);
                for i in 1..n {
                    let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                    acc += w * f(i as f64 * h);
                }
                Ok(self.gamma0 - acc * h / 3.0)
            }
        }
    }

    /// Remainder `b(s,t) = (Ā₁ − γ₀ + t − t²k/2)/t²`, with the `t → 0`
    /// limit taken by a one-sided quadratic fit.
    pub fn b(&self, s: f64, t: f64) -> Result<f64, GaugeError> {
        let p = self.parametrization;
        let half = 0.5 * p.t0();
        if !(0.0..=half).contains(&t) {
            return Err(GaugeError::OutsideHalfCollar(t, half));
        }
        let t_floor = 1e-3 * p.t0();
        if t >= t_floor {
            return self.b_raw(s, t);
        }
        let (t1, t2, t3) = (t_floor, 2.0 * t_floor, 3.0 * t_floor);
        let (b1, b2, b3) = (self.b_raw(s, t1)?, self.b_raw(s, t2)?, self.b_raw(s, t3)?);
        let l1 = (t - t2) * (t - t3) / ((t1 - t2) * (t1 - t3));
        let l2 = (t - t1) * (t - t3) / ((t2 - t1) * (t2 - t3));
        let l3 = (t - t1) * (t - t2) / ((t3 - t1) * (t3 - t2));
        Ok(b1 * l1 + b2 * l2 + b3 * l3)
    }

    fn b_raw(&self, s: f64, t: f64) -> Result<f64, GaugeError> {
        let k = self.parametrization.curvature(s);
        if let TransverseField::Constant(c) = self.field {
            // Algebraically (1−c)(t − t²k/2)/t²; dividing out t avoids
            // catastrophic cancellation as t → 0.
            let d = 1.0 - c;
            return Ok(if d == 0.0 { 0.0 } else { d * (1.0 / t - 0.5 * k) });
        }
        let a1 = self.a1(s, t)?;
        Ok((a1 - self.gamma0 + t - 0.5 * t * t * k) / (t * t))
    }

    /// `sup |b|` over an `ns × nt` sample grid of the half collar.
    pub fn b_bound(&self, ns: usize, nt: usize) -> Result<f64, GaugeError> {
        let p = self.parametrization;
        let mut sup: f64 = 0.0;
        for i in 0..ns {
            let s = p.perimeter() * i as f64 / ns as f64;
            for j in 0..=nt {
                let t = 0.5 * p.t0() * j as f64 / nt as f64;
                sup = sup.max(self.b(s, t)?.abs());
            }
        }
        Ok(sup)
    }
}

/// The three collar weights of the quadratic form at local curvature `k`
/// and depth `t`: `(tangential, normal, measure) = ((1−tk)⁻¹, 1−tk, 1−tk)`.
pub fn collar_weights(k: f64, t: f64) -> (f64, f64, f64) {
    let jac = 1.0 - t * k;
    debug_assert!(jac > 0.0, "collar weight nonpositive: 1 - t*k = {jac}");
    (1.0 / jac, jac, jac)
}

/// Collar weights with validation against a parametrization.
pub fn quadratic_form_weights(
    p: &BoundaryParametrization,
    s: f64,
    t: f64,
) -> Result<(f64, f64, f64), GaugeError> {
    if !(0.0..=p.t0()).contains(&t) {
        return Err(GaugeError::CollarViolation(t, p.t0()));
    }
    let jac = 1.0 - t * p.curvature(s);
    if jac <= 0.0 {
        return Err(GaugeError::CollarTooWide(jac));
    }
    Ok((1.0 / jac, jac, jac))
}
