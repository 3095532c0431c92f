//! The local third critical field: inversion of `λ₁(κH) = κ²`.
//!
//! For large `κ` the disc eigenvalue curve is strictly increasing, the
//! equation has a unique root `H_C3(κ)`, and the lower local field
//! (first `H` with `λ₁(κH) ≥ κ²`) coincides with the upper one (last
//! crossing). The solver brackets the root around the asymptotic seed
//! `κ/Θ₀ + C₁/Θ₀^(3/2)`, bisects on the sign, polishes with a secant
//! step, and separately scans an `H`-grid for the two local fields.

use crate::disc_spectrum::{DiscError, DiscSolver};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error(transparent)]
    Disc(#[from] DiscError),
    #[error("kappa = {kappa} too small: scan would need B < 25 (requires kappa >= {min:.1})")]
    KappaTooSmall { kappa: f64, min: f64 },
    #[error("bracket failure at kappa = {kappa}: lambda1(kappa*H) - kappa^2 does not change sign on [{lo:.4}, {hi:.4}]")]
    BracketFailure { kappa: f64, lo: f64, hi: f64 },
    #[error("no crossing of kappa^2 found in the scan range at kappa = {kappa}")]
    NoCrossing { kappa: f64 },
}

/// Root data for `λ₁(κH) = κ²`.
#[derive(Debug, Clone, Copy)]
pub struct CriticalFieldResult {
    pub kappa: f64,
    pub h: f64,
    /// `λ₁(κH) − κ²` at the reported root.
    pub residual: f64,
    /// Bracket the bisection started from.
    pub bracket: (f64, f64),
    /// First `H` with `λ₁(κH) ≥ κ²` (scan upward, bisection refined).
    pub lower_local: f64,
    /// Last crossing (scan downward from the high anchor).
    pub upper_local: f64,
}

impl CriticalFieldResult {
    /// `H − κ/Θ₀ − C₁/Θ₀^(3/2)`: the remainder of the two-term law.
    pub fn asymptotic_gap(&self, theta0: f64, c1: f64) -> f64 {
        self.h - self.kappa / theta0 - c1 / theta0.powf(1.5)
    }
}

/// Monotone-regime onset report.
#[derive(Debug, Clone, Copy)]
pub struct Kappa0Report {
    /// Smallest sampled `κ` from which on the local fields coincide and
    /// the eigenvalue curve is strictly increasing along `B = κH`.
    pub kappa0: f64,
    /// Onset of strict monotonicity of the sampled `λ₁` curve.
    pub b0: Option<f64>,
    /// Set when no sampled `κ` qualifies; `kappa0` then reports the
    /// sweep maximum.
    pub flagged: bool,
}

pub struct CriticalFieldSolver {
    disc: DiscSolver,
    /// H-grid half width and step of the local-field scan.
    scan_half_width: f64,
    scan_step: f64,
}

impl CriticalFieldSolver {
    pub fn new(disc: DiscSolver) -> Self {
        Self {
            disc,
            scan_half_width: 3.0,
            scan_step: 0.05,
        }
    }

    pub fn disc(&self) -> &DiscSolver {
        &self.disc
    }

    fn seed(&self, kappa: f64) -> f64 {
        let c = self.disc.constants();
        kappa / c.theta0 + c.c1 / c.theta0.powf(1.5)
    }

    fn check_kappa(&self, kappa: f64) -> Result<(), FieldError> {
        // The whole scan range must keep B = κH >= 25.
        let lo_h = self.seed(kappa) - self.scan_half_width;
        if kappa * lo_h < 25.0 {
            return Err(FieldError::KappaTooSmall {
                kappa,
                min: (25.0 * self.disc.constants().theta0).sqrt().max(5.0),
            });
        }
        Ok(())
    }

    fn excess(&self, kappa: f64, h: f64) -> Result<f64, FieldError> {
        Ok(self.disc.lambda1(kappa * h)?.lambda1 - kappa * kappa)
    }

    /// Solve `λ₁(κH) = κ²` to residual `1e−6·κ²`.
    pub fn hc3_local(&self, kappa: f64) -> Result<CriticalFieldResult, FieldError> {
        self.check_kappa(kappa)?;
        let tol = 1e-6 * kappa * kappa;
        let seed = self.seed(kappa);
        let bracket = (seed - 2.0, seed + 2.0);
        let (mut lo, mut hi) = bracket;
        let (glo, ghi) = (self.excess(kappa, lo)?, self.excess(kappa, hi)?);
        if !(glo < 0.0 && ghi > 0.0) {
            return Err(FieldError::BracketFailure {
                kappa,
                lo,
                hi,
            });
        }
        let (mut h_best, mut g_best) = (lo, glo);
        let (mut g_lo, mut g_hi) = (glo, ghi);
        for _ in 0..120 {
            let mid = 0.5 * (lo + hi);
            let gm = self.excess(kappa, mid)?;
            if gm.abs() < g_best.abs() {
                h_best = mid;
                g_best = gm;
            }
            if g_best.abs() <= 0.25 * tol {
                break;
            }
            if gm > 0.0 {
                hi = mid;
                g_hi = gm;
            } else {
                lo = mid;
                g_lo = gm;
            }
            if hi - lo < 1e-13 * seed {
                break;
            }
        }
        // Secant polish across the final bracket.
        if g_best.abs() > 0.0 && g_hi != g_lo {
            let h_sec = lo - g_lo * (hi - lo) / (g_hi - g_lo);
            if h_sec.is_finite() && h_sec > lo && h_sec < hi {
                let g_sec = self.excess(kappa, h_sec)?;
                if g_sec.abs() < g_best.abs() {
                    h_best = h_sec;
                    g_best = g_sec;
                }
            }
        }
        if g_best.abs() > tol {
            return Err(FieldError::BracketFailure {
                kappa,
                lo,
                hi,
            });
        }
        let (lower_local, upper_local) = self.local_fields(kappa)?;
        Ok(CriticalFieldResult {
            kappa,
            h: h_best,
            residual: g_best,
            bracket,
            lower_local,
            upper_local,
        })
    }

    /// Lower and upper local fields by a coarse scan plus bisection
    /// refinement of the outermost crossings.
    pub fn local_fields(&self, kappa: f64) -> Result<(f64, f64), FieldError> {
        self.check_kappa(kappa)?;
        let seed = self.seed(kappa);
        let n = (2.0 * self.scan_half_width / self.scan_step).round() as usize;
        let hs: Vec<f64> = (0..=n)
            .map(|i| seed - self.scan_half_width + i as f64 * self.scan_step)
            .collect();
        let gs: Result<Vec<f64>, FieldError> =
            hs.iter().map(|&h| self.excess(kappa, h)).collect();
        let gs = gs?;
        if gs[0] >= 0.0 || gs[n] < 0.0 {
            return Err(FieldError::NoCrossing { kappa });
        }
        // First nonnegative from below.
        let i_lo = gs.iter().position(|&g| g >= 0.0).unwrap();
        // Last negative from above.
        let i_hi = gs.iter().rposition(|&g| g < 0.0).unwrap();
        let lower = self.refine_crossing(kappa, hs[i_lo - 1], hs[i_lo])?;
        let upper = self.refine_crossing(kappa, hs[i_hi], hs[i_hi + 1])?;
        Ok((lower, upper))
    }

    fn refine_crossing(&self, kappa: f64, mut lo: f64, mut hi: f64) -> Result<f64, FieldError> {
        for _ in 0..60 {
            if hi - lo <= 1e-10 * hi.abs().max(1.0) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.excess(kappa, mid)? >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Detect the monotone-regime onset over a sampled `κ` sweep.
    pub fn detect_kappa0(&self, kappas: &[f64]) -> Result<Kappa0Report, FieldError> {
        assert!(!kappas.is_empty() && kappas.windows(2).all(|w| w[1] > w[0]));
        let fields: Result<Vec<(f64, f64)>, FieldError> =
            kappas.iter().map(|&k| self.local_fields(k)).collect();
        let fields = fields?;
        let coincide: Vec<bool> = fields
            .iter()
            .map(|&(lo, up)| (up - lo).abs() <= 1e-6 * up.abs().max(1.0))
            .collect();
        // Strict monotonicity onset of the eigenvalue curve along the
        // relevant field strengths.
        let b_min = kappas[0] * (fields[0].0 - 0.5);
        let b_max = kappas[kappas.len() - 1] * (fields[kappas.len() - 1].1 + 0.5);
        let bs: Vec<f64> = (0..=160)
            .map(|i| b_min + (b_max - b_min) * i as f64 / 160.0)
            .collect();
        let b0 = self.disc.detect_b0(&bs)?;
        let qualifies = |i: usize| -> bool {
            coincide[i..].iter().all(|&c| c)
                && b0.is_some_and(|b| kappas[i] * fields[i].0 >= b)
        };
        for i in 0..kappas.len() {
            if qualifies(i) {
                return Ok(Kappa0Report {
                    kappa0: kappas[i],
                    b0,
                    flagged: false,
                });
            }
        }
        Ok(Kappa0Report {
            kappa0: kappas[kappas.len() - 1],
            b0,
            flagged: true,
        })
    }
}
