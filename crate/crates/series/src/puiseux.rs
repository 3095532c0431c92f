//! Dense truncated series on the exponent lattice `(1/8)·Z`.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("truncation mismatch: {0} vs {1} (lattice units)")]
    TruncationMismatch(i32, i32),
    #[error("fractional power needs strictly positive valuation, got {0} lattice units")]
    NonPositiveValuation(i32),
}

/// Truncated formal Puiseux series `Σ c_e x^(e/8)` with hard truncation:
/// arithmetic never produces exponents above `truncation_order` (in
/// lattice units of `1/8`). Exponents may be negative. The zero series
/// has an empty coefficient vector; otherwise the leading coefficient is
/// nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct PuiseuxSeries {
    /// Exponent of `coeffs[0]` in units of 1/8.
    lowest: i32,
    coeffs: Vec<f64>,
    /// Largest retained exponent (inclusive), units of 1/8.
    trunc: i32,
}

/// The exponent quantum shared by the whole lattice.
pub const STEP: f64 = 0.125;

impl PuiseuxSeries {
    pub fn zero(trunc: i32) -> Self {
        Self {
            lowest: 0,
            coeffs: Vec::new(),
            trunc,
        }
    }

    pub fn constant(c: f64, trunc: i32) -> Self {
        Self::monomial(c, 0, trunc)
    }

    pub fn monomial(c: f64, exponent: i32, trunc: i32) -> Self {
        Self::from_terms(&[(exponent, c)], trunc)
    }

    /// Build from `(exponent, coefficient)` pairs; terms above the
    /// truncation are dropped, zeros normalized away.
    pub fn from_terms(terms: &[(i32, f64)], trunc: i32) -> Self {
        let mut live: Vec<(i32, f64)> = terms
            .iter()
            .copied()
            .filter(|&(e, c)| e <= trunc && c != 0.0)
            .collect();
        if live.is_empty() {
            return Self::zero(trunc);
        }
        live.sort_by_key(|&(e, _)| e);
        let lowest = live[0].0;
        let highest = live[live.len() - 1].0;
        let mut coeffs = vec![0.0; (highest - lowest + 1) as usize];
        for (e, c) in live {
            coeffs[(e - lowest) as usize] += c;
        }
        Self {
            lowest,
            coeffs,
            trunc,
        }
        .normalized()
    }

    fn normalized(mut self) -> Self {
        while self.coeffs.first() == Some(&0.0) {
            self.coeffs.remove(0);
            self.lowest += 1;
        }
        while self.coeffs.last() == Some(&0.0) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.lowest = 0;
        }
        self
    }

    pub fn truncation_order(&self) -> i32 {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exponent (lattice units) of the leading nonzero term.
    pub fn valuation(&self) -> Option<i32> {
        if self.is_zero() {
            None
        } else {
            Some(self.lowest)
        }
    }

    /// Coefficient at exponent `e` (lattice units).
    pub fn coeff(&self, e: i32) -> f64 {
        if self.is_zero() || e < self.lowest {
            return 0.0;
        }
        self.coeffs
            .get((e - self.lowest) as usize)
            .copied()
            .unwrap_or(0.0)
    }

    /// `(exponent, coefficient)` pairs of the nonzero terms, ascending.
    pub fn terms(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(move |(i, &c)| (self.lowest + i as i32, c))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, &c| a.max(c.abs()))
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        if self.trunc != other.trunc {
            return Err(SeriesError::TruncationMismatch(self.trunc, other.trunc));
        }
        let mut terms: Vec<(i32, f64)> = self.terms().collect();
        terms.extend(other.terms());
        Ok(Self::from_terms(&terms, self.trunc))
    }

    pub fn add_constant(&self, c: f64) -> Self {
        let mut terms: Vec<(i32, f64)> = self.terms().collect();
        terms.push((0, c));
        Self::from_terms(&terms, self.trunc)
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            lowest: self.lowest,
            coeffs: self.coeffs.iter().map(|&c| a * c).collect(),
            trunc: self.trunc,
        }
        .normalized()
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    /// Cauchy product, hard truncated.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        if self.trunc != other.trunc {
            return Err(SeriesError::TruncationMismatch(self.trunc, other.trunc));
        }
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.trunc));
        }
        let lowest = self.lowest + other.lowest;
        let len = (self.trunc - lowest + 1).max(0) as usize;
        let mut coeffs = vec![0.0; len];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                let e = self.lowest + i as i32 + other.lowest + j as i32;
                if e > self.trunc {
                    break;
                }
                coeffs[(e - lowest) as usize] += a * b;
            }
        }
        Ok(Self {
            lowest,
            coeffs,
            trunc: self.trunc,
        }
        .normalized())
    }

    /// Multiply by the monomial `c·x^(e/8)`: exponents and truncation
    /// both shift, so no information is lost.
    pub fn monomial_mul(&self, c: f64, e: i32) -> Self {
        Self {
            lowest: self.lowest + e,
            coeffs: self.coeffs.iter().map(|&x| c * x).collect(),
            trunc: self.trunc + e,
        }
        .normalized()
    }

    /// Drop terms above a smaller truncation.
    pub fn truncate_to(&self, trunc: i32) -> Self {
        let terms: Vec<(i32, f64)> = self.terms().filter(|&(e, _)| e <= trunc).collect();
        Self::from_terms(&terms, trunc)
    }

    /// Binomial series `(1 + self)^alpha = Σ_k C(α,k)·self^k`, exact to
    /// the truncation; requires strictly positive valuation.
    pub fn fractional_power(&self, alpha: f64) -> Result<Self, SeriesError> {
        if self.is_zero() {
            return Ok(Self::constant(1.0, self.trunc));
        }
        let v = self.lowest;
        if v <= 0 {
            return Err(SeriesError::NonPositiveValuation(v));
        }
        let k_max = (self.trunc / v).max(0);
        let mut acc = Self::constant(1.0, self.trunc);
        let mut power = Self::constant(1.0, self.trunc);
        let mut binom = 1.0;
        for k in 1..=k_max {
            power = power.mul(self)?;
            binom *= (alpha - (k - 1) as f64) / k as f64;
            if binom == 0.0 {
                break;
            }
            acc = acc.add(&power.scale(binom))?;
        }
        Ok(acc)
    }
}
