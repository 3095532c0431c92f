//! Symmetric tridiagonal eigensolving and tridiagonal linear solves.
//!
//! Everything here is deterministic: the lowest eigenvalue comes from
//! Sturm-sequence bisection inside a Gershgorin bracket, the eigenvector
//! from inverse iteration with a pivoted tridiagonal factorization, and
//! the final eigenvalue from one Rayleigh-quotient evaluation (which
//! removes the bisection tolerance from downstream minimizations).

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),
    #[error("linear solve failed: {0}")]
    SolveFailed(String),
}

/// Symmetric tridiagonal matrix: `diag` of length `n`, `off` of length `n−1`.
#[derive(Debug, Clone)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Build the standard symmetric problem `T = M^(−1/2) K M^(−1/2)` from a
    /// generalized pencil `K v = λ M v` with diagonal positive mass `M`.
    pub fn from_generalized(k: &SymTridiag, mass: &[f64]) -> Self {
        let n = k.n();
        debug_assert_eq!(mass.len(), n);
        let inv_sqrt: Vec<f64> = mass.iter().map(|&m| 1.0 / m.sqrt()).collect();
        let diag = (0..n).map(|i| k.diag[i] * inv_sqrt[i] * inv_sqrt[i]).collect();
        let off = (0..n - 1)
            .map(|i| k.off[i] * inv_sqrt[i] * inv_sqrt[i + 1])
            .collect();
        Self { diag, off }
    }

    /// Number of eigenvalues strictly below `x` (Sturm count via the
    /// shifted LDLᵀ recurrence).
    pub fn count_below(&self, x: f64) -> usize {
        let n = self.n();
        let tiny = f64::MIN_POSITIVE;
        let mut count = 0;
        let mut d = self.diag[0] - x;
        if d < 0.0 {
            count += 1;
        }
        for i in 1..n {
            if d == 0.0 {
                d = tiny;
            }
            d = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / d;
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.n();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Lowest eigenvalue by bisection, to absolute tolerance `tol`.
    pub fn lowest_eigenvalue(&self, tol: f64) -> Result<f64, LinalgError> {
        let (mut lo, mut hi) = self.gershgorin();
        if self.count_below(lo) != 0 || self.count_below(hi + hi.abs() * 1e-12) == 0 {
            return Err(LinalgError::NoConvergence(
                "Gershgorin bracket does not isolate the spectrum".into(),
            ));
        }
        for _ in 0..200 {
            let floor = 4.0 * f64::EPSILON * lo.abs().max(hi.abs());
            if hi - lo <= tol.max(floor) {
                return Ok(0.5 * (lo + hi));
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Ok(mid);
            }
            if self.count_below(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(LinalgError::NoConvergence(format!(
            "bisection stalled at width {:.3e}",
            hi - lo
        )))
    }

    /// Matrix-vector product `T x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * x[i + 1];
            }
            y[i] = acc;
        }
        y
    }

    /// Ground pair `(λ, v)` with `‖v‖₂ = 1`: bisection for the bracket,
    /// inverse iteration for the vector, Rayleigh quotient for the value.
    pub fn ground_pair(&self, tol: f64) -> Result<(f64, Vec<f64>), LinalgError> {
        let n = self.n();
        let approx = self.lowest_eigenvalue(tol)?;
        // Shift slightly below so the factorization is safely nonsingular
        // and inverse iteration converges onto the lowest mode.
        let scale = self
            .diag
            .iter()
            .fold(0.0f64, |a, &d| a.max(d.abs()))
            .max(1.0);
        let shift = approx - scale * 1e-12 - tol;
        let factor = TridiagPlu::factor(&self.diag, &self.off, &self.off, shift)?;

        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i % 7) as f64) / 7.0)
            .collect();
        normalize(&mut v);
        let mut lambda = approx;
        for _ in 0..4 {
            let mut w = factor.solve(&v);
            normalize(&mut w);
            let tv = self.apply(&w);
            lambda = dot(&w, &tv);
            let res: f64 = tv
                .iter()
                .zip(&w)
                .map(|(t, x)| (t - lambda * x) * (t - lambda * x))
                .sum::<f64>()
                .sqrt();
            v = w;
            if res <= 1e-13 * scale {
                break;
            }
        }
        Ok((lambda, v))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    for x in v.iter_mut() {
        *x /= n;
    }
}

/// Pivoted LU factorization of a tridiagonal matrix shifted by `−σI`
/// (the `dgtsv` scheme: partial pivoting fills one second superdiagonal).
pub struct TridiagPlu {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper1: Vec<f64>,
    upper2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagPlu {
    pub fn factor(
        diag: &[f64],
        lower: &[f64],
        upper: &[f64],
        sigma: f64,
    ) -> Result<Self, LinalgError> {
        let n = diag.len();
        let mut d: Vec<f64> = diag.iter().map(|&x| x - sigma).collect();
        let mut u1: Vec<f64> = upper.to_vec();
        let mut u2 = vec![0.0; n.saturating_sub(2)];
        let mut l = vec![0.0; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];

        for i in 0..n - 1 {
            let a = d[i];
            let b = lower[i];
            if b.abs() > a.abs() {
                // Swap rows i and i+1.
                swapped[i] = true;
                let (r1c1, r1c2) = (b, d[i + 1]);
                let r1c3 = if i + 2 < n { u1[i + 1] } else { 0.0 };
                let (r0c1, r0c2) = (a, u1[i]);
                d[i] = r1c1;
                u1[i] = r1c2;
                if i + 2 < n {
                    u2[i] = r1c3;
                }
                let m = r0c1 / r1c1;
                l[i] = m;
                d[i + 1] = r0c2 - m * r1c2;
                if i + 2 < n {
                    u1[i + 1] = -m * r1c3;
                }
            } else {
                if a == 0.0 {
                    return Err(LinalgError::SolveFailed("zero pivot".into()));
                }
                let m = b / a;
                l[i] = m;
                d[i + 1] -= m * u1[i];
                if i + 2 < n {
                    u2[i] = 0.0;
                }
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = f64::MIN_POSITIVE * 2.0;
        }
        Ok(Self {
            lower: l,
            diag: d,
            upper1: u1,
            upper2: u2,
            swapped,
        })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let mut y = rhs.to_vec();
        for i in 0..n - 1 {
            if self.swapped[i] {
                y.swap(i, i + 1);
            }
            let m = self.lower[i];
            let yi = y[i];
            y[i + 1] -= m * yi;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = y[n - 1] / self.diag[n - 1];
        if n >= 2 {
            x[n - 2] = (y[n - 2] - self.upper1[n - 2] * x[n - 1]) / self.diag[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (y[i] - self.upper1[i] * x[i + 1] - self.upper2[i] * x[i + 2]) / self.diag[i];
        }
        x
    }
}

/// Solve the constrained singular system
/// `A w = r`, `cᵀ w = 0`, where `A` is symmetric tridiagonal with a
/// one-dimensional (near-)kernel spanned by `kernel`, `c ⊥`-constraint
/// vector, and `r ⊥ kernel` in the Euclidean sense (`cᵀ` is `kernelᵀ A`'s
/// missing direction).
///
/// Implemented as a Woodbury correction over the nonsingular base
/// `Ã = A + θ e₀e₀ᵀ` (valid because the kernel has nonzero first
/// component): the solution of `(A + σ ccᵀ) w = r` is the constrained
/// solution.
pub fn solve_deflated(
    a: &SymTridiag,
    c: &[f64],
    r: &[f64],
    theta: f64,
    sigma: f64,
) -> Result<Vec<f64>, LinalgError> {
    let n = a.n();
    let mut diag0 = a.diag.clone();
    diag0[0] += theta;
    let factor = TridiagPlu::factor(&diag0, &a.off, &a.off, 0.0)?;

    let y = factor.solve(r);
    let zc = factor.solve(c);
    let mut e0 = vec![0.0; n];
    e0[0] = 1.0;
    let ze = factor.solve(&e0);

    // 2×2 capacitance: D^(−1) + Uᵀ Z with U = [c, e₀], D = diag(σ, −θ).
    let m11 = 1.0 / sigma + dot(c, &zc);
    let m12 = dot(c, &ze);
    let m21 = dot(&e0, &zc);
    let m22 = -1.0 / theta + dot(&e0, &ze);
    let det = m11 * m22 - m12 * m21;
    if det == 0.0 || !det.is_finite() {
        return Err(LinalgError::SolveFailed("singular capacitance matrix".into()));
    }
    let b1 = dot(c, &y);
    let b2 = dot(&e0, &y);
    let s1 = (m22 * b1 - m12 * b2) / det;
    let s2 = (-m21 * b1 + m11 * b2) / det;

    let mut w = vec![0.0; n];
    for i in 0..n {
        w[i] = y[i] - zc[i] * s1 - ze[i] * s2;
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_dirichlet(n: usize) -> SymTridiag {
        // Eigenvalues of the discrete Dirichlet Laplacian on n points:
        // 4 sin²(kπ/(2(n+1))).
        SymTridiag {
            diag: vec![2.0; n],
            off: vec![-1.0; n - 1],
        }
    }

    #[test]
    fn sturm_count_matches_known_spectrum() {
        let t = laplacian_dirichlet(50);
        let eig = |k: usize| {
            let s = (k as f64 * std::f64::consts::PI / (2.0 * 51.0)).sin();
            4.0 * s * s
        };
        assert_eq!(t.count_below(eig(1) - 1e-9), 0);
        assert_eq!(t.count_below(eig(1) + 1e-9), 1);
        assert_eq!(t.count_below(eig(7) + 1e-9), 7);
        assert_eq!(t.count_below(5.0), 50);
    }

    #[test]
    fn lowest_eigenvalue_and_vector() {
        let n = 200;
        let t = laplacian_dirichlet(n);
        let exact = {
            let s = (std::f64::consts::PI / (2.0 * (n as f64 + 1.0))).sin();
            4.0 * s * s
        };
        let (lambda, v) = t.ground_pair(1e-12).unwrap();
        assert!((lambda - exact).abs() < 1e-12);
        // Residual small in the matrix norm scale.
        let tv = t.apply(&v);
        let res: f64 = tv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - lambda * b) * (a - lambda * b))
            .sum::<f64>()
            .sqrt();
        assert!(res < 1e-12);
    }

    #[test]
    fn plu_solves_random_tridiagonal() {
        let n = 64;
        let diag: Vec<f64> = (0..n).map(|i| 3.0 + ((i * 37) % 11) as f64 * 0.1).collect();
        let off: Vec<f64> = (0..n - 1).map(|i| -1.0 + ((i * 13) % 7) as f64 * 0.05).collect();
        let t = SymTridiag {
            diag: diag.clone(),
            off: off.clone(),
        };
        let x_true: Vec<f64> = (0..n).map(|i| ((i * 29) % 17) as f64 / 17.0 - 0.4).collect();
        let rhs = t.apply(&x_true);
        let f = TridiagPlu::factor(&diag, &off, &off, 0.0).unwrap();
        let x = f.solve(&rhs);
        let err: f64 = x
            .iter()
            .zip(&x_true)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-11, "max err {err:.3e}");
    }

    #[test]
    fn deflated_solve_respects_constraint() {
        // Singular A = Dirichlet Laplacian shifted by its lowest eigenvalue.
        let n = 120;
        let t = laplacian_dirichlet(n);
        let (l1, u) = t.ground_pair(1e-13).unwrap();
        let a = SymTridiag {
            diag: t.diag.iter().map(|d| d - l1).collect(),
            off: t.off.clone(),
        };
        // r ⊥ u: project a generic vector.
        let mut r: Vec<f64> = (0..n).map(|i| ((i * 7) % 13) as f64 / 13.0 - 0.5).collect();
        let ur: f64 = u.iter().zip(&r).map(|(a, b)| a * b).sum();
        for (ri, ui) in r.iter_mut().zip(&u) {
            *ri -= ur * ui;
        }
        let w = solve_deflated(&a, &u, &r, 1.0, 1.0).unwrap();
        let uw: f64 = u.iter().zip(&w).map(|(a, b)| a * b).sum();
        assert!(uw.abs() < 1e-9, "constraint violated: {uw:.3e}");
        let aw = a.apply(&w);
        let res: f64 = aw
            .iter()
            .zip(&r)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(res < 1e-9, "residual {res:.3e}");
    }
}
