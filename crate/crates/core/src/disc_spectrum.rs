//! The lowest magnetic Neumann eigenvalue on the unit disc.
//!
//! Two independent reductions are implemented and cross-checked:
//!
//! 1. **Exact angular reduction**: for the gauge `F = ½(−x₂, x₁)` the
//!    operator splits over angular momenta `m` into radial problems
//!    `−(1/r)(r f')' + (m/r − Br/2)² f` on `L²((0,1), r dr)` with a
//!    Neumann condition at `r = 1`. `λ₁(B)` is the minimum over an
//!    `m`-window centered on `B/2 + ξ₀√B + δ₀`.
//! 2. **Boundary-coordinate reduction**: the weighted half-line problem
//!    `e_{δ,B}` on `L²((0,√B/2); (1−τ/√B)dτ)` with Neumann at 0 and
//!    Dirichlet at `√B/2`; `B·inf_m e_{δ(m,B),B}` reproduces `λ₁(B)` up
//!    to tunneling and discretization.
//!
//! Radial eigenvalues are Richardson extrapolated from two cell counts;
//! the discretizations themselves are second order.

use crate::boundary_gauge::collar_weights;
use crate::linalg::{LinalgError, SymTridiag};
use crate::model_operator::DeGennesConstants;
use std::collections::HashMap;
use std::sync::RwLock;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiscError {
    #[error(transparent)]
    Eigen(#[from] LinalgError),
    #[error("boundary layer under-resolved: only {nodes} cells inside width B^(-1/2)")]
    UnderResolvedLayer { nodes: usize },
    #[error("m-window saturated at width {width} for B = {b}; minimum still on the edge")]
    WindowSaturated { b: f64, width: i64 },
    #[error("decay fit window holds only {points} samples")]
    InsufficientDynamicRange { points: usize },
}

/// Lowest radial mode at fixed angular momentum.
#[derive(Debug, Clone)]
pub struct RadialMode {
    pub m: i64,
    pub b: f64,
    pub eigenvalue: f64,
    /// Eigenfunction at the cell centers `r_j = (j+1/2)/cells`,
    /// normalized in `L²((0,1), r dr)`.
    pub samples: Vec<f64>,
    pub cells: usize,
}

impl RadialMode {
    pub fn cell_center(&self, j: usize) -> f64 {
        (j as f64 + 0.5) / self.cells as f64
    }

    /// Discrete Neumann residual at `r = 1` (one-sided derivative of the
    /// cell values).
    pub fn neumann_residual(&self) -> f64 {
        let n = self.cells;
        let h = 1.0 / n as f64;
        (3.0 * self.samples[n - 1] - 4.0 * self.samples[n - 2] + self.samples[n - 3]) / (2.0 * h)
    }

    /// Exact derivative of the discrete eigenvalue in `B`
    /// (first-order perturbation of the assembled pencil):
    /// `dE/dB = −∫(m − B r²/2) f² r dr`.
    pub fn eigenvalue_slope(&self) -> f64 {
        let h = 1.0 / self.cells as f64;
        let mut acc = 0.0;
        let mut norm = 0.0;
        for (j, &f) in self.samples.iter().enumerate() {
            let r = self.cell_center(j);
            acc += -(self.m as f64 - self.b * r * r / 2.0) * f * f * r * h;
            norm += f * f * r * h;
        }
        acc / norm
    }

    /// Fraction of the squared norm carried by `r < 1/2`.
    pub fn interior_mass_fraction(&self) -> f64 {
        let h = 1.0 / self.cells as f64;
        let mut inner = 0.0;
        let mut total = 0.0;
        for (j, &f) in self.samples.iter().enumerate() {
            let r = self.cell_center(j);
            let w = f * f * r * h;
            total += w;
            if r < 0.5 {
                inner += w;
            }
        }
        inner / total
    }
}

/// Cell-centered finite-volume pencil of the radial operator over the
/// active cell range; returns `(stiffness+potential, mass, start)`.
fn radial_pencil(m: i64, b: f64, cells: usize) -> (SymTridiag, Vec<f64>, usize) {
    let n = cells;
    let h = 1.0 / n as f64;
    let mf = m as f64;
    let start = active_start(m, b, cells);
    let len = n - start;
    let mut diag = vec![0.0; len];
    let mut off = vec![0.0; len - 1];
    for j in start..n - 1 {
        // Face between cells j and j+1 sits at r = (j+1)h; r_face/h = j+1.
        let w = (j + 1) as f64;
        off[j - start] = -w;
        diag[j - start] += w;
        diag[j + 1 - start] += w;
    }
    // No flux through r = 1 (Neumann) nor through r = 0 (zero face weight
    // at the axis; a Dirichlet cut deep inside the forbidden zone).
    let mut mass = vec![0.0; len];
    for j in start..n {
        let r = (j as f64 + 0.5) * h;
        let v = (mf / r - b * r / 2.0).powi(2);
        diag[j - start] += v * r * h;
        mass[j - start] = r * h;
    }
    (SymTridiag { diag, off }, mass, start)
}

/// First cell of the classically relevant region. Near the axis the
/// centrifugal potential reaches `(2m·cells)²`, which only bloats the
/// matrix norm (and with it the eigenvector noise floor) while the
/// eigenfunction is far below double precision there. Cells whose
/// potential exceeds the retention threshold are dropped from the left;
/// the cut moves the eigenvalue by less than roundoff.
fn active_start(m: i64, b: f64, cells: usize) -> usize {
    let h = 1.0 / cells as f64;
    let mf = m as f64;
    let cut = 4e4 * (1.0 + b.abs());
    let mut start = 0usize;
    while start + 64 < cells {
        let r = (start as f64 + 0.5) * h;
        if (mf / r - b * r / 2.0).powi(2) <= cut {
            break;
        }
        start += 1;
    }
    start
}

/// Same pencil in the semiclassical form `(−ih∇ − F)²`: potential
/// `(hm/r − r/2)²` and stiffness scaled by `h²`. Used to verify the
/// scaling identity `λ₁(B) = B² μ⁽¹⁾(1/B)`; the active region is chosen
/// by the equivalent large-field rule so the two pencils stay congruent.
fn radial_pencil_h_form(m: i64, h_param: f64, cells: usize) -> (SymTridiag, Vec<f64>) {
    let n = cells;
    let h = 1.0 / n as f64;
    let mf = m as f64;
    let start = active_start(m, 1.0 / h_param, cells);
    let len = n - start;
    let mut diag = vec![0.0; len];
    let mut off = vec![0.0; len - 1];
    for j in start..n - 1 {
        let w = (j + 1) as f64 * h_param * h_param;
        off[j - start] = -w;
        diag[j - start] += w;
        diag[j + 1 - start] += w;
    }
    let mut mass = vec![0.0; len];
    for j in start..n {
        let r = (j as f64 + 0.5) * h;
        let v = (h_param * mf / r - r / 2.0).powi(2);
        diag[j - start] += v * r * h;
        mass[j - start] = r * h;
    }
    (SymTridiag { diag, off }, mass)
}

fn bisection_tol(b: f64) -> f64 {
    1e-11 * b.abs().max(1.0)
}

/// Lowest eigenvalue at `(m, B)` on a single grid (no eigenvector).
pub fn radial_eigenvalue(m: i64, b: f64, cells: usize) -> Result<f64, DiscError> {
    let (k, mass, _) = radial_pencil(m, b, cells);
    let t = SymTridiag::from_generalized(&k, &mass);
    Ok(t.lowest_eigenvalue(bisection_tol(b))?)
}

/// Lowest radial mode with the eigenfunction, on a single grid.
pub fn radial_lowest(m: i64, b: f64, cells: usize) -> Result<RadialMode, DiscError> {
    check_layer_resolution(b, cells)?;
    let (k, mass, start) = radial_pencil(m, b, cells);
    let t = SymTridiag::from_generalized(&k, &mass);
    let (eigenvalue, v) = t.ground_pair(bisection_tol(b))?;
    let mut active: Vec<f64> = v
        .iter()
        .zip(&mass)
        .map(|(&x, &mm)| x / mm.sqrt())
        .collect();
    let norm2: f64 = active
        .iter()
        .zip(&mass)
        .map(|(&f, &mm)| f * f * mm)
        .sum();
    let scale = norm2.sqrt();
    // Sign convention: positive at the boundary, where the mass sits.
    let flip = if active[active.len() - 1] < 0.0 { -1.0 } else { 1.0 };
    active.iter_mut().for_each(|x| *x *= flip / scale);
    // Dropped axis cells carry an identically-zero eigenfunction.
    let mut samples = vec![0.0; start];
    samples.extend(active);
    Ok(RadialMode {
        m,
        b,
        eigenvalue,
        samples,
        cells,
    })
}

fn check_layer_resolution(b: f64, cells: usize) -> Result<(), DiscError> {
    if b > 0.0 {
        let in_layer = (cells as f64 / b.sqrt()).floor() as usize;
        if in_layer < 10 {
            return Err(DiscError::UnderResolvedLayer { nodes: in_layer });
        }
    }
    Ok(())
}

/// Richardson-extrapolated eigenvalue from `cells` and `cells/2`.
fn radial_eigenvalue_extrapolated(m: i64, b: f64, cells: usize) -> Result<f64, DiscError> {
    let fine = radial_eigenvalue(m, b, cells)?;
    let coarse = radial_eigenvalue(m, b, cells / 2)?;
    Ok(fine + (fine - coarse) / 3.0)
}

/// Radial grid sizing: enough cells that the `B^(−1/2)` boundary layer
/// holds a fixed number of them.
#[derive(Debug, Clone, Copy)]
pub struct RadialGridPolicy {
    pub min_cells: usize,
    pub cells_per_layer: f64,
}

impl Default for RadialGridPolicy {
    fn default() -> Self {
        Self {
            min_cells: 3000,
            cells_per_layer: 60.0,
        }
    }
}

impl RadialGridPolicy {
    pub fn cells_for(&self, b: f64) -> usize {
        let needed = (self.cells_per_layer * b.max(0.0).sqrt()).ceil() as usize;
        let n = needed.max(self.min_cells);
        n + n % 2
    }
}

/// `λ₁(B)` with the achieving mode and the detuning data.
#[derive(Debug, Clone, Copy)]
pub struct DiscEigenvalue {
    pub b: f64,
    pub m_star: i64,
    pub lambda1: f64,
    /// `δ(m*, B) = m* − B/2 − ξ₀√B`.
    pub delta_m: f64,
    /// `Δ_B = min over scanned m of |δ(m,B) − δ₀|`.
    pub delta_b: f64,
}

impl DiscEigenvalue {
    /// `λ₁(B) − [Θ₀B − C₁√B + 3C₁√Θ₀(Δ_B² + C₀)]`.
    pub fn expansion_residual(&self, c: &DeGennesConstants) -> f64 {
        self.lambda1 - self.expansion_prediction(c, true)
    }

    /// The two-term-plus-oscillation prediction; `with_oscillation`
    /// drops the `Δ_B²` term when false (the `C₀` offset stays).
    pub fn expansion_prediction(&self, c: &DeGennesConstants, with_oscillation: bool) -> f64 {
        let osc = if with_oscillation {
            self.delta_b * self.delta_b
        } else {
            0.0
        };
        c.theta0 * self.b - c.c1 * self.b.sqrt() + 3.0 * c.c1 * c.theta0.sqrt() * (osc + c.c0)
    }
}

/// Lowest eigenvalue of the weighted boundary problem `e_{δ,B}`.
#[derive(Debug, Clone, Copy)]
pub struct WeightedBoundaryProblem {
    pub delta: f64,
    pub b: f64,
    pub eigenvalue: f64,
}

/// One-sided derivative data of `λ₁` at `B`.
#[derive(Debug, Clone, Copy)]
pub struct RightDerivative {
    pub b: f64,
    pub step: f64,
    /// Difference quotient `(λ₁(B+step) − λ₁(B))/step`.
    pub quotient: f64,
    /// Mode minimizing at `B` (left branch) and at `B+step` (right branch).
    pub m_left: i64,
    pub m_right: i64,
    /// Exact discrete branch slopes at `B` (first-order perturbation).
    pub slope_left: f64,
    pub slope_right: f64,
    /// True when a mode switch happens inside the step.
    pub switched: bool,
}

impl RightDerivative {
    /// The right derivative is the slope of the branch that minimizes
    /// just to the right of `B`.
    pub fn right(&self) -> f64 {
        self.slope_right
    }
}

/// Normal decay diagnostics of the minimizing eigenfunction.
#[derive(Debug, Clone, Copy)]
pub struct DecayProfile {
    pub b: f64,
    /// Least-squares slope of `log|f|` against `√B(1−r)` over the
    /// window `|f| ∈ [1e−8, 1e−2]`.
    pub normal_slope: f64,
    pub fit_points: usize,
    pub interior_mass_fraction: f64,
}

/// Disc eigenvalue solver with a read-mostly `λ₁(B)` cache.
pub struct DiscSolver {
    constants: DeGennesConstants,
    pub policy: RadialGridPolicy,
    window: i64,
    max_widenings: u32,
    cache: RwLock<HashMap<u64, DiscEigenvalue>>,
}

impl DiscSolver {
    pub fn new(constants: DeGennesConstants) -> Self {
        Self {
            constants,
            policy: RadialGridPolicy::default(),
            window: 8,
            max_widenings: 3,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn with_policy(constants: DeGennesConstants, policy: RadialGridPolicy) -> Self {
        Self {
            policy,
            ..Self::new(constants)
        }
    }

    pub fn constants(&self) -> &DeGennesConstants {
        &self.constants
    }

    /// `δ(m, B) = m − B/2 − ξ₀√B`.
    pub fn delta_of(&self, m: i64, b: f64) -> f64 {
        m as f64 - b / 2.0 - self.constants.xi0 * b.sqrt()
    }

    fn window_center(&self, b: f64) -> i64 {
        (b / 2.0 + self.constants.xi0 * b.sqrt() + self.constants.delta0).round() as i64
    }

    /// `λ₁(B)` by scanning the `m`-window (cached, Richardson refined).
    pub fn lambda1(&self, b: f64) -> Result<DiscEigenvalue, DiscError> {
        assert!(b >= 25.0, "angular scan needs B >= 25");
        if let Some(hit) = self.cache.read().unwrap().get(&b.to_bits()) {
            return Ok(*hit);
        }
        let result = self.scan(b)?;
        self.cache.write().unwrap().insert(b.to_bits(), result);
        Ok(result)
    }

    fn scan(&self, b: f64) -> Result<DiscEigenvalue, DiscError> {
        let cells = self.policy.cells_for(b);
        check_layer_resolution(b, cells)?;
        let center = self.window_center(b);
        let mut width = self.window;
        for _ in 0..=self.max_widenings {
            let ms: Vec<i64> = (center - width..=center + width).collect();
            let mut best: Option<(i64, f64)> = None;
            for &m in &ms {
                let e = radial_eigenvalue_extrapolated(m, b, cells)?;
                if best.is_none_or(|(_, be)| e < be) {
                    best = Some((m, e));
                }
            }
            let (m_star, lambda1) = best.unwrap();
            if m_star == center - width || m_star == center + width {
                width += self.window;
                continue;
            }
            let delta_b = ms
                .iter()
                .map(|&m| (self.delta_of(m, b) - self.constants.delta0).abs())
                .fold(f64::INFINITY, f64::min);
            return Ok(DiscEigenvalue {
                b,
                m_star,
                lambda1,
                delta_m: self.delta_of(m_star, b),
                delta_b,
            });
        }
        Err(DiscError::WindowSaturated { b, width })
    }

    /// Full radial mode (with eigenfunction) of the minimizing `m` at `B`.
    pub fn minimizing_mode(&self, b: f64) -> Result<RadialMode, DiscError> {
        let d = self.lambda1(b)?;
        radial_lowest(d.m_star, b, self.policy.cells_for(b))
    }

    /// Weighted boundary problem `e_{δ,B}` via the collar weights.
    pub fn e_delta_b(&self, delta: f64, b: f64) -> Result<WeightedBoundaryProblem, DiscError> {
        assert!(b >= 25.0 && delta.abs() <= 60.0);
        let eigenvalue = self.weighted_lowest(b, |tau, sqrt_b| {
            let a = (tau + self.constants.xi0) + (delta - 0.5 * tau * tau) / sqrt_b;
            a * a
        })?;
        Ok(WeightedBoundaryProblem {
            delta,
            b,
            eigenvalue,
        })
    }

    /// Boundary eigenvalue with the potential built from a supplied
    /// tangential gauge profile `a1(t)`; `e = (1/B)·` ground energy of
    /// `(m − B·a1)²` in the weighted form.
    pub fn e_from_gauge(
        &self,
        m: i64,
        b: f64,
        a1: impl Fn(f64) -> f64,
    ) -> Result<f64, DiscError> {
        self.weighted_lowest(b, |tau, sqrt_b| {
            let a = m as f64 - b * a1(tau / sqrt_b);
            a * a / b
        })
    }

    /// Shared assembly of the weighted boundary pencil: Neumann at 0,
    /// Dirichlet at `√B/2`, collar weights applied symmetrically
    /// (`K v = e M v` with the measure as mass matrix).
    fn weighted_lowest(
        &self,
        b: f64,
        potential: impl Fn(f64, f64) -> f64,
    ) -> Result<f64, DiscError> {
        let sqrt_b = b.sqrt();
        let end = 0.5 * sqrt_b;
        let n = (end / 0.005).round() as usize + 1;
        let h = end / (n - 1) as f64;
        let m = n - 1; // Dirichlet wall eliminated
        let mut diag = vec![0.0; m];
        let mut off = vec![0.0; m - 1];
        // One pass over faces; the face toward the wall bonds to the
        // eliminated Dirichlet node.
        for i in 0..m {
            let face_r = collar_weights(1.0, ((i as f64 + 0.5) * h) / sqrt_b).1;
            diag[i] += face_r / h;
            if i + 1 < m {
                off[i] = -face_r / h;
                diag[i + 1] += face_r / h;
            }
        }
        let mut mass = vec![0.0; m];
        for i in 0..m {
            let tau = i as f64 * h;
            let (tangential, _, measure) = collar_weights(1.0, tau / sqrt_b);
            let trapz = if i == 0 { 0.5 } else { 1.0 };
            diag[i] += trapz * tangential * potential(tau, sqrt_b) * h;
            mass[i] = trapz * measure * h;
        }
        let t = SymTridiag::from_generalized(&SymTridiag { diag, off }, &mass);
        Ok(t.lowest_eigenvalue(1e-13)?)
    }

    /// `B · inf_m e_{δ(m,B),B}` over the same `m`-window as the radial
    /// scan; equals `λ₁(B)` up to tunneling plus discretization.
    pub fn boundary_reduction_lambda1(&self, b: f64) -> Result<f64, DiscError> {
        let center = self.window_center(b);
        let mut best = f64::INFINITY;
        for m in center - self.window..=center + self.window {
            let e = self.e_delta_b(self.delta_of(m, b), b)?.eigenvalue;
            best = best.min(e);
        }
        Ok(b * best)
    }

    /// One-sided difference quotient with mode tracking plus the exact
    /// discrete branch slopes.
    pub fn right_derivative(&self, b: f64, step: f64) -> Result<RightDerivative, DiscError> {
        let here = self.lambda1(b)?;
        let there = self.lambda1(b + step)?;
        let cells = self.policy.cells_for(b);
        let left = radial_lowest(here.m_star, b, cells)?;
        let slope_left = left.eigenvalue_slope();
        let (m_right, slope_right) = if there.m_star == here.m_star {
            (here.m_star, slope_left)
        } else {
            let right = radial_lowest(there.m_star, b, cells)?;
            (there.m_star, right.eigenvalue_slope())
        };
        Ok(RightDerivative {
            b,
            step,
            quotient: (there.lambda1 - here.lambda1) / step,
            m_left: here.m_star,
            m_right,
            slope_left,
            slope_right,
            switched: here.m_star != there.m_star,
        })
    }

    /// Fit the normal decay of the minimizing eigenfunction.
    pub fn decay_profile(&self, b: f64) -> Result<DecayProfile, DiscError> {
        assert!(b >= 100.0, "decay fit wants B >= 100");
        let mode = self.minimizing_mode(b)?;
        let sqrt_b = b.sqrt();
        // Walk inward from the boundary and keep the contiguous run with
        // |f| in the window; past the first sub-window sample only the
        // eigensolver noise floor remains, which must not enter the fit.
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut entered = false;
        for j in (0..mode.samples.len()).rev() {
            let a = mode.samples[j].abs();
            if a > 1e-2 {
                continue;
            }
            if a < 1e-8 {
                if entered {
                    break;
                }
                continue;
            }
            entered = true;
            xs.push(sqrt_b * (1.0 - mode.cell_center(j)));
            ys.push(a.ln());
        }
        if xs.len() < 8 {
            return Err(DiscError::InsufficientDynamicRange { points: xs.len() });
        }
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let mut sxx = 0.0;
        let mut sxy = 0.0;
        for (x, y) in xs.iter().zip(&ys) {
            sxx += (x - mx) * (x - mx);
            sxy += (x - mx) * (y - my);
        }
        Ok(DecayProfile {
            b,
            normal_slope: sxy / sxx,
            fit_points: xs.len(),
            interior_mass_fraction: mode.interior_mass_fraction(),
        })
    }

    /// Smallest sampled `B` beyond which `λ₁` increases strictly through
    /// the whole remaining sample; `None` if the tail is not monotone.
    pub fn detect_b0(&self, bs: &[f64]) -> Result<Option<f64>, DiscError> {
        let values: Result<Vec<f64>, DiscError> =
            bs.iter().map(|&b| Ok(self.lambda1(b)?.lambda1)).collect();
        let values = values?;
        let mut onset = None;
        for i in 0..values.len() {
            if onset.is_none() {
                onset = Some(i);
            }
            if i + 1 < values.len() && values[i + 1] <= values[i] {
                onset = None;
            }
        }
        Ok(onset.filter(|&i| i + 1 < values.len()).map(|i| bs[i]))
    }
}

/// Semiclassical ground energy `μ⁽¹⁾(h)` of the fixed-`m` radial problem;
/// satisfies `λ₁(B)`-mode energy `= B² μ⁽¹⁾(1/B)` by scaling.
pub fn radial_eigenvalue_h_form(m: i64, h_param: f64, cells: usize) -> Result<f64, DiscError> {
    let (k, mass) = radial_pencil_h_form(m, h_param, cells);
    let t = SymTridiag::from_generalized(&k, &mass);
    Ok(t.lowest_eigenvalue(1e-13 / h_param.max(1e-6))?)
}
