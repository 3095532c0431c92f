//! Cross-module flow: eigenvalue monotonicity, the onset detector and
//! the equality of local fields above it.

use hc3_core::critical_field::CriticalFieldSolver;
use hc3_core::disc_spectrum::DiscSolver;
use hc3_core::grid::HalfLineGrid;
use hc3_core::perturbation::compute_constants;
use std::sync::OnceLock;

fn solver() -> &'static CriticalFieldSolver {
    static S: OnceLock<CriticalFieldSolver> = OnceLock::new();
    S.get_or_init(|| {
        let c = compute_constants(HalfLineGrid::default_grid()).unwrap();
        CriticalFieldSolver::new(DiscSolver::new(c))
    })
}

#[test]
fn kappa0_is_finite_on_the_default_sweep() {
    let s = solver();
    let report = s.detect_kappa0(&[6.0, 8.0, 10.0, 12.0]).unwrap();
    assert!(!report.flagged, "no qualifying kappa found");
    assert!(report.b0.is_some());
    // Fields coincide at twice the detected onset.
    let (lo, up) = s.local_fields(2.0 * report.kappa0).unwrap();
    assert!((up - lo).abs() <= 1e-6 * up);
}

#[test]
fn kappa0_is_stable_under_sweep_refinement() {
    let s = solver();
    let coarse = s.detect_kappa0(&[6.0, 8.0, 10.0, 12.0]).unwrap();
    let fine = s
        .detect_kappa0(&[6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0])
        .unwrap();
    assert!(!coarse.flagged && !fine.flagged);
    // Doubling the density moves the detected onset by at most one
    // coarse cell.
    assert!(
        (coarse.kappa0 - fine.kappa0).abs() <= 2.0 + 1e-12,
        "coarse {} vs fine {}",
        coarse.kappa0,
        fine.kappa0
    );
}

#[test]
fn hc3_root_sits_between_the_local_fields() {
    let s = solver();
    let r = s.hc3_local(12.0).unwrap();
    assert!(r.lower_local <= r.upper_local);
    assert!(r.h >= r.lower_local - 1e-6 && r.h <= r.upper_local + 1e-6);
}
