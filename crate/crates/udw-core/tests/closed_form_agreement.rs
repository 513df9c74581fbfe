//! Quadrature against the analytic cases that have finite switching.

use std::time::Instant;

use udw_core::closedform::ClosedFormCase;
use udw_core::{compute_c2_d2, QuadratureConfig};

fn cfg() -> QuadratureConfig {
    QuadratureConfig {
        rel_tol: 1e-10,
        ..Default::default()
    }
}

fn check(case: ClosedFormCase, tol: f64) {
    let start = Instant::now();
    let scn = case.scenario(1.0, 1.0).unwrap();
    let num = compute_c2_d2(&scn, &cfg()).unwrap();
    let cf = case.evaluate(1.0, 1.0).unwrap();
    let (c2, d2) = (cf.c2.unwrap(), cf.d2.unwrap());
    let scale = cf.strength.max(1e-300);
    let dc = (num.c2 - c2).norm() / scale;
    let dd = (num.d2 - d2).norm() / scale;
    eprintln!(
        "{:<20} C2 {:.3e} D2 {:.3e} evals {} in {:?}",
        case.name(),
        dc,
        dd,
        num.evaluations,
        start.elapsed()
    );
    assert!(dc < tol && dd < tol, "{case:?}: num {num:?} closed ({c2}, {d2})");
}

#[test]
fn rest_cases() {
    check(ClosedFormCase::Rest1p1 { gap_a: 1.0, gap_b: 2.5, distance: 1.0, duration: 3.0 }, 1e-9);
    check(ClosedFormCase::Rest1p1Resonant { gap: 1.7, distance: 1.5, duration: 2.5 }, 1e-9);
    check(ClosedFormCase::Rest3p1 { gap_a: 1.0, gap_b: 2.5, distance: 1.0, duration: 3.0 }, 1e-9);
    check(ClosedFormCase::Rest3p1Resonant { gap: 1.7, distance: 1.5, duration: 2.5 }, 1e-9);
    check(ClosedFormCase::Rest1p1ZeroGap { distance: 2.0, duration: 1.5 }, 1e-9);
    check(ClosedFormCase::Rest3p1ZeroGap { distance: 2.0, duration: 1.5 }, 1e-9);
    check(ClosedFormCase::Rest2p1ZeroGap { distance: 2.0, duration: 1.5 }, 1e-8);
}

#[test]
fn inertial_cases() {
    check(
        ClosedFormCase::Inertial3p1 { gap_a: 1.0, gap_b: 2.0, distance: 1.0, duration: 2.0, speed: 0.5 },
        1e-8,
    );
    check(
        ClosedFormCase::Inertial3p1Resonant { gap_a: 1.5, distance: 1.0, duration: 2.0, speed: 0.3 },
        1e-8,
    );
    check(
        ClosedFormCase::Inertial1p1 { gap_a: 1.0, gap_b: 2.0, distance: 1.0, duration: 2.0, speed: 0.5 },
        1e-8,
    );
}

#[test]
fn timelike_case() {
    check(
        ClosedFormCase::Timelike1p1Sudden {
            gap_a: 1.0,
            gap_b: 1.5,
            duration_a: 2.0,
            duration_b: 3.0,
            separation: 1.0,
            delay: 0.5,
        },
        1e-9,
    );
}
