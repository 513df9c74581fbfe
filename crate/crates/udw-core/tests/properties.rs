//! Property tests for invariants of the signalling coefficients and of the
//! channel built from them.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use udw_core::channel::{
    leading_channel_matrix, measurement_basis, optimal_alice_states, trace_distance, DetectorState,
};
use udw_core::field::WightmanRegulator;
use udw_core::quadrature::{integrate, Estimate};
use udw_core::{
    capacities, compute_c2_d2, compute_single_detector, DetectorConfig, Dimension, Position, QuadratureConfig,
    Scenario, SignalCoefficients, SwitchingProfile, Worldline,
};

fn cfg() -> QuadratureConfig {
    QuadratureConfig {
        rel_tol: 1e-10,
        ..QuadratureConfig::default()
    }
}

fn dim(n: usize) -> Dimension {
    Dimension::from_spatial(n).unwrap()
}

/// Sender at the origin, receiver at rest at distance `l`, both suddenly
/// switched.
fn rest_pair(
    n: usize,
    l: f64,
    (la, oa, ta): (f64, f64, f64),
    (lb, ob, sb, tb): (f64, f64, f64, f64),
) -> Scenario {
    let a = DetectorConfig::new(
        la,
        oa,
        Worldline::rest(Position::zeros()).unwrap(),
        SwitchingProfile::sudden(0.0, ta).unwrap(),
    )
    .unwrap();
    let b = DetectorConfig::new(
        lb,
        ob,
        Worldline::rest(Position::new(l, 0.0, 0.0)).unwrap(),
        SwitchingProfile::sudden(sb, tb).unwrap(),
    )
    .unwrap();
    Scenario::new(dim(n), a, b).unwrap()
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

fn coeffs(c2: Complex64, d2: Complex64) -> SignalCoefficients {
    SignalCoefficients {
        c2,
        d2,
        ..SignalCoefficients::zero()
    }
}

fn any_complex(scale: f64) -> impl Strategy<Value = Complex64> {
    (0.0..scale, -PI..PI).prop_map(|(r, p)| Complex64::from_polar(r, p))
}

fn any_bloch() -> impl Strategy<Value = Position> {
    (0.0..1.0f64, -1.0..1.0f64, -PI..PI).prop_map(|(r, z, p)| {
        let s = (1.0 - z * z).sqrt();
        Position::new(s * p.cos(), s * p.sin(), z) * r
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn bilinear_in_couplings(
        n in 1usize..=3,
        l in 0.5..3.0f64,
        oa in 0.1..3.0f64,
        ob in 0.1..3.0f64,
        ka in -3.0..3.0f64,
        kb in 0.1..3.0f64,
    ) {
        let base = compute_c2_d2(&rest_pair(n, l, (1.0, oa, 2.0), (1.0, ob, 0.0, 4.0)), &cfg()).unwrap();
        let scaled = compute_c2_d2(&rest_pair(n, l, (ka, oa, 2.0), (kb, ob, 0.0, 4.0)), &cfg()).unwrap();
        prop_assert!(close(scaled.c2, base.c2 * ka * kb, 1e-12));
        prop_assert!(close(scaled.d2, base.d2 * ka * kb, 1e-12));
    }

    #[test]
    fn d2_is_minus_c2_with_flipped_receiver_gap(
        n in 1usize..=3,
        l in 0.5..3.0f64,
        oa in -3.0..3.0f64,
        ob in 0.1..3.0f64,
        sb in -1.0..2.0f64,
    ) {
        let s = compute_c2_d2(&rest_pair(n, l, (1.0, oa, 2.0), (1.0, ob, sb, 3.0)), &cfg()).unwrap();
        let f = compute_c2_d2(&rest_pair(n, l, (1.0, oa, 2.0), (1.0, -ob, sb, 3.0)), &cfg()).unwrap();
        prop_assert!(close(s.d2, -f.c2, 1e-8), "{} vs {}", s.d2, -f.c2);
        prop_assert!(close(f.d2, -s.c2, 1e-8));
    }

    #[test]
    fn no_contact_gives_exact_zero(
        n in 1usize..=3,
        l in 1.0..5.0f64,
        oa in 0.1..3.0f64,
        ob in 0.1..3.0f64,
        ta in 0.1..3.0f64,
        tb in 0.1..3.0f64,
    ) {
        // receiver is switched off before any emission can reach it
        let sb = -tb - 0.01;
        let c = compute_c2_d2(&rest_pair(n, l, (1.0, oa, ta), (1.0, ob, sb, tb)), &cfg()).unwrap();
        prop_assert_eq!(c.c2, Complex64::new(0.0, 0.0));
        prop_assert_eq!(c.d2, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn finer_presplit_changes_nothing(
        n in 1usize..=3,
        l in 0.5..3.0f64,
        oa in 0.1..5.0f64,
        ob in 0.1..5.0f64,
    ) {
        let scn = rest_pair(n, l, (1.0, oa, 3.0), (1.0, ob, 0.5, 4.0));
        let coarse = compute_c2_d2(&scn, &cfg()).unwrap();
        let fine = compute_c2_d2(&scn, &QuadratureConfig { points_per_period: 16, ..cfg() }).unwrap();
        let tol = 1e-8 * coarse.strength() + 10.0 * (coarse.strength_err() + fine.strength_err());
        prop_assert!((coarse.c2 - fine.c2).norm() <= tol);
        prop_assert!((coarse.d2 - fine.d2).norm() <= tol);
    }

    #[test]
    fn trace_distance_triangle(a in any_bloch(), b in any_bloch(), c in any_bloch()) {
        prop_assert!(trace_distance(&a, &c) <= trace_distance(&a, &b) + trace_distance(&b, &c) + 1e-15);
        prop_assert!(trace_distance(&a, &b) <= 1.0);
        prop_assert_eq!(trace_distance(&a, &b), trace_distance(&b, &a));
    }

    #[test]
    fn channel_invariant_under_coefficient_phases(
        c in any_complex(0.05),
        d in any_complex(0.05),
        pc in -PI..PI,
        pd in -PI..PI,
    ) {
        prop_assume!(c.norm() > 1e-4 && d.norm() > 1e-4);
        let sc = coeffs(c, d);
        let rot = coeffs(c * Complex64::from_polar(1.0, pc), d * Complex64::from_polar(1.0, pd));
        let realized = |sc: &SignalCoefficients| {
            let (r1, r2) = optimal_alice_states(sc).unwrap();
            let map = leading_channel_matrix(sc, &DetectorState::ground_state());
            trace_distance(&map.apply(&r1), &map.apply(&r2))
        };
        prop_assert!((realized(&sc) - realized(&rot)).abs() < 1e-14);
        let (x, y) = (capacities(&sc, Some(0.01)), capacities(&rot, Some(0.01)));
        prop_assert!((x.shannon_exact - y.shannon_exact).abs() < 1e-12);
        prop_assert!((x.shannon - y.shannon).abs() < 1e-15);
    }

    #[test]
    fn bit_probability_tracks_trace_distance(c in any_complex(0.1), d in any_complex(0.1)) {
        let r = capacities(&coeffs(c, d), None);
        prop_assert!((r.p_bit - 0.5 - r.trace_distance / 2.0).abs() < 1e-15);
        prop_assert!((r.trace_distance - (c.norm() + d.norm())).abs() < 1e-15);
    }

    #[test]
    fn measurement_is_orthogonal_and_aligned(
        c in any_complex(0.05),
        d in any_complex(0.05),
        kappa in 0.0..=1.0f64,
    ) {
        prop_assume!(c.norm() > 1e-4 && d.norm() > 1e-4);
        let sc = coeffs(c, d);
        let bob = udw_core::channel::optimal_bob_state(&sc, kappa).unwrap();
        prop_assume!((kappa - 0.5).abs() > 1e-6);
        let (n1, n2) = measurement_basis(&sc, &bob).unwrap();
        prop_assert!((n1.norm() - 1.0).abs() < 1e-14);
        // projectors onto ±n are orthogonal: tr(P+ P-) = (1 + n1·n2)/2
        prop_assert!((1.0 + n1.dot(&n2)).abs() < 1e-14);
        let (r1, r2) = optimal_alice_states(&sc).unwrap();
        let map = leading_channel_matrix(&sc, &bob);
        let diff = map.apply(&r1) - map.apply(&r2);
        prop_assert!(diff.cross(&n1).norm() <= 1e-12 * diff.norm());
    }
}

/// The 3+1 lightcone delta, replaced by a narrow Gaussian and integrated by
/// brute force over both times, reproduces the delta-function evaluation
/// with its 1/(1 - n̂·v) Jacobian for a moving sender.
#[test]
fn finite_width_delta_matches_jacobian() {
    let sender = DetectorConfig::new(
        1.0,
        1.3,
        Worldline::inertial(Position::new(0.6, 0.2, 0.0), Position::new(-1.0, 0.5, 0.0)).unwrap(),
        SwitchingProfile::gaussian(0.0, 0.7).unwrap(),
    )
    .unwrap();
    let receiver = DetectorConfig::new(
        1.0,
        0.8,
        Worldline::rest(Position::new(1.5, 0.0, 0.0)).unwrap(),
        SwitchingProfile::gaussian(2.5, 0.9).unwrap(),
    )
    .unwrap();
    let scn = Scenario::new(Dimension::Three, sender, receiver).unwrap();
    let exact = compute_c2_d2(&scn, &cfg()).unwrap();

    let smeared = |sigma: f64| {
        let q = QuadratureConfig {
            rel_tol: 1e-11,
            ..QuadratureConfig::default()
        };
        let outer = |t1: f64| {
            let xb = receiver.worldline.position(t1);
            let kernel = |t2: f64| {
                let r = (xb - sender.worldline.position(t2)).norm();
                let u = (t1 - t2 - r) / sigma;
                let delta = (-0.5 * u * u).exp() / (sigma * (2.0 * PI).sqrt());
                let amp = delta / (4.0 * PI * r)
                    * sender.switching.chi(&sender.worldline, t2)
                    * receiver.switching.chi(&receiver.worldline, t1);
                let (pa, pb) = (
                    sender.gap * sender.worldline.proper_time(t2),
                    receiver.gap * receiver.worldline.proper_time(t1),
                );
                let c = Complex64::new(0.0, amp) * Complex64::from_polar(1.0, pb - pa);
                let d = -Complex64::new(0.0, amp) * Complex64::from_polar(1.0, -pb - pa);
                (udw_core::quadrature::CVec([c, d]), 0.0)
            };
            // the Gaussian peaks at the retarded time
            let tr = udw_core::kinematics::retarded_emission_time(&sender.worldline, &receiver.worldline, t1)
                .unwrap()
                .unwrap();
            let pts: Vec<f64> = (-12..=12).map(|k| tr + k as f64 * sigma).collect();
            let e: Estimate<udw_core::quadrature::CVec<2>> = integrate(kernel, &pts, &q).unwrap();
            (e.value, e.abs_err)
        };
        let e: Estimate<udw_core::quadrature::CVec<2>> =
            integrate(outer, &[-4.0, 0.0, 2.5, 5.0, 9.0], &q).unwrap();
        (e.value.0[0], e.value.0[1])
    };
    // O(σ²) smearing bias, removed by one Richardson step
    let (c1, d1) = smeared(2e-3);
    let (c2, d2) = smeared(1e-3);
    let c = (c2 * 4.0 - c1) / 3.0;
    let d = (d2 * 4.0 - d1) / 3.0;
    assert!(close(c, exact.c2, 1e-7), "{c} vs {}", exact.c2);
    assert!(close(d, exact.d2, 1e-7), "{d} vs {}", exact.d2);
    // without the Jacobian the answer would be off by tens of percent
    assert!(exact.strength() > 1e-3);
}

/// Excitation probability of a detector at rest with Gaussian switching of
/// width T: λ²/(4π) [e^{-Ω²T²} - √π ΩT erfc(ΩT)].
#[test]
fn gaussian_excitation_probability() {
    for &(omega, width) in &[(0.5, 1.0), (1.0, 1.0), (2.0, 0.7), (0.2, 2.0)] {
        let bob = DetectorConfig::new(
            1.0,
            omega,
            Worldline::rest(Position::zeros()).unwrap(),
            SwitchingProfile::gaussian(0.0, width).unwrap(),
        )
        .unwrap();
        let q = QuadratureConfig {
            rel_tol: 1e-10,
            ..QuadratureConfig::default()
        };
        let sd = compute_single_detector(&bob, Dimension::Three, &q, WightmanRegulator::new(1e-3).unwrap()).unwrap();
        let x = omega * width;
        let oracle = ((-x * x).exp() - PI.sqrt() * x * statrs::function::erf::erfc(x)) / (4.0 * PI);
        let rel = (sd.p2.re - oracle).abs() / oracle;
        assert!(rel < 1e-5, "Ω={omega} T={width}: {} vs {oracle} (rel {rel:e})", sd.p2.re);
        assert!(sd.p2.im.abs() < 1e-8 * oracle);
    }
}
