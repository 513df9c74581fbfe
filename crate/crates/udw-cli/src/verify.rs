//! End-to-end acceptance checks. Each criterion returns a pass flag and a
//! short detail string; `run` prints one machine-readable line per criterion.

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use anyhow::{bail, Context};
use nalgebra::Vector3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use udw_core::channel::{
    capacities, leading_channel_matrix, measurement_basis, optimal_alice_states, optimal_bob_state, DetectorState,
};
use udw_core::closedform::{accel_1p1, accel_3p1_strength, timelike_1p1, ClosedFormCase};
use udw_core::field::WightmanRegulator;
use udw_core::{
    compute_c2_d2, compute_single_detector, DetectorConfig, Dimension, Position, QuadratureConfig, Scenario,
    SignalCoefficients, SwitchingProfile, Worldline,
};

use crate::fit::power_law;

/// Criteria that are known to fail: the (2/ln2)D² Shannon estimate is four
/// times the capacity of the binary channel realized by the optimal
/// leading-order states, so its 10% agreement check cannot pass.
pub const EXPECTED_FAILURES: &[u32] = &[10];

/// Relative perturbation applied to reference values by fault injection.
const FAULT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    /// Rerun all quadratures at a tenth of their tolerance.
    pub strict: bool,
    /// Perturb closed forms and mirror references by a relative 1e-3.
    pub inject_fault: bool,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion={:02} result={} name={} time_s={:.3} detail=\"{}\"",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.seconds,
            self.detail.replace('"', "'")
        )
    }
}

struct Ctx {
    opts: VerifyOptions,
}

impl Ctx {
    fn cfg(&self, rel_tol: f64) -> QuadratureConfig {
        let c = QuadratureConfig {
            rel_tol,
            ..Default::default()
        };
        if self.opts.strict {
            c.tightened(10.0)
        } else {
            c
        }
    }

    /// Reference values pass through here so fault injection can skew them.
    fn reference(&self, z: Complex64) -> Complex64 {
        if self.opts.inject_fault {
            z * (1.0 + FAULT)
        } else {
            z
        }
    }

    fn reference_re(&self, x: f64) -> f64 {
        self.reference(Complex64::new(x, 0.0)).re
    }
}

type Check = fn(&Ctx) -> anyhow::Result<(bool, String)>;

const CRITERIA: [(u32, &str, Check); 12] = [
    (1, "oracle_equivalence", oracle_equivalence),
    (2, "resonance_ridge", resonance_ridge),
    (3, "doppler_peak", doppler_peak),
    (4, "distance_scaling", distance_scaling),
    (5, "acceleration_bound", acceleration_bound),
    (6, "accelerated_3p1", accelerated_3p1),
    (7, "timelike_factorization", timelike_factorization),
    (8, "mirror_symmetry", mirror_symmetry),
    (9, "channel_optimality", channel_optimality),
    (10, "capacities", capacity_values),
    (11, "single_detector_p2", single_detector_p2),
    (12, "timelike_decay_2p1", timelike_decay_2p1),
];

pub fn criterion_ids() -> Vec<u32> {
    CRITERIA.iter().map(|c| c.0).collect()
}

/// Run the selected criteria (all when `only` is empty) in order.
pub fn run(opts: VerifyOptions, only: &[u32]) -> Vec<CriterionResult> {
    let ctx = Ctx { opts };
    CRITERIA
        .iter()
        .filter(|(id, _, _)| only.is_empty() || only.contains(id))
        .map(|&(id, name, check)| {
            let start = Instant::now();
            let (passed, detail) = match check(&ctx) {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e:#}")),
            };
            CriterionResult {
                id,
                name,
                passed,
                detail,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

fn rest(x: f64) -> Worldline {
    Worldline::Rest {
        position: Position::new(x, 0.0, 0.0),
    }
}

fn scenario(dim: Dimension, a: (f64, Worldline, SwitchingProfile), b: (f64, Worldline, SwitchingProfile)) -> anyhow::Result<Scenario> {
    Ok(Scenario::new(
        dim,
        DetectorConfig::new(1.0, a.0, a.1, a.2)?,
        DetectorConfig::new(1.0, b.0, b.1, b.2)?,
    )?)
}

fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &x)| if x > best.1 { (i, x) } else { best })
        .0
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a * (b / a).powf(k as f64 / (n - 1) as f64)).collect()
}

// ---------------------------------------------------------------- 1

/// Accelerated sender with exponential switching of scale `1e6/a`, receiver
/// at rest at the origin switched on over [0, U]. The receiver cut leaves a
/// tail of order 2/(x (aU)²) = 1e-8.
fn accel_3p1_quadrature(gap_a: f64, gap_b: f64, a: f64, cfg: &QuadratureConfig) -> anyhow::Result<f64> {
    let x = gap_b / a;
    let u = (2e8 / x).sqrt() / a;
    let scn = scenario(
        Dimension::Three,
        (gap_a, Worldline::accelerated(a)?, SwitchingProfile::exponential(1e6 / a)?),
        (gap_b, rest(0.0), SwitchingProfile::sudden(0.0, u)?),
    )?;
    Ok(compute_c2_d2(&scn, cfg)?.strength())
}

/// Infinite-switching limit in 1+1 from exponential switching at aσ = 100,
/// 200, 400, extrapolated with two Richardson steps (bias in powers of 1/σ).
fn accel_1p1_quadrature(gap_a: f64, gap_b: f64, a: f64, cfg: &QuadratureConfig) -> anyhow::Result<(Complex64, Complex64)> {
    let vals = [100.0, 200.0, 400.0]
        .par_iter()
        .map(|k| -> anyhow::Result<SignalCoefficients> {
            let sw = SwitchingProfile::exponential(k / a)?;
            let scn = scenario(Dimension::One, (gap_a, Worldline::accelerated(a)?, sw), (gap_b, rest(0.0), sw))?;
            Ok(compute_c2_d2(&scn, cfg)?)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let rich = |f: &dyn Fn(&SignalCoefficients) -> Complex64| {
        let r1 = f(&vals[1]) * 2.0 - f(&vals[0]);
        let r2 = f(&vals[2]) * 2.0 - f(&vals[1]);
        (r2 * 4.0 - r1) / 3.0
    };
    Ok((rich(&|s| s.c2), rich(&|s| s.d2)))
}

fn oracle_points() -> Vec<ClosedFormCase> {
    use ClosedFormCase::*;
    vec![
        Rest1p1 { gap_a: 1.0, gap_b: 2.5, distance: 1.0, duration: 3.0 },
        Rest1p1 { gap_a: 0.3, gap_b: 1.1, distance: 2.0, duration: 1.5 },
        Rest1p1 { gap_a: 2.0, gap_b: 0.5, distance: 0.5, duration: 4.0 },
        Rest1p1Resonant { gap: 1.7, distance: 1.5, duration: 2.5 },
        Rest1p1Resonant { gap: 0.6, distance: 1.0, duration: 5.0 },
        Rest3p1 { gap_a: 1.0, gap_b: 2.5, distance: 1.0, duration: 3.0 },
        Rest3p1 { gap_a: 0.3, gap_b: 1.1, distance: 2.0, duration: 1.5 },
        Rest3p1 { gap_a: 2.0, gap_b: 0.5, distance: 0.5, duration: 4.0 },
        Rest3p1Resonant { gap: 1.7, distance: 1.5, duration: 2.5 },
        Rest3p1Resonant { gap: 0.6, distance: 1.0, duration: 5.0 },
        Rest1p1ZeroGap { distance: 2.0, duration: 1.5 },
        Rest1p1ZeroGap { distance: 0.5, duration: 3.0 },
        Rest3p1ZeroGap { distance: 2.0, duration: 1.5 },
        Rest3p1ZeroGap { distance: 0.5, duration: 3.0 },
        Rest2p1ZeroGap { distance: 2.0, duration: 1.5 },
        Rest2p1ZeroGap { distance: 0.5, duration: 3.0 },
        Rest2p1ZeroGap { distance: 10.0, duration: 1.0 },
        Inertial3p1 { gap_a: 1.0, gap_b: 2.0, distance: 1.0, duration: 2.0, speed: 0.5 },
        Inertial3p1 { gap_a: 2.5, gap_b: 1.2, distance: 1.0, duration: 7.5, speed: 0.2 },
        Inertial3p1 { gap_a: 1.0, gap_b: 0.5, distance: 2.0, duration: 3.0, speed: 0.8 },
        Inertial3p1Resonant { gap_a: 1.5, distance: 1.0, duration: 2.0, speed: 0.3 },
        Inertial3p1Resonant { gap_a: 2.5, distance: 1.0, duration: 3.0, speed: 0.6 },
        Inertial1p1 { gap_a: 1.0, gap_b: 2.0, distance: 1.0, duration: 2.0, speed: 0.5 },
        Inertial1p1 { gap_a: 2.0, gap_b: 0.7, distance: 1.5, duration: 3.0, speed: 0.3 },
        Accel3p1 { gap_a: 1.0, gap_b: 1.0, acceleration: 1.0 },
        Accel3p1 { gap_a: 1.0, gap_b: 2.0, acceleration: 1.0 },
        Accel3p1 { gap_a: 1.0, gap_b: 1.0, acceleration: 2.0 },
        Accel1p1Limit { gap_a: 1.0, gap_b: 1.0, acceleration: 1.0 },
        Accel1p1Limit { gap_a: 1.0, gap_b: 2.0, acceleration: 0.5 },
        Timelike1p1Sudden { gap_a: 1.0, gap_b: 1.5, duration_a: 2.0, duration_b: 3.0, separation: 1.0, delay: 0.5 },
        Timelike1p1Sudden { gap_a: 2.0, gap_b: 0.7, duration_a: 1.0, duration_b: 2.0, separation: -1.5, delay: 0.3 },
    ]
}

fn within(num: Complex64, reference: Complex64) -> bool {
    (num - reference).norm() <= 1e-6f64.max(1e-4 * reference.norm())
}

fn oracle_equivalence(ctx: &Ctx) -> anyhow::Result<(bool, String)> {
    let start = Instant::now();
    let cfg = ctx.cfg(1e-10);
    let points = oracle_points();
    let outcomes: Vec<anyhow::Result<(bool, f64)>> = points
        .par_iter()
        .map(|case| {
            let cf = case.evaluate(1.0, 1.0)?;
            let (ok, dev) = match *case {
                ClosedFormCase::Accel3p1 { gap_a, gap_b, acceleration } => {
                    let num = accel_3p1_quadrature(gap_a, gap_b, acceleration, &ctx.cfg(1e-8))?;
                    let r = ctx.reference_re(cf.strength);
                    (within(num.into(), r.into()), (num - r).abs() / r)
                }
                ClosedFormCase::Accel1p1Limit { gap_a, gap_b, acceleration } => {
                    let (c2, d2) = accel_1p1_quadrature(gap_a, gap_b, acceleration, &cfg)?;
                    let (rc, rd) = (ctx.reference(cf.c2.unwrap()), ctx.reference(cf.d2.unwrap()));
                    let dev = ((c2 - rc).norm() + (d2 - rd).norm()) / cf.strength;
                    (within(c2, rc) && within(d2, rd), dev)
                }
                _ => {
                    let num = compute_c2_d2(&case.scenario(1.0, 1.0)?, &cfg)?;
                    let (rc, rd) = (ctx.reference(cf.c2.unwrap()), ctx.reference(cf.d2.unwrap()));
                    let dev = ((num.c2 - rc).norm() + (num.d2 - rd).norm()) / cf.strength.max(1e-300);
                    (within(num.c2, rc) && within(num.d2, rd), dev)
                }
            };
            if !ok {
                log::warn!("oracle mismatch for {case:?}: relative deviation {dev:.3e}");
            }
            Ok((ok, dev))
        })
        .collect();
    let mut failed = Vec::new();
    let mut worst: f64 = 0.0;
    for (case, r) in points.iter().zip(outcomes) {
        let (ok, dev) = r.with_context(|| format!("{case:?}"))?;
        worst = worst.max(dev);
        if !ok {
            failed.push(case.name());
        }
    }
    let mut variants: Vec<&str> = points.iter().map(|c| c.name()).collect();
    variants.dedup();
    let secs = start.elapsed().as_secs_f64();
    let ok = failed.is_empty() && secs < 120.0 && variants.len() == 13 && points.len() >= 30;
    Ok((
        ok,
        format!(
            "{} points over {} variants, worst relative deviation {worst:.2e}, {secs:.1}s, failing: [{}]",
            points.len(),
            variants.len(),
            failed.join(",")
        ),
    ))
}

// ---------------------------------------------------------------- 2, 3

fn resonance_ridge(ctx: &Ctx) -> anyhow::Result<(bool, String)> {
    let cfg = ctx.cfg(1e-8);
    let grid = linspace(0.25, 5.0, 41);
    let pairs: Vec<(usize, usize)> = (0..41).flat_map(|i| (0..41).map(move |j| (i, j))).collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| -> anyhow::Result<f64> {
            let case = ClosedFormCase::Rest3p1 { gap_a: grid[i], gap_b: grid[j], distance: 1.0, duration: 7.5 };
            Ok(compute_c2_d2(&case.scenario(1.0, 1.0)?, &cfg)?.strength())
        })
        .collect::<anyhow::Result<Vec<f64>>>()?;
    let (i, j) = pairs[argmax(&values)];
    Ok((
        i.abs_diff(j) <= 1,
        format!("argmax at (ΩA, ΩB) = ({:.4}, {:.4}), cells ({i}, {j})", grid[i], grid[j]),
    ))
}

fn doppler_peak(ctx: &Ctx) -> anyhow::Result<(bool, String)> {
    let cfg = ctx.cfg(1e-8);
    let gap_a = 2.5;
    let grid = linspace(0.05, 5.05, 101);
    let step = grid[1] - grid[0];
    let mut ok = true;
    let mut parts = Vec::new();
    for v in [0.2f64, 0.5, 0.8] {
        let zeta = ((1.0 + v) / (1.0 - v)).sqrt();
        let values = grid
            .par_iter()
            .map(|&gb| -> anyhow::Result<f64> {
                let case = ClosedFormCase::Inertial3p1 { gap_a, gap_b: gb, distance: 1.0, duration: 7.5, speed: v };
                Ok(compute_c2_d2(&case.scenario(1.0, 1.0)?, &cfg)?.strength())
            })
            .collect::<anyhow::Result<Vec<f64>>>()?;
        let peak = grid[argmax(&values)];
        let target = gap_a / zeta;
        ok &= (peak - target).abs() <= step + 1e-12;
        parts.push(format!("v={v}: peak {peak:.3} vs ΩA/ζ {target:.3}"));
    }
    Ok((ok, parts.join("; ")))
}

// ---------------------------------------------------------------- 4

fn fitted_exponent(
    ctx: &Ctx,
    lengths: &[f64],
    case: impl Fn(f64) -> ClosedFormCase + Sync,
) -> anyhow::Result<f64> {
    let cfg = ctx.cfg(1e-10);
    let s = lengths
        .par_iter()
        .map(|&l| -> anyhow::Result<f64> { Ok(compute_c2_d2(&case(l).scenario(1.0, 1.0)?, &cfg)?.strength()) })
        .collect::<anyhow::Result<Vec<f64>>>()?;
    Ok(power_law(lengths, &s)?.exponent)
}

fn distance_scaling(ctx: &Ctx) -> anyhow::Result<(bool, String)> {
    let k3 = fitted_exponent(ctx, &logspace(1.0, 100.0, 11), |l| ClosedFormCase::Rest3p1 {
        gap_a: 1.0,
        gap_b: 1.3,
        distance: l,
        duration: 2.0,
    })?;
    let k2 = fitted_exponent(ctx, &logspace(10.0, 100.0, 11), |l| ClosedFormCase::Rest2p1ZeroGap {
        distance: l,
        duration: 1.0,
    })?;
    let k1 = fitted_exponent(ctx, &logspace(1.0, 100.0, 11), |l| ClosedFormCase::Rest1p1 {
        gap_a: 1.0,
        gap_b: 1.5,
        distance: l,
        duration: 2.0,
    })?;
    let ok = (k3 + 1.0).abs() <= 0.02 && (k2 + 0.5).abs() <= 0.05 && k1.abs() <= 0.02;
    Ok((ok, format!("3+1 {k3:.4}, 2+1 {k2:.4}, 1+1 {k1:.4}")))
}

// ---------------------------------------------------------------- 5, 6

fn acceleration_bound(ctx: &Ctx) -> anyhow::Result<(bool, String)> {
    let mut errs = Vec::new();
    for a in [1.0, 10.0, 100.0, 1000.0] {
        let (_, _, s) = accel_1p1(1.0, 1.0, a, 1.0, 1.0)?;
        errs.push((ctx.reference_re(s) - 1.0).abs());
    }
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    let last = errs[3];
    Ok((
        monotone && last < 1e-3,
        format!("|strength - 1| = {}", errs.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(", ")),
    ))
}

fn accelerated_3p1(ctx: &Ctx) -> anyhow::Result<(bool, String)> {
    let cfg = ctx.cfg(1e-8);
    let mut ok = true;
    let mut parts = Vec::new();
    for (x, y) in [(0.5, 0.5), (1.0, 1.0), (2.0, 1.0)] {
        let cf = ctx.reference_re(accel_3p1_strength(x, y, 1.0, 1.0)?.value);
        let num = accel_3p1_quadrature(y, x, 1.0, &cfg)?;
        let rel = (num - cf).abs() / cf;
        ok &= rel < 1e-3;
        parts.push(format!("({x},{y}): {num:.6} vs {cf:.6} rel {rel:.1e}"));
    }
    Ok((ok, parts.join("; ")))
}

// ---------------------------------------------------------------- 7

fn timelike_pair(gap_a: f64, gap_b: f64, da: f64, db: f64) -> anyhow::Result<Scenario> {
    Ok(ClosedFormCase::Timelike1p1Sudden {
        gap_a,
        gap_b,
        duration_a: da,
        duration_b: db,
        separation: 1.0,
        delay: 0.75,
    }
    .scenario(1.0, 1.0)?)
}

fn timelike_factorization(ctx: &Ctx) -> anyhow::Result<(bool, String)> {
    // full-period windows integrate to zero: the absolute floor decides
    let cfg = QuadratureConfig {
        abs_tol: 1e-12,
        ..ctx.cfg(1e-12)
    };
    let mut worst_product: f64 = 0.0;
    for (ga, gb, da, db) in [(1.0, 1.5, 2.0, 3.0), (2.2, 0.7, 1.3, 2.4), (0.4, 3.1, 4.0, 0.9)] {
        let scn = timelike_pair(ga, gb, da, db)?;
        let num = compute_c2_d2(&scn, &cfg)?;
        let (c2, d2) = timelike_1p1(&scn.sender, &scn.receiver, &cfg)?;
        let dev = (num.c2 - ctx.reference(c2)).norm().max((num.d2 - ctx.reference(d2)).norm());
        worst_product = worst_product.max(dev);
    }
    // Gaussian windows truncated at the cutoff are strictly timelike as well
    let gauss = scenario(
        Dimension::One,
        (1.2, rest(0.0), SwitchingProfile::gaussian(0.0, 0.5)?),
        (0.9, rest(1.0), SwitchingProfile::gaussian(12.0, 0.5)?),
    )?;
    let num = compute_c2_d2(&gauss, &cfg)?;
    let (c2, d2) = timelike_1p1(&gauss.sender, &gauss.receiver, &cfg)?;
    worst_product = worst_product.max((num.c2 - ctx.reference(c2)).norm().max((num.d2 - ctx.reference(d2)).norm()));

    let (ga, gb) = (1.3, 0.7);
    let mut worst_half: f64 = 0.0;
    for (na, nb) in [(0.5, 0.5), (1.5, 0.5), (0.5, 2.5)] {
        let scn = timelike_pair(ga, gb, na * 2.0 * PI / ga, nb * 2.0 * PI / gb)?;
        let s = compute_c2_d2(&scn, &cfg)?.strength();
        worst_half = worst_half.max((s - ctx.reference_re(4.0 / (ga * gb))).abs());
    }
    let mut worst_full: f64 = 0.0;
    for (na, nb) in [(1.0, 1.0), (2.0, 0.5), (0.5, 3.0)] {
        let scn = timelike_pair(ga, gb, na * 2.0 * PI / ga, nb * 2.0 * PI / gb)?;
        worst_full = worst_full.max(compute_c2_d2(&scn, &cfg)?.strength());
    }
    let ok = worst_product < 1e-8 && worst_half < 1e-10 && worst_full < 1e-10;
    Ok((
        ok,
        format!("Fourier product {worst_product:.2e}, half-period {worst_half:.2e}, full-period {worst_full:.2e}"),
    ))
}

// ---------------------------------------------------------------- 8

fn random_worldline(rng: &mut ChaCha8Rng, dim: Dimension) -> anyhow::Result<Worldline> {
    let n = dim.spatial();
    let mut vec_in = |scale: f64| {
        let mut v = Position::zeros();
        for k in 0..n {
            v[k] = rng.gen_range(-scale..scale);
        }
        v
    };
    let kind = vec_in(1.0).x;
    Ok(if kind < -0.3 {
        Worldline::rest(vec_in(2.0))?
    } else if kind < 0.4 {
        let v = vec_in(0.5);
        Worldline::inertial(v, vec_in(2.0))?
    } else {
        Worldline::accelerated(rng.gen_range(0.5..2.0))?
    })
}

fn random_switching(rng: &mut ChaCha8Rng, wl: &Worldline) -> anyhow::Result<SwitchingProfile> {
    let pick: f64 = rng.gen();
    let accelerated = matches!(wl, Worldline::Accelerated { .. });
    Ok(if pick < 0.45 {
        SwitchingProfile::sudden(rng.gen_range(-2.0..2.0), rng.gen_range(0.5..3.0))?
    } else if pick < 0.8 || accelerated {
        SwitchingProfile::gaussian(rng.gen_range(-2.0..2.0), rng.gen_range(0.3..1.0))?
    } else {
        SwitchingProfile::exponential(rng.gen_range(0.2..0.6))?
    })
}

fn random_scenario(rng: &mut ChaCha8Rng) -> anyhow::Result<Scenario> {
    let dim = [Dimension::One, Dimension::Two, Dimension::Three][rng.gen_range(0..3)];
    let det = |rng: &mut ChaCha8Rng| -> anyhow::Result<DetectorConfig> {
        let wl = random_worldline(rng, dim)?;
        let sw = random_switching(rng, &wl)?;
        Ok(DetectorConfig::new(1.0, rng.gen_range(0.0..3.0), wl, sw)?)
    };
    let a = det(rng)?;
    let b = det(rng)?;
    Ok(Scenario::new(dim, a, b)?)
}

fn mirror_symmetry(ctx: &Ctx) -> anyhow::Result<(bool, String)> {
    let cfg = ctx.cfg(1e-8);
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.opts.seed ^ 0x6d69_7272);
    let mut picked = Vec::new();
    let mut attempts = 0;
    while picked.len() < 10 {
        attempts += 1;
        if attempts > 1000 {
            bail!("could not draw 10 admissible scenarios");
        }
        let Ok(scn) = random_scenario(&mut rng) else { continue };
        let dims: Vec<Dimension> = picked.iter().map(|s: &Scenario| s.dimension).collect();
        // keep all three dimensions represented
        if picked.len() >= 7 && [Dimension::One, Dimension::Two, Dimension::Three].iter().any(|d| !dims.contains(d)) && dims.contains(&scn.dimension) {
            continue;
        }
        match compute_c2_d2(&scn, &cfg) {
            Ok(sc) if sc.strength() > 1e-8 => picked.push(scn),
            _ => continue,
        }
    }
    let results = picked
        .par_iter()
        .map(|scn| -> anyhow::Result<(f64, f64)> {
            let a = compute_c2_d2(scn, &cfg)?;
            let b = compute_c2_d2(&scn.mirrored(), &cfg)?;
            let err = a.c2_err + b.c2_err;
            let dc = (b.c2 - ctx.reference(a.c2)).norm();
            let dd = (b.d2 + ctx.reference(a.d2).conj()).norm();
            Ok((dc / err.max(1e-300), dd / (a.d2_err + b.d2_err).max(1e-300)))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let worst = results.iter().fold(0.0f64, |m, r| m.max(r.0).max(r.1));
    let dims: Vec<String> = picked.iter().map(|s| s.dimension.to_string()).collect();
    Ok((
        worst <= 1.0,
        format!("10 scenarios ({}), worst deviation / error estimate {worst:.3}", dims.join(" ")),
    ))
}

// ---------------------------------------------------------------- 9

fn sphere_grid() -> Vec<Vector3<f64>> {
    let mut g = Vec::with_capacity(181 * 360);
    for it in 0..=180 {
        let th = (it as f64).to_radians();
        for ip in 0..360 {
            let ph = (ip as f64).to_radians();
            g.push(Vector3::new(th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()));
        }
    }
    g
}

fn channel_optimality(ctx: &Ctx) -> anyhow::Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.opts.seed ^ 0x6368_616e);
    let grid = sphere_grid();
    let mut worst_achieve: f64 = 0.0;
    let mut worst_excess: f64 = f64::NEG_INFINITY;
    let mut worst_orth: f64 = 0.0;
    for _ in 0..20 {
        let d_total = rng.gen_range(0.005..0.1);
        let share: f64 = rng.gen();
        let c2 = Complex64::from_polar(d_total * share, rng.gen_range(-PI..PI));
        let d2 = Complex64::from_polar(d_total * (1.0 - share), rng.gen_range(-PI..PI));
        let sc = SignalCoefficients {
            c2,
            d2,
            ..SignalCoefficients::zero()
        };
        let d = ctx.reference_re(sc.strength());
        let (r1, r2) = optimal_alice_states(&sc)?;
        let mut bobs: Vec<DetectorState> = (0..=20).map(|k| optimal_bob_state(&sc, k as f64 / 20.0)).collect::<Result<_, _>>()?;
        // a few non-optimal receivers: the optimum may not be exceeded
        for _ in 0..3 {
            let kappa: f64 = rng.gen();
            let coh = Complex64::from_polar((kappa * (1.0 - kappa)).sqrt() * rng.gen::<f64>(), rng.gen_range(-PI..PI));
            bobs.push(DetectorState::new(1.0 - kappa, kappa, coh)?);
        }
        for (k, bob) in bobs.iter().enumerate() {
            let map = leading_channel_matrix(&sc, bob);
            let grid_max = grid.iter().map(|r| (map.m * r).norm()).fold(0.0, f64::max);
            worst_excess = worst_excess.max(grid_max - d);
            if k <= 20 {
                let analytic = udw_core::channel::trace_distance(&map.apply(&r1), &map.apply(&r2));
                worst_achieve = worst_achieve.max((analytic - d).abs());
                worst_excess = worst_excess.max(grid_max - analytic);
                let (n, _) = measurement_basis(&sc, bob)?;
                worst_orth = worst_orth.max(n.dot(&bob.bloch()).abs());
            }
        }
    }
    let ok = worst_achieve <= 1e-6 && worst_excess <= 1e-6 && worst_orth <= 1e-10;
    Ok((
        ok,
        format!(
            "|TD(optimal) - D| {worst_achieve:.2e}, grid max - optimum {worst_excess:.2e}, measurement overlap {worst_orth:.2e}"
        ),
    ))
}

// ---------------------------------------------------------------- 10

fn capacity_values(ctx: &Ctx) -> anyhow::Result<(bool, String)> {
    let ln2 = std::f64::consts::LN_2;
    let sc = SignalCoefficients {
        c2: Complex64::new(0.0, 0.06),
        d2: Complex64::new(0.04, 0.0),
        ..SignalCoefficients::zero()
    };
    let r = capacities(&sc, Some((-1.0f64).exp()));
    let holevo = r.holevo.context("Holevo capacity missing for P2 = 1/e")?;
    let hand = [
        (r.p_bit, 0.55),
        (r.shannon, 0.02 / ln2),
        (holevo, 0.01 / (4.0 * ln2)),
    ];
    let hand_dev = hand.iter().fold(0.0f64, |m, (x, want)| m.max((x - ctx.reference_re(*want)).abs()));

    let small = SignalCoefficients {
        c2: Complex64::new(0.03, 0.0),
        d2: Complex64::new(0.0, -0.02),
        ..SignalCoefficients::zero()
    };
    let r5 = capacities(&small, None);
    let rel = (r5.shannon - r5.shannon_exact).abs() / r5.shannon_exact;
    let ok = hand_dev < 1e-12 && rel <= 0.1;
    Ok((
        ok,
        format!(
            "hand values max deviation {hand_dev:.1e}; at D=0.05 leading {:.6e} vs exact binary channel {:.6e} (relative {rel:.3})",
            r5.shannon, r5.shannon_exact
        ),
    ))
}

// ---------------------------------------------------------------- 11

fn p2_gaussian(ctx: &Ctx, width: f64, gap: f64) -> anyhow::Result<(Complex64, f64)> {
    let bob = DetectorConfig::new(1.0, gap, rest(0.0), SwitchingProfile::gaussian(0.0, width)?)?;
    let r = compute_single_detector(&bob, Dimension::Three, &ctx.cfg(1e-9), WightmanRegulator::new(width / 100.0)?)?;
    Ok((r.p2, r.errors[0]))
}

fn single_detector_p2(ctx: &Ctx) -> anyhow::Result<(bool, String)> {
    let (p, err) = p2_gaussian(ctx, 1.0, 1.0)?;
    let real = p.im.abs() <= 1e-6 * p.re.abs();
    let nonneg = p.re >= 0.0;
    let stable = err <= 5e-4 * p.re.abs();
    let gaps = [1.0, 2.0, 4.0, 8.0];
    let vals = gaps
        .par_iter()
        .map(|&g| Ok(p2_gaussian(ctx, 0.25, g)?.0.re))
        .collect::<anyhow::Result<Vec<f64>>>()?;
    let decreasing = vals.windows(2).all(|w| w[1] < w[0]) && vals.iter().all(|v| *v >= 0.0);
    Ok((
        real && nonneg && stable && decreasing,
        format!(
            "P2 = {:.6e}{:+.1e}i, extrapolation spread {err:.1e}; ΩB grid [{}]",
            p.re,
            p.im,
            vals.iter().map(|v| format!("{v:.4e}")).collect::<Vec<_>>().join(", ")
        ),
    ))
}

// ---------------------------------------------------------------- 12

fn timelike_decay_2p1(ctx: &Ctx) -> anyhow::Result<(bool, String)> {
    let cfg = ctx.cfg(1e-8);
    let gap = PI;
    let delays = logspace(10.0, 100.0, 11);
    let s = delays
        .par_iter()
        .map(|&dt| -> anyhow::Result<f64> {
            let scn = scenario(
                Dimension::Two,
                (gap, rest(0.0), SwitchingProfile::sudden(0.0, 1.0)?),
                (gap, rest(0.0), SwitchingProfile::sudden(1.0 + dt, 1.0)?),
            )?;
            Ok(compute_c2_d2(&scn, &cfg)?.strength())
        })
        .collect::<anyhow::Result<Vec<f64>>>()?;
    let fit = power_law(&delays, &s)?;
    Ok((
        (fit.exponent + 1.0).abs() <= 0.1,
        format!("exponent {:.4} ± {:.4} over ΔT in [10, 100]", fit.exponent, fit.ci95),
    ))
}
