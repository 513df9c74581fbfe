//! Analytic solutions for the standard scenarios. They serve as a fast path
//! and as oracles for the quadrature engine.
//!
//! Conventions: Alice (sender) switches on at proper time 0 for a proper
//! duration T_A. At rest she sits at distance L from Bob; in inertial motion
//! she starts at distance L and recedes with speed v. Bob's window is the
//! null shadow of Alice's, [L, L + T_A] at rest and [L, L + ζT_A] in motion.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::kinematics::{arrival_time, doppler_factor, Dimension, KinematicsError, Position, Worldline};
use crate::quadrature::QuadratureConfig;
use crate::signal::{DetectorConfig, Scenario, SignalError};
use crate::specfun::{gamma_upper_zero, hyp1f2, ln_gamma, log1p_over, phi1, phi2, SpecialFunctionError};
use crate::switching::{SwitchingError, SwitchingProfile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClosedFormError {
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("windows are not strictly timelike separated")]
    NotTimelike,
    #[error(transparent)]
    SpecialFunction(#[from] SpecialFunctionError),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error(transparent)]
    Switching(#[from] SwitchingError),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// Below this value of |ΩA - ΩB|·T_A (or the Doppler-shifted analogue) the
/// resonant formula with its first-order correction is used.
pub const RESONANCE_THRESHOLD: f64 = 1e-6;

/// Accelerated 3+1 results with x below this are dominated by x^{iy}
/// oscillations and flagged.
pub const OSCILLATION_THRESHOLD: f64 = 0.05;

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), ClosedFormError> {
    if cond {
        Ok(())
    } else {
        Err(ClosedFormError::Domain(msg()))
    }
}

fn check_finite(values: &[(&str, f64)]) -> Result<(), ClosedFormError> {
    for (name, v) in values {
        require(v.is_finite(), || format!("{name} = {v} is not finite"))?;
    }
    Ok(())
}

/// C2 for detectors at rest in 1+1 or 3+1.
pub fn rest_c2(
    dim: Dimension,
    gap_a: f64,
    gap_b: f64,
    distance: f64,
    duration: f64,
    la: f64,
    lb: f64,
) -> Result<Complex64, ClosedFormError> {
    check_finite(&[("ΩA", gap_a), ("ΩB", gap_b), ("λA", la), ("λB", lb)])?;
    require(distance > 0.0 && distance.is_finite(), || format!("L = {distance} must be > 0"))?;
    require(duration >= 0.0 && duration.is_finite(), || format!("T_A = {duration} must be >= 0"))?;
    let (l, t) = (distance, duration);
    let ll = la * lb;
    let delta = gap_b - gap_a;
    let near_resonant = (delta * t).abs() < RESONANCE_THRESHOLD;
    let e_l = (i() * gap_b * l).exp();
    match dim {
        Dimension::Three => {
            if near_resonant {
                // i e^{iΩL} T_A/(4πL), first-order correction (1 + iδT_A/2)
                Ok(ll * i() * e_l * t / (4.0 * PI * l) * (1.0 + i() * delta * t / 2.0))
            } else {
                Ok(ll * e_l * (1.0 - (i() * delta * t).exp()) / (4.0 * PI * l * (gap_a - gap_b)))
            }
        }
        Dimension::One => {
            // Two exact forms, dividing by ΩA or by ΩB; the larger gap keeps
            // the bracket free of cancellation, including at resonance.
            if gap_a.abs().max(gap_b.abs()) * t < 1e-8 {
                // zero sender gap: (i/2) ∫_0^T s e^{iΩB s} ds
                return Ok(ll * i() * 0.5 * e_l * t * t * phi2(i() * gap_b * t));
            }
            if gap_a.abs() >= gap_b.abs() {
                Ok(ll * e_l * t / (2.0 * gap_a) * (phi1(i() * gap_b * t) - phi1(i() * delta * t)))
            } else {
                let lead = (i() * gap_b * t).exp() * phi1(-i() * gap_a * t);
                Ok(ll * e_l * t / (2.0 * gap_b) * (lead - phi1(i() * delta * t)))
            }
        }
        Dimension::Two => Err(ClosedFormError::Unsupported(
            "rest closed forms in 2+1 exist for zero gaps only".into(),
        )),
    }
}

/// D2 = -C2(ΩA, -ΩB).
pub fn rest_d2(
    dim: Dimension,
    gap_a: f64,
    gap_b: f64,
    distance: f64,
    duration: f64,
    la: f64,
    lb: f64,
) -> Result<Complex64, ClosedFormError> {
    Ok(-rest_c2(dim, gap_a, -gap_b, distance, duration, la, lb)?)
}

/// |C2| + |D2| for zero-gap detectors at rest in 2+1:
/// (λλ/π)[(T+L) ln(1 + (T + √(2LT+T²))/L) - √(2LT+T²)].
pub fn rest_2p1_zero_gap(distance: f64, duration: f64, la: f64, lb: f64) -> Result<f64, ClosedFormError> {
    require(distance > 0.0 && distance.is_finite(), || format!("L = {distance} must be > 0"))?;
    require(duration >= 0.0 && duration.is_finite(), || format!("T_A = {duration} must be >= 0"))?;
    let (l, t) = (distance, duration);
    let root = (2.0 * l * t + t * t).sqrt();
    Ok(la * lb / PI * ((t + l) * ((t + root) / l).ln_1p() - root))
}

/// C2 for a sender receding inertially with speed v from a receiver at rest.
#[allow(clippy::too_many_arguments)]
pub fn inertial_c2(
    dim: Dimension,
    gap_a: f64,
    gap_b: f64,
    distance: f64,
    duration: f64,
    speed: f64,
    la: f64,
    lb: f64,
) -> Result<Complex64, ClosedFormError> {
    check_finite(&[("ΩA", gap_a), ("ΩB", gap_b), ("λA", la), ("λB", lb)])?;
    require((0.0..1.0).contains(&speed), || format!("v = {speed} must lie in [0, 1)"))?;
    require(distance > 0.0 && distance.is_finite(), || format!("L = {distance} must be > 0"))?;
    require(duration >= 0.0 && duration.is_finite(), || format!("T_A = {duration} must be >= 0"))?;
    let zeta = doppler_factor(speed)?;
    let (l, t, v) = (distance, duration, speed);
    let ll = la * lb;
    let root = (1.0 - v * v).sqrt();
    match dim {
        Dimension::Three => {
            let detune = gap_a - zeta * gap_b;
            let k = root / v;
            if speed < 1e-4 {
                return rest_c2(dim, gap_a, gap_b, l, t, la, lb);
            }
            // both Γ(0, ·) arguments are i(…)detune; resonance when they nearly agree
            if (detune * t).abs() < RESONANCE_THRESHOLD {
                let x = v * t / (l * root);
                let log_term = t / l * log1p_over(x);
                let base = ll * i() * (i() * gap_b * l).exp() / (4.0 * PI) * log_term;
                return Ok(base);
            }
            let z1 = i() * l * k * detune;
            let z2 = i() * (t * v + l * root) / v * detune;
            let pre = ll * i() * k / (4.0 * PI) * (i() * l * (gap_b + k * detune)).exp();
            Ok(pre * (gamma_upper_zero(z1)? - gamma_upper_zero(z2)?))
        }
        Dimension::One => {
            require(gap_a != 0.0, || "ΩA must be nonzero in the 1+1 inertial formula".into())?;
            let delta = gap_b - gap_a / zeta;
            let span = zeta * t;
            // R = ∫_0^{ζT} e^{iδs} ds
            let r = if (delta * span).abs() < RESONANCE_THRESHOLD {
                span * (1.0 + i() * delta * span / 2.0)
            } else {
                2.0 / delta * (i() * delta * span / 2.0).exp() * (delta * span / 2.0).sin()
            };
            // (i/ΩB)(e^{iΩB ζT} - 1) = -ζT φ1(iΩB ζT)
            let tail = -span * phi1(i() * gap_b * span);
            Ok(-ll * (i() * gap_b * l).exp() / (2.0 * gap_a) * (r + tail))
        }
        Dimension::Two => Err(ClosedFormError::Unsupported("no inertial closed form in 2+1".into())),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn inertial_d2(
    dim: Dimension,
    gap_a: f64,
    gap_b: f64,
    distance: f64,
    duration: f64,
    speed: f64,
    la: f64,
    lb: f64,
) -> Result<Complex64, ClosedFormError> {
    Ok(-inertial_c2(dim, gap_a, -gap_b, distance, duration, speed, la, lb)?)
}

/// sinh(p)/sinh(q) for q > 0 without overflow.
fn sinh_ratio(p: f64, q: f64) -> f64 {
    let s = p.signum();
    let p = p.abs();
    s * (p - q).exp() * (-(-2.0 * p).exp_m1()) / (-(-2.0 * q).exp_m1())
}

/// cosh(p)/sinh(q) for q > 0 without overflow.
fn cosh_ratio(p: f64, q: f64) -> f64 {
    let p = p.abs();
    (p - q).exp() * (1.0 + (-2.0 * p).exp()) / (-(-2.0 * q).exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelStrength {
    pub value: f64,
    /// x below the oscillation threshold.
    pub oscillation_dominated: bool,
}

fn accel_check(x: f64, y: f64) -> Result<(), ClosedFormError> {
    check_finite(&[("x", x), ("y", y)])?;
    if y == 0.0 {
        return Err(ClosedFormError::Unsupported(
            "zero sender gap (y = 0) has no closed form here".into(),
        ));
    }
    require(y > 0.0, || format!("y = {y} must be > 0"))?;
    require(x >= 0.0, || format!("x = {x} must be >= 0"))
}

/// |C2| + |D2| for a uniformly accelerated sender (gap ΩA, coupling along
/// its whole worldline) and a receiver at rest at the origin switched on
/// for t > 0, in 3+1. x = ΩB/a, y = ΩA/a.
///
/// (λλ/4π)(|I(x)| + |I(-x)|) with
/// I(±x) = 2[π sinh(±x + πy/2)/sinh(πy) + Γ(-1-iy)(∓ix)^{1+iy} 1F2(1; 1+iy/2, 3/2+iy/2; x²/4)].
pub fn accel_3p1_strength(x: f64, y: f64, la: f64, lb: f64) -> Result<AccelStrength, ClosedFormError> {
    accel_check(x, y)?;
    let f = if x > 0.0 {
        hyp1f2(
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, y / 2.0),
            Complex64::new(1.5, y / 2.0),
            Complex64::new(x * x / 4.0, 0.0),
        )?
    } else {
        Complex64::new(0.0, 0.0)
    };
    let lg = ln_gamma(Complex64::new(-1.0, -y))?;
    let term = |sign: f64| -> Complex64 {
        let mut v = Complex64::new(PI * sinh_ratio(sign * x + PI * y / 2.0, PI * y), 0.0);
        if x > 0.0 {
            // ln(∓ix) = ln x ∓ iπ/2
            let ln_arg = Complex64::new(x.ln(), -sign * PI / 2.0);
            v += (lg + Complex64::new(1.0, y) * ln_arg).exp() * f;
        }
        v * 2.0
    };
    let value = la * lb / (4.0 * PI) * (term(1.0).norm() + term(-1.0).norm());
    Ok(AccelStrength {
        value,
        oscillation_dominated: x < OSCILLATION_THRESHOLD,
    })
}

/// The printed accelerated 3+1 expression, kept for comparison. It drops
/// the Jacobian of the lightcone delta and differs from direct quadrature.
pub fn accel_3p1_strength_displayed(x: f64, y: f64, la: f64, lb: f64) -> Result<AccelStrength, ClosedFormError> {
    accel_check(x, y)?;
    require(x > 0.0, || "the printed form needs x > 0".into())?;
    let f = hyp1f2(
        Complex64::new(1.0, 0.0),
        Complex64::new(0.5, y / 2.0),
        Complex64::new(1.0, y / 2.0),
        Complex64::new(x * x / 4.0, 0.0),
    )?;
    let lg = ln_gamma(Complex64::new(0.0, -y))?;
    let term = |sign: f64, p: f64| -> Complex64 {
        let g = (lg + sign * PI * y / 2.0 + i() * y * x.ln()).exp();
        2.0 * i() * g * f + 2.0 * PI * cosh_ratio(p, PI * y)
    };
    let a = term(-1.0, (PI * y - 2.0 * x) / 2.0);
    let b = term(1.0, (2.0 * x + PI * y) / 2.0);
    Ok(AccelStrength {
        value: la * lb / (4.0 * PI) * (a.norm() + b.norm()),
        oscillation_dominated: x < OSCILLATION_THRESHOLD,
    })
}

/// Infinite-switching limit for a uniformly accelerated sender and a
/// receiver at rest at the origin in 1+1. Returns (C2, D2, |C2|+|D2|).
pub fn accel_1p1(
    gap_a: f64,
    gap_b: f64,
    acceleration: f64,
    la: f64,
    lb: f64,
) -> Result<(Complex64, Complex64, f64), ClosedFormError> {
    check_finite(&[("ΩA", gap_a), ("ΩB", gap_b), ("a", acceleration)])?;
    require(acceleration > 0.0, || format!("a = {acceleration} must be > 0"))?;
    require(gap_a > 0.0 && gap_b > 0.0, || "gaps must be > 0".into())?;
    let a = acceleration;
    let (x, y) = (gap_b / a, gap_a / a);
    let lg = ln_gamma(Complex64::new(0.0, -y))?;
    // (∓ix)^{iy} = e^{±πy/2} x^{iy}
    let c2 = -la * lb * (lg + PI * y / 2.0 + i() * y * x.ln()).exp() / (2.0 * a * gap_b);
    let d2 = -la * lb * (lg - PI * y / 2.0 + i() * y * x.ln()).exp() / (2.0 * a * gap_b);
    let strength = la * lb / (a * gap_b) * (PI * y / 2.0).cosh() * (a * PI / (gap_a * (PI * y).sinh())).sqrt();
    Ok((c2, d2, strength))
}

/// (2/Ω) sin(ΩΔ/2) with its Ω → 0 limit.
fn sinc_window(omega: f64, duration: f64) -> f64 {
    let h = omega * duration / 2.0;
    if h.abs() < 1e-8 {
        duration
    } else {
        2.0 * h.sin() / omega
    }
}

/// |C2| + |D2| for strictly timelike sudden windows in 1+1:
/// (4λλ/ΩAΩB)|sin(ΔτA ΩA/2) sin(ΔτB ΩB/2)|.
pub fn timelike_1p1_sudden_strength(
    duration_a: f64,
    duration_b: f64,
    gap_a: f64,
    gap_b: f64,
    la: f64,
    lb: f64,
) -> f64 {
    (la * lb * sinc_window(gap_a, duration_a) * sinc_window(gap_b, duration_b)).abs()
}

/// Timelike factorization in 1+1: C2 = (i/2)λλ F_A F̃_B with
/// F_A = ∫ηA e^{-iΩA τ}dτ and F̃_B = ∫ηB e^{iΩB τ}dτ. Returns (C2, D2).
pub fn timelike_1p1(
    sender: &DetectorConfig,
    receiver: &DetectorConfig,
    cfg: &QuadratureConfig,
) -> Result<(Complex64, Complex64), ClosedFormError> {
    if !strictly_timelike(sender, receiver, cfg.cutoff)? {
        return Err(ClosedFormError::NotTimelike);
    }
    let ll = sender.coupling * receiver.coupling;
    let fa = sender.switching.fourier(sender.gap, cfg)?.0;
    let fb_plus = receiver.switching.fourier(-receiver.gap, cfg)?.0;
    let fb_minus = receiver.switching.fourier(receiver.gap, cfg)?.0;
    let half_i = Complex64::new(0.0, 0.5);
    Ok((half_i * ll * fa * fb_plus, -half_i * ll * fa * fb_minus))
}

/// True when every point of the receiver window lies strictly inside the
/// future lightcone of every point of the sender window.
pub fn strictly_timelike(sender: &DetectorConfig, receiver: &DetectorConfig, cutoff: f64) -> Result<bool, ClosedFormError> {
    let (a0, a1) = sender.coordinate_window(cutoff);
    let (b0, _) = receiver.coordinate_window(cutoff);
    if !(a0.is_finite() && a1.is_finite() && b0.is_finite()) {
        return Ok(false);
    }
    Ok(match arrival_time(&sender.worldline, &receiver.worldline, a1)? {
        Some(t) => t < b0,
        None => false,
    })
}

/// Catalogue of analytic cases with their parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedFormCase {
    Rest1p1 { gap_a: f64, gap_b: f64, distance: f64, duration: f64 },
    Rest1p1Resonant { gap: f64, distance: f64, duration: f64 },
    Rest3p1 { gap_a: f64, gap_b: f64, distance: f64, duration: f64 },
    Rest3p1Resonant { gap: f64, distance: f64, duration: f64 },
    Rest1p1ZeroGap { distance: f64, duration: f64 },
    Rest3p1ZeroGap { distance: f64, duration: f64 },
    Rest2p1ZeroGap { distance: f64, duration: f64 },
    Inertial3p1 { gap_a: f64, gap_b: f64, distance: f64, duration: f64, speed: f64 },
    /// Receiver gap ΩA/ζ.
    Inertial3p1Resonant { gap_a: f64, distance: f64, duration: f64, speed: f64 },
    Inertial1p1 { gap_a: f64, gap_b: f64, distance: f64, duration: f64, speed: f64 },
    Accel3p1 { gap_a: f64, gap_b: f64, acceleration: f64 },
    Accel1p1Limit { gap_a: f64, gap_b: f64, acceleration: f64 },
    /// Sender at rest at the origin, receiver at rest at `separation`,
    /// switched on `delay` after the sender's last lightray arrives.
    Timelike1p1Sudden { gap_a: f64, gap_b: f64, duration_a: f64, duration_b: f64, separation: f64, delay: f64 },
}

/// Closed-form result; C2 and D2 are absent when only the strength is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormValue {
    pub c2: Option<Complex64>,
    pub d2: Option<Complex64>,
    pub strength: f64,
    pub oscillation_dominated: bool,
}

impl ClosedFormValue {
    fn pair(c2: Complex64, d2: Complex64) -> Self {
        Self {
            c2: Some(c2),
            d2: Some(d2),
            strength: c2.norm() + d2.norm(),
            oscillation_dominated: false,
        }
    }
}

impl ClosedFormCase {
    pub fn name(&self) -> &'static str {
        match self {
            ClosedFormCase::Rest1p1 { .. } => "Rest1p1",
            ClosedFormCase::Rest1p1Resonant { .. } => "Rest1p1Resonant",
            ClosedFormCase::Rest3p1 { .. } => "Rest3p1",
            ClosedFormCase::Rest3p1Resonant { .. } => "Rest3p1Resonant",
            ClosedFormCase::Rest1p1ZeroGap { .. } => "Rest1p1ZeroGap",
            ClosedFormCase::Rest3p1ZeroGap { .. } => "Rest3p1ZeroGap",
            ClosedFormCase::Rest2p1ZeroGap { .. } => "Rest2p1ZeroGap",
            ClosedFormCase::Inertial3p1 { .. } => "Inertial3p1",
            ClosedFormCase::Inertial3p1Resonant { .. } => "Inertial3p1Resonant",
            ClosedFormCase::Inertial1p1 { .. } => "Inertial1p1",
            ClosedFormCase::Accel3p1 { .. } => "Accel3p1",
            ClosedFormCase::Accel1p1Limit { .. } => "Accel1p1Limit",
            ClosedFormCase::Timelike1p1Sudden { .. } => "Timelike1p1Sudden",
        }
    }

    pub fn evaluate(&self, la: f64, lb: f64) -> Result<ClosedFormValue, ClosedFormError> {
        use ClosedFormCase::*;
        let (one, three) = (Dimension::One, Dimension::Three);
        Ok(match *self {
            Rest1p1 { gap_a, gap_b, distance, duration } => ClosedFormValue::pair(
                rest_c2(one, gap_a, gap_b, distance, duration, la, lb)?,
                rest_d2(one, gap_a, gap_b, distance, duration, la, lb)?,
            ),
            Rest1p1Resonant { gap, distance, duration } => {
                require(gap != 0.0, || "resonant 1+1 case needs a nonzero gap".into())?;
                let (w, l, t) = (gap, distance, duration);
                let el = (i() * w * l).exp();
                let c2 = -la * lb * el * (i() * ((i() * w * t).exp() - 1.0) + w * t) / (2.0 * w * w);
                let d2 = la * lb * i() * (-i() * (w * l + 2.0 * w * t)).exp() * ((i() * w * t).exp() - 1.0).powi(2)
                    / (4.0 * w * w);
                ClosedFormValue::pair(c2, d2)
            }
            Rest3p1 { gap_a, gap_b, distance, duration } => ClosedFormValue::pair(
                rest_c2(three, gap_a, gap_b, distance, duration, la, lb)?,
                rest_d2(three, gap_a, gap_b, distance, duration, la, lb)?,
            ),
            Rest3p1Resonant { gap, distance, duration } => {
                require(gap != 0.0, || "resonant 3+1 case needs a nonzero gap".into())?;
                let (w, l, t) = (gap, distance, duration);
                let c2 = la * lb * i() * (i() * w * l).exp() * t / (4.0 * PI * l);
                let d2 = -la * lb * (-i() * w * (l + 2.0 * t)).exp() * ((i() * 2.0 * w * t).exp() - 1.0)
                    / (8.0 * PI * w * l);
                ClosedFormValue::pair(c2, d2)
            }
            Rest1p1ZeroGap { distance, duration } => {
                require(distance > 0.0, || "L must be > 0".into())?;
                let c2 = i() * la * lb * duration * duration / 4.0;
                ClosedFormValue::pair(c2, -c2)
            }
            Rest3p1ZeroGap { distance, duration } => {
                require(distance > 0.0, || "L must be > 0".into())?;
                let c2 = i() * la * lb * duration / (4.0 * PI * distance);
                ClosedFormValue::pair(c2, -c2)
            }
            Rest2p1ZeroGap { distance, duration } => {
                let s = rest_2p1_zero_gap(distance, duration, la, lb)?;
                ClosedFormValue::pair(i() * s / 2.0, -i() * s / 2.0)
            }
            Inertial3p1 { gap_a, gap_b, distance, duration, speed } => ClosedFormValue::pair(
                inertial_c2(three, gap_a, gap_b, distance, duration, speed, la, lb)?,
                inertial_d2(three, gap_a, gap_b, distance, duration, speed, la, lb)?,
            ),
            Inertial3p1Resonant { gap_a, distance, duration, speed } => {
                let zeta = doppler_factor(speed)?;
                let gb = gap_a / zeta;
                ClosedFormValue::pair(
                    inertial_c2(three, gap_a, gb, distance, duration, speed, la, lb)?,
                    inertial_d2(three, gap_a, gb, distance, duration, speed, la, lb)?,
                )
            }
            Inertial1p1 { gap_a, gap_b, distance, duration, speed } => ClosedFormValue::pair(
                inertial_c2(one, gap_a, gap_b, distance, duration, speed, la, lb)?,
                inertial_d2(one, gap_a, gap_b, distance, duration, speed, la, lb)?,
            ),
            Accel3p1 { gap_a, gap_b, acceleration } => {
                require(acceleration > 0.0, || "a must be > 0".into())?;
                let s = accel_3p1_strength(gap_b / acceleration, gap_a / acceleration, la, lb)?;
                ClosedFormValue {
                    c2: None,
                    d2: None,
                    strength: s.value,
                    oscillation_dominated: s.oscillation_dominated,
                }
            }
            Accel1p1Limit { gap_a, gap_b, acceleration } => {
                let (c2, d2, strength) = accel_1p1(gap_a, gap_b, acceleration, la, lb)?;
                ClosedFormValue {
                    c2: Some(c2),
                    d2: Some(d2),
                    strength,
                    oscillation_dominated: false,
                }
            }
            Timelike1p1Sudden { .. } => {
                let scn = self.scenario(la, lb)?;
                let (c2, d2) = timelike_1p1(&scn.sender, &scn.receiver, &QuadratureConfig::default())?;
                ClosedFormValue::pair(c2, d2)
            }
        })
    }

    /// Scenario matching this case for the quadrature engine. The
    /// accelerated cases are infinite-switching limits and have none.
    pub fn scenario(&self, la: f64, lb: f64) -> Result<Scenario, ClosedFormError> {
        use ClosedFormCase::*;
        let rest = |dim, ga: f64, gb: f64, l: f64, t: f64| -> Result<Scenario, ClosedFormError> {
            let sender = DetectorConfig::new(
                la,
                ga,
                Worldline::rest(Position::zeros())?,
                SwitchingProfile::sudden(0.0, t)?,
            )?;
            let receiver = DetectorConfig::new(
                lb,
                gb,
                Worldline::rest(Position::new(l, 0.0, 0.0))?,
                SwitchingProfile::sudden(l, t)?,
            )?;
            Ok(Scenario::new(dim, sender, receiver)?)
        };
        let inertial = |dim, ga: f64, gb: f64, l: f64, t: f64, v: f64| -> Result<Scenario, ClosedFormError> {
            let zeta = doppler_factor(v)?;
            let sender = DetectorConfig::new(
                la,
                ga,
                Worldline::inertial(Position::new(v, 0.0, 0.0), Position::new(l, 0.0, 0.0))?,
                SwitchingProfile::sudden(0.0, t)?,
            )?;
            let receiver = DetectorConfig::new(
                lb,
                gb,
                Worldline::rest(Position::zeros())?,
                SwitchingProfile::sudden(l, zeta * t)?,
            )?;
            Ok(Scenario::new(dim, sender, receiver)?)
        };
        let (one, two, three) = (Dimension::One, Dimension::Two, Dimension::Three);
        match *self {
            Rest1p1 { gap_a, gap_b, distance, duration } => rest(one, gap_a, gap_b, distance, duration),
            Rest1p1Resonant { gap, distance, duration } => rest(one, gap, gap, distance, duration),
            Rest3p1 { gap_a, gap_b, distance, duration } => rest(three, gap_a, gap_b, distance, duration),
            Rest3p1Resonant { gap, distance, duration } => rest(three, gap, gap, distance, duration),
            Rest1p1ZeroGap { distance, duration } => rest(one, 0.0, 0.0, distance, duration),
            Rest3p1ZeroGap { distance, duration } => rest(three, 0.0, 0.0, distance, duration),
            Rest2p1ZeroGap { distance, duration } => rest(two, 0.0, 0.0, distance, duration),
            Inertial3p1 { gap_a, gap_b, distance, duration, speed } => {
                inertial(three, gap_a, gap_b, distance, duration, speed)
            }
            Inertial3p1Resonant { gap_a, distance, duration, speed } => {
                inertial(three, gap_a, gap_a / doppler_factor(speed)?, distance, duration, speed)
            }
            Inertial1p1 { gap_a, gap_b, distance, duration, speed } => {
                inertial(one, gap_a, gap_b, distance, duration, speed)
            }
            Accel3p1 { .. } | Accel1p1Limit { .. } => Err(ClosedFormError::Unsupported(
                "accelerated cases are infinite-switching limits".into(),
            )),
            Timelike1p1Sudden { gap_a, gap_b, duration_a, duration_b, separation, delay } => {
                require(delay > 0.0, || "delay must be > 0".into())?;
                let sender = DetectorConfig::new(
                    la,
                    gap_a,
                    Worldline::rest(Position::zeros())?,
                    SwitchingProfile::sudden(0.0, duration_a)?,
                )?;
                let receiver = DetectorConfig::new(
                    lb,
                    gap_b,
                    Worldline::rest(Position::new(separation, 0.0, 0.0))?,
                    SwitchingProfile::sudden(duration_a + separation.abs() + delay, duration_b)?,
                )?;
                Ok(Scenario::new(one, sender, receiver)?)
            }
        }
    }

    /// Accelerated sender with exponential switching, receiver at rest at
    /// the origin: mapped to the infinite-switching limit. The receiver may
    /// also be switched on suddenly at t = 0 in 3+1, where nothing arrives
    /// before then.
    fn recognize_accelerated(scn: &Scenario) -> Option<ClosedFormCase> {
        let (s, r) = (&scn.sender, &scn.receiver);
        let (Worldline::Accelerated { acceleration }, Worldline::Rest { position }) = (s.worldline, r.worldline) else {
            return None;
        };
        if position.norm() != 0.0 || !matches!(s.switching, SwitchingProfile::ExponentialDecay { .. }) {
            return None;
        }
        let receiver_ok = match (scn.dimension, r.switching) {
            (_, SwitchingProfile::ExponentialDecay { .. }) => true,
            (Dimension::Three, SwitchingProfile::Sudden { start, .. }) => start == 0.0,
            _ => false,
        };
        if !receiver_ok || !(s.gap > 0.0 && r.gap > 0.0) {
            return None;
        }
        let (gap_a, gap_b) = (s.gap, r.gap);
        match scn.dimension {
            Dimension::One => Some(ClosedFormCase::Accel1p1Limit { gap_a, gap_b, acceleration }),
            Dimension::Three => Some(ClosedFormCase::Accel3p1 { gap_a, gap_b, acceleration }),
            Dimension::Two => None,
        }
    }

    /// Identify a scenario built with the conventions of this module.
    pub fn recognize(scn: &Scenario) -> Option<ClosedFormCase> {
        let tol = 1e-12;
        let close = |a: f64, b: f64| (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0);
        let s = &scn.sender;
        let r = &scn.receiver;
        if let Some(case) = Self::recognize_accelerated(scn) {
            return Some(case);
        }
        let (SwitchingProfile::Sudden { start: sa, duration: da }, SwitchingProfile::Sudden { start: sb, duration: db }) =
            (s.switching, r.switching)
        else {
            return None;
        };

        if scn.dimension == Dimension::One
            && matches!(s.worldline, Worldline::Rest { .. })
            && matches!(r.worldline, Worldline::Rest { .. })
            && strictly_timelike(s, r, 1e-12).unwrap_or(false)
        {
            let (Worldline::Rest { position: xa }, Worldline::Rest { position: xb }) = (s.worldline, r.worldline) else {
                return None;
            };
            if close(sa, 0.0) && xa.norm() == 0.0 {
                let sep = xb.x;
                return Some(ClosedFormCase::Timelike1p1Sudden {
                    gap_a: s.gap,
                    gap_b: r.gap,
                    duration_a: da,
                    duration_b: db,
                    separation: sep,
                    delay: sb - da - sep.abs(),
                });
            }
        }
        if !close(sa, 0.0) {
            return None;
        }
        let dim = scn.dimension;
        match (s.worldline, r.worldline) {
            (Worldline::Rest { position: xa }, Worldline::Rest { position: xb }) => {
                let l = (xa - xb).norm();
                if !(close(sb, l) && close(db, da)) {
                    return None;
                }
                let (ga, gb) = (s.gap, r.gap);
                let t = da;
                Some(match dim {
                    Dimension::Two if ga == 0.0 && gb == 0.0 => ClosedFormCase::Rest2p1ZeroGap { distance: l, duration: t },
                    Dimension::Two => return None,
                    Dimension::One if ga == 0.0 && gb == 0.0 => ClosedFormCase::Rest1p1ZeroGap { distance: l, duration: t },
                    Dimension::Three if ga == 0.0 && gb == 0.0 => ClosedFormCase::Rest3p1ZeroGap { distance: l, duration: t },
                    Dimension::One if ga == gb => ClosedFormCase::Rest1p1Resonant { gap: ga, distance: l, duration: t },
                    Dimension::Three if ga == gb => ClosedFormCase::Rest3p1Resonant { gap: ga, distance: l, duration: t },
                    Dimension::One => ClosedFormCase::Rest1p1 { gap_a: ga, gap_b: gb, distance: l, duration: t },
                    Dimension::Three => ClosedFormCase::Rest3p1 { gap_a: ga, gap_b: gb, distance: l, duration: t },
                })
            }
            (
                Worldline::Inertial {
                    velocity,
                    position_at_zero,
                },
                Worldline::Rest { position: xb },
            ) => {
                let sep = position_at_zero - xb;
                let l = sep.norm();
                let v = velocity.norm();
                // receding along the separation axis
                if l == 0.0 || v == 0.0 || !close(velocity.dot(&sep), v * l) {
                    return None;
                }
                let zeta = doppler_factor(v).ok()?;
                if !(close(sb, l) && close(db, zeta * da)) {
                    return None;
                }
                Some(match dim {
                    Dimension::Three => ClosedFormCase::Inertial3p1 {
                        gap_a: s.gap,
                        gap_b: r.gap,
                        distance: l,
                        duration: da,
                        speed: v,
                    },
                    Dimension::One => ClosedFormCase::Inertial1p1 {
                        gap_a: s.gap,
                        gap_b: r.gap,
                        distance: l,
                        duration: da,
                        speed: v,
                    },
                    Dimension::Two => return None,
                })
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rest_3p1_resonant_modulus() {
        let c2 = rest_c2(Dimension::Three, 2.0, 2.0, 1.0, 3.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(c2.norm(), 3.0 / (4.0 * PI), epsilon = 1e-14);
    }

    #[test]
    fn zero_gap_strengths() {
        let v = ClosedFormCase::Rest3p1ZeroGap { distance: 2.0, duration: 3.0 }.evaluate(1.0, 1.0).unwrap();
        assert_relative_eq!(v.strength, 3.0 / (2.0 * PI * 2.0), epsilon = 1e-15);
        let v = ClosedFormCase::Rest1p1ZeroGap { distance: 1.0, duration: 2.0 }.evaluate(1.0, 1.0).unwrap();
        assert_relative_eq!(v.strength, 2.0, epsilon = 1e-15);
        // generic formula at zero gaps agrees with the dedicated branch
        let g = rest_c2(Dimension::One, 0.0, 0.0, 1.0, 2.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(g.im, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rest_2p1_values() {
        assert_eq!(rest_2p1_zero_gap(1.0, 0.0, 1.0, 1.0).unwrap(), 0.0);
        let s3 = 3f64.sqrt();
        let want = (2.0 * (2.0 + s3).ln() - s3) / PI;
        assert_relative_eq!(rest_2p1_zero_gap(1.0, 1.0, 1.0, 1.0).unwrap(), want, epsilon = 1e-14);
    }

    #[test]
    fn resonant_branch_is_continuous() {
        for dim in [Dimension::One, Dimension::Three] {
            let on = rest_c2(dim, 1.3, 1.3 + 1e-8, 1.0, 2.0, 1.0, 1.0).unwrap();
            let off = rest_c2(dim, 1.3, 1.3 + 1e-5, 1.0, 2.0, 1.0, 1.0).unwrap();
            assert!((on - off).norm() < 1e-4 * on.norm(), "{dim}");
            let on = rest_c2(dim, 1.3, 1.3 + 0.99e-6 / 2.0, 1.0, 2.0, 1.0, 1.0).unwrap();
            let off = rest_c2(dim, 1.3, 1.3 + 1.01e-6 / 2.0, 1.0, 2.0, 1.0, 1.0).unwrap();
            assert!((on - off).norm() < 1e-7 * on.norm(), "{dim}");
        }
    }

    #[test]
    fn resonant_formulas_match_generic_limit() {
        for (dim, case) in [
            (Dimension::One, ClosedFormCase::Rest1p1Resonant { gap: 1.7, distance: 1.5, duration: 2.5 }),
            (Dimension::Three, ClosedFormCase::Rest3p1Resonant { gap: 1.7, distance: 1.5, duration: 2.5 }),
        ] {
            let v = case.evaluate(1.0, 1.0).unwrap();
            let c2 = rest_c2(dim, 1.7, 1.7, 1.5, 2.5, 1.0, 1.0).unwrap();
            let d2 = rest_d2(dim, 1.7, 1.7, 1.5, 2.5, 1.0, 1.0).unwrap();
            assert!((v.c2.unwrap() - c2).norm() < 1e-14);
            assert!((v.d2.unwrap() - d2).norm() < 1e-14);
        }
    }

    #[test]
    fn inertial_1p1_resonant_r() {
        // at ΩB = ΩA/ζ, C2 = -λλ e^{iΩB L}/(2ΩA) (ζT + (i/ΩB)(e^{iΩB ζT} - 1))
        let (wa, l, t, v) = (2.0, 1.0, 3.0, 0.6);
        let zeta = 2.0;
        let wb = wa / zeta;
        let c2 = inertial_c2(Dimension::One, wa, wb, l, t, v, 1.0, 1.0).unwrap();
        let want = -(i() * wb * l).exp() / (2.0 * wa) * (zeta * t + i() / wb * ((i() * wb * zeta * t).exp() - 1.0));
        assert!((c2 - want).norm() < 1e-13);
    }

    #[test]
    fn inertial_3p1_small_speed_approaches_rest() {
        let c2 = inertial_c2(Dimension::Three, 1.0, 1.0 / doppler_factor(1e-3).unwrap(), 1.0, 2.0, 1e-3, 1.0, 1.0).unwrap();
        let rest = rest_c2(Dimension::Three, 1.0, 1.0, 1.0, 2.0, 1.0, 1.0).unwrap();
        assert!((c2 - rest).norm() < 5e-3 * rest.norm());
    }

    #[test]
    fn accel_1p1_strength_assembles() {
        let (c2, d2, s) = accel_1p1(1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(c2.norm() + d2.norm(), s, epsilon = 1e-13);
        // a → ∞ gives λλ/(ΩAΩB)
        let (_, _, s) = accel_1p1(1.0, 2.0, 1e4, 1.0, 1.0).unwrap();
        assert_relative_eq!(s, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn accel_3p1_reference_values() {
        // direct integration oracle (mpmath): (1,1) 0.21063..., (0.5,0.5) 0.31602...
        let v = accel_3p1_strength(1.0, 1.0, 1.0, 1.0).unwrap().value;
        assert_relative_eq!(v, 0.210_63, max_relative = 1e-4);
        let v = accel_3p1_strength(0.5, 0.5, 1.0, 1.0).unwrap().value;
        assert_relative_eq!(v, 0.316_02, max_relative = 1e-4);
        let d = accel_3p1_strength_displayed(1.0, 1.0, 1.0, 1.0).unwrap().value;
        assert_relative_eq!(d, 0.201_70, max_relative = 1e-4);
        assert!(accel_3p1_strength(1.0, 0.0, 1.0, 1.0).is_err());
        assert!(accel_3p1_strength(0.01, 1.0, 1.0, 1.0).unwrap().oscillation_dominated);
    }

    #[test]
    fn accel_3p1_large_y_is_finite() {
        let v = accel_3p1_strength(1.0, 40.0, 1.0, 1.0).unwrap().value;
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn timelike_sudden_values() {
        let wa = 2.0;
        let wb = 3.0;
        let half = |w: f64| 0.5 * 2.0 * PI / w;
        let s = timelike_1p1_sudden_strength(half(wa), half(wb), wa, wb, 1.0, 1.0);
        assert_relative_eq!(s, 4.0 / (wa * wb), epsilon = 1e-14);
        let case = ClosedFormCase::Timelike1p1Sudden {
            gap_a: wa,
            gap_b: wb,
            duration_a: 2.0 * PI / wa,
            duration_b: 1.0,
            separation: 1.0,
            delay: 0.5,
        };
        let v = case.evaluate(1.0, 1.0).unwrap();
        assert!(v.c2.unwrap().norm() < 1e-15);
    }

    #[test]
    fn recognizes_built_scenarios() {
        let cases = [
            ClosedFormCase::Rest3p1 { gap_a: 1.0, gap_b: 2.0, distance: 1.5, duration: 2.0 },
            ClosedFormCase::Rest1p1Resonant { gap: 1.0, distance: 1.5, duration: 2.0 },
            ClosedFormCase::Rest2p1ZeroGap { distance: 1.5, duration: 2.0 },
            ClosedFormCase::Inertial3p1 { gap_a: 1.0, gap_b: 2.0, distance: 1.5, duration: 2.0, speed: 0.3 },
            ClosedFormCase::Inertial1p1 { gap_a: 1.0, gap_b: 2.0, distance: 1.5, duration: 2.0, speed: 0.3 },
            ClosedFormCase::Timelike1p1Sudden {
                gap_a: 1.0,
                gap_b: 2.0,
                duration_a: 1.0,
                duration_b: 2.0,
                separation: 1.0,
                delay: 0.5,
            },
        ];
        for c in cases {
            let scn = c.scenario(1.0, 1.0).unwrap();
            let got = ClosedFormCase::recognize(&scn).unwrap();
            assert_eq!(got.name(), c.name());
            let a = c.evaluate(1.0, 1.0).unwrap().strength;
            let b = got.evaluate(1.0, 1.0).unwrap().strength;
            assert_relative_eq!(a, b, max_relative = 1e-10);
        }
    }
}
