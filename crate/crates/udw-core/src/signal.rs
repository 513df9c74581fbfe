//! Numerical evaluation of the leading-order signalling coefficients C2, D2
//! and of the single-detector vacuum terms P2, Q2, R2, S2.
//!
//! The sender (Alice) emits at t2, the receiver (Bob) is read at t1 > t2:
//!
//!   C2 = λA λB ∫dt1 ∫^{t1}dt2 χA(t2) χB(t1) e^{i(ΩB τB(t1) - ΩA τA(t2))} [φ(xA(t2)), φ(xB(t1))]
//!   D2 = -λA λB ∫dt1 ∫^{t1}dt2 χA(t2) χB(t1) e^{-i(ΩB τB(t1) + ΩA τA(t2))} [φ(xA(t2)), φ(xB(t1))]

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::field::{lightcone_delta_amplitude_3p1, wightman_3p1_from_separation, FieldError, WightmanRegulator};
use crate::kinematics::{arrival_time, retarded_emission_time, Dimension, KinematicsError, Worldline};
use crate::quadrature::{
    integrate, integrate_oscillatory, CVec, Estimate, QuadValue, QuadratureConfig, QuadratureError,
};
use crate::switching::{SwitchingError, SwitchingProfile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalError {
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Switching(#[from] SwitchingError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("accuracy target missed: {0}")]
    Accuracy(String),
}

/// One detector: coupling λ, gap Ω, trajectory and switching.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    pub coupling: f64,
    pub gap: f64,
    pub worldline: Worldline,
    pub switching: SwitchingProfile,
}

impl DetectorConfig {
    pub fn new(coupling: f64, gap: f64, worldline: Worldline, switching: SwitchingProfile) -> Result<Self, SignalError> {
        let d = Self {
            coupling,
            gap,
            worldline,
            switching,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), SignalError> {
        if !self.coupling.is_finite() {
            return Err(SignalError::InvalidScenario(format!("coupling {} is not finite", self.coupling)));
        }
        if !self.gap.is_finite() {
            return Err(SignalError::InvalidScenario(format!("gap {} is not finite", self.gap)));
        }
        self.switching.validate()?;
        Ok(())
    }

    pub fn mirrored(&self) -> Self {
        Self {
            worldline: self.worldline.mirrored(),
            switching: self.switching.mirrored(),
            ..*self
        }
    }

    /// Coordinate-time interval where the switching exceeds `cutoff`.
    pub fn coordinate_window(&self, cutoff: f64) -> (f64, f64) {
        self.switching.coordinate_support(&self.worldline, cutoff)
    }
}

/// Spacetime dimension plus the two detectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub dimension: Dimension,
    pub sender: DetectorConfig,
    pub receiver: DetectorConfig,
}

impl Scenario {
    pub fn new(dimension: Dimension, sender: DetectorConfig, receiver: DetectorConfig) -> Result<Self, SignalError> {
        let s = Self {
            dimension,
            sender,
            receiver,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), SignalError> {
        self.sender.validate()?;
        self.receiver.validate()?;
        self.sender.worldline.check_dimension(self.dimension)?;
        self.receiver.worldline.check_dimension(self.dimension)?;

        // the detectors may not meet while both are switched on
        let cutoff = 1e-12;
        let (a0, a1) = self.sender.coordinate_window(cutoff);
        let (b0, b1) = self.receiver.coordinate_window(cutoff);
        let lo = a0.max(b0).max(-1e6);
        let hi = a1.min(b1).min(1e6);
        if hi >= lo {
            let n = 257;
            for k in 0..n {
                let t = lo + (hi - lo) * k as f64 / (n - 1) as f64;
                let d = (self.sender.worldline.position(t) - self.receiver.worldline.position(t)).norm();
                if d < 1e-12 {
                    return Err(SignalError::InvalidScenario(format!(
                        "worldlines coincide at t = {t} while both detectors are switched on"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Image under t → -t with sender and receiver swapped.
    pub fn mirrored(&self) -> Self {
        Self {
            dimension: self.dimension,
            sender: self.receiver.mirrored(),
            receiver: self.sender.mirrored(),
        }
    }
}

/// Receiver window that covers exactly the arrivals of the sender's
/// switching window: a sudden profile in the receiver's proper time.
pub fn null_shadow_switching(
    sender: &Worldline,
    sender_switching: &SwitchingProfile,
    receiver: &Worldline,
    cutoff: f64,
) -> Result<SwitchingProfile, SignalError> {
    let (a0, a1) = sender_switching.coordinate_support(sender, cutoff);
    if !(a0.is_finite() && a1.is_finite()) {
        return Err(SignalError::InvalidScenario(
            "null-shadow window needs a finite sender window".into(),
        ));
    }
    let t0 = arrival_time(sender, receiver, a0)?;
    let t1 = arrival_time(sender, receiver, a1)?;
    match (t0, t1) {
        (Some(t0), Some(t1)) => {
            let (s0, s1) = (receiver.proper_time(t0), receiver.proper_time(t1));
            Ok(SwitchingProfile::sudden(s0, s1 - s0)?)
        }
        _ => Err(SignalError::InvalidScenario(
            "sender window never reaches the receiver".into(),
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalCoefficients {
    pub c2: Complex64,
    pub d2: Complex64,
    pub c2_err: f64,
    pub d2_err: f64,
    pub evaluations: usize,
}

impl SignalCoefficients {
    pub fn zero() -> Self {
        Self {
            c2: Complex64::new(0.0, 0.0),
            d2: Complex64::new(0.0, 0.0),
            c2_err: 0.0,
            d2_err: 0.0,
            evaluations: 0,
        }
    }

    /// Leading-order signal strength |C2| + |D2|.
    pub fn strength(&self) -> f64 {
        self.c2.norm() + self.d2.norm()
    }

    pub fn strength_err(&self) -> f64 {
        self.c2_err + self.d2_err
    }

    /// Heuristic: corrections well below one.
    pub fn is_perturbative(&self) -> bool {
        self.strength() < 0.1
    }
}

struct Setup<'a> {
    scn: &'a Scenario,
    cfg: QuadratureConfig,
    a0: f64,
    a1: f64,
}

impl Setup<'_> {
    fn sender(&self) -> &DetectorConfig {
        &self.scn.sender
    }

    fn receiver(&self) -> &DetectorConfig {
        &self.scn.receiver
    }

    fn retarded(&self, t1: f64) -> Result<Option<f64>, KinematicsError> {
        retarded_emission_time(&self.sender().worldline, &self.receiver().worldline, t1)
    }

    fn sender_phase(&self, t2: f64) -> f64 {
        let s = self.sender();
        s.gap * s.worldline.proper_time(t2)
    }

    /// Accumulated phase used for oscillation splitting of the outer integral.
    fn outer_phase(&self, t1: f64) -> f64 {
        let r = self.receiver();
        let pb = r.gap.abs() * r.worldline.proper_time(t1);
        let s = self.sender();
        let pa = match self.retarded(t1) {
            Ok(Some(t)) => s.gap.abs() * s.worldline.proper_time(t.clamp(self.a0, self.a1)),
            _ => 0.0,
        };
        // no signal yet, or a sender window open since t = -∞
        if pa.is_finite() {
            pb + pa
        } else {
            pb
        }
    }

    /// ∫dt2 χA e^{-iΩA τA} K(t1, t2), with an error bound.
    fn inner(&self, t1: f64) -> Result<(Complex64, f64), SignalError> {
        let zero = Ok((Complex64::new(0.0, 0.0), 0.0));
        let Some(tr) = self.retarded(t1)? else {
            return zero;
        };
        let s = self.sender();
        match self.scn.dimension {
            Dimension::Three => {
                if tr < self.a0 || tr > self.a1 {
                    return zero;
                }
                let xa = s.worldline.position(tr);
                let d = self.receiver().worldline.position(t1) - xa;
                let r = d.norm();
                let amp = lightcone_delta_amplitude_3p1(r)?;
                let jac = 1.0 / s.worldline.light_compression(tr, &(d / r));
                let chi = s.switching.chi(&s.worldline, tr);
                let phase = Complex64::new(0.0, -self.sender_phase(tr)).exp();
                Ok((Complex64::new(0.0, amp * jac * chi) * phase, 0.0))
            }
            Dimension::One => {
                let top = s.worldline.proper_time(tr.min(self.a1));
                let (f, e) = s
                    .switching
                    .fourier_segment(s.gap, f64::NEG_INFINITY, top, &self.cfg)?;
                Ok((Complex64::new(0.0, 0.5) * f, 0.5 * e))
            }
            Dimension::Two => self.inner_2p1(t1, tr),
        }
    }

    fn inner_2p1(&self, t1: f64, tr: f64) -> Result<(Complex64, f64), SignalError> {
        let s = self.sender();
        if tr <= self.a0 {
            return Ok((Complex64::new(0.0, 0.0), 0.0));
        }
        let xb = self.receiver().worldline.position(t1);
        let d0 = xb - s.worldline.position(tr);
        let r_tr = d0.norm();
        // t2 = t̃ - w². With the root taken as exact, t1 - t2 - r(t2) equals
        // w² + r(t̃) - r(t2), evaluated without cancellation.
        let w_lo = (tr - self.a1).max(0.0).sqrt();
        let w_hi = (tr - self.a0).sqrt();
        let f = |w: f64| {
            let w2 = w * w;
            let t2 = tr - w2;
            let e = -s.worldline.displacement(tr, -w2);
            let d = d0 + e;
            let r = d.norm();
            let dr = if r_tr + r > 0.0 {
                -(2.0 * d0.dot(&e) + e.norm_squared()) / (r_tr + r)
            } else {
                0.0
            };
            let gap = w2 + dr;
            if !(gap > 0.0) {
                return (Complex64::new(0.0, 0.0), 0.0);
            }
            let kernel = 1.0 / (2.0 * PI * (gap * (r_tr + w2 + r)).sqrt());
            let chi = s.switching.chi(&s.worldline, t2);
            let phase = Complex64::new(0.0, -self.sender_phase(t2)).exp();
            (Complex64::new(0.0, 2.0 * w * kernel * chi) * phase, 0.0)
        };
        let est: Estimate<Complex64> = integrate_oscillatory(
            f,
            &[w_lo, w_hi],
            |w| self.sender_phase(tr - w * w),
            &self.cfg,
        )?;
        Ok((est.value, est.abs_err))
    }
}

fn sorted_points(lo: f64, hi: f64, extra: &[Option<f64>]) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    for t in extra.iter().flatten() {
        if t.is_finite() && *t > lo && *t < hi {
            pts.push(*t);
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    pts
}

/// C2 and D2 by direct quadrature of their defining integrals.
pub fn compute_c2_d2(scn: &Scenario, cfg: &QuadratureConfig) -> Result<SignalCoefficients, SignalError> {
    cfg.validate()?;
    scn.validate()?;
    let sender = &scn.sender;
    let receiver = &scn.receiver;
    let (a0, a1) = sender.coordinate_window(cfg.cutoff);
    let (b0, b1) = receiver.coordinate_window(cfg.cutoff);
    if !(b0.is_finite() && b1.is_finite()) {
        return Err(SignalError::Unsupported(
            "receiver switching window must be finite in coordinate time".into(),
        ));
    }
    if scn.dimension == Dimension::Two && !a0.is_finite() {
        return Err(SignalError::Unsupported(
            "2+1 needs a sender window with a finite start".into(),
        ));
    }

    let sw = &sender.worldline;
    let rw = &receiver.worldline;
    let contact_start = if a0.is_finite() {
        match arrival_time(sw, rw, a0)? {
            Some(t) => t,
            None => return Ok(SignalCoefficients::zero()),
        }
    } else {
        f64::NEG_INFINITY
    };
    let contact_end = if a1.is_finite() {
        arrival_time(sw, rw, a1)?.unwrap_or(f64::INFINITY)
    } else {
        f64::INFINITY
    };

    let lo = b0.max(contact_start);
    let hi = match scn.dimension {
        Dimension::Three => b1.min(contact_end),
        _ => b1,
    };
    if !(hi > lo) {
        return Ok(SignalCoefficients::zero());
    }

    // kinks of the exponential profiles at τ = 0
    let kink = |p: &SwitchingProfile, w: &Worldline| match p {
        SwitchingProfile::ExponentialDecay { .. } => Some(w.coordinate_time(0.0)),
        _ => None,
    };
    let sender_kink = match kink(&sender.switching, sw) {
        Some(t) => arrival_time(sw, rw, t)?,
        None => None,
    };
    let points = sorted_points(
        lo,
        hi,
        &[Some(contact_end), kink(&receiver.switching, rw), sender_kink],
    );

    let setup = Setup {
        scn,
        cfg: *cfg,
        a0,
        a1,
    };
    let failure = std::sync::Mutex::new(None::<SignalError>);
    let integrand = |t1: f64| -> (CVec<2>, f64) {
        match setup.inner(t1) {
            Ok((inner, err)) => {
                let chi = receiver.switching.chi(rw, t1);
                let ph = Complex64::new(0.0, receiver.gap * rw.proper_time(t1)).exp();
                let v = CVec([inner * ph * chi, inner * ph.conj() * chi]);
                (v, err * chi.abs())
            }
            Err(e) => {
                failure.lock().unwrap().get_or_insert(e);
                (CVec::<2>::zero(), 0.0)
            }
        }
    };
    let est = integrate_oscillatory(integrand, &points, |t| setup.outer_phase(t), cfg)?;
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let est = est.require_converged(cfg)?;

    let ll = sender.coupling * receiver.coupling;
    let out = SignalCoefficients {
        c2: est.value.0[0] * ll,
        d2: -est.value.0[1] * ll,
        c2_err: est.abs_err * ll.abs(),
        d2_err: est.abs_err * ll.abs(),
        evaluations: est.evaluations,
    };
    if !out.is_perturbative() {
        log::warn!(
            "signal strength {:.3e} is not small; leading-order perturbation theory may not apply",
            out.strength()
        );
    }
    Ok(out)
}

/// Vacuum-noise coefficients of a single detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleDetectorCoefficients {
    pub p2: Complex64,
    pub q2: Complex64,
    pub r2: Complex64,
    pub s2: Complex64,
    /// Richardson extrapolation error estimates in the same order.
    pub errors: [f64; 4],
}

fn single_detector_at(
    bob: &DetectorConfig,
    cfg: &QuadratureConfig,
    eps: WightmanRegulator,
) -> Result<CVec<4>, SignalError> {
    let (lo, hi) = bob.coordinate_window(cfg.cutoff);
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(SignalError::Unsupported("detector window must be finite".into()));
    }
    let w = &bob.worldline;
    let omega = bob.gap;
    let span = hi - lo;

    // breakpoints cluster geometrically around the u = 0 pole
    let mut pts = vec![-span, 0.0, span];
    let mut d = eps.value();
    while d < span {
        pts.push(d);
        pts.push(-d);
        d *= 4.0;
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let inner_cfg = *cfg;
    let failure = std::sync::Mutex::new(None::<SignalError>);
    let outer = |u: f64| -> (CVec<4>, f64) {
        let t_lo = lo + 0.5 * u.abs();
        let t_hi = hi - 0.5 * u.abs();
        if !(t_hi > t_lo) {
            return (CVec::zero(), 0.0);
        }
        let f = |t: f64| {
            let t1 = t + 0.5 * u;
            let t2 = t - 0.5 * u;
            let chi = bob.switching.chi(w, t1) * bob.switching.chi(w, t2);
            let (tau1, tau2) = (w.proper_time(t1), w.proper_time(t2));
            let r2 = (w.position(t2) - w.position(t1)).norm_squared();
            let wf = wightman_3p1_from_separation(t2 - t1, r2, eps);
            let e_minus = Complex64::new(0.0, omega * (tau1 - tau2)).exp();
            let e_sum = Complex64::new(0.0, -omega * (tau1 + tau2)).exp();
            let r_part = if u > 0.0 { 2.0 * wf.re } else { 0.0 };
            (
                CVec([
                    e_minus * wf * chi,
                    e_minus.conj() * wf * chi,
                    e_minus * r_part * chi,
                    e_sum * wf * chi,
                ]),
                0.0,
            )
        };
        let phase = |t: f64| omega.abs() * (w.proper_time(t + 0.5 * u) + w.proper_time(t - 0.5 * u));
        match integrate_oscillatory(f, &[t_lo, t_hi], phase, &inner_cfg) {
            Ok(e) => (e.value, e.abs_err),
            Err(e) => {
                failure.lock().unwrap().get_or_insert(e.into());
                (CVec::zero(), 0.0)
            }
        }
    };
    let est = integrate(outer, &pts, cfg)?;
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let l2 = bob.coupling * bob.coupling;
    Ok(CVec([
        est.value.0[0] * l2,
        -est.value.0[1] * l2,
        -est.value.0[2] * l2,
        est.value.0[3] * l2,
    ]))
}

/// P2, Q2, R2, S2 in 3+1 for a smoothly switched detector, extrapolated to
/// ε → 0 from ε, ε/2, ε/4. Convergence is enforced for P2 only; R2 may be
/// log-divergent in ε and is reported with its extrapolation spread.
pub fn compute_single_detector(
    bob: &DetectorConfig,
    dimension: Dimension,
    cfg: &QuadratureConfig,
    eps: WightmanRegulator,
) -> Result<SingleDetectorCoefficients, SignalError> {
    cfg.validate()?;
    bob.validate()?;
    if dimension != Dimension::Three {
        return Err(SignalError::Unsupported(format!(
            "single-detector coefficients need the 3+1 Wightman function, got {dimension}"
        )));
    }
    if !bob.switching.is_smooth() {
        return Err(SignalError::Unsupported(
            "sudden switching gives UV-divergent single-detector terms".into(),
        ));
    }
    let e = eps.value();
    let v0 = single_detector_at(bob, cfg, eps)?;
    let v1 = single_detector_at(bob, cfg, WightmanRegulator::new(e / 2.0)?)?;
    let v2 = single_detector_at(bob, cfg, WightmanRegulator::new(e / 4.0)?)?;

    let mut vals = [Complex64::new(0.0, 0.0); 4];
    let mut errors = [0.0; 4];
    for k in 0..4 {
        let ra = v1.0[k] * 2.0 - v0.0[k];
        let rb = v2.0[k] * 2.0 - v1.0[k];
        let r = (rb * 4.0 - ra) / 3.0;
        vals[k] = r;
        errors[k] = (r - rb).norm();
    }
    let floor = 1e-12 * bob.coupling * bob.coupling;
    if errors[0] > 1e-3 * vals[0].norm() + floor {
        return Err(SignalError::Accuracy(format!(
            "P2 ε-extrapolation unstable: value {:.6e}, spread {:.3e}",
            vals[0].re, errors[0]
        )));
    }
    Ok(SingleDetectorCoefficients {
        p2: vals[0],
        q2: vals[1],
        r2: vals[2],
        s2: vals[3],
        errors,
    })
}
