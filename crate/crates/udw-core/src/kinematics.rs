//! Worldlines, proper time, Doppler factors and light-signal timing.
//!
//! Units: c = ħ = 1. Positions are stored as 3-vectors; components beyond
//! the spatial dimension of a scenario must be zero.

use std::fmt;

use nalgebra::Vector3;
use thiserror::Error;

pub type Position = Vector3<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KinematicsError {
    #[error("speed {0} is not below the speed of light")]
    Superluminal(f64),
    #[error("proper acceleration must be finite and > 0, got {0}")]
    InvalidAcceleration(f64),
    #[error("non-finite {0}")]
    NonFinite(&'static str),
    #[error("spatial dimension must be 1, 2 or 3, got {0}")]
    InvalidDimension(usize),
    #[error("{what} has a nonzero component outside {dim}")]
    OutsideDimension { what: &'static str, dim: Dimension },
    #[error("light-signal root search did not converge at t = {0}")]
    NonConvergence(f64),
}

/// Number of spatial dimensions n of the (n+1)-dimensional spacetime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    One,
    Two,
    Three,
}

impl Dimension {
    pub fn from_spatial(n: usize) -> Result<Self, KinematicsError> {
        match n {
            1 => Ok(Dimension::One),
            2 => Ok(Dimension::Two),
            3 => Ok(Dimension::Three),
            _ => Err(KinematicsError::InvalidDimension(n)),
        }
    }

    pub fn spatial(self) -> usize {
        match self {
            Dimension::One => 1,
            Dimension::Two => 2,
            Dimension::Three => 3,
        }
    }

    fn contains(self, x: &Position) -> bool {
        x.iter().skip(self.spatial()).all(|&c| c == 0.0)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+1", self.spatial())
    }
}

/// Classical trajectory of a detector, parametrized by coordinate time t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Worldline {
    Rest {
        position: Position,
    },
    /// x(t) = position_at_zero + velocity t; proper time zeroed at t = 0.
    Inertial {
        velocity: Position,
        position_at_zero: Position,
    },
    /// Hyperbolic motion along +x with proper acceleration a:
    /// t = sinh(aτ)/a, x = cosh(aτ)/a.
    Accelerated {
        acceleration: f64,
    },
}

impl Worldline {
    pub fn rest(position: Position) -> Result<Self, KinematicsError> {
        if !position.iter().all(|c| c.is_finite()) {
            return Err(KinematicsError::NonFinite("position"));
        }
        Ok(Worldline::Rest { position })
    }

    pub fn inertial(velocity: Position, position_at_zero: Position) -> Result<Self, KinematicsError> {
        if !velocity.iter().chain(position_at_zero.iter()).all(|c| c.is_finite()) {
            return Err(KinematicsError::NonFinite("velocity or position"));
        }
        let speed = velocity.norm();
        if speed >= 1.0 {
            return Err(KinematicsError::Superluminal(speed));
        }
        Ok(Worldline::Inertial {
            velocity,
            position_at_zero,
        })
    }

    pub fn accelerated(acceleration: f64) -> Result<Self, KinematicsError> {
        if !(acceleration > 0.0 && acceleration.is_finite()) {
            return Err(KinematicsError::InvalidAcceleration(acceleration));
        }
        Ok(Worldline::Accelerated { acceleration })
    }

    pub fn check_dimension(&self, dim: Dimension) -> Result<(), KinematicsError> {
        let ok = match self {
            Worldline::Rest { position } => dim.contains(position),
            Worldline::Inertial {
                velocity,
                position_at_zero,
            } => dim.contains(velocity) && dim.contains(position_at_zero),
            Worldline::Accelerated { .. } => true,
        };
        if ok {
            Ok(())
        } else {
            Err(KinematicsError::OutsideDimension {
                what: "worldline",
                dim,
            })
        }
    }

    pub fn position(&self, t: f64) -> Position {
        match *self {
            Worldline::Rest { position } => position,
            Worldline::Inertial {
                velocity,
                position_at_zero,
            } => position_at_zero + velocity * t,
            Worldline::Accelerated { acceleration: a } => Position::new((1.0 / a).hypot(t), 0.0, 0.0),
        }
    }

    /// x(t + h) - x(t) without cancellation for small h.
    pub fn displacement(&self, t: f64, h: f64) -> Position {
        match *self {
            Worldline::Rest { .. } => Position::zeros(),
            Worldline::Inertial { velocity, .. } => velocity * h,
            Worldline::Accelerated { acceleration: a } => {
                let (x0, x1) = ((1.0 / a).hypot(t), (1.0 / a).hypot(t + h));
                Position::new(h * (2.0 * t + h) / (x0 + x1), 0.0, 0.0)
            }
        }
    }

    pub fn velocity(&self, t: f64) -> Position {
        match *self {
            Worldline::Rest { .. } => Position::zeros(),
            Worldline::Inertial { velocity, .. } => velocity,
            Worldline::Accelerated { acceleration: a } => Position::new(a * t / (a * t).hypot(1.0), 0.0, 0.0),
        }
    }

    /// 1 - n̂·v(t) for a unit vector n̂, accurate when the speed approaches
    /// one along n̂ (emission towards the horizon).
    pub fn light_compression(&self, t: f64, n: &Position) -> f64 {
        let v = self.velocity(t);
        let speed = v.norm();
        if speed == 0.0 {
            return 1.0;
        }
        let deficit = match *self {
            Worldline::Accelerated { acceleration: a } => {
                let g = (a * t).hypot(1.0);
                1.0 / (g * (g + (a * t).abs()))
            }
            _ => 1.0 - speed,
        };
        // 1 - |v| cos θ = (1 - |v|) + |v| |n̂ - v̂|²/2
        deficit + speed * (n - v / speed).norm_squared() / 2.0
    }

    pub fn proper_time(&self, t: f64) -> f64 {
        match *self {
            Worldline::Rest { .. } => t,
            Worldline::Inertial { velocity, .. } => t * (1.0 - velocity.norm_squared()).sqrt(),
            Worldline::Accelerated { acceleration: a } => (a * t).asinh() / a,
        }
    }

    /// Inverse of `proper_time`. May overflow to ±∞ for accelerated motion.
    pub fn coordinate_time(&self, tau: f64) -> f64 {
        match *self {
            Worldline::Rest { .. } => tau,
            Worldline::Inertial { velocity, .. } => tau / (1.0 - velocity.norm_squared()).sqrt(),
            Worldline::Accelerated { acceleration: a } => (a * tau).sinh() / a,
        }
    }

    pub fn dtau_dt(&self, t: f64) -> f64 {
        match *self {
            Worldline::Rest { .. } => 1.0,
            Worldline::Inertial { velocity, .. } => (1.0 - velocity.norm_squared()).sqrt(),
            Worldline::Accelerated { acceleration: a } => 1.0 / (a * t).hypot(1.0),
        }
    }

    /// Image under t → -t.
    pub fn mirrored(&self) -> Self {
        match *self {
            Worldline::Rest { position } => Worldline::Rest { position },
            Worldline::Inertial {
                velocity,
                position_at_zero,
            } => Worldline::Inertial {
                velocity: -velocity,
                position_at_zero,
            },
            acc @ Worldline::Accelerated { .. } => acc,
        }
    }
}

/// Relativistic Doppler factor ζ = sqrt((1+v)/(1-v)) for a source receding
/// at speed v.
pub fn doppler_factor(v: f64) -> Result<f64, KinematicsError> {
    if !v.is_finite() {
        return Err(KinematicsError::NonFinite("speed"));
    }
    if v.abs() >= 1.0 {
        return Err(KinematicsError::Superluminal(v));
    }
    Ok(((1.0 + v) / (1.0 - v)).sqrt())
}

/// Root of g(s) = 0 for s >= 0 where g is increasing and g(0) <= 0.
/// Returns the smallest bracketing point with g >= 0, or None if g stays
/// negative up to s ~ 1e300.
fn light_root<G: Fn(f64) -> f64>(g: G, start_step: f64, at: f64) -> Result<Option<f64>, KinematicsError> {
    let g0 = g(0.0);
    if g0 >= 0.0 {
        return Ok(Some(0.0));
    }
    let mut lo = 0.0;
    let mut hi = start_step.max(1e-300);
    loop {
        let v = g(hi);
        if v.is_nan() {
            return Err(KinematicsError::NonFinite("light-signal residual"));
        }
        // a residual at rounding level of s is not a crossing: s - |Δx|
        // loses all digits when the separation grows like s (horizon)
        if v >= 0.0 && v > 64.0 * f64::EPSILON * (hi + at.abs()) {
            break;
        }
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Ok(None);
        }
    }
    for _ in 0..2200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(Some(hi));
        }
        if g(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(KinematicsError::NonConvergence(at))
}

/// Intersection of the hyperbola X² - T² = 1/a² (X > 0) with the null cone
/// of the event (tp, p), on the past (`past`) or future sheet.
///
/// With T = sinh θ/a, X = cosh θ/a and y = e^θ the null condition reduces to
/// (p_x - tp) y² - aK y + (p_x + tp) = 0, K = 1/a² + |p|² - tp².
fn hyperbola_null_cone(a: f64, tp: f64, p: &Position, past: bool) -> Option<f64> {
    let k = 1.0 / (a * a) + p.norm_squared() - tp * tp;
    let (qa, qb, qc) = (p.x - tp, a * k, p.x + tp);
    let mut roots = [f64::NAN; 2];
    if qa == 0.0 {
        roots[0] = qc / qb;
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            return None;
        }
        let q = 0.5 * (qb + qb.signum() * disc.sqrt());
        roots = [q / qa, qc / q];
    }
    roots
        .into_iter()
        .filter(|y| y.is_finite() && *y > 0.0)
        .map(|y| (y - 1.0 / y) / (2.0 * a))
        .filter(|t| if past { *t < tp } else { *t > tp })
        .reduce(|x, y| if past { x.max(y) } else { x.min(y) })
}

/// Emission time t̃ < t1 on `emitter` whose null signal reaches `receiver`
/// at coordinate time t1, i.e. t1 - t̃ = |x_recv(t1) - x_emit(t̃)|.
/// None if no past emission event exists (acceleration horizon).
pub fn retarded_emission_time(emitter: &Worldline, receiver: &Worldline, t1: f64) -> Result<Option<f64>, KinematicsError> {
    if !t1.is_finite() {
        return Err(KinematicsError::NonFinite("reception time"));
    }
    let xb = receiver.position(t1);
    if let Worldline::Accelerated { acceleration } = *emitter {
        return Ok(hyperbola_null_cone(acceleration, t1, &xb, true));
    }
    let g = |s: f64| s - (xb - emitter.position(t1 - s)).norm();
    let r0 = (xb - emitter.position(t1)).norm();
    Ok(light_root(g, r0, t1)?.map(|s| t1 - s))
}

/// Arrival time t1 > t2 on `receiver` of a null signal emitted by `emitter`
/// at t2. None if the signal never arrives.
pub fn arrival_time(emitter: &Worldline, receiver: &Worldline, t2: f64) -> Result<Option<f64>, KinematicsError> {
    if !t2.is_finite() {
        return Err(KinematicsError::NonFinite("emission time"));
    }
    let xa = emitter.position(t2);
    if let Worldline::Accelerated { acceleration } = *receiver {
        return Ok(hyperbola_null_cone(acceleration, t2, &xa, false));
    }
    let g = |s: f64| s - (receiver.position(t2 + s) - xa).norm();
    let r0 = (receiver.position(t2) - xa).norm();
    Ok(light_root(g, r0, t2)?.map(|s| t2 + s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn accelerated_proper_time_roundtrip() {
        let w = Worldline::accelerated(2.0).unwrap();
        for &t in &[-3.0, -0.1, 0.0, 0.4, 10.0] {
            assert_relative_eq!(w.coordinate_time(w.proper_time(t)), t, epsilon = 1e-12, max_relative = 1e-12);
        }
        // x² - t² = 1/a²
        let x = w.position(1.3).x;
        assert_relative_eq!(x * x - 1.3 * 1.3, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn doppler_values() {
        assert_relative_eq!(doppler_factor(0.6).unwrap(), 2.0, epsilon = 1e-15);
        assert_eq!(doppler_factor(0.0).unwrap(), 1.0);
        assert!(doppler_factor(1.0).is_err());
    }

    #[test]
    fn retarded_time_at_rest() {
        let a = Worldline::rest(Position::new(3.0, 0.0, 0.0)).unwrap();
        let b = Worldline::rest(Position::zeros()).unwrap();
        assert_relative_eq!(retarded_emission_time(&a, &b, 5.0).unwrap().unwrap(), 2.0, epsilon = 1e-14);
        assert_relative_eq!(arrival_time(&a, &b, 2.0).unwrap().unwrap(), 5.0, epsilon = 1e-14);
    }

    #[test]
    fn horizon_blocks_signals() {
        let a = Worldline::accelerated(1.0).unwrap();
        let b = Worldline::rest(Position::zeros()).unwrap();
        assert_eq!(retarded_emission_time(&a, &b, -1.0).unwrap(), None);
        assert_eq!(retarded_emission_time(&a, &b, 0.0).unwrap(), None);
        // t̃ = (t1² - 1/a²)/(2 t1)
        let t = retarded_emission_time(&a, &b, 0.25).unwrap().unwrap();
        assert_relative_eq!(t, (0.0625 - 1.0) / 0.5, epsilon = 1e-13);
    }

    #[test]
    fn hyperbola_roots_match_generic_search() {
        let acc = Worldline::accelerated(0.7).unwrap();
        let rest = Worldline::rest(Position::new(-0.4, 0.3, 0.2)).unwrap();
        for &t1 in &[0.5, 2.0, 9.0] {
            let te = retarded_emission_time(&acc, &rest, t1).unwrap().unwrap();
            let r = (rest.position(t1) - acc.position(te)).norm();
            assert_relative_eq!(t1 - te, r, max_relative = 1e-13);
        }
        for &t2 in &[-3.0, -1.0, -0.6] {
            let ta = arrival_time(&rest, &acc, t2).unwrap().unwrap();
            let r = (acc.position(ta) - rest.position(t2)).norm();
            assert_relative_eq!(ta - t2, r, max_relative = 1e-13);
        }
        // t - x > 0: beyond the horizon
        assert_eq!(arrival_time(&rest, &acc, 1.5).unwrap(), None);
        // far behind the horizon
        let te = retarded_emission_time(&acc, &Worldline::rest(Position::zeros()).unwrap(), 1e-9).unwrap();
        assert!(te.unwrap() < -1e8);
    }

    #[test]
    fn compression_near_horizon() {
        let w = Worldline::accelerated(1.0).unwrap();
        let n = Position::new(-1.0, 0.0, 0.0);
        // v = -1 in floating point, 1 - |v| = 1/(2 t²) to leading order
        assert_relative_eq!(w.light_compression(-1e10, &n), 0.5e-20, max_relative = 1e-9);
        let n2 = Position::new(0.6, 0.8, 0.0);
        let direct = 1.0 - n2.dot(&w.velocity(0.7));
        assert_relative_eq!(w.light_compression(0.7, &n2), direct, epsilon = 1e-15);
    }

    #[test]
    fn displacement_is_accurate() {
        let w = Worldline::accelerated(2.0).unwrap();
        let d = w.displacement(3.0, 1e-9).x;
        assert_relative_eq!(d, 1e-9 * w.velocity(3.0).x, max_relative = 1e-8);
        let big = w.displacement(3.0, -1.5).x;
        assert_relative_eq!(big, w.position(1.5).x - w.position(3.0).x, epsilon = 1e-14);
    }

    #[test]
    fn mirrored_inertial_flips_velocity() {
        let w = Worldline::inertial(Position::new(0.3, 0.0, 0.0), Position::new(1.0, 0.0, 0.0)).unwrap();
        let m = w.mirrored();
        assert_relative_eq!(m.position(-2.0).x, w.position(2.0).x, epsilon = 1e-15);
    }
}
