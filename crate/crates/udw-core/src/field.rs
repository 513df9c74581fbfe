//! Commutator kernels of the massless scalar field and the regulated 3+1
//! vacuum Wightman function.
//!
//! Commutators are [φ(t, x), φ(t', x')] with Δt = t - t', r = |x - x'|.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::kinematics::{Dimension, Position};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("commutator evaluated on the lightcone (Δt = {dt}, r = {r})")]
    LightconeSingularity { dt: f64, r: f64 },
    #[error("separation must be finite and > 0, got {0}")]
    InvalidSeparation(f64),
    #[error("Wightman regulator must be finite and > 0, got {0}")]
    InvalidRegulator(f64),
}

/// How the commutator enters the signalling integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommutatorKernel {
    /// Function-valued kernel inside the lightcone (n = 1, 2).
    Pointwise(Dimension),
    /// Supported on the lightcone only (n = 3).
    LightconeDelta,
}

impl CommutatorKernel {
    pub fn for_dimension(dim: Dimension) -> Self {
        match dim {
            Dimension::Three => CommutatorKernel::LightconeDelta,
            d => CommutatorKernel::Pointwise(d),
        }
    }
}

/// iε regulator of the Wightman function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WightmanRegulator(f64);

impl WightmanRegulator {
    pub fn new(eps: f64) -> Result<Self, FieldError> {
        if eps > 0.0 && eps.is_finite() {
            Ok(Self(eps))
        } else {
            Err(FieldError::InvalidRegulator(eps))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// 1+1: (i/2) sgn(Δt) θ(Δt² - r²), with θ(0) = 1.
pub fn commutator_1p1(t: f64, x: &Position, t_prime: f64, x_prime: &Position) -> Complex64 {
    let dt = t - t_prime;
    let r = (x - x_prime).norm();
    if dt.abs() >= r {
        Complex64::new(0.0, 0.5 * sign(dt))
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// 2+1: (i/2π) sgn(Δt) θ(Δt² - r²) / sqrt(Δt² - r²).
pub fn commutator_2p1(t: f64, x: &Position, t_prime: f64, x_prime: &Position) -> Result<Complex64, FieldError> {
    let dt = t - t_prime;
    let r = (x - x_prime).norm();
    let gap = dt.abs() - r;
    if gap < 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if gap == 0.0 {
        return Err(FieldError::LightconeSingularity { dt, r });
    }
    let s = (gap * (dt.abs() + r)).sqrt();
    Ok(Complex64::new(0.0, sign(dt) / (2.0 * PI * s)))
}

/// 3+1: the commutator is (i/4πr)[δ(Δt - r) - δ(Δt + r)]; returns the
/// amplitude 1/(4πr) multiplying i δ(Δt - r).
pub fn lightcone_delta_amplitude_3p1(r: f64) -> Result<f64, FieldError> {
    if r > 0.0 && r.is_finite() {
        Ok(1.0 / (4.0 * PI * r))
    } else {
        Err(FieldError::InvalidSeparation(r))
    }
}

/// Regulated vacuum two-point function ⟨φ(t, x) φ(t', x')⟩ in 3+1:
/// 1/(4π²) · 1/(r² - (t - t' - iε)²).
pub fn wightman_3p1(t: f64, x: &Position, t_prime: f64, x_prime: &Position, eps: WightmanRegulator) -> Complex64 {
    let r2 = (x - x_prime).norm_squared();
    wightman_3p1_from_separation(t - t_prime, r2, eps)
}

pub(crate) fn wightman_3p1_from_separation(dt: f64, r2: f64, eps: WightmanRegulator) -> Complex64 {
    let z = Complex64::new(dt, -eps.0);
    (Complex64::new(r2, 0.0) - z * z).inv() / (4.0 * PI * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_plus_one_inside_and_outside() {
        let o = Position::zeros();
        let x = Position::new(1.0, 0.0, 0.0);
        assert_eq!(commutator_1p1(2.0, &x, 0.0, &o), Complex64::new(0.0, 0.5));
        assert_eq!(commutator_1p1(0.5, &x, 0.0, &o), Complex64::new(0.0, 0.0));
        assert_eq!(commutator_1p1(-2.0, &x, 0.0, &o), Complex64::new(0.0, -0.5));
    }

    #[test]
    fn two_plus_one_value_and_cone() {
        let o = Position::zeros();
        let k = commutator_2p1(2.0, &o, 0.0, &o).unwrap();
        assert!((k - Complex64::new(0.0, 1.0 / (4.0 * PI))).norm() < 1e-16);
        let x = Position::new(2.0, 0.0, 0.0);
        assert!(commutator_2p1(2.0, &x, 0.0, &o).is_err());
    }

    #[test]
    fn delta_amplitude() {
        assert!((lightcone_delta_amplitude_3p1(1.0).unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-17);
        assert!(lightcone_delta_amplitude_3p1(0.0).is_err());
    }

    #[test]
    fn wightman_hermiticity() {
        let eps = WightmanRegulator::new(0.1).unwrap();
        let x = Position::new(0.3, 0.1, 0.0);
        let y = Position::new(-0.2, 0.0, 0.5);
        let w12 = wightman_3p1(0.7, &x, -0.4, &y, eps);
        let w21 = wightman_3p1(-0.4, &y, 0.7, &x, eps);
        assert!((w12 - w21.conj()).norm() < 1e-15);
    }
}
