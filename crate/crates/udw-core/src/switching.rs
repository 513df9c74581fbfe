//! Switching profiles η(τ) in proper time and their coordinate-time
//! weights χ(t) = η(τ(t)) dτ/dt.

use num_complex::Complex64;
use thiserror::Error;

use crate::kinematics::Worldline;
use crate::quadrature::{exact, integrate_oscillatory, QuadratureConfig, QuadratureError};
use crate::specfun::phi1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SwitchingError {
    #[error("{what} must be finite and > 0, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("{0} must be finite")]
    NonFinite(&'static str),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SwitchingProfile {
    /// η = 1 on [start, start + duration], 0 elsewhere.
    Sudden { start: f64, duration: f64 },
    /// η = exp(-|τ|/scale).
    ExponentialDecay { scale: f64 },
    /// η = exp(-(τ - center)²/(2 width²)).
    Gaussian { center: f64, width: f64 },
}

fn positive(what: &'static str, value: f64) -> Result<(), SwitchingError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(SwitchingError::NonPositive { what, value })
    }
}

impl SwitchingProfile {
    pub fn sudden(start: f64, duration: f64) -> Result<Self, SwitchingError> {
        if !start.is_finite() {
            return Err(SwitchingError::NonFinite("start"));
        }
        positive("duration", duration)?;
        Ok(SwitchingProfile::Sudden { start, duration })
    }

    pub fn exponential(scale: f64) -> Result<Self, SwitchingError> {
        positive("scale", scale)?;
        Ok(SwitchingProfile::ExponentialDecay { scale })
    }

    pub fn gaussian(center: f64, width: f64) -> Result<Self, SwitchingError> {
        if !center.is_finite() {
            return Err(SwitchingError::NonFinite("center"));
        }
        positive("width", width)?;
        Ok(SwitchingProfile::Gaussian { center, width })
    }

    pub fn validate(&self) -> Result<(), SwitchingError> {
        match *self {
            SwitchingProfile::Sudden { start, duration } => Self::sudden(start, duration).map(|_| ()),
            SwitchingProfile::ExponentialDecay { scale } => Self::exponential(scale).map(|_| ()),
            SwitchingProfile::Gaussian { center, width } => Self::gaussian(center, width).map(|_| ()),
        }
    }

    pub fn eta(&self, tau: f64) -> f64 {
        match *self {
            SwitchingProfile::Sudden { start, duration } => {
                if tau >= start && tau <= start + duration {
                    1.0
                } else {
                    0.0
                }
            }
            SwitchingProfile::ExponentialDecay { scale } => (-tau.abs() / scale).exp(),
            SwitchingProfile::Gaussian { center, width } => {
                let u = (tau - center) / width;
                (-0.5 * u * u).exp()
            }
        }
    }

    /// χ(t) = η(τ(t)) dτ/dt.
    pub fn chi(&self, worldline: &Worldline, t: f64) -> f64 {
        self.eta(worldline.proper_time(t)) * worldline.dtau_dt(t)
    }

    pub fn is_smooth(&self) -> bool {
        !matches!(self, SwitchingProfile::Sudden { .. })
    }

    /// Proper-time interval outside of which η < cutoff.
    pub fn proper_time_support(&self, cutoff: f64) -> (f64, f64) {
        let l = (1.0 / cutoff).ln();
        match *self {
            SwitchingProfile::Sudden { start, duration } => (start, start + duration),
            SwitchingProfile::ExponentialDecay { scale } => (-scale * l, scale * l),
            SwitchingProfile::Gaussian { center, width } => {
                let h = width * (2.0 * l).sqrt();
                (center - h, center + h)
            }
        }
    }

    /// Coordinate-time image of the proper-time support. May be infinite
    /// when the conversion overflows.
    pub fn coordinate_support(&self, worldline: &Worldline, cutoff: f64) -> (f64, f64) {
        let (lo, hi) = self.proper_time_support(cutoff);
        (worldline.coordinate_time(lo), worldline.coordinate_time(hi))
    }

    /// Image under τ → -τ.
    pub fn mirrored(&self) -> Self {
        match *self {
            SwitchingProfile::Sudden { start, duration } => SwitchingProfile::Sudden {
                start: -start - duration,
                duration,
            },
            e @ SwitchingProfile::ExponentialDecay { .. } => e,
            SwitchingProfile::Gaussian { center, width } => SwitchingProfile::Gaussian { center: -center, width },
        }
    }

    /// ∫_{lo}^{hi} η(τ) e^{-iωτ} dτ, clipped to the support at `cutoff`.
    /// Analytic for sudden and exponential profiles.
    pub fn fourier_segment(
        &self,
        omega: f64,
        lo: f64,
        hi: f64,
        cfg: &QuadratureConfig,
    ) -> Result<(Complex64, f64), SwitchingError> {
        let (s0, s1) = self.proper_time_support(cfg.cutoff);
        let (a, b) = (lo.max(s0), hi.min(s1));
        if !(b > a) {
            return Ok((Complex64::new(0.0, 0.0), 0.0));
        }
        match *self {
            SwitchingProfile::Sudden { .. } => Ok((plane_wave_segment(Complex64::new(0.0, -omega), a, b), 0.0)),
            SwitchingProfile::ExponentialDecay { scale } => {
                let k = 1.0 / scale;
                let mut total = Complex64::new(0.0, 0.0);
                if a < 0.0 {
                    total += plane_wave_segment(Complex64::new(k, -omega), a, b.min(0.0));
                }
                if b > 0.0 {
                    total += plane_wave_segment(Complex64::new(-k, -omega), a.max(0.0), b);
                }
                Ok((total, 0.0))
            }
            SwitchingProfile::Gaussian { .. } => {
                let f = exact(|tau: f64| self.eta(tau) * Complex64::new(0.0, -omega * tau).exp());
                let inner = QuadratureConfig {
                    rel_tol: cfg.rel_tol.min(1e-10),
                    abs_tol: cfg.abs_tol.min(1e-15 * (b - a)),
                    ..*cfg
                };
                let est = integrate_oscillatory(f, &[a, b], |tau| omega * tau, &inner)?;
                Ok((est.value, est.abs_err))
            }
        }
    }

    /// Full Fourier transform ∫ η(τ) e^{-iωτ} dτ.
    pub fn fourier(&self, omega: f64, cfg: &QuadratureConfig) -> Result<(Complex64, f64), SwitchingError> {
        match *self {
            SwitchingProfile::ExponentialDecay { scale } => {
                let k = 1.0 / scale;
                Ok((Complex64::new(2.0 * k / (k * k + omega * omega), 0.0), 0.0))
            }
            SwitchingProfile::Gaussian { center, width } => {
                let amp = width * (2.0 * std::f64::consts::PI).sqrt() * (-0.5 * (omega * width).powi(2)).exp();
                Ok((amp * Complex64::new(0.0, -omega * center).exp(), 0.0))
            }
            SwitchingProfile::Sudden { .. } => self.fourier_segment(omega, f64::NEG_INFINITY, f64::INFINITY, cfg),
        }
    }
}

/// ∫_a^b e^{cτ} dτ = e^{ca} (b - a) φ1(c (b - a)).
fn plane_wave_segment(c: Complex64, a: f64, b: f64) -> Complex64 {
    let d = b - a;
    (c * a).exp() * d * phi1(c * d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::Position;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig {
            rel_tol: 1e-12,
            ..Default::default()
        }
    }

    #[test]
    fn sudden_boundaries_inclusive() {
        let s = SwitchingProfile::sudden(0.0, 2.0).unwrap();
        assert_eq!(s.eta(0.0), 1.0);
        assert_eq!(s.eta(2.0), 1.0);
        assert_eq!(s.eta(2.0 + 1e-12), 0.0);
    }

    #[test]
    fn exponential_full_transform_matches_segments() {
        let s = SwitchingProfile::exponential(3.0).unwrap();
        let full = s.fourier(0.7, &cfg()).unwrap().0;
        let seg = s.fourier_segment(0.7, -1e6, 1e6, &cfg()).unwrap().0;
        assert!((full - seg).norm() < 1e-10);
    }

    #[test]
    fn gaussian_numeric_matches_analytic() {
        let s = SwitchingProfile::gaussian(0.4, 0.8).unwrap();
        let full = s.fourier(2.0, &cfg()).unwrap().0;
        let seg = s.fourier_segment(2.0, -100.0, 100.0, &cfg()).unwrap().0;
        assert!((full - seg).norm() < 1e-10 * full.norm());
    }

    #[test]
    fn sudden_zero_frequency_is_duration() {
        let s = SwitchingProfile::sudden(1.0, 2.5).unwrap();
        assert!((s.fourier(0.0, &cfg()).unwrap().0 - Complex64::new(2.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn chi_includes_time_dilation() {
        let w = Worldline::inertial(Position::new(0.6, 0.0, 0.0), Position::zeros()).unwrap();
        let s = SwitchingProfile::sudden(0.0, 10.0).unwrap();
        assert!((s.chi(&w, 1.0) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SwitchingProfile::sudden(0.0, 0.0).is_err());
        assert!(SwitchingProfile::gaussian(0.0, -1.0).is_err());
        assert!(SwitchingProfile::exponential(f64::INFINITY).is_err());
    }
}
