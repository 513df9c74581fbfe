//! Leading-order qubit channel from Alice to Bob on the Bloch sphere, its
//! optimal inputs and the derived capacity measures.
//!
//! A qubit state in the (|e⟩, |g⟩) basis,
//! ρ = [[p_e, c], [c*, p_g]], has Bloch vector (2 Re c, -2 Im c, p_e - p_g).

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use thiserror::Error;

use crate::signal::SignalCoefficients;

pub type BlochVector = Vector3<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("C2 = D2 = 0: there is no signal to optimize")]
    NoSignal,
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("mixing parameter κ = {0} must lie in [0, 1]")]
    InvalidMixing(f64),
}

const STATE_TOL: f64 = 1e-12;

/// Density matrix of one detector: populations of |e⟩ and |g⟩ and the
/// coherence ⟨e|ρ|g⟩ (θ, β, γ for Alice; φ, κ, δ for Bob).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorState {
    pub excited: f64,
    pub ground: f64,
    pub coherence: Complex64,
}

impl DetectorState {
    pub fn new(excited: f64, ground: f64, coherence: Complex64) -> Result<Self, ChannelError> {
        let s = Self {
            excited,
            ground,
            coherence,
        };
        if !(excited >= -STATE_TOL && ground >= -STATE_TOL) {
            return Err(ChannelError::InvalidState(format!(
                "negative population ({excited}, {ground})"
            )));
        }
        if (excited + ground - 1.0).abs() > STATE_TOL {
            return Err(ChannelError::InvalidState(format!(
                "populations sum to {}",
                excited + ground
            )));
        }
        if coherence.norm_sqr() > excited * ground + STATE_TOL {
            return Err(ChannelError::InvalidState(format!(
                "|coherence| = {} exceeds sqrt(p_e p_g)",
                coherence.norm()
            )));
        }
        Ok(s)
    }

    pub fn ground_state() -> Self {
        Self {
            excited: 0.0,
            ground: 1.0,
            coherence: Complex64::new(0.0, 0.0),
        }
    }

    pub fn from_bloch(r: &BlochVector) -> Result<Self, ChannelError> {
        if r.norm() > 1.0 + STATE_TOL {
            return Err(ChannelError::InvalidState(format!("Bloch vector norm {} > 1", r.norm())));
        }
        Self::new((1.0 + r.z) / 2.0, (1.0 - r.z) / 2.0, Complex64::new(r.x, -r.y) / 2.0)
    }

    pub fn bloch(&self) -> BlochVector {
        BlochVector::new(2.0 * self.coherence.re, -2.0 * self.coherence.im, self.excited - self.ground)
    }

    pub fn is_pure(&self) -> bool {
        (self.bloch().norm() - 1.0).abs() <= STATE_TOL
    }
}

/// Affine Bloch map r ↦ M r + v.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelMap {
    pub m: Matrix3<f64>,
    pub v: BlochVector,
}

impl ChannelMap {
    pub fn apply(&self, r: &BlochVector) -> BlochVector {
        self.m * r + self.v
    }
}

fn phases(sc: &SignalCoefficients) -> Result<(f64, f64), ChannelError> {
    if sc.c2.norm() == 0.0 && sc.d2.norm() == 0.0 {
        return Err(ChannelError::NoSignal);
    }
    Ok((sc.c2.arg(), sc.d2.arg()))
}

/// Leading-order linear part M₂ acting on Alice's Bloch vector; the offset
/// is Bob's initial Bloch vector (the zeroth-order map).
pub fn leading_channel_matrix(sc: &SignalCoefficients, bob: &DetectorState) -> ChannelMap {
    let (c, d) = (sc.c2, sc.d2);
    let k = bob.ground - bob.excited;
    let delta = bob.coherence;
    let m = Matrix3::new(
        k * (c + d).re,
        k * (c + d).im,
        0.0,
        k * (d - c).im,
        k * (c - d).re,
        0.0,
        2.0 * (delta * (c.conj() + d)).re,
        2.0 * (delta.conj() * (c - d.conj())).im,
        0.0,
    );
    ChannelMap { m, v: bob.bloch() }
}

fn rot_z(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// M = U O Diag Oᵀ for a ground-state receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSvd {
    pub u: Matrix3<f64>,
    pub o: Matrix3<f64>,
    pub diag: Vector3<f64>,
    /// U is a rotation about Z by -φ_C.
    pub phase_c: f64,
    /// O is a rotation about Z by (φ_C + φ_D)/2.
    pub o_angle: f64,
}

impl ChannelSvd {
    pub fn reconstruct(&self) -> Matrix3<f64> {
        self.u * self.o * Matrix3::from_diagonal(&self.diag) * self.o.transpose()
    }
}

/// Decomposition of the ground-state channel block. The next-to-leading
/// singular value is zero at this order.
pub fn svd_channel(c: Complex64, d: Complex64) -> ChannelSvd {
    let (pc, pd) = (c.arg(), d.arg());
    let o_angle = (pc + pd) / 2.0;
    ChannelSvd {
        u: rot_z(-pc),
        o: rot_z(o_angle),
        diag: Vector3::new(c.norm() + d.norm(), c.norm() - d.norm(), 0.0),
        phase_c: pc,
        o_angle,
    }
}

/// ±(cos α, sin α, 0) with α = (φ_C + φ_D)/2.
pub fn optimal_alice_states(sc: &SignalCoefficients) -> Result<(BlochVector, BlochVector), ChannelError> {
    let (pc, pd) = phases(sc)?;
    let a = (pc + pd) / 2.0;
    let r = BlochVector::new(a.cos(), a.sin(), 0.0);
    Ok((r, -r))
}

/// Pure receiver state with ground population κ and arg δ = (φ_C - φ_D)/2.
pub fn optimal_bob_state(sc: &SignalCoefficients, kappa: f64) -> Result<DetectorState, ChannelError> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(ChannelError::InvalidMixing(kappa));
    }
    let (pc, pd) = phases(sc)?;
    let phi = 1.0 - kappa;
    let mag = (kappa * phi).sqrt();
    DetectorState::new(phi, kappa, Complex64::from_polar(mag, (pc - pd) / 2.0))
}

/// Half the Euclidean distance between Bloch vectors.
pub fn trace_distance(r1: &BlochVector, r2: &BlochVector) -> f64 {
    (r1 - r2).norm() / 2.0
}

/// Unit output directions ±((κ-φ)cos β, -(κ-φ)sin β, 2|δ|), β = (φ_C - φ_D)/2.
pub fn measurement_basis(sc: &SignalCoefficients, bob: &DetectorState) -> Result<(BlochVector, BlochVector), ChannelError> {
    let (pc, pd) = phases(sc)?;
    let b = (pc - pd) / 2.0;
    let k = bob.ground - bob.excited;
    let n = BlochVector::new(k * b.cos(), -k * b.sin(), 2.0 * bob.coherence.norm());
    let len = n.norm();
    if len == 0.0 {
        return Err(ChannelError::InvalidState("receiver state is maximally mixed".into()));
    }
    let n = n / len;
    Ok((n, -n))
}

fn h2(p: f64) -> f64 {
    let term = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    term(p) + term(1.0 - p)
}

/// Exact capacity (bits) of the binary channel with P(1|0) = a, P(0|1) = b.
pub fn binary_asymmetric_capacity(a: f64, b: f64) -> f64 {
    let s = 1.0 - a - b;
    if s.abs() < 1e-15 {
        return 0.0;
    }
    let z = (h2(a) - h2(b)) / s;
    let c = (1.0 + z.exp2()).log2() - ((1.0 - b) * h2(a) - a * h2(b)) / s;
    c.max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityReport {
    /// |C2| + |D2|.
    pub signal_strength: f64,
    pub trace_distance: f64,
    /// 1/2 + D/2.
    pub p_bit: f64,
    /// 1/2 + D, the printed constant.
    pub p_bit_displayed: f64,
    /// (2/ln2) D².
    pub shannon: f64,
    /// Exact capacity of the binary channel realized by the optimal
    /// leading-order states and measurement.
    pub shannon_exact: f64,
    /// -ln(P2) D²/(4 ln2), present when P2 ∈ (0, 1).
    pub holevo: Option<f64>,
    /// D < 0.1.
    pub perturbative: bool,
}

pub fn capacities(sc: &SignalCoefficients, p2: Option<f64>) -> CapacityReport {
    let d = sc.strength();
    let ln2 = std::f64::consts::LN_2;
    let holevo = match p2 {
        Some(p) if p > 0.0 && p < 1.0 => Some(-p.ln() * d * d / (4.0 * ln2)),
        Some(p) => {
            log::warn!("P2 = {p} is outside (0, 1); Holevo capacity omitted");
            None
        }
        None => None,
    };
    CapacityReport {
        signal_strength: d,
        trace_distance: d,
        p_bit: 0.5 + d / 2.0,
        p_bit_displayed: 0.5 + d,
        shannon: 2.0 / ln2 * d * d,
        shannon_exact: realized_binary_capacity(sc),
        holevo,
        perturbative: d < 0.1,
    }
}

/// Build the optimal ground-state configuration, measure Bob along the
/// output axis and return the exact capacity of the resulting binary channel.
fn realized_binary_capacity(sc: &SignalCoefficients) -> f64 {
    let Ok((r1, r2)) = optimal_alice_states(sc) else {
        return 0.0;
    };
    let bob = DetectorState::ground_state();
    let map = leading_channel_matrix(sc, &bob);
    let (o1, o2) = (map.apply(&r1), map.apply(&r2));
    let Ok((n, _)) = measurement_basis(sc, &bob) else {
        return 0.0;
    };
    let p_plus = |r: &BlochVector| ((1.0 + n.dot(r)) / 2.0).clamp(0.0, 1.0);
    // input 0 ↦ r1, input 1 ↦ r2; outcome "+" read as 0
    binary_asymmetric_capacity(1.0 - p_plus(&o1), p_plus(&o2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sc(c: Complex64, d: Complex64) -> SignalCoefficients {
        SignalCoefficients {
            c2: c,
            d2: d,
            ..SignalCoefficients::zero()
        }
    }

    #[test]
    fn ground_state_matrix_block() {
        let s = sc(Complex64::new(0.02, 0.01), Complex64::new(-0.01, 0.03));
        let m = leading_channel_matrix(&s, &DetectorState::ground_state()).m;
        let svd = svd_channel(s.c2, s.d2);
        assert!((svd.reconstruct() - m).abs().max() < 1e-15);
        assert_eq!(m.row(2).norm(), 0.0);
    }

    #[test]
    fn svd_trivial_phases() {
        let svd = svd_channel(Complex64::new(0.1, 0.0), Complex64::new(0.0, 0.0));
        assert!((svd.u - Matrix3::identity()).abs().max() < 1e-15);
        assert!((svd.o - Matrix3::identity()).abs().max() < 1e-15);
        assert_relative_eq!(svd.diag.x, 0.1);
        assert_relative_eq!(svd.diag.y, 0.1);
        let svd = svd_channel(Complex64::new(0.0, 0.1), Complex64::new(0.0, 0.1));
        assert_relative_eq!(svd.phase_c, std::f64::consts::FRAC_PI_2);
        assert_relative_eq!(svd.o_angle, std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn bob_family_endpoints() {
        let s = sc(Complex64::new(0.0, 0.02), Complex64::new(0.01, 0.0));
        let g = optimal_bob_state(&s, 1.0).unwrap();
        assert_eq!(g.bloch(), BlochVector::new(0.0, 0.0, -1.0));
        let e = optimal_bob_state(&s, 0.0).unwrap();
        assert_eq!(e.bloch(), BlochVector::new(0.0, 0.0, 1.0));
        let b = optimal_bob_state(&s, 0.3).unwrap();
        assert!(b.is_pure());
        let map = leading_channel_matrix(&s, &b);
        let (r1, _) = optimal_alice_states(&s).unwrap();
        assert_relative_eq!((map.m * r1).norm(), 0.03, epsilon = 1e-15);
    }

    #[test]
    fn measurement_examples() {
        let s = sc(Complex64::new(0.03, 0.01), Complex64::new(0.01, -0.02));
        let (n, _) = measurement_basis(&s, &DetectorState::ground_state()).unwrap();
        assert_eq!(n.z, 0.0);
        let half = optimal_bob_state(&s, 0.5).unwrap();
        let (n, _) = measurement_basis(&s, &half).unwrap();
        assert!(n.x.abs() < 1e-15 && n.y.abs() < 1e-15);
    }

    #[test]
    fn capacity_hand_values() {
        let s = sc(Complex64::new(0.06, 0.0), Complex64::new(0.0, 0.04));
        let r = capacities(&s, Some((-1.0f64).exp()));
        let ln2 = std::f64::consts::LN_2;
        assert!((r.shannon - 0.02 / ln2).abs() < 1e-12);
        assert!((r.holevo.unwrap() - 0.01 / (4.0 * ln2)).abs() < 1e-12);
        assert!((r.p_bit - 0.55).abs() < 1e-12);
        let z = capacities(&SignalCoefficients::zero(), Some(0.5));
        assert_eq!((z.p_bit, z.shannon, z.holevo), (0.5, 0.0, Some(0.0)));
        assert!(capacities(&s, Some(1.5)).holevo.is_none());
    }

    #[test]
    fn bac_matches_brute_force() {
        for &(a, b) in &[(0.1, 0.3), (0.45, 0.45), (0.02, 0.4)] {
            let mut best: f64 = 0.0;
            for k in 0..=20000 {
                let p = k as f64 / 20000.0;
                let y1 = p * (1.0 - b) + (1.0 - p) * a;
                let mi = h2(y1) - (1.0 - p) * h2(a) - p * h2(b);
                best = best.max(mi);
            }
            assert!((binary_asymmetric_capacity(a, b) - best).abs() < 1e-8);
        }
    }

    #[test]
    fn state_validation() {
        assert!(DetectorState::new(0.5, 0.6, Complex64::new(0.0, 0.0)).is_err());
        assert!(DetectorState::new(0.5, 0.5, Complex64::new(0.6, 0.0)).is_err());
        let r = BlochVector::new(0.3, -0.4, 0.5);
        let s = DetectorState::from_bloch(&r).unwrap();
        assert!((s.bloch() - r).norm() < 1e-15);
    }
}
