//! Leading-order signalling between two Unruh-DeWitt detectors coupled to a
//! massless scalar field in 1+1, 2+1 and 3+1 dimensional Minkowski space.
//!
//! The crate computes the signalling coefficients C2 and D2 by adaptive
//! quadrature for arbitrary worldlines and switching profiles, provides the
//! analytic solutions of the standard scenarios as oracles, and turns the
//! coefficients into the optimal qubit channel and its capacities.

pub mod channel;
pub mod closedform;
pub mod field;
pub mod kinematics;
pub mod quadrature;
pub mod signal;
pub mod specfun;
pub mod switching;

pub use channel::{capacities, BlochVector, CapacityReport, ChannelMap, DetectorState};
pub use closedform::{ClosedFormCase, ClosedFormValue};
pub use kinematics::{Dimension, Position, Worldline};
pub use quadrature::QuadratureConfig;
pub use signal::{
    compute_c2_d2, compute_single_detector, DetectorConfig, Scenario, SignalCoefficients, SignalError,
    SingleDetectorCoefficients,
};
pub use switching::SwitchingProfile;
