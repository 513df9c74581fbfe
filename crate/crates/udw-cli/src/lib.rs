//! Scenario files, sweeps, CSV output, power-law fits and the acceptance
//! suite behind the `udw` binary.

pub mod config;
pub mod fit;
pub mod run;
pub mod verify;

/// Scenario files shipped with the binary, by name.
pub const PRESETS: [(&str, &str); 3] = [
    ("resonance-map", include_str!("../scenarios/resonance-map.toml")),
    ("doppler-sweep", include_str!("../scenarios/doppler-sweep.toml")),
    ("acceleration-map", include_str!("../scenarios/acceleration-map.toml")),
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}
