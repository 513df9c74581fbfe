//! Scenario files: TOML with one table per detector, an optional
//! quadrature table, an optional channel table and any number of `[[sweep]]`
//! blocks. Times and distances share one unit; gaps are in inverse time.

use serde::Deserialize;
use thiserror::Error;
use toml::{Table, Value};

use udw_core::signal::null_shadow_switching;
use udw_core::{DetectorConfig, Dimension, Position, QuadratureConfig, Scenario, SignalError, SwitchingProfile, Worldline};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Parse(String),
    #[error("line {line}: sweep parameter `{path}`: {reason}")]
    Sweep { line: usize, path: String, reason: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Quadrature,
    ClosedForm,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    #[default]
    Coefficients,
    Channel,
    Capacities,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    /// Number of spatial dimensions: 1, 2 or 3.
    pub dimension: usize,
    #[serde(default)]
    pub method: Method,
    #[serde(default)]
    pub output: OutputKind,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    pub detector_a: DetectorSection,
    pub detector_b: DetectorSection,
    #[serde(default)]
    pub channel: ChannelSection,
    #[serde(default)]
    pub sweep: Vec<SweepSection>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_depth: Option<u32>,
    pub points_per_period: Option<u32>,
    pub cutoff: Option<f64>,
}

impl QuadratureSection {
    pub fn config(&self) -> QuadratureConfig {
        let d = QuadratureConfig::default();
        QuadratureConfig {
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            max_depth: self.max_depth.unwrap_or(d.max_depth),
            points_per_period: self.points_per_period.unwrap_or(d.points_per_period),
            cutoff: self.cutoff.unwrap_or(d.cutoff),
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSection {
    #[serde(default = "one")]
    pub coupling: f64,
    pub gap: f64,
    pub worldline: WorldlineDef,
    pub switching: SwitchingDef,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WorldlineDef {
    Rest {
        #[serde(default)]
        position: [f64; 3],
    },
    Inertial {
        velocity: [f64; 3],
        /// Position at t = 0.
        #[serde(default)]
        position: [f64; 3],
    },
    /// Hyperbolic motion x = sqrt(1/a² + t²) along +x.
    Accelerated { acceleration: f64 },
}

impl WorldlineDef {
    fn build(&self) -> Result<Worldline, SignalError> {
        let p = |a: &[f64; 3]| Position::new(a[0], a[1], a[2]);
        Ok(match self {
            WorldlineDef::Rest { position } => Worldline::rest(p(position))?,
            WorldlineDef::Inertial { velocity, position } => Worldline::inertial(p(velocity), p(position))?,
            WorldlineDef::Accelerated { acceleration } => Worldline::accelerated(*acceleration)?,
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SwitchingDef {
    /// On for proper times [start, start + duration].
    Sudden { start: f64, duration: f64 },
    Exponential { scale: f64 },
    Gaussian { center: f64, width: f64 },
    /// Receiver only: exactly the arrival window of the sender's signals.
    NullShadow,
}

impl SwitchingDef {
    fn build(&self) -> Result<Option<SwitchingProfile>, SignalError> {
        Ok(Some(match *self {
            SwitchingDef::Sudden { start, duration } => SwitchingProfile::sudden(start, duration)?,
            SwitchingDef::Exponential { scale } => SwitchingProfile::exponential(scale)?,
            SwitchingDef::Gaussian { center, width } => SwitchingProfile::gaussian(center, width)?,
            SwitchingDef::NullShadow => return Ok(None),
        }))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    /// Ground-state population of the receiver's initial state.
    #[serde(default = "one")]
    pub kappa: f64,
    /// Receiver excitation probability for the Holevo bound.
    pub p2: Option<f64>,
    /// When set, P2 is computed with this Wightman regulator (3+1, smooth
    /// receiver switching) instead of being read from `p2`.
    pub wightman_eps: Option<f64>,
}

impl Default for ChannelSection {
    fn default() -> Self {
        Self {
            kappa: 1.0,
            p2: None,
            wightman_eps: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridScale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Dotted path into this file, e.g. `detector_b.gap` or
    /// `detector_a.worldline.velocity.0`.
    pub parameter: String,
    pub values: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub num: Option<usize>,
    #[serde(default)]
    pub scale: GridScale,
}

impl SweepSection {
    pub fn grid(&self) -> Result<Vec<f64>, String> {
        let grid = match (&self.values, self.start, self.stop, self.num) {
            (Some(v), None, None, None) => v.clone(),
            (None, Some(a), Some(b), Some(n)) => {
                if n == 0 {
                    return Err("num must be >= 1".into());
                }
                if self.scale == GridScale::Log && !(a > 0.0 && b > 0.0) {
                    return Err("log grids need positive start and stop".into());
                }
                (0..n)
                    .map(|k| {
                        let f = if n == 1 { 0.0 } else { k as f64 / (n - 1) as f64 };
                        match self.scale {
                            GridScale::Linear => a + (b - a) * f,
                            GridScale::Log => a * (b / a).powf(f),
                        }
                    })
                    .collect()
            }
            _ => return Err("give either `values` or all of `start`, `stop`, `num`".into()),
        };
        if grid.is_empty() {
            return Err("empty grid".into());
        }
        if let Some(x) = grid.iter().find(|x| !x.is_finite()) {
            return Err(format!("grid value {x} is not finite"));
        }
        Ok(grid)
    }
}

/// A parsed file plus the raw table used to apply sweep overrides.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub file: ScenarioFile,
    raw: Table,
    text: String,
}

/// One point of the Cartesian product of all sweeps, in file order with the
/// first sweep varying slowest.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub index: usize,
    pub values: Vec<(String, f64)>,
    pub file: ScenarioFile,
}

fn line_of(text: &str, needle: &str) -> usize {
    text.lines().position(|l| l.contains(needle)).map_or(0, |i| i + 1)
}

fn set_path(table: &mut Table, path: &str, value: f64) -> Result<(), String> {
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err("empty path segment".into());
    }
    if parts[0] == "sweep" {
        return Err("sweep blocks cannot be swept".into());
    }
    let mut cur: &mut Value = table
        .get_mut(parts[0])
        .ok_or_else(|| format!("no key `{}` in the file", parts[0]))?;
    for part in &parts[1..] {
        cur = match cur {
            Value::Table(t) => t.get_mut(*part).ok_or_else(|| format!("no key `{part}` in the file"))?,
            Value::Array(a) => {
                let i: usize = part.parse().map_err(|_| format!("`{part}` is not an array index"))?;
                let n = a.len();
                a.get_mut(i).ok_or_else(|| format!("index {i} out of range (length {n})"))?
            }
            _ => return Err(format!("`{part}` addresses inside a scalar")),
        };
    }
    match cur {
        Value::Float(_) | Value::Integer(_) => {
            *cur = Value::Float(value);
            Ok(())
        }
        other => Err(format!("target is a {}, not a number", other.type_str())),
    }
}

impl LoadedScenario {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let raw: Table = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let loaded = Self {
            file,
            raw,
            text: text.to_string(),
        };
        Dimension::from_spatial(loaded.file.dimension).map_err(|e| ConfigError::Invalid(format!("dimension: {e}")))?;
        loaded
            .file
            .quadrature
            .config()
            .validate()
            .map_err(|e| ConfigError::Invalid(format!("quadrature: {e}")))?;
        // every sweep must resolve on the base file
        for s in &loaded.file.sweep {
            let err = |reason: String| ConfigError::Sweep {
                line: line_of(text, &s.parameter),
                path: s.parameter.clone(),
                reason,
            };
            let grid = s.grid().map_err(err)?;
            let mut t = loaded.raw.clone();
            set_path(&mut t, &s.parameter, grid[0]).map_err(err)?;
        }
        Ok(loaded)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn sweep_names(&self) -> Vec<String> {
        self.file.sweep.iter().map(|s| s.parameter.clone()).collect()
    }

    pub fn points(&self) -> Result<Vec<SweepPoint>, ConfigError> {
        let grids: Vec<Vec<f64>> = self
            .file
            .sweep
            .iter()
            .map(|s| s.grid().map_err(ConfigError::Invalid))
            .collect::<Result<_, _>>()?;
        let total: usize = grids.iter().map(Vec::len).product();
        let mut out = Vec::with_capacity(total);
        for index in 0..total {
            let mut rem = index;
            let mut values = vec![0.0; grids.len()];
            for (k, g) in grids.iter().enumerate().rev() {
                values[k] = g[rem % g.len()];
                rem /= g.len();
            }
            let mut t = self.raw.clone();
            let mut named = Vec::with_capacity(values.len());
            for (s, &v) in self.file.sweep.iter().zip(&values) {
                set_path(&mut t, &s.parameter, v).map_err(|reason| ConfigError::Sweep {
                    line: line_of(&self.text, &s.parameter),
                    path: s.parameter.clone(),
                    reason,
                })?;
                named.push((s.parameter.clone(), v));
            }
            let file: ScenarioFile = Value::Table(t)
                .try_into()
                .map_err(|e: toml::de::Error| ConfigError::Invalid(e.to_string()))?;
            out.push(SweepPoint {
                index,
                values: named,
                file,
            });
        }
        Ok(out)
    }
}

impl ScenarioFile {
    /// Core scenario for this file; the receiver may take the null-shadow
    /// window of the sender.
    pub fn scenario(&self) -> Result<Scenario, SignalError> {
        let dim = Dimension::from_spatial(self.dimension)?;
        let cutoff = self.quadrature.config().cutoff;
        let a = &self.detector_a;
        let b = &self.detector_b;
        let wa = a.worldline.build()?;
        let wb = b.worldline.build()?;
        let sa = a.switching.build()?.ok_or_else(|| {
            SignalError::InvalidScenario("null_shadow switching is only valid for detector_b".into())
        })?;
        let sb = match b.switching.build()? {
            Some(s) => s,
            None => null_shadow_switching(&wa, &sa, &wb, cutoff)?,
        };
        Scenario::new(
            dim,
            DetectorConfig::new(a.coupling, a.gap, wa, sa)?,
            DetectorConfig::new(b.coupling, b.gap, wb, sb)?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
dimension = 3
method = "both"

[detector_a]
gap = 1.0
worldline = { kind = "rest" }
switching = { kind = "sudden", start = 0.0, duration = 7.5 }

[detector_b]
gap = 1.0
worldline = { kind = "rest", position = [1.0, 0.0, 0.0] }
switching = { kind = "null_shadow" }

[[sweep]]
parameter = "detector_a.gap"
start = 0.5
stop = 1.5
num = 3

[[sweep]]
parameter = "detector_b.worldline.position.0"
values = [1.0, 2.0]
"#;

    #[test]
    fn cartesian_product_in_order() {
        let l = LoadedScenario::parse(BASE).unwrap();
        let pts = l.points().unwrap();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[1].values[0].1, 0.5);
        assert_eq!(pts[1].values[1].1, 2.0);
        assert_eq!(pts[5].file.detector_a.gap, 1.5);
        let scn = pts[1].file.scenario().unwrap();
        match scn.receiver.switching {
            SwitchingProfile::Sudden { start, duration } => {
                assert!((start - 2.0).abs() < 1e-14 && (duration - 7.5).abs() < 1e-14);
            }
            other => panic!("expected a sudden window, got {other:?}"),
        }
    }

    #[test]
    fn unknown_field_reports_line() {
        let bad = BASE.replace("gap = 1.0\nworldline = { kind = \"rest\" }", "gapp = 1.0\nworldline = { kind = \"rest\" }");
        let e = LoadedScenario::parse(&bad).unwrap_err().to_string();
        assert!(e.contains("gapp") && e.contains("line"), "{e}");
    }

    #[test]
    fn bad_sweep_path() {
        let bad = BASE.replace("detector_b.worldline.position.0", "detector_b.worldline.position.7");
        let e = LoadedScenario::parse(&bad).unwrap_err();
        assert!(matches!(e, ConfigError::Sweep { line: 22, .. }), "{e}");
    }

    #[test]
    fn integer_literals_accepted() {
        let s = BASE.replace("position = [1.0, 0.0, 0.0]", "position = [1, 0, 0]");
        assert!(LoadedScenario::parse(&s).is_ok());
    }
}
