//! Power-law fits y = A x^k by least squares in log-log space.

use std::path::Path;

use anyhow::{bail, Context};
use statrs::distribution::{ContinuousCDF, StudentsT};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub stderr: f64,
    /// Half-width of the 95% confidence interval on the exponent.
    pub ci95: f64,
    pub r_squared: f64,
    pub n: usize,
}

pub fn power_law(x: &[f64], y: &[f64]) -> anyhow::Result<PowerLawFit> {
    if x.len() != y.len() {
        bail!("x and y have different lengths ({} vs {})", x.len(), y.len());
    }
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| a.is_finite() && b.is_finite())
        .map(|(a, b)| (*a, b.abs()))
        .collect();
    if let Some((a, b)) = pts.iter().find(|(a, b)| *a <= 0.0 || *b == 0.0) {
        bail!("power-law fit needs x > 0 and y != 0, got ({a}, {b})");
    }
    let n = pts.len();
    if n < 3 {
        bail!("need at least 3 finite points, got {n}");
    }
    let lx: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let nf = n as f64;
    let mx = lx.iter().sum::<f64>() / nf;
    let my = ly.iter().sum::<f64>() / nf;
    let sxx: f64 = lx.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        bail!("all x values are equal");
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = ly.iter().map(|v| (v - my).powi(2)).sum();
    let k = sxy / sxx;
    let c = my - k * mx;
    let rss: f64 = lx.iter().zip(&ly).map(|(a, b)| (b - c - k * a).powi(2)).sum();
    let stderr = (rss / (nf - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, nf - 2.0)?.inverse_cdf(0.975);
    Ok(PowerLawFit {
        exponent: k,
        prefactor: c.exp(),
        stderr,
        ci95: t * stderr,
        r_squared: if syy > 0.0 { 1.0 - rss / syy } else { 1.0 },
        n,
    })
}

/// Fit column `y` against column `x` of a CSV written by `run`. Rows whose
/// status is not `ok` are skipped.
pub fn fit_csv(path: &Path, y: &str, x: &str) -> anyhow::Result<PowerLawFit> {
    let mut rd = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let headers = rd.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("no column `{name}`; have {}", headers.iter().collect::<Vec<_>>().join(", ")))
    };
    let (ix, iy) = (col(x)?, col(y)?);
    let status = headers.iter().position(|h| h == "status");
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (line, rec) in rd.records().enumerate() {
        let rec = rec?;
        if status.is_some_and(|s| &rec[s] != "ok") {
            continue;
        }
        let parse = |i: usize| -> anyhow::Result<f64> {
            rec[i]
                .parse()
                .with_context(|| format!("row {}: `{}` is not a number", line + 2, &rec[i]))
        };
        xs.push(parse(ix)?);
        ys.push(parse(iy)?);
    }
    power_law(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let x: Vec<f64> = (1..=10).map(|k| k as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(-0.5)).collect();
        let f = power_law(&x, &y).unwrap();
        assert!((f.exponent + 0.5).abs() < 1e-12);
        assert!((f.prefactor - 3.0).abs() < 1e-12);
        assert!(f.ci95 < 1e-10);
    }

    #[test]
    fn noisy_interval_covers() {
        let x: Vec<f64> = (1..=20).map(|k| k as f64).collect();
        let y: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, v)| v.powi(-1) * (1.0 + 0.01 * if i % 2 == 0 { 1.0 } else { -1.0 }))
            .collect();
        let f = power_law(&x, &y).unwrap();
        assert!((f.exponent + 1.0).abs() < f.ci95);
    }

    #[test]
    fn rejects_nonpositive_x() {
        assert!(power_law(&[0.0, 1.0, 2.0], &[1.0, 1.0, 1.0]).is_err());
    }
}
