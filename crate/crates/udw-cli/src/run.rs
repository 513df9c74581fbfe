//! Evaluation of sweep points and CSV assembly.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use udw_core::channel::{
    capacities, leading_channel_matrix, measurement_basis, optimal_alice_states, optimal_bob_state,
};
use udw_core::closedform::{ClosedFormCase, ClosedFormValue};
use udw_core::field::WightmanRegulator;
use udw_core::{compute_c2_d2, compute_single_detector, SignalCoefficients};

use crate::config::{LoadedScenario, Method, OutputKind, ScenarioFile, SweepPoint};

/// Floats are written with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn columns(names: &[String], method: Method, output: OutputKind) -> Vec<String> {
    let mut cols = vec!["index".to_string()];
    cols.extend(names.iter().cloned());
    cols.push("status".into());
    let coeff = ["c2_re", "c2_im", "d2_re", "d2_im", "strength"];
    if method != Method::ClosedForm {
        cols.extend(coeff.iter().map(|s| s.to_string()));
        cols.extend(["strength_err".to_string(), "evaluations".to_string()]);
    }
    if method != Method::Quadrature {
        cols.push("cf_case".into());
        cols.extend(coeff.iter().map(|s| format!("cf_{s}")));
    }
    if method == Method::Both {
        cols.push("discrepancy".into());
    }
    if output == OutputKind::Channel {
        for v in ["alice", "bob", "meas"] {
            for c in ["x", "y", "z"] {
                cols.push(format!("{v}_{c}"));
            }
        }
        cols.extend(["kappa", "trace_distance"].map(String::from));
    }
    if output == OutputKind::Capacities {
        cols.extend(
            ["p2", "p_bit", "p_bit_displayed", "shannon", "shannon_exact", "holevo", "perturbative"].map(String::from),
        );
    }
    cols
}

struct Evaluated {
    quad: Option<SignalCoefficients>,
    closed: Option<(ClosedFormCase, ClosedFormValue)>,
    p2: Option<f64>,
}

fn closed_form(file: &ScenarioFile) -> anyhow::Result<(ClosedFormCase, ClosedFormValue)> {
    let scn = file.scenario()?;
    let case = ClosedFormCase::recognize(&scn).ok_or_else(|| anyhow::anyhow!("no closed form for this scenario"))?;
    let v = case.evaluate(scn.sender.coupling, scn.receiver.coupling)?;
    Ok((case, v))
}

fn evaluate(file: &ScenarioFile, method: Method, output: OutputKind) -> anyhow::Result<Evaluated> {
    let cfg = file.quadrature.config();
    let quad = if method != Method::ClosedForm {
        Some(compute_c2_d2(&file.scenario()?, &cfg)?)
    } else {
        None
    };
    let closed = if method != Method::Quadrature {
        Some(closed_form(file)?)
    } else {
        None
    };
    let p2 = match (output, file.channel.wightman_eps) {
        (OutputKind::Capacities, Some(eps)) => {
            let scn = file.scenario()?;
            let sd = compute_single_detector(&scn.receiver, scn.dimension, &cfg, WightmanRegulator::new(eps)?)?;
            Some(sd.p2.re)
        }
        _ => file.channel.p2,
    };
    Ok(Evaluated { quad, closed, p2 })
}

fn push_c(row: &mut Vec<String>, c: Option<Complex64>) {
    let c = c.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
    row.push(fmt_f64(c.re));
    row.push(fmt_f64(c.im));
}

fn push_v(row: &mut Vec<String>, v: &nalgebra::Vector3<f64>) {
    row.extend(v.iter().map(|x| fmt_f64(*x)));
}

fn row_for(point: &SweepPoint, method: Method, output: OutputKind, ncols: usize) -> (Vec<String>, bool) {
    let mut row = vec![point.index.to_string()];
    row.extend(point.values.iter().map(|(_, v)| fmt_f64(*v)));
    let ev = match evaluate(&point.file, method, output) {
        Ok(ev) => ev,
        Err(e) => {
            let msg = format!("error: {e:#}");
            log::error!("point {}: {msg}", point.index);
            row.push(msg);
            row.resize(ncols, String::new());
            return (row, false);
        }
    };
    row.push("ok".into());

    if let Some(q) = &ev.quad {
        push_c(&mut row, Some(q.c2));
        push_c(&mut row, Some(q.d2));
        row.push(fmt_f64(q.strength()));
        row.push(fmt_f64(q.strength_err()));
        row.push(q.evaluations.to_string());
    }
    if let Some((case, v)) = &ev.closed {
        row.push(case.name().to_string());
        push_c(&mut row, v.c2);
        push_c(&mut row, v.d2);
        row.push(fmt_f64(v.strength));
    }
    if let (Some(q), Some((_, v))) = (&ev.quad, &ev.closed) {
        let d = match (v.c2, v.d2) {
            (Some(c), Some(d)) => (q.c2 - c).norm() + (q.d2 - d).norm(),
            _ => (q.strength() - v.strength).abs(),
        };
        row.push(fmt_f64(d));
    }

    // channel quantities use the quadrature coefficients when present
    let coeffs = ev.quad.or_else(|| {
        let (_, v) = ev.closed.as_ref()?;
        Some(SignalCoefficients {
            c2: v.c2?,
            d2: v.d2?,
            ..SignalCoefficients::zero()
        })
    });
    if output == OutputKind::Channel {
        let nan = nalgebra::Vector3::repeat(f64::NAN);
        let kappa = point.file.channel.kappa;
        let mut alice = nan;
        let mut bob = nan;
        let mut meas = nan;
        let mut td = f64::NAN;
        if let Some(sc) = &coeffs {
            if let (Ok((r1, r2)), Ok(b)) = (optimal_alice_states(sc), optimal_bob_state(sc, kappa)) {
                let map = leading_channel_matrix(sc, &b);
                alice = r1;
                bob = b.bloch();
                td = udw_core::channel::trace_distance(&map.apply(&r1), &map.apply(&r2));
                if let Ok((n, _)) = measurement_basis(sc, &b) {
                    meas = n;
                }
            }
        }
        push_v(&mut row, &alice);
        push_v(&mut row, &bob);
        push_v(&mut row, &meas);
        row.push(fmt_f64(kappa));
        row.push(fmt_f64(td));
    }
    if output == OutputKind::Capacities {
        let sc = coeffs.unwrap_or_else(|| {
            let s = ev.closed.as_ref().map_or(f64::NAN, |(_, v)| v.strength);
            // strength-only closed forms: put it all into C2
            SignalCoefficients {
                c2: Complex64::new(s, 0.0),
                ..SignalCoefficients::zero()
            }
        });
        let r = capacities(&sc, ev.p2);
        row.push(fmt_f64(ev.p2.unwrap_or(f64::NAN)));
        for x in [r.p_bit, r.p_bit_displayed, r.shannon, r.shannon_exact] {
            row.push(fmt_f64(x));
        }
        row.push(fmt_f64(r.holevo.unwrap_or(f64::NAN)));
        row.push(r.perturbative.to_string());
    }
    debug_assert_eq!(row.len(), ncols);
    (row, true)
}

/// Outcome of a run: number of rows and whether every row succeeded.
pub struct RunSummary {
    pub rows: usize,
    pub failures: usize,
}

/// Evaluate all sweep points on a pool of `threads` workers and write the
/// CSV in sweep order.
pub fn run<W: Write>(
    loaded: &LoadedScenario,
    method_override: Option<Method>,
    threads: usize,
    out: W,
) -> anyhow::Result<RunSummary> {
    let method = method_override.unwrap_or(loaded.file.method);
    let output = loaded.file.output;
    let points = loaded.points()?;
    let header = columns(&loaded.sweep_names(), method, output);
    let ncols = header.len();

    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    let rows: Vec<(Vec<String>, bool)> =
        pool.install(|| points.par_iter().map(|p| row_for(p, method, output, ncols)).collect());

    let mut w = csv::Writer::from_writer(out);
    w.write_record(&header)?;
    let mut failures = 0;
    for (row, ok) in &rows {
        if !ok {
            failures += 1;
        }
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(RunSummary {
        rows: rows.len(),
        failures,
    })
}
