use std::fmt::Write as _;

use phasemu::epr::{
    exact_correlation, run_epr, trace_to_csv, trace_to_json, EprModel, TraceMetadata,
};
use rayon::prelude::*;
use serde::Serialize;

use super::clock;
use crate::args::{EprRunArgs, EprSweepArgs, TraceFormat};
use crate::error::{write_output, CliError, CliResult};

fn check_angles(angles: &[f64]) -> CliResult {
    match angles.iter().find(|a| !a.is_finite()) {
        Some(a) => Err(CliError::Usage(format!("angles must be finite, got {a}"))),
        None => Ok(()),
    }
}

fn check_count(n: usize) -> CliResult {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    Ok(())
}

pub fn run(a: EprRunArgs) -> CliResult {
    check_angles(&[a.theta1, a.theta2])?;
    check_count(a.n)?;
    let model = EprModel::from_degrees(a.theta1, a.theta2)?;
    let clock = clock(a.scheme, a.seed);
    let trace = run_epr(&model, clock, a.start_tick, a.n)?;
    let meta = TraceMetadata::new(&model, &clock, a.start_tick, a.n);
    let body = match a.format {
        TraceFormat::Csv => trace_to_csv(&meta, &trace),
        TraceFormat::Json => trace_to_json(&meta, &trace) + "\n",
    };
    write_output(a.out.as_deref(), &body)?;

    let c = trace.last().expect("n >= 1");
    let exact = meta.exact_correlation;
    let summary = format!(
        "final c = {c}\nexact   = {exact}\n|c - exact| = {:e}\n",
        (c - exact).abs()
    );
    if a.out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct SweepRow {
    delta_deg: f64,
    theta1_deg: f64,
    theta2_deg: f64,
    start_tick: i64,
    n: usize,
    c: f64,
    exact: f64,
    deviation: f64,
}

pub fn sweep(a: EprSweepArgs) -> CliResult {
    if a.deltas.is_empty() {
        return Err(CliError::Usage("--deltas needs at least one angle difference".into()));
    }
    let mut angles = a.deltas.clone();
    angles.push(a.theta1);
    check_angles(&angles)?;
    check_count(a.n)?;
    let clock = clock(a.scheme, a.seed);
    // Points use disjoint tick ranges so no two share a clock value.
    let rows: Vec<SweepRow> = a
        .deltas
        .par_iter()
        .enumerate()
        .map(|(i, &delta)| -> Result<SweepRow, CliError> {
            let theta2 = a.theta1 + delta;
            let model = EprModel::from_degrees(a.theta1, theta2)?;
            let start_tick = i as i64 * a.n as i64;
            let c = run_epr(&model, clock, start_tick, a.n)?
                .last()
                .expect("n >= 1");
            let exact = exact_correlation(&model);
            Ok(SweepRow {
                delta_deg: delta,
                theta1_deg: a.theta1,
                theta2_deg: theta2,
                start_tick,
                n: a.n,
                c,
                exact,
                deviation: (c - exact).abs(),
            })
        })
        .collect::<Result<_, _>>()?;

    let mut table = format!(
        "{:>10} {:>16} {:>16} {:>12}\n",
        "delta_deg", "c_n", "-cos(delta)", "deviation"
    );
    for r in &rows {
        writeln!(
            table,
            "{:>10.3} {:>16.12} {:>16.12} {:>12.3e}",
            r.delta_deg, r.c, r.exact, r.deviation
        )
        .expect("string write");
    }
    print!("{table}");
    if let Some(path) = &a.json {
        let json = serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n";
        write_output(Some(path), &json)?;
    }
    Ok(())
}
