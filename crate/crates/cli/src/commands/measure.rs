use std::path::Path;

use phasemu::epr::format_significant;
use phasemu::linalg::StateVector;
use phasemu::selector::{measure_sequence, SelectorBasis};
use phasemu::spectral::{compose, Observable};
use serde::de::DeserializeOwned;

use super::clock;
use crate::args::MeasureArgs;
use crate::error::{write_output, CliError, CliResult};

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::io(path, e))
}

/// Shortest form of `x` at 12 significant digits, hiding eigensolver noise.
fn display(x: f64) -> String {
    format_significant(x, 12).parse::<f64>().unwrap_or(x).to_string()
}

/// One measurement at `--tick`. Without `--rebirth` the state's own phase
/// selects the outcome.
pub fn run(a: MeasureArgs) -> CliResult {
    let psi: StateVector = read_json(&a.state)?;
    let parts = a
        .observables
        .iter()
        .map(|p| read_json::<Observable>(p))
        .collect::<Result<Vec<_>, _>>()?;
    let composite = compose(parts)?;
    let basis = SelectorBasis::standard(composite.dim());
    let clock = clock(a.scheme, a.seed);
    let record = measure_sequence(&composite, &psi, clock, a.tick, 1, &basis, a.rebirth)?
        .pop()
        .expect("one record");

    let values: Vec<String> = record.outcome.values().iter().map(|&v| display(v)).collect();
    println!("outcome = ({})", values.join(", "));
    println!("probability = {}", display(record.probability));
    let collapsed = serde_json::to_string_pretty(&record.collapsed).expect("state serializes") + "\n";
    write_output(a.out.as_deref(), &collapsed)
}
