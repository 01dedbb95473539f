use phasemu::randomness::{run_battery, MIN_BATTERY_SAMPLES};

use super::clock;
use crate::args::{RngScheme, RngTestArgs, Scheme};
use crate::error::{write_output, CliError, CliResult};

/// Battery over ticks `1..=n`.
pub fn test(a: RngTestArgs) -> CliResult {
    if a.n < MIN_BATTERY_SAMPLES {
        return Err(CliError::Usage(format!(
            "--n must be at least {MIN_BATTERY_SAMPLES}, got {}",
            a.n
        )));
    }
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(CliError::Usage(format!("--alpha must lie in (0, 1), got {}", a.alpha)));
    }
    let report = match a.scheme {
        RngScheme::Constant => run_battery(std::iter::repeat(0.5), a.n, a.alpha),
        RngScheme::SineFold => run_battery(clock(Scheme::SineFold, a.seed).stream(1), a.n, a.alpha),
        RngScheme::CounterHash => {
            run_battery(clock(Scheme::CounterHash, a.seed).stream(1), a.n, a.alpha)
        }
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;

    print!("{}", report.to_table());
    if let Some(path) = &a.json {
        let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
        let target = (path.as_os_str() != "-").then_some(path.as_path());
        write_output(target, &json)?;
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError::BatteryFailed)
    }
}
