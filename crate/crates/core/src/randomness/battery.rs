//! Five classical uniformity tests. Each test reports a statistic and a
//! p-value; a test passes when `p >= alpha`.

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::erf::erfc;

use super::RandomnessError;

pub const MIN_BATTERY_SAMPLES: usize = 10_000;

const CHI_SQUARE_BINS: usize = 1000;
/// Hits for the gap test are values in `[0, GAP_UPPER)`.
const GAP_UPPER: f64 = 0.5;
const MAX_GAP_CLASSES: usize = 24;

type Test = fn(&[f64]) -> (f64, f64);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestResult {
    pub name: &'static str,
    pub statistic: f64,
    pub p_value: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatteryReport {
    pub n: usize,
    pub alpha: f64,
    pub results: Vec<TestResult>,
}

impl BatteryReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn result(&self, name: &str) -> Option<&TestResult> {
        self.results.iter().find(|r| r.name == name)
    }

    /// Fixed-width text table, one row per test.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<20} {:>16} {:>12}  {}\n",
            "test", "statistic", "p-value", "result"
        );
        for r in &self.results {
            out.push_str(&format!(
                "{:<20} {:>16.6} {:>12.6}  {}\n",
                r.name,
                r.statistic,
                r.p_value,
                if r.passed { "pass" } else { "FAIL" }
            ));
        }
        out.push_str(&format!(
            "n = {}, alpha = {}: {}\n",
            self.n,
            self.alpha,
            if self.all_passed() { "all passed" } else { "FAILED" }
        ));
        out
    }
}

/// Runs the battery over the first `n` values of `stream`.
pub fn run_battery(
    stream: impl IntoIterator<Item = f64>,
    n: usize,
    alpha: f64,
) -> Result<BatteryReport, RandomnessError> {
    if n < MIN_BATTERY_SAMPLES {
        return Err(RandomnessError::TooFewSamples {
            min: MIN_BATTERY_SAMPLES,
            found: n,
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(RandomnessError::BadAlpha(alpha));
    }
    let values: Vec<f64> = stream.into_iter().take(n).collect();
    if values.len() < n {
        return Err(RandomnessError::TooFewSamples {
            min: n,
            found: values.len(),
        });
    }
    if let Some(&bad) = values.iter().find(|u| !(0.0..1.0).contains(*u)) {
        return Err(RandomnessError::OutOfRange(bad));
    }

    let tests: [(&'static str, Test); 5] = [
        ("chi_square_1000", chi_square_uniformity),
        ("serial_correlation", serial_correlation),
        ("monobit", monobit),
        ("gap_0_0.5", gap_test),
        ("kolmogorov_smirnov", kolmogorov_smirnov),
    ];
    let results = tests
        .iter()
        .map(|&(name, test)| {
            let (statistic, p) = test(&values);
            let p_value = if p.is_nan() { 0.0 } else { p.clamp(0.0, 1.0) };
            TestResult {
                name,
                statistic,
                p_value,
                passed: p_value >= alpha,
            }
        })
        .collect();
    Ok(BatteryReport { n, alpha, results })
}

fn chi_square_sf(statistic: f64, df: f64) -> f64 {
    ChiSquared::new(df).map_or(0.0, |d| d.sf(statistic))
}

fn chi_square_uniformity(values: &[f64]) -> (f64, f64) {
    let mut counts = vec![0u64; CHI_SQUARE_BINS];
    for &u in values {
        let bin = ((u * CHI_SQUARE_BINS as f64) as usize).min(CHI_SQUARE_BINS - 1);
        counts[bin] += 1;
    }
    let expected = values.len() as f64 / CHI_SQUARE_BINS as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    (stat, chi_square_sf(stat, (CHI_SQUARE_BINS - 1) as f64))
}

/// Lag-1 autocorrelation; `r·√n` is asymptotically standard normal.
fn serial_correlation(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var: f64 = values.iter().map(|u| (u - mean).powi(2)).sum();
    if var == 0.0 {
        return (f64::NAN, 0.0);
    }
    let cov: f64 = values
        .windows(2)
        .map(|w| (w[0] - mean) * (w[1] - mean))
        .sum();
    let r = cov / var;
    let z = r * n.sqrt();
    (r, erfc(z.abs() / SQRT_2))
}

/// Leading bit of each value, i.e. `u >= 0.5`.
fn monobit(values: &[f64]) -> (f64, f64) {
    let sum: f64 = values
        .iter()
        .map(|&u| if u >= 0.5 { 1.0 } else { -1.0 })
        .sum();
    let s_obs = sum.abs() / (values.len() as f64).sqrt();
    (s_obs, erfc(s_obs / SQRT_2))
}

/// Gap lengths between consecutive hits in `[0, GAP_UPPER)`, binned into
/// `0..t-1` and `>= t` and compared with the geometric law.
fn gap_test(values: &[f64]) -> (f64, f64) {
    let p = GAP_UPPER;
    let mut gaps = Vec::new();
    let mut current: Option<usize> = None;
    for &u in values {
        if u < GAP_UPPER {
            if let Some(g) = current {
                gaps.push(g);
            }
            current = Some(0);
        } else if let Some(g) = current.as_mut() {
            *g += 1;
        }
    }
    let total = gaps.len() as f64;
    // Largest class count keeping every expected count at least 5.
    let classes = if total >= 10.0 {
        ((total / 5.0).ln() / (1.0 / (1.0 - p)).ln()).floor() as usize
    } else {
        0
    }
    .min(MAX_GAP_CLASSES);
    if classes < 1 {
        return (f64::NAN, 0.0);
    }
    let mut observed = vec![0u64; classes + 1];
    for g in gaps {
        observed[g.min(classes)] += 1;
    }
    let stat: f64 = observed
        .iter()
        .enumerate()
        .map(|(r, &o)| {
            let prob = if r < classes {
                p * (1.0 - p).powi(r as i32)
            } else {
                (1.0 - p).powi(classes as i32)
            };
            let e = total * prob;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    (stat, chi_square_sf(stat, classes as f64))
}

/// One-sample KS distance against U[0,1), asymptotic p-value with the
/// usual small-sample correction on the scaling.
fn kolmogorov_smirnov(values: &[f64]) -> (f64, f64) {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let lo = u - i as f64 / n;
            let hi = (i + 1) as f64 / n - u;
            lo.max(hi)
        })
        .fold(0.0, f64::max);
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    (d, kolmogorov_q(lambda))
}

/// Complementary Kolmogorov distribution `Q(λ) = P(K > λ)`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi-theta form; converges fast for small λ.
        let t = -PI * PI / (8.0 * lambda * lambda);
        let sum: f64 = (1..=20)
            .map(|k: i32| (t * ((2 * k - 1) as f64).powi(2)).exp())
            .sum();
        1.0 - (2.0 * PI).sqrt() / lambda * sum
    } else {
        let sum: f64 = (1..=100)
            .map(|k: i32| {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * (k as f64).powi(2) * lambda * lambda).exp()
            })
            .sum();
        2.0 * sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kolmogorov_q_reference_points() {
        // Q(λ) at standard quantiles: 0.10, 0.05, 0.01.
        assert!((kolmogorov_q(1.2238) - 0.10).abs() < 1e-3);
        assert!((kolmogorov_q(1.3581) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_q(1.6276) - 0.01).abs() < 1e-3);
        assert!((kolmogorov_q(0.5) - 0.9639).abs() < 1e-3);
        // Both branches agree where they meet.
        let t = -PI * PI / (8.0 * 1.18 * 1.18);
        let left = 1.0
            - (2.0 * PI).sqrt() / 1.18
                * (1..=20).map(|k: i32| (t * ((2 * k - 1) as f64).powi(2)).exp()).sum::<f64>();
        assert!((left - kolmogorov_q(1.18)).abs() < 1e-9);
    }

    #[test]
    fn rejects_short_streams_and_bad_alpha() {
        assert!(matches!(
            run_battery(std::iter::repeat(0.5), 10, 0.01),
            Err(RandomnessError::TooFewSamples { .. })
        ));
        assert!(matches!(
            run_battery(std::iter::repeat_n(0.5, 5), MIN_BATTERY_SAMPLES, 0.01),
            Err(RandomnessError::TooFewSamples { .. })
        ));
        assert!(matches!(
            run_battery(std::iter::repeat(0.5), MIN_BATTERY_SAMPLES, 1.5),
            Err(RandomnessError::BadAlpha(_))
        ));
        assert!(matches!(
            run_battery(std::iter::repeat(1.0), MIN_BATTERY_SAMPLES, 0.01),
            Err(RandomnessError::OutOfRange(_))
        ));
    }

    #[test]
    fn constant_stream_fails() {
        let report = run_battery(std::iter::repeat(0.3), 20_000, 0.001).unwrap();
        assert!(!report.result("chi_square_1000").unwrap().passed);
        assert!(!report.all_passed());
        for r in &report.results {
            assert!((0.0..=1.0).contains(&r.p_value), "{}", r.name);
        }
    }

    #[test]
    fn table_lists_every_test() {
        let report = run_battery(std::iter::repeat(0.3), 20_000, 0.001).unwrap();
        let table = report.to_table();
        for r in &report.results {
            assert!(table.contains(r.name));
        }
        assert!(table.contains("FAILED"));
    }
}
