//! Pseudo-random clocks and a small statistical qualification battery.
//!
//! A clock maps an integer tick to a number in `[0, 1)` without hidden
//! state: asking twice for the same tick gives the same bits. [`tau`] maps
//! such numbers onto the unit circle, which is where the measurement
//! selector consumes them.

mod battery;
mod clock;

pub use battery::{run_battery, BatteryReport, TestResult, MIN_BATTERY_SAMPLES};
pub use clock::{counter_hash, sine_fold, Clock, ClockScheme, PhaseClock, WeightedClock};

use std::f64::consts::TAU;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RandomnessError {
    #[error("value {0} is outside [0, 1)")]
    OutOfRange(f64),
    #[error("{0} is not on the unit circle")]
    NotUnitModulus(Complex64),
    #[error("battery needs at least {min} samples, got {found}")]
    TooFewSamples { min: usize, found: usize },
    #[error("significance level must lie in (0, 1), got {0}")]
    BadAlpha(f64),
    #[error("tick scale must be positive, got {0}")]
    BadTickScale(i64),
    #[error("weights must be finite and sum to 1, got {0} and {1}")]
    BadWeights(f64, f64),
}

/// Largest double below 1.
pub(crate) const ONE_BELOW: f64 = 1.0 - f64::EPSILON / 2.0;

/// `ξ ↦ exp(2πiξ)` for `ξ ∈ [0, 1)`.
pub fn tau(xi: f64) -> Result<Complex64, RandomnessError> {
    if !(0.0..1.0).contains(&xi) {
        return Err(RandomnessError::OutOfRange(xi));
    }
    Ok(tau_unchecked(xi))
}

pub(crate) fn tau_unchecked(xi: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * xi)
}

/// Inverse of [`tau`]: the argument of `z` divided by `2π`, folded into `[0, 1)`.
pub fn tau_inverse(z: Complex64) -> Result<f64, RandomnessError> {
    if !z.re.is_finite() || !z.im.is_finite() || (z.norm() - 1.0).abs() > 1e-9 {
        return Err(RandomnessError::NotUnitModulus(z));
    }
    Ok(tau_inverse_unchecked(z))
}

pub(crate) fn tau_inverse_unchecked(z: Complex64) -> f64 {
    let mut xi = z.im.atan2(z.re) / TAU;
    if xi < 0.0 {
        xi += 1.0;
    }
    // A tiny negative angle rounds up to exactly 1.
    if xi >= 1.0 {
        xi = ONE_BELOW;
    }
    xi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_quarter_points() {
        assert!((tau(0.0).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((tau(0.25).unwrap() - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((tau(0.5).unwrap() - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn tau_rejects_out_of_range() {
        assert!(tau(1.0).is_err());
        assert!(tau(-0.1).is_err());
        assert!(tau(f64::NAN).is_err());
        assert!(tau_inverse(Complex64::new(2.0, 0.0)).is_err());
    }

    #[test]
    fn tau_inverse_edges() {
        assert_eq!(tau_inverse(Complex64::new(1.0, 0.0)).unwrap(), 0.0);
        let just_below = tau_inverse(Complex64::new(1.0, -1e-300)).unwrap();
        assert!(just_below < 1.0);
        let xi = tau_inverse(tau(ONE_BELOW).unwrap()).unwrap();
        assert!(xi < 1.0 && (xi - ONE_BELOW).abs() < 1e-12);
    }
}
