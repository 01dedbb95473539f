pub mod epr;
pub mod measure;
pub mod rng;
pub mod serve;

use phasemu::randomness::{ClockScheme, PhaseClock};

pub fn clock(scheme: impl Into<ClockScheme>, seed: i64) -> PhaseClock {
    match scheme.into() {
        ClockScheme::SineFold => PhaseClock::sine_fold(seed),
        ClockScheme::CounterHash => PhaseClock::counter_hash(seed),
    }
}
