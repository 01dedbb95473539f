use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{tau_unchecked, RandomnessError, ONE_BELOW};

/// `frac(1000000·sin(i))`, evaluated in double precision.
pub fn sine_fold(i: i64) -> f64 {
    let x = 1_000_000.0 * (i as f64).sin();
    let u = x - x.floor();
    if u >= 1.0 {
        ONE_BELOW
    } else {
        u
    }
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 output number `counter` of the stream keyed by `mix64(seed)`,
/// keeping the top 53 bits as a double in `[0, 1)`.
pub fn counter_hash(seed: i64, counter: i64) -> f64 {
    let key = mix64(seed as u64);
    let h = mix64(key.wrapping_add((counter as u64).wrapping_mul(GOLDEN_GAMMA)));
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// A stateless map from integer ticks to `[0, 1)`.
pub trait Clock {
    fn value(&self, tick: i64) -> f64;

    /// The clock value pushed onto the unit circle.
    fn phase(&self, tick: i64) -> Complex64 {
        tau_unchecked(self.value(tick))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClockScheme {
    SineFold,
    CounterHash,
}

impl ClockScheme {
    pub fn name(self) -> &'static str {
        match self {
            ClockScheme::SineFold => "sine_fold",
            ClockScheme::CounterHash => "counter_hash",
        }
    }
}

impl std::str::FromStr for ClockScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sine_fold" => Ok(ClockScheme::SineFold),
            "counter_hash" => Ok(ClockScheme::CounterHash),
            other => Err(format!("unknown clock scheme `{other}`")),
        }
    }
}

/// Pseudo-random clock over integer ticks.
///
/// `sine_fold` reads `sine_fold(seed_offset + tick·tick_scale)`;
/// `counter_hash` reads `counter_hash(seed_offset, tick·tick_scale)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhaseClock {
    scheme: ClockScheme,
    seed_offset: i64,
    tick_scale: i64,
}

impl PhaseClock {
    pub fn new(scheme: ClockScheme, seed_offset: i64, tick_scale: i64) -> Result<Self, RandomnessError> {
        if tick_scale <= 0 {
            return Err(RandomnessError::BadTickScale(tick_scale));
        }
        Ok(Self {
            scheme,
            seed_offset,
            tick_scale,
        })
    }

    pub fn sine_fold(seed_offset: i64) -> Self {
        Self {
            scheme: ClockScheme::SineFold,
            seed_offset,
            tick_scale: 1,
        }
    }

    pub fn counter_hash(seed: i64) -> Self {
        Self {
            scheme: ClockScheme::CounterHash,
            seed_offset: seed,
            tick_scale: 1,
        }
    }

    pub fn scheme(&self) -> ClockScheme {
        self.scheme
    }

    pub fn seed_offset(&self) -> i64 {
        self.seed_offset
    }

    pub fn tick_scale(&self) -> i64 {
        self.tick_scale
    }

    /// Values at `start, start+1, …`.
    pub fn stream(&self, start: i64) -> impl Iterator<Item = f64> + '_ {
        (start..).map(move |t| self.value(t))
    }
}

impl Clock for PhaseClock {
    fn value(&self, tick: i64) -> f64 {
        let scaled = tick.wrapping_mul(self.tick_scale);
        match self.scheme {
            ClockScheme::SineFold => sine_fold(self.seed_offset.wrapping_add(scaled)),
            ClockScheme::CounterHash => counter_hash(self.seed_offset, scaled),
        }
    }
}

/// Weighted mean of two clocks, folded back into `[0, 1)` by taking the
/// fractional part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedClock<A, B> {
    first: A,
    second: B,
    weight: f64,
}

impl<A: Clock, B: Clock> WeightedClock<A, B> {
    /// `weight` goes to `first`, `1 - weight` to `second`.
    pub fn new(first: A, second: B, weight: f64) -> Result<Self, RandomnessError> {
        if !weight.is_finite() {
            return Err(RandomnessError::BadWeights(weight, 1.0 - weight));
        }
        Ok(Self {
            first,
            second,
            weight,
        })
    }
}

impl<A: Clock, B: Clock> Clock for WeightedClock<A, B> {
    fn value(&self, tick: i64) -> f64 {
        let mixed = self.weight * self.first.value(tick) + (1.0 - self.weight) * self.second.value(tick);
        let u = mixed - mixed.floor();
        if u >= 1.0 {
            ONE_BELOW
        } else {
            u
        }
    }
}

impl<C: Clock + ?Sized> Clock for &C {
    fn value(&self, tick: i64) -> f64 {
        (**self).value(tick)
    }
}
