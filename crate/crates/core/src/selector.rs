//! Deterministic outcome selection.
//!
//! The outcome of measuring a composite observable on a state vector is a
//! function of the vector itself, global phase included:
//!
//! 1. [`theta`] extracts a unit-modulus number from the vector. It is
//!    equivariant: `Θ(ωψ) = ωΘ(ψ)`.
//! 2. [`tau_inverse`](crate::randomness::tau_inverse) turns it into `ξ ∈ [0, 1)`.
//! 3. [`OutcomeDistribution::rho`] maps `ξ` through a step function whose
//!    steps have the Born probabilities as their lengths.
//!
//! Because the phase of every new or collapsed vector is set from a
//! pseudo-random clock ([`birth_phase`], [`collapse`]), repeated
//! measurements reproduce Born statistics while each single result is fully
//! determined.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::linalg::{inner_product, normalize, ComplexMatrix, LinalgError, StateVector};
use crate::randomness::{tau_inverse_unchecked, Clock};
use crate::spectral::{CompositeObservable, SpectralError};

/// Outcomes with probability at or below this are dropped.
pub const ZERO_TOL: f64 = 1e-12;
/// Allowed deviation of the total probability from 1.
pub const TOTAL_PROB_TOL: f64 = 1e-9;
/// Allowed imaginary part of `⟨ψ, Πψ⟩`.
pub const IMAG_TOL: f64 = 1e-10;
pub const ORTHONORMAL_TOL: f64 = 1e-10;

// Joint projectors whose entries are all below this are structural zeros.
const NULL_PROJECTOR: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SelectorError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("⟨ψ, Πψ⟩ has imaginary part {0:e}; projector is not Hermitian")]
    ImaginaryProbability(f64),
    #[error("probabilities sum to {0}, not 1; projector family is broken")]
    ProbabilityLeak(f64),
    #[error("vanishing projection: outcome {outcome:?} has probability {probability:e}")]
    VanishingProjection { outcome: Vec<f64>, probability: f64 },
    #[error("basis vectors are not orthonormal (max |⟨φ_i, φ_j⟩ - δ_ij| = {0:e})")]
    NotOrthonormal(f64),
    #[error("zero vector has no phase")]
    ZeroVector,
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("measurement count must be at least 1")]
    EmptySequence,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Tuple of eigenvalues, one per part of a composite observable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Outcome(pub Vec<f64>);

impl Outcome {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Component-wise numeric comparison.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl From<Vec<f64>> for Outcome {
    fn from(v: Vec<f64>) -> Self {
        Outcome(v)
    }
}

/// Nonzero-probability outcomes in lexicographic order together with the
/// partition `0 = y_0 < y_1 < … < y_n = 1` of `[0, 1)` into the intervals
/// `[y_{i-1}, y_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    outcomes: Vec<Outcome>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl OutcomeDistribution {
    /// Builds the table from `(outcome, probability)` pairs. Pairs at or
    /// below [`ZERO_TOL`] are dropped, the rest sorted lexicographically.
    pub fn from_probabilities(pairs: Vec<(Outcome, f64)>) -> Result<Self, SelectorError> {
        if pairs.iter().any(|(_, p)| !p.is_finite() || *p < -ZERO_TOL) {
            return Err(SelectorError::InvalidDistribution(
                "probabilities must be finite and non-negative".into(),
            ));
        }
        let total: f64 = pairs.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > TOTAL_PROB_TOL {
            return Err(SelectorError::ProbabilityLeak(total));
        }
        let mut kept: Vec<(Outcome, f64)> = pairs.into_iter().filter(|(_, p)| *p > ZERO_TOL).collect();
        kept.sort_by(|a, b| a.0.lex_cmp(&b.0));
        if kept.windows(2).any(|w| w[0].0.lex_cmp(&w[1].0) == Ordering::Equal) {
            return Err(SelectorError::InvalidDistribution("duplicate outcome".into()));
        }

        let mut cumulative = Vec::with_capacity(kept.len() + 1);
        cumulative.push(0.0);
        let mut y = 0.0;
        for (_, p) in &kept {
            y += p;
            cumulative.push(y);
        }
        *cumulative.last_mut().expect("at least y_0") = 1.0;

        let (outcomes, probs) = kept.into_iter().unzip();
        Ok(Self {
            outcomes,
            probs,
            cumulative,
        })
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Boundaries `y_0 ..= y_n`.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// The half-open interval `[y_{i-1}, y_i)` of outcome `i` (0-based).
    pub fn interval(&self, i: usize) -> (f64, f64) {
        (self.cumulative[i], self.cumulative[i + 1])
    }

    pub fn probability_of(&self, outcome: &Outcome) -> f64 {
        self.index_of(outcome).map_or(0.0, |i| self.probs[i])
    }

    pub fn index_of(&self, outcome: &Outcome) -> Option<usize> {
        self.outcomes
            .binary_search_by(|o| o.lex_cmp(outcome))
            .ok()
    }

    /// Index of the interval containing `xi`; boundaries belong to the
    /// interval on their right.
    pub fn rho_index(&self, xi: f64) -> usize {
        let hits = self.cumulative[1..].partition_point(|&y| y <= xi);
        hits.min(self.outcomes.len() - 1)
    }

    /// The step map `[0, 1) → outcomes`.
    pub fn rho(&self, xi: f64) -> &Outcome {
        &self.outcomes[self.rho_index(xi)]
    }
}

/// Free-function form of [`OutcomeDistribution::rho`].
pub fn rho(dist: &OutcomeDistribution, xi: f64) -> &Outcome {
    dist.rho(xi)
}

/// Orthonormal basis used by [`theta`].
#[derive(Clone, Debug, PartialEq)]
pub enum SelectorBasis {
    /// The computational basis `e_1, …, e_d`.
    Standard(usize),
    Custom(Vec<Vec<Complex64>>),
}

impl SelectorBasis {
    pub fn standard(dim: usize) -> Self {
        SelectorBasis::Standard(dim)
    }

    /// Validates that the vectors form an orthonormal basis.
    pub fn custom(vectors: Vec<Vec<Complex64>>) -> Result<Self, SelectorError> {
        let dim = vectors.len();
        if dim == 0 {
            return Err(SelectorError::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        let mut worst: f64 = 0.0;
        for (i, u) in vectors.iter().enumerate() {
            if u.len() != dim {
                return Err(SelectorError::DimensionMismatch {
                    expected: dim,
                    found: u.len(),
                });
            }
            for (j, v) in vectors.iter().enumerate() {
                let delta = if i == j { 1.0 } else { 0.0 };
                let ip = inner_product(u, v)?;
                worst = worst.max((ip - Complex64::new(delta, 0.0)).norm());
            }
        }
        if worst > ORTHONORMAL_TOL {
            return Err(SelectorError::NotOrthonormal(worst));
        }
        Ok(SelectorBasis::Custom(vectors))
    }

    pub fn dim(&self) -> usize {
        match self {
            SelectorBasis::Standard(d) => *d,
            SelectorBasis::Custom(v) => v.len(),
        }
    }

    /// Short label recorded in output metadata.
    pub fn identifier(&self) -> &'static str {
        match self {
            SelectorBasis::Standard(_) => "standard",
            SelectorBasis::Custom(_) => "custom",
        }
    }

    fn coefficient(&self, i: usize, amplitudes: &[Complex64]) -> Complex64 {
        match self {
            SelectorBasis::Standard(_) => amplitudes[i],
            SelectorBasis::Custom(vectors) => vectors[i]
                .iter()
                .zip(amplitudes)
                .map(|(a, b)| a.conj() * b)
                .sum(),
        }
    }
}

/// Index `k` and coefficient `z` behind [`theta`]: `k` is the least index
/// whose partial sum of `|⟨φ_i, ψ⟩|²` exceeds 1/2 strictly; `z` is the
/// largest-modulus coefficient among the first `k` (lowest index on ties).
fn select_coefficient(
    basis: &SelectorBasis,
    amplitudes: &[Complex64],
) -> Result<(usize, Complex64), SelectorError> {
    if basis.dim() != amplitudes.len() {
        return Err(SelectorError::DimensionMismatch {
            expected: basis.dim(),
            found: amplitudes.len(),
        });
    }
    let mut partial = 0.0;
    let mut best = Complex64::new(0.0, 0.0);
    let mut best_modulus = 0.0;
    let mut k = basis.dim();
    for i in 0..basis.dim() {
        let c = basis.coefficient(i, amplitudes);
        let modulus = c.norm();
        if modulus > best_modulus {
            best = c;
            best_modulus = modulus;
        }
        partial += c.norm_sqr();
        if partial > 0.5 {
            k = i + 1;
            break;
        }
    }
    if best_modulus == 0.0 {
        return Err(SelectorError::ZeroVector);
    }
    Ok((k, best))
}

/// The selector index `k_ψ` (1-based).
pub fn selector_index(basis: &SelectorBasis, psi: &StateVector) -> Result<usize, SelectorError> {
    select_coefficient(basis, psi.amplitudes()).map(|(k, _)| k)
}

/// Phase extracted from `psi`; equivariant under global phase.
pub fn theta(basis: &SelectorBasis, psi: &StateVector) -> Result<Complex64, SelectorError> {
    theta_of(basis, psi.amplitudes())
}

pub(crate) fn theta_of(
    basis: &SelectorBasis,
    amplitudes: &[Complex64],
) -> Result<Complex64, SelectorError> {
    let (_, z) = select_coefficient(basis, amplitudes)?;
    Ok(z / z.norm())
}

/// Born probability `Re⟨ψ, Πψ⟩` with the imaginary-part check.
fn born_probability(projector: &ComplexMatrix, psi: &[Complex64]) -> Result<(f64, Vec<Complex64>), SelectorError> {
    let image = projector.apply(psi)?;
    let p = inner_product(psi, &image)?;
    if p.im.abs() > IMAG_TOL {
        return Err(SelectorError::ImaginaryProbability(p.im));
    }
    // ⟨ψ, Pψ⟩ ≤ 1 for a unit ψ; rounding can overshoot by an ulp or two.
    Ok((p.re.min(1.0), image))
}

/// All structurally nonzero joint projectors of a composite, in
/// lexicographic outcome order.
#[derive(Clone, Debug)]
pub struct ProjectorTable {
    dim: usize,
    entries: Vec<(Outcome, ComplexMatrix)>,
}

impl ProjectorTable {
    pub fn new(composite: &CompositeObservable) -> Self {
        let entries = composite
            .outcome_indices()
            .filter_map(|idx| {
                let projector = composite.joint_projector_at(&idx);
                (projector.max_abs() > NULL_PROJECTOR)
                    .then(|| (Outcome(composite.values_at(&idx)), projector))
            })
            .collect();
        Self {
            dim: composite.dim(),
            entries,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn projector(&self, outcome: &Outcome) -> Option<&ComplexMatrix> {
        self.entries
            .iter()
            .find(|(o, _)| o.lex_cmp(outcome) == Ordering::Equal)
            .map(|(_, p)| p)
    }

    pub fn distribution(&self, psi: &StateVector) -> Result<OutcomeDistribution, SelectorError> {
        if psi.dim() != self.dim {
            return Err(SelectorError::DimensionMismatch {
                expected: self.dim,
                found: psi.dim(),
            });
        }
        let pairs = self
            .entries
            .iter()
            .map(|(outcome, projector)| {
                born_probability(projector, psi.amplitudes()).map(|(p, _)| (outcome.clone(), p))
            })
            .collect::<Result<Vec<_>, _>>()?;
        OutcomeDistribution::from_probabilities(pairs)
    }
}

/// Born probabilities of every outcome tuple of `c` in state `psi`.
pub fn joint_distribution(
    c: &CompositeObservable,
    psi: &StateVector,
) -> Result<OutcomeDistribution, SelectorError> {
    ProjectorTable::new(c).distribution(psi)
}

/// The deterministic measurement result `ρ_ψ(τ⁻¹(Θ(ψ)))`.
pub fn mu(
    c: &CompositeObservable,
    psi: &StateVector,
    basis: &SelectorBasis,
) -> Result<Outcome, SelectorError> {
    let dist = joint_distribution(c, psi)?;
    let xi = tau_inverse_unchecked(theta(basis, psi)?);
    Ok(dist.rho(xi).clone())
}

/// A completed measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    pub outcome: Outcome,
    pub tick: i64,
    /// Collapsed state, re-phased so that `Θ(collapsed) = χ_τ(tick)`.
    pub collapsed: StateVector,
    pub probability: f64,
}

impl Serialize for MeasurementRecord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("MeasurementRecord", 3)?;
        s.serialize_field("tick", &self.tick)?;
        s.serialize_field("outcome", &self.outcome)?;
        s.serialize_field("probability", &self.probability)?;
        s.end()
    }
}

/// Multiplies a unit vector by `χ_τ(tick)/Θ(ψ)`.
fn rephase<C: Clock + ?Sized>(
    state: StateVector,
    clock: &C,
    tick: i64,
    basis: &SelectorBasis,
) -> Result<StateVector, SelectorError> {
    let current = theta(basis, &state)?;
    let omega = clock.phase(tick) * current.conj();
    Ok(state.rephased(omega, tick))
}

/// Normalizes `psi_raw` and sets its phase from the clock at `tick`.
pub fn birth_phase<C: Clock + ?Sized>(
    psi_raw: &[Complex64],
    clock: &C,
    tick: i64,
    basis: &SelectorBasis,
) -> Result<StateVector, SelectorError> {
    let state = normalize(psi_raw, tick)?;
    rephase(state, clock, tick, basis)
}

fn collapse_with<C: Clock + ?Sized>(
    projector: &ComplexMatrix,
    psi: &StateVector,
    outcome: &Outcome,
    clock: &C,
    tick: i64,
    basis: &SelectorBasis,
) -> Result<MeasurementRecord, SelectorError> {
    let (probability, image) = born_probability(projector, psi.amplitudes())?;
    if probability <= ZERO_TOL {
        return Err(SelectorError::VanishingProjection {
            outcome: outcome.0.clone(),
            probability,
        });
    }
    let raw = normalize(&image, tick)?;
    Ok(MeasurementRecord {
        outcome: outcome.clone(),
        tick,
        collapsed: rephase(raw, clock, tick, basis)?,
        probability,
    })
}

/// Projects `psi` onto `outcome`, normalizes, and re-phases at `tick`.
pub fn collapse<C: Clock + ?Sized>(
    c: &CompositeObservable,
    psi: &StateVector,
    outcome: &Outcome,
    clock: &C,
    tick: i64,
    basis: &SelectorBasis,
) -> Result<MeasurementRecord, SelectorError> {
    if psi.dim() != c.dim() {
        return Err(SelectorError::DimensionMismatch {
            expected: c.dim(),
            found: psi.dim(),
        });
    }
    let projector = c.joint_projector(outcome.values())?;
    collapse_with(&projector, psi, outcome, clock, tick, basis)
}

enum Mode {
    /// Re-phase a fresh copy of the prepared state at every tick. The Born
    /// table does not depend on the global phase, so it is built once.
    Rebirth { dist: OutcomeDistribution },
    /// Feed each collapsed state into the next measurement.
    Sequential,
}

/// Endless stream of measurements, one per tick starting at `start_tick`.
pub struct MeasurementStream<C: Clock> {
    table: ProjectorTable,
    basis: SelectorBasis,
    clock: C,
    initial: StateVector,
    current: StateVector,
    next_tick: i64,
    mode: Mode,
}

impl<C: Clock> MeasurementStream<C> {
    pub fn new(
        c: &CompositeObservable,
        psi: &StateVector,
        clock: C,
        start_tick: i64,
        basis: SelectorBasis,
        rebirth: bool,
    ) -> Result<Self, SelectorError> {
        if basis.dim() != c.dim() {
            return Err(SelectorError::DimensionMismatch {
                expected: c.dim(),
                found: basis.dim(),
            });
        }
        let table = ProjectorTable::new(c);
        let mode = if rebirth {
            Mode::Rebirth {
                dist: table.distribution(psi)?,
            }
        } else {
            // Validates dimension and the projector family up front.
            table.distribution(psi)?;
            Mode::Sequential
        };
        Ok(Self {
            table,
            basis,
            clock,
            initial: psi.clone(),
            current: psi.clone(),
            next_tick: start_tick,
            mode,
        })
    }

    pub fn next_tick(&self) -> i64 {
        self.next_tick
    }

    fn step(&mut self) -> Result<MeasurementRecord, SelectorError> {
        let tick = self.next_tick;
        let (state, outcome) = match &self.mode {
            Mode::Rebirth { dist } => {
                let state = birth_phase(self.initial.amplitudes(), &self.clock, tick, &self.basis)?;
                let xi = tau_inverse_unchecked(theta(&self.basis, &state)?);
                let outcome = dist.rho(xi).clone();
                (state, outcome)
            }
            Mode::Sequential => {
                let dist = self.table.distribution(&self.current)?;
                let xi = tau_inverse_unchecked(theta(&self.basis, &self.current)?);
                let outcome = dist.rho(xi).clone();
                (self.current.clone(), outcome)
            }
        };
        let projector = self
            .table
            .projector(&outcome)
            .expect("selected outcome has a projector");
        let record = collapse_with(projector, &state, &outcome, &self.clock, tick, &self.basis)?;
        if matches!(self.mode, Mode::Sequential) {
            self.current = record.collapsed.clone();
        }
        self.next_tick += 1;
        Ok(record)
    }
}

impl<C: Clock> Iterator for MeasurementStream<C> {
    type Item = Result<MeasurementRecord, SelectorError>;

    fn next(&mut self) -> Option<Self::Item> {
        Some(self.step())
    }
}

/// `n` consecutive measurements at ticks `start_tick, start_tick + 1, …`.
///
/// With `rebirth` the prepared state is re-phased afresh at each tick;
/// otherwise each collapsed state is measured next.
pub fn measure_sequence<C: Clock>(
    c: &CompositeObservable,
    psi: &StateVector,
    clock: C,
    start_tick: i64,
    n: usize,
    basis: &SelectorBasis,
    rebirth: bool,
) -> Result<Vec<MeasurementRecord>, SelectorError> {
    if n == 0 {
        return Err(SelectorError::EmptySequence);
    }
    MeasurementStream::new(c, psi, clock, start_tick, basis.clone(), rebirth)?
        .take(n)
        .collect()
}
