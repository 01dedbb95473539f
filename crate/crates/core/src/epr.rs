//! Two spin-1/2 particles in the singlet state, measured along directions
//! rotated by `θ1` and `θ2` about the z axis.
//!
//! Ordering of `ℂ² ⊗ ℂ²` follows the tensor construction: `|↑↑⟩, |↑↓⟩,
//! |↓↑⟩, |↓↓⟩`, with `|↑⟩` the `+1/2` eigenvector of `s_z`.

use std::collections::VecDeque;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{inner_product, normalize, ComplexMatrix, StateVector};
use crate::randomness::{Clock, ClockScheme, PhaseClock};
use crate::selector::{MeasurementStream, SelectorBasis, SelectorError};
use crate::spectral::{
    compose, spectral_decompose, spectral_decompose_snapped, CompositeObservable, Observable,
    SpectralError, DEFAULT_DEGENERACY_TOL,
};

/// Number of most recent correlation values kept for display.
pub const WINDOW: usize = 200;

const SPIN_VALUES: [f64; 2] = [-0.5, 0.5];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EprError {
    #[error("singlet extraction failed: {0}")]
    Singlet(String),
    #[error("angles must be finite, got ({0}, {1})")]
    BadAngles(f64, f64),
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Selector(#[from] SelectorError),
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Single-spin and two-spin operators of the model.
pub mod operators {
    use super::*;

    pub fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    pub fn pauli_y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]])
            .unwrap()
    }

    pub fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap()
    }

    /// Spin component `σ/2`.
    pub fn spin(pauli: &ComplexMatrix) -> ComplexMatrix {
        pauli.scale(c(0.5, 0.0))
    }

    /// `s ⊗ 𝟏`.
    pub fn on_first(s: &ComplexMatrix) -> ComplexMatrix {
        s.tensor(&ComplexMatrix::identity(2))
    }

    /// `𝟏 ⊗ s`.
    pub fn on_second(s: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::identity(2).tensor(s)
    }

    /// Total spin squared `S_x² + S_y² + S_z²`.
    pub fn total_spin_squared() -> ComplexMatrix {
        [pauli_x(), pauli_y(), pauli_z()]
            .iter()
            .map(|p| {
                let s = spin(p);
                let total = &on_first(&s) + &on_second(&s);
                &total * &total
            })
            .fold(ComplexMatrix::zeros(4, 4), |acc, t| &acc + &t)
    }

    /// `exp(iθ s_z) = diag(e^{iθ/2}, e^{−iθ/2})`.
    pub fn z_rotation(theta: f64) -> ComplexMatrix {
        ComplexMatrix::diagonal(&[
            Complex64::from_polar(1.0, theta / 2.0),
            Complex64::from_polar(1.0, -theta / 2.0),
        ])
    }

    /// `U(θ1, θ2) = exp(iθ1 s_z) ⊗ exp(iθ2 s_z)`.
    pub fn rotation(theta1: f64, theta2: f64) -> ComplexMatrix {
        z_rotation(theta1).tensor(&z_rotation(theta2))
    }
}

/// Singlet state plus the rotated spin observables `A` and `B`.
#[derive(Clone, Debug)]
pub struct EprModel {
    theta1: f64,
    theta2: f64,
    singlet: StateVector,
    composite: CompositeObservable,
}

/// Builds the model for measurement angles in radians.
pub fn build_model(theta1: f64, theta2: f64) -> Result<EprModel, EprError> {
    if !theta1.is_finite() || !theta2.is_finite() {
        return Err(EprError::BadAngles(theta1, theta2));
    }
    use operators::*;

    let s2 = spectral_decompose(&total_spin_squared(), DEFAULT_DEGENERACY_TOL)?;
    let zero = s2
        .spectrum()
        .iter()
        .position(|v| v.abs() < 1e-8)
        .ok_or_else(|| EprError::Singlet("S² has no zero eigenvalue".into()))?;
    if s2.rank(zero) != 1 {
        return Err(EprError::Singlet(format!(
            "zero eigenspace of S² has rank {}",
            s2.rank(zero)
        )));
    }
    // Any nonzero column of the rank-1 projector spans its range.
    let projector = &s2.projectors()[zero];
    let column = (0..4)
        .map(|j| projector.column(j))
        .max_by(|a, b| crate::linalg::norm(a).total_cmp(&crate::linalg::norm(b)))
        .expect("four columns");
    let singlet = normalize(&column, 0).map_err(|e| EprError::Singlet(e.to_string()))?;

    let u = rotation(theta1, theta2);
    let u_dag = u.adjoint();
    let sx = spin(&pauli_x());
    let a = &(&u * &on_first(&sx)) * &u_dag;
    let b = &(&u * &on_second(&sx)) * &u_dag;
    let a = spectral_decompose_snapped(&a, DEFAULT_DEGENERACY_TOL, &SPIN_VALUES)?;
    let b = spectral_decompose_snapped(&b, DEFAULT_DEGENERACY_TOL, &SPIN_VALUES)?;
    let composite = compose(vec![a, b])?;

    Ok(EprModel {
        theta1,
        theta2,
        singlet,
        composite,
    })
}

impl EprModel {
    pub fn from_degrees(theta1_deg: f64, theta2_deg: f64) -> Result<Self, EprError> {
        build_model(theta1_deg.to_radians(), theta2_deg.to_radians())
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    /// Singlet as extracted from `S²`; its phase is arbitrary until re-phased.
    pub fn singlet(&self) -> &StateVector {
        &self.singlet
    }

    pub fn composite(&self) -> &CompositeObservable {
        &self.composite
    }

    pub fn observable_a(&self) -> &Observable {
        &self.composite.parts()[0]
    }

    pub fn observable_b(&self) -> &Observable {
        &self.composite.parts()[1]
    }

    /// Selector basis used for this model: the standard basis of `ℂ⁴`.
    pub fn basis(&self) -> SelectorBasis {
        SelectorBasis::standard(4)
    }
}

/// `⟨ψ, ABψ⟩ / (√⟨ψ, A²ψ⟩ · √⟨ψ, B²ψ⟩)` for the singlet.
pub fn exact_correlation(m: &EprModel) -> f64 {
    let psi = m.singlet.amplitudes();
    let a = m.observable_a().matrix();
    let b = m.observable_b().matrix();
    let expect = |op: &ComplexMatrix| -> f64 {
        inner_product(psi, &op.apply(psi).expect("dim 4"))
            .expect("dim 4")
            .re
    };
    let c = expect(&(a * b)) / (expect(&(a * a)).sqrt() * expect(&(b * b)).sqrt());
    c.clamp(-1.0, 1.0)
}

/// Running sums behind the correlation coefficient
/// `c_i = Σ a_j b_j / (√Σ a_j² · √Σ b_j²)`, plus the most recent values.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunningCorrelation {
    count: usize,
    sum_ab: f64,
    sum_aa: f64,
    sum_bb: f64,
    window: VecDeque<f64>,
}

impl RunningCorrelation {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a pair and returns the updated coefficient.
    pub fn push(&mut self, a: f64, b: f64) -> f64 {
        self.count += 1;
        self.sum_ab += a * b;
        self.sum_aa += a * a;
        self.sum_bb += b * b;
        // √(Σa²·Σb²) rather than √Σa²·√Σb²: with exact sums the product form
        // keeps c = ±1 exact.
        let c = self.sum_ab / (self.sum_aa * self.sum_bb).sqrt();
        if self.window.len() == WINDOW {
            self.window.pop_front();
        }
        self.window.push_back(c);
        c
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn current(&self) -> Option<f64> {
        self.window.back().copied()
    }

    /// Most recent [`WINDOW`] coefficients, oldest first.
    pub fn window(&self) -> &VecDeque<f64> {
        &self.window
    }
}

/// Full record of a run: every pair and every running coefficient.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CorrelationTrace {
    samples: Vec<(f64, f64)>,
    values: Vec<f64>,
    running: RunningCorrelation,
}

impl CorrelationTrace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a sample and returns the updated `c_i`.
    pub fn push(&mut self, a: f64, b: f64) -> f64 {
        let c = self.running.push(a, b);
        self.samples.push((a, b));
        self.values.push(c);
        c
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    /// `c_1 ..= c_n`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn window(&self) -> &VecDeque<f64> {
        self.running.window()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<f64> {
        self.values.last().copied()
    }
}

/// One measured pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EprSample {
    /// 1-based position in the current run.
    pub step: usize,
    pub tick: i64,
    pub a: f64,
    pub b: f64,
    /// Running correlation after this sample.
    pub c: f64,
}

/// Incremental EPR run: each call to [`EprRun::next_sample`] re-phases a
/// fresh singlet at the next tick and measures `(A, B)` on it. Only the
/// running sums are kept.
pub struct EprRun<C: Clock> {
    stream: MeasurementStream<C>,
    running: RunningCorrelation,
}

impl<C: Clock> EprRun<C> {
    pub fn new(m: &EprModel, clock: C, start_tick: i64) -> Result<Self, EprError> {
        let stream = MeasurementStream::new(m.composite(), m.singlet(), clock, start_tick, m.basis(), true)?;
        Ok(Self {
            stream,
            running: RunningCorrelation::new(),
        })
    }

    pub fn next_tick(&self) -> i64 {
        self.stream.next_tick()
    }

    pub fn next_sample(&mut self) -> Result<EprSample, EprError> {
        let record = self
            .stream
            .next()
            .expect("measurement stream is endless")?;
        let (a, b) = (record.outcome.0[0], record.outcome.0[1]);
        let c = self.running.push(a, b);
        Ok(EprSample {
            step: self.running.count(),
            tick: record.tick,
            a,
            b,
            c,
        })
    }

    pub fn correlation(&self) -> &RunningCorrelation {
        &self.running
    }
}

/// `n` rebirth-mode measurements of the singlet starting at `start_tick`.
pub fn run_epr<C: Clock>(
    m: &EprModel,
    clock: C,
    start_tick: i64,
    n: usize,
) -> Result<CorrelationTrace, EprError> {
    if n == 0 {
        return Err(EprError::NoSamples);
    }
    let mut run = EprRun::new(m, clock, start_tick)?;
    let mut trace = CorrelationTrace::new();
    for _ in 0..n {
        let s = run.next_sample()?;
        trace.push(s.a, s.b);
    }
    Ok(trace)
}

/// Red and green arrow tips for a sample. Angle zero points up, hence the
/// quarter-turn offset.
pub fn arrow_endpoints(sample: (f64, f64), theta1: f64, theta2: f64) -> ([f64; 2], [f64; 2]) {
    let (a, b) = sample;
    let tip = |len: f64, theta: f64| {
        let phi = theta + FRAC_PI_2;
        [len * phi.cos(), len * phi.sin()]
    };
    (tip(a, theta1), tip(b, theta2))
}

/// Metadata written alongside a trace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceMetadata {
    pub theta1_deg: f64,
    pub theta2_deg: f64,
    pub theta1_rad: f64,
    pub theta2_rad: f64,
    pub scheme: ClockScheme,
    pub seed_offset: i64,
    pub tick_scale: i64,
    pub start_tick: i64,
    pub n: usize,
    pub basis: String,
    pub exact_correlation: f64,
}

impl TraceMetadata {
    pub fn new(m: &EprModel, clock: &PhaseClock, start_tick: i64, n: usize) -> Self {
        Self {
            theta1_deg: m.theta1.to_degrees(),
            theta2_deg: m.theta2.to_degrees(),
            theta1_rad: m.theta1,
            theta2_rad: m.theta2,
            scheme: clock.scheme(),
            seed_offset: clock.seed_offset(),
            tick_scale: clock.tick_scale(),
            start_tick,
            n,
            basis: m.basis().identifier().to_string(),
            exact_correlation: exact_correlation(m),
        }
    }
}

/// Formats `x` with `digits` significant digits in positional notation.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // Rounding can carry into a new leading digit (0.99… → 1.00…).
    let rounded: f64 = s.parse().unwrap_or(x);
    let new_magnitude = rounded.abs().log10().floor() as i64;
    if rounded != 0.0 && new_magnitude > magnitude && decimals > 0 {
        let decimals = decimals - 1;
        format!("{x:.decimals$}")
    } else {
        s
    }
}

/// CSV trace: a `#`-prefixed JSON metadata line, then `step,a,b,c` rows.
pub fn trace_to_csv(meta: &TraceMetadata, trace: &CorrelationTrace) -> String {
    let mut out = String::with_capacity(32 * (trace.len() + 2));
    out.push_str("# ");
    out.push_str(&serde_json::to_string(meta).expect("metadata serializes"));
    out.push('\n');
    out.push_str("step,a,b,c\n");
    for (i, (&(a, b), &c)) in trace.samples().iter().zip(trace.values()).enumerate() {
        out.push_str(&format!(
            "{},{:.1},{:.1},{}\n",
            i + 1,
            a,
            b,
            format_significant(c, 12)
        ));
    }
    out
}

#[derive(Serialize)]
struct JsonTrace<'a> {
    metadata: &'a TraceMetadata,
    samples: Vec<EprSample>,
}

/// JSON trace: `{"metadata": {...}, "samples": [{step, tick, a, b, c}, ...]}`.
pub fn trace_to_json(meta: &TraceMetadata, trace: &CorrelationTrace) -> String {
    let samples = trace
        .samples()
        .iter()
        .zip(trace.values())
        .enumerate()
        .map(|(i, (&(a, b), &c))| EprSample {
            step: i + 1,
            tick: meta.start_tick + i as i64,
            a,
            b,
            c,
        })
        .collect();
    serde_json::to_string_pretty(&JsonTrace {
        metadata: meta,
        samples,
    })
    .expect("trace serializes")
}
