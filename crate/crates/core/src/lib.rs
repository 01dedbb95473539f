//! Deterministic quantum measurement for finite-dimensional systems.
//!
//! Measurement outcomes are not drawn at random. They are computed from the
//! state vector, including its global phase, and every newly prepared or
//! collapsed vector receives its phase from a pseudo-random clock. Repeated
//! measurements therefore follow the Born rule while each individual result
//! is a pure function of `(state, clock, tick)`.
//!
//! - [`linalg`]: dense complex vectors and matrices.
//! - [`spectral`]: observables as spectrum plus orthogonal projectors, and
//!   composite observables.
//! - [`randomness`]: pseudo-random clocks and a uniformity test battery.
//! - [`selector`]: phase extraction, the outcome step map, measurement and
//!   collapse.
//! - [`epr`]: the two-spin singlet model and its correlation coefficient.

pub mod epr;
pub mod linalg;
pub mod randomness;
pub mod selector;
pub mod spectral;

pub use num_complex::Complex64;
