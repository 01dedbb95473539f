//! Spectral representation of finite-spectrum observables.
//!
//! An [`Observable`] stores its Hermitian matrix together with the distinct
//! eigenvalues and one orthogonal projector per eigenvalue, such that the
//! matrix equals `Σ a·P_a`. A [`CompositeObservable`] is an ordered list of
//! pairwise commuting observables measured together; its outcomes are tuples.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::linalg::{ComplexMatrix, LinalgError, MatrixRepr};

/// Eigenvalues closer than this fall into one spectrum point.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-8;
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Bound on the max-entry modulus of `[P, Q]` for commuting projectors.
pub const COMMUTATION_TOL: f64 = 1e-10;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("matrix is not Hermitian (max |M - M†| = {0:e})")]
    NotHermitian(f64),
    #[error("eigensolver did not converge")]
    EigenFailure,
    #[error("degeneracy tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("parts {first} and {second} do not commute (max |[P, Q]| = {norm:e})")]
    NonCommuting {
        first: usize,
        second: usize,
        norm: f64,
    },
    #[error("composite observable needs at least one part")]
    EmptyComposite,
    #[error("outcome has {found} components, composite has {expected} parts")]
    OutcomeArity { expected: usize, found: usize },
    #[error("value {value} is not in the spectrum of part {part}")]
    NotInSpectrum { part: usize, value: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Hermitian matrix with its spectral data.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    matrix: ComplexMatrix,
    spectrum: Vec<f64>,
    projectors: Vec<ComplexMatrix>,
}

impl Observable {
    pub fn from_matrix(m: ComplexMatrix) -> Result<Self, SpectralError> {
        spectral_decompose(&m, DEFAULT_DEGENERACY_TOL)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Distinct eigenvalues, ascending.
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    /// Index of `value` in the spectrum. Matches exactly first, then within
    /// a relative 1e-12.
    pub fn spectrum_index(&self, value: f64) -> Option<usize> {
        self.spectrum
            .iter()
            .position(|&s| s == value)
            .or_else(|| {
                self.spectrum
                    .iter()
                    .position(|&s| (s - value).abs() <= 1e-12 * s.abs().max(1.0))
            })
    }

    pub fn projector_for(&self, value: f64) -> Option<&ComplexMatrix> {
        self.spectrum_index(value).map(|i| &self.projectors[i])
    }

    /// `Σ a·P_a`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        self.spectrum
            .iter()
            .zip(&self.projectors)
            .fold(ComplexMatrix::zeros(n, n), |acc, (&a, p)| {
                &acc + &p.scale(Complex64::new(a, 0.0))
            })
    }

    pub fn rank(&self, index: usize) -> usize {
        self.projectors[index].trace().re.round() as usize
    }
}

/// Decomposes a Hermitian matrix into spectrum and projectors, merging
/// eigenvalues within `degeneracy_tol` of their neighbour into one cluster
/// represented by the cluster mean.
pub fn spectral_decompose(
    m: &ComplexMatrix,
    degeneracy_tol: f64,
) -> Result<Observable, SpectralError> {
    spectral_decompose_snapped(m, degeneracy_tol, &[])
}

/// Like [`spectral_decompose`], but a cluster mean within `degeneracy_tol`
/// of one of `exact_values` is replaced by that value.
pub fn spectral_decompose_snapped(
    m: &ComplexMatrix,
    degeneracy_tol: f64,
    exact_values: &[f64],
) -> Result<Observable, SpectralError> {
    if degeneracy_tol.is_nan() || degeneracy_tol <= 0.0 {
        return Err(SpectralError::BadTolerance(degeneracy_tol));
    }
    if !m.is_square() {
        return Err(LinalgError::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        }
        .into());
    }
    let asym = m.max_abs_diff(&m.adjoint());
    if asym > HERMITIAN_TOL {
        return Err(SpectralError::NotHermitian(asym));
    }

    let n = m.rows();
    // Symmetrize so the solver sees an exactly Hermitian input.
    let dm = DMatrix::from_fn(n, n, |r, c| (m.get(r, c) + m.get(c, r).conj()) * 0.5);
    let eig = SymmetricEigen::try_new(dm, EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or(SpectralError::EigenFailure)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &idx in &order {
        let value = eig.eigenvalues[idx];
        match clusters.last_mut() {
            Some(cluster)
                if value - eig.eigenvalues[*cluster.last().unwrap()] <= degeneracy_tol =>
            {
                cluster.push(idx)
            }
            _ => clusters.push(vec![idx]),
        }
    }

    let mut spectrum = Vec::with_capacity(clusters.len());
    let mut projectors = Vec::with_capacity(clusters.len());
    for cluster in clusters {
        let mean = cluster.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / cluster.len() as f64;
        let value = exact_values
            .iter()
            .copied()
            .find(|x| (x - mean).abs() <= degeneracy_tol)
            .unwrap_or(mean);
        let mut p = ComplexMatrix::zeros(n, n);
        for &i in &cluster {
            let v: Vec<Complex64> = eig.eigenvectors.column(i).iter().copied().collect();
            p = &p + &ComplexMatrix::outer(&v, &v);
        }
        spectrum.push(value);
        projectors.push(p);
    }

    Ok(Observable {
        matrix: m.clone(),
        spectrum,
        projectors,
    })
}

/// Ordered list of pairwise commuting observables of equal dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeObservable {
    parts: Vec<Observable>,
}

/// Checks dimensions and pairwise projector commutation.
pub fn compose(parts: Vec<Observable>) -> Result<CompositeObservable, SpectralError> {
    let first = parts.first().ok_or(SpectralError::EmptyComposite)?;
    let dim = first.dim();
    if let Some(bad) = parts.iter().find(|p| p.dim() != dim) {
        return Err(LinalgError::DimensionMismatch {
            expected: dim,
            found: bad.dim(),
        }
        .into());
    }
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            let mut worst: f64 = 0.0;
            for p in parts[i].projectors() {
                for q in parts[j].projectors() {
                    worst = worst.max(p.commutator(q)?.max_abs());
                }
            }
            if worst > COMMUTATION_TOL {
                return Err(SpectralError::NonCommuting {
                    first: i,
                    second: j,
                    norm: worst,
                });
            }
        }
    }
    Ok(CompositeObservable { parts })
}

impl CompositeObservable {
    pub fn parts(&self) -> &[Observable] {
        &self.parts
    }

    pub fn dim(&self) -> usize {
        self.parts[0].dim()
    }

    /// Number of tuples in the product of the part spectra.
    pub fn outcome_space_len(&self) -> usize {
        self.parts.iter().map(|p| p.spectrum().len()).product()
    }

    /// Every outcome tuple as spectrum indices, in lexicographic order.
    pub fn outcome_indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let sizes: Vec<usize> = self.parts.iter().map(|p| p.spectrum().len()).collect();
        (0..self.outcome_space_len()).map(move |mut flat| {
            let mut idx = vec![0; sizes.len()];
            for (slot, &size) in idx.iter_mut().zip(&sizes).rev() {
                *slot = flat % size;
                flat /= size;
            }
            idx
        })
    }

    pub fn values_at(&self, indices: &[usize]) -> Vec<f64> {
        indices
            .iter()
            .zip(&self.parts)
            .map(|(&i, p)| p.spectrum()[i])
            .collect()
    }

    /// Spectrum indices of an outcome tuple.
    pub fn indices_of(&self, outcome: &[f64]) -> Result<Vec<usize>, SpectralError> {
        if outcome.len() != self.parts.len() {
            return Err(SpectralError::OutcomeArity {
                expected: self.parts.len(),
                found: outcome.len(),
            });
        }
        outcome
            .iter()
            .zip(&self.parts)
            .enumerate()
            .map(|(part, (&value, obs))| {
                obs.spectrum_index(value)
                    .ok_or(SpectralError::NotInSpectrum { part, value })
            })
            .collect()
    }

    /// Ordered product of the per-part projectors.
    pub fn joint_projector(&self, outcome: &[f64]) -> Result<ComplexMatrix, SpectralError> {
        let indices = self.indices_of(outcome)?;
        Ok(self.joint_projector_at(&indices))
    }

    pub fn joint_projector_at(&self, indices: &[usize]) -> ComplexMatrix {
        let mut iter = indices.iter().zip(&self.parts);
        let (&i0, p0) = iter.next().expect("composite has at least one part");
        iter.fold(p0.projectors()[i0].clone(), |acc, (&i, p)| &acc * &p.projectors()[i])
    }
}

impl Serialize for Observable {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MatrixRepr::from_matrix(&self.matrix).serialize(serializer)
    }
}

/// Only the matrix is read; spectral data is always recomputed.
impl<'de> Deserialize<'de> for Observable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let m = MatrixRepr::deserialize(deserializer)?
            .into_matrix()
            .map_err(serde::de::Error::custom)?;
        Observable::from_matrix(m).map_err(serde::de::Error::custom)
    }
}
