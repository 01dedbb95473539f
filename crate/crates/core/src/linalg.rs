//! Dense complex vectors and matrices for small Hilbert spaces.
//!
//! Everything here is exact-shape and row-major. Dimensions in this crate
//! stay small (a few dozen at most), so there is no blocking or sparse
//! storage.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Tolerance on the Euclidean norm of a [`StateVector`].
pub const NORM_TOL: f64 = 1e-12;

/// Inputs with a norm at or below this are treated as the zero vector.
pub const VANISHING_NORM: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix of shape {rows}x{cols} needs {needed} entries, got {found}")]
    EntryCount {
        rows: usize,
        cols: usize,
        needed: usize,
        found: usize,
    },
    #[error("empty dimension")]
    EmptyDimension,
    #[error("non-finite entry at position {0}")]
    NonFinite(usize),
    #[error("vanishing projection: vector norm {0:e} is too small to normalize")]
    VanishingProjection(f64),
    #[error("state vector is not normalized (norm {0})")]
    NotNormalized(f64),
}

/// Conjugate-linear in `x`, linear in `y`.
pub fn inner_product(x: &[Complex64], y: &[Complex64]) -> Result<Complex64, LinalgError> {
    if x.len() != y.len() {
        return Err(LinalgError::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(x.iter().zip(y).map(|(a, b)| a.conj() * b).sum())
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyDimension);
        }
        if data.len() != rows * cols {
            return Err(LinalgError::EntryCount {
                rows,
                cols,
                needed: rows * cols,
                found: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite(pos));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows; all rows must have the same length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(LinalgError::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self, LinalgError> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty dimension");
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m.data[i * n + i] = z;
        }
        m
    }

    /// The outer product `u v†`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        let mut data = Vec::with_capacity(u.len() * v.len());
        for a in u {
            for b in v {
                data.push(a * b.conj());
            }
        }
        Self {
            rows: u.len(),
            cols: v.len(),
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c).conj());
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut data = vec![Complex64::new(0.0, 0.0); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let out = &mut data[i * other.cols..(i + 1) * other.cols];
                for (o, b) in out.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(Self {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Kronecker product `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut data = vec![Complex64::new(0.0, 0.0); rows * cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        data[(i * other.rows + k) * cols + j * other.cols + l] =
                            a * other.get(k, l);
                    }
                }
            }
        }
        Self { rows, cols, data }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.try_sub(other).map_or(f64::INFINITY, |d| d.max_abs())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// `self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Result<Self, LinalgError> {
        self.matmul(other)?.try_sub(&other.matmul(self)?)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: Self) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix shapes differ")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: Self) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix shapes differ")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.matmul(rhs).expect("inner dimensions differ")
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(|z| format!("{z:.4}")).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Unit-norm amplitude list tagged with the tick at which it was born.
///
/// The global phase is kept as given. Two vectors differing only by a
/// unit-modulus factor describe the same physical state, but measurement
/// outcomes here depend on which one is held.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    birth_tick: i64,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized within [`NORM_TOL`].
    pub fn new(amplitudes: Vec<Complex64>, birth_tick: i64) -> Result<Self, LinalgError> {
        if amplitudes.is_empty() {
            return Err(LinalgError::EmptyDimension);
        }
        let n = norm(&amplitudes);
        if !n.is_finite() || (n - 1.0).abs() > NORM_TOL {
            return Err(LinalgError::NotNormalized(n));
        }
        Ok(Self {
            amplitudes,
            birth_tick,
        })
    }

    /// Standard basis vector `e_index` of dimension `dim`.
    pub fn basis(dim: usize, index: usize, birth_tick: i64) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self {
            amplitudes,
            birth_tick,
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn birth_tick(&self) -> i64 {
        self.birth_tick
    }

    /// Multiplies by a unit-modulus factor and stamps a new birth tick.
    pub fn rephased(&self, omega: Complex64, birth_tick: i64) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|z| z * omega).collect(),
            birth_tick,
        }
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64, LinalgError> {
        inner_product(&self.amplitudes, &other.amplitudes)
    }
}

/// Scales `v` to unit norm.
pub fn normalize(v: &[Complex64], birth_tick: i64) -> Result<StateVector, LinalgError> {
    if v.is_empty() {
        return Err(LinalgError::EmptyDimension);
    }
    let n = norm(v);
    if !n.is_finite() || n <= VANISHING_NORM {
        return Err(LinalgError::VanishingProjection(n));
    }
    Ok(StateVector {
        amplitudes: v.iter().map(|z| z / n).collect(),
        birth_tick,
    })
}

// JSON shapes: complex numbers are `[re, im]` pairs.

fn pair(z: &Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn unpair(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

#[derive(Serialize, Deserialize)]
struct StateVectorRepr {
    dim: usize,
    amplitudes: Vec<[f64; 2]>,
    #[serde(default)]
    birth_tick: i64,
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        StateVectorRepr {
            dim: self.dim(),
            amplitudes: self.amplitudes.iter().map(pair).collect(),
            birth_tick: self.birth_tick,
        }
        .serialize(serializer)
    }
}

/// Loading renormalizes the amplitudes (keeping their phase), so hand-written
/// files need not be normalized to 12 digits.
impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = StateVectorRepr::deserialize(deserializer)?;
        if repr.dim != repr.amplitudes.len() {
            return Err(serde::de::Error::custom(format!(
                "dim {} does not match {} amplitudes",
                repr.dim,
                repr.amplitudes.len()
            )));
        }
        let amps: Vec<Complex64> = repr.amplitudes.into_iter().map(unpair).collect();
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(serde::de::Error::custom("non-finite amplitude"));
        }
        normalize(&amps, repr.birth_tick).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct MatrixRepr {
    pub dim: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl MatrixRepr {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            dim: m.rows(),
            matrix: (0..m.rows())
                .map(|r| m.row(r).iter().map(pair).collect())
                .collect(),
        }
    }

    pub fn into_matrix(self) -> Result<ComplexMatrix, String> {
        if self.matrix.len() != self.dim {
            return Err(format!(
                "dim {} does not match {} rows",
                self.dim,
                self.matrix.len()
            ));
        }
        let rows: Vec<Vec<Complex64>> = self
            .matrix
            .into_iter()
            .map(|r| r.into_iter().map(unpair).collect())
            .collect();
        let m = ComplexMatrix::from_rows(&rows).map_err(|e| e.to_string())?;
        if !m.is_square() {
            return Err(format!("matrix is {}x{}, not square", m.rows(), m.cols()));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap()
    }

    #[test]
    fn inner_product_basis_and_conjugation() {
        let e1 = [c(1.0, 0.0), c(0.0, 0.0)];
        let e2 = [c(0.0, 0.0), c(1.0, 0.0)];
        assert_eq!(inner_product(&e1, &e1).unwrap(), c(1.0, 0.0));
        assert_eq!(inner_product(&e1, &e2).unwrap(), c(0.0, 0.0));
        let ie1 = [c(0.0, 1.0), c(0.0, 0.0)];
        assert_eq!(inner_product(&ie1, &e1).unwrap(), c(0.0, -1.0));
    }

    #[test]
    fn inner_product_dimension_mismatch() {
        let err = inner_product(&[c(1.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap_err();
        assert!(matches!(err, LinalgError::DimensionMismatch { .. }));
    }

    #[test]
    fn tensor_identities_and_paulis() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.tensor(&i2), ComplexMatrix::identity(4));

        let zi = sigma_z().tensor(&i2);
        let expected = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0)]);
        assert_eq!(zi, expected);

        let xx = sigma_x().tensor(&sigma_x());
        for r in 0..4 {
            for col in 0..4 {
                let want = if r + col == 3 { 1.0 } else { 0.0 };
                assert_eq!(xx.get(r, col), c(want, 0.0), "entry ({r},{col})");
            }
        }
    }

    #[test]
    fn apply_examples() {
        let v = vec![c(0.3, -1.0), c(2.0, 0.5)];
        assert_eq!(ComplexMatrix::identity(2).apply(&v).unwrap(), v);
        let d = ComplexMatrix::diagonal(&[c(2.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(
            d.apply(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap(),
            vec![c(2.0, 0.0), c(3.0, 0.0)]
        );
        assert_eq!(
            sigma_x().apply(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap(),
            vec![c(0.0, 0.0), c(1.0, 0.0)]
        );
        assert!(d.apply(&[c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn normalize_examples() {
        let s = normalize(&[c(2.0, 0.0), c(0.0, 0.0)], 5).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(s.birth_tick(), 5);

        let err = normalize(&[c(0.0, 0.0), c(0.0, 0.0)], 0).unwrap_err();
        assert!(matches!(err, LinalgError::VanishingProjection(_)));

        let s = normalize(&[c(1.0, 0.0), c(0.0, 1.0)], 0).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitudes()[0] - c(h, 0.0)).norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(0.0, h)).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            ComplexMatrix::new(2, 2, vec![c(1.0, 0.0); 3]),
            Err(LinalgError::EntryCount { .. })
        ));
        assert!(matches!(
            ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]),
            Err(LinalgError::NonFinite(0))
        ));
        assert!(StateVector::new(vec![c(1.0, 0.0), c(1.0, 0.0)], 0).is_err());
    }

    #[test]
    fn commutator_of_paulis() {
        let y = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]])
            .unwrap();
        let comm = sigma_x().commutator(&y).unwrap();
        assert!(comm.max_abs_diff(&sigma_z().scale(c(0.0, 2.0))) < 1e-15);
    }

    #[test]
    fn state_vector_json_shape() {
        let s = StateVector::basis(2, 1, 7);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"dim":2,"amplitudes":[[0.0,0.0],[1.0,0.0]],"birth_tick":7}"#);
        let back: StateVector = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<StateVector>(r#"{"dim":3,"amplitudes":[[1,0]]}"#).is_err());
    }
}
