#![allow(dead_code)]

use phasemu::linalg::{normalize, ComplexMatrix, StateVector};
use phasemu::spectral::{compose, CompositeObservable, Observable};
use phasemu::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    (0..dim).map(|_| random_complex(rng)).collect()
}

pub fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> StateVector {
    loop {
        if let Ok(s) = normalize(&random_vector(rng, dim), 0) {
            return s;
        }
    }
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let m = ComplexMatrix::new(dim, dim, random_vector(rng, dim * dim)).unwrap();
    (&m + &m.adjoint()).scale(Complex64::new(0.5, 0.0))
}

/// Unitary from Gram-Schmidt on random columns.
pub fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v = random_vector(rng, dim);
        for u in &cols {
            let ip: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= ip * y;
            }
        }
        if let Ok(s) = normalize(&v, 0) {
            cols.push(s.into_amplitudes());
        }
    }
    let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            data[i * dim + j] = *z;
        }
    }
    ComplexMatrix::new(dim, dim, data).unwrap()
}

/// Hermitian `V diag(values) V†`.
pub fn conjugated_diagonal(v: &ComplexMatrix, values: &[f64]) -> ComplexMatrix {
    let d: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let m = &(v * &ComplexMatrix::diagonal(&d)) * &v.adjoint();
    // Exact Hermitian symmetry.
    (&m + &m.adjoint()).scale(Complex64::new(0.5, 0.0))
}

/// Commuting composite of `parts` observables diagonal in one random basis.
/// Eigenvalues come from a small integer set so degeneracies are common.
pub fn random_composite(rng: &mut ChaCha8Rng, dim: usize, parts: usize) -> CompositeObservable {
    let v = random_unitary(rng, dim);
    let observables = (0..parts)
        .map(|_| {
            let values: Vec<f64> = (0..dim).map(|_| rng.random_range(-2..=2) as f64).collect();
            Observable::from_matrix(conjugated_diagonal(&v, &values)).unwrap()
        })
        .collect();
    compose(observables).unwrap()
}
