//! Reduced single-particle density matrices and their pseudo-entropies.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::MomentAccumulator;

/// Eigenvalues at or below this contribute nothing to the entropy sum.
pub const EIGENVALUE_CLAMP: f64 = 1e-12;

/// Hermitian matrix of first-order coherences normalized by the total
/// chain population.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdmMatrix {
    pub entries: DMatrix<Complex64>,
    /// Total population used as the denominator.
    pub norm_total: f64,
    /// Largest standard error of any normalized entry; zero for exact input.
    pub tolerance: f64,
}

impl SpdmMatrix {
    /// Wraps an arbitrary matrix, replacing it by its Hermitian part.
    pub fn from_matrix(entries: DMatrix<Complex64>) -> Self {
        let hermitian = (&entries + entries.adjoint()) * Complex64::new(0.5, 0.0);
        Self {
            entries: hermitian,
            norm_total: 1.0,
            tolerance: 0.0,
        }
    }

    /// Diagonal matrix from real weights, normalized by `norm_total`.
    pub fn from_diagonal(weights: &[f64], norm_total: f64) -> Self {
        let diag: Vec<Complex64> = weights.iter().map(|w| Complex64::new(w / norm_total, 0.0)).collect();
        Self {
            entries: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)),
            norm_total,
            tolerance: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut values: Vec<f64> = SymmetricEigen::new(self.entries.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        values.sort_by(f64::total_cmp);
        values
    }

    /// Real and imaginary parts as nested rows, for serialization.
    pub fn to_parts(&self) -> SpdmParts {
        let k = self.dim();
        let rows = |f: fn(&Complex64) -> f64| {
            (0..k)
                .map(|i| (0..k).map(|j| f(&self.entries[(i, j)])).collect())
                .collect()
        };
        SpdmParts {
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }
}

/// `{"re": [[...]], "im": [[...]]}` form of a density matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpdmParts {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

fn build(acc: &MomentAccumulator, wells: &[usize]) -> Result<SpdmMatrix> {
    let populations = acc.populations()?;
    let norm_total: f64 = populations.iter().sum();
    if norm_total.is_nan() || norm_total <= 0.0 {
        return Err(Error::NonPositiveNorm(norm_total));
    }
    let k = wells.len();
    let mut entries = DMatrix::from_element(k, k, Complex64::new(0.0, 0.0));
    let mut tolerance: f64 = 0.0;
    for (a, &i) in wells.iter().enumerate() {
        for (b, &j) in wells.iter().enumerate() {
            let (value, se) = if i == j {
                (Complex64::new(populations[i], 0.0), acc.population_stderr(i)?)
            } else {
                (acc.coherence(i, j)?, acc.coherence_stderr(i, j)?)
            };
            entries[(a, b)] = value / norm_total;
            tolerance = tolerance.max(se / norm_total);
        }
    }
    let mut matrix = SpdmMatrix::from_matrix(entries);
    matrix.norm_total = norm_total;
    matrix.tolerance = tolerance;
    Ok(matrix)
}

/// Full-chain reduced single-particle density matrix; unit trace.
pub fn reduced_spdm(acc: &MomentAccumulator) -> Result<SpdmMatrix> {
    let wells: Vec<usize> = (0..acc.n_wells()).collect();
    build(acc, &wells)
}

/// Block over the middle well and its two neighbours, still normalized by
/// the population of the whole chain.
pub fn reduced_middle3(acc: &MomentAccumulator) -> Result<SpdmMatrix> {
    let m = acc.n_wells() / 2;
    build(acc, &[m - 1, m, m + 1])
}

/// Von Neumann entropy `−Σ λ ln λ` of the matrix's eigenvalues.
///
/// Eigenvalues down to ten statistical standard errors below zero are
/// treated as zero; anything more negative means the moments are corrupt.
pub fn pseudo_entropy(r: &SpdmMatrix) -> Result<f64> {
    let floor = -10.0 * r.tolerance.max(EIGENVALUE_CLAMP);
    let mut entropy = 0.0;
    for lambda in r.eigenvalues() {
        if lambda < floor {
            return Err(Error::SignificantNegativeEigenvalue { value: lambda, floor });
        }
        if lambda > EIGENVALUE_CLAMP {
            entropy -= lambda * lambda.ln();
        }
    }
    Ok(entropy)
}

/// `ln n`: the entropy of an equally populated, fully decohered chain.
pub fn max_equilibrium_entropy(n: usize) -> f64 {
    (n as f64).ln()
}
