//! Trajectory moments and their conversion to normally ordered expectation
//! values.
//!
//! Accumulators hold raw symmetric-ordered sums. Every ordering correction
//! (the half quantum on occupations and the unpacking of density products)
//! happens here and only here.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::TrajectoryState;

/// Running sums over trajectories at a single sample time.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentAccumulator {
    n: usize,
    pub count: u64,
    /// `Σ α_i* α_j`, row-major `n × n`, Hermitian by construction.
    pub first_order: Vec<Complex64>,
    /// `Σ |α_i|² |α_j|²`, row-major `n × n`.
    pub density_pairs: Vec<f64>,
    /// `Σ (|α_i|² |α_j|²)²`, used only for error bars.
    pub density_pairs_sq: Vec<f64>,
    pub t: f64,
}

impl MomentAccumulator {
    pub fn new(n_wells: usize, t: f64) -> Self {
        Self {
            n: n_wells,
            count: 0,
            first_order: vec![Complex64::new(0.0, 0.0); n_wells * n_wells],
            density_pairs: vec![0.0; n_wells * n_wells],
            density_pairs_sq: vec![0.0; n_wells * n_wells],
            t,
        }
    }

    pub fn n_wells(&self) -> usize {
        self.n
    }

    pub fn accumulate(&mut self, state: &TrajectoryState) -> Result<()> {
        if state.t != self.t {
            return Err(Error::TimeMismatch {
                expected: self.t,
                found: state.t,
            });
        }
        self.add(&state.amplitudes);
        Ok(())
    }

    /// Adds one trajectory without checking its time stamp.
    pub fn add(&mut self, alpha: &[Complex64]) {
        let n = self.n;
        debug_assert_eq!(alpha.len(), n);
        for i in 0..n {
            let pi = alpha[i].norm_sqr();
            for j in i..n {
                let pj = alpha[j].norm_sqr();
                let product = alpha[i].conj() * alpha[j];
                let dd = pi * pj;
                self.first_order[i * n + j] += product;
                self.density_pairs[i * n + j] += dd;
                self.density_pairs_sq[i * n + j] += dd * dd;
                if i != j {
                    self.first_order[j * n + i] += product.conj();
                    self.density_pairs[j * n + i] += dd;
                    self.density_pairs_sq[j * n + i] += dd * dd;
                }
            }
        }
        self.count += 1;
    }

    /// Folds `other` into `self`, as if its trajectories had been added here.
    pub fn merge(&mut self, other: &MomentAccumulator) -> Result<()> {
        if other.n != self.n || other.t != self.t {
            return Err(Error::IncompatibleAccumulators);
        }
        for (a, b) in self.first_order.iter_mut().zip(&other.first_order) {
            *a += b;
        }
        for (a, b) in self.density_pairs.iter_mut().zip(&other.density_pairs) {
            *a += b;
        }
        for (a, b) in self.density_pairs_sq.iter_mut().zip(&other.density_pairs_sq) {
            *a += b;
        }
        self.count += other.count;
        Ok(())
    }

    fn nonempty(&self) -> Result<f64> {
        if self.count == 0 {
            Err(Error::EmptyAccumulator)
        } else {
            Ok(self.count as f64)
        }
    }

    fn off_diagonal(i: usize, j: usize) -> Result<()> {
        if i == j {
            Err(Error::DiagonalPair(i))
        } else {
            Ok(())
        }
    }

    /// Mean `α_i* α_j` without any ordering correction.
    fn mean_first(&self, i: usize, j: usize) -> Result<Complex64> {
        let count = self.nonempty()?;
        Ok(self.first_order[i * self.n + j] / count)
    }

    fn mean_density(&self, i: usize, j: usize) -> Result<f64> {
        let count = self.nonempty()?;
        Ok(self.density_pairs[i * self.n + j] / count)
    }

    /// Occupation `N_j = ⟨|α_j|²⟩ − ½` of the well stored at position `j`.
    pub fn population(&self, j: usize) -> Result<f64> {
        Ok(self.mean_first(j, j)?.re - 0.5)
    }

    pub fn populations(&self) -> Result<Vec<f64>> {
        (0..self.n).map(|j| self.population(j)).collect()
    }

    /// `⟨a_i† a_j⟩` for `i ≠ j`.
    pub fn coherence(&self, i: usize, j: usize) -> Result<Complex64> {
        Self::off_diagonal(i, j)?;
        self.mean_first(i, j)
    }

    /// `⟨n_i n_j⟩` for `i ≠ j`.
    pub fn number_pair(&self, i: usize, j: usize) -> Result<f64> {
        Self::off_diagonal(i, j)?;
        let ni = self.population(i)?;
        let nj = self.population(j)?;
        Ok(self.mean_density(i, j)? - 0.5 * (ni + nj) - 0.25)
    }

    /// Hillery-Zubairy quantity `|⟨a_i† a_j⟩|² − ⟨n_i n_j⟩`; positive values
    /// witness mode entanglement.
    pub fn xi(&self, i: usize, j: usize) -> Result<f64> {
        Ok(self.sigma(i, j)? - self.number_pair(i, j)?)
    }

    /// Two-mode coherence `|⟨a_i† a_j⟩|²`.
    pub fn sigma(&self, i: usize, j: usize) -> Result<f64> {
        Ok(self.coherence(i, j)?.norm_sqr())
    }

    /// Atomic current into the middle well `m`, so that `dN_m/dt = J I_m`.
    pub fn current_middle(&self, m: usize) -> Result<f64> {
        let mut current = 0.0;
        if m > 0 {
            current += 2.0 * self.coherence(m - 1, m)?.im;
        }
        if m + 1 < self.n {
            current += 2.0 * self.coherence(m + 1, m)?.im;
        }
        Ok(current)
    }

    // Standard errors of the ensemble means. For complex entries the bound
    // uses the full variance E|z|² − |Ez|², which dominates the variance of
    // either the real or the imaginary part. A single sample has no error
    // estimate, reported as infinite.

    fn se(&self, second: f64, mean_sq: f64) -> Result<f64> {
        let count = self.nonempty()?;
        if count < 2.0 {
            return Ok(f64::INFINITY);
        }
        Ok(((second - mean_sq).max(0.0) / (count - 1.0)).sqrt())
    }

    pub fn population_stderr(&self, j: usize) -> Result<f64> {
        let mean = self.mean_first(j, j)?.re;
        self.se(self.mean_density(j, j)?, mean * mean)
    }

    pub fn coherence_stderr(&self, i: usize, j: usize) -> Result<f64> {
        let c = self.coherence(i, j)?;
        self.se(self.mean_density(i, j)?, c.norm_sqr())
    }

    pub fn number_pair_stderr(&self, i: usize, j: usize) -> Result<f64> {
        Self::off_diagonal(i, j)?;
        let count = self.nonempty()?;
        let mean = self.mean_density(i, j)?;
        let pop = self.population_stderr(i)? + self.population_stderr(j)?;
        let second = self.density_pairs_sq[i * self.n + j] / count;
        Ok(self.se(second, mean * mean)? + 0.5 * pop)
    }

    /// Standard error of `σ_ij` by linear propagation.
    pub fn sigma_stderr(&self, i: usize, j: usize) -> Result<f64> {
        let c = self.coherence(i, j)?;
        Ok(2.0 * c.norm() * self.coherence_stderr(i, j)?)
    }

    /// Triangle-inequality bound on the standard error of `ξ_ij`.
    pub fn xi_stderr(&self, i: usize, j: usize) -> Result<f64> {
        Ok(self.sigma_stderr(i, j)? + self.number_pair_stderr(i, j)?)
    }

    pub fn current_stderr(&self, m: usize) -> Result<f64> {
        let mut se = 0.0;
        if m > 0 {
            se += 2.0 * self.coherence_stderr(m - 1, m)?;
        }
        if m + 1 < self.n {
            se += 2.0 * self.coherence_stderr(m + 1, m)?;
        }
        Ok(se)
    }
}

/// A pair of wells by zero-based storage position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WellPair(pub usize, pub usize);

impl WellPair {
    /// Middle well and its left neighbour, `(m − 1, m)`.
    pub fn left_middle(middle: usize) -> Self {
        WellPair(middle - 1, middle)
    }

    /// The two neighbours of the middle well, `(m − 1, m + 1)`.
    pub fn straddling(middle: usize) -> Self {
        WellPair(middle - 1, middle + 1)
    }
}

/// Correlations for one pair of wells at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairObservables {
    pub pair: WellPair,
    pub coherence: Complex64,
    pub xi: f64,
    pub sigma: f64,
}

impl PairObservables {
    pub fn from_moments(acc: &MomentAccumulator, pair: WellPair) -> Result<Self> {
        Ok(Self {
            pair,
            coherence: acc.coherence(pair.0, pair.1)?,
            xi: acc.xi(pair.0, pair.1)?,
            sigma: acc.sigma(pair.0, pair.1)?,
        })
    }
}

/// Everything reported at one sample time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableRecord {
    pub t: f64,
    pub populations: Vec<f64>,
    pub current: f64,
    /// Pair `(m − 1, m)`.
    pub left_middle: PairObservables,
    /// Pair `(m − 1, m + 1)`.
    pub straddling: PairObservables,
    /// Every `i < j` pair, present only when all pairs were requested.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub all_pairs: Vec<PairObservables>,
    pub zeta: f64,
    pub zeta_r: f64,
}
