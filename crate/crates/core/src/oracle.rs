//! Exact first-moment dynamics for the non-interacting chain (`χ = 0`).
//!
//! Without collisions the single-particle density matrix `ρ_ij = ⟨a_i† a_j⟩`
//! obeys a closed linear equation,
//!
//! ```text
//! dρ/dt = −i[K, ρ] − (Γ/2)(δ_im + δ_jm − 2δ_im δ_jm) ρ_ij
//! ```
//!
//! with `K` the nearest-neighbour hopping matrix. Truncated Wigner is exact
//! for linear dynamics, so the stochastic ensemble must agree with this
//! reference up to sampling error. That is the validation strategy for the
//! stochastic engine; for `χ > 0` no desk-scale exact reference exists.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::ensemble::{simulate, PairSelection, RunOptions};
use crate::error::{Error, Result};
use crate::model::{ChainConfig, InitialState};
use crate::observables::{ObservableRecord, PairObservables, WellPair};
use crate::spectral::{pseudo_entropy, SpdmMatrix};

/// Reference integration step, far below any hopping or dephasing time.
const MAX_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearReferenceState {
    /// Unnormalized `⟨a_i† a_j⟩`, in atoms.
    pub rho1: DMatrix<Complex64>,
    pub t: f64,
}

impl LinearReferenceState {
    /// The `t = 0` moments produced by the initial-state sampler: `N` on
    /// every occupied diagonal, and for coherent input `N` between every
    /// pair of occupied wells.
    pub fn initial(config: &ChainConfig) -> Self {
        let n = config.n_wells;
        let m = config.middle();
        let big_n = config.atoms_per_well;
        let rho1 = DMatrix::from_fn(n, n, |i, j| {
            let occupied = i != m && j != m;
            let filled = match config.initial_state {
                InitialState::Fock => occupied && i == j,
                InitialState::Coherent => occupied,
            };
            Complex64::new(if filled { big_n } else { 0.0 }, 0.0)
        });
        Self { rho1, t: 0.0 }
    }

    pub fn trace(&self) -> f64 {
        self.rho1.diagonal().iter().map(|z| z.re).sum()
    }
}

fn require_linear(config: &ChainConfig) -> Result<()> {
    if config.chi != 0.0 {
        Err(Error::NonzeroChi(config.chi))
    } else {
        Ok(())
    }
}

/// `dρ/dt` on the upper triangle; the lower triangle is mirrored afterwards.
fn generator(rho: &DMatrix<Complex64>, config: &ChainConfig, out: &mut DMatrix<Complex64>) {
    let n = rho.nrows();
    let m = config.middle();
    let ij = Complex64::new(0.0, config.tunnel_j);
    let half_gamma = 0.5 * config.gamma;
    let zero = Complex64::new(0.0, 0.0);
    let at = |i: isize, j: isize| {
        if i < 0 || j < 0 || i >= n as isize || j >= n as isize {
            zero
        } else {
            rho[(i as usize, j as usize)]
        }
    };
    for i in 0..n {
        for j in i..n {
            let (a, b) = (i as isize, j as isize);
            let hop_rows = at(a - 1, b) + at(a + 1, b);
            let hop_cols = at(a, b - 1) + at(a, b + 1);
            let touches = (i == m) as u8 + (j == m) as u8;
            let decay = if touches == 1 { half_gamma } else { 0.0 };
            let value = -ij * hop_rows + ij * hop_cols - rho[(i, j)] * decay;
            out[(i, j)] = value;
            if i != j {
                out[(j, i)] = value.conj();
            }
        }
    }
}

fn rk4_step(state: &mut LinearReferenceState, config: &ChainConfig, h: f64) {
    let n = state.rho1.nrows();
    let zero = || DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let (mut k1, mut k2, mut k3, mut k4) = (zero(), zero(), zero(), zero());
    let half = Complex64::new(0.5 * h, 0.0);
    let full = Complex64::new(h, 0.0);
    generator(&state.rho1, config, &mut k1);
    generator(&(&state.rho1 + &k1 * half), config, &mut k2);
    generator(&(&state.rho1 + &k2 * half), config, &mut k3);
    generator(&(&state.rho1 + &k3 * full), config, &mut k4);
    let sixth = Complex64::new(h / 6.0, 0.0);
    state.rho1 += (k1 + (k2 + k3) * Complex64::new(2.0, 0.0) + k4) * sixth;
    state.t += h;
}

/// Evolves `initial` forward to absolute time `t`.
pub fn linear_evolve(initial: &LinearReferenceState, config: &ChainConfig, t: f64) -> Result<LinearReferenceState> {
    require_linear(config)?;
    let span = t - initial.t;
    let mut state = initial.clone();
    if span <= 0.0 {
        return Ok(state);
    }
    let steps = (span / MAX_STEP.min(config.dt)).ceil() as usize;
    let h = span / steps as f64;
    for _ in 0..steps {
        rk4_step(&mut state, config, h);
    }
    state.t = t;
    Ok(state)
}

/// Reference moments at every sample time of `config`.
pub fn linear_series(config: &ChainConfig) -> Result<Vec<LinearReferenceState>> {
    require_linear(config)?;
    let mut current = LinearReferenceState::initial(config);
    let mut series = Vec::with_capacity(config.n_samples());
    series.push(current.clone());
    for k in 1..config.n_samples() {
        current = linear_evolve(&current, config, config.sample_time(k))?;
        series.push(current.clone());
    }
    Ok(series)
}

/// Observables in the same layout as the stochastic pipeline. The
/// reference carries no density-density moments, so `ξ` is `NaN`.
pub fn observe_reference(state: &LinearReferenceState, pairs: PairSelection) -> Result<ObservableRecord> {
    let n = state.rho1.nrows();
    let m = n / 2;
    let rho = &state.rho1;
    let pair = |p: WellPair| {
        let coherence = rho[(p.0, p.1)];
        PairObservables {
            pair: p,
            coherence,
            xi: f64::NAN,
            sigma: coherence.norm_sqr(),
        }
    };
    let total = state.trace();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::NonPositiveNorm(total));
    }
    let full = SpdmMatrix::from_matrix(rho / Complex64::new(total, 0.0));
    let middle = SpdmMatrix::from_matrix(rho.view((m - 1, m - 1), (3, 3)) / Complex64::new(total, 0.0));
    let all_pairs = match pairs {
        PairSelection::Default => Vec::new(),
        PairSelection::All => (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| WellPair(i, j)))
            .map(pair)
            .collect(),
    };
    Ok(ObservableRecord {
        t: state.t,
        populations: rho.diagonal().iter().map(|z| z.re).collect(),
        current: 2.0 * (rho[(m - 1, m)].im + rho[(m + 1, m)].im),
        left_middle: pair(WellPair::left_middle(m)),
        straddling: pair(WellPair::straddling(m)),
        all_pairs,
        zeta: pseudo_entropy(&full)?,
        zeta_r: pseudo_entropy(&middle)?,
    })
}

/// Deviation of the stochastic moments from the reference at one time.
#[derive(Debug, Clone)]
pub struct SampleDeviation {
    pub t: f64,
    /// Stochastic minus reference `⟨a_i† a_j⟩`, populations on the diagonal.
    pub deviation: DMatrix<Complex64>,
    /// Standard error of each stochastic entry.
    pub stderr: DMatrix<f64>,
}

impl SampleDeviation {
    /// Largest deviation in units of its standard error, over the real and
    /// imaginary parts of every entry.
    pub fn max_z(&self) -> f64 {
        self.deviation
            .iter()
            .zip(self.stderr.iter())
            .map(|(d, &se)| {
                let floor = se.max(1e-9);
                d.re.abs().max(d.im.abs()) / floor
            })
            .fold(0.0, f64::max)
    }

    /// Like [`max_z`](Self::max_z) but restricted to the listed entries.
    pub fn max_z_over(&self, entries: &[(usize, usize)]) -> f64 {
        entries
            .iter()
            .map(|&(i, j)| {
                let d = self.deviation[(i, j)];
                d.re.abs().max(d.im.abs()) / self.stderr[(i, j)].max(1e-9)
            })
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.deviation.iter().map(|d| d.re.abs().max(d.im.abs())).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct OracleComparison {
    pub samples: Vec<SampleDeviation>,
}

impl OracleComparison {
    pub fn max_z(&self) -> f64 {
        self.samples.iter().map(SampleDeviation::max_z).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(SampleDeviation::max_abs).fold(0.0, f64::max)
    }
}

/// Runs the stochastic pipeline and the reference on the same config and
/// reports entry-wise deviations with error bars at every sample time.
pub fn compare_tw_to_oracle(config: &ChainConfig, n_traj: usize) -> Result<OracleComparison> {
    require_linear(config)?;
    let mut config = config.clone();
    config.n_traj = n_traj;
    let reference = linear_series(&config)?;
    let ensemble = simulate(&config, RunOptions::default())?;
    let n = config.n_wells;
    let samples = ensemble
        .moments
        .iter()
        .zip(&reference)
        .map(|(acc, exact)| -> Result<SampleDeviation> {
            let mut deviation = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
            let mut stderr = DMatrix::from_element(n, n, 0.0);
            for i in 0..n {
                for j in 0..n {
                    let (value, se) = if i == j {
                        (Complex64::new(acc.population(i)?, 0.0), acc.population_stderr(i)?)
                    } else {
                        (acc.coherence(i, j)?, acc.coherence_stderr(i, j)?)
                    };
                    deviation[(i, j)] = value - exact.rho1[(i, j)];
                    stderr[(i, j)] = se;
                }
            }
            Ok(SampleDeviation { t: acc.t, deviation, stderr })
        })
        .collect::<Result<_>>()?;
    Ok(OracleComparison { samples })
}
