//! Initial Wigner-distribution samples for the occupied and empty wells.
//!
//! Every trajectory draws from a private ChaCha stream selected by
//! `(seed, trajectory index)`, so any realization can be recomputed in
//! isolation and sampling order across workers never matters.
//!
//! Fock states use the fixed-radius, uniform-phase prescription
//! `α = √(N + ½) e^{iθ}`. It reproduces the symmetric first and second
//! moments exactly; its fourth moments differ from the true Wigner function
//! by O(1), which is negligible against `N²` for the occupations used here.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::model::{ChainConfig, InitialState, TrajectoryState};

/// Random stream owned by a single trajectory.
pub type TrajectoryRng = ChaCha8Rng;

/// Counter-based stream for trajectory `traj` under master seed `seed`.
pub fn trajectory_rng(seed: u64, traj: u64) -> TrajectoryRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(traj);
    rng
}

/// Quantum state of a single well at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialStateKind {
    Fock(f64),
    Coherent(Complex64),
    Vacuum,
}

impl InitialStateKind {
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> Complex64 {
        match self {
            InitialStateKind::Fock(n) => sample_fock(n, rng),
            InitialStateKind::Coherent(alpha) => sample_coherent(alpha, rng),
            InitialStateKind::Vacuum => sample_coherent(Complex64::new(0.0, 0.0), rng),
        }
    }
}

/// Gaussian cloud of half-quantum width centred on `alpha`.
pub fn sample_coherent<R: Rng + ?Sized>(alpha: Complex64, rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    alpha + Complex64::new(re, im) * 0.5
}

/// Point on the circle of radius `√(N + ½)` with uniform phase.
pub fn sample_fock<R: Rng + ?Sized>(n: f64, rng: &mut R) -> Complex64 {
    let theta = rng.random::<f64>() * TAU;
    Complex64::from_polar((n + 0.5).sqrt(), theta)
}

/// Per-well initial states: the middle well empty, every other well loaded
/// with `atoms_per_well`. Coherent wells all share phase zero.
pub fn initial_kinds(config: &ChainConfig) -> Vec<InitialStateKind> {
    let m = config.middle();
    (0..config.n_wells)
        .map(|j| {
            if j == m {
                InitialStateKind::Vacuum
            } else {
                match config.initial_state {
                    InitialState::Fock => InitialStateKind::Fock(config.atoms_per_well),
                    InitialState::Coherent => {
                        InitialStateKind::Coherent(Complex64::new(config.atoms_per_well.sqrt(), 0.0))
                    }
                }
            }
        })
        .collect()
}

pub fn sample_initial_chain<R: Rng + ?Sized>(config: &ChainConfig, rng: &mut R) -> TrajectoryState {
    let amplitudes = initial_kinds(config)
        .into_iter()
        .map(|kind| kind.sample(rng))
        .collect();
    TrajectoryState::new(amplitudes, 0.0)
}
