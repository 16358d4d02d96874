//! Physical parameters of the chain and the per-trajectory phase-space state.
//!
//! Wells carry 1-based labels `1..=n` in every user-facing output (CSV
//! headers, reports). Inside the library amplitudes live in a plain `Vec`
//! indexed from zero, so well `j` is stored at position `j - 1`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Quantum state of every initially occupied well.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialState {
    Fock,
    Coherent,
}

/// Full physical and numerical parameterization of one simulation run.
///
/// Time is measured in units of `1/J`; with the default `tunnel_j = 1` the
/// reported `t` is the dimensionless product `Jt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub n_wells: usize,
    #[serde(default = "defaults::tunnel_j")]
    pub tunnel_j: f64,
    #[serde(default = "defaults::chi")]
    pub chi: f64,
    #[serde(default)]
    pub gamma: f64,
    pub initial_state: InitialState,
    #[serde(default = "defaults::atoms_per_well")]
    pub atoms_per_well: f64,
    /// Use `|α|² − 1` instead of `|α|²` in the collisional drift.
    #[serde(default)]
    pub wigner_correction: bool,
    #[serde(default = "defaults::t_final")]
    pub t_final: f64,
    #[serde(default = "defaults::dt")]
    pub dt: f64,
    #[serde(default = "defaults::sample_stride")]
    pub sample_stride: usize,
    #[serde(default = "defaults::n_traj")]
    pub n_traj: usize,
    #[serde(default)]
    pub seed: u64,
}

mod defaults {
    pub fn tunnel_j() -> f64 {
        1.0
    }
    pub fn chi() -> f64 {
        0.01
    }
    pub fn atoms_per_well() -> f64 {
        200.0
    }
    pub fn t_final() -> f64 {
        30.0
    }
    pub fn dt() -> f64 {
        1e-3
    }
    pub fn sample_stride() -> usize {
        100
    }
    pub fn n_traj() -> usize {
        10_000
    }
}

impl ChainConfig {
    /// A chain with the standard parameters: `J = 1`, `χ = 0.01`, 200 atoms
    /// in every outer well, evolved to `Jt = 30`.
    pub fn new(n_wells: usize, initial_state: InitialState, gamma: f64) -> Self {
        Self {
            n_wells,
            tunnel_j: defaults::tunnel_j(),
            chi: defaults::chi(),
            gamma,
            initial_state,
            atoms_per_well: defaults::atoms_per_well(),
            wigner_correction: false,
            t_final: defaults::t_final(),
            dt: defaults::dt(),
            sample_stride: defaults::sample_stride(),
            n_traj: defaults::n_traj(),
            seed: 0,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ChainConfig = serde_json::from_str(text)?;
        raw.validate()
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Checks every invariant and hands the config back unchanged.
    pub fn validate(self) -> Result<Self> {
        if self.n_wells < 3 || self.n_wells.is_multiple_of(2) {
            return Err(Error::EvenWellCount(self.n_wells));
        }
        for (field, value) in [("dt", self.dt), ("t_final", self.t_final)] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::NonPositiveStep { field, value });
            }
        }
        for (field, value) in [
            ("tunnel_j", self.tunnel_j),
            ("chi", self.chi),
            ("gamma", self.gamma),
            ("atoms_per_well", self.atoms_per_well),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::NegativeRate { field, value });
            }
        }
        if self.n_traj == 0 {
            return Err(Error::ZeroCount { field: "n_traj" });
        }
        if self.sample_stride == 0 {
            return Err(Error::ZeroCount { field: "sample_stride" });
        }
        Ok(self)
    }

    /// Zero-based storage position of the middle well.
    pub fn middle(&self) -> usize {
        middle_index(self.n_wells) - 1
    }

    /// Number of integrator steps needed to reach `t_final`.
    pub fn n_steps(&self) -> usize {
        // Tolerate t_final values that are an exact multiple of dt up to rounding.
        (self.t_final / self.dt + 1e-9).floor() as usize
    }

    /// Number of recorded sample times, including `t = 0`.
    pub fn n_samples(&self) -> usize {
        self.n_steps() / self.sample_stride + 1
    }

    pub fn sample_time(&self, sample: usize) -> f64 {
        (sample * self.sample_stride) as f64 * self.dt
    }

    /// Total number of atoms initially loaded into the chain.
    pub fn total_atoms(&self) -> f64 {
        (self.n_wells - 1) as f64 * self.atoms_per_well
    }
}

/// 1-based label of the middle well, `(n + 1) / 2`.
pub fn middle_index(n_wells: usize) -> usize {
    n_wells.div_ceil(2)
}

/// One stochastic realization: the Wigner amplitude of every well at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryState {
    pub amplitudes: Vec<Complex64>,
    pub t: f64,
}

impl TrajectoryState {
    pub fn new(amplitudes: Vec<Complex64>, t: f64) -> Self {
        Self { amplitudes, t }
    }

    pub fn n_wells(&self) -> usize {
        self.amplitudes.len()
    }

    /// `Σ_j |α_j|²`, conserved along every trajectory.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.amplitudes.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }
}
