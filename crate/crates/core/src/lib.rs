//! Truncated-Wigner simulation of open Bose-Hubbard chains whose middle well
//! starts empty and suffers number-conserving dephasing.

pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod runner;
pub mod sampling;
pub mod spectral;

pub use ensemble::{simulate, Ensemble, PairSelection, RunOptions};
pub use error::{Error, Result};
pub use model::{middle_index, ChainConfig, InitialState, TrajectoryState};
pub use runner::{oracle_run, run, sweep, Overrides, RunReport, Variation};
