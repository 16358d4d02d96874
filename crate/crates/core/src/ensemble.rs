//! Parallel trajectory averaging with worker-count-independent results.
//!
//! Trajectories are grouped into fixed blocks of [`CHUNK`] consecutive
//! indices. Each block is integrated sequentially into its own set of
//! accumulators, and blocks are merged strictly in index order, so the
//! floating-point sums never depend on how many threads did the work.

use rayon::prelude::*;

use crate::dynamics::integrate_trajectory;
use crate::error::Result;
use crate::model::ChainConfig;
use crate::observables::{MomentAccumulator, ObservableRecord, PairObservables, WellPair};
use crate::spectral::{pseudo_entropy, reduced_middle3, reduced_spdm};

/// Trajectories per independently accumulated block.
pub const CHUNK: usize = 64;

/// Which pair correlations to report besides the two default pairs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum PairSelection {
    #[default]
    Default,
    All,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses rayon's default.
    pub workers: Option<usize>,
    pub pairs: PairSelection,
}

/// Moments at every sample time, summed over all trajectories.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub config: ChainConfig,
    pub moments: Vec<MomentAccumulator>,
}

fn empty_series(config: &ChainConfig) -> Vec<MomentAccumulator> {
    (0..config.n_samples())
        .map(|k| MomentAccumulator::new(config.n_wells, config.sample_time(k)))
        .collect()
}

fn run_chunk(config: &ChainConfig, start: usize, end: usize) -> Result<Vec<MomentAccumulator>> {
    let mut series = empty_series(config);
    for traj in start..end {
        integrate_trajectory(config, traj as u64, |k, state| series[k].add(&state.amplitudes))?;
    }
    Ok(series)
}

/// Integrates `config.n_traj` trajectories and sums their moments.
pub fn simulate(config: &ChainConfig, options: RunOptions) -> Result<Ensemble> {
    let config = config.clone().validate()?;
    let n_chunks = config.n_traj.div_ceil(CHUNK);
    let work = || -> Result<Vec<MomentAccumulator>> {
        let mut total = empty_series(&config);
        // Bound memory by collecting a limited number of blocks at a time.
        let batch = (rayon::current_num_threads() * 4).max(1);
        for first in (0..n_chunks).step_by(batch) {
            let last = (first + batch).min(n_chunks);
            let blocks: Vec<Vec<MomentAccumulator>> = (first..last)
                .into_par_iter()
                .map(|c| run_chunk(&config, c * CHUNK, ((c + 1) * CHUNK).min(config.n_traj)))
                .collect::<Result<_>>()?;
            for block in &blocks {
                for (acc, part) in total.iter_mut().zip(block) {
                    acc.merge(part)?;
                }
            }
        }
        Ok(total)
    };
    let moments = match options.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(work)?,
        None => work()?,
    };
    Ok(Ensemble { config, moments })
}

/// Converts one accumulator into the reported observables.
pub fn observe(acc: &MomentAccumulator, pairs: PairSelection) -> Result<ObservableRecord> {
    let n = acc.n_wells();
    let m = n / 2;
    let all_pairs = match pairs {
        PairSelection::Default => Vec::new(),
        PairSelection::All => (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| WellPair(i, j)))
            .map(|p| PairObservables::from_moments(acc, p))
            .collect::<Result<_>>()?,
    };
    Ok(ObservableRecord {
        t: acc.t,
        populations: acc.populations()?,
        current: acc.current_middle(m)?,
        left_middle: PairObservables::from_moments(acc, WellPair::left_middle(m))?,
        straddling: PairObservables::from_moments(acc, WellPair::straddling(m))?,
        all_pairs,
        zeta: pseudo_entropy(&reduced_spdm(acc)?)?,
        zeta_r: pseudo_entropy(&reduced_middle3(acc)?)?,
    })
}

impl Ensemble {
    pub fn records(&self, pairs: PairSelection) -> Result<Vec<ObservableRecord>> {
        self.moments.iter().map(|acc| observe(acc, pairs)).collect()
    }

    pub fn final_moments(&self) -> &MomentAccumulator {
        self.moments.last().expect("at least the t = 0 sample")
    }
}
