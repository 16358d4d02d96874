//! Without interactions the one-body density matrix obeys a closed linear
//! equation. This compares the stochastic ensemble against it.

use twchain::oracle::compare_tw_to_oracle;
use twchain::{ChainConfig, InitialState};

fn main() -> twchain::Result<()> {
    for gamma in [0.0, 1.5] {
        let mut config = ChainConfig::new(5, InitialState::Fock, gamma);
        config.chi = 0.0;
        config.t_final = 10.0;
        let comparison = compare_tw_to_oracle(&config, 4000)?;
        println!(
            "gamma = {gamma}: max |deviation| = {:.3} atoms, max z = {:.2}",
            comparison.max_abs(),
            comparison.max_z()
        );
    }
    Ok(())
}
