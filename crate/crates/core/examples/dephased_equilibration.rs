//! Dephasing on the middle well drives a trimer towards equal populations
//! and a maximally mixed single-particle density matrix.

use twchain::spectral::{max_equilibrium_entropy, pseudo_entropy, reduced_spdm};
use twchain::{simulate, ChainConfig, InitialState, RunOptions};

fn main() -> twchain::Result<()> {
    for state in [InitialState::Fock, InitialState::Coherent] {
        let mut config = ChainConfig::new(3, state, 1.5);
        config.n_traj = 2000;
        let ensemble = simulate(&config.validate()?, RunOptions::default())?;
        let last = ensemble.final_moments();
        let r = reduced_spdm(last)?;

        println!("{state:?} start, Jt = {}", last.t);
        println!("  populations {:.1?}", last.populations()?);
        for i in 0..3 {
            let row: Vec<String> = (0..3)
                .map(|j| format!("{:+.4}{:+.4}i", r.entries[(i, j)].re, r.entries[(i, j)].im))
                .collect();
            println!("  [{}]", row.join("  "));
        }
        println!(
            "  entropy {:.4} (max {:.4})",
            pseudo_entropy(&r)?,
            max_equilibrium_entropy(3)
        );
    }
    Ok(())
}
