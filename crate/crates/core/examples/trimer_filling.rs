//! Loads the outer wells of a trimer and watches the empty middle well fill.
//!
//! ```text
//! cargo run --release --example trimer_filling
//! ```

use twchain::{simulate, ChainConfig, InitialState, PairSelection, RunOptions};

fn main() -> twchain::Result<()> {
    let mut config = ChainConfig::new(3, InitialState::Fock, 0.0);
    config.n_traj = 2000;
    config.t_final = 10.0;
    let config = config.validate()?;

    let ensemble = simulate(&config, RunOptions::default())?;
    println!("{:>6} {:>9} {:>9} {:>9} {:>9}", "Jt", "N1", "N2", "N3", "I_m");
    for record in ensemble.records(PairSelection::Default)?.iter().step_by(5) {
        let n = &record.populations;
        println!(
            "{:6.2} {:9.2} {:9.2} {:9.2} {:9.2}",
            record.t, n[0], n[1], n[2], record.current
        );
    }
    Ok(())
}
