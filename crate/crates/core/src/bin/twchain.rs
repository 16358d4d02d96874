use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use twchain::{ChainConfig, Overrides, PairSelection, Variation};

#[derive(Parser)]
#[command(name = "twchain", version, about = "Truncated-Wigner Bose-Hubbard chain simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the stochastic ensemble and write timeseries.csv + report.json.
    Run(Common),
    /// Write the exact non-interacting reference in the same schema.
    Oracle(Common),
    /// One run per chain length or dephasing rate, plus combined entropy tables.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', conflicts_with = "gamma", required_unless_present = "gamma")]
        n_wells: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        gamma: Vec<f64>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    traj: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = Pairs::Default)]
    pairs: Pairs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pairs {
    Default,
    All,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            traj: self.traj,
            seed: self.seed,
            workers: self.workers,
            pairs: match self.pairs {
                Pairs::Default => PairSelection::Default,
                Pairs::All => PairSelection::All,
            },
        }
    }
}

fn execute(cli: Cli) -> twchain::Result<()> {
    match cli.command {
        Command::Run(common) => {
            let config = ChainConfig::from_path(&common.config)?;
            let report = twchain::run(&config, &common.overrides(), &common.out)?;
            eprintln!("{} trajectories in {:.1}s -> {}", report.n_traj_completed, report.wall_time_s, common.out.display());
        }
        Command::Oracle(common) => {
            let config = ChainConfig::from_path(&common.config)?;
            twchain::oracle_run(&config, &common.overrides(), &common.out)?;
            eprintln!("linear reference -> {}", common.out.display());
        }
        Command::Sweep { common, n_wells, gamma } => {
            let config = ChainConfig::from_path(&common.config)?;
            let variation = if n_wells.is_empty() {
                Variation::Gamma(gamma)
            } else {
                Variation::Wells(n_wells)
            };
            let reports = twchain::sweep(&config, &variation, &common.overrides(), &common.out)?;
            eprintln!("{} variants -> {}", reports.len(), common.out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
