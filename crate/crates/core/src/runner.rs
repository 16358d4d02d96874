//! Batch runs: time series on disk, JSON reports, and parameter sweeps.
//!
//! `timeseries.csv` has the header
//!
//! ```text
//! t,N_1,…,N_n,I_m,re_coh_lm,im_coh_lm,re_coh_lr,im_coh_lr,xi_lm,xi_lr,sigma_lm,sigma_lr,zeta,zeta_r
//! ```
//!
//! where `lm` is the pair (m−1, m) and `lr` the pair (m−1, m+1). With all
//! pairs requested, `re_coh_i_j,im_coh_i_j,xi_i_j,sigma_i_j` follow for every
//! `i < j`. Well labels are 1-based and every value carries 17 significant
//! digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::ensemble::{simulate, PairSelection, RunOptions};
use crate::error::Result;
use crate::model::ChainConfig;
use crate::observables::ObservableRecord;
use crate::oracle::{linear_series, observe_reference, LinearReferenceState};
use crate::spectral::{reduced_spdm, SpdmMatrix, SpdmParts};

pub const TIMESERIES_FILE: &str = "timeseries.csv";
pub const REPORT_FILE: &str = "report.json";
pub const ENTROPY_FILE: &str = "entropy.csv";
pub const REDUCED_ENTROPY_FILE: &str = "entropy_reduced.csv";

/// Command-line adjustments applied on top of a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub traj: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub pairs: PairSelection,
}

impl Overrides {
    pub fn apply(&self, config: &ChainConfig) -> Result<ChainConfig> {
        let mut config = config.clone();
        if let Some(traj) = self.traj {
            config.n_traj = traj;
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        config.validate()
    }

    fn options(&self) -> RunOptions {
        RunOptions {
            workers: self.workers,
            pairs: self.pairs,
        }
    }
}

/// Everything needed to reproduce and audit one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// The validated config the run actually used, overrides included.
    pub config: ChainConfig,
    pub source: String,
    pub wall_time_s: f64,
    pub n_traj_completed: u64,
    pub workers: Option<usize>,
    pub final_spdm: SpdmParts,
    pub final_record: ObservableRecord,
    pub files: Vec<PathBuf>,
    pub version: String,
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_header(n_wells: usize, records: &[ObservableRecord]) -> String {
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=n_wells).map(|j| format!("N_{j}")));
    cols.extend(
        [
            "I_m", "re_coh_lm", "im_coh_lm", "re_coh_lr", "im_coh_lr", "xi_lm", "xi_lr", "sigma_lm",
            "sigma_lr", "zeta", "zeta_r",
        ]
        .map(String::from),
    );
    if let Some(first) = records.first() {
        for p in &first.all_pairs {
            let (i, j) = (p.pair.0 + 1, p.pair.1 + 1);
            cols.extend([
                format!("re_coh_{i}_{j}"),
                format!("im_coh_{i}_{j}"),
                format!("xi_{i}_{j}"),
                format!("sigma_{i}_{j}"),
            ]);
        }
    }
    cols.join(",")
}

pub fn csv_row(r: &ObservableRecord) -> String {
    let mut vals = vec![fmt(r.t)];
    vals.extend(r.populations.iter().map(|&x| fmt(x)));
    vals.extend(
        [
            r.current,
            r.left_middle.coherence.re,
            r.left_middle.coherence.im,
            r.straddling.coherence.re,
            r.straddling.coherence.im,
            r.left_middle.xi,
            r.straddling.xi,
            r.left_middle.sigma,
            r.straddling.sigma,
            r.zeta,
            r.zeta_r,
        ]
        .map(fmt),
    );
    for p in &r.all_pairs {
        vals.extend([p.coherence.re, p.coherence.im, p.xi, p.sigma].map(fmt));
    }
    vals.join(",")
}

pub fn timeseries_csv(n_wells: usize, records: &[ObservableRecord]) -> String {
    let mut out = csv_header(n_wells, records);
    out.push('\n');
    for r in records {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn write_outputs(
    out_dir: &Path,
    config: &ChainConfig,
    records: &[ObservableRecord],
    spdm: &SpdmMatrix,
    source: &str,
    n_traj_completed: u64,
    workers: Option<usize>,
    started: Instant,
) -> Result<RunReport> {
    fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join(TIMESERIES_FILE);
    let report_path = out_dir.join(REPORT_FILE);
    fs::write(&csv_path, timeseries_csv(config.n_wells, records))?;
    let report = RunReport {
        config: config.clone(),
        source: source.to_string(),
        wall_time_s: started.elapsed().as_secs_f64(),
        n_traj_completed,
        workers,
        final_spdm: spdm.to_parts(),
        final_record: records.last().expect("t = 0 is always sampled").clone(),
        files: vec![csv_path, report_path.clone()],
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    fs::write(&report_path, serde_json::to_string_pretty(&report)? + "\n")?;
    Ok(report)
}

/// Runs the stochastic pipeline and writes `timeseries.csv` and `report.json`.
pub fn run(config: &ChainConfig, overrides: &Overrides, out_dir: &Path) -> Result<RunReport> {
    let started = Instant::now();
    let config = overrides.apply(config)?;
    let ensemble = simulate(&config, overrides.options())?;
    let records = ensemble.records(overrides.pairs)?;
    let spdm = reduced_spdm(ensemble.final_moments())?;
    write_outputs(
        out_dir,
        &config,
        &records,
        &spdm,
        "truncated-wigner",
        ensemble.final_moments().count,
        overrides.workers,
        started,
    )
}

/// Writes the exact linear reference in the same schema as [`run`].
pub fn oracle_run(config: &ChainConfig, overrides: &Overrides, out_dir: &Path) -> Result<RunReport> {
    let started = Instant::now();
    let config = overrides.apply(config)?;
    let series = linear_series(&config)?;
    let records = series
        .iter()
        .map(|s| observe_reference(s, overrides.pairs))
        .collect::<Result<Vec<_>>>()?;
    let last: &LinearReferenceState = series.last().expect("t = 0 is always sampled");
    let spdm = SpdmMatrix::from_matrix(&last.rho1 / num_complex::Complex64::new(last.trace(), 0.0));
    write_outputs(out_dir, &config, &records, &spdm, "linear-reference", 0, None, started)
}

/// Which parameter a sweep varies.
#[derive(Debug, Clone, PartialEq)]
pub enum Variation {
    Wells(Vec<usize>),
    Gamma(Vec<f64>),
}

impl Variation {
    fn variants(&self, base: &ChainConfig) -> Vec<(String, ChainConfig)> {
        match self {
            Variation::Wells(ns) => ns
                .iter()
                .map(|&n| {
                    let mut c = base.clone();
                    c.n_wells = n;
                    (n.to_string(), c)
                })
                .collect(),
            Variation::Gamma(gs) => gs
                .iter()
                .map(|&g| {
                    let mut c = base.clone();
                    c.gamma = g;
                    (format!("gamma_{g}"), c)
                })
                .collect(),
        }
    }

    fn dir_name(&self, label: &str) -> String {
        match self {
            Variation::Wells(_) => format!("n_wells_{label}"),
            Variation::Gamma(_) => label.to_string(),
        }
    }
}

/// One run per variant in its own subdirectory, plus combined `entropy.csv`
/// (`t,zeta_<label>,…`) and `entropy_reduced.csv` for the middle-three block.
pub fn sweep(
    config: &ChainConfig,
    variation: &Variation,
    overrides: &Overrides,
    out_dir: &Path,
) -> Result<Vec<RunReport>> {
    let variants = variation.variants(config);
    for (_, c) in &variants {
        c.clone().validate()?;
    }
    let mut reports = Vec::new();
    let mut columns: Vec<(String, Vec<ObservableRecord>)> = Vec::new();
    for (label, variant) in variants {
        let dir = out_dir.join(variation.dir_name(&label));
        let started = Instant::now();
        let effective = overrides.apply(&variant)?;
        let ensemble = simulate(&effective, overrides.options())?;
        let records = ensemble.records(overrides.pairs)?;
        let spdm = reduced_spdm(ensemble.final_moments())?;
        reports.push(write_outputs(
            &dir,
            &effective,
            &records,
            &spdm,
            "truncated-wigner",
            ensemble.final_moments().count,
            overrides.workers,
            started,
        )?);
        columns.push((label, records));
    }
    fs::create_dir_all(out_dir)?;
    for (file, pick) in [
        (ENTROPY_FILE, (|r: &ObservableRecord| r.zeta) as fn(&ObservableRecord) -> f64),
        (REDUCED_ENTROPY_FILE, |r: &ObservableRecord| r.zeta_r),
    ] {
        fs::write(out_dir.join(file), entropy_table(&columns, pick))?;
    }
    Ok(reports)
}

fn entropy_table(columns: &[(String, Vec<ObservableRecord>)], pick: fn(&ObservableRecord) -> f64) -> String {
    let mut out = String::from("t");
    for (label, _) in columns {
        let _ = write!(out, ",zeta_{label}");
    }
    out.push('\n');
    let rows = columns.iter().map(|(_, r)| r.len()).min().unwrap_or(0);
    for k in 0..rows {
        out.push_str(&fmt(columns[0].1[k].t));
        for (_, records) in columns {
            out.push(',');
            out.push_str(&fmt(pick(&records[k])));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::InitialState;

    fn tiny() -> ChainConfig {
        let mut c = ChainConfig::new(3, InitialState::Fock, 1.5);
        c.t_final = 0.35;
        c.sample_stride = 100;
        c.n_traj = 40;
        c
    }

    #[test]
    fn header_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        run(&tiny(), &Overrides::default(), dir.path()).unwrap();
        let text = fs::read_to_string(dir.path().join(TIMESERIES_FILE)).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "t,N_1,N_2,N_3,I_m,re_coh_lm,im_coh_lm,re_coh_lr,im_coh_lr,xi_lm,xi_lr,sigma_lm,sigma_lr,zeta,zeta_r"
        );
        // floor(0.35 / 0.1) + 1 rows
        assert_eq!(text.lines().count(), 1 + 4);
    }

    #[test]
    fn values_carry_seventeen_significant_digits() {
        assert_eq!(fmt(1.0 / 3.0), "3.3333333333333331e-1");
        let back: f64 = fmt(std::f64::consts::PI).parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    #[test]
    fn all_pairs_extend_the_header() {
        let dir = tempfile::tempdir().unwrap();
        let overrides = Overrides {
            pairs: PairSelection::All,
            ..Default::default()
        };
        run(&tiny(), &overrides, dir.path()).unwrap();
        let text = fs::read_to_string(dir.path().join(TIMESERIES_FILE)).unwrap();
        let header = text.lines().next().unwrap();
        assert!(header.ends_with("zeta_r,re_coh_1_2,im_coh_1_2,xi_1_2,sigma_1_2,re_coh_1_3,im_coh_1_3,xi_1_3,sigma_1_3,re_coh_2_3,im_coh_2_3,xi_2_3,sigma_2_3"));
        for line in text.lines() {
            assert_eq!(line.split(',').count(), header.split(',').count());
        }
    }

    #[test]
    fn report_echoes_effective_config() {
        let dir = tempfile::tempdir().unwrap();
        let overrides = Overrides {
            traj: Some(7),
            seed: Some(99),
            ..Default::default()
        };
        let report = run(&tiny(), &overrides, dir.path()).unwrap();
        assert_eq!(report.config.n_traj, 7);
        assert_eq!(report.config.seed, 99);
        assert_eq!(report.n_traj_completed, 7);
        let parsed: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join(REPORT_FILE)).unwrap()).unwrap();
        assert_eq!(parsed["config"]["seed"], 99);
        assert_eq!(parsed["final_spdm"]["re"].as_array().unwrap().len(), 3);
        assert_eq!(parsed["final_spdm"]["im"][0].as_array().unwrap().len(), 3);
    }

    #[test]
    fn oracle_rejects_interacting_config_and_matches_schema() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            oracle_run(&tiny(), &Overrides::default(), dir.path()),
            Err(crate::Error::NonzeroChi(_))
        ));
        let mut linear = tiny();
        linear.chi = 0.0;
        linear.tunnel_j = 0.0;
        linear.gamma = 0.0;
        oracle_run(&linear, &Overrides::default(), dir.path()).unwrap();
        let text = fs::read_to_string(dir.path().join(TIMESERIES_FILE)).unwrap();
        let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
        // Without hopping or dephasing every column except t is constant.
        for row in &rows {
            assert_eq!(row[1..], rows[0][1..]);
        }
    }

    #[test]
    fn sweep_writes_variants_and_entropy_table() {
        let dir = tempfile::tempdir().unwrap();
        let reports = sweep(&tiny(), &Variation::Wells(vec![3, 5]), &Overrides::default(), dir.path()).unwrap();
        assert_eq!(reports.len(), 2);
        assert!(dir.path().join("n_wells_5").join(TIMESERIES_FILE).exists());
        let text = fs::read_to_string(dir.path().join(ENTROPY_FILE)).unwrap();
        assert_eq!(text.lines().next().unwrap(), "t,zeta_3,zeta_5");
        assert_eq!(text.lines().count(), 5);
        // A single-variant sweep reproduces the plain run.
        let single = tempfile::tempdir().unwrap();
        sweep(&tiny(), &Variation::Wells(vec![3]), &Overrides::default(), single.path()).unwrap();
        let plain = tempfile::tempdir().unwrap();
        run(&tiny(), &Overrides::default(), plain.path()).unwrap();
        assert_eq!(
            fs::read(single.path().join("n_wells_3").join(TIMESERIES_FILE)).unwrap(),
            fs::read(plain.path().join(TIMESERIES_FILE)).unwrap()
        );
    }

    #[test]
    fn gamma_sweep_labels() {
        let dir = tempfile::tempdir().unwrap();
        sweep(&tiny(), &Variation::Gamma(vec![0.0, 1.5]), &Overrides::default(), dir.path()).unwrap();
        assert!(dir.path().join("gamma_1.5").exists());
        let text = fs::read_to_string(dir.path().join(REDUCED_ENTROPY_FILE)).unwrap();
        assert_eq!(text.lines().next().unwrap(), "t,zeta_gamma_0,zeta_gamma_1.5");
    }
}
