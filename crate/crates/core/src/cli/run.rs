use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::spec::*;
use super::table::{Cell, Table};
use super::CliError;
use crate::cavity::{gap_scan, steady_overlap_scan, toy_fidelity_experiment, CavityParams, ToyProtocol};
use crate::ising::exact::detailed_balance_error;
use crate::ising::memory::memory_experiment_with;
use crate::ising::toom::{toom_majority, toom_step_with};
use crate::ising::{exact_stationary, gibbs_distribution, rates_from_beta, total_variation, MemoryOptions, SpinConfig};
use crate::meanfield::{phase_diagram, toy_recovery_plateau, DiagramAxes, MFInputs};
use crate::rng::{stream_rng, stream_seed};

pub const SCHEMA_VERSION: u32 = 1;
pub const WORKERS_ENV: &str = "PHOTONIC_ISING_WORKERS";

/// Tolerance for the exact-enumeration oracle rows.
const ORACLE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepInfo {
    pub axis: String,
    pub values: Vec<f64>,
    /// Seed used for each value, derived from the master seed.
    pub seeds: Vec<Option<u64>>,
}

/// Sidecar document written next to every table.
#[derive(Clone, Debug, Serialize)]
pub struct RunMeta {
    pub schema_version: u32,
    pub crate_version: &'static str,
    pub kind: Kind,
    pub seed: Option<u64>,
    pub workers: usize,
    pub columns: Vec<String>,
    pub rows: usize,
    pub wall_time: f64,
    /// Resolved spec; `photonic-ising run` on this text repeats the run.
    pub spec_toml: String,
    pub parameters: Params,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepInfo>,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub table: Table,
    pub meta: RunMeta,
}

impl RunResult {
    /// True unless an oracle row failed.
    pub fn all_passed(&self) -> bool {
        match self.table.column("pass") {
            Some(col) => col.iter().all(|c| **c == Cell::Bool(true)),
            None => true,
        }
    }
}

/// Worker count from the environment, or 0 for the pool default.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV).ok().and_then(|s| s.parse().ok()).unwrap_or(0)
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn num(v: f64) -> Cell {
    Cell::Float(v)
}

fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 {
        return vec![lo];
    }
    (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect()
}

/// The data table for one spec; no files are touched.
pub fn execute(spec: &ExperimentSpec) -> Result<Table, CliError> {
    let seed = spec.seed.unwrap_or(0);
    let table = match &spec.params {
        Params::IsingMemory(p) => {
            let rates = rates_from_beta(p.beta, p.kappa)?;
            let opts = MemoryOptions { decoder: p.decoder, initial_bit: p.initial_bit, ..MemoryOptions::default() };
            let r = memory_experiment_with(p.m, &rates, p.t, p.n_traj, seed, opts)?;
            let mut t = Table::new(&[
                "M", "beta", "kappa", "T", "n_traj", "success_prob", "stderr", "decoder", "ties", "mean_events",
            ]);
            t.push(vec![
                r.m.into(),
                num(p.beta),
                num(p.kappa),
                num(r.t),
                r.n_traj.into(),
                num(r.success_prob),
                num(r.stderr),
                r.decoder.into(),
                r.ties.into(),
                num(r.mean_events),
            ]);
            t
        }
        Params::CavitySteady(p) => {
            let mut t = Table::new(&["model", "N", "kappa1", "kappa2", "overlap"]);
            for r in steady_overlap_scan(p.model, &p.n, &p.kappa1, p.kappa2)? {
                t.push(vec![r.model.to_string().into(), num(r.n), num(r.kappa1), num(p.kappa2), num(r.overlap)]);
            }
            t
        }
        Params::GapScan(p) => {
            let mut t = Table::new(&["model", "lam", "kappa1", "kappa2", "gap"]);
            for r in gap_scan(p.model, &p.lam, p.kappa1, p.kappa2)? {
                t.push(vec![r.model.to_string().into(), num(r.lam), num(r.kappa1), num(p.kappa2), num(r.gap)]);
            }
            t
        }
        Params::ToyFidelity(p) => {
            let base = CavityParams::new(p.kappa2, p.kappa2)?
                .with_kappa1(p.kappa1)
                .with_kappad(p.kappad)
                .with_kappann(p.kappann);
            let protocol = ToyProtocol { t_noisy: p.t_noisy, t_recovery: p.t_recovery, mode: p.recovery };
            let curve = toy_fidelity_experiment(&base, &p.n, &protocol)?;
            let mut t = Table::new(&[
                "N", "fidelity", "tolerance", "T_noisy", "T_recovery", "recovery", "meanfield_plateau",
            ]);
            for (&n, &f) in curve.n_values.iter().zip(&curve.fidelity) {
                let mf = MFInputs {
                    kappa1: p.kappa1,
                    kappad: p.kappad,
                    kappann: p.kappann,
                    lam: n * p.kappa2,
                    kappa2: p.kappa2,
                };
                t.push(vec![
                    num(n),
                    num(f),
                    num(curve.tolerance),
                    num(p.t_noisy),
                    num(p.t_recovery),
                    p.recovery.to_string().into(),
                    num(toy_recovery_plateau(&mf)?),
                ]);
            }
            t
        }
        Params::MeanfieldPhase(p) => {
            let kappa1 = linspace(p.kappa1_min, p.kappa1_max, p.kappa1_steps);
            let axes = if p.diagonal {
                DiagramAxes::Diagonal { kappa1 }
            } else {
                DiagramAxes::Grid { kappa1, kappad: linspace(p.kappad_min, p.kappad_max, p.kappad_steps) }
            };
            let mut t = Table::new(&["kappa1", "kappad", "Q_sq", "alpha_sq", "phase"]);
            for c in phase_diagram(&axes, p.kappann, p.lam, p.kappa2)? {
                t.push(vec![num(c.kappa1), num(c.kappad), num(c.q_sq), num(c.alpha_sq), c.phase.to_string().into()]);
            }
            t
        }
        Params::OracleCheck(p) => oracle_table(p)?,
        Params::ToomDemo(p) => toom_table(p, seed)?,
    };
    Ok(table)
}

fn oracle_table(p: &OracleCheckParams) -> Result<Table, CliError> {
    let mut t = Table::new(&["check", "M", "beta", "value", "tolerance", "pass"]);
    let rows: Vec<Vec<Cell>> = p
        .beta
        .par_iter()
        .map(|&beta| -> Result<Vec<Vec<Cell>>, CliError> {
            let rates = rates_from_beta(beta, p.kappa)?;
            let tv = total_variation(&exact_stationary(p.m, &rates)?, &gibbs_distribution(p.m, beta));
            let db = detailed_balance_error(p.m, &rates)?;
            Ok([("gibbs_tv", tv), ("detailed_balance", db)]
                .into_iter()
                .map(|(name, v)| {
                    vec![name.into(), p.m.into(), num(beta), num(v), num(ORACLE_TOL), (v <= ORACLE_TOL).into()]
                })
                .collect())
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    for r in rows {
        t.push(r);
    }
    Ok(t)
}

fn toom_table(p: &ToomDemoParams, seed: u64) -> Result<Table, CliError> {
    let mut spins = vec![0u8; p.m * p.m];
    for y in 0..p.island {
        for x in 0..p.island {
            spins[y * p.m + x] = 1;
        }
    }
    let mut config = SpinConfig::from_spins(p.m, spins)?;
    let mut rng = stream_rng(seed, 0);
    let mut t = Table::new(&["step", "n_up", "magnetization"]);
    for step in 0..=p.steps {
        if step > 0 {
            config = if p.flip_prob > 0.0 {
                toom_step_with(&config, p.flip_prob, &mut rng)?
            } else {
                toom_majority(&config)
            };
        }
        t.push(vec![step.into(), config.n_up().into(), num(config.magnetization())]);
    }
    Ok(t)
}

fn resolved_workers(spec: &ExperimentSpec) -> usize {
    spec.workers.unwrap_or_else(default_workers)
}

fn meta_for(spec: &ExperimentSpec, table: &Table, workers: usize, wall: f64, sweep: Option<SweepInfo>) -> RunMeta {
    RunMeta {
        schema_version: SCHEMA_VERSION,
        crate_version: env!("CARGO_PKG_VERSION"),
        kind: spec.kind,
        seed: spec.seed,
        workers,
        columns: table.columns.clone(),
        rows: table.rows.len(),
        wall_time: wall,
        spec_toml: spec.to_toml(),
        parameters: spec.params.clone(),
        sweep,
    }
}

/// Run one spec on its worker pool.
pub fn run(spec: &ExperimentSpec) -> Result<RunResult, CliError> {
    let workers = resolved_workers(spec);
    let clock = Instant::now();
    let (table, threads) = with_pool(workers, || (execute(spec), rayon::current_num_threads()))?;
    let table = table?;
    let meta = meta_for(spec, &table, threads, clock.elapsed().as_secs_f64(), None);
    Ok(RunResult { table, meta })
}

/// One run per value of `axis`, concatenated in value order. Stochastic
/// kinds get the seed `stream_seed(master, i)` for the i-th value.
pub fn execute_sweep(base: &ExperimentSpec, axis: &str, values: &[f64]) -> Result<(Table, SweepInfo), CliError> {
    if values.is_empty() {
        return Err(CliError::Validation(vec![format!("sweep values for '{axis}': list is empty")]));
    }
    let variants: Vec<ExperimentSpec> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut s = base.with_parameter(axis, v)?;
            if let Some(master) = base.seed {
                s.seed = Some(stream_seed(master, i as u64));
            }
            Ok(s)
        })
        .collect::<Result<_, CliError>>()?;
    let mut combined: Option<Table> = None;
    for s in &variants {
        let t = execute(s)?;
        match &mut combined {
            None => combined = Some(t),
            Some(c) => {
                if !c.extend(t) {
                    return Err(CliError::Io("sweep produced tables with different columns".into()));
                }
            }
        }
    }
    let info = SweepInfo { axis: axis.to_string(), values: values.to_vec(), seeds: variants.iter().map(|s| s.seed).collect() };
    Ok((combined.expect("at least one value"), info))
}

pub fn sweep(base: &ExperimentSpec, axis: &str, values: &[f64]) -> Result<RunResult, CliError> {
    let workers = resolved_workers(base);
    let clock = Instant::now();
    let (swept, threads) = with_pool(workers, || (execute_sweep(base, axis, values), rayon::current_num_threads()))?;
    let (table, info) = swept?;
    let meta = meta_for(base, &table, threads, clock.elapsed().as_secs_f64(), Some(info));
    Ok(RunResult { table, meta })
}

/// `results.csv` -> `results.meta.json`.
pub fn meta_path(out: &Path) -> PathBuf {
    out.with_extension("meta.json")
}

/// Write the table (CSV or JSON) to `out` and the sidecar next to it.
pub fn write_outputs(result: &RunResult, out: &Path, format: Format) -> Result<(), CliError> {
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let body = match format {
        Format::Csv => result.table.to_csv_string(),
        Format::Json => serde_json::to_string_pretty(&result.table).map_err(|e| CliError::Io(e.to_string()))? + "\n",
    };
    fs::write(out, body)?;
    let meta = serde_json::to_string_pretty(&result.meta).map_err(|e| CliError::Io(e.to_string()))?;
    fs::write(meta_path(out), meta + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_rows_pass() {
        let spec = parse_spec("kind = \"oracle-check\"").unwrap();
        let r = run(&spec).unwrap();
        assert_eq!(r.table.rows.len(), 6);
        assert!(r.all_passed());
    }

    #[test]
    fn toom_island_erodes() {
        let spec = parse_spec("kind = \"toom-demo\"\n[parameters]\nM = 6\nisland = 2\nsteps = 4").unwrap();
        let t = execute(&spec).unwrap();
        let n_up: Vec<_> = t.column("n_up").unwrap().into_iter().cloned().collect();
        assert_eq!(n_up[0], Cell::Int(4));
        assert_eq!(n_up[3], Cell::Int(0));
    }

    #[test]
    fn phase_grid_row_count() {
        let text = "kind = \"meanfield-phase\"\n[parameters]\nkappa1_min = 0.0\nkappa1_max = 0.5\nkappa1_steps = 4\nkappad_min = 0.0\nkappad_max = 0.5\nkappad_steps = 3";
        let t = execute(&parse_spec(text).unwrap()).unwrap();
        assert_eq!(t.rows.len(), 12);
    }

    #[test]
    fn empty_sweep_is_rejected() {
        let spec = parse_spec("kind = \"oracle-check\"").unwrap();
        assert!(matches!(execute_sweep(&spec, "beta", &[]), Err(CliError::Validation(_))));
    }
}
