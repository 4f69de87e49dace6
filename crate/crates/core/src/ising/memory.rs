use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::decode::{decode_with, Decoder};
use super::kmc::{kmc_evolve, DEFAULT_EVENT_CAP};
use super::lattice::SpinConfig;
use super::rates::{rates_from_beta, RateParams};
use crate::error::Result;
use crate::rng::stream_rng;

#[derive(Clone, Copy, Debug)]
pub struct MemoryOptions {
    pub decoder: Decoder,
    /// Logical bit the lattice starts in (0 = all down).
    pub initial_bit: u8,
    pub event_cap: u64,
}

impl Default for MemoryOptions {
    fn default() -> Self {
        Self { decoder: Decoder::Majority, initial_bit: 0, event_cap: DEFAULT_EVENT_CAP }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MemoryExperimentResult {
    #[serde(rename = "M")]
    pub m: usize,
    pub beta: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub n_traj: usize,
    pub success_prob: f64,
    pub stderr: f64,
    pub decoder: String,
    pub wall_time: f64,
    pub ties: usize,
    pub mean_events: f64,
}

/// Per-trajectory record: decoded bit, whether a tie was broken, events.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShotRecord {
    pub bit: u8,
    pub tie: bool,
    pub events: u64,
}

pub fn memory_shots(
    m: usize,
    rates: &RateParams,
    t: f64,
    n_traj: usize,
    seed: u64,
    opts: MemoryOptions,
) -> Result<Vec<ShotRecord>> {
    let start = SpinConfig::uniform(m, opts.initial_bit)?;
    (0..n_traj)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let mut c = start.clone();
            let events = kmc_evolve(&mut c, rates, t, &mut rng, opts.event_cap, &[], |_, _| {})?;
            let d = decode_with(opts.decoder, &c, &mut rng);
            Ok(ShotRecord { bit: d.bit, tie: d.tie, events })
        })
        .collect()
}

/// Quench from a logical state for time `t`, decode once, and report the
/// fraction of runs that return the initial bit.
pub fn memory_experiment_with(
    m: usize,
    rates: &RateParams,
    t: f64,
    n_traj: usize,
    seed: u64,
    opts: MemoryOptions,
) -> Result<MemoryExperimentResult> {
    let clock = Instant::now();
    let shots = memory_shots(m, rates, t, n_traj, seed, opts)?;
    let ok = shots.iter().filter(|s| s.bit == opts.initial_bit).count();
    let n = n_traj.max(1) as f64;
    let p = ok as f64 / n;
    Ok(MemoryExperimentResult {
        m,
        beta: rates.beta,
        t,
        n_traj,
        success_prob: p,
        stderr: (p * (1.0 - p) / n).sqrt(),
        decoder: opts.decoder.to_string(),
        wall_time: clock.elapsed().as_secs_f64(),
        ties: shots.iter().filter(|s| s.tie).count(),
        mean_events: shots.iter().map(|s| s.events as f64).sum::<f64>() / n,
    })
}

pub fn memory_experiment(
    m: usize,
    beta: f64,
    kappa: f64,
    t: f64,
    n_traj: usize,
    seed: u64,
) -> Result<MemoryExperimentResult> {
    let rates = rates_from_beta(beta, kappa)?;
    memory_experiment_with(m, &rates, t, n_traj, seed, MemoryOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_noise_always_succeeds() {
        let r = memory_experiment(5, f64::INFINITY, 1.0, 100.0, 50, 3).unwrap();
        assert_eq!(r.success_prob, 1.0);
        assert_eq!(r.mean_events, 0.0);
    }

    #[test]
    fn reproducible_and_stderr_formula() {
        let a = memory_experiment(4, 0.3, 1.0, 20.0, 200, 11).unwrap();
        let b = memory_experiment(4, 0.3, 1.0, 20.0, 200, 11).unwrap();
        assert_eq!(a.success_prob, b.success_prob);
        assert_eq!(a.ties, b.ties);
        let p = a.success_prob;
        assert!((a.stderr - (p * (1.0 - p) / 200.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn global_flip_covariance() {
        let rates = rates_from_beta(0.35, 1.0).unwrap();
        let n = 4000;
        let down = memory_experiment_with(4, &rates, 30.0, n, 21, MemoryOptions::default()).unwrap();
        let up_opts = MemoryOptions { initial_bit: 1, ..Default::default() };
        let up = memory_experiment_with(4, &rates, 30.0, n, 22, up_opts).unwrap();
        let se = (down.stderr.powi(2) + up.stderr.powi(2)).sqrt();
        assert!((down.success_prob - up.success_prob).abs() < 3.0 * se.max(1e-3));
    }
}
