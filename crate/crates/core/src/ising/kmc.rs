use rand::Rng;

use super::lattice::SpinConfig;
use super::rates::RateParams;
use crate::error::{Error, Result};
use crate::rng::stream_rng;

pub const DEFAULT_EVENT_CAP: u64 = 1_000_000_000;

#[derive(Clone, Debug)]
pub struct KmcOutcome {
    pub config: SpinConfig,
    pub events: u64,
}

/// Gillespie run of `config` for time `t`, calling `observe(k, config)` at
/// each of the increasing `checkpoints` that lie in [0, t].
pub fn kmc_evolve<R: Rng, F: FnMut(usize, &SpinConfig)>(
    config: &mut SpinConfig,
    rates: &RateParams,
    t: f64,
    rng: &mut R,
    event_cap: u64,
    checkpoints: &[f64],
    mut observe: F,
) -> Result<u64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("run time must be nonnegative, got {t}")));
    }
    let r = rates.class_rates();
    let mut now = 0.0;
    let mut events = 0u64;
    let mut next_cp = 0;
    loop {
        let counts = config.class_counts();
        let weights: [f64; 5] = std::array::from_fn(|k| counts[k] as f64 * r[k]);
        let total: f64 = weights.iter().sum();
        let dt = if total > 0.0 { -(1.0 - rng.random::<f64>()).ln() / total } else { f64::INFINITY };
        let t_next = now + dt;
        while next_cp < checkpoints.len() && checkpoints[next_cp] < t_next.min(f64::MAX) && checkpoints[next_cp] <= t {
            observe(next_cp, config);
            next_cp += 1;
        }
        if t_next > t {
            break;
        }
        now = t_next;
        let mut pick = rng.random::<f64>() * total;
        let mut class = 4;
        for (k, &w) in weights.iter().enumerate() {
            if w > 0.0 {
                class = k;
                if pick < w {
                    break;
                }
                pick -= w;
            }
        }
        let members = config.members(class);
        let site = members[rng.random_range(0..members.len())] as usize;
        config.flip(site);
        events += 1;
        if events > event_cap {
            return Err(Error::EventCapExceeded { cap: event_cap });
        }
    }
    Ok(events)
}

/// Exact continuous-time simulation of the flip process for time `t`.
pub fn kmc_run(config0: SpinConfig, rates: &RateParams, t: f64, seed: u64) -> Result<KmcOutcome> {
    let mut rng = stream_rng(seed, 0);
    let mut config = config0;
    let events = kmc_evolve(&mut config, rates, t, &mut rng, DEFAULT_EVENT_CAP, &[], |_, _| {})?;
    Ok(KmcOutcome { config, events })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::exact::{exact_stationary, gibbs_distribution};
    use crate::stats::mean_stderr;

    #[test]
    fn zero_time_leaves_config() {
        let c = SpinConfig::from_index(3, 0b101_010_011).unwrap();
        let out = kmc_run(c.clone(), &RateParams::new(1.0, 1.0).unwrap(), 0.0, 9).unwrap();
        assert_eq!(out.config, c);
        assert_eq!(out.events, 0);
    }

    #[test]
    fn pure_noise_event_count_is_poisson() {
        let rates = RateParams { delta: 0.2, kappa: 0.0, kappa_tilde: 0.0, beta: 0.0 };
        let (m, t) = (4, 3.0);
        let counts: Vec<f64> = (0..4000)
            .map(|s| kmc_run(SpinConfig::uniform(m, 0).unwrap(), &rates, t, s).unwrap().events as f64)
            .collect();
        let (mean, se) = mean_stderr(&counts);
        let want = (m * m) as f64 * rates.delta * t;
        assert!((mean - want).abs() < 3.0 * se, "{mean} vs {want} ± {se}");
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (counts.len() - 1) as f64;
        assert!((var / want - 1.0).abs() < 0.1);
    }

    #[test]
    fn long_run_samples_gibbs() {
        let rates = super::super::rates::rates_from_beta(0.3, 1.0).unwrap();
        let gibbs = gibbs_distribution(3, rates.beta);
        let exact = exact_stationary(3, &rates).unwrap();
        let tv: f64 = gibbs.iter().zip(&exact).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0;
        assert!(tv < 1e-10);
        // sample the chain at unit spacing after burn-in
        let mut rng = stream_rng(5, 0);
        let mut c = SpinConfig::uniform(3, 0).unwrap();
        kmc_evolve(&mut c, &rates, 50.0, &mut rng, DEFAULT_EVENT_CAP, &[], |_, _| {}).unwrap();
        let n = 1_000_000;
        let mut hist = vec![0u64; 512];
        let times: Vec<f64> = (0..n).map(|k| k as f64 * 0.5).collect();
        kmc_evolve(&mut c, &rates, n as f64 * 0.5, &mut rng, DEFAULT_EVENT_CAP, &times, |_, cfg| {
            hist[cfg.index()] += 1
        })
        .unwrap();
        let tv: f64 =
            hist.iter().zip(&gibbs).map(|(&h, p)| (h as f64 / n as f64 - p).abs()).sum::<f64>() / 2.0;
        assert!(tv < 0.02, "TV {tv}");
    }
}
