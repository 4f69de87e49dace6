//! Exact enumeration of the 3x3 flip process: stationary law against the
//! Gibbs distribution, detailed balance, and the relaxation of the
//! magnetization compared with kinetic Monte Carlo.
//!
//! cargo run --release --example exact_oracle

use photonic_ising::ising::exact::{detailed_balance_error, exact_magnetization};
use photonic_ising::ising::{
    critical_beta, exact_stationary, gibbs_distribution, kmc_evolve, rates_from_beta, total_variation, SpinConfig,
};
use photonic_ising::rng::stream_rng;
use photonic_ising::stats::mean_stderr;

fn main() -> photonic_ising::Result<()> {
    println!("beta_c = {:.6}", critical_beta());
    for beta in [0.1, 0.3, 0.6] {
        let rates = rates_from_beta(beta, 1.0)?;
        let tv = total_variation(&exact_stationary(3, &rates)?, &gibbs_distribution(3, beta));
        println!(
            "beta {beta}: Delta {:.5}, kappa~ {:.5}, TV to Gibbs {tv:.2e}, detailed balance {:.2e}",
            rates.delta,
            rates.kappa_tilde,
            detailed_balance_error(3, &rates)?
        );
    }

    let rates = rates_from_beta(0.3, 1.0)?;
    let times: Vec<f64> = (1..=6).map(|k| k as f64).collect();
    let exact = exact_magnetization(3, &rates, 0, &times)?;
    let n_traj = 20_000;
    let mut samples = vec![Vec::with_capacity(n_traj); times.len()];
    for i in 0..n_traj {
        let mut c = SpinConfig::uniform(3, 0)?;
        let mut rng = stream_rng(3, i as u64);
        kmc_evolve(&mut c, &rates, *times.last().unwrap(), &mut rng, u64::MAX, &times, |k, s| {
            samples[k].push(s.magnetization())
        })?;
    }
    println!("{:>4} {:>10} {:>18}", "t", "exact <Z>", "kmc <Z>");
    for (k, t) in times.iter().enumerate() {
        let (m, e) = mean_stderr(&samples[k]);
        println!("{t:>4} {:>10.5} {m:>10.5} ± {e:.4}", exact[k]);
    }
    Ok(())
}
