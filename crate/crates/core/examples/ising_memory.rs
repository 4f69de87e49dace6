//! Single-shot memory of the dissipative Ising lattice above and below the
//! critical temperature.
//!
//! cargo run --release --example ising_memory -- [n_traj]

use photonic_ising::ising::{critical_beta, memory_experiment};
use photonic_ising::stats::linear_fit;

fn main() -> photonic_ising::Result<()> {
    let n_traj: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let t = 800.0;
    println!("beta_c = {:.4}", critical_beta());
    println!("{:>5} {:>3} {:>10} {:>10} {:>8}", "beta", "M", "success", "stderr", "secs");
    for (beta, sizes) in [(0.2, vec![5, 7, 9]), (0.6, vec![3, 5, 7, 9, 11])] {
        let mut ms = Vec::new();
        let mut logs = Vec::new();
        for m in sizes {
            let r = memory_experiment(m, beta, 1.0, t, n_traj, 2024)?;
            println!("{beta:>5} {m:>3} {:>10.5} {:>10.5} {:>8.2}", r.success_prob, r.stderr, r.wall_time);
            if r.success_prob < 1.0 {
                ms.push(m as f64);
                logs.push((1.0 - r.success_prob).ln());
            }
        }
        if let Some(fit) = linear_fit(&ms, &logs) {
            println!("  log(1-p) vs M: slope {:.3}, R² {:.4}", fit.slope, fit.r_squared);
        }
    }
    Ok(())
}
