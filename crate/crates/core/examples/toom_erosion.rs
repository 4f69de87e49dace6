//! Toom's north-east-center majority rule eating error islands, with and
//! without per-step noise.
//!
//! cargo run --example toom_erosion

use photonic_ising::ising::toom::{erosion_steps, toom_step_with};
use photonic_ising::ising::SpinConfig;
use photonic_ising::rng::stream_rng;

fn island(m: usize, side: usize) -> photonic_ising::Result<SpinConfig> {
    let mut spins = vec![0u8; m * m];
    for y in 0..side {
        for x in 0..side {
            spins[y * m + x] = 1;
        }
    }
    SpinConfig::from_spins(m, spins)
}

fn show(c: &SpinConfig) {
    let m = c.m();
    for y in (0..m).rev() {
        let row: String = (0..m).map(|x| if c.spin(c.site(x, y)) == 1 { '#' } else { '.' }).collect();
        println!("  {row}");
    }
}

fn main() -> photonic_ising::Result<()> {
    let m = 12;
    for side in 1..=5 {
        let steps = erosion_steps(&island(m, side)?, 0, 4 * m);
        println!("{side}x{side} island on M={m}: erased after {steps:?} steps");
    }

    let mut c = island(m, 4)?;
    println!("4x4 island, step 0");
    show(&c);
    let mut rng = stream_rng(5, 0);
    for step in 1..=3 {
        c = toom_step_with(&c, 0.0, &mut rng)?;
        println!("step {step}");
        show(&c);
    }

    for p in [0.01, 0.05, 0.2] {
        let mut c = SpinConfig::uniform(m, 0)?;
        let mut rng = stream_rng(9, 0);
        let mut worst: usize = 0;
        for _ in 0..500 {
            c = toom_step_with(&c, p, &mut rng)?;
            worst = worst.max(c.n_up());
        }
        println!("flip probability {p}: at most {worst} of {} sites wrong over 500 steps, final magnetization {:.3}", m * m, c.magnetization());
    }
    Ok(())
}
