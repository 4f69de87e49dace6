//! Mean-field phases of the photonic Ising lattice over (kappa1, kappa_d),
//! drawn as a character map, plus one relaxation trajectory.
//!
//! cargo run --example meanfield_phase

use num_complex::Complex64 as C64;
use photonic_ising::meanfield::{meanfield_ode, phase_diagram, photonic_ising_fixed_point, DiagramAxes, MFInputs, Phase};

fn main() -> photonic_ising::Result<()> {
    let steps = 25;
    let axis: Vec<f64> = (0..steps).map(|k| 1.0 * k as f64 / (steps - 1) as f64).collect();
    let cells = phase_diagram(&DiagramAxes::Grid { kappa1: axis.clone(), kappad: axis.clone() }, 0.3, 1.0, 1.0)?;
    println!("rows: kappa_d from 1 down to 0; columns: kappa1 from 0 to 1");
    println!("F = ferro_cat, c = cat_only, . = trivial");
    for j in (0..steps).rev() {
        let line: String = (0..steps)
            .map(|i| match cells[i * steps + j].phase {
                Phase::FerroCat => 'F',
                Phase::CatOnly => 'c',
                Phase::Trivial => '.',
            })
            .collect();
        println!("  {line}");
    }

    let inputs = MFInputs { kappa1: 0.01, kappad: 0.0, kappann: 0.3, lam: 1.0, kappa2: 1.0 };
    let fixed = photonic_ising_fixed_point(&inputs)?;
    let traj = meanfield_ode(&inputs, 0.2, C64::new(0.3, 0.0), 100.0)?;
    let last = traj.times.len() - 1;
    println!(
        "fixed point <Q>^2 {:.6}, |alpha|^2 {:.6}; ODE from Q=0.2 reaches Q^2 {:.6}, |A2| {:.6} at t={}",
        fixed.q_sq,
        fixed.alpha_sq,
        traj.q[last] * traj.q[last],
        traj.a2[last].norm(),
        traj.times[last]
    );
    Ok(())
}
