//! Master-equation evolution and quantum-jump trajectories of a damped
//! two-photon-driven cavity, and the two routes compared.
//!
//! cargo run --release --example lindblad_trajectories -- [n_traj]

use num_complex::Complex64 as C64;
use photonic_ising::lindblad::{
    ensemble_average_at, evolve_times, DensityMatrix, EvolveOptions, LindbladModel, TrajectoryOptions,
};
use photonic_ising::operators::{annihilation, number, parity, FockSpace, StateVector};

fn main() -> photonic_ising::Result<()> {
    let n_traj: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let space = FockSpace::new(16)?;
    let a = annihilation(&space);
    let a2 = &a * &a;
    // drive ε(a†² + a²) with two-photon loss and weak single-photon loss
    let h = (&a2 + &a2.adjoint()).scale_real(1.0);
    let model = LindbladModel::new(h, vec![a2.clone(), a.scale_real(0.1)])?;
    let psi0 = StateVector::fock(&space, 0)?;
    let rho0 = DensityMatrix::pure(&psi0)?;
    let times: Vec<f64> = (1..=8).map(|k| 0.5 * k as f64).collect();
    let (n_op, q_op) = (number(&space), parity(&space));

    let exact = evolve_times(&model, &rho0, &times, EvolveOptions::default())?;
    let sampled = ensemble_average_at(
        &model,
        &psi0,
        &times,
        n_traj,
        &[n_op.clone(), q_op.clone()],
        11,
        &TrajectoryOptions::default(),
    )?;
    println!("{:>5} {:>10} {:>18} {:>10} {:>18}", "t", "<n>", "<n> jumps", "<P>", "<P> jumps");
    for (k, t) in times.iter().enumerate() {
        let n = exact[k].expectation(&n_op).re;
        let q = exact[k].expectation(&q_op).re;
        let (mn, sn) = (sampled.means[k][0], sampled.stderrs[k][0]);
        let (mq, sq) = (sampled.means[k][1], sampled.stderrs[k][1]);
        println!("{t:>5} {n:>10.5} {mn:>10.5} ± {sn:.4} {q:>10.5} {mq:>10.5} ± {sq:.4}");
    }
    let purity: f64 = exact.last().unwrap().to_vec().iter().map(C64::norm_sqr).sum();
    println!("purity at t = {}: {:.5}", times.last().unwrap(), purity);
    Ok(())
}
