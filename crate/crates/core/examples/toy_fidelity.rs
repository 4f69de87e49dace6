//! Qubit-cavity toy model: a noisy stretch followed by recovery, with and
//! without the flip-recovery channel, against the mean-field plateau.
//!
//! cargo run --release --example toy_fidelity

use photonic_ising::cavity::{toy_fidelity_experiment, CavityParams, RecoveryMode, ToyProtocol};
use photonic_ising::meanfield::{toy_recovery_plateau, MFInputs};

fn main() -> photonic_ising::Result<()> {
    let ns: Vec<f64> = (2..=10).step_by(2).map(|n| n as f64).collect();
    let cases = [
        ("no recovery channel", 0.0, RecoveryMode::KeepKnn),
        ("kappa_nn kept on", 0.3, RecoveryMode::KeepKnn),
        ("kappa_nn switched off", 0.3, RecoveryMode::ZeroKnn),
    ];
    for (label, kappann, mode) in cases {
        let base = CavityParams::new(1.0, 1.0)?.with_kappa1(0.1).with_kappad(0.1).with_kappann(kappann);
        let protocol = ToyProtocol { mode, ..ToyProtocol::default() };
        let curve = toy_fidelity_experiment(&base, &ns, &protocol)?;
        println!("{label}");
        for (n, f) in curve.n_values.iter().zip(&curve.fidelity) {
            println!("  N {n:>4}  F {f:.6}  1-F {:.3e}", 1.0 - f);
        }
    }
    let mf = MFInputs { kappa1: 0.1, kappad: 0.1, kappann: 0.3, lam: 10.0, kappa2: 1.0 };
    println!("mean-field plateau (1+<Z>)/2 = {:.4}", toy_recovery_plateau(&mf)?);
    Ok(())
}
