//! Symmetry-broken steady states of the two-photon driven cavity with
//! single-photon loss: overlap of |α> with the displaced coherent state |μ>,
//! and how far the projected steady state sits from |μ>.
//!
//! cargo run --release --example cavity_steady_state

use photonic_ising::cavity::{alpha_mu_overlap, overlap_formula, steady_overlap_scan, CavityParams, ModelFamily};

fn main() -> photonic_ising::Result<()> {
    println!("|<alpha|mu>|^2 against exp[-k1^2/(16 k2 lam)]");
    for lam in [2.0, 4.0, 8.0] {
        for kappa1 in [1e-3, 1e-2, 1e-1] {
            let p = CavityParams::new(lam, 1.0)?.with_kappa1(kappa1);
            let exact = alpha_mu_overlap(&p)?;
            println!("  lam {lam:>3}  k1 {kappa1:>6}  computed {exact:.12}  formula {:.12}", overlap_formula(kappa1, 1.0, lam));
        }
    }

    let kappa1 = [1e-3, 3e-3, 1e-2];
    for family in [ModelFamily::Model1, ModelFamily::Model2] {
        println!("{family}: 1 - <mu|rho|mu>");
        for r in steady_overlap_scan(family, &[4.0, 8.0], &kappa1, 1.0)? {
            println!("  N {:>3}  k1 {:>6}  {:.3e}", r.n, r.kappa1, 1.0 - r.overlap);
        }
    }
    Ok(())
}
