//! Liouvillian gap above the slow manifold as the two-photon drive grows,
//! for raw loss (model1) and codespace-restricted loss (model2).
//!
//! cargo run --release --example dissipative_gap

use photonic_ising::cavity::{gap_scan, ModelFamily};
use photonic_ising::stats::linear_fit;

fn main() -> photonic_ising::Result<()> {
    let lams: Vec<f64> = (2..=8).map(|l| l as f64).collect();
    for family in [ModelFamily::Model1, ModelFamily::Model2] {
        let rows = gap_scan(family, &lams, 1e-3, 1.0)?;
        let gaps: Vec<f64> = rows.iter().map(|r| r.gap).collect();
        for r in &rows {
            println!("{family}  lam {:>3}  gap {:.6}", r.lam, r.gap);
        }
        if let Some(fit) = linear_fit(&lams, &gaps) {
            println!("{family}  slope {:.4}  R^2 {:.6}", fit.slope, fit.r_squared);
        }
    }
    Ok(())
}
