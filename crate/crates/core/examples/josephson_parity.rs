//! Rotating-wave Josephson term restricted to a cat codespace: its diagonal
//! from the cosine of the position matrix and from scaled Laguerre values,
//! and the even/odd splitting it produces.
//!
//! cargo run --example josephson_parity

use num_complex::Complex64 as C64;
use photonic_ising::operators::{cat_states, josephson_rwa_hamiltonian, scaled_laguerre, FockSpace};

fn main() -> photonic_ising::Result<()> {
    let space = FockSpace::new(80)?;
    println!("{:>6} {:>12} {:>12} {:>9}", "|a|^2", "splitting", "-1/sqrt(2pi|a|^2)", "routes");
    for n in [4.0f64, 9.0, 16.0, 25.0] {
        let x = 2.0 * n.sqrt();
        let n_check = (n + 4.0 * n.sqrt()) as usize;
        let h = josephson_rwa_hamiltonian(1.0, x, &space, n_check)?;
        let lag = scaled_laguerre(x * x, space.dim());
        let routes = (0..=n_check).map(|k| (h.get(k, k).re + lag[k]).abs()).fold(0.0, f64::max);
        let (even, odd) = cat_states(C64::new(n.sqrt(), 0.0), &space)?;
        let split = h.expectation(&even).re - h.expectation(&odd).re;
        println!("{n:>6} {split:>12.6} {:>12.6} {routes:>9.1e}", -1.0 / (2.0 * std::f64::consts::PI * n).sqrt());
    }
    Ok(())
}
