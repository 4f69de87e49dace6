//! The flip process written as a Lindbladian on M² qubits, for
//! cross-checking the lattice simulation on tiny lattices.

use num_complex::Complex64 as C64;

use super::lattice::SpinConfig;
use super::rates::RateParams;
use crate::error::{Error, Result};
use crate::lindblad::LindbladModel;
use crate::operators::{Factor, Operator, SpaceTag};

/// Largest lattice for which the qubit Lindbladian is built.
pub const QUANTUM_MAX_M: usize = 2;

fn tag(n_sites: usize) -> SpaceTag {
    SpaceTag::new(vec![Factor::Qubit; n_sites])
}

/// X_s times a diagonal weight over basis states; basis index bit s is
/// the spin of site s.
fn flip_times_diag(n_sites: usize, site: usize, weight: &[f64]) -> Operator {
    Operator::from_fn(tag(n_sites), |i, j| {
        if i == j ^ (1 << site) {
            C64::new(weight[j], 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Mean-Z operator over all sites.
pub fn magnetization_operator(m: usize) -> Result<Operator> {
    let n = m * m;
    let mags: Vec<f64> =
        (0..1usize << n).map(|i| SpinConfig::from_index(m, i).map(|c| c.magnetization())).collect::<Result<_>>()?;
    Ok(Operator::from_fn(tag(n), |i, j| C64::new(if i == j { mags[i] } else { 0.0 }, 0.0)))
}

/// H = 0 with per-site channels √Δ X, √κ X P⁴ and four √κ̃ X P³ whose
/// projectors select three misaligned slots and one aligned slot. Channels
/// that vanish identically (zero rate or empty projector) are dropped.
pub fn ising_lindblad_model(m: usize, rates: &RateParams) -> Result<LindbladModel> {
    if !(2..=QUANTUM_MAX_M).contains(&m) {
        return Err(Error::InvalidParams(format!("qubit Lindbladian needs 2 ≤ M ≤ {QUANTUM_MAX_M}")));
    }
    let n = m * m;
    let dim = 1usize << n;
    let configs: Vec<SpinConfig> = (0..dim).map(|i| SpinConfig::from_index(m, i)).collect::<Result<_>>()?;
    let mut jumps = Vec::new();
    let mut push = |site: usize, rate: f64, w: Vec<f64>| {
        if rate > 0.0 && w.iter().any(|&x| x != 0.0) {
            let s = rate.sqrt();
            jumps.push(flip_times_diag(n, site, &w.iter().map(|x| x * s).collect::<Vec<_>>()));
        }
    };
    for site in 0..n {
        push(site, rates.delta, vec![1.0; dim]);
        let mis: Vec<[bool; 4]> = configs
            .iter()
            .map(|c| {
                let nb = c.neighbors(site);
                std::array::from_fn(|k| c.spin(nb[k]) != c.spin(site))
            })
            .collect();
        push(site, rates.kappa, mis.iter().map(|f| f.iter().all(|&x| x) as u8 as f64).collect());
        for aligned in 0..4 {
            let w = mis
                .iter()
                .map(|f| (0..4).all(|k| f[k] != (k == aligned)) as u8 as f64)
                .collect();
            push(site, rates.kappa_tilde, w);
        }
    }
    LindbladModel::new(Operator::zeros(tag(n)), jumps)
}
