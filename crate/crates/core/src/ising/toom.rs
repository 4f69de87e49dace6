use rand::Rng;

use super::lattice::SpinConfig;
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Noiseless synchronous update: every site takes the majority of itself,
/// its north neighbour (x, y+1) and its east neighbour (x+1, y), all read
/// from the configuration before the step.
pub fn toom_majority(config: &SpinConfig) -> SpinConfig {
    let spins = (0..config.n_sites())
        .map(|s| {
            let nb = config.neighbors(s);
            let votes = config.spin(s) + config.spin(nb[0]) + config.spin(nb[2]);
            (votes >= 2) as u8
        })
        .collect();
    SpinConfig::from_spins(config.m(), spins).expect("same lattice")
}

pub fn toom_step_with<R: Rng>(config: &SpinConfig, flip_prob: f64, rng: &mut R) -> Result<SpinConfig> {
    if !(0.0..=1.0).contains(&flip_prob) {
        return Err(Error::Domain(format!("flip probability must be in [0, 1], got {flip_prob}")));
    }
    let mut next = toom_majority(config);
    if flip_prob > 0.0 {
        for s in 0..next.n_sites() {
            if rng.random::<f64>() < flip_prob {
                next.flip(s);
            }
        }
    }
    Ok(next)
}

/// One Toom step followed by independent bit-flip noise.
pub fn toom_step(config: &SpinConfig, flip_prob: f64, seed: u64) -> Result<SpinConfig> {
    toom_step_with(config, flip_prob, &mut stream_rng(seed, 0))
}

/// Noiseless steps until the lattice is uniform with value `target`.
pub fn erosion_steps(config: &SpinConfig, target: u8, max_steps: usize) -> Option<usize> {
    let mut c = config.clone();
    for k in 0..=max_steps {
        if c.spins().iter().all(|&s| s == target) {
            return Some(k);
        }
        c = toom_majority(&c);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_is_fixed() {
        let c = SpinConfig::uniform(6, 0).unwrap();
        assert_eq!(toom_step(&c, 0.0, 1).unwrap(), c);
    }

    #[test]
    fn single_spin_erased_in_one_step() {
        for site in 0..25 {
            let mut c = SpinConfig::uniform(5, 0).unwrap();
            c.flip(site);
            assert_eq!(erosion_steps(&c, 0, 2), Some(1));
        }
    }

    #[test]
    fn square_island_erodes_from_corner() {
        let mut c = SpinConfig::uniform(8, 0).unwrap();
        for (x, y) in [(3, 3), (4, 3), (3, 4), (4, 4)] {
            let s = c.site(x, y);
            c.flip(s);
        }
        let c1 = toom_majority(&c);
        assert_eq!(c1.n_up(), 3);
        assert_eq!(c1.spin(c1.site(4, 4)), 0);
        assert_eq!(erosion_steps(&c, 0, 10), Some(3));
    }

    #[test]
    fn noise_rate() {
        let c = SpinConfig::uniform(20, 0).unwrap();
        let n = toom_step(&c, 0.1, 4).unwrap().n_up();
        assert!((n as f64 - 40.0).abs() < 20.0);
        assert!(toom_step(&c, 1.5, 0).is_err());
    }
}
