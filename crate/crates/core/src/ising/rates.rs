use super::lattice::SpinConfig;
use crate::error::{Error, Result};

/// Inverse critical temperature of the square-lattice Ising model.
pub fn critical_beta() -> f64 {
    (1.0 + 2.0f64.sqrt()).ln() / 2.0
}

/// Rates of the dissipative Ising process: every spin flips at Δ, a spin
/// with 3 misaligned neighbours additionally at κ̃, with 4 at κ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateParams {
    pub delta: f64,
    pub kappa: f64,
    pub kappa_tilde: f64,
    pub beta: f64,
}

/// κ̃ = √(Δκ + Δ²) − Δ, written without cancellation.
pub fn kappa_tilde(delta: f64, kappa: f64) -> f64 {
    let num = delta * kappa;
    if num == 0.0 {
        return 0.0;
    }
    num / ((num + delta * delta).sqrt() + delta)
}

/// β = ln[(κ + Δ)/Δ]/8.
pub fn beta_from_rates(delta: f64, kappa: f64) -> f64 {
    if delta == 0.0 {
        return f64::INFINITY;
    }
    (kappa / delta).ln_1p() / 8.0
}

impl RateParams {
    pub fn new(delta: f64, kappa: f64) -> Result<Self> {
        if !(delta >= 0.0 && kappa >= 0.0) || !delta.is_finite() || !kappa.is_finite() {
            return Err(Error::Domain(format!("rates must be finite and nonnegative (Δ={delta}, κ={kappa})")));
        }
        if delta == 0.0 && kappa == 0.0 {
            return Err(Error::Domain("at least one of Δ, κ must be positive".into()));
        }
        Ok(Self { delta, kappa, kappa_tilde: kappa_tilde(delta, kappa), beta: beta_from_rates(delta, kappa) })
    }

    /// Flip rate of a site with `n_mis` misaligned neighbours.
    pub fn rate(&self, n_mis: u8) -> f64 {
        match n_mis {
            3 => self.delta + self.kappa_tilde,
            4 => self.delta + self.kappa,
            _ => self.delta,
        }
    }

    pub fn class_rates(&self) -> [f64; 5] {
        std::array::from_fn(|k| self.rate(k as u8))
    }
}

/// Rates at inverse temperature β for correction rate κ: Δ = κ/(e^{8β} − 1).
/// β = ∞ gives Δ = 0.
pub fn rates_from_beta(beta: f64, kappa: f64) -> Result<RateParams> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
    }
    let delta = kappa / (8.0 * beta).exp_m1();
    let mut r = RateParams::new(delta, kappa)?;
    r.beta = beta;
    Ok(r)
}

/// Effective lattice rates of the photonic Ising model with photon number
/// N: Δ = Nκ₁, κ = Nκ_nn, β = ln[(κ_nn + κ₁)/κ₁]/8.
pub fn photonic_to_ising(kappa1: f64, kappa_nn: f64, n: f64) -> Result<RateParams> {
    for (name, v) in [("kappa1", kappa1), ("kappa_nn", kappa_nn), ("N", n)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    let beta = ((kappa_nn + kappa1) / kappa1).ln() / 8.0;
    let r = RateParams::new(n * kappa1, n * kappa_nn)?;
    let via_beta = rates_from_beta(beta, n * kappa_nn)?;
    if (via_beta.delta - r.delta).abs() > 1e-12 * r.delta.max(1.0) {
        return Err(Error::Domain("inconsistent rate mapping".into()));
    }
    Ok(RateParams { beta, ..r })
}

/// Flip rate of `site` in `config`.
pub fn flip_rate(config: &SpinConfig, site: usize, rates: &RateParams) -> f64 {
    rates.rate(config.class_of(site))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_rates_give_ln2_over_8() {
        let r = RateParams::new(1.0, 1.0).unwrap();
        assert!((r.beta - 2f64.ln() / 8.0).abs() < 1e-15);
        assert!((r.beta - 0.086643).abs() < 1e-6);
    }

    #[test]
    fn beta_round_trip_and_invariants() {
        for &beta in &[0.05, 0.2, 0.4407, 0.6, 1.5] {
            let r = rates_from_beta(beta, 2.0).unwrap();
            assert!((beta_from_rates(r.delta, r.kappa) - beta).abs() < 1e-12);
            let naive = (r.delta * r.kappa + r.delta * r.delta).sqrt() - r.delta;
            assert!((r.kappa_tilde - naive).abs() < 1e-12);
        }
    }

    #[test]
    fn critical_ratio() {
        let r = rates_from_beta(critical_beta(), 1.0).unwrap();
        assert!((r.kappa / r.delta - 32.9706).abs() < 1e-4);
        assert!((critical_beta() - 0.4407).abs() < 1e-4);
    }

    #[test]
    fn low_temperature_limit() {
        let r = rates_from_beta(40.0, 1.0).unwrap();
        assert!(r.delta < 1e-100 && r.kappa_tilde < 1e-50);
        let r = rates_from_beta(f64::INFINITY, 1.0).unwrap();
        assert_eq!(r.delta, 0.0);
        assert_eq!(r.kappa_tilde, 0.0);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(rates_from_beta(0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(rates_from_beta(-1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(photonic_to_ising(0.0, 1.0, 4.0), Err(Error::Domain(_))));
    }

    #[test]
    fn photonic_mapping() {
        let r = photonic_to_ising(0.1, 0.1, 3.0).unwrap();
        assert!((r.beta - 2f64.ln() / 8.0).abs() < 1e-15);
        let r2 = photonic_to_ising(0.01, 0.5, 6.0).unwrap();
        let r1 = photonic_to_ising(0.01, 0.5, 3.0).unwrap();
        assert!((r2.delta - 2.0 * r1.delta).abs() < 1e-15);
        assert!((r2.kappa - 2.0 * r1.kappa).abs() < 1e-15);
        assert_eq!(r2.beta, r1.beta);
        let threshold = (8.0 * critical_beta()).exp() - 1.0;
        assert!((threshold - 32.9706).abs() < 1e-4);
        assert!(photonic_to_ising(1.0, threshold * 1.001, 1.0).unwrap().beta > critical_beta());
        assert!(photonic_to_ising(1.0, threshold * 0.999, 1.0).unwrap().beta < critical_beta());
    }

    #[test]
    fn flip_rates_by_class() {
        let r = RateParams::new(0.3, 2.0).unwrap();
        let mut c = SpinConfig::uniform(5, 0).unwrap();
        assert_eq!(flip_rate(&c, 7, &r), 0.3);
        c.flip(12);
        assert_eq!(flip_rate(&c, 12, &r), 2.3);
        for j in c.neighbors(12) {
            assert_eq!(flip_rate(&c, j, &r), 0.3);
        }
        // three misaligned: up spins on three sides of site 12
        let mut c = SpinConfig::uniform(5, 0).unwrap();
        let nb = c.neighbors(12);
        for &j in &nb[..3] {
            c.flip(j);
        }
        assert_eq!(c.class_of(12), 3);
        assert!((flip_rate(&c, 12, &r) - (0.3 + r.kappa_tilde)).abs() < 1e-15);
    }
}
