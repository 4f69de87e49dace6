use photonic_ising::ising::exact::{classical_generator, detailed_balance_error};
use photonic_ising::ising::rates::beta_from_rates;
use photonic_ising::ising::{flip_rate, kmc_run, rates_from_beta, RateParams, SpinConfig};
use proptest::prelude::*;

fn config(max_m: usize) -> impl Strategy<Value = SpinConfig> {
    (2..=max_m).prop_flat_map(|m| {
        proptest::collection::vec(0u8..=1, m * m).prop_map(move |s| SpinConfig::from_spins(m, s).unwrap())
    })
}

proptest! {
    #[test]
    fn class_cache_survives_flips(c in config(7), flips in proptest::collection::vec(0usize..49, 0..40)) {
        let mut c = c;
        for f in flips {
            let site = f % c.n_sites();
            let before = c.energy();
            let n_mis = c.misaligned(site);
            c.flip(site);
            prop_assert!(c.classes_consistent());
            prop_assert_eq!(c.energy() - before, 8.0 - 4.0 * n_mis as f64);
        }
        let total: usize = c.class_counts().iter().sum();
        prop_assert_eq!(total, c.n_sites());
    }

    #[test]
    fn global_flip_keeps_energy_and_rates(c in config(6), beta in 0.05f64..1.5) {
        let rates = rates_from_beta(beta, 1.0).unwrap();
        let g = c.globally_flipped();
        prop_assert_eq!(g.energy(), c.energy());
        prop_assert_eq!(g.magnetization(), -c.magnetization());
        for s in 0..c.n_sites() {
            prop_assert_eq!(flip_rate(&g, s, &rates), flip_rate(&c, s, &rates));
        }
    }

    #[test]
    fn rate_ratio_is_boltzmann(c in config(6), beta in 0.05f64..2.0, kappa in 0.1f64..5.0) {
        let rates = rates_from_beta(beta, kappa).unwrap();
        for s in 0..c.n_sites() {
            let mut d = c.clone();
            d.flip(s);
            let ratio = flip_rate(&c, s, &rates) / flip_rate(&d, s, &rates);
            let want = (-beta * (d.energy() - c.energy())).exp();
            prop_assert!((ratio / want - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn beta_round_trip(beta in 0.01f64..3.0, kappa in 0.01f64..10.0) {
        let r = rates_from_beta(beta, kappa).unwrap();
        prop_assert!((beta_from_rates(r.delta, r.kappa) - beta).abs() < 1e-10 * beta.max(1.0));
        let again = RateParams::new(r.delta, kappa).unwrap();
        prop_assert!((again.kappa_tilde - r.kappa_tilde).abs() < 1e-12);
        prop_assert!(r.rate(0) == r.rate(2) && r.rate(2) < r.rate(3) && r.rate(3) < r.rate(4));
    }

    #[test]
    fn index_round_trip(index in 0usize..512) {
        prop_assert_eq!(SpinConfig::from_index(3, index).unwrap().index(), index);
    }
}

#[test]
fn generator_columns_sum_to_zero() {
    let rates = rates_from_beta(0.4, 1.0).unwrap();
    let q = classical_generator(3, &rates).unwrap();
    for j in 0..q.ncols() {
        let s: f64 = (0..q.nrows()).map(|i| q[(i, j)]).sum();
        assert!(s.abs() < 1e-12);
    }
    assert!(detailed_balance_error(3, &rates).unwrap() < 1e-12);
}

#[test]
fn kmc_is_reproducible_per_seed() {
    let rates = rates_from_beta(0.5, 1.0).unwrap();
    let start = SpinConfig::uniform(6, 0).unwrap();
    let a = kmc_run(start.clone(), &rates, 50.0, 9).unwrap();
    let b = kmc_run(start.clone(), &rates, 50.0, 9).unwrap();
    let c = kmc_run(start, &rates, 50.0, 10).unwrap();
    assert_eq!(a.config, b.config);
    assert_eq!(a.events, b.events);
    assert_ne!(a.events, c.events);
}
