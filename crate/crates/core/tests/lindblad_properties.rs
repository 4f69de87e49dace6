use faer::Mat;
use num_complex::Complex64 as C64;
use photonic_ising::lindblad::{
    build_liouvillian, evolve_with, DensityMatrix, EvolveMethod, EvolveOptions, Generator, LindbladModel,
};
use photonic_ising::operators::{Operator, StateVector};
use proptest::prelude::*;

fn matrix(d: usize, entries: &[f64]) -> Mat<C64> {
    Mat::from_fn(d, d, |i, j| C64::new(entries[2 * (i * d + j)], entries[2 * (i * d + j) + 1]))
}

fn model() -> impl Strategy<Value = LindbladModel> {
    (2usize..=4).prop_flat_map(|d| {
        let n = 2 * d * d;
        (
            proptest::collection::vec(-1.0f64..1.0, n),
            proptest::collection::vec(proptest::collection::vec(-1.0f64..1.0, n), 1..=3),
        )
            .prop_map(move |(h, jumps)| {
                let h = matrix(d, &h);
                let herm = Mat::from_fn(d, d, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
                let jumps = jumps.iter().map(|j| Operator::generic(matrix(d, j)).unwrap()).collect();
                LindbladModel::new(Operator::generic(herm).unwrap(), jumps).unwrap()
            })
    })
}

fn random_state(d: usize, seed: u64) -> StateVector {
    let amps = (0..d)
        .map(|k| {
            let x = ((seed as f64 + 1.3) * (k as f64 + 0.7)).sin();
            C64::new(x, (x * 3.1).cos())
        })
        .collect();
    StateVector::new(amps).normalized().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn evolution_is_a_quantum_channel(m in model(), seed in 0u64..1000, t in 0.01f64..2.0) {
        let rho = DensityMatrix::pure(&random_state(m.dim(), seed)).unwrap();
        let out = evolve_with(&m, &rho, t, EvolveOptions::with_method(EvolveMethod::Expm)).unwrap();
        prop_assert!((out.trace() - C64::new(1.0, 0.0)).norm() < 1e-9);
        prop_assert!(out.hermiticity_error() < 1e-12);
        prop_assert!(out.min_eigenvalue().unwrap() > -1e-9);
        let rk = evolve_with(&m, &rho, t, EvolveOptions::with_method(EvolveMethod::RungeKutta)).unwrap();
        prop_assert!(out.trace_distance(&rk).unwrap() < 1e-7);
    }

    #[test]
    fn dense_and_matrix_free_generators_agree(m in model(), seed in 0u64..1000) {
        let l = build_liouvillian(&m);
        let gen = Generator::new(&m);
        let d = m.dim();
        let x: Vec<C64> = (0..d * d).map(|k| C64::new(((k as f64 + seed as f64) * 0.37).sin(), (k as f64 * 1.1).cos())).collect();
        let mut y = vec![C64::new(0.0, 0.0); d * d];
        gen.apply(&x, &mut y);
        for i in 0..d * d {
            let dense: C64 = (0..d * d).map(|j| l[(i, j)] * x[j]).sum();
            prop_assert!((dense - y[i]).norm() < 1e-12);
        }
    }
}
