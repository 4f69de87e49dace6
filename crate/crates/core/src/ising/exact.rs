use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::lattice::SpinConfig;
use super::rates::RateParams;
use crate::error::{Error, Result};

/// Largest lattice handled by full enumeration.
pub const EXACT_MAX_M: usize = 3;

fn check_size(m: usize) -> Result<usize> {
    if !(2..=EXACT_MAX_M).contains(&m) {
        return Err(Error::InvalidParams(format!("exact enumeration needs 2 ≤ M ≤ {EXACT_MAX_M}, got {m}")));
    }
    Ok(1 << (m * m))
}

/// Energies of all 2^{M²} configurations, indexed as in [`SpinConfig::from_index`].
pub fn energies(m: usize) -> Result<Vec<f64>> {
    let n = check_size(m)?;
    (0..n).map(|i| Ok(SpinConfig::from_index(m, i)?.energy())).collect()
}

/// e^{-βH}/Z over all configurations.
pub fn gibbs_distribution(m: usize, beta: f64) -> Vec<f64> {
    let e = energies(m).expect("supported size");
    let e_min = e.iter().cloned().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = e.iter().map(|&x| (-beta * (x - e_min)).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

/// Nonzero transitions (from, to, rate) of the flip process.
pub fn transitions(m: usize, rates: &RateParams) -> Result<Vec<(usize, usize, f64)>> {
    let n = check_size(m)?;
    let mut out = Vec::with_capacity(n * m * m);
    for i in 0..n {
        let c = SpinConfig::from_index(m, i)?;
        for s in 0..m * m {
            let r = rates.rate(c.misaligned(s));
            if r > 0.0 {
                out.push((i, i ^ (1 << s), r));
            }
        }
    }
    Ok(out)
}

/// Column generator Q with dp/dt = Q p.
pub fn classical_generator(m: usize, rates: &RateParams) -> Result<Mat<f64>> {
    let n = check_size(m)?;
    let mut q = Mat::<f64>::zeros(n, n);
    for (i, j, r) in transitions(m, rates)? {
        q[(j, i)] += r;
        q[(i, i)] -= r;
    }
    Ok(q)
}

/// Number of closed communicating classes of the transition graph.
pub fn closed_classes(m: usize, rates: &RateParams) -> Result<usize> {
    let n = check_size(m)?;
    let mut g = DiGraph::<(), ()>::with_capacity(n, n * m * m);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for (i, j, _) in transitions(m, rates)? {
        g.add_edge(nodes[i], nodes[j], ());
    }
    let sccs = tarjan_scc(&g);
    let mut comp = vec![0usize; n];
    for (k, scc) in sccs.iter().enumerate() {
        for v in scc {
            comp[v.index()] = k;
        }
    }
    let mut open = vec![false; sccs.len()];
    for e in g.raw_edges() {
        let (a, b) = (comp[e.source().index()], comp[e.target().index()]);
        if a != b {
            open[a] = true;
        }
    }
    Ok(open.iter().filter(|&&o| !o).count())
}

/// Stationary distribution of the flip process. Uses the subtraction-free
/// Grassmann–Taksar–Heyman elimination, which stays accurate when the rates
/// span many orders of magnitude (large β); falls back to
/// [`stationary_by_lu`] if an elimination pivot vanishes.
pub fn exact_stationary(m: usize, rates: &RateParams) -> Result<Vec<f64>> {
    let classes = closed_classes(m, rates)?;
    if classes != 1 {
        return Err(Error::KernelDegeneracy { classes });
    }
    match stationary_gth(m, rates)? {
        Some(p) => Ok(p),
        None => stationary_by_lu(m, rates),
    }
}

fn stationary_gth(m: usize, rates: &RateParams) -> Result<Option<Vec<f64>>> {
    let n = check_size(m)?;
    // q[i * n + j] = rate i -> j, off-diagonal only
    let mut q = vec![0.0f64; n * n];
    for (i, j, r) in transitions(m, rates)? {
        q[i * n + j] += r;
    }
    for k in (1..n).rev() {
        let out: f64 = q[k * n..k * n + k].iter().sum();
        if !(out > 0.0) {
            return Ok(None);
        }
        for i in 0..k {
            let f = q[i * n + k] / out;
            if f == 0.0 {
                continue;
            }
            for j in 0..k {
                if j != i {
                    q[i * n + j] += f * q[k * n + j];
                }
            }
        }
    }
    let mut p = vec![0.0f64; n];
    p[0] = 1.0;
    for k in 1..n {
        let out: f64 = q[k * n..k * n + k].iter().sum();
        p[k] = (0..k).map(|i| p[i] * q[i * n + k]).sum::<f64>() / out;
    }
    let z: f64 = p.iter().sum();
    Ok(Some(p.into_iter().map(|x| x / z).collect()))
}

/// Kernel of the generator by LU with one row replaced by normalization.
/// Loses accuracy at large β; kept as an independent route.
pub fn stationary_by_lu(m: usize, rates: &RateParams) -> Result<Vec<f64>> {
    let mut a = classical_generator(m, rates)?;
    let n = a.nrows();
    for j in 0..n {
        a[(0, j)] = 1.0;
    }
    let mut b = Mat::<f64>::zeros(n, 1);
    b[(0, 0)] = 1.0;
    let x = a.full_piv_lu().solve(&b);
    Ok((0..n).map(|i| x[(i, 0)]).collect())
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0
}

/// Largest relative violation of r(σ→σ')/r(σ'→σ) = e^{-β(H(σ')-H(σ))}
/// over all single-flip pairs.
pub fn detailed_balance_error(m: usize, rates: &RateParams) -> Result<f64> {
    let e = energies(m)?;
    let n = e.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        let c = SpinConfig::from_index(m, i)?;
        for s in 0..m * m {
            let j = i ^ (1 << s);
            let cj = SpinConfig::from_index(m, j)?;
            let fwd = rates.rate(c.misaligned(s));
            let bwd = rates.rate(cj.misaligned(s));
            let want = (-rates.beta * (e[j] - e[i])).exp();
            worst = worst.max((fwd / bwd / want - 1.0).abs());
        }
    }
    Ok(worst)
}

/// Mean magnetization at each time from the exact master equation,
/// starting in configuration `init`. Uses the detailed-balance
/// symmetrization of the generator.
pub fn exact_magnetization(m: usize, rates: &RateParams, init: usize, times: &[f64]) -> Result<Vec<f64>> {
    let q = classical_generator(m, rates)?;
    let n = q.nrows();
    let pi = gibbs_distribution(m, rates.beta);
    let sq: Vec<f64> = pi.iter().map(|p| p.sqrt()).collect();
    let s = Mat::from_fn(n, n, |i, j| q[(i, j)] * sq[j] / sq[i]);
    let sym = Mat::from_fn(n, n, |i, j| 0.5 * (s[(i, j)] + s[(j, i)]));
    let eig = sym.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let u = eig.U();
    let lam = eig.S().column_vector();
    let mags: Vec<f64> = (0..n).map(|i| SpinConfig::from_index(m, i).map(|c| c.magnetization())).collect::<Result<_>>()?;
    // coefficients of D^{-1/2} p0 in the eigenbasis
    let coef: Vec<f64> = (0..n).map(|k| u[(init, k)] / sq[init]).collect();
    let obs: Vec<f64> = (0..n).map(|k| (0..n).map(|i| mags[i] * sq[i] * u[(i, k)]).sum()).collect();
    Ok(times
        .iter()
        .map(|&t| (0..n).map(|k| obs[k] * (lam[k] * t).exp() * coef[k]).sum())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::rates::rates_from_beta;

    #[test]
    fn gibbs_kernel_on_three_by_three() {
        for beta in [0.1, 0.3, 0.6] {
            let r = rates_from_beta(beta, 1.0).unwrap();
            let p = exact_stationary(3, &r).unwrap();
            assert!(total_variation(&p, &gibbs_distribution(3, beta)) < 1e-10);
        }
        let r = RateParams::new(1.0, 1.0).unwrap();
        let p = exact_stationary(3, &r).unwrap();
        assert!(total_variation(&p, &gibbs_distribution(3, r.beta)) < 1e-10);
    }

    #[test]
    fn fig1_ratio_and_detailed_balance() {
        let r = rates_from_beta(0.45, 1.0).unwrap();
        assert!(detailed_balance_error(3, &r).unwrap() < 1e-10);
        let p = exact_stationary(3, &r).unwrap();
        assert!((p[0] / p[1] - (8.0 * r.beta).exp()).abs() < 1e-8 * (8.0 * r.beta).exp());
    }

    #[test]
    fn elimination_and_lu_agree_and_elimination_holds_at_large_beta() {
        for beta in [0.2, 0.5] {
            let r = rates_from_beta(beta, 1.0).unwrap();
            let tv = total_variation(&exact_stationary(3, &r).unwrap(), &stationary_by_lu(3, &r).unwrap());
            assert!(tv < 1e-11, "beta {beta}: {tv}");
        }
        for beta in [1.0, 1.5, 2.5] {
            let r = rates_from_beta(beta, 1.0).unwrap();
            let tv = total_variation(&exact_stationary(3, &r).unwrap(), &gibbs_distribution(3, beta));
            assert!(tv < 1e-12, "beta {beta}: {tv}");
        }
    }

    #[test]
    fn pure_noise_is_uniform() {
        let r = RateParams { delta: 1.0, kappa: 0.0, kappa_tilde: 0.0, beta: 0.0 };
        let p = exact_stationary(2, &r).unwrap();
        assert!(p.iter().all(|x| (x - 1.0 / 16.0).abs() < 1e-12));
    }

    #[test]
    fn no_noise_is_degenerate() {
        let r = RateParams::new(0.0, 1.0).unwrap();
        assert!(matches!(exact_stationary(3, &r), Err(Error::KernelDegeneracy { classes }) if classes > 1));
    }

    #[test]
    fn magnetization_relaxes_to_zero() {
        let r = rates_from_beta(0.3, 1.0).unwrap();
        let m = exact_magnetization(2, &r, 0, &[0.0, 1.0, 1e4]).unwrap();
        assert!((m[0] - 1.0).abs() < 1e-10);
        assert!(m[1] < 1.0 && m[1] > 0.0);
        assert!(m[2].abs() < 1e-8);
    }
}
