use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64 as C64;

use super::evolve::{EvolveOptions, Evolver};
use super::generator::{build_liouvillian, Generator};
use super::{DensityMatrix, LindbladModel};
use crate::error::{Error, Result};
use crate::operators::Operator;
use crate::stats::linear_fit;

/// Relative zero tolerance for eigenvalue classification, multiplied by the
/// spectral radius.
pub const TOL_ZERO_REL: f64 = 1e-10;

/// Liouvillian eigenvalues sorted by decreasing real part.
#[derive(Clone, Debug)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<C64>,
    /// -max{Re λ : Re λ < -tol_zero}, or 0 when no eigenvalue decays.
    pub gap: f64,
    pub tol_zero: f64,
}

impl SpectrumResult {
    pub fn from_eigenvalues(mut eigenvalues: Vec<C64>) -> Self {
        eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re));
        let radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tol_zero = TOL_ZERO_REL * radius;
        let gap = eigenvalues
            .iter()
            .find(|z| z.re < -tol_zero)
            .map(|z| -z.re)
            .unwrap_or(0.0);
        Self { eigenvalues, gap, tol_zero }
    }

    /// Number of eigenvalues with |λ| < tol_zero.
    pub fn kernel_dim(&self) -> usize {
        self.eigenvalues.iter().filter(|z| z.norm() < self.tol_zero).count()
    }

    /// Decay rate of the slowest mode outside the `k` slowest ones, i.e. the
    /// gap above a k-dimensional slow manifold.
    pub fn gap_above(&self, k: usize) -> Option<f64> {
        self.eigenvalues.get(k).map(|z| -z.re)
    }
}

fn eig_err(e: impl std::fmt::Debug) -> Error {
    Error::Eigensolver(format!("{e:?}"))
}

/// Full Liouvillian spectrum by dense non-Hermitian eigendecomposition.
pub fn liouvillian_spectrum(model: &LindbladModel) -> Result<SpectrumResult> {
    let l = build_liouvillian(model);
    let ev = l.eigenvalues().map_err(eig_err)?;
    if ev.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Eigensolver("non-finite eigenvalue".into()));
    }
    Ok(SpectrumResult::from_eigenvalues(ev))
}

/// Dissipative gap from the spectrum.
pub fn dissipative_gap(model: &LindbladModel) -> Result<SpectrumResult> {
    liouvillian_spectrum(model)
}

/// Fallback gap estimator: rate of the late-time exponential approach of
/// Tr[O ρ(t)], fitted from successive differences at the equally spaced
/// `times` (which removes the unknown stationary value).
pub fn gap_from_decay(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    observable: &Operator,
    times: &[f64],
) -> Result<f64> {
    if times.len() < 3 {
        return Err(Error::InvalidParams("decay fit needs at least three times".into()));
    }
    let ev = Evolver::new(model, EvolveOptions::default());
    let states = ev.evolve_times(rho0, times)?;
    let vals: Vec<f64> = states.iter().map(|r| r.expectation(observable).re).collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 0..vals.len() - 1 {
        let d = (vals[k + 1] - vals[k]).abs();
        if d > 0.0 {
            xs.push(0.5 * (times[k] + times[k + 1]));
            ys.push(d.ln());
        }
    }
    let fit = linear_fit(&xs, &ys)
        .ok_or_else(|| Error::Eigensolver("observable does not decay; no gap estimate".into()))?;
    Ok(-fit.slope)
}

struct Eigensystem {
    values: Vec<C64>,
    vectors: Mat<C64>,
    order: Vec<usize>,
    tol_zero: f64,
}

fn eigensystem(model: &LindbladModel) -> Result<(Mat<C64>, Eigensystem)> {
    let l = build_liouvillian(model);
    let evd = l.eigen().map_err(eig_err)?;
    let s = evd.S().column_vector();
    let values: Vec<C64> = (0..l.nrows()).map(|i| s[i]).collect();
    let vectors = evd.U().to_owned();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].re.total_cmp(&values[a].re));
    let radius = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok((l, Eigensystem { values, vectors, order, tol_zero: TOL_ZERO_REL * radius }))
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn check_residual(model: &LindbladModel, l: &Mat<C64>, rho: &DensityMatrix) -> Result<()> {
    let gen = Generator::new(model);
    let v = rho.to_vec();
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    gen.apply(&v, &mut out);
    let res = vec_norm(&out);
    let bound = 1e-8 * l.norm_l2();
    if res > bound {
        return Err(Error::Eigensolver(format!(
            "steady-state residual {res:.3e} exceeds {bound:.3e}"
        )));
    }
    Ok(())
}

/// Unique steady state: the eigenvector of the eigenvalue of smallest
/// modulus, reshaped, Hermitized and trace-normalized.
pub fn steady_state(model: &LindbladModel) -> Result<DensityMatrix> {
    let (l, es) = eigensystem(model)?;
    let count = es.values.iter().filter(|z| z.norm() < es.tol_zero).count();
    if count > 1 {
        return Err(Error::DegenerateSteadyState { count });
    }
    let idx = (0..es.values.len())
        .min_by(|&a, &b| es.values[a].norm().total_cmp(&es.values[b].norm()))
        .ok_or_else(|| Error::Eigensolver("empty spectrum".into()))?;
    let col: Vec<C64> = es.vectors.col_as_slice(idx).to_vec();
    let rho = DensityMatrix::from_vec(model.dim(), &col)?.hermitized().trace_normalized()?;
    check_residual(model, &l, &rho)?;
    Ok(rho)
}

/// Which eigenmodes are kept by [`project_onto_slow_manifold`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlowManifold {
    /// Eigenvalues with |λ| below the zero tolerance.
    Kernel,
    /// The `k` eigenvalues with the largest real part.
    Slowest(usize),
}

/// Long-time limit of ρ0 restricted to the chosen slow eigenmodes: expand
/// vec ρ0 in the Liouvillian eigenbasis and drop every faster component.
/// Selects a symmetry sector when the steady state is degenerate.
pub fn project_onto_slow_manifold(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    which: SlowManifold,
) -> Result<DensityMatrix> {
    if rho0.dim() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), found: rho0.dim() });
    }
    let (_, es) = eigensystem(model)?;
    let keep: Vec<usize> = match which {
        SlowManifold::Kernel => {
            es.order.iter().copied().filter(|&i| es.values[i].norm() < es.tol_zero).collect()
        }
        SlowManifold::Slowest(k) => es.order.iter().copied().take(k).collect(),
    };
    if keep.is_empty() {
        return Err(Error::Eigensolver("no eigenmodes selected for projection".into()));
    }
    let n = es.vectors.nrows();
    let v0 = rho0.to_vec();
    let rhs = Mat::from_fn(n, 1, |i, _| v0[i]);
    let coeffs = es.vectors.partial_piv_lu().solve(&rhs);
    let mut out = vec![C64::new(0.0, 0.0); n];
    for &i in &keep {
        let c = coeffs[(i, 0)];
        for (o, &u) in out.iter_mut().zip(es.vectors.col_as_slice(i)) {
            *o += c * u;
        }
    }
    DensityMatrix::from_vec(model.dim(), &out)?.hermitized().trace_normalized()
}
