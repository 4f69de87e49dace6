use faer::Mat;
use num_complex::Complex64 as C64;

use super::expm::{expm, expv, KrylovOptions};
use super::generator::{build_liouvillian, dense_matvec, Generator};
use super::{DensityMatrix, LindbladModel};
use crate::error::{Error, Result};
use crate::ode::{self, Tolerances};

/// Largest dim² for which `Auto` forms the dense propagator.
pub const DENSE_EXPM_MAX: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvolveMethod {
    /// Dense exponential for small spaces, Krylov otherwise.
    Auto,
    /// Dense Liouvillian exponential (scaling and squaring).
    Expm,
    /// Adaptive Dormand–Prince on the matrix-free generator.
    RungeKutta,
    /// Restarted Arnoldi exponential on the matrix-free generator.
    Krylov,
}

#[derive(Clone, Copy, Debug)]
pub struct EvolveOptions {
    pub method: EvolveMethod,
    pub rk: Tolerances,
    pub krylov: KrylovOptions,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            method: EvolveMethod::Auto,
            rk: Tolerances { rtol: 1e-9, atol: 1e-12, ..Tolerances::default() },
            krylov: KrylovOptions::default(),
        }
    }
}

impl EvolveOptions {
    pub fn with_method(method: EvolveMethod) -> Self {
        Self { method, ..Self::default() }
    }
}

/// Propagator for one model, reusable across initial states and times.
pub struct Evolver {
    generator: Generator,
    dense: Option<Mat<C64>>,
    opts: EvolveOptions,
}

impl Evolver {
    pub fn new(model: &LindbladModel, opts: EvolveOptions) -> Self {
        let dim = model.dim();
        let method = match opts.method {
            EvolveMethod::Auto if dim * dim <= DENSE_EXPM_MAX => EvolveMethod::Expm,
            EvolveMethod::Auto => EvolveMethod::Krylov,
            m => m,
        };
        let dense = (method == EvolveMethod::Expm).then(|| build_liouvillian(model));
        Self { generator: Generator::new(model), dense, opts: EvolveOptions { method, ..opts } }
    }

    pub fn method(&self) -> EvolveMethod {
        self.opts.method
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    /// e^{Lt} applied to a column-stacked state.
    pub fn propagate_vec(&self, v: &[C64], t: f64) -> Result<Vec<C64>> {
        if !(t >= 0.0) {
            return Err(Error::Integration(format!("negative evolution time {t}")));
        }
        if t == 0.0 {
            return Ok(v.to_vec());
        }
        match self.opts.method {
            EvolveMethod::Expm => {
                let l = self.dense.as_ref().expect("dense Liouvillian present for Expm");
                let prop = expm(&Mat::from_fn(l.nrows(), l.ncols(), |i, j| l[(i, j)] * t));
                Ok(dense_matvec(&prop, v))
            }
            EvolveMethod::Krylov => expv(
                t,
                |x, out| self.generator.apply(x, out),
                v,
                self.generator.norm_bound(),
                self.opts.krylov,
            ),
            EvolveMethod::RungeKutta => ode::integrate(
                |_, x: &[C64], out: &mut [C64]| self.generator.apply(x, out),
                0.0,
                v.to_vec(),
                t,
                self.opts.rk,
            ),
            EvolveMethod::Auto => unreachable!("resolved in Evolver::new"),
        }
    }

    pub fn evolve(&self, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        if rho0.dim() != self.generator.dim() {
            return Err(Error::DimensionMismatch { expected: self.generator.dim(), found: rho0.dim() });
        }
        let v = self.propagate_vec(&rho0.to_vec(), t)?;
        Ok(DensityMatrix::from_vec(rho0.dim(), &v)?.hermitized())
    }

    /// States at each of the increasing `times`.
    pub fn evolve_times(&self, rho0: &DensityMatrix, times: &[f64]) -> Result<Vec<DensityMatrix>> {
        let mut out = Vec::with_capacity(times.len());
        let mut v = rho0.to_vec();
        let mut t = 0.0;
        for &target in times {
            if target < t {
                return Err(Error::Integration("output times must be increasing".into()));
            }
            v = self.propagate_vec(&v, target - t)?;
            t = target;
            out.push(DensityMatrix::from_vec(rho0.dim(), &v)?.hermitized());
        }
        Ok(out)
    }
}

/// ρ(t) = e^{Lt} ρ0 with automatic method choice.
pub fn evolve(model: &LindbladModel, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    Evolver::new(model, EvolveOptions::default()).evolve(rho0, t)
}

pub fn evolve_with(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    t: f64,
    opts: EvolveOptions,
) -> Result<DensityMatrix> {
    Evolver::new(model, opts).evolve(rho0, t)
}

pub fn evolve_times(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    times: &[f64],
    opts: EvolveOptions,
) -> Result<Vec<DensityMatrix>> {
    Evolver::new(model, opts).evolve_times(rho0, times)
}
