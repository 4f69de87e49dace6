//! Open-system dynamics under a Lindblad generator
//! L(ρ) = -i[H, ρ] + Σ_j (L_j ρ L_j† - ½{L_j†L_j, ρ}).
//!
//! Superoperators use column stacking, vec(AXB) = (Bᵀ ⊗ A) vec(X).

mod evolve;
mod expm;
mod generator;
mod spectrum;
mod trajectory;

use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operators::{Operator, StateVector};

pub use evolve::{evolve, evolve_times, evolve_with, EvolveMethod, EvolveOptions, Evolver};
pub use expm::{expm, expv, KrylovOptions};
pub use generator::{build_liouvillian, lindblad_rhs, Generator};
pub use spectrum::{
    dissipative_gap, gap_from_decay, liouvillian_spectrum, project_onto_slow_manifold,
    steady_state, SlowManifold, SpectrumResult,
};
pub use trajectory::{
    ensemble_average, ensemble_average_at, trajectory, trajectory_with_checkpoints,
    EnsembleResult, JumpEvent, TrajectoryOptions, TrajectoryResult,
};

/// Hermiticity tolerance for Hamiltonians.
pub const HAMILTONIAN_HERMITIAN_TOL: f64 = 1e-10;

/// A Hamiltonian and jump operators (rate prefactors already absorbed).
#[derive(Clone, Debug)]
pub struct LindbladModel {
    hamiltonian: Operator,
    jumps: Vec<Operator>,
}

impl LindbladModel {
    pub fn new(hamiltonian: Operator, jumps: Vec<Operator>) -> Result<Self> {
        let dim = hamiltonian.dim();
        for j in &jumps {
            if j.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: j.dim() });
            }
        }
        let deviation = hamiltonian.hermiticity_error();
        if deviation > HAMILTONIAN_HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { hamiltonian, jumps })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[Operator] {
        &self.jumps
    }

    /// Same model with a different jump list.
    pub fn with_jumps(&self, jumps: Vec<Operator>) -> Result<Self> {
        Self::new(self.hamiltonian.clone(), jumps)
    }
}

/// A density matrix. Constructors that validate enforce Hermiticity and unit
/// trace to 1e-9 and a minimum eigenvalue above -1e-7.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    mat: Mat<C64>,
}

impl DensityMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-9;
    pub const TRACE_TOL: f64 = 1e-9;
    pub const POSITIVITY_TOL: f64 = 1e-7;

    pub fn from_matrix(mat: Mat<C64>) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(mat)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Square shape and finiteness only.
    pub fn from_matrix_unchecked(mat: Mat<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch { expected: mat.nrows(), found: mat.ncols() });
        }
        Ok(Self { mat })
    }

    /// |ψ><ψ| for the normalized ψ.
    pub fn pure(psi: &StateVector) -> Result<Self> {
        let psi = psi
            .normalized()
            .ok_or_else(|| Error::InvalidParams("cannot build a density matrix from a zero vector".into()))?;
        let a = psi.amplitudes();
        let d = a.len();
        Ok(Self { mat: Mat::from_fn(d, d, |i, j| a[i] * a[j].conj()) })
    }

    /// Column-stacked vector of length dim².
    pub fn from_vec(dim: usize, v: &[C64]) -> Result<Self> {
        if v.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: v.len() });
        }
        Ok(Self { mat: Mat::from_fn(dim, dim, |i, j| v[i + dim * j]) })
    }

    pub fn to_vec(&self) -> Vec<C64> {
        let d = self.dim();
        let mut v = Vec::with_capacity(d * d);
        for j in 0..d {
            v.extend_from_slice(self.mat.col_as_slice(j));
        }
        v
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.mat[(i, i)]).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut m = 0.0f64;
        for j in 0..d {
            for i in 0..=j {
                m = m.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        m
    }

    /// (ρ + ρ†)/2.
    pub fn hermitized(&self) -> Self {
        let d = self.dim();
        Self { mat: Mat::from_fn(d, d, |i, j| (self.mat[(i, j)] + self.mat[(j, i)].conj()) * 0.5) }
    }

    /// Divide by the real part of the trace.
    pub fn trace_normalized(&self) -> Result<Self> {
        let tr = self.trace().re;
        if !(tr.abs() > 0.0) {
            return Err(Error::InvalidParams("density matrix has zero trace".into()));
        }
        let d = self.dim();
        Ok(Self { mat: Mat::from_fn(d, d, |i, j| self.mat[(i, j)] / tr) })
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.hermitized()
            .mat
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.into_iter().fold(f64::INFINITY, f64::min))
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > Self::HERMITIAN_TOL {
            return Err(Error::InvalidParams(format!("density matrix not Hermitian ({herm:.3e})")));
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > Self::TRACE_TOL {
            return Err(Error::InvalidParams(format!("density matrix trace {tr} differs from 1")));
        }
        let min = self.min_eigenvalue()?;
        if min < -Self::POSITIVITY_TOL {
            return Err(Error::InvalidParams(format!("density matrix eigenvalue {min:.3e} < 0")));
        }
        Ok(())
    }

    /// Tr[O ρ].
    pub fn expectation(&self, op: &Operator) -> C64 {
        assert_eq!(op.dim(), self.dim(), "operator/state dimension mismatch");
        let d = self.dim();
        let o = op.matrix();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d {
            for k in 0..d {
                acc += o[(i, k)] * self.mat[(k, i)];
            }
        }
        acc
    }

    /// <ψ|ρ|ψ> for the given (unit-norm) ψ.
    pub fn overlap_with_pure(&self, psi: &StateVector) -> f64 {
        let a = psi.amplitudes();
        let d = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..d {
            let col = self.mat.col_as_slice(j);
            let mut s = C64::new(0.0, 0.0);
            for i in 0..d {
                s += a[i].conj() * col[i];
            }
            acc += s * a[j];
        }
        acc.re
    }

    /// ½ ‖ρ - σ‖₁.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        let diff = DensityMatrix { mat: &self.mat - &other.mat };
        Ok(0.5 * diff.eigenvalues()?.iter().map(|x| x.abs()).sum::<f64>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{FockSpace, Operator};

    #[test]
    fn rejects_non_hermitian_hamiltonian() {
        let s = FockSpace::new(3).unwrap();
        let a = crate::operators::annihilation(&s);
        let err = LindbladModel::new(a, vec![]).unwrap_err();
        assert!(matches!(err, Error::NotHermitian { .. }));
    }

    #[test]
    fn rejects_mismatched_jumps() {
        let h = Operator::identity(crate::operators::SpaceTag::generic(2));
        let j = Operator::identity(crate::operators::SpaceTag::generic(3));
        assert!(matches!(LindbladModel::new(h, vec![j]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn density_matrix_validation() {
        let psi = StateVector::new(vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
        let rho = DensityMatrix::pure(&psi).unwrap();
        rho.validate().unwrap();
        assert!((rho.overlap_with_pure(&psi.normalized().unwrap()) - 1.0).abs() < 1e-15);
        let bad = Mat::from_fn(2, 2, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        assert!(DensityMatrix::from_matrix(bad).is_err());
        let v = rho.to_vec();
        let back = DensityMatrix::from_vec(2, &v).unwrap();
        assert_eq!(back.to_vec(), v);
    }

    #[test]
    fn trace_distance_of_orthogonal_states() {
        let a = DensityMatrix::pure(&StateVector::basis(3, 0)).unwrap();
        let b = DensityMatrix::pure(&StateVector::basis(3, 2)).unwrap();
        assert!((a.trace_distance(&b).unwrap() - 1.0).abs() < 1e-12);
        assert!(a.trace_distance(&a).unwrap() < 1e-12);
    }
}
