use thiserror::Error;

/// Errors raised by the simulation modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("Fock truncation too small: norm deficit {deficit:.3e} exceeds tolerance {tol:.3e}")]
    Truncation { deficit: f64, tol: f64 },

    #[error("odd cat state is undefined for a vanishing amplitude")]
    DegenerateCat,

    #[error("diagonal entries not converged under cutoff increase (max change {max_change:.3e})")]
    Convergence { max_change: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Hamiltonian is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("steady state is degenerate: {count} eigenvalues inside the zero tolerance")]
    DegenerateSteadyState { count: usize },

    #[error("eigensolver failure: {0}")]
    Eigensolver(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("classical generator has {classes} closed communicating classes")]
    KernelDegeneracy { classes: usize },

    #[error("event cap of {cap} exceeded")]
    EventCapExceeded { cap: u64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
