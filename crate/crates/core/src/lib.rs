pub mod cavity;
pub mod cli;
pub mod error;
pub mod ising;
pub mod lindblad;
pub mod meanfield;
pub mod ode;
pub mod operators;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
