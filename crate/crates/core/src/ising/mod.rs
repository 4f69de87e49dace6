//! Dissipative 2D Ising process on an M×M torus: lattice state, flip rates,
//! continuous-time Monte Carlo, decoders and small-lattice exact results.

pub mod decode;
pub mod exact;
pub mod kmc;
pub mod lattice;
pub mod memory;
pub mod quantum;
pub mod rates;
pub mod toom;

pub use decode::{decode_majority, Decoder};
pub use exact::{exact_stationary, gibbs_distribution, total_variation};
pub use kmc::{kmc_evolve, kmc_run, KmcOutcome};
pub use lattice::SpinConfig;
pub use memory::{memory_experiment, memory_experiment_with, MemoryExperimentResult, MemoryOptions};
pub use rates::{critical_beta, flip_rate, photonic_to_ising, rates_from_beta, RateParams};
pub use toom::toom_step;
