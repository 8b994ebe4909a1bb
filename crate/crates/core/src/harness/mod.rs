//! Instance generators, experiment drivers, matrix file I/O and the
//! self-test suite behind the `forge` binary.
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64(seed)` (rand_chacha 0.9)
//! with Gaussian draws from `rand_distr::StandardNormal`, so a seed names the
//! same instance on every platform.

mod instances;
mod io;
mod selftest;
mod sk;

pub use instances::{
    coupled_gaussians, goe, laurent_closed_form, laurent_fit, laurent_leading_order, laurent_matrix,
    laurent_pseudoexpectation, projector_instance, random_correlation, InstanceConfig, InstanceKind, LaurentFit, ProjectorKind,
};
pub use io::{parse_matrix, read_matrix_file, write_matrix, MatrixFile};
pub use selftest::{selftest, SelftestCheck, SelftestLevel};
pub use sk::{default_t_pow, objective, sk_run, sk_run_with, SkOptions, SkReport, SkStatus};
