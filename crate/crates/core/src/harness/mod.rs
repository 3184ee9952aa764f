//! Fixture instances, the grid discretizer for the continuous example, seeded random
//! generators and the convergence study driver.

pub mod example1;
pub mod fixtures;
pub mod random;

pub use example1::{convergence_study, discretize_example1, ConvergenceRow, GridSpec, EXAMPLE1_OPTIMUM};
pub use random::{random_instance, random_marginal_triple, MarginalTriple, Mode, SizeParams};
