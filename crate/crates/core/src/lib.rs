//! Sequential importance sampling for binary matrices with fixed row and
//! column sums and entrywise Bernoulli odds.
//!
//! The target is the distribution on `m x n` zero-one matrices `z` with row
//! sums `r` and column sums `c` whose mass is proportional to
//! `prod_ij w_ij^z_ij`. Matrices are proposed column by column; each column
//! is drawn exactly from a Markov-chain representation built by dynamic
//! programming over partial sums, combining hard margin constraints,
//! asymptotic enumeration factors and row-wise weighting factors.
//!
//! Module map:
//!
//! * [`margins`]: margin bookkeeping, Gale-Ryser feasibility, and the exact
//!   first-column support constraints.
//! * [`weights`]: weight matrices, canonical balancing and column ordering.
//! * [`combinatorics`]: asymptotic counts and the per-row `u` factors.
//! * [`rowpoly`]: elementary symmetric polynomial tables and `v` factors.
//! * [`proposal`]: per-column dynamic programming and whole-matrix sampling.
//! * [`estimator`]: importance weights, estimates and diagnostics.
//! * [`oracle`]: exact reference computations for small instances.
//! * [`io`]: file formats used by the command-line tool.

pub mod combinatorics;
pub mod error;
pub mod estimator;
pub mod io;
pub mod logspace;
pub mod margins;
pub mod matrix;
pub mod oracle;
pub mod proposal;
pub mod rowpoly;
pub mod weights;

pub use error::{Error, Result};

pub use proposal::{PreparedProblem, ProblemSpec, SampleRecord, SamplerOptions};
pub use estimator::{estimate, EstimateSummary, LogBigNumber};
pub use margins::{ConstraintSet, Margins};
pub use matrix::BinaryMatrix;

pub use weights::WeightMatrix;
