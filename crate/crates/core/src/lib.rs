//! Variable elimination on discrete factor graphs with local-symmetry
//! exploitation.
//!
//! Factors whose variables can be permuted without changing the potential are
//! stored by histogram ([`symmetry::CompactFactor`]), which shrinks the
//! intermediate results of elimination. The [`graph`] module runs elimination
//! and records both the dense and the compact cost of every step, [`search`]
//! looks for good elimination orders under either cost, and [`bench`]
//! measures the cost reduction on random symmetric models.
//!
//! In tensor-network terms a variable is an index, a factor is a tensor,
//! summing out is contraction and a factor product is a tensor product.

pub mod bench;
pub mod cli;
pub mod error;
pub mod factor;
pub mod format;
pub mod graph;
pub mod oracle;
pub mod rng;
pub mod search;
pub mod symmetry;

pub use error::{Error, Result};
pub use factor::{multiply, project, sum_out, Assignment, DenseFactor, VarId, Variable};
pub use graph::{
    eliminate, run_elimination, step_costs, CostLedger, EliminationStep, Factor, FactorGraph,
    FactorShape, Mode, TotalsConvention,
};
pub use oracle::joint_oracle;
