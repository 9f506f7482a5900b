//! Dense simplex pivoting engine with classical pivot rules, a Monte Carlo
//! tree search pivot rule that looks for the fewest pivots to optimality,
//! and a brute-force breadth-first oracle over basis graphs.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line harness and thread pools live in the `pivotree` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod gen;
pub mod lp;
pub mod matrix;
pub mod mcts;
pub mod oracle;
pub mod rng;
pub mod rules;

pub use error::{Error, Result};
pub use lp::{
    basis_signature, is_optimal, phase_one, phase_one_with, pivot, ratio_test, reduced_costs,
    replay, BasisSignature, PhaseOne, PhaseOneStart, PivotPath, PivotStep, RunStatus, SimplexState,
    StandardFormLP, DEFAULT_MAX_ITERS, FEAS_TOL, NUM_TOL, PIVOT_TOL, REFACTOR_INTERVAL,
};
pub use matrix::DenseMatrix;
pub use rules::{run_simplex, select_entering, DevexWeights, RuleKind, SimplexRun};
