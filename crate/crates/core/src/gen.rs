//! Seeded random instances `min [c 0]^T x  s.t.  [A I] x = b, x >= 0`.
//!
//! Entries of `A`, `b` and `c` are uniform on `[0, 1000)`, drawn from
//! [`SplitMix64`] in the order: `A` row-major, then `b`, then `c`. The
//! identity block gives the feasible starting basis `B0 = I`.
//!
//! With nonnegative costs the minimization is already optimal at `B0`.
//! [`Sense::Maximize`] negates `c` after drawing, which turns the same
//! data into `max c^T x` and makes the starting basis non-optimal.

use alloc::format;
use alloc::vec::Vec;

use crate::matrix::DenseMatrix;
use crate::rng::SplitMix64;
use crate::{Result, StandardFormLP};

/// Upper bound (exclusive) of generated coefficients.
pub const ENTRY_RANGE: f64 = 1000.0;
/// Upper bound (exclusive) of generated dimensions.
pub const DIM_RANGE: u64 = 800;

/// Objective direction of a generated instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sense {
    #[default]
    Minimize,
    Maximize,
}

impl core::str::FromStr for Sense {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "min" | "minimize" => Ok(Self::Minimize),
            "max" | "maximize" => Ok(Self::Maximize),
            other => Err(crate::Error::InvalidConfig(format!(
                "unknown sense `{other}`"
            ))),
        }
    }
}

impl core::fmt::Display for Sense {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Self::Minimize => "min",
            Self::Maximize => "max",
        })
    }
}

/// `m x n` random instance with an appended `m x m` identity block, so the
/// result has `n + m` columns. Columns are named `x1..xn, s1..sm`.
pub fn gen_random(m: usize, n: usize, seed: u64) -> Result<StandardFormLP> {
    gen_random_sense(m, n, seed, Sense::Minimize)
}

/// [`gen_random`] with the given objective direction. The stored
/// instance is always a minimization; `Maximize` stores `-c`.
pub fn gen_random_sense(m: usize, n: usize, seed: u64, sense: Sense) -> Result<StandardFormLP> {
    if m == 0 || n == 0 {
        return Err(crate::Error::InvalidInstance(format!(
            "dimensions {m}x{n} must be positive"
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let mut a = DenseMatrix::zeros(m, n + m);
    for i in 0..m {
        for j in 0..n {
            a[(i, j)] = rng.next_f64() * ENTRY_RANGE;
        }
        a[(i, n + i)] = 1.0;
    }
    let b: Vec<f64> = (0..m).map(|_| rng.next_f64() * ENTRY_RANGE).collect();
    let mut c: Vec<f64> = (0..n).map(|_| rng.next_f64() * ENTRY_RANGE).collect();
    if sense == Sense::Maximize {
        c.iter_mut().for_each(|v| *v = -*v);
    }
    c.resize(n + m, 0.0);
    let names = (1..=n)
        .map(|j| format!("x{j}"))
        .chain((1..=m).map(|i| format!("s{i}")))
        .collect();
    let rows = (1..=m).map(|i| format!("r{i}")).collect();
    StandardFormLP::with_names(c, a, b, names, rows)
}

/// Random `(rows, columns)`, each uniform on `[1, 800)`.
pub fn gen_random_dims(seed: u64) -> (usize, usize) {
    // Distinct from the instance stream so dims and entries decorrelate.
    let mut rng = SplitMix64::new(seed ^ 0xD1B5_4A32_D192_ED03);
    let mut dim = || 1 + (rng.next_f64() * (DIM_RANGE - 1) as f64) as usize;
    let m = dim();
    let n = dim();
    (m, n)
}
