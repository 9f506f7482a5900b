//! Plain-text cache of generated instances.
//!
//! ```text
//! pivotree-instance 1
//! m 2
//! n 3
//! seed 7
//! sense max
//! A
//! <m lines of n numbers>
//! b
//! <m numbers>
//! c
//! <n numbers>
//! ```
//!
//! `A`, `b` and `c` are the generated data without the identity block;
//! numbers are written in shortest round-trip form.

use std::fmt::Write as _;

use pivotree_core::gen::{gen_random_sense, Sense};
use pivotree_core::{DenseMatrix, StandardFormLP};
use thiserror::Error;

const MAGIC: &str = "pivotree-instance 1";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Instance(#[from] pivotree_core::Error),
}

/// A generated instance and the parameters that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct CachedInstance {
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub sense: Sense,
    pub lp: StandardFormLP,
}

impl CachedInstance {
    pub fn generate(m: usize, n: usize, seed: u64, sense: Sense) -> Result<Self, CacheError> {
        Ok(Self {
            m,
            n,
            seed,
            sense,
            lp: gen_random_sense(m, n, seed, sense)?,
        })
    }

    pub fn to_text(&self) -> String {
        let (m, n) = (self.m, self.n);
        let mut out = format!(
            "{MAGIC}\nm {m}\nn {n}\nseed {}\nsense {}\nA\n",
            self.seed, self.sense
        );
        let join = |vals: &mut dyn Iterator<Item = f64>| {
            vals.map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
        };
        for i in 0..m {
            let _ = writeln!(
                out,
                "{}",
                join(&mut self.lp.a().row(i)[..n].iter().copied())
            );
        }
        let _ = writeln!(out, "b\n{}", join(&mut self.lp.b().iter().copied()));
        let _ = writeln!(out, "c\n{}", join(&mut self.lp.c()[..n].iter().copied()));
        out
    }

    pub fn from_text(text: &str) -> Result<Self, CacheError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let mut next = |what: &str| {
            lines.next().ok_or_else(|| CacheError::Format {
                line: 0,
                message: format!("missing {what}"),
            })
        };
        let (line, magic) = next("header")?;
        if magic != MAGIC {
            return Err(CacheError::Format {
                line,
                message: "not a pivotree instance file".into(),
            });
        }
        let mut field = |key: &str| -> Result<(usize, String), CacheError> {
            let (line, l) = next(key)?;
            match l.split_once(' ') {
                Some((k, v)) if k == key => Ok((line, v.trim().to_string())),
                _ => Err(CacheError::Format {
                    line,
                    message: format!("expected `{key} <value>`"),
                }),
            }
        };
        let parse_usize = |(line, v): (usize, String)| {
            v.parse::<usize>().map_err(|_| CacheError::Format {
                line,
                message: format!("invalid count `{v}`"),
            })
        };
        let m = parse_usize(field("m")?)?;
        let n = parse_usize(field("n")?)?;
        let (line, seed) = field("seed")?;
        let seed = seed.parse().map_err(|_| CacheError::Format {
            line,
            message: format!("invalid seed `{seed}`"),
        })?;
        let (line, sense) = field("sense")?;
        let sense: Sense = sense.parse().map_err(|_| CacheError::Format {
            line,
            message: format!("invalid sense `{sense}`"),
        })?;

        let mut numbers = |tag: &str, count: usize| -> Result<Vec<Vec<f64>>, CacheError> {
            let (line, l) = next(tag)?;
            if l != tag {
                return Err(CacheError::Format {
                    line,
                    message: format!("expected `{tag}`"),
                });
            }
            let mut out = Vec::new();
            for _ in 0..count {
                let (line, l) = next(tag)?;
                let row = l
                    .split_whitespace()
                    .map(|t| t.parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| CacheError::Format {
                        line,
                        message: "invalid number".into(),
                    })?;
                out.push((line, row));
            }
            Ok(out.into_iter().map(|(_, r)| r).collect())
        };
        let rows = numbers("A", m)?;
        let b = numbers("b", 1)?.remove(0);
        let c = numbers("c", 1)?.remove(0);
        if rows.iter().any(|r| r.len() != n) || b.len() != m || c.len() != n {
            return Err(CacheError::Format {
                line: 0,
                message: "data does not match m and n".into(),
            });
        }
        let mut a = DenseMatrix::zeros(m, n + m);
        for (i, row) in rows.iter().enumerate() {
            a.row_mut(i)[..n].copy_from_slice(row);
            a[(i, n + i)] = 1.0;
        }
        let mut cost = c;
        cost.resize(n + m, 0.0);
        let names = (1..=n)
            .map(|j| format!("x{j}"))
            .chain((1..=m).map(|i| format!("s{i}")))
            .collect();
        let row_names = (1..=m).map(|i| format!("r{i}")).collect();
        let lp = StandardFormLP::with_names(cost, a, b, names, row_names)?;
        Ok(Self {
            m,
            n,
            seed,
            sense,
            lp,
        })
    }
}
