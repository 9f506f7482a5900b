//! Loading problem instances from MPS files, instance caches or the
//! seeded generator.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use pivotree_core::gen::{gen_random_dims, Sense};
use pivotree_core::{phase_one_with, PhaseOneStart, SimplexState, StandardFormLP};

use crate::cache::CachedInstance;
use crate::error::HarnessError;
use crate::mps::{parse_mps, ObjSense};
use crate::standard::to_standard_form;

/// Generated instance dimensions: explicit, or drawn from the seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenDims {
    Fixed(usize, usize),
    Random,
}

impl FromStr for GenDims {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        if s.eq_ignore_ascii_case("random") {
            return Ok(Self::Random);
        }
        let bad = || HarnessError::Usage(format!("expected MxN or `random`, got `{s}`"));
        let (m, n) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let m = m.trim().parse().map_err(|_| bad())?;
        let n = n.trim().parse().map_err(|_| bad())?;
        if m == 0 || n == 0 {
            return Err(bad());
        }
        Ok(Self::Fixed(m, n))
    }
}

impl fmt::Display for GenDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fixed(m, n) => write!(f, "{m}x{n}"),
            Self::Random => f.write_str("random"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSource {
    Mps(PathBuf),
    Cache(PathBuf),
    Generated {
        dims: GenDims,
        seed: u64,
        sense: Sense,
    },
}

/// A standard-form instance with its feasible starting basis.
#[derive(Debug, Clone)]
pub struct Instance {
    pub id: String,
    pub lp: StandardFormLP,
    pub initial: SimplexState,
    pub phase_one_pivots: usize,
    objective_constant: f64,
    maximize: bool,
}

impl Instance {
    /// Loads an instance. MPS files get a phase-one basis with an
    /// artificial on every row; generated instances start from their
    /// identity block.
    pub fn load(source: &InstanceSource) -> Result<Self, HarnessError> {
        match source {
            InstanceSource::Mps(path) => {
                let text = read(path)?;
                let raw = parse_mps(&text)?;
                let std = to_standard_form(&raw)?;
                let id = raw
                    .name
                    .split_whitespace()
                    .next()
                    .map_or_else(|| stem(path), str::to_string);
                let p1 = phase_one_with(&std.lp, PhaseOneStart::AllArtificial)?;
                Ok(Self {
                    id,
                    initial: p1.state,
                    phase_one_pivots: p1.pivots,
                    objective_constant: std.objective_constant,
                    maximize: std.sense == ObjSense::Max,
                    lp: std.lp,
                })
            }
            InstanceSource::Cache(path) => {
                let cached = CachedInstance::from_text(&read(path)?)?;
                Self::generated(stem(path), cached.lp, cached.sense)
            }
            InstanceSource::Generated { dims, seed, sense } => {
                let (m, n) = match *dims {
                    GenDims::Fixed(m, n) => (m, n),
                    GenDims::Random => gen_random_dims(*seed),
                };
                let cached = CachedInstance::generate(m, n, *seed, *sense)?;
                Self::generated(format!("gen-{m}x{n}-s{seed}-{sense}"), cached.lp, *sense)
            }
        }
    }

    pub fn generated(id: String, lp: StandardFormLP, sense: Sense) -> Result<Self, HarnessError> {
        let p1 = phase_one_with(&lp, PhaseOneStart::UnitColumns)?;
        Ok(Self {
            id,
            lp,
            initial: p1.state,
            phase_one_pivots: p1.pivots,
            objective_constant: 0.0,
            maximize: sense == Sense::Maximize,
        })
    }

    /// Objective of the problem as stated, for a standard-form value.
    pub fn original_objective(&self, standard: f64) -> f64 {
        let v = standard + self.objective_constant;
        if self.maximize {
            -v
        } else {
            v
        }
    }

    pub fn column_names(&self, columns: &[usize]) -> Vec<String> {
        columns
            .iter()
            .map(|&j| self.lp.var_names()[j].clone())
            .collect()
    }
}

fn read(path: &Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gen_dims_parse() {
        assert_eq!("3x4".parse::<GenDims>().unwrap(), GenDims::Fixed(3, 4));
        assert_eq!("Random".parse::<GenDims>().unwrap(), GenDims::Random);
        assert!("3by4".parse::<GenDims>().is_err());
        assert!("0x4".parse::<GenDims>().is_err());
    }

    #[test]
    fn generated_instance_starts_at_identity() {
        let src = InstanceSource::Generated {
            dims: GenDims::Fixed(3, 3),
            seed: 7,
            sense: Sense::Maximize,
        };
        let inst = Instance::load(&src).unwrap();
        assert_eq!(inst.id, "gen-3x3-s7-max");
        assert_eq!(inst.initial.basis(), &[3, 4, 5]);
        assert_eq!(inst.phase_one_pivots, 0);
        assert_eq!(inst.original_objective(-5.0), 5.0);
    }
}
