//! Monte Carlo tree search over simplex pivots.
//!
//! Each decision expands every admissible entering column of the current
//! basis, scores the children with random rollouts chosen through a
//! relaxed UCB threshold, and then commits to the child with the best mean
//! reward. Bases already on the committed path are never re-entered.

mod search;
mod tree;

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::lp::{SimplexState, DEFAULT_MAX_ITERS, NUM_TOL};
use crate::{Error, Result};

pub use search::{
    collect_paths, mcts_solve, mcts_solve_with, rollout, Decision, EpisodeExecutor, EpisodeJob,
    MctsRun, PathCollection, RolloutOutcome, RolloutResult, Sequential,
};
pub use tree::{
    backpropagate, e_soft, expand, exploit_step, select_exploration_child, ucb_score, Forbidden,
    TreeNode,
};

/// Which entering columns count as actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActionSetVariant {
    /// Negative reduced cost.
    A1,
    /// Nonzero reduced cost.
    A2,
}

/// How a finished episode is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RewardVariant {
    /// Negated episode length.
    R1,
    /// Linearly down-weighted objective decrease per pivot.
    R2,
}

impl FromStr for ActionSetVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a1" => Ok(Self::A1),
            "a2" => Ok(Self::A2),
            other => Err(Error::InvalidConfig(format!(
                "unknown action set `{other}`"
            ))),
        }
    }
}

impl FromStr for RewardVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "r1" => Ok(Self::R1),
            "r2" => Ok(Self::R2),
            other => Err(Error::InvalidConfig(format!("unknown reward `{other}`"))),
        }
    }
}

impl fmt::Display for ActionSetVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::A1 => "A1",
            Self::A2 => "A2",
        })
    }
}

impl fmt::Display for RewardVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::R1 => "R1",
            Self::R2 => "R2",
        })
    }
}

/// Exploration episodes per decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExploreBudget {
    Fixed(usize),
    /// Multiple of the column count of the constraint matrix.
    PerColumn(f64),
    /// Multiple of the action count at the decision.
    PerAction(usize),
}

impl ExploreBudget {
    /// Configured episode count before the per-decision floor of `|A|`.
    pub fn resolve(self, columns: usize, actions: usize) -> usize {
        match self {
            Self::Fixed(k) => k,
            Self::PerColumn(f) => libm::ceil(f * columns as f64).max(0.0) as usize,
            Self::PerAction(k) => k * actions,
        }
    }
}

/// Relaxation factor of the exploration threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaSchedule {
    /// 0.3 while the exploration budget is at most a tenth of the column
    /// count, 1 otherwise.
    Auto,
    Fixed(f64),
}

impl AlphaSchedule {
    pub fn resolve(self, n_explore: usize, columns: usize) -> f64 {
        match self {
            Self::Fixed(a) => a,
            Self::Auto if (n_explore as f64) <= 0.1 * columns as f64 => 0.3,
            Self::Auto => 1.0,
        }
    }
}

impl FromStr for AlphaSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Self::Auto);
        }
        match s.parse::<f64>() {
            Ok(a) if (0.0..=1.0).contains(&a) => Ok(Self::Fixed(a)),
            _ => Err(Error::InvalidConfig(format!(
                "alpha must be `auto` or in [0, 1], got `{s}`"
            ))),
        }
    }
}

impl fmt::Display for AlphaSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Auto => f.write_str("auto"),
            Self::Fixed(a) => write!(f, "{a}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MctsConfig {
    pub action: ActionSetVariant,
    pub reward: RewardVariant,
    pub explore: ExploreBudget,
    pub c_ucb: f64,
    pub alpha: AlphaSchedule,
    /// Maximum pivots in one rollout.
    pub rollout_cap: usize,
    /// Reward for rollouts that do not reach an optimal basis.
    pub penalty_reward: f64,
    pub seed: u64,
    /// Maximum committed pivots.
    pub max_iters: usize,
    /// Episodes selected from the same statistics snapshot and rolled out
    /// together. 1 reproduces the purely sequential schedule.
    pub batch: usize,
}

pub const DEFAULT_PENALTY: f64 = -1e6;

impl Default for MctsConfig {
    fn default() -> Self {
        Self {
            action: ActionSetVariant::A1,
            reward: RewardVariant::R1,
            explore: ExploreBudget::PerColumn(6.0),
            c_ucb: core::f64::consts::FRAC_1_SQRT_2,
            alpha: AlphaSchedule::Auto,
            rollout_cap: DEFAULT_MAX_ITERS,
            penalty_reward: DEFAULT_PENALTY,
            seed: 0,
            max_iters: DEFAULT_MAX_ITERS,
            batch: 1,
        }
    }
}

impl MctsConfig {
    /// The four (action set, reward) combinations, numbered 1 to 4:
    /// A1+R1, A2+R1, A1+R2, A2+R2.
    pub fn model(index: usize) -> Option<(ActionSetVariant, RewardVariant)> {
        use ActionSetVariant::*;
        use RewardVariant::*;
        match index {
            1 => Some((A1, R1)),
            2 => Some((A2, R1)),
            3 => Some((A1, R2)),
            4 => Some((A2, R2)),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if let AlphaSchedule::Fixed(a) = self.alpha {
            if !(0.0..=1.0).contains(&a) {
                return bad("alpha must lie in [0, 1]");
            }
        }
        if self.rollout_cap == 0 {
            return bad("rollout cap must be at least 1");
        }
        if !self.penalty_reward.is_finite() {
            return bad("penalty reward must be finite");
        }
        if !(self.c_ucb.is_finite() && self.c_ucb >= 0.0) {
            return bad("UCB constant must be finite and non-negative");
        }
        if self.batch == 0 {
            return bad("batch size must be at least 1");
        }
        match self.explore {
            ExploreBudget::PerColumn(f) if !(f.is_finite() && f >= 0.0) => {
                bad("exploration multiplier must be finite and non-negative")
            }
            _ => Ok(()),
        }
    }
}

/// Admissible entering columns of `state` under `variant`, ascending.
/// An empty set is an error: under A1 it means the basis is optimal.
pub fn action_set(state: &SimplexState, variant: ActionSetVariant) -> Result<Vec<usize>> {
    let rc = state.reduced_costs();
    let actions: Vec<usize> = state
        .nonbasic()
        .filter(|&j| match variant {
            ActionSetVariant::A1 => rc[j] < -NUM_TOL,
            ActionSetVariant::A2 => libm::fabs(rc[j]) > NUM_TOL,
        })
        .collect();
    if actions.is_empty() {
        Err(Error::EmptyActionSet)
    } else {
        Ok(actions)
    }
}

/// Negated episode length.
pub fn reward_r1(episode_len: usize) -> f64 {
    -(episode_len as f64)
}

/// Weights `(T + 1 - i) / T` for `i = 1..=T`.
pub fn r2_weights(episode_len: usize) -> Vec<f64> {
    let t = episode_len as f64;
    (1..=episode_len)
        .map(|i| (t + 1.0 - i as f64) / t)
        .collect()
}

/// Weighted mean objective decrease over an episode, given the objective
/// values `c x_0 .. c x_T`.
pub fn reward_r2(objective_trace: &[f64]) -> Result<f64> {
    let t = objective_trace.len().saturating_sub(1);
    if t == 0 {
        return Err(Error::ZeroLengthEpisode);
    }
    let sum: f64 = r2_weights(t)
        .iter()
        .zip(objective_trace.windows(2))
        .map(|(w, pair)| w * (pair[0] - pair[1]))
        .sum();
    Ok(sum / t as f64)
}

/// Terminal reward of an episode that reached an optimal basis.
pub(crate) fn episode_reward(variant: RewardVariant, trace: &[f64]) -> f64 {
    let t = trace.len().saturating_sub(1);
    match variant {
        RewardVariant::R1 => reward_r1(t),
        RewardVariant::R2 => reward_r2(trace).unwrap_or(0.0),
    }
}
