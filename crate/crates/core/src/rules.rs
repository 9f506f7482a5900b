//! Classical entering-variable rules and the driver loop that applies them.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::lp::{is_optimal, PivotPath, RunStatus, SimplexState, StandardFormLP, NUM_TOL};
use crate::{Error, Result};

/// Devex weights are reset to 1 once any weight exceeds this.
pub const DEVEX_RESET_THRESHOLD: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleKind {
    Dantzig,
    Bland,
    SteepestEdge,
    GreatestImprovement,
    Devex,
}

impl RuleKind {
    pub const ALL: [RuleKind; 5] = [
        RuleKind::Dantzig,
        RuleKind::Bland,
        RuleKind::SteepestEdge,
        RuleKind::GreatestImprovement,
        RuleKind::Devex,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleKind::Dantzig => "dantzig",
            RuleKind::Bland => "bland",
            RuleKind::SteepestEdge => "steepest",
            RuleKind::GreatestImprovement => "greatest",
            RuleKind::Devex => "devex",
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "dantzig" | "danzig" => RuleKind::Dantzig,
            "bland" => RuleKind::Bland,
            "steepest" | "steepest-edge" | "steepestedge" => RuleKind::SteepestEdge,
            "greatest" | "greatest-improvement" | "greatestimprovement" => {
                RuleKind::GreatestImprovement
            }
            "devex" => RuleKind::Devex,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown pivot rule `{other}`"
                )))
            }
        })
    }
}

/// Approximate steepest-edge weights (squared) over a reference framework.
#[derive(Debug, Clone, PartialEq)]
pub struct DevexWeights {
    weights: Vec<f64>,
    reference: Vec<bool>,
    resets: usize,
}

impl DevexWeights {
    /// Unit weights with the current nonbasic set as reference framework.
    pub fn new(state: &SimplexState) -> Self {
        let n = state.reduced_costs().len();
        let reference = (0..n).map(|j| !state.is_basic(j)).collect();
        Self {
            weights: vec![1.0; n],
            reference,
            resets: 0,
        }
    }

    pub fn weight(&self, j: usize) -> f64 {
        self.weights[j]
    }

    pub fn in_reference(&self, j: usize) -> bool {
        self.reference[j]
    }

    pub fn resets(&self) -> usize {
        self.resets
    }

    /// Updates the weights for a pivot of `entering` into basis position
    /// `row`. Must be called with the state *before* the pivot.
    pub fn update(
        &mut self,
        before: &SimplexState,
        lp: &StandardFormLP,
        entering: usize,
        row: usize,
    ) {
        let alpha = before.tableau_row(lp, row);
        let pivot = alpha[entering];
        if pivot == 0.0 {
            return;
        }
        let w_q = self.weights[entering];
        let leaving = before.basis()[row];
        for j in before.nonbasic() {
            if j == entering {
                continue;
            }
            let ratio = alpha[j] / pivot;
            let candidate = ratio * ratio * w_q;
            if candidate > self.weights[j] {
                self.weights[j] = candidate;
            }
        }
        self.weights[leaving] = (w_q / (pivot * pivot)).max(1.0);
        self.weights[entering] = 1.0;
        if self.weights.iter().any(|&w| w > DEVEX_RESET_THRESHOLD) {
            self.resets += 1;
            for w in &mut self.weights {
                *w = 1.0;
            }
            for (j, r) in self.reference.iter_mut().enumerate() {
                *r = !before.is_basic(j) && j != entering || j == leaving;
            }
        }
    }
}

/// Picks the entering column, or `None` when no reduced cost is negative.
///
/// Ties go to the smallest column index for every rule. For
/// [`RuleKind::GreatestImprovement`] a candidate whose ratio test is
/// unbounded is returned immediately; the driver then reports it.
pub fn select_entering(
    rule: RuleKind,
    state: &SimplexState,
    lp: &StandardFormLP,
    weights: Option<&DevexWeights>,
) -> Option<usize> {
    let rc = state.reduced_costs();
    let candidates = state.nonbasic().filter(|&j| rc[j] < -NUM_TOL);
    match rule {
        RuleKind::Bland => candidates.min(),
        RuleKind::Dantzig => argmin(candidates.map(|j| (j, rc[j]))),
        RuleKind::SteepestEdge => argmin(candidates.map(|j| {
            let d = state.direction(lp, j);
            let norm = libm::sqrt(d.iter().map(|v| v * v).sum::<f64>());
            (j, rc[j] / norm.max(f64::MIN_POSITIVE))
        })),
        RuleKind::Devex => argmin(candidates.map(|j| {
            let w = weights.map_or(1.0, |w| w.weight(j));
            (j, rc[j] / libm::sqrt(w))
        })),
        RuleKind::GreatestImprovement => {
            let mut scored = Vec::new();
            for j in candidates {
                match crate::lp::ratio_test(state, lp, j) {
                    Ok(leaving) => scored.push((j, rc[j] * leaving.theta)),
                    Err(_) => return Some(j),
                }
            }
            argmin(scored.into_iter())
        }
    }
}

/// Smallest score; the earliest (smallest index) wins exact ties.
fn argmin(scores: impl Iterator<Item = (usize, f64)>) -> Option<usize> {
    scores
        .fold(None, |best: Option<(usize, f64)>, (j, s)| match best {
            Some((_, b)) if b <= s => best,
            _ => Some((j, s)),
        })
        .map(|(j, _)| j)
}

/// Outcome of a simplex run under one rule.
#[derive(Debug, Clone)]
pub struct SimplexRun {
    pub pivot_count: usize,
    pub path: PivotPath,
    pub status: RunStatus,
    pub final_state: SimplexState,
}

impl SimplexRun {
    /// Pivot count as printed in result tables; capped runs read `1000+`.
    pub fn count_label(&self) -> String {
        count_label(self.pivot_count, self.status)
    }
}

pub fn count_label(count: usize, status: RunStatus) -> String {
    match status {
        RunStatus::IterLimit => format!("{count}+"),
        _ => format!("{count}"),
    }
}

/// Applies `rule` from `initial` until optimal, unbounded or `max_iters`
/// pivots have been taken.
pub fn run_simplex(
    lp: &StandardFormLP,
    initial: &SimplexState,
    rule: RuleKind,
    max_iters: usize,
) -> Result<SimplexRun> {
    let mut state = initial.clone();
    let mut devex = (rule == RuleKind::Devex).then(|| DevexWeights::new(&state));
    let mut entering_seq = Vec::new();
    let status = loop {
        let Some(q) = select_entering(rule, &state, lp, devex.as_ref()) else {
            debug_assert!(is_optimal(&state));
            break RunStatus::Optimal;
        };
        if entering_seq.len() >= max_iters {
            break RunStatus::IterLimit;
        }
        let leaving = match crate::lp::ratio_test(&state, lp, q) {
            Ok(l) => l,
            Err(Error::Unbounded { .. }) => break RunStatus::Unbounded,
            Err(e) => return Err(e),
        };
        if let Some(w) = devex.as_mut() {
            w.update(&state, lp, q, leaving.row);
        }
        state.pivot_in_place(lp, q)?;
        entering_seq.push(q);
    };
    Ok(SimplexRun {
        pivot_count: entering_seq.len(),
        path: PivotPath {
            entering: entering_seq,
            final_objective: state.objective(),
        },
        status,
        final_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::DenseMatrix;

    /// Slack-basis instance whose reduced costs equal `costs` on the
    /// structural columns and whose directions are `scale_j * e_j`.
    fn diagonal(costs: &[f64], scales: &[f64]) -> (StandardFormLP, SimplexState) {
        let k = costs.len();
        let mut a = DenseMatrix::zeros(k, 2 * k);
        for j in 0..k {
            a[(j, j)] = scales[j];
            a[(j, k + j)] = 1.0;
        }
        let mut c = costs.to_vec();
        c.resize(2 * k, 0.0);
        let lp = StandardFormLP::new(c, a, vec![10.0; k]).unwrap();
        let basis: Vec<usize> = (k..2 * k).collect();
        let s = SimplexState::from_basis(&lp, &basis).unwrap();
        (lp, s)
    }

    #[test]
    fn dantzig_and_bland_examples() {
        let (lp, s) = diagonal(&[-3.0, -5.0, 2.0], &[1.0, 1.0, 1.0]);
        assert_eq!(select_entering(RuleKind::Dantzig, &s, &lp, None), Some(1));
        assert_eq!(select_entering(RuleKind::Bland, &s, &lp, None), Some(0));
    }

    #[test]
    fn steepest_edge_normalizes_by_direction_norm() {
        // B = I so B^-1 A_j = A_j with norms 4 and 1.
        let (lp, s) = diagonal(&[-2.0, -2.0], &[4.0, 1.0]);
        assert_eq!(
            select_entering(RuleKind::SteepestEdge, &s, &lp, None),
            Some(1)
        );
        assert_eq!(select_entering(RuleKind::Dantzig, &s, &lp, None), Some(0));
    }

    #[test]
    fn greatest_improvement_uses_step_length() {
        // c = (-3, -2), b = 10, directions 5 and 1: steps 2 and 10,
        // improvements -6 and -20.
        let (lp, s) = diagonal(&[-3.0, -2.0], &[5.0, 1.0]);
        assert_eq!(
            select_entering(RuleKind::GreatestImprovement, &s, &lp, None),
            Some(1)
        );
    }

    #[test]
    fn greatest_improvement_returns_unbounded_candidate() {
        let a = DenseMatrix::from_rows(&[vec![1.0, -1.0, 1.0]]).unwrap();
        let lp = StandardFormLP::new(vec![-1.0, -1.0, 0.0], a, vec![1.0]).unwrap();
        let s = SimplexState::from_basis(&lp, &[2]).unwrap();
        assert_eq!(
            select_entering(RuleKind::GreatestImprovement, &s, &lp, None),
            Some(1)
        );
        let run = run_simplex(&lp, &s, RuleKind::GreatestImprovement, 10).unwrap();
        assert_eq!(run.status, RunStatus::Unbounded);
    }

    #[test]
    fn unit_devex_matches_dantzig() {
        let (lp, s) = diagonal(&[-1.0, -4.0, -4.0, 3.0], &[1.0, 2.0, 3.0, 1.0]);
        let w = DevexWeights::new(&s);
        assert_eq!(
            select_entering(RuleKind::Devex, &s, &lp, Some(&w)),
            select_entering(RuleKind::Dantzig, &s, &lp, None)
        );
    }

    #[test]
    fn none_iff_optimal() {
        let (lp, s) = diagonal(&[1.0, 0.0], &[1.0, 1.0]);
        for rule in RuleKind::ALL {
            assert_eq!(select_entering(rule, &s, &lp, None), None);
        }
    }

    #[test]
    fn optimal_start_takes_zero_pivots() {
        let (lp, s) = diagonal(&[1.0, 2.0], &[1.0, 1.0]);
        for rule in RuleKind::ALL {
            let run = run_simplex(&lp, &s, rule, 1000).unwrap();
            assert_eq!(run.pivot_count, 0);
            assert!(run.path.is_empty());
            assert_eq!(run.status, RunStatus::Optimal);
        }
    }

    #[test]
    fn iteration_cap_is_reported() {
        let (lp, s) = diagonal(&[-1.0, -1.0, -1.0], &[1.0, 1.0, 1.0]);
        let run = run_simplex(&lp, &s, RuleKind::Bland, 2).unwrap();
        assert_eq!(run.status, RunStatus::IterLimit);
        assert_eq!(run.pivot_count, 2);
        assert_eq!(run.count_label(), "2+");
    }

    #[test]
    fn devex_weights_grow_and_reset() {
        let (lp, s) = diagonal(&[-1.0, -1.0], &[1.0, 1.0]);
        let mut w = DevexWeights::new(&s);
        assert!(w.in_reference(0) && !w.in_reference(2));
        w.update(&s, &lp, 0, 0);
        assert!(w.weight(2) >= 1.0);
        w.weights[1] = DEVEX_RESET_THRESHOLD * 2.0;
        w.update(&s, &lp, 0, 0);
        assert_eq!(w.resets(), 1);
        assert!(w.weights.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn rule_names_round_trip() {
        for rule in RuleKind::ALL {
            assert_eq!(rule.name().parse::<RuleKind>().unwrap(), rule);
        }
        assert!("nope".parse::<RuleKind>().is_err());
    }
}
