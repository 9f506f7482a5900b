use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::tree::{select_with_pending, Forbidden};
use super::{action_set, episode_reward, expand, exploit_step, MctsConfig, TreeNode};
use crate::lp::{is_optimal, BasisSignature, PivotPath, RunStatus, SimplexState, StandardFormLP};
use crate::rng::stream;
use crate::{Error, Result};

// Stream coordinates, one per kind of random choice.
const EXPAND: u64 = 0;
const SELECT: u64 = 1;
const ROLLOUT: u64 = 2;
const EXPLOIT: u64 = 3;

/// How a rollout ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RolloutOutcome {
    ReachedOptimal,
    HitCap,
    RevisitedBasis,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RolloutResult {
    pub reward: f64,
    /// Pivots taken inside the rollout itself.
    pub steps: usize,
    pub outcome: RolloutOutcome,
}

/// Random pivoting from `start` until an optimal basis, a repeated basis,
/// an unbounded edge or `cfg.rollout_cap` pivots.
///
/// `trace_prefix` holds the objective values from the decision node down
/// to `start` (inclusive); the reward is computed over the prefix plus the
/// rollout, so episode length counts from the decision node. An empty
/// prefix starts the episode at `start`. Bases in `ancestors` count as
/// repeats.
pub fn rollout<R: Rng + ?Sized>(
    start: &SimplexState,
    trace_prefix: &[f64],
    lp: &StandardFormLP,
    cfg: &MctsConfig,
    ancestors: &BTreeSet<BasisSignature>,
    rng: &mut R,
) -> RolloutResult {
    let mut state = start.clone();
    let mut trace = trace_prefix.to_vec();
    if trace.is_empty() {
        trace.push(start.objective());
    }
    let mut seen = BTreeSet::new();
    seen.insert(start.signature());
    let penalty = |steps, outcome| RolloutResult {
        reward: cfg.penalty_reward,
        steps,
        outcome,
    };
    let mut steps = 0;
    loop {
        if is_optimal(&state) {
            return RolloutResult {
                reward: episode_reward(cfg.reward, &trace),
                steps,
                outcome: RolloutOutcome::ReachedOptimal,
            };
        }
        if steps >= cfg.rollout_cap {
            return penalty(steps, RolloutOutcome::HitCap);
        }
        let actions = match action_set(&state, cfg.action) {
            Ok(a) => a,
            Err(_) => return penalty(steps, RolloutOutcome::HitCap),
        };
        let a = actions[rng.random_range(0..actions.len())];
        if state.pivot_in_place(lp, a).is_err() {
            return penalty(steps, RolloutOutcome::Unbounded);
        }
        steps += 1;
        trace.push(state.objective());
        let sig = state.signature();
        if ancestors.contains(&sig) || !seen.insert(sig) {
            return penalty(steps, RolloutOutcome::RevisitedBasis);
        }
    }
}

/// One exploration episode to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpisodeJob {
    pub child: usize,
    /// Episode index within the decision; keys the rollout RNG stream.
    pub episode: usize,
}

/// Runs a batch of exploration episodes. Results must come back in job
/// order; each job is independent of the others.
pub trait EpisodeExecutor {
    fn execute(
        &self,
        jobs: &[EpisodeJob],
        run: &(dyn Fn(&EpisodeJob) -> RolloutResult + Sync),
    ) -> Vec<RolloutResult>;
}

/// Runs episodes one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl EpisodeExecutor for Sequential {
    fn execute(
        &self,
        jobs: &[EpisodeJob],
        run: &(dyn Fn(&EpisodeJob) -> RolloutResult + Sync),
    ) -> Vec<RolloutResult> {
        jobs.iter().map(run).collect()
    }
}

/// Statistics of one committed decision.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub depth: usize,
    /// `(entering column, visits, mean reward)` for every child, in
    /// ascending column order. Forbidden children have zero visits.
    pub children: Vec<(usize, u64, Option<f64>)>,
    pub chosen: usize,
    pub episodes: usize,
    pub alpha: f64,
}

#[derive(Debug, Clone)]
pub struct MctsRun {
    pub path: PivotPath,
    pub status: RunStatus,
    pub decisions: Vec<Decision>,
    pub final_state: SimplexState,
}

/// Runs the search from `initial` on the calling thread.
pub fn mcts_solve(
    lp: &StandardFormLP,
    initial: &SimplexState,
    cfg: &MctsConfig,
) -> Result<MctsRun> {
    mcts_solve_with(lp, initial, cfg, &Sequential)
}

/// Runs the search, handing exploration batches to `executor`.
pub fn mcts_solve_with<E: EpisodeExecutor + ?Sized>(
    lp: &StandardFormLP,
    initial: &SimplexState,
    cfg: &MctsConfig,
    executor: &E,
) -> Result<MctsRun> {
    cfg.validate()?;
    let mut state = initial.clone();
    let mut ancestors = BTreeSet::new();
    ancestors.insert(state.signature());
    let mut entering = Vec::new();
    let mut decisions = Vec::new();

    let status = loop {
        if is_optimal(&state) {
            break RunStatus::Optimal;
        }
        let depth = entering.len();
        if depth >= cfg.max_iters {
            break RunStatus::IterLimit;
        }
        let d = depth as u64;
        let mut node = TreeNode::root(state.clone(), depth);
        expand(
            &mut node,
            lp,
            cfg.action,
            &ancestors,
            &mut stream(cfg.seed, &[EXPAND, d]),
        )?;

        let rc = state.reduced_costs();
        let improving_unbounded = node.children.iter().any(|c| {
            c.forbidden == Some(Forbidden::Unbounded) && c.action.is_some_and(|a| rc[a] < 0.0)
        });
        if improving_unbounded {
            break RunStatus::Unbounded;
        }
        let allowed = node.allowed_children().count();
        if allowed == 0 {
            break RunStatus::DeadEnd;
        }

        let configured = cfg.explore.resolve(lp.n(), node.children.len());
        let alpha = cfg.alpha.resolve(configured, lp.n());
        let budget = configured.max(allowed);
        explore(&mut node, lp, cfg, &ancestors, budget, alpha, executor)?;

        let pick = exploit_step(&node, &mut stream(cfg.seed, &[EXPLOIT, d]))?;
        let mut children: Vec<_> = node
            .children
            .iter()
            .map(|c| (c.action.unwrap_or(usize::MAX), c.visits, c.mean()))
            .collect();
        children.sort_by_key(|c| c.0);
        let child = node.children.swap_remove(pick);
        let chosen = child.action.unwrap_or(usize::MAX);
        decisions.push(Decision {
            depth,
            children,
            chosen,
            episodes: budget,
            alpha,
        });
        entering.push(chosen);
        ancestors.insert(child.signature.clone());
        state = child.state;
    };

    Ok(MctsRun {
        path: PivotPath {
            entering,
            final_objective: state.objective(),
        },
        status,
        decisions,
        final_state: state,
    })
}

fn explore<E: EpisodeExecutor + ?Sized>(
    node: &mut TreeNode,
    lp: &StandardFormLP,
    cfg: &MctsConfig,
    ancestors: &BTreeSet<BasisSignature>,
    budget: usize,
    alpha: f64,
    executor: &E,
) -> Result<()> {
    let d = node.depth as u64;
    let mut select_rng = stream(cfg.seed, &[SELECT, d]);
    let parent_objective = node.state.objective();
    let mut episode = 0;
    while episode < budget {
        let size = cfg.batch.min(budget - episode);
        let mut pending = vec![false; node.children.len()];
        let mut jobs = Vec::with_capacity(size);
        for k in 0..size {
            let child = select_with_pending(node, alpha, cfg.c_ucb, &pending, &mut select_rng)?;
            pending[child] = true;
            jobs.push(EpisodeJob {
                child,
                episode: episode + k,
            });
        }
        let children = &node.children;
        let run = |job: &EpisodeJob| {
            let child = &children[job.child];
            let prefix = [parent_objective, child.state.objective()];
            let mut rng = stream(cfg.seed, &[ROLLOUT, d, job.episode as u64]);
            rollout(&child.state, &prefix, lp, cfg, ancestors, &mut rng)
        };
        let results = executor.execute(&jobs, &run);
        for (job, res) in jobs.iter().zip(results) {
            super::backpropagate(node, &[job.child], res.reward);
        }
        episode += size;
    }
    Ok(())
}

/// Distinct shortest paths found over repeated searches.
#[derive(Debug, Clone)]
pub struct PathCollection {
    /// Distinct paths of the minimal observed length, sorted.
    pub paths: Vec<PivotPath>,
    pub min_length: Option<usize>,
    /// After each execution, the number of distinct paths of the minimal
    /// length observed so far.
    pub discovery: Vec<usize>,
    /// `(path length, status)` of every execution.
    pub runs: Vec<(usize, RunStatus)>,
}

/// Runs the search `n_exe` times with seeds `cfg.seed + k` and keeps the
/// distinct paths of minimal length. Every kept path is replay-verified.
pub fn collect_paths<E: EpisodeExecutor + ?Sized>(
    lp: &StandardFormLP,
    initial: &SimplexState,
    cfg: &MctsConfig,
    n_exe: usize,
    executor: &E,
) -> Result<PathCollection> {
    if n_exe == 0 {
        return Err(Error::InvalidConfig("n_exe must be at least 1".into()));
    }
    let mut best: Vec<PivotPath> = Vec::new();
    let mut min_length: Option<usize> = None;
    let mut discovery = Vec::with_capacity(n_exe);
    let mut runs = Vec::with_capacity(n_exe);
    for k in 0..n_exe {
        let run_cfg = MctsConfig {
            seed: cfg.seed.wrapping_add(k as u64),
            ..cfg.clone()
        };
        let run = mcts_solve_with(lp, initial, &run_cfg, executor)?;
        runs.push((run.path.len(), run.status));
        if run.status == RunStatus::Optimal {
            let len = run.path.len();
            match min_length {
                Some(m) if len > m => {}
                Some(m) if len == m => {
                    if !best.iter().any(|p| p.entering == run.path.entering) {
                        run.path.verify(lp, initial)?;
                        best.push(run.path);
                    }
                }
                _ => {
                    run.path.verify(lp, initial)?;
                    min_length = Some(len);
                    best = vec![run.path];
                }
            }
        }
        discovery.push(best.len());
    }
    best.sort_by(|a, b| a.entering.cmp(&b.entering));
    Ok(PathCollection {
        paths: best,
        min_length,
        discovery,
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_random_sense, Sense};
    use crate::mcts::{ActionSetVariant, ExploreBudget, RewardVariant};
    use crate::phase_one;

    fn gen_random(m: usize, n: usize, seed: u64) -> crate::Result<crate::StandardFormLP> {
        gen_random_sense(m, n, seed, Sense::Maximize)
    }

    fn cfg(seed: u64) -> MctsConfig {
        MctsConfig {
            explore: ExploreBudget::PerAction(50),
            seed,
            ..Default::default()
        }
    }

    #[test]
    fn terminal_start_rolls_out_to_zero() {
        let lp = gen_random(2, 2, 1).unwrap();
        let init = phase_one(&lp).unwrap().state;
        let opt = crate::run_simplex(&lp, &init, crate::RuleKind::Dantzig, 100)
            .unwrap()
            .final_state;
        let r = rollout(
            &opt,
            &[],
            &lp,
            &cfg(0),
            &BTreeSet::new(),
            &mut stream(0, &[]),
        );
        assert_eq!(r.outcome, RolloutOutcome::ReachedOptimal);
        assert_eq!((r.steps, r.reward), (0, 0.0));
    }

    #[test]
    fn cap_yields_penalty() {
        // A2 lets rollouts wander uphill, so a cap of one pivot is hit
        // whenever the first pivot does not land on an optimum.
        let lp = gen_random(6, 10, 3).unwrap();
        let init = phase_one(&lp).unwrap().state;
        let c = MctsConfig {
            action: ActionSetVariant::A2,
            rollout_cap: 1,
            ..cfg(0)
        };
        let mut capped = 0;
        for s in 0..50 {
            let r = rollout(&init, &[], &lp, &c, &BTreeSet::new(), &mut stream(s, &[]));
            if r.outcome == RolloutOutcome::HitCap {
                assert_eq!(r.reward, c.penalty_reward);
                capped += 1;
            }
        }
        assert!(capped > 0);
    }

    #[test]
    fn ancestor_basis_counts_as_revisit() {
        let lp = gen_random(3, 4, 5).unwrap();
        let init = phase_one(&lp).unwrap().state;
        // Every A2 move from init leaves the slack basis; forbidding all
        // bases reachable in one pivot forces a revisit on step one.
        let mut ancestors = BTreeSet::new();
        for a in action_set(&init, ActionSetVariant::A2).unwrap() {
            if let Ok(s) = crate::pivot(&init, &lp, a) {
                ancestors.insert(s.signature());
            }
        }
        let c = MctsConfig {
            action: ActionSetVariant::A2,
            ..cfg(0)
        };
        let r = rollout(&init, &[], &lp, &c, &ancestors, &mut stream(9, &[]));
        assert_eq!(r.outcome, RolloutOutcome::RevisitedBasis);
        assert_eq!(r.reward, c.penalty_reward);
    }

    #[test]
    fn optimal_instance_gives_empty_path() {
        let lp = gen_random(2, 2, 1).unwrap();
        let init = phase_one(&lp).unwrap().state;
        let opt = crate::run_simplex(&lp, &init, crate::RuleKind::Dantzig, 100)
            .unwrap()
            .final_state;
        let run = mcts_solve(&lp, &opt, &cfg(0)).unwrap();
        assert!(run.path.is_empty());
        assert_eq!(run.status, RunStatus::Optimal);
    }

    #[test]
    fn solve_returns_verified_path() {
        for seed in 0..5 {
            let lp = gen_random(4, 6, seed).unwrap();
            let init = phase_one(&lp).unwrap().state;
            for model in 1..=4 {
                let (action, reward) = MctsConfig::model(model).unwrap();
                let c = MctsConfig {
                    action,
                    reward,
                    rollout_cap: 50,
                    ..cfg(seed)
                };
                let run = mcts_solve(&lp, &init, &c).unwrap();
                assert_eq!(run.status, RunStatus::Optimal);
                run.path.verify(&lp, &init).unwrap();
                assert_eq!(run.decisions.len(), run.path.len());
            }
        }
    }

    #[test]
    fn same_seed_same_path() {
        let lp = gen_random(5, 7, 11).unwrap();
        let init = phase_one(&lp).unwrap().state;
        let a = mcts_solve(&lp, &init, &cfg(4)).unwrap();
        let b = mcts_solve(&lp, &init, &cfg(4)).unwrap();
        assert_eq!(a.path, b.path);
        assert_eq!(a.decisions, b.decisions);
    }

    #[test]
    fn batched_executor_matches_sequential_for_same_batch() {
        struct Reversed;
        impl EpisodeExecutor for Reversed {
            fn execute(
                &self,
                jobs: &[EpisodeJob],
                run: &(dyn Fn(&EpisodeJob) -> RolloutResult + Sync),
            ) -> Vec<RolloutResult> {
                let mut out: Vec<_> = jobs.iter().rev().map(run).collect();
                out.reverse();
                out
            }
        }
        let lp = gen_random(5, 8, 2).unwrap();
        let init = phase_one(&lp).unwrap().state;
        let c = MctsConfig {
            batch: 8,
            reward: RewardVariant::R2,
            ..cfg(3)
        };
        let a = mcts_solve_with(&lp, &init, &c, &Sequential).unwrap();
        let b = mcts_solve_with(&lp, &init, &c, &Reversed).unwrap();
        assert_eq!(a.decisions, b.decisions);
    }

    #[test]
    fn single_execution_collects_one_path() {
        let lp = gen_random(4, 5, 8).unwrap();
        let init = phase_one(&lp).unwrap().state;
        let col = collect_paths(&lp, &init, &cfg(0), 1, &Sequential).unwrap();
        assert_eq!(col.paths.len(), 1);
        assert_eq!(col.discovery, vec![1]);
        assert!(collect_paths(&lp, &init, &cfg(0), 0, &Sequential).is_err());
    }
}
