//! Experiment drivers behind the command line subcommands. Every count
//! that leaves this module has been replayed through the engine.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use pivotree_core::mcts::{
    collect_paths, mcts_solve_with, ActionSetVariant, AlphaSchedule, EpisodeExecutor,
    ExploreBudget, MctsConfig, RewardVariant,
};
use pivotree_core::oracle::{bfs_shortest_pivot, DEFAULT_MAX_NODES};
use pivotree_core::rules::count_label;
use pivotree_core::{replay, run_simplex, BasisSignature, PivotPath, RuleKind, RunStatus};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::HarnessError;
use crate::instance::Instance;

/// Executor shared across worker threads.
pub type Executor = dyn EpisodeExecutor + Sync;

/// A classical rule or the tree search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Classical(RuleKind),
    Mcts,
}

impl Rule {
    pub fn all() -> Vec<Rule> {
        RuleKind::ALL
            .iter()
            .map(|&k| Rule::Classical(k))
            .chain([Rule::Mcts])
            .collect()
    }
}

impl FromStr for Rule {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        if s.eq_ignore_ascii_case("mcts") {
            return Ok(Rule::Mcts);
        }
        s.parse()
            .map(Rule::Classical)
            .map_err(|e: pivotree_core::Error| HarnessError::Usage(e.to_string()))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Classical(k) => write!(f, "{k}"),
            Rule::Mcts => f.write_str("mcts"),
        }
    }
}

/// Resolved run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub seed: u64,
    pub action: ActionSetVariant,
    pub reward: RewardVariant,
    pub explore: ExploreBudget,
    pub c_ucb: f64,
    pub alpha: AlphaSchedule,
    pub cap: usize,
    pub max_iters: usize,
    pub batch: usize,
    /// MCTS executions per cell; the best is kept.
    pub runs: usize,
    pub n_exe: usize,
}

impl Default for Settings {
    fn default() -> Self {
        let mcts = MctsConfig::default();
        Self {
            seed: 0,
            action: mcts.action,
            reward: mcts.reward,
            explore: mcts.explore,
            c_ucb: mcts.c_ucb,
            alpha: mcts.alpha,
            cap: mcts.rollout_cap,
            max_iters: mcts.max_iters,
            batch: mcts.batch,
            runs: 5,
            n_exe: 50,
        }
    }
}

impl Settings {
    pub fn mcts(&self, seed: u64) -> MctsConfig {
        MctsConfig {
            action: self.action,
            reward: self.reward,
            explore: self.explore,
            c_ucb: self.c_ucb,
            alpha: self.alpha,
            rollout_cap: self.cap,
            seed,
            max_iters: self.max_iters,
            batch: self.batch,
            ..MctsConfig::default()
        }
    }
}

/// One verified run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub path: PivotPath,
    pub status: RunStatus,
    pub seconds: f64,
}

impl Outcome {
    pub fn count(&self) -> usize {
        self.path.len()
    }

    pub fn label(&self) -> String {
        count_label(self.path.len(), self.status)
    }

    /// Rank key: capped and failed runs sort after every finished one.
    fn rank(&self) -> (bool, usize) {
        (self.status != RunStatus::Optimal, self.path.len())
    }
}

fn verify(inst: &Instance, path: &PivotPath, status: RunStatus) -> Result<(), HarnessError> {
    if status == RunStatus::Optimal {
        path.verify(&inst.lp, &inst.initial)?;
    } else {
        replay(&inst.lp, &inst.initial, &path.entering)?;
    }
    Ok(())
}

/// Runs a classical rule once, or one MCTS execution with `seed`.
pub fn run_once(
    inst: &Instance,
    rule: Rule,
    settings: &Settings,
    seed: u64,
    exec: &Executor,
) -> Result<Outcome, HarnessError> {
    let start = Instant::now();
    let (path, status) = match rule {
        Rule::Classical(kind) => {
            let run = run_simplex(&inst.lp, &inst.initial, kind, settings.max_iters)?;
            (run.path, run.status)
        }
        Rule::Mcts => {
            let run = mcts_solve_with(&inst.lp, &inst.initial, &settings.mcts(seed), exec)?;
            (run.path, run.status)
        }
    };
    let seconds = start.elapsed().as_secs_f64();
    verify(inst, &path, status)?;
    Ok(Outcome {
        path,
        status,
        seconds,
    })
}

/// Classical rules run once; MCTS keeps the best of `settings.runs`
/// executions with seeds `seed, seed + 1, ...` (the first on ties).
pub fn run_best(
    inst: &Instance,
    rule: Rule,
    settings: &Settings,
    exec: &Executor,
) -> Result<Outcome, HarnessError> {
    let runs = if rule == Rule::Mcts {
        settings.runs.max(1)
    } else {
        1
    };
    let mut best: Option<Outcome> = None;
    for k in 0..runs {
        let out = run_once(
            inst,
            rule,
            settings,
            settings.seed.wrapping_add(k as u64),
            exec,
        )?;
        if best.as_ref().is_none_or(|b| out.rank() < b.rank()) {
            best = Some(out);
        }
    }
    Ok(best.expect("at least one run"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveRecord {
    pub instance: String,
    pub m: usize,
    pub n: usize,
    pub rule: String,
    pub pivots: String,
    pub status: String,
    pub objective: f64,
    pub seconds: f64,
    pub path: Vec<String>,
    pub path_indices: Vec<usize>,
}

pub fn solve(
    inst: &Instance,
    rule: Rule,
    settings: &Settings,
    exec: &Executor,
) -> Result<SolveRecord, HarnessError> {
    let out = run_once(inst, rule, settings, settings.seed, exec)?;
    Ok(SolveRecord {
        instance: inst.id.clone(),
        m: inst.lp.m(),
        n: inst.lp.n(),
        rule: rule.to_string(),
        pivots: out.label(),
        status: out.status.to_string(),
        objective: inst.original_objective(out.path.final_objective),
        seconds: out.seconds,
        path: inst.column_names(&out.path.entering),
        path_indices: out.path.entering.clone(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub instance: String,
    pub m: usize,
    pub n: usize,
    /// One cell per rule: the run, or the error message.
    pub cells: Vec<Result<Outcome, String>>,
    /// Rules achieving the smallest count.
    pub best: Vec<Rule>,
    /// Rules achieving the second smallest distinct count.
    pub second: Vec<Rule>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareTable {
    pub rules: Vec<Rule>,
    pub rows: Vec<CompareRow>,
}

impl CompareTable {
    pub fn has_errors(&self) -> bool {
        self.rows.iter().any(|r| r.cells.iter().any(Result::is_err))
    }
}

/// Runs every rule on every instance. Instances are processed in
/// parallel; rows keep the input order.
pub fn compare(
    instances: &[Instance],
    rules: &[Rule],
    settings: &Settings,
    exec: &Executor,
) -> CompareTable {
    let rows = instances
        .par_iter()
        .map(|inst| {
            let cells: Vec<_> = rules
                .iter()
                .map(|&r| run_best(inst, r, settings, exec).map_err(|e| e.to_string()))
                .collect();
            let counts: BTreeSet<(bool, usize)> =
                cells.iter().flatten().map(Outcome::rank).collect();
            let mut ranks = counts.into_iter();
            let (first, second) = (ranks.next(), ranks.next());
            let pick = |key: Option<(bool, usize)>| -> Vec<Rule> {
                rules
                    .iter()
                    .zip(&cells)
                    .filter(|(_, c)| matches!((c, key), (Ok(o), Some(k)) if o.rank() == k))
                    .map(|(&r, _)| r)
                    .collect()
            };
            CompareRow {
                instance: inst.id.clone(),
                m: inst.lp.m(),
                n: inst.lp.n(),
                best: pick(first),
                second: pick(second),
                cells,
            }
        })
        .collect();
    CompareTable {
        rules: rules.to_vec(),
        rows,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelRow {
    pub instance: String,
    pub model: usize,
    pub action: String,
    pub reward: String,
    pub multiplier: f64,
    pub mean_pivots: f64,
    pub mean_seconds: f64,
}

/// Mean pivot count and time of each of the four models for every
/// exploration multiplier (episodes = multiplier x columns).
pub fn models(
    inst: &Instance,
    multipliers: &[f64],
    settings: &Settings,
    exec: &Executor,
) -> Result<Vec<ModelRow>, HarnessError> {
    if multipliers.is_empty() {
        return Err(HarnessError::Usage(
            "no exploration multipliers given".into(),
        ));
    }
    let runs = settings.runs.max(1);
    let mut rows = Vec::new();
    for model in 1..=4 {
        let (action, reward) = MctsConfig::model(model).expect("models 1 to 4");
        for &mult in multipliers {
            let s = Settings {
                action,
                reward,
                explore: ExploreBudget::PerColumn(mult),
                ..settings.clone()
            };
            let (mut pivots, mut seconds) = (0.0, 0.0);
            for k in 0..runs {
                let out = run_once(
                    inst,
                    Rule::Mcts,
                    &s,
                    settings.seed.wrapping_add(k as u64),
                    exec,
                )?;
                pivots += out.count() as f64;
                seconds += out.seconds;
            }
            rows.push(ModelRow {
                instance: inst.id.clone(),
                model,
                action: action.to_string(),
                reward: reward.to_string(),
                multiplier: mult,
                mean_pivots: pivots / runs as f64,
                mean_seconds: seconds / runs as f64,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathEntry {
    pub indices: Vec<usize>,
    pub names: Vec<String>,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathsReport {
    pub instance: String,
    pub n_exe: usize,
    pub min_length: Option<usize>,
    pub paths: Vec<PathEntry>,
    /// Distinct minimal paths known after each execution.
    pub curve: Vec<usize>,
}

pub fn paths(
    inst: &Instance,
    settings: &Settings,
    exec: &Executor,
) -> Result<PathsReport, HarnessError> {
    let col = collect_paths(
        &inst.lp,
        &inst.initial,
        &settings.mcts(settings.seed),
        settings.n_exe,
        exec,
    )?;
    Ok(PathsReport {
        instance: inst.id.clone(),
        n_exe: settings.n_exe,
        min_length: col.min_length,
        paths: col
            .paths
            .iter()
            .map(|p| PathEntry {
                indices: p.entering.clone(),
                names: inst.column_names(&p.entering),
                objective: inst.original_objective(p.final_objective),
            })
            .collect(),
        curve: col.discovery,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    C,
    Alpha,
}

impl FromStr for SweepParam {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s.to_ascii_lowercase().as_str() {
            "c" | "c-ucb" => Ok(Self::C),
            "alpha" => Ok(Self::Alpha),
            other => Err(HarnessError::Usage(format!(
                "unknown sweep `{other}` (expected c or alpha)"
            ))),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::C => "c",
            Self::Alpha => "alpha",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblateRow {
    pub instance: String,
    pub parameter: String,
    pub value: f64,
    /// Exploration episodes per decision as a multiple of the columns.
    pub explore_fraction: Option<f64>,
    pub mean_pivots: f64,
}

/// Mean MCTS pivot count over `settings.runs` executions for each value of
/// the swept parameter. `explore_fraction` overrides the exploration
/// budget with `fraction x columns` episodes.
pub fn ablate(
    inst: &Instance,
    param: SweepParam,
    values: &[f64],
    explore_fraction: Option<f64>,
    settings: &Settings,
    exec: &Executor,
) -> Result<Vec<AblateRow>, HarnessError> {
    if values.is_empty() {
        return Err(HarnessError::Usage("empty sweep".into()));
    }
    let runs = settings.runs.max(1);
    let mut rows = Vec::new();
    for &value in values {
        let mut s = settings.clone();
        if let Some(f) = explore_fraction {
            s.explore = ExploreBudget::PerColumn(f);
        }
        match param {
            SweepParam::C => s.c_ucb = value,
            SweepParam::Alpha => s.alpha = AlphaSchedule::Fixed(value),
        }
        let mut total = 0.0;
        for k in 0..runs {
            total += run_once(
                inst,
                Rule::Mcts,
                &s,
                settings.seed.wrapping_add(k as u64),
                exec,
            )?
            .count() as f64;
        }
        rows.push(AblateRow {
            instance: inst.id.clone(),
            parameter: param.to_string(),
            value,
            explore_fraction,
            mean_pivots: total / runs as f64,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelRecord {
    pub instance: String,
    pub depth: usize,
    pub basis: Vec<usize>,
    pub reduced_costs: Vec<f64>,
    /// Entering columns that continue some shortest path from this basis.
    pub optimal_actions: Vec<usize>,
}

/// Label records for every basis on the given shortest paths, in order of
/// first appearance. A basis's label is the union of the next entering
/// column over all paths through it.
pub fn labels_from_paths(
    inst: &Instance,
    paths: &[PivotPath],
) -> Result<Vec<LabelRecord>, HarnessError> {
    let mut order: Vec<(usize, BasisSignature)> = Vec::new();
    let mut info: BTreeMap<(usize, BasisSignature), (Vec<usize>, Vec<f64>, BTreeSet<usize>)> =
        BTreeMap::new();
    for path in paths {
        let mut state = inst.initial.clone();
        for (depth, &q) in path.entering.iter().enumerate() {
            let key = (depth, state.signature());
            let entry = info.entry(key.clone()).or_insert_with(|| {
                order.push(key);
                (
                    state.basis().to_vec(),
                    state.reduced_costs().to_vec(),
                    BTreeSet::new(),
                )
            });
            entry.2.insert(q);
            state = replay(&inst.lp, &state, &[q])?;
        }
    }
    Ok(order
        .into_iter()
        .map(|key| {
            let (basis, reduced_costs, actions) = info.remove(&key).expect("recorded key");
            LabelRecord {
                instance: inst.id.clone(),
                depth: key.0,
                basis,
                reduced_costs,
                optimal_actions: actions.into_iter().collect(),
            }
        })
        .collect())
}

/// Labels from the paths collected by `settings.n_exe` searches, or from
/// the exhaustive oracle when `oracle` is set.
pub fn labels(
    inst: &Instance,
    settings: &Settings,
    oracle: bool,
    exec: &Executor,
) -> Result<Vec<LabelRecord>, HarnessError> {
    let paths = if oracle {
        bfs_shortest_pivot(&inst.lp, &inst.initial, settings.action, DEFAULT_MAX_NODES)?.all_paths
    } else {
        collect_paths(
            &inst.lp,
            &inst.initial,
            &settings.mcts(settings.seed),
            settings.n_exe,
            exec,
        )?
        .paths
    };
    labels_from_paths(inst, &paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{GenDims, InstanceSource};
    use pivotree_core::gen::Sense;
    use pivotree_core::mcts::Sequential;

    fn tiny(seed: u64) -> Instance {
        Instance::load(&InstanceSource::Generated {
            dims: GenDims::Fixed(3, 4),
            seed,
            sense: Sense::Maximize,
        })
        .unwrap()
    }

    #[test]
    fn rule_names() {
        assert_eq!("mcts".parse::<Rule>().unwrap(), Rule::Mcts);
        assert_eq!(
            "bland".parse::<Rule>().unwrap(),
            Rule::Classical(RuleKind::Bland)
        );
        assert!("fastest".parse::<Rule>().is_err());
        assert_eq!(Rule::all().len(), 6);
    }

    #[test]
    fn solve_matches_engine() {
        let inst = tiny(7);
        let rec = solve(
            &inst,
            Rule::Classical(RuleKind::Bland),
            &Settings::default(),
            &Sequential,
        )
        .unwrap();
        let direct = run_simplex(&inst.lp, &inst.initial, RuleKind::Bland, 1000).unwrap();
        assert_eq!(rec.pivots, direct.count_label());
        assert_eq!(rec.path_indices, direct.path.entering);
    }

    #[test]
    fn compare_marks_best() {
        let insts = [tiny(1), tiny(2)];
        let rules = [
            Rule::Classical(RuleKind::Dantzig),
            Rule::Classical(RuleKind::Bland),
        ];
        let table = compare(&insts, &rules, &Settings::default(), &Sequential);
        assert_eq!(table.rows.len(), 2);
        for row in &table.rows {
            assert_eq!(row.cells.len(), 2);
            let min = row
                .cells
                .iter()
                .flatten()
                .map(Outcome::count)
                .min()
                .unwrap();
            for r in &row.best {
                let i = rules.iter().position(|x| x == r).unwrap();
                assert_eq!(row.cells[i].as_ref().unwrap().count(), min);
            }
        }
    }

    #[test]
    fn model_rows_shape() {
        let s = Settings {
            runs: 2,
            ..Settings::default()
        };
        let rows = models(&tiny(3), &[1.0, 2.0, 3.0], &s, &Sequential).unwrap();
        assert_eq!(rows.len(), 12);
        assert!(models(&tiny(3), &[], &s, &Sequential).is_err());
    }

    #[test]
    fn empty_sweep_is_usage_error() {
        let err = ablate(
            &tiny(3),
            SweepParam::C,
            &[],
            None,
            &Settings::default(),
            &Sequential,
        );
        assert!(matches!(err, Err(HarnessError::Usage(_))));
    }

    #[test]
    fn single_execution_curve() {
        let s = Settings {
            n_exe: 1,
            ..Settings::default()
        };
        let rep = paths(&tiny(5), &s, &Sequential).unwrap();
        assert_eq!(rep.curve, vec![1]);
    }

    #[test]
    fn unique_path_gives_single_action_labels() {
        let inst = tiny(4);
        let path = run_simplex(&inst.lp, &inst.initial, RuleKind::Dantzig, 1000)
            .unwrap()
            .path;
        let recs = labels_from_paths(&inst, std::slice::from_ref(&path)).unwrap();
        assert_eq!(recs.len(), path.len());
        for (d, r) in recs.iter().enumerate() {
            assert_eq!(r.depth, d);
            assert_eq!(r.optimal_actions, vec![path.entering[d]]);
        }
    }
}
