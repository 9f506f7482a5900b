use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use pivotree::cache::CachedInstance;
use pivotree::config::ConfigFile;
use pivotree::error::HarnessError;
use pivotree::harness::{self, Executor, Rule, Settings, SweepParam};
use pivotree::instance::{GenDims, Instance, InstanceSource};
use pivotree::parallel::{build_pool, RayonExecutor};
use pivotree::report::{self, Format};
use pivotree_core::gen::{gen_random_dims, Sense};
use pivotree_core::mcts::{
    ActionSetVariant, AlphaSchedule, ExploreBudget, RewardVariant, Sequential,
};

/// Simplex pivot rules and a Monte Carlo tree search for the fewest pivots.
#[derive(Parser)]
#[command(name = "pivotree", version)]
struct Cli {
    /// Settings file of `key = value` lines; command line flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve instances with one rule and report the pivot path.
    Solve {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        tuning: Tuning,
        #[command(flatten)]
        output: Output,
        /// Classical rule name or `mcts` (the default).
        #[arg(long)]
        rule: Option<Rule>,
    },
    /// Pivot counts of several rules side by side (MCTS: best of --runs).
    Compare {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        tuning: Tuning,
        #[command(flatten)]
        output: Output,
        /// Comma separated rules; all five classical rules and mcts by default.
        #[arg(long, value_delimiter = ',')]
        rules: Vec<Rule>,
    },
    /// Mean pivots and time of the four MCTS models per exploration multiplier.
    Models {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        tuning: Tuning,
        #[command(flatten)]
        output: Output,
        /// Exploration episodes per decision as multiples of the column count.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8,9,10")]
        multipliers: Vec<f64>,
    },
    /// Distinct shortest pivot paths over --n-exe searches.
    Paths {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        tuning: Tuning,
        #[command(flatten)]
        output: Output,
        /// Also write the cumulative discovery curve as CSV.
        #[arg(long)]
        curve_out: Option<PathBuf>,
    },
    /// Mean MCTS pivots while sweeping C or alpha.
    Ablate {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        tuning: Tuning,
        #[command(flatten)]
        output: Output,
        /// Parameter to sweep: `c` or `alpha`.
        #[arg(long)]
        sweep: SweepParam,
        /// Comma separated values of the swept parameter.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Exploration episodes per decision as a fraction of the column count.
        #[arg(long)]
        explore_fraction: Option<f64>,
    },
    /// Optimal entering-column labels along shortest paths, as JSON lines.
    Label {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        tuning: Tuning,
        #[command(flatten)]
        output: Output,
        /// Label from the exhaustive breadth-first oracle instead of MCTS.
        #[arg(long)]
        oracle: bool,
    },
    /// Write generated instances in the cache format.
    Gen {
        /// Dimensions `MxN`, or `random` to draw them from the seed.
        #[arg(long = "gen", default_value = "random")]
        dims: GenDims,
        #[arg(long)]
        seed: Option<u64>,
        /// `min` or `max`.
        #[arg(long)]
        sense: Option<Sense>,
        /// Number of instances, with seeds seed, seed + 1, ...
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Output file, or directory when --count > 1; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Inputs {
    /// MPS file (repeatable).
    #[arg(long)]
    mps: Vec<PathBuf>,
    /// Generated instance `MxN` or `random` (repeatable).
    #[arg(long = "gen")]
    gen: Vec<GenDims>,
    /// Instance cache file (repeatable).
    #[arg(long)]
    cache: Vec<PathBuf>,
    /// Generated instances per --gen, with seeds seed, seed + 1, ...
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Objective sense of generated instances: `min` or `max`.
    #[arg(long)]
    sense: Option<Sense>,
}

#[derive(Args)]
struct Tuning {
    #[arg(long)]
    seed: Option<u64>,
    /// Action set: a1 (negative reduced cost) or a2 (nonzero reduced cost).
    #[arg(long)]
    action: Option<ActionSetVariant>,
    /// Reward: r1 (episode length) or r2 (weighted objective decrease).
    #[arg(long)]
    reward: Option<RewardVariant>,
    /// Exploration episodes per decision as a multiple of the column count.
    #[arg(long)]
    explore_mult: Option<f64>,
    /// Exploration episodes per decision as a multiple of the action count.
    #[arg(long, conflicts_with = "explore_mult")]
    explore_per_action: Option<usize>,
    #[arg(long)]
    c_ucb: Option<f64>,
    /// Threshold relaxation in [0, 1], or `auto`.
    #[arg(long)]
    alpha: Option<AlphaSchedule>,
    /// Maximum pivots per rollout.
    #[arg(long)]
    cap: Option<usize>,
    /// MCTS executions per cell or sweep point.
    #[arg(long)]
    runs: Option<usize>,
    /// Searches used to collect paths.
    #[arg(long)]
    n_exe: Option<usize>,
    /// Pivot limit; longer runs are reported as `<limit>+`.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Exploration episodes rolled out together on the thread pool.
    #[arg(long)]
    batch: Option<usize>,
}

#[derive(Args)]
struct Output {
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `csv` or `json`.
    #[arg(long)]
    format: Option<Format>,
}

fn pick<T: FromStr>(
    flag: Option<T>,
    cfg: &ConfigFile,
    key: &str,
) -> Result<Option<T>, HarnessError> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => Ok(cfg.get(key)?),
    }
}

fn settings(t: &Tuning, cfg: &ConfigFile) -> Result<Settings, HarnessError> {
    let d = Settings::default();
    let per_action = pick(t.explore_per_action, cfg, "explore-per-action")?;
    let mult = pick(t.explore_mult, cfg, "explore-mult")?;
    let explore = match (t.explore_per_action, t.explore_mult, per_action, mult) {
        (Some(k), ..) => ExploreBudget::PerAction(k),
        (None, Some(f), ..) => ExploreBudget::PerColumn(f),
        (None, None, Some(k), _) => ExploreBudget::PerAction(k),
        (None, None, None, Some(f)) => ExploreBudget::PerColumn(f),
        _ => d.explore,
    };
    Ok(Settings {
        seed: pick(t.seed, cfg, "seed")?.unwrap_or(d.seed),
        action: pick(t.action, cfg, "action")?.unwrap_or(d.action),
        reward: pick(t.reward, cfg, "reward")?.unwrap_or(d.reward),
        explore,
        c_ucb: pick(t.c_ucb, cfg, "c-ucb")?.unwrap_or(d.c_ucb),
        alpha: pick(t.alpha, cfg, "alpha")?.unwrap_or(d.alpha),
        cap: pick(t.cap, cfg, "cap")?.unwrap_or(d.cap),
        max_iters: pick(t.max_iters, cfg, "max-iters")?.unwrap_or(d.max_iters),
        batch: pick(t.batch, cfg, "batch")?.unwrap_or(d.batch),
        runs: pick(t.runs, cfg, "runs")?.unwrap_or(d.runs),
        n_exe: pick(t.n_exe, cfg, "n-exe")?.unwrap_or(d.n_exe),
    })
}

fn sources(
    inputs: &Inputs,
    seed: u64,
    cfg: &ConfigFile,
) -> Result<Vec<InstanceSource>, HarnessError> {
    let sense = pick(inputs.sense, cfg, "sense")?.unwrap_or_default();
    let mut out: Vec<InstanceSource> = inputs
        .mps
        .iter()
        .cloned()
        .map(InstanceSource::Mps)
        .collect();
    out.extend(inputs.cache.iter().cloned().map(InstanceSource::Cache));
    for &dims in &inputs.gen {
        for k in 0..inputs.count as u64 {
            out.push(InstanceSource::Generated {
                dims,
                seed: seed.wrapping_add(k),
                sense,
            });
        }
    }
    if out.is_empty() {
        return Err(HarnessError::Usage(
            "no instances: pass --mps, --gen or --cache".into(),
        ));
    }
    Ok(out)
}

fn load(inputs: &Inputs, seed: u64, cfg: &ConfigFile) -> Result<Vec<Instance>, HarnessError> {
    sources(inputs, seed, cfg)?
        .iter()
        .map(Instance::load)
        .collect()
}

fn format(output: &Output, cfg: &ConfigFile, default: Format) -> Result<Format, HarnessError> {
    Ok(pick(output.format, cfg, "format")?.unwrap_or(default))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), HarnessError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Runs the command; `Ok(false)` means output was written but some cells
/// failed.
fn run(cli: Cli) -> Result<bool, HarnessError> {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::parse(&std::fs::read_to_string(path).map_err(|source| {
            HarnessError::Io {
                path: path.clone(),
                source,
            }
        })?)?,
        None => ConfigFile::default(),
    };
    let pool = build_pool();
    let rayon_exec = RayonExecutor::new(pool.clone());
    let executor = |s: &Settings| -> &Executor {
        if s.batch > 1 {
            &rayon_exec
        } else {
            &Sequential
        }
    };

    match cli.command {
        Command::Solve {
            inputs,
            tuning,
            output,
            rule,
        } => {
            let s = settings(&tuning, &cfg)?;
            let rule = pick(rule, &cfg, "rule")?.unwrap_or(Rule::Mcts);
            let mut records = Vec::new();
            for inst in load(&inputs, s.seed, &cfg)? {
                records.push(harness::solve(&inst, rule, &s, executor(&s))?);
            }
            emit(
                output.out.as_deref(),
                &report::render_solve(&records, format(&output, &cfg, Format::Csv)?)?,
            )?;
            Ok(true)
        }
        Command::Compare {
            inputs,
            tuning,
            output,
            rules,
        } => {
            let s = settings(&tuning, &cfg)?;
            let rules = if rules.is_empty() { Rule::all() } else { rules };
            let instances = load(&inputs, s.seed, &cfg)?;
            let table = pool.install(|| harness::compare(&instances, &rules, &s, executor(&s)));
            emit(
                output.out.as_deref(),
                &report::render_compare(&table, format(&output, &cfg, Format::Csv)?)?,
            )?;
            Ok(!table.has_errors())
        }
        Command::Models {
            inputs,
            tuning,
            output,
            multipliers,
        } => {
            let s = settings(&tuning, &cfg)?;
            let mut rows = Vec::new();
            for inst in load(&inputs, s.seed, &cfg)? {
                rows.extend(harness::models(&inst, &multipliers, &s, executor(&s))?);
            }
            emit(
                output.out.as_deref(),
                &report::render_rows(&rows, format(&output, &cfg, Format::Csv)?)?,
            )?;
            Ok(true)
        }
        Command::Paths {
            inputs,
            tuning,
            output,
            curve_out,
        } => {
            let s = settings(&tuning, &cfg)?;
            let mut reports = Vec::new();
            for inst in load(&inputs, s.seed, &cfg)? {
                reports.push(harness::paths(&inst, &s, executor(&s))?);
            }
            emit(
                output.out.as_deref(),
                &report::render_paths(&reports, format(&output, &cfg, Format::Json)?)?,
            )?;
            if let Some(path) = curve_out {
                emit(Some(&path), &report::render_curves(&reports)?)?;
            }
            Ok(true)
        }
        Command::Ablate {
            inputs,
            tuning,
            output,
            sweep,
            values,
            explore_fraction,
        } => {
            let s = settings(&tuning, &cfg)?;
            let mut rows = Vec::new();
            for inst in load(&inputs, s.seed, &cfg)? {
                rows.extend(harness::ablate(
                    &inst,
                    sweep,
                    &values,
                    explore_fraction,
                    &s,
                    executor(&s),
                )?);
            }
            emit(
                output.out.as_deref(),
                &report::render_rows(&rows, format(&output, &cfg, Format::Csv)?)?,
            )?;
            Ok(true)
        }
        Command::Label {
            inputs,
            tuning,
            output,
            oracle,
        } => {
            let s = settings(&tuning, &cfg)?;
            let mut records = Vec::new();
            for inst in load(&inputs, s.seed, &cfg)? {
                records.extend(harness::labels(&inst, &s, oracle, executor(&s))?);
            }
            emit(output.out.as_deref(), &report::render_labels(&records)?)?;
            Ok(true)
        }
        Command::Gen {
            dims,
            seed,
            sense,
            count,
            out,
        } => {
            let seed = pick(seed, &cfg, "seed")?.unwrap_or(0);
            let sense = pick(sense, &cfg, "sense")?.unwrap_or_default();
            if count > 1 && out.is_none() {
                return Err(HarnessError::Usage("--count > 1 needs --out DIR".into()));
            }
            for k in 0..count as u64 {
                let seed = seed.wrapping_add(k);
                let (m, n) = match dims {
                    GenDims::Fixed(m, n) => (m, n),
                    GenDims::Random => gen_random_dims(seed),
                };
                let text = CachedInstance::generate(m, n, seed, sense)?.to_text();
                let target = match (&out, count) {
                    (Some(dir), c) if c > 1 => {
                        std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
                            path: dir.clone(),
                            source,
                        })?;
                        Some(dir.join(format!("gen-{m}x{n}-s{seed}-{sense}.txt")))
                    }
                    (o, _) => o.clone(),
                };
                emit(target.as_deref(), &text)?;
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                HarnessError::Usage(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
