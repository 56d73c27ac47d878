//! The three benchmark protocols: whole-episode averages without learning,
//! the same with learning, and partial-plan quality across a budget sweep.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};

use rtplan_core::agent::{
    run_trials_with, ActionSelector, AgentConfig, Algorithm, BuiltinSelector, CommitPolicy,
};
use rtplan_core::budget::Budget;
use rtplan_core::generator;
use rtplan_core::heuristics::HeuristicKind;
use rtplan_core::oracle;
use rtplan_core::pddl::{ground, parse_domain, parse_problem, GroundTask};

#[derive(Debug, Clone)]
pub enum ProblemSource {
    Files { domain: PathBuf, problem: PathBuf },
    Gripper { balls: u32 },
    Ferry { cars: u32 },
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub source: ProblemSource,
    pub algorithm: Algorithm,
    /// One budget for the episode protocols; the full sweep for test 3.
    pub budgets: Vec<Budget>,
    pub episodes: u32,
    /// `None` takes the protocol default (off for test 1, on for test 2).
    pub learning: Option<bool>,
    pub seed: u64,
    /// `None` defaults to ten times the oracle optimum.
    pub max_steps: Option<u32>,
    pub heuristic: HeuristicKind,
    pub ucb: Option<f64>,
    pub commit: CommitPolicy,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.budgets.is_empty() {
            bail!("no decision budget given");
        }
        for pair in self.budgets.windows(2) {
            let increasing = match (pair[0], pair[1]) {
                (Budget::Iterations(a), Budget::Iterations(b)) => a < b,
                (Budget::Time(a), Budget::Time(b)) => a < b,
                _ => false,
            };
            if !increasing {
                bail!("sweep budgets must be strictly increasing and of one kind");
            }
        }
        if self.episodes == 0 {
            bail!("at least one episode is required");
        }
        Ok(())
    }
}

/// Reads or generates the task; the label names the problem in CSV rows.
pub fn load_task(source: &ProblemSource) -> Result<(String, GroundTask)> {
    match source {
        ProblemSource::Files { domain, problem } => {
            let dom_text = fs::read_to_string(domain)
                .with_context(|| format!("reading {}", domain.display()))?;
            let dom = parse_domain(&dom_text)
                .map_err(|e| anyhow::anyhow!("{}:{e}", domain.display()))?;
            let prob_text = fs::read_to_string(problem)
                .with_context(|| format!("reading {}", problem.display()))?;
            let prob = parse_problem(&prob_text, &dom)
                .map_err(|e| anyhow::anyhow!("{}:{e}", problem.display()))?;
            let label = prob.name.clone();
            Ok((label, ground(&dom, &prob)))
        }
        ProblemSource::Gripper { balls } => {
            let inst = generator::gripper(*balls);
            Ok((inst.name.clone(), generator::build_task(&inst)))
        }
        ProblemSource::Ferry { cars } => {
            let inst = generator::ferry(*cars);
            Ok((inst.name.clone(), generator::build_task(&inst)))
        }
    }
}

#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub problem: String,
    pub algo: String,
    pub decision: String,
    /// Mean per successful episode: wall seconds under time budgets,
    /// expanded nodes under iteration budgets (deterministic).
    pub avr_time: Option<f64>,
    pub time_is_nodes: bool,
    pub avr_length: Option<f64>,
    pub opt_length: u32,
    pub max_length: Option<u32>,
    pub min_length: Option<u32>,
    pub failure_pct: f64,
}

#[derive(Debug, Clone)]
pub struct EpisodeRow {
    pub problem: String,
    pub algo: String,
    pub decision: String,
    pub episode: u32,
    pub length: u32,
    pub success: bool,
}

#[derive(Debug, Clone)]
pub struct Test3Row {
    pub problem: String,
    pub algo: String,
    pub decision: String,
    pub goal_distance: Option<u32>,
    pub optimum_distance: Option<u32>,
}

#[derive(Debug, Clone, Default)]
pub struct EpisodeReport {
    pub rows: Vec<SummaryRow>,
    pub episodes: Vec<EpisodeRow>,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub rows: Vec<Test3Row>,
    /// Smallest swept budget whose returned plan was an optimal solution.
    pub solved_at: Option<Budget>,
}

/// Episode averages without learning unless explicitly overridden.
pub fn run_test1(spec: &ExperimentSpec) -> Result<EpisodeReport> {
    run_episode_protocol(spec, spec.learning.unwrap_or(false))
}

/// The same protocol with the backup rule applied to visited states after
/// every episode.
pub fn run_test2(spec: &ExperimentSpec) -> Result<EpisodeReport> {
    run_episode_protocol(spec, spec.learning.unwrap_or(true))
}

fn run_episode_protocol(spec: &ExperimentSpec, learning: bool) -> Result<EpisodeReport> {
    spec.validate()?;
    let (label, task) = load_task(&spec.source)?;
    let optimum = oracle::optimal_length(&task, task.s0())
        .context("oracle search exceeded its node cap")?
        .context("the goal is unreachable; no benchmark to run")?;
    let max_steps = spec.max_steps.unwrap_or((10 * optimum).max(1));

    let mut report = EpisodeReport::default();
    for (cell, &budget) in spec.budgets.iter().enumerate() {
        let mut cfg = AgentConfig::new(spec.algorithm, budget);
        cfg.episodes = spec.episodes;
        cfg.max_steps = max_steps;
        cfg.learning = learning;
        cfg.seed = cell_seed(spec.seed, cell as u64);
        cfg.heuristic = spec.heuristic;
        cfg.ucb = spec.ucb;
        cfg.commit = spec.commit;

        let decision = budget.to_string();
        let mut selector = BuiltinSelector::from_config(&cfg);
        let episodes_out = &mut report.episodes;
        let record = run_trials_with(&task, &cfg, &mut selector, |episode, result, _| {
            episodes_out.push(EpisodeRow {
                problem: label.clone(),
                algo: spec.algorithm.name().to_string(),
                decision: decision.clone(),
                episode,
                length: result.plan_length,
                success: result.success,
            });
        });

        let time_is_nodes = matches!(budget, Budget::Iterations(_));
        let avr_time = if time_is_nodes {
            record.avg_nodes()
        } else {
            record.avg_time().map(|d| d.as_secs_f64())
        };
        report.rows.push(SummaryRow {
            problem: label.clone(),
            algo: spec.algorithm.name().to_string(),
            decision,
            avr_time,
            time_is_nodes,
            avr_length: record.avg_length(),
            opt_length: optimum,
            max_length: record.max_length(),
            min_length: record.min_length(),
            failure_pct: record.failure_pct(),
        });
    }
    Ok(report)
}

/// Partial-plan quality per swept budget: one selector call from the initial
/// state, scored by the oracle afterwards (never inside the timed call).
pub fn run_test3(spec: &ExperimentSpec) -> Result<SweepReport> {
    spec.validate()?;
    let (label, task) = load_task(&spec.source)?;
    // The oracle is exercised up front so an unreachable goal fails fast.
    oracle::optimal_length(&task, task.s0())
        .context("oracle search exceeded its node cap")?
        .context("the goal is unreachable; no benchmark to run")?;

    let mut rows = Vec::new();
    let mut solved_at = None;
    for (cell, &budget) in spec.budgets.iter().enumerate() {
        let mut cfg = AgentConfig::new(spec.algorithm, budget);
        cfg.seed = cell_seed(spec.seed, cell as u64);
        cfg.heuristic = spec.heuristic;
        cfg.ucb = spec.ucb;
        let mut selector = BuiltinSelector::from_config(&cfg);
        let result = selector.select(&task, task.s0(), &rtplan_core::LearnedTable::new());
        let report = oracle::distance_report(&task, &result.plan)
            .context("selector returned an inapplicable plan")?;
        if solved_at.is_none()
            && report.goal_distance == Some(0)
            && report.optimum_distance == Some(0)
        {
            solved_at = Some(budget);
        }
        rows.push(Test3Row {
            problem: label.clone(),
            algo: spec.algorithm.name().to_string(),
            decision: budget.to_string(),
            goal_distance: report.goal_distance,
            optimum_distance: report.optimum_distance,
        });
    }
    Ok(SweepReport { rows, solved_at })
}

fn cell_seed(seed: u64, cell: u64) -> u64 {
    // splitmix64 over (seed, cell) so parallel cells get disjoint streams.
    let mut z = seed ^ cell.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn opt_u32(v: Option<u32>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "-".into())
}

pub fn write_summary_csv<W: Write>(w: &mut W, rows: &[SummaryRow]) -> io::Result<()> {
    writeln!(
        w,
        "problem,algo,decision,avr_time,avr_length,opt_length,max_length,min_length,failure_pct"
    )?;
    for r in rows {
        let time = match r.avr_time {
            Some(t) if r.time_is_nodes => format!("{t:.1}"),
            Some(t) => format!("{t:.3}"),
            None => "-".into(),
        };
        let avg = r.avr_length.map(|l| format!("{l:.2}")).unwrap_or_else(|| "-".into());
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{:.1}",
            r.problem,
            r.algo,
            r.decision,
            time,
            avg,
            r.opt_length,
            opt_u32(r.max_length),
            opt_u32(r.min_length),
            r.failure_pct
        )?;
    }
    Ok(())
}

pub fn write_episodes_csv<W: Write>(w: &mut W, rows: &[EpisodeRow]) -> io::Result<()> {
    writeln!(w, "problem,algo,decision,episode,length,success")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.problem,
            r.algo,
            r.decision,
            r.episode,
            r.length,
            u8::from(r.success)
        )?;
    }
    Ok(())
}

pub fn write_test3_csv<W: Write>(w: &mut W, rows: &[Test3Row]) -> io::Result<()> {
    writeln!(w, "problem,algo,decision,goal_distance,optimum_distance")?;
    for r in rows {
        let gd = r.goal_distance.map(|d| d.to_string()).unwrap_or_else(|| "inf".into());
        let od = r.optimum_distance.map(|d| d.to_string()).unwrap_or_else(|| "inf".into());
        writeln!(w, "{},{},{},{},{}", r.problem, r.algo, r.decision, gd, od)?;
    }
    Ok(())
}
