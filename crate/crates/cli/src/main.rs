use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};

use rtplan_cli::experiment::{
    self, ExperimentSpec, ProblemSource,
};
use rtplan_core::agent::{Algorithm, CommitPolicy};
use rtplan_core::budget::Budget;
use rtplan_core::heuristics::HeuristicKind;

/// Real-time planning benchmark runner: episodic trials with or without
/// heuristic learning, and partial-plan quality sweeps.
#[derive(Parser, Debug)]
#[command(name = "rtplan", version, about)]
struct Cli {
    /// PDDL domain file (paired with --problem).
    #[arg(long, requires = "problem", conflicts_with = "gen")]
    domain: Option<PathBuf>,

    /// PDDL problem file (paired with --domain).
    #[arg(long, requires = "domain")]
    problem: Option<PathBuf>,

    /// Generate an instance instead: gripper:N or ferry:N.
    #[arg(long, value_name = "FAMILY:N")]
    gen: Option<String>,

    /// Action selector to benchmark.
    #[arg(long, value_enum, default_value_t = AlgoArg::Mhsp)]
    algo: AlgoArg,

    /// Wall-clock decision budget per step, in milliseconds.
    #[arg(long, value_name = "MS", conflicts_with = "decision_iters")]
    decision_ms: Option<u64>,

    /// Deterministic decision budget per step, in search iterations /
    /// node expansions.
    #[arg(long, value_name = "N")]
    decision_iters: Option<u64>,

    /// Budget sweep for --test 3, comma separated, strictly increasing.
    #[arg(long, value_name = "A,B,C")]
    sweep: Option<String>,

    /// Unit of the sweep values.
    #[arg(long, value_enum, default_value_t = SweepUnit::Iters)]
    sweep_unit: SweepUnit,

    /// Episodes per trial.
    #[arg(long, default_value_t = 50)]
    episodes: u32,

    /// Force learning on regardless of the selected test protocol.
    #[arg(long)]
    learning: bool,

    /// Episode step cap; defaults to ten times the optimal plan length.
    #[arg(long)]
    max_steps: Option<u32>,

    /// Master random seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Protocol: 1 = episode averages, 2 = with learning, 3 = budget sweep.
    #[arg(long, default_value_t = 1)]
    test: u8,

    /// Output CSV file; stdout when omitted. Test 2 also writes
    /// FILE.episodes.csv with the per-episode series.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Enable UCB child selection in MHSP with this exploration constant.
    #[arg(long, value_name = "C")]
    ucb: Option<f64>,

    /// Base heuristic.
    #[arg(long, value_enum, default_value_t = HeurArg::Hmax)]
    heuristic: HeurArg,

    /// How much of each returned plan the agent executes.
    #[arg(long, value_enum, default_value_t = CommitArg::FirstAction)]
    commit: CommitArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgoArg {
    Mhsp,
    Astar,
    Bfs,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Mhsp => Algorithm::Mhsp,
            AlgoArg::Astar => Algorithm::AStar,
            AlgoArg::Bfs => Algorithm::Bfs,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum HeurArg {
    Hmax,
    Hadd,
    Hff,
}

impl From<HeurArg> for HeuristicKind {
    fn from(h: HeurArg) -> Self {
        match h {
            HeurArg::Hmax => HeuristicKind::HMax,
            HeurArg::Hadd => HeuristicKind::HAdd,
            HeurArg::Hff => HeuristicKind::HFf,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CommitArg {
    FirstAction,
    FullPlan,
}

impl From<CommitArg> for CommitPolicy {
    fn from(c: CommitArg) -> Self {
        match c {
            CommitArg::FirstAction => CommitPolicy::FirstAction,
            CommitArg::FullPlan => CommitPolicy::FullPlan,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SweepUnit {
    Iters,
    Ms,
}

fn parse_source(cli: &Cli) -> Result<ProblemSource> {
    match (&cli.domain, &cli.problem, &cli.gen) {
        (Some(domain), Some(problem), None) => Ok(ProblemSource::Files {
            domain: domain.clone(),
            problem: problem.clone(),
        }),
        (None, None, Some(gen)) => {
            let (family, size) = gen
                .split_once(':')
                .with_context(|| format!("expected FAMILY:N, got `{gen}`"))?;
            let size: u32 = size.parse().with_context(|| format!("bad instance size `{size}`"))?;
            if size == 0 {
                bail!("instance size must be at least 1");
            }
            match family {
                "gripper" => Ok(ProblemSource::Gripper { balls: size }),
                "ferry" => Ok(ProblemSource::Ferry { cars: size }),
                other => bail!("unknown generator family `{other}` (gripper or ferry)"),
            }
        }
        _ => bail!("give either --domain/--problem or --gen, not both"),
    }
}

fn parse_budgets(cli: &Cli) -> Result<Vec<Budget>> {
    if cli.test == 3 {
        let sweep = cli
            .sweep
            .as_ref()
            .context("--test 3 needs --sweep A,B,C")?;
        let mut budgets = Vec::new();
        for part in sweep.split(',') {
            let v: u64 = part
                .trim()
                .parse()
                .with_context(|| format!("bad sweep value `{part}`"))?;
            budgets.push(match cli.sweep_unit {
                SweepUnit::Iters => Budget::Iterations(v),
                SweepUnit::Ms => Budget::Time(Duration::from_millis(v)),
            });
        }
        return Ok(budgets);
    }
    match (cli.decision_ms, cli.decision_iters) {
        (Some(ms), None) => Ok(vec![Budget::Time(Duration::from_millis(ms))]),
        (None, Some(n)) => Ok(vec![Budget::Iterations(n)]),
        _ => bail!("give exactly one of --decision-ms or --decision-iters"),
    }
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<()> {
    let spec = ExperimentSpec {
        source: parse_source(&cli)?,
        algorithm: cli.algo.into(),
        budgets: parse_budgets(&cli)?,
        episodes: cli.episodes,
        learning: if cli.learning { Some(true) } else { None },
        seed: cli.seed,
        max_steps: cli.max_steps,
        heuristic: cli.heuristic.into(),
        ucb: cli.ucb,
        commit: cli.commit.into(),
    };

    match cli.test {
        1 | 2 => {
            let report =
                if cli.test == 1 { experiment::run_test1(&spec)? } else { experiment::run_test2(&spec)? };
            let mut out = open_out(&cli.out)?;
            experiment::write_summary_csv(&mut out, &report.rows)?;
            out.flush()?;
            if cli.test == 2 {
                match &cli.out {
                    Some(path) => {
                        let mut name = path.as_os_str().to_owned();
                        name.push(".episodes.csv");
                        let mut w = BufWriter::new(
                            File::create(&name)
                                .with_context(|| format!("creating {}", PathBuf::from(&name).display()))?,
                        );
                        experiment::write_episodes_csv(&mut w, &report.episodes)?;
                        w.flush()?;
                    }
                    None => {
                        let mut stdout = std::io::stdout().lock();
                        writeln!(stdout)?;
                        experiment::write_episodes_csv(&mut stdout, &report.episodes)?;
                    }
                }
            }
        }
        3 => {
            let report = experiment::run_test3(&spec)?;
            let mut out = open_out(&cli.out)?;
            experiment::write_test3_csv(&mut out, &report.rows)?;
            out.flush()?;
            match report.solved_at {
                Some(budget) => eprintln!(
                    "time to find an optimal solution plan ({}): {budget}",
                    spec_algo_name(&spec)
                ),
                None => eprintln!(
                    "no swept budget produced an optimal solution plan ({})",
                    spec_algo_name(&spec)
                ),
            }
        }
        other => bail!("unknown test protocol {other} (1, 2 or 3)"),
    }
    Ok(())
}

fn spec_algo_name(spec: &ExperimentSpec) -> &'static str {
    spec.algorithm.name()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
