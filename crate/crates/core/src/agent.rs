//! The episodic real-time loop: bounded-budget action selection interleaved
//! with execution, repeated over episodes, optionally learning heuristic
//! values on the states the agent actually visits.

use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::baselines::{astar_select, bfs_select, AstarTimeoutRule, SelectorResult};
use crate::budget::Budget;
use crate::heuristics::{Estimate, Evaluator, HeuristicKind, LearnedTable};
use crate::mhsp::{MhspConfig, MhspTree, SelectionPolicy};
use crate::pddl::{GroundTask, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Mhsp,
    AStar,
    Bfs,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Mhsp => "mhsp",
            Algorithm::AStar => "astar",
            Algorithm::Bfs => "bfs",
        }
    }
}

/// How much of a returned plan the agent executes before searching again.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CommitPolicy {
    /// Execute only the first action (the classical real-time contract).
    #[default]
    FirstAction,
    /// Execute the whole returned plan prefix.
    FullPlan,
}

#[derive(Debug, Clone, Copy)]
pub struct AgentConfig {
    pub algorithm: Algorithm,
    pub decision_budget: Budget,
    pub episodes: u32,
    pub max_steps: u32,
    pub learning: bool,
    pub seed: u64,
    pub commit: CommitPolicy,
    pub heuristic: HeuristicKind,
    /// When set, MHSP selects with the UCB bias term instead of plain means.
    pub ucb: Option<f64>,
    pub astar_timeout: AstarTimeoutRule,
}

impl AgentConfig {
    pub fn new(algorithm: Algorithm, decision_budget: Budget) -> Self {
        AgentConfig {
            algorithm,
            decision_budget,
            episodes: 50,
            max_steps: 1000,
            learning: false,
            seed: 0,
            commit: CommitPolicy::default(),
            heuristic: HeuristicKind::default(),
            ucb: None,
            astar_timeout: AstarTimeoutRule::default(),
        }
    }
}

/// One episode's record.
#[derive(Debug, Clone, Copy)]
pub struct EpisodeResult {
    /// Actions executed from the initial state until the goal or the cap.
    pub plan_length: u32,
    pub wall_time: Duration,
    pub success: bool,
    /// Selector invocations (decision steps).
    pub steps_taken: u32,
    /// Total search effort across the episode, in budget units.
    pub nodes_expanded: u64,
}

/// Episode record plus the states the agent occupied, in visit order.
#[derive(Debug, Clone)]
pub struct EpisodeOutcome {
    pub result: EpisodeResult,
    pub visited: Vec<State>,
}

/// Aggregates over a trial's episodes. Length and effort statistics cover
/// successful episodes only, mirroring how failed runs are reported as dashes
/// in benchmark tables.
#[derive(Debug, Clone, Default)]
pub struct TrialRecord {
    pub episodes: Vec<EpisodeResult>,
}

impl TrialRecord {
    pub fn failure_pct(&self) -> f64 {
        if self.episodes.is_empty() {
            return 0.0;
        }
        let failed = self.episodes.iter().filter(|e| !e.success).count();
        100.0 * failed as f64 / self.episodes.len() as f64
    }

    fn successes(&self) -> impl Iterator<Item = &EpisodeResult> {
        self.episodes.iter().filter(|e| e.success)
    }

    pub fn avg_length(&self) -> Option<f64> {
        let lengths: Vec<u32> = self.successes().map(|e| e.plan_length).collect();
        if lengths.is_empty() {
            None
        } else {
            Some(lengths.iter().map(|&l| l as f64).sum::<f64>() / lengths.len() as f64)
        }
    }

    pub fn min_length(&self) -> Option<u32> {
        self.successes().map(|e| e.plan_length).min()
    }

    pub fn max_length(&self) -> Option<u32> {
        self.successes().map(|e| e.plan_length).max()
    }

    pub fn avg_time(&self) -> Option<Duration> {
        let times: Vec<Duration> = self.successes().map(|e| e.wall_time).collect();
        if times.is_empty() {
            None
        } else {
            Some(times.iter().sum::<Duration>() / times.len() as u32)
        }
    }

    pub fn avg_nodes(&self) -> Option<f64> {
        let counts: Vec<u64> = self.successes().map(|e| e.nodes_expanded).collect();
        if counts.is_empty() {
            None
        } else {
            Some(counts.iter().map(|&n| n as f64).sum::<f64>() / counts.len() as f64)
        }
    }
}

/// Anything that proposes a plan from the agent's current state. The learned
/// table is read-only during selection; the agent updates it between
/// episodes.
pub trait ActionSelector {
    fn select(&mut self, task: &GroundTask, state: &State, table: &LearnedTable) -> SelectorResult;
}

/// The three built-in selectors behind one dispatch. Each decision step draws
/// a fresh seed from a per-trial stream, so steps are decorrelated but the
/// whole trial is reproducible from `AgentConfig::seed`.
pub struct BuiltinSelector {
    algorithm: Algorithm,
    budget: Budget,
    eval: Evaluator,
    seeds: ChaCha8Rng,
    ucb: Option<f64>,
    astar_timeout: AstarTimeoutRule,
}

impl BuiltinSelector {
    pub fn from_config(cfg: &AgentConfig) -> Self {
        BuiltinSelector {
            algorithm: cfg.algorithm,
            budget: cfg.decision_budget,
            eval: Evaluator::new(cfg.heuristic),
            seeds: ChaCha8Rng::seed_from_u64(cfg.seed),
            ucb: cfg.ucb,
            astar_timeout: cfg.astar_timeout,
        }
    }
}

impl ActionSelector for BuiltinSelector {
    fn select(&mut self, task: &GroundTask, state: &State, table: &LearnedTable) -> SelectorResult {
        let step_seed: u64 = self.seeds.random();
        match self.algorithm {
            Algorithm::Mhsp => {
                let selection = match self.ucb {
                    Some(c) => SelectionPolicy::Ucb(c),
                    None => SelectionPolicy::BestMean,
                };
                let start = Instant::now();
                let mut tree = MhspTree::with_root(
                    task,
                    state.clone(),
                    &mut self.eval,
                    table,
                    MhspConfig { seed: step_seed, selection },
                );
                let plan = tree.run(self.budget);
                let reached_goal = tree.best_solution().is_some();
                SelectorResult {
                    plan,
                    nodes_expanded: tree.iterations(),
                    time_used: start.elapsed(),
                    reached_goal,
                }
            }
            Algorithm::AStar => astar_select(
                task,
                state,
                self.budget,
                &mut self.eval,
                table,
                step_seed,
                self.astar_timeout,
            ),
            Algorithm::Bfs => {
                bfs_select(task, state, self.budget, &mut self.eval, table, step_seed)
            }
        }
    }
}

/// Runs one episode from the task's initial state: select, execute according
/// to the commit policy, repeat until the goal or the step cap. Returns the
/// record and the visited-state trajectory (learning is the caller's job).
pub fn run_episode_with(
    task: &GroundTask,
    cfg: &AgentConfig,
    table: &LearnedTable,
    selector: &mut dyn ActionSelector,
) -> EpisodeOutcome {
    let start = Instant::now();
    let mut state = task.s0().clone();
    let mut visited = vec![state.clone()];
    let mut executed: u32 = 0;
    let mut steps: u32 = 0;
    let mut nodes: u64 = 0;
    let mut success = false;

    loop {
        if task.is_goal(&state) {
            success = true;
            break;
        }
        if executed >= cfg.max_steps {
            break;
        }
        let result = selector.select(task, &state, table);
        steps += 1;
        nodes += result.nodes_expanded;
        if result.plan.is_empty() {
            // Nothing applicable (or nothing selected) at a non-goal state.
            break;
        }
        let commit_len = match cfg.commit {
            CommitPolicy::FirstAction => 1,
            CommitPolicy::FullPlan => result.plan.len(),
        };
        let mut invalid_step = false;
        for &action in result.plan.actions().iter().take(commit_len) {
            // Built-in selectors always return applicable plans; a foreign
            // selector that does not ends the episode as a failure.
            if !task.applicable(&state, action) {
                invalid_step = true;
                break;
            }
            state = task.apply_unchecked(&state, action);
            visited.push(state.clone());
            executed += 1;
            if task.is_goal(&state) || executed >= cfg.max_steps {
                break;
            }
        }
        if invalid_step {
            break;
        }
    }

    EpisodeOutcome {
        result: EpisodeResult {
            plan_length: executed,
            wall_time: start.elapsed(),
            success,
            steps_taken: steps,
            nodes_expanded: nodes,
        },
        visited,
    }
}

/// One episode with a fresh built-in selector.
pub fn run_episode(task: &GroundTask, cfg: &AgentConfig, table: &LearnedTable) -> EpisodeOutcome {
    let mut selector = BuiltinSelector::from_config(cfg);
    run_episode_with(task, cfg, table, &mut selector)
}

/// One backward sweep of the backup rule over the visited trajectory, last
/// state first. Successor values are evaluated on demand against the current
/// table, so information discovered near the goal propagates toward the
/// start within a single sweep. Goal states are skipped (the rule is
/// degenerate there).
pub fn apply_learning(
    task: &GroundTask,
    eval: &mut Evaluator,
    table: &mut LearnedTable,
    visited: &[State],
) {
    for state in visited.iter().rev() {
        if task.is_goal(state) {
            continue;
        }
        let children: Vec<Estimate> = task
            .successors(state)
            .into_iter()
            .map(|(_, succ)| {
                let base = eval.base(task, &succ);
                table.effective(&succ, base)
            })
            .collect();
        let base = eval.base(task, state);
        table.update(state, base, &children);
    }
}

/// Runs `cfg.episodes` episodes sharing one learned table (left empty unless
/// learning is on), invoking `after_episode` with each record and the table
/// state at that point.
pub fn run_trials_with<F>(
    task: &GroundTask,
    cfg: &AgentConfig,
    selector: &mut dyn ActionSelector,
    mut after_episode: F,
) -> TrialRecord
where
    F: FnMut(u32, &EpisodeResult, &LearnedTable),
{
    let mut table = LearnedTable::new();
    let mut learn_eval = Evaluator::new(cfg.heuristic);
    let mut record = TrialRecord::default();
    for episode in 0..cfg.episodes {
        let outcome = run_episode_with(task, cfg, &table, selector);
        if cfg.learning {
            apply_learning(task, &mut learn_eval, &mut table, &outcome.visited);
        }
        after_episode(episode, &outcome.result, &table);
        record.episodes.push(outcome.result);
    }
    record
}

pub fn run_trials(task: &GroundTask, cfg: &AgentConfig) -> TrialRecord {
    let mut selector = BuiltinSelector::from_config(cfg);
    run_trials_with(task, cfg, &mut selector, |_, _, _| {})
}
