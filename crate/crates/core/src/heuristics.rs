//! Distance estimates from a delete-free relaxation, plus the learned
//! per-state overlay table updated by the agent between episodes.

use std::collections::HashMap;
use std::io::{self, Write};

use crate::pddl::{ActionId, FactId, GroundTask, State};

/// A nonnegative distance estimate in action counts; `DeadEnd` is infinite.
/// `Finite(0)` holds exactly when the goal is already satisfied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Estimate {
    Finite(u32),
    DeadEnd,
}

impl Estimate {
    pub fn finite(self) -> Option<u32> {
        match self {
            Estimate::Finite(v) => Some(v),
            Estimate::DeadEnd => None,
        }
    }

    pub fn is_dead_end(self) -> bool {
        matches!(self, Estimate::DeadEnd)
    }

    /// `1 + self`, saturating at the dead-end sentinel.
    pub fn plus_one(self) -> Estimate {
        match self {
            Estimate::Finite(v) => Estimate::Finite(v.saturating_add(1)),
            Estimate::DeadEnd => Estimate::DeadEnd,
        }
    }

    /// The search return for this estimate: minus the distance, `-inf` for
    /// dead ends so they order below every finite mean.
    pub fn as_return(self) -> f64 {
        match self {
            Estimate::Finite(v) => -(v as f64),
            Estimate::DeadEnd => f64::NEG_INFINITY,
        }
    }
}

impl std::fmt::Display for Estimate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Estimate::Finite(v) => write!(f, "{v}"),
            Estimate::DeadEnd => write!(f, "inf"),
        }
    }
}

const UNREACHED: u32 = u32::MAX;

/// Layered fixpoint of delete-free forward chaining: each fact carries the
/// first layer it appears in, each action the first layer where its
/// preconditions are all present.
#[derive(Debug, Clone)]
pub struct RelaxedPlanningGraph {
    fact_level: Vec<u32>,
    action_level: Vec<u32>,
}

impl RelaxedPlanningGraph {
    pub fn build(task: &GroundTask, s: &State) -> Self {
        let mut fact_level = vec![UNREACHED; task.num_facts()];
        let mut action_level = vec![UNREACHED; task.actions().len()];
        for f in s.iter() {
            fact_level[f.index()] = 0;
        }
        let mut level = 0u32;
        loop {
            let mut new_facts = Vec::new();
            for (i, a) in task.actions().iter().enumerate() {
                if action_level[i] != UNREACHED {
                    continue;
                }
                if a.precond.iter().all(|f| fact_level[f.index()] <= level) {
                    action_level[i] = level;
                    for f in &a.add {
                        if fact_level[f.index()] == UNREACHED {
                            new_facts.push(*f);
                        }
                    }
                }
            }
            if new_facts.is_empty() {
                return RelaxedPlanningGraph { fact_level, action_level };
            }
            level += 1;
            for f in new_facts {
                fact_level[f.index()] = fact_level[f.index()].min(level);
            }
        }
    }

    pub fn fact_level(&self, f: FactId) -> Option<u32> {
        match self.fact_level[f.index()] {
            UNREACHED => None,
            l => Some(l),
        }
    }

    pub fn action_level(&self, a: ActionId) -> Option<u32> {
        match self.action_level[a.index()] {
            UNREACHED => None,
            l => Some(l),
        }
    }

    fn aggregate_goal(&self, goal: &State, combine: fn(u32, u32) -> u32) -> Estimate {
        let mut acc = 0u32;
        for f in goal.iter() {
            match self.fact_level[f.index()] {
                UNREACHED => return Estimate::DeadEnd,
                l => acc = combine(acc, l),
            }
        }
        Estimate::Finite(acc)
    }
}

/// Highest goal-fact layer of the relaxed planning graph. Admissible: the
/// relaxation only removes constraints, and every goal fact needs at least
/// its layer count of actions.
pub fn h_max(task: &GroundTask, s: &State, goal: &State) -> Estimate {
    RelaxedPlanningGraph::build(task, s).aggregate_goal(goal, u32::max)
}

/// The sum-aggregation analogue of `h_max`: action costs add up their
/// precondition costs instead of maxing them, and the goal aggregates by
/// sum. Far more informative than `h_max` but not admissible (shared
/// subgoals are double-counted).
pub fn h_add(task: &GroundTask, s: &State, goal: &State) -> Estimate {
    let cost = additive_costs(task, s);
    let mut total: u32 = 0;
    for f in goal.iter() {
        match cost[f.index()] {
            UNREACHED => return Estimate::DeadEnd,
            c => total = total.saturating_add(c),
        }
    }
    Estimate::Finite(total)
}

/// Length of a relaxed plan extracted backward from the planning graph:
/// for each open subgoal, commit its cheapest first-level achiever and push
/// that action's preconditions as new subgoals. Counts distinct actions, so
/// shared sub-plans are not double-charged; on transport-style domains this
/// tracks the optimal delete-free cost closely.
pub fn h_ff(task: &GroundTask, s: &State, goal: &State) -> Estimate {
    let rpg = RelaxedPlanningGraph::build(task, s);
    let mut max_level = 0u32;
    for f in goal.iter() {
        match rpg.fact_level[f.index()] {
            UNREACHED => return Estimate::DeadEnd,
            l => max_level = max_level.max(l),
        }
    }
    if max_level == 0 {
        return Estimate::Finite(0);
    }

    let mut subgoals_at: Vec<Vec<FactId>> = vec![Vec::new(); (max_level + 1) as usize];
    let mut open = vec![false; task.num_facts()];
    for f in goal.iter() {
        let l = rpg.fact_level[f.index()];
        if l > 0 && !open[f.index()] {
            open[f.index()] = true;
            subgoals_at[l as usize].push(f);
        }
    }

    let mut selected = vec![false; task.actions().len()];
    let mut count = 0u32;
    for level in (1..=max_level).rev() {
        let mut i = 0;
        // The list may grow while scanning if a same-level fact is queued;
        // achiever preconditions always sit at strictly lower levels.
        while i < subgoals_at[level as usize].len() {
            let fact = subgoals_at[level as usize][i];
            i += 1;
            // Already added by a committed action?
            let covered = task.actions().iter().enumerate().any(|(ai, a)| {
                selected[ai]
                    && rpg.action_level[ai] < level
                    && a.add.binary_search(&fact).is_ok()
            });
            if covered {
                continue;
            }
            // Cheapest achiever at the fact's defining layer: minimal summed
            // precondition levels, ties to the lowest action index.
            let mut best: Option<(u64, usize)> = None;
            for (ai, a) in task.actions().iter().enumerate() {
                if rpg.action_level[ai] == level - 1 && a.add.binary_search(&fact).is_ok() {
                    let difficulty: u64 =
                        a.precond.iter().map(|p| rpg.fact_level[p.index()] as u64).sum();
                    if best.is_none_or(|(d, _)| difficulty < d) {
                        best = Some((difficulty, ai));
                    }
                }
            }
            let (_, ai) = best.expect("reached facts have an achiever at the previous layer");
            selected[ai] = true;
            count += 1;
            for &p in &task.actions()[ai].precond {
                let pl = rpg.fact_level[p.index()];
                if pl > 0 && !open[p.index()] {
                    open[p.index()] = true;
                    subgoals_at[pl as usize].push(p);
                }
            }
        }
    }
    Estimate::Finite(count)
}

/// Least fixpoint of `cost(f) = min over achievers a of
/// 1 + sum of cost(pre(a))`, with `cost(f) = 0` for facts in `s`.
fn additive_costs(task: &GroundTask, s: &State) -> Vec<u32> {
    let mut cost = vec![UNREACHED; task.num_facts()];
    for f in s.iter() {
        cost[f.index()] = 0;
    }
    loop {
        let mut changed = false;
        for a in task.actions() {
            let mut pre_sum: u32 = 0;
            let mut reachable = true;
            for f in &a.precond {
                match cost[f.index()] {
                    UNREACHED => {
                        reachable = false;
                        break;
                    }
                    c => pre_sum = pre_sum.saturating_add(c),
                }
            }
            if !reachable {
                continue;
            }
            let action_cost = pre_sum.saturating_add(1);
            for f in &a.add {
                if action_cost < cost[f.index()] {
                    cost[f.index()] = action_cost;
                    changed = true;
                }
            }
        }
        if !changed {
            return cost;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeuristicKind {
    #[default]
    HMax,
    HAdd,
    HFf,
}

impl HeuristicKind {
    pub fn evaluate(self, task: &GroundTask, s: &State, goal: &State) -> Estimate {
        match self {
            HeuristicKind::HMax => h_max(task, s, goal),
            HeuristicKind::HAdd => h_add(task, s, goal),
            HeuristicKind::HFf => h_ff(task, s, goal),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            HeuristicKind::HMax => "hmax",
            HeuristicKind::HAdd => "hadd",
            HeuristicKind::HFf => "hff",
        }
    }
}

/// Base-heuristic evaluator with a per-state memo. The memo is sound because
/// the base heuristic is a pure function of the state for a fixed task goal;
/// learned-table lookups are applied on top of the memoized value.
#[derive(Debug)]
pub struct Evaluator {
    kind: HeuristicKind,
    memo: HashMap<State, Estimate>,
}

impl Evaluator {
    pub fn new(kind: HeuristicKind) -> Self {
        Evaluator { kind, memo: HashMap::new() }
    }

    pub fn kind(&self) -> HeuristicKind {
        self.kind
    }

    /// Base estimate toward the task goal.
    pub fn base(&mut self, task: &GroundTask, s: &State) -> Estimate {
        if let Some(&e) = self.memo.get(s) {
            return e;
        }
        let e = self.kind.evaluate(task, s, task.goal());
        self.memo.insert(s.clone(), e);
        e
    }

    /// Base estimate maxed with the learned table entry, if any.
    pub fn effective(&mut self, task: &GroundTask, s: &State, table: &LearnedTable) -> Estimate {
        let base = self.base(task, s);
        table.effective(s, base)
    }

    /// `-(effective estimate)`: the optimistic initial mean for a node.
    /// Zero exactly at goal states, `-inf` at dead ends.
    pub fn heuristic_return(&mut self, task: &GroundTask, s: &State, table: &LearnedTable) -> f64 {
        self.effective(task, s, table).as_return()
    }
}

/// Negated effective distance estimate under the default base heuristic.
pub fn heuristic_return(task: &GroundTask, s: &State, table: &LearnedTable) -> f64 {
    let base = h_max(task, s, task.goal());
    table.effective(s, base).as_return()
}

/// Learned per-state lower bounds. Entries only ever increase; states
/// without an entry fall back to the base heuristic.
#[derive(Debug, Clone, Default)]
pub struct LearnedTable {
    entries: HashMap<State, Estimate>,
}

impl LearnedTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, s: &State) -> Option<Estimate> {
        self.entries.get(s).copied()
    }

    pub fn effective(&self, s: &State, base: Estimate) -> Estimate {
        match self.get(s) {
            Some(learned) => learned.max(base),
            None => base,
        }
    }

    /// The backup rule: raise the stored value to
    /// `max(effective H(s), 1 + min over children)`. An empty child list
    /// marks `s` as a dead end. Returns whether the effective value changed.
    pub fn update(&mut self, s: &State, base: Estimate, children: &[Estimate]) -> bool {
        let current = self.effective(s, base);
        let backed_up = match children.iter().copied().min() {
            Some(best_child) => best_child.plus_one(),
            None => Estimate::DeadEnd,
        };
        if backed_up > current {
            self.entries.insert(s.clone(), backed_up);
            true
        } else {
            false
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&State, Estimate)> {
        self.entries.iter().map(|(s, &e)| (s, e))
    }

    /// Writes `state-digest value` lines, sorted by digest for stable output.
    pub fn dump<W: Write>(&self, w: &mut W) -> io::Result<()> {
        let mut rows: Vec<(u64, Estimate)> =
            self.entries.iter().map(|(s, &e)| (s.digest(), e)).collect();
        rows.sort_unstable();
        for (digest, value) in rows {
            writeln!(w, "{digest:016x} {value}")?;
        }
        Ok(())
    }
}
