//! Baseline action selectors sharing MHSP's interface: anytime A* and
//! breadth-first lookahead. Both are budgeted, keep duplicate detection on,
//! and return an applicable (possibly partial) plan when interrupted.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::time::Duration;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::budget::{Budget, BudgetClock};
use crate::heuristics::{Estimate, Evaluator, LearnedTable};
use crate::pddl::{ActionId, GroundTask, State};
use crate::plan::Plan;

/// What a selector hands back to the agent.
#[derive(Debug, Clone)]
pub struct SelectorResult {
    pub plan: Plan,
    pub nodes_expanded: u64,
    pub time_used: Duration,
    pub reached_goal: bool,
}

/// How A* picks its partial plan on timeout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AstarTimeoutRule {
    /// The path to the most recently expanded node. When only the start was
    /// expanded, that path is empty, so fall back to the cheapest open node.
    #[default]
    LastExpanded,
    /// The path to the minimum-f node still open.
    MinF,
}

/// Min-priority queue with seeded uniform tie-breaking on equal keys.
pub struct OpenList<K: Ord + Copy> {
    heap: BinaryHeap<Reverse<(K, u64, u32)>>,
    rng: ChaCha8Rng,
}

impl<K: Ord + Copy> OpenList<K> {
    pub fn new(seed: u64) -> Self {
        OpenList { heap: BinaryHeap::new(), rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn push(&mut self, key: K, entry: u32) {
        let tie: u64 = self.rng.random();
        self.heap.push(Reverse((key, tie, entry)));
    }

    pub fn pop(&mut self) -> Option<(K, u32)> {
        self.heap.pop().map(|Reverse((k, _, e))| (k, e))
    }

    pub fn peek(&self) -> Option<(K, u32)> {
        self.heap.peek().map(|&Reverse((k, _, e))| (k, e))
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

struct Arena {
    states: Vec<State>,
    parents: Vec<Option<(u32, ActionId)>>,
    depths: Vec<u32>,
}

impl Arena {
    fn new(root: State) -> Self {
        Arena { states: vec![root], parents: vec![None], depths: vec![0] }
    }

    fn push(&mut self, state: State, parent: u32, action: ActionId) -> u32 {
        let id = self.states.len() as u32;
        self.states.push(state);
        self.parents.push(Some((parent, action)));
        self.depths.push(self.depths[parent as usize] + 1);
        id
    }

    fn path_to(&self, mut node: u32) -> Plan {
        let mut actions = Vec::new();
        while let Some((parent, action)) = self.parents[node as usize] {
            actions.push(action);
            node = parent;
        }
        actions.reverse();
        Plan::from_actions(actions)
    }
}

/// Best-first search on `f = depth + effective heuristic`. Expands until the
/// goal is popped or the budget runs out; a budget unit is one expansion,
/// including the start node. On timeout the returned partial plan follows
/// `rule`. The closed map keeps minimal depths and reopens on improvement,
/// which preserves optimality even when the learned overlay breaks
/// consistency.
pub fn astar_select(
    task: &GroundTask,
    start: &State,
    budget: Budget,
    eval: &mut Evaluator,
    table: &LearnedTable,
    seed: u64,
    rule: AstarTimeoutRule,
) -> SelectorResult {
    astar_select_opts(task, start, budget, eval, table, seed, rule, true)
}

/// `astar_select` with duplicate detection switchable. With `dedup` off the
/// search degenerates to a pure tree search that re-expands transpositions,
/// matching how early real-time planners ran A*.
#[allow(clippy::too_many_arguments)]
pub fn astar_select_opts(
    task: &GroundTask,
    start: &State,
    budget: Budget,
    eval: &mut Evaluator,
    table: &LearnedTable,
    seed: u64,
    rule: AstarTimeoutRule,
    dedup: bool,
) -> SelectorResult {
    let mut clock = BudgetClock::start(budget);
    let mut arena = Arena::new(start.clone());
    let mut open: OpenList<u64> = OpenList::new(seed);
    let mut best_depth: HashMap<State, u32> = HashMap::new();

    best_depth.insert(start.clone(), 0);
    match eval.effective(task, start, table) {
        Estimate::Finite(h) => open.push(h as u64, 0),
        Estimate::DeadEnd => {
            // Start can never reach the goal; unless it already satisfies it,
            // nothing useful can be returned.
            return SelectorResult {
                plan: Plan::empty(),
                nodes_expanded: 0,
                time_used: clock.elapsed(),
                reached_goal: task.is_goal(start),
            };
        }
    }

    let mut last_expanded: Option<u32> = None;
    while let Some((_, node)) = open.pop() {
        let state = arena.states[node as usize].clone();
        let depth = arena.depths[node as usize];
        if dedup && best_depth.get(&state).copied() != Some(depth) {
            continue; // superseded by a shallower route
        }
        if clock.exhausted() {
            return timeout_result(&arena, last_expanded, node, rule, clock);
        }
        if task.is_goal(&state) {
            return SelectorResult {
                plan: arena.path_to(node),
                nodes_expanded: clock.used(),
                time_used: clock.elapsed(),
                reached_goal: true,
            };
        }
        clock.spend(1);
        last_expanded = Some(node);
        for (action, succ) in task.successors(&state) {
            let d = depth + 1;
            if !dedup || best_depth.get(&succ).is_none_or(|&old| d < old) {
                let h = match eval.effective(task, &succ, table) {
                    Estimate::Finite(h) => h,
                    Estimate::DeadEnd => continue, // admissible infinity: prune
                };
                if dedup {
                    best_depth.insert(succ.clone(), d);
                }
                let id = arena.push(succ, node, action);
                open.push(d as u64 + h as u64, id);
            }
        }
    }

    // Open exhausted without reaching the goal.
    SelectorResult {
        plan: Plan::empty(),
        nodes_expanded: clock.used(),
        time_used: clock.elapsed(),
        reached_goal: false,
    }
}

fn timeout_result(
    arena: &Arena,
    last_expanded: Option<u32>,
    pending: u32,
    rule: AstarTimeoutRule,
    clock: BudgetClock,
) -> SelectorResult {
    let pick = match rule {
        AstarTimeoutRule::LastExpanded => match last_expanded {
            Some(node) if node != 0 => node,
            // Degenerate: nothing beyond the start was expanded. The popped
            // pending node is the min-f open node.
            _ => pending,
        },
        AstarTimeoutRule::MinF => pending,
    };
    SelectorResult {
        plan: arena.path_to(pick),
        nodes_expanded: clock.used(),
        time_used: clock.elapsed(),
        reached_goal: false,
    }
}

/// Uniform breadth-first lookahead with duplicate detection at generation.
/// Stops when the goal is popped for expansion or the budget runs out; on
/// timeout returns the path to the frontier node with the lowest effective
/// heuristic (ties: shallower depth, then seeded random).
pub fn bfs_select(
    task: &GroundTask,
    start: &State,
    budget: Budget,
    eval: &mut Evaluator,
    table: &LearnedTable,
    seed: u64,
) -> SelectorResult {
    bfs_select_opts(task, start, budget, eval, table, seed, true)
}

/// `bfs_select` with duplicate detection switchable (tree search when off).
pub fn bfs_select_opts(
    task: &GroundTask,
    start: &State,
    budget: Budget,
    eval: &mut Evaluator,
    table: &LearnedTable,
    seed: u64,
    dedup: bool,
) -> SelectorResult {
    let mut clock = BudgetClock::start(budget);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut arena = Arena::new(start.clone());
    let mut seen: HashMap<State, ()> = HashMap::new();
    let mut queue: VecDeque<u32> = VecDeque::new();

    seen.insert(start.clone(), ());
    queue.push_back(0);

    while let Some(node) = queue.pop_front() {
        let state = arena.states[node as usize].clone();
        if clock.exhausted() {
            queue.push_front(node);
            return bfs_timeout(task, &arena, &queue, eval, table, &mut rng, clock);
        }
        if task.is_goal(&state) {
            return SelectorResult {
                plan: arena.path_to(node),
                nodes_expanded: clock.used(),
                time_used: clock.elapsed(),
                reached_goal: true,
            };
        }
        clock.spend(1);
        for (action, succ) in task.successors(&state) {
            if !dedup || !seen.contains_key(&succ) {
                if dedup {
                    seen.insert(succ.clone(), ());
                }
                let id = arena.push(succ, node, action);
                queue.push_back(id);
            }
        }
    }

    SelectorResult {
        plan: Plan::empty(),
        nodes_expanded: clock.used(),
        time_used: clock.elapsed(),
        reached_goal: false,
    }
}

fn bfs_timeout(
    task: &GroundTask,
    arena: &Arena,
    frontier: &VecDeque<u32>,
    eval: &mut Evaluator,
    table: &LearnedTable,
    rng: &mut ChaCha8Rng,
    clock: BudgetClock,
) -> SelectorResult {
    let mut best: Vec<u32> = Vec::new();
    let mut best_key: Option<(Estimate, u32)> = None;
    for &node in frontier {
        let h = eval.effective(task, &arena.states[node as usize], table);
        let key = (h, arena.depths[node as usize]);
        match best_key {
            None => {
                best_key = Some(key);
                best.push(node);
            }
            Some(cur) if key < cur => {
                best_key = Some(key);
                best.clear();
                best.push(node);
            }
            Some(cur) if key == cur => best.push(node),
            _ => {}
        }
    }
    let plan = match best.len() {
        0 => Plan::empty(),
        1 => arena.path_to(best[0]),
        n => arena.path_to(best[rng.random_range(0..n)]),
    };
    SelectorResult {
        plan,
        nodes_expanded: clock.used(),
        time_used: clock.elapsed(),
        reached_goal: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{build_task, gripper};
    use crate::heuristics::HeuristicKind;
    use crate::testutil::{chain_task, fork_task};

    fn fixture() -> (Evaluator, LearnedTable) {
        (Evaluator::new(HeuristicKind::HMax), LearnedTable::new())
    }

    #[test]
    fn astar_on_goal_state_returns_empty_success() {
        let task = chain_task(0);
        let (mut eval, table) = fixture();
        let r = astar_select(
            &task,
            task.s0(),
            Budget::Iterations(100),
            &mut eval,
            &table,
            0,
            AstarTimeoutRule::LastExpanded,
        );
        assert!(r.reached_goal);
        assert!(r.plan.is_empty());
    }

    #[test]
    fn astar_finds_optimal_gripper_plan() {
        let task = build_task(&gripper(2));
        let (mut eval, table) = fixture();
        let r = astar_select(
            &task,
            task.s0(),
            Budget::Iterations(100_000),
            &mut eval,
            &table,
            1,
            AstarTimeoutRule::LastExpanded,
        );
        assert!(r.reached_goal);
        assert_eq!(r.plan.len(), 5);
        assert!(task.is_goal(&r.plan.replay(&task, task.s0()).unwrap()));
    }

    #[test]
    fn astar_single_expansion_returns_one_action_toward_min_f() {
        // Budget 1 expands only the start; the fallback picks the min-f open
        // node, which is a depth-1 successor.
        let task = fork_task(2, 4);
        let (mut eval, table) = fixture();
        let r = astar_select(
            &task,
            task.s0(),
            Budget::Iterations(1),
            &mut eval,
            &table,
            0,
            AstarTimeoutRule::LastExpanded,
        );
        assert!(!r.reached_goal);
        assert_eq!(r.plan.len(), 1);
        assert_eq!(r.nodes_expanded, 1);
        // min f = 1 + 2 on the short branch vs 1 + 4 on the long one
        let next = task.apply(task.s0(), r.plan.actions()[0]).unwrap();
        assert_eq!(eval.base(&task, &next), Estimate::Finite(2));
    }

    #[test]
    fn astar_timeout_returns_last_expanded_path() {
        let task = build_task(&gripper(2));
        let (mut eval, table) = fixture();
        let r = astar_select(
            &task,
            task.s0(),
            Budget::Iterations(10),
            &mut eval,
            &table,
            7,
            AstarTimeoutRule::LastExpanded,
        );
        assert!(!r.reached_goal);
        assert!(r.plan.is_applicable_from(&task, task.s0()));
        assert!(r.nodes_expanded <= 10);
    }

    #[test]
    fn astar_with_no_successors_fails_cleanly() {
        let task = crate::testutil::dead_end_task();
        let (mut eval, table) = fixture();
        let r = astar_select(
            &task,
            task.s0(),
            Budget::Iterations(100),
            &mut eval,
            &table,
            0,
            AstarTimeoutRule::LastExpanded,
        );
        assert!(!r.reached_goal);
        assert!(r.plan.is_empty());
    }

    #[test]
    fn bfs_reaches_depth_one_goal() {
        let task = chain_task(1);
        let (mut eval, table) = fixture();
        let r = bfs_select(&task, task.s0(), Budget::Iterations(100), &mut eval, &table, 0);
        assert!(r.reached_goal);
        assert_eq!(r.plan.len(), 1);
    }

    #[test]
    fn bfs_is_optimal_with_generous_budget() {
        let task = build_task(&gripper(2));
        let (mut eval, table) = fixture();
        let r = bfs_select(&task, task.s0(), Budget::Iterations(1_000_000), &mut eval, &table, 3);
        assert!(r.reached_goal);
        assert_eq!(r.plan.len(), 5);
    }

    #[test]
    fn bfs_timeout_picks_min_h_frontier_node() {
        // One expansion (the start) leaves exactly the depth-1 successors on
        // the frontier; the short branch has the lower heuristic.
        let task = fork_task(2, 4);
        let (mut eval, table) = fixture();
        let r = bfs_select(&task, task.s0(), Budget::Iterations(1), &mut eval, &table, 0);
        assert!(!r.reached_goal);
        assert_eq!(r.plan.len(), 1);
        let next = task.apply(task.s0(), r.plan.actions()[0]).unwrap();
        assert_eq!(eval.base(&task, &next), Estimate::Finite(2));
    }

    #[test]
    fn both_respect_iteration_budgets() {
        let task = build_task(&gripper(2));
        let (mut eval, table) = fixture();
        for budget in [1u64, 5, 25] {
            let a = astar_select(
                &task,
                task.s0(),
                Budget::Iterations(budget),
                &mut eval,
                &table,
                0,
                AstarTimeoutRule::LastExpanded,
            );
            assert!(a.nodes_expanded <= budget);
            let b = bfs_select(&task, task.s0(), Budget::Iterations(budget), &mut eval, &table, 0);
            assert!(b.nodes_expanded <= budget);
        }
    }

    #[test]
    fn partial_plans_replay_from_start() {
        let task = build_task(&gripper(3));
        let (mut eval, table) = fixture();
        for seed in 0..5 {
            for budget in [1u64, 3, 17, 80] {
                let a = astar_select(
                    &task,
                    task.s0(),
                    Budget::Iterations(budget),
                    &mut eval,
                    &table,
                    seed,
                    AstarTimeoutRule::LastExpanded,
                );
                assert!(a.plan.is_applicable_from(&task, task.s0()));
                let m = astar_select(
                    &task,
                    task.s0(),
                    Budget::Iterations(budget),
                    &mut eval,
                    &table,
                    seed,
                    AstarTimeoutRule::MinF,
                );
                assert!(m.plan.is_applicable_from(&task, task.s0()));
                let b = bfs_select(
                    &task,
                    task.s0(),
                    Budget::Iterations(budget),
                    &mut eval,
                    &table,
                    seed,
                );
                assert!(b.plan.is_applicable_from(&task, task.s0()));
            }
        }
    }

    #[test]
    fn both_selectors_are_optimal_with_unlimited_budget() {
        use crate::generator::ferry;
        use crate::oracle::optimal_length;
        let tasks = [
            build_task(&gripper(1)),
            build_task(&gripper(2)),
            build_task(&gripper(3)),
            build_task(&ferry(1)),
            build_task(&ferry(2)),
            fork_task(2, 4),
            chain_task(6),
        ];
        for task in &tasks {
            let optimal = optimal_length(task, task.s0()).unwrap().unwrap() as usize;
            let (mut eval, table) = fixture();
            let a = astar_select(
                task,
                task.s0(),
                Budget::Iterations(2_000_000),
                &mut eval,
                &table,
                9,
                AstarTimeoutRule::LastExpanded,
            );
            assert!(a.reached_goal);
            assert_eq!(a.plan.len(), optimal);
            let b = bfs_select(task, task.s0(), Budget::Iterations(2_000_000), &mut eval, &table, 9);
            assert!(b.reached_goal);
            assert_eq!(b.plan.len(), optimal);
        }
    }

    #[test]
    fn open_list_pops_minimal_keys() {
        let mut open: OpenList<u32> = OpenList::new(5);
        open.push(4, 0);
        open.push(1, 1);
        open.push(3, 2);
        open.push(1, 3);
        let (k1, _) = open.pop().unwrap();
        let (k2, _) = open.pop().unwrap();
        let (k3, _) = open.pop().unwrap();
        let (k4, _) = open.pop().unwrap();
        assert_eq!((k1, k2, k3, k4), (1, 1, 3, 4));
        assert!(open.pop().is_none());
    }

    #[test]
    fn open_list_tie_breaking_is_seeded() {
        let order = |seed: u64| {
            let mut open: OpenList<u32> = OpenList::new(seed);
            for i in 0..20 {
                open.push(7, i);
            }
            let mut out = Vec::new();
            while let Some((_, e)) = open.pop() {
                out.push(e);
            }
            out
        };
        assert_eq!(order(1), order(1));
        assert_ne!(order(1), order(2));
    }
}
