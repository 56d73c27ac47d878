//! Mean-based heuristic search for real-time planning.
//!
//! An anytime best-first tree search in the MCTS mold, with two departures
//! from game-playing practice: leaf evaluation calls a planning heuristic
//! instead of running rollouts, and node means are initialized optimistically
//! from that heuristic, which makes an explicit exploration bonus
//! unnecessary (a UCB policy is still available behind a switch for A/B
//! comparisons). Returns are negated distance estimates, so every mean is at
//! most zero and larger means are better. Backpropagation charges each
//! ancestor an extra unit per level, penalizing depth.
//!
//! The tree is confined to a single thread; duplicate states reached along
//! different paths are kept as distinct nodes (no transposition table).

use std::io::{self, Write};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::budget::{Budget, BudgetClock};
use crate::heuristics::{Evaluator, LearnedTable};
use crate::pddl::{ActionId, GroundTask, State};
use crate::plan::Plan;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelectionPolicy {
    /// Descend through the child maximizing the mean return.
    BestMean,
    /// Descend by mean plus the UCB bias `C * sqrt(ln(parent) / child)`.
    Ucb(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MhspConfig {
    pub seed: u64,
    pub selection: SelectionPolicy,
}

impl Default for MhspConfig {
    fn default() -> Self {
        MhspConfig { seed: 0, selection: SelectionPolicy::BestMean }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MhspError {
    #[error("node already has children; a node is expanded at most once")]
    ExpandedTwice,
    #[error("node has no children to select among")]
    NoChildren,
    #[error("UCB selection over a child with zero visits")]
    UnvisitedChild,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Id of the node at `index` in tree order (the root is 0); valid for
    /// indices below the tree's `len`.
    pub fn from_index(index: usize) -> NodeId {
        NodeId(index as u32)
    }
}

/// One tree node: cumulative return, visit count, and tree links.
#[derive(Debug, Clone)]
pub struct SearchNode {
    state: State,
    parent: Option<NodeId>,
    action_in: Option<ActionId>,
    children: Vec<NodeId>,
    return_sum: f64,
    visits: u64,
}

impl SearchNode {
    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn parent(&self) -> Option<NodeId> {
        self.parent
    }

    pub fn action_in(&self) -> Option<ActionId> {
        self.action_in
    }

    pub fn children(&self) -> &[NodeId] {
        &self.children
    }

    pub fn return_sum(&self) -> f64 {
        self.return_sum
    }

    pub fn visits(&self) -> u64 {
        self.visits
    }

    pub fn mean(&self) -> f64 {
        self.return_sum / self.visits as f64
    }
}

/// Result of expanding a leaf.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expansion {
    /// Child with the best initial return; `None` when the leaf had no
    /// applicable action.
    pub chosen: Option<NodeId>,
    /// The return to backpropagate: the chosen child's initial value, or the
    /// pessimistic default when nothing was applicable.
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    /// Selection reached a goal node; reward 0 was backpropagated and the
    /// incumbent solution was replaced if the new plan is strictly shorter.
    GoalReached { node: NodeId, length: usize, improved: bool },
    Expanded { node: NodeId, children: usize, reward: f64 },
    /// The selected leaf has no applicable action.
    DeadEnd { node: NodeId, reward: f64 },
}

pub struct MhspTree<'a> {
    task: &'a GroundTask,
    eval: &'a mut Evaluator,
    table: &'a LearnedTable,
    nodes: Vec<SearchNode>,
    rng: ChaCha8Rng,
    seed: u64,
    config: MhspConfig,
    best_solution: Option<Plan>,
    iterations: u64,
}

impl<'a> MhspTree<'a> {
    pub const ROOT: NodeId = NodeId(0);

    /// Tree rooted at the task's initial state.
    pub fn new(
        task: &'a GroundTask,
        eval: &'a mut Evaluator,
        table: &'a LearnedTable,
        config: MhspConfig,
    ) -> Self {
        Self::with_root(task, task.s0().clone(), eval, table, config)
    }

    /// Tree rooted at an arbitrary state (the agent's current state).
    pub fn with_root(
        task: &'a GroundTask,
        root: State,
        eval: &'a mut Evaluator,
        table: &'a LearnedTable,
        config: MhspConfig,
    ) -> Self {
        let initial_return = eval.heuristic_return(task, &root, table);
        let root_node = SearchNode {
            state: root,
            parent: None,
            action_in: None,
            children: Vec::new(),
            return_sum: initial_return,
            visits: 1,
        };
        MhspTree {
            task,
            eval,
            table,
            nodes: vec![root_node],
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            seed: config.seed,
            config,
            best_solution: None,
            iterations: 0,
        }
    }

    pub fn root(&self) -> NodeId {
        Self::ROOT
    }

    pub fn node(&self, id: NodeId) -> &SearchNode {
        &self.nodes[id.index()]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn best_solution(&self) -> Option<&Plan> {
        self.best_solution.as_ref()
    }

    pub fn task(&self) -> &GroundTask {
        self.task
    }

    /// Descends from the root through the configured policy until reaching a
    /// node that satisfies the goal or has never been backed up through
    /// (visit count one). Ties break uniformly at random from the tree's
    /// seeded generator.
    pub fn select_leaf(&mut self) -> NodeId {
        let mut cur = Self::ROOT;
        loop {
            let n = &self.nodes[cur.index()];
            if self.task.is_goal(&n.state) || n.visits == 1 || n.children.is_empty() {
                return cur;
            }
            let nodes = &self.nodes;
            let rng = &mut self.rng;
            let children = &nodes[cur.index()].children;
            cur = match self.config.selection {
                SelectionPolicy::BestMean => {
                    argmax(children, |id| nodes[id.index()].mean(), rng)
                }
                SelectionPolicy::Ucb(c) => {
                    argmax(children, |id| ucb_value(nodes, cur, id, c), rng)
                }
            }
            .expect("internal nodes have children");
        }
    }

    /// The pessimistic fallback return: the root mean plus one.
    pub fn default_reward(&self) -> f64 {
        self.nodes[Self::ROOT.index()].mean() + 1.0
    }

    /// Creates one child per applicable action, each initialized with its
    /// negated heuristic estimate and one visit. Returns the child with the
    /// best initial return (ties seeded-random), or the pessimistic default
    /// when no action applies.
    pub fn expand(&mut self, leaf: NodeId) -> Result<Expansion, MhspError> {
        if !self.nodes[leaf.index()].children.is_empty() {
            return Err(MhspError::ExpandedTwice);
        }
        debug_assert!(
            !self.task.is_goal(&self.nodes[leaf.index()].state),
            "goal nodes are never expanded"
        );
        let state = self.nodes[leaf.index()].state.clone();
        let mut child_ids = Vec::new();
        for action in self.task.applicable_actions(&state) {
            let child_state = self.task.apply_unchecked(&state, action);
            let initial = self.eval.heuristic_return(self.task, &child_state, self.table);
            let id = NodeId(self.nodes.len() as u32);
            self.nodes.push(SearchNode {
                state: child_state,
                parent: Some(leaf),
                action_in: Some(action),
                children: Vec::new(),
                return_sum: initial,
                visits: 1,
            });
            child_ids.push(id);
        }
        self.nodes[leaf.index()].children = child_ids;

        let children = &self.nodes[leaf.index()].children;
        if children.is_empty() {
            return Ok(Expansion { chosen: None, reward: self.default_reward() });
        }
        let nodes = &self.nodes;
        let chosen = argmax(children, |id| nodes[id.index()].return_sum, &mut self.rng)
            .expect("nonempty children");
        Ok(Expansion { chosen: Some(chosen), reward: self.nodes[chosen.index()].return_sum })
    }

    /// Walks from `from`'s parent up to and including the root, adding
    /// `reward - i` to each ancestor's cumulative return (i counts levels
    /// climbed) and bumping its visit count. `from` itself is not touched.
    pub fn backpropagate(&mut self, from: NodeId, reward: f64) {
        let mut cur = from;
        let mut depth_penalty = 0.0;
        while let Some(parent) = self.nodes[cur.index()].parent {
            let n = &mut self.nodes[parent.index()];
            n.return_sum += reward - depth_penalty;
            n.visits += 1;
            depth_penalty += 1.0;
            cur = parent;
        }
    }

    /// One search iteration: select, evaluate-or-expand, backpropagate.
    pub fn step(&mut self) -> StepOutcome {
        let leaf = self.select_leaf();
        let outcome = if self.task.is_goal(&self.nodes[leaf.index()].state) {
            let plan = self.solution_plan_to(leaf);
            let length = plan.len();
            let improved = match &self.best_solution {
                Some(best) => length < best.len(),
                None => true,
            };
            if improved {
                self.best_solution = Some(plan);
            }
            self.backpropagate(leaf, 0.0);
            StepOutcome::GoalReached { node: leaf, length, improved }
        } else {
            let expansion = self.expand(leaf).expect("selected leaves are unexpanded");
            match expansion.chosen {
                Some(chosen) => {
                    self.backpropagate(chosen, expansion.reward);
                    StepOutcome::Expanded {
                        node: leaf,
                        children: self.nodes[leaf.index()].children.len(),
                        reward: expansion.reward,
                    }
                }
                None => {
                    self.backpropagate(leaf, expansion.reward);
                    StepOutcome::DeadEnd { node: leaf, reward: expansion.reward }
                }
            }
        };
        self.iterations += 1;
        outcome
    }

    /// The anytime loop: iterate until the budget runs out, keeping the
    /// shortest solution plan seen. Returns that plan, or the most-visited
    /// partial plan when no solution was found.
    pub fn run(&mut self, budget: Budget) -> Plan {
        let mut clock = BudgetClock::start(budget);
        while !clock.exhausted() {
            self.step();
            clock.spend(1);
            // A zero-length incumbent (goal at the root) cannot improve.
            if self.best_solution.as_ref().is_some_and(|p| p.is_empty()) {
                break;
            }
        }
        match &self.best_solution {
            Some(plan) => plan.clone(),
            None => self.most_visited_plan(),
        }
    }

    /// The action path from the root to `node`.
    pub fn solution_plan_to(&self, node: NodeId) -> Plan {
        let mut actions = Vec::new();
        let mut cur = node;
        while let Some(parent) = self.nodes[cur.index()].parent {
            actions.push(self.nodes[cur.index()].action_in.expect("non-root nodes have actions"));
            cur = parent;
        }
        actions.reverse();
        Plan::from_actions(actions)
    }

    /// Fallback plan reconstruction: descend by visit count (ties: mean,
    /// then seeded random), stopping at a childless node. Highly visited
    /// prefixes have been tried many times and are the robust choice.
    pub fn most_visited_plan(&mut self) -> Plan {
        let mut actions = Vec::new();
        let mut cur = Self::ROOT;
        loop {
            if self.nodes[cur.index()].children.is_empty() {
                break;
            }
            let nodes = &self.nodes;
            let children = &nodes[cur.index()].children;
            let max_visits = children.iter().map(|c| nodes[c.index()].visits).max().unwrap();
            let best: Vec<NodeId> = children
                .iter()
                .copied()
                .filter(|c| nodes[c.index()].visits == max_visits)
                .collect();
            let next = argmax(&best, |id| nodes[id.index()].mean(), &mut self.rng)
                .expect("nonempty candidate set");
            actions.push(self.nodes[next.index()].action_in.unwrap());
            cur = next;
        }
        Plan::from_actions(actions)
    }

    /// UCB child selection (natural logarithm), using the tree's generator
    /// for ties. With `c = 0` this reduces to best-mean selection.
    pub fn ucb_select(&mut self, node: NodeId, c: f64) -> Result<NodeId, MhspError> {
        let nodes = &self.nodes;
        let rng = &mut self.rng;
        Self::ucb_pick(nodes, node, c, rng)
    }

    /// UCB selection with a caller-supplied generator, for comparing
    /// policies under identical tie-break streams.
    pub fn ucb_choice_with(
        &self,
        node: NodeId,
        c: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<NodeId, MhspError> {
        Self::ucb_pick(&self.nodes, node, c, rng)
    }

    /// Best-mean selection with a caller-supplied generator.
    pub fn mean_choice_with(&self, node: NodeId, rng: &mut ChaCha8Rng) -> Option<NodeId> {
        let nodes = &self.nodes;
        argmax(&nodes[node.index()].children, |id| nodes[id.index()].mean(), rng)
    }

    fn ucb_pick(
        nodes: &[SearchNode],
        node: NodeId,
        c: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<NodeId, MhspError> {
        let children = &nodes[node.index()].children;
        if children.is_empty() {
            return Err(MhspError::NoChildren);
        }
        if children.iter().any(|ch| nodes[ch.index()].visits == 0) {
            return Err(MhspError::UnvisitedChild);
        }
        Ok(argmax(children, |id| ucb_value(nodes, node, id, c), rng).unwrap())
    }

    /// Writes one node per line (`depth digest return visits mean children`),
    /// depth-first in child order, down to `max_depth`.
    pub fn dump<W: Write>(&self, w: &mut W, max_depth: usize) -> io::Result<()> {
        let mut stack = vec![(Self::ROOT, 0usize)];
        while let Some((id, depth)) = stack.pop() {
            let n = &self.nodes[id.index()];
            writeln!(
                w,
                "{depth} {:016x} {:.6} {} {:.6} {}",
                n.state.digest(),
                n.return_sum,
                n.visits,
                n.mean(),
                n.children.len()
            )?;
            if depth < max_depth {
                for &child in n.children.iter().rev() {
                    stack.push((child, depth + 1));
                }
            }
        }
        Ok(())
    }
}

fn ucb_value(nodes: &[SearchNode], parent: NodeId, child: NodeId, c: f64) -> f64 {
    let p = nodes[parent.index()].visits as f64;
    let n = &nodes[child.index()];
    n.mean() + c * (p.ln() / n.visits as f64).sqrt()
}

/// Argmax with uniform random tie-breaking; `None` on an empty slice.
fn argmax<F: Fn(NodeId) -> f64>(ids: &[NodeId], key: F, rng: &mut ChaCha8Rng) -> Option<NodeId> {
    let mut ties: Vec<NodeId> = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for &id in ids {
        let k = key(id);
        debug_assert!(!k.is_nan());
        if ties.is_empty() || k > best {
            best = k;
            ties.clear();
            ties.push(id);
        } else if k == best {
            ties.push(id);
        }
    }
    match ties.len() {
        0 => None,
        1 => Some(ties[0]),
        n => Some(ties[rng.random_range(0..n)]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{build_task, gripper};
    use crate::heuristics::HeuristicKind;
    use crate::testutil::{chain_task, dead_end_task, fork_task};

    fn fixture() -> (Evaluator, LearnedTable) {
        (Evaluator::new(HeuristicKind::HMax), LearnedTable::new())
    }

    #[test]
    fn root_is_zero_when_goal_satisfied() {
        let task = chain_task(0);
        let (mut eval, table) = fixture();
        let tree = MhspTree::new(&task, &mut eval, &table, MhspConfig::default());
        assert_eq!(tree.node(tree.root()).return_sum(), 0.0);
        assert_eq!(tree.node(tree.root()).visits(), 1);
    }

    #[test]
    fn root_initialized_with_negated_estimate() {
        let task = build_task(&gripper(5));
        let (mut eval, table) = fixture();
        let tree = MhspTree::new(&task, &mut eval, &table, MhspConfig::default());
        // h_max(s0) = 2 on gripper instances (every goal fact at relaxed
        // layer 2), so the optimistic initial mean is -2.
        assert_eq!(tree.node(tree.root()).return_sum(), -2.0);
        assert!(tree.node(tree.root()).parent().is_none());
        assert!(tree.node(tree.root()).action_in().is_none());
    }

    #[test]
    fn dead_end_root_gets_neg_infinity() {
        let task = chain_task_with_unreachable_goal();
        let (mut eval, table) = fixture();
        let tree = MhspTree::new(&task, &mut eval, &table, MhspConfig::default());
        assert_eq!(tree.node(tree.root()).return_sum(), f64::NEG_INFINITY);
    }

    fn chain_task_with_unreachable_goal() -> GroundTask {
        let dom = crate::pddl::parse_domain("(define (domain d) (:predicates (p) (q)))").unwrap();
        let prob = crate::pddl::parse_problem(
            "(define (problem x) (:domain d) (:init (p)) (:goal (q)))",
            &dom,
        )
        .unwrap();
        crate::pddl::ground(&dom, &prob)
    }

    #[test]
    fn fresh_tree_selects_root() {
        let task = chain_task(3);
        let (mut eval, table) = fixture();
        let mut tree = MhspTree::new(&task, &mut eval, &table, MhspConfig::default());
        assert_eq!(tree.select_leaf(), tree.root());
    }

    #[test]
    fn selection_descends_through_best_mean() {
        // Fork: branch a needs 2 more steps, branch b needs 4.
        let task = fork_task(2, 4);
        let (mut eval, table) = fixture();
        let mut tree = MhspTree::new(&task, &mut eval, &table, MhspConfig::default());
        let exp = tree.expand(tree.root()).unwrap();
        tree.backpropagate(exp.chosen.unwrap(), exp.reward);
        // Root now visited twice; children means are -2 (a) and -4 (b).
        let leaf = tree.select_leaf();
        let into_a = exp.chosen.unwrap();
        assert_eq!(leaf, into_a);
        assert_eq!(tree.node(into_a).mean(), -2.0);
    }

    #[test]
    fn selection_descends_two_levels_deterministically() {
        // No ties anywhere: root -> short branch -> its grandchild.
        let task = fork_task(3, 5);
        let (mut eval, table) = fixture();
        let mut tree =
            MhspTree::new(&task, &mut eval, &table, MhspConfig { seed: 1, ..Default::default() });
        let a = tree.expand(tree.root()).unwrap().chosen.unwrap();
        tree.backpropagate(a, tree.node(a).return_sum());
        let ga = tree.expand(a).unwrap().chosen.unwrap();
        tree.backpropagate(ga, tree.node(ga).return_sum());
        // Root (v=3) -> a (mean -2.5 vs sibling -5) -> ga (v=1, stop).
        assert_eq!(tree.select_leaf(), ga);
    }

    #[test]
    fn default_reward_is_root_mean_plus_one() {
        let task = chain_task(3);
        let (mut eval, table) = fixture();
        let mut tree = MhspTree::new(&task, &mut eval, &table, MhspConfig::default());
        assert_eq!(tree.default_reward(), -2.0); // R = -3, V = 1

        // Drive R/V to -10/4 through manual backpropagation.
        let exp = tree.expand(tree.root()).unwrap();
        let child = exp.chosen.unwrap();
        tree.backpropagate(child, -3.0); // root: R -6, V 2
        tree.backpropagate(child, -2.0); // root: R -8, V 3
        tree.backpropagate(child, -2.0); // root: R -10, V 4
        assert_eq!(tree.node(tree.root()).return_sum(), -10.0);
        assert_eq!(tree.node(tree.root()).visits(), 4);
        assert_eq!(tree.default_reward(), -1.5);
    }

    #[test]
    fn expansion_creates_one_child_per_applicable_action() {
        let task = build_task(&gripper(2));
        let (mut eval, table) = fixture();
        let mut tree = MhspTree::new(&task, &mut eval, &table, MhspConfig::default());
        let exp = tree.expand(tree.root()).unwrap();
        // At s0: 1 move + 4 picks are applicable.
        assert_eq!(tree.node(tree.root()).children().len(), 5);
        assert!(exp.chosen.is_some());
        for &c in tree.node(tree.root()).children() {
            assert_eq!(tree.node(c).visits(), 1);
            assert_eq!(tree.node(c).parent(), Some(tree.root()));
        }
    }

    #[test]
    fn expansion_chooses_max_initial_return() {
        let task = fork_task(2, 4);
        let (mut eval, table) = fixture();
        let mut tree = MhspTree::new(&task, &mut eval, &table, MhspConfig::default());
        let exp = tree.expand(tree.root()).unwrap();
        let chosen = exp.chosen.unwrap();
        assert_eq!(tree.node(chosen).return_sum(), -2.0);
        assert_eq!(exp.reward, -2.0);
    }

    #[test]
    fn expanding_twice_is_an_error() {
        let task = chain_task(2);
        let (mut eval, table) = fixture();
        let mut tree = MhspTree::new(&task, &mut eval, &table, MhspConfig::default());
        tree.expand(tree.root()).unwrap();
        assert_eq!(tree.expand(tree.root()), Err(MhspError::ExpandedTwice));
    }

    #[test]
    fn backpropagation_skips_origin_and_updates_root() {
        let task = chain_task(4);
        let (mut eval, table) = fixture();
        let mut tree = MhspTree::new(&task, &mut eval, &table, MhspConfig::default());
        let exp = tree.expand(tree.root()).unwrap();
        let child = exp.chosen.unwrap();
        let (root_r, root_v) = (tree.node(tree.root()).return_sum(), tree.node(tree.root()).visits());
        let (child_r, child_v) = (tree.node(child).return_sum(), tree.node(child).visits());

        tree.backpropagate(child, -2.0);
        assert_eq!(tree.node(tree.root()).return_sum(), root_r - 2.0);
        assert_eq!(tree.node(tree.root()).visits(), root_v + 1);
        assert_eq!(tree.node(child).return_sum(), child_r);
        assert_eq!(tree.node(child).visits(), child_v);
    }

    #[test]
    fn backpropagation_applies_depth_penalty() {
        // Build a path root -> n1 -> n2 -> n3 on a chain task.
        let task = chain_task(5);
        let (mut eval, table) = fixture();
        let mut tree = MhspTree::new(&task, &mut eval, &table, MhspConfig::default());
        let n1 = tree.expand(tree.root()).unwrap().chosen.unwrap();
        tree.backpropagate(n1, tree.node(n1).return_sum());
        let n2 = tree.expand(n1).unwrap().chosen.unwrap();
        tree.backpropagate(n2, tree.node(n2).return_sum());
        let n3 = tree.expand(n2).unwrap().chosen.unwrap();
        tree.backpropagate(n3, tree.node(n3).return_sum());

        let before: Vec<(f64, u64)> = [tree.root(), n1, n2, n3]
            .iter()
            .map(|&id| (tree.node(id).return_sum(), tree.node(id).visits()))
            .collect();
        tree.backpropagate(n3, 0.0);
        // n2 gets 0-0, n1 gets 0-1, root gets 0-2; n3 untouched.
        assert_eq!(tree.node(n3).return_sum(), before[3].0);
        assert_eq!(tree.node(n3).visits(), before[3].1);
        assert_eq!(tree.node(n2).return_sum(), before[2].0);
        assert_eq!(tree.node(n2).visits(), before[2].1 + 1);
        assert_eq!(tree.node(n1).return_sum(), before[1].0 - 1.0);
        assert_eq!(tree.node(n1).visits(), before[1].1 + 1);
        assert_eq!(tree.node(tree.root()).return_sum(), before[0].0 - 2.0);
        assert_eq!(tree.node(tree.root()).visits(), before[0].1 + 1);
    }

    #[test]
    fn backpropagating_from_root_changes_nothing() {
        let task = chain_task(2);
        let (mut eval, table) = fixture();
        let mut tree = MhspTree::new(&task, &mut eval, &table, MhspConfig::default());
        let before = (tree.node(tree.root()).return_sum(), tree.node(tree.root()).visits());
        tree.backpropagate(tree.root(), -42.0);
        assert_eq!((tree.node(tree.root()).return_sum(), tree.node(tree.root()).visits()), before);
    }

    #[test]
    fn run_on_goal_root_returns_empty_plan() {
        let task = chain_task(0);
        let (mut eval, table) = fixture();
        let mut tree = MhspTree::new(&task, &mut eval, &table, MhspConfig::default());
        // Degenerate case: the loop exits before the default reward is used.
        assert_eq!(tree.default_reward(), 1.0);
        let plan = tree.run(Budget::Iterations(50));
        assert!(plan.is_empty());
        assert!(tree.best_solution().is_some());
    }

    #[test]
    fn run_finds_optimal_plan_on_gripper_two() {
        let task = build_task(&gripper(2));
        let (mut eval, table) = fixture();
        let mut tree =
            MhspTree::new(&task, &mut eval, &table, MhspConfig { seed: 7, ..Default::default() });
        let plan = tree.run(Budget::Iterations(20_000));
        assert_eq!(plan.len(), 5);
        assert!(task.is_goal(&plan.replay(&task, task.s0()).unwrap()));
    }

    #[test]
    fn tiny_budget_returns_applicable_partial_plan() {
        let task = build_task(&gripper(2));
        let (mut eval, table) = fixture();
        let mut tree = MhspTree::new(&task, &mut eval, &table, MhspConfig::default());
        let plan = tree.run(Budget::Iterations(3));
        assert!(tree.best_solution().is_none());
        assert!(plan.is_applicable_from(&task, task.s0()));
    }

    #[test]
    fn zero_budget_returns_empty_plan() {
        let task = build_task(&gripper(2));
        let (mut eval, table) = fixture();
        let mut tree = MhspTree::new(&task, &mut eval, &table, MhspConfig::default());
        let plan = tree.run(Budget::Iterations(0));
        assert!(plan.is_empty());
    }

    #[test]
    fn solution_plan_walks_parent_chain() {
        let task = chain_task(3);
        let (mut eval, table) = fixture();
        let mut tree = MhspTree::new(&task, &mut eval, &table, MhspConfig::default());
        let n1 = tree.expand(tree.root()).unwrap().chosen.unwrap();
        tree.backpropagate(n1, tree.node(n1).return_sum());
        let n2 = tree.expand(n1).unwrap().chosen.unwrap();
        tree.backpropagate(n2, tree.node(n2).return_sum());
        let n3 = tree.expand(n2).unwrap().chosen.unwrap();

        assert_eq!(tree.solution_plan_to(tree.root()).len(), 0);
        assert_eq!(tree.solution_plan_to(n1).len(), 1);
        let plan = tree.solution_plan_to(n3);
        assert_eq!(plan.len(), 3);
        assert!(plan.is_applicable_from(&task, task.s0()));
    }

    #[test]
    fn most_visited_plan_on_fresh_tree_is_empty() {
        let task = chain_task(3);
        let (mut eval, table) = fixture();
        let mut tree = MhspTree::new(&task, &mut eval, &table, MhspConfig::default());
        assert!(tree.most_visited_plan().is_empty());
    }

    #[test]
    fn most_visited_plan_follows_visit_counts() {
        let task = fork_task(3, 3);
        let (mut eval, table) = fixture();
        let mut tree = MhspTree::new(&task, &mut eval, &table, MhspConfig::default());
        tree.expand(tree.root()).unwrap();
        let children: Vec<NodeId> = tree.node(tree.root()).children().to_vec();
        let (a, b) = (children[0], children[1]);
        // Give `a` more traffic than `b` by backing up from below it.
        let ga = tree.expand(a).unwrap().chosen.unwrap();
        for _ in 0..4 {
            tree.backpropagate(ga, -1.0); // bumps a (and root)
        }
        let gb = tree.expand(b).unwrap().chosen.unwrap();
        tree.backpropagate(gb, -1.0);
        assert!(tree.node(a).visits() > tree.node(b).visits());
        let plan = tree.most_visited_plan();
        assert_eq!(plan.actions()[0], tree.node(a).action_in().unwrap());
    }

    #[test]
    fn ucb_with_zero_bias_matches_mean_choice() {
        let task = build_task(&gripper(2));
        let (mut eval, table) = fixture();
        let mut tree =
            MhspTree::new(&task, &mut eval, &table, MhspConfig { seed: 3, ..Default::default() });
        for _ in 0..50 {
            tree.step();
        }
        let mut rng_a = ChaCha8Rng::seed_from_u64(99);
        let mut rng_b = ChaCha8Rng::seed_from_u64(99);
        let by_mean = tree.mean_choice_with(tree.root(), &mut rng_a).unwrap();
        let by_ucb = tree.ucb_choice_with(tree.root(), 0.0, &mut rng_b).unwrap();
        assert_eq!(by_mean, by_ucb);
    }

    #[test]
    fn ucb_bias_can_flip_the_choice() {
        // Two children: mean -2 visited 10 times, mean -3 visited once,
        // parent visits 11. With C = 2 the rarely tried child wins:
        // -3 + 2*sqrt(ln 11 / 1) > -2 + 2*sqrt(ln 11 / 10).
        let task = fork_task(2, 3);
        let (mut eval, table) = fixture();
        let mut tree = MhspTree::new(&task, &mut eval, &table, MhspConfig::default());
        tree.expand(tree.root()).unwrap();
        let children: Vec<NodeId> = tree.node(tree.root()).children().to_vec();
        let (a, b) = (children[0], children[1]);
        assert_eq!(tree.node(a).return_sum(), -2.0);
        assert_eq!(tree.node(b).return_sum(), -3.0);
        let ga = tree.expand(a).unwrap().chosen.unwrap();
        // Nine backups keep a's mean at -2 and lift its visits to 10. One
        // more backup from b itself touches only the root (the origin node
        // is skipped), bringing the parent to 11 visits while b stays at 1.
        for _ in 0..9 {
            tree.backpropagate(ga, -2.0);
        }
        tree.backpropagate(b, -2.0);
        assert_eq!(tree.node(b).visits(), 1);
        assert_eq!(tree.node(a).visits(), 10);
        assert_eq!(tree.node(a).mean(), -2.0);
        assert_eq!(tree.node(tree.root()).visits(), 11);

        let mean_pick = tree.mean_choice_with(tree.root(), &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(mean_pick, a);
        let ucb_pick = tree.ucb_select(tree.root(), 2.0).unwrap();
        assert_eq!(ucb_pick, b);
    }

    #[test]
    fn ucb_on_childless_node_is_an_error() {
        let task = chain_task(2);
        let (mut eval, table) = fixture();
        let mut tree = MhspTree::new(&task, &mut eval, &table, MhspConfig::default());
        assert_eq!(tree.ucb_select(tree.root(), 1.0), Err(MhspError::NoChildren));
    }

    #[test]
    fn single_child_is_always_selected() {
        let task = chain_task(3);
        let (mut eval, table) = fixture();
        let mut tree = MhspTree::new(&task, &mut eval, &table, MhspConfig::default());
        tree.expand(tree.root()).unwrap();
        let only = tree.node(tree.root()).children()[0];
        assert_eq!(tree.ucb_select(tree.root(), 2.0).unwrap(), only);
    }

    #[test]
    fn dead_end_step_uses_default_reward() {
        let task = dead_end_task();
        let (mut eval, table) = fixture();
        let mut tree =
            MhspTree::new(&task, &mut eval, &table, MhspConfig { seed: 5, ..Default::default() });
        let mut saw_dead_end = false;
        for _ in 0..30 {
            let expected_default = tree.default_reward();
            if let StepOutcome::DeadEnd { reward, .. } = tree.step() {
                assert_eq!(reward, expected_default);
                saw_dead_end = true;
            }
        }
        assert!(saw_dead_end, "the trap branch must be expanded at least once");
    }

    #[test]
    fn root_visits_track_iterations_under_run() {
        let task = build_task(&gripper(2));
        let (mut eval, table) = fixture();
        let mut tree =
            MhspTree::new(&task, &mut eval, &table, MhspConfig { seed: 11, ..Default::default() });
        for total in [1u64, 10, 100, 500] {
            while tree.iterations() < total {
                tree.step();
            }
            assert_eq!(tree.node(tree.root()).visits(), 1 + total);
        }
    }

    #[test]
    fn equal_seeds_give_identical_trees() {
        let task = build_task(&gripper(2));
        let dump = |seed: u64| {
            let (mut eval, table) = fixture();
            let mut tree =
                MhspTree::new(&task, &mut eval, &table, MhspConfig { seed, ..Default::default() });
            let plan = tree.run(Budget::Iterations(400));
            let mut out = Vec::new();
            tree.dump(&mut out, usize::MAX).unwrap();
            (plan, out)
        };
        let (plan_a, dump_a) = dump(42);
        let (plan_b, dump_b) = dump(42);
        assert_eq!(plan_a, plan_b);
        assert_eq!(dump_a, dump_b);
        let (_, dump_c) = dump(43);
        assert_ne!(dump_a, dump_c, "different seeds should explore differently");
    }

    #[test]
    fn incumbent_length_never_increases() {
        let task = build_task(&gripper(2));
        let (mut eval, table) = fixture();
        let mut tree =
            MhspTree::new(&task, &mut eval, &table, MhspConfig { seed: 2, ..Default::default() });
        let mut last = usize::MAX;
        for _ in 0..5_000 {
            tree.step();
            if let Some(p) = tree.best_solution() {
                assert!(p.len() <= last);
                last = p.len();
            }
        }
        assert_eq!(last, 5);
    }

    #[test]
    fn means_stay_nonpositive_on_dead_end_free_tasks() {
        let task = build_task(&gripper(2));
        let (mut eval, table) = fixture();
        let mut tree =
            MhspTree::new(&task, &mut eval, &table, MhspConfig { seed: 9, ..Default::default() });
        for _ in 0..2_000 {
            tree.step();
        }
        for i in 0..tree.len() {
            let n = tree.node(NodeId(i as u32));
            assert!(n.mean() <= 0.0, "mean {} at node {i}", n.mean());
            assert!(n.return_sum().is_finite());
            assert!(n.visits() >= 1);
        }
    }

    #[test]
    fn tree_shape_is_consistent() {
        let task = build_task(&gripper(2));
        let (mut eval, table) = fixture();
        let mut tree =
            MhspTree::new(&task, &mut eval, &table, MhspConfig { seed: 4, ..Default::default() });
        for _ in 0..500 {
            tree.step();
        }
        let mut seen_as_child = vec![0u32; tree.len()];
        for i in 0..tree.len() {
            let id = NodeId(i as u32);
            for &c in tree.node(id).children() {
                assert_eq!(tree.node(c).parent(), Some(id));
                seen_as_child[c.index()] += 1;
            }
        }
        assert_eq!(seen_as_child[0], 0);
        assert!(seen_as_child[1..].iter().all(|&n| n == 1), "every non-root node has one parent");
    }
}
