//! Exact offline planning used for evaluation metrics and as the ground
//! truth behind tests. Runs without a time budget, bounded only by a node
//! cap; strictly desk-scale.

use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::cmp::Reverse;

use thiserror::Error;

use crate::heuristics::{h_max, Estimate};
use crate::pddl::{GroundTask, State};
use crate::plan::Plan;

pub const DEFAULT_NODE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("state cap of {cap} nodes exceeded")]
    ResourceLimit { cap: usize },
    #[error("partial plan is not applicable at step {step}")]
    PlanNotApplicable { step: usize },
    #[error("goal unreachable where a finite distance is required")]
    UnreachableGoal,
}

/// Exact shortest plan length from `from` to the task goal; `None` when the
/// goal is unreachable. A* over the state graph with the admissible `h_max`.
pub fn optimal_length(task: &GroundTask, from: &State) -> Result<Option<u32>, OracleError> {
    optimal_length_capped(task, from, DEFAULT_NODE_CAP)
}

pub fn optimal_length_capped(
    task: &GroundTask,
    from: &State,
    cap: usize,
) -> Result<Option<u32>, OracleError> {
    if task.is_goal(from) {
        return Ok(Some(0));
    }
    let mut best_g: HashMap<State, u32> = HashMap::new();
    let mut open: BinaryHeap<Reverse<(u32, u32)>> = BinaryHeap::new();
    let mut states: Vec<State> = Vec::new();

    let h0 = match h_max(task, from, task.goal()) {
        Estimate::Finite(v) => v,
        Estimate::DeadEnd => return Ok(None),
    };
    states.push(from.clone());
    best_g.insert(from.clone(), 0);
    open.push(Reverse((h0, 0)));

    let mut gs: Vec<u32> = vec![0];
    while let Some(Reverse((_, idx))) = open.pop() {
        let state = states[idx as usize].clone();
        let g = gs[idx as usize];
        if best_g.get(&state).copied() != Some(g) {
            continue; // stale entry
        }
        if task.is_goal(&state) {
            return Ok(Some(g));
        }
        for (_, succ) in task.successors(&state) {
            let g2 = g + 1;
            if best_g.get(&succ).is_none_or(|&old| g2 < old) {
                if states.len() >= cap {
                    return Err(OracleError::ResourceLimit { cap });
                }
                best_g.insert(succ.clone(), g2);
                let h = match h_max(task, &succ, task.goal()) {
                    Estimate::Finite(v) => v,
                    Estimate::DeadEnd => continue,
                };
                states.push(succ);
                gs.push(g2);
                open.push(Reverse((g2 + h, (states.len() - 1) as u32)));
            }
        }
    }
    Ok(None)
}

/// Heuristic-free breadth-first route to the same quantity; an independent
/// cross-check for [`optimal_length`].
pub fn optimal_length_bfs(
    task: &GroundTask,
    from: &State,
    cap: usize,
) -> Result<Option<u32>, OracleError> {
    let mut dist: HashMap<State, u32> = HashMap::new();
    let mut queue: VecDeque<State> = VecDeque::new();
    dist.insert(from.clone(), 0);
    queue.push_back(from.clone());
    while let Some(state) = queue.pop_front() {
        let d = dist[&state];
        if task.is_goal(&state) {
            return Ok(Some(d));
        }
        for (_, succ) in task.successors(&state) {
            if !dist.contains_key(&succ) {
                if dist.len() >= cap {
                    return Err(OracleError::ResourceLimit { cap });
                }
                dist.insert(succ.clone(), d + 1);
                queue.push_back(succ);
            }
        }
    }
    Ok(None)
}

/// Every state reachable from `from`, in breadth-first discovery order.
pub fn reachable_states(task: &GroundTask, from: &State, cap: usize) -> Result<Vec<State>, OracleError> {
    let mut seen: HashMap<State, usize> = HashMap::new();
    let mut order: Vec<State> = Vec::new();
    seen.insert(from.clone(), 0);
    order.push(from.clone());
    let mut at = 0;
    while at < order.len() {
        let state = order[at].clone();
        at += 1;
        for (_, succ) in task.successors(&state) {
            if !seen.contains_key(&succ) {
                if order.len() >= cap {
                    return Err(OracleError::ResourceLimit { cap });
                }
                seen.insert(succ.clone(), order.len());
                order.push(succ);
            }
        }
    }
    Ok(order)
}

/// Exact goal distance for every reachable state that can still reach the
/// goal. Built by enumerating the reachable graph forward and then running a
/// reverse breadth-first sweep from all goal states; heuristic-free.
pub fn goal_distances(task: &GroundTask, cap: usize) -> Result<HashMap<State, u32>, OracleError> {
    let states = reachable_states(task, task.s0(), cap)?;
    let index: HashMap<&State, usize> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut incoming: Vec<Vec<u32>> = vec![Vec::new(); states.len()];
    for (i, s) in states.iter().enumerate() {
        for (_, succ) in task.successors(s) {
            let j = index[&succ];
            incoming[j].push(i as u32);
        }
    }
    let mut dist: Vec<Option<u32>> = vec![None; states.len()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for (i, s) in states.iter().enumerate() {
        if task.is_goal(s) {
            dist[i] = Some(0);
            queue.push_back(i);
        }
    }
    while let Some(j) = queue.pop_front() {
        let d = dist[j].unwrap();
        for &i in &incoming[j] {
            let i = i as usize;
            if dist[i].is_none() {
                dist[i] = Some(d + 1);
                queue.push_back(i);
            }
        }
    }
    Ok(states
        .into_iter()
        .zip(dist)
        .filter_map(|(s, d)| d.map(|d| (s, d)))
        .collect())
}

/// Length of the optimal plan from the end state of `partial` to the goal.
pub fn goal_distance(task: &GroundTask, partial: &Plan) -> Result<Option<u32>, OracleError> {
    let end = partial
        .replay(task, task.s0())
        .map_err(|e| OracleError::PlanNotApplicable { step: e.step })?;
    optimal_length(task, &end)
}

/// `len(partial) + goal_distance(partial) - optimal_length(s0)`: how far the
/// partial plan has strayed from some optimal plan. Zero for the empty plan
/// and for every optimal prefix.
pub fn optimum_distance(task: &GroundTask, partial: &Plan) -> Result<u32, OracleError> {
    let gd = goal_distance(task, partial)?.ok_or(OracleError::UnreachableGoal)?;
    let opt = optimal_length(task, task.s0())?.ok_or(OracleError::UnreachableGoal)?;
    let total = partial.len() as u32 + gd;
    debug_assert!(total >= opt, "optimal distances violate the triangle property");
    Ok(total - opt)
}

/// Both quality metrics of a partial plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistanceReport {
    pub partial_length: u32,
    pub goal_distance: Option<u32>,
    /// `None` when the goal is unreachable from the partial plan's end.
    pub optimum_distance: Option<u32>,
}

pub fn distance_report(task: &GroundTask, partial: &Plan) -> Result<DistanceReport, OracleError> {
    let gd = goal_distance(task, partial)?;
    let od = match gd {
        Some(_) => Some(optimum_distance(task, partial)?),
        None => None,
    };
    Ok(DistanceReport {
        partial_length: partial.len() as u32,
        goal_distance: gd,
        optimum_distance: od,
    })
}
