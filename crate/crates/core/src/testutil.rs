//! Tiny hand-designed tasks for unit tests.

use crate::pddl::{ground, parse_domain, parse_problem, GroundTask};

/// A pure line: `f0 -a0-> f1 -> ... -> f{len}`, goal `f{len}`. Each action
/// deletes its source fact, so every state has exactly one successor.
/// With `len = 0` the goal holds at the initial state.
pub fn chain_task(len: u32) -> GroundTask {
    let mut preds = String::new();
    let mut actions = String::new();
    for i in 0..=len {
        preds.push_str(&format!("(f{i}) "));
    }
    for i in 0..len {
        actions.push_str(&format!(
            "(:action a{i} :parameters () :precondition (f{i}) :effect (and (f{}) (not (f{i}))))\n",
            i + 1
        ));
    }
    let dom =
        parse_domain(&format!("(define (domain chain) (:predicates {preds}) {actions})")).unwrap();
    let prob = parse_problem(
        &format!("(define (problem chain-{len}) (:domain chain) (:init (f0)) (:goal (f{len})))"),
        &dom,
    )
    .unwrap();
    ground(&dom, &prob)
}

/// Two disjoint lines from a shared start: branch `a` reaches the goal in
/// `dist_a` steps after the fork, branch `b` in `dist_b`. The branch-`a`
/// fork action is declared first.
pub fn fork_task(dist_a: u32, dist_b: u32) -> GroundTask {
    assert!(dist_a >= 1 && dist_b >= 1);
    let mut preds = String::from("(start) (end) ");
    let mut actions = String::new();
    for (tag, dist) in [("a", dist_a), ("b", dist_b)] {
        for i in 0..dist {
            preds.push_str(&format!("({tag}{i}) "));
        }
        actions.push_str(&format!(
            "(:action fork-{tag} :parameters () :precondition (start) :effect (and ({tag}0) (not (start))))\n"
        ));
        for i in 0..dist {
            let next = if i + 1 == dist { "end".to_string() } else { format!("{tag}{}", i + 1) };
            actions.push_str(&format!(
                "(:action step-{tag}{i} :parameters () :precondition ({tag}{i}) :effect (and ({next}) (not ({tag}{i}))))\n"
            ));
        }
    }
    let dom =
        parse_domain(&format!("(define (domain fork) (:predicates {preds}) {actions})")).unwrap();
    let prob = parse_problem(
        "(define (problem fork-1) (:domain fork) (:init (start)) (:goal (end)))",
        &dom,
    )
    .unwrap();
    ground(&dom, &prob)
}

/// A single action into a state with no applicable actions and an
/// unreachable goal.
pub fn dead_end_task() -> GroundTask {
    let dom = parse_domain(
        "(define (domain trapdom)
           (:predicates (start) (trapped) (win))
           (:action fall :parameters () :precondition (start)
             :effect (and (trapped) (not (start)))))",
    )
    .unwrap();
    let prob = parse_problem(
        "(define (problem trap-1) (:domain trapdom) (:init (start)) (:goal (win)))",
        &dom,
    )
    .unwrap();
    // Pruning would delete the unreachable action space around the trap;
    // keep everything so the trap is actually entered.
    crate::pddl::ground_with(
        &dom,
        &prob,
        crate::pddl::GroundOptions { prune_statically_inapplicable: false },
    )
}

/// A relay line where the mover needs a recharge between steps:
/// `{f_i, ready} -step-> {f_{i+1}, spent_i} -recharge-> {f_{i+1}, ready}`.
/// True distance from the start is `2*len - 1`, but the delete-free
/// relaxation never loses `ready`, so `h_max` sees only `len`. Every state
/// still has exactly one successor, which makes learned values converge to
/// the exact distances along the single trajectory.
pub fn relay_task(len: u32) -> GroundTask {
    assert!(len >= 1);
    let mut preds = String::from("(ready) ");
    let mut actions = String::new();
    for i in 0..=len {
        preds.push_str(&format!("(f{i}) "));
    }
    for i in 0..len {
        preds.push_str(&format!("(spent{i}) "));
        actions.push_str(&format!(
            "(:action step{i} :parameters () :precondition (and (f{i}) (ready)) \
              :effect (and (f{}) (spent{i}) (not (f{i})) (not (ready))))\n",
            i + 1
        ));
        actions.push_str(&format!(
            "(:action recharge{i} :parameters () :precondition (spent{i}) \
              :effect (and (ready) (not (spent{i}))))\n"
        ));
    }
    let dom =
        parse_domain(&format!("(define (domain relay) (:predicates {preds}) {actions})")).unwrap();
    let prob = parse_problem(
        &format!(
            "(define (problem relay-{len}) (:domain relay) (:init (f0) (ready)) (:goal (f{len})))"
        ),
        &dom,
    )
    .unwrap();
    ground(&dom, &prob)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::optimal_length;

    #[test]
    fn chain_distances_are_exact() {
        for len in [0u32, 1, 4] {
            let task = chain_task(len);
            assert_eq!(optimal_length(&task, task.s0()).unwrap(), Some(len));
        }
    }

    #[test]
    fn fork_prefers_shorter_branch() {
        let task = fork_task(2, 4);
        assert_eq!(optimal_length(&task, task.s0()).unwrap(), Some(3));
    }

    #[test]
    fn dead_end_goal_is_unreachable() {
        let task = dead_end_task();
        assert_eq!(optimal_length(&task, task.s0()).unwrap(), None);
    }

    #[test]
    fn relay_distance_doubles_minus_one() {
        for len in [1u32, 3, 5] {
            let task = relay_task(len);
            assert_eq!(optimal_length(&task, task.s0()).unwrap(), Some(2 * len - 1));
        }
    }
}
