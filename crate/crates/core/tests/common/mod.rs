//! Shared test support: a hand-coded gripper world that never touches the
//! STRIPS engine, plus tiny task builders.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use rtplan_core::pddl::{ground, parse_domain, parse_problem, GroundTask};
use rtplan_core::State;

/// Where a ball can be in the two-room world.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BallAt {
    RoomA,
    RoomB,
    LeftGripper,
    RightGripper,
}

/// Direct encoding of the gripper world: robby's room and each ball's place.
/// Successor generation follows the lifted rules by hand, with no grounding,
/// fact ids, or set algebra involved.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GripperWorld {
    pub robby_in_a: bool,
    pub balls: Vec<BallAt>,
}

impl GripperWorld {
    pub fn initial(balls: usize) -> Self {
        GripperWorld { robby_in_a: true, balls: vec![BallAt::RoomA; balls] }
    }

    pub fn is_goal(&self) -> bool {
        self.balls.iter().all(|&b| b == BallAt::RoomB)
    }

    fn left_free(&self) -> bool {
        !self.balls.contains(&BallAt::LeftGripper)
    }

    fn right_free(&self) -> bool {
        !self.balls.contains(&BallAt::RightGripper)
    }

    pub fn successors(&self) -> Vec<GripperWorld> {
        let mut out = Vec::new();
        // move to the other room
        let mut moved = self.clone();
        moved.robby_in_a = !self.robby_in_a;
        out.push(moved);
        let here = if self.robby_in_a { BallAt::RoomA } else { BallAt::RoomB };
        for (i, &ball) in self.balls.iter().enumerate() {
            // pick from the current room into each free gripper
            if ball == here {
                if self.left_free() {
                    let mut s = self.clone();
                    s.balls[i] = BallAt::LeftGripper;
                    out.push(s);
                }
                if self.right_free() {
                    let mut s = self.clone();
                    s.balls[i] = BallAt::RightGripper;
                    out.push(s);
                }
            }
            // drop a carried ball into the current room
            if ball == BallAt::LeftGripper || ball == BallAt::RightGripper {
                let mut s = self.clone();
                s.balls[i] = here;
                out.push(s);
            }
        }
        out
    }

    /// The state rendered as the canonical fact strings the generated PDDL
    /// encoding would produce, sorted.
    pub fn fact_strings(&self) -> BTreeSet<String> {
        let mut facts = BTreeSet::new();
        facts.insert(format!("(at-robby {})", if self.robby_in_a { "rooma" } else { "roomb" }));
        if self.left_free() {
            facts.insert("(free left)".to_string());
        }
        if self.right_free() {
            facts.insert("(free right)".to_string());
        }
        for (i, &ball) in self.balls.iter().enumerate() {
            let name = format!("ball{}", i + 1);
            match ball {
                BallAt::RoomA => facts.insert(format!("(at {name} rooma)")),
                BallAt::RoomB => facts.insert(format!("(at {name} roomb)")),
                BallAt::LeftGripper => facts.insert(format!("(carry {name} left)")),
                BallAt::RightGripper => facts.insert(format!("(carry {name} right)")),
            };
        }
        facts
    }
}

/// Every world reachable from the initial configuration, by breadth-first
/// enumeration over the hand-coded rules.
pub fn enumerate_gripper_worlds(balls: usize) -> BTreeSet<GripperWorld> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    let start = GripperWorld::initial(balls);
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(world) = queue.pop_front() {
        for succ in world.successors() {
            if seen.insert(succ.clone()) {
                queue.push_back(succ);
            }
        }
    }
    seen
}

/// Renders an engine state as sorted fact strings for comparison with the
/// simulator.
pub fn engine_fact_strings(task: &GroundTask, s: &State) -> BTreeSet<String> {
    s.iter().map(|f| task.fact_name(f).to_string()).collect()
}

/// A pure line task: `f0 -> f1 -> ... -> f{len}`, goal `f{len}`.
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

/// One action into a trap state with no way out and an unreachable goal.
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
    rtplan_core::pddl::ground_with(
        &dom,
        &prob,
        rtplan_core::pddl::GroundOptions { prune_statically_inapplicable: false },
    )
}
