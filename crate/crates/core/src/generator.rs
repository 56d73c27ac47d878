//! Text generators for the gripper and ferry benchmark families.

use std::fmt::Write;

/// A generated domain/problem pair, ready for the PDDL parser.
#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub name: String,
    pub domain: String,
    pub problem: String,
}

/// Two rooms, two grippers, `n` balls to carry from room A to room B.
/// Optimal plan length is `3n` for odd `n` and `3n - 1` for even `n`.
pub fn gripper(n: u32) -> GeneratedInstance {
    assert!(n >= 1, "gripper instances need at least one ball");
    let domain = "\
(define (domain gripper)
  (:requirements :strips :typing)
  (:types room ball gripper)
  (:predicates (at-robby ?r - room)
               (at ?b - ball ?r - room)
               (free ?g - gripper)
               (carry ?b - ball ?g - gripper))
  (:action move
    :parameters (?from - room ?to - room)
    :precondition (and (at-robby ?from))
    :effect (and (at-robby ?to) (not (at-robby ?from))))
  (:action pick
    :parameters (?b - ball ?r - room ?g - gripper)
    :precondition (and (at ?b ?r) (at-robby ?r) (free ?g))
    :effect (and (carry ?b ?g) (not (at ?b ?r)) (not (free ?g))))
  (:action drop
    :parameters (?b - ball ?r - room ?g - gripper)
    :precondition (and (carry ?b ?g) (at-robby ?r))
    :effect (and (at ?b ?r) (free ?g) (not (carry ?b ?g)))))
"
    .to_string();

    let name = format!("gripper-{n:02}");
    let mut problem = String::new();
    let _ = writeln!(problem, "(define (problem {name})");
    let _ = writeln!(problem, "  (:domain gripper)");
    let _ = write!(problem, "  (:objects rooma roomb - room");
    for i in 1..=n {
        let _ = write!(problem, " ball{i}");
    }
    let _ = writeln!(problem, " - ball left right - gripper)");
    let _ = write!(problem, "  (:init (at-robby rooma) (free left) (free right)");
    for i in 1..=n {
        let _ = write!(problem, " (at ball{i} rooma)");
    }
    let _ = writeln!(problem, ")");
    let _ = write!(problem, "  (:goal (and");
    for i in 1..=n {
        let _ = write!(problem, " (at ball{i} roomb)");
    }
    let _ = writeln!(problem, ")))");

    GeneratedInstance { name, domain, problem }
}

/// One capacity-one ferry, two locations, `n` cars to move across.
/// Optimal plan length is `4n - 1` (board/sail/debark per car plus the
/// return sails between cars).
pub fn ferry(n: u32) -> GeneratedInstance {
    assert!(n >= 1, "ferry instances need at least one car");
    let domain = "\
(define (domain ferry)
  (:requirements :strips :typing)
  (:types car location)
  (:predicates (at-ferry ?l - location)
               (at ?c - car ?l - location)
               (on ?c - car)
               (empty-ferry))
  (:action sail
    :parameters (?from - location ?to - location)
    :precondition (and (at-ferry ?from))
    :effect (and (at-ferry ?to) (not (at-ferry ?from))))
  (:action board
    :parameters (?c - car ?l - location)
    :precondition (and (at ?c ?l) (at-ferry ?l) (empty-ferry))
    :effect (and (on ?c) (not (at ?c ?l)) (not (empty-ferry))))
  (:action debark
    :parameters (?c - car ?l - location)
    :precondition (and (on ?c) (at-ferry ?l))
    :effect (and (at ?c ?l) (empty-ferry) (not (on ?c)))))
"
    .to_string();

    let name = format!("ferry-{n:02}");
    let mut problem = String::new();
    let _ = writeln!(problem, "(define (problem {name})");
    let _ = writeln!(problem, "  (:domain ferry)");
    let _ = write!(problem, "  (:objects loca locb - location");
    for i in 1..=n {
        let _ = write!(problem, " car{i}");
    }
    let _ = writeln!(problem, " - car)");
    let _ = write!(problem, "  (:init (at-ferry loca) (empty-ferry)");
    for i in 1..=n {
        let _ = write!(problem, " (at car{i} loca)");
    }
    let _ = writeln!(problem, ")");
    let _ = write!(problem, "  (:goal (and");
    for i in 1..=n {
        let _ = write!(problem, " (at car{i} locb)");
    }
    let _ = writeln!(problem, ")))");

    GeneratedInstance { name, domain, problem }
}

/// Parses and grounds a generated instance.
pub fn build_task(inst: &GeneratedInstance) -> crate::pddl::GroundTask {
    let dom = crate::pddl::parse_domain(&inst.domain).expect("generated domain parses");
    let prob = crate::pddl::parse_problem(&inst.problem, &dom).expect("generated problem parses");
    crate::pddl::ground(&dom, &prob)
}
