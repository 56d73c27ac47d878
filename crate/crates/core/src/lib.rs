//! Real-time planning over grounded STRIPS tasks.
//!
//! The centerpiece is [`mhsp`]: an anytime, mean-based heuristic tree search
//! that selects actions under a hard decision budget. [`baselines`] provides
//! the comparison selectors (anytime A* and breadth-first lookahead) behind
//! the same interface, [`agent`] the episodic execute-and-learn loop,
//! [`oracle`] exact offline distances for evaluation, and [`pddl`] the
//! parsing/grounding front end. [`generator`] emits the gripper and ferry
//! benchmark families.

pub mod agent;
pub mod baselines;
pub mod budget;
pub mod generator;
pub mod heuristics;
pub mod mhsp;
pub mod oracle;
pub mod pddl;
pub mod plan;

#[cfg(test)]
pub(crate) mod testutil;

pub use agent::{AgentConfig, Algorithm, CommitPolicy, EpisodeResult, TrialRecord};
pub use baselines::{AstarTimeoutRule, SelectorResult};
pub use budget::Budget;
pub use heuristics::{Estimate, HeuristicKind, LearnedTable};
pub use mhsp::{MhspConfig, MhspTree, SelectionPolicy};
pub use pddl::{GroundTask, State};
pub use plan::Plan;
