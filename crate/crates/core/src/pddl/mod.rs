//! PDDL reading and grounding for the `:strips` + `:typing` subset.
//!
//! Pipeline: [`parse_domain`] / [`parse_problem`] produce lifted definitions,
//! [`ground`] instantiates them into a [`GroundTask`] over dense fact ids.
//! All produced values are immutable; searches share them freely.

pub mod ast;
pub mod error;
pub mod ground;
pub mod parser;
pub mod sexpr;
pub mod state;

pub use ast::{DomainDef, GroundAtom, OperatorSchema, ProblemDef};
pub use error::{ApplyError, ParseError, TaskError};
pub use ground::{ground, ground_with, GroundAction, GroundOptions, GroundTask};
pub use parser::{parse_domain, parse_problem};
pub use state::{ActionId, FactId, State};
