//! Action sequences and replay validation.

use thiserror::Error;

use crate::pddl::{ActionId, GroundTask, State};

/// An ordered sequence of ground actions. A plan is always interpreted
/// relative to a start state; [`Plan::replay`] checks sequential
/// applicability and yields the end state.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Plan {
    actions: Vec<ActionId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("plan step {step} is not applicable")]
pub struct ReplayError {
    pub step: usize,
}

impl Plan {
    pub fn empty() -> Self {
        Plan { actions: Vec::new() }
    }

    pub fn from_actions(actions: Vec<ActionId>) -> Self {
        Plan { actions }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.actions
    }

    pub fn push(&mut self, a: ActionId) {
        self.actions.push(a);
    }

    /// Applies the plan from `from`, failing on the first inapplicable step.
    pub fn replay(&self, task: &GroundTask, from: &State) -> Result<State, ReplayError> {
        let mut s = from.clone();
        for (step, &a) in self.actions.iter().enumerate() {
            s = task.apply(&s, a).map_err(|_| ReplayError { step })?;
        }
        Ok(s)
    }

    pub fn is_applicable_from(&self, task: &GroundTask, from: &State) -> bool {
        self.replay(task, from).is_ok()
    }

    /// `(name arg...)` lines, one action per line.
    pub fn render(&self, task: &GroundTask) -> String {
        task.action_names(&self.actions).join("\n")
    }
}

impl FromIterator<ActionId> for Plan {
    fn from_iter<T: IntoIterator<Item = ActionId>>(iter: T) -> Self {
        Plan { actions: iter.into_iter().collect() }
    }
}
