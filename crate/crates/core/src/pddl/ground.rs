//! Grounding of lifted domains into indexed propositional tasks.

use std::collections::HashMap;
use std::fmt;

use super::ast::{AtomTemplate, DomainDef, GroundAtom, OperatorSchema, ProblemDef, Term};
use super::error::{ApplyError, TaskError};
use super::state::{ActionId, FactId, State};

/// An instantiated operator. Fact id slices are sorted; `add` and `del` are
/// disjoint (bindings that would overlap are dropped during grounding, since
/// `(s ∪ add) \ del` would otherwise let the delete clobber its own add).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundAction {
    pub name: String,
    pub precond: Vec<FactId>,
    pub add: Vec<FactId>,
    pub del: Vec<FactId>,
}

/// A grounded STRIPS task: a dense fact universe, ground actions over it,
/// the initial state, and the goal set.
#[derive(Debug, Clone)]
pub struct GroundTask {
    fact_names: Vec<GroundAtom>,
    fact_ids: HashMap<GroundAtom, FactId>,
    actions: Vec<GroundAction>,
    s0: State,
    goal: State,
}

impl GroundTask {
    /// Assembles a task from parts, checking the structural invariants.
    /// Fact ids are the positions in `fact_names`.
    pub fn from_parts(
        fact_names: Vec<GroundAtom>,
        actions: Vec<GroundAction>,
        s0: Vec<FactId>,
        goal: Vec<FactId>,
    ) -> Result<Self, TaskError> {
        let mut fact_ids = HashMap::with_capacity(fact_names.len());
        for (i, atom) in fact_names.iter().enumerate() {
            if fact_ids.insert(atom.clone(), FactId(i as u32)).is_some() {
                return Err(TaskError::DuplicateFact { fact: atom.to_string() });
            }
        }
        let num_facts = fact_names.len();
        let check = |action: &GroundAction, facts: &[FactId]| {
            facts.iter().find(|f| f.index() >= num_facts).map(|f| TaskError::FactOutOfRange {
                action: action.name.clone(),
                fact: f.0,
                num_facts,
            })
        };
        let mut actions = actions;
        for a in &mut actions {
            a.precond.sort_unstable();
            a.precond.dedup();
            a.add.sort_unstable();
            a.add.dedup();
            a.del.sort_unstable();
            a.del.dedup();
        }
        for a in &actions {
            if let Some(e) = check(a, &a.precond).or_else(|| check(a, &a.add)).or_else(|| check(a, &a.del)) {
                return Err(e);
            }
            if a.add.iter().any(|f| a.del.binary_search(f).is_ok()) {
                return Err(TaskError::AddDelOverlap { action: a.name.clone() });
            }
        }
        for f in s0.iter().chain(goal.iter()) {
            if f.index() >= num_facts {
                return Err(TaskError::FactOutOfRange {
                    action: "<init/goal>".into(),
                    fact: f.0,
                    num_facts,
                });
            }
        }
        Ok(GroundTask {
            fact_names,
            fact_ids,
            actions,
            s0: State::new(s0),
            goal: State::new(goal),
        })
    }

    pub fn num_facts(&self) -> usize {
        self.fact_names.len()
    }

    pub fn fact_name(&self, f: FactId) -> &GroundAtom {
        &self.fact_names[f.index()]
    }

    pub fn fact_id(&self, atom: &GroundAtom) -> Option<FactId> {
        self.fact_ids.get(atom).copied()
    }

    pub fn actions(&self) -> &[GroundAction] {
        &self.actions
    }

    pub fn action(&self, a: ActionId) -> &GroundAction {
        &self.actions[a.index()]
    }

    pub fn action_ids(&self) -> impl Iterator<Item = ActionId> {
        (0..self.actions.len() as u32).map(ActionId)
    }

    pub fn s0(&self) -> &State {
        &self.s0
    }

    pub fn goal(&self) -> &State {
        &self.goal
    }

    /// `precond(a) ⊆ s`.
    pub fn applicable(&self, s: &State, a: ActionId) -> bool {
        s.contains_all(&self.action(a).precond)
    }

    /// `(s ∪ add(a)) \ del(a)`; fails unless `a` is applicable in `s`.
    pub fn apply(&self, s: &State, a: ActionId) -> Result<State, ApplyError> {
        if !self.applicable(s, a) {
            return Err(ApplyError::NotApplicable { action: a.0 });
        }
        Ok(self.apply_unchecked(s, a))
    }

    /// `apply` without the precondition check, for search inner loops that
    /// have already tested applicability.
    pub fn apply_unchecked(&self, s: &State, a: ActionId) -> State {
        debug_assert!(self.applicable(s, a));
        let action = self.action(a);
        s.apply_effects(&action.add, &action.del)
    }

    /// `goal ⊆ s`.
    pub fn is_goal(&self, s: &State) -> bool {
        self.goal.is_subset_of(s)
    }

    pub fn applicable_actions<'a>(&'a self, s: &'a State) -> impl Iterator<Item = ActionId> + 'a {
        self.action_ids().filter(move |&a| self.applicable(s, a))
    }

    pub fn successors(&self, s: &State) -> Vec<(ActionId, State)> {
        self.applicable_actions(s)
            .map(|a| (a, self.apply_unchecked(s, a)))
            .collect()
    }

    /// Human-readable action list, `(name arg...)` per entry.
    pub fn action_names(&self, actions: &[ActionId]) -> Vec<String> {
        actions.iter().map(|&a| format!("({})", self.action(a).name)).collect()
    }
}

impl fmt::Display for GroundTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "task: {} facts, {} actions, |s0| = {}, |goal| = {}",
            self.num_facts(),
            self.actions.len(),
            self.s0.len(),
            self.goal.len()
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GroundOptions {
    /// Drop ground actions whose preconditions are unreachable in the
    /// delete-free relaxation of the task. Sound: such actions can never
    /// become applicable, so pruning is observationally invisible.
    pub prune_statically_inapplicable: bool,
}

impl Default for GroundOptions {
    fn default() -> Self {
        GroundOptions { prune_statically_inapplicable: true }
    }
}

/// Grounds a parsed domain/problem pair with default options.
pub fn ground(dom: &DomainDef, prob: &ProblemDef) -> GroundTask {
    ground_with(dom, prob, GroundOptions::default())
}

pub fn ground_with(dom: &DomainDef, prob: &ProblemDef, opts: GroundOptions) -> GroundTask {
    let mut interner = FactInterner::default();

    let s0: Vec<FactId> = prob.init.iter().map(|a| interner.intern(a.clone())).collect();

    // All objects usable for instantiation, grouped by declared type.
    let objects: Vec<&super::ast::TypedName> = prob.objects.iter().chain(&dom.constants).collect();
    let mut actions = Vec::new();
    for op in &dom.operators {
        let candidates: Vec<Vec<&str>> = op
            .params
            .iter()
            .map(|p| {
                objects
                    .iter()
                    .filter(|o| dom.is_subtype(&o.ty, &p.ty))
                    .map(|o| o.name.as_str())
                    .collect()
            })
            .collect();
        let mut binding: Vec<&str> = Vec::with_capacity(op.params.len());
        instantiate(op, &candidates, &mut binding, &mut interner, &mut actions);
    }

    let goal: Vec<FactId> = prob.goal.iter().map(|a| interner.intern(a.clone())).collect();

    if opts.prune_statically_inapplicable {
        let reachable = delete_free_reachable(interner.names.len(), &actions, &s0);
        actions.retain(|a| a.precond.iter().all(|f| reachable[f.index()]));
    }

    GroundTask::from_parts(interner.names, actions, s0, goal)
        .expect("grounding preserves task invariants")
}

#[derive(Default)]
struct FactInterner {
    names: Vec<GroundAtom>,
    ids: HashMap<GroundAtom, FactId>,
}

impl FactInterner {
    fn intern(&mut self, atom: GroundAtom) -> FactId {
        if let Some(&id) = self.ids.get(&atom) {
            return id;
        }
        let id = FactId(self.names.len() as u32);
        self.names.push(atom.clone());
        self.ids.insert(atom, id);
        id
    }
}

fn instantiate<'a>(
    op: &OperatorSchema,
    candidates: &[Vec<&'a str>],
    binding: &mut Vec<&'a str>,
    interner: &mut FactInterner,
    out: &mut Vec<GroundAction>,
) {
    if binding.len() == candidates.len() {
        let subst = |atom: &AtomTemplate| -> GroundAtom {
            let args = atom
                .args
                .iter()
                .map(|t| match t {
                    Term::Const(c) => c.clone(),
                    Term::Var(v) => {
                        let idx = op
                            .params
                            .iter()
                            .position(|p| p.name == *v)
                            .expect("validated: variable bound by parameters");
                        binding[idx].to_string()
                    }
                })
                .collect();
            GroundAtom::new(atom.pred.clone(), args)
        };

        let add_atoms: Vec<GroundAtom> = op.add.iter().map(&subst).collect();
        let del_atoms: Vec<GroundAtom> = op.del.iter().map(&subst).collect();
        // A binding under which an atom is both added and deleted is
        // inconsistent; skip it (e.g. move(x, x)).
        if add_atoms.iter().any(|a| del_atoms.contains(a)) {
            return;
        }

        let mut name = op.name.clone();
        for b in binding.iter() {
            name.push(' ');
            name.push_str(b);
        }
        let mut action = GroundAction {
            name,
            precond: op.precond.iter().map(|a| interner.intern(subst(a))).collect(),
            add: add_atoms.into_iter().map(|a| interner.intern(a)).collect(),
            del: del_atoms.into_iter().map(|a| interner.intern(a)).collect(),
        };
        action.precond.sort_unstable();
        action.precond.dedup();
        action.add.sort_unstable();
        action.add.dedup();
        action.del.sort_unstable();
        action.del.dedup();
        out.push(action);
        return;
    }
    for &obj in &candidates[binding.len()] {
        binding.push(obj);
        instantiate(op, candidates, binding, interner, out);
        binding.pop();
    }
}

/// Fixpoint of fact reachability ignoring delete effects.
fn delete_free_reachable(num_facts: usize, actions: &[GroundAction], s0: &[FactId]) -> Vec<bool> {
    let mut reached = vec![false; num_facts];
    for f in s0 {
        reached[f.index()] = true;
    }
    let mut fired = vec![false; actions.len()];
    loop {
        let mut changed = false;
        for (i, a) in actions.iter().enumerate() {
            if fired[i] || !a.precond.iter().all(|f| reached[f.index()]) {
                continue;
            }
            fired[i] = true;
            for f in &a.add {
                if !reached[f.index()] {
                    reached[f.index()] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            return reached;
        }
    }
}
