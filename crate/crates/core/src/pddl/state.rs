//! Canonical propositional states over interned fact ids.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// Dense index of a ground atom within a task's fact universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FactId(pub u32);

impl FactId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for FactId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}", self.0)
    }
}

/// Index of a ground action within a task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(pub u32);

impl ActionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A set of facts, stored sorted and deduplicated so that equal sets compare
/// and hash equal regardless of construction order. Clones are cheap.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    facts: Arc<[FactId]>,
}

impl State {
    pub fn new(mut facts: Vec<FactId>) -> Self {
        facts.sort_unstable();
        facts.dedup();
        State { facts: facts.into() }
    }

    pub fn empty() -> Self {
        State { facts: Arc::from([]) }
    }

    pub(crate) fn from_sorted(facts: Vec<FactId>) -> Self {
        debug_assert!(facts.windows(2).all(|w| w[0] < w[1]));
        State { facts: facts.into() }
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = FactId> + '_ {
        self.facts.iter().copied()
    }

    pub fn as_slice(&self) -> &[FactId] {
        &self.facts
    }

    pub fn contains(&self, f: FactId) -> bool {
        self.facts.binary_search(&f).is_ok()
    }

    /// True when every fact of `self` is in `other`.
    pub fn is_subset_of(&self, other: &State) -> bool {
        sorted_subset(&self.facts, &other.facts)
    }

    /// True when every id in the sorted slice `facts` is in this state.
    pub fn contains_all(&self, facts: &[FactId]) -> bool {
        sorted_subset(facts, &self.facts)
    }

    /// `(self ∪ add) \ del` for sorted, disjoint `add`/`del` slices.
    pub fn apply_effects(&self, add: &[FactId], del: &[FactId]) -> State {
        let mut out = Vec::with_capacity(self.facts.len() + add.len());
        let (mut i, mut j) = (0, 0);
        let push = |out: &mut Vec<FactId>, f: FactId| {
            if del.binary_search(&f).is_err() {
                out.push(f);
            }
        };
        while i < self.facts.len() && j < add.len() {
            match self.facts[i].cmp(&add[j]) {
                std::cmp::Ordering::Less => {
                    push(&mut out, self.facts[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    push(&mut out, add[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    push(&mut out, self.facts[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        for &f in &self.facts[i..] {
            push(&mut out, f);
        }
        for &f in &add[j..] {
            push(&mut out, f);
        }
        State::from_sorted(out)
    }

    /// Stable 64-bit digest used by the textual tree/table dumps.
    pub fn digest(&self) -> u64 {
        let mut h = Fnv1a::default();
        for f in self.facts.iter() {
            f.0.hash(&mut h);
        }
        h.finish()
    }
}

fn sorted_subset(small: &[FactId], big: &[FactId]) -> bool {
    let mut j = 0;
    for &f in small {
        loop {
            if j >= big.len() || big[j] > f {
                return false;
            }
            if big[j] == f {
                j += 1;
                break;
            }
            j += 1;
        }
    }
    true
}

/// FNV-1a, fixed so digests are stable across runs and platforms
/// (`DefaultHasher` makes no such promise).
struct Fnv1a(u64);

impl Default for Fnv1a {
    fn default() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }
}

impl Hasher for Fnv1a {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
}
