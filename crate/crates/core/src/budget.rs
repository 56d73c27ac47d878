//! Decision budgets: wall-clock time for the real-time protocol, or a fixed
//! unit count (search iterations / node expansions) for deterministic runs.

use std::fmt;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    Time(Duration),
    /// Deterministic substitute for wall-clock: one unit is one MHSP
    /// iteration or one A*/BFS node expansion.
    Iterations(u64),
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Budget::Time(d) => write!(f, "{}ms", d.as_millis()),
            Budget::Iterations(n) => write!(f, "{n}it"),
        }
    }
}

/// Tracks consumption against a budget. The exhaustion check is intended to
/// run once per iteration, at the top of the loop.
#[derive(Debug)]
pub struct BudgetClock {
    budget: Budget,
    start: Instant,
    used: u64,
}

impl BudgetClock {
    pub fn start(budget: Budget) -> Self {
        BudgetClock { budget, start: Instant::now(), used: 0 }
    }

    pub fn spend(&mut self, units: u64) {
        self.used += units;
    }

    pub fn exhausted(&self) -> bool {
        match self.budget {
            Budget::Time(limit) => self.start.elapsed() >= limit,
            Budget::Iterations(limit) => self.used >= limit,
        }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }
}
