//! Matrix enumeration, cover sweeps, separating formulas, minimal covers,
//! many-valued closure membership and underivability certificates.

mod certificate;
mod enumerate;
mod mc;
mod minimal;
mod separator;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

pub use certificate::{check_certificate, Certificate, CertificateError};
pub use enumerate::{
    encode, enumerate_covers, enumerate_matrices, matrix_count, CoverSweep, Encoding, MatrixCursor,
    MatrixStream,
};
pub use mc::{mc_member, McVerdict};
pub use minimal::{minimal_covers, MinimalCovers};
pub use separator::{
    bounded_separator, compare, compare_with_hints, exact_separator, separating_formula, separating_formula_with_hints, Comparison,
    Engine, Relation, Separation,
};

/// Resource limits for the searches in this module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    /// Candidate matrices, or search nodes for membership, examined at most.
    pub max_candidates: u64,
    /// Maximum formula depth for bounded separator search.
    pub depth_cap: usize,
    /// Maximum number of distinct closure states kept.
    pub state_cap: u64,
    /// Wall-clock seconds; `0` means unlimited.
    pub time_cap: f64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_candidates: 5_000_000,
            depth_cap: 4,
            state_cap: 200_000,
            time_cap: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad budget `{0}`: expected `default` or key=value pairs over depth, states, candidates, time")]
pub struct BudgetError(pub String);

impl FromStr for Budget {
    type Err = BudgetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut b = Budget::default();
        let s = s.trim();
        if s == "default" || s.is_empty() {
            return Ok(b);
        }
        let bad = || BudgetError(s.to_string());
        for part in s.split(',') {
            let (key, value) = part.split_once('=').ok_or_else(bad)?;
            let value = value.trim();
            match key.trim() {
                "depth" => b.depth_cap = value.parse().map_err(|_| bad())?,
                "states" => b.state_cap = value.parse().map_err(|_| bad())?,
                "candidates" => b.max_candidates = value.parse().map_err(|_| bad())?,
                "time" => {
                    b.time_cap = value.parse().map_err(|_| bad())?;
                    if !(b.time_cap >= 0.0) {
                        return Err(bad());
                    }
                }
                _ => return Err(bad()),
            }
        }
        Ok(b)
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "depth={},states={},candidates={},time={}",
            self.depth_cap, self.state_cap, self.max_candidates, self.time_cap
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Deadline(Option<Instant>);

impl Deadline {
    pub(crate) fn new(budget: &Budget) -> Self {
        if budget.time_cap > 0.0 {
            Deadline(Some(Instant::now() + Duration::from_secs_f64(budget.time_cap)))
        } else {
            Deadline(None)
        }
    }

    pub(crate) fn expired(&self) -> bool {
        self.0.is_some_and(|t| Instant::now() >= t)
    }
}
