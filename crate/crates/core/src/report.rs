//! Shared reporting and error types: validation reports with witnesses,
//! budget accounting, and the crate-wide error enum.

use serde::Serialize;

/// Default search budget, counted in candidate object-maps for functor
/// enumeration and in analogous candidate counts elsewhere. Exhaustive
/// semantics with an explicit cliff: we refuse up front rather than
/// silently truncate.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),
    #[error("budget exceeded: {what} requires {estimate} candidates, budget is {budget}")]
    BudgetExceeded {
        what: String,
        estimate: u64,
        budget: u64,
    },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub fn budget(what: impl Into<String>, estimate: u64, budget: u64) -> Self {
        Error::BudgetExceeded {
            what: what.into(),
            estimate,
            budget,
        }
    }
}

/// A single violated rule, with a human-readable witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Short machine-checkable rule identifier, e.g. `identity-law`.
    pub rule: String,
    /// Witness description: which morphism pair/triple/object failed.
    pub message: String,
}

/// Result of exhaustively checking a set of axioms. Empty means every
/// axiom holds; otherwise each violation names its witness.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub subject: String,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        ValidationReport {
            subject: subject.into(),
            violations: Vec::new(),
        }
    }

    pub fn push(&mut self, rule: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            rule: rule.into(),
            message: message.into(),
        });
    }

    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    /// Absorb another report, prefixing its subject onto each rule.
    pub fn absorb(&mut self, other: ValidationReport) {
        for v in other.violations {
            self.violations.push(Violation {
                rule: format!("{}:{}", other.subject, v.rule),
                message: v.message,
            });
        }
    }

    pub fn render(&self) -> String {
        if self.is_ok() {
            format!("{}: ok", self.subject)
        } else {
            let mut out = format!("{}: {} violation(s)\n", self.subject, self.violations.len());
            for v in &self.violations {
                out.push_str(&format!("  [{}] {}\n", v.rule, v.message));
            }
            out
        }
    }
}

/// Yes/no verdict with a counterexample witness when the answer is no.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<String>,
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn yes() -> Self {
        Verdict {
            holds: true,
            witness: None,
            notes: Vec::new(),
        }
    }

    pub fn no(witness: impl Into<String>) -> Self {
        Verdict {
            holds: false,
            witness: Some(witness.into()),
            notes: Vec::new(),
        }
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }
}
