//! Optimization phases over method graphs.

pub mod canonicalize;
pub mod condelim;
pub mod dominators;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::ir::{validate, IRGraph};

pub use canonicalize::{canonicalize, canonicalize_with, Rule, RuleSet};
pub use condelim::{conditional_elimination, conditional_elimination_with, CondElimConfig};
pub use dominators::{dominator_tree, DominatorTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    CondElim,
    Canonicalize,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::CondElim => "condelim",
            Phase::Canonicalize => "canonicalize",
        }
    }

    pub fn apply(self, g: &IRGraph) -> IRGraph {
        match self {
            Phase::CondElim => conditional_elimination(g),
            Phase::Canonicalize => canonicalize(g),
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown phase '{0}' (expected condelim or canonicalize)")]
pub struct UnknownPhase(pub String);

impl FromStr for Phase {
    type Err = UnknownPhase;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "condelim" => Ok(Phase::CondElim),
            "canonicalize" => Ok(Phase::Canonicalize),
            other => Err(UnknownPhase(other.to_string())),
        }
    }
}

/// Parses a comma-separated phase list such as `condelim,canonicalize`.
pub fn parse_phases(s: &str) -> Result<Vec<Phase>, UnknownPhase> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(str::parse).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{phase} produced an ill-formed graph: {}", violations.join("; "))]
pub struct PhaseError {
    pub phase: Phase,
    pub violations: Vec<String>,
}

/// Applies `phases` in order, checking well-formedness after each one.
pub fn run_phases(g: &IRGraph, phases: &[Phase]) -> Result<IRGraph, PhaseError> {
    let mut g = g.clone();
    for &phase in phases {
        g = phase.apply(&g);
        let violations = validate(&g);
        if !violations.is_empty() {
            return Err(PhaseError { phase, violations });
        }
    }
    Ok(g)
}
