use std::fmt;

use serde::{Deserialize, Serialize};

use crate::syntax::{Path, ProofTerm};
use crate::text::{print_term, Notation};

/// The eight beta-rewritings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleName {
    AndFst,
    AndSnd,
    OrInl,
    OrInr,
    Imp,
    All,
    Ex,
    Id,
}

impl RuleName {
    pub const ALL: [RuleName; 8] = [
        RuleName::AndFst,
        RuleName::AndSnd,
        RuleName::OrInl,
        RuleName::OrInr,
        RuleName::Imp,
        RuleName::All,
        RuleName::Ex,
        RuleName::Id,
    ];
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// One contraction: `before` is the redex at `path`, `after` its contractum.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RewriteStep {
    pub rule: RuleName,
    pub path: Path,
    pub before: ProofTerm,
    pub after: ProofTerm,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RewriteTrace {
    pub initial: ProofTerm,
    pub steps: Vec<RewriteStep>,
}

pub fn render_path(path: &[usize]) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        path.iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(".")
    }
}

impl RewriteStep {
    /// `step <n>: <rule> @ <path> : <before> ~> <after>`
    pub fn line(&self, n: usize, notation: Notation) -> String {
        format!(
            "step {n}: {} @ {} : {} ~> {}",
            self.rule,
            render_path(&self.path),
            print_term(&self.before, notation),
            print_term(&self.after, notation)
        )
    }

    pub fn to_json(&self, notation: Notation) -> TraceStepJson {
        TraceStepJson {
            rule: self.rule,
            path: self.path.clone(),
            before: print_term(&self.before, notation),
            after: print_term(&self.after, notation),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStepJson {
    pub rule: RuleName,
    pub path: Vec<usize>,
    pub before: String,
    pub after: String,
}

/// Structured trace: `{initial, steps: [{rule, path, before, after}], final}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceJson {
    pub initial: String,
    pub steps: Vec<TraceStepJson>,
    #[serde(rename = "final")]
    pub final_term: String,
}

impl RewriteTrace {
    pub fn lines(&self, notation: Notation) -> Vec<String> {
        self.steps
            .iter()
            .enumerate()
            .map(|(i, s)| s.line(i + 1, notation))
            .collect()
    }

    /// The term reached by applying the steps without validation.
    pub fn final_term(&self) -> ProofTerm {
        let mut cur = self.initial.clone();
        for s in &self.steps {
            if let Some(next) = cur.replace_at(&s.path, s.after.clone()) {
                cur = super::tidy(&next);
            }
        }
        cur
    }

    pub fn to_json(&self, notation: Notation) -> TraceJson {
        TraceJson {
            initial: print_term(&self.initial, notation),
            steps: self.steps.iter().map(|s| s.to_json(notation)).collect(),
            final_term: print_term(&self.final_term(), notation),
        }
    }
}
