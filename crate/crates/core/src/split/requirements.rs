//! Structural preconditions for splitting.

use crate::ltl::Role;
use crate::machine::{MealyMachine, Transition};
use serde::Serialize;
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Requirement {
    /// Non-self cell updates need a call over the same parameters.
    LocalUpdates,
    /// Enabledness must not depend on predicates over foreign parameters.
    IrrelevantPredicates,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RequirementViolation {
    pub requirement: Requirement,
    pub from: String,
    pub to: String,
    pub label: String,
    pub proposition: String,
    #[serde(skip)]
    pub transition: Transition,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RequirementReport {
    pub violations: Vec<RequirementViolation>,
}

impl RequirementReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(mut self, other: RequirementReport) -> Self {
        self.violations.extend(other.violations);
        self
    }

    pub fn summary(&self) -> String {
        let kinds: BTreeSet<Requirement> = self.violations.iter().map(|v| v.requirement).collect();
        let names: Vec<&str> = kinds
            .iter()
            .map(|k| match k {
                Requirement::LocalUpdates => "local updates",
                Requirement::IrrelevantPredicates => "independence of irrelevant predicates",
            })
            .collect();
        format!("{} ({} violation(s))", names.join(" and "), self.violations.len())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.violations {
            out.push_str(&format!(
                "{:?}: {} -> {} on {} ({})\n",
                v.requirement, v.from, v.to, v.label, v.proposition
            ));
        }
        out
    }
}

fn violation(
    m: &MealyMachine,
    requirement: Requirement,
    t: &Transition,
    prop: usize,
) -> RequirementViolation {
    RequirementViolation {
        requirement,
        from: m.state_name(t.from),
        to: m.state_name(t.to),
        label: m.alphabet.render_letter(t.letter),
        proposition: m.alphabet.entries[prop].display.clone(),
        transition: *t,
    }
}

fn call_params<'a>(m: &'a MealyMachine, t: &Transition) -> Vec<&'a [String]> {
    m.alphabet
        .entries
        .iter()
        .enumerate()
        .filter(|(k, e)| e.is_call() && t.letter >> k & 1 == 1)
        .map(|(_, e)| e.params.as_slice())
        .collect()
}

/// Every true non-self cell update must come with a method call over the
/// identical parameter sequence.
pub fn check_local_updates(m: &MealyMachine) -> RequirementReport {
    let mut violations = Vec::new();
    for t in &m.transitions {
        let calls = call_params(m, t);
        for (k, e) in m.alphabet.entries.iter().enumerate() {
            if e.role != Role::Output || e.cell.is_none() || e.self_update {
                continue;
            }
            if t.letter >> k & 1 == 1 && !calls.contains(&e.params.as_slice()) {
                violations.push(violation(m, Requirement::LocalUpdates, t, k));
            }
        }
    }
    RequirementReport { violations }
}

/// For a call over `P_i`, flipping any non-call input whose parameters are
/// not contained in `P_i` must leave a transition with the same outputs and
/// target.
pub fn check_irrelevant_predicates(m: &MealyMachine) -> RequirementReport {
    let mut violations = Vec::new();
    for t in &m.transitions {
        let calls = call_params(m, t);
        for (k, e) in m.alphabet.entries.iter().enumerate() {
            if e.role != Role::Input || e.is_call() {
                continue;
            }
            let foreign = calls.iter().any(|ps| !e.params.iter().all(|p| ps.contains(p)));
            if !foreign {
                continue;
            }
            let twin = Transition { from: t.from, letter: t.letter ^ 1 << k, to: t.to };
            if m.transitions.binary_search(&twin).is_err() {
                violations.push(violation(m, Requirement::IrrelevantPredicates, t, k));
            }
        }
    }
    RequirementReport { violations }
}
