//! Splitting a per-instance machine into one machine per parameter subset.
//!
//! Each subset machine follows only the method calls over its own
//! parameters and tracks, as a knowledge set, which states of the original
//! machine are still possible.

mod dot;
mod independence;
mod product;
mod requirements;
mod subset;

pub use dot::export_split_dot;
pub use independence::{check_independence, IndependenceFailure, IndependenceReport};
pub use product::{
    build_instance_product, check_lemma1, check_progress, InstProp, Instance, InstanceProduct,
    Lemma1Verdict, Lemma1Witness, ProductConfig, ProductState, ProductTransition,
    ProgressFailure,
};
pub use requirements::{
    check_irrelevant_predicates, check_local_updates, Requirement, RequirementReport,
    RequirementViolation,
};
pub use subset::{check_knowledge, split, split_unchecked, SplitConfig};

use crate::machine::{Letter, MealyMachine, Transition};
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error("transition {from} -> {to} does not carry exactly one method call")]
    MethodCall { from: String, to: String, letter: Letter },
    #[error("machine violates {}", .0.summary())]
    Requirements(RequirementReport),
    #[error("subset machine for {subset} exceeds {cap} states")]
    StateCap { subset: String, cap: usize },
    #[error("instance product exceeds {cap} states")]
    ProductCap { cap: usize },
    #[error("parameter domain must be non-empty")]
    EmptyDomain,
    #[error("bad knowledge override `{0}`")]
    BadOverride(String),
}

/// A set of parameters, kept in quantifier-prefix order.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ParamSubset(pub Vec<String>);

impl ParamSubset {
    pub fn is_subset_of(&self, other: &ParamSubset) -> bool {
        self.0.iter().all(|p| other.0.contains(p))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// File-name friendly label: `empty` or the parameters joined by `_`.
    pub fn slug(&self) -> String {
        if self.0.is_empty() {
            "empty".into()
        } else {
            self.0.join("_")
        }
    }

    /// Parses `{}`, `{m}`, `{m, n}` or a bare `m,n`.
    pub fn parse(text: &str) -> ParamSubset {
        let inner = text.trim().trim_start_matches('{').trim_end_matches('}');
        ParamSubset(
            inner.split(',').map(str::trim).filter(|p| !p.is_empty()).map(String::from).collect(),
        )
    }
}

impl fmt::Display for ParamSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.join(", "))
    }
}

/// A subset-machine transition. `guard` holds the original states `s` for
/// which the transition exists with guard proposition `in_s`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SubsetTransition {
    pub from: usize,
    pub letter: Letter,
    pub guard: BTreeSet<usize>,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParamSubsetMachine {
    pub subset: ParamSubset,
    pub num_states: usize,
    /// Sorted original-state ids per state; state 0 is initial.
    pub knowledge: Vec<Vec<usize>>,
    pub transitions: Vec<SubsetTransition>,
}

impl ParamSubsetMachine {
    pub fn initial(&self) -> usize {
        0
    }

    pub fn state_name(&self, q: usize) -> String {
        format!("q{}", q + 1)
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        let n: usize = name.strip_prefix('q')?.parse().ok()?;
        (1..=self.num_states).contains(&n).then(|| n - 1)
    }

    pub fn outgoing(&self, q: usize) -> impl Iterator<Item = &SubsetTransition> {
        self.transitions.iter().filter(move |t| t.from == q)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitSystem {
    pub original: MealyMachine,
    pub parameters: Vec<String>,
    /// One machine per parameter subset carrying a method call, ordered by
    /// size and then by prefix position.
    pub machines: Vec<ParamSubsetMachine>,
}

impl SplitSystem {
    /// Guard proposition names, indexed by original state.
    pub fn guard_names(&self) -> Vec<String> {
        (0..self.original.num_states).map(|s| format!("in_{}", self.original.state_name(s))).collect()
    }

    pub fn machine_for(&self, subset: &ParamSubset) -> Option<usize> {
        self.machines.iter().position(|m| &m.subset == subset)
    }

    pub fn knowledge_names(&self, machine: usize, q: usize) -> Vec<String> {
        self.machines[machine].knowledge[q].iter().map(|&s| self.original.state_name(s)).collect()
    }

    /// Machines whose subset is a proper subset of machine `i`'s.
    pub fn ancestors(&self, i: usize) -> Vec<usize> {
        let own = &self.machines[i].subset;
        (0..self.machines.len())
            .filter(|&j| j != i && self.machines[j].subset.is_subset_of(own))
            .collect()
    }

    /// Every combination of states of `machines`, in lexicographic order.
    pub fn state_combinations(&self, machines: &[usize]) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for &j in machines {
            out = out
                .iter()
                .flat_map(|c| (0..self.machines[j].num_states).map(move |q| [c.as_slice(), &[q]].concat()))
                .collect();
        }
        out
    }

    /// `K_i(q)` intersected with the knowledge of `machines` in `combo`.
    pub fn combined_knowledge(
        &self,
        i: usize,
        q: usize,
        machines: &[usize],
        combo: &[usize],
    ) -> BTreeSet<usize> {
        let mut x: BTreeSet<usize> = self.machines[i].knowledge[q].iter().copied().collect();
        for (&j, &qj) in machines.iter().zip(combo) {
            let kj = &self.machines[j].knowledge[qj];
            x.retain(|s| kj.contains(s));
        }
        x
    }

    /// Original transitions represented in machine `i`: those with a call
    /// over its subset leaving a state that occurs in some guard.
    pub fn represented_transitions(&self, i: usize) -> BTreeSet<Transition> {
        let m = &self.machines[i];
        let mut out = BTreeSet::new();
        for t in &m.transitions {
            for &s in &t.guard {
                for ot in self.original.outgoing(s) {
                    if ot.letter == t.letter {
                        out.insert(*ot);
                    }
                }
            }
        }
        out
    }

    /// Applies an override `SUBSET:STATE=s1,s2`, e.g. `{}:q2=s1,s4`.
    pub fn set_knowledge(&mut self, spec: &str) -> Result<(), SplitError> {
        let bad = || SplitError::BadOverride(spec.to_string());
        let (lhs, rhs) = spec.split_once('=').ok_or_else(bad)?;
        let (subset, state) = lhs.rsplit_once(':').ok_or_else(bad)?;
        let i = self.machine_for(&ParamSubset::parse(subset)).ok_or_else(bad)?;
        let q = self.machines[i].state_index(state.trim()).ok_or_else(bad)?;
        let mut ks = Vec::new();
        for name in rhs.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            let n: usize = name.strip_prefix('s').and_then(|n| n.parse().ok()).ok_or_else(bad)?;
            if n == 0 || n > self.original.num_states {
                return Err(bad());
            }
            ks.push(n - 1);
        }
        ks.sort_unstable();
        ks.dedup();
        self.machines[i].knowledge[q] = ks;
        Ok(())
    }
}
