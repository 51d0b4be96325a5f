//! Free-choice and deadlock analysis of extracted machines.

use super::{Letter, MealyMachine, Transition};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("unknown proposition `{0}` in determined-predicate classification")]
    UnknownProposition(String),
    #[error("proposition `{0}` is an output and cannot be a determined predicate")]
    NotAnInput(String),
    #[error("free choice remains at state {state} for input `{input}`")]
    FreeChoiceRemaining { state: String, input: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FreeChoice {
    pub state: String,
    #[serde(skip)]
    pub state_id: usize,
    #[serde(skip)]
    pub input: Letter,
    #[serde(skip)]
    pub outputs: Vec<Letter>,
    pub input_text: String,
    pub output_texts: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeterminedClass {
    /// Becomes constant at some point; observed truth persists.
    Constant,
    /// Changes only through method calls.
    MethodOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Deadlock {
    pub state: String,
    #[serde(skip)]
    pub state_id: usize,
    pub valuation: Vec<(String, bool)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FreeChoicePolicy {
    /// Smallest output valuation, comparing letters as bit vectors.
    #[default]
    LexMin,
    LexMax,
    /// Refuse to resolve.
    Reject,
}

fn render_part(m: &MealyMachine, letter: Letter, mask: Letter) -> String {
    let lits: Vec<String> = m
        .alphabet
        .entries
        .iter()
        .enumerate()
        .filter(|(k, _)| mask >> k & 1 == 1)
        .map(|(k, e)| {
            if letter >> k & 1 == 1 {
                e.display.clone()
            } else {
                format!("!{}", e.display)
            }
        })
        .collect();
    if lits.is_empty() {
        "true".into()
    } else {
        lits.join(" && ")
    }
}

/// Every (state, input) pair with at least two distinct winning outputs.
pub fn detect_free_choices(m: &MealyMachine) -> Vec<FreeChoice> {
    let imask = m.alphabet.input_mask();
    let omask = m.alphabet.output_mask();
    let mut out = Vec::new();
    for ((state, input), ts) in m.by_input() {
        let outputs: BTreeSet<Letter> = ts.iter().map(|t| m.output_part(t.letter)).collect();
        if outputs.len() >= 2 {
            out.push(FreeChoice {
                state: m.state_name(state),
                state_id: state,
                input,
                input_text: render_part(m, input, imask),
                output_texts: outputs.iter().map(|o| render_part(m, *o, omask)).collect(),
                outputs: outputs.into_iter().collect(),
            });
        }
    }
    out
}

/// Names of states having at least one free choice.
pub fn free_choice_states(choices: &[FreeChoice]) -> Vec<String> {
    let ids: BTreeSet<usize> = choices.iter().map(|c| c.state_id).collect();
    let names: BTreeMap<usize, &str> = choices.iter().map(|c| (c.state_id, c.state.as_str())).collect();
    ids.into_iter().map(|i| names[&i].to_string()).collect()
}

/// Commits to one output per (state, input) and drops states that become
/// unreachable.
pub fn resolve_free_choices(
    m: &MealyMachine,
    policy: FreeChoicePolicy,
) -> Result<MealyMachine, AnalysisError> {
    let mut kept: Vec<Transition> = Vec::new();
    for ((state, input), ts) in m.by_input() {
        let outputs: BTreeSet<Letter> = ts.iter().map(|t| m.output_part(t.letter)).collect();
        let chosen = match policy {
            _ if outputs.len() == 1 => *outputs.first().unwrap(),
            FreeChoicePolicy::LexMin => *outputs.first().unwrap(),
            FreeChoicePolicy::LexMax => *outputs.last().unwrap(),
            FreeChoicePolicy::Reject => {
                return Err(AnalysisError::FreeChoiceRemaining {
                    state: m.state_name(state),
                    input: render_part(m, input, m.alphabet.input_mask()),
                })
            }
        };
        kept.extend(ts.iter().filter(|t| m.output_part(t.letter) == chosen));
    }
    Ok(MealyMachine::new(m.alphabet.clone(), m.num_states, m.initial(), kept)
        .with_prefix(&m.state_prefix))
}

/// Resolves classification keys (proposition names or displays) to bits.
fn classify(
    m: &MealyMachine,
    determined: &BTreeMap<String, DeterminedClass>,
) -> Result<(Letter, Letter), AnalysisError> {
    let mut class1 = 0;
    let mut class2 = 0;
    for (key, class) in determined {
        let k = m
            .alphabet
            .index_of(key)
            .or_else(|| m.alphabet.index_of_display(key))
            .ok_or_else(|| AnalysisError::UnknownProposition(key.clone()))?;
        if m.alphabet.entries[k].role != crate::ltl::Role::Input {
            return Err(AnalysisError::NotAnInput(key.clone()));
        }
        match class {
            DeterminedClass::Constant => class1 |= 1 << k,
            DeterminedClass::MethodOnly => class2 |= 1 << k,
        }
    }
    Ok((class1, class2))
}

fn submasks(mask: Letter) -> impl Iterator<Item = Letter> {
    let mut next = Some(0u64);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == mask { None } else { Some(((cur | !mask).wrapping_add(1)) & mask) };
        Some(cur)
    })
}

/// Reachable states where some frozen valuation of the determined
/// predicates enables no transition.
///
/// States are explored together with the set of constant-class predicates
/// already observed true; such a predicate can only freeze at true
/// afterwards. Method-only predicates may take any value.
pub fn detect_deadlocks(
    m: &MealyMachine,
    determined: &BTreeMap<String, DeterminedClass>,
) -> Result<Vec<Deadlock>, AnalysisError> {
    let (class1, class2) = classify(m, determined)?;
    let dmask = class1 | class2;
    if dmask == 0 || m.num_states == 0 {
        return Ok(Vec::new());
    }
    let mut seen: BTreeSet<(usize, Letter)> = BTreeSet::new();
    let mut queue = VecDeque::from([(m.initial(), 0u64)]);
    seen.insert((m.initial(), 0));
    let mut found: BTreeSet<(usize, Letter)> = BTreeSet::new();
    while let Some((s, observed)) = queue.pop_front() {
        let enabled: BTreeSet<Letter> = m.outgoing(s).iter().map(|t| t.letter & dmask).collect();
        for v in submasks(dmask) {
            if v & observed != observed {
                continue;
            }
            if !enabled.contains(&v) {
                found.insert((s, v));
            }
        }
        for t in m.outgoing(s) {
            if t.letter & observed != observed {
                continue;
            }
            let next = (t.to, observed | (t.letter & class1));
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    Ok(found
        .into_iter()
        .map(|(s, v)| Deadlock {
            state: m.state_name(s),
            state_id: s,
            valuation: m
                .alphabet
                .entries
                .iter()
                .enumerate()
                .filter(|(k, _)| dmask >> k & 1 == 1)
                .map(|(k, e)| (e.display.clone(), v >> k & 1 == 1))
                .collect(),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub realizable: bool,
    pub states: usize,
    pub transitions: usize,
    pub free_choices: Vec<FreeChoice>,
    pub free_choice_states: Vec<String>,
    pub deadlocks: Vec<Deadlock>,
    pub method_call_violations: usize,
    pub warnings: Vec<String>,
}

impl AnalysisReport {
    pub fn unrealizable() -> Self {
        AnalysisReport {
            realizable: false,
            states: 0,
            transitions: 0,
            free_choices: Vec::new(),
            free_choice_states: Vec::new(),
            deadlocks: Vec::new(),
            method_call_violations: 0,
            warnings: Vec::new(),
        }
    }

    pub fn analyze(
        m: &MealyMachine,
        determined: &BTreeMap<String, DeterminedClass>,
    ) -> Result<Self, AnalysisError> {
        let free_choices = detect_free_choices(m);
        let calls = m.alphabet.call_mask();
        Ok(AnalysisReport {
            realizable: true,
            states: m.num_states,
            transitions: m.transitions.len(),
            free_choice_states: free_choice_states(&free_choices),
            free_choices,
            deadlocks: detect_deadlocks(m, determined)?,
            method_call_violations: if calls == 0 { 0 } else { m.method_call_violations().len() },
            warnings: Vec::new(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.realizable {
            out.push_str("unrealizable\n");
            return out;
        }
        let _ = writeln!(out, "realizable: {} states, {} transitions", self.states, self.transitions);
        let _ = writeln!(out, "free choices: {} state(s)", self.free_choice_states.len());
        for c in &self.free_choices {
            let _ = writeln!(out, "  {} on {}: {}", c.state, c.input_text, c.output_texts.join(" / "));
        }
        let _ = writeln!(out, "deadlocks: {}", self.deadlocks.len());
        for d in &self.deadlocks {
            let vals: Vec<String> = d
                .valuation
                .iter()
                .map(|(n, b)| if *b { n.clone() } else { format!("!{n}") })
                .collect();
            let _ = writeln!(out, "  {} under {}", d.state, vals.join(", "));
        }
        if self.method_call_violations > 0 {
            let _ = writeln!(
                out,
                "transitions without exactly one method call: {}",
                self.method_call_violations
            );
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}
