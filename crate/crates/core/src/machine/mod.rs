//! Explicit Mealy machines over proposition letters.

pub mod analysis;
pub mod cubes;
pub mod dot;
pub mod minimize;

pub use analysis::{
    detect_deadlocks, detect_free_choices, resolve_free_choices, AnalysisError, AnalysisReport,
    Deadlock, DeterminedClass, FreeChoice, FreeChoicePolicy,
};
pub use dot::export_dot;
pub use minimize::minimize;

use crate::ltl::{PropTable, Role};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// A full valuation of the alphabet: bit `k` is proposition `k`.
pub type Letter = u64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlphabetEntry {
    pub name: String,
    pub role: Role,
    pub method: Option<String>,
    pub self_update: bool,
    pub cell: Option<String>,
    pub params: Vec<String>,
    pub display: String,
}

impl AlphabetEntry {
    pub fn is_call(&self) -> bool {
        self.method.is_some()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Alphabet {
    pub entries: Vec<AlphabetEntry>,
}

impl Alphabet {
    pub fn from_table(table: &PropTable) -> Self {
        let entries = table
            .props()
            .iter()
            .map(|p| AlphabetEntry {
                name: p.name.clone(),
                role: p.role,
                method: p.method.clone(),
                self_update: p.self_update,
                cell: p.cell.clone(),
                params: p.params.clone(),
                display: p.display.clone(),
            })
            .collect();
        Alphabet { entries }
    }

    /// Alphabet of plain propositions, inputs first.
    pub fn plain(inputs: &[&str], outputs: &[&str]) -> Self {
        let mk = |n: &&str, role| AlphabetEntry {
            name: n.to_string(),
            role,
            method: None,
            self_update: false,
            cell: None,
            params: Vec::new(),
            display: n.to_string(),
        };
        let mut entries: Vec<AlphabetEntry> = inputs.iter().map(|n| mk(n, Role::Input)).collect();
        entries.extend(outputs.iter().map(|n| mk(n, Role::Output)));
        Alphabet { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.name == name)
    }

    pub fn index_of_display(&self, display: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.display == display)
    }

    fn mask_where(&self, pred: impl Fn(&AlphabetEntry) -> bool) -> Letter {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| pred(e))
            .fold(0, |m, (k, _)| m | 1 << k)
    }

    pub fn input_mask(&self) -> Letter {
        self.mask_where(|e| e.role == Role::Input)
    }

    pub fn output_mask(&self) -> Letter {
        self.mask_where(|e| e.role == Role::Output)
    }

    pub fn call_mask(&self) -> Letter {
        self.mask_where(|e| e.is_call())
    }

    pub fn self_update_mask(&self) -> Letter {
        self.mask_where(|e| e.self_update)
    }

    /// Names of the propositions set in `letter`.
    pub fn names(&self, letter: Letter) -> Vec<&str> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(k, _)| letter >> k & 1 == 1)
            .map(|(_, e)| e.name.as_str())
            .collect()
    }

    /// Renders a full letter as `inputs | outputs`.
    pub fn render_letter(&self, letter: Letter) -> String {
        let part = |mask: Letter| {
            self.entries
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
                .collect::<Vec<_>>()
                .join(" && ")
        };
        format!("{} | {}", part(self.input_mask()), part(self.output_mask()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Transition {
    pub from: usize,
    pub letter: Letter,
    pub to: usize,
}

/// A Mealy machine with a partial transition relation over full letters.
///
/// States are numbered `0..num_states` in breadth-first order from the
/// initial state `0`; transitions are sorted by `(from, letter, to)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MealyMachine {
    pub alphabet: Alphabet,
    pub num_states: usize,
    pub transitions: Vec<Transition>,
    /// Display prefix for state names (`s` gives `s1, s2, ...`).
    pub state_prefix: String,
}

impl MealyMachine {
    /// Builds a canonical machine: unreachable states are dropped and the
    /// remaining ones renumbered breadth-first from `initial`.
    pub fn new(
        alphabet: Alphabet,
        num_states: usize,
        initial: usize,
        transitions: impl IntoIterator<Item = Transition>,
    ) -> Self {
        Self::new_mapped(alphabet, num_states, initial, transitions).0
    }

    /// Like [`MealyMachine::new`], also returning the new number of every
    /// old state (`None` for dropped states).
    pub fn new_mapped(
        alphabet: Alphabet,
        num_states: usize,
        initial: usize,
        transitions: impl IntoIterator<Item = Transition>,
    ) -> (Self, Vec<Option<usize>>) {
        let mut out: BTreeMap<usize, BTreeSet<(Letter, usize)>> = BTreeMap::new();
        for t in transitions {
            assert!(t.from < num_states && t.to < num_states, "transition out of range");
            out.entry(t.from).or_default().insert((t.letter, t.to));
        }
        let mut order = vec![usize::MAX; num_states.max(1)];
        let mut queue = VecDeque::new();
        let mut next = 0;
        if num_states > 0 {
            order[initial] = 0;
            next = 1;
            queue.push_back(initial);
        }
        while let Some(s) = queue.pop_front() {
            if let Some(succ) = out.get(&s) {
                for &(_, to) in succ {
                    if order[to] == usize::MAX {
                        order[to] = next;
                        next += 1;
                        queue.push_back(to);
                    }
                }
            }
        }
        let mut ts: Vec<Transition> = Vec::new();
        for (from, succ) in &out {
            if order[*from] == usize::MAX {
                continue;
            }
            for &(letter, to) in succ {
                ts.push(Transition { from: order[*from], letter, to: order[to] });
            }
        }
        ts.sort();
        let mapping = (0..num_states).map(|s| (order[s] != usize::MAX).then_some(order[s])).collect();
        let m = MealyMachine { alphabet, num_states: next, transitions: ts, state_prefix: "s".into() };
        (m, mapping)
    }

    pub fn with_prefix(mut self, prefix: &str) -> Self {
        self.state_prefix = prefix.to_string();
        self
    }

    pub fn initial(&self) -> usize {
        0
    }

    pub fn state_name(&self, s: usize) -> String {
        format!("{}{}", self.state_prefix, s + 1)
    }

    pub fn outgoing(&self, s: usize) -> &[Transition] {
        let lo = self.transitions.partition_point(|t| t.from < s);
        let hi = self.transitions.partition_point(|t| t.from <= s);
        &self.transitions[lo..hi]
    }

    /// Successor on a full letter, if defined.
    pub fn step(&self, s: usize, letter: Letter) -> Option<usize> {
        self.outgoing(s).iter().find(|t| t.letter == letter).map(|t| t.to)
    }

    /// Whether every step of `trace` has a transition.
    pub fn accepts(&self, trace: &[Letter]) -> bool {
        if self.num_states == 0 {
            return trace.is_empty();
        }
        let mut s = self.initial();
        for &l in trace {
            match self.step(s, l) {
                Some(t) => s = t,
                None => return false,
            }
        }
        true
    }

    /// No two transitions share source and full letter.
    pub fn is_deterministic(&self) -> bool {
        self.transitions.windows(2).all(|w| (w[0].from, w[0].letter) != (w[1].from, w[1].letter))
    }

    /// Letters occurring on some transition, sorted.
    pub fn letters(&self) -> Vec<Letter> {
        let set: BTreeSet<Letter> = self.transitions.iter().map(|t| t.letter).collect();
        set.into_iter().collect()
    }

    pub fn input_part(&self, letter: Letter) -> Letter {
        letter & self.alphabet.input_mask()
    }

    pub fn output_part(&self, letter: Letter) -> Letter {
        letter & self.alphabet.output_mask()
    }

    /// Transitions whose label does not contain exactly one method call.
    pub fn method_call_violations(&self) -> Vec<Transition> {
        let calls = self.alphabet.call_mask();
        self.transitions
            .iter()
            .filter(|t| (t.letter & calls).count_ones() != 1)
            .copied()
            .collect()
    }

    /// For each cell, transitions where not exactly one of its updates holds.
    pub fn cell_update_violations(&self) -> Vec<(String, Transition)> {
        let mut cells: BTreeMap<&str, Letter> = BTreeMap::new();
        for (k, e) in self.alphabet.entries.iter().enumerate() {
            if let Some(c) = &e.cell {
                *cells.entry(c.as_str()).or_default() |= 1 << k;
            }
        }
        let mut out = Vec::new();
        for t in &self.transitions {
            for (c, mask) in &cells {
                if (t.letter & mask).count_ones() != 1 {
                    out.push((c.to_string(), *t));
                }
            }
        }
        out
    }

    /// States with transitions, grouped per source and input part.
    pub fn by_input(&self) -> BTreeMap<(usize, Letter), Vec<Transition>> {
        let mut map: BTreeMap<(usize, Letter), Vec<Transition>> = BTreeMap::new();
        for t in &self.transitions {
            map.entry((t.from, self.input_part(t.letter))).or_default().push(*t);
        }
        map
    }
}
