use super::cubes::{cover, render_cube};
use super::{Alphabet, Letter, MealyMachine};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

pub fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Label for a set of letters: one `inputs | outputs` cube per line.
pub fn letters_label(alphabet: &Alphabet, letters: &BTreeSet<Letter>) -> String {
    let bits = if alphabet.len() >= 64 { u64::MAX } else { (1u64 << alphabet.len()) - 1 };
    cover(letters, bits)
        .iter()
        .map(|c| render_cube(alphabet, c))
        .collect::<Vec<_>>()
        .join("\n")
}

pub(crate) fn header(out: &mut String, name: &str, initial: &str) {
    let _ = writeln!(out, "digraph \"{}\" {{", escape(name));
    let _ = writeln!(out, "  rankdir=LR;");
    let _ = writeln!(out, "  node [shape=circle];");
    let _ = writeln!(out, "  __start [shape=point];");
    let _ = writeln!(out, "  __start -> \"{}\";", escape(initial));
}

/// Deterministic DOT rendering; parallel transitions are merged into one
/// edge whose label is a cube cover of their letters.
pub fn export_dot(m: &MealyMachine) -> String {
    let mut out = String::new();
    header(&mut out, "machine", &m.state_name(0));
    for s in 0..m.num_states.max(1) {
        let _ = writeln!(out, "  \"{}\";", m.state_name(s));
    }
    let mut edges: BTreeMap<(usize, usize), BTreeSet<Letter>> = BTreeMap::new();
    for t in &m.transitions {
        edges.entry((t.from, t.to)).or_default().insert(t.letter);
    }
    for ((from, to), letters) in edges {
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}\"];",
            m.state_name(from),
            m.state_name(to),
            escape(&letters_label(&m.alphabet, &letters)).replace('\n', "\\n")
        );
    }
    out.push_str("}\n");
    out
}
