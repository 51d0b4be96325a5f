use super::SplitSystem;
use crate::machine::dot::{escape, header, letters_label};
use crate::machine::Letter;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

/// DOT rendering of one subset machine. Nodes carry their knowledge sets;
/// edge labels start with the guard disjunction.
pub fn export_split_dot(sys: &SplitSystem, machine: usize) -> String {
    let m = &sys.machines[machine];
    let mut out = String::new();
    header(&mut out, &format!("split {}", m.subset), &m.state_name(0));
    for q in 0..m.num_states {
        let _ = writeln!(
            out,
            "  \"{}\" [label=\"{}\\nK = {{{}}}\"];",
            m.state_name(q),
            m.state_name(q),
            sys.knowledge_names(machine, q).join(", ")
        );
    }
    let guards = sys.guard_names();
    let mut edges: BTreeMap<(usize, usize, &BTreeSet<usize>), BTreeSet<Letter>> = BTreeMap::new();
    for t in &m.transitions {
        edges.entry((t.from, t.to, &t.guard)).or_default().insert(t.letter);
    }
    for ((from, to, guard), letters) in edges {
        let g: Vec<&str> = guard.iter().map(|&s| guards[s].as_str()).collect();
        let g = if g.len() == 1 { g[0].to_string() } else { format!("({})", g.join(" || ")) };
        let body: Vec<String> = letters_label(&sys.original.alphabet, &letters)
            .lines()
            .map(|l| format!("{g} && {l}"))
            .collect();
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}\"];",
            m.state_name(from),
            m.state_name(to),
            escape(&body.join("\n")).replace('\n', "\\n")
        );
    }
    out.push_str("}\n");
    out
}
