//! Small two-level covers of letter sets, used for readable labels.

use super::{Alphabet, Letter};
use crate::ltl::Role;
use std::collections::BTreeSet;

/// A conjunction of literals: bits in `care` are fixed to their value in `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cube {
    pub care: u64,
    pub value: u64,
}

impl Cube {
    pub fn contains(&self, letter: Letter) -> bool {
        letter & self.care == self.value
    }

    pub fn literals(&self) -> u32 {
        self.care.count_ones()
    }
}

/// Prime implicants of `minterms` (letters restricted to `bits`).
pub fn prime_implicants(minterms: &BTreeSet<Letter>, bits: u64) -> Vec<Cube> {
    let mut current: BTreeSet<Cube> =
        minterms.iter().map(|&m| Cube { care: bits, value: m & bits }).collect();
    let mut primes = BTreeSet::new();
    while !current.is_empty() {
        let mut merged_any = BTreeSet::new();
        let mut next = BTreeSet::new();
        for c in &current {
            let mut rest = c.care;
            while rest != 0 {
                let bit = rest & rest.wrapping_neg();
                rest &= rest - 1;
                let twin = Cube { care: c.care, value: c.value ^ bit };
                if current.contains(&twin) {
                    merged_any.insert(*c);
                    next.insert(Cube { care: c.care & !bit, value: c.value & !bit });
                }
            }
        }
        for c in &current {
            if !merged_any.contains(c) {
                primes.insert(*c);
            }
        }
        current = next;
    }
    primes.into_iter().collect()
}

/// Greedy cover of `minterms` by prime implicants; deterministic.
pub fn cover(minterms: &BTreeSet<Letter>, bits: u64) -> Vec<Cube> {
    let restricted: BTreeSet<Letter> = minterms.iter().map(|m| m & bits).collect();
    let primes = prime_implicants(&restricted, bits);
    let mut uncovered = restricted;
    let mut out = Vec::new();
    while !uncovered.is_empty() {
        let best = primes
            .iter()
            .max_by_key(|p| {
                let gain = uncovered.iter().filter(|m| p.contains(**m)).count();
                (gain, std::cmp::Reverse(p.literals()), std::cmp::Reverse(**p))
            })
            .copied()
            .expect("primes cover every minterm");
        uncovered.retain(|m| !best.contains(*m));
        out.push(best);
    }
    out.sort();
    out
}

/// Renders a cube as `inputs | outputs`. Negated method calls and negated
/// updates of a cell are dropped when a positive literal of the same kind
/// makes them implied.
pub fn render_cube(alphabet: &Alphabet, cube: &Cube) -> String {
    let positive_call = alphabet
        .entries
        .iter()
        .enumerate()
        .any(|(k, e)| e.is_call() && cube.care >> k & 1 == 1 && cube.value >> k & 1 == 1);
    let positive_cells: BTreeSet<&str> = alphabet
        .entries
        .iter()
        .enumerate()
        .filter(|(k, _)| cube.care >> k & 1 == 1 && cube.value >> k & 1 == 1)
        .filter_map(|(_, e)| e.cell.as_deref())
        .collect();
    let mut ins = Vec::new();
    let mut outs = Vec::new();
    for (k, e) in alphabet.entries.iter().enumerate() {
        if cube.care >> k & 1 == 0 {
            continue;
        }
        let positive = cube.value >> k & 1 == 1;
        if !positive {
            if e.is_call() && positive_call {
                continue;
            }
            if e.cell.as_deref().is_some_and(|c| positive_cells.contains(c)) {
                continue;
            }
        }
        let lit = if positive {
            e.display.clone()
        } else if e.display.contains(' ') {
            format!("!({})", e.display)
        } else {
            format!("!{}", e.display)
        };
        match e.role {
            Role::Input => ins.push(lit),
            Role::Output => outs.push(lit),
        }
    }
    let side = |v: Vec<String>| if v.is_empty() { "true".to_string() } else { v.join(" && ") };
    format!("{} | {}", side(ins), side(outs))
}
