//! Hopcroft partition refinement for partial machines.
//!
//! Missing transitions go to an implicit rejecting sink, so two states are
//! merged iff they accept the same finite letter sequences.

use super::{Letter, MealyMachine, Transition};
use std::collections::{BTreeMap, BTreeSet};

pub fn minimize(m: &MealyMachine) -> MealyMachine {
    if m.num_states == 0 {
        return m.clone();
    }
    let letters: Vec<Letter> = m.letters();
    let letter_ix: BTreeMap<Letter, usize> =
        letters.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let n = m.num_states + 1;
    let sink = m.num_states;

    // delta[q][a]; inverse[a][q] lists predecessors of q on a.
    let mut delta = vec![vec![sink; letters.len()]; n];
    for t in &m.transitions {
        delta[t.from][letter_ix[&t.letter]] = t.to;
    }
    let mut inverse = vec![vec![Vec::new(); n]; letters.len()];
    for (q, row) in delta.iter().enumerate() {
        for (a, &to) in row.iter().enumerate() {
            inverse[a][to].push(q);
        }
    }

    let mut block_of = vec![0usize; n];
    let mut blocks: Vec<Vec<usize>> = vec![(0..m.num_states).collect()];
    block_of[sink] = 1;
    blocks.push(vec![sink]);
    let mut worklist: BTreeSet<usize> = BTreeSet::from([1]);

    while let Some(splitter) = worklist.pop_first() {
        let members = blocks[splitter].clone();
        for a in 0..letters.len() {
            let preds: BTreeSet<usize> =
                members.iter().flat_map(|&q| inverse[a][q].iter().copied()).collect();
            if preds.is_empty() {
                continue;
            }
            let touched: BTreeSet<usize> = preds.iter().map(|&q| block_of[q]).collect();
            for b in touched {
                let (inside, outside): (Vec<usize>, Vec<usize>) =
                    blocks[b].iter().partition(|q| preds.contains(q));
                if inside.is_empty() || outside.is_empty() {
                    continue;
                }
                let new = blocks.len();
                let (keep, moved) = if inside.len() <= outside.len() {
                    (outside, inside)
                } else {
                    (inside, outside)
                };
                for &q in &moved {
                    block_of[q] = new;
                }
                blocks[b] = keep;
                blocks.push(moved);
                // If `b` is pending both halves stay pending; otherwise the
                // smaller half, which is the moved one, suffices.
                worklist.insert(new);
            }
        }
    }

    let sink_block = block_of[sink];
    let initial_block = block_of[m.initial()];
    let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
    for q in 0..m.num_states {
        let b = block_of[q];
        if b != sink_block {
            let next = ids.len();
            ids.entry(b).or_insert(next);
        }
    }
    let mut transitions = BTreeSet::new();
    for t in &m.transitions {
        let (bf, bt) = (block_of[t.from], block_of[t.to]);
        transitions.insert(Transition { from: ids[&bf], letter: t.letter, to: ids[&bt] });
    }
    MealyMachine::new(m.alphabet.clone(), ids.len(), ids[&initial_block], transitions)
        .with_prefix(&m.state_prefix)
}
