//! Guarded subset construction per parameter subset.

use super::{
    check_irrelevant_predicates, check_local_updates, ParamSubset, ParamSubsetMachine,
    SplitError, SplitSystem, SubsetTransition,
};
use crate::machine::{Letter, MealyMachine};
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitConfig {
    /// Maximum number of knowledge states per subset machine.
    pub state_cap: usize,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig { state_cap: 10_000 }
    }
}

fn order_key(subset: &ParamSubset, prefix: &[String]) -> (usize, Vec<usize>) {
    let pos = subset
        .0
        .iter()
        .map(|p| prefix.iter().position(|q| q == p).unwrap_or(usize::MAX))
        .collect();
    (subset.0.len(), pos)
}

/// The parameter subset of the unique call on each transition.
fn call_subsets(m: &MealyMachine) -> Result<Vec<ParamSubset>, SplitError> {
    let calls = m.alphabet.call_mask();
    m.transitions
        .iter()
        .map(|t| {
            let bits = t.letter & calls;
            if bits.count_ones() != 1 {
                return Err(SplitError::MethodCall {
                    from: m.state_name(t.from),
                    to: m.state_name(t.to),
                    letter: t.letter,
                });
            }
            let k = bits.trailing_zeros() as usize;
            Ok(ParamSubset(m.alphabet.entries[k].params.clone()))
        })
        .collect()
}

/// Splits after verifying both structural requirements.
pub fn split(
    m: &MealyMachine,
    parameters: &[String],
    cfg: &SplitConfig,
) -> Result<SplitSystem, SplitError> {
    let report = check_local_updates(m).merge(check_irrelevant_predicates(m));
    if !report.holds() {
        return Err(SplitError::Requirements(report));
    }
    split_unchecked(m, parameters, cfg)
}

/// Splits without checking the requirements; only the one-call-per-
/// transition shape is enforced.
pub fn split_unchecked(
    m: &MealyMachine,
    parameters: &[String],
    cfg: &SplitConfig,
) -> Result<SplitSystem, SplitError> {
    let owners = call_subsets(m)?;
    let mut subsets: Vec<ParamSubset> =
        owners.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    subsets.sort_by_key(|s| order_key(s, parameters));
    let machines = subsets
        .iter()
        .map(|s| build(m, &owners, s, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SplitSystem { original: m.clone(), parameters: parameters.to_vec(), machines })
}

fn build(
    m: &MealyMachine,
    owners: &[ParamSubset],
    subset: &ParamSubset,
    cfg: &SplitConfig,
) -> Result<ParamSubsetMachine, SplitError> {
    let own: Vec<bool> = owners.iter().map(|o| o == subset).collect();
    let closure = |seed: &[usize]| -> Vec<usize> {
        let mut seen: BTreeSet<usize> = seed.iter().copied().collect();
        let mut stack: Vec<usize> = seed.to_vec();
        while let Some(s) = stack.pop() {
            let lo = m.transitions.partition_point(|t| t.from < s);
            for (k, t) in m.transitions.iter().enumerate().skip(lo) {
                if t.from != s {
                    break;
                }
                if !own[k] && seen.insert(t.to) {
                    stack.push(t.to);
                }
            }
        }
        seen.into_iter().collect()
    };

    let mut knowledge: Vec<Vec<usize>> = Vec::new();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut transitions = Vec::new();
    if m.num_states > 0 {
        let k0 = closure(&[m.initial()]);
        index.insert(k0.clone(), 0);
        knowledge.push(k0);
        queue.push_back(0);
    }
    while let Some(q) = queue.pop_front() {
        // letter -> [(source state, original target)]
        let mut moves: BTreeMap<Letter, Vec<(usize, usize)>> = BTreeMap::new();
        for &s in &knowledge[q] {
            let lo = m.transitions.partition_point(|t| t.from < s);
            for (k, t) in m.transitions.iter().enumerate().skip(lo) {
                if t.from != s {
                    break;
                }
                if own[k] {
                    moves.entry(t.letter).or_default().push((s, t.to));
                }
            }
        }
        // Determinization is over the letter alone; the guard records which
        // knowledge states actually have the move.
        for (letter, pairs) in moves {
            let guard: BTreeSet<usize> = pairs.iter().map(|p| p.0).collect();
            let targets: Vec<usize> = pairs.iter().map(|p| p.1).collect();
            let kt = closure(&targets);
            let to = match index.get(&kt) {
                Some(&id) => id,
                None => {
                    if knowledge.len() >= cfg.state_cap {
                        return Err(SplitError::StateCap {
                            subset: subset.to_string(),
                            cap: cfg.state_cap,
                        });
                    }
                    let id = knowledge.len();
                    index.insert(kt.clone(), id);
                    knowledge.push(kt);
                    queue.push_back(id);
                    id
                }
            };
            transitions.push(SubsetTransition { from: q, letter, guard, to });
        }
    }
    transitions.sort();
    Ok(ParamSubsetMachine {
        subset: subset.clone(),
        num_states: knowledge.len(),
        knowledge,
        transitions,
    })
}

/// Exhaustively checks the knowledge propositions on a split: guarded
/// outgoing transitions of each subset state coincide with those of its
/// knowledge states, targets stay consistent with knowledge labels, and
/// foreign machines' knowledge is closed under the move. Returns a
/// description of every violation.
pub fn check_knowledge(sys: &SplitSystem) -> Vec<String> {
    let w = &sys.original;
    let mut out = Vec::new();
    let owners = match call_subsets(w) {
        Ok(o) => o,
        Err(e) => return vec![e.to_string()],
    };
    for (i, mi) in sys.machines.iter().enumerate() {
        for q in 0..mi.num_states {
            let k = &mi.knowledge[q];
            for t in mi.outgoing(q) {
                if let Some(s) = t.guard.iter().find(|s| !k.contains(s)) {
                    out.push(format!(
                        "{} {}: guard in_{} outside knowledge",
                        mi.subset,
                        mi.state_name(q),
                        w.state_name(*s)
                    ));
                }
            }
            for &s in k {
                let expected: BTreeSet<Letter> = w
                    .transitions
                    .iter()
                    .zip(&owners)
                    .filter(|(t, o)| t.from == s && **o == mi.subset)
                    .map(|(t, _)| t.letter)
                    .collect();
                let present: BTreeSet<Letter> =
                    mi.outgoing(q).filter(|t| t.guard.contains(&s)).map(|t| t.letter).collect();
                if expected != present {
                    out.push(format!(
                        "{} {}: transitions of {} not mirrored",
                        mi.subset,
                        mi.state_name(q),
                        w.state_name(s)
                    ));
                }
                for t in mi.outgoing(q).filter(|t| t.guard.contains(&s)) {
                    let target = w.step(s, t.letter);
                    if !target.is_some_and(|s2| mi.knowledge[t.to].contains(&s2)) {
                        out.push(format!(
                            "{} {} -> {}: target knowledge misses successor of {}",
                            mi.subset,
                            mi.state_name(q),
                            mi.state_name(t.to),
                            w.state_name(s)
                        ));
                    }
                }
            }
        }
        for (x, t) in w.transitions.iter().enumerate() {
            if owners[x] != mi.subset {
                continue;
            }
            for (j, mj) in sys.machines.iter().enumerate() {
                if j == i {
                    continue;
                }
                for qj in 0..mj.num_states {
                    let kj = &mj.knowledge[qj];
                    if kj.contains(&t.from) && !kj.contains(&t.to) {
                        out.push(format!(
                            "{} {}: not closed under {} -> {}",
                            mj.subset,
                            mj.state_name(qj),
                            w.state_name(t.from),
                            w.state_name(t.to)
                        ));
                    }
                }
            }
        }
    }
    out
}
