//! Per-transition independence of subset machines from foreign state.

use super::{ParamSubset, SplitSystem};
use serde::Serialize;
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndependenceFailure {
    pub subset: ParamSubset,
    pub from: String,
    pub to: String,
    pub label: String,
    /// States of the ancestor machines in this combination.
    pub combination: Vec<(ParamSubset, String)>,
    /// Combined knowledge, intersected over the machine and the combination.
    pub knowledge: Vec<String>,
    pub guard: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IndependenceReport {
    /// Verdict per machine, per transition (in the machine's order).
    pub verdicts: Vec<Vec<bool>>,
    pub failures: Vec<IndependenceFailure>,
}

impl IndependenceReport {
    pub fn independent(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn checked(&self) -> usize {
        self.verdicts.iter().map(Vec::len).sum()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} of {} transitions independent\n",
            self.checked() - self.verdicts.iter().flatten().filter(|v| !**v).count(),
            self.checked()
        );
        for f in &self.failures {
            let combo: Vec<String> = f.combination.iter().map(|(s, q)| format!("{s}:{q}")).collect();
            out.push_str(&format!(
                "{} {} -> {} on {}: with [{}] knowledge {{{}}} vs guard {{{}}}\n",
                f.subset,
                f.from,
                f.to,
                f.label,
                combo.join(", "),
                f.knowledge.join(", "),
                f.guard.join(", ")
            ));
        }
        out
    }
}

/// Checks every transition against every state combination of the machines
/// for proper parameter subsets: the combined knowledge must lie inside the
/// guard or be disjoint from it.
pub fn check_independence(sys: &SplitSystem) -> IndependenceReport {
    let mut report = IndependenceReport::default();
    let names = |ks: &BTreeSet<usize>| -> Vec<String> {
        ks.iter().map(|&s| sys.original.state_name(s)).collect()
    };
    for (i, mi) in sys.machines.iter().enumerate() {
        let anc = sys.ancestors(i);
        let mut verdicts = Vec::with_capacity(mi.transitions.len());
        for t in &mi.transitions {
            let mut ok = true;
            for combo in sys.state_combinations(&anc) {
                let x = sys.combined_knowledge(i, t.from, &anc, &combo);
                if !x.is_subset(&t.guard) && !x.is_disjoint(&t.guard) {
                    ok = false;
                    report.failures.push(IndependenceFailure {
                        subset: mi.subset.clone(),
                        from: mi.state_name(t.from),
                        to: mi.state_name(t.to),
                        label: sys.original.alphabet.render_letter(t.letter),
                        combination: anc
                            .iter()
                            .zip(&combo)
                            .map(|(&j, &q)| {
                                (sys.machines[j].subset.clone(), sys.machines[j].state_name(q))
                            })
                            .collect(),
                        knowledge: names(&x),
                        guard: names(&t.guard),
                    });
                }
            }
            verdicts.push(ok);
        }
        report.verdicts.push(verdicts);
    }
    report
}
