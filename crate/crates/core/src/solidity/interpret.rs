//! Replays the dispatch logic recorded in a manifest.

use super::{Manifest, SolidityError};
use crate::machine::Letter;
use crate::split::{InstanceProduct, SplitSystem};
use std::collections::BTreeSet;

/// Contract state: per machine, the state of every instantiated tuple.
pub type Storage = Vec<Vec<usize>>;

#[derive(Debug, Clone)]
pub struct Interpreter {
    pub manifest: Manifest,
    domain: usize,
    positions: Vec<Vec<usize>>,
}

impl Interpreter {
    pub fn from_json(text: &str, domain: usize) -> Result<Self, SolidityError> {
        let manifest: Manifest =
            serde_json::from_str(text).map_err(|e| SolidityError::Manifest(e.to_string()))?;
        let mut positions = Vec::new();
        for m in &manifest.machines {
            let mut pos = Vec::new();
            for p in &m.subset {
                let k = manifest
                    .parameters
                    .iter()
                    .position(|q| q == p)
                    .ok_or_else(|| SolidityError::Manifest(format!("unknown parameter `{p}`")))?;
                pos.push(k);
            }
            positions.push(pos);
        }
        Ok(Interpreter { manifest, domain, positions })
    }

    fn slot(&self, machine: usize, instance: &[usize]) -> usize {
        self.positions[machine].iter().fold(0, |acc, &p| acc * self.domain + instance[p])
    }

    pub fn initial(&self) -> Storage {
        self.positions.iter().map(|p| vec![0; self.domain.pow(p.len() as u32)]).collect()
    }

    /// Executes `method` for `instance` with the given non-call inputs;
    /// `None` means the call reverts.
    pub fn call(
        &self,
        storage: &Storage,
        method: &str,
        instance: &[usize],
        inputs: Letter,
    ) -> Option<(Storage, Letter)> {
        let m = self.manifest.methods.iter().find(|m| m.name == method)?;
        let i = m.machine?;
        let slot = self.slot(i, instance);
        let q = storage[i][slot];
        for b in &m.branches {
            if b.from != q {
                continue;
            }
            let combo: Vec<usize> =
                b.ancestors.iter().map(|&j| storage[j][self.slot(j, instance)]).collect();
            if !b.combinations.contains(&combo) {
                continue;
            }
            if !b.inputs.iter().any(|&(care, value)| inputs & care == value) {
                continue;
            }
            let mut next = storage.clone();
            next[i][slot] = b.to;
            return Some((next, b.outputs));
        }
        None
    }
}

/// Compares the manifest's dispatch with the instance product on every
/// reachable product state, instance, method and predicate valuation.
/// Returns a description of each disagreement.
pub fn check_conformance(
    manifest_json: &str,
    sys: &SplitSystem,
    product: &InstanceProduct,
) -> Result<Vec<String>, SolidityError> {
    let interp = Interpreter::from_json(manifest_json, product.domain)?;
    let a = &sys.original.alphabet;
    let preds = a.input_mask() & !a.call_mask();
    let omask = a.output_mask();
    let imask = a.input_mask();
    let valuations: Vec<Letter> = (0..1u64 << preds.count_ones())
        .map(|n| {
            let mut v = 0;
            let mut bits = preds;
            let mut k = 0;
            while bits != 0 {
                let b = bits & bits.wrapping_neg();
                if n >> k & 1 == 1 {
                    v |= b;
                }
                bits &= bits - 1;
                k += 1;
            }
            v
        })
        .collect();
    let mut out = Vec::new();
    for (s, state) in product.states.iter().enumerate() {
        for mu in &product.instances {
            for m in &interp.manifest.methods {
                for &v in &valuations {
                    let input = v | 1 << m.call;
                    let got = interp.call(&state.funcs, &m.name, &mu.0, v);
                    let expected: BTreeSet<(Storage, Letter)> = product
                        .outgoing(s)
                        .filter(|t| t.mover == *mu)
                        .filter_map(|t| {
                            let letter = sys.machines[t.machine].transitions[t.sub_transition].letter;
                            (letter & imask == input)
                                .then(|| (product.states[t.to].funcs.clone(), letter & omask))
                        })
                        .collect();
                    let agrees = match &got {
                        None => expected.is_empty(),
                        Some(r) => expected.len() == 1 && expected.contains(r),
                    };
                    if !agrees {
                        out.push(format!(
                            "state {s}, instance {}, {} with {{{}}}: contract {}, product {} option(s)",
                            product.instance_text(mu),
                            m.name,
                            a.names(v).join(", "),
                            if got.is_some() { "accepts" } else { "reverts" },
                            expected.len()
                        ));
                    }
                }
            }
        }
    }
    Ok(out)
}
