#![allow(dead_code)]

use csynth::ltl::PastLtl;
use csynth::machine::{Alphabet, Letter, MealyMachine, Transition};
use csynth::pipeline::{synthesize, Synthesis, SynthesisOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x5eed;

/// Seed for randomized tests, overridable through `CSYNTH_SEED`.
pub fn seed() -> u64 {
    std::env::var("CSYNTH_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED)
}

pub fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed() ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

pub fn spec_path(name: &str) -> String {
    format!("{}/../../specs/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn spec_text(name: &str) -> String {
    std::fs::read_to_string(spec_path(name)).unwrap()
}

pub fn synth(name: &str) -> Synthesis {
    synthesize(&spec_text(name), &SynthesisOptions::default()).unwrap()
}

/// Random formula with `depth() <= depth` over propositions `0..props`.
pub fn random_formula(rng: &mut impl Rng, props: usize, depth: usize) -> PastLtl {
    if depth <= 1 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..10) {
            0 => PastLtl::True,
            1 => PastLtl::False,
            _ => PastLtl::prop(rng.gen_range(0..props)),
        };
    }
    let op = rng.gen_range(0..11);
    let mut sub = || Box::new(random_formula(rng, props, depth - 1));
    match op {
        0 => PastLtl::Not(sub()),
        1 => PastLtl::And(sub(), sub()),
        2 => PastLtl::Or(sub(), sub()),
        3 => PastLtl::Implies(sub(), sub()),
        4 => PastLtl::Iff(sub(), sub()),
        5 => PastLtl::Yesterday(sub()),
        6 => PastLtl::WeakYesterday(sub()),
        7 | 8 => PastLtl::Since(sub(), sub()),
        9 => PastLtl::Once(sub()),
        _ => PastLtl::Historically(sub()),
    }
}

/// All letter sequences of length `len` over `bits` propositions.
pub fn all_traces(bits: usize, len: usize) -> impl Iterator<Item = Vec<Letter>> {
    let mask = (1u64 << bits) - 1;
    (0..1u64 << (bits * len)).map(move |code| (0..len).map(|i| code >> (i * bits) & mask).collect())
}

/// Random partial deterministic machine over `inputs` + `outputs` plain
/// propositions.
pub fn random_machine(rng: &mut impl Rng, max_states: usize, inputs: usize, outputs: usize) -> MealyMachine {
    let names_in: Vec<String> = (0..inputs).map(|i| format!("i{i}")).collect();
    let names_out: Vec<String> = (0..outputs).map(|i| format!("o{i}")).collect();
    let ins: Vec<&str> = names_in.iter().map(String::as_str).collect();
    let outs: Vec<&str> = names_out.iter().map(String::as_str).collect();
    let alphabet = Alphabet::plain(&ins, &outs);
    let n = rng.gen_range(1..=max_states);
    let letters = 1u64 << (inputs + outputs);
    let mut ts = Vec::new();
    for from in 0..n {
        for letter in 0..letters {
            if rng.gen_bool(0.45) {
                ts.push(Transition { from, letter, to: rng.gen_range(0..n) });
            }
        }
    }
    MealyMachine::new(alphabet, n, 0, ts)
}

/// Every accepted trace of length at most `depth`.
pub fn bounded_language(m: &MealyMachine, depth: usize) -> std::collections::BTreeSet<Vec<Letter>> {
    let mut out = std::collections::BTreeSet::new();
    if m.num_states == 0 {
        out.insert(Vec::new());
        return out;
    }
    let mut frontier = vec![(m.initial(), Vec::new())];
    out.insert(Vec::new());
    for _ in 0..depth {
        let mut next = Vec::new();
        for (s, trace) in frontier {
            for t in m.outgoing(s) {
                let mut tr: Vec<Letter> = trace.clone();
                tr.push(t.letter);
                out.insert(tr.clone());
                next.push((t.to, tr));
            }
        }
        frontier = next;
    }
    out
}
