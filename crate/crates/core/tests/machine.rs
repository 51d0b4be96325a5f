mod common;

use common::*;
use csynth::machine::cubes::cover;
use csynth::machine::*;
use csynth::pipeline::{synthesize, SynthesisOptions};
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet};

/// Same machine rooted at `s`.
fn rooted(m: &MealyMachine, s: usize) -> MealyMachine {
    MealyMachine::new(m.alphabet.clone(), m.num_states, s, m.transitions.clone())
}

/// Number of language classes among the states of a deterministic machine.
/// Distinct states of an `n`-state partial machine differ within `n` steps.
fn language_classes(m: &MealyMachine) -> usize {
    let langs: BTreeSet<BTreeSet<Vec<Letter>>> =
        (0..m.num_states).map(|s| bounded_language(&rooted(m, s), m.num_states + 1)).collect();
    langs.len()
}

#[test]
fn minimization_preserves_language_and_is_minimal() {
    let mut rng = rng(5);
    for i in 0..200 {
        let inputs = rng.gen_range(1..=2);
        let m = random_machine(&mut rng, 6, inputs, 1);
        assert!(m.is_deterministic());
        let min = minimize(&m);
        assert_eq!(bounded_language(&m, 5), bounded_language(&min, 5), "machine {i}");
        assert!(min.num_states <= m.num_states);
        assert_eq!(min.num_states, language_classes(&m), "machine {i}");
        assert_eq!(minimize(&min), min, "machine {i}");
    }
}

#[test]
fn identical_states_merge() {
    let alphabet = Alphabet::plain(&["a"], &[]);
    let ts = [
        Transition { from: 0, letter: 0, to: 1 },
        Transition { from: 0, letter: 1, to: 2 },
        Transition { from: 1, letter: 0, to: 1 },
        Transition { from: 2, letter: 0, to: 2 },
    ];
    let m = MealyMachine::new(alphabet, 3, 0, ts);
    let min = minimize(&m);
    assert_eq!(min.num_states, 2);
    assert_eq!(min.transitions.len(), 3);
}

#[test]
fn golden_machines_are_already_minimal() {
    for name in ["fig1.spec", "voting.spec", "erc20_extended.spec"] {
        let s = synth(name);
        assert_eq!(minimize(&s.machine), s.machine, "{name}");
    }
}

/// One state over input `a` and output `b`; `!a` admits both outputs.
fn toy() -> MealyMachine {
    let ts = [0b00, 0b10, 0b01].map(|letter| Transition { from: 0, letter, to: 0 });
    MealyMachine::new(Alphabet::plain(&["a"], &["b"]), 1, 0, ts)
}

#[test]
fn free_choice_is_detected_and_resolved() {
    let m = toy();
    let fc = detect_free_choices(&m);
    assert_eq!(fc.len(), 1);
    assert_eq!(fc[0].input, 0);
    assert_eq!(fc[0].outputs, [0b00, 0b10]);
    assert_eq!(fc[0].input_text, "!a");
    assert_eq!(fc[0].output_texts, ["!b", "b"]);

    let lo = resolve_free_choices(&m, FreeChoicePolicy::LexMin).unwrap();
    let hi = resolve_free_choices(&m, FreeChoicePolicy::LexMax).unwrap();
    assert_eq!(lo.letters(), [0b00, 0b01]);
    assert_eq!(hi.letters(), [0b01, 0b10]);
    for r in [&lo, &hi] {
        assert!(detect_free_choices(r).is_empty());
    }
    assert!(matches!(
        resolve_free_choices(&m, FreeChoicePolicy::Reject),
        Err(AnalysisError::FreeChoiceRemaining { .. })
    ));
}

#[test]
fn deterministic_outputs_have_no_free_choice() {
    let s = synth("voting.spec");
    assert!(detect_free_choices(&s.strategy).is_empty());
    assert_eq!(resolve_free_choices(&s.strategy, FreeChoicePolicy::Reject).unwrap(), s.strategy);
}

#[test]
fn fig1_flags_free_choice_in_first_state() {
    let s = synth("fig1.spec");
    assert_eq!(s.report.free_choice_states, ["s1"]);
    assert!(!s.report.free_choices.is_empty());
}

#[test]
fn resolution_leaves_one_output_per_input() {
    let mut rng = rng(6);
    for _ in 0..50 {
        let m = random_machine(&mut rng, 4, 1, 2);
        let r = resolve_free_choices(&m, FreeChoicePolicy::LexMin).unwrap();
        for ((s, input), ts) in r.by_input() {
            assert_eq!(ts.len(), 1, "state {s} input {input}");
        }
        // Every resolved prefix is one the original could take.
        assert!(bounded_language(&r, 4).is_subset(&bounded_language(&m, 4)));
    }
}

#[test]
fn constant_time_predicate_has_no_deadlock() {
    let s = synth("voting.spec");
    let d = BTreeMap::from([("time > cTime()".to_string(), DeterminedClass::Constant)]);
    assert!(detect_deadlocks(&s.machine, &d).unwrap().is_empty());
}

#[test]
fn frozen_predicate_can_deadlock() {
    // The only transition needs `!p`; once `p` is constantly true nothing is enabled.
    let m = MealyMachine::new(Alphabet::plain(&["p"], &[]), 1, 0, [Transition { from: 0, letter: 0, to: 0 }]);
    let d = BTreeMap::from([("p".to_string(), DeterminedClass::Constant)]);
    let found = detect_deadlocks(&m, &d).unwrap();
    assert_eq!(found.len(), 1);
    assert_eq!(found[0].state, "s1");
    assert_eq!(found[0].valuation, [("p".to_string(), true)]);
    assert!(detect_deadlocks(&m, &BTreeMap::new()).unwrap().is_empty());
}

#[test]
fn unknown_determined_prop_is_an_error() {
    let d = BTreeMap::from([("nope".to_string(), DeterminedClass::MethodOnly)]);
    assert_eq!(detect_deadlocks(&toy(), &d), Err(AnalysisError::UnknownProposition("nope".into())));
    let d = BTreeMap::from([("b".to_string(), DeterminedClass::MethodOnly)]);
    assert_eq!(detect_deadlocks(&toy(), &d), Err(AnalysisError::NotAnInput("b".into())));
}

fn edges(dot: &str) -> usize {
    dot.lines().filter(|l| l.contains(" -> ") && !l.contains("__start")).count()
}

#[test]
fn voting_dot_shape() {
    let s = synth("voting.spec");
    let dot = export_dot(&s.machine);
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("\"s1\";") && dot.contains("\"s2\";") && !dot.contains("\"s3\""));
    assert_eq!(edges(&dot), 3);
    assert_eq!(dot, export_dot(&synth("voting.spec").machine));
}

#[test]
fn machine_without_transitions_has_only_initial_node() {
    let m = MealyMachine::new(Alphabet::plain(&["a"], &[]), 1, 0, []);
    let dot = export_dot(&m);
    assert!(dot.contains("__start -> \"s1\""));
    assert_eq!(edges(&dot), 0);
}

#[test]
fn label_covers_exactly_the_letters() {
    let mut rng = rng(7);
    for _ in 0..200 {
        let letters: BTreeSet<Letter> = (0..16).filter(|_| rng.gen_bool(0.4)).collect();
        let cubes = cover(&letters, 0b1111);
        for l in 0..16 {
            assert_eq!(cubes.iter().any(|c| c.contains(l)), letters.contains(&l), "{letters:?}");
        }
    }
}

#[test]
fn reports_are_deterministic() {
    let opts = SynthesisOptions::default();
    let text = spec_text("erc20_extended.spec");
    let a = synthesize(&text, &opts).unwrap().report;
    let b = synthesize(&text, &opts).unwrap().report;
    assert_eq!(a.to_json(), b.to_json());
    let v: serde_json::Value = serde_json::from_str(&a.to_json()).unwrap();
    assert_eq!(v["states"], 4);
    assert_eq!(v["realizable"], true);
}
