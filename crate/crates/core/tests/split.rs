mod common;

use common::*;
use csynth::ltl::Role;
use csynth::machine::{Alphabet, AlphabetEntry, MealyMachine, Transition};
use csynth::pipeline::{synthesize, Synthesis, SynthesisOptions};
use csynth::split::*;
use std::collections::BTreeSet;

fn entry(name: &str, role: Role, method: Option<&str>, cell: Option<&str>, params: &[&str]) -> AlphabetEntry {
    AlphabetEntry {
        name: name.into(),
        role,
        method: method.map(Into::into),
        self_update: false,
        cell: cell.map(Into::into),
        params: params.iter().map(|p| p.to_string()).collect(),
        display: name.into(),
    }
}

fn params(ps: &[&str]) -> Vec<String> {
    ps.iter().map(|p| p.to_string()).collect()
}

fn split_of(s: &Synthesis) -> SplitSystem {
    split(&s.strategy, &s.spec.parameters, &SplitConfig::default()).unwrap()
}

fn knowledge(sys: &SplitSystem, subset: &[&str]) -> Vec<Vec<String>> {
    let i = sys.machine_for(&ParamSubset(params(subset))).unwrap();
    (0..sys.machines[i].num_states).map(|q| sys.knowledge_names(i, q)).collect()
}

fn s(names: &[&str]) -> Vec<String> {
    params(names)
}

#[test]
fn update_over_other_parameters_violates_local_updates() {
    // The update is over (m) while the call is over (m, n).
    let alphabet = Alphabet {
        entries: vec![
            entry("call_t", Role::Input, Some("t"), None, &["m", "n"]),
            entry("upd_c", Role::Output, None, Some("c"), &["m"]),
        ],
    };
    let m = MealyMachine::new(alphabet, 1, 0, [Transition { from: 0, letter: 0b11, to: 0 }]);
    let r = check_local_updates(&m);
    assert_eq!(r.violations.len(), 1);
    let v = &r.violations[0];
    assert_eq!(v.requirement, Requirement::LocalUpdates);
    assert_eq!(v.transition, Transition { from: 0, letter: 0b11, to: 0 });
    assert_eq!(v.proposition, "upd_c");
    assert!(matches!(
        split(&m, &params(&["m", "n"]), &SplitConfig::default()),
        Err(SplitError::Requirements(_))
    ));
}

#[test]
fn self_updates_satisfy_local_updates() {
    let mut e = entry("keep_c", Role::Output, None, Some("c"), &["m"]);
    e.self_update = true;
    let alphabet = Alphabet { entries: vec![entry("call_t", Role::Input, Some("t"), None, &[]), e] };
    let m = MealyMachine::new(alphabet, 1, 0, [Transition { from: 0, letter: 0b11, to: 0 }]);
    assert!(check_local_updates(&m).holds());
}

#[test]
fn foreign_predicate_violates_irrelevance() {
    // A call over (m) whose target depends on a predicate over (n).
    let alphabet = Alphabet {
        entries: vec![
            entry("go", Role::Input, Some("go"), None, &["m"]),
            entry("p_n", Role::Input, None, None, &["n"]),
            entry("b", Role::Output, None, None, &[]),
        ],
    };
    let ts = [
        Transition { from: 0, letter: 0b011, to: 1 },
        Transition { from: 0, letter: 0b001, to: 0 },
        Transition { from: 1, letter: 0b001, to: 1 },
        Transition { from: 1, letter: 0b011, to: 1 },
    ];
    let m = MealyMachine::new(alphabet, 2, 0, ts);
    let r = check_irrelevant_predicates(&m);
    assert_eq!(r.violations.len(), 2);
    assert!(r.violations.iter().all(|v| v.requirement == Requirement::IrrelevantPredicates && v.from == "s1"));
    assert!(r.to_text().contains("p_n"));
}

#[test]
fn golden_machines_meet_both_requirements() {
    for name in ["voting.spec", "param_voting.spec", "erc20_extended.spec"] {
        let s = synth(name);
        assert!(check_local_updates(&s.strategy).holds(), "{name}");
        assert!(check_irrelevant_predicates(&s.strategy).holds(), "{name}");
    }
}

#[test]
fn erc20_split_knowledge() {
    let sys = split_of(&synth("erc20_extended.spec"));
    assert_eq!(sys.machines.len(), 3);
    assert_eq!(knowledge(&sys, &[]), [s(&["s1", "s2"]), s(&["s3", "s4"])]);
    assert_eq!(knowledge(&sys, &["m"]), [s(&["s1", "s3"]), s(&["s2", "s4"])]);
    assert_eq!(knowledge(&sys, &["m", "n"]), [s(&["s1", "s2", "s3", "s4"])]);
    assert!(check_knowledge(&sys).is_empty());
}

#[test]
fn unparameterized_split_is_the_machine_itself() {
    let s = synth("voting.spec");
    let sys = split_of(&s);
    assert_eq!(sys.machines.len(), 1);
    let m = &sys.machines[0];
    assert!(m.subset.is_empty());
    assert_eq!(m.num_states, s.strategy.num_states);
    assert!(m.knowledge.iter().all(|k| k.len() == 1));
    assert_eq!(m.transitions.len(), s.strategy.transitions.len());
    assert!(check_knowledge(&sys).is_empty());
    let report = check_independence(&sys);
    assert!(report.independent());
    assert_eq!(report.checked(), m.transitions.len());
}

#[test]
fn transitions_partition_over_subsets() {
    for name in ["voting.spec", "param_voting.spec", "erc20_extended.spec"] {
        let sys = split_of(&synth(name));
        let total: usize = (0..sys.machines.len()).map(|i| sys.represented_transitions(i).len()).sum();
        assert_eq!(total, sys.original.transitions.len(), "{name}");
        let union: BTreeSet<Transition> =
            (0..sys.machines.len()).flat_map(|i| sys.represented_transitions(i)).collect();
        assert_eq!(union.len(), total, "{name}");
    }
}

#[test]
fn forbidden_method_has_no_transition() {
    let text = "#methods go, stop\n#require\nG(!stop)\n";
    let s = synthesize(text, &SynthesisOptions::default()).unwrap();
    let sys = split_of(&s);
    let stop = sys.original.alphabet.entries.iter().position(|e| e.method.as_deref() == Some("stop")).unwrap();
    assert!(sys.machines.iter().all(|m| m.transitions.iter().all(|t| t.letter >> stop & 1 == 0)));
    assert!(!sys.machines[0].transitions.is_empty());
}

#[test]
fn erc20_split_is_independent() {
    let sys = split_of(&synth("erc20_extended.spec"));
    let r = check_independence(&sys);
    assert!(r.independent(), "{}", r.to_text());
    assert_eq!(r.checked(), sys.machines.iter().map(|m| m.transitions.len()).sum::<usize>());
}

#[test]
fn dropping_the_pause_machine_breaks_independence() {
    let mut sys = split_of(&synth("erc20_extended.spec"));
    let root = sys.machine_for(&ParamSubset(Vec::new())).unwrap();
    sys.machines.remove(root);
    let r = check_independence(&sys);
    assert!(!r.independent());
    let f = &r.failures[0];
    assert_eq!(f.subset, ParamSubset(params(&["m"])));
    assert!(!f.knowledge.is_empty() && !f.guard.is_empty());
    assert!(r.to_text().contains(&f.from));
}

fn product(sys: &SplitSystem, domain: usize) -> InstanceProduct {
    build_instance_product(sys, &ProductConfig { domain, ..Default::default() }).unwrap()
}

#[test]
fn single_value_domain_reproduces_the_machine() {
    let sys = split_of(&synth("erc20_extended.spec"));
    let p = product(&sys, 1);
    assert_eq!(p.instances.len(), 1);
    assert_eq!(p.states.len(), sys.original.num_states);
    assert!(check_lemma1(&sys, &p, 6).is_equivalent());
}

fn call_bit(p: &InstanceProduct, method: &str) -> usize {
    p.alphabet().entries.iter().position(|e| e.is_call() && e.method.as_deref() == Some(method)).unwrap()
}

/// Whether some transition out of `s` calls `method` as instance `mu`.
fn can_call(p: &InstanceProduct, s: usize, method: &str, mu: &Instance) -> bool {
    let k = call_bit(p, method);
    p.outgoing(s).any(|t| &t.mover == mu && p.project(&t.label, mu) >> k & 1 == 1)
}

#[test]
fn local_pause_affects_only_its_owner() {
    let sys = split_of(&synth("erc20_extended.spec"));
    let p = product(&sys, 2);
    let pause = call_bit(&p, "localPause");
    let first = Instance(vec![0, 0]);
    let t = p
        .outgoing(0)
        .find(|t| t.mover == first && p.project(&t.label, &first) >> pause & 1 == 1)
        .expect("localPause enabled initially");
    let after = t.to;
    for n in 0..2 {
        assert!(can_call(&p, 0, "transfer", &Instance(vec![0, n])));
        assert!(!can_call(&p, after, "transfer", &Instance(vec![0, n])), "m=1 n={}", n + 1);
        assert!(can_call(&p, after, "transfer", &Instance(vec![1, n])), "m=2 n={}", n + 1);
    }
}

#[test]
fn product_makes_progress_with_single_calls() {
    for name in ["param_voting.spec", "erc20_extended.spec"] {
        let sys = split_of(&synth(name));
        let p = product(&sys, 2);
        assert!(check_progress(&sys, &p).is_empty(), "{name}");
        assert_eq!(p.single_call_violations(), 0, "{name}");
    }
}

#[test]
fn product_matches_original_per_instance() {
    let sys = split_of(&synth("erc20_extended.spec"));
    let p = product(&sys, 2);
    let v = check_lemma1(&sys, &p, 5);
    assert!(matches!(v, Lemma1Verdict::Equivalent { instances: 4, .. }), "{}", v.to_text());
    assert!(check_lemma1(&sys, &p, 6).is_equivalent());
    assert!(check_lemma1(&sys, &p, 0).is_equivalent());
    let sys = split_of(&synth("param_voting.spec"));
    assert!(check_lemma1(&sys, &product(&sys, 2), 5).is_equivalent());
}

#[test]
fn corrupted_knowledge_yields_witness() {
    let mut sys = split_of(&synth("erc20_extended.spec"));
    sys.set_knowledge("{}:q2=s1,s4").unwrap();
    let p = product(&sys, 2);
    match check_lemma1(&sys, &p, 5) {
        Lemma1Verdict::Witness(w) => {
            assert!(!w.letter.is_empty());
            assert!(Lemma1Verdict::Witness(w).to_text().starts_with("witness for instance"));
        }
        v => panic!("expected witness, got {}", v.to_text()),
    }
}

#[test]
fn malformed_overrides_are_rejected() {
    let mut sys = split_of(&synth("erc20_extended.spec"));
    for bad in ["nonsense", "{}:q9=s1", "{}:q1=s9", "{x}:q1=s1", "{}:q1=t1"] {
        assert!(matches!(sys.set_knowledge(bad), Err(SplitError::BadOverride(_))), "{bad}");
    }
    assert!(matches!(
        build_instance_product(&sys, &ProductConfig { domain: 0, ..Default::default() }),
        Err(SplitError::EmptyDomain)
    ));
}

#[test]
fn split_dot_shows_knowledge() {
    let sys = split_of(&synth("erc20_extended.spec"));
    let root = sys.machine_for(&ParamSubset(Vec::new())).unwrap();
    let dot = export_split_dot(&sys, root);
    assert!(dot.contains("K = {s1, s2}"));
    assert!(dot.contains("K = {s3, s4}"));
    assert!(dot.contains("in_s"));
    assert_eq!(dot, export_split_dot(&split_of(&synth("erc20_extended.spec")), root));
}
