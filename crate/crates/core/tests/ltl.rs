mod common;

use common::*;
use csynth::frontend::{desugar, parse_spec, FunctionTerm, PredicateTerm};
use csynth::ltl::convert::predicate_prop;
use csynth::ltl::*;
use std::collections::{BTreeMap, BTreeSet};

fn table_names(t: &PropTable) -> Vec<&str> {
    t.props().iter().map(|p| p.name.as_str()).collect()
}

#[test]
fn predicate_and_update_slugs() {
    let spec = parse_spec("#cells x\n#functions f/1\n#predicates p/1\n#require\np(x)\n#obligation\n[[x <- f(x)]]\n")
        .unwrap();
    let a = approximate(&desugar(&spec).unwrap());
    let p = a.table.get(a.table.by_name("a_p_x").unwrap());
    assert_eq!(p.role, Role::Input);
    let u = a.table.get(a.table.by_name("a_x_to_f_x").unwrap());
    assert_eq!(u.role, Role::Output);
    assert!(!u.self_update);
    assert_eq!(u.cell.as_deref(), Some("x"));
}

#[test]
fn parameterized_comparison_keeps_parameters() {
    let a = approximate(&desugar(&parse_spec(&spec_text("erc20_extended.spec")).unwrap()).unwrap());
    let id = a.table.by_display("approved(m, n) >= arg@amount").unwrap();
    let p = a.table.get(id);
    assert_eq!(p.role, Role::Input);
    assert_eq!(p.params, ["m", "n"]);
    assert_eq!(a.table.get(a.table.by_display("suffFunds(m, arg@amount)").unwrap()).params, ["m"]);
    assert_eq!(a.table.get(a.table.by_display("pause").unwrap()).params, Vec::<String>::new());
}

#[test]
fn converting_true_gives_empty_table() {
    let spec = parse_spec("").unwrap();
    let (f, t) = syntactic_conversion(&csynth::frontend::PastTslFormula::True, &spec);
    assert_eq!(f, PastLtl::True);
    assert!(t.is_empty());
}

fn single_step(f: &PastLtl, letter: u64) -> bool {
    eval_trace(f, &Trace::from_letters(&[letter]), 0).unwrap()
}

#[test]
fn voters_updates_are_exclusive() {
    let a = approximate(&desugar(&parse_spec(&spec_text("voting.spec")).unwrap()).unwrap());
    let u1 = a.table.by_display("[[voters <- add(sender, voters)]]").unwrap().0;
    let u2 = a.table.by_display("[[voters <- voters]]").unwrap().0;
    for v in 0..4u64 {
        let letter = (v & 1) << u1 | (v >> 1 & 1) << u2;
        assert_eq!(single_step(&a.cell_updates, letter), v.count_ones() == 1, "valuation {v:02b}");
    }
}

#[test]
fn single_update_is_forced() {
    let spec = parse_spec("#cells c\n").unwrap();
    let a = approximate(&desugar(&spec).unwrap());
    assert_eq!(a.table.len(), 1);
    assert!(a.table.props()[0].self_update);
    assert_eq!(a.cell_updates, PastLtl::prop(0));
    assert_eq!(cell_updates(&BTreeMap::new(), &PropTable::default()), PastLtl::True);
}

#[test]
fn fig1_alphabet() {
    let a = approximate(&desugar(&parse_spec(&spec_text("fig1.spec")).unwrap()).unwrap());
    assert_eq!(table_names(&a.table), ["a", "b"]);
    assert_eq!(a.table.get(PropId(0)).role, Role::Input);
    assert_eq!(a.table.get(PropId(1)).role, Role::Output);
}

#[test]
fn voting_alphabet_sizes() {
    let a = approximate(&desugar(&parse_spec(&spec_text("voting.spec")).unwrap()).unwrap());
    assert_eq!(a.table.num_inputs(), 6);
    assert_eq!(a.table.len() - a.table.num_inputs(), 2);
    let calls = a.table.props().iter().filter(|p| p.is_call()).count();
    assert_eq!(calls, 3);
}

#[test]
fn empty_spec_approximates_to_true() {
    let a = approximate(&parse_spec("").unwrap());
    assert!(a.table.is_empty());
    for f in [&a.formula, &a.antecedent, &a.consequent] {
        assert!(single_step(f, 0));
    }
}

#[test]
fn eval_trace_examples() {
    let a = PastLtl::prop(0);
    let b = PastLtl::prop(1);
    let y = PastLtl::Yesterday(Box::new(a.clone()));
    assert!(!eval_trace(&y, &Trace::from_letters(&[1, 1]), 0).unwrap());
    assert!(eval_trace(&y, &Trace::from_letters(&[1, 1]), 1).unwrap());
    let wy = PastLtl::WeakYesterday(Box::new(PastLtl::False));
    assert!(eval_trace(&wy, &Trace::from_letters(&[0, 0]), 0).unwrap());
    assert!(!eval_trace(&wy, &Trace::from_letters(&[0, 0]), 1).unwrap());
    let since = PastLtl::Since(Box::new(a.clone()), Box::new(b));
    assert!(eval_trace(&since, &Trace::from_letters(&[0b10, 0b01, 0b01]), 2).unwrap());
    assert!(!eval_trace(&since, &Trace::from_letters(&[0b10, 0b00, 0b01]), 2).unwrap());
    let never = PastLtl::Historically(Box::new(PastLtl::not(a)));
    let t = Trace::from_letters(&[0, 0, 0, 0]);
    assert!((0..4).all(|i| eval_trace(&never, &t, i).unwrap()));
    assert_eq!(
        eval_trace(&never, &t, 4),
        Err(TraceError::PositionOutOfRange { position: 4, len: 4 })
    );
}

#[test]
fn trace_rejects_foreign_propositions() {
    let steps = vec![BTreeSet::from([PropId(3)])];
    assert_eq!(Trace::new(2, steps), Err(TraceError::OutsideAlphabet(3)));
}

#[test]
fn monitor_matches_recursive_semantics() {
    let mut rng = rng(1);
    for _ in 0..200 {
        let f = random_formula(&mut rng, 3, 5);
        for trace in all_traces(3, 4) {
            let t = Trace::from_letters(&trace);
            let mut mon = TraceMonitor::new(&f);
            for (i, &l) in trace.iter().enumerate() {
                assert_eq!(mon.push(l), eval_trace(&f, &t, i).unwrap());
            }
        }
    }
}

#[test]
fn proposition_names_are_injective() {
    for name in ["fig1.spec", "voting.spec", "param_voting.spec", "erc20_extended.spec"] {
        let a = approximate(&desugar(&parse_spec(&spec_text(name)).unwrap()).unwrap());
        let names: BTreeSet<&str> = table_names(&a.table).into_iter().collect();
        assert_eq!(names.len(), a.table.len(), "{name}");
        for (id, p) in a.table.iter() {
            assert_eq!(a.table.id_of(&p.origin), Some(id));
        }
    }
}

#[test]
fn colliding_slugs_get_suffixes() {
    // `p(x_y)` and `p(x, y)` share the slug `a_p_x_y`.
    let spec = parse_spec("#inputs x_y, x, y\n#predicates p\n#require\np(x_y) && p(x, y)\n").unwrap();
    let a = approximate(&desugar(&spec).unwrap());
    assert_eq!(table_names(&a.table), ["a_p_x_y", "a_p_x_y_2"]);
    let one = PredicateTerm::new("p", vec![FunctionTerm::input("x_y")]);
    let two = PredicateTerm::new("p", vec![FunctionTerm::input("x"), FunctionTerm::input("y")]);
    let (i, j) = (predicate_prop(&a.table, &one).unwrap(), predicate_prop(&a.table, &two).unwrap());
    assert_ne!(i, j);
    assert_eq!(a.table.listing(), a.table.clone().listing());
    assert!(a.table.props().iter().all(|p| p.params.is_empty()));
}

#[test]
fn synthesized_machines_update_each_cell_once() {
    for name in ["voting.spec", "erc20_extended.spec"] {
        let s = synth(name);
        assert!(s.machine.cell_update_violations().is_empty(), "{name}");
        assert!(s.machine.method_call_violations().is_empty(), "{name}");
    }
}
