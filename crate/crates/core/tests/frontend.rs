use csynth::frontend::*;
use csynth::ltl::{eval_trace, syntactic_conversion, Trace};
use proptest::prelude::*;

const HEADER: &str = "\
#params m
#methods go, run(m)
#cells c, d(m)
#functions f/1
#predicates p/1
#constants k
#inputs x, y
#input_props a
#output_props b
";

// Atomic formulas over the header's declarations.
const ATOMS: &[&str] = &[
    "true",
    "false",
    "a",
    "b",
    "x = y",
    "p(x)",
    "p(d(m))",
    "f(x) > k()",
    "x + y <= f(c)",
    "x - (y + x) != k()",
    "sender in c",
    "isTrue(x)",
    "[[c <- f(c)]]",
    "[[c <- c]]",
    "[[d(m) <- x - y]]",
    "go",
    "run(m)",
];

fn parse_one(src: &str) -> PastTslFormula {
    let spec = parse_spec(&format!("{HEADER}#require\n{src}\n")).unwrap();
    spec.requirements_init[0].clone()
}

fn formula() -> impl Strategy<Value = PastTslFormula> {
    let atoms: Vec<PastTslFormula> = ATOMS.iter().map(|a| parse_one(a)).collect();
    let leaf = proptest::sample::select(atoms);
    leaf.prop_recursive(5, 48, 2, |inner| {
        use PastTslFormula as F;
        prop_oneof![
            inner.clone().prop_map(F::not),
            inner.clone().prop_map(|a| F::Yesterday(Box::new(a))),
            inner.clone().prop_map(|a| F::WeakYesterday(Box::new(a))),
            inner.clone().prop_map(|a| F::Once(Box::new(a))),
            inner.clone().prop_map(|a| F::Historically(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| F::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| F::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| F::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| F::Iff(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| F::Since(Box::new(a), Box::new(b))),
        ]
    })
}

fn spec_with(init: Vec<PastTslFormula>, inv: Vec<PastTslFormula>) -> PastTslSpec {
    let mut spec = parse_spec(HEADER).unwrap();
    spec.requirements_init = init;
    spec.obligations_inv = inv;
    spec
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_then_parse_is_identity(init in prop::collection::vec(formula(), 0..3),
                                    inv in prop::collection::vec(formula(), 0..3)) {
        let spec = spec_with(init, inv);
        let text = print_spec(&spec);
        let back = parse_spec(&text).unwrap();
        prop_assert_eq!(&back.parameters, &spec.parameters);
        prop_assert_eq!(&back.declarations, &spec.declarations);
        prop_assert_eq!(back.formulas().collect::<Vec<_>>(), spec.formulas().collect::<Vec<_>>());
    }

    #[test]
    fn desugar_is_idempotent(init in prop::collection::vec(formula(), 0..3),
                             inv in prop::collection::vec(formula(), 0..3)) {
        let spec = spec_with(init, inv);
        if let Ok(once) = desugar(&spec) {
            prop_assert_eq!(desugar(&once).unwrap(), once);
        }
    }

    #[test]
    fn desugared_specs_are_closed(inv in prop::collection::vec(formula(), 1..3)) {
        let spec = spec_with(Vec::new(), inv);
        if let Ok(d) = desugar(&spec) {
            let mut used = std::collections::BTreeSet::new();
            for f in d.formulas() {
                used.extend(f.parameters());
            }
            for p in &used {
                prop_assert!(d.parameters.contains(p));
            }
            prop_assert!(d.formulas().all(|f| f.method_calls().is_empty()));
        }
    }
}

#[test]
fn close_requirement_has_two_comparisons() {
    let spec = parse_spec(
        "#methods close\n#constants cTime\n#require\nG(close -> sender = owner() && time > cTime())\n",
    )
    .unwrap();
    assert_eq!(spec.requirements_inv.len(), 1);
    let mut preds = Vec::new();
    spec.requirements_inv[0].visit(&mut |f| {
        if let PastTslFormula::Predicate(p) = f {
            preds.push(print_predicate(p));
        }
    });
    assert_eq!(preds, ["sender = owner()", "time > cTime()"]);
}

#[test]
fn parameterized_requirement_over_method_call() {
    let spec = parse_spec("#params m\n#methods vote(m)\n#require\nG(vote(m) -> WY H !vote(m))\n").unwrap();
    assert_eq!(spec.parameters, ["m"]);
    assert_eq!(spec.requirements_inv[0].method_calls().into_iter().collect::<Vec<_>>(), ["vote"]);
    assert_eq!(spec.requirements_inv[0].parameters(), ["m"]);
}

#[test]
fn empty_spec_has_no_formulas() {
    let spec = parse_spec("").unwrap();
    assert!(spec.is_empty());
    assert!(spec.parameters.is_empty());
    for list in spec.clone().formula_lists_mut() {
        assert!(list.is_empty());
    }
}

#[test]
fn parse_errors_carry_positions() {
    let e = parse_spec("#input_props a\n#require\na && (a\n").unwrap_err();
    assert!(matches!(e, ParseError::Syntax { .. }));
    assert_eq!(e.position().0, 3);

    let e = parse_spec("#require\nG(zz)\n").unwrap_err();
    assert!(matches!(e, ParseError::Undeclared { ref name, .. } if name == "zz"));
    assert_eq!(e.position(), (2, 3));

    let e = parse_spec("#input_props a\n#require\nG(F a)\n").unwrap_err();
    assert!(matches!(e, ParseError::FutureOperator { .. }));
}

#[test]
fn parameter_outside_prefix_is_rejected() {
    let ext = Declarations { parameters: ["n".to_string()].into(), ..Default::default() };
    let e = parse_spec_with("#cells c\n#require\nG(c = n)\n", &ext).unwrap_err();
    assert!(matches!(e, ParseError::UnboundParameter { ref name, .. } if name == "n"));
}

#[test]
fn method_call_becomes_method_input_predicate() {
    let spec = parse_spec("#params m\n#methods vote(m)\n#require\nG(vote(m))\n").unwrap();
    let d = desugar(&spec).unwrap();
    assert_eq!(print_formula(&d.requirements_inv[0]), "isVote(methodinput, m)");
}

fn truth(f: &PastTslFormula, assignment: &dyn Fn(&str) -> bool) -> bool {
    use PastTslFormula as F;
    match f {
        F::True => true,
        F::False => false,
        F::Predicate(p) => assignment(&p.symbol),
        F::Not(a) => !truth(a, assignment),
        F::And(a, b) => truth(a, assignment) && truth(b, assignment),
        F::Or(a, b) => truth(a, assignment) || truth(b, assignment),
        other => panic!("unexpected node {other:?}"),
    }
}

#[test]
fn mutual_exclusion_admits_at_most_one_call() {
    let spec = parse_spec("#methods close, vote, reveal\n").unwrap();
    let ex = mutual_exclusion(&spec.declarations);
    let names = ["isClose", "isVote", "isReveal"];
    for bits in 0u32..8 {
        let holds = truth(&ex, &|s| bits >> names.iter().position(|n| *n == s).unwrap() & 1 == 1);
        assert_eq!(holds, bits.count_ones() <= 1, "valuation {bits:03b}");
    }
    let d = desugar(&spec).unwrap();
    assert!(d.assumptions_inv.contains(&ex));
}

#[test]
fn no_methods_leaves_spec_unchanged() {
    let spec = parse_spec("#input_props a\n#output_props b\n#obligation\nG(b <-> a)\n").unwrap();
    assert_eq!(desugar(&spec).unwrap(), spec);
}

#[test]
fn argument_label_needs_method_context() {
    let spec = parse_spec("#cells c\n#require\nG(c > arg@amount)\n").unwrap();
    assert!(matches!(desugar(&spec), Err(DesugarError::ArgOutsideMethod { .. })));
}

#[test]
fn shared_argument_label_warns() {
    let spec = parse_spec(
        "#methods a, b\n#cells c\n#require\nG(a -> c > arg@x)\nG(b -> c < arg@x)\n",
    )
    .unwrap();
    let d = desugar(&spec).unwrap();
    assert!(d.warnings.iter().any(|w| w.contains("arg@x")));
}

#[test]
fn conflicting_calls_are_rejected() {
    let spec = parse_spec("#methods a, b\n#require\nG(a && b)\n").unwrap();
    assert!(matches!(desugar(&spec), Err(DesugarError::ConflictingMethodCalls { .. })));
}

#[test]
fn voting_formula_shape() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../specs/voting.spec"))
        .unwrap();
    let spec = desugar(&parse_spec(&text).unwrap()).unwrap();
    let parts = assemble_parts(&spec);
    let printed = print_formula(&parts.requirements);
    assert!(printed.starts_with("H ("), "{printed}");
    for needle in ["isClose(methodinput)", "sender = owner()", "sender in voters"] {
        assert!(printed.contains(needle), "{needle} missing from {printed}");
    }
    assert!(print_formula(&parts.assumptions).contains("Y time > cTime()"));
    let obligations = print_formula(&parts.obligations);
    assert!(obligations.contains("[[voters <- add(sender, voters)]]"));
    assert!(obligations.contains("[[voters <- voters]]"));
    assert!(matches!(assemble_global_formula(&spec), PastTslFormula::Implies(..)));
}

#[test]
fn obligations_only_has_true_antecedent() {
    let spec = parse_spec("#output_props b\n#obligation\nb\nG(Y b)\n").unwrap();
    let parts = assemble_parts(&spec);
    assert_eq!(parts.antecedent(), PastTslFormula::True);
    assert_eq!(print_formula(&parts.obligations), "(WY false -> b) && Y b");
}

#[test]
fn assumption_only_spec_holds_on_every_trace() {
    let spec = parse_spec("#input_props a, c\n#assume\nG(a -> Y c)\n").unwrap();
    let phi = assemble_global_formula(&spec);
    let (ltl, table) = syntactic_conversion(&phi, &spec);
    let n = table.len();
    for len in 1..=4usize {
        for code in 0..1u64 << (n * len) {
            let letters: Vec<u64> = (0..len).map(|i| code >> (i * n) & ((1 << n) - 1)).collect();
            let t = Trace::from_letters(&letters);
            for i in 0..len {
                assert!(eval_trace(&ltl, &t, i).unwrap());
            }
        }
    }
}
