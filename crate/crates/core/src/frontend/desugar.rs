//! Removal of method-call sugar and insertion of method exclusivity.

use super::ast::*;
use super::printer::print_formula;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesugarError {
    #[error("argument label `arg@{label}` used outside any method context in `{formula}`")]
    ArgOutsideMethod { label: String, formula: String },
    #[error("method calls `{first}` and `{second}` are required at the same step in `{formula}`")]
    ConflictingMethodCalls { first: String, second: String, formula: String },
}

/// Predicate term a method call abbreviates: `isName(methodinput, params...)`.
pub fn method_predicate(name: &str, params: &[String]) -> PredicateTerm {
    let mut args = vec![FunctionTerm::input(METHOD_INPUT)];
    args.extend(params.iter().map(FunctionTerm::parameter));
    PredicateTerm::new(method_predicate_symbol(name), args)
}

/// Recognizes a desugared method-call predicate and returns the method name.
pub fn method_of_predicate<'a>(decls: &'a Declarations, p: &PredicateTerm) -> Option<&'a str> {
    let first = p.args.first()?;
    if first.kind != TermKind::Input || first.symbol != METHOD_INPUT {
        return None;
    }
    decls
        .methods
        .keys()
        .find(|m| method_predicate_symbol(m) == p.symbol)
        .map(String::as_str)
}

/// Methods a formula mentions, in sugared or desugared form.
fn mentioned_methods(decls: &Declarations, f: &PastTslFormula) -> BTreeSet<String> {
    let mut out = f.method_calls();
    f.visit(&mut |node| {
        if let PastTslFormula::Predicate(p) = node {
            if let Some(m) = method_of_predicate(decls, p) {
                out.insert(m.to_string());
            }
        }
    });
    out
}

fn call_literal(decls: &Declarations, f: &PastTslFormula) -> Option<String> {
    match f {
        PastTslFormula::MethodCall { name, .. } => Some(name.clone()),
        PastTslFormula::Predicate(p) => method_of_predicate(decls, p).map(str::to_string),
        _ => None,
    }
}

fn flatten_and<'a>(f: &'a PastTslFormula, out: &mut Vec<&'a PastTslFormula>) {
    if let PastTslFormula::And(a, b) = f {
        flatten_and(a, out);
        flatten_and(b, out);
    } else {
        out.push(f);
    }
}

/// Finds two distinct methods conjoined positively at the same step.
fn conflicting_calls(
    decls: &Declarations,
    f: &PastTslFormula,
    positive: bool,
) -> Option<(String, String)> {
    use PastTslFormula::*;
    match f {
        And(..) if positive => {
            let mut items = Vec::new();
            flatten_and(f, &mut items);
            let calls: BTreeSet<String> =
                items.iter().filter_map(|g| call_literal(decls, g)).collect();
            if calls.len() >= 2 {
                let mut it = calls.into_iter();
                return Some((it.next().unwrap(), it.next().unwrap()));
            }
            items.iter().find_map(|g| conflicting_calls(decls, g, positive))
        }
        Not(a) => conflicting_calls(decls, a, !positive),
        Implies(a, b) => {
            conflicting_calls(decls, a, !positive).or_else(|| conflicting_calls(decls, b, positive))
        }
        Iff(a, b) => [true, false].into_iter().find_map(|pol| {
            conflicting_calls(decls, a, pol).or_else(|| conflicting_calls(decls, b, pol))
        }),
        And(a, b) | Or(a, b) | Since(a, b) => {
            conflicting_calls(decls, a, positive).or_else(|| conflicting_calls(decls, b, positive))
        }
        Yesterday(a) | WeakYesterday(a) | Once(a) | Historically(a) => {
            conflicting_calls(decls, a, positive)
        }
        _ => None,
    }
}

/// Pairwise exclusion of all method calls: at most one per step.
pub fn mutual_exclusion(decls: &Declarations) -> PastTslFormula {
    let calls: Vec<PastTslFormula> = decls
        .ordered_methods()
        .map(|(m, ps)| PastTslFormula::Predicate(method_predicate(m, ps)))
        .collect();
    let mut pairs = Vec::new();
    for i in 0..calls.len() {
        for j in i + 1..calls.len() {
            pairs.push(PastTslFormula::not(PastTslFormula::and(calls[i].clone(), calls[j].clone())));
        }
    }
    PastTslFormula::conjunction(pairs)
}

/// Some method call happens at every step.
pub fn some_method_called(decls: &Declarations) -> PastTslFormula {
    PastTslFormula::disjunction(
        decls
            .ordered_methods()
            .map(|(m, ps)| PastTslFormula::Predicate(method_predicate(m, ps))),
    )
}

fn replace_calls(f: PastTslFormula) -> PastTslFormula {
    f.map(&mut |node| match node {
        PastTslFormula::MethodCall { name, params } => {
            PastTslFormula::Predicate(method_predicate(&name, &params))
        }
        other => other,
    })
}

/// Replaces method-call sugar by predicates over `methodinput` and adds the
/// per-step method exclusivity assumptions. Idempotent.
pub fn desugar(spec: &PastTslSpec) -> Result<PastTslSpec, DesugarError> {
    let decls = &spec.declarations;
    let mut label_methods: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for f in spec.formulas() {
        let labels = f.arg_labels();
        let methods = mentioned_methods(decls, f);
        if let Some(label) = labels.iter().next() {
            if methods.is_empty() {
                return Err(DesugarError::ArgOutsideMethod {
                    label: label.clone(),
                    formula: print_formula(f),
                });
            }
        }
        for label in labels {
            label_methods.entry(label).or_default().extend(methods.iter().cloned());
        }
        if let Some((first, second)) = conflicting_calls(decls, f, true) {
            return Err(DesugarError::ConflictingMethodCalls {
                first,
                second,
                formula: print_formula(f),
            });
        }
    }

    let mut out = spec.clone();
    for list in out.formula_lists_mut() {
        let taken = std::mem::take(list);
        *list = taken.into_iter().map(replace_calls).collect();
    }
    for (label, methods) in label_methods {
        if methods.len() > 1 {
            let names: Vec<&str> = methods.iter().map(String::as_str).collect();
            let w = format!(
                "argument label `arg@{label}` is shared by methods {}",
                names.join(", ")
            );
            if !out.warnings.contains(&w) {
                out.warnings.push(w);
            }
        }
    }
    if !decls.methods.is_empty() {
        let mut extra = Vec::new();
        if decls.methods.len() > 1 {
            extra.push(mutual_exclusion(decls));
        }
        extra.push(some_method_called(decls));
        for f in extra {
            if !out.assumptions_inv.contains(&f) {
                out.assumptions_inv.push(f);
            }
        }
    }
    Ok(out)
}
