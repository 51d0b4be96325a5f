//! Pretty-printer producing text the parser reads back to the same AST.

use super::ast::*;
use std::fmt::Write;

const PREC_IFF: u8 = 1;
const PREC_IMPLIES: u8 = 2;
const PREC_OR: u8 = 3;
const PREC_AND: u8 = 4;
const PREC_SINCE: u8 = 5;
const PREC_UNARY: u8 = 6;
const PREC_ATOM: u8 = 7;

fn precedence(f: &PastTslFormula) -> u8 {
    use PastTslFormula::*;
    match f {
        Iff(..) => PREC_IFF,
        Implies(..) => PREC_IMPLIES,
        Or(..) => PREC_OR,
        And(..) => PREC_AND,
        Since(..) => PREC_SINCE,
        Not(_) | Yesterday(_) | WeakYesterday(_) | Once(_) | Historically(_) => PREC_UNARY,
        _ => PREC_ATOM,
    }
}

pub fn print_term(t: &FunctionTerm) -> String {
    let mut out = String::new();
    write_term(&mut out, t);
    out
}

fn write_term(out: &mut String, t: &FunctionTerm) {
    match t.kind {
        TermKind::Input | TermKind::Parameter => out.push_str(&t.symbol),
        TermKind::Constant => {
            let _ = write!(out, "{}()", t.symbol);
        }
        TermKind::Cell if t.args.is_empty() => out.push_str(&t.symbol),
        TermKind::Application
            if BUILTIN_ARITHMETIC.contains(&t.symbol.as_str()) && t.args.len() == 2 =>
        {
            write_term(out, &t.args[0]);
            let _ = write!(out, " {} ", t.symbol);
            let rhs = &t.args[1];
            let nested = rhs.kind == TermKind::Application
                && BUILTIN_ARITHMETIC.contains(&rhs.symbol.as_str())
                && rhs.args.len() == 2;
            if nested {
                out.push('(');
                write_term(out, rhs);
                out.push(')');
            } else {
                write_term(out, rhs);
            }
        }
        TermKind::Cell | TermKind::Application => {
            out.push_str(&t.symbol);
            write_args(out, &t.args);
        }
    }
}

fn write_args(out: &mut String, args: &[FunctionTerm]) {
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_term(out, a);
    }
    out.push(')');
}

pub fn print_predicate(p: &PredicateTerm) -> String {
    let mut out = String::new();
    if p.is_comparison() {
        write_term(&mut out, &p.args[0]);
        let _ = write!(out, " {} ", p.symbol);
        write_term(&mut out, &p.args[1]);
    } else {
        out.push_str(&p.symbol);
        if !p.args.is_empty() {
            write_args(&mut out, &p.args);
        }
    }
    out
}

pub fn print_update(u: &UpdateTerm) -> String {
    format!("[[{} <- {}]]", print_term(&u.target), print_term(&u.source))
}

pub fn print_formula(f: &PastTslFormula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f, 0);
    out
}

fn write_formula(out: &mut String, f: &PastTslFormula, min: u8) {
    use PastTslFormula::*;
    let wrap = precedence(f) < min;
    if wrap {
        out.push('(');
    }
    match f {
        True => out.push_str("true"),
        False => out.push_str("false"),
        Predicate(p) => out.push_str(&print_predicate(p)),
        Update(u) => out.push_str(&print_update(u)),
        MethodCall { name, params } => {
            out.push_str(name);
            if !params.is_empty() {
                let _ = write!(out, "({})", params.join(", "));
            }
        }
        OutputProp(name) => out.push_str(name),
        Not(a) => {
            out.push('!');
            write_formula(out, a, PREC_UNARY);
        }
        Yesterday(a) => unary(out, "Y", a),
        WeakYesterday(a) => unary(out, "WY", a),
        Once(a) => unary(out, "O", a),
        Historically(a) => unary(out, "H", a),
        And(a, b) => binary(out, a, " && ", b, PREC_AND, PREC_SINCE),
        Or(a, b) => binary(out, a, " || ", b, PREC_OR, PREC_AND),
        Implies(a, b) => binary(out, a, " -> ", b, PREC_OR, PREC_IMPLIES),
        Iff(a, b) => binary(out, a, " <-> ", b, PREC_IFF, PREC_IMPLIES),
        Since(a, b) => binary(out, a, " S ", b, PREC_SINCE, PREC_UNARY),
    }
    if wrap {
        out.push(')');
    }
}

fn unary(out: &mut String, op: &str, a: &PastTslFormula) {
    out.push_str(op);
    out.push(' ');
    write_formula(out, a, PREC_UNARY);
}

fn binary(out: &mut String, a: &PastTslFormula, op: &str, b: &PastTslFormula, l: u8, r: u8) {
    write_formula(out, a, l);
    out.push_str(op);
    write_formula(out, b, r);
}

/// Prints a whole specification, declarations first.
pub fn print_spec(spec: &PastTslSpec) -> String {
    let mut out = String::new();
    let d = &spec.declarations;
    if !spec.parameters.is_empty() {
        let _ = writeln!(out, "#params {}", spec.parameters.join(", "));
    }
    let with_params = |name: &str, ps: &[String]| {
        if ps.is_empty() {
            name.to_string()
        } else {
            format!("{name}({})", ps.join(", "))
        }
    };
    let with_arity = |name: &str, a: &Option<usize>| match a {
        Some(n) => format!("{name}/{n}"),
        None => name.to_string(),
    };
    let mut line = |head: &str, items: Vec<String>| {
        if !items.is_empty() {
            let _ = writeln!(out, "#{head} {}", items.join(", "));
        }
    };
    line("methods", d.ordered_methods().map(|(n, ps)| with_params(n, ps)).collect());
    line("cells", d.cells.iter().map(|(n, ps)| with_params(n, ps)).collect());
    line("functions", d.functions.iter().map(|(n, a)| with_arity(n, a)).collect());
    line("predicates", d.predicates.iter().map(|(n, a)| with_arity(n, a)).collect());
    line("constants", d.constants.iter().cloned().collect());
    line("inputs", d.inputs.iter().cloned().collect());
    line("input_props", d.input_props.iter().cloned().collect());
    line("output_props", d.output_props.iter().cloned().collect());
    let sections = [
        ("assume", &spec.assumptions_init, &spec.assumptions_inv),
        ("require", &spec.requirements_init, &spec.requirements_inv),
        ("obligation", &spec.obligations_init, &spec.obligations_inv),
    ];
    for (head, init, inv) in sections {
        if init.is_empty() && inv.is_empty() {
            continue;
        }
        let _ = writeln!(out, "#{head}");
        for f in init {
            let _ = writeln!(out, "{}", print_formula(f));
        }
        for f in inv {
            let _ = writeln!(out, "G({})", print_formula(f));
        }
    }
    out
}
