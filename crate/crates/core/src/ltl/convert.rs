use super::{Origin, PastLtl, PropId, PropTable, Proposition, Role};
use crate::frontend::desugar::{method_of_predicate, method_predicate};
use crate::frontend::printer::{print_predicate, print_update};
use crate::frontend::{
    assemble_parts, FunctionTerm, PastTslFormula, PastTslSpec, PredicateTerm, TermKind, UpdateTerm,
};
use std::collections::{BTreeMap, BTreeSet};

fn symbol_slug(symbol: &str) -> String {
    match symbol {
        "=" => "eq".into(),
        "!=" => "neq".into(),
        ">=" => "geq".into(),
        ">" => "gt".into(),
        "<=" => "leq".into(),
        "<" => "lt".into(),
        "in" => "in".into(),
        "+" => "plus".into(),
        "-" => "minus".into(),
        other => other.replace('@', "_"),
    }
}

fn term_slug(t: &FunctionTerm) -> String {
    let mut parts = vec![symbol_slug(&t.symbol)];
    if matches!(t.kind, TermKind::Cell | TermKind::Application) {
        parts.extend(t.args.iter().map(term_slug));
    }
    parts.join("_")
}

fn origin_slug(o: &Origin) -> String {
    match o {
        Origin::Predicate(p) if p.args.is_empty() => p.symbol.clone(),
        Origin::Predicate(p) => {
            let mut parts = vec![symbol_slug(&p.symbol)];
            parts.extend(p.args.iter().map(term_slug));
            format!("a_{}", parts.join("_"))
        }
        Origin::Update(u) => format!("a_{}_to_{}", term_slug(&u.target), term_slug(&u.source)),
        Origin::Plain(n) => n.clone(),
    }
}

fn leaf_origin(f: &PastTslFormula) -> Option<Origin> {
    match f {
        PastTslFormula::Predicate(p) => Some(Origin::Predicate(p.clone())),
        PastTslFormula::Update(u) => Some(Origin::Update(u.clone())),
        PastTslFormula::MethodCall { name, params } => {
            Some(Origin::Predicate(method_predicate(name, params)))
        }
        PastTslFormula::OutputProp(n) => Some(Origin::Plain(n.clone())),
        _ => None,
    }
}

fn collect_origins(f: &PastTslFormula, out: &mut BTreeSet<Origin>) {
    f.visit(&mut |node| {
        if let Some(o) = leaf_origin(node) {
            out.insert(o);
        }
    });
}

/// Parameters in the order of the quantifier prefix.
fn normalized_params(found: Vec<String>, prefix: &[String]) -> Vec<String> {
    let mut ps = found;
    ps.sort_by_key(|p| prefix.iter().position(|q| q == p).unwrap_or(usize::MAX));
    ps
}

fn build_table(origins: BTreeSet<Origin>, spec: &PastTslSpec) -> PropTable {
    let decls = &spec.declarations;
    let mut by_slug: BTreeMap<String, Vec<Origin>> = BTreeMap::new();
    for o in origins {
        by_slug.entry(origin_slug(&o)).or_default().push(o);
    }
    let mut used: BTreeSet<String> = by_slug.keys().cloned().collect();
    let mut props = Vec::new();
    for (slug, group) in by_slug {
        for (k, origin) in group.into_iter().enumerate() {
            let name = if k == 0 {
                slug.clone()
            } else {
                let mut n = k + 1;
                while used.contains(&format!("{slug}_{n}")) {
                    n += 1;
                }
                let fresh = format!("{slug}_{n}");
                used.insert(fresh.clone());
                fresh
            };
            props.push(make_prop(name, origin, decls, &spec.parameters));
        }
    }
    PropTable::from_props(props)
}

fn make_prop(
    name: String,
    origin: Origin,
    decls: &crate::frontend::Declarations,
    prefix: &[String],
) -> Proposition {
    match &origin {
        Origin::Predicate(p) => {
            let method = method_of_predicate(decls, p).map(str::to_string);
            let params = normalized_params(p.parameters(), prefix);
            let display = match &method {
                Some(m) if params.is_empty() => m.clone(),
                Some(m) => format!("{m}({})", params.join(", ")),
                None => print_predicate(p),
            };
            Proposition {
                name,
                role: Role::Input,
                params,
                method,
                self_update: false,
                cell: None,
                display,
                origin,
            }
        }
        Origin::Update(u) => Proposition {
            name,
            role: Role::Output,
            params: normalized_params(u.parameters(), prefix),
            method: None,
            self_update: u.is_self_update(),
            cell: Some(u.target.symbol.clone()),
            display: print_update(u),
            origin,
        },
        Origin::Plain(n) => Proposition {
            name,
            role: Role::Output,
            params: Vec::new(),
            method: None,
            self_update: false,
            cell: None,
            display: n.clone(),
            origin,
        },
    }
}

fn convert(f: &PastTslFormula, table: &PropTable) -> PastLtl {
    use PastTslFormula as F;
    let b = |g: &PastTslFormula| Box::new(convert(g, table));
    match f {
        F::True => PastLtl::True,
        F::False => PastLtl::False,
        F::Predicate(_) | F::Update(_) | F::MethodCall { .. } | F::OutputProp(_) => {
            let origin = leaf_origin(f).expect("leaf");
            PastLtl::Prop(table.id_of(&origin).expect("origin registered in table"))
        }
        F::Not(a) => PastLtl::Not(b(a)),
        F::And(x, y) => PastLtl::And(b(x), b(y)),
        F::Or(x, y) => PastLtl::Or(b(x), b(y)),
        F::Implies(x, y) => PastLtl::Implies(b(x), b(y)),
        F::Iff(x, y) => PastLtl::Iff(b(x), b(y)),
        F::Yesterday(a) => PastLtl::Yesterday(b(a)),
        F::WeakYesterday(a) => PastLtl::WeakYesterday(b(a)),
        F::Since(x, y) => PastLtl::Since(b(x), b(y)),
        F::Once(a) => PastLtl::Once(b(a)),
        F::Historically(a) => PastLtl::Historically(b(a)),
    }
}

/// Replaces every predicate, update and method-call leaf by a unique
/// proposition named after its term.
pub fn syntactic_conversion(phi: &PastTslFormula, spec: &PastTslSpec) -> (PastLtl, PropTable) {
    let mut origins = BTreeSet::new();
    collect_origins(phi, &mut origins);
    let table = build_table(origins, spec);
    (convert(phi, &table), table)
}

fn exactly_one(ups: &[PropId]) -> PastLtl {
    if ups.len() == 1 {
        return PastLtl::Prop(ups[0]);
    }
    let some = PastLtl::disjunction(ups.iter().map(|u| PastLtl::Prop(*u)));
    let mut pairs = Vec::new();
    for i in 0..ups.len() {
        for j in i + 1..ups.len() {
            pairs.push(PastLtl::not(PastLtl::and(PastLtl::Prop(ups[i]), PastLtl::Prop(ups[j]))));
        }
    }
    PastLtl::and(some, PastLtl::conjunction(pairs))
}

/// For every cell, exactly one of its update propositions holds. The result
/// is a step formula; like every formula handed to the game it is enforced
/// at every position.
pub fn cell_updates(cells: &BTreeMap<String, Vec<String>>, table: &PropTable) -> PastLtl {
    let mut names: BTreeSet<&str> = cells.keys().map(String::as_str).collect();
    for (_, p) in table.iter() {
        if let Some(c) = &p.cell {
            names.insert(c);
        }
    }
    let mut parts = Vec::new();
    for c in names {
        let ups: Vec<PropId> = table
            .iter()
            .filter(|(_, p)| p.cell.as_deref() == Some(c))
            .map(|(i, _)| i)
            .collect();
        if !ups.is_empty() {
            parts.push(exactly_one(&ups));
        }
    }
    PastLtl::conjunction(parts)
}

/// The pastLTL approximation of a desugared specification, with its
/// antecedent kept apart so the game can restrict the environment.
#[derive(Debug, Clone)]
pub struct Approximation {
    pub table: PropTable,
    /// `(antecedent -> consequent) && cell_updates`, enforced at every position.
    pub formula: PastLtl,
    pub antecedent: PastLtl,
    pub assumptions: PastLtl,
    pub requirements: PastLtl,
    pub consequent: PastLtl,
    pub cell_updates: PastLtl,
}

pub fn approximate(spec: &PastTslSpec) -> Approximation {
    let parts = assemble_parts(spec);
    let mut origins = BTreeSet::new();
    for f in [&parts.assumptions, &parts.requirements, &parts.obligations] {
        collect_origins(f, &mut origins);
    }
    for (cell, params) in &spec.declarations.cells {
        let updated = origins
            .iter()
            .any(|o| matches!(o, Origin::Update(u) if &u.target.symbol == cell));
        if !updated {
            let target = FunctionTerm {
                kind: TermKind::Cell,
                symbol: cell.clone(),
                args: params.iter().map(FunctionTerm::parameter).collect(),
            };
            origins.insert(Origin::Update(UpdateTerm { source: target.clone(), target }));
        }
    }
    let table = build_table(origins, spec);
    let assumptions = convert(&parts.assumptions, &table);
    let requirements = convert(&parts.requirements, &table);
    let antecedent = convert(&parts.antecedent(), &table);
    let consequent = convert(&parts.obligations, &table);
    let cu = cell_updates(&spec.declarations.cells, &table);
    let main = PastLtl::implies(antecedent.clone(), consequent.clone());
    let formula = if cu == PastLtl::True { main } else { PastLtl::and(main, cu.clone()) };
    Approximation {
        table,
        formula,
        antecedent,
        assumptions,
        requirements,
        consequent,
        cell_updates: cu,
    }
}

/// Proposition for a predicate term, if the table contains it.
pub fn predicate_prop(table: &PropTable, p: &PredicateTerm) -> Option<PropId> {
    table.id_of(&Origin::Predicate(p.clone()))
}
