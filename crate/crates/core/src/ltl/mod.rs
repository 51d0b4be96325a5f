//! Propositional past-time LTL, the proposition table, and the
//! approximation of specifications by pastLTL formulas.

pub mod convert;
pub mod trace;

pub use convert::{approximate, cell_updates, syntactic_conversion, Approximation};
pub use trace::{eval_trace, Trace, TraceError, TraceMonitor};

use crate::frontend::{PredicateTerm, UpdateTerm};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PropId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PastLtl {
    True,
    False,
    Prop(PropId),
    Not(Box<PastLtl>),
    And(Box<PastLtl>, Box<PastLtl>),
    Or(Box<PastLtl>, Box<PastLtl>),
    Implies(Box<PastLtl>, Box<PastLtl>),
    Iff(Box<PastLtl>, Box<PastLtl>),
    Yesterday(Box<PastLtl>),
    WeakYesterday(Box<PastLtl>),
    Since(Box<PastLtl>, Box<PastLtl>),
    Once(Box<PastLtl>),
    Historically(Box<PastLtl>),
}

impl PastLtl {
    pub fn prop(id: usize) -> Self {
        PastLtl::Prop(PropId(id))
    }

    pub fn not(a: PastLtl) -> Self {
        PastLtl::Not(Box::new(a))
    }

    pub fn and(a: PastLtl, b: PastLtl) -> Self {
        PastLtl::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: PastLtl, b: PastLtl) -> Self {
        PastLtl::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: PastLtl, b: PastLtl) -> Self {
        PastLtl::Implies(Box::new(a), Box::new(b))
    }

    pub fn conjunction(items: impl IntoIterator<Item = PastLtl>) -> Self {
        items.into_iter().reduce(PastLtl::and).unwrap_or(PastLtl::True)
    }

    pub fn disjunction(items: impl IntoIterator<Item = PastLtl>) -> Self {
        items.into_iter().reduce(PastLtl::or).unwrap_or(PastLtl::False)
    }

    pub fn children(&self) -> Vec<&PastLtl> {
        use PastLtl::*;
        match self {
            True | False | Prop(_) => vec![],
            Not(a) | Yesterday(a) | WeakYesterday(a) | Once(a) | Historically(a) => vec![a],
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) | Since(a, b) => vec![a, b],
        }
    }

    pub fn props(&self) -> Vec<PropId> {
        let mut out = Vec::new();
        self.collect_props(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_props(&self, out: &mut Vec<PropId>) {
        if let PastLtl::Prop(p) = self {
            out.push(*p);
        }
        for c in self.children() {
            c.collect_props(out);
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn is_temporal(&self) -> bool {
        use PastLtl::*;
        matches!(self, Yesterday(_) | WeakYesterday(_) | Since(..) | Once(_) | Historically(_))
    }

    /// Renders the formula with proposition names from `name`.
    pub fn render(&self, name: &dyn Fn(PropId) -> String) -> String {
        let mut out = String::new();
        self.render_into(&mut out, name);
        out
    }

    fn render_into(&self, out: &mut String, name: &dyn Fn(PropId) -> String) {
        use PastLtl::*;
        let bin = |out: &mut String, a: &PastLtl, op: &str, b: &PastLtl| {
            out.push('(');
            a.render_into(out, name);
            let _ = write!(out, " {op} ");
            b.render_into(out, name);
            out.push(')');
        };
        let un = |out: &mut String, op: &str, a: &PastLtl| {
            out.push_str(op);
            a.render_into(out, name);
        };
        match self {
            True => out.push_str("true"),
            False => out.push_str("false"),
            Prop(p) => out.push_str(&name(*p)),
            Not(a) => un(out, "!", a),
            Yesterday(a) => un(out, "Y ", a),
            WeakYesterday(a) => un(out, "WY ", a),
            Once(a) => un(out, "O ", a),
            Historically(a) => un(out, "H ", a),
            And(a, b) => bin(out, a, "&&", b),
            Or(a, b) => bin(out, a, "||", b),
            Implies(a, b) => bin(out, a, "->", b),
            Iff(a, b) => bin(out, a, "<->", b),
            Since(a, b) => bin(out, a, "S", b),
        }
    }
}

impl std::fmt::Display for PastLtl {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render(&|p| format!("p{}", p.0)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Input,
    Output,
}

/// The term a proposition abbreviates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    Predicate(PredicateTerm),
    Update(UpdateTerm),
    /// A named proposition without term structure.
    Plain(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Proposition {
    pub name: String,
    pub role: Role,
    #[serde(skip)]
    pub origin: Origin,
    pub params: Vec<String>,
    /// Method name if the proposition is a method call.
    pub method: Option<String>,
    pub self_update: bool,
    /// Target cell for update propositions.
    pub cell: Option<String>,
    /// Human-readable rendering used in reports and DOT labels.
    pub display: String,
}

impl Proposition {
    pub fn is_call(&self) -> bool {
        self.method.is_some()
    }
}

/// Bijection between propositions and their origins; inputs come first,
/// each role sorted by name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PropTable {
    props: Vec<Proposition>,
    by_origin: BTreeMap<Origin, PropId>,
}

impl PropTable {
    pub fn from_props(mut props: Vec<Proposition>) -> Self {
        props.sort_by(|a, b| (a.role, &a.name).cmp(&(b.role, &b.name)));
        let by_origin = props
            .iter()
            .enumerate()
            .map(|(i, p)| (p.origin.clone(), PropId(i)))
            .collect();
        PropTable { props, by_origin }
    }

    /// Table of plain propositions `i0..` (inputs) and `o0..` (outputs).
    pub fn plain(inputs: usize, outputs: usize) -> Self {
        let mk = |name: String, role| Proposition {
            display: name.clone(),
            origin: Origin::Plain(name.clone()),
            name,
            role,
            params: Vec::new(),
            method: None,
            self_update: false,
            cell: None,
        };
        let mut props: Vec<Proposition> =
            (0..inputs).map(|i| mk(format!("i{i}"), Role::Input)).collect();
        props.extend((0..outputs).map(|i| mk(format!("o{i}"), Role::Output)));
        PropTable::from_props(props)
    }

    pub fn len(&self) -> usize {
        self.props.len()
    }

    pub fn is_empty(&self) -> bool {
        self.props.is_empty()
    }

    pub fn get(&self, id: PropId) -> &Proposition {
        &self.props[id.0]
    }

    pub fn iter(&self) -> impl Iterator<Item = (PropId, &Proposition)> {
        self.props.iter().enumerate().map(|(i, p)| (PropId(i), p))
    }

    pub fn id_of(&self, origin: &Origin) -> Option<PropId> {
        self.by_origin.get(origin).copied()
    }

    pub fn by_name(&self, name: &str) -> Option<PropId> {
        self.props.iter().position(|p| p.name == name).map(PropId)
    }

    pub fn by_display(&self, display: &str) -> Option<PropId> {
        self.props.iter().position(|p| p.display == display).map(PropId)
    }

    pub fn inputs(&self) -> impl Iterator<Item = PropId> + '_ {
        self.iter().filter(|(_, p)| p.role == Role::Input).map(|(i, _)| i)
    }

    pub fn outputs(&self) -> impl Iterator<Item = PropId> + '_ {
        self.iter().filter(|(_, p)| p.role == Role::Output).map(|(i, _)| i)
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs().count()
    }

    pub fn props(&self) -> &[Proposition] {
        &self.props
    }

    /// Deterministic sorted listing: one line per proposition.
    pub fn listing(&self) -> String {
        let mut out = String::new();
        for p in &self.props {
            let role = match p.role {
                Role::Input if p.is_call() => "input call",
                Role::Input => "input",
                Role::Output if p.self_update => "output self",
                Role::Output => "output",
            };
            let _ = writeln!(
                out,
                "{}\t{}\t({})\t{}",
                p.name,
                role,
                p.params.join(","),
                p.display
            );
        }
        out
    }
}
