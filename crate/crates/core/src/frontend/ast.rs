//! Abstract syntax of past-time temporal stream logic specifications.

use std::collections::{BTreeMap, BTreeSet};

/// Inputs every specification may use without declaring them.
pub const BUILTIN_INPUTS: [&str; 3] = ["sender", "time", "methodinput"];

/// Constants every specification may use without declaring them.
pub const BUILTIN_CONSTANTS: [&str; 1] = ["owner"];

/// Binary comparison predicates with built-in meaning.
pub const BUILTIN_COMPARISONS: [&str; 7] = ["=", "!=", ">=", ">", "<=", "<", "in"];

/// Arithmetic functions with built-in meaning.
pub const BUILTIN_ARITHMETIC: [&str; 2] = ["+", "-"];

/// Unary predicate that tests a boolean-valued term.
pub const BUILTIN_IS_TRUE: &str = "isTrue";

/// Distinguished input carrying the name of the called method.
pub const METHOD_INPUT: &str = "methodinput";

/// Prefix that labels an argument of the current method call.
pub const ARG_PREFIX: &str = "arg@";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TermKind {
    Input,
    Cell,
    Parameter,
    Constant,
    Application,
}

/// A function term: an input, a (possibly parameterized) cell, a parameter,
/// a constant, or a function applied to argument terms.
///
/// Parameterized cells carry their parameters as `Parameter` arguments.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FunctionTerm {
    pub kind: TermKind,
    pub symbol: String,
    pub args: Vec<FunctionTerm>,
}

impl FunctionTerm {
    pub fn input(name: impl Into<String>) -> Self {
        FunctionTerm { kind: TermKind::Input, symbol: name.into(), args: Vec::new() }
    }

    pub fn cell(name: impl Into<String>, params: &[&str]) -> Self {
        FunctionTerm {
            kind: TermKind::Cell,
            symbol: name.into(),
            args: params.iter().map(|p| FunctionTerm::parameter(*p)).collect(),
        }
    }

    pub fn parameter(name: impl Into<String>) -> Self {
        FunctionTerm { kind: TermKind::Parameter, symbol: name.into(), args: Vec::new() }
    }

    pub fn constant(name: impl Into<String>) -> Self {
        FunctionTerm { kind: TermKind::Constant, symbol: name.into(), args: Vec::new() }
    }

    pub fn apply(name: impl Into<String>, args: Vec<FunctionTerm>) -> Self {
        FunctionTerm { kind: TermKind::Application, symbol: name.into(), args }
    }

    /// Parameters occurring anywhere in the term, in order of first occurrence.
    pub fn parameters(&self, out: &mut Vec<String>) {
        if self.kind == TermKind::Parameter && !out.contains(&self.symbol) {
            out.push(self.symbol.clone());
        }
        for a in &self.args {
            a.parameters(out);
        }
    }

    /// Method-argument labels (`arg@x`) occurring in the term.
    pub fn arg_labels(&self, out: &mut BTreeSet<String>) {
        if self.kind == TermKind::Input {
            if let Some(label) = self.symbol.strip_prefix(ARG_PREFIX) {
                out.insert(label.to_string());
            }
        }
        for a in &self.args {
            a.arg_labels(out);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PredicateTerm {
    pub symbol: String,
    pub args: Vec<FunctionTerm>,
}

impl PredicateTerm {
    pub fn new(symbol: impl Into<String>, args: Vec<FunctionTerm>) -> Self {
        PredicateTerm { symbol: symbol.into(), args }
    }

    pub fn is_comparison(&self) -> bool {
        BUILTIN_COMPARISONS.contains(&self.symbol.as_str()) && self.args.len() == 2
    }

    pub fn parameters(&self) -> Vec<String> {
        let mut out = Vec::new();
        for a in &self.args {
            a.parameters(&mut out);
        }
        out
    }
}

/// `[[target <- source]]`: the cell `target` is overwritten with `source`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UpdateTerm {
    pub target: FunctionTerm,
    pub source: FunctionTerm,
}

impl UpdateTerm {
    pub fn is_self_update(&self) -> bool {
        self.target == self.source
    }

    pub fn parameters(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.target.parameters(&mut out);
        self.source.parameters(&mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PastTslFormula {
    True,
    False,
    Predicate(PredicateTerm),
    Update(UpdateTerm),
    /// Sugar for `is<Method>(methodinput, params...)`, removed by desugaring.
    MethodCall { name: String, params: Vec<String> },
    /// A plain boolean output proposition that is not tied to a cell.
    OutputProp(String),
    Not(Box<PastTslFormula>),
    And(Box<PastTslFormula>, Box<PastTslFormula>),
    Or(Box<PastTslFormula>, Box<PastTslFormula>),
    Implies(Box<PastTslFormula>, Box<PastTslFormula>),
    Iff(Box<PastTslFormula>, Box<PastTslFormula>),
    Yesterday(Box<PastTslFormula>),
    WeakYesterday(Box<PastTslFormula>),
    Since(Box<PastTslFormula>, Box<PastTslFormula>),
    Once(Box<PastTslFormula>),
    Historically(Box<PastTslFormula>),
}

impl PastTslFormula {
    pub fn not(f: PastTslFormula) -> Self {
        PastTslFormula::Not(Box::new(f))
    }

    pub fn and(a: PastTslFormula, b: PastTslFormula) -> Self {
        PastTslFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: PastTslFormula, b: PastTslFormula) -> Self {
        PastTslFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: PastTslFormula, b: PastTslFormula) -> Self {
        PastTslFormula::Implies(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction; the empty conjunction is `true`.
    pub fn conjunction(items: impl IntoIterator<Item = PastTslFormula>) -> Self {
        items
            .into_iter()
            .reduce(PastTslFormula::and)
            .unwrap_or(PastTslFormula::True)
    }

    /// Left-nested disjunction; the empty disjunction is `false`.
    pub fn disjunction(items: impl IntoIterator<Item = PastTslFormula>) -> Self {
        items
            .into_iter()
            .reduce(PastTslFormula::or)
            .unwrap_or(PastTslFormula::False)
    }

    pub fn children(&self) -> Vec<&PastTslFormula> {
        use PastTslFormula::*;
        match self {
            True | False | Predicate(_) | Update(_) | MethodCall { .. } | OutputProp(_) => vec![],
            Not(a) | Yesterday(a) | WeakYesterday(a) | Once(a) | Historically(a) => vec![a],
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) | Since(a, b) => vec![a, b],
        }
    }

    /// Visits every node in pre-order.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a PastTslFormula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Parameters occurring in the formula, in order of first occurrence.
    pub fn parameters(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        self.visit(&mut |node| {
            let ps = match node {
                PastTslFormula::Predicate(p) => p.parameters(),
                PastTslFormula::Update(u) => u.parameters(),
                PastTslFormula::MethodCall { params, .. } => params.clone(),
                _ => Vec::new(),
            };
            for p in ps {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        });
        out
    }

    pub fn method_calls(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |node| {
            if let PastTslFormula::MethodCall { name, .. } = node {
                out.insert(name.clone());
            }
        });
        out
    }

    pub fn arg_labels(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |node| match node {
            PastTslFormula::Predicate(p) => p.args.iter().for_each(|a| a.arg_labels(&mut out)),
            PastTslFormula::Update(u) => {
                u.target.arg_labels(&mut out);
                u.source.arg_labels(&mut out);
            }
            _ => {}
        });
        out
    }

    /// Maps every node bottom-up.
    pub fn map(self, f: &mut impl FnMut(PastTslFormula) -> PastTslFormula) -> PastTslFormula {
        use PastTslFormula::*;
        let mapped = match self {
            Not(a) => Not(Box::new(a.map(f))),
            Yesterday(a) => Yesterday(Box::new(a.map(f))),
            WeakYesterday(a) => WeakYesterday(Box::new(a.map(f))),
            Once(a) => Once(Box::new(a.map(f))),
            Historically(a) => Historically(Box::new(a.map(f))),
            And(a, b) => And(Box::new(a.map(f)), Box::new(b.map(f))),
            Or(a, b) => Or(Box::new(a.map(f)), Box::new(b.map(f))),
            Implies(a, b) => Implies(Box::new(a.map(f)), Box::new(b.map(f))),
            Iff(a, b) => Iff(Box::new(a.map(f)), Box::new(b.map(f))),
            Since(a, b) => Since(Box::new(a.map(f)), Box::new(b.map(f))),
            leaf => leaf,
        };
        f(mapped)
    }
}

/// Declared symbols a specification may refer to.
///
/// Parameterized names carry their parameter sequence; functions and
/// predicates carry an optional arity.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Declarations {
    pub methods: BTreeMap<String, Vec<String>>,
    pub cells: BTreeMap<String, Vec<String>>,
    pub functions: BTreeMap<String, Option<usize>>,
    pub predicates: BTreeMap<String, Option<usize>>,
    pub constants: BTreeSet<String>,
    pub inputs: BTreeSet<String>,
    pub input_props: BTreeSet<String>,
    pub output_props: BTreeSet<String>,
    /// Parameters known to the signatures; only the spec prefix may use them.
    pub parameters: BTreeSet<String>,
    /// Methods in declaration order, used for stable output.
    pub method_order: Vec<String>,
}

impl Declarations {
    pub fn merge(&mut self, other: &Declarations) {
        for (k, v) in &other.methods {
            if !self.methods.contains_key(k) {
                self.method_order.push(k.clone());
            }
            self.methods.insert(k.clone(), v.clone());
        }
        self.cells.extend(other.cells.clone());
        self.functions.extend(other.functions.clone());
        self.predicates.extend(other.predicates.clone());
        self.constants.extend(other.constants.clone());
        self.inputs.extend(other.inputs.clone());
        self.input_props.extend(other.input_props.clone());
        self.output_props.extend(other.output_props.clone());
        self.parameters.extend(other.parameters.clone());
    }

    pub fn add_method(&mut self, name: &str, params: Vec<String>) {
        if !self.methods.contains_key(name) {
            self.method_order.push(name.to_string());
        }
        self.methods.insert(name.to_string(), params);
    }

    pub fn is_input(&self, name: &str) -> bool {
        BUILTIN_INPUTS.contains(&name) || self.inputs.contains(name)
    }

    pub fn is_constant(&self, name: &str) -> bool {
        BUILTIN_CONSTANTS.contains(&name) || self.constants.contains(name)
    }

    pub fn ordered_methods(&self) -> impl Iterator<Item = (&String, &Vec<String>)> {
        self.method_order.iter().filter_map(|m| self.methods.get_key_value(m))
    }
}

/// A parsed specification: formulas by category, each split into initial
/// and invariant parts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PastTslSpec {
    pub parameters: Vec<String>,
    pub assumptions_init: Vec<PastTslFormula>,
    pub assumptions_inv: Vec<PastTslFormula>,
    pub requirements_init: Vec<PastTslFormula>,
    pub requirements_inv: Vec<PastTslFormula>,
    pub obligations_init: Vec<PastTslFormula>,
    pub obligations_inv: Vec<PastTslFormula>,
    pub declarations: Declarations,
    /// Non-fatal diagnostics collected during parsing and desugaring.
    pub warnings: Vec<String>,
}

impl PastTslSpec {
    pub fn formulas(&self) -> impl Iterator<Item = &PastTslFormula> {
        self.assumptions_init
            .iter()
            .chain(&self.assumptions_inv)
            .chain(&self.requirements_init)
            .chain(&self.requirements_inv)
            .chain(&self.obligations_init)
            .chain(&self.obligations_inv)
    }

    pub fn formula_lists_mut(&mut self) -> [&mut Vec<PastTslFormula>; 6] {
        [
            &mut self.assumptions_init,
            &mut self.assumptions_inv,
            &mut self.requirements_init,
            &mut self.requirements_inv,
            &mut self.obligations_init,
            &mut self.obligations_inv,
        ]
    }

    pub fn is_empty(&self) -> bool {
        self.formulas().next().is_none()
    }

    pub fn is_parameterized(&self) -> bool {
        !self.parameters.is_empty()
    }
}

/// Name of the predicate a method call desugars to: `vote` becomes `isVote`.
pub fn method_predicate_symbol(method: &str) -> String {
    let mut chars = method.chars();
    match chars.next() {
        Some(c) => format!("is{}{}", c.to_uppercase(), chars.as_str()),
        None => "is".to_string(),
    }
}
