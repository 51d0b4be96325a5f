//! Explicit instance product of a split system over a finite parameter
//! domain, and the bounded per-instance trace comparison against the
//! original machine.

use super::{SplitError, SplitSystem};
use crate::machine::{Alphabet, Letter};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductConfig {
    /// Number of values per parameter.
    pub domain: usize,
    pub state_cap: usize,
}

impl Default for ProductConfig {
    fn default() -> Self {
        ProductConfig { domain: 2, state_cap: 100_000 }
    }
}

/// Values (0-based) for every parameter, in prefix order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Instance(pub Vec<usize>);

/// An instantiated proposition: `args` assigns values to the proposition's
/// own parameters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct InstProp {
    pub prop: usize,
    pub args: Vec<usize>,
}

/// For each subset machine, the state of every instantiated tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ProductState {
    pub funcs: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProductTransition {
    pub from: usize,
    pub to: usize,
    pub machine: usize,
    /// Index into the subset machine's transitions.
    pub sub_transition: usize,
    pub mover: Instance,
    pub label: BTreeSet<InstProp>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceProduct {
    pub parameters: Vec<String>,
    pub domain: usize,
    pub instances: Vec<Instance>,
    pub states: Vec<ProductState>,
    pub transitions: Vec<ProductTransition>,
    #[serde(skip)]
    alphabet: Alphabet,
}

struct Shape<'a> {
    sys: &'a SplitSystem,
    domain: usize,
    /// Positions (in the prefix) of each machine's parameters.
    machine_pos: Vec<Vec<usize>>,
    prop_pos: Vec<Vec<usize>>,
}

impl<'a> Shape<'a> {
    fn new(sys: &'a SplitSystem, domain: usize) -> Self {
        let pos = |ps: &[String]| -> Vec<usize> {
            ps.iter()
                .map(|p| sys.parameters.iter().position(|q| q == p).expect("parameter in prefix"))
                .collect()
        };
        Shape {
            sys,
            domain,
            machine_pos: sys.machines.iter().map(|m| pos(&m.subset.0)).collect(),
            prop_pos: sys.original.alphabet.entries.iter().map(|e| pos(&e.params)).collect(),
        }
    }

    fn tuple_count(&self, arity: usize) -> usize {
        self.domain.pow(arity as u32)
    }

    fn tuple_index(&self, positions: &[usize], mu: &Instance) -> usize {
        positions.iter().fold(0, |acc, &p| acc * self.domain + mu.0[p])
    }

    fn restrict(&self, positions: &[usize], mu: &Instance) -> Vec<usize> {
        positions.iter().map(|&p| mu.0[p]).collect()
    }

    fn all_tuples(&self, arity: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for _ in 0..arity {
            out = out
                .into_iter()
                .flat_map(|t| {
                    (0..self.domain).map(move |v| {
                        let mut t = t.clone();
                        t.push(v);
                        t
                    })
                })
                .collect();
        }
        out
    }

    fn label(&self, letter: Letter, mover: &Instance) -> BTreeSet<InstProp> {
        let mut out = BTreeSet::new();
        for (k, e) in self.sys.original.alphabet.entries.iter().enumerate() {
            let own = self.restrict(&self.prop_pos[k], mover);
            if letter >> k & 1 == 1 {
                out.insert(InstProp { prop: k, args: own.clone() });
            }
            if e.self_update {
                for args in self.all_tuples(self.prop_pos[k].len()) {
                    if args != own {
                        out.insert(InstProp { prop: k, args });
                    }
                }
            }
        }
        out
    }

    /// Intersected knowledge of machine `i` and its ancestors as seen by `mu`.
    fn knowledge(&self, state: &ProductState, machines: &[usize], mu: &Instance) -> BTreeSet<usize> {
        let mut x: Option<BTreeSet<usize>> = None;
        for &j in machines {
            let q = state.funcs[j][self.tuple_index(&self.machine_pos[j], mu)];
            let kj: BTreeSet<usize> = self.sys.machines[j].knowledge[q].iter().copied().collect();
            x = Some(match x {
                None => kj,
                Some(prev) => prev.intersection(&kj).copied().collect(),
            });
        }
        x.unwrap_or_default()
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| (v + 1).to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl InstanceProduct {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn outgoing(&self, s: usize) -> impl Iterator<Item = &ProductTransition> {
        let lo = self.transitions.partition_point(|t| t.from < s);
        self.transitions[lo..].iter().take_while(move |t| t.from == s)
    }

    pub fn instance_text(&self, mu: &Instance) -> String {
        let parts: Vec<String> =
            self.parameters.iter().zip(&mu.0).map(|(p, v)| format!("{p}={}", v + 1)).collect();
        format!("({})", parts.join(", "))
    }

    /// Projection of a label onto instance `mu`, as a letter of the
    /// original alphabet.
    pub fn project(&self, label: &BTreeSet<InstProp>, mu: &Instance) -> Letter {
        let pos = |k: usize| -> Vec<usize> {
            self.alphabet.entries[k]
                .params
                .iter()
                .map(|p| mu.0[self.parameters.iter().position(|q| q == p).expect("parameter")])
                .collect()
        };
        let mut out = 0;
        for k in 0..self.alphabet.len() {
            if label.contains(&InstProp { prop: k, args: pos(k) }) {
                out |= 1 << k;
            }
        }
        out
    }

    /// Whether a projected step is removed from the instance trace: no call
    /// and only self-updates.
    pub fn is_idle(&self, projected: Letter) -> bool {
        let a = &self.alphabet;
        let changing = a.output_mask() & !a.self_update_mask();
        projected & a.call_mask() == 0 && projected & changing == 0
    }

    /// Number of transitions whose label does not hold exactly one call.
    pub fn single_call_violations(&self) -> usize {
        self.transitions
            .iter()
            .filter(|t| t.label.iter().filter(|p| self.alphabet.entries[p.prop].is_call()).count() != 1)
            .count()
    }
}

/// Builds the reachable part of the instance product.
pub fn build_instance_product(
    sys: &SplitSystem,
    cfg: &ProductConfig,
) -> Result<InstanceProduct, SplitError> {
    if cfg.domain == 0 {
        return Err(SplitError::EmptyDomain);
    }
    let shape = Shape::new(sys, cfg.domain);
    let instances: Vec<Instance> =
        shape.all_tuples(sys.parameters.len()).into_iter().map(Instance).collect();
    let initial = ProductState {
        funcs: sys
            .machines
            .iter()
            .map(|m| vec![m.initial(); shape.tuple_count(m.subset.0.len())])
            .collect(),
    };
    let chains: Vec<Vec<usize>> = (0..sys.machines.len())
        .map(|i| {
            let mut c = vec![i];
            c.extend(sys.ancestors(i));
            c
        })
        .collect();
    let mut states = vec![initial.clone()];
    let mut index: HashMap<ProductState, usize> = HashMap::from([(initial, 0)]);
    let mut transitions = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        for mover in &instances {
            for (i, mi) in sys.machines.iter().enumerate() {
                let slot = shape.tuple_index(&shape.machine_pos[i], mover);
                let qi = states[s].funcs[i][slot];
                let x = shape.knowledge(&states[s], &chains[i], mover);
                for (ti, t) in mi.transitions.iter().enumerate() {
                    if t.from != qi || !x.is_subset(&t.guard) {
                        continue;
                    }
                    let mut next = states[s].clone();
                    next.funcs[i][slot] = t.to;
                    let to = match index.get(&next) {
                        Some(&id) => id,
                        None => {
                            if states.len() >= cfg.state_cap {
                                return Err(SplitError::ProductCap { cap: cfg.state_cap });
                            }
                            let id = states.len();
                            index.insert(next.clone(), id);
                            states.push(next);
                            queue.push_back(id);
                            id
                        }
                    };
                    transitions.push(ProductTransition {
                        from: s,
                        to,
                        machine: i,
                        sub_transition: ti,
                        mover: mover.clone(),
                        label: shape.label(t.letter, mover),
                    });
                }
            }
        }
    }
    transitions.sort_by(|a, b| {
        (a.from, a.machine, a.sub_transition, &a.mover, a.to)
            .cmp(&(b.from, b.machine, b.sub_transition, &b.mover, b.to))
    });
    Ok(InstanceProduct {
        parameters: sys.parameters.clone(),
        domain: cfg.domain,
        instances,
        states,
        transitions,
        alphabet: sys.original.alphabet.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProgressFailure {
    pub state: usize,
    pub instance: String,
    pub inputs: String,
}

/// Every instance can progress from every product state: each predicate
/// valuation the original machine accepts in some state compatible with
/// the instance's combined knowledge is covered by an outgoing transition.
/// Method-call inputs are excluded since calls blocked by requirements are
/// rejected on purpose.
pub fn check_progress(sys: &SplitSystem, product: &InstanceProduct) -> Vec<ProgressFailure> {
    let shape = Shape::new(sys, product.domain);
    let all: Vec<usize> = (0..sys.machines.len()).collect();
    let a = &sys.original.alphabet;
    let preds = a.input_mask() & !a.call_mask();
    let mut out = Vec::new();
    for (s, state) in product.states.iter().enumerate() {
        for mu in &product.instances {
            let k = shape.knowledge(state, &all, mu);
            let required: BTreeSet<Letter> = k
                .iter()
                .flat_map(|&w| sys.original.outgoing(w).iter().map(|t| t.letter & preds))
                .collect();
            let available: BTreeSet<Letter> =
                product.outgoing(s).map(|t| product.project(&t.label, mu) & preds).collect();
            for r in required {
                if !available.iter().any(|b| b & r == r) {
                    let names = a.names(r).join(", ");
                    out.push(ProgressFailure {
                        state: s,
                        instance: product.instance_text(mu),
                        inputs: format!("{{{names}}}"),
                    });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lemma1Witness {
    pub instance: String,
    /// Common prefix accepted by both sides.
    pub trace: Vec<String>,
    /// Next letter possible on exactly one side.
    pub letter: String,
    /// Whether the product (rather than the original machine) has it.
    pub in_product: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Lemma1Verdict {
    Equivalent { instances: usize, explored: usize },
    Witness(Lemma1Witness),
}

impl Lemma1Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Lemma1Verdict::Equivalent { .. })
    }

    pub fn to_text(&self) -> String {
        match self {
            Lemma1Verdict::Equivalent { instances, explored } => {
                format!("equivalent ({instances} instances, {explored} configurations)\n")
            }
            Lemma1Verdict::Witness(w) => {
                let side = if w.in_product { "product only" } else { "original only" };
                let mut out = format!("witness for instance {}:\n", w.instance);
                for l in &w.trace {
                    out.push_str(&format!("  {l}\n"));
                }
                out.push_str(&format!("  {} ({side})\n", w.letter));
                out
            }
        }
    }
}

/// Compares, per instance, the projected product traces of length up to
/// `depth` with the traces of the original machine.
pub fn check_lemma1(sys: &SplitSystem, product: &InstanceProduct, depth: usize) -> Lemma1Verdict {
    let w = &sys.original;
    let mut explored = 0;
    for mu in &product.instances {
        let proj: Vec<Letter> =
            product.transitions.iter().map(|t| product.project(&t.label, mu)).collect();
        let outgoing: Vec<Vec<usize>> = {
            let mut v = vec![Vec::new(); product.states.len()];
            for (k, t) in product.transitions.iter().enumerate() {
                v[t.from].push(k);
            }
            v
        };
        let closure = |seed: BTreeSet<usize>| -> BTreeSet<usize> {
            let mut seen = seed.clone();
            let mut stack: Vec<usize> = seed.into_iter().collect();
            while let Some(s) = stack.pop() {
                for &k in &outgoing[s] {
                    let to = product.transitions[k].to;
                    if product.is_idle(proj[k]) && seen.insert(to) {
                        stack.push(to);
                    }
                }
            }
            seen
        };
        type Node = (BTreeSet<usize>, BTreeSet<usize>);
        let start: Node = (closure(BTreeSet::from([0])), BTreeSet::from([w.initial()]));
        let mut parent: HashMap<Node, Option<(Node, Letter)>> = HashMap::new();
        parent.insert(start.clone(), None);
        let mut queue = VecDeque::from([(start, 0usize)]);
        while let Some((node, d)) = queue.pop_front() {
            explored += 1;
            if d >= depth {
                continue;
            }
            let mut in_w: BTreeMap<Letter, BTreeSet<usize>> = BTreeMap::new();
            for &s in &node.1 {
                for t in w.outgoing(s) {
                    in_w.entry(t.letter).or_default().insert(t.to);
                }
            }
            let mut in_p: BTreeMap<Letter, BTreeSet<usize>> = BTreeMap::new();
            for &s in &node.0 {
                for &k in &outgoing[s] {
                    if !product.is_idle(proj[k]) {
                        in_p.entry(proj[k]).or_default().insert(product.transitions[k].to);
                    }
                }
            }
            let only_p = in_p.keys().find(|l| !in_w.contains_key(l));
            let only_w = in_w.keys().find(|l| !in_p.contains_key(l));
            if let Some((&letter, in_product)) =
                only_p.map(|l| (l, true)).or_else(|| only_w.map(|l| (l, false)))
            {
                let mut trace = Vec::new();
                let mut cur = node.clone();
                while let Some(Some((prev, l))) = parent.get(&cur) {
                    trace.push(w.alphabet.render_letter(*l));
                    cur = prev.clone();
                }
                trace.reverse();
                return Lemma1Verdict::Witness(Lemma1Witness {
                    instance: product.instance_text(mu),
                    trace,
                    letter: w.alphabet.render_letter(letter),
                    in_product,
                });
            }
            for (letter, targets) in in_p {
                let next: Node = (closure(targets), in_w[&letter].clone());
                if !parent.contains_key(&next) {
                    parent.insert(next.clone(), Some((node.clone(), letter)));
                    queue.push_back((next, d + 1));
                }
            }
        }
    }
    Lemma1Verdict::Equivalent { instances: product.instances.len(), explored }
}
