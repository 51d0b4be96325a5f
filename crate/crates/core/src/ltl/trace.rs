//! Reference semantics of pastLTL over finite traces.

use super::{PastLtl, PropId};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("position {position} out of range for trace of length {len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("proposition {0} is outside the alphabet")]
    OutsideAlphabet(usize),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<BTreeSet<PropId>>,
}

impl Trace {
    pub fn new(alphabet: usize, steps: Vec<BTreeSet<PropId>>) -> Result<Self, TraceError> {
        for s in &steps {
            if let Some(p) = s.iter().find(|p| p.0 >= alphabet) {
                return Err(TraceError::OutsideAlphabet(p.0));
            }
        }
        Ok(Trace { steps })
    }

    /// Builds a trace from bitmask letters (bit `k` set means proposition `k` holds).
    pub fn from_letters(letters: &[u64]) -> Self {
        let steps = letters
            .iter()
            .map(|l| (0..64).filter(|k| l >> k & 1 == 1).map(PropId).collect())
            .collect();
        Trace { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Evaluates `phi` at position `i` of `t` by the recursive definition.
pub fn eval_trace(phi: &PastLtl, t: &Trace, i: usize) -> Result<bool, TraceError> {
    if i >= t.len() {
        return Err(TraceError::PositionOutOfRange { position: i, len: t.len() });
    }
    Ok(eval(phi, t, i))
}

fn eval(phi: &PastLtl, t: &Trace, i: usize) -> bool {
    use PastLtl::*;
    match phi {
        True => true,
        False => false,
        Prop(p) => t.steps[i].contains(p),
        Not(a) => !eval(a, t, i),
        And(a, b) => eval(a, t, i) && eval(b, t, i),
        Or(a, b) => eval(a, t, i) || eval(b, t, i),
        Implies(a, b) => !eval(a, t, i) || eval(b, t, i),
        Iff(a, b) => eval(a, t, i) == eval(b, t, i),
        Yesterday(a) => i > 0 && eval(a, t, i - 1),
        WeakYesterday(a) => i == 0 || eval(a, t, i - 1),
        Since(a, b) => (0..=i).any(|j| eval(b, t, j) && (j + 1..=i).all(|k| eval(a, t, k))),
        Once(a) => (0..=i).any(|j| eval(a, t, j)),
        Historically(a) => (0..=i).all(|j| eval(a, t, j)),
    }
}

#[derive(Debug, Clone, Copy)]
enum Node {
    True,
    False,
    Prop(usize),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Iff(usize, usize),
    Yesterday(usize),
    WeakYesterday(usize),
    Since(usize, usize),
    Once(usize),
    Historically(usize),
}

/// Incremental evaluator over a stack of letters. Each pushed position stores
/// the value of every subformula; temporal operators are evaluated by
/// scanning back over the stored positions.
#[derive(Debug, Clone)]
pub struct TraceMonitor {
    nodes: Vec<Node>,
    values: Vec<Vec<bool>>,
}

impl TraceMonitor {
    pub fn new(phi: &PastLtl) -> Self {
        let mut nodes = Vec::new();
        flatten(phi, &mut nodes);
        TraceMonitor { nodes, values: Vec::new() }
    }

    pub fn depth(&self) -> usize {
        self.values.len()
    }

    /// Appends a letter and returns the formula's value at the new position.
    pub fn push(&mut self, letter: u64) -> bool {
        let i = self.values.len();
        let mut cur = vec![false; self.nodes.len()];
        for (n, node) in self.nodes.iter().enumerate() {
            let at = |k: usize, c: usize, cur: &[bool]| {
                if k == i {
                    cur[c]
                } else {
                    self.values[k][c]
                }
            };
            cur[n] = match *node {
                Node::True => true,
                Node::False => false,
                Node::Prop(p) => letter >> p & 1 == 1,
                Node::Not(a) => !cur[a],
                Node::And(a, b) => cur[a] && cur[b],
                Node::Or(a, b) => cur[a] || cur[b],
                Node::Implies(a, b) => !cur[a] || cur[b],
                Node::Iff(a, b) => cur[a] == cur[b],
                Node::Yesterday(a) => i > 0 && self.values[i - 1][a],
                Node::WeakYesterday(a) => i == 0 || self.values[i - 1][a],
                Node::Since(a, b) => {
                    let mut k = i;
                    loop {
                        if at(k, b, &cur) {
                            break true;
                        }
                        if !at(k, a, &cur) || k == 0 {
                            break false;
                        }
                        k -= 1;
                    }
                }
                Node::Once(a) => (0..=i).any(|k| at(k, a, &cur)),
                Node::Historically(a) => (0..=i).all(|k| at(k, a, &cur)),
            };
        }
        let top = *cur.last().unwrap_or(&true);
        self.values.push(cur);
        top
    }

    pub fn pop(&mut self) {
        self.values.pop();
    }
}

fn flatten(phi: &PastLtl, nodes: &mut Vec<Node>) -> usize {
    use PastLtl as L;
    let node = match phi {
        L::True => Node::True,
        L::False => Node::False,
        L::Prop(p) => Node::Prop(p.0),
        L::Not(a) => Node::Not(flatten(a, nodes)),
        L::Yesterday(a) => Node::Yesterday(flatten(a, nodes)),
        L::WeakYesterday(a) => Node::WeakYesterday(flatten(a, nodes)),
        L::Once(a) => Node::Once(flatten(a, nodes)),
        L::Historically(a) => Node::Historically(flatten(a, nodes)),
        L::And(a, b) | L::Or(a, b) | L::Implies(a, b) | L::Iff(a, b) | L::Since(a, b) => {
            let x = flatten(a, nodes);
            let y = flatten(b, nodes);
            match phi {
                L::And(..) => Node::And(x, y),
                L::Or(..) => Node::Or(x, y),
                L::Implies(..) => Node::Implies(x, y),
                L::Iff(..) => Node::Iff(x, y),
                _ => Node::Since(x, y),
            }
        }
    };
    nodes.push(node);
    nodes.len() - 1
}
