//! Term, predicate and update translation to Solidity expressions.

use super::signature::{FunctionSig, MethodSig, SignatureConfig};
use super::SolidityError;
use crate::frontend::{FunctionTerm, PredicateTerm, TermKind, UpdateTerm, ARG_PREFIX};

/// Translation context of one method body.
pub(crate) struct Ctx<'a> {
    pub sig: &'a SignatureConfig,
    pub method: &'a str,
    pub msig: &'a MethodSig,
}

impl Ctx<'_> {
    fn parameter(&self, p: &str) -> Result<String, SolidityError> {
        match self.msig.parameters.iter().find(|b| b.name() == p) {
            Some(b) => Ok(b.fixed().map(String::from).unwrap_or_else(|| format!("_{p}"))),
            None => Err(SolidityError::Unsupported(format!(
                "parameter `{p}` is not a parameter of method `{}`",
                self.method
            ))),
        }
    }

    fn input(&self, name: &str) -> Result<String, SolidityError> {
        if let Some(label) = name.strip_prefix(ARG_PREFIX) {
            if !self.msig.arguments.iter().any(|(a, _)| a == label) {
                return Err(SolidityError::MissingSignature {
                    kind: "argument",
                    name: format!("{}.{label}", self.method),
                });
            }
            return Ok(format!("_{label}"));
        }
        match name {
            "sender" => Ok("msg.sender".into()),
            "time" => Ok("block.timestamp".into()),
            _ => self.sig.inputs.get(name).cloned().ok_or_else(|| SolidityError::MissingSignature {
                kind: "input",
                name: name.to_string(),
            }),
        }
    }

    /// Returns the expression and whether it is an infix operation that
    /// needs parentheses when nested.
    fn term_inner(&self, t: &FunctionTerm) -> Result<(String, bool), SolidityError> {
        Ok(match t.kind {
            TermKind::Input => (self.input(&t.symbol)?, false),
            TermKind::Parameter => (self.parameter(&t.symbol)?, false),
            TermKind::Constant => (t.symbol.clone(), false),
            TermKind::Cell => {
                let mut s = t.symbol.clone();
                for a in &t.args {
                    s.push_str(&format!("[{}]", self.term(a)?));
                }
                (s, false)
            }
            TermKind::Application if matches!(t.symbol.as_str(), "+" | "-") && t.args.len() == 2 => {
                let l = self.nested(&t.args[0])?;
                let r = self.nested(&t.args[1])?;
                (format!("{l} {} {r}", t.symbol), true)
            }
            TermKind::Application => {
                let f = self.sig.functions.get(&t.symbol).ok_or_else(|| {
                    SolidityError::MissingSignature { kind: "function", name: t.symbol.clone() }
                })?;
                (self.instantiate(&t.symbol, f, &f.definition, &t.args)?, true)
            }
        })
    }

    fn nested(&self, t: &FunctionTerm) -> Result<String, SolidityError> {
        let (s, infix) = self.term_inner(t)?;
        Ok(if infix { format!("({s})") } else { s })
    }

    pub fn term(&self, t: &FunctionTerm) -> Result<String, SolidityError> {
        Ok(self.term_inner(t)?.0)
    }

    fn instantiate(
        &self,
        name: &str,
        f: &FunctionSig,
        template: &str,
        args: &[FunctionTerm],
    ) -> Result<String, SolidityError> {
        if f.arguments.len() != args.len() {
            return Err(SolidityError::Arity {
                kind: "function",
                name: name.to_string(),
                expected: f.arguments.len(),
                found: args.len(),
            });
        }
        let mut values = Vec::new();
        for (a, t) in f.arguments.iter().zip(args) {
            values.push((a.as_str(), self.nested(t)?));
        }
        for p in &f.parameters {
            values.push((p.as_str(), self.parameter(p)?));
        }
        Ok(substitute(template, &values))
    }

    pub fn predicate(&self, p: &PredicateTerm) -> Result<String, SolidityError> {
        let arg = |k: usize| self.nested(&p.args[k]);
        let cmp = |op: &str| -> Result<String, SolidityError> {
            Ok(format!("{} {op} {}", arg(0)?, arg(1)?))
        };
        match (p.symbol.as_str(), p.args.len()) {
            ("=", 2) => cmp("=="),
            (op @ ("!=" | ">=" | ">" | "<=" | "<"), 2) => cmp(op),
            ("in", 2) => Ok(format!("{}[{}]", arg(1)?, self.term(&p.args[0])?)),
            ("isTrue", 1) => arg(0),
            (name, _) => {
                let f = self.sig.predicates.get(name).ok_or_else(|| {
                    SolidityError::MissingSignature { kind: "predicate", name: name.to_string() }
                })?;
                if f.side_effects {
                    return Err(SolidityError::SideEffectGuard(name.to_string()));
                }
                self.instantiate(name, f, &f.definition, &p.args)
            }
        }
    }

    /// A statement for a non-self update.
    pub fn update(&self, u: &UpdateTerm) -> Result<String, SolidityError> {
        let lhs = self.term(&u.target)?;
        if u.source.kind == TermKind::Application {
            if let Some(f) = self.sig.functions.get(&u.source.symbol) {
                if let Some(stmt) = &f.statement {
                    return Ok(format!(
                        "{};",
                        self.instantiate(&u.source.symbol, f, stmt, &u.source.args)?
                    ));
                }
            }
        }
        Ok(format!("{lhs} = {};", self.term(&u.source)?))
    }
}

/// Replaces whole identifiers of `template` by their values; member
/// accesses such as `msg.sender` are left alone.
pub(crate) fn substitute(template: &str, values: &[(&str, String)]) -> String {
    let mut out = String::new();
    let mut word = String::new();
    let mut member = false;
    let mut prev = ' ';
    for c in template.chars().chain(std::iter::once(' ')) {
        if c.is_alphanumeric() || c == '_' {
            if word.is_empty() {
                member = prev == '.';
            }
            word.push(c);
        } else {
            if !word.is_empty() {
                match values.iter().find(|(n, _)| *n == word) {
                    Some((_, v)) if !member => out.push_str(v),
                    _ => out.push_str(&word),
                }
                word.clear();
            }
            out.push(c);
        }
        prev = c;
    }
    out.pop();
    out
}
