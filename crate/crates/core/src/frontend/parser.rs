//! Line-oriented parser for the specification language.
//!
//! A specification is a sequence of lines. Lines starting with `#` either
//! declare symbols (`#params`, `#methods`, `#cells`, `#functions`,
//! `#predicates`, `#constants`, `#inputs`, `#input_props`, `#output_props`)
//! or open a formula section (`#assume`, `#require`, `#obligation`). Every
//! other non-empty line is one formula. A line of the form `G(...)` is an
//! invariant, anything else constrains the first position only. `//` starts
//! a comment.

use super::ast::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: undeclared identifier `{name}`")]
    Undeclared { line: usize, col: usize, name: String },
    #[error("{line}:{col}: parameter `{name}` is not bound by the #params prefix")]
    UnboundParameter { line: usize, col: usize, name: String },
    #[error("{line}:{col}: future-time operator `{op}` is not supported")]
    FutureOperator { line: usize, col: usize, op: String },
}

impl ParseError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            ParseError::Syntax { line, col, .. }
            | ParseError::Undeclared { line, col, .. }
            | ParseError::UnboundParameter { line, col, .. }
            | ParseError::FutureOperator { line, col, .. } => (*line, *col),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    ArgLabel(String),
    LParen,
    RParen,
    Comma,
    OpenUpdate,
    CloseUpdate,
    LeftArrow,
    Arrow,
    Iff,
    AndAnd,
    OrOr,
    Bang,
    Cmp(&'static str),
    Plus,
    Minus,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    col: usize,
}

const FUTURE_OPERATORS: [&str; 5] = ["X", "F", "U", "W", "R"];
const KEYWORDS: [&str; 9] = ["Y", "WY", "S", "O", "H", "G", "true", "false", "in"];

fn lex(line_no: usize, text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |col: usize, msg: String| ParseError::Syntax { line: line_no, col, msg };
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        let peek = |k: usize| chars.get(i + k).copied();
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '/' && peek(1) == Some('/') {
            break;
        }
        let (tok, len) = match c {
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            ',' => (Tok::Comma, 1),
            '+' => (Tok::Plus, 1),
            '[' if peek(1) == Some('[') => (Tok::OpenUpdate, 2),
            ']' if peek(1) == Some(']') => (Tok::CloseUpdate, 2),
            '<' if peek(1) == Some('-') && peek(2) == Some('>') => (Tok::Iff, 3),
            '<' if peek(1) == Some('-') => (Tok::LeftArrow, 2),
            '<' if peek(1) == Some('=') => (Tok::Cmp("<="), 2),
            '<' => (Tok::Cmp("<"), 1),
            '>' if peek(1) == Some('=') => (Tok::Cmp(">="), 2),
            '>' => (Tok::Cmp(">"), 1),
            '-' if peek(1) == Some('>') => (Tok::Arrow, 2),
            '-' => (Tok::Minus, 1),
            '&' if peek(1) == Some('&') => (Tok::AndAnd, 2),
            '|' if peek(1) == Some('|') => (Tok::OrOr, 2),
            '!' if peek(1) == Some('=') => (Tok::Cmp("!="), 2),
            '!' => (Tok::Bang, 1),
            '=' if peek(1) == Some('=') => (Tok::Cmp("="), 2),
            '=' => (Tok::Cmp("="), 1),
            '∈' => (Tok::Cmp("in"), 1),
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[start..j].iter().collect();
                if word == "arg" && chars.get(j) == Some(&'@') {
                    let mut k = j + 1;
                    while k < chars.len() && (chars[k].is_alphanumeric() || chars[k] == '_') {
                        k += 1;
                    }
                    if k == j + 1 {
                        return Err(err(col, "expected a label after `arg@`".into()));
                    }
                    let label: String = chars[j + 1..k].iter().collect();
                    (Tok::ArgLabel(label), k - i)
                } else if word == "in" {
                    (Tok::Cmp("in"), j - i)
                } else {
                    (Tok::Ident(word), j - i)
                }
            }
            other => return Err(err(col, format!("unexpected character `{other}`"))),
        };
        out.push(Token { tok, col });
        i += len;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Assume,
    Require,
    Obligation,
}

/// Parses a specification using only its inline declarations.
pub fn parse_spec(text: &str) -> Result<PastTslSpec, ParseError> {
    parse_spec_with(text, &Declarations::default())
}

/// Parses a specification whose symbols may additionally be declared
/// externally, e.g. by a signatures file.
pub fn parse_spec_with(text: &str, external: &Declarations) -> Result<PastTslSpec, ParseError> {
    let mut spec = PastTslSpec { declarations: external.clone(), ..Default::default() };
    let mut section: Option<Section> = None;
    let mut pending: Vec<(usize, &str)> = Vec::new();

    // Declarations are collected in a first pass so formulas may precede
    // the declaration lines that introduce their symbols.
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(directive) = line.strip_prefix('#') {
            let (head, rest) = match directive.find(char::is_whitespace) {
                Some(p) => (&directive[..p], directive[p..].trim()),
                None => (directive, ""),
            };
            let items = || split_items(rest);
            let decls = &mut spec.declarations;
            match head {
                "assume" | "assumptions" => section = Some(Section::Assume),
                "require" | "requirements" => section = Some(Section::Require),
                "obligation" | "obligations" => section = Some(Section::Obligation),
                "params" | "parameters" => {
                    for item in items() {
                        let (name, _) = parse_decl_item(line_no, &item)?;
                        if !spec.parameters.contains(&name) {
                            spec.parameters.push(name.clone());
                        }
                        decls.parameters.insert(name);
                    }
                }
                "methods" => {
                    for item in items() {
                        let (name, params) = parse_decl_item(line_no, &item)?;
                        decls.add_method(&name, params.unwrap_or_default());
                    }
                }
                "cells" => {
                    for item in items() {
                        let (name, params) = parse_decl_item(line_no, &item)?;
                        decls.cells.insert(name, params.unwrap_or_default());
                    }
                }
                "functions" | "predicates" => {
                    for item in items() {
                        let (name, arity) = match item.split_once('/') {
                            Some((n, a)) => {
                                let arity = a.trim().parse::<usize>().map_err(|_| {
                                    ParseError::Syntax {
                                        line: line_no,
                                        col: 1,
                                        msg: format!("bad arity in `{item}`"),
                                    }
                                })?;
                                (n.trim().to_string(), Some(arity))
                            }
                            None => (item.clone(), None),
                        };
                        check_ident(line_no, &name)?;
                        if head == "functions" {
                            decls.functions.insert(name, arity);
                        } else {
                            decls.predicates.insert(name, arity);
                        }
                    }
                }
                "constants" => {
                    for item in items() {
                        check_ident(line_no, &item)?;
                        decls.constants.insert(item);
                    }
                }
                "inputs" => {
                    for item in items() {
                        check_ident(line_no, &item)?;
                        decls.inputs.insert(item);
                    }
                }
                "input_props" => {
                    for item in items() {
                        check_ident(line_no, &item)?;
                        decls.input_props.insert(item);
                    }
                }
                "output_props" => {
                    for item in items() {
                        check_ident(line_no, &item)?;
                        decls.output_props.insert(item);
                    }
                }
                other => {
                    return Err(ParseError::Syntax {
                        line: line_no,
                        col: 1,
                        msg: format!("unknown directive `#{other}`"),
                    })
                }
            }
            continue;
        }
        let Some(sec) = section else {
            return Err(ParseError::Syntax {
                line: line_no,
                col: 1,
                msg: "formula outside of an #assume/#require/#obligation section".into(),
            });
        };
        let tag = match sec {
            Section::Assume => "a",
            Section::Require => "r",
            Section::Obligation => "o",
        };
        pending.push((line_no, tag));
        let _ = line;
    }

    let lines: Vec<&str> = text.lines().collect();
    for (line_no, tag) in pending {
        let line = strip_comment(lines[line_no - 1]);
        let tokens = lex(line_no, line)?;
        let mut parser = Parser { tokens: &tokens, pos: 0, line: line_no, spec: &spec };
        let (invariant, formula) = parser.parse_line()?;
        let list = match (tag, invariant) {
            ("a", false) => &mut spec.assumptions_init,
            ("a", true) => &mut spec.assumptions_inv,
            ("r", false) => &mut spec.requirements_init,
            ("r", true) => &mut spec.requirements_inv,
            ("o", false) => &mut spec.obligations_init,
            _ => &mut spec.obligations_inv,
        };
        list.push(formula);
    }
    Ok(spec)
}

fn strip_comment(line: &str) -> &str {
    match line.find("//") {
        Some(p) => &line[..p],
        None => line,
    }
}

/// Splits `a, b(m, n), c` at top-level commas.
fn split_items(rest: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for c in rest.chars() {
        match c {
            '(' => {
                depth += 1;
                cur.push(c);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                cur.push(c);
            }
            ',' if depth == 0 => {
                if !cur.trim().is_empty() {
                    out.push(cur.trim().to_string());
                }
                cur.clear();
            }
            _ => cur.push(c),
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn check_ident(line: usize, name: &str) -> Result<(), ParseError> {
    let ok = !name.is_empty()
        && name.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_alphanumeric() || c == '_');
    if !ok {
        return Err(ParseError::Syntax { line, col: 1, msg: format!("bad identifier `{name}`") });
    }
    if KEYWORDS.contains(&name) || FUTURE_OPERATORS.contains(&name) {
        return Err(ParseError::Syntax {
            line,
            col: 1,
            msg: format!("`{name}` is reserved"),
        });
    }
    Ok(())
}

fn parse_decl_item(line: usize, item: &str) -> Result<(String, Option<Vec<String>>), ParseError> {
    match item.find('(') {
        Some(p) => {
            let name = item[..p].trim().to_string();
            let inner = item[p + 1..].trim_end();
            let inner = inner.strip_suffix(')').ok_or_else(|| ParseError::Syntax {
                line,
                col: 1,
                msg: format!("unbalanced parentheses in `{item}`"),
            })?;
            check_ident(line, &name)?;
            let params: Vec<String> = split_items(inner);
            for p in &params {
                check_ident(line, p)?;
            }
            Ok((name, Some(params)))
        }
        None => {
            check_ident(line, item)?;
            Ok((item.to_string(), None))
        }
    }
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    line: usize,
    spec: &'a PastTslSpec,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + k).map(|t| &t.tok)
    }

    fn col(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|t| t.col)
            .or_else(|| self.tokens.last().map(|t| t.col + 1))
            .unwrap_or(1)
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError::Syntax { line: self.line, col: self.col(), msg: msg.into() })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.syntax(format!("expected {what}"))
        }
    }

    fn is_ident(&self, name: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == name)
    }

    /// Returns whether the line is an invariant `G(...)` and its body.
    fn parse_line(&mut self) -> PResult<(bool, PastTslFormula)> {
        if self.tokens.is_empty() {
            return self.syntax("empty formula");
        }
        let mut invariant = false;
        if self.is_ident("G") && self.peek_at(1) == Some(&Tok::LParen) {
            match self.matching_paren(self.pos + 1) {
                Some(close) if close + 1 == self.tokens.len() => {
                    invariant = true;
                    self.pos += 2;
                    let body = self.formula()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok((invariant, body));
                }
                Some(_) => {}
                None => {
                    self.pos = self.tokens.len();
                    return self.syntax("unclosed `(`");
                }
            }
        }
        let body = self.formula()?;
        if self.pos < self.tokens.len() {
            return self.syntax("unexpected trailing input");
        }
        Ok((invariant, body))
    }

    fn matching_paren(&self, open: usize) -> Option<usize> {
        let mut depth = 0usize;
        for (i, t) in self.tokens.iter().enumerate().skip(open) {
            match t.tok {
                Tok::LParen => depth += 1,
                Tok::RParen => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(i);
                    }
                }
                _ => {}
            }
        }
        None
    }

    fn formula(&mut self) -> PResult<PastTslFormula> {
        let mut lhs = self.implication()?;
        while self.peek() == Some(&Tok::Iff) {
            self.pos += 1;
            let rhs = self.implication()?;
            lhs = PastTslFormula::Iff(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> PResult<PastTslFormula> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.implication()?;
            return Ok(PastTslFormula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<PastTslFormula> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(&Tok::OrOr) {
            self.pos += 1;
            let rhs = self.conjunction()?;
            lhs = PastTslFormula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> PResult<PastTslFormula> {
        let mut lhs = self.since()?;
        while self.peek() == Some(&Tok::AndAnd) {
            self.pos += 1;
            let rhs = self.since()?;
            lhs = PastTslFormula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn since(&mut self) -> PResult<PastTslFormula> {
        let mut lhs = self.unary()?;
        while self.is_ident("S") {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = PastTslFormula::Since(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<PastTslFormula> {
        if self.peek() == Some(&Tok::Bang) {
            self.pos += 1;
            return Ok(PastTslFormula::not(self.unary()?));
        }
        if let Some(Tok::Ident(word)) = self.peek() {
            let wrap: Option<fn(Box<PastTslFormula>) -> PastTslFormula> = match word.as_str() {
                "Y" => Some(PastTslFormula::Yesterday),
                "WY" => Some(PastTslFormula::WeakYesterday),
                "O" => Some(PastTslFormula::Once),
                "H" => Some(PastTslFormula::Historically),
                _ => None,
            };
            if let Some(wrap) = wrap {
                self.pos += 1;
                return Ok(wrap(Box::new(self.unary()?)));
            }
            if FUTURE_OPERATORS.contains(&word.as_str()) || word == "G" {
                return Err(ParseError::FutureOperator {
                    line: self.line,
                    col: self.col(),
                    op: word.clone(),
                });
            }
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<PastTslFormula> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::OpenUpdate) => {
                self.pos += 1;
                let target_col = self.col();
                let target = self.term()?;
                if target.kind != TermKind::Cell {
                    return Err(ParseError::Syntax {
                        line: self.line,
                        col: target_col,
                        msg: "update target must be a cell".into(),
                    });
                }
                self.expect(Tok::LeftArrow, "`<-`")?;
                let source = self.term()?;
                self.expect(Tok::CloseUpdate, "`]]`")?;
                Ok(PastTslFormula::Update(UpdateTerm { target, source }))
            }
            Some(Tok::Ident(word)) => self.atomic(word),
            Some(Tok::ArgLabel(_)) => self.comparison(),
            Some(_) => self.syntax("expected a formula"),
            None => self.syntax("unexpected end of formula"),
        }
    }

    fn atomic(&mut self, word: String) -> PResult<PastTslFormula> {
        let decls = &self.spec.declarations;
        match word.as_str() {
            "true" => {
                self.pos += 1;
                return Ok(PastTslFormula::True);
            }
            "false" => {
                self.pos += 1;
                return Ok(PastTslFormula::False);
            }
            _ => {}
        }
        if let Some(declared) = decls.methods.get(&word) {
            let declared = declared.clone();
            let col = self.col();
            self.pos += 1;
            let params = if self.peek() == Some(&Tok::LParen) {
                self.pos += 1;
                let mut ps = Vec::new();
                if self.peek() != Some(&Tok::RParen) {
                    loop {
                        let pcol = self.col();
                        match self.bump() {
                            Some(Tok::Ident(p)) => {
                                self.check_parameter(&p, pcol)?;
                                ps.push(p);
                            }
                            _ => {
                                return Err(ParseError::Syntax {
                                    line: self.line,
                                    col: pcol,
                                    msg: "expected a parameter".into(),
                                })
                            }
                        }
                        if self.peek() == Some(&Tok::Comma) {
                            self.pos += 1;
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::RParen, "`)`")?;
                ps
            } else {
                Vec::new()
            };
            if params != declared {
                return Err(ParseError::Syntax {
                    line: self.line,
                    col,
                    msg: format!(
                        "method `{word}` must be called with parameters ({})",
                        declared.join(", ")
                    ),
                });
            }
            return Ok(PastTslFormula::MethodCall { name: word, params });
        }
        if decls.input_props.contains(&word) {
            self.pos += 1;
            return Ok(PastTslFormula::Predicate(PredicateTerm::new(word, Vec::new())));
        }
        if decls.output_props.contains(&word) {
            self.pos += 1;
            return Ok(PastTslFormula::OutputProp(word));
        }
        if decls.predicates.contains_key(&word) || word == BUILTIN_IS_TRUE {
            let arity = decls.predicates.get(&word).copied().flatten();
            let arity = if word == BUILTIN_IS_TRUE { Some(1) } else { arity };
            let col = self.col();
            self.pos += 1;
            let args = if self.peek() == Some(&Tok::LParen) {
                self.term_args()?
            } else {
                Vec::new()
            };
            if let Some(n) = arity {
                if n != args.len() {
                    return Err(ParseError::Syntax {
                        line: self.line,
                        col,
                        msg: format!("predicate `{word}` expects {n} argument(s)"),
                    });
                }
            }
            return Ok(PastTslFormula::Predicate(PredicateTerm::new(word, args)));
        }
        self.comparison()
    }

    fn comparison(&mut self) -> PResult<PastTslFormula> {
        let lhs = self.term()?;
        match self.peek() {
            Some(Tok::Cmp(op)) => {
                let op = *op;
                self.pos += 1;
                let rhs = self.term()?;
                Ok(PastTslFormula::Predicate(PredicateTerm::new(op, vec![lhs, rhs])))
            }
            _ => self.syntax("expected a comparison operator after term"),
        }
    }

    fn term_args(&mut self) -> PResult<Vec<FunctionTerm>> {
        self.expect(Tok::LParen, "`(`")?;
        let mut args = Vec::new();
        if self.peek() != Some(&Tok::RParen) {
            loop {
                args.push(self.term()?);
                if self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(args)
    }

    fn term(&mut self) -> PResult<FunctionTerm> {
        let mut lhs = self.term_atom()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => "+",
                Some(Tok::Minus) => "-",
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term_atom()?;
            lhs = FunctionTerm::apply(op, vec![lhs, rhs]);
        }
        Ok(lhs)
    }

    fn check_parameter(&self, name: &str, col: usize) -> PResult<()> {
        if self.spec.parameters.iter().any(|p| p == name) {
            Ok(())
        } else if self.spec.declarations.parameters.contains(name) {
            Err(ParseError::UnboundParameter { line: self.line, col, name: name.to_string() })
        } else {
            Err(ParseError::Undeclared { line: self.line, col, name: name.to_string() })
        }
    }

    fn term_atom(&mut self) -> PResult<FunctionTerm> {
        let col = self.col();
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            let inner = self.term()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(inner);
        }
        match self.bump() {
            Some(Tok::ArgLabel(label)) => Ok(FunctionTerm::input(format!("{ARG_PREFIX}{label}"))),
            Some(Tok::Ident(name)) => {
                if KEYWORDS.contains(&name.as_str()) || FUTURE_OPERATORS.contains(&name.as_str()) {
                    self.pos -= 1;
                    return self.syntax(format!("unexpected keyword `{name}` in term"));
                }
                let has_args = self.peek() == Some(&Tok::LParen);
                let decls = &self.spec.declarations;
                if decls.is_input(&name) && !has_args {
                    return Ok(FunctionTerm::input(name));
                }
                if self.spec.parameters.contains(&name) && !has_args {
                    return Ok(FunctionTerm::parameter(name));
                }
                if let Some(params) = decls.cells.get(&name) {
                    let params = params.clone();
                    let args = if has_args { self.term_args()? } else { Vec::new() };
                    if args.len() != params.len() {
                        return Err(ParseError::Syntax {
                            line: self.line,
                            col,
                            msg: format!("cell `{name}` expects {} parameter(s)", params.len()),
                        });
                    }
                    if args.iter().any(|a| a.kind != TermKind::Parameter) {
                        return Err(ParseError::Syntax {
                            line: self.line,
                            col,
                            msg: format!("cell `{name}` must be indexed by parameters"),
                        });
                    }
                    return Ok(FunctionTerm { kind: TermKind::Cell, symbol: name, args });
                }
                if decls.is_constant(&name) {
                    if has_args {
                        let args = self.term_args()?;
                        if !args.is_empty() {
                            return Err(ParseError::Syntax {
                                line: self.line,
                                col,
                                msg: format!("constant `{name}` takes no arguments"),
                            });
                        }
                    }
                    return Ok(FunctionTerm::constant(name));
                }
                if let Some(arity) = decls.functions.get(&name).copied() {
                    let args = if has_args { self.term_args()? } else { Vec::new() };
                    if let Some(n) = arity {
                        if n != args.len() {
                            return Err(ParseError::Syntax {
                                line: self.line,
                                col,
                                msg: format!("function `{name}` expects {n} argument(s)"),
                            });
                        }
                    }
                    return Ok(FunctionTerm::apply(name, args));
                }
                if !has_args {
                    self.check_parameter(&name, col)?;
                }
                Err(ParseError::Undeclared { line: self.line, col, name })
            }
            _ => {
                self.pos -= 1;
                self.syntax("expected a term")
            }
        }
    }
}
