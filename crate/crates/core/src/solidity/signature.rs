//! Signature declarations mapping specification symbols to Solidity.
//!
//! Every entry may be written as a JSON object or as a positional array:
//!
//! ```json
//! {
//!   "contract": "Voting",
//!   "methods": { "vote": [[["m", "msg.sender"]], [["choice", "uint"]], false] },
//!   "functions": { "addOne": [[], ["a"], "a + 1", false] },
//!   "constants": { "cTime": ["uint", "block.timestamp + 3600"] },
//!   "cells": { "voters": [["m"], "bool", "private", ""] },
//!   "parameters": { "m": "address" }
//! }
//! ```

use super::SolidityError;
use crate::frontend::{Declarations, BUILTIN_CONSTANTS, BUILTIN_INPUTS};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A method parameter, optionally bound to a fixed expression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamBinding {
    Free(String),
    Fixed(String, String),
}

impl ParamBinding {
    pub fn name(&self) -> &str {
        match self {
            ParamBinding::Free(n) | ParamBinding::Fixed(n, _) => n,
        }
    }

    pub fn fixed(&self) -> Option<&str> {
        match self {
            ParamBinding::Free(_) => None,
            ParamBinding::Fixed(_, d) => Some(d),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodSig {
    #[serde(default)]
    pub parameters: Vec<ParamBinding>,
    /// `(name, type)` pairs.
    #[serde(default)]
    pub arguments: Vec<(String, String)>,
    #[serde(default)]
    pub payable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionSig {
    #[serde(default)]
    pub parameters: Vec<String>,
    #[serde(default)]
    pub arguments: Vec<String>,
    /// Expression over the argument names.
    #[serde(default)]
    pub definition: String,
    #[serde(default)]
    pub side_effects: bool,
    /// Statement used when the function is the source of a cell update,
    /// e.g. `s[a] = true` for set insertion.
    #[serde(default)]
    pub statement: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantSig {
    #[serde(rename = "type")]
    pub ty: String,
    /// Initializer; without one the constant becomes a constructor argument.
    #[serde(default)]
    pub value: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellSig {
    #[serde(default)]
    pub parameters: Vec<String>,
    #[serde(rename = "type")]
    pub ty: String,
    #[serde(default = "default_visibility")]
    pub visibility: String,
    #[serde(default)]
    pub location: String,
}

fn default_visibility() -> String {
    "private".into()
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Either<O, T> {
    Object(O),
    Tuple(T),
}

type MethodTuple = (Vec<ParamBinding>, Vec<(String, String)>, bool);
type FunctionTuple = (Vec<String>, Vec<String>, String, bool);
type ConstantTuple = (String, Option<String>);
type CellTuple = (Vec<String>, String, String, String);

#[derive(Deserialize)]
struct RawConfig {
    #[serde(default)]
    contract: Option<String>,
    #[serde(default)]
    methods: BTreeMap<String, Either<MethodSig, MethodTuple>>,
    #[serde(default)]
    functions: BTreeMap<String, Either<FunctionSig, FunctionTuple>>,
    #[serde(default)]
    predicates: BTreeMap<String, Either<FunctionSig, FunctionTuple>>,
    #[serde(default)]
    constants: BTreeMap<String, Either<ConstantSig, ConstantTuple>>,
    #[serde(default)]
    cells: BTreeMap<String, Either<CellSig, CellTuple>>,
    #[serde(default)]
    parameters: BTreeMap<String, String>,
    #[serde(default)]
    inputs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SignatureConfig {
    pub contract: Option<String>,
    pub methods: BTreeMap<String, MethodSig>,
    pub functions: BTreeMap<String, FunctionSig>,
    pub predicates: BTreeMap<String, FunctionSig>,
    pub constants: BTreeMap<String, ConstantSig>,
    pub cells: BTreeMap<String, CellSig>,
    /// Parameter name to Solidity value type.
    pub parameters: BTreeMap<String, String>,
    /// Solidity expressions for declared inputs beyond the built-ins.
    pub inputs: BTreeMap<String, String>,
}

fn function_sig(e: Either<FunctionSig, FunctionTuple>) -> FunctionSig {
    match e {
        Either::Object(f) => f,
        Either::Tuple((parameters, arguments, definition, side_effects)) => {
            FunctionSig { parameters, arguments, definition, side_effects, statement: None }
        }
    }
}

/// Parses a signature file.
pub fn load_signatures(text: &str) -> Result<SignatureConfig, SolidityError> {
    let raw: RawConfig =
        serde_json::from_str(text).map_err(|e| SolidityError::Config(e.to_string()))?;
    Ok(SignatureConfig {
        contract: raw.contract,
        methods: raw
            .methods
            .into_iter()
            .map(|(k, v)| {
                let sig = match v {
                    Either::Object(m) => m,
                    Either::Tuple((parameters, arguments, payable)) => {
                        MethodSig { parameters, arguments, payable }
                    }
                };
                (k, sig)
            })
            .collect(),
        functions: raw.functions.into_iter().map(|(k, v)| (k, function_sig(v))).collect(),
        predicates: raw.predicates.into_iter().map(|(k, v)| (k, function_sig(v))).collect(),
        constants: raw
            .constants
            .into_iter()
            .map(|(k, v)| {
                let sig = match v {
                    Either::Object(c) => c,
                    Either::Tuple((ty, value)) => ConstantSig { ty, value },
                };
                (k, sig)
            })
            .collect(),
        cells: raw
            .cells
            .into_iter()
            .map(|(k, v)| {
                let sig = match v {
                    Either::Object(c) => c,
                    Either::Tuple((parameters, ty, visibility, location)) => {
                        CellSig { parameters, ty, visibility, location }
                    }
                };
                (k, sig)
            })
            .collect(),
        parameters: raw.parameters,
        inputs: raw.inputs,
    })
}

fn missing(kind: &'static str, name: &str) -> SolidityError {
    SolidityError::MissingSignature { kind, name: name.to_string() }
}

fn arity(kind: &'static str, name: &str, expected: usize, found: usize) -> SolidityError {
    SolidityError::Arity { kind, name: name.to_string(), expected, found }
}

impl SignatureConfig {
    /// Checks that every declared symbol has a signature of matching shape.
    pub fn validate(&self, decls: &Declarations, parameters: &[String]) -> Result<(), SolidityError> {
        for (name, params) in &decls.methods {
            let sig = self.methods.get(name).ok_or_else(|| missing("method", name))?;
            if sig.parameters.len() != params.len() {
                return Err(arity("method", name, params.len(), sig.parameters.len()));
            }
            for (b, p) in sig.parameters.iter().zip(params) {
                if b.name() != p {
                    return Err(SolidityError::ParameterMismatch {
                        method: name.clone(),
                        expected: p.clone(),
                        found: b.name().to_string(),
                    });
                }
            }
        }
        for (name, params) in &decls.cells {
            let sig = self.cells.get(name).ok_or_else(|| missing("cell", name))?;
            if sig.parameters.len() != params.len() {
                return Err(arity("cell", name, params.len(), sig.parameters.len()));
            }
        }
        for (name, n) in &decls.functions {
            let sig = self.functions.get(name).ok_or_else(|| missing("function", name))?;
            if let Some(n) = n {
                if sig.arguments.len() != *n {
                    return Err(arity("function", name, *n, sig.arguments.len()));
                }
            }
        }
        for (name, n) in &decls.predicates {
            let sig = self.predicates.get(name).ok_or_else(|| missing("predicate", name))?;
            if let Some(n) = n {
                if sig.arguments.len() != *n {
                    return Err(arity("predicate", name, *n, sig.arguments.len()));
                }
            }
        }
        for name in &decls.constants {
            if !BUILTIN_CONSTANTS.contains(&name.as_str()) && !self.constants.contains_key(name) {
                return Err(missing("constant", name));
            }
        }
        for name in &decls.inputs {
            if !BUILTIN_INPUTS.contains(&name.as_str()) && !self.inputs.contains_key(name) {
                return Err(missing("input", name));
            }
        }
        for p in parameters {
            if !self.parameters.contains_key(p) {
                return Err(missing("parameter", p));
            }
        }
        Ok(())
    }
}
