//! Solidity generation from split systems.
//!
//! One contract holds, per parameter subset, a state enum, a current-state
//! field (a mapping over the instantiated parameters for non-empty subsets)
//! and a knowledge map. Each method dispatches on the current state of its
//! subset machine; guards on ancestor machines are precomputed from the
//! knowledge sets.

mod emit;
mod interpret;
mod signature;
mod translate;

pub use emit::{emit_contract, emit_method_body, EmittedContract, PRAGMA};
pub use interpret::{check_conformance, Interpreter};
pub use signature::{
    load_signatures, CellSig, ConstantSig, FunctionSig, MethodSig, ParamBinding, SignatureConfig,
};

use crate::machine::Letter;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolidityError {
    #[error("invalid signature file: {0}")]
    Config(String),
    #[error("missing signature for {kind} `{name}`")]
    MissingSignature { kind: &'static str, name: String },
    #[error("{kind} `{name}` expects {expected} entries, signature has {found}")]
    Arity { kind: &'static str, name: String, expected: usize, found: usize },
    #[error("method `{method}` parameter `{found}` should be `{expected}`")]
    ParameterMismatch { method: String, expected: String, found: String },
    #[error("predicate `{0}` has side effects and cannot be used in a guard")]
    SideEffectGuard(String),
    #[error("unsupported construct: {0}")]
    Unsupported(String),
    #[error("free choice remains for `{method}` at {state}")]
    FreeChoice { method: String, state: String },
    #[error("split system is not independent")]
    NotIndependent,
    #[error("invalid manifest: {0}")]
    Manifest(String),
}

/// Entities of a generated contract, sufficient to replay its dispatch
/// logic without parsing Solidity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub contract: String,
    pub pragma: String,
    /// Proposition names; bit `k` of every letter is entry `k`.
    pub alphabet: Vec<String>,
    pub parameters: Vec<String>,
    pub knowledge_enum: String,
    pub knowledge_states: Vec<String>,
    pub machines: Vec<ManifestMachine>,
    pub constants: Vec<String>,
    pub fields: Vec<String>,
    pub methods: Vec<ManifestMethod>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestMachine {
    pub subset: Vec<String>,
    pub state_enum: String,
    pub state_field: String,
    pub knowledge_map: String,
    pub states: Vec<String>,
    /// Knowledge set per state, as indices into `knowledge_states`.
    pub knowledge: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestMethod {
    pub name: String,
    /// Index into `machines`, absent if the method is never enabled.
    pub machine: Option<usize>,
    /// Bit of the method-call proposition.
    pub call: usize,
    pub arguments: Vec<String>,
    pub payable: bool,
    pub sets_guard: bool,
    pub clears_guard: bool,
    pub reverts_by_default: bool,
    pub branches: Vec<ManifestBranch>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestBranch {
    pub from: usize,
    pub to: usize,
    /// Machines whose state is consulted, with the enabled combinations.
    pub ancestors: Vec<usize>,
    pub combinations: Vec<Vec<usize>>,
    /// Input cubes `(care, value)` over non-call inputs; any one suffices.
    pub inputs: Vec<(Letter, Letter)>,
    pub outputs: Letter,
    pub condition: String,
    pub updates: Vec<String>,
}
