//! Synthesis of smart-contract control flow from past-time temporal stream
//! logic specifications.
//!
//! The pipeline parses a specification ([`frontend`]), approximates it by a
//! propositional past-time formula ([`ltl`]), solves the resulting safety
//! game with decision diagrams ([`bdd`], [`game`]), and post-processes the
//! winning region ([`machine`]).

pub mod bdd;
pub mod frontend;
pub mod game;
pub mod ltl;
pub mod machine;
pub mod pipeline;
pub mod solidity;
pub mod split;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] frontend::ParseError),
    #[error(transparent)]
    Desugar(#[from] frontend::DesugarError),
    #[error(transparent)]
    Game(#[from] game::GameError),
    #[error(transparent)]
    Analysis(#[from] machine::AnalysisError),
    #[error(transparent)]
    Split(#[from] split::SplitError),
    #[error(transparent)]
    Solidity(#[from] solidity::SolidityError),
    #[error("specification is unrealizable")]
    Unrealizable,
}
