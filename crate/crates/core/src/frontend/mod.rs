//! Specification language: syntax tree, parser, printer, desugaring and
//! assembly of the global formula.

pub mod assemble;
pub mod ast;
pub mod desugar;
pub mod parser;
pub mod printer;

pub use assemble::{assemble_global_formula, assemble_parts, GlobalFormula};
pub use ast::*;
pub use desugar::{desugar, mutual_exclusion, DesugarError};
pub use parser::{parse_spec, parse_spec_with, ParseError};
pub use printer::{print_formula, print_predicate, print_spec, print_term, print_update};
