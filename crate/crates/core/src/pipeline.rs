//! End-to-end synthesis: parse, desugar, approximate, solve, extract,
//! minimize and analyze.

use crate::frontend::{desugar, parse_spec_with, Declarations, PastTslSpec};
use crate::game::{
    build_game, closure_violations, extract_machine, winning_region, GameConfig,
};
use crate::ltl::{approximate, Approximation};
use crate::machine::{
    minimize, resolve_free_choices, AnalysisReport, DeterminedClass, FreeChoicePolicy, Letter,
    MealyMachine,
};
use crate::Error;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Default)]
pub struct SynthesisOptions {
    pub game: GameConfig,
    pub policy: FreeChoicePolicy,
    pub determined: BTreeMap<String, DeterminedClass>,
    /// Keep a dump of the decision-diagram arena after solving.
    pub dump_bdd: bool,
}

#[derive(Debug, Clone)]
pub struct Synthesis {
    pub spec: PastTslSpec,
    pub approximation: Approximation,
    /// Reachable winning region with every winning output.
    pub extracted: MealyMachine,
    /// Minimized winning region; free choices are still present.
    pub machine: MealyMachine,
    /// Minimized strategy after free-choice resolution.
    pub strategy: MealyMachine,
    pub report: AnalysisReport,
    /// Extracted states missing a transition for an allowed input.
    pub closure_violations: Vec<(usize, Letter)>,
    pub game_iterations: usize,
    pub bdd_dump: Option<String>,
}

/// Parses and desugars a specification, with optional external declarations.
pub fn load_spec(text: &str, external: Option<&Declarations>) -> Result<PastTslSpec, Error> {
    let empty = Declarations::default();
    let parsed = parse_spec_with(text, external.unwrap_or(&empty))?;
    Ok(desugar(&parsed)?)
}

pub fn synthesize_spec(spec: &PastTslSpec, opts: &SynthesisOptions) -> Result<Synthesis, Error> {
    let approximation = approximate(spec);
    let mut game = build_game(&approximation, &opts.game)?;
    let region = winning_region(&mut game);
    let bdd_dump = opts.dump_bdd.then(|| game.debug_dump());
    if !region.initial_winning {
        return Err(Error::Unrealizable);
    }
    let extraction = extract_machine(&mut game, &region, &opts.game)?;
    let closure = closure_violations(&mut game, &extraction);
    let extracted = extraction.machine;
    let machine = minimize(&extracted);
    let strategy = minimize(&resolve_free_choices(&machine, opts.policy)?);
    let mut report = AnalysisReport::analyze(&machine, &opts.determined)?;
    report.warnings = spec.warnings.clone();
    Ok(Synthesis {
        spec: spec.clone(),
        approximation,
        extracted,
        machine,
        strategy,
        report,
        closure_violations: closure,
        game_iterations: region.iterations,
        bdd_dump,
    })
}

pub fn synthesize(text: &str, opts: &SynthesisOptions) -> Result<Synthesis, Error> {
    synthesize_spec(&load_spec(text, None)?, opts)
}
