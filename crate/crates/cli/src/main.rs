//! `csynth`: synthesize smart-contract control flow from specifications.

use clap::{Args, Parser, Subcommand, ValueEnum};
use csynth::machine::{export_dot, DeterminedClass, FreeChoicePolicy};
use csynth::pipeline::{load_spec, synthesize_spec, Synthesis, SynthesisOptions};
use csynth::solidity::{emit_contract, load_signatures, EmittedContract};
use csynth::split::{
    build_instance_product, check_independence, check_lemma1, export_split_dot, split,
    ProductConfig, SplitConfig, SplitError, SplitSystem,
};
use csynth::Error;
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

mod exit {
    pub const OK: u8 = 0;
    pub const OTHER: u8 = 1;
    pub const PARSE: u8 = 2;
    pub const UNREALIZABLE: u8 = 3;
    pub const REQUIREMENT: u8 = 4;
    pub const INDEPENDENCE: u8 = 5;
    pub const WITNESS: u8 = 6;
}

#[derive(Parser)]
#[command(name = "csynth", version, about = "Synthesize smart-contract control flow from pastTSL")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write DOT, report and Solidity artifacts.
    Synthesize(SynthArgs),
    /// Synthesize and analyze only; print free choices and deadlocks.
    Check(CheckArgs),
    /// Compare the split system with the original machine on a small domain.
    Oracle(OracleArgs),
    /// Write only the Solidity contract and its manifest.
    Emit(EmitArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    LexMin,
    LexMax,
    Reject,
}

#[derive(Args)]
struct Common {
    /// Specification file.
    spec: PathBuf,
    /// Predicate classification, `PROP=constant` or `PROP=method-only`.
    #[arg(long = "determined", value_name = "PROP=CLASS")]
    determined: Vec<String>,
    /// How remaining free choices are resolved.
    #[arg(long, value_enum, default_value = "lex-min")]
    policy: Policy,
    /// Cap on explicitly enumerated states.
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    state_cap: u64,
}

#[derive(Args)]
struct Output {
    /// Output directory.
    #[arg(long, env = "CSYNTH_OUT_DIR", default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    output: Output,
    /// Signature file; enables Solidity output.
    #[arg(long)]
    signatures: Option<PathBuf>,
    #[arg(long)]
    no_dot: bool,
    #[arg(long)]
    no_solidity: bool,
    /// Stop after analysis of the winning region.
    #[arg(long)]
    analysis_only: bool,
    /// Also write the decision-diagram arena.
    #[arg(long)]
    dump_bdd: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    common: Common,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    common: Common,
    /// Values per parameter.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    domain: u64,
    /// Trace depth.
    #[arg(long, default_value_t = 5)]
    depth: usize,
    /// Knowledge override `SUBSET:STATE=s1,s2`, applied before the check.
    #[arg(long = "set-knowledge", value_name = "OVERRIDE")]
    set_knowledge: Vec<String>,
}

#[derive(Args)]
struct EmitArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    output: Output,
    #[arg(long)]
    signatures: PathBuf,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn other(message: impl Into<String>) -> Self {
        Failure { code: exit::OTHER, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) | Error::Desugar(_) => exit::PARSE,
            Error::Unrealizable => exit::UNREALIZABLE,
            Error::Split(SplitError::Requirements(_)) => exit::REQUIREMENT,
            Error::Solidity(csynth::solidity::SolidityError::NotIndependent) => exit::INDEPENDENCE,
            _ => exit::OTHER,
        };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::other(format!("{}: {e}", path.display())))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::other(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Failure::other(format!("{}: {e}", path.display())))
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "spec".into())
}

/// `erc20_extended` becomes `Erc20Extended`.
fn contract_name(stem: &str) -> String {
    stem.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(|w| {
            let mut cs = w.chars();
            cs.next().map(|c| c.to_uppercase().chain(cs).collect::<String>()).unwrap_or_default()
        })
        .collect()
}

fn options(c: &Common, dump_bdd: bool) -> Result<SynthesisOptions, Failure> {
    let mut opts = SynthesisOptions { dump_bdd, ..Default::default() };
    opts.game.state_cap = c.state_cap as usize;
    opts.policy = match c.policy {
        Policy::LexMin => FreeChoicePolicy::LexMin,
        Policy::LexMax => FreeChoicePolicy::LexMax,
        Policy::Reject => FreeChoicePolicy::Reject,
    };
    let mut determined = BTreeMap::new();
    for d in &c.determined {
        let (prop, class) = d
            .rsplit_once('=')
            .ok_or_else(|| Failure::other(format!("bad --determined `{d}`")))?;
        let class = match class.trim() {
            "constant" => DeterminedClass::Constant,
            "method-only" => DeterminedClass::MethodOnly,
            other => return Err(Failure::other(format!("unknown predicate class `{other}`"))),
        };
        determined.insert(prop.trim().to_string(), class);
    }
    opts.determined = determined;
    Ok(opts)
}

fn run_synthesis(c: &Common, dump_bdd: bool) -> Result<Synthesis, Failure> {
    let opts = options(c, dump_bdd)?;
    let spec = load_spec(&read(&c.spec)?, None).map_err(Failure::from)?;
    Ok(synthesize_spec(&spec, &opts)?)
}

fn run_split(s: &Synthesis, cap: u64) -> Result<SplitSystem, Error> {
    let cfg = SplitConfig { state_cap: cap as usize };
    Ok(split(&s.strategy, &s.spec.parameters, &cfg)?)
}

fn emit(
    s: &Synthesis,
    sys: &SplitSystem,
    signatures: &Path,
    stem: &str,
) -> Result<EmittedContract, Failure> {
    let sig = load_signatures(&read(signatures)?).map_err(Error::from)?;
    Ok(emit_contract(sys, &s.spec, &s.approximation.table, &sig, &contract_name(stem))
        .map_err(Error::from)?)
}

fn write_contract(dir: &Path, c: &EmittedContract) -> Result<(), Failure> {
    write(dir, &format!("{}.sol", c.manifest.contract), &c.source)?;
    write(dir, &format!("{}.manifest.json", c.manifest.contract), &c.manifest_json())
}

fn cmd_synthesize(a: &SynthArgs) -> Outcome {
    let s = run_synthesis(&a.common, a.dump_bdd)?;
    let dir = &a.output.out;
    let stem = stem(&a.common.spec);
    if !a.no_dot {
        write(dir, &format!("{stem}.dot"), &export_dot(&s.machine))?;
    }
    write(dir, &format!("{stem}.report.txt"), &s.report.to_text())?;
    write(dir, &format!("{stem}.report.json"), &s.report.to_json())?;
    if let Some(d) = &s.bdd_dump {
        write(dir, &format!("{stem}.bdd.txt"), d)?;
    }
    print!("{}", s.report.to_text());
    // Without method calls there is nothing to split or emit.
    if a.analysis_only || s.strategy.alphabet.call_mask() == 0 {
        return Ok(exit::OK);
    }
    let sys = match run_split(&s, a.common.state_cap) {
        Ok(sys) => sys,
        Err(Error::Split(SplitError::Requirements(r))) => {
            write(dir, &format!("{stem}.requirements.txt"), &r.to_text())?;
            eprint!("{}", r.to_text());
            return Ok(exit::REQUIREMENT);
        }
        Err(e) => return Err(e.into()),
    };
    let independence = check_independence(&sys);
    if !independence.independent() {
        write(dir, &format!("{stem}.independence.txt"), &independence.to_text())?;
        eprint!("{}", independence.to_text());
        return Ok(exit::INDEPENDENCE);
    }
    if !s.spec.parameters.is_empty() && !a.no_dot {
        for (i, m) in sys.machines.iter().enumerate() {
            write(dir, &format!("{stem}.{}.dot", m.subset.slug()), &export_split_dot(&sys, i))?;
        }
    }
    if let (Some(sig), false) = (&a.signatures, a.no_solidity) {
        let c = emit(&s, &sys, sig, &stem)?;
        write_contract(dir, &c)?;
        println!("wrote {}.sol", c.manifest.contract);
    }
    Ok(exit::OK)
}

fn cmd_check(a: &CheckArgs) -> Outcome {
    let s = run_synthesis(&a.common, false)?;
    if a.json {
        println!("{}", s.report.to_json());
    } else {
        print!("{}", s.report.to_text());
    }
    Ok(exit::OK)
}

fn cmd_oracle(a: &OracleArgs) -> Outcome {
    let s = run_synthesis(&a.common, false)?;
    let mut sys = run_split(&s, a.common.state_cap)?;
    for o in &a.set_knowledge {
        sys.set_knowledge(o).map_err(Error::from)?;
    }
    // Overrides may break independence on purpose; the oracle still runs.
    let independence = check_independence(&sys);
    if !independence.independent() {
        eprint!("{}", independence.to_text());
        if a.set_knowledge.is_empty() {
            return Ok(exit::INDEPENDENCE);
        }
    }
    let cfg = ProductConfig { domain: a.domain as usize, state_cap: a.common.state_cap as usize };
    let product = build_instance_product(&sys, &cfg).map_err(Error::from)?;
    let verdict = check_lemma1(&sys, &product, a.depth);
    print!("{}", verdict.to_text());
    Ok(if verdict.is_equivalent() { exit::OK } else { exit::WITNESS })
}

fn cmd_emit(a: &EmitArgs) -> Outcome {
    let s = run_synthesis(&a.common, false)?;
    let sys = run_split(&s, a.common.state_cap)?;
    let c = emit(&s, &sys, &a.signatures, &stem(&a.common.spec))?;
    write_contract(&a.output.out, &c)?;
    println!("wrote {}.sol", c.manifest.contract);
    Ok(exit::OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Synthesize(a) => cmd_synthesize(a),
        Command::Check(a) => cmd_check(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Emit(a) => cmd_emit(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
