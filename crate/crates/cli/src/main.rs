//! `phasecrit`: decide the applicability criterion for a structure file,
//! build its phase object and run the oracles.
//!
//! Exit codes: 0 criterion PASS or oracle clean, 1 criterion FAIL or oracle
//! counterexample, 2 input error, 3 enumeration budget exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use phase_criterion::criterion::{
    check_applicability, construct_phase_object, obstruction_report, DualMode, InputBundle, Options, PhaseObject,
};
use phase_criterion::decomposition::{decompose_module, ModuleRep};
use phase_criterion::dot::{islands_dot, phase_dot};
use phase_criterion::filtration::{ascending_filtration, FiltrationMode};
use phase_criterion::forced::descend_module;
use phase_criterion::format::{parse_module_bytes, parse_structure_bytes, ParseError};
use phase_criterion::report::{build_report, criterion_text, phase_text, report_json_string, report_text};
use phase_criterion::rigidity::{equivalence_oracle, rigidity_islands, RigidityError, DEFAULT_ENUMERATION_BOUND};
use phase_criterion::witness::set_literal;

#[derive(Parser)]
#[command(
    name = "phasecrit",
    version,
    about = "Applicability criterion and phase-object construction for finite interaction structures"
)]
struct Cli {
    /// Filtration reading.
    #[arg(long, global = true, value_enum, default_value_t = FiltrationArg::Ascending)]
    filtration: FiltrationArg,
    /// Dual to evaluate; defaults to the declared dual when the file has one.
    #[arg(long, global = true, value_enum)]
    dual: Option<DualArg>,
    /// Largest carrier the brute-force enumerations will accept.
    #[arg(long, global = true, default_value_t = DEFAULT_ENUMERATION_BOUND)]
    max_enumeration: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FiltrationArg {
    Ascending,
    Literal,
}

#[derive(Clone, Copy, ValueEnum)]
enum DualArg {
    Canonical,
    Declared,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the three conditions and print witnesses for failures.
    Check { file: PathBuf },
    /// Build the phase object.
    Construct {
        file: PathBuf,
        /// Write the carrier filtration as a DOT graph.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Split a module into phase-response components.
    Decompose {
        file: PathBuf,
        #[arg(long)]
        module: PathBuf,
    },
    /// List the rigidity islands of the phase carrier.
    Islands {
        file: PathBuf,
        /// Write the island inclusion diagram as a DOT graph.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Count interaction-and-defect-preserving bijections and check that
    /// each preserves the filtration.
    Oracle { file: PathBuf, other: Option<PathBuf> },
    /// Full report: verdicts, witnesses, phase object, forced structure.
    Report {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Module used for the decomposition bullet instead of the regular one.
        #[arg(long)]
        module: Option<PathBuf>,
        /// Structure compared against in the equivalence census.
        #[arg(long)]
        against: Option<PathBuf>,
    },
}

enum Status {
    Pass,
    Fail,
}

impl Cli {
    fn options(&self) -> Options {
        Options {
            filtration: match self.filtration {
                FiltrationArg::Ascending => FiltrationMode::Ascending,
                FiltrationArg::Literal => FiltrationMode::Literal,
            },
            dual: self.dual.map(|d| match d {
                DualArg::Canonical => DualMode::Canonical,
                DualArg::Declared => DualMode::Declared,
            }),
            max_enumeration: self.max_enumeration,
        }
    }
}

fn parse_errors(path: &Path, errors: &[ParseError]) -> anyhow::Error {
    let lines: Vec<String> = errors.iter().map(|e| format!("  {e}")).collect();
    anyhow!("{} is not valid:\n{}", path.display(), lines.join("\n"))
}

fn load_structure(path: &Path) -> Result<InputBundle> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    parse_structure_bytes(&bytes).map_err(|e| parse_errors(path, &e))
}

fn load_module(path: &Path, bundle: &InputBundle) -> Result<ModuleRep> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    parse_module_bytes(&bytes, &bundle.structure).map_err(|e| parse_errors(path, &e))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Builds the phase object, or prints the verdicts and witnesses when the
/// criterion fails.
fn phase_or_witnesses(bundle: &InputBundle, options: &Options) -> Result<Option<PhaseObject>> {
    let report = check_applicability(bundle, options)?;
    if !report.overall {
        let witnesses = obstruction_report(bundle, &report)?;
        print!("{}", criterion_text(bundle, &report, &witnesses));
        return Ok(None);
    }
    Ok(Some(construct_phase_object(bundle, options)?))
}

fn check(file: &Path, options: &Options) -> Result<Status> {
    let bundle = load_structure(file)?;
    let report = check_applicability(&bundle, options)?;
    let witnesses = if report.overall {
        Vec::new()
    } else {
        obstruction_report(&bundle, &report)?
    };
    print!("{}", criterion_text(&bundle, &report, &witnesses));
    Ok(if report.overall { Status::Pass } else { Status::Fail })
}

fn construct(file: &Path, dot: Option<&Path>, options: &Options) -> Result<Status> {
    let bundle = load_structure(file)?;
    let Some(phase) = phase_or_witnesses(&bundle, options)? else {
        return Ok(Status::Fail);
    };
    print!("{}", phase_text(&phase));
    if let Some(path) = dot {
        write_file(path, &phase_dot(&phase))?;
    }
    Ok(Status::Pass)
}

fn decompose(file: &Path, module: &Path, options: &Options) -> Result<Status> {
    let bundle = load_structure(file)?;
    let source_module = load_module(module, &bundle)?;
    let Some(phase) = phase_or_witnesses(&bundle, options)? else {
        return Ok(Status::Fail);
    };
    let rep = descend_module(&phase, &source_module)?;
    let d = decompose_module(phase.structure(), phase.pairing(), &rep)?;
    println!("module: dimension {}, conductor {}", rep.dimension, rep.conductor());
    for (label, dim) in phase.dual().labels.iter().zip(d.dimensions()) {
        println!("  {label}: dimension {dim}");
    }
    let mark = |ok: bool| if ok { "holds" } else { "FAILS" };
    let r = &d.resolution;
    println!("  E² = E: {}", mark(r.not_idempotent.is_none()));
    println!("  EE′ = 0: {}", mark(r.not_orthogonal.is_none()));
    println!("  ΣE = I: {}", mark(r.sums_to_identity));
    if let Some((label, p)) = d.eigen_failure {
        println!(
            "  component {} is not an eigenspace of {}",
            phase.dual().labels[label],
            phase.structure().name_of(p)
        );
    }
    println!("overall: {}", if d.verified() { "PASS" } else { "FAIL" });
    Ok(if d.verified() { Status::Pass } else { Status::Fail })
}

fn islands(file: &Path, dot: Option<&Path>, options: &Options) -> Result<Status> {
    let bundle = load_structure(file)?;
    let Some(phase) = phase_or_witnesses(&bundle, options)? else {
        return Ok(Status::Fail);
    };
    let carrier = phase.structure();
    let found = rigidity_islands(carrier, options.filtration, options.max_enumeration)?;
    println!("{}: {} island(s)", carrier.name, found.len());
    for island in &found {
        println!(
            "  {} internal depth {}{}",
            set_literal(carrier, &island.elements),
            island.internal_depth,
            if island.internally_covered {
                ""
            } else {
                " (not covered)"
            }
        );
    }
    if let Some(path) = dot {
        write_file(path, &islands_dot(carrier, &found))?;
    }
    Ok(Status::Pass)
}

fn oracle(file: &Path, other: Option<&Path>, options: &Options) -> Result<Status> {
    let s = load_structure(file)?.structure;
    let t = match other {
        Some(path) => load_structure(path)?.structure,
        None => s.clone(),
    };
    let fs = ascending_filtration(&s, options.filtration)?;
    let ft = ascending_filtration(&t, options.filtration)?;
    let census = equivalence_oracle(&s, &t, &fs, &ft, options.max_enumeration)?;
    println!("{} -> {} ({})", s.name, t.name, census.strategy);
    println!("  preserving bijections: {}", census.total());
    println!("  preserving the filtration: {}", census.filtration_preserving_count());
    let mut clean = true;
    for map in census.counterexamples() {
        clean = false;
        let images: Vec<&str> = map.iter().map(|&p| t.name_of(p)).collect();
        println!("  counterexample: ({})", images.join(" "));
    }
    println!("overall: {}", if clean { "PASS" } else { "FAIL" });
    Ok(if clean { Status::Pass } else { Status::Fail })
}

fn report(
    file: &Path,
    format: Format,
    module: Option<&Path>,
    against: Option<&Path>,
    options: &Options,
) -> Result<Status> {
    let bundle = load_structure(file)?;
    let module = module.map(|m| load_module(m, &bundle)).transpose()?;
    let other = against.map(load_structure).transpose()?;
    let full = build_report(&bundle, options, module.as_ref(), other.as_ref().map(|b| &b.structure))?;
    match format {
        Format::Json => print!("{}", report_json_string(&bundle, &full)),
        Format::Text => print!("{}", report_text(&bundle, &full)),
    }
    Ok(if full.criterion.overall {
        Status::Pass
    } else {
        Status::Fail
    })
}

fn run(cli: &Cli) -> Result<Status> {
    let options = cli.options();
    if options.max_enumeration == 0 {
        bail!("--max-enumeration must be positive");
    }
    match &cli.command {
        Command::Check { file } => check(file, &options),
        Command::Construct { file, dot } => construct(file, dot.as_deref(), &options),
        Command::Decompose { file, module } => decompose(file, module, &options),
        Command::Islands { file, dot } => islands(file, dot.as_deref(), &options),
        Command::Oracle { file, other } => oracle(file, other.as_deref(), &options),
        Command::Report {
            file,
            format,
            module,
            against,
        } => report(file, *format, module.as_deref(), against.as_deref(), &options),
    }
}

fn budget_exceeded(err: &anyhow::Error) -> bool {
    err.chain().any(|c| {
        matches!(
            c.downcast_ref::<RigidityError>(),
            Some(RigidityError::CarrierTooLarge { .. })
        )
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(if budget_exceeded(&err) { 3 } else { 2 })
        }
    }
}
