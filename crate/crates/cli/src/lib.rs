//! The `ifsim` command line.

use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use ifsim::abstraction::{abstract_automaton, Mode, Partition};
use ifsim::automata::{validate_bia, ActionKind, Bia, RawModel, WeightedAutomaton};
use ifsim::composition::{compose_with, CompositionError, DEFAULT_SEPARATOR};
use ifsim::error_models::{max_finite_weight, validate_error_model, ErrorModel, RawErrorModel};
use ifsim::game::{build_boolean_game, build_quantitative_game, GameError};
use ifsim::rational::{parse_rational, to_decimal};
use ifsim::solvers::{distance, refines, DistanceValue, Objective, SolveError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_COMPOSITION: i32 = 3;
pub const EXIT_ALPHABET: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "ifsim", version, about = "Alternating refinement and interface simulation distances")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FileKind {
    Model,
    InputErrors,
    OutputErrors,
    Partition,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Limavg,
    Disc,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    ForallExists,
    ExistsForall,
}

#[derive(clap::Args, Debug)]
pub struct ErrorModelArgs {
    /// Output error model, applied to the left (refined) automaton
    #[arg(long, value_name = "FILE")]
    pub output_errors: Option<PathBuf>,
    /// Input error model, applied to the right (refining) automaton
    #[arg(long, value_name = "FILE")]
    pub input_errors: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a model, error model or partition file
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "model")]
        kind: FileKind,
        /// Model whose states a partition must cover
        #[arg(long, value_name = "MODEL")]
        against: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Decide boolean alternating refinement `SPEC ⪰ IMPL`
    Refines {
        spec: PathBuf,
        implementation: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Interface simulation distance from SPEC to IMPL
    Distance {
        spec: PathBuf,
        implementation: PathBuf,
        #[command(flatten)]
        errors: ErrorModelArgs,
        #[arg(long, value_enum, default_value = "limavg")]
        objective: ObjectiveArg,
        /// Discount factor for `--objective disc`, e.g. `1/2` or `0.9`
        #[arg(long)]
        lambda: Option<String>,
        /// Error bound for `--objective disc`
        #[arg(long, default_value = "1e-9")]
        epsilon: f64,
        /// Write the game in DOT format
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Compose two interfaces, pruning incompatible states
    Compose {
        left: PathBuf,
        right: PathBuf,
        /// Where to write the composed model (standard output by default)
        #[arg(long, short, value_name = "FILE")]
        output: Option<PathBuf>,
        /// Where to write the composition report
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
        #[arg(long, default_value = DEFAULT_SEPARATOR)]
        separator: String,
        /// Print model and report as one JSON object
        #[arg(long)]
        json: bool,
    },
    /// Quotient a model by a state partition
    Abstract {
        model: PathBuf,
        partition: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, short, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Build the simulation game between two interfaces
    Game {
        spec: PathBuf,
        implementation: PathBuf,
        #[command(flatten)]
        errors: ErrorModelArgs,
        /// Build the unweighted game and ignore error models
        #[arg(long)]
        boolean: bool,
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

/// A failure with its exit code and message lines.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub lines: Vec<String>,
}

impl Failure {
    fn new(code: i32, line: impl Into<String>) -> Self {
        Failure { code, lines: vec![line.into()] }
    }

    fn many<E: Display>(code: i32, file: &Path, errors: &[E]) -> Self {
        Failure { code, lines: errors.iter().map(|e| format!("{}: {e}", file.display())).collect() }
    }
}

type Outcome = Result<(), Failure>;

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            for l in &f.lines {
                let _ = writeln!(err, "error: {l}");
            }
            f.code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn load_raw(path: &Path) -> Result<RawModel, Failure> {
    RawModel::from_json(&read(path)?).map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))
}

fn load_bia(path: &Path) -> Result<Bia, Failure> {
    validate_bia(&load_raw(path)?).map_err(|errs| Failure::many(EXIT_INVALID, path, &errs))
}

/// Accepts weighted models too, so that composed or abstracted outputs
/// can be fed back in.
fn load_automaton(path: &Path) -> Result<WeightedAutomaton, Failure> {
    let raw = load_raw(path)?;
    WeightedAutomaton::from_raw(&raw).map_err(|errs| Failure::many(EXIT_INVALID, path, &errs))
}

fn load_error_model(path: &Path, kind: ActionKind) -> Result<ErrorModel, Failure> {
    let raw = RawErrorModel::from_json(&read(path)?)
        .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))?;
    validate_error_model(&raw, kind).map_err(|errs| Failure::many(EXIT_INVALID, path, &errs))
}

fn load_partition(path: &Path) -> Result<Partition, Failure> {
    Partition::from_json(&read(path)?).map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))
}

fn error_models(args: &ErrorModelArgs, err: &mut dyn Write) -> Result<(ErrorModel, ErrorModel), Failure> {
    let m_o = match &args.output_errors {
        Some(p) => load_error_model(p, ActionKind::Output)?,
        None => ErrorModel::identity(ActionKind::Output),
    };
    let m_i = match &args.input_errors {
        Some(p) => load_error_model(p, ActionKind::Input)?,
        None => ErrorModel::identity(ActionKind::Input),
    };
    match (args.output_errors.is_none(), args.input_errors.is_none()) {
        (true, true) => {
            let _ = writeln!(
                err,
                "warning: --output-errors and --input-errors not given, using identity error models; \
                 the distance degenerates toward the boolean verdict"
            );
        }
        (true, false) => {
            let _ = writeln!(err, "warning: --output-errors not given, using the identity output error model");
        }
        (false, true) => {
            let _ = writeln!(err, "warning: --input-errors not given, using the identity input error model");
        }
        (false, false) => {}
    }
    if m_o.max_cost() == 0 && m_i.max_cost() == 0 {
        let _ = writeln!(
            err,
            "warning: no positive error-model cost; the s_err penalty falls back to {}",
            max_finite_weight(&m_i, &m_o)
        );
    }
    Ok((m_o, m_i))
}

fn game_failure(e: GameError, spec: &Path, imp: &Path) -> Failure {
    match e {
        GameError::AlphabetPrecondition { .. } => {
            Failure::new(EXIT_ALPHABET, format!("{} vs {}: {e}", spec.display(), imp.display()))
        }
        other => Failure::new(EXIT_INVALID, format!("{} vs {}: {other}", spec.display(), imp.display())),
    }
}

fn solve_failure(e: SolveError, spec: &Path, imp: &Path) -> Failure {
    match e {
        SolveError::Game(g) => game_failure(g, spec, imp),
        SolveError::InvalidLambda(_) | SolveError::InvalidEpsilon(_) => Failure::new(EXIT_USAGE, e.to_string()),
        SolveError::TooLarge { .. } => Failure::new(EXIT_INVALID, e.to_string()),
        SolveError::Internal(_) => Failure::new(EXIT_INVALID, e.to_string()),
    }
}

fn print_json(out: &mut dyn Write, value: &serde_json::Value) {
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(value).expect("json"));
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match command {
        Command::Validate { file, kind, against, json } => validate(&file, kind, against.as_deref(), json, out),
        Command::Refines { spec, implementation, json } => {
            let f = load_automaton(&spec)?;
            let g = load_automaton(&implementation)?;
            let r = refines(&f, &g);
            if json {
                let pairs: Vec<_> = r.relation.pairs.iter().map(|(a, b)| json!([a, b])).collect();
                print_json(
                    out,
                    &json!({
                        "refines": r.refines,
                        "relation": pairs,
                        "alphabetError": r.alphabet_error.as_ref().map(|e| e.to_string()),
                        "game": { "states": r.game_size.0, "edges": r.game_size.1 },
                    }),
                );
            } else {
                let _ = writeln!(out, "refines: {}", r.refines);
            }
            match r.alphabet_error {
                Some(e) => Err(game_failure(e, &spec, &implementation)),
                None => Ok(()),
            }
        }
        Command::Distance { spec, implementation, errors, objective, lambda, epsilon, dot, json } => {
            let objective = match (objective, lambda) {
                (ObjectiveArg::Limavg, None) => Objective::LimAvg,
                (ObjectiveArg::Limavg, Some(_)) => {
                    return Err(Failure::new(EXIT_USAGE, "--lambda requires --objective disc"));
                }
                (ObjectiveArg::Disc, None) => return Err(Failure::new(EXIT_USAGE, "--objective disc requires --lambda")),
                (ObjectiveArg::Disc, Some(l)) => {
                    let lambda = parse_rational(&l)
                        .ok_or_else(|| Failure::new(EXIT_USAGE, format!("cannot parse --lambda `{l}`")))?;
                    Objective::Disc { lambda, epsilon }
                }
            };
            let f = load_automaton(&spec)?;
            let g = load_automaton(&implementation)?;
            let (m_o, m_i) = error_models(&errors, err)?;
            let d = distance(&f, &m_o, &g, &m_i, &objective).map_err(|e| solve_failure(e, &spec, &implementation))?;
            if let Some(path) = dot {
                write_file(&path, &d.game.to_dot())?;
            }
            if json {
                print_json(out, &d.to_json());
            } else {
                match &d.value {
                    DistanceValue::Exact(r) => {
                        let _ = writeln!(out, "distance: {r} ({})", to_decimal(r, 6));
                    }
                    DistanceValue::Approx { value, error } => {
                        let _ = writeln!(out, "distance: {} (error bound {error:e})", d.value.decimal());
                        let _ = value;
                    }
                }
                let _ = writeln!(out, "refines: {}", d.refines);
                let _ = writeln!(out, "game: {} states, {} edges", d.game.num_states(), d.game.num_edges());
            }
            Ok(())
        }
        Command::Compose { left, right, output, report, separator, json } => {
            let f = load_automaton(&left)?;
            let g = load_automaton(&right)?;
            let c = compose_with(&f, &g, &separator).map_err(|e| {
                let code = match e {
                    CompositionError::NameCollision { .. } => EXIT_INVALID,
                    _ => EXIT_COMPOSITION,
                };
                Failure::new(code, format!("{} with {}: {e}", left.display(), right.display()))
            })?;
            let model = c.automaton.to_raw();
            let report_json = serde_json::to_value(&c.report).expect("report serializes");
            if let Some(path) = &report {
                write_file(path, &(serde_json::to_string_pretty(&report_json).unwrap() + "\n"))?;
            }
            if json {
                print_json(out, &json!({ "model": model, "report": report_json }));
            } else if let Some(path) = &output {
                write_file(path, &(model.to_json() + "\n"))?;
            } else {
                let _ = writeln!(out, "{}", model.to_json());
            }
            Ok(())
        }
        Command::Abstract { model, partition, mode, output } => {
            let f = load_automaton(&model)?;
            let p = load_partition(&partition)?;
            let mode = match mode {
                ModeArg::ForallExists => Mode::ForallExists,
                ModeArg::ExistsForall => Mode::ExistsForall,
            };
            let a = abstract_automaton(&f, &p, mode).map_err(|errs| Failure::many(EXIT_INVALID, &partition, &errs))?;
            let text = a.to_raw().to_json() + "\n";
            match output {
                Some(path) => write_file(&path, &text),
                None => {
                    let _ = write!(out, "{text}");
                    Ok(())
                }
            }
        }
        Command::Game { spec, implementation, errors, boolean, dot, json } => {
            let f = load_automaton(&spec)?;
            let g = load_automaton(&implementation)?;
            let game = if boolean {
                build_boolean_game(&f, &g)
            } else {
                let (m_o, m_i) = error_models(&errors, err)?;
                build_quantitative_game(&f, &m_o, &g, &m_i)
            }
            .map_err(|e| game_failure(e, &spec, &implementation))?;
            if let Some(path) = dot {
                write_file(&path, &game.to_dot())?;
            }
            if json {
                print_json(out, &game.to_json());
            } else {
                let _ = writeln!(out, "game: {} states, {} edges", game.num_states(), game.num_edges());
            }
            Ok(())
        }
    }
}

fn validate(file: &Path, kind: FileKind, against: Option<&Path>, json: bool, out: &mut dyn Write) -> Outcome {
    let result: Result<(), Failure> = match kind {
        FileKind::Model => load_bia(file).map(|_| ()),
        FileKind::InputErrors => load_error_model(file, ActionKind::Input).map(|_| ()),
        FileKind::OutputErrors => load_error_model(file, ActionKind::Output).map(|_| ()),
        FileKind::Partition => {
            let p = load_partition(file)?;
            match against {
                Some(m) => {
                    let f = load_automaton(m)?;
                    p.class_of(&f).map(|_| ()).map_err(|errs| Failure::many(EXIT_INVALID, file, &errs))
                }
                None => Ok(()),
            }
        }
    };
    match (&result, json) {
        (Ok(()), false) => {
            let _ = writeln!(out, "OK");
        }
        (Ok(()), true) => print_json(out, &json!({ "valid": true, "errors": [] })),
        (Err(f), true) if f.code == EXIT_INVALID => {
            print_json(out, &json!({ "valid": false, "errors": f.lines }));
        }
        _ => {}
    }
    result
}
