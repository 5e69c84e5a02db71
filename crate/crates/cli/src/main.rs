use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use alog_lab::analysis::{self, REPORT_SCHEMA};
use alog_lab::asolver::{ASolver, SolverState};
use alog_lab::grounder::{ground_alog, ground_flog, IntRange};
use alog_lab::model::{LiteralSet, Program};
use alog_lab::parser::{format_program, parse_ground_literals, parse_program};
use alog_lab::{alog, flog, slog, Error, Limits};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(name = "alog-lab", version, about = "Answer sets of logic programs with aggregates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Add the integers MIN..=MAX to the constant universe.
    #[arg(long, global = true, value_name = "MIN..MAX")]
    int_range: Option<IntRange>,
    /// Largest disjunctive reduct checked for minimality.
    #[arg(long, global = true, default_value_t = Limits::default().max_minimality_atoms, value_parser = positive)]
    max_minimality_atoms: usize,
    /// Most undecided atoms enumerated when testing strong satisfaction.
    #[arg(long, global = true, default_value_t = Limits::default().max_completion_atoms, value_parser = positive)]
    max_completion_atoms: usize,
    /// Most candidate sets tried by enumeration.
    #[arg(long, global = true, default_value_t = Limits::default().max_candidates, value_parser = positive)]
    max_candidates: usize,
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

impl Common {
    fn limits(&self) -> Limits {
        Limits {
            max_minimality_atoms: self.max_minimality_atoms,
            max_completion_atoms: self.max_completion_atoms,
            max_candidates: self.max_candidates,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Semantics {
    Alog,
    Flog,
    Slog,
}

impl Semantics {
    fn name(self) -> &'static str {
        match self {
            Semantics::Alog => "alog",
            Semantics::Flog => "flog",
            Semantics::Slog => "slog",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Dialect {
    Alog,
    Flog,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Oracle,
    Solver,
}

#[derive(Subcommand)]
enum Command {
    /// Print answer sets, or INCONSISTENT.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "alog")]
        semantics: Semantics,
        /// Search with the propagation solver or enumerate candidates.
        /// Programs outside the solver's fragment always use enumeration.
        #[arg(long, value_enum, default_value = "solver")]
        mode: Mode,
        /// Print every answer set instead of the first one.
        #[arg(long)]
        all: bool,
        /// Print the solver's propagation and decision log.
        #[arg(long)]
        trace: bool,
        /// Shuffle the order of inference rules during propagation.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Decide whether a set of literals is an answer set.
    Check {
        file: PathBuf,
        /// Comma-separated ground literals, e.g. "p(0),-q(a)".
        #[arg(long)]
        candidate: String,
        #[arg(long, value_enum, default_value = "alog")]
        semantics: Semantics,
    },
    /// Print the ground program.
    Ground {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "alog")]
        dialect: Dialect,
    },
    /// Enumerate under all three semantics and report differences as JSON.
    Compare { file: PathBuf },
    /// Report aggregate stratification and compatibility as JSON.
    Stratify { file: PathBuf },
}

enum Failure {
    Usage(String),
    Cap(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } => Failure::Cap(e.to_string()),
            e => Failure::Usage(e.to_string()),
        }
    }
}

fn read_program(path: &PathBuf) -> Result<Program, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
    };
    Ok(parse_program(&text)?)
}

fn literals(s: &LiteralSet) -> Vec<String> {
    s.iter().map(ToString::to_string).collect()
}

fn enumerate(p: &Program, semantics: Semantics, common: &Common) -> Result<Vec<LiteralSet>, Failure> {
    let limits = common.limits();
    Ok(match semantics {
        Semantics::Alog => alog::enumerate_answer_sets(&ground_alog(p, common.int_range)?, &limits)?,
        Semantics::Flog => flog::enumerate_answer_sets_flog(&ground_flog(p, common.int_range)?, &limits)?,
        Semantics::Slog => {
            let g = slog::SlogProgram::from_ground(&ground_alog(p, common.int_range)?)?;
            slog::enumerate_answer_sets_slog(&g, &limits)?
        }
    })
}

struct SolveArgs {
    semantics: Semantics,
    mode: Mode,
    all: bool,
    trace: bool,
    seed: Option<u64>,
}

fn solve(p: &Program, args: &SolveArgs, common: &Common, out: &mut impl Write) -> Result<u8, Failure> {
    let mut trace = Vec::new();
    let mut sets = None;
    if args.semantics == Semantics::Alog && args.mode == Mode::Solver && !args.all {
        let g = ground_alog(p, common.int_range)?;
        match ASolver::new(&g, common.limits()) {
            Ok(mut s) => {
                if let Some(seed) = args.seed {
                    s = s.with_seed(seed);
                }
                if args.trace {
                    s = s.with_trace();
                }
                let found = s.solve(&SolverState::default())?;
                trace = s.take_trace().iter().map(ToString::to_string).collect();
                sets = Some(found.into_iter().collect::<Vec<_>>());
            }
            Err(Error::Unsupported(why)) => log::warn!("falling back to enumeration: {why}"),
            Err(e) => return Err(e.into()),
        }
    }
    let mut sets = match sets {
        Some(s) => s,
        None => enumerate(p, args.semantics, common)?,
    };
    if !args.all {
        sets.truncate(1);
    }
    let io_err = |e: io::Error| Failure::Usage(e.to_string());
    if common.json {
        let mut doc = json!({
            "schema": REPORT_SCHEMA,
            "semantics": args.semantics.name(),
            "consistent": !sets.is_empty(),
            "answer_sets": sets.iter().map(literals).collect::<Vec<_>>(),
        });
        if args.trace {
            doc["trace"] = json!(trace);
        }
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap()).map_err(io_err)?;
    } else {
        for line in &trace {
            writeln!(out, "{line}").map_err(io_err)?;
        }
        if sets.is_empty() {
            writeln!(out, "INCONSISTENT").map_err(io_err)?;
        }
        for (i, s) in sets.iter().enumerate() {
            writeln!(out, "Answer: {}", i + 1).map_err(io_err)?;
            writeln!(out, "{s}").map_err(io_err)?;
        }
    }
    Ok(if sets.is_empty() { 1 } else { 0 })
}

fn run(cli: &Cli, out: &mut impl Write) -> Result<u8, Failure> {
    let common = &cli.common;
    let limits = common.limits();
    let io_err = |e: io::Error| Failure::Usage(e.to_string());
    match &cli.command {
        Command::Solve {
            file,
            semantics,
            mode,
            all,
            trace,
            seed,
        } => {
            let p = read_program(file)?;
            let args = SolveArgs {
                semantics: *semantics,
                mode: *mode,
                all: *all,
                trace: *trace,
                seed: *seed,
            };
            solve(&p, &args, common, out)
        }
        Command::Check {
            file,
            candidate,
            semantics,
        } => {
            let p = read_program(file)?;
            let s = parse_ground_literals(candidate)?;
            let ok = match semantics {
                Semantics::Alog => alog::is_answer_set(&ground_alog(&p, common.int_range)?, &s, &limits)?,
                Semantics::Flog => flog::is_answer_set_flog(&ground_flog(&p, common.int_range)?, &s, &limits)?,
                Semantics::Slog => {
                    let g = slog::SlogProgram::from_ground(&ground_alog(&p, common.int_range)?)?;
                    slog::is_answer_set_slog(&g, &s, &limits)?
                }
            };
            if common.json {
                writeln!(out, "{}", json!({"schema": REPORT_SCHEMA, "answer_set": ok})).map_err(io_err)?;
            } else {
                writeln!(out, "{ok}").map_err(io_err)?;
            }
            Ok(0)
        }
        Command::Ground { file, dialect } => {
            let p = read_program(file)?;
            let text = match dialect {
                Dialect::Alog => format_program(&ground_alog(&p, common.int_range)?.to_program()),
                Dialect::Flog => ground_flog(&p, common.int_range)?.to_string(),
            };
            write!(out, "{text}").map_err(io_err)?;
            Ok(0)
        }
        Command::Compare { file } => {
            let p = read_program(file)?;
            let report = analysis::compare_semantics(&p, common.int_range, &limits)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&report).unwrap()).map_err(io_err)?;
            Ok(0)
        }
        Command::Stratify { file } => {
            let p = read_program(file)?;
            let levels = analysis::aggregate_stratification(&p);
            let (compatible, violations) = analysis::is_af_compatible(&p);
            let doc = json!({
                "schema": REPORT_SCHEMA,
                "aggregate_stratified": levels.is_some(),
                "levels": levels,
                "af_compatible": compatible,
                "af_violations": violations,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap()).map_err(io_err)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(&cli, &mut out) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
