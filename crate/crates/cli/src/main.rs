use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use kanren::machine::{trace, trace_events, CutSignal, Mutation, Search};
use kanren::oracle::{check_completeness, check_soundness, CheckConfig, OracleError, Report};
use kanren::reify::reify;
use kanren::{initial_state, parse_spec, Interleaving, Label, Sld, Spec};

const EXIT_IO: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_INVALID: u8 = 3;
const EXIT_DOMAIN: u8 = 4;
const EXIT_VIOLATIONS: u8 = 5;

/// Run relational specifications under interleaving search or SLD
/// resolution, and check them against the denotational oracle.
#[derive(Parser)]
#[command(name = "mk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stream the answers of the query.
    Run(RunArgs),
    /// Compare engine answers with the oracle.
    Check(CheckArgs),
    /// Print every transition with the rule that justifies it.
    Trace(TraceArgs),
    /// Only parse and validate.
    Parse { file: PathBuf },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Interleaving,
    Sld,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mutate {
    DropComposition,
}

#[derive(Args)]
struct EngineArgs {
    /// Search strategy; defaults to sld for `#sld` files.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Swap the operands of `⊛` sums after a step, as interleaving sums do.
    #[arg(long)]
    literal_ast_swap: bool,
    #[arg(long, value_enum, hide = true)]
    mutate: Option<Mutate>,
}

#[derive(Args)]
struct RunArgs {
    file: PathBuf,
    #[command(flatten)]
    engine: EngineArgs,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    answers: u64,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_steps: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CheckArgs {
    file: PathBuf,
    #[command(flatten)]
    engine: EngineArgs,
    /// Depth of the ground-term domain.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    depth: u64,
    /// Maximal nesting of relation unfoldings.
    #[arg(long, default_value_t = 10)]
    index: u32,
    /// Engine answers checked for soundness.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    answers: u64,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_steps: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct TraceArgs {
    file: PathBuf,
    #[command(flatten)]
    engine: EngineArgs,
    #[arg(long, default_value_t = 1_000)]
    max_steps: u64,
}

struct Failure(u8, String);

type Outcome = Result<u8, Failure>;

fn color() -> bool {
    std::env::var("MK_COLOR").is_ok_and(|v| v == "1")
}

fn paint(code: &str, text: &str) -> String {
    if color() {
        format!("\x1b[{code}m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

fn load(path: &Path) -> Result<Spec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure(EXIT_IO, format!("{}: {e}", path.display())))?;
    parse_spec(&text).map_err(|errors| {
        let code = if errors.iter().any(|e| e.is_syntactic()) { EXIT_PARSE } else { EXIT_INVALID };
        let lines: Vec<String> = errors.iter().map(|e| format!("{}:{e}", path.display())).collect();
        Failure(code, lines.join("\n"))
    })
}

fn engine<'a>(spec: &'a Spec, args: &EngineArgs) -> Result<Box<dyn Search + 'a>, Failure> {
    let mode = args.mode.unwrap_or(if spec.sld { Mode::Sld } else { Mode::Interleaving });
    match mode {
        Mode::Interleaving if spec.contains_cut() => {
            Err(Failure(EXIT_INVALID, "cut needs --mode sld".to_string()))
        }
        Mode::Interleaving => Ok(match args.mutate {
            Some(Mutate::DropComposition) => Box::new(Interleaving::with_mutation(spec, Mutation::DropComposition)),
            None => Box::new(Interleaving::new(spec)),
        }),
        Mode::Sld => Ok(Box::new(Sld::new(spec).with_literal_ast_swap(args.literal_ast_swap))),
    }
}

fn status(exhausted: bool) -> String {
    paint("1", if exhausted { "complete" } else { "budget-exhausted" })
}

fn cmd_run(args: &RunArgs) -> Outcome {
    let spec = load(&args.file)?;
    let search = engine(&spec, &args.engine)?;
    let (start, vars) = initial_state(&spec);
    let mut out = io::stdout().lock();
    let mut found = 0u64;
    let mut steps = 0u64;
    let mut run = trace(&*search, start);
    if args.json {
        writeln!(out, "[").ok();
    }
    while found < args.answers && steps < args.max_steps {
        let Some(t) = run.next() else { break };
        steps += 1;
        let Label::Answer(sigma, _) = &t.label else { continue };
        let answer = reify(sigma, &vars).rendered();
        if args.json {
            let bindings: Map<String, Value> = answer.into_iter().map(|(k, v)| (k, Value::String(v))).collect();
            let sep = if found > 0 { "," } else { "" };
            writeln!(out, "{sep}{}", json!({ "bindings": bindings, "steps": steps })).ok();
        } else {
            if found > 0 {
                writeln!(out, ";;").ok();
            }
            if answer.is_empty() {
                writeln!(out, "yes").ok();
            }
            for (name, term) in answer {
                writeln!(out, "{name} = {term}").ok();
            }
        }
        found += 1;
        out.flush().ok();
    }
    if args.json {
        writeln!(out, "]").ok();
    }
    writeln!(out, "{}", status(run.current().is_none())).ok();
    Ok(0)
}

fn cmd_check(args: &CheckArgs) -> Outcome {
    let spec = load(&args.file)?;
    if spec.contains_cut() {
        return Err(Failure(EXIT_INVALID, "check needs a specification without cut".to_string()));
    }
    let search = engine(&spec, &args.engine)?;
    let mut cfg = CheckConfig::new(args.depth as usize, args.index);
    cfg.max_answers = args.answers as usize;
    cfg.max_steps = args.max_steps as usize;
    let domain = |e: OracleError| Failure(EXIT_DOMAIN, e.to_string());
    let sound = check_soundness(&spec, &*search, &cfg).map_err(domain)?;
    let complete = check_completeness(&spec, &*search, &cfg).map_err(domain)?;
    let clean = sound.is_clean() && complete.is_clean();
    let mut out = io::stdout().lock();
    if args.json {
        let mut all = Report::default();
        all.merge(sound);
        all.merge(complete);
        writeln!(out, "{}", serde_json::to_string_pretty(&all.to_json()).expect("json")).ok();
    } else {
        writeln!(out, "soundness: {sound}").ok();
        writeln!(out, "completeness: {complete}").ok();
        writeln!(out, "{}", if clean { paint("32", "ok") } else { paint("31", "violations found") }).ok();
    }
    Ok(if clean { 0 } else { EXIT_VIOLATIONS })
}

fn cmd_trace(args: &TraceArgs) -> Outcome {
    let spec = load(&args.file)?;
    let search = engine(&spec, &args.engine)?;
    let (start, _) = initial_state(&spec);
    let mut out = io::stdout().lock();
    for e in trace_events(&*search, start, args.max_steps as usize) {
        let label = match (&e.label, e.signal) {
            (Label::Answer(..), CutSignal::Cut) => format!("{} cut", e.label),
            _ => e.label.to_string(),
        };
        writeln!(out, "{} {} {label} {}", e.step, paint("36", e.rule.name()), e.state).ok();
    }
    Ok(0)
}

fn cmd_parse(file: &Path) -> Outcome {
    let spec = load(file)?;
    print!("{spec}");
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // Deep search trees are rendered and dropped recursively.
    let worker = std::thread::Builder::new()
        .stack_size(1 << 30)
        .spawn(move || match &cli.command {
            Command::Run(a) => cmd_run(a),
            Command::Check(a) => cmd_check(a),
            Command::Trace(a) => cmd_trace(a),
            Command::Parse { file } => cmd_parse(file),
        })
        .expect("spawn worker");
    match worker.join().expect("worker panicked") {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, message)) => {
            eprintln!("{message}");
            ExitCode::from(code)
        }
    }
}
