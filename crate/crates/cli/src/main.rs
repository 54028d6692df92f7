//! `intsel` — run, generate, verify, and evaluate interval-selection streams.
//!
//! Exit codes: 0 on success, 1 when a verification or invariant violation
//! was found, 2 on usage or parse errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use intsel_core::adversary::{
    gen_random, gen_stack, gen_tree_gadget, gen_unit_gadget, verify_gadget, StreamFamily,
};
use intsel_core::eval::{evaluate, run_selection, Algorithm, EvalConfig};
use intsel_core::stream::{emit_secret, emit_stream, parse_secret, parse_stream};
use intsel_core::Interval;

#[derive(Parser)]
#[command(name = "intsel", version, about = "Streaming interval selection toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an algorithm over a stream and print the selected intervals.
    Run(RunArgs),
    /// Generate a stream (and, for gadgets, its secret).
    Gen(GenArgs),
    /// Verify a gadget stream against its secret.
    Verify(VerifyArgs),
    /// Run an algorithm and print its stats record.
    Eval(EvalArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Input stream file.
    #[arg(long)]
    input: PathBuf,
    /// Algorithm: general, proper, multipass, online, or greedy.
    #[arg(long, default_value = "general")]
    alg: String,
    /// Number of passes (multipass only).
    #[arg(long)]
    passes: Option<u32>,
    /// Random seed (online only).
    #[arg(long)]
    seed: Option<u64>,
    /// Also write a stats record to this file.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Check structural invariants after every arrival.
    #[arg(long)]
    check_invariants: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "general")]
    alg: String,
    #[arg(long)]
    passes: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the stats record(s) here instead of stdout.
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long)]
    check_invariants: bool,
    /// Run this many consecutive seeds (online only), one record each.
    #[arg(long)]
    trials: Option<u64>,
}

#[derive(Args)]
struct GenArgs {
    /// stack, unit-gadget, tree-gadget, uniform, or unit.
    #[arg(long)]
    kind: String,
    /// Interval count for random kinds.
    #[arg(long)]
    count: Option<usize>,
    /// Stack size for stack and gadget kinds.
    #[arg(long)]
    n: Option<usize>,
    /// Block count for the unit gadget.
    #[arg(long)]
    blocks: Option<usize>,
    /// Tree depth for the tree gadget.
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output stream file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Secret output file (gadget kinds only).
    #[arg(long)]
    secret: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    secret: PathBuf,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(violations) if violations == 0 => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

/// Returns the number of violations found (0 = clean run).
fn dispatch(cli: Cli) -> Result<usize, String> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn read_stream(path: &Path) -> Result<Vec<Interval>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_stream(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn build_config(
    alg: &str,
    passes: Option<u32>,
    seed: Option<u64>,
    check_invariants: bool,
) -> Result<EvalConfig, String> {
    let algorithm: Algorithm = alg.parse()?;
    Ok(EvalConfig {
        algorithm,
        passes,
        seed,
        check_invariants,
    })
}

fn cmd_run(args: RunArgs) -> Result<usize, String> {
    let stream = read_stream(&args.input)?;
    let config = build_config(&args.alg, args.passes, args.seed, args.check_invariants)?;
    let (selection, stats) = run_selection(&stream, &config).map_err(|e| e.to_string())?;
    let chosen: Vec<Interval> = selection.iter().cloned().collect();
    print!("{}", emit_stream(&chosen));
    if let Some(path) = &args.stats {
        fs::write(path, stats.to_record()).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(stats.invariant_violations)
}

fn cmd_eval(args: EvalArgs) -> Result<usize, String> {
    let stream = read_stream(&args.input)?;
    let mut records = String::new();
    let mut violations = 0;
    if let Some(trials) = args.trials {
        let config = build_config(&args.alg, args.passes, args.seed, args.check_invariants)?;
        if config.algorithm != Algorithm::Online {
            return Err("--trials applies only to the online algorithm".into());
        }
        let base = args.seed.unwrap_or(0);
        for trial in 0..trials {
            let mut config = config.clone();
            config.seed = Some(base + trial);
            let stats = evaluate(&stream, &config).map_err(|e| e.to_string())?;
            violations += stats.invariant_violations;
            records.push_str(&stats.to_record());
        }
    } else {
        let config = build_config(&args.alg, args.passes, args.seed, args.check_invariants)?;
        let stats = evaluate(&stream, &config).map_err(|e| e.to_string())?;
        violations = stats.invariant_violations;
        records.push_str(&stats.to_record());
    }
    match &args.stats {
        Some(path) => {
            fs::write(path, &records).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => print!("{records}"),
    }
    Ok(violations)
}

fn cmd_gen(args: GenArgs) -> Result<usize, String> {
    let require = |value: Option<usize>, flag: &str| {
        value.ok_or_else(|| format!("--{flag} is required for --kind {}", args.kind))
    };
    let (stream, secret) = match args.kind.as_str() {
        "stack" => {
            let n = require(args.n, "n")?;
            if n < 1 {
                return Err("--n must be at least 1".into());
            }
            (gen_stack(n, args.seed).0, None)
        }
        "unit-gadget" => {
            let blocks = require(args.blocks, "blocks")?;
            let n = require(args.n, "n")?;
            let (stream, secret) = gen_unit_gadget(blocks, n, args.seed);
            (stream, Some(secret))
        }
        "tree-gadget" => {
            let depth = require(args.depth, "depth")?;
            let n = require(args.n, "n")?;
            let (stream, secret) = gen_tree_gadget(depth, n, args.seed);
            (stream, Some(secret))
        }
        "uniform" => {
            let count = require(args.count, "count")?;
            (gen_random(count, StreamFamily::UniformGeneral, args.seed), None)
        }
        "unit" => {
            let count = require(args.count, "count")?;
            (gen_random(count, StreamFamily::Unit, args.seed), None)
        }
        other => return Err(format!("unknown kind `{other}`")),
    };
    if let Some(path) = &args.secret {
        let Some(secret) = &secret else {
            return Err(format!("--secret applies only to gadget kinds, not `{}`", args.kind));
        };
        fs::write(path, emit_secret(secret)).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    let text = emit_stream(&stream);
    match &args.out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<usize, String> {
    let stream = read_stream(&args.input)?;
    let text = fs::read_to_string(&args.secret)
        .map_err(|e| format!("{}: {e}", args.secret.display()))?;
    let secret = parse_secret(&text).map_err(|e| format!("{}: {e}", args.secret.display()))?;
    let report = verify_gadget(&stream, &secret);
    for violation in &report {
        println!("violation: {violation}");
    }
    if report.is_empty() {
        println!("ok: stream matches its secret");
    }
    Ok(report.len())
}
