//! Command-line front end: digit generation, control-sequence inspection,
//! discrepancy profiles, the parameter schedule, and trace verification.
//!
//! Exit codes: 0 success, 1 internal error or failed verification, 2 parse
//! or usage error, 3 resource-limit truncation (partial output was printed).

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use normgen_core::block::DigitBlock;
use normgen_core::control::ControlSequence;
use normgen_core::discrepancy::{block_discrepancy, simple_discrepancy};
use normgen_core::params::{param_table, ParamSet};
use normgen_core::pipeline::{digits_with, DEFAULT_MAX_ROUNDS};
use normgen_core::predicate::parse_predicate;
use normgen_core::trace::{emit_round, read_trace, verify_trace, TraceRecord, TraceWriter};
use normgen_core::{Error, Result};

#[derive(Parser)]
#[command(name = "normgen", version, about = "Digit streams with controlled discrepancy in every base")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate digits of the real determined by a control predicate
    Digits(DigitsArgs),
    /// Print the control sequence a predicate reduces to
    Reduce(ReduceArgs),
    /// Discrepancy profile of a digit stream, as CSV
    Analyze(AnalyzeArgs),
    /// Print the refinement parameter schedule
    Params(ParamsArgs),
    /// Re-check the assertions recorded in a run trace
    Verify(VerifyArgs),
}

/// Where the control predicate comes from; exactly one source.
#[derive(Args)]
struct SourceArgs {
    /// Built-in constant predicate
    #[arg(long, value_name = "true|false", conflicts_with_all = ["predicate", "predicate_file"])]
    builtin: Option<BuiltinKind>,
    /// Inline predicate over x and y
    #[arg(long, value_name = "TEXT", conflicts_with = "predicate_file")]
    predicate: Option<String>,
    /// Read the predicate from a file
    #[arg(long, value_name = "PATH")]
    predicate_file: Option<PathBuf>,
    /// Budget on pairs scanned while generating control values
    #[arg(long, value_name = "N")]
    max_n: Option<u64>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum BuiltinKind {
    True,
    False,
}

impl SourceArgs {
    fn control(&self) -> Result<ControlSequence> {
        let control = match (&self.builtin, &self.predicate, &self.predicate_file) {
            (Some(BuiltinKind::True), None, None) => ControlSequence::builtin_true(),
            (Some(BuiltinKind::False), None, None) => ControlSequence::builtin_false(),
            (None, Some(text), None) => ControlSequence::from_predicate(parse_predicate(text)?),
            (None, None, Some(path)) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::invalid(format!("cannot read {}: {e}", path.display()))
                })?;
                ControlSequence::from_predicate(parse_predicate(&text)?)
            }
            _ => {
                return Err(Error::invalid(
                    "exactly one predicate source is required: --builtin, --predicate, or --predicate-file",
                ))
            }
        };
        Ok(match self.max_n {
            Some(n) => control.with_max_n(n),
            None => control,
        })
    }
}

#[derive(Args)]
struct DigitsArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Output base
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    base: u32,
    /// Number of digits to print
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
    /// Write the run trace to this path
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
    /// Non-conforming test parameters (output is refused by verification)
    #[arg(long, value_name = "k=K,ell=L", value_parser = parse_toy_params)]
    toy_params: Option<ToyParams>,
    /// Cap on refinement rounds
    #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS, value_name = "N")]
    max_rounds: u32,
}

#[derive(Clone, Copy)]
struct ToyParams {
    k: u64,
    ell: u64,
}

fn parse_toy_params(s: &str) -> std::result::Result<ToyParams, String> {
    let mut k = None;
    let mut ell = None;
    for part in s.split(',') {
        let (key, val) = part
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, got {part:?}"))?;
        let v: u64 = val
            .trim()
            .parse()
            .map_err(|_| format!("bad integer in {part:?}"))?;
        match key.trim() {
            "k" => k = Some(v),
            "ell" => ell = Some(v),
            other => return Err(format!("unknown key {other:?} (expected k, ell)")),
        }
    }
    match (k, ell) {
        (Some(k), Some(ell)) if k >= 1 && k < ell => Ok(ToyParams { k, ell }),
        (Some(_), Some(_)) => Err("need 1 <= k < ell".into()),
        _ => Err("need both k= and ell=".into()),
    }
}

#[derive(Args)]
struct ReduceArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Number of control values to print, one per line
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Digit stream file; standard input when omitted
    input: Option<PathBuf>,
    /// Base the stream is written in
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    base: u32,
    /// Window length for the block-discrepancy column
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    window: u64,
    /// Report every Nth prefix length (the final length is always reported)
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    stride: u64,
}

#[derive(Args)]
struct ParamsArgs {
    /// Largest schedule index to print
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    max_i: u32,
}

#[derive(Args)]
struct VerifyArgs {
    /// Trace file to verify
    trace: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match cli.command {
        Command::Digits(a) => cmd_digits(a),
        Command::Reduce(a) => cmd_reduce(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Params(a) => cmd_params(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match run {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Parse { .. } | Error::InvalidArgument(_) | Error::Eval(_) => 2,
                Error::ResourceLimit(_) => 3,
                Error::Internal(_) | Error::BaseMismatch(..) => 1,
            })
        }
    }
}

fn cmd_digits(a: DigitsArgs) -> Result<ExitCode> {
    let mut control = a.source.control()?;
    let params = match a.toy_params {
        Some(t) => {
            eprintln!(
                "note: non-conforming override parameters (k = {}, ell = {}); output carries no discrepancy guarantee",
                t.k, t.ell
            );
            ParamSet::Override { k: t.k, ell: t.ell }
        }
        None => ParamSet::Standard,
    };
    let mut tracer = match &a.trace {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| Error::invalid(format!("cannot create {}: {e}", path.display())))?;
            let mut w = TraceWriter::new(BufWriter::new(file));
            w.record(&TraceRecord::header(&params))?;
            Some(w)
        }
        None => None,
    };
    let outcome = digits_with(&mut control, a.base, a.count, &params, a.max_rounds, |round, input, result| {
        if let Some(w) = tracer.as_mut() {
            emit_round(w, round, input.t(), result)?;
        }
        Ok(())
    })?;
    if let Some(mut w) = tracer {
        w.flush()?;
    }
    println!("{}", outcome.block);
    if let Some(notice) = outcome.notice {
        eprintln!("notice: {notice}");
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_reduce(a: ReduceArgs) -> Result<ExitCode> {
    let mut control = a.source.control()?;
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    for idx in 0..a.count {
        match control.next_value() {
            Ok(v) => writeln!(out, "{v}").map_err(|e| Error::internal(format!("write: {e}")))?,
            Err(Error::ResourceLimit(msg)) => {
                out.flush().ok();
                eprintln!("notice: control sequence exhausted after {idx} of {} values ({msg})", a.count);
                return Ok(ExitCode::from(3));
            }
            Err(e) => return Err(e),
        }
    }
    out.flush().map_err(|e| Error::internal(format!("write: {e}")))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_analyze(a: AnalyzeArgs) -> Result<ExitCode> {
    let text = match &a.input {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?,
        None => io::read_to_string(io::stdin())
            .map_err(|e| Error::invalid(format!("cannot read standard input: {e}")))?,
    };
    let block = DigitBlock::parse(a.base, &text)?;
    if block.is_empty() {
        return Err(Error::invalid("empty digit stream"));
    }
    let n = block.len() as u64;
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let mut report = |len: u64| -> Result<()> {
        let prefix = block.prefix(len as usize);
        let d = simple_discrepancy(&prefix)?;
        let dl = block_discrepancy(&prefix, a.window as usize)?;
        writeln!(
            out,
            "{len},{}/{},{}/{}",
            d.numer(),
            d.denom(),
            dl.numer(),
            dl.denom()
        )
        .map_err(|e| Error::internal(format!("write: {e}")))
    };
    let mut len = a.stride;
    while len < n {
        report(len)?;
        len += a.stride;
    }
    report(n)?;
    out.flush().map_err(|e| Error::internal(format!("write: {e}")))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_params(a: ParamsArgs) -> Result<ExitCode> {
    let rows = param_table(a.max_i)?;
    println!("{:>2}  {:>6}  {:>6}  delta", "i", "k", "ell");
    for r in rows {
        println!(
            "{:>2}  {:>6}  {:>6}  {}/{}",
            r.i,
            r.k,
            r.ell,
            r.delta.numer(),
            r.delta.denom()
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(a: VerifyArgs) -> Result<ExitCode> {
    let file = File::open(&a.trace)
        .map_err(|e| Error::invalid(format!("cannot open {}: {e}", a.trace.display())))?;
    let records = read_trace(BufReader::new(file))?;
    let report = verify_trace(&records)?;
    if let Some(reason) = &report.refused {
        println!("refused: {reason}");
        return Ok(ExitCode::FAILURE);
    }
    for r in &report.rounds {
        if r.passed() {
            println!("round {} (f = {}): pass, {} steps", r.round, r.f, r.steps);
        } else {
            println!("round {} (f = {}): FAIL", r.round, r.f);
            for v in &r.violations {
                println!("  {v}");
            }
        }
    }
    Ok(if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
