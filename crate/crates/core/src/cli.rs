//! Command-line front end.
//!
//! `run` parses arguments and writes to the supplied streams so the whole
//! interface can be exercised in-process. Exit codes: 0 success, 1 input or
//! usage error, 2 solver hit its iteration limit, 3 a verification check
//! failed.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::arimoto::{self, solve_arimoto, CapacityResult, IterationTrace, SolveOptions, Termination};
use crate::backward_em::{self, solve_backward_em, BackwardEmOptions, MStepOptions};
use crate::channel::{load_channel_with_warnings, Channel, ChannelFormat, ChannelKind};
use crate::error::Error;
use crate::prob::{nats_to_bits, Distribution};
use crate::verify::{self, brute_force_capacity, certified_bracket, circumcenter_check, converse_check};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_MAX_ITERS: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "dmc-capacity", version, about = "Capacity of discrete memoryless channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for ChannelFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => ChannelFormat::Json,
            Format::Csv => ChannelFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Arimoto,
    BackwardEm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Units {
    Bits,
    Nats,
}

impl Units {
    fn convert(self, nats: f64) -> f64 {
        match self {
            Units::Bits => nats_to_bits(nats),
            Units::Nats => nats,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Units::Bits => "bits",
            Units::Nats => "nats",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Bsc,
    Bec,
    Z,
    Typewriter,
    Identity,
    Uniform,
}

#[derive(Debug, clap::Args)]
struct ChannelArgs {
    /// Channel file.
    #[arg(long)]
    channel: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, clap::Args)]
struct SolverArgs {
    /// Stop once the capacity bracket is narrower than this (nats).
    #[arg(long, default_value_t = arimoto::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = arimoto::DEFAULT_MAX_ITERS)]
    max_iters: usize,
    /// Backward-em only: damping of the inner fixed-point iteration.
    #[arg(long, default_value_t = backward_em::DEFAULT_DAMPING)]
    damping: f64,
    /// Backward-em only: residual tolerance of the inner fixed-point iteration.
    #[arg(long, default_value_t = backward_em::DEFAULT_INNER_TOL)]
    inner_tol: f64,
    /// Backward-em only: inner iteration limit.
    #[arg(long, default_value_t = backward_em::DEFAULT_MAX_INNER)]
    max_inner: usize,
}

impl SolverArgs {
    fn solve(&self, ch: &Channel, algorithm: Algorithm) -> crate::Result<(CapacityResult, IterationTrace)> {
        let solve = SolveOptions {
            tol: self.tol,
            max_iters: self.max_iters,
            initial: None,
        };
        match algorithm {
            Algorithm::Arimoto => solve_arimoto(ch, &solve),
            Algorithm::BackwardEm => solve_backward_em(
                ch,
                &BackwardEmOptions {
                    solve,
                    m_step: MStepOptions {
                        inner_tol: self.inner_tol,
                        max_inner: self.max_inner,
                        damping: self.damping,
                    },
                },
            ),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the capacity of a channel and print it as JSON.
    Capacity {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, value_enum, default_value = "arimoto")]
        algorithm: Algorithm,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value = "bits")]
        units: Units,
        /// Write the per-iteration trace (nats) as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check an input distribution against the capacity characterization.
    Verify {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Input distribution: a JSON array, or an object with an
        /// `optimal_input` or `input` array. Solved with Arimoto when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Tolerance of the checks (nats).
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = verify::DEFAULT_SUPPORT_THRESHOLD)]
        support_threshold: f64,
        #[arg(long, default_value_t = arimoto::DEFAULT_MAX_ITERS)]
        max_iters: usize,
    },
    /// Run both algorithms from the uniform input and write their traces.
    Compare {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value = "bits")]
        units: Units,
        /// Directory for `arimoto_trace.csv` and `backward_em_trace.csv`.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Write a canonical channel as JSON.
    Generate {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Probability for bsc/bec/z, size for typewriter/identity, `N,M` or
        /// `N` for uniform.
        #[arg(long)]
        param: String,
        /// Output path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct CapacityOutput<'a> {
    capacity: f64,
    lower: f64,
    upper: f64,
    iterations: usize,
    termination: &'a str,
    optimal_input: &'a [f64],
    units: &'a str,
}

#[derive(Serialize)]
struct CompareOutput<'a> {
    capacity_a: f64,
    capacity_b: f64,
    iters_a: usize,
    iters_b: usize,
    max_capacity_diff: f64,
    units: &'a str,
}

/// Failure that maps to an exit code with a one-line message.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Capacity {
            channel,
            algorithm,
            solver,
            units,
            trace,
        } => cmd_capacity(&channel, algorithm, &solver, units, trace.as_deref(), out, err),
        Command::Verify {
            channel,
            input,
            tol,
            support_threshold,
            max_iters,
        } => cmd_verify(&channel, input.as_deref(), tol, support_threshold, max_iters, out, err),
        Command::Compare {
            channel,
            solver,
            units,
            out_dir,
        } => cmd_compare(&channel, &solver, units, &out_dir, out, err),
        Command::Generate { kind, param, out: path } => cmd_generate(kind, &param, path.as_deref(), out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read_channel(args: &ChannelArgs, err: &mut dyn Write) -> Result<Channel, Failure> {
    let file = File::open(&args.channel)
        .map_err(|e| Failure::input(format!("{}: {e}", args.channel.display())))?;
    let (channel, warnings) = load_channel_with_warnings(file, args.format.into())
        .map_err(|e| Failure::input(format!("{}: {e}", args.channel.display())))?;
    for w in warnings {
        writeln!(err, "warning: {w}")?;
    }
    Ok(channel)
}

fn write_trace(path: &Path, trace: &IterationTrace) -> Result<(), Failure> {
    let file = File::create(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    trace.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn termination_code(t: Termination) -> i32 {
    match t {
        Termination::Converged => EXIT_OK,
        Termination::MaxIterations => EXIT_MAX_ITERS,
    }
}

fn cmd_capacity(
    channel: &ChannelArgs,
    algorithm: Algorithm,
    solver: &SolverArgs,
    units: Units,
    trace_path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let ch = read_channel(channel, err)?;
    let (result, trace) = solver.solve(&ch, algorithm)?;
    if let Some(path) = trace_path {
        write_trace(path, &trace)?;
    }
    let output = CapacityOutput {
        capacity: units.convert(result.capacity),
        lower: units.convert(result.lower),
        upper: units.convert(result.upper),
        iterations: result.iterations,
        termination: result.termination.as_str(),
        optimal_input: result.optimal_input.weights(),
        units: units.name(),
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&output).expect("serializable"))?;
    Ok(termination_code(result.termination))
}

fn read_input_distribution(path: &Path) -> Result<Distribution, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let array = match &value {
        serde_json::Value::Object(map) => map.get("optimal_input").or_else(|| map.get("input")),
        other => Some(other),
    };
    let weights: Vec<f64> = array
        .and_then(|a| serde_json::from_value(a.clone()).ok())
        .ok_or_else(|| {
            Failure::input(format!(
                "{}: expected an array of probabilities or an object with `optimal_input`",
                path.display()
            ))
        })?;
    Ok(Distribution::new(weights)?)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn grid_step_for(inputs: usize) -> f64 {
    match inputs {
        0..=2 => 1e-5,
        3 => 1e-3,
        _ => 1e-2,
    }
}

fn cmd_verify(
    channel: &ChannelArgs,
    input: Option<&Path>,
    tol: f64,
    support_threshold: f64,
    max_iters: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let ch = read_channel(channel, err)?;
    let (q, source) = match input {
        Some(path) => (read_input_distribution(path)?, "file"),
        None => {
            let opts = SolveOptions {
                max_iters,
                ..SolveOptions::default()
            };
            (solve_arimoto(&ch, &opts)?.0.optimal_input, "arimoto")
        }
    };
    if q.len() != ch.inputs() {
        return Err(Error::DimensionMismatch {
            expected: ch.inputs(),
            found: q.len(),
        }
        .into());
    }
    writeln!(out, "channel: {} inputs, {} outputs", ch.inputs(), ch.outputs())?;
    writeln!(out, "input ({source}): {:?}", q.weights())?;
    let (lower, upper) = certified_bracket(&q, &ch)?;
    writeln!(out, "bracket: [{lower}, {upper}] nats")?;

    let report = circumcenter_check(&q, &ch, support_threshold, tol)?;
    writeln!(
        out,
        "circumcenter: {} (I = {}, divergences = {:?})",
        verdict(report.passed),
        report.mutual_info,
        report.divergences
    )?;
    if !report.failing.is_empty() {
        writeln!(out, "  failing inputs: {:?}", report.failing)?;
    }
    if report.passed && !report.strict_failures.is_empty() {
        writeln!(
            out,
            "  off-support inputs below the common divergence: {:?}",
            report.strict_failures
        )?;
    }
    let mut all_ok = report.passed;

    let boundary = q.weights().iter().any(|&w| w <= support_threshold);
    if boundary {
        writeln!(out, "converse: PASS (not applicable: input has off-support symbols)")?;
    } else {
        match converse_check(&ch, &q, tol)? {
            Some(c) => {
                let ok = c >= lower - tol && c <= upper + tol;
                all_ok &= ok;
                writeln!(out, "converse: {} (certified capacity {c} nats)", verdict(ok))?;
            }
            None => {
                all_ok = false;
                writeln!(out, "converse: FAIL (divergences are not all equal)")?;
            }
        }
    }

    if ch.inputs() <= verify::MAX_BRUTE_FORCE_INPUTS {
        let step = grid_step_for(ch.inputs());
        let (grid_value, argmax) = brute_force_capacity(&ch, step)?;
        let (_, grid_upper) = certified_bracket(&argmax, &ch)?;
        let ok = grid_value <= upper + tol && lower <= grid_upper + tol;
        all_ok &= ok;
        writeln!(
            out,
            "brute force: {} (grid step {step}: capacity in [{grid_value}, {grid_upper}] nats)",
            verdict(ok)
        )?;
    } else {
        writeln!(out, "brute force: SKIPPED (more than {} inputs)", verify::MAX_BRUTE_FORCE_INPUTS)?;
    }

    writeln!(out, "result: {}", verdict(all_ok))?;
    Ok(if all_ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_compare(
    channel: &ChannelArgs,
    solver: &SolverArgs,
    units: Units,
    out_dir: &Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let ch = read_channel(channel, err)?;
    let (a, trace_a) = solver.solve(&ch, Algorithm::Arimoto)?;
    let (b, trace_b) = solver.solve(&ch, Algorithm::BackwardEm)?;
    std::fs::create_dir_all(out_dir)
        .map_err(|e| Failure::input(format!("{}: {e}", out_dir.display())))?;
    write_trace(&out_dir.join("arimoto_trace.csv"), &trace_a)?;
    write_trace(&out_dir.join("backward_em_trace.csv"), &trace_b)?;
    let summary = CompareOutput {
        capacity_a: units.convert(a.capacity),
        capacity_b: units.convert(b.capacity),
        iters_a: a.iterations,
        iters_b: b.iterations,
        max_capacity_diff: units.convert((a.capacity - b.capacity).abs()),
        units: units.name(),
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&summary).expect("serializable"))?;
    Ok(termination_code(a.termination).max(termination_code(b.termination)))
}

fn parse_param<T: std::str::FromStr>(kind: &str, text: &str) -> Result<T, Failure> {
    text.trim()
        .parse()
        .map_err(|_| Failure::input(format!("invalid --param {text:?} for {kind}")))
}

fn cmd_generate(kind: Kind, param: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<i32, Failure> {
    let kind = match kind {
        Kind::Bsc => ChannelKind::Bsc(parse_param("bsc", param)?),
        Kind::Bec => ChannelKind::Bec(parse_param("bec", param)?),
        Kind::Z => ChannelKind::Z(parse_param("z", param)?),
        Kind::Typewriter => ChannelKind::NoisyTypewriter(parse_param("typewriter", param)?),
        Kind::Identity => ChannelKind::Identity(parse_param("identity", param)?),
        Kind::Uniform => match param.split_once(',') {
            Some((n, m)) => ChannelKind::UniformRows(parse_param("uniform", n)?, parse_param("uniform", m)?),
            None => {
                let n = parse_param("uniform", param)?;
                ChannelKind::UniformRows(n, n)
            }
        },
    };
    let ch = Channel::canonical(kind)?;
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?;
            ch.save_json(BufWriter::new(file))?;
        }
        None => ch.save_json(out)?,
    }
    Ok(EXIT_OK)
}
