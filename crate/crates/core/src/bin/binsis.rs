use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use binsis::combinatorics::Approximation;
use binsis::estimator::{alpha_permanent, estimate, LogBigNumber};
use binsis::io::{format_weights_dense, read_margins, read_text, read_weights, WeightsFormat};
use binsis::oracle::{self, ExactCount, WeightClass};
use binsis::proposal::ZeroMode;
use binsis::weights::{ColumnOrderMode, WeightMatrix, DEFAULT_MAX_ITER, DEFAULT_TOL};
use binsis::{Error, Margins, PreparedProblem, ProblemSpec, SamplerOptions};

/// Samples processed per parallel batch when streaming records.
const BATCH: u64 = 4096;

#[derive(Parser)]
#[command(name = "binsis", version, about = "Sequential importance sampling for weighted binary matrices with fixed margins")]
struct Cli {
    /// Worker threads; defaults to all cores.
    #[arg(long, env = "BINSIS_THREADS", global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw matrices and write one JSON record per sample.
    Sample(RunArgs),
    /// Estimate the normalizing constant and report diagnostics.
    Estimate(RunArgs),
    /// Estimate an alpha-permanent of a square matrix.
    AlphaPermanent(AlphaArgs),
    /// Exact values for small or special instances.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ApproxArg {
    Canfield,
    Greenhill,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OrderArg {
    Auto,
    None,
    Descend,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ZerosArg {
    General,
    Structural,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Dense,
    Triplet,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ClassArg {
    I,
    Ii,
    Iii,
    Iv,
}

#[derive(Args, Clone)]
struct SamplerArgs {
    /// Asymptotic count used for the proposal.
    #[arg(long, value_enum, default_value = "canfield")]
    approx: ApproxArg,
    /// Use the weights as given instead of their balanced form.
    #[arg(long)]
    no_canonicalize: bool,
    #[arg(long, value_enum, default_value = "descend")]
    column_order: OrderArg,
    /// Zero-weight handling.
    #[arg(long, value_enum, default_value = "general")]
    zeros: ZerosArg,
    /// Balancing tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Balancing iteration cap.
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
}

impl SamplerArgs {
    fn options(&self) -> SamplerOptions {
        SamplerOptions {
            approx: match self.approx {
                ApproxArg::Canfield => Approximation::Canfield,
                ApproxArg::Greenhill => Approximation::Greenhill,
            },
            canonicalize: !self.no_canonicalize,
            column_order: match self.column_order {
                OrderArg::Auto => ColumnOrderMode::Auto,
                OrderArg::None => ColumnOrderMode::None,
                OrderArg::Descend => ColumnOrderMode::Descend,
            },
            zeros: match self.zeros {
                ZerosArg::General => ZeroMode::General,
                ZerosArg::Structural => ZeroMode::Structural,
            },
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Number of samples.
    #[arg(short = 'T', long = "samples", value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Leave out the thread count and wall time so that the output is
    /// byte-identical across machines.
    #[arg(long)]
    no_runtime: bool,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Margins file with an `r:` line and a `c:` line.
    margins: PathBuf,
    /// Weights file; unit weights when absent.
    #[arg(short, long)]
    weights: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "dense")]
    weights_format: FormatArg,
    /// Sample the transposed problem and map results back.
    #[arg(long)]
    transpose: bool,
    #[command(flatten)]
    sampler: SamplerArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Clone)]
struct AlphaArgs {
    /// Square weights file in dense format.
    #[arg(short, long, conflicts_with = "constant", required_unless_present = "constant")]
    weights: Option<PathBuf>,
    /// Use the constant n x n matrix instead of a file.
    #[arg(long, value_name = "N")]
    constant: Option<usize>,
    /// Entry of the constant matrix.
    #[arg(long, default_value_t = 1.0, requires = "constant")]
    entry: f64,
    #[arg(long)]
    alpha: f64,
    #[command(flatten)]
    sampler: SamplerArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Number of n x n binary matrices with all margins equal to two.
    TwoRegular { n: usize },
    /// Number of matrices with the finch data margins.
    Finch,
    /// Count matrices by exhaustive search; weights restrict the support.
    Enumerate {
        margins: PathBuf,
        #[arg(short, long)]
        weights: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "dense")]
        weights_format: FormatArg,
        #[arg(long, default_value_t = oracle::DEFAULT_NODE_CAP)]
        node_cap: u64,
        /// Also print each matrix as a list of ones.
        #[arg(long)]
        list: bool,
    },
    /// Exact normalizing constant; unit weights use the column recursion.
    Count {
        margins: PathBuf,
        #[arg(short, long)]
        weights: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "dense")]
        weights_format: FormatArg,
    },
    /// Exact permanent of a square dense matrix with n <= 20.
    Permanent { weights: PathBuf },
    /// Alpha-permanent of the constant n x n matrix.
    ConstAlpha {
        n: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        entry: f64,
    },
    /// Count for margins (R,1,...,1) and (C,1,...,1).
    Pathological { m: usize, n: usize, big_r: usize, big_c: usize },
    /// Canonical MINSTD test matrix, optionally mapped to a weight class.
    Minstd {
        m: usize,
        n: usize,
        #[arg(long, value_enum)]
        class: Option<ClassArg>,
    },
    /// Reference values as JSON.
    Fixtures {
        /// Largest n for the two-regular table.
        #[arg(long, default_value_t = 100)]
        max_two_regular: usize,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Infeasible => 2,
        Error::Io(_) | Error::Parse(_) | Error::Dimension(_) | Error::InvalidWeights(_) | Error::SumMismatch { .. } | Error::MarginRange(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        pool = pool.num_threads(t);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("binsis: cannot start worker threads: {e}");
            return ExitCode::from(1);
        }
    };
    let threads = pool.current_num_threads();
    match pool.install(|| run(cli.command, threads)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("binsis: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(command: Command, threads: usize) -> binsis::Result<()> {
    match command {
        Command::Sample(a) => cmd_sample(&a),
        Command::Estimate(a) => cmd_estimate(&a, threads),
        Command::AlphaPermanent(a) => cmd_alpha(&a, threads),
        Command::Oracle { command } => cmd_oracle(command),
    }
}

fn weights_format(f: FormatArg) -> WeightsFormat {
    match f {
        FormatArg::Dense => WeightsFormat::Dense,
        FormatArg::Triplet => WeightsFormat::Triplet,
    }
}

fn load(margins: &Path, weights: Option<&Path>, format: FormatArg) -> binsis::Result<(Margins, WeightMatrix)> {
    let mg = read_margins(margins)?;
    let w = match weights {
        Some(p) => read_weights(p, weights_format(format), mg.m(), mg.n())?,
        None => WeightMatrix::ones(mg.m(), mg.n()),
    };
    Ok((mg, w))
}

fn open_output(path: Option<&Path>) -> binsis::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(path: Option<&Path>, value: &Value) -> binsis::Result<()> {
    let mut out = open_output(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(io::Error::from)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct EchoConfig<'a> {
    command: &'a str,
    margins: Option<&'a Path>,
    weights: Option<&'a Path>,
    weights_format: WeightsFormat,
    constant: Option<usize>,
    entry: Option<f64>,
    alpha: Option<f64>,
    #[serde(rename = "T")]
    samples: u64,
    seed: u64,
    transpose: bool,
    options: SamplerOptions,
    output: Option<&'a Path>,
}

fn prepare(a: &RunArgs) -> binsis::Result<PreparedProblem> {
    let (mut mg, mut w) = load(&a.margins, a.weights.as_deref(), a.weights_format)?;
    if a.transpose {
        mg = mg.transpose();
        w = w.transpose();
    }
    let prob = PreparedProblem::new(&ProblemSpec::new(mg, w, a.sampler.options()))?;
    if !prob.canonical().converged {
        eprintln!(
            "binsis: warning: weight balancing stopped after {} iterations with residual {:.3e}",
            prob.canonical().iterations,
            prob.canonical().residual
        );
    }
    Ok(prob)
}

fn echo<'a>(command: &'a str, a: &'a RunArgs) -> EchoConfig<'a> {
    EchoConfig {
        command,
        margins: Some(&a.margins),
        weights: a.weights.as_deref(),
        weights_format: weights_format(a.weights_format),
        constant: None,
        entry: None,
        alpha: None,
        samples: a.out.samples,
        seed: a.out.seed,
        transpose: a.transpose,
        options: a.sampler.options(),
        output: a.out.output.as_deref(),
    }
}

#[derive(Serialize)]
struct SampleLine {
    index: u64,
    alive: bool,
    log_q: f64,
    log_f: f64,
    ones: Vec<(usize, usize)>,
}

fn cmd_sample(a: &RunArgs) -> binsis::Result<()> {
    let prob = prepare(a)?;
    let mut out = open_output(a.out.output.as_deref())?;
    let transpose = a.transpose;
    let mut start = 0;
    while start < a.out.samples {
        let end = (start + BATCH).min(a.out.samples);
        let lines = prob.run(a.out.seed, start..end, |index, ws, alive, log_q, log_f| {
            let mut ones = ws.ones(&prob);
            if transpose {
                ones = ones.into_iter().map(|(i, j)| (j, i)).collect();
                ones.sort_unstable();
            }
            let line = SampleLine { index, alive, log_q, log_f, ones };
            serde_json::to_string(&line).expect("sample records serialize")
        });
        for l in lines {
            writeln!(out, "{l}")?;
        }
        start = end;
    }
    out.flush()?;
    Ok(())
}

fn runtime(threads: usize, started: Instant) -> Value {
    json!({ "threads": threads, "seconds": started.elapsed().as_secs_f64() })
}

fn cmd_estimate(a: &RunArgs, threads: usize) -> binsis::Result<()> {
    let started = Instant::now();
    let prob = prepare(a)?;
    let lf = prob.log_weights(a.out.seed, a.out.samples);
    let s = estimate(&lf, None)?;
    let mut v = json!({
        "kappa_hat": s.kappa_hat,
        "se": s.se,
        "cv2_hat": s.cv2_hat,
        "delta_hat": s.delta_hat,
        "delta_excludes_dead": s.delta_excludes_dead,
        "ess": s.ess,
        "dead_fraction": s.dead_fraction,
        "T": s.t,
        "seed": a.out.seed,
        "approx": a.sampler.options().approx,
        "balancing": {
            "iterations": prob.canonical().iterations,
            "residual": prob.canonical().residual,
            "converged": prob.canonical().converged,
        },
        "config": echo("estimate", a),
    });
    if !a.out.no_runtime {
        v["timing"] = runtime(threads, started);
    }
    write_json(a.out.output.as_deref(), &v)
}

fn cmd_alpha(a: &AlphaArgs, threads: usize) -> binsis::Result<()> {
    let started = Instant::now();
    let w = match (&a.weights, a.constant) {
        (Some(p), _) => binsis::io::parse_weights_dense(&read_text(p)?)?,
        (None, Some(n)) => {
            if !(a.entry > 0.0 && a.entry.is_finite()) {
                return Err(Error::InvalidArgument(format!("entry must be positive, got {}", a.entry)));
            }
            WeightMatrix::new(n, n, vec![a.entry; n * n])?
        }
        (None, None) => unreachable!("clap requires weights or constant"),
    };
    if w.m() != w.n() {
        return Err(Error::Dimension(format!("alpha-permanents need a square matrix, got {}x{}", w.m(), w.n())));
    }
    let n = w.n();
    let mg = Margins::new(vec![1; n], vec![1; n])?;
    let prob = PreparedProblem::new(&ProblemSpec::new(mg, w, a.sampler.options()))?;
    let s = alpha_permanent(&prob, a.alpha, a.out.seed, a.out.samples)?;
    let exact = match a.constant {
        Some(n) => Some(LogBigNumber::from_ln(oracle::const_alpha_permanent(n, a.entry, a.alpha)?.ln)),
        None => None,
    };
    let config = EchoConfig {
        command: "alpha-permanent",
        margins: None,
        weights: a.weights.as_deref(),
        weights_format: WeightsFormat::Dense,
        constant: a.constant,
        entry: a.constant.map(|_| a.entry),
        alpha: Some(a.alpha),
        samples: a.out.samples,
        seed: a.out.seed,
        transpose: false,
        options: a.sampler.options(),
        output: a.out.output.as_deref(),
    };
    let mut v = json!({
        "per_hat": s.product_hat,
        "per_se": s.product_se,
        "rel_se_pct": s.rel_se_pct,
        "permanent_hat": s.kappa_hat,
        "mu_hat": s.mu_hat,
        "log_mu_hat": s.log_mu_hat,
        "cv2_hat": s.cv2_hat,
        "ess": s.ess,
        "dead_fraction": s.dead_fraction,
        "T": s.t,
        "seed": a.out.seed,
        "exact": exact,
        "config": config,
    });
    if !a.out.no_runtime {
        v["timing"] = runtime(threads, started);
    }
    write_json(a.out.output.as_deref(), &v)
}

fn print_exact(x: &ExactCount) {
    println!("{}", x.render());
}

fn cmd_oracle(command: OracleCommand) -> binsis::Result<()> {
    match command {
        OracleCommand::TwoRegular { n } => {
            if n == 0 {
                return Err(Error::InvalidArgument("n must be positive".into()));
            }
            println!("{}", oracle::two_regular_count(n));
        }
        OracleCommand::Finch => println!("{}", oracle::count_uniform(&oracle::finch_margins())),
        OracleCommand::Enumerate { margins, weights, weights_format, node_cap, list } => {
            let (mg, w) = load(&margins, weights.as_deref(), weights_format)?;
            let support = weights.is_some().then(|| w.support());
            let mut count: u64 = 0;
            let stdout = io::stdout();
            let mut out = BufWriter::new(stdout.lock());
            let mut failed = None;
            oracle::visit_omega(&mg, support.as_ref(), node_cap, |z| {
                count += 1;
                if list && failed.is_none() {
                    let line = serde_json::to_string(&json!({ "ones": z.ones() })).expect("matrices serialize");
                    if let Err(e) = writeln!(out, "{line}") {
                        failed = Some(e);
                    }
                }
            })?;
            if let Some(e) = failed {
                return Err(e.into());
            }
            writeln!(out, "{count}")?;
            out.flush()?;
        }
        OracleCommand::Count { margins, weights, weights_format } => match weights {
            None => println!("{}", oracle::count_uniform(&read_margins(&margins)?)),
            Some(p) => {
                let (mg, w) = load(&margins, Some(&p), weights_format)?;
                print_exact(&oracle::exact_kappa(&mg, &w)?);
            }
        },
        OracleCommand::Permanent { weights } => {
            let w = binsis::io::parse_weights_dense(&read_text(&weights)?)?;
            print_exact(&oracle::exact_permanent(&w)?);
        }
        OracleCommand::ConstAlpha { n, alpha, entry } => print_exact(&oracle::const_alpha_permanent(n, entry, alpha)?),
        OracleCommand::Pathological { m, n, big_r, big_c } => println!("{}", oracle::pathological_count(m, n, big_r, big_c)?),
        OracleCommand::Minstd { m, n, class } => {
            let y = oracle::minstd_canonical(m, n);
            let w = match class {
                None => y,
                Some(c) => oracle::weight_class(
                    &y,
                    match c {
                        ClassArg::I => WeightClass::I,
                        ClassArg::Ii => WeightClass::II,
                        ClassArg::Iii => WeightClass::III,
                        ClassArg::Iv => WeightClass::IV,
                    },
                ),
            };
            print!("{}", format_weights_dense(&w));
        }
        OracleCommand::Fixtures { max_two_regular } => {
            let two_regular: Vec<Value> = (1..=max_two_regular)
                .map(|n| json!({ "n": n, "count": oracle::two_regular_count(n).to_string() }))
                .collect();
            let const_alpha: Vec<Value> = [(3, 1.0, 1.0), (3, 1.0, 2.0), (20, 1.0, 0.5), (20, 1.0, 1.0), (20, 1.0, 2.0), (500, 1.0, 0.5)]
                .iter()
                .map(|&(n, b, alpha)| {
                    let x = oracle::const_alpha_permanent(n, b, alpha)?;
                    Ok(json!({ "n": n, "entry": b, "alpha": alpha, "value": LogBigNumber::from_ln(x.ln), "exact": x.render() }))
                })
                .collect::<binsis::Result<_>>()?;
            let finch = oracle::finch_margins();
            let v = json!({
                "two_regular": two_regular,
                "finch": {
                    "r": finch.rows(),
                    "c": finch.cols(),
                    "count": oracle::count_uniform(&finch).to_string(),
                },
                "const_alpha": const_alpha,
                "pathological": {
                    "m": 24, "n": 31, "R": 24, "C": 17,
                    "count": oracle::pathological_count(24, 31, 24, 17)?.to_string(),
                },
                "minstd": { "R": oracle::minstd_sequence(3) },
            });
            write_json(None, &v)?;
        }
    }
    Ok(())
}
