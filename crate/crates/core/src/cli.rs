//! Command-line front end. [`run`] parses arguments, dispatches, and maps
//! errors to exit codes: 0 on success, 1 on invalid input, 2 when the
//! encoder hits a contradiction.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bench::{self, BenchConfig};
use crate::code::{self, generate_code, DegreeDistribution};
use crate::decimate::{encode_observed, CleanupRule, DecimationPolicy, EncodeObserver};
use crate::error::{Error, Result};
use crate::genword::{check_state, is_generalized_codeword, Assignment};
use crate::mp::{MessageState, MpParams};
use crate::mrf::{gamma_for_rate, Weights};
use crate::ReducedCode;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_CONTRADICTION: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ldgm", version, about = "Lossy compression of binary sources with LDGM codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a random code from a degree distribution.
    Gen(GenArgs),
    /// Compress a source file to information bits.
    Encode(EncodeArgs),
    /// Reconstruct a source from information bits.
    Decode(DecodeArgs),
    /// Check whether a {0,1,*} assignment is a generalized codeword.
    Verify(VerifyArgs),
    /// Rate-distortion sweep over random codes and sources.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Number of source bits.
    #[arg(long)]
    pub n: usize,
    /// Code rate m/n, strictly between 0 and 1.
    #[arg(long)]
    pub rate: f64,
    /// Degree distribution file; defaults to the built-in family for the rate.
    #[arg(long)]
    pub dist: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MessageArgs {
    /// Source weight exponent gamma; defaults to interpolation on the code rate.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = Weights::DEFAULT_W_SOU)]
    pub wsou: f64,
    #[arg(long, default_value_t = Weights::DEFAULT_W_INFO)]
    pub winfo: f64,
    /// Damping: new = (1 - alpha) * computed + alpha * previous.
    #[arg(long, default_value_t = MpParams::default().alpha)]
    pub alpha: f64,
    /// Convergence threshold on the largest message change per sweep.
    #[arg(long, default_value_t = MpParams::default().tol)]
    pub tol: f64,
    /// Sweeps per decimation round.
    #[arg(long = "max-iter", default_value_t = MpParams::default().max_iters)]
    pub max_iter: usize,
    #[arg(long = "bias-threshold", default_value_t = DecimationPolicy::default().bias_threshold)]
    pub bias_threshold: f64,
    /// Per-round cap on fixed bits, as a fraction of the information bits.
    #[arg(long = "max-fix-frac", default_value_t = DecimationPolicy::default().max_fix_fraction)]
    pub max_fix_frac: f64,
    /// Bits fixed in a round where no bias clears the threshold.
    #[arg(long = "min-fix", default_value_t = DecimationPolicy::default().min_fix_count)]
    pub min_fix: usize,
    /// How bits still free at the end are set: argmax_mu or zero_fill.
    #[arg(long, default_value = "argmax_mu")]
    pub cleanup: CleanupRule,
    /// Reinitialize messages after every round instead of keeping them.
    #[arg(long)]
    pub reinit: bool,
}

impl MessageArgs {
    fn weights(&self, rate: f64) -> Result<Weights> {
        Weights::new(self.wsou, self.winfo, self.gamma.unwrap_or_else(|| gamma_for_rate(rate)))
    }

    fn mp(&self) -> Result<MpParams> {
        let p = MpParams {
            alpha: self.alpha,
            tol: self.tol,
            max_iters: self.max_iter,
        };
        p.validate()?;
        Ok(p)
    }

    fn policy(&self) -> Result<DecimationPolicy> {
        let p = DecimationPolicy {
            bias_threshold: self.bias_threshold,
            max_fix_fraction: self.max_fix_frac,
            min_fix_count: self.min_fix,
            cleanup_rule: self.cleanup,
            warm_start: !self.reinit,
            stop_bias: None,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    pub code: PathBuf,
    /// Source file of ASCII 0/1.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[command(flatten)]
    pub params: MessageArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Write encoder statistics as JSON.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Write the per-sweep residual as `round,iter,residual` CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long)]
    pub code: PathBuf,
    /// Information bits as ASCII 0/1.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub code: PathBuf,
    /// `z|x` over {0,1,*}, or a file containing it.
    #[arg(long)]
    pub assignment: String,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated rates.
    #[arg(long, value_delimiter = ',', default_value = "0.3,0.5,0.7,0.9")]
    pub rates: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    #[arg(long, default_value_t = 15)]
    pub trials: usize,
    /// Degree distribution used at every rate; defaults to the built-in family.
    #[arg(long)]
    pub dist: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-trial CSV; printed to standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-rate summary CSV; printed to standard output when absent.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[command(flatten)]
    pub params: MessageArgs,
    /// Record wall-clock time per trial (makes the CSV run-dependent).
    #[arg(long)]
    pub timing: bool,
    /// Worker threads; 0 uses all available cores.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

/// Splices `key=value` lines from `--config <file>` into the argument list
/// as `--key value`, skipping keys already given on the command line.
pub fn expand_config(args: Vec<String>) -> Result<Vec<String>> {
    let mut out = Vec::with_capacity(args.len());
    let mut config: Option<PathBuf> = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            let path = it
                .next()
                .ok_or_else(|| Error::InvalidArgument("--config needs a file".into()))?;
            config = Some(path.into());
        } else if let Some(path) = a.strip_prefix("--config=") {
            config = Some(path.into());
        } else {
            out.push(a);
        }
    }
    let Some(path) = config else { return Ok(out) };
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let given: Vec<String> = out
        .iter()
        .filter_map(|a| a.strip_prefix("--").map(|k| k.split('=').next().unwrap_or(k).to_string()))
        .collect();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: path.clone(),
            line: lineno + 1,
            msg: format!("expected key=value, got `{line}`"),
        })?;
        let (key, value) = (key.trim().replace('_', "-"), value.trim());
        if given.contains(&key) {
            continue;
        }
        match value {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            _ => {
                out.push(format!("--{key}"));
                out.push(value.to_string());
            }
        }
    }
    Ok(out)
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run(args: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INVALID;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_contradiction() {
                EXIT_CONTRADICTION
            } else {
                EXIT_INVALID
            }
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Gen(a) => cmd_gen(&a, out),
        Command::Encode(a) => cmd_encode(&a, out),
        Command::Decode(a) => cmd_decode(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> Result<()> {
    let dist = match &a.dist {
        Some(p) => DegreeDistribution::load(p)?,
        None => bench::default_distribution(a.rate)?,
    };
    let code = generate_code(a.n, a.rate, &dist, a.seed)?;
    code::save_code(&code, &a.out)?;
    emit(
        out,
        &format!("wrote code n={} m={} edges={} to {}\n", code.n(), code.m(), code.num_edges(), a.out.display()),
    )
}

#[derive(Default)]
struct TraceRows {
    rows: String,
}

impl EncodeObserver for TraceRows {
    fn on_sweep(&mut self, round: usize, _rc: &ReducedCode<'_>, state: &MessageState) {
        self.rows.push_str(&format!("{round},{},{:e}\n", state.iteration, state.residual));
    }
}

pub fn cmd_encode(a: &EncodeArgs, out: &mut dyn Write) -> Result<()> {
    let code = code::load_code(&a.code)?;
    let y = code::read_bits(&a.input)?;
    if y.len() != code.n() {
        return Err(Error::InvalidArgument(format!(
            "--in {} has {} bits but the code has n = {}",
            a.input.display(),
            y.len(),
            code.n()
        )));
    }
    let w = a.params.weights(code.rate())?;
    let mp = a.params.mp()?;
    let policy = a.params.policy()?;
    let mut trace = TraceRows::default();
    let (x, stats) = encode_observed(&code, &y, &w, &mp, &policy, a.seed, &mut trace)?;
    code::write_bits(&a.out, &x)?;
    if let Some(p) = &a.stats {
        write_file(p, &format!("{}\n", stats.to_json()))?;
    }
    if let Some(p) = &a.trace {
        write_file(p, &format!("round,iter,residual\n{}", trace.rows))?;
    }
    emit(out, &format!("distortion {}\n", stats.distortion))
}

pub fn cmd_decode(a: &DecodeArgs, out: &mut dyn Write) -> Result<()> {
    let code = code::load_code(&a.code)?;
    let x = code::read_bits(&a.input)?;
    if x.len() != code.m() {
        return Err(Error::InvalidArgument(format!(
            "--in {} has {} bits but the code has m = {}",
            a.input.display(),
            x.len(),
            code.m()
        )));
    }
    let y = code::decode(&code, &x)?;
    code::write_bits(&a.out, &y)?;
    emit(out, &format!("wrote {} bits to {}\n", y.len(), a.out.display()))
}

fn read_assignment(arg: &str) -> Result<Assignment> {
    let path = Path::new(arg);
    if !arg.contains('|') && path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        return text.parse();
    }
    arg.parse()
}

pub fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<()> {
    let code = code::load_code(&a.code)?;
    let asg = read_assignment(&a.assignment)?;
    asg.check_dims(&code)?;
    let mut text = String::new();
    for c in 0..code.n() {
        text.push_str(&format!("check {c}: {:?}\n", check_state(&code, &asg, c)));
    }
    let valid = is_generalized_codeword(&code, &asg);
    text.push_str(if valid { "valid\n" } else { "invalid\n" });
    emit(out, &text)
}

pub fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = BenchConfig {
        rates: a.rates.clone(),
        n: a.n,
        trials: a.trials,
        dist: a.dist.as_ref().map(DegreeDistribution::load).transpose()?,
        w_sou: a.params.wsou,
        w_info: a.params.winfo,
        gamma: a.params.gamma,
        mp: a.params.mp()?,
        policy: a.params.policy()?,
        seed: a.seed,
        timing: a.timing,
        threads: a.threads,
    };
    let records = bench::run_rd_sweep(&cfg)?;
    let trials = bench::trials_csv(&records);
    let summary = bench::summary_csv(&bench::summarize(&records)?);
    match &a.out {
        Some(p) => write_file(p, &trials)?,
        None => emit(out, &trials)?,
    }
    match &a.summary {
        Some(p) => write_file(p, &summary)?,
        None => emit(out, &summary)?,
    }
    Ok(())
}
