//! `isomwalk`: experiments on random walks of planar isometries.
//!
//! Every subcommand prints a JSON report `{config, payload, sha256}`; with
//! `--out DIR` the report, a CSV table and (for `simulate`) an SVG scatter
//! are also written there. Exit codes: 0 success, 2 invalid input,
//! 3 budget exhausted, 4 audit violation or incomplete certificate.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(
    name = "isomwalk",
    version,
    about = "Random walks of planar isometries: exact laws, characteristic functions, certificates and audits"
)]
struct Cli {
    /// JSON object with options for the subcommand; flags given on the
    /// command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for the JSON, CSV and SVG outputs.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact law (or samples) of the endpoint Y_N, with P(Y_N = 0).
    Simulate(SimulateArgs),
    /// Characteristic function values from one or more engines.
    Charfn(CharfnArgs),
    /// Low-frequency comparison with the Gaussian exponent.
    Lowfreq(LowfreqArgs),
    /// Radial L² mass of the characteristic function.
    Radial(RadialArgs),
    /// Net certificate for the values of small-weight polynomials at z.
    Dpv(DpvArgs),
    /// Words in two generators multiplying to a prescribed translation.
    Words(WordsArgs),
    /// Rounding recurrence and p-adic valuation audit.
    Padic(PadicArgs),
    /// Ball probabilities against the Gaussian approximation.
    Lclt(LcltArgs),
    /// How closely multiples of θ approach 2πℤ.
    Diophantine(DiophantineArgs),
}

/// The rotation angle: `cos θ = b/(2a)` or a numeric expression.
#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct AngleArgs {
    #[arg(long, default_value_t = 5)]
    pub a: i64,
    #[arg(long, default_value_t = 6)]
    pub b: i64,
    /// Angle in radians, e.g. "pi*sqrt(2)"; overrides --a/--b.
    #[arg(long)]
    pub theta: Option<String>,
    #[arg(long, default_value_t = 256)]
    pub precision_bits: u32,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub angle: AngleArgs,
    /// littlewood, symmetric4, asymmetric3 or translations.
    #[arg(long, default_value = "littlewood")]
    pub preset: String,
    #[arg(long = "N", default_value_t = 13)]
    pub n: u32,
    /// Draw this many samples instead of enumerating exactly.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cap on the number of states held during enumeration.
    #[arg(long, default_value_t = 800_000_000)]
    pub max_states: u64,
    /// Half-width of the plotted square.
    #[arg(long, default_value_t = 1.0)]
    pub window: f64,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct CharfnArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub angle: AngleArgs,
    #[arg(long, default_value = "littlewood")]
    pub preset: String,
    /// product, table, wreath, transfer or sample (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "product")]
    pub engine: Vec<String>,
    #[arg(long = "N", value_delimiter = ',', default_value = "13")]
    pub n: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub r: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub phi: Vec<f64>,
    /// walk (phases jθ, j < N) or shifted (centred phases).
    #[arg(long, default_value = "walk")]
    pub convention: String,
    /// Rotation paths drawn by the sample engine.
    #[arg(long, default_value_t = 10_000)]
    pub paths: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct LowfreqArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub angle: AngleArgs,
    #[arg(long, default_value = "littlewood")]
    pub preset: String,
    #[arg(long = "N", value_delimiter = ',', default_value = "64,256,1024")]
    pub n: Vec<u32>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.01,0.02,0.03,0.04,0.05,0.06,0.07,0.08,0.09,0.1"
    )]
    pub r: Vec<f64>,
    /// Number of equally spaced directions.
    #[arg(long, default_value_t = 8)]
    pub directions: usize,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct RadialArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub angle: AngleArgs,
    #[arg(long, default_value = "littlewood")]
    pub preset: String,
    #[arg(long, default_value_t = 10.0)]
    pub r: f64,
    #[arg(long = "N", value_delimiter = ',', default_value = "13,26,52")]
    pub n: Vec<u32>,
    #[arg(long, default_value_t = 1e-6)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = isomwalk::charfn::DEFAULT_MAX_POINTS)]
    pub max_points: usize,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct DpvArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub angle: AngleArgs,
    /// Weight budget.
    #[arg(long)]
    pub n: u64,
    /// The net must cover log-moduli down to −ln R.
    #[arg(long = "R")]
    pub r: f64,
    /// gadget or pigeonhole.
    #[arg(long, default_value = "gadget")]
    pub strategy: String,
    /// Exit with status 4 unless every cell is covered.
    #[arg(long)]
    pub require_complete: bool,
    /// Skip the high-precision re-verification of witnesses.
    #[arg(long)]
    pub no_verify: bool,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct WordsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub angle: AngleArgs,
    /// Integer polynomial in z, e.g. "z^2 - 3*z + 1"; repeatable.
    #[arg(long, required = true)]
    pub poly: Vec<String>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct PadicArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub angle: AngleArgs,
    /// Audit every xi = u + v z with |u|, |v| ≤ this bound.
    #[arg(long)]
    pub exhaustive: Option<i64>,
    /// A single frequency, "(u+v*z)/a^k" or "u,v".
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<String>,
    #[arg(long = "K", default_value_t = 6)]
    pub k: u32,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub j_lo: i64,
    #[arg(long, default_value_t = 60, allow_hyphen_values = true)]
    pub j_hi: i64,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct LcltArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub angle: AngleArgs,
    #[arg(long, default_value = "littlewood")]
    pub preset: String,
    #[arg(long = "N", default_value_t = 13)]
    pub n: u32,
    #[arg(long, value_delimiter = ',', default_value = "1,1.5,2,2.5,3,3.5,4")]
    pub r: Vec<f64>,
    /// Centres x₀ = s_k e^{0.37 i k} with s_k spread evenly over [0, reach].
    #[arg(long, default_value_t = 10)]
    pub centres: usize,
    /// Defaults to three standard deviations of the Gaussian.
    #[arg(long)]
    pub reach: Option<f64>,
    /// Also check every cell against the explicit bound with this cutoff L.
    #[arg(long)]
    pub llerr: Option<f64>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct DiophantineArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub angle: AngleArgs,
    #[arg(long, default_value_t = 10_000)]
    pub q_max: u64,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
}

fn threads() -> Result<(), commands::Failure> {
    let Ok(v) = std::env::var("ISOMWALK_THREADS") else {
        return Ok(());
    };
    let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        commands::Failure::Usage(format!("ISOMWALK_THREADS={v:?} is not a positive integer"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| commands::Failure::Other(e.to_string()))
}

fn run() -> Result<(), commands::Failure> {
    use commands::Failure;
    let matches = Cli::command().get_matches();
    let cli = Cli::from_arg_matches(&matches).map_err(|e| Failure::Usage(e.to_string()))?;
    threads()?;
    let file = cli
        .config
        .as_deref()
        .map(config::load)
        .transpose()
        .map_err(Failure::Usage)?;
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    macro_rules! go {
        ($args:expr, $f:path) => {{
            let (args, value) =
                config::resolve($args, sub, file.as_ref()).map_err(Failure::Usage)?;
            let sink = output::Sink::new(cli.out.clone(), name, value)?;
            $f(&args, sink)
        }};
    }
    match cli.cmd {
        Cmd::Simulate(a) => go!(a, commands::simulate),
        Cmd::Charfn(a) => go!(a, commands::charfn),
        Cmd::Lowfreq(a) => go!(a, commands::lowfreq),
        Cmd::Radial(a) => go!(a, commands::radial),
        Cmd::Dpv(a) => go!(a, commands::dpv),
        Cmd::Words(a) => go!(a, commands::words),
        Cmd::Padic(a) => go!(a, commands::padic),
        Cmd::Lclt(a) => go!(a, commands::lclt),
        Cmd::Diophantine(a) => go!(a, commands::diophantine),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("isomwalk: {f}");
            ExitCode::from(f.code())
        }
    }
}
