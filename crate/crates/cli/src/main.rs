//! `spherekern`: evaluate spherical harmonics and convolutional kernels,
//! decide strict positive definiteness on point sets, and run the bound and
//! rate certificates.
//!
//! Exit codes: 0 on success or a passing check, 1 when a verdict or
//! certificate fails, 2 on usage or input errors.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "spherekern", version, about = "Positive definite kernels from spherical-harmonic schemes")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone, Serialize)]
pub struct Global {
    /// Ambient dimension d of the sphere S^{d-1}.
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Truncation or maximum degree.
    #[arg(long = "k-max", global = true)]
    pub k_max: Option<usize>,
    /// Coefficient scheme JSON file.
    #[arg(long, global = true)]
    pub scheme: Option<PathBuf>,
    /// Point CSV file (`# d=<int>, repr=<polar|cart>` header).
    #[arg(long, global = true)]
    pub points: Option<PathBuf>,
    /// Number of seeded random points when no point file is given.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Seed for random points.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Tolerance override; each command documents its default.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a harmonic Y_alpha at points, or a scheme kernel at a pair.
    Eval(EvalArgs),
    /// Compare zonal sums with c_k P_k(cos dist) on seeded random pairs.
    AdditionTest(AdditionArgs),
    /// List the multi-indices of degree k (optionally those with alpha_j = 0).
    Tau(TauArgs),
    /// Gram matrix of a scheme on a point set.
    Gram,
    /// Strict positive definiteness verdict of a scheme on a point set.
    CheckSpd,
    /// Null-space witness search on the collocation matrix.
    Witness,
    /// Run one of the inequality certificates, or the rate check.
    Certify(CertifyArgs),
    /// Rate sequences: complement quotients, Jacobi ratios, weighted sums.
    Rates(RatesArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct EvalArgs {
    /// Multi-index, comma separated (e.g. `-1,2,3`).
    #[arg(long, allow_hyphen_values = true)]
    pub index: Option<String>,
    /// Point as `polar:t1,...` or `cart:x1,...`; repeatable.
    #[arg(long = "point", allow_hyphen_values = true)]
    pub point: Vec<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct AdditionArgs {
    /// Number of random point pairs.
    #[arg(long, default_value_t = 50)]
    pub pairs: usize,
    /// Relative perturbation of c_k, for checking that the test can fail.
    #[arg(long, default_value_t = 0.0, hide = true, allow_hyphen_values = true)]
    pub perturb: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct TauArgs {
    #[arg(long)]
    pub j: Option<usize>,
    /// Report counts only.
    #[arg(long)]
    pub count_only: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    Lohofer,
    Haagerup,
    Ptilde,
    HarmonicProduct,
    Rates,
}

#[derive(Args, Debug, Serialize)]
pub struct CertifyArgs {
    #[arg(value_enum)]
    pub which: Bound,
    /// Level j (ptilde: default 3; harmonic-product: default 2; rates: required).
    #[arg(long)]
    pub j: Option<usize>,
    /// Largest degree m (lohofer), n (haagerup) or L (ptilde).
    #[arg(long)]
    pub degree_max: Option<usize>,
    /// Prefix of the even/odd CSV files written by `certify rates`.
    #[arg(long, default_value = "rates")]
    pub csv_prefix: PathBuf,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateKind {
    Asympt,
    Jacobi,
    Weighted,
    Isotropic,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Sphere,
    RealProjective,
    ComplexProjective,
    QuaternionProjective,
    Cayley,
}

#[derive(Args, Debug, Serialize)]
pub struct RatesArgs {
    #[arg(value_enum)]
    pub kind: RateKind,
    #[arg(long)]
    pub j: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, value_enum, default_value_t = Family::Sphere)]
    pub family: Family,
    /// Point as `polar:t1,...` or `cart:x1,...`; `asympt` takes two.
    #[arg(long = "point", allow_hyphen_values = true)]
    pub point: Vec<String>,
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, files or values: exit 2.
    Input(String),
    /// The check ran and did not pass: exit 1 (the report is already written).
    Verdict,
}

impl From<spherekern::Error> for Failure {
    fn from(e: spherekern::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::Eval(a) => commands::eval(g, a),
        Command::AdditionTest(a) => commands::addition_test(g, a),
        Command::Tau(a) => commands::tau(g, a),
        Command::Gram => commands::gram(g),
        Command::CheckSpd => commands::check_spd(g),
        Command::Witness => commands::witness(g),
        Command::Certify(a) => commands::certify(g, a),
        Command::Rates(a) => commands::rates(g, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verdict) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
