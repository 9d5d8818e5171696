mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nilcorr::Error;

use output::{Format, Sink};

#[derive(Parser, Debug)]
#[command(name = "nilcorr", version, about = "Möbius/Liouville correlation experiments")]
struct Cli {
    /// Worker thread cap (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for random test functions.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Omit the timestamp from JSON metadata.
    #[arg(long, global = true)]
    reproducible: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sieve μ, λ and Λ' on [lo, hi).
    Sieve(SieveArgs),
    /// Correlate μ or λ with a linear phase, a bracket polynomial or a
    /// Heisenberg nilsequence along a ladder of N.
    Correlate(CorrelateArgs),
    /// Type I and Type II statistics of e(nα).
    Typesums(TypesumsArgs),
    /// Progression scan of the character family for the orbit n ↦ (nα₁, …).
    Equidist(EquidistArgs),
    /// Horizontal-character obstruction search and arc classification.
    Dichotomy(DichotomyArgs),
    /// Dirichlet characters modulo q.
    Char(CharArgs),
    /// Averages of e(pα) along primes.
    PrimeOrbit(PrimeOrbitArgs),
    /// Run every exact-identity suite.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
pub struct SieveArgs {
    #[arg(long, default_value = "1")]
    lo: String,
    #[arg(long)]
    hi: String,
    /// Print only totals (Mertens value and prime count).
    #[arg(long)]
    summary: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WeightArg {
    Mobius,
    Liouville,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PsiArg {
    One,
    Exp,
    Tent,
    Bump,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FitArg {
    Power,
    LogPower,
}

#[derive(Args, Debug)]
pub struct CorrelateArgs {
    #[arg(long, value_enum, default_value_t = WeightArg::Mobius)]
    weight: WeightArg,
    /// F(n) = e(nα).
    #[arg(long, conflicts_with_all = ["bracket", "nil"])]
    phase: Option<String>,
    /// F(n) = Ψ({nβ⌊nα⌋}), given as `α,β`.
    #[arg(long, conflicts_with = "nil")]
    bracket: Option<String>,
    /// F(n) = Ψ(τ₃(g(n)Γ)) for g(n) = (nα, nβ, n²αβ), given as `α,β`.
    #[arg(long)]
    nil: Option<String>,
    #[arg(long, value_enum, default_value_t = PsiArg::Exp)]
    psi: PsiArg,
    /// Sampled Ψ: one value per line at equally spaced knots on [0, 1].
    #[arg(long)]
    psi_table: Option<PathBuf>,
    #[arg(long, default_value = "1e3,1e4,1e5,1e6")]
    ladder: String,
    #[arg(long, value_enum, default_value_t = FitArg::Power)]
    fit: FitArg,
}

#[derive(Args, Debug)]
pub struct TypesumsArgs {
    #[arg(long, default_value = "sqrt2")]
    phase: String,
    #[arg(long, default_value = "1e5")]
    n: String,
    /// Single K (default: the dyadic ladder).
    #[arg(long)]
    k: Option<u64>,
    /// W for the single K (default ⌊N/K⌋).
    #[arg(long)]
    w: Option<u64>,
    #[arg(long, default_value_t = nilcorr::correlator::DEFAULT_TYPE_THRESHOLD)]
    threshold_type1: f64,
    #[arg(long, default_value_t = nilcorr::correlator::DEFAULT_TYPE_THRESHOLD)]
    threshold_type2: f64,
}

#[derive(Args, Debug)]
pub struct EquidistArgs {
    /// One token per torus coordinate.
    #[arg(long, required = true, num_args = 1.., value_delimiter = ',')]
    phase: Vec<String>,
    #[arg(long, default_value = "1e4")]
    n: String,
    #[arg(long, default_value_t = 20)]
    q_max: u64,
    #[arg(long, default_value_t = 0.5)]
    min_frac: f64,
    #[arg(long, default_value_t = 5)]
    k_max: i64,
}

#[derive(Args, Debug)]
pub struct DichotomyArgs {
    /// Linear components n ↦ αn, comma separated.
    #[arg(long, num_args = 1.., value_delimiter = ',', conflicts_with = "poly")]
    phase: Vec<String>,
    /// JSON file holding one polynomial object or an array of them.
    #[arg(long)]
    poly: Option<PathBuf>,
    #[arg(long, default_value = "1e4")]
    n: String,
    #[arg(long, default_value_t = nilcorr::equidist::DEFAULT_K_MAX)]
    k_max: i64,
    #[arg(long, default_value_t = nilcorr::equidist::DEFAULT_THRESHOLD)]
    threshold: f64,
}

#[derive(Args, Debug)]
pub struct CharArgs {
    #[arg(long)]
    q: u64,
    /// Report orthogonality, Plancherel and inversion defects.
    #[arg(long)]
    plancherel: bool,
    /// Also compute E_{n ≤ N} μ(n)χ̄(n) for every χ.
    #[arg(long)]
    correlate: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PrimeModeArg {
    NthPrime,
    LambdaWeighted,
}

#[derive(Args, Debug)]
pub struct PrimeOrbitArgs {
    #[arg(long, default_value = "sqrt2")]
    phase: String,
    #[arg(long, default_value = "1e5")]
    n: String,
    #[arg(long, value_enum, default_value_t = PrimeModeArg::NthPrime)]
    mode: PrimeModeArg,
    #[arg(long, default_value_t = 5)]
    w: u64,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    #[arg(long, default_value = "1e5")]
    n: String,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Argument(_) | Error::Format(_) => 2,
        Error::Resource(_) => 3,
        Error::InternalConsistency { .. } => 4,
        Error::Io(_) => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            eprintln!("error: cannot configure {t} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = Sink::new(cli.format, cli.output.as_deref(), cli.reproducible, cli.seed, cli.threads)
        .and_then(|mut sink| match &cli.command {
            Command::Sieve(a) => commands::sieve(&mut sink, a),
            Command::Correlate(a) => commands::correlate(&mut sink, a),
            Command::Typesums(a) => commands::typesums(&mut sink, a),
            Command::Equidist(a) => commands::equidist(&mut sink, a),
            Command::Dichotomy(a) => commands::dichotomy(&mut sink, a),
            Command::Char(a) => commands::characters(&mut sink, a),
            Command::PrimeOrbit(a) => commands::prime_orbit(&mut sink, a),
            Command::Selftest(a) => commands::selftest(&mut sink, a),
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
