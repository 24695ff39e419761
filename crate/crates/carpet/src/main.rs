//! `carpet`: command-line front end for the carpet-core models.
//!
//! Exit codes: 0 when every check in the selected run passes, 1 when a check
//! fails or a computation errors, 2 for invalid usage.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "carpet",
    version,
    about = "Exact models of baker maps on Chamanara surfaces, their quotient spheres, toral automorphisms and blow-up inverse limits"
)]
pub struct Cli {
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write an SVG figure for the run here (where the subcommand has one).
    #[arg(long, global = true)]
    pub svg: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Baker map on the n-Chamanara surface.
    Chamanara(ChamanaraArgs),
    /// Induced map on the quotient sphere.
    Quotient(QuotientArgs),
    /// Hyperbolic toral automorphisms.
    Toral(ToralArgs),
    /// Excursions through the hyperbolic region square.
    Hyperlocal(HyperlocalArgs),
    /// Entropy formulas, realization and spanning-set estimates.
    Entropy(EntropyArgs),
    /// Finite-depth blow-up inverse limit and its falsifiers.
    Invlim(InvlimArgs),
    /// Run the acceptance battery.
    Verify(VerifyArgs),
    /// Draw a diagram.
    Plot(PlotArgs),
}

#[derive(Args, Debug)]
pub struct ChamanaraArgs {
    #[arg(long, default_value_t = 2)]
    pub base: u32,
    /// Starting point "x,y" with rational coordinates.
    #[arg(long)]
    pub orbit: Option<String>,
    /// Number of steps; negative values run the inverse.
    #[arg(long, default_value_t = 10, allow_negative_numbers = true)]
    pub steps: i64,
    /// Check the symbolic semiconjugacy exhaustively.
    #[arg(long)]
    pub check_semiconj: bool,
    /// Largest total digit count for the semiconjugacy check.
    #[arg(long, default_value_t = 6)]
    pub period_max: usize,
}

#[derive(Args, Debug)]
pub struct QuotientArgs {
    #[arg(long, default_value_t = 2)]
    pub base: u32,
    #[arg(long)]
    pub orbit: Option<String>,
    #[arg(long, default_value_t = 10, allow_negative_numbers = true)]
    pub steps: i64,
    /// List the branch-point catalog to this depth.
    #[arg(long)]
    pub branch_depth: Option<u32>,
}

#[derive(Args, Debug)]
pub struct ToralArgs {
    /// Matrix entries "a,b,c,d" (row major).
    #[arg(long, default_value = "2,1,1,1")]
    pub matrix: String,
    #[arg(long)]
    pub orbit: Option<String>,
    #[arg(long, default_value_t = 10, allow_negative_numbers = true)]
    pub steps: i64,
    /// List the periodic orbits on the grid with this denominator.
    #[arg(long)]
    pub periodic: Option<u64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum VariantArg {
    D1,
    D3,
}

#[derive(Args, Debug)]
pub struct HyperlocalArgs {
    #[arg(long, default_value = "2")]
    pub lambda: String,
    #[arg(long, default_value = "1/10")]
    pub eps: String,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 128)]
    pub horizon: usize,
    #[arg(long, value_enum, default_value_t = VariantArg::D1)]
    pub variant: VariantArg,
    /// Report the excursion of this single point "p,q" instead of sampling.
    #[arg(long)]
    pub point: Option<String>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SystemArg {
    Bernoulli,
    Toral,
    Shift,
    Identity,
    FactorChain,
}

#[derive(Args, Debug)]
pub struct EntropyArgs {
    #[arg(long, value_enum)]
    pub system: Option<SystemArg>,
    /// Probability vector "p1,p2,..." for the Bernoulli shift.
    #[arg(long, default_value = "1/2,1/2")]
    pub p: String,
    #[arg(long, default_value = "2,1,1,1")]
    pub matrix: String,
    /// Find a Bernoulli shift with this entropy.
    #[arg(long)]
    pub realize: Option<f64>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Largest window for spanning estimates.
    #[arg(long, default_value_t = 12)]
    pub window: usize,
    /// Resolution exponent, eps = 2^-k (default 4 for shifts, 3 for toral and identity).
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BlowArg {
    Fixed,
}

#[derive(Args, Debug)]
pub struct InvlimArgs {
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    #[arg(long, value_enum, default_value_t = BlowArg::Fixed)]
    pub blow: BlowArg,
    #[arg(long)]
    pub spec_falsify: bool,
    #[arg(long)]
    pub app_falsify: bool,
    #[arg(long)]
    pub ball: bool,
    #[arg(long)]
    pub zip: bool,
    /// Grid resolution exponent R (grid step 2^-R).
    #[arg(long, default_value_t = 12)]
    pub resolution: u32,
    /// Largest number of grid candidates to search.
    #[arg(long, default_value_t = 1 << 28)]
    pub budget: u64,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 0.1)]
    pub delta1: f64,
    #[arg(long, default_value_t = 0.01)]
    pub delta2: f64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Run every criterion.
    #[arg(long)]
    pub all: bool,
    /// Run only these criteria (repeatable).
    #[arg(long = "criterion")]
    pub criteria: Vec<u32>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PlotKindArg {
    Regions,
    Identification,
    Quotient,
    Orbit,
    Circle,
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    #[arg(long, value_enum)]
    pub kind: PlotKindArg,
    #[arg(long, default_value_t = 2)]
    pub base: u32,
    #[arg(long, default_value_t = 4)]
    pub depth: u32,
    #[arg(long, default_value_t = 2.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Orbit start "x,y" for the orbit plot (baker map of `--base`).
    #[arg(long)]
    pub orbit: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub steps: i64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = output::configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match commands::run(&cli) {
        Ok(outcome) => {
            if let Err(e) = output::emit(&cli, &outcome) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(if outcome.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(output::exit_code(&e))
        }
    }
}
