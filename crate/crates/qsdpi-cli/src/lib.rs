//! Command-line frontend for `qsdpi`.
//!
//! Every subcommand returns a [`Report`]; `main` renders it and maps the outcome to the
//! exit code (0 success, 1 error, 2 a falsified order asked for with `--assert`).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod channel_file;
pub mod commands;
pub mod report;

pub use commands::*;
pub use report::{OutputFormat, Report, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0}")]
    Module(#[from] qsdpi::Error),
    #[error("{context}: {source}")]
    Context {
        context: String,
        source: qsdpi::Error,
    },
}

pub(crate) trait WithContext<T> {
    fn context(self, what: &str) -> Result<T, CliError>;
}

impl<T> WithContext<T> for qsdpi::Result<T> {
    fn context(self, what: &str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Context {
            context: what.to_string(),
            source,
        })
    }
}

/// Parsed command line.
#[derive(Debug, Parser)]
#[command(name = "qsdpi", version, about = "Contraction coefficients, channel orders and capacity bounds")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true, default_value_t = 1e-6, value_parser = positive)]
    pub tol: f64,
    #[arg(long, global = true)]
    pub cutoff: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Defaults to csv for figure2 and report elsewhere.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Show entropic quantities in bits.
    #[arg(long, global = true)]
    pub bits: bool,
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} is not positive"))
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lower bound on the relative-entropy contraction coefficient, with closed forms and bounds.
    Eta(EtaArgs),
    #[command(subcommand)]
    Order(OrderCommand),
    /// One-shot capacities and the bounds implied by approximate orders.
    Capacity(CapacityArgs),
    #[command(subcommand)]
    Weyl(WeylCommand),
    #[command(subcommand)]
    Gaussian(GaussianCommand),
    /// Log-Sobolev estimates, Dirichlet comparison and the depolarizing contraction constant.
    Lsi(LsiArgs),
    /// Bounds on η(E_1/2 ⊗ D_p) as CSV columns.
    Figure2(Figure2Args),
}

#[derive(Debug, Args)]
pub struct EtaArgs {
    #[arg(long)]
    pub channel: PathBuf,
    /// Fixed reference state; optimized over when absent.
    #[arg(long)]
    pub sigma: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// M, the candidate dominating channel.
    #[arg(long)]
    pub channel: PathBuf,
    /// N, the candidate dominated channel.
    #[arg(long)]
    pub channel2: PathBuf,
    /// Exit with status 2 when the order is falsified.
    #[arg(long)]
    pub assert: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LnChoice {
    Ln,
    Fq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum McChoice {
    Mc,
    McFq,
}

#[derive(Debug, Subcommand)]
pub enum OrderCommand {
    /// Degradability SDP: min ‖N − Θ∘M‖⋄.
    Degrade(PairArgs),
    LessNoisy {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_enum, default_value_t = LnChoice::Ln)]
        variant: LnChoice,
        /// Test the reversed (anti) order.
        #[arg(long)]
        anti: bool,
    },
    MoreCapable {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_enum, default_value_t = McChoice::Mc)]
        variant: McChoice,
        #[arg(long)]
        anti: bool,
    },
    /// Less noisy with a reference system attached.
    Complete {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 2)]
        dim_ref: usize,
        #[arg(long)]
        classical: bool,
    },
    /// Less noisy for tensor powers 1..=copies.
    Regularized {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 2)]
        copies: usize,
    },
    /// Approximate order levels from the degrading distance.
    Approx {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        channel2: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Q1,
    Chi,
    P1,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    #[arg(long)]
    pub channel: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Quantity::Q1, Quantity::Chi, Quantity::P1])]
    pub quantity: Vec<Quantity>,
    #[arg(long, default_value_t = 2)]
    pub ensemble_size: usize,
    /// Bound set to render: mc, reg_mc, fq_ln, c_ln, anti_mc, anti_ln, deg, anti_deg.
    #[arg(long)]
    pub bounds: Option<String>,
    /// Order level; for deg and anti_deg it defaults to the degrading distance to the complement.
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum WeylCommand {
    /// Writes the channel file of W_{a,b} ∘ M_δ.
    Build {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [0, 0])]
        shift: Vec<usize>,
    },
    /// Fourier-quotient degradation test of M_δ against M_γ.
    DegradeTest {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        gamma: Vec<f64>,
    },
    Gamma0 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
    },
    /// Less-noisy falsifier for M_δ against ½ M_δ + ½ W_{1,1} ∘ M_γ₀.
    LnMixture {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyChoice {
    Attenuator,
    Amplifier,
    Additive,
}

#[derive(Debug, Args)]
pub struct GaussianFamilyArgs {
    #[arg(long, value_enum)]
    pub family: FamilyChoice,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Environment (attenuator, amplifier) or noise (additive) energy.
    #[arg(long = "E")]
    pub e: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GKind {
    Additive,
    Attenuator,
}

#[derive(Debug, Subcommand)]
pub enum GaussianCommand {
    /// Closed-form coefficient at the listed input energies.
    Eta {
        #[command(flatten)]
        family: GaussianFamilyArgs,
        #[arg(long = "E1", value_delimiter = ',', required = true)]
        e1: Vec<f64>,
    },
    /// Truncated Fock-space ratios along E₁ − δ, next to the closed form.
    Sweep {
        #[command(flatten)]
        family: GaussianFamilyArgs,
        #[arg(long = "E1")]
        e1: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.03, 0.01])]
        delta: Vec<f64>,
    },
    /// Largest violation of the g-function inequality on a grid of (0, max].
    GCheck {
        #[arg(long, value_enum, default_value_t = GKind::Additive)]
        kind: GKind,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, default_value_t = 5.0)]
        max: f64,
        /// Smallest ν on the grid; the attenuator form needs ν ≥ 1 once η > 1.
        #[arg(long)]
        nu_min: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormChoice {
    Continuous,
    Discrete,
    Both,
}

#[derive(Debug, Args)]
pub struct LsiArgs {
    #[arg(long)]
    pub channel: PathBuf,
    /// Second generator for the Dirichlet comparison.
    #[arg(long)]
    pub channel2: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormChoice::Both)]
    pub form: FormChoice,
    /// Also report (1 − p)^{1+α(σ)} for the generalized depolarizing channel to σ.
    #[arg(long)]
    pub sdpi_p: Option<f64>,
    /// σ for --sdpi-p; defaults to the invariant state of the channel.
    #[arg(long)]
    pub sigma: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Figure2Args {
    #[arg(long, value_delimiter = ',')]
    pub p_grid: Option<Vec<f64>>,
}

/// Dispatches to the command handler.
pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    match &cfg.command {
        Command::Eta(a) => cmd_eta(cfg, a),
        Command::Order(o) => cmd_order(cfg, o),
        Command::Capacity(a) => cmd_capacity(cfg, a),
        Command::Weyl(w) => cmd_weyl(cfg, w),
        Command::Gaussian(g) => cmd_gaussian(cfg, g),
        Command::Lsi(a) => cmd_lsi(cfg, a),
        Command::Figure2(a) => cmd_figure2(a.p_grid.as_deref().unwrap_or(&default_p_grid())),
    }
}

impl RunConfig {
    pub fn output_format(&self) -> OutputFormat {
        self.format.unwrap_or(match self.command {
            Command::Figure2(_) => OutputFormat::Csv,
            _ => OutputFormat::Report,
        })
    }
}

pub fn default_p_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}
