use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "ddctl",
    version,
    about = "Optimal dividends under a drawdown penalty: solve, check, sweep and simulate"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve for the value function and write it as JSON and/or a CSV table.
    #[command(args_override_self = true)]
    Solve(SolveArgs),
    /// Check the solved value function against the HJB equation.
    #[command(args_override_self = true)]
    Residual(ResidualArgs),
    /// Solve over a list of values of one parameter, or tabulate ζ over u0.
    #[command(args_override_self = true)]
    Sweep(SweepArgs),
    /// Monte Carlo estimate of one strategy, optionally recording paths.
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
    /// Analytic value against simulated optimal, zero and maximal strategies.
    #[command(args_override_self = true)]
    Compare(CompareArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Drift of the surplus.
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// Volatility of the surplus.
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    /// Discount rate.
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// Critical drawdown level.
    #[arg(long, allow_negative_numbers = true)]
    pub d: Option<f64>,
    /// Maximal dividend rate.
    #[arg(long, allow_negative_numbers = true)]
    pub u0: Option<f64>,
    /// Weight of dividends against the drawdown penalty.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// File of `key=value` lines supplying any flag; the command line wins.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory [default: $DDCTL_OUT_DIR or the current directory].
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Both,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Right end of the CSV grid [default: z_g + 10/θ2(u0)].
    #[arg(long, allow_negative_numbers = true)]
    pub zmax: Option<f64>,
    /// Number of CSV grid points.
    #[arg(long, default_value_t = 2001)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct ResidualArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 10_000)]
    pub grid_n: usize,
    /// Scale the first segment's growing coefficient by `1 + f` before checking.
    #[arg(long, allow_negative_numbers = true)]
    pub perturb: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Beta,
    Sigma,
    U0,
    ZetaCurve,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Beta => "beta",
            SweepParam::Sigma => "sigma",
            SweepParam::U0 => "u0",
            SweepParam::ZetaCurve => "zeta-curve",
        }
    }
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum)]
    pub param: SweepParam,
    /// Comma-separated values of the swept parameter.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub values: Vec<f64>,
    /// `a,b,n` grid of u0 values for the ζ curve.
    #[arg(long)]
    pub u0_range: Option<String>,
    /// Right end of every CSV grid [default: largest z_g + 10/θ2(u0) in the sweep].
    #[arg(long, allow_negative_numbers = true)]
    pub zmax: Option<f64>,
    #[arg(long, default_value_t = 2001)]
    pub n: usize,
}

#[derive(Args, Debug, Clone)]
pub struct SimArgs {
    #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
    pub dt: f64,
    /// Truncation time [default: bias bound below 1e-4].
    #[arg(long, allow_negative_numbers = true)]
    pub horizon: Option<f64>,
    #[arg(long, default_value_t = 20_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub sim: SimArgs,
    /// optimal, zero, max or const:<u>.
    #[arg(long, default_value = "optimal")]
    pub strategy: String,
    /// Initial drawdown.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub z0: f64,
    /// Number of paths to write out as CSV.
    #[arg(long, default_value_t = 0)]
    pub record_paths: usize,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub sim: SimArgs,
    /// Comma-separated initial drawdowns.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub z_grid: Vec<f64>,
}
