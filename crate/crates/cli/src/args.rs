use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "agghb", version, about = "Run, tune and verify Heavy-Ball and Aggregated Heavy-Ball experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment and write its trace as CSV plus metadata.
    Run(RunArgs),
    /// Sweep the stepsize grid a/L, a in {2^-6, ..., 2^8}, and print the table.
    Tune(TuneArgs),
    /// Check a trace written by `run` against its convergence bound.
    Verify(VerifyArgs),
    /// Print stepsize constants, effective momenta and condition margins.
    Constants(ConstantsArgs),
    /// Parse a LIBSVM file and print its shape.
    ParseCheck(ParseCheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProblemArg {
    Quadratic,
    Rosenbrock,
    LogregL2,
    LogregNcvx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Gd,
    Hb,
    Agghb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Default,
    Zeros,
    Random,
}

/// Stepsizes: explicit list or one of the named sources.
#[derive(Debug, Clone, PartialEq)]
pub enum GammaArg {
    List(Vec<f64>),
    TheoryNcvx,
    TheoryCvx,
    Tune,
}

/// Comma-separated numbers, kept as one clap value.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatList(pub Vec<f64>);

pub fn parse_list(s: &str) -> Result<FloatList, String> {
    parse_floats(s).map(FloatList)
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    if s.is_empty() {
        return Err("empty list".into());
    }
    s.split(',')
        .map(|tok| {
            if tok.is_empty() || tok.trim() != tok {
                return Err(format!("bad list element {tok:?} (comma-separated, no spaces)"));
            }
            tok.parse::<f64>().map_err(|_| format!("not a number: {tok:?}"))
        })
        .collect()
}

fn parse_gammas(s: &str) -> Result<GammaArg, String> {
    match s {
        "theory-ncvx" => Ok(GammaArg::TheoryNcvx),
        "theory-cvx" => Ok(GammaArg::TheoryCvx),
        "tune" => Ok(GammaArg::Tune),
        _ => parse_floats(s).map(GammaArg::List),
    }
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    #[arg(long, value_enum)]
    pub problem: ProblemArg,
    /// LIBSVM file for logistic regression; looked up under AGGHB_DATA_DIR
    /// when the path does not exist.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Feature count, for files whose last columns are all zero.
    #[arg(long)]
    pub n_features: Option<usize>,
    /// Quadratic diag(1..N) size.
    #[arg(long, conflicts_with = "diag")]
    pub dim: Option<usize>,
    /// Quadratic diagonal, comma-separated.
    #[arg(long, value_parser = parse_list)]
    pub diag: Option<FloatList>,
    /// Absolute l2 weight (logreg-l2).
    #[arg(long, conflicts_with = "l2_frac")]
    pub l2: Option<f64>,
    /// l2 weight as a fraction of the unregularized smoothness L0.
    #[arg(long)]
    pub l2_frac: Option<f64>,
    /// Absolute non-convex regularizer weight (logreg-ncvx).
    #[arg(long, conflicts_with = "lambda_frac")]
    pub lambda: Option<f64>,
    /// Regularizer weight as a fraction of L0 [default 1e-3].
    #[arg(long)]
    pub lambda_frac: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Momentum parameters, comma-separated.
    #[arg(long, value_parser = parse_list)]
    pub betas: Option<FloatList>,
    /// Defaults to hb for one momentum value and agghb otherwise.
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    #[arg(long, value_enum, default_value_t = InitArg::Default)]
    pub init: InitArg,
    /// Box radius for --init random.
    #[arg(long)]
    pub init_radius: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Record f at the averaged iterate.
    #[arg(long)]
    pub track_average: bool,
    /// Worker threads for tuning [default: available cores].
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// List, theory-ncvx, theory-cvx or tune.
    #[arg(long, value_parser = parse_gammas)]
    pub gammas: GammaArg,
    #[arg(long, default_value = "trace.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Trace CSV; metadata is read from the sidecar next to it.
    pub trace: PathBuf,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    #[arg(long, value_parser = parse_list)]
    pub betas: FloatList,
    /// Explicit stepsizes; without them the theoretical ones are evaluated.
    #[arg(long, value_parser = parse_list)]
    pub gammas: Option<FloatList>,
    #[arg(long = "L", default_value_t = 1.0)]
    pub l: f64,
    #[arg(long, default_value_t = 0.0)]
    pub mu: f64,
    /// Iteration horizon K for the constant B.
    #[arg(long)]
    pub horizon: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ParseCheckArgs {
    pub path: PathBuf,
    #[arg(long)]
    pub n_features: Option<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list("0.9,0.95,0.99").unwrap(), FloatList(vec![0.9, 0.95, 0.99]));
        assert!(parse_list("0.9, 0.95").is_err());
        assert!(parse_list("0.9,,0.95").is_err());
        assert!(parse_list("").is_err());
        assert_eq!(parse_gammas("tune").unwrap(), GammaArg::Tune);
        assert_eq!(parse_gammas("0.1").unwrap(), GammaArg::List(vec![0.1]));
    }
}
