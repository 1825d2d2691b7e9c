mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exact regular-open-set algebra, credences and integration from the command line.
///
/// Inputs are JSON, either inline or a file path. Exit status: 0 on success,
/// 1 when a verification fails (a JSON witness is printed), 2 on bad input.
#[derive(Debug, Parser)]
#[command(name = "regopen", version)]
pub struct Cli {
    /// Add decimal renderings with this many digits next to exact values.
    #[arg(long, global = true, value_name = "INT")]
    pub decimals: Option<usize>,

    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Boolean operations on elementary regular open sets.
    Algebra {
        #[arg(value_enum)]
        op: AlgebraOp,
        /// Sets as JSON or files; later sets inherit the first set's ambient.
        #[arg(required = true, value_name = "SET")]
        sets: Vec<String>,
    },
    /// Approximate integral with the exact value alongside.
    Integrate {
        #[command(flatten)]
        input: IntegrandArgs,
        #[arg(long, default_value = "1/1000", value_name = "RATIONAL")]
        eps: String,
        /// Emit (N, minorant value) convergence rows instead of the report.
        #[arg(long, value_enum)]
        trace: Option<TraceFormat>,
        #[arg(long, value_name = "FILE")]
        emit: Option<PathBuf>,
    },
    /// Conditional expectation on a set, optionally checked against a partition.
    Expect {
        #[command(flatten)]
        input: IntegrandArgs,
        #[arg(long, default_value = "1/1000", value_name = "RATIONAL")]
        eps: String,
        /// Cells of a partition of the set, checked with the Bayes formula.
        #[arg(long, value_name = "FILE")]
        partition: Option<String>,
    },
    /// Push a credence forward along a monotone piecewise-affine map.
    Pushforward {
        #[arg(long, value_name = "FILE")]
        map: String,
        #[arg(long, value_name = "FILE")]
        credence: String,
        /// With --set, also check change of variables for this integrand.
        #[arg(long = "fn", value_name = "FILE", requires = "set")]
        function: Option<String>,
        /// Target set in the codomain.
        #[arg(long, value_name = "FILE", requires = "function")]
        set: Option<String>,
        #[arg(long, default_value = "1/100", value_name = "RATIONAL")]
        eps: String,
    },
    /// Liminal structure of a credence.
    Liminal {
        #[command(subcommand)]
        action: LiminalAction,
    },
    /// Atoms and Stone-space weights of a generated finite algebra.
    Stone {
        #[arg(long, value_name = "FILE")]
        generators: String,
        #[arg(long, value_name = "FILE")]
        credence: String,
        #[arg(long, value_name = "FILE")]
        emit: Option<PathBuf>,
    },
    /// Brute-force checks over every labeled topology on few points.
    Oracle {
        #[arg(long, default_value_t = 4, value_name = "INT")]
        max_points: usize,
        /// Comma-separated subset of algebra, baire, integral, stone.
        #[arg(long, default_value = "algebra,baire,integral,stone")]
        checks: String,
        /// Write failure witnesses here.
        #[arg(long, value_name = "FILE")]
        emit: Option<PathBuf>,
    },
    /// Fat Cantor stage: measure, coverage gap and the left/right split mass.
    Cantor {
        #[arg(long, value_name = "INT")]
        depth: usize,
        /// `quarter` or a comma-separated list of removal ratios.
        #[arg(long, default_value = "quarter")]
        ratios: String,
        /// Per-stage CSV rows for plotting.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Dense open subset of [0,1] with mass below one for an atomless cdf.
    Nocredence {
        #[arg(long, value_name = "FILE")]
        cdf: String,
        #[arg(long, value_name = "INT")]
        depth: usize,
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Run the invariant suite.
    Selftest {
        /// Smaller case counts.
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_name = "FILE")]
        emit: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct IntegrandArgs {
    #[arg(long, value_name = "FILE")]
    pub credence: String,
    #[arg(long = "fn", value_name = "FILE")]
    pub function: String,
    /// Domain of integration; defaults to the whole ambient.
    #[arg(long, value_name = "FILE")]
    pub set: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgebraOp {
    Join,
    Meet,
    Neg,
    Boundary,
    Extend,
    Restrict,
    Regularize,
    Subset,
    Disjoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TraceFormat {
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum LiminalAction {
    /// Borel part and boundary shares.
    Decompose {
        #[arg(long, value_name = "FILE")]
        credence: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok(commands::Status::Ok) => ExitCode::SUCCESS,
        Ok(commands::Status::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
