//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use x1jacobi::laws::DEFAULT_LAW;

#[derive(Debug, Parser)]
#[command(
    name = "x1jacobi",
    version,
    about = "Construct and verify X1-Jacobi exceptional orthogonal polynomials",
    long_about = "Construct X1-Jacobi exceptional orthogonal polynomials from their \
                  second-order differential equation and check orthogonality, endpoint \
                  classification, boundary conditions and the eigenvalue sequence.\n\n\
                  Exit codes: 0 success, 1 a check or computation failed, 2 input error.\n\
                  The default decimal precision is read from X1JACOBI_PRECISION.",
    propagate_version = true
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,

    #[command(subcommand)]
    pub command: Command,
}

/// Options accepted by every subcommand.
#[derive(Debug, Args, Default)]
pub struct Common {
    /// Parameter alpha: integer, decimal or p/q
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<String>,

    /// Parameter beta: integer, decimal or p/q
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta: Option<String>,

    /// Relative tolerance of adaptive quadrature, in (0, 1)
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,

    /// Decimal digits of extended precision arithmetic and output (>= 30)
    #[arg(long, global = true)]
    pub precision: Option<usize>,

    /// Emit JSON
    #[arg(long, global = true, conflicts_with_all = ["csv", "tsv"])]
    pub json: bool,

    /// Emit comma separated values
    #[arg(long, global = true, conflicts_with = "tsv")]
    pub csv: bool,

    /// Emit tab separated values
    #[arg(long, global = true)]
    pub tsv: bool,

    /// Flat key=value file whose entries override command-line flags
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Directory for data files (created if missing)
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derived parameters a, b, c and the case tag
    Params,

    /// Coefficients p, q, w of the divergence form at given points
    Coeffs {
        /// Comma separated points in (-1, 1)
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        at: Vec<String>,
    },

    /// Eigenvalues and eigenpolynomials for n = 0..=n_max
    Eigen {
        #[arg(long, default_value_t = 4)]
        n_max: u32,

        /// monic, or unit weighted norm
        #[arg(long, default_value = "monic", value_parser = ["monic", "unit"])]
        normalize: String,

        /// Eigenvalue law: note or shifted
        #[arg(long, default_value = DEFAULT_LAW)]
        law: String,
    },

    /// Normalized Gram matrix of the eigenpolynomials
    Gram {
        #[arg(long, default_value_t = 10)]
        n_max: u32,

        #[arg(long, default_value = DEFAULT_LAW)]
        law: String,
    },

    /// Residual of projecting 1 onto span{P_0..P_N}, N = 0..=n_max, as plot data
    Density {
        #[arg(long, default_value_t = 20)]
        n_max: u32,

        #[arg(long, default_value = DEFAULT_LAW)]
        law: String,
    },

    /// Limit-circle / limit-point classification of both endpoints
    Classify {
        /// Add slab-integral fits of the tail and regularity exponents
        #[arg(long)]
        numeric: bool,
    },

    /// Decay of [P_n, phi1] at both endpoints, as plot data with fitted exponents
    Boundary {
        #[arg(long)]
        n: u32,

        #[arg(long, default_value = DEFAULT_LAW)]
        law: String,
    },

    /// Lowest k eigenvalues from a spectrum solver, compared with the law
    Spectrum {
        #[arg(long, default_value_t = 5)]
        k: usize,

        /// Collocation nodes (default max(200, 4k + 20))
        #[arg(long)]
        nodes: Option<usize>,

        #[arg(long, default_value = DEFAULT_LAW)]
        law: String,

        /// Spectrum solver: collocation or pencil
        #[arg(long, default_value = "collocation")]
        solver: String,
    },

    /// Run every check and write a JSON report plus data files
    Report {
        #[arg(long, default_value_t = 8)]
        n_max: u32,

        #[arg(long, default_value = DEFAULT_LAW)]
        law: String,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Params => "params",
            Command::Coeffs { .. } => "coeffs",
            Command::Eigen { .. } => "eigen",
            Command::Gram { .. } => "gram",
            Command::Density { .. } => "density",
            Command::Classify { .. } => "classify",
            Command::Boundary { .. } => "boundary",
            Command::Spectrum { .. } => "spectrum",
            Command::Report { .. } => "report",
        }
    }
}
