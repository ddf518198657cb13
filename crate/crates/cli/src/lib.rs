//! Command-line front end for `fliess-core`.
//!
//! `fliess-kit <verb> [files] [--flag value]...`; see `fliess-kit --help`.
//! Exit codes: 0 success, 1 domain error or failed check, 2 usage error.

pub mod acceptance;
mod commands;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::execute;

/// Scalar mode for series input and output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Rational,
    Float,
}

#[derive(Debug, Parser)]
#[command(
    name = "fliess-kit",
    version,
    about = "Truncated Chen-Fliess series toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Truncation length L.
    #[arg(long, global = true)]
    pub trunc: Option<usize>,
    /// Exact rational arithmetic.
    #[arg(long, global = true, conflicts_with = "float")]
    pub rational: bool,
    /// Double-precision arithmetic.
    #[arg(long, global = true)]
    pub float: bool,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the result here instead of stdout (a directory for `evolve`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker thread cap.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

impl Global {
    /// `--rational` / `--float`, else `default`.
    pub fn mode(&self, default: Mode) -> Mode {
        if self.rational {
            Mode::Rational
        } else if self.float {
            Mode::Float
        } else {
            default
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(7)
    }
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// c ⧢ d
    Shuffle { a: PathBuf, b: PathBuf },
    /// c ∘ d
    Compose { a: PathBuf, b: PathBuf },
    /// c ∘̃ d_δ
    MixedCompose { a: PathBuf, b: PathBuf },
    /// c ◁ d
    PreLie { a: PathBuf, b: PathBuf },
    /// c ◁ d − d ◁ c
    Bracket { a: PathBuf, b: PathBuf },
    /// Shuffle inverse of a non-proper series.
    ShuffleInv { a: PathBuf },
    /// Body of (δ + c)^{∘−1}.
    GroupInv { a: PathBuf },
    /// c @ d, SISO.
    Feedback { c: PathBuf, d: PathBuf },
    /// ℓ∞,M norm and the growth estimate (K, M).
    Norm {
        a: PathBuf,
        #[arg(long = "M", default_value = "1")]
        m: String,
    },
    /// F_c[u](t).
    FliessEval {
        c: PathBuf,
        u: PathBuf,
        /// Evaluation time; the end of the signal by default.
        #[arg(long)]
        t: Option<f64>,
    },
    /// |F_c[F_d[u]](t) − F_{c∘d}[u](t)|.
    CascadeCheck {
        c: PathBuf,
        d: PathBuf,
        u: PathBuf,
        #[arg(long)]
        t: Option<f64>,
    },
    /// Generating series of a polynomial realization.
    Realize {
        r: PathBuf,
        /// NAME=VALUE; unbound parameters stay symbolic.
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// γ̇_δ = γ_δ.c(t) on [0, 1]; files are the coefficients of c(t) in powers of t.
    Evolve {
        #[arg(required = true)]
        c: Vec<PathBuf>,
        #[arg(long, default_value_t = 256)]
        steps: usize,
        /// Comma-separated sample times, grid nodes in [0, 1].
        #[arg(long, default_value = "1")]
        times: String,
    },
    /// Volterra series γ(t) of γ̇ = γ ⧢ η(t); files are the coefficients of η(t).
    Volterra {
        #[arg(required = true)]
        eta: Vec<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 256)]
        steps: usize,
        /// Order cap for non-proper η.
        #[arg(long, default_value_t = 64)]
        cap: usize,
    },
    /// The b_k(K) table.
    BkTable {
        #[arg(long, default_value_t = 7)]
        kmax: usize,
    },
    /// Numerical verification of a norm bound.
    Verify {
        #[command(subcommand)]
        lemma: Lemma,
    },
    /// Runs a block of acceptance checks.
    Suite { name: String },
}

#[derive(Debug, Subcommand)]
pub enum Lemma {
    ShuffleBound(SampleArgs),
    CompositionBound(SampleArgs),
    ShufflePower {
        #[arg(long = "M", default_value = "1")]
        m: String,
        #[arg(long = "nsearch", default_value_t = 64)]
        n_search: usize,
        #[arg(long = "L", default_value_t = 8)]
        l: usize,
    },
    BkMajorant {
        #[arg(long, default_value_t = 7)]
        kmax: usize,
        /// K runs over i/grid, 0 ≤ i ≤ grid.
        #[arg(long, default_value_t = 10)]
        grid: usize,
    },
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long = "M", default_value = "1")]
    pub m: String,
    #[arg(long, default_value = "0.5")]
    pub eps: String,
    #[arg(long = "L", default_value_t = 5)]
    pub l: usize,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
}

/// Failure of a command.
#[derive(Debug)]
pub enum CliError {
    Domain(fliess_core::Error),
    Io(String, std::io::Error),
    Usage(String),
    /// A verification ran and reported a violation.
    Failed(String),
}

impl CliError {
    pub fn name(&self) -> &'static str {
        match self {
            CliError::Domain(e) => e.name(),
            CliError::Io(..) => "IoError",
            CliError::Usage(_) => "UsageError",
            CliError::Failed(_) => "CheckFailed",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::Io(path, e) => write!(f, "{path}: {e}"),
            CliError::Usage(m) | CliError::Failed(m) => write!(f, "{m}"),
        }
    }
}

impl From<fliess_core::Error> for CliError {
    fn from(e: fliess_core::Error) -> Self {
        CliError::Domain(e)
    }
}

/// Runs `argv` (program name first) against the given streams and returns
/// the exit code.
pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    if let Some(n) = cli.global.threads {
        // the global pool can only be configured once per process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    match execute(&cli) {
        Ok(text) => match &cli.global.out {
            Some(path) if !matches!(cli.verb, Verb::Evolve { .. }) => {
                match std::fs::write(path, &text) {
                    Ok(()) => 0,
                    Err(e) => {
                        let _ = writeln!(err, "IoError: {}: {e}", path.display());
                        1
                    }
                }
            }
            _ => {
                let _ = write!(out, "{text}");
                0
            }
        },
        Err((text, e)) => {
            let _ = write!(out, "{text}");
            let _ = writeln!(err, "{}: {e}", e.name());
            e.exit_code()
        }
    }
}

/// [`run_with`] on the process streams.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
