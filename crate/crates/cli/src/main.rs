//! `szeta`: command-line front end for the zeta-function library.

// NaN must fail these checks, so `!(x > 0.0)` is intended
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use szeta::Mode;

use crate::config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] szeta::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn name(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "UsageError",
            CliError::Domain(e) => e.kind(),
            CliError::Io(_) => "IoError",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "szeta", version, about = "Zeta functions, zeros and dimension of Schottky reflection groups")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Arc angle of each circle in degrees (symmetric configuration).
    #[arg(long, global = true)]
    theta: Option<f64>,
    /// Number of circles in the symmetric configuration [default: 3].
    #[arg(long, global = true)]
    num_circles: Option<usize>,
    /// Truncation order of the cycle expansion [default: 13].
    #[arg(long = "M", global = true)]
    order: Option<usize>,
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// TOML file with [group], [zeta], [tolerances] and [io] sections; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for cached orbit tables.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, env = "SZETA_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true, alias = "tol")]
    newton_tol: Option<f64>,
    #[arg(long, global = true)]
    quad_tol: Option<f64>,
    #[arg(long, global = true)]
    power_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Conformal,
    Selberg,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum Method {
    #[default]
    Newton,
    Bowen,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hausdorff dimension of the limit set; writes a JSON report.
    Dim {
        #[arg(long, value_enum, default_value_t)]
        method: Method,
        /// Collocation degree for --method bowen; raised until stable when absent.
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Z and Z' at one point or on a grid.
    Eval {
        #[arg(long, allow_negative_numbers = true, required_unless_present = "grid", requires = "im")]
        re: Option<f64>,
        #[arg(long, allow_negative_numbers = true, requires = "re")]
        im: Option<f64>,
        /// x0,x1,nx,y0,y1,ny
        #[arg(long, allow_hyphen_values = true, conflicts_with = "re")]
        grid: Option<String>,
    },
    /// Zero count inside a rectangle.
    Zeros {
        /// x0,x1,y0,y1
        #[arg(long, allow_hyphen_values = true)]
        rect: String,
    },
    /// Boxes below a given diameter containing the zeros in a rectangle.
    Locate {
        #[arg(long, allow_hyphen_values = true)]
        rect: String,
        #[arg(long, default_value_t = 0.05)]
        resolution: f64,
    },
    /// Cumulative zero counts in the strips [x0, 10] up to height ymax.
    GridZeros {
        /// Comma-separated left edges.
        #[arg(long, allow_hyphen_values = true, default_value = "-0.2,-0.1,0,0.1")]
        x0: String,
        #[arg(long, default_value_t = 200.0)]
        ymax: f64,
        #[arg(long, default_value_t = 12)]
        samples: usize,
    },
    /// |Z| and log log |Z| / log |s| at random points of a rectangle.
    GridLogz {
        #[arg(long, allow_hyphen_values = true)]
        rect: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Rotation classes of periodic words with their multipliers.
    Orbits,
    /// Error metric between two truncations along a vertical line.
    Err {
        #[arg(long, default_value_t = 12)]
        m1: usize,
        #[arg(long, default_value_t = 13)]
        m2: usize,
        /// Real part of the line.
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.1)]
        line: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        ymin: f64,
        #[arg(long, default_value_t = 100.0)]
        ymax: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Singular values of the collocated transfer operator at s.
    SvdProfile {
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        re: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        im: f64,
        #[arg(long, default_value_t = szeta::transfer::DEFAULT_DEGREE)]
        degree: usize,
    },
}

fn resolve_config(args: &GlobalArgs) -> Result<RunConfig, CliError> {
    let mut config = match &args.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(theta) = args.theta {
        config.group = config::GroupSpec { angle_degrees: Some(theta), num_circles: args.num_circles, circles: None };
    } else if let Some(n) = args.num_circles {
        config.group.num_circles = Some(n);
    }
    if let Some(order) = args.order {
        config.zeta.order = order;
    }
    if let Some(mode) = args.mode {
        config.zeta.mode = match mode {
            ModeArg::Conformal => Mode::Conformal,
            ModeArg::Selberg => Mode::Selberg,
        };
    }
    let t = &mut config.tolerances;
    t.newton_tol = args.newton_tol.unwrap_or(t.newton_tol);
    t.quad_tol = args.quad_tol.unwrap_or(t.quad_tol);
    t.power_tol = args.power_tol.unwrap_or(t.power_tol);
    if args.cache.is_some() {
        config.io.cache = args.cache.clone();
    }
    if args.output.is_some() {
        config.io.output = args.output.clone();
    }
    if args.threads.is_some() {
        config.io.threads = args.threads;
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli, echo: String) -> Result<(), CliError> {
    let config = resolve_config(&cli.global)?;
    if let Some(threads) = config.io.threads {
        // fails only if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    commands::execute(&cli.command, config, echo)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let echo = std::iter::once("szeta").chain(argv.iter().skip(1).map(String::as_str)).collect::<Vec<_>>().join(" ");
    match run(cli, echo) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let body = serde_json::json!({ "error": e.name(), "message": e.to_string() });
            eprintln!("{body}");
            ExitCode::from(e.exit_code())
        }
    }
}
