//! `ringlab` command-line front end.
//!
//! Exit status 0 on success, 2 on usage and precondition errors, 3 when a
//! numerical method fails. Each run prints one `status=... key=value` line.

pub mod cache;
mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use ringlab_core::cfrac::CfError;
use ringlab_core::circle::CircleError;
use ringlab_core::herman::HermanError;
use ringlab_core::maps::MapError;
use ringlab_core::numkit::NumError;
use ringlab_core::render::RenderError;
use ringlab_core::siegel::SiegelError;

pub use cache::Cache;
pub use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Precondition(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Precondition(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Precondition(_) => "precondition",
            CliError::Numeric(_) => "numeric",
        }
    }
}

fn pre(e: impl ToString) -> CliError {
    CliError::Precondition(e.to_string())
}

fn num(e: impl ToString) -> CliError {
    CliError::Numeric(e.to_string())
}

impl From<NumError> for CliError {
    fn from(e: NumError) -> Self {
        match e {
            NumError::NoConvergence { .. } => num(e),
            _ => pre(e),
        }
    }
}

impl From<CfError> for CliError {
    fn from(e: CfError) -> Self {
        match e {
            CfError::PrecisionExhausted { .. } => num(e),
            CfError::Numeric(n) => n.into(),
            _ => pre(e),
        }
    }
}

impl From<MapError> for CliError {
    fn from(e: MapError) -> Self {
        match e {
            MapError::Roots(n) => n.into(),
            _ => pre(e),
        }
    }
}

impl From<SiegelError> for CliError {
    fn from(e: SiegelError) -> Self {
        match e {
            SiegelError::SmallDivisor { .. }
            | SiegelError::Truncation { .. }
            | SiegelError::NotStarlike { .. }
            | SiegelError::Corrupt(_) => num(e),
            SiegelError::Cf(c) => c.into(),
            SiegelError::Num(n) => n.into(),
            _ => pre(e),
        }
    }
}

impl From<CircleError> for CliError {
    fn from(e: CircleError) -> Self {
        match e {
            CircleError::LiftJump { .. } | CircleError::NonMonotone { .. } => num(e),
            _ => pre(e),
        }
    }
}

impl From<HermanError> for CliError {
    fn from(e: HermanError) -> Self {
        match e {
            HermanError::InvalidArgument(_) => pre(e),
            HermanError::Map(m) => m.into(),
            HermanError::Circle(c) => c.into(),
            HermanError::Cf(c) => c.into(),
            HermanError::Siegel(s) => s.into(),
            _ => num(e),
        }
    }
}

impl From<RenderError> for CliError {
    fn from(e: RenderError) -> Self {
        match e {
            RenderError::Map(m) => m.into(),
            RenderError::Siegel(s) => s.into(),
            _ => pre(e),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ringlab", version, about = "Siegel disks, Herman rings and rotation numbers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Continued-fraction digits of a decimal number or an expansion.
    Cf(Flags),
    /// Brjuno partial sum and type report.
    Brjuno(Flags),
    /// Conformal radius of the Siegel disk of `lambda z + z^2`.
    SiegelRadius(Flags),
    /// Rotation number of a circle-preserving map.
    Rotnum(Flags),
    /// Blaschke parameter `t` with a prescribed rotation number.
    SolveT(Flags),
    /// Dynamical-plane raster as a P6 pixmap.
    RenderJulia(Flags),
    /// Parameter-plane raster of the cubic family over `u`.
    RenderParam(Flags),
    /// Ring seed and winding rotation number of the cubic family.
    HermanRot(Flags),
    /// Invariant curve of a Herman ring by Fourier-Newton.
    HermanCurve(Flags),
    /// Conformal radii along the ABC perturbation sequence.
    AbcTable(Flags),
    /// Pixel-counted area at two resolutions.
    Area(Flags),
    /// Periodic cycles up to a period.
    Cycles(Flags),
}

/// Flags mirror the config keys and override the config file.
#[derive(Debug, Args, Default)]
struct Flags {
    /// Flat `key = value` file read before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the effective configuration instead of running; no summary line follows.
    #[arg(long)]
    print_config: bool,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    circle_family: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long)]
    terms: Option<usize>,
    #[arg(long)]
    bits: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    u: Option<String>,
    #[arg(long)]
    circle_a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    #[arg(long)]
    degree: Option<u32>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    estimator: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    center: Option<String>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    height: Option<f64>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    max_iter: Option<u32>,
    #[arg(long)]
    escape_out: Option<f64>,
    #[arg(long)]
    capture_in: Option<f64>,
    #[arg(long)]
    rho_frac: Option<f64>,
    #[arg(long)]
    ratio: Option<String>,
    #[arg(long)]
    tail: Option<u64>,
    #[arg(long)]
    ns: Option<String>,
    #[arg(long)]
    period: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    window_min: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    window_max: Option<String>,
    #[arg(long)]
    seed_budget: Option<usize>,
    #[arg(long)]
    filter: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    cache_dir: Option<String>,
}

macro_rules! overlay {
    ($cfg:ident, $flags:ident, $($k:ident),*) => {
        $(if let Some(v) = $flags.$k.clone() { $cfg.$k = v; })*
    };
}

impl Flags {
    fn apply(&self, cfg: &mut RunConfig) {
        overlay!(
            cfg, self, family, circle_family, alpha, x, terms, bits, a, u, circle_a, t, q, degree, iters, estimator, tol,
            modes, center, width, height, nx, ny, max_iter, escape_out, capture_in, rho_frac, ratio, tail, ns, period,
            window_min, window_max, seed_budget, filter, out, cache_dir
        );
    }
}

impl Command {
    fn split(self) -> (&'static str, Flags) {
        match self {
            Command::Cf(f) => ("cf", f),
            Command::Brjuno(f) => ("brjuno", f),
            Command::SiegelRadius(f) => ("siegel-radius", f),
            Command::Rotnum(f) => ("rotnum", f),
            Command::SolveT(f) => ("solve-t", f),
            Command::RenderJulia(f) => ("render-julia", f),
            Command::RenderParam(f) => ("render-param", f),
            Command::HermanRot(f) => ("herman-rot", f),
            Command::HermanCurve(f) => ("herman-curve", f),
            Command::AbcTable(f) => ("abc-table", f),
            Command::Area(f) => ("area", f),
            Command::Cycles(f) => ("cycles", f),
        }
    }
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    /// The summary line, without a trailing newline.
    pub summary: String,
}

fn summary_line(status: &str, fields: &[(String, String)]) -> String {
    let mut s = format!("status={status}");
    for (k, v) in fields {
        s.push(' ');
        s.push_str(k);
        s.push('=');
        s.push_str(v);
    }
    s
}

/// Effective configuration: defaults, then the config file, then flags.
fn configure(command: &str, flags: &Flags) -> Result<RunConfig, CliError> {
    let mut cfg = match &flags.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    flags.apply(&mut cfg);
    cfg.command = command.to_string();
    Ok(cfg)
}

/// Parses `argv` (program name first), runs the command and prints its summary.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return Outcome { code, summary: String::new() };
        }
    };
    let (command, flags) = cli.command.split();
    if flags.print_config {
        // the echo alone, so it can be fed back as a config file
        return match configure(command, &flags) {
            Ok(cfg) => {
                let _ = write!(std::io::stdout(), "{}", cfg.canonical());
                Outcome { code: 0, summary: String::new() }
            }
            Err(e) => {
                eprintln!("ringlab {command}: {e}");
                Outcome { code: e.exit_code(), summary: String::new() }
            }
        };
    }
    let result = configure(command, &flags).and_then(|cfg| {
        let cache = Cache::resolve(&cfg.cache_dir);
        commands::dispatch(&cfg, &cache)
    });
    let outcome = match result {
        Ok(fields) => Outcome { code: 0, summary: summary_line("ok", &fields) },
        Err(e) => {
            eprintln!("ringlab {command}: {e}");
            let fields = vec![("command".to_string(), command.to_string()), ("kind".to_string(), e.kind().to_string())];
            Outcome { code: e.exit_code(), summary: summary_line("error", &fields) }
        }
    };
    let _ = writeln!(std::io::stdout(), "{}", outcome.summary);
    outcome
}
