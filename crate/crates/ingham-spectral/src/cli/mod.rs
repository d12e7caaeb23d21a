//! Command-line experiment runner.
//!
//! Every pipeline writes `<out>/<pipeline>/<name>.csv` files, each opened by
//! a version-stamped comment line, and a `report.txt`. Exit codes: 2 for
//! configuration and parse errors, 3 for numerical module errors, 4 for I/O.

mod pipelines;

use std::ffi::OsString;
use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::error::Error;

pub const VERSION_STAMP: &str = concat!("ingham-spectral ", env!("CARGO_PKG_VERSION"));

/// Worker count for independent workloads; defaults to the available cores.
pub const THREADS_ENV: &str = "INGHAM_SPECTRAL_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pipeline {
    Roundtrip,
    Plancherel,
    Eigencheck,
    Project,
    SphericalMean,
    InghamConstruct,
    PwTransfer,
    Carleman,
    AuditThm11,
    AuditThm13,
    SharpnessWitness,
}

impl Pipeline {
    pub const ALL: [Pipeline; 11] = [
        Pipeline::Roundtrip,
        Pipeline::Plancherel,
        Pipeline::Eigencheck,
        Pipeline::Project,
        Pipeline::SphericalMean,
        Pipeline::InghamConstruct,
        Pipeline::PwTransfer,
        Pipeline::Carleman,
        Pipeline::AuditThm11,
        Pipeline::AuditThm13,
        Pipeline::SharpnessWitness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Roundtrip => "roundtrip",
            Pipeline::Plancherel => "plancherel",
            Pipeline::Eigencheck => "eigencheck",
            Pipeline::Project => "project",
            Pipeline::SphericalMean => "spherical-mean",
            Pipeline::InghamConstruct => "ingham-construct",
            Pipeline::PwTransfer => "pw-transfer",
            Pipeline::Carleman => "carleman",
            Pipeline::AuditThm11 => "audit-thm11",
            Pipeline::AuditThm13 => "audit-thm13",
            Pipeline::SharpnessWitness => "sharpness-witness",
        }
    }

    fn about(self) -> &'static str {
        match self {
            Pipeline::Roundtrip => "forward and inverse transform of a profile, with the round-trip error",
            Pipeline::Plancherel => "both sides of the Plancherel identity (Hankel, Jacobi or Dunkl components)",
            Pipeline::Eigencheck => "finite-difference eigen-residuals of the transform kernels",
            Pipeline::Project => "generalized spectral projections P_lambda f",
            Pipeline::SphericalMean => "spherical mean profile F_x(r) and its spectral data",
            Pipeline::InghamConstruct => "box product for a convergent theta with its envelope trace",
            Pipeline::PwTransfer => "inverse Hankel transfer of the box product and its support",
            Pipeline::Carleman => "Carleman sums under an imposed envelope and the moment cross-check",
            Pipeline::AuditThm11 => "uncertainty audit on a rank-one symmetric space",
            Pipeline::AuditThm13 => "uncertainty audit for the Dunkl Laplacian",
            Pipeline::SharpnessWitness => "compactly supported witness meeting a convergent envelope",
        }
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pipeline {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Pipeline::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown pipeline '{s}'; run `list` for the available ones")))
    }
}

/// Text printed by `list`.
pub fn list_pipelines() -> String {
    Pipeline::ALL.iter().map(|p| format!("{:<18} {}\n", p.name(), p.about())).collect()
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Module(Error),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Module(Error::Parse { .. }) => 2,
            CliError::Module(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Module(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Module(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Experiment parameters. Flags override the config file, which overrides
/// each pipeline's defaults. Config keys are the flag names.
#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Params {
    /// Transform pair: hankel, jacobi or dunkl.
    #[arg(long)]
    pub pair: Option<String>,
    /// Hankel order, or Jacobi alpha.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Jacobi beta.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Root multiplicity m_gamma of a rank-one space.
    #[arg(long)]
    pub m_gamma: Option<u32>,
    /// Root multiplicity m_2gamma of a rank-one space.
    #[arg(long = "m-2gamma")]
    #[serde(rename = "m-2gamma")]
    pub m_2gamma: Option<u32>,
    /// Dunkl dimension n.
    #[arg(long)]
    pub n: Option<usize>,
    /// Dunkl root configuration, Z2^d.
    #[arg(long)]
    pub roots: Option<String>,
    /// Dunkl multiplicities, comma separated (one value is broadcast).
    #[arg(long, value_delimiter = ',')]
    pub kappa: Option<Vec<f64>>,
    /// Built-in theta: inv-sqrt, inv-log, log-log or zero.
    #[arg(long)]
    pub theta: Option<String>,
    /// CSV table of t,theta rows, used instead of --theta.
    #[arg(long)]
    pub theta_table: Option<PathBuf>,
    /// Multiplies theta.
    #[arg(long)]
    pub theta_scale: Option<f64>,
    /// Input profile: bump or gaussian.
    #[arg(long)]
    pub profile: Option<String>,
    /// CSV of r,value rows, used instead of --profile.
    #[arg(long)]
    pub profile_csv: Option<PathBuf>,
    /// Radius l of the ball where the input vanishes.
    #[arg(long)]
    pub vanish_radius: Option<f64>,
    /// Spectral parameters, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,
    /// Evaluation points: distances x_r, or Dunkl coordinates in groups of n.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Option<Vec<f64>>,
    /// Upper end of the spectral window.
    #[arg(long)]
    pub lambda_max: Option<f64>,
    /// Gauss panels on the spectral window.
    #[arg(long)]
    pub panels: Option<usize>,
    /// Upper end of the radial output grid.
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Highest Laplacian power in Carleman sums.
    #[arg(long)]
    pub m_max: Option<u32>,
    /// Shift in (lambda^2 + shift^2).
    #[arg(long)]
    pub shift: Option<f64>,
    /// Number of boxes in the Ingham construction.
    #[arg(long)]
    pub n_boxes: Option<usize>,
    /// Support budget for the box product.
    #[arg(long)]
    pub support_budget: Option<f64>,
    /// Envelope checked on xi = 1..xi_max.
    #[arg(long)]
    pub xi_max: Option<f64>,
}

macro_rules! overlay {
    ($hi:expr, $lo:expr; $($f:ident),*) => {
        Params { $($f: $hi.$f.or($lo.$f)),* }
    };
}

impl Params {
    /// Fields of `self` where set, else those of `base`.
    pub fn over(self, base: Params) -> Params {
        overlay!(self, base; pair, alpha, beta, m_gamma, m_2gamma, n, roots, kappa, theta, theta_table,
            theta_scale, profile, profile_csv, vanish_radius, lambdas, x, lambda_max, panels, r_max, m_max,
            shift, n_boxes, support_budget, xi_max)
    }

    fn check_paths(&self) -> CliResult<()> {
        for p in [&self.theta_table, &self.profile_csv].into_iter().flatten() {
            if !p.exists() {
                return Err(CliError::Config(format!("{} does not exist", p.display())));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Parser)]
#[command(name = "ingham-spectral", version, about = "Spectral transform experiments with CSV reports")]
pub struct Cli {
    /// Output root; files go to <out>/<pipeline>/.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML config: `pipeline`, `out`, and parameter keys, optionally under
    /// section headers.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the available pipelines.
    List,
    /// Run a pipeline named here or by the config file.
    Run {
        pipeline: Option<String>,
        #[command(flatten)]
        params: Params,
    },
    /// Forward and inverse transform of a profile.
    Roundtrip(Params),
    /// Both sides of the Plancherel identity.
    Plancherel(Params),
    /// Eigen-residuals of the transform kernels.
    Eigencheck(Params),
    /// Generalized spectral projections.
    Project(Params),
    /// Spherical mean profile F_x(r).
    SphericalMean(Params),
    /// Ingham box product and envelope trace.
    InghamConstruct(Params),
    /// Paley-Wiener transfer to a Hankel order.
    PwTransfer(Params),
    /// Carleman sums and moment cross-check.
    Carleman(Params),
    /// Rank-one symmetric space audit.
    AuditThm11(Params),
    /// Dunkl audit.
    AuditThm13(Params),
    /// Sharpness witness on the convergent side.
    SharpnessWitness(Params),
}

struct FileConfig {
    pipeline: Option<String>,
    out: Option<PathBuf>,
    params: Params,
}

fn insert_key(flat: &mut toml::Table, key: String, value: toml::Value) -> CliResult<()> {
    if flat.contains_key(&key) {
        return Err(CliError::Config(format!("key '{key}' is set twice")));
    }
    flat.insert(key, value);
    Ok(())
}

fn load_config(path: &Path) -> CliResult<FileConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let table: toml::Table = text.parse().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut pipeline = None;
    let mut out = None;
    let mut flat = toml::Table::new();
    for (key, value) in table {
        match (key.as_str(), value) {
            ("pipeline", toml::Value::String(s)) => pipeline = Some(s),
            ("out", toml::Value::String(s)) => out = Some(PathBuf::from(s)),
            (_, toml::Value::Table(section)) => {
                for (k, v) in section {
                    insert_key(&mut flat, k, v)?;
                }
            }
            (_, value) => insert_key(&mut flat, key, value)?,
        }
    }
    let params =
        toml::Value::Table(flat).try_into().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(FileConfig { pipeline, out, params })
}

/// Number of workers from [`THREADS_ENV`].
pub fn threads() -> CliResult<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(CliError::Config(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Order-preserving map over independent items on scoped threads.
pub(crate) fn par_map<T: Sync, R: Send>(workers: usize, items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    if workers <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(workers);
    std::thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Artifact sink for one pipeline run.
pub struct Output {
    dir: PathBuf,
    pipeline: Pipeline,
    written: Vec<PathBuf>,
}

impl Output {
    fn create(root: &Path, pipeline: Pipeline) -> CliResult<Self> {
        let dir = root.join(pipeline.name());
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, pipeline, written: Vec::new() })
    }

    /// `<dir>/<name>.csv` behind a version comment.
    pub fn csv(&mut self, name: &str, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> CliResult<()> {
        let path = self.dir.join(format!("{name}.csv"));
        let mut w = BufWriter::new(File::create(&path)?);
        writeln!(w, "# {VERSION_STAMP} {}", self.pipeline)?;
        body(&mut w)?;
        w.flush()?;
        self.written.push(path);
        Ok(())
    }

    fn report(&mut self, text: &str) -> CliResult<PathBuf> {
        let path = self.dir.join("report.txt");
        fs::write(&path, format!("{VERSION_STAMP}\npipeline: {}\n{text}", self.pipeline))?;
        self.written.push(path.clone());
        Ok(path)
    }
}

/// Runs one pipeline and returns its report text.
pub fn run_pipeline(pipeline: Pipeline, params: &Params, out_root: &Path) -> CliResult<String> {
    params.check_paths()?;
    let workers = threads()?;
    let mut out = Output::create(out_root, pipeline)?;
    let text = pipelines::run(pipeline, params, workers, &mut out)?;
    out.report(&text)?;
    Ok(text)
}

fn dispatch(cli: Cli) -> CliResult<String> {
    let file = cli.config.as_deref().map(load_config).transpose()?;
    let (named, params) = match cli.command {
        Command::List => return Ok(list_pipelines()),
        Command::Run { pipeline, params } => {
            let name = pipeline
                .or_else(|| file.as_ref().and_then(|f| f.pipeline.clone()))
                .ok_or_else(|| CliError::Config("no pipeline given on the command line or in the config".into()))?;
            (name.parse::<Pipeline>()?, params)
        }
        Command::Roundtrip(p) => (Pipeline::Roundtrip, p),
        Command::Plancherel(p) => (Pipeline::Plancherel, p),
        Command::Eigencheck(p) => (Pipeline::Eigencheck, p),
        Command::Project(p) => (Pipeline::Project, p),
        Command::SphericalMean(p) => (Pipeline::SphericalMean, p),
        Command::InghamConstruct(p) => (Pipeline::InghamConstruct, p),
        Command::PwTransfer(p) => (Pipeline::PwTransfer, p),
        Command::Carleman(p) => (Pipeline::Carleman, p),
        Command::AuditThm11(p) => (Pipeline::AuditThm11, p),
        Command::AuditThm13(p) => (Pipeline::AuditThm13, p),
        Command::SharpnessWitness(p) => (Pipeline::SharpnessWitness, p),
    };
    let (file_out, file_params) = match file {
        Some(f) => (f.out, f.params),
        None => (None, Params::default()),
    };
    let out_root = cli.out.or(file_out).unwrap_or_else(|| PathBuf::from("out"));
    run_pipeline(named, &params.over(file_params), &out_root)
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
