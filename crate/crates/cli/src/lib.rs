//! `decoynet` command line: equilibrium reports, simulated sessions, log
//! analysis, table reproduction and the live session server.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use decoynet::config::{ConfigError, RunConfig};
use decoynet::equilibrium::{RiskNeutral, Solver, UtilitySpec};
use decoynet::session::{batch, read_csv, read_json, write_csv, write_json, SessionError};
use decoynet::stats::{analyze, reproduce_tables_with, Method, StatsError, TablesReport};
use decoynet::{ExactEcu, Game, Treatment};
use thiserror::Error;

pub const OUT_DIR_ENV: &str = "DECOYNET_OUT_DIR";

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_RUN: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "decoynet", version, about = "Network security game with a decoy option")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pure equilibria, dominated actions and the social optimum of one treatment.
    Solve {
        #[arg(long, default_value = "bas-net")]
        treatment: Treatment,
        /// risk_neutral, crra:<rho> or cara:<alpha>
        #[arg(long, default_value = "risk_neutral")]
        utility: UtilitySpec,
        /// Exact rational arithmetic (risk neutral only).
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Play a session with simulated agents and write its choice log.
    Simulate {
        /// TOML run config; every field is optional.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Counts, treatment comparisons and consistency warnings for a choice log.
    Analyze {
        log: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute the published percentage and comparison tables.
    Tables {
        /// Directory for table CSVs and report.txt; prints the report when absent.
        #[arg(long, env = OUT_DIR_ENV)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "pooled_t")]
        method: Method,
    },
    /// Run the live session server.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Event logs are kept and replayed from here.
        #[arg(long)]
        data_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Service(#[from] decoynet_service::ServiceError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io { .. } => EXIT_IO,
            CliError::Session(SessionError::Io(_)) => EXIT_IO,
            CliError::Session(SessionError::Csv(_) | SessionError::Json(_) | SessionError::Format(_)) => EXIT_CONFIG,
            CliError::Session(_) | CliError::Stats(_) | CliError::Service(_) => EXIT_RUN,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes to `path`, or stdout when there is none.
fn with_output(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<(), CliError>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(io_err(dir))?;
            }
            let mut w = BufWriter::new(File::create(p).map_err(io_err(p))?);
            f(&mut w)?;
            w.flush().map_err(io_err(p))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w)?;
            w.flush().map_err(io_err(Path::new("<stdout>")))
        }
    }
}

fn write_json_value<T: serde::Serialize>(w: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *w, value).map_err(SessionError::from)?;
    writeln!(w).map_err(io_err(Path::new("<output>")))
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("decoynet: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Solve {
            treatment,
            utility,
            exact,
            out,
        } => solve(treatment, utility, exact, out.as_deref()),
        Command::Simulate {
            config,
            seed,
            out,
            format,
        } => simulate(config.as_deref(), seed, out, format),
        Command::Analyze { log, out } => analyze_log(&log, out.as_deref()),
        Command::Tables { out, method } => tables(out.as_deref(), method),
        Command::Serve { addr, data_dir } => serve(addr, data_dir),
    }
}

fn solve(treatment: Treatment, utility: UtilitySpec, exact: bool, out: Option<&Path>) -> Result<(), CliError> {
    let game = Game::standard(treatment);
    let label = utility.to_string();
    with_output(out, |w| {
        if exact {
            if utility != UtilitySpec::RiskNeutral {
                return Err(CliError::Usage("--exact needs --utility risk_neutral".into()));
            }
            write_json_value(w, &Solver::<ExactEcu>::new(&game, &RiskNeutral).report(label))
        } else {
            write_json_value(w, &Solver::<f64>::new(&game, &utility).report(label))
        }
    })
}

fn simulate(config: Option<&Path>, seed: Option<u64>, out: Option<PathBuf>, format: Format) -> Result<(), CliError> {
    let mut cfg = match config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let session = cfg.session_config()?;
    let result = batch(&[session], cfg.replications, &cfg.seed_schedule)?;
    let out = out.or_else(|| {
        std::env::var_os(OUT_DIR_ENV)
            .map(|d| PathBuf::from(d).join(format!("{}.{}", cfg.session_id, format.extension())))
    });
    with_output(out.as_deref(), |w| {
        match format {
            Format::Csv => write_csv(&result.records, w)?,
            Format::Json => {
                write_json(&result.records, &mut *w)?;
                writeln!(w).map_err(io_err(Path::new("<output>")))?;
            }
        }
        Ok(())
    })
}

fn analyze_log(log: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let file = BufReader::new(File::open(log).map_err(io_err(log))?);
    let records = if log.extension().is_some_and(|e| e == "json") {
        read_json(file)?
    } else {
        read_csv(file)?
    };
    let analysis = analyze(&records)?;
    for w in &analysis.warnings {
        eprintln!("warning: {w}");
    }
    with_output(out, |w| write_json_value(w, &analysis))
}

fn tables(out: Option<&Path>, method: Method) -> Result<(), CliError> {
    let report = reproduce_tables_with(method)?;
    let Some(dir) = out else {
        return with_output(None, |w| {
            w.write_all(report.to_text().as_bytes())
                .map_err(io_err(Path::new("<stdout>")))
        });
    };
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    for name in TablesReport::table_names() {
        let path = dir.join(format!("table{name}.csv"));
        std::fs::write(&path, report.table_csv(name)?).map_err(io_err(&path))?;
    }
    let path = dir.join("report.txt");
    std::fs::write(&path, report.to_text()).map_err(io_err(&path))
}

fn serve(addr: SocketAddr, data_dir: Option<PathBuf>) -> Result<(), CliError> {
    let _ = tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .try_init();
    let rt = tokio::runtime::Runtime::new().map_err(io_err(Path::new("<runtime>")))?;
    rt.block_on(decoynet_service::http::serve(addr, data_dir.as_deref()))?;
    Ok(())
}
