//! The `rsvp` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use rsvp_core::dashboard::DashboardDoc;
use rsvp_core::data_model::{DType, Dimension, IngestOptions, RunTable, Sidecar, DEFAULT_MAX_RUNS};
use rsvp_core::design_space::{EncodingState, VisOption};
use rsvp_core::fixture::{self, FixtureKind};
use rsvp_core::layout::{layout_smd, GridPos};
use rsvp_core::visrec::{recommend, FrameTarget, RecommendationSet, Task};
use serde::Serialize;

use crate::api::{self, table_summary};
use crate::error::ApiError;
use crate::session::{SessionStore, StoreConfig};

#[derive(Debug, Parser)]
#[command(
    name = "rsvp",
    version,
    about = "Parameter-space visualization recommender"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a run table and report the inferred types.
    Ingest {
        csv: PathBuf,
        /// JSON sidecar with roles and sampling.
        #[arg(long)]
        meta: Option<PathBuf>,
        #[arg(long, env = "RSVP_MAX_RUNS", default_value_t = DEFAULT_MAX_RUNS)]
        max_runs: usize,
    },
    /// Print the recommendation set for a task selection.
    Recommend(RecommendArgs),
    /// Print the small-multiple layout of one option.
    Layout(LayoutArgs),
    /// Check a saved dashboard; with `--data`, print its specs and payloads.
    ExportDashboard {
        doc: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value = "table")]
        data_ref: String,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, env = "RSVP_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, env = "RSVP_MAX_RUNS", default_value_t = DEFAULT_MAX_RUNS)]
        max_runs: usize,
        /// Minutes before an idle session is dropped.
        #[arg(long, default_value_t = 60)]
        idle_minutes: u64,
    },
    /// Write a reproducible test table as `<out>.csv` and `<out>.json`.
    Fixture {
        #[arg(long)]
        kind: FixtureKind,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Column count of the synthetic kind.
        #[arg(long, default_value_t = 20)]
        dims: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Run table; without it dimensions are typed from their names.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    meta: Option<PathBuf>,
    #[arg(long, env = "RSVP_MAX_RUNS", default_value_t = DEFAULT_MAX_RUNS)]
    max_runs: usize,
}

#[derive(Debug, Args)]
pub struct EncodingArgs {
    #[arg(long, value_delimiter = ',')]
    s1: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    s2: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    color: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    opacity: Vec<String>,
    /// Complex objects; without `--data` write `name:series` or `name:image`.
    #[arg(long, value_delimiter = ',')]
    object: Vec<String>,
}

impl EncodingArgs {
    fn state(&self) -> EncodingState {
        let bare = |v: &[String]| {
            v.iter()
                .map(|n| n.split(':').next().unwrap_or(n).to_string())
                .collect()
        };
        EncodingState {
            s1: self.s1.clone(),
            s2: self.s2.clone(),
            color: self.color.clone(),
            opacity: self.opacity.clone(),
            object: bare(&self.object),
        }
    }

    fn names(&self) -> Vec<&str> {
        let mut out: Vec<&str> = [&self.s1, &self.s2, &self.color, &self.opacity]
            .into_iter()
            .flatten()
            .map(String::as_str)
            .collect();
        out.extend(self.object.iter().map(String::as_str));
        out
    }
}

#[derive(Debug, Args)]
pub struct RecommendArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    tasks: Vec<Task>,
    #[command(flatten)]
    enc: EncodingArgs,
    #[command(flatten)]
    data: DataArgs,
    /// Print a readable summary instead of JSON.
    #[arg(long)]
    text: bool,
}

#[derive(Debug, Args)]
pub struct LayoutArgs {
    #[arg(long)]
    option: VisOption,
    #[command(flatten)]
    enc: EncodingArgs,
    /// Select the detail view at `row,col` (zero-based).
    #[arg(long, value_parser = parse_pos)]
    detail: Option<GridPos>,
}

fn parse_pos(s: &str) -> Result<GridPos, String> {
    let (row, col) = s.split_once(',').ok_or("expected `row,col`")?;
    let num = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("`{v}`: {e}"));
    Ok(GridPos {
        row: num(row)?,
        col: num(col)?,
    })
}

/// Failure of a CLI command, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("error[{}]: {}", .0.code, .0.message)]
    Validation(ApiError),
    #[error("error[Internal]: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

macro_rules! validation {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Validation(e.into())
            }
        }
    )*};
}

validation!(
    ApiError,
    rsvp_core::data_model::IngestError,
    rsvp_core::data_model::MetadataError,
    rsvp_core::layout::LayoutError,
    rsvp_core::visrec::VisRecError,
    rsvp_core::dashboard::DashboardError
);

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| {
        CliError::Validation(ApiError::new(
            "ReadFailed",
            format!("{}: {e}", path.display()),
        ))
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

fn load(csv: &Path, meta: Option<&Path>, max_runs: usize) -> Result<RunTable, CliError> {
    let sidecar = meta.map(read).transpose()?;
    Ok(api::ingest(
        &read(csv)?,
        sidecar.as_deref(),
        &IngestOptions { max_runs },
    )?)
}

/// Quantitative unless marked `:series` or `:image`; roles come from the sidecar.
fn schema_table(names: &[&str], sidecar: Option<&Sidecar>) -> Result<RunTable, CliError> {
    let mut dims: Vec<Dimension> = Vec::new();
    for raw in names {
        let (name, dtype) = match raw.split_once(':') {
            Some((n, "series")) => (n, DType::Series1D),
            Some((n, "image")) => (n, DType::ImageRef2D),
            Some((_, other)) => {
                return Err(
                    ApiError::invalid_request(format!("unknown object type `{other}`")).into(),
                )
            }
            None => (*raw, DType::Quantitative),
        };
        if dims.iter().any(|d| d.name == name) {
            continue;
        }
        dims.push(match dtype {
            DType::Series1D => Dimension::series(name, 1),
            _ => Dimension::new(name, dtype),
        });
    }
    let table = RunTable::schema_only(dims)?;
    Ok(match sidecar {
        Some(side) => table.apply_sidecar(side)?,
        None => table,
    })
}

fn table_for(data: &DataArgs, enc: &EncodingArgs) -> Result<RunTable, CliError> {
    match &data.data {
        Some(csv) => load(csv, data.meta.as_deref(), data.max_runs),
        None => {
            let sidecar = data.meta.as_deref().map(read).transpose()?;
            let sidecar = sidecar.as_deref().map(Sidecar::from_json).transpose()?;
            schema_table(&enc.names(), sidecar.as_ref())
        }
    }
}

/// Frames of one task as readable lines, with marginal options in parentheses.
pub fn render_text(set: &RecommendationSet) -> String {
    let mut out = String::new();
    for block in &set.guidance {
        let _ = writeln!(
            out,
            "{}: {} ({}; objects: {})",
            block.task, block.strategy, block.mdmv, block.objects
        );
        let mut groups: Vec<(String, Vec<String>)> = Vec::new();
        for frame in set.frames_for(block.task) {
            let (label, item) = match &frame.target {
                FrameTarget::VisOption {
                    option,
                    marginal,
                    source,
                    hide_filtered,
                } => {
                    let mut name = option.to_string();
                    if *hide_filtered {
                        name.push_str(" (-)");
                    }
                    if *marginal {
                        name = format!("({name})");
                    }
                    (source.map_or("marks".to_string(), |f| f.to_string()), name)
                }
                FrameTarget::ChannelField { field, hint_roles } => {
                    let roles: Vec<String> = hint_roles.iter().map(|r| r.to_string()).collect();
                    (format!("field {field}"), roles.join(", "))
                }
            };
            match groups.iter_mut().find(|(l, _)| *l == label) {
                Some((_, items)) => items.push(item),
                None => groups.push((label, vec![item])),
            }
        }
        for (label, items) in groups {
            let sep = if label.starts_with("field") {
                " <- "
            } else {
                ": "
            };
            let _ = writeln!(out, "  {label}{sep}{}", items.join(" + "));
        }
        let _ = writeln!(out, "  {}", block.explanation);
        for hint in &block.hints {
            let _ = writeln!(out, "  hint: {hint}");
        }
    }
    out
}

/// Runs one command and returns its stdout payload.
pub fn execute(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Ingest {
            csv,
            meta,
            max_runs,
        } => {
            let table = load(&csv, meta.as_deref(), max_runs)?;
            Ok(json(&table_summary(&table)))
        }
        Command::Recommend(args) => {
            let table = table_for(&args.data, &args.enc)?;
            let set = recommend(&args.tasks, &args.enc.state(), &table)?;
            Ok(if args.text {
                render_text(&set)
            } else {
                set.to_json() + "\n"
            })
        }
        Command::Layout(args) => {
            let mut layout = layout_smd(args.option, &args.enc.state())?;
            if let Some(pos) = args.detail {
                layout.detail_for(pos)?;
            }
            Ok(json(&layout))
        }
        Command::ExportDashboard {
            doc,
            data,
            data_ref,
        } => {
            let doc = DashboardDoc::from_json(&read(&doc)?)?;
            match &data.data {
                Some(csv) => {
                    let table = load(csv, data.meta.as_deref(), data.max_runs)?;
                    doc.validate(&table)?;
                    Ok(json(&doc.emit_specs(&table, &data_ref)?))
                }
                None => Ok(doc.to_json() + "\n"),
            }
        }
        Command::Serve {
            port,
            host,
            max_runs,
            idle_minutes,
        } => {
            let config = StoreConfig {
                idle: Duration::from_secs(idle_minutes * 60),
                ingest: IngestOptions { max_runs },
            };
            serve(&host, port, config)?;
            Ok(String::new())
        }
        Command::Fixture {
            kind,
            runs,
            seed,
            dims,
            out,
        } => {
            let fx = fixture::generate(kind, runs.unwrap_or(kind.default_runs()), dims, seed);
            let csv = out.with_extension("csv");
            let meta = out.with_extension("json");
            write(&csv, &fx.csv)?;
            write(&meta, &(fx.sidecar.to_json() + "\n"))?;
            Ok(format!("{}\n{}\n", csv.display(), meta.display()))
        }
    }
}

fn serve(host: &str, port: u16, config: StoreConfig) -> Result<(), CliError> {
    let internal = |e: std::io::Error| CliError::Internal(e.to_string());
    let runtime = tokio::runtime::Runtime::new().map_err(internal)?;
    runtime.block_on(async {
        let store = Arc::new(SessionStore::new(config));
        let sweeper = store.clone();
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(Duration::from_secs(60));
            loop {
                tick.tick().await;
                sweeper.sweep();
            }
        });
        let listener = tokio::net::TcpListener::bind((host, port))
            .await
            .map_err(internal)?;
        eprintln!(
            "listening on http://{}",
            listener.local_addr().map_err(internal)?
        );
        axum::serve(listener, api::router(store))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(internal)
    })
}

/// Parses `args`, runs the command and reports failures on stderr.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
