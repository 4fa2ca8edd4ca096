//! `anp`: validate, solve, rate and report on `.anp.json` decision models,
//! or serve them over HTTP.

mod output;
mod wizard;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anp_core::model::{load, FILE_EXTENSION};
use anp_core::{
    export_report, solve, ConsistencyPolicy, ModelDocument, ModelError, ReportFormat,
    ResultDocument, SolveError, SupermatrixError,
};
use clap::{Parser, Subcommand, ValueEnum};

use output::Style;

#[derive(Debug, Parser)]
#[command(
    name = "anp",
    version,
    about = "Analytic Network Process decision engine"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    Saaty1994,
    Uniform,
}

impl From<PolicyArg> for ConsistencyPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Saaty1994 => ConsistencyPolicy::Saaty1994,
            PolicyArg::Uniform => ConsistencyPolicy::Uniform,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Markdown,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Markdown => ReportFormat::Markdown,
        }
    }
}

#[derive(Debug, clap::Args)]
struct PolicyFlags {
    /// Treat any matrix over its consistency threshold as an error.
    #[arg(long, conflicts_with = "lenient")]
    strict: bool,
    /// Never fail on consistency, even if the model file asks for strict mode.
    #[arg(long)]
    lenient: bool,
    /// Consistency thresholds to screen matrices against.
    #[arg(long, value_enum)]
    policy: Option<PolicyArg>,
}

impl PolicyFlags {
    fn strict(&self) -> Option<bool> {
        match (self.strict, self.lenient) {
            (true, _) => Some(true),
            (_, true) => Some(false),
            _ => None,
        }
    }

    fn policy(&self) -> Option<ConsistencyPolicy> {
        self.policy.map(Into::into)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a model's structure and list unrated judgment slots.
    Validate { model: PathBuf },
    /// Solve a model, print the ranking and write the result document.
    Solve {
        model: PathBuf,
        #[command(flatten)]
        flags: PolicyFlags,
        /// Convergence tolerance for the limit supermatrix.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Highest power of the weighted supermatrix to try.
        #[arg(long)]
        max_power: Option<u64>,
        /// Result path (default: next to the model, `.result.json`).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Enter missing pairwise judgments interactively.
    Rate {
        model: PathBuf,
        #[arg(long, value_enum)]
        policy: Option<PolicyArg>,
    },
    /// Render a result document.
    Report {
        result: PathBuf,
        #[arg(long, short, value_enum, default_value = "markdown")]
        format: FormatArg,
        /// Model the result must have been computed from.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        #[arg(long, default_value = "anp-models")]
        store_dir: PathBuf,
        /// Directory of static files for the web interface.
        #[arg(long)]
        ui_dir: Option<PathBuf>,
        #[command(flatten)]
        flags: PolicyFlags,
    },
}

/// A failed command: exit status plus the message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

pub const EXIT_CONSISTENCY: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_CONVERGENCE: u8 = 3;
pub const EXIT_INTEGRITY: u8 = 4;

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn input(message: impl Into<String>) -> Self {
        Self::new(EXIT_INPUT, message)
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let code = match &e {
            SolveError::Inconsistent(_) => EXIT_CONSISTENCY,
            SolveError::Supermatrix(SupermatrixError::ConvergenceFailure { .. }) => {
                EXIT_CONVERGENCE
            }
            _ => EXIT_INPUT,
        };
        Self::new(code, e.to_string())
    }
}

type CmdResult = Result<u8, Failure>;

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<ModelDocument, Failure> {
    load(&read(path)?).map_err(|e: ModelError| Failure::input(format!("{}: {e}", path.display())))
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let fail = |e: io::Error| Failure::input(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

fn default_result_path(model: &Path) -> PathBuf {
    let name = model
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("model");
    let stem = name
        .strip_suffix(FILE_EXTENSION)
        .or_else(|| name.strip_suffix(".json"))
        .unwrap_or(name);
    model.with_file_name(format!("{stem}.result.json"))
}

fn cmd_validate(path: &Path, style: Style) -> CmdResult {
    let doc = load_model(path)?;
    let report = doc.validate();
    let pending = doc.pending();
    let mut out = io::stdout().lock();
    for v in &report.violations {
        let _ = writeln!(out, "{} {}: {}", style.bad("error"), v.path, v.message);
    }
    for p in &pending {
        let _ = writeln!(
            out,
            "{} {} unrated: {} of {} pairs missing",
            style.warn("pending"),
            p.slot,
            p.missing.len(),
            p.elements.len() * (p.elements.len() - 1) / 2
        );
    }
    let topo = doc.topology_network();
    if report.is_clean() && pending.is_empty() {
        let _ = writeln!(
            out,
            "{} {}: {} clusters, {} nodes, {} judgment slots rated",
            style.good("ok"),
            path.display(),
            topo.clusters().len(),
            topo.node_ids().len(),
            topo.required_judgments().len()
        );
        Ok(0)
    } else {
        Ok(EXIT_CONSISTENCY)
    }
}

fn cmd_solve(
    path: &Path,
    flags: &PolicyFlags,
    tolerance: Option<f64>,
    max_power: Option<u64>,
    out_path: Option<PathBuf>,
    style: Style,
) -> CmdResult {
    let doc = load_model(path)?;
    let mut opts = doc
        .solve_options(flags.policy(), flags.strict())
        .map_err(|e| Failure::input(e.to_string()))?;
    if let Some(t) = tolerance {
        opts.convergence.tolerance = t;
    }
    if let Some(p) = max_power {
        opts.convergence.max_power = p;
    }
    let solution = solve(&doc.to_network(), &opts)?;
    let result = ResultDocument::new(&doc, &solution, &opts);
    let out_path = out_path.unwrap_or_else(|| default_result_path(path));
    write_file(&out_path, &result.to_json())?;

    let mut err = io::stderr().lock();
    for s in &result.slots {
        if !s.verdict.is_pass() {
            let _ = writeln!(
                err,
                "{}",
                output::verdict_line(
                    &s.slot.to_string(),
                    s.cr,
                    &s.verdict,
                    opts.consistency.policy,
                    style
                )
            );
        }
    }
    let mut out = io::stdout().lock();
    let _ = out.write_all(output::ranking_summary(&result, style).as_bytes());
    let _ = writeln!(out, "Result written to {}", out_path.display());
    Ok(0)
}

fn cmd_report(
    result: &Path,
    format: FormatArg,
    model: Option<&Path>,
    out: Option<&Path>,
) -> CmdResult {
    let res = ResultDocument::from_json(&read(result)?)
        .map_err(|e| Failure::input(format!("{}: {e}", result.display())))?;
    if let Some(model) = model {
        let doc = load_model(model)?;
        if !res.matches(&doc) {
            return Err(Failure::new(
                EXIT_INTEGRITY,
                format!(
                    "result does not match model: {} was computed from {}",
                    result.display(),
                    res.input_digest
                ),
            ));
        }
    }
    let bytes = export_report(&res, format.into()).map_err(|e| Failure::input(e.to_string()))?;
    match out {
        Some(p) => write_file(p, &bytes)?,
        None => {
            let _ = io::stdout().lock().write_all(&bytes);
        }
    }
    Ok(0)
}

fn cmd_serve(
    addr: &str,
    store_dir: PathBuf,
    ui_dir: Option<PathBuf>,
    flags: &PolicyFlags,
) -> CmdResult {
    let store = anp_service::store::ModelStore::open(&store_dir)
        .map_err(|e| Failure::input(e.to_string()))?;
    let state = anp_service::AppState::new(
        store,
        anp_service::ServiceConfig {
            policy: flags.policy(),
            strict: flags.strict(),
            ui_dir,
        },
    );
    let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::input(e.to_string()))?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| Failure::input(format!("cannot bind {addr}: {e}")))?;
        let local = listener
            .local_addr()
            .map_err(|e| Failure::input(e.to_string()))?;
        println!(
            "listening on http://{local} (models in {})",
            store_dir.display()
        );
        anp_service::serve(listener, state)
            .await
            .map_err(|e| Failure::input(format!("server stopped: {e}")))
    })?;
    Ok(0)
}

fn run(cli: Cli) -> CmdResult {
    let style = Style::detect();
    match cli.command {
        Command::Validate { model } => cmd_validate(&model, style),
        Command::Solve {
            model,
            flags,
            tolerance,
            max_power,
            out,
        } => cmd_solve(&model, &flags, tolerance, max_power, out, style),
        Command::Rate { model, policy } => {
            let stdin = io::stdin();
            wizard::rate(
                &model,
                policy.map(Into::into),
                &mut stdin.lock(),
                &mut io::stdout().lock(),
                style,
            )
        }
        Command::Report {
            result,
            format,
            model,
            out,
        } => cmd_report(&result, format, model.as_deref(), out.as_deref()),
        Command::Serve {
            addr,
            store_dir,
            ui_dir,
            flags,
        } => cmd_serve(&addr, store_dir, ui_dir, &flags),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
