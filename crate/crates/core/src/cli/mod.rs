//! The `mpcr` command-line front end.
//!
//! Exit status: 0 on success, 2 for configuration errors, 3 for numerical
//! errors and 4 for I/O errors. Every failure prints one diagnostic line.

mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{FileConfig, RunConfig};

use crate::error::Error;
use crate::harness::{self, FigureOptions};
use crate::maps;
use crate::model::Rates;
use crate::sim::{simulate, RngStream, SimMode};
use crate::table::{write_table, Table, Value};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::OrderingViolation(_)
            | Error::EmptyPopulation
            | Error::BadProbability(_)
            | Error::BadKappa(_)
            | Error::DimensionMismatch { .. }
            | Error::NoTypes
            | Error::UnknownFigure(_)
            | Error::InvalidArgument(_) => CliError::Config(msg),
            Error::Io(_) => CliError::Io(msg),
            Error::NegativeInput(_)
            | Error::BadTolerance(_)
            | Error::OverflowRisk(_)
            | Error::SolverFailure(_)
            | Error::CouplingViolation { .. }
            | Error::InvalidState(_)
            | Error::NotInGamma(_)
            | Error::EmptyInput => CliError::Numerical(msg),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mpcr",
    version,
    about = "Simulate multitype PCR branching processes and evaluate their limits"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate f, f^-1, H, G, F and F^-1 at given points.
    Maps(MapsArgs),
    /// Write trajectories. Columns: replicate, n, z_1..z_d[, y_1..y_d].
    Simulate(RunArgs),
    /// Paired runs to the pivot time. Columns: replicate, then
    /// scaled_Z_i, W_hat_i, limit_i for each type.
    Theorem1(RunArgs),
    /// Paired runs to kappa + n_offset. Columns: replicate, X_total,
    /// limit_total, then X_i, limit_i, W_hat_i for each type.
    Theorem2(RunArgs),
    /// Error summaries over a list of kappa. Columns: kappa, type,
    /// replicates, mean_abs, median_abs, min_abs, max_abs, median_rel, rel_count.
    Sweep(RunArgs),
    /// Data behind a reference figure (A: x, G_i; 1: replicate, scaled_Z_i,
    /// limit_i; 2: replicate, H_W0, limit_i for non-dominant i; 3: replicate,
    /// type, simulated, limit).
    Figure(RunArgs),
}

#[derive(Debug, Clone, Args)]
struct RunArgs {
    /// Flat key = value config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (the MPCR_OUT environment variable takes precedence).
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    replicates: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    kappa: Option<u32>,
    /// Replication probabilities, comma separated, non-increasing.
    #[arg(long, value_delimiter = ',')]
    v: Option<Vec<f64>>,
    /// Initial copy numbers, comma separated.
    #[arg(long, value_delimiter = ',')]
    z0: Option<Vec<u64>>,
    #[arg(long, allow_negative_numbers = true)]
    n_offset: Option<i32>,
    #[arg(long, value_delimiter = ',')]
    kappa_list: Option<Vec<u32>>,
    #[arg(long)]
    tol: Option<f64>,
    /// Figure id: A, 1, 2 or 3.
    #[arg(long)]
    id: Option<String>,
    /// Number of steps for `simulate` (defaults to kappa).
    #[arg(long)]
    steps: Option<u32>,
    /// Simulation mode for `simulate`: mpcr, coupled or gw.
    #[arg(long)]
    mode: Option<String>,
    /// Worker threads, 0 for one per core.
    #[arg(long)]
    threads: Option<usize>,
}

impl RunArgs {
    fn as_file_config(&self) -> FileConfig {
        FileConfig {
            v: self.v.clone(),
            z0: self.z0.clone(),
            kappa: self.kappa,
            seed: self.seed,
            replicates: self.replicates,
            n_offset: self.n_offset,
            kappa_list: self.kappa_list.clone(),
            tol: self.tol,
            figure_id: self.id.clone(),
            steps: self.steps,
            mode: self.mode.clone(),
            out: self.out.clone(),
            format: self.format.clone(),
            threads: self.threads,
        }
    }
}

#[derive(Debug, Clone, Args)]
struct MapsArgs {
    /// Leading replication probability (defaults to the first entry of --v).
    #[arg(long)]
    v1: Option<f64>,
    /// Full probability vector, needed for G, F and F^-1.
    #[arg(long, value_delimiter = ',')]
    v: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Iterate count for --f and --F (negative iterates the inverse).
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    n: i32,
    /// Evaluate H(r).
    #[arg(long = "H", value_delimiter = ',', allow_negative_numbers = true)]
    h: Vec<f64>,
    /// Evaluate G_i(r) for every type.
    #[arg(long = "G", value_delimiter = ',', allow_negative_numbers = true)]
    g: Vec<f64>,
    /// Evaluate f^(n)(r).
    #[arg(long = "f", value_delimiter = ',', allow_negative_numbers = true)]
    f: Vec<f64>,
    /// Evaluate f^-1(y).
    #[arg(long = "finv", value_delimiter = ',', allow_negative_numbers = true)]
    finv: Vec<f64>,
    /// Evaluate F^(n)(x) for a comma separated vector.
    #[arg(long = "F", value_delimiter = ',', allow_negative_numbers = true)]
    big_f: Option<Vec<f64>>,
    /// Evaluate F^-1(y) for a comma separated vector.
    #[arg(long = "Finv", value_delimiter = ',', allow_negative_numbers = true)]
    big_finv: Option<Vec<f64>>,
}

/// Runs the CLI on `args` (including the program name). `env_out` is the
/// value of `MPCR_OUT`, if set.
pub fn run<I, T>(
    args: I,
    env_out: Option<PathBuf>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{rendered}");
            } else {
                let first = rendered.lines().next().unwrap_or("invalid arguments");
                let _ = writeln!(stderr, "{first}");
            }
            return code;
        }
    };
    match dispatch(cli, env_out, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli, env_out: Option<PathBuf>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (name, args) = match cli.command {
        Command::Maps(args) => return run_maps(&args, stdout),
        Command::Simulate(a) => ("simulate", a),
        Command::Theorem1(a) => ("theorem1", a),
        Command::Theorem2(a) => ("theorem2", a),
        Command::Sweep(a) => ("sweep", a),
        Command::Figure(a) => ("figure", a),
    };
    let file = match &args.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let cfg = RunConfig::resolve(name, file, args.as_file_config(), env_out)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let (stem, table) = pool.install(|| build_table(&cfg))?;
    let file_name = format!("{stem}.{}", cfg.format.extension());
    std::fs::create_dir_all(&cfg.out)
        .map_err(|e| CliError::Io(format!("{}: {e}", cfg.out.display())))?;
    write_table(&table, &cfg.out.join(&file_name), cfg.format)?;
    let manifest_path = cfg.out.join(format!("{stem}.manifest.toml"));
    std::fs::write(
        &manifest_path,
        cfg.manifest(std::slice::from_ref(&file_name)),
    )
    .map_err(|e| CliError::Io(format!("{}: {e}", manifest_path.display())))?;
    writeln!(
        stdout,
        "wrote {} ({} rows)",
        cfg.out.join(&file_name).display(),
        table.rows().len()
    )
    .map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

fn build_table(cfg: &RunConfig) -> Result<(String, Table), CliError> {
    let params = cfg.params()?;
    let table = match cfg.command.as_str() {
        "simulate" => {
            return Ok(("simulate".into(), trajectories_table(cfg, &params)?));
        }
        "theorem1" => harness::theorem1_table(&harness::run_theorem1(&params, cfg.replicates)?)?,
        "theorem2" => harness::theorem2_table(&harness::run_theorem2(
            &params,
            cfg.n_offset,
            cfg.replicates,
        )?)?,
        "sweep" => harness::summary_table(&harness::convergence_sweep(
            &params,
            &cfg.kappa_list,
            cfg.replicates,
        )?)?,
        "figure" => {
            let figure = cfg.figure().expect("figure id resolved");
            let options = FigureOptions {
                replicates: cfg.replicates,
                tol: cfg.tol,
                n_offset: cfg.n_offset,
                ..FigureOptions::default()
            };
            let table = harness::figure_data(figure, &params, &options)?;
            return Ok((format!("figure_{}", figure.label()), table));
        }
        other => unreachable!("unknown command {other}"),
    };
    Ok((cfg.command.clone(), table))
}

fn trajectories_table(cfg: &RunConfig, params: &crate::ModelParams) -> Result<Table, CliError> {
    use rayon::prelude::*;

    let mode = cfg.sim_mode();
    let d = params.dim();
    let mut columns = vec!["replicate".to_owned(), "n".to_owned()];
    columns.extend((1..=d).map(|i| format!("z_{i}")));
    if mode == SimMode::Coupled {
        columns.extend((1..=d).map(|i| format!("y_{i}")));
    }
    let trajectories = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| {
            simulate(
                params,
                cfg.steps,
                mode,
                &mut RngStream::new(params.seed(), r),
            )
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut table = Table::new(columns);
    for (r, t) in trajectories.iter().enumerate() {
        for s in &t.states {
            let mut row = vec![Value::from(r), Value::from(s.n)];
            row.extend(s.z.iter().map(|&z| Value::from(z)));
            if let Some(y) = &s.y {
                row.extend(y.iter().map(|&y| Value::from(y)));
            }
            table.push(row)?;
        }
    }
    Ok(table)
}

fn fmt_vec(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v:?}")).collect();
    format!("[{}]", parts.join(","))
}

fn run_maps(args: &MapsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let v1 = args
        .v1
        .or_else(|| args.v.as_ref().and_then(|v| v.first().copied()));
    let rates = args.v.clone().map(Rates::new).transpose()?;
    let need_v1 = || v1.ok_or_else(|| CliError::Config("--v1 or --v is required".into()));
    let need_rates = || {
        rates
            .as_ref()
            .ok_or_else(|| CliError::Config("--v is required for G, F and Finv".into()))
    };
    let mut lines = Vec::new();
    for &r in &args.h {
        let h = maps::h_eval(r, need_v1()?, args.tol)?;
        lines.push(format!(
            "H r={r:?} value={:?} certificate={:e} terms={}",
            h.value, h.truncation_bound, h.terms_used
        ));
    }
    for &r in &args.g {
        for (i, g) in maps::g_eval(r, need_rates()?, args.tol)?.iter().enumerate() {
            lines.push(format!(
                "G r={r:?} i={} value={:?} certificate={:e} terms={}",
                i + 1,
                g.value,
                g.truncation_bound,
                g.terms_used
            ));
        }
    }
    for &r in &args.f {
        let value = maps::f_apply(r, args.n, need_v1()?)?;
        lines.push(format!("f n={} r={r:?} value={value:?}", args.n));
    }
    for &y in &args.finv {
        let value = maps::f_inverse(y, need_v1()?)?;
        lines.push(format!("finv y={y:?} value={value:?}"));
    }
    if let Some(x) = &args.big_f {
        let value = maps::multi_iterate(x, args.n, need_rates()?)?;
        lines.push(format!(
            "F n={} x={} value={}",
            args.n,
            fmt_vec(x),
            fmt_vec(&value)
        ));
    }
    if let Some(y) = &args.big_finv {
        let root = maps::psi_root(y, need_rates()?)?;
        let value = maps::multi_inverse(y, need_rates()?)?;
        lines.push(format!(
            "Finv y={} value={} tau={:?} residual={:e}",
            fmt_vec(y),
            fmt_vec(&value),
            root.tau,
            root.residual
        ));
    }
    if lines.is_empty() {
        return Err(CliError::Config(
            "maps needs at least one of --H, --G, --f, --finv, --F, --Finv".into(),
        ));
    }
    for line in lines {
        writeln!(out, "{line}").map_err(|e| CliError::Io(e.to_string()))?;
    }
    Ok(())
}
