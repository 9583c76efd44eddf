//! `kreg`: runs one job file and prints a JSON report.

mod error;
mod job;
mod tasks;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use kreg_core::QuadratureGrid;
use serde::Serialize;
use serde_json::Value;

use error::{CliError, ErrorReport};
use job::{lattice_truncations, JobFile};
use tasks::{Context, Table};

#[derive(Debug, Parser)]
#[command(name = "kreg", version, about = "Milnor K-theory symbols and torus regulators, one job per run")]
struct Args {
    /// Job file; read from standard input when absent.
    #[arg(long)]
    job: Option<PathBuf>,
    /// Write the tabular part of the result to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Worker threads for quadrature.
    #[arg(long)]
    threads: Option<usize>,
    /// Override the grid size N.
    #[arg(long = "grid-N")]
    grid_n: Option<usize>,
    /// Override the mask radius δ.
    #[arg(long = "mask-delta")]
    mask_delta: Option<f64>,
    /// Override the lattice truncation R of every torus in the payload.
    #[arg(long = "lattice-R")]
    lattice_r: Option<usize>,
}

#[derive(Serialize)]
struct Overrides {
    #[serde(rename = "grid_N", skip_serializing_if = "Option::is_none")]
    grid_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mask_delta: Option<f64>,
    #[serde(rename = "lattice_R", skip_serializing_if = "Option::is_none")]
    lattice_r: Option<usize>,
}

#[derive(Serialize)]
struct GridReport {
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    /// The lattice truncations in use, one entry when all tori agree.
    #[serde(rename = "R")]
    r: Vec<usize>,
}

#[derive(Serialize)]
struct Report<'a> {
    version: &'static str,
    task: job::Task,
    job: &'a JobFile,
    overrides: Overrides,
    grid: GridReport,
    threads: usize,
    wall_time: f64,
    result: Value,
}

fn read_job(path: &Option<PathBuf>) -> Result<String, CliError> {
    match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| CliError::Schema(format!("cannot read {}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Schema(format!("cannot read standard input: {e}")))?;
            Ok(s)
        }
    }
}

/// Grid of an integration task: the job's, else the task default, then the flags.
fn resolve_grid(job: &JobFile, args: &Args) -> Result<Option<QuadratureGrid>, CliError> {
    let Some((n0, d0)) = job.task.default_grid() else {
        return Ok(None);
    };
    let (n, d) = job.grid.map_or((n0, d0), |g| (g.n(), g.mask_radius()));
    let n = args.grid_n.unwrap_or(n);
    let d = args.mask_delta.unwrap_or(d);
    QuadratureGrid::new(n, d)
        .map(Some)
        .map_err(CliError::schema)
}

fn write_csv(path: &PathBuf, table: &Table) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(CliError::internal)?;
    w.write_record(&table.header).map_err(CliError::internal)?;
    for row in &table.rows {
        w.write_record(row).map_err(CliError::internal)?;
    }
    w.flush().map_err(CliError::internal)
}

fn execute(args: &Args) -> Result<String, CliError> {
    let text = read_job(&args.job)?;
    let job = JobFile::parse(&text)?;
    let grid = resolve_grid(&job, args)?;
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::schema("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(CliError::internal)?;
    }
    let ctx = Context {
        grid,
        lattice_r: args.lattice_r,
    };
    let start = Instant::now();
    let output = std::panic::catch_unwind(|| tasks::run(&job, &ctx)).map_err(|panic| {
        let detail = panic
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        CliError::Internal(detail)
    })??;
    let wall_time = start.elapsed().as_secs_f64();
    if let Some(path) = &args.csv {
        let table = output.table.as_ref().ok_or_else(|| {
            CliError::Schema(format!("task {} has no tabular output for --csv", job.task.name()))
        })?;
        write_csv(path, table)?;
    }
    let report = Report {
        version: env!("CARGO_PKG_VERSION"),
        task: job.task,
        job: &job,
        overrides: Overrides {
            grid_n: args.grid_n,
            mask_delta: args.mask_delta,
            lattice_r: args.lattice_r,
        },
        grid: GridReport {
            n: grid.map(|g| g.n()),
            delta: grid.map(|g| g.mask_radius()),
            r: lattice_truncations(&job.payload, args.lattice_r),
        },
        threads: rayon::current_num_threads(),
        wall_time,
        result: output.result,
    };
    serde_json::to_string_pretty(&report).map_err(CliError::internal)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(report) => {
            println!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let detail = e.to_string();
            let report = ErrorReport {
                error: e.kind(),
                detail: &detail,
            };
            println!(
                "{}",
                serde_json::to_string(&report).unwrap_or_else(|_| "{\"error\":\"internal\"}".into())
            );
            ExitCode::from(e.exit_code())
        }
    }
}
