//! Command-line interface: single solves with plot slices, temporal and
//! spatial convergence tables, and the kernel verification suite.
//!
//! Exit codes: 0 success, 1 validation/config error, 2 numerical failure,
//! 3 I/O failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use subdelay::bench::config::RunConfig;
use subdelay::bench::{cases, output, tables, verify};
use subdelay::mesh::{SpatialMesh, TemporalMesh};
use subdelay::solver::solve;
use subdelay::{Error, Result};

#[derive(Parser)]
#[command(name = "subdelay", version, about = "Delay subdiffusion solver and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TableArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Extend the resolution ladder by one more doubling. The history sums
    /// are quadratic in the step count, so expect a several-fold cost.
    #[arg(long)]
    full: bool,
    /// Override the fixed element count of a temporal table
    /// (or the whole element ladder with a single value).
    #[arg(long)]
    elements: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// One solve; writes solution slices to <out>/solution.csv.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Temporal accuracy table; writes <out>/<config-stem>.csv.
    TableTime(TableArgs),
    /// Spatial accuracy table; writes <out>/<config-stem>.csv.
    TableSpace(TableArgs),
    /// Kernel identities and truncation probes; writes a report and CSV.
    Verify {
        /// Optional config whose alpha and grading lists narrow the sweep.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn table_out_path(args: &TableArgs) -> PathBuf {
    let stem = args.config.file_stem().and_then(|s| s.to_str()).unwrap_or("table");
    args.out.join(format!("{stem}.csv"))
}

fn apply_overrides(cfg: &mut RunConfig, args: &TableArgs, temporal: bool) {
    if args.full {
        let extend = |ladder: &mut Vec<usize>| {
            if let Some(&last) = ladder.last() {
                ladder.push(2 * last);
            }
        };
        if temporal {
            extend(&mut cfg.n_ladder);
        } else {
            extend(&mut cfg.m_ladder);
        }
        eprintln!(
            "note: --full extends the ladder by one doubling; history sums grow \
             quadratically with the step count"
        );
    }
    if let Some(m) = args.elements {
        cfg.m_ladder = vec![m];
    }
}

fn cmd_solve(config: &Path, out: &Path) -> Result<()> {
    let cfg = RunConfig::from_path(config)?;
    cfg.validate_solve()?;
    ensure_dir(out)?;
    let alpha = cfg.alphas[0];
    let grading = cfg.gradings[0];
    let spec = cases::build(&cfg.case, alpha, cfg.g_route)?;
    let tmesh = TemporalMesh::build(spec.tau, spec.windows, cfg.n_ladder[0], grading)?;
    let smesh = SpatialMesh::build(spec.length, cfg.m_ladder[0])?;
    let record = solve(&spec, &tmesh, &smesh)?;
    let path = out.join("solution.csv");
    output::emit_solution_slices(&record, cfg.times.as_deref(), cfg.positions.as_deref(), &path)?;
    println!(
        "solved {} (alpha={alpha}, r={grading}, N={}, M={}); slices in {}",
        cfg.case.id(),
        cfg.n_ladder[0],
        cfg.m_ladder[0],
        path.display()
    );
    Ok(())
}

fn cmd_table(args: &TableArgs, temporal: bool) -> Result<()> {
    let mut cfg = RunConfig::from_path(&args.config)?;
    apply_overrides(&mut cfg, args, temporal);
    ensure_dir(&args.out)?;
    let table = if temporal {
        tables::run_temporal_table(&cfg)?
    } else {
        tables::run_spatial_table(&cfg)?
    };
    let path = table_out_path(args);
    output::emit_csv(&table, &path)?;
    print!("{}", output::render_table(&table));
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_verify(config: Option<&Path>, out: &Path) -> Result<bool> {
    ensure_dir(out)?;
    let report = match config {
        None => verify::run_verify()?,
        Some(path) => {
            let cfg = RunConfig::from_path(path)?;
            verify::run_verify_over(&cfg.alphas, &cfg.gradings)?
        }
    };
    let text_path = out.join("verify_report.txt");
    std::fs::write(&text_path, report.render_text()).map_err(|e| Error::io(&text_path, e))?;
    let csv_path = out.join("verify.csv");
    std::fs::write(&csv_path, report.render_csv()).map_err(|e| Error::io(&csv_path, e))?;
    print!("{}", report.render_text());
    println!("wrote {} and {}", text_path.display(), csv_path.display());
    Ok(report.all_gating_pass())
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Solve { config, out } => {
            cmd_solve(config, out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::TableTime(args) => {
            cmd_table(args, true)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::TableSpace(args) => {
            cmd_table(args, false)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { config, out } => {
            if cmd_verify(config.as_deref(), out)? {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("error: gating verification checks failed");
                Ok(ExitCode::from(2))
            }
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
