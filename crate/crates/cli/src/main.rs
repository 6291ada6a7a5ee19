use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::bail;
use clap::{Parser, Subcommand};
use wilczynski::report::{self, DiagnosticsReport, Overrides};

#[derive(Debug, Parser)]
#[command(
    name = "wilczynski",
    version,
    about = "Verify loop-group flatness and Gauss-map diagnostics for projective surfaces"
)]
struct Cli {
    /// Override the config tolerance.
    #[arg(long, global = true, value_name = "REAL")]
    tol: Option<f64>,
    /// Override the spectral samples, e.g. `-2,-1,0.5,2`.
    #[arg(
        long,
        global = true,
        value_name = "LIST",
        value_delimiter = ',',
        allow_hyphen_values = true
    )]
    lambda: Option<Vec<f64>>,
    /// Override the grid, e.g. `33x33`.
    #[arg(long, global = true, value_name = "NXxNY", value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print classification flags and equivalence verdicts.
    Check { config: PathBuf },
    /// Write the full JSON diagnostics report.
    Report {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the surface point cloud as CSV.
    Export {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_grid(s: &str) -> anyhow::Result<(usize, usize)> {
    let Some((a, b)) = s.split_once(['x', 'X']) else {
        bail!("expected <nx>x<ny>, got `{s}`");
    };
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn print_check(r: &DiagnosticsReport) {
    let c = &r.classification;
    let flags = [
        ("valid_surface", c.valid_surface),
        ("demoulin", c.demoulin),
        ("projective_minimal", c.projective_minimal),
        ("isothermally_asymptotic", c.isothermally_asymptotic),
        ("coincidence_flat", c.coincidence_flat),
    ];
    println!("surface: {}", r.spec.name);
    for (name, on) in flags {
        println!("  {name:<24} {on}");
    }
    for e in &r.equivalences {
        let mark = if e.holds { "ok" } else { "MISMATCH" };
        println!("  [{mark}] {} (lhs={}, rhs={})", e.statement, e.lhs, e.rhs);
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let overrides = Overrides {
        tolerance: cli.tol,
        lambdas: cli.lambda,
        grid: cli.grid,
    };
    match cli.command {
        Command::Check { config } => {
            let r = report::run_report(&config, &overrides, None)?;
            print_check(&r);
            Ok(r.all_verified)
        }
        Command::Report { config, out } => {
            let r = report::run_report(&config, &overrides, Some(&out))?;
            log::info!("report written to {}", out.display());
            print_check(&r);
            Ok(r.all_verified)
        }
        Command::Export { config, out } => {
            let n = report::export_surface(&config, &overrides, &out)?;
            println!("wrote {n} points to {}", out.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
