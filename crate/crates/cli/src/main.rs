use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use specasym_cli::run::{matrix_only, run, Overrides};
use specasym_cli::verify::{verify, Ctx, Level};
use specasym_cli::{CliError, OperatorSpec};

#[derive(Parser)]
#[command(name = "specasym", version, about = "Residue formulas for spectral asymmetry on flat tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an operator spec and write <name>.json and <name>.csv.
    Run {
        spec: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Truncation depth for every (cut, k); defaults to the smallest sufficient one.
        #[arg(long)]
        depth: Option<usize>,
        /// Quadrature nodes per contour.
        #[arg(long)]
        nodes: Option<usize>,
    },
    /// Run the seeded property suite; JSON on stdout, table on stderr.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Level::Quick)]
        level: Level,
        /// Also write the JSON report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, hide = true)]
        flip_composition_phase: bool,
    },
    /// Eigen-oracle clusters and projections of a matrix spec, on stdout.
    Matrix { spec: PathBuf },
}

fn load(path: &PathBuf) -> Result<OperatorSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
    OperatorSpec::parse(&text)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("SPECASYM_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Schema(format!("SPECASYM_THREADS must be a positive integer, got {v:?}"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Schema(format!("thread pool: {e}")))
}

fn main_inner(cli: Cli) -> Result<bool, CliError> {
    configure_threads()?;
    match cli.command {
        Command::Run { spec, out, depth, nodes } => {
            let s = load(&spec)?;
            let report = run(&s, Overrides { depth, nodes })?;
            report.write_files(&out, &s.name)?;
            for a in &report.assertions {
                eprintln!(
                    "{} {:?}: measured {} (tol {:.1e}) {}",
                    if a.pass { "PASS" } else { "FAIL" },
                    a.assertion,
                    a.measured.map_or_else(|| "n/a".into(), |m| format!("{m:.3e}")),
                    a.tolerance,
                    a.detail
                );
            }
            eprintln!("wrote {}", out.join(format!("{}.json", s.name)).display());
            Ok(report.pass)
        }
        Command::Verify { seed, level, out, flip_composition_phase } => {
            let ctx = Ctx { flip_composition_phase, ..Ctx::new(seed, level) };
            let report = verify(&ctx);
            let json = report.to_json();
            print!("{json}");
            if let Some(path) = out {
                std::fs::write(&path, &json).map_err(|e| CliError::io(path.display().to_string(), e))?;
            }
            eprint!("{}", report.check_table());
            let failed = report.checks.iter().filter(|c| !c.pass).count();
            eprintln!("{} checks, {} failed", report.checks.len(), failed);
            Ok(report.pass)
        }
        Command::Matrix { spec } => {
            let report = matrix_only(&load(&spec)?)?;
            print!("{}", report.to_json());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
