use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use resolab::harness::{run, Mode, SweepConfig};
use resolab::Error;

/// Sweeps of numeric resonances against their asymptotic predictions.
#[derive(Parser)]
#[command(name = "resolab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a TOML config file.
    Run {
        config: PathBuf,
        /// Override the mode in the config.
        #[arg(long)]
        mode: Option<Mode>,
        /// Output directory; RESOLAB_OUT is used when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Locate zeros by subdividing the box instead of seeding.
        #[arg(long)]
        seedless: bool,
    },
}

const EXIT_CHECKS: u8 = 2;
const EXIT_CONFIG: u8 = 3;
const EXIT_SOLVER: u8 = 4;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run {
        config,
        mode,
        out,
        jobs,
        seedless,
    } = cli.command;
    let mut cfg = match SweepConfig::load(&config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(m) = mode {
        cfg.mode = m;
    }
    if seedless {
        cfg.seedless = true;
    }
    cfg.out = out
        .or_else(|| std::env::var_os("RESOLAB_OUT").map(PathBuf::from))
        .or(cfg.out)
        .or_else(|| Some(PathBuf::from("resolab-out")));

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        pool = pool.num_threads(n.max(1));
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match pool.install(|| run(&cfg)) {
        Ok(report) => {
            for c in report.identity_checks.iter().chain(report.checks.iter()) {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                let kind = if c.acceptance { "" } else { " (diagnostic)" };
                let value = c.value.map_or("n/a".into(), |v| format!("{v:.6e}"));
                println!("{tag} {} value={value} bound={:.6e}{kind}", c.name, c.tolerance);
            }
            for f in &report.slopes {
                match (f.slope, f.r2) {
                    (Some(s), Some(r2)) => println!("slope {} = {s:.4} (r2 {r2:.4})", f.name),
                    _ => println!("slope {}: {}", f.name, f.note.as_deref().unwrap_or("unavailable")),
                }
            }
            if let Some(dir) = &cfg.out {
                println!("wrote {}", dir.display());
            }
            if report.pass {
                ExitCode::SUCCESS
            } else if report.solver_failures() > 0 {
                ExitCode::from(EXIT_SOLVER)
            } else {
                ExitCode::from(EXIT_CHECKS)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Misuse(_) => ExitCode::from(EXIT_CONFIG),
                _ => ExitCode::from(EXIT_SOLVER),
            }
        }
    }
}
