//! Command-line driver: run verification manifests and curvature dumps.
//!
//! Exit codes: 0 verified, 1 not verified within budget, 2 manifest/input
//! error, 3 precondition violation (critical point, v < 1 without the shift
//! flag, non-SPD metric, overflow guard).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use schouten::manifest::{self, Manifest};

#[derive(Parser)]
#[command(name = "schouten", version, about = "Conformal-metric curvature verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a manifest and emit a JSON verification report.
    Verify {
        /// Path to the JSON manifest.
        manifest: PathBuf,
        /// Report file; written to stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Override the manifest's grid resolution.
        #[arg(long)]
        grid: Option<usize>,
        /// Override the manifest's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for per-point parallelism (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Emit the per-point curvature table of the background metric as CSV.
    Dump {
        /// Path to the JSON manifest.
        manifest: PathBuf,
        /// CSV output file.
        #[arg(short, long)]
        output: PathBuf,
        /// Override the manifest's grid resolution.
        #[arg(long)]
        grid: Option<usize>,
        /// Worker threads for per-point parallelism (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn load_with_overrides(
    path: &Path,
    grid: Option<usize>,
    seed: Option<u64>,
) -> schouten::Result<Manifest> {
    let mut m = manifest::load_manifest(path)?;
    if let Some(r) = grid {
        m.grid = r;
    }
    if let Some(s) = seed {
        m.seed = s;
    }
    Ok(m)
}

fn in_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

fn run_verify(
    path: PathBuf,
    output: Option<PathBuf>,
    grid: Option<usize>,
    seed: Option<u64>,
    jobs: Option<usize>,
) -> schouten::Result<bool> {
    let m = load_with_overrides(&path, grid, seed)?;
    let start = Instant::now();
    let out = in_pool(jobs, || manifest::run(&m))?;
    let elapsed = start.elapsed().as_millis();
    let json = manifest::report_to_json(&out.report)?;
    match &output {
        Some(p) => std::fs::write(p, &json)?,
        None => print!("{json}"),
    }
    eprintln!(
        "{} in {elapsed} ms (min margin {})",
        if out.verified { "verified" } else { "not verified" },
        out.report
            .verification
            .as_ref()
            .map(|v| v.min_margin.to_string())
            .unwrap_or_else(|| "n/a".into()),
    );
    Ok(out.verified)
}

fn run_dump(
    path: PathBuf,
    output: PathBuf,
    grid: Option<usize>,
    jobs: Option<usize>,
) -> schouten::Result<()> {
    let m = load_with_overrides(&path, grid, None)?;
    let mut buf = Vec::new();
    in_pool(jobs, || manifest::curvature_dump(&m, &mut buf))?;
    std::fs::write(&output, &buf)?;
    eprintln!("wrote {}", output.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: schouten::Result<bool> = match cli.command {
        Command::Verify {
            manifest,
            output,
            grid,
            seed,
            jobs,
        } => run_verify(manifest, output, grid, seed, jobs),
        Command::Dump {
            manifest,
            output,
            grid,
            jobs,
        } => run_dump(manifest, output, grid, jobs).map(|()| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
