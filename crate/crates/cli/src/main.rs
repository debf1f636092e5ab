use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use pcsio_cli::{
    cmd_check_bounded, cmd_fredholm, cmd_index, cmd_spectrum, render_report, AnalysisConfig, CommandOutput, RunOptions,
    EXIT_MALFORMED,
};

#[derive(Parser)]
#[command(name = "pcsio", version, about = "Fredholm analysis of singular integral operators with piecewise continuous coefficients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Boundedness of S on the weighted Nakano space.
    CheckBounded(Common),
    /// Fredholm verdict for the configured expression.
    Fredholm(Common),
    /// Essential spectrum point cloud.
    Spectrum(Common),
    /// Index of a scalar a*P + Q.
    Index(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config file, or "-" for stdin.
    config: PathBuf,
    /// Run the independent oracle cross-checks.
    #[arg(long)]
    verify: bool,
    /// Samples per spiral fibre.
    #[arg(long)]
    sweep_samples: Option<usize>,
    /// Determinant tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for randomized verification probes.
    #[arg(long)]
    seed: Option<u64>,
    /// SVG output path (spectrum).
    #[arg(long)]
    svg: Option<PathBuf>,
    /// CSV output path (spectrum).
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn read_config(path: &Path) -> anyhow::Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn malformed(msg: impl std::fmt::Display) -> ExitCode {
    let report = serde_json::json!({ "status": "malformed", "reason": msg.to_string() });
    print!("{}", render_report(&report));
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_MALFORMED as u8)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let (common, which) = match cli.command {
        Command::CheckBounded(c) => (c, 0),
        Command::Fredholm(c) => (c, 1),
        Command::Spectrum(c) => (c, 2),
        Command::Index(c) => (c, 3),
    };
    let text = match read_config(&common.config) {
        Ok(t) => t,
        Err(e) => return Ok(malformed(format!("{e:#}"))),
    };
    let loaded = match AnalysisConfig::from_json(&text).and_then(|c| c.load()) {
        Ok(l) => l,
        Err(e) => return Ok(malformed(e)),
    };
    let opts = RunOptions { verify: common.verify, sweep_samples: common.sweep_samples, tol: common.tol, seed: common.seed };
    let csv_path = common.csv.or_else(|| loaded.config.outputs.csv.clone());
    let svg_path = common.svg.or_else(|| loaded.config.outputs.svg.clone());
    let mut out: CommandOutput = match which {
        0 => cmd_check_bounded(&loaded, &opts),
        1 => cmd_fredholm(&loaded, &opts),
        2 => cmd_spectrum(&loaded, &opts, svg_path.is_some()),
        _ => cmd_index(&loaded, &opts),
    };
    if let (Some(path), Some(csv)) = (&csv_path, &out.csv) {
        std::fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?;
        out.report["csv"] = serde_json::json!(path.display().to_string());
    }
    if let (Some(path), Some(svg)) = (&svg_path, &out.svg) {
        std::fs::write(path, svg).with_context(|| format!("writing {}", path.display()))?;
        out.report["svg"] = serde_json::json!(path.display().to_string());
    }
    print!("{}", render_report(&out.report));
    Ok(ExitCode::from(out.exit as u8))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
