use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qdnls::ResultTable;
use qdnls_cli::{emit_plot_data, exit_code, run, ExperimentConfig, ExperimentKind, Transform};

#[derive(Parser)]
#[command(name = "qdnls", version, about = "Experiments for the quadratic derivative Schrödinger system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `out` in the config; default `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed (overrides `seed` in the config).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct PlotArgs {
    /// CSV table written by an experiment.
    #[arg(long)]
    table: PathBuf,
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
    /// `linear` or `log-log`.
    #[arg(long, default_value = "log-log")]
    transform: String,
    /// Series file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    Simulate(RunArgs),
    Picard(RunArgs),
    ResonanceScan(RunArgs),
    Strichartz(RunArgs),
    Bilinear(RunArgs),
    Trilinear(RunArgs),
    VnormSelftest(RunArgs),
    /// Two-column series from a result table.
    Plot(PlotArgs),
}

fn configure_threads() {
    if let Some(n) = std::env::var("QDNLS_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn experiment(kind: ExperimentKind, args: RunArgs) -> ExitCode {
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("qdnls: cannot read {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    let mut cfg = match ExperimentConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("qdnls: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let dir = args.out.or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let result = run(kind, &cfg, &dir);
    match &result {
        Ok(out) => {
            for n in &out.notes {
                eprintln!("{n}");
            }
            for f in &out.files {
                println!("{}", f.display());
            }
        }
        Err(e) => eprintln!("qdnls: {e}"),
    }
    ExitCode::from(exit_code(&result) as u8)
}

fn plot(args: PlotArgs) -> ExitCode {
    let go = || -> qdnls::Result<()> {
        let transform: Transform = args.transform.parse()?;
        let table = ResultTable::from_csv(&std::fs::read_to_string(&args.table)?)?;
        let series = emit_plot_data(&table, &args.x, &args.y, transform)?;
        for w in &series.warnings {
            eprintln!("warning: {w}");
        }
        match &args.out {
            Some(p) => std::fs::write(p, series.to_text())?,
            None => print!("{}", series.to_text()),
        }
        Ok(())
    };
    match go() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qdnls: {e}");
            ExitCode::from(2)
        }
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Simulate(a) => (ExperimentKind::Simulate, a),
        Command::Picard(a) => (ExperimentKind::Picard, a),
        Command::ResonanceScan(a) => (ExperimentKind::ResonanceScan, a),
        Command::Strichartz(a) => (ExperimentKind::Strichartz, a),
        Command::Bilinear(a) => (ExperimentKind::Bilinear, a),
        Command::Trilinear(a) => (ExperimentKind::Trilinear, a),
        Command::VnormSelftest(a) => (ExperimentKind::VnormSelftest, a),
        Command::Plot(a) => return plot(a),
    };
    experiment(kind, args)
}
