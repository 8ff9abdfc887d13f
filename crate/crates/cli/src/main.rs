//! `schauder`: Faber-Schauder pipelines from the command line. Every
//! subcommand writes CSV or key-value text plus `meta.txt` into the output
//! directory.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::OutDir;

#[derive(Debug, Parser)]
#[command(name = "schauder", version, about = "Faber-Schauder expansions on [0,1]")]
struct Cli {
    /// Output directory [default: $SCHAUDER_OUT_DIR, else ./schauder-out]
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Worker threads (0 = one per core); results do not depend on it
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

/// A series given by a named schedule or by an explicit coefficient table.
#[derive(Debug, Clone, Args)]
pub struct SeriesArgs {
    /// zero, takagi, takagi_log, sqrt_bridge, nonhoelder, power:<beta>,
    /// lacunary:<n1>,<n2>,..., random:<beta>
    #[arg(long, default_value = "takagi")]
    pub schedule: String,

    /// Explicit coefficient CSV (n,i,gamma); overrides --schedule and --depth
    #[arg(long)]
    pub table: Option<PathBuf>,

    /// Truncation depth D (levels 0..=D)
    #[arg(long, default_value_t = 30)]
    pub depth: u32,

    /// Seed for random schedules
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Constant term of the affine part
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,

    /// Slope of the affine part
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanKind {
    Holder,
    Derivative,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a series on a dyadic grid (grid.csv)
    Synth(commands::SynthArgs),
    /// Recover coefficients from a grid CSV (coefficients.csv, affine.txt)
    Analyze(commands::AnalyzeArgs),
    /// Coefficient regularity criteria (report.txt, extremes.csv)
    Regularity(commands::RegularityArgs),
    /// Pointwise Hölder or derivative scans (CSV per side, summary.txt)
    Scan(commands::ScanArgs),
    /// Compose with a polynomial, analytic patches or a power, then analyze
    Compose(commands::ComposeArgs),
    /// Build (ω^{-1} ∘ g)² for g = f² - f(x0) f and check it at x0
    Omega(commands::OmegaArgs),
    /// Dyadic cover counts of a level set and box-counting slopes
    Levelset(commands::LevelsetArgs),
    /// Sample a Brownian bridge and ensemble statistics
    Bridge(commands::BridgeArgs),
    /// Exceptional-vertex percolation Monte Carlo against the displayed bound
    Percolate(commands::PercolateArgs),
    /// Datasets of the four schedule figures (fig1.csv .. fig4.csv)
    Figures(commands::FiguresArgs),
}

fn error_line(kind: &str, msg: &str) {
    eprintln!("error: kind={kind} msg={msg:?}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.render().to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            error_line("usage", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            error_line("threads", &e.to_string());
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error_line(e.kind(), &e.to_string());
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> schauder::Result<()> {
    let out = OutDir::resolve(cli.out_dir)?;
    match cli.command {
        Command::Synth(a) => commands::synth(&out, &a),
        Command::Analyze(a) => commands::analyze(&out, &a),
        Command::Regularity(a) => commands::regularity(&out, &a),
        Command::Scan(a) => commands::scan(&out, &a),
        Command::Compose(a) => commands::compose(&out, &a),
        Command::Omega(a) => commands::omega(&out, &a),
        Command::Levelset(a) => commands::levelset(&out, &a),
        Command::Bridge(a) => commands::bridge(&out, &a),
        Command::Percolate(a) => commands::percolate(&out, &a),
        Command::Figures(a) => commands::figures(&out, &a),
    }
}
