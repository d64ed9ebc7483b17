use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use slewing_core::analysis::{Analysis, RingMode, RunConfig, RunSummary, SolveKind, RUN_CONFIG_SCHEMA};
use slewing_core::geometry::Ring;
use slewing_core::ring::export_matrix;
use slewing_core::Error;

const EXIT_NOT_CONVERGED: u8 = 2;
const EXIT_CONFIG: u8 = 3;
const EXIT_OTHER: u8 = 1;

/// Ball load distribution of four-point contact slewing bearings.
#[derive(Debug, Parser)]
#[command(name = "slewing", version)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Condense both rings and write their stiffness matrices.
    RingStiffness {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Idling and, with `--mode load`, loaded equilibria.
    Solve {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = SolveMode::Load)]
        mode: SolveMode,
        #[command(flatten)]
        rings: RingArgs,
        /// Run every load case and exit 0 even if some solves fail.
        #[arg(long)]
        keep_going: bool,
    },
    /// Axial force and stiffness over the configured displacement grid.
    StiffnessCurve {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        rings: RingArgs,
        #[arg(long)]
        keep_going: bool,
    },
    /// Monte Carlo bands over the configured preload grid.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        rings: RingArgs,
        #[arg(long)]
        keep_going: bool,
    },
    /// Check a configuration without solving, or print the schema.
    ValidateConfig {
        config: Option<PathBuf>,
        /// Print the configuration JSON Schema and exit.
        #[arg(long, conflicts_with = "config")]
        print_schema: bool,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Run configuration (JSON).
    config: PathBuf,
    /// Overrides `output_dir` of the configuration.
    #[arg(short, long)]
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(multiple = false)]
struct RingArgs {
    /// Rigid rings (overrides the configured mode).
    #[arg(long)]
    rigid: bool,
    /// Elastic rings (overrides the configured mode).
    #[arg(long)]
    flexible: bool,
}

impl RingArgs {
    fn mode(&self, configured: RingMode) -> RingMode {
        match (self.rigid, self.flexible) {
            (true, _) => RingMode::Rigid,
            (_, true) => RingMode::Flexible,
            _ => configured,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SolveMode {
    Idle,
    Load,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Config(Error),
    Run(Error),
    NotConverged,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

fn load(run: &RunArgs) -> Result<Analysis, Failure> {
    let mut cfg = RunConfig::load(&run.config).map_err(Failure::Config)?;
    if let Some(dir) = &run.output_dir {
        cfg.output_dir = dir.clone();
    }
    let analysis = Analysis::new(cfg).map_err(Failure::Config)?;
    let out = analysis.output_dir();
    std::fs::create_dir_all(out).map_err(|e| Failure::Run(Error::Io {
        path: out.display().to_string(),
        source: e,
    }))?;
    Ok(analysis)
}

fn finish(analysis: &Analysis, mut summary: RunSummary, keep_going: bool) -> Result<(), Failure> {
    let path = analysis.output_dir().join("summary.json");
    summary.write(&path)?;
    println!("summary: {}", path.display());
    if summary.ok || keep_going {
        Ok(())
    } else {
        Err(Failure::NotConverged)
    }
}

fn ring_stiffness(run: &RunArgs) -> Result<(), Failure> {
    let analysis = load(run)?;
    for ring in [Ring::Outer, Ring::Inner] {
        let k = analysis.ring_matrix(ring)?;
        let path = analysis.output_dir().join(format!("ring_{}.kmat", ring.as_str()));
        export_matrix(&k, &path)?;
        let soft = k.softest_deforming_stiffness().map_or(String::from("-"), |v| format!("{v:.6e}"));
        println!(
            "{:<5} ring: {} dof, bandwidth {}, softest deforming stiffness {soft} N/mm -> {}",
            ring.as_str(),
            k.dimension(),
            k.bandwidth(),
            path.display()
        );
    }
    Ok(())
}

fn solve(run: &RunArgs, mode: SolveMode, rings: &RingArgs, keep_going: bool) -> Result<(), Failure> {
    let analysis = load(run)?;
    let ring_mode = rings.mode(analysis.config.mode);
    let kind = match mode {
        SolveMode::Idle => SolveKind::Idle,
        SolveMode::Load => SolveKind::Load,
    };
    let mut summary = RunSummary::new();
    analysis.run_solve(ring_mode, kind, keep_going, &mut summary)?;
    println!(
        "{:<16} {:>9} {:>5} {:>6} {:>14} {:>14}",
        "case", "converged", "iter", "active", "mean_dtot_mm", "max_Q_N"
    );
    for r in &summary.solves {
        println!(
            "{:<16} {:>9} {:>5} {:>6} {:>14.6e} {:>14.6e}",
            r.name, r.ok(), r.iterations, r.active_balls, r.mean_delta_tot, r.max_force
        );
    }
    finish(&analysis, summary, keep_going)
}

fn stiffness_curve(run: &RunArgs, rings: &RingArgs, keep_going: bool) -> Result<(), Failure> {
    let analysis = load(run)?;
    let mut summary = RunSummary::new();
    analysis.run_curve(rings.mode(analysis.config.mode), &mut summary)?;
    for c in &summary.curves {
        if let Some(p) = &c.output {
            println!("{} points -> {}", c.points, p.display());
        }
    }
    finish(&analysis, summary, keep_going)
}

fn sweep(run: &RunArgs, rings: &RingArgs, keep_going: bool) -> Result<(), Failure> {
    let analysis = load(run)?;
    let mut summary = RunSummary::new();
    analysis.run_sweep(rings.mode(analysis.config.mode), &mut summary)?;
    for s in &summary.sweeps {
        if let Some(p) = &s.output {
            println!(
                "{} preloads x {} samples ({} failed) -> {}",
                s.preloads,
                s.samples,
                s.failed_samples,
                p.display()
            );
        }
    }
    finish(&analysis, summary, keep_going)
}

fn validate(config: Option<&Path>, print_schema: bool) -> Result<(), Failure> {
    if print_schema {
        print!("{RUN_CONFIG_SCHEMA}");
        return Ok(());
    }
    let Some(path) = config else {
        return Err(Failure::Config(Error::Config("no configuration given".into())));
    };
    let cfg = RunConfig::load(path).map_err(Failure::Config)?;
    cfg.validate().map_err(Failure::Config)?;
    println!("{}: ok", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match &cli.command {
        Command::RingStiffness { run } => ring_stiffness(run),
        Command::Solve {
            run,
            mode,
            rings,
            keep_going,
        } => solve(run, *mode, rings, *keep_going),
        Command::StiffnessCurve { run, rings, keep_going } => stiffness_curve(run, rings, *keep_going),
        Command::Sweep { run, rings, keep_going } => sweep(run, rings, *keep_going),
        Command::ValidateConfig { config, print_schema } => validate(config.as_deref(), *print_schema),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::NotConverged) => {
            eprintln!("error: at least one solve did not converge or violates equilibrium (see summary.json)");
            ExitCode::from(EXIT_NOT_CONVERGED)
        }
        Err(Failure::Config(e)) => {
            eprintln!("configuration error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Solver(_) => EXIT_NOT_CONVERGED,
                Error::Config(_) => EXIT_CONFIG,
                _ => EXIT_OTHER,
            })
        }
    }
}
