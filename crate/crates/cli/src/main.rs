use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use stratlearn::harness::{self, Execution, ExperimentConfig, SweepAxis};

/// Online strategic classification simulator.
#[derive(Parser)]
#[command(name = "stratlearn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the trials of one configuration and write a JSON report.
    Run(Common),
    /// Sweep one axis and write a CSV table.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        axis: Axis,
        /// Comma-separated ascending values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<usize>,
    },
    /// Run the invariant suite; with --config, also audit that experiment.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        sequential: bool,
    },
    /// Print the Littlestone dimension of the configured class.
    Ldim {
        #[arg(long)]
        config: PathBuf,
    },
    /// Emit the configured instance (graph and class) as JSON.
    Build {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    emit_rounds: bool,
    /// Run trials on the calling thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    #[value(name = "T")]
    T,
    N,
    D,
}

impl From<Axis> for SweepAxis {
    fn from(a: Axis) -> Self {
        match a {
            Axis::T => SweepAxis::T,
            Axis::N => SweepAxis::N,
            Axis::D => SweepAxis::D,
        }
    }
}

/// Exit status 2: the configuration could not be loaded or does not fit.
#[derive(Debug)]
struct ConfigError(anyhow::Error);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| ConfigError(e).into())
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let config: ExperimentConfig =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    config
        .validate()
        .with_context(|| format!("validating {}", path.display()))?;
    Ok(config)
}

fn prepare(common: &Common) -> Result<ExperimentConfig> {
    config_err((|| {
        let mut config = load_config(&common.config)?;
        if let Some(seed) = common.seed {
            config.seed = seed;
        }
        if let Some(trials) = common.trials {
            config.trials = trials;
        }
        config.emit_rounds |= common.emit_rounds;
        config.validate()?;
        let instance = config.instance.build()?;
        harness::check_config(&config, &instance)?;
        Ok(config)
    })())
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run(common) => {
            let config = prepare(&common)?;
            let report = harness::run_config(&config, execution(common.sequential))?;
            let s = &report.summary;
            eprintln!(
                "trials={} mean_mistakes={:.4} se={:.4} mean_regret={:.4} se={:.4} bound={} violations={}",
                s.trials,
                s.mistakes.mean,
                s.mistakes.se,
                s.regret.mean,
                s.regret.se,
                s.bound.map(|b| format!("{b:.4}")).unwrap_or_else(|| "-".into()),
                s.invariants.total_violations()
            );
            let out = common.out.as_deref().or(config.out.as_deref());
            emit(out, &(serde_json::to_string_pretty(&report)? + "\n"))?;
            Ok(if s.invariants.total_violations() == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Sweep {
            common,
            axis,
            values,
        } => {
            let config = prepare(&common)?;
            let axis = SweepAxis::from(axis);
            config_err(harness::sweep_points(&config, axis, &values).map_err(Into::into))?;
            let rows = harness::sweep(&config, axis, &values, execution(common.sequential))?;
            let out = common.out.as_deref().or(config.out.as_deref());
            emit(out, &harness::sweep_csv(axis, &rows)?)?;
            let violations: u64 = rows
                .iter()
                .map(|r| r.summary.invariants.total_violations())
                .sum();
            Ok(if violations == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Verify {
            config,
            seed,
            out,
            sequential,
        } => {
            let extra = match &config {
                Some(path) => Some(config_err(load_config(path))?),
                None => None,
            };
            let mut report = harness::verify_invariants(seed, execution(sequential))?;
            if let Some(c) = extra {
                let run = harness::run_config(&c, execution(sequential))?;
                for (name, &checks) in &run.summary.invariants.checks {
                    report.lines.push(harness::CheckLine {
                        name: format!("config:{name}"),
                        checks,
                        violations: run.summary.invariants.violations_of(name),
                    });
                }
            }
            let mut text = String::new();
            for line in &report.lines {
                let status = if line.passed() { "PASS" } else { "FAIL" };
                text += &format!(
                    "{status} {} checks={} violations={}\n",
                    line.name, line.checks, line.violations
                );
            }
            emit(out.as_deref(), &text)?;
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Ldim { config } => {
            let config = config_err(load_config(&config))?;
            let instance = config_err(config.instance.build().map_err(Into::into))?;
            println!(
                "ldim={} members={} vertices={} max_degree={}",
                instance.class.ldim_full(),
                instance.class.len(),
                instance.graph.vertex_count(),
                instance.graph.max_degree()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Build { config, out } => {
            let config = config_err(load_config(&config))?;
            let instance = config_err(config.instance.build().map_err(Into::into))?;
            emit(
                out.as_deref(),
                &(serde_json::to_string(&instance.to_file())? + "\n"),
            )?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
