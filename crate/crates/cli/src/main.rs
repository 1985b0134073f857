use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fgraph_core::environments::{write_replay, Environment, EnvironmentSpec, ReplayEnvironment};
use fgraph_core::harness::{
    run, run_seed_jsonl, sweep, verify, write_summaries_csv, write_sweep_csv, RegretSummary, RunConfig, Suite,
    SweepGrid, VerifyBudget,
};
use fgraph_core::learners::{LearnerKind, TuningOverrides};
use serde::de::DeserializeOwned;
use serde::Deserialize;

#[derive(Parser)]
#[command(name = "fgraph", version, about = "Tsallis-FTRL experiments on feedback graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(clap::Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Replace the configured seed list with this single seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Run one learner on one environment for every seed.
    Run(Common),
    /// Grid over (K, alpha, T, learner, seed) on disjoint-clique graphs.
    Sweep(Common),
    /// Run the invariant suites and print a JSON report.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Write an environment's full round sequence as a replay file.
    GenEnv(Common),
    /// Evaluate a learner against a replay file.
    Replay {
        #[command(flatten)]
        common: Common,
        /// Replay file written by `gen-env`.
        #[arg(long)]
        replay: PathBuf,
        #[arg(long, default_value = "qftrl_thm2")]
        learner: String,
        /// Independence number for the `qftrl_thm*` tunings; defaults to the replay's average.
        #[arg(long)]
        alpha: Option<f64>,
    },
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Verification,
}

impl From<fgraph_core::Error> for Failure {
    fn from(e: fgraph_core::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GenEnvConfig {
    environment: EnvironmentSpec,
    horizon: u64,
    #[serde(default)]
    seed: u64,
}

fn load<T: DeserializeOwned>(path: Option<&Path>) -> Result<T, Failure> {
    let path = path.ok_or_else(|| Failure::Config("--config is required".into()))?;
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn output(common: &Common, name: &str) -> Result<Box<dyn Write>, Failure> {
    match &common.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            Ok(Box::new(BufWriter::new(File::create(dir.join(name))?)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn write_jsonl<T: serde::Serialize>(rows: &[T], out: &mut dyn Write) -> Result<(), Failure> {
    for r in rows {
        serde_json::to_writer(&mut *out, r).map_err(|e| Failure::Config(e.to_string()))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Traces go to `rounds_<seed>.jsonl` (or stdout) in jsonl mode; the summary
/// table goes to `summary.csv` (or stdout) in csv mode, and is always
/// written when there is an output directory.
fn execute(config: &RunConfig, common: &Common) -> Result<(), Failure> {
    let summaries: Vec<RegretSummary> = match common.format {
        Format::Jsonl => {
            let mut out = Vec::new();
            for &seed in &config.seeds {
                let mut w = output(common, &format!("rounds_{seed}.jsonl"))?;
                out.push(run_seed_jsonl(config, seed, &mut w)?.summary);
            }
            out
        }
        Format::Csv => run(config)?.into_iter().map(|r| r.summary).collect(),
    };
    if common.format == Format::Csv || common.out.is_some() {
        write_summaries_csv(&summaries, output(common, "summary.csv")?)?;
    }
    for s in &summaries {
        eprintln!(
            "{} seed {}: regret {:.3} (expected {:.3}), bound {}",
            s.learner,
            s.seed,
            s.regret,
            s.expected_regret,
            s.bound.map_or("-".to_string(), |b| format!("{b:.3}"))
        );
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run(common) => {
            let mut config: RunConfig = load(common.config.as_deref())?;
            if let Some(seed) = common.seed {
                config.seeds = vec![seed];
            }
            execute(&config, &common)
        }
        Command::Sweep(common) => {
            let mut grid: SweepGrid = load(common.config.as_deref())?;
            if let Some(seed) = common.seed {
                grid.seeds = vec![seed];
            }
            let rows = sweep(&grid)?;
            match common.format {
                Format::Csv => write_sweep_csv(&rows, output(&common, "sweep.csv")?)?,
                Format::Jsonl => write_jsonl(&rows, output(&common, "sweep.jsonl")?.as_mut())?,
            }
            Ok(())
        }
        Command::Verify { common, suite } => {
            let suite: Suite = suite.parse()?;
            let mut budget: VerifyBudget = match &common.config {
                Some(p) => load(Some(p))?,
                None => VerifyBudget::default(),
            };
            if let Some(seed) = common.seed {
                budget.seed = seed;
            }
            let report = verify(suite, &budget);
            for c in &report.checks {
                eprintln!(
                    "{} {:?}/{}: worst {:.3e} vs {:.3e} over {} cases",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.suite,
                    c.check,
                    c.worst,
                    c.threshold,
                    c.cases
                );
            }
            let mut out = output(&common, "verify.json")?;
            serde_json::to_writer_pretty(&mut out, &report).map_err(|e| Failure::Config(e.to_string()))?;
            out.write_all(b"\n")?;
            out.flush()?;
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::GenEnv(common) => {
            let cfg: GenEnvConfig = load(common.config.as_deref())?;
            let mut env = cfg.environment.build(cfg.horizon, common.seed.unwrap_or(cfg.seed))?;
            write_replay(env.as_mut(), output(&common, "replay.jsonl")?)?;
            Ok(())
        }
        Command::Replay { common, replay, learner, alpha } => {
            let learner: LearnerKind = learner.parse()?;
            let file = File::open(&replay).map_err(|e| Failure::Config(format!("{}: {e}", replay.display())))?;
            let horizon = ReplayEnvironment::from_reader(BufReader::new(file))?.horizon();
            let config = RunConfig {
                learner,
                environment: EnvironmentSpec::Replay { path: replay },
                horizon,
                seeds: vec![common.seed.unwrap_or(0)],
                alpha,
                tuning: TuningOverrides::default(),
            };
            execute(&config, &common)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
