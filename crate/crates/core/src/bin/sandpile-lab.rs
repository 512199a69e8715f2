use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sandpile_lab::abelian_groups::AbelianGroup;
use sandpile_lab::cohen_lenstra::constants_table;
use sandpile_lab::experiment::{
    parse_model, run_distribution, run_event_rates, run_moment, trial_digraph, Event, ExperimentConfig,
    ExperimentError, ExperimentReport,
};
use sandpile_lab::oracle;
use sandpile_lab::random_digraph::Digraph;
use sandpile_lab::sandpile::{profile, SandpileError, SandpileProfile};

#[derive(Parser)]
#[command(name = "sandpile-lab", version, about = "Sandpile groups of random digraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the limiting constants with rigorous error bounds.
    Constants {
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Primes for the per-prime tables.
        #[arg(long, value_delimiter = ',', default_value = "2,3,5")]
        primes: Vec<u64>,
        #[command(flatten)]
        output: Output,
    },
    /// Sample one digraph and print it with its sandpile groups.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "bernoulli")]
        model: String,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Distribution of the Sylow part at the given primes.
    Dist {
        #[command(flatten)]
        common: ExperimentArgs,
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        /// Exponents above this are lumped into "large".
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Mean number of surjections onto a target group.
    Moment {
        #[command(flatten)]
        common: ExperimentArgs,
        #[arg(long)]
        modulus: Option<u64>,
        /// Comma-separated cyclic orders, or `1` for the trivial group.
        #[arg(long)]
        group: Option<String>,
    },
    /// Frequency of an event.
    Rate {
        #[command(flatten)]
        common: ExperimentArgs,
        /// coeulerian, cyclic, eulerian, infinite, not_strongly_connected, or all.
        #[arg(long, default_value = "coeulerian")]
        event: String,
    },
    /// Run the brute-force oracle suites.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct Output {
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment configuration; flags given alongside override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trials: Option<u64>,
    /// bernoulli, uniform:K, or a JSON model file.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[command(flatten)]
    output: Output,
}

enum Failure {
    Usage(String),
    Consistency(String),
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        if e.is_consistency_failure() {
            Failure::Consistency(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<SandpileError> for Failure {
    fn from(e: SandpileError) -> Self {
        ExperimentError::from(e).into()
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

impl ExperimentArgs {
    fn config(&self) -> Result<ExperimentConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)?,
            None => {
                let n = self.n.ok_or_else(|| usage("--n is required without --config"))?;
                let trials = self.trials.ok_or_else(|| usage("--trials is required without --config"))?;
                let model = parse_model(self.model.as_deref().unwrap_or("bernoulli"), self.q)?;
                ExperimentConfig::new(n, trials, model, self.seed.unwrap_or(0))
            }
        };
        if self.config.is_some() {
            if let Some(n) = self.n {
                cfg.n = n;
            }
            if let Some(t) = self.trials {
                cfg.trials = t;
            }
            if self.model.is_some() || self.q.is_some() {
                cfg.model = parse_model(self.model.as_deref().unwrap_or("bernoulli"), self.q)?;
            }
            if let Some(s) = self.seed {
                cfg.seed = s;
            }
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        Ok(cfg)
    }
}

fn parse_group(s: &str) -> Result<AbelianGroup, Failure> {
    let s = s.trim();
    if s == "1" || s == "trivial" {
        return Ok(AbelianGroup::trivial());
    }
    let orders = s
        .split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|_| usage(format!("bad cyclic order {t:?} in --group"))))
        .collect::<Result<Vec<_>, _>>()?;
    AbelianGroup::from_cyclic_orders(&orders).map_err(|e| usage(e.to_string()))
}

fn emit(output: &Output, text: &str) -> Result<(), Failure> {
    match &output.out {
        Some(path) => std::fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(output: &Output, value: &T) -> Result<(), Failure> {
    if output.format == Format::Csv {
        return Err(usage("csv output is only available for dist, moment and rate"));
    }
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    emit(output, &text)
}

fn emit_report(output: &Output, report: &ExperimentReport) -> Result<(), Failure> {
    let text = match output.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    emit(output, &text)
}

#[derive(Serialize)]
struct SampleOutput {
    digraph: Digraph,
    profile: SandpileProfile,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Constants { tol, primes, output } => {
            let table = constants_table(tol, &primes).map_err(|e| usage(e.to_string()))?;
            emit_json(&output, &table)
        }
        Command::Sample { n, model, q, seed, output } => {
            let cfg = ExperimentConfig::new(n, 1, parse_model(&model, q)?, seed);
            if n < 2 {
                return Err(usage("--n must be at least 2"));
            }
            let digraph = trial_digraph(&cfg, 0);
            let profile = profile(&digraph)?;
            emit_json(&output, &SampleOutput { digraph, profile })
        }
        Command::Dist { common, primes, depth } => {
            let mut cfg = common.config()?;
            if let Some(p) = primes {
                cfg.primes = Some(p.into_iter().collect());
            }
            if let Some(d) = depth {
                cfg.depth = d;
            }
            emit_report(&common.output, &run_distribution(&cfg)?)
        }
        Command::Moment { common, modulus, group } => {
            let mut cfg = common.config()?;
            if modulus.is_some() {
                cfg.modulus = modulus;
            }
            if let Some(g) = group {
                cfg.group = Some(parse_group(&g)?);
            }
            emit_report(&common.output, &run_moment(&cfg)?)
        }
        Command::Rate { common, event } => {
            let cfg = common.config()?;
            let events = if event == "all" {
                Event::ALL.to_vec()
            } else {
                let e = Event::parse(&event).ok_or_else(|| usage(format!("unknown event {event:?}")))?;
                vec![e]
            };
            emit_report(&common.output, &run_event_rates(&cfg, &events)?)
        }
        Command::Verify { seed, output } => {
            let results = oracle::run_all(seed);
            emit_json(&output, &results)?;
            match results.iter().find(|r| !r.passed()) {
                Some(r) => Err(Failure::Consistency(format!("oracle suite {} failed {} of {} cases", r.name, r.failures, r.cases))),
                None => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Consistency(msg)) => {
            eprintln!("consistency failure: {msg}");
            ExitCode::from(2)
        }
    }
}
