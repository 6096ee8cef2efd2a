use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use proxlab::config::{run_experiment, ExperimentConfig};
use proxlab::operators::zoo;
use proxlab::rates::{self, Params, TheoremId};
use proxlab::subregularity::estimate_kappa;
use proxlab::suite::{verify_suite, Family, SuiteOptions};
use proxlab::{Error, Vector};

const EXIT_VERIFICATION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "proxlab",
    version,
    about = "Proximal point experiments and rate certification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write trace, certificate and verification files.
    Run {
        config: PathBuf,
        /// Output directory (overrides `output_dir` in the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in property families.
    Verify {
        #[arg(long)]
        only: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Operator ids replacing the default zoo (repeatable).
        #[arg(long = "operator")]
        operators: Vec<String>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Sample the local subregularity modulus of a zoo operator.
    EstimateKappa {
        operator: String,
        /// Comma-separated center; defaults to the operator's certified center or the origin.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        center: Option<Vec<f64>>,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the closed-form rate of a result, e.g. `rates Thm5_10 --params lambda=1,kappa=1,c=1`.
    Rates {
        theorem_id: String,
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
    },
}

fn parse_params(items: &[String]) -> Result<Params, Error> {
    items
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidSpec(format!("parameter `{item}` is not key=value")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("parameter `{item}` has a non-numeric value")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn run(config: PathBuf, out: Option<PathBuf>) -> Result<u8, Error> {
    let mut cfg = ExperimentConfig::from_file(&config)?;
    if let Some(out) = out {
        cfg.output_dir = Some(std::env::current_dir()?.join(out));
    }
    if cfg.output_dir.is_none() {
        let stem = config.file_stem().and_then(|s| s.to_str()).unwrap_or("experiment");
        cfg.output_dir = Some(PathBuf::from(format!("{stem}-out")));
    }
    let report = run_experiment(&cfg)?;
    let s = &report.trace_summary;
    println!(
        "{}: {} rows, terminal residual {:.3e}{}",
        report.operator,
        s.rows,
        s.terminal_residual,
        s.terminal_dist
            .map(|d| format!(", terminal dist {d:.3e}"))
            .unwrap_or_default()
    );
    for v in &report.verifications {
        println!(
            "{} {} ({}) K_detected={}",
            if v.overall { "PASS" } else { "FAIL" },
            v.certificate_id,
            v.metric.as_str(),
            v.k_detected.map(|k| k.to_string()).unwrap_or_else(|| "none".into())
        );
    }
    if let Some(dir) = cfg.output_path() {
        println!("wrote {}", dir.display());
    }
    Ok(if report.overall { 0 } else { EXIT_VERIFICATION })
}

fn verify(only: Option<String>, seed: u64, operators: Vec<String>, samples: usize) -> Result<u8, Error> {
    let only = only.map(|s| s.parse::<Family>()).transpose()?;
    let opts = SuiteOptions {
        seed,
        only,
        operators: (!operators.is_empty()).then_some(operators),
        samples,
    };
    let report = verify_suite(&opts);
    for o in &report.outcomes {
        println!("{o}");
    }
    match report.first_failure() {
        Some(o) => {
            eprintln!("verification failed: {}", o.family);
            Ok(EXIT_VERIFICATION)
        }
        None => Ok(0),
    }
}

fn estimate(operator: String, center: Option<Vec<f64>>, delta: f64, samples: usize, seed: u64) -> Result<u8, Error> {
    let op = zoo::lookup(&operator)?;
    let center = match center {
        Some(c) => Vector::new(c)?,
        None => op
            .subregularity()
            .map(|m| m.center.clone())
            .unwrap_or_else(|| Vector::zeros(op.dim())),
    };
    let est = estimate_kappa(&op, &center, delta, samples, seed)?;
    println!("{}", serde_json::to_string(&est).expect("estimate serializes"));
    Ok(0)
}

fn rates_cmd(theorem_id: String, params: Vec<String>) -> Result<u8, Error> {
    let id: TheoremId = theorem_id.parse()?;
    for (name, value) in rates::evaluate(id, &parse_params(&params)?)? {
        println!("{name} = {value:.17e}");
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out } => run(config, out),
        Command::Verify {
            only,
            seed,
            operators,
            samples,
        } => verify(only, seed, operators, samples),
        Command::EstimateKappa {
            operator,
            center,
            delta,
            samples,
            seed,
        } => estimate(operator, center, delta, samples, seed),
        Command::Rates { theorem_id, params } => rates_cmd(theorem_id, params),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
