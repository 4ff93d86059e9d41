//! Workbench CLI for exact EHVI computation.
//!
//! Exit codes: 0 success / verification pass, 1 validation or parse error,
//! 2 verification threshold failure, 3 quadrature non-convergence.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ehvi::workbench::{
    self, front_from_spec, parse_f64_list, predictors_from_json, ComputeError, ComputeRequest,
    Scheme,
};
use ehvi::GaussianPredictor;

#[derive(Parser)]
#[command(name = "ehvi", version, about = "Expected hypervolume improvement workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FrontArgs {
    /// Front source: paper3, diag:N, sphere:N[:RADIUS], or a CSV file path
    #[arg(long)]
    front: String,
    /// Reference point (comma-separated); overrides any CSV header
    #[arg(long, value_name = "COORDS")]
    r#ref: Option<String>,
    /// Negate all coordinates on input (minimization orientation)
    #[arg(long)]
    minimize: bool,
    /// Seed for generators and stochastic schemes
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct PredictorArgs {
    /// Predictor mean (comma-separated)
    #[arg(long, value_name = "COORDS")]
    mu: Option<String>,
    /// Predictor standard deviations (comma-separated)
    #[arg(long, value_name = "COORDS")]
    sigma: Option<String>,
    /// JSON file with {"mu": [...], "sigma": [...]} or an array of them
    #[arg(long, value_name = "FILE")]
    predictors: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute EHVI values with a chosen scheme
    Compute {
        /// One of: 2d-naive, 2d-fast, 8term, 5term, 2term, slice, mc, quadrature
        #[arg(long)]
        scheme: String,
        #[command(flatten)]
        front: FrontArgs,
        #[command(flatten)]
        predictor: PredictorArgs,
        /// Monte Carlo trials
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        /// Write the report to a file instead of stdout
        #[arg(long)]
        out: Option<String>,
    },
    /// Run every applicable exact scheme plus Monte Carlo and gate on agreement
    Verify {
        #[command(flatten)]
        front: FrontArgs,
        #[command(flatten)]
        predictor: PredictorArgs,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
    },
    /// Time schemes across front sizes; emits CSV
    Bench {
        /// Comma-separated front sizes, e.g. 10,20,40
        #[arg(long)]
        sizes: String,
        /// Comma-separated scheme list
        #[arg(long)]
        scheme: String,
        /// Repetitions per (scheme, n)
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Monte Carlo trials when the scheme list includes mc
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Write the CSV to a file instead of stdout
        #[arg(long)]
        out: Option<String>,
    },
    /// Generate a front and write it as CSV
    Gen {
        #[command(flatten)]
        front: FrontArgs,
        /// Write the CSV to a file instead of stdout
        #[arg(long)]
        out: Option<String>,
    },
}

fn parse_ref(arg: &Option<String>) -> Result<Option<Vec<f64>>, String> {
    arg.as_deref().map(parse_f64_list).transpose()
}

fn resolve_predictors(args: &PredictorArgs) -> Result<Vec<GaussianPredictor>, String> {
    match (&args.predictors, &args.mu, &args.sigma) {
        (Some(path), None, None) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
            predictors_from_json(&text).map_err(|e| e.to_string())
        }
        (None, Some(mu), Some(sigma)) => {
            let mu = parse_f64_list(mu)?;
            let sigma = parse_f64_list(sigma)?;
            GaussianPredictor::new(mu, sigma)
                .map(|g| vec![g])
                .map_err(|e| e.to_string())
        }
        _ => Err("give either --mu and --sigma, or --predictors".into()),
    }
}

/// --minimize negates points and reference on input; predictor means flip
/// with them so the reported EHVI is orientation-invariant.
fn orient_predictors(gs: Vec<GaussianPredictor>, minimize: bool) -> Vec<GaussianPredictor> {
    if !minimize {
        return gs;
    }
    gs.into_iter()
        .map(|g| {
            GaussianPredictor::new(g.mu().iter().map(|m| -m).collect(), g.sigma().to_vec())
                .unwrap()
        })
        .collect()
}

fn emit(text: &str, out: &Option<String>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{path}: {e}")),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

enum Failure {
    Invalid(String),
    VerifyThreshold,
    QuadratureStalled(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::VerifyThreshold => 2,
            Failure::QuadratureStalled(_) => 3,
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let invalid = |m: String| Failure::Invalid(m);
    match cli.command {
        Command::Compute {
            scheme,
            front,
            predictor,
            trials,
            out,
        } => {
            let scheme: Scheme = scheme.parse().map_err(|e: workbench::WorkbenchError| {
                invalid(e.to_string())
            })?;
            let reference = parse_ref(&front.r#ref).map_err(invalid)?;
            let f = front_from_spec(
                &front.front,
                front.seed,
                reference.as_deref(),
                front.minimize,
            )
            .map_err(|e| invalid(e.to_string()))?;
            let predictors = orient_predictors(
                resolve_predictors(&predictor).map_err(invalid)?,
                front.minimize,
            );
            let req = ComputeRequest {
                front: f,
                predictors,
                scheme,
                trials,
                seed: front.seed,
            };
            let output = workbench::run_compute(&req).map_err(|e| match e {
                ComputeError::Quadrature(q) => Failure::QuadratureStalled(q.to_string()),
                ComputeError::Invalid(e) => invalid(e.to_string()),
            })?;
            emit(&output.render(), &out).map_err(invalid)
        }
        Command::Verify {
            front,
            predictor,
            trials,
        } => {
            let reference = parse_ref(&front.r#ref).map_err(invalid)?;
            let f = front_from_spec(
                &front.front,
                front.seed,
                reference.as_deref(),
                front.minimize,
            )
            .map_err(|e| invalid(e.to_string()))?;
            let predictors = orient_predictors(
                resolve_predictors(&predictor).map_err(invalid)?,
                front.minimize,
            );
            if predictors.len() != 1 {
                return Err(invalid("verify takes exactly one predictor".into()));
            }
            let report = workbench::run_verify(&f, &predictors[0], trials, front.seed)
                .map_err(|e| invalid(e.to_string()))?;
            print!("{}", report.render());
            if report.pass {
                Ok(())
            } else {
                Err(Failure::VerifyThreshold)
            }
        }
        Command::Bench {
            sizes,
            scheme,
            reps,
            seed,
            trials,
            out,
        } => {
            let sizes: Vec<usize> = sizes
                .split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<usize>()
                        .map_err(|_| invalid(format!("'{tok}' is not a size")))
                })
                .collect::<Result<_, _>>()?;
            let schemes: Vec<Scheme> = scheme
                .split(',')
                .map(|s| s.trim().parse())
                .collect::<Result<_, workbench::WorkbenchError>>()
                .map_err(|e| invalid(e.to_string()))?;
            let report = workbench::run_bench(&sizes, &schemes, reps, seed, trials)
                .map_err(|e| invalid(e.to_string()))?;
            emit(&report.to_csv(), &out).map_err(invalid)
        }
        Command::Gen { front, out } => {
            let reference = parse_ref(&front.r#ref).map_err(invalid)?;
            let f = front_from_spec(
                &front.front,
                front.seed,
                reference.as_deref(),
                front.minimize,
            )
            .map_err(|e| invalid(e.to_string()))?;
            emit(&workbench::front_to_csv(&f), &out).map_err(invalid)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                // clap would exit 2; the workbench contract reserves 2 for
                // verification failures, so argument errors map to 1.
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Invalid(m) => eprintln!("error: {m}"),
                Failure::VerifyThreshold => eprintln!("verification thresholds violated"),
                Failure::QuadratureStalled(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
