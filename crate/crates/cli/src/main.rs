use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adamtype::harness::{
    check, check_exit_code, exit_code, run, run_scenario, ExperimentSpec, OptimizerSpec,
    ProblemSpec, Scenario, Suite, EXIT_NUMERIC_ABORT, EXIT_OK,
};
use adamtype::verification::SuiteSizes;
use adamtype::{Beta1Schedule, Beta2Schedule, Error, StepSchedule, Variant};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "adamtype",
    version,
    about = "Adam-type optimizers with convergence diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write `<out>.csv` and `<out>.json`.
    Run(RunArgs),
    /// Run a preset scenario and write its CSVs plus a certification file.
    Scenario {
        /// fig1, fig2, figA1, figA2, figA3 or figA4.
        name: String,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run property-check suites and print JSON verdicts.
    Check {
        #[arg(value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Lemmas,
    Gradients,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlphaSchedule {
    Constant,
    InverseSqrt,
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON experiment spec; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    variant: Option<String>,
    /// Constant step, or the scale of `scale / sqrt(t)`.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_enum)]
    alpha_schedule: Option<AlphaSchedule>,
    #[arg(long)]
    beta1: Option<f64>,
    /// A constant in [0, 1) or `inverse_t` for `1 - 1/t`.
    #[arg(long)]
    beta2: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    record_every: Option<usize>,
    /// Output path prefix.
    #[arg(long)]
    out: Option<String>,
    /// Starting point, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    x1: Option<Vec<f64>>,
}

/// Prints to stdout; a closed pipe is not an error.
macro_rules! emit {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

fn bad_spec(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

fn parse_beta2(text: &str) -> Result<Beta2Schedule<f64>, Error> {
    if matches!(text, "inverse_t" | "inverse-t") {
        return Ok(Beta2Schedule::InverseT);
    }
    text.parse::<f64>()
        .map(Beta2Schedule::constant)
        .map_err(|_| {
            bad_spec(format!(
                "beta2 must be a number or `inverse_t`, got `{text}`"
            ))
        })
}

fn build_spec(args: &RunArgs) -> Result<ExperimentSpec, Error> {
    let mut spec = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            Some(ExperimentSpec::from_json(&text)?)
        }
        None => None,
    };

    if spec.is_none() {
        let problem = args
            .problem
            .clone()
            .ok_or_else(|| bad_spec("--problem is required without --config"))?;
        let variant: Variant = args
            .variant
            .as_deref()
            .ok_or_else(|| bad_spec("--variant is required without --config"))?
            .parse()?;
        let alpha = args
            .alpha
            .ok_or_else(|| bad_spec("--alpha is required without --config"))?;
        let iters = args
            .iters
            .ok_or_else(|| bad_spec("--iters is required without --config"))?;
        let mut optimizer = OptimizerSpec::new(variant, StepSchedule::constant(alpha));
        if variant.uses_beta2() {
            optimizer = optimizer.with_beta2(0.9);
        }
        spec = Some(ExperimentSpec::new(
            ProblemSpec::named(problem),
            optimizer,
            iters,
        ));
    }
    let mut spec = spec.expect("spec set above");

    if let Some(p) = &args.problem {
        if *p != spec.problem.name {
            spec.problem = ProblemSpec::named(p.clone());
        }
    }
    if let Some(v) = &args.variant {
        spec.optimizer.variant = v.parse()?;
    }
    let current_alpha = match spec.optimizer.alpha {
        StepSchedule::Constant { alpha } => Some(alpha),
        StepSchedule::InverseSqrt { scale } => Some(scale),
        StepSchedule::Table { .. } => None,
    };
    if args.alpha.is_some() || args.alpha_schedule.is_some() {
        let value = args
            .alpha
            .or(current_alpha)
            .ok_or_else(|| bad_spec("--alpha-schedule needs --alpha with a tabulated schedule"))?;
        let inverse_sqrt = match args.alpha_schedule {
            Some(AlphaSchedule::InverseSqrt) => true,
            Some(AlphaSchedule::Constant) => false,
            None => matches!(spec.optimizer.alpha, StepSchedule::InverseSqrt { .. }),
        };
        spec.optimizer.alpha = if inverse_sqrt {
            StepSchedule::inverse_sqrt(value)
        } else {
            StepSchedule::constant(value)
        };
    }
    if let Some(b1) = args.beta1 {
        spec.optimizer.beta1 = Beta1Schedule::constant(b1);
    }
    if let Some(b2) = &args.beta2 {
        spec.optimizer.beta2 = Some(parse_beta2(b2)?);
    }
    if spec.optimizer.variant.uses_beta2() && spec.optimizer.beta2.is_none() {
        spec.optimizer.beta2 = Some(Beta2Schedule::constant(0.9));
    }
    if let Some(eps) = args.epsilon {
        spec.optimizer.epsilon = eps;
    }
    if let Some(iters) = args.iters {
        spec.iters = iters;
    }
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(every) = args.record_every {
        spec.record_every = every;
    }
    if let Some(out) = &args.out {
        spec.output = Some(out.clone());
    }
    if let Some(x1) = &args.x1 {
        spec.x1 = Some(x1.clone());
    }
    spec.validate()?;
    Ok(spec)
}

fn cmd_run(args: &RunArgs) -> Result<i32, Error> {
    let spec = build_spec(args)?;
    let outcome = run(&spec)?;
    if let Some(prefix) = &spec.output {
        let (csv, json) = outcome.write(prefix.as_ref())?;
        eprintln!("wrote {} and {}", csv.display(), json.display());
    }
    emit!("{}", outcome.summary().to_json());
    Ok(match &outcome.abort {
        Some(abort) => {
            eprintln!("numeric abort: {}", abort.message);
            EXIT_NUMERIC_ABORT
        }
        None => EXIT_OK,
    })
}

fn cmd_scenario(name: &str, out: &Path) -> Result<i32, Error> {
    let scenario: Scenario = name.parse()?;
    let outcome = run_scenario(scenario)?;
    for path in outcome.write(out)? {
        eprintln!("wrote {}", path.display());
    }
    emit!(
        "{}",
        serde_json::to_string_pretty(&outcome.certification.aggregate).expect("serializable")
    );
    Ok(EXIT_OK)
}

fn cmd_check(suite: SuiteArg, seed: u64) -> Result<i32, Error> {
    let suite = match suite {
        SuiteArg::Lemmas => Suite::Lemmas,
        SuiteArg::Gradients => Suite::Gradients,
        SuiteArg::All => Suite::All,
    };
    let verdicts = check(suite, seed, &SuiteSizes::default())?;
    emit!(
        "{}",
        serde_json::to_string_pretty(&verdicts).expect("serializable")
    );
    for v in verdicts.iter().filter(|v| !v.holds) {
        eprintln!("FAILED {}: lhs {} rhs {}", v.name, v.lhs, v.rhs);
    }
    Ok(check_exit_code(&verdicts))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Scenario { name, out } => cmd_scenario(name, out),
        Command::Check { suite, seed } => cmd_check(*suite, *seed),
    };
    let code = match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
