//! `scmarg`: merge Boolean marginal causal models from the command line.
//!
//! Exit codes: 0 success, 1 input error, 2 statistically inconsistent
//! marginals, 3 counterfactually or LP infeasible.

mod instance;
mod objective;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use scm_marginal::analysis::{and_model_reference, and_model_observations, bounds_report, Interval};
use scm_marginal::confounded::{active_constraint_count, confounded_query_bounds, ConfoundedInputs, Monotonicity};
use scm_marginal::experiment::{generic_conditionals, run_experiment, summarize, sweep, xor_conditionals};
use scm_marginal::merge::build_merge_problem;
use scm_marginal::rational::{self, parse_rational, q};
use scm_marginal::{Error, Rational};

use instance::InputError;
use output::Row;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Pretty,
}

#[derive(Debug, Parser)]
#[command(name = "scmarg", version, about = "Merge marginal causal models over X -> Z <- Y")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bounds and projected polygon for one instance file.
    Merge {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "pretty")]
        format: Format,
        /// Also write a JSON report to this path.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Table of the AND-model example over a list of theta values.
    ExampleAnd {
        /// Comma-separated theta values in [1/2, 1); defaults to 20 values
        /// evenly spaced strictly inside (1/2, 1).
        #[arg(long, value_delimiter = ',')]
        theta: Vec<String>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded Monte-Carlo study over random joint-form instances.
    Experiment {
        #[arg(long, default_value_t = 1000)]
        n: u64,
        #[arg(long, default_value = "1")]
        alpha: String,
        #[arg(long, default_value = "1")]
        beta: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Add a per-trial wall time column (makes output run-dependent).
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep P(X=1), P(Y=1) over a grid; one JSON line per cell.
    Sweep {
        /// `generic`, `xor`, or four values P(Z=1|x,y) for xy = 00,01,10,11.
        #[arg(long, default_value = "generic")]
        conditionals: String,
        #[arg(long, default_value_t = 9)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bounds on a linear objective under hidden confounding.
    Confounded {
        input: PathBuf,
        #[arg(long)]
        do_x: Option<PathBuf>,
        #[arg(long)]
        do_y: Option<PathBuf>,
        #[arg(long)]
        monotonic_x: bool,
        #[arg(long)]
        monotonic_y: bool,
        #[arg(long, default_value = "pa(0)")]
        objective: String,
        #[arg(long, value_enum, default_value = "pretty")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("{0}")]
    Model(#[from] Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot write CSV: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        let model = match self {
            CliError::Model(e) | CliError::Input(InputError::Model(e)) => e,
            _ => return 1,
        };
        match model {
            Error::StatisticallyInconsistent { .. } => 2,
            Error::CounterfactuallyInfeasible | Error::Infeasible | Error::EmptyPolytope => 3,
            _ => 1,
        }
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn positive(name: &str, s: &str) -> Result<f64, Error> {
    let v = parse_rational(s)?;
    if v <= Rational::default() {
        return Err(Error::Parse(format!("{name} must be positive, got {s}")));
    }
    Ok(rational::to_f64(&v))
}

fn cmd_merge(input: PathBuf, format: Format, json: Option<PathBuf>, out: Option<PathBuf>) -> Result<(), CliError> {
    let (obs_x, obs_y) = instance::load_instance(&input)?.observations()?;
    let problem = build_merge_problem(&obs_x, &obs_y)?;
    let report = bounds_report(&problem)?;
    let unique = |iv: &Interval, fam: &scm_marginal::scm::MarginalFamily| {
        (iv.lo == iv.hi).then(|| fam.response_vector(&iv.lo)).transpose()
    };
    let va = unique(&report.lambda_a_merged, &problem.family_a)?;
    let vb = unique(&report.lambda_b_merged, &problem.family_b)?;
    if let Some(path) = json {
        let value = output::json_report(&report, va.as_ref(), vb.as_ref());
        std::fs::write(path, format!("{value:#}\n"))?;
    }
    let text = match format {
        Format::Pretty => output::pretty_report(&report, va.as_ref(), vb.as_ref()),
        Format::Csv => {
            let mut row = Row::default();
            output::report_columns(&mut row, &report);
            row.text("audit_ok", report.is_nested());
            output::write_csv(&[row])?
        }
    };
    emit(&text, &out)
}

fn cmd_example_and(theta: Vec<String>, format: Format, out: Option<PathBuf>) -> Result<(), CliError> {
    let thetas: Vec<Rational> = if theta.is_empty() {
        (1..=20).map(|i| q(1, 2) + q(i, 42)).collect()
    } else {
        theta.iter().map(|s| parse_rational(s.trim())).collect::<Result<_, _>>()?
    };
    let mut rows = Vec::new();
    let mut lines = String::new();
    for t in &thetas {
        let reference = and_model_reference(t)?;
        let (obs_x, obs_y) = and_model_observations(t)?;
        let report = bounds_report(&build_merge_problem(&obs_x, &obs_y)?)?;
        let audit = report.lambda_a_merged == reference.lambda_a_interval
            && report.lambda_b_merged == Interval::point(reference.lambda_b_star.clone())
            && report.is_nested();
        let mut row = Row::default();
        row.num("theta", t)
            .num("lambda_b_star", &reference.lambda_b_star)
            .interval("lambda_a_prior", &report.lambda_a_prior)
            .interval("lambda_a_merged", &report.lambda_a_merged)
            .interval("lambda_a_reference", &reference.lambda_a_interval)
            .text("audit_ok", audit);
        rows.push(row);
        lines.push_str(&format!(
            "theta = {}: lambda_B* = {}, merged lambda_A = [{}, {}]\n",
            rational::exact(t),
            rational::exact(&reference.lambda_b_star),
            rational::exact(&report.lambda_a_merged.lo),
            rational::exact(&report.lambda_a_merged.hi),
        ));
    }
    let text = match format {
        Format::Csv => output::write_csv(&rows)?,
        Format::Pretty => lines,
    };
    emit(&text, &out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_experiment(
    n: u64,
    alpha: String,
    beta: String,
    seed: u64,
    format: Format,
    timing: bool,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    if n == 0 {
        return Err(Error::Parse("--n must be at least 1".into()).into());
    }
    let (a, b) = (positive("alpha", &alpha)?, positive("beta", &beta)?);
    let records = run_experiment(n, a, b, seed)?;
    let summary = summarize(&records);
    let text = match format {
        Format::Pretty => output::pretty_summary(&summary),
        Format::Csv => {
            let mut rows: Vec<Row> = records.iter().map(|r| output::trial_row(r, timing)).collect();
            rows.push(output::summary_row(&summary, &records, seed));
            output::write_csv(&rows)?
        }
    };
    emit(&text, &out)
}

fn cmd_sweep(conditionals: String, grid: usize, out: Option<PathBuf>) -> Result<(), CliError> {
    let table = match conditionals.trim() {
        "generic" => generic_conditionals(),
        "xor" => xor_conditionals(),
        other => {
            let values: Vec<Rational> = other.split(',').map(|s| parse_rational(s.trim())).collect::<Result<_, _>>()?;
            <[Rational; 4]>::try_from(values)
                .map_err(|v| Error::Parse(format!("expected four conditionals, got {}", v.len())))?
        }
    };
    if grid == 0 {
        return Err(Error::Parse("--grid must be at least 1".into()).into());
    }
    let frames = sweep(&table, grid)?;
    let mut text = String::new();
    for (i, f) in frames.iter().enumerate() {
        text.push_str(&output::sweep_line(i, f));
        text.push('\n');
    }
    emit(&text, &out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_confounded(
    input: PathBuf,
    do_x: Option<PathBuf>,
    do_y: Option<PathBuf>,
    monotonic: Monotonicity,
    objective: String,
    format: Format,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let (alpha, beta) = instance::load_observational(&input)?;
    let inputs = ConfoundedInputs {
        alpha,
        beta,
        alpha_iv: do_x.map(|p| instance::load_interventional(&p)).transpose()?,
        beta_iv: do_y.map(|p| instance::load_interventional(&p)).transpose()?,
        monotonic,
    };
    let o = objective::parse_objective(&objective, &inputs)?;
    let count = active_constraint_count(&inputs);
    let (lo, hi) = match confounded_query_bounds(&inputs, &o) {
        Ok(b) => b,
        Err(e @ Error::Infeasible) => {
            let text = match format {
                Format::Pretty => format!("status: infeasible\nequality constraints: {count}\n"),
                Format::Csv => {
                    let mut row = Row::default();
                    row.text("objective", &objective).text("status", "infeasible").text("equality_constraints", count);
                    output::write_csv(&[row])?
                }
            };
            emit(&text, &out)?;
            return Err(e.into());
        }
        Err(e) => return Err(e.into()),
    };
    let text = match format {
        Format::Pretty => format!(
            "status: feasible\nequality constraints: {count}\nobjective: {objective}\nbounds: [{}, {}]\n",
            rational::exact(&lo),
            rational::exact(&hi)
        ),
        Format::Csv => {
            let mut row = Row::default();
            row.text("objective", &objective)
                .text("status", "feasible")
                .text("equality_constraints", count)
                .num("lower", &lo)
                .num("upper", &hi)
                .text("audit_ok", lo <= hi);
            output::write_csv(&[row])?
        }
    };
    emit(&text, &out)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Merge { input, format, json, out } => cmd_merge(input, format, json, out),
        Command::ExampleAnd { theta, format, out } => cmd_example_and(theta, format, out),
        Command::Experiment { n, alpha, beta, seed, format, timing, out } => {
            cmd_experiment(n, alpha, beta, seed, format, timing, out)
        }
        Command::Sweep { conditionals, grid, out } => cmd_sweep(conditionals, grid, out),
        Command::Confounded { input, do_x, do_y, monotonic_x, monotonic_y, objective, format, out } => {
            let monotonic = Monotonicity { x: monotonic_x, y: monotonic_y };
            cmd_confounded(input, do_x, do_y, monotonic, objective, format, out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
