//! `gptdyn`: analyze branch-local dynamics of single-system probabilistic
//! theories from the command line.
//!
//! ```text
//! gptdyn solve --builtin gbit --branch low
//! gptdyn analyze --theory my_theory.json --format json
//! gptdyn verify --builtin qubit --branch up --transform rotation.json
//! ```

mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gptdyn_core::mub::is_mutually_unbiased;
use gptdyn_core::restriction::{check_quantum_like_uncertainty, classify_restriction, Uncertainty};
use gptdyn_core::solver::{
    allowed_transform_set, compare_monotonicity, verify_main_theorem, verify_transformation, Transformation,
};
use gptdyn_core::theory::{builtin, load_theory_file, TheorySpec, BUILTIN_NAMES};
use gptdyn_core::Error;

use render::{Output, Report};

#[derive(Parser)]
#[command(
    name = "gptdyn",
    version,
    about = "Branch-locality analysis of probabilistic theories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Conditional-set freedoms and the restriction class.
    Analyze(Common),
    /// Allowed transformation set per branch.
    Solve(Common),
    /// Check one transformation against the branch-locality constraints.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Transformation file: {"rows": [["p/q", ...], ...]} in minimal representation.
        #[arg(long)]
        transform: PathBuf,
    },
    /// Mutual unbiasedness of a set of measurements.
    Mub {
        #[command(flatten)]
        common: Common,
        /// Comma-separated measurement labels; defaults to every measurement.
        #[arg(long, value_delimiter = ',')]
        measurements: Vec<String>,
    },
    /// Check the main theorem, optionally against a second theory.
    Theorem {
        #[command(flatten)]
        common: Common,
        /// Built-in theory to compare allowed-set dimensions with.
        #[arg(long, conflicts_with = "compare_theory")]
        compare_builtin: Option<String>,
        /// Theory config to compare allowed-set dimensions with.
        #[arg(long)]
        compare_theory: Option<PathBuf>,
    },
    /// Run the full built-in suite.
    Demo {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args)]
struct Common {
    /// Built-in theory name.
    #[arg(long, conflicts_with = "theory", required_unless_present = "theory")]
    builtin: Option<String>,
    /// Theory config file (JSON).
    #[arg(long)]
    theory: Option<PathBuf>,
    /// Acting branch: `up`/`low` for binary branch measurements, else the outcome index.
    #[arg(long)]
    branch: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Failures mapped to exit codes: bad input is 2, failed checks are 1.
enum Failure {
    Input(Error),
    Findings(Output),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

fn load(common: &Common) -> Result<TheorySpec, Error> {
    match (&common.builtin, &common.theory) {
        (Some(name), _) => builtin(name),
        (None, Some(path)) => load_theory_file(path),
        (None, None) => unreachable!("clap requires one source"),
    }
}

fn branches(t: &TheorySpec, label: &Option<String>) -> Result<Vec<usize>, Error> {
    match label {
        Some(l) => Ok(vec![t.parse_branch(l)?]),
        None => Ok((0..t.n_branches()).collect()),
    }
}

fn run(cli: Cli) -> Result<Output, Failure> {
    match cli.command {
        Command::Analyze(common) => {
            let t = load(&common)?;
            Ok(Output::new(
                common.format == Format::Json,
                Report::Restriction(classify_restriction(&t)?),
            ))
        }
        Command::Solve(common) => {
            let t = load(&common)?;
            let reports = branches(&t, &common.branch)?
                .into_iter()
                .map(|b| allowed_transform_set(&t, b).map(|s| s.report(&t)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Output::new(
                common.format == Format::Json,
                Report::solve(reports, common.branch.is_some()),
            ))
        }
        Command::Verify { common, transform } => {
            let t = load(&common)?;
            let text =
                std::fs::read_to_string(&transform).map_err(|e| Error::Io(format!("{}: {e}", transform.display())))?;
            let tr = Transformation::from_json(&text)?;
            let reports = branches(&t, &common.branch)?
                .into_iter()
                .map(|b| verify_transformation(&t, &tr, b))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Output::new(
                common.format == Format::Json,
                Report::verify(reports, common.branch.is_some()),
            ))
        }
        Command::Mub { common, measurements } => {
            let t = load(&common)?;
            let labels: Vec<&str> = if measurements.is_empty() {
                t.measurements().iter().map(|m| m.label.as_str()).collect()
            } else {
                measurements.iter().map(String::as_str).collect()
            };
            Ok(Output::new(
                common.format == Format::Json,
                Report::Mub(is_mutually_unbiased(&t, &labels)?),
            ))
        }
        Command::Theorem {
            common,
            compare_builtin,
            compare_theory,
        } => {
            let t = load(&common)?;
            let theorem = verify_main_theorem(&t)?;
            let other = match (compare_builtin, compare_theory) {
                (Some(name), _) => Some(builtin(&name)?),
                (None, Some(path)) => Some(load_theory_file(path)?),
                (None, None) => None,
            };
            let monotonicity = other.map(|o| compare_monotonicity(&t, &o)).transpose()?;
            let passed = theorem.passed && monotonicity.as_ref().is_none_or(|m| m.holds);
            let theorem = Box::new(theorem);
            let report = match monotonicity {
                Some(monotonicity) => Report::TheoremCompared { theorem, monotonicity },
                None => Report::Theorem(theorem),
            };
            let out = Output::new(common.format == Format::Json, report);
            if passed {
                Ok(out)
            } else {
                Err(Failure::Findings(out))
            }
        }
        Command::Demo { format } => {
            let demo = run_demo()?;
            let passed = demo.passed;
            let out = Output::new(format == Format::Json, Report::Demo(Box::new(demo)));
            if passed {
                Ok(out)
            } else {
                Err(Failure::Findings(out))
            }
        }
    }
}

fn run_demo() -> Result<render::DemoReport, Error> {
    let mut theories = Vec::new();
    for name in BUILTIN_NAMES {
        let t = builtin(name)?;
        theories.push(render::DemoEntry {
            description: render::describe_builtin(name).to_string(),
            restriction: classify_restriction(&t)?,
            theorem: verify_main_theorem(&t)?,
        });
    }
    let monotonicity = compare_monotonicity(&builtin("gbit")?, &builtin("octahedron")?)?;
    let qubit_mub = is_mutually_unbiased(&builtin("qubit")?, &["X", "Y", "Z"])?;
    let gbit_mub = is_mutually_unbiased(&builtin("gbit")?, &["X", "Z"])?;
    let qubit_uncertainty = check_quantum_like_uncertainty(&builtin("qubit")?, &["Z", "X", "Y"])?;
    let gbit_uncertainty = check_quantum_like_uncertainty(&builtin("gbit")?, &["Z", "X"])?;
    let passed = theories.iter().all(|e| e.theorem.passed)
        && monotonicity.holds
        && qubit_uncertainty.holds()
        && matches!(gbit_uncertainty, Uncertainty::Fails { .. });
    Ok(render::DemoReport {
        theories,
        monotonicity,
        mub: vec![qubit_mub, gbit_mub],
        uncertainty: vec![
            render::NamedUncertainty {
                theory: "qubit".into(),
                result: qubit_uncertainty,
            },
            render::NamedUncertainty {
                theory: "gbit".into(),
                result: gbit_uncertainty,
            },
        ],
        passed,
    })
}

/// Writes the report; a closed pipe downstream is not an error.
fn emit(out: &Output) {
    let _ = write!(std::io::stdout().lock(), "{out}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            emit(&out);
            ExitCode::SUCCESS
        }
        Err(Failure::Findings(out)) => {
            emit(&out);
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("gptdyn: {e}");
            ExitCode::from(2)
        }
    }
}
