use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ssbc_cli::compare::DEFAULT_SIGMA;
use ssbc_cli::{compare, evaluate, presets, selftest, SweepError, SweepSpec};

const EXIT_COMPARE: u8 = 1;
const EXIT_SPEC: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

/// Sweeps, cross-checks and presets for the backscatter link analysis.
///
/// Set SSBC_THREADS to fix the worker count; results do not depend on it.
#[derive(Parser)]
#[command(name = "ssbc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a spec file and write CSV.
    Sweep {
        file: PathBuf,
        /// Output path; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check exact and approx values against Monte Carlo.
    Compare {
        file: PathBuf,
        /// Allowed deviation in standard errors.
        #[arg(long, default_value_t = DEFAULT_SIGMA)]
        sigma: f64,
    },
    /// Run a built-in sweep (fig2 .. fig7).
    Preset {
        name: String,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the preset's spec text instead of running it.
        #[arg(long)]
        spec: bool,
    },
    /// Run the special-function identity battery.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(code) = configure_threads() {
        return code;
    }
    match run(cli.command) {
        Ok(code) => code,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

fn configure_threads() -> Result<(), ExitCode> {
    let Ok(value) = std::env::var("SSBC_THREADS") else {
        return Ok(());
    };
    let threads: usize = match value.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => {
            eprintln!("error: SSBC_THREADS must be a positive integer, got `{value}`");
            return Err(ExitCode::from(EXIT_SPEC));
        }
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| {
            eprintln!("error: thread pool: {e}");
            ExitCode::from(EXIT_SPEC)
        })
}

type Failure = (u8, String);

fn load(path: &Path) -> Result<SweepSpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| (EXIT_SPEC, format!("{}: {e}", path.display())))?;
    SweepSpec::parse(&text).map_err(|e| (EXIT_SPEC, format!("{}: {e}", path.display())))
}

fn sweep_failure(e: SweepError) -> Failure {
    match e {
        SweepError::Spec(e) => (EXIT_SPEC, e.to_string()),
        SweepError::Eval(e) => (EXIT_NUMERICAL, e.to_string()),
    }
}

fn emit(csv: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, csv).map_err(|e| (EXIT_SPEC, format!("{}: {e}", path.display()))),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::Sweep { file, out } => {
            let spec = load(&file)?;
            let table = evaluate(&spec).map_err(sweep_failure)?;
            emit(&table.to_csv(), out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { file, sigma } => {
            if !(sigma > 0.0) {
                return Err((EXIT_SPEC, format!("--sigma must be > 0, got {sigma}")));
            }
            let spec = load(&file)?;
            let has_mc = spec.modes.contains(&ssbc_cli::specfile::Mode::MonteCarlo);
            let has_analytic = compare::COMPARED_MODES.iter().any(|m| spec.modes.contains(m));
            if !(has_mc && has_analytic) {
                return Err((
                    EXIT_SPEC,
                    format!(
                        "{}: field `modes`: compare needs montecarlo and at least one of exact, approx",
                        file.display()
                    ),
                ));
            }
            let table = evaluate(&spec).map_err(sweep_failure)?;
            let report = compare(&table, sigma).expect("modes checked above");
            print!("{}", report.to_text());
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_COMPARE)
            })
        }
        Command::Preset {
            name,
            samples,
            seed,
            out,
            spec: print_spec,
        } => {
            let text = presets::get(&name).ok_or_else(|| {
                (
                    EXIT_SPEC,
                    format!("unknown preset `{name}` (expected one of: {})", presets::NAMES.join(", ")),
                )
            })?;
            let mut spec = SweepSpec::parse(text).map_err(|e| (EXIT_SPEC, format!("preset {name}: {e}")))?;
            if let Some(n) = samples {
                spec.mc.samples = n;
            }
            if let Some(s) = seed {
                spec.mc.seed = s;
            }
            // revalidate the overridden settings
            let spec = SweepSpec::parse(&spec.to_spec_string()).map_err(|e| (EXIT_SPEC, e.to_string()))?;
            if print_spec {
                emit(&spec.to_spec_string(), out.as_deref())?;
                return Ok(ExitCode::SUCCESS);
            }
            let table = evaluate(&spec).map_err(sweep_failure)?;
            emit(&table.to_csv(), out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest => {
            let outcomes = selftest::run();
            let mut failed = 0;
            for o in &outcomes {
                let tag = if o.passed { "PASS" } else { "FAIL" };
                if !o.passed {
                    failed += 1;
                }
                println!("{tag} {}: {}", o.name, o.detail);
            }
            println!("{} of {} passed", outcomes.len() - failed, outcomes.len());
            Ok(if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_COMPARE)
            })
        }
    }
}
