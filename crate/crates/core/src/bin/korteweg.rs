use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use korteweg::harness::{
    self, besov_report, error_json, monitor, output_root, parse_config, run_suite, simulate, EXIT_FAILURE, EXIT_OK,
    EXIT_USAGE, SUITES,
};
use korteweg::lp::{BesovIndex, Flavor};
use korteweg::Error;

#[derive(Parser)]
#[command(
    name = "korteweg",
    version,
    about = "Pseudospectral workbench for the Korteweg system on the torus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its run directory.
    Simulate {
        config: PathBuf,
        /// Overrides the output root (default: $KORTEWEG_OUTPUT_ROOT or the working directory).
        #[arg(long)]
        output_root: Option<PathBuf>,
    },
    /// Run an identity suite: appendix, pointwise, bd-ibp, lp-partition, lp-structure, norms, heat, all.
    Verify {
        suite: String,
        /// Print checks as a JSON array instead of text lines.
        #[arg(long)]
        json: bool,
    },
    /// Per-shell Besov table of one dump component, as JSON.
    Besov {
        dump: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        /// Integrability exponent; `inf` allowed.
        #[arg(long)]
        p: f64,
        /// Summability exponent; `inf` allowed.
        #[arg(long)]
        r: f64,
        #[arg(long, default_value = "nonhomogeneous")]
        flavor: Flavor,
        #[arg(long, default_value_t = 0)]
        component: usize,
    },
    /// Recompute continuation diagnostics from a run directory, as JSON.
    Monitor { dir: PathBuf },
}

fn fail(error: &Error) -> ExitCode {
    eprintln!("{}", error_json(error));
    ExitCode::from(harness::exit_code(error) as u8)
}

// A closed stdout (e.g. piped into `head`) is not an error worth reporting.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn print_json<T: serde::Serialize>(value: &T) {
    emit(&serde_json::to_string_pretty(value).expect("serializable"));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate {
            config,
            output_root: root,
        } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => return fail(&Error::from(e)),
            };
            let cfg = match parse_config(&text) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let root = root.unwrap_or_else(output_root);
            match simulate(&cfg, &root) {
                Ok(outcome) => {
                    print_json(&outcome.summary);
                    if let Some(err) = &outcome.summary.error {
                        eprintln!(
                            "{}",
                            serde_json::json!({ "error": { "kind": "numerical_error", "message": err } })
                        );
                    }
                    ExitCode::from(outcome.summary.status.exit_code() as u8)
                }
                Err(e) => fail(&e),
            }
        }
        Command::Verify { suite, json } => {
            if suite != "all" && !SUITES.contains(&suite.as_str()) {
                eprintln!("unknown suite '{suite}' (available: {}, all)", SUITES.join(", "));
                return ExitCode::from(EXIT_USAGE as u8);
            }
            let checks = match run_suite(&suite) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            if json {
                print_json(&checks);
            } else {
                for c in &checks {
                    emit(&c.line());
                }
            }
            let failed: Vec<String> = checks
                .iter()
                .filter(|c| !c.passed())
                .map(|c| format!("{}/{}", c.suite, c.name))
                .collect();
            if failed.is_empty() {
                ExitCode::from(EXIT_OK as u8)
            } else {
                eprintln!("failed checks: {}", failed.join("; "));
                ExitCode::from(EXIT_FAILURE as u8)
            }
        }
        Command::Besov {
            dump,
            s,
            p,
            r,
            flavor,
            component,
        } => {
            let report = BesovIndex::with_flavor(s, p, r, flavor).and_then(|idx| besov_report(&dump, &idx, component));
            match report {
                Ok(rep) => {
                    print_json(&rep);
                    ExitCode::from(EXIT_OK as u8)
                }
                Err(e) => fail(&e),
            }
        }
        Command::Monitor { dir } => match monitor(&dir) {
            Ok(summary) => {
                print_json(&summary);
                ExitCode::from(EXIT_OK as u8)
            }
            Err(e) => fail(&e),
        },
    }
}
