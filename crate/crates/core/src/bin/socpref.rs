use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use socpref::analysis::{counterbalance, verify_theorem, ProbeConfig};
use socpref::fixture::{export_fixture, run_example_fixture};
use socpref::render::{render_audit, AuditMode, AuditReport};
use socpref::utility::restrict_to_pure;
use socpref::verify::{run_randomized_verification, TrialParams};
use socpref::{Error, Game, SocialFunctional, UtilitySpec};

const EXIT_OK: u8 = 0;
const EXIT_INPUT: u8 = 1;
const EXIT_INCONSISTENT: u8 = 2;

#[derive(Parser)]
#[command(
    name = "socpref",
    version,
    about = "Audit social utility decompositions of two-player games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose u_g into u_d and s and check both against expected utility
    Audit(AuditArgs),
    /// Recompute the built-in two-by-two example
    PaperFixture {
        /// Absolute tolerance for every assertion
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Randomized checks of both directions of the decomposition result
    VerifyTheorem {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 5)]
        max_m: usize,
        #[arg(long, default_value_t = 5)]
        max_n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Write the built-in example as game and utility files
    ExportFixture {
        #[arg(long, default_value = "fixture")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    game: PathBuf,
    /// Game utility (must be expected utility)
    #[arg(long)]
    ug: PathBuf,
    /// Selfish utility; s is induced from it
    #[arg(long, conflicts_with = "social", required_unless_present = "social")]
    ud: Option<PathBuf>,
    /// Social utility; u_d is constructed as u_g - s
    #[arg(long)]
    social: Option<PathBuf>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Number of random probe profiles
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// A failure tied to the input file that caused it.
struct InputError {
    path: Option<PathBuf>,
    error: String,
}

impl InputError {
    fn at(path: &Path, error: impl ToString) -> Self {
        Self {
            path: Some(path.to_path_buf()),
            error: error.to_string(),
        }
    }

    fn plain(error: impl ToString) -> Self {
        Self {
            path: None,
            error: error.to_string(),
        }
    }

    fn report(&self) -> ExitCode {
        match &self.path {
            Some(p) => eprintln!("error: {}: {}", p.display(), self.error),
            None => eprintln!("error: {}", self.error),
        }
        ExitCode::from(EXIT_INPUT)
    }
}

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError::at(path, e))
}

fn load_game(path: &Path) -> Result<Game, InputError> {
    Game::from_json(&read(path)?).map_err(|e| InputError::at(path, e))
}

/// Loads a utility spec and checks its tables against the game.
fn load_spec(path: &Path, game: &Game) -> Result<UtilitySpec, InputError> {
    let spec = UtilitySpec::from_json(&read(path)?).map_err(|e| InputError::at(path, e))?;
    restrict_to_pure(&spec, game).map_err(|e| InputError::at(path, e))?;
    Ok(spec)
}

/// Accepts a bare social functional or any utility spec.
fn load_social(path: &Path, game: &Game) -> Result<UtilitySpec, InputError> {
    let text = read(path)?;
    match serde_json::from_str::<SocialFunctional>(&text) {
        Ok(f) => Ok(UtilitySpec::social(f)),
        Err(social_err) => {
            let spec = UtilitySpec::from_json(&text)
                .map_err(|_| InputError::at(path, Error::Parse(social_err.to_string())))?;
            restrict_to_pure(&spec, game).map_err(|e| InputError::at(path, e))?;
            Ok(spec)
        }
    }
}

fn emit<T: Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) {
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(value).expect("reports serialize")
        ),
        Format::Text => println!("{}", text()),
    }
}

fn audit(args: AuditArgs) -> Result<u8, InputError> {
    let defaults = ProbeConfig::default();
    let cfg = ProbeConfig {
        tolerance: args.tolerance.unwrap_or(defaults.tolerance),
        n_random: args.samples.unwrap_or(defaults.n_random),
        seed: args.seed.unwrap_or(defaults.seed),
        include_structured: true,
    };
    cfg.validate().map_err(InputError::plain)?;
    let game = load_game(&args.game)?;
    let u_g = load_spec(&args.ug, &game)?;
    let audit = match (&args.ud, &args.social) {
        (Some(ud_path), None) => {
            let u_d = load_spec(ud_path, &game)?;
            let report =
                verify_theorem(&u_g, &u_d, &game, &cfg).map_err(|e| InputError::at(&args.ug, e))?;
            AuditReport {
                mode: AuditMode::VerifyTheorem,
                u_d_spec: u_d,
                report,
            }
        }
        (None, Some(social_path)) => {
            let s = load_social(social_path, &game)?;
            let (u_d, report) =
                counterbalance(&u_g, &s, &game, &cfg).map_err(|e| InputError::at(&args.ug, e))?;
            AuditReport {
                mode: AuditMode::Counterbalance,
                u_d_spec: u_d,
                report,
            }
        }
        _ => {
            return Err(InputError::plain(
                "exactly one of --ud and --social is required",
            ))
        }
    };
    emit(args.format, &audit, || render_audit(&game, &audit));
    Ok(if audit.report.theorem_consistent {
        EXIT_OK
    } else {
        EXIT_INCONSISTENT
    })
}

fn example_fixture(tolerance: f64, format: Format) -> Result<u8, InputError> {
    let report = run_example_fixture(tolerance).map_err(InputError::plain)?;
    emit(format, &report, || report.to_string());
    Ok(match report.failure() {
        None => EXIT_OK,
        Some(e) => {
            eprintln!("error: {e}");
            EXIT_INCONSISTENT
        }
    })
}

fn run(command: Command) -> Result<u8, InputError> {
    match command {
        Command::Audit(args) => audit(args),
        Command::PaperFixture { tolerance, format } => example_fixture(tolerance, format),
        Command::VerifyTheorem {
            trials,
            max_m,
            max_n,
            seed,
            format,
        } => {
            let summary = run_randomized_verification(TrialParams {
                trials,
                max_m,
                max_n,
                seed,
            })
            .map_err(InputError::plain)?;
            emit(format, &summary, || summary.to_string());
            Ok(if summary.all_consistent() {
                EXIT_OK
            } else {
                EXIT_INCONSISTENT
            })
        }
        Command::ExportFixture { out } => {
            let paths = export_fixture(&out).map_err(|e| InputError::at(&out, e))?;
            for p in paths {
                println!("{}", p.display());
            }
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => e.report(),
    }
}
