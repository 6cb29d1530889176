use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cmspectra::harness::{self, write_report, ExperimentConfig, ExperimentKind, HarnessError, OutputFormat};
use cmspectra::oracle::{exact_cm_law, Functional};
use cmspectra::theory::{all_predictions, predictions_json};
use cmspectra::validate::{ValidateOptions, Validator, CRITERIA};
use cmspectra::DegreeSequence;

#[derive(Parser, Debug)]
#[command(name = "cmspectra", version, about = "Largest eigenvalues of random graphs with prescribed degrees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// λ1 in the microcanonical and canonical ensembles on one degree sequence.
    Gap(Common),
    /// ‖A − E[A]‖ and λ1 across a grid of sizes.
    Sweep(Common),
    /// Pooled spectral histogram against its limiting density.
    Esd(Common),
    /// Quadratic forms of the centered adjacency against their predictions.
    Moments(Common),
    /// Exact law of the configuration model on a tiny sequence.
    Oracle(OracleArgs),
    /// Runs acceptance criteria and prints one line each.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// TOML file; missing keys take the preset of the subcommand.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// Comma-separated degrees, e.g. `2,2,2`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "degrees_file")]
    degrees: Option<Vec<i64>>,
    /// Degree sequence file, plain text or JSON.
    #[arg(long)]
    degrees_file: Option<PathBuf>,
    /// Print the closed-form predictions instead of the exact law.
    #[arg(long)]
    predictions: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Criteria to run (repeatable); all when absent.
    #[arg(long = "criterion", value_parser = clap::value_parser!(u8).range(1..=8))]
    criteria: Vec<u8>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Also write the outcomes as `validate.json` here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Harness(HarnessError),
    Failed(usize),
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        CliError::Harness(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Harness(HarnessError::Io(e))
    }
}

fn load_config(kind: ExperimentKind, args: &Common) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path, kind)?,
        None => ExperimentConfig::preset(kind),
    };
    if cfg.experiment != kind {
        return Err(HarnessError::Config(format!(
            "config describes a {} experiment, not {kind}",
            cfg.experiment
        )));
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(r) = args.replicates {
        cfg.replicates = r;
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.clone());
    }
    if let Some(f) = args.format {
        cfg.format = f.into();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run_experiment(kind: ExperimentKind, args: &Common) -> Result<(), CliError> {
    let cfg = load_config(kind, args)?;
    let report = harness::run(&cfg)?;
    let stdout = io::stdout();
    let written = write_report(&report, cfg.format, cfg.out.as_deref(), &mut stdout.lock())?;
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn read_degrees(args: &OracleArgs) -> Result<DegreeSequence, HarnessError> {
    if let Some(raw) = &args.degrees {
        return Ok(DegreeSequence::new(raw)?);
    }
    let Some(path) = &args.degrees_file else {
        return Err(HarnessError::Config("give --degrees or --degrees-file".into()));
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
    let seq = if text.trim_start().starts_with(['[', '{']) {
        DegreeSequence::from_json(&text)?
    } else {
        DegreeSequence::from_text(&text)?
    };
    Ok(seq)
}

fn emit(out: Option<&Path>, file: &str, body: &str) -> Result<(), CliError> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(file);
            std::fs::write(&path, body)?;
            eprintln!("wrote {}", path.display());
        }
        None => io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn run_oracle(args: &OracleArgs) -> Result<(), CliError> {
    let seq = read_degrees(args)?;
    let format = args.format.map(OutputFormat::from).unwrap_or(OutputFormat::Json);
    if args.predictions {
        let preds = all_predictions(&seq);
        let body = match format {
            OutputFormat::Json => predictions_json(&preds) + "\n",
            OutputFormat::Csv => {
                let mut s = String::from("name,value,kind\n");
                for p in &preds {
                    s.push_str(&format!("{},{},{:?}\n", p.name, p.value, p.kind).to_lowercase());
                }
                s
            }
        };
        let ext = if format == OutputFormat::Json { "json" } else { "csv" };
        return emit(args.out.as_deref(), &format!("predictions.{ext}"), &body);
    }
    let functionals = [
        Functional::Lambda1,
        Functional::QuadraticRank1,
        Functional::QuadraticFull,
        Functional::QuadraticFullSquared,
        Functional::WedgeSum,
    ];
    let law = exact_cm_law(&seq, &functionals).map_err(HarnessError::from)?;
    let body = match format {
        OutputFormat::Json => law.to_json() + "\n",
        OutputFormat::Csv => {
            let mut s = String::from("functional,unconditioned,conditioned\n");
            for e in &law.expectations {
                let cond = e.conditioned.map(|v| v.to_string()).unwrap_or_default();
                s.push_str(&format!("{},{},{}\n", e.name, e.unconditioned, cond));
            }
            s
        }
    };
    let ext = if format == OutputFormat::Json { "json" } else { "csv" };
    emit(args.out.as_deref(), &format!("oracle.{ext}"), &body)
}

fn run_validate(args: &ValidateArgs) -> Result<(), CliError> {
    if args.workers == 0 {
        return Err(HarnessError::Config("workers must be at least 1".into()).into());
    }
    let validator = Validator::new(ValidateOptions {
        seed: args.seed,
        workers: args.workers,
    });
    let ids: Vec<u8> = if args.criteria.is_empty() {
        CRITERIA.to_vec()
    } else {
        args.criteria.clone()
    };
    let mut outcomes = Vec::new();
    for id in ids {
        let outcome = validator.run(id)?;
        println!("{outcome}");
        outcomes.push(outcome);
    }
    if let Some(dir) = &args.out {
        let body = serde_json::to_string_pretty(&outcomes).expect("outcomes serialize");
        emit(Some(dir), "validate.json", &body)?;
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    if failed > 0 {
        return Err(CliError::Failed(failed));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gap(a) => run_experiment(ExperimentKind::Gap, a),
        Command::Sweep(a) => run_experiment(ExperimentKind::Sweep, a),
        Command::Esd(a) => run_experiment(ExperimentKind::Esd, a),
        Command::Moments(a) => run_experiment(ExperimentKind::Moments, a),
        Command::Oracle(a) => run_oracle(a),
        Command::Validate(a) => run_validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Harness(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(CliError::Failed(n)) => {
            eprintln!("{n} criterion(s) failed");
            ExitCode::from(1)
        }
    }
}
