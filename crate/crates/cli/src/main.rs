use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use mtaudit_cli::{run_stage, AuditConfig, CliError, Overrides, Stage};
use mtaudit_core::scoring::ReferenceKind;

/// Audit gendered-pronoun bias of a translation engine.
#[derive(Debug, Parser)]
#[command(name = "audit", version)]
struct Args {
    /// Stage to run; `all` runs every stage in order.
    #[arg(value_enum)]
    stage: Stage,

    /// Audit configuration (JSON).
    #[arg(long, global = true, default_value = "audit.json")]
    config: PathBuf,

    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Reference to score against: source, target or perception. Repeatable.
    #[arg(long = "reference", global = true, value_parser = parse_reference)]
    references: Vec<ReferenceKind>,

    /// Engine identifier; overrides the config.
    #[arg(long, global = true)]
    engine: Option<String>,

    /// Concurrent translation requests.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

fn parse_reference(s: &str) -> Result<ReferenceKind, String> {
    s.parse()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    let overrides = Overrides {
        out: args.out,
        references: args.references,
        engine: args.engine,
        jobs: args.jobs,
    };
    match run(args.stage, &args.config, &overrides) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(stage: Stage, config: &PathBuf, overrides: &Overrides) -> Result<(), CliError> {
    let config = AuditConfig::load(config, overrides)?;
    for entry in run_stage(stage, &config)? {
        println!("{}", serde_json::json!({"stage": entry.stage, "outputs": entry.outputs.len(), "stats": entry.stats}));
    }
    Ok(())
}
