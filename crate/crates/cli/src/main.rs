//! `dman`: run checks and constructions declared in a JSON document.

mod commands;
mod document;

use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use commands::Report;
use document::{parse_document, DocError, Document, Resolved, Resolver};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "dman", version, about = "Checks and constructions for standard-model derived manifolds")]
struct Cli {
    /// Base seed for randomized procedures.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Zero and pivot tolerance for floating-point witnesses.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Reduction-step cap for Groebner basis computations.
    #[arg(long, global = true)]
    max_groebner_steps: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate declared models, morphisms and 2-morphisms.
    Check { document: String },
    /// Classify declared morphisms at their witnesses.
    Classify { document: String },
    /// Construct declared fibre products.
    Fibre { document: String },
    /// Validate declared gluing data.
    Glue { document: String },
    /// Compute declared virtual counts and intersection numbers.
    Count { document: String },
    /// Run the seeded 2-category law suites.
    Laws {
        /// Optional document supplying settings.
        document: Option<String>,
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
}

fn read_source(path: &str) -> Result<String, DocError> {
    let mut text = String::new();
    if path == "-" {
        std::io::stdin().read_to_string(&mut text).map_err(|e| document::err("", format!("reading stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| document::err("", format!("reading {path}: {e}")))?;
    }
    Ok(text)
}

fn run(cli: &Cli) -> Result<Report, DocError> {
    let path = match &cli.command {
        Command::Check { document }
        | Command::Classify { document }
        | Command::Fibre { document }
        | Command::Glue { document }
        | Command::Count { document } => Some(document.as_str()),
        Command::Laws { document, .. } => document.as_deref(),
    };
    let doc = match path {
        Some(p) => parse_document(&read_source(p)?)?,
        None => Document::default(),
    };
    let settings = Resolved::new(&doc.settings, cli.tolerance, cli.max_groebner_steps, cli.seed)?;
    if let Command::Laws { cases, .. } = cli.command {
        return commands::laws(settings.seed.unwrap_or(commands::DEFAULT_LAW_SEED), cases);
    }
    let resolver = Resolver::new(&doc, settings)?;
    match cli.command {
        Command::Check { .. } => commands::check(&resolver),
        Command::Classify { .. } => commands::classify(&resolver),
        Command::Fibre { .. } => commands::fibre(&resolver),
        Command::Glue { .. } => commands::glue(&resolver),
        Command::Count { .. } => commands::count(&resolver),
        Command::Laws { .. } => unreachable!(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.value).expect("report serializes")),
                Format::Text => print!("{}", report.text),
            }
            if report.violations == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            if cli.format == Format::Json {
                let v = json!({ "error": { "path": e.path, "message": e.message } });
                println!("{}", serde_json::to_string_pretty(&v).expect("error serializes"));
            }
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
