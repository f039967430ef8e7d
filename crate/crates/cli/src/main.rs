use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use event_overlap::{validate_corpus, Severity};
use evoverlap::config::{RankArgs, StatsArgs, ValidateArgs};
use evoverlap::pipeline::{load_corpus, load_ontology};
use evoverlap::{
    corpus_stats, render_report, render_stats, run_score, Cli, CliError, Command, FileConfig,
    Report, ScoreConfig,
};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors share the input-error exit code; 2 is reserved
            // for similarity-service failures.
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn emit(text: &str) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(text.as_bytes())
        .and_then(|_| stdout.flush())
        .map_err(|e| CliError::Invalid(format!("cannot write output: {e}")))
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let file = FileConfig::load_optional(cli.config.as_deref())?;
    match cli.command {
        Command::Score(args) => {
            let cfg = ScoreConfig::resolve(args, &file)?;
            let out = run_score(&cfg)?;
            for w in &out.warnings {
                eprintln!("{w}");
            }
            emit(&render_report(&out.report, cfg.format))?;
            Ok(0)
        }
        Command::Stats(StatsArgs { events, format }) => {
            let corpus = load_corpus(&events)?;
            let format = format.or(file.format).unwrap_or_default();
            emit(&render_stats(&corpus_stats(&corpus), format))?;
            Ok(0)
        }
        Command::Validate(ValidateArgs { events, ontology }) => {
            let corpus = load_corpus(&events)?;
            let ontology = ontology.as_deref().map(load_ontology).transpose()?;
            let diagnostics = validate_corpus(&corpus, ontology.as_ref());
            let errors = diagnostics
                .iter()
                .filter(|d| d.severity == Severity::Error)
                .count();
            let mut text = String::new();
            for d in &diagnostics {
                text.push_str(&format!("{d}\n"));
            }
            text.push_str(&format!(
                "{} documents, {} errors, {} warnings\n",
                corpus.len(),
                errors,
                diagnostics.len() - errors
            ));
            emit(&text)?;
            Ok(if errors > 0 { 1 } else { 0 })
        }
        Command::Rank(RankArgs { reports, format }) => {
            let parsed = reports
                .iter()
                .map(|path| {
                    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                    Report::from_json(&text)
                        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut merged = Report::merge(parsed)?;
            merged.per_doc = None;
            let format = format.or(file.format).unwrap_or_default();
            emit(&render_report(&merged, format))?;
            Ok(0)
        }
    }
}
