//! File loading and the scoring run behind `evoverlap score`.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use event_overlap::{
    match_documents, pair_documents, parse_corpus, score_system, validate_corpus, Corpus,
    Diagnostic, EventDocument, MatchCounts, MatchOptions, MetricsError, Mode, Ontology, Pooling,
    Severity, Similarity,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ScoreConfig;
use crate::error::CliError;
use crate::render::{Report, ReportConfig};

pub fn load_corpus(path: &Path) -> Result<Corpus, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_corpus(BufReader::new(file)).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_ontology(path: &Path) -> Result<Ontology, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(Ontology::parse(&text))
}

/// Fails on error-severity diagnostics; warnings are returned.
pub fn require_valid(corpus: &Corpus, path: &Path) -> Result<Vec<Diagnostic>, CliError> {
    let (errors, warnings): (Vec<_>, Vec<_>) = validate_corpus(corpus, None)
        .into_iter()
        .partition(|d| d.severity == Severity::Error);
    if errors.is_empty() {
        return Ok(warnings);
    }
    let lines: Vec<String> = errors.iter().map(ToString::to_string).collect();
    Err(CliError::Invalid(format!(
        "{}: {} validation error(s)\n{}",
        path.display(),
        errors.len(),
        lines.join("\n")
    )))
}

/// Counts for one candidate/reference document pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub system: String,
    pub candidate: String,
    pub reference: String,
    pub counts: MatchCounts,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreSettings {
    pub mode: Mode,
    pub pooling: Pooling,
    pub options: MatchOptions,
    pub jobs: usize,
}

#[derive(Debug, Clone)]
pub struct ScoreOutput {
    pub report: Report,
    pub warnings: Vec<Diagnostic>,
}

/// Documents of each system across all candidate corpora, systems in
/// order of first appearance.
fn group_by_system(candidates: &[Corpus]) -> Vec<(String, Vec<&EventDocument>)> {
    let mut groups: Vec<(String, Vec<&EventDocument>)> = Vec::new();
    for corpus in candidates {
        for doc in corpus {
            match groups.iter_mut().find(|(s, _)| *s == doc.system) {
                Some((_, docs)) => docs.push(doc),
                None => groups.push((doc.system.clone(), vec![doc])),
            }
        }
    }
    groups
}

pub fn score_corpora(
    candidates: &[Corpus],
    references: &Corpus,
    similarity: &Similarity,
    settings: ScoreSettings,
    config: ReportConfig,
) -> Result<ScoreOutput, CliError> {
    let systems = group_by_system(candidates);
    if systems.is_empty() {
        return Err(CliError::NoPairs("no candidate documents".into()));
    }

    let mut warnings = Vec::new();
    let mut pairs: Vec<(usize, &EventDocument, &EventDocument)> = Vec::new();
    for (i, (system, docs)) in systems.iter().enumerate() {
        let pairing = pair_documents(docs.iter().copied(), references).map_err(|e| match e {
            MetricsError::NoPairs => CliError::NoPairs(format!(
                "system {system:?}: no candidate shares a source_id with the references"
            )),
            other => other.into(),
        })?;
        warnings.extend(pairing.unmatched);
        pairs.extend(pairing.pairs.into_iter().map(|(c, r)| (i, c, r)));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.jobs.max(1))
        .build()
        .map_err(|e| CliError::Invalid(format!("cannot start worker pool: {e}")))?;
    let counts: Vec<MatchCounts> = pool.install(|| {
        pairs
            .par_iter()
            .map(|(_, c, r)| match_documents(c, r, similarity, settings.options))
            .collect::<Result<_, _>>()
    })?;

    let mut per_system: Vec<Vec<MatchCounts>> = vec![Vec::new(); systems.len()];
    for ((i, _, _), c) in pairs.iter().zip(&counts) {
        per_system[*i].push(*c);
    }
    let reports = systems
        .iter()
        .zip(&per_system)
        .map(|((system, _), counts)| score_system(system.clone(), counts, settings.mode, settings.pooling))
        .collect::<Result<Vec<_>, _>>()?;

    let per_doc = pairs
        .iter()
        .zip(&counts)
        .map(|((i, c, r), counts)| PairRecord {
            system: systems[*i].0.clone(),
            candidate: c.doc_id.clone(),
            reference: r.doc_id.clone(),
            counts: *counts,
        })
        .collect();

    let mut report = Report::new(settings.mode, reports, config)?;
    report.per_doc = Some(per_doc);
    Ok(ScoreOutput { report, warnings })
}

fn load_checked(path: &Path, warnings: &mut Vec<Diagnostic>) -> Result<Corpus, CliError> {
    let corpus = load_corpus(path)?;
    warnings.extend(require_valid(&corpus, path)?);
    Ok(corpus)
}

pub fn run_score(cfg: &ScoreConfig) -> Result<ScoreOutput, CliError> {
    let mut warnings = Vec::new();
    let references = load_checked(&cfg.references, &mut warnings)?;
    let candidates = cfg
        .candidates
        .iter()
        .map(|p| load_checked(p, &mut warnings))
        .collect::<Result<Vec<_>, _>>()?;

    let similarity = Similarity::from_config(&cfg.similarity)?;
    let settings = ScoreSettings {
        mode: cfg.mode,
        pooling: cfg.pooling,
        options: MatchOptions {
            dedupe_items: cfg.dedupe_items,
        },
        jobs: cfg.jobs,
    };
    let config = ReportConfig {
        similarity: cfg.similarity.provider.to_string(),
        threshold: cfg.similarity.threshold,
        remote_url: cfg.similarity.remote_url.clone(),
        pooling: cfg.pooling,
        dedupe_items: cfg.dedupe_items,
    };
    let mut out = score_corpora(&candidates, &references, &similarity, settings, config)?;
    if !cfg.per_doc {
        out.report.per_doc = None;
    }
    warnings.append(&mut out.warnings);
    out.warnings = warnings;
    Ok(out)
}
