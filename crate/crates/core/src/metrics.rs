//! Precision/recall/F1 per category, corpus pooling, the mode-dependent
//! event-overlap score, and system ranking.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::event_model::{Corpus, Diagnostic, EventDocument, Severity};
use crate::matcher::{CategoryCounts, MatchCounts};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("no document pairs")]
    NoPairs,
    #[error("cannot rank reports computed in different modes ({0} and {1})")]
    MixedModes(Mode, Mode),
    #[error("unknown mode {0:?} (expected reference or source)")]
    UnknownMode(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    #[serde(rename = "p")]
    pub precision: f64,
    #[serde(rename = "r")]
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    /// Builds a triple from P and R, deriving F1 as their harmonic mean.
    pub fn from_pr(precision: f64, recall: f64) -> Self {
        Self {
            precision,
            recall,
            f1: harmonic_mean(precision, recall),
        }
    }
}

pub fn harmonic_mean(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

/// P = matched / cand, R = matched / ref. When both sides are empty the
/// result is a vacuous 1.0 for all three; when only one side is empty the
/// ratio over the empty side is 0.
pub fn prf(matched: usize, cand_total: usize, ref_total: usize) -> Prf {
    debug_assert!(matched <= cand_total.min(ref_total));
    if cand_total == 0 && ref_total == 0 {
        return Prf {
            precision: 1.0,
            recall: 1.0,
            f1: 1.0,
        };
    }
    let ratio = |n: usize| if n == 0 { 0.0 } else { matched as f64 / n as f64 };
    Prf::from_pr(ratio(cand_total), ratio(ref_total))
}

fn prf_of(c: CategoryCounts) -> Prf {
    prf(c.matched, c.cand, c.reference)
}

/// Which component of the three categories the event-overlap score averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Candidate summaries against reference summaries: mean recall.
    ReferenceOverlap,
    /// Summaries against their source articles: mean precision.
    SourceOverlap,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::ReferenceOverlap => "reference_overlap",
            Mode::SourceOverlap => "source_overlap",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reference" | "reference_overlap" => Ok(Mode::ReferenceOverlap),
            "source" | "source_overlap" => Ok(Mode::SourceOverlap),
            other => Err(MetricsError::UnknownMode(other.to_string())),
        }
    }
}

pub fn compute_overlap(etype: &Prf, role: &Prf, arg: &Prf, mode: Mode) -> f64 {
    let pick = |p: &Prf| match mode {
        Mode::ReferenceOverlap => p.recall,
        Mode::SourceOverlap => p.precision,
    };
    (pick(etype) + pick(role) + pick(arg)) / 3.0
}

/// Scales a fraction to a percentage with one decimal, rounding halves up.
/// The small bias absorbs binary representation error so that e.g. a
/// stored 0.8115 rounds to 81.2.
pub fn to_percent(fraction: f64) -> f64 {
    (fraction * 1000.0 + 0.5 + 1e-9).floor() / 10.0
}

pub fn format_percent(fraction: f64) -> String {
    format!("{:.1}", to_percent(fraction))
}

/// Micro pooling: component-wise sum of all pair counts.
pub fn aggregate_corpus(pair_counts: &[MatchCounts]) -> Result<MatchCounts, MetricsError> {
    if pair_counts.is_empty() {
        return Err(MetricsError::NoPairs);
    }
    Ok(pair_counts.iter().copied().sum())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pooling {
    /// Sum counts over all pairs, then compute P/R/F1.
    #[default]
    Micro,
    /// Average per-pair P and R, then derive F1 from the averages.
    Macro,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub system: String,
    pub mode: Mode,
    pub etype: Prf,
    pub role: Prf,
    pub arg: Prf,
    pub event_overlap: f64,
    pub pair_count: usize,
    /// Category cells that fell back to the both-empty convention.
    pub vacuous_cells: usize,
}

impl ScoreReport {
    pub fn from_prf(system: impl Into<String>, mode: Mode, etype: Prf, role: Prf, arg: Prf) -> Self {
        Self {
            system: system.into(),
            mode,
            event_overlap: compute_overlap(&etype, &role, &arg, mode),
            etype,
            role,
            arg,
            pair_count: 0,
            vacuous_cells: 0,
        }
    }
}

fn is_vacuous(c: &CategoryCounts) -> bool {
    c.cand == 0 && c.reference == 0
}

/// Scores one system from its per-pair counts.
pub fn score_system(
    system: impl Into<String>,
    pair_counts: &[MatchCounts],
    mode: Mode,
    pooling: Pooling,
) -> Result<ScoreReport, MetricsError> {
    let pooled = aggregate_corpus(pair_counts)?;
    let (etype, role, arg, vacuous_cells) = match pooling {
        Pooling::Micro => (
            prf_of(pooled.etype),
            prf_of(pooled.role),
            prf_of(pooled.arg),
            pooled.categories().iter().filter(|c| is_vacuous(c)).count(),
        ),
        Pooling::Macro => {
            let n = pair_counts.len() as f64;
            let mean = |select: fn(&MatchCounts) -> CategoryCounts| {
                let (p, r) = pair_counts.iter().fold((0.0, 0.0), |(p, r), counts| {
                    let x = prf_of(select(counts));
                    (p + x.precision, r + x.recall)
                });
                Prf::from_pr(p / n, r / n)
            };
            let vacuous = pair_counts
                .iter()
                .flat_map(|c| c.categories())
                .filter(is_vacuous)
                .count();
            (mean(|c| c.etype), mean(|c| c.role), mean(|c| c.arg), vacuous)
        }
    };
    let mut report = ScoreReport::from_prf(system, mode, etype, role, arg);
    report.pair_count = pair_counts.len();
    report.vacuous_cells = vacuous_cells;
    Ok(report)
}

#[derive(Debug, Clone, Default)]
pub struct Pairing<'a> {
    pub pairs: Vec<(&'a EventDocument, &'a EventDocument)>,
    /// Candidates with no reference sharing their `source_id`.
    pub unmatched: Vec<Diagnostic>,
}

/// Pairs every candidate with every reference document that shares its
/// `source_id`, in candidate order then reference order.
pub fn pair_documents<'a, I>(candidates: I, references: &'a Corpus) -> Result<Pairing<'a>, MetricsError>
where
    I: IntoIterator<Item = &'a EventDocument>,
{
    let mut pairing = Pairing::default();
    for cand in candidates {
        let refs = references.documents_for_source(&cand.source_id);
        if refs.is_empty() {
            pairing.unmatched.push(Diagnostic {
                severity: Severity::Warning,
                doc_id: cand.doc_id.clone(),
                message: format!(
                    "no reference document for source_id {:?}; candidate excluded",
                    cand.source_id
                ),
            });
        }
        pairing.pairs.extend(refs.into_iter().map(|r| (cand, r)));
    }
    if pairing.pairs.is_empty() {
        return Err(MetricsError::NoPairs);
    }
    Ok(pairing)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ranked {
    /// Position of the report in the input list.
    pub index: usize,
    /// 1-based competition rank (1, 2, 2, 4).
    pub rank: usize,
}

/// Orders reports by descending event-overlap. Ties share the smaller rank
/// and keep their input order.
pub fn rank_systems(reports: &[ScoreReport]) -> Result<Vec<Ranked>, MetricsError> {
    let modes: HashSet<Mode> = reports.iter().map(|r| r.mode).collect();
    if modes.len() > 1 {
        return Err(MetricsError::MixedModes(Mode::ReferenceOverlap, Mode::SourceOverlap));
    }
    let mut order: Vec<usize> = (0..reports.len()).collect();
    order.sort_by(|&a, &b| {
        reports[b]
            .event_overlap
            .partial_cmp(&reports[a].event_overlap)
            .unwrap_or(Ordering::Equal)
    });
    let mut ranked: Vec<Ranked> = Vec::with_capacity(order.len());
    for (pos, &index) in order.iter().enumerate() {
        let rank = match ranked.last() {
            Some(prev) if reports[prev.index].event_overlap == reports[index].event_overlap => prev.rank,
            _ => pos + 1,
        };
        ranked.push(Ranked { index, rank });
    }
    Ok(ranked)
}

/// Ranks aligned with the input order of `reports`.
pub fn ranks_by_input(reports: &[ScoreReport]) -> Result<Vec<usize>, MetricsError> {
    let mut ranks = vec![0; reports.len()];
    for r in rank_systems(reports)? {
        ranks[r.index] = r.rank;
    }
    Ok(ranks)
}
