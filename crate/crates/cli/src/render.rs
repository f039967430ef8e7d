//! Report tables (TSV, Markdown) and the JSON report format.
//!
//! Scores are stored as fractions and rendered as percentages with one
//! decimal. The JSON report keeps full precision so `rank` can re-read it.

use std::fmt::Write as _;

use event_overlap::{
    event_stats, event_type_inventory, format_percent, rank_systems, token_stats, Corpus,
    EventStats, Mode, Pooling, Prf, ScoreReport, TokenStats,
};
use serde::{Deserialize, Serialize};

use crate::config::Format;
use crate::error::CliError;
use crate::pipeline::PairRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub similarity: String,
    pub threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub remote_url: Option<String>,
    pub pooling: Pooling,
    pub dedupe_items: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedSystem {
    pub report: ScoreReport,
    pub rank: usize,
}

/// Systems in input order, each with its rank.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub mode: Mode,
    pub systems: Vec<RankedSystem>,
    pub config: serde_json::Value,
    pub per_doc: Option<Vec<PairRecord>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SystemJson {
    system: String,
    etype: Prf,
    role: Prf,
    arg: Prf,
    event_overlap: f64,
    rank: usize,
    pairs: usize,
    #[serde(default)]
    vacuous_cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ReportJson {
    mode: Mode,
    systems: Vec<SystemJson>,
    config: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    per_doc: Option<Vec<PairRecord>>,
}

impl Report {
    pub fn new<C: Serialize>(mode: Mode, reports: Vec<ScoreReport>, config: C) -> Result<Self, CliError> {
        if let Some(r) = reports.iter().find(|r| r.mode != mode) {
            return Err(CliError::Invalid(format!(
                "system {:?} was scored in {} mode, expected {}",
                r.system, r.mode, mode
            )));
        }
        let mut ranks = vec![0; reports.len()];
        for r in rank_systems(&reports)? {
            ranks[r.index] = r.rank;
        }
        let config = serde_json::to_value(config)
            .map_err(|e| CliError::Invalid(format!("cannot encode config: {e}")))?;
        Ok(Self {
            mode,
            systems: reports
                .into_iter()
                .zip(ranks)
                .map(|(report, rank)| RankedSystem { report, rank })
                .collect(),
            config,
            per_doc: None,
        })
    }

    pub fn from_json(input: &str) -> Result<Self, serde_json::Error> {
        let parsed: ReportJson = serde_json::from_str(input)?;
        let mode = parsed.mode;
        Ok(Self {
            mode,
            systems: parsed
                .systems
                .into_iter()
                .map(|s| RankedSystem {
                    rank: s.rank,
                    report: ScoreReport {
                        system: s.system,
                        mode,
                        etype: s.etype,
                        role: s.role,
                        arg: s.arg,
                        event_overlap: s.event_overlap,
                        pair_count: s.pairs,
                        vacuous_cells: s.vacuous_cells,
                    },
                })
                .collect(),
            config: parsed.config,
            per_doc: parsed.per_doc,
        })
    }

    /// Pools the systems of several reports and ranks them together.
    pub fn merge(reports: Vec<Report>) -> Result<Self, CliError> {
        let mode = reports
            .first()
            .map(|r| r.mode)
            .ok_or_else(|| CliError::Invalid("no reports to rank".into()))?;
        let mut configs: Vec<serde_json::Value> = Vec::new();
        let mut systems = Vec::new();
        for r in reports {
            if r.mode != mode {
                return Err(CliError::Invalid(format!(
                    "cannot rank {} reports together with {} reports",
                    r.mode, mode
                )));
            }
            if !configs.contains(&r.config) {
                configs.push(r.config);
            }
            systems.extend(r.systems.into_iter().map(|s| s.report));
        }
        let config = if configs.len() == 1 {
            configs.remove(0)
        } else {
            serde_json::json!({ "inputs": configs })
        };
        Report::new(mode, systems, config)
    }

    fn to_json(&self) -> ReportJson {
        ReportJson {
            mode: self.mode,
            systems: self
                .systems
                .iter()
                .map(|s| SystemJson {
                    system: s.report.system.clone(),
                    etype: s.report.etype,
                    role: s.report.role,
                    arg: s.report.arg,
                    event_overlap: s.report.event_overlap,
                    rank: s.rank,
                    pairs: s.report.pair_count,
                    vacuous_cells: s.report.vacuous_cells,
                })
                .collect(),
            config: self.config.clone(),
            per_doc: self.per_doc.clone(),
        }
    }
}

fn tsv_cell(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

fn md_cell(s: &str) -> String {
    tsv_cell(s).replace('|', "\\|")
}

fn prf_cells(p: &Prf) -> [String; 3] {
    [format_percent(p.precision), format_percent(p.recall), format_percent(p.f1)]
}

pub fn render_report(report: &Report, format: Format) -> String {
    match format {
        Format::Tsv => render_tsv(report),
        Format::Markdown => render_markdown(report),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.to_json()).expect("report serializes");
            s.push('\n');
            s
        }
    }
}

const PER_DOC_COLUMNS: [&str; 12] = [
    "system",
    "candidate",
    "reference",
    "etype_matched",
    "etype_cand",
    "etype_ref",
    "role_matched",
    "role_cand",
    "role_ref",
    "arg_matched",
    "arg_cand",
    "arg_ref",
];

fn per_doc_rows(records: &[PairRecord], clean: fn(&str) -> String) -> Vec<Vec<String>> {
    records
        .iter()
        .map(|r| {
            let mut row = vec![clean(&r.system), clean(&r.candidate), clean(&r.reference)];
            for c in r.counts.categories() {
                row.extend([c.matched.to_string(), c.cand.to_string(), c.reference.to_string()]);
            }
            row
        })
        .collect()
}

fn render_tsv(report: &Report) -> String {
    let mut out = String::from(
        "system\tetype_p\tetype_r\tetype_f1\trole_p\trole_r\trole_f1\targ_p\targ_r\targ_f1\tevent_overlap\trank\tpairs\n",
    );
    for s in &report.systems {
        let r = &s.report;
        let mut row = vec![tsv_cell(&r.system)];
        for p in [&r.etype, &r.role, &r.arg] {
            row.extend(prf_cells(p));
        }
        row.extend([format_percent(r.event_overlap), s.rank.to_string(), r.pair_count.to_string()]);
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    if let Some(records) = &report.per_doc {
        out.push('\n');
        out.push_str(&PER_DOC_COLUMNS.join("\t"));
        out.push('\n');
        for row in per_doc_rows(records, tsv_cell) {
            out.push_str(&row.join("\t"));
            out.push('\n');
        }
    }
    out
}

fn md_table(out: &mut String, header: &[&str], align_first_left: bool, rows: &[Vec<String>]) {
    let _ = writeln!(out, "| {} |", header.join(" | "));
    let rule: Vec<&str> = (0..header.len())
        .map(|i| if i == 0 && align_first_left { ":---" } else { "---:" })
        .collect();
    let _ = writeln!(out, "|{}|", rule.join("|"));
    for row in rows {
        let _ = writeln!(out, "| {} |", row.join(" | "));
    }
}

fn render_markdown(report: &Report) -> String {
    let header = [
        "System",
        "eType-C P",
        "eType-C R",
        "eType-C F1",
        "Role-C P",
        "Role-C R",
        "Role-C F1",
        "Arg-C P",
        "Arg-C R",
        "Arg-C F1",
        "Event-overlap",
        "Pairs",
    ];
    let rows: Vec<Vec<String>> = report
        .systems
        .iter()
        .map(|s| {
            let r = &s.report;
            let mut row = vec![md_cell(&r.system)];
            for p in [&r.etype, &r.role, &r.arg] {
                row.extend(prf_cells(p));
            }
            row.push(format!("{} ({})", format_percent(r.event_overlap), s.rank));
            row.push(r.pair_count.to_string());
            row
        })
        .collect();
    let mut out = String::new();
    md_table(&mut out, &header, true, &rows);
    if let Some(records) = &report.per_doc {
        out.push('\n');
        let rows = per_doc_rows(records, md_cell);
        let header: Vec<&str> = PER_DOC_COLUMNS.to_vec();
        md_table(&mut out, &header, true, &rows);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemStats {
    pub system: String,
    pub events: EventStats,
    /// `None` when some document of the system carries no text.
    pub tokens: Option<TokenStats>,
    pub event_types: Vec<String>,
}

pub fn corpus_stats(corpus: &Corpus) -> Vec<SystemStats> {
    corpus
        .systems()
        .iter()
        .map(|system| {
            let docs: Vec<_> = corpus.documents_of_system(system).collect();
            SystemStats {
                system: system.clone(),
                events: event_stats(docs.iter().copied()),
                tokens: token_stats(docs.iter().copied()).ok(),
                event_types: event_type_inventory(docs.iter().copied()),
            }
        })
        .collect()
}

pub fn render_stats(stats: &[SystemStats], format: Format) -> String {
    let event_rows: Vec<Vec<String>> = stats
        .iter()
        .map(|s| {
            vec![
                s.system.clone(),
                s.events.n_events.to_string(),
                s.events.n_roles.to_string(),
                s.events.n_event_types.to_string(),
                s.events.n_role_types.to_string(),
            ]
        })
        .collect();
    let token_rows: Vec<Vec<String>> = stats
        .iter()
        .map(|s| match &s.tokens {
            Some(t) => vec![
                s.system.clone(),
                t.n_docs.to_string(),
                t.n_tokens.to_string(),
                format!("{:.1}", t.avg_tokens),
            ],
            None => vec![s.system.clone(), "-".into(), "-".into(), "-".into()],
        })
        .collect();
    let inventory_rows: Vec<Vec<String>> = stats
        .iter()
        .map(|s| vec![s.system.clone(), s.event_types.join(", ")])
        .collect();

    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&serde_json::json!({ "systems": stats }))
                .expect("stats serialize");
            s.push('\n');
            s
        }
        Format::Tsv => {
            let mut out = String::new();
            let sections: [(&[&str], &[Vec<String>]); 3] = [
                (&["system", "events", "roles", "event_types", "role_types"], &event_rows),
                (&["system", "docs", "tokens", "avg_tokens"], &token_rows),
                (&["system", "event_type_inventory"], &inventory_rows),
            ];
            for (i, (header, rows)) in sections.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                out.push_str(&header.join("\t"));
                out.push('\n');
                for row in rows.iter() {
                    let cells: Vec<String> = row.iter().map(|c| tsv_cell(c)).collect();
                    out.push_str(&cells.join("\t"));
                    out.push('\n');
                }
            }
            out
        }
        Format::Markdown => {
            let clean = |rows: &[Vec<String>]| -> Vec<Vec<String>> {
                rows.iter().map(|r| r.iter().map(|c| md_cell(c)).collect()).collect()
            };
            let mut out = String::new();
            md_table(
                &mut out,
                &["Summary", "#Events", "#Roles", "#Event types", "#Role types"],
                true,
                &clean(&event_rows),
            );
            out.push('\n');
            md_table(&mut out, &["Summary", "#Docs", "#Tokens", "#Avg."], true, &clean(&token_rows));
            out.push('\n');
            md_table(&mut out, &["Summary", "Event types"], true, &clean(&inventory_rows));
            out
        }
    }
}
