//! Event data model and the JSONL corpus format.
//!
//! Each line of a corpus file is one [`EventDocument`]: a summary or an
//! article together with the events an upstream extractor found in it.
//!
//! ```text
//! {"doc_id":"a1","source_id":"art1","system":"annotator_1","events":[
//!   {"event_type":"ARREST-JAIL","trigger":{"text":"arrested"},
//!    "arguments":[{"role":"VICTIM","text":"Over 450 people"}]}]}
//! ```
//!
//! Unknown fields are ignored. Label strings (`event_type`, `role`) are
//! trimmed on parse and otherwise compared verbatim.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

const REQUIRED_FIELDS: [&str; 4] = ["doc_id", "source_id", "system", "events"];

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Argument {
    pub role: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<usize>,
}

impl Argument {
    pub fn new(role: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            role: role.into(),
            text: text.into(),
            start: None,
            end: None,
        }
    }

    pub fn with_span(mut self, start: usize, end: usize) -> Self {
        self.start = Some(start);
        self.end = Some(end);
        self
    }
}

/// The word(s) evoking an event. Kept for provenance only: scoring never
/// looks at triggers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Trigger {
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<usize>,
}

impl Trigger {
    pub fn new(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            start: None,
            end: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Event {
    pub event_type: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trigger: Option<Trigger>,
    #[serde(default)]
    pub arguments: Vec<Argument>,
}

impl Event {
    pub fn new(event_type: impl Into<String>) -> Self {
        Self {
            event_type: event_type.into(),
            trigger: None,
            arguments: Vec::new(),
        }
    }

    pub fn with_trigger(mut self, trigger: Trigger) -> Self {
        self.trigger = Some(trigger);
        self
    }

    pub fn with_argument(mut self, argument: Argument) -> Self {
        self.arguments.push(argument);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventDocument {
    pub doc_id: String,
    pub source_id: String,
    /// Producer of the text: a model name, an annotator id, or `"article"`.
    pub system: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    pub events: Vec<Event>,
}

impl EventDocument {
    pub fn new(
        doc_id: impl Into<String>,
        source_id: impl Into<String>,
        system: impl Into<String>,
    ) -> Self {
        Self {
            doc_id: doc_id.into(),
            source_id: source_id.into(),
            system: system.into(),
            text: None,
            events: Vec::new(),
        }
    }

    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.text = Some(text.into());
        self
    }

    pub fn with_event(mut self, event: Event) -> Self {
        self.events.push(event);
        self
    }

    fn trim_labels(&mut self) {
        for event in &mut self.events {
            trim_in_place(&mut event.event_type);
            for arg in &mut event.arguments {
                trim_in_place(&mut arg.role);
            }
        }
    }
}

fn trim_in_place(s: &mut String) {
    let trimmed = s.trim();
    if trimmed.len() != s.len() {
        *s = trimmed.to_string();
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: invalid UTF-8")]
    Encoding { line: usize },
    #[error("line 1: byte-order mark is not permitted")]
    ByteOrderMark,
    #[error("line {line}: malformed JSON: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: missing required field `{field}`")]
    MissingField { line: usize, field: &'static str },
    #[error("line {line}: field `{field}` must not be empty")]
    EmptyField { line: usize, field: &'static str },
    #[error("duplicate doc_id {doc_id:?} on lines {first} and {second}")]
    DuplicateDocId {
        doc_id: String,
        first: usize,
        second: usize,
    },
    #[error("line {line}: read failed: {message}")]
    Io { line: usize, message: String },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match self {
            ParseError::ByteOrderMark => 1,
            ParseError::Encoding { line }
            | ParseError::Malformed { line, .. }
            | ParseError::MissingField { line, .. }
            | ParseError::EmptyField { line, .. }
            | ParseError::Io { line, .. } => *line,
            ParseError::DuplicateDocId { second, .. } => *second,
        }
    }
}

/// An ordered, immutable collection of documents with a lookup index.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    documents: Vec<EventDocument>,
    by_system_source: HashMap<(String, String), Vec<usize>>,
    by_source: HashMap<String, Vec<usize>>,
    systems: Vec<String>,
}

impl Corpus {
    /// Builds a corpus from already-constructed documents. Fails on a
    /// repeated `doc_id`, reporting 1-based positions as line numbers.
    pub fn from_documents(documents: Vec<EventDocument>) -> Result<Self, ParseError> {
        let mut seen: HashMap<&str, usize> = HashMap::new();
        for (i, doc) in documents.iter().enumerate() {
            if let Some(first) = seen.insert(&doc.doc_id, i + 1) {
                return Err(ParseError::DuplicateDocId {
                    doc_id: doc.doc_id.clone(),
                    first,
                    second: i + 1,
                });
            }
        }
        Ok(Self::build(documents))
    }

    fn build(documents: Vec<EventDocument>) -> Self {
        let mut by_system_source: HashMap<(String, String), Vec<usize>> = HashMap::new();
        let mut by_source: HashMap<String, Vec<usize>> = HashMap::new();
        let mut systems = Vec::new();
        let mut seen_systems = HashSet::new();
        for (i, doc) in documents.iter().enumerate() {
            by_system_source
                .entry((doc.system.clone(), doc.source_id.clone()))
                .or_default()
                .push(i);
            by_source.entry(doc.source_id.clone()).or_default().push(i);
            if seen_systems.insert(doc.system.clone()) {
                systems.push(doc.system.clone());
            }
        }
        Self {
            documents,
            by_system_source,
            by_source,
            systems,
        }
    }

    pub fn documents(&self) -> &[EventDocument] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, EventDocument> {
        self.documents.iter()
    }

    /// Distinct `system` values in order of first appearance.
    pub fn systems(&self) -> &[String] {
        &self.systems
    }

    pub fn documents_for(&self, system: &str, source_id: &str) -> Vec<&EventDocument> {
        self.by_system_source
            .get(&(system.to_string(), source_id.to_string()))
            .map(|ix| ix.iter().map(|&i| &self.documents[i]).collect())
            .unwrap_or_default()
    }

    pub fn documents_for_source(&self, source_id: &str) -> Vec<&EventDocument> {
        self.by_source
            .get(source_id)
            .map(|ix| ix.iter().map(|&i| &self.documents[i]).collect())
            .unwrap_or_default()
    }

    pub fn documents_of_system<'a>(
        &'a self,
        system: &'a str,
    ) -> impl Iterator<Item = &'a EventDocument> + 'a {
        self.documents.iter().filter(move |d| d.system == system)
    }

    pub fn into_documents(self) -> Vec<EventDocument> {
        self.documents
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a EventDocument;
    type IntoIter = std::slice::Iter<'a, EventDocument>;

    fn into_iter(self) -> Self::IntoIter {
        self.documents.iter()
    }
}

/// Parses a JSONL event corpus. Blank lines are skipped; line numbers in
/// errors are 1-based and count blank lines.
pub fn parse_corpus<R: BufRead>(mut reader: R) -> Result<Corpus, ParseError> {
    let mut documents = Vec::new();
    let mut first_line: HashMap<String, usize> = HashMap::new();
    let mut buf = Vec::new();
    let mut line_no = 0usize;

    loop {
        buf.clear();
        let n = reader
            .read_until(b'\n', &mut buf)
            .map_err(|e| ParseError::Io {
                line: line_no + 1,
                message: e.to_string(),
            })?;
        if n == 0 {
            break;
        }
        line_no += 1;
        if line_no == 1 && buf.starts_with(&[0xEF, 0xBB, 0xBF]) {
            return Err(ParseError::ByteOrderMark);
        }
        let line = std::str::from_utf8(&buf).map_err(|_| ParseError::Encoding { line: line_no })?;
        let line = line.trim_end_matches(['\n', '\r']);
        if line.trim().is_empty() {
            continue;
        }

        let doc = parse_line(line, line_no)?;
        if let Some(&first) = first_line.get(&doc.doc_id) {
            return Err(ParseError::DuplicateDocId {
                doc_id: doc.doc_id,
                first,
                second: line_no,
            });
        }
        first_line.insert(doc.doc_id.clone(), line_no);
        documents.push(doc);
    }

    Ok(Corpus::build(documents))
}

pub fn parse_corpus_str(input: &str) -> Result<Corpus, ParseError> {
    parse_corpus(input.as_bytes())
}

fn parse_line(line: &str, line_no: usize) -> Result<EventDocument, ParseError> {
    let value: serde_json::Value =
        serde_json::from_str(line).map_err(|e| ParseError::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
    let object = value.as_object().ok_or_else(|| ParseError::Malformed {
        line: line_no,
        message: "expected a JSON object".to_string(),
    })?;
    for field in REQUIRED_FIELDS {
        if !object.contains_key(field) {
            return Err(ParseError::MissingField {
                line: line_no,
                field,
            });
        }
    }

    let mut doc: EventDocument =
        serde_json::from_value(value).map_err(|e| ParseError::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
    if doc.doc_id.trim().is_empty() {
        return Err(ParseError::EmptyField {
            line: line_no,
            field: "doc_id",
        });
    }
    if doc.source_id.trim().is_empty() {
        return Err(ParseError::EmptyField {
            line: line_no,
            field: "source_id",
        });
    }
    doc.trim_labels();
    Ok(doc)
}

/// Writes the corpus back out as JSONL, one document per line.
pub fn write_corpus<W: Write>(corpus: &Corpus, mut out: W) -> std::io::Result<()> {
    for doc in corpus {
        serde_json::to_writer(&mut out, doc)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Warning => f.write_str("warning"),
            Severity::Error => f.write_str("error"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub doc_id: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.severity, self.doc_id, self.message)
    }
}

/// A controlled vocabulary of event-type labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ontology {
    labels: HashSet<String>,
}

impl Ontology {
    /// One label per line; surrounding whitespace trimmed, blank lines skipped.
    pub fn parse(input: &str) -> Self {
        input.lines().collect()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.labels.contains(label.trim())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

impl<S: AsRef<str>> FromIterator<S> for Ontology {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self {
            labels: iter
                .into_iter()
                .map(|s| s.as_ref().trim().to_string())
                .filter(|s| !s.is_empty())
                .collect(),
        }
    }
}

/// Checks content-level constraints the parser does not enforce. An empty
/// result means the corpus is clean.
pub fn validate_corpus(corpus: &Corpus, ontology: Option<&Ontology>) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for doc in corpus {
        let text_len = doc.text.as_ref().map(|t| t.chars().count());
        let mut push = |severity, message: String| {
            out.push(Diagnostic {
                severity,
                doc_id: doc.doc_id.clone(),
                message,
            })
        };

        for (ei, event) in doc.events.iter().enumerate() {
            if event.event_type.trim().is_empty() {
                push(Severity::Error, format!("event {ei}: empty event_type"));
            } else if let Some(ontology) = ontology {
                if !ontology.contains(&event.event_type) {
                    push(
                        Severity::Warning,
                        format!(
                            "event {ei}: event_type {:?} not in ontology",
                            event.event_type
                        ),
                    );
                }
            }

            if let Some(trigger) = &event.trigger {
                if trigger.text.trim().is_empty() {
                    push(Severity::Error, format!("event {ei}: empty trigger text"));
                }
                if let Some(msg) = check_span(trigger.start, trigger.end, text_len) {
                    push(Severity::Error, format!("event {ei} trigger: {msg}"));
                }
            }

            for (ai, arg) in event.arguments.iter().enumerate() {
                if arg.role.trim().is_empty() {
                    push(Severity::Error, format!("event {ei} argument {ai}: empty role"));
                }
                if arg.text.trim().is_empty() {
                    push(Severity::Error, format!("event {ei} argument {ai}: empty text"));
                }
                if let Some(msg) = check_span(arg.start, arg.end, text_len) {
                    push(Severity::Error, format!("event {ei} argument {ai}: {msg}"));
                }
            }
        }
    }
    out
}

fn check_span(start: Option<usize>, end: Option<usize>, text_len: Option<usize>) -> Option<String> {
    if let (Some(s), Some(e)) = (start, end) {
        if s >= e {
            return Some(format!("offsets out of order (start {s} >= end {e})"));
        }
    }
    let len = text_len?;
    match (start, end) {
        (Some(s), _) if s >= len => Some(format!("start offset {s} outside text of {len} chars")),
        // `end` is exclusive so it may equal the text length.
        (_, Some(e)) if e > len => Some(format!("end offset {e} outside text of {len} chars")),
        _ => None,
    }
}
