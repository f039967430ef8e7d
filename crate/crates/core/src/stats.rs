//! Corpus-level event and token counts.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::event_model::EventDocument;

#[derive(Debug, Error, PartialEq)]
#[error("document {doc_id:?} has no text")]
pub struct MissingText {
    pub doc_id: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EventStats {
    pub n_events: usize,
    /// Total argument instances.
    pub n_roles: usize,
    pub n_event_types: usize,
    pub n_role_types: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct TokenStats {
    pub n_docs: usize,
    pub n_tokens: usize,
    pub avg_tokens: f64,
}

pub fn event_stats<'a, I>(docs: I) -> EventStats
where
    I: IntoIterator<Item = &'a EventDocument>,
{
    let mut types = BTreeSet::new();
    let mut roles = BTreeSet::new();
    let mut stats = EventStats::default();
    for doc in docs {
        for event in &doc.events {
            stats.n_events += 1;
            types.insert(event.event_type.trim());
            for arg in &event.arguments {
                stats.n_roles += 1;
                roles.insert(arg.role.trim());
            }
        }
    }
    stats.n_event_types = types.len();
    stats.n_role_types = roles.len();
    stats
}

/// Distinct event-type labels, sorted.
pub fn event_type_inventory<'a, I>(docs: I) -> Vec<String>
where
    I: IntoIterator<Item = &'a EventDocument>,
{
    docs.into_iter()
        .flat_map(|d| d.events.iter().map(|e| e.event_type.trim()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(str::to_string)
        .collect()
}

/// Whitespace-token counts over document texts.
pub fn token_stats<'a, I>(docs: I) -> Result<TokenStats, MissingText>
where
    I: IntoIterator<Item = &'a EventDocument>,
{
    let mut stats = TokenStats::default();
    for doc in docs {
        let text = doc.text.as_deref().ok_or_else(|| MissingText {
            doc_id: doc.doc_id.clone(),
        })?;
        stats.n_docs += 1;
        stats.n_tokens += text.split_whitespace().count();
    }
    if stats.n_docs > 0 {
        stats.avg_tokens = stats.n_tokens as f64 / stats.n_docs as f64;
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event_model::{Argument, Event};

    fn figure_one() -> EventDocument {
        EventDocument::new("a1", "art1", "annotator_1").with_event(
            Event::new("ARREST-JAIL").with_argument(Argument::new("VICTIM", "Over 450 people")),
        )
    }

    #[test]
    fn counts_events_and_labels() {
        assert_eq!(event_stats(&[] as &[EventDocument]), EventStats::default());
        assert_eq!(
            event_stats(&[figure_one()]),
            EventStats {
                n_events: 1,
                n_roles: 1,
                n_event_types: 1,
                n_role_types: 1
            }
        );
    }

    #[test]
    fn inventory_is_sorted_and_distinct() {
        let doc = EventDocument::new("d", "s", "m")
            .with_event(Event::new("ATTACK"))
            .with_event(Event::new("DIE"))
            .with_event(Event::new("ATTACK"));
        assert_eq!(event_type_inventory(&[doc, figure_one()]), ["ARREST-JAIL", "ATTACK", "DIE"]);
        assert!(event_type_inventory(&[] as &[EventDocument]).is_empty());
    }

    #[test]
    fn tokens_by_whitespace() {
        let doc = EventDocument::new("d", "s", "m").with_text("a b c");
        let stats = token_stats(&[doc]).unwrap();
        assert_eq!((stats.n_docs, stats.n_tokens, stats.avg_tokens), (1, 3, 3.0));
        assert_eq!(
            token_stats(&[figure_one()]).unwrap_err(),
            MissingText { doc_id: "a1".into() }
        );
        assert_eq!(token_stats(&[] as &[EventDocument]).unwrap(), TokenStats::default());
    }
}
