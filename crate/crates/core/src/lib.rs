//! Event-overlap scoring for abstractive summaries.
//!
//! Events extracted upstream from candidate summaries, reference summaries
//! and source articles are compared in three categories:
//!
//! * **eType-C**: event types present on both sides,
//! * **Role-C**: `(event type, argument role)` pairs present on both sides,
//! * **Arg-C**: `(event type, role, argument text)` where the texts only
//!   need to be similar enough under a [`similarity`] provider.
//!
//! Each category gets precision, recall and F1. The event-overlap score
//! averages the three recalls when summaries are compared with reference
//! summaries ([`Mode::ReferenceOverlap`]) and the three precisions when
//! summaries are compared with their source articles
//! ([`Mode::SourceOverlap`]).
//!
//! ```
//! use event_overlap::{
//!     match_documents, score_system, Argument, Event, EventDocument, MatchOptions, Mode,
//!     Pooling, Similarity,
//! };
//!
//! let reference = EventDocument::new("h1", "art1", "annotator_1").with_event(
//!     Event::new("ARREST-JAIL").with_argument(Argument::new("VICTIM", "Over 450 people")),
//! );
//! let candidate = EventDocument::new("c1", "art1", "model").with_event(
//!     Event::new("ARREST-JAIL").with_argument(Argument::new("VICTIM", "450 people")),
//! );
//!
//! let similarity = Similarity::lexical(0.7).unwrap();
//! let counts = match_documents(&candidate, &reference, &similarity, MatchOptions::default()).unwrap();
//! let report = score_system("model", &[counts], Mode::ReferenceOverlap, Pooling::Micro).unwrap();
//! assert_eq!(report.event_overlap, 1.0);
//! ```

pub mod event_model;
pub mod matcher;
pub mod metrics;
pub mod similarity;
pub mod stats;

pub use event_model::{
    parse_corpus, parse_corpus_str, validate_corpus, write_corpus, Argument, Corpus, Diagnostic,
    Event, EventDocument, Ontology, ParseError, Severity, Trigger,
};
pub use matcher::{
    extract_items, match_args, match_documents, match_labels, max_bipartite_matching, ArgItem,
    CategoryCounts, Items, MatchCounts, MatchOptions, RoleItem, TypeItem,
};
pub use metrics::{
    aggregate_corpus, compute_overlap, format_percent, harmonic_mean, pair_documents, prf, rank_systems,
    ranks_by_input, score_system, to_percent, MetricsError, Mode, Pairing, Pooling, Prf, Ranked,
    ScoreReport,
};
pub use similarity::{
    exact_similarity, is_match, lexical_similarity, normalize_text, passes_threshold,
    ExactProvider, LexicalProvider, ProviderKind, RemoteProvider, SimScore, Similarity,
    SimilarityConfig, SimilarityError, SimilarityProvider, DEFAULT_THRESHOLD,
};
pub use stats::{event_stats, event_type_inventory, token_stats, EventStats, MissingText, TokenStats};
