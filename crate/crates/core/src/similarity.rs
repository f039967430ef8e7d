//! Text-pair similarity providers and the threshold test applied to
//! argument text.
//!
//! Three providers are available:
//!
//! * `exact`: 1.0 when the normalized strings are equal, else 0.0.
//! * `lexical`: Dice coefficient over whitespace-token multisets.
//! * `remote`: an HTTP service returning semantic similarity scores
//!   (`POST {url}/similarity`).
//!
//! A pair matches when its score is strictly greater than the threshold
//! (default 0.7). A threshold of exactly 1.0 would make the strict test
//! unsatisfiable, so at 1.0 only a perfect score of 1.0 matches.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

pub const DEFAULT_THRESHOLD: f64 = 0.7;
pub const DEFAULT_BATCH_SIZE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    Exact,
    Lexical,
    Remote,
}

impl ProviderKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProviderKind::Exact => "exact",
            ProviderKind::Lexical => "lexical",
            ProviderKind::Remote => "remote",
        }
    }
}

impl fmt::Display for ProviderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProviderKind {
    type Err = SimilarityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(ProviderKind::Exact),
            "lexical" => Ok(ProviderKind::Lexical),
            "remote" => Ok(ProviderKind::Remote),
            other => Err(SimilarityError::UnknownProvider(other.to_string())),
        }
    }
}

#[derive(Debug, Error)]
pub enum SimilarityError {
    #[error("unknown similarity provider {0:?} (expected exact, lexical or remote)")]
    UnknownProvider(String),
    #[error("threshold {0} is outside [0, 1]")]
    InvalidThreshold(f64),
    #[error("the remote provider requires a remote URL")]
    MissingRemoteUrl,
    #[error("a remote URL is only valid with the remote provider")]
    UnexpectedRemoteUrl,
    #[error("similarity service {url} failed on batch {batch} ({size} pairs): {message}")]
    Remote {
        url: String,
        batch: usize,
        size: usize,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityConfig {
    pub provider: ProviderKind,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub remote_url: Option<String>,
    pub cache_enabled: bool,
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        Self {
            provider: ProviderKind::Lexical,
            threshold: DEFAULT_THRESHOLD,
            remote_url: None,
            cache_enabled: true,
        }
    }
}

impl SimilarityConfig {
    pub fn exact(threshold: f64) -> Self {
        Self {
            provider: ProviderKind::Exact,
            threshold,
            ..Self::default()
        }
    }

    pub fn lexical(threshold: f64) -> Self {
        Self {
            provider: ProviderKind::Lexical,
            threshold,
            ..Self::default()
        }
    }

    pub fn remote(url: impl Into<String>, threshold: f64) -> Self {
        Self {
            provider: ProviderKind::Remote,
            threshold,
            remote_url: Some(url.into()),
            cache_enabled: true,
        }
    }

    pub fn validate(&self) -> Result<(), SimilarityError> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(SimilarityError::InvalidThreshold(self.threshold));
        }
        match (self.provider, &self.remote_url) {
            (ProviderKind::Remote, None) => Err(SimilarityError::MissingRemoteUrl),
            (ProviderKind::Exact | ProviderKind::Lexical, Some(_)) => {
                Err(SimilarityError::UnexpectedRemoteUrl)
            }
            _ => Ok(()),
        }
    }
}

/// A similarity value clamped into `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct SimScore(f64);

impl SimScore {
    pub const ZERO: SimScore = SimScore(0.0);
    pub const ONE: SimScore = SimScore(1.0);

    /// Clamps into range; NaN maps to 0.
    pub fn new(value: f64) -> Self {
        if value.is_nan() {
            SimScore(0.0)
        } else {
            SimScore(value.clamp(0.0, 1.0))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// NFC, full Unicode case folding, whitespace runs collapsed to one space,
/// ends stripped.
pub fn normalize_text(s: &str) -> String {
    let folded = caseless::default_case_fold_str(&s.nfc().collect::<String>());
    // Case folding can produce decomposed sequences; recompose.
    let composed: String = folded.nfc().collect();
    composed.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn exact_similarity(a: &str, b: &str) -> SimScore {
    if normalize_text(a) == normalize_text(b) {
        SimScore::ONE
    } else {
        SimScore::ZERO
    }
}

/// Dice coefficient over whitespace-token multisets of the normalized
/// inputs: `2 |A ∩ B| / (|A| + |B|)`.
pub fn lexical_similarity(a: &str, b: &str) -> SimScore {
    let a = normalize_text(a);
    let b = normalize_text(b);
    let mut counts: HashMap<&str, (usize, usize)> = HashMap::new();
    let mut len_a = 0;
    let mut len_b = 0;
    for tok in a.split(' ').filter(|t| !t.is_empty()) {
        counts.entry(tok).or_default().0 += 1;
        len_a += 1;
    }
    for tok in b.split(' ').filter(|t| !t.is_empty()) {
        counts.entry(tok).or_default().1 += 1;
        len_b += 1;
    }
    match (len_a, len_b) {
        (0, 0) => SimScore::ONE,
        (0, _) | (_, 0) => SimScore::ZERO,
        _ => {
            let shared: usize = counts.values().map(|&(x, y)| x.min(y)).sum();
            SimScore::new(2.0 * shared as f64 / (len_a + len_b) as f64)
        }
    }
}

/// The match decision for a score: strictly greater than `threshold`, or
/// exactly 1.0 when the threshold is 1.0.
pub fn passes_threshold(score: SimScore, threshold: f64) -> bool {
    if threshold >= 1.0 {
        score.value() >= 1.0
    } else {
        score.value() > threshold
    }
}

pub trait SimilarityProvider: Send + Sync {
    fn name(&self) -> &'static str;

    /// One score per pair, in input order.
    fn score_pairs(&self, pairs: &[(&str, &str)]) -> Result<Vec<SimScore>, SimilarityError>;

    /// Whether `score(a, b) == score(b, a)` is guaranteed.
    fn is_symmetric(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExactProvider;

impl SimilarityProvider for ExactProvider {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn score_pairs(&self, pairs: &[(&str, &str)]) -> Result<Vec<SimScore>, SimilarityError> {
        Ok(pairs.iter().map(|(a, b)| exact_similarity(a, b)).collect())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LexicalProvider;

impl SimilarityProvider for LexicalProvider {
    fn name(&self) -> &'static str {
        "lexical"
    }

    fn score_pairs(&self, pairs: &[(&str, &str)]) -> Result<Vec<SimScore>, SimilarityError> {
        Ok(pairs.iter().map(|(a, b)| lexical_similarity(a, b)).collect())
    }
}

#[derive(Serialize)]
struct RemoteRequest<'a> {
    pairs: &'a [(String, String)],
}

#[derive(Deserialize)]
struct RemoteResponse {
    scores: Vec<f64>,
}

type PairKey = (String, String);

/// Client for the similarity service. Texts are normalized before they
/// are sent, and the normalized pair is the cache key; a cached `(b, a)`
/// answers a lookup for `(a, b)`.
pub struct RemoteProvider {
    base_url: String,
    endpoint: String,
    agent: ureq::Agent,
    batch_size: usize,
    cache: Option<Mutex<HashMap<PairKey, f64>>>,
}

impl fmt::Debug for RemoteProvider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RemoteProvider")
            .field("base_url", &self.base_url)
            .field("batch_size", &self.batch_size)
            .field("cache_enabled", &self.cache.is_some())
            .finish()
    }
}

impl RemoteProvider {
    pub fn new(base_url: impl Into<String>, cache_enabled: bool) -> Self {
        let base_url = base_url.into();
        let endpoint = format!("{}/similarity", base_url.trim_end_matches('/'));
        let agent = ureq::AgentBuilder::new()
            .timeout_connect(Duration::from_secs(10))
            .timeout(Duration::from_secs(300))
            .build();
        Self {
            base_url,
            endpoint,
            agent,
            batch_size: DEFAULT_BATCH_SIZE,
            cache: cache_enabled.then(|| Mutex::new(HashMap::new())),
        }
    }

    pub fn with_batch_size(mut self, batch_size: usize) -> Self {
        self.batch_size = batch_size.max(1);
        self
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }

    pub fn cached_pairs(&self) -> usize {
        self.cache
            .as_ref()
            .map(|c| c.lock().expect("similarity cache poisoned").len())
            .unwrap_or(0)
    }

    fn lookup(cache: &HashMap<PairKey, f64>, key: &PairKey) -> Option<f64> {
        cache
            .get(key)
            .or_else(|| cache.get(&(key.1.clone(), key.0.clone())))
            .copied()
    }

    fn request_batch(&self, batch_index: usize, pairs: &[PairKey]) -> Result<Vec<f64>, SimilarityError> {
        let fail = |message: String| SimilarityError::Remote {
            url: self.endpoint.clone(),
            batch: batch_index,
            size: pairs.len(),
            message,
        };
        let response = self
            .agent
            .post(&self.endpoint)
            .set("Content-Type", "application/json")
            .send_json(RemoteRequest { pairs })
            .map_err(|e| match e {
                ureq::Error::Status(code, _) => fail(format!("HTTP status {code}")),
                ureq::Error::Transport(t) => fail(t.to_string()),
            })?;
        if response.status() != 200 {
            return Err(fail(format!("HTTP status {}", response.status())));
        }
        let body: RemoteResponse = response
            .into_json()
            .map_err(|e| fail(format!("malformed response: {e}")))?;
        if body.scores.len() != pairs.len() {
            return Err(fail(format!(
                "malformed response: {} scores for {} pairs",
                body.scores.len(),
                pairs.len()
            )));
        }
        Ok(body.scores)
    }

    fn fetch(&self, pending: &[PairKey]) -> Result<Vec<f64>, SimilarityError> {
        let mut out = Vec::with_capacity(pending.len());
        for (i, batch) in pending.chunks(self.batch_size).enumerate() {
            out.extend(self.request_batch(i, batch)?);
        }
        Ok(out)
    }
}

impl SimilarityProvider for RemoteProvider {
    fn name(&self) -> &'static str {
        "remote"
    }

    fn score_pairs(&self, pairs: &[(&str, &str)]) -> Result<Vec<SimScore>, SimilarityError> {
        let keys: Vec<PairKey> = pairs
            .iter()
            .map(|(a, b)| (normalize_text(a), normalize_text(b)))
            .collect();

        let Some(cache) = &self.cache else {
            return Ok(self.fetch(&keys)?.into_iter().map(SimScore::new).collect());
        };

        let mut pending: Vec<PairKey> = Vec::new();
        {
            let cache = cache.lock().expect("similarity cache poisoned");
            let mut queued: HashMap<&PairKey, ()> = HashMap::new();
            for key in &keys {
                let reversed = (key.1.clone(), key.0.clone());
                if Self::lookup(&cache, key).is_none()
                    && !queued.contains_key(key)
                    && !queued.contains_key(&reversed)
                {
                    queued.insert(key, ());
                    pending.push(key.clone());
                }
            }
        }

        // The lock is not held across network calls; a concurrent caller may
        // fetch the same pair, which only costs a duplicate request.
        let fetched = self.fetch(&pending)?;

        let mut cache = cache.lock().expect("similarity cache poisoned");
        for (key, score) in pending.into_iter().zip(fetched) {
            cache.insert(key, score);
        }
        Ok(keys
            .iter()
            .map(|k| SimScore::new(Self::lookup(&cache, k).expect("pair fetched above")))
            .collect())
    }

    fn is_symmetric(&self) -> bool {
        false
    }
}

/// A configured provider together with its match threshold.
pub struct Similarity {
    provider: Box<dyn SimilarityProvider>,
    threshold: f64,
}

impl fmt::Debug for Similarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Similarity")
            .field("provider", &self.provider.name())
            .field("threshold", &self.threshold)
            .finish()
    }
}

impl Similarity {
    pub fn from_config(config: &SimilarityConfig) -> Result<Self, SimilarityError> {
        config.validate()?;
        let provider: Box<dyn SimilarityProvider> = match config.provider {
            ProviderKind::Exact => Box::new(ExactProvider),
            ProviderKind::Lexical => Box::new(LexicalProvider),
            ProviderKind::Remote => Box::new(RemoteProvider::new(
                config.remote_url.clone().ok_or(SimilarityError::MissingRemoteUrl)?,
                config.cache_enabled,
            )),
        };
        Ok(Self {
            provider,
            threshold: config.threshold,
        })
    }

    pub fn with_provider(
        provider: Box<dyn SimilarityProvider>,
        threshold: f64,
    ) -> Result<Self, SimilarityError> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(SimilarityError::InvalidThreshold(threshold));
        }
        Ok(Self {
            provider,
            threshold,
        })
    }

    pub fn exact(threshold: f64) -> Result<Self, SimilarityError> {
        Self::from_config(&SimilarityConfig::exact(threshold))
    }

    pub fn lexical(threshold: f64) -> Result<Self, SimilarityError> {
        Self::from_config(&SimilarityConfig::lexical(threshold))
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn provider_name(&self) -> &'static str {
        self.provider.name()
    }

    pub fn is_symmetric(&self) -> bool {
        self.provider.is_symmetric()
    }

    pub fn score(&self, a: &str, b: &str) -> Result<SimScore, SimilarityError> {
        Ok(self.provider.score_pairs(&[(a, b)])?[0])
    }

    pub fn score_pairs(&self, pairs: &[(&str, &str)]) -> Result<Vec<SimScore>, SimilarityError> {
        if pairs.is_empty() {
            return Ok(Vec::new());
        }
        self.provider.score_pairs(pairs)
    }

    pub fn accepts(&self, score: SimScore) -> bool {
        passes_threshold(score, self.threshold)
    }

    pub fn is_match(&self, a: &str, b: &str) -> Result<bool, SimilarityError> {
        Ok(self.accepts(self.score(a, b)?))
    }
}

/// One-shot match test. Builds the provider from `config` on every call;
/// hold a [`Similarity`] instead when testing many pairs.
pub fn is_match(a: &str, b: &str, config: &SimilarityConfig) -> Result<bool, SimilarityError> {
    Similarity::from_config(config)?.is_match(a, b)
}
