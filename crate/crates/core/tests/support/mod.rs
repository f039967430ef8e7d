//! Test-only oracles and generators. Nothing here calls into the matcher.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use event_overlap::{Argument, Event, EventDocument};
use rand::seq::SliceRandom;
use rand::Rng;

pub const TYPES: [&str; 4] = ["ATTACK", "DIE", "MEET", "TRANSPORT"];
pub const ROLES: [&str; 4] = ["AGENT", "PLACE", "TIME", "VICTIM"];
const WORDS: [&str; 6] = ["oslo", "Oslo", "police", "two", "people", "sunday"];

/// Lowercase, whitespace-collapsed equality on ASCII text.
pub fn oracle_exact(a: &str, b: &str) -> f64 {
    let norm = |s: &str| {
        s.split_whitespace()
            .map(|t| t.to_ascii_lowercase())
            .collect::<Vec<_>>()
    };
    if norm(a) == norm(b) {
        1.0
    } else {
        0.0
    }
}

/// Dice over token multisets, by pairing off equal tokens one at a time.
pub fn oracle_dice(a: &str, b: &str) -> f64 {
    let a: Vec<String> = a.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    let mut b: Vec<Option<String>> = b
        .split_whitespace()
        .map(|t| Some(t.to_ascii_lowercase()))
        .collect();
    let total = a.len() + b.len();
    if total == 0 {
        return 1.0;
    }
    let mut shared = 0;
    for tok in &a {
        if let Some(slot) = b.iter_mut().find(|s| s.as_deref() == Some(tok.as_str())) {
            *slot = None;
            shared += 1;
        }
    }
    2.0 * shared as f64 / total as f64
}

pub fn oracle_accepts(score: f64, threshold: f64) -> bool {
    if threshold >= 1.0 {
        score >= 1.0
    } else {
        score > threshold
    }
}

/// Largest one-to-one pairing by exhaustive search: every candidate item is
/// either left out or paired with any still-free reference item it may
/// match. Memoized on (candidate index, set of used reference items).
fn exhaustive_pairing(edges: &[Vec<bool>], n_ref: usize) -> usize {
    assert!(n_ref <= 24, "group too large for exhaustive search");
    fn go(i: usize, used: u32, edges: &[Vec<bool>], memo: &mut HashMap<(usize, u32), usize>) -> usize {
        if i == edges.len() {
            return 0;
        }
        if let Some(&v) = memo.get(&(i, used)) {
            return v;
        }
        let mut best = go(i + 1, used, edges, memo);
        for (j, &edge) in edges[i].iter().enumerate() {
            if edge && used & (1 << j) == 0 {
                best = best.max(1 + go(i + 1, used | (1 << j), edges, memo));
            }
        }
        memo.insert((i, used), best);
        best
    }
    go(0, 0, edges, &mut HashMap::new())
}

type ArgTuple = (String, String, String);

pub fn arg_tuples(doc: &EventDocument) -> Vec<ArgTuple> {
    doc.events
        .iter()
        .flat_map(|e| {
            e.arguments
                .iter()
                .map(move |a| (e.event_type.clone(), a.role.clone(), a.text.clone()))
        })
        .collect()
}

/// Brute-force Arg-C matched count between two documents.
pub fn oracle_arg_matches(
    cand: &EventDocument,
    reference: &EventDocument,
    score: fn(&str, &str) -> f64,
    threshold: f64,
) -> usize {
    let mut groups: BTreeMap<(String, String), (Vec<String>, Vec<String>)> = BTreeMap::new();
    for (t, r, x) in arg_tuples(cand) {
        groups.entry((t, r)).or_default().0.push(x);
    }
    for (t, r, x) in arg_tuples(reference) {
        groups.entry((t, r)).or_default().1.push(x);
    }
    groups
        .values()
        .map(|(c, r)| {
            let edges: Vec<Vec<bool>> = c
                .iter()
                .map(|a| r.iter().map(|b| oracle_accepts(score(a, b), threshold)).collect())
                .collect();
            exhaustive_pairing(&edges, r.len())
        })
        .sum()
}

/// Brute-force label intersection: pair each candidate label with the
/// first unused equal reference label.
pub fn oracle_label_matches<T: PartialEq>(cand: &[T], reference: &[T]) -> usize {
    let mut used = vec![false; reference.len()];
    let mut n = 0;
    for c in cand {
        if let Some(j) = (0..reference.len()).find(|&j| !used[j] && reference[j] == *c) {
            used[j] = true;
            n += 1;
        }
    }
    n
}

pub fn random_text<R: Rng>(rng: &mut R) -> String {
    let n = rng.gen_range(1..=3);
    (0..n)
        .map(|_| *WORDS.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(if rng.gen_bool(0.2) { "  " } else { " " })
}

/// A document with up to `max_events` events of up to `max_args` arguments.
pub fn random_document<R: Rng>(rng: &mut R, id: &str, max_events: usize, max_args: usize) -> EventDocument {
    let mut doc = EventDocument::new(id, "src", "sys");
    for _ in 0..rng.gen_range(0..=max_events) {
        let mut event = Event::new(*TYPES.choose(rng).unwrap());
        for _ in 0..rng.gen_range(0..=max_args) {
            event = event.with_argument(Argument::new(*ROLES.choose(rng).unwrap(), random_text(rng)));
        }
        doc = doc.with_event(event);
    }
    doc
}

pub fn shuffled<R: Rng>(rng: &mut R, doc: &EventDocument) -> EventDocument {
    let mut doc = doc.clone();
    doc.events.shuffle(rng);
    for e in &mut doc.events {
        e.arguments.shuffle(rng);
    }
    doc
}
