//! Comparison items and per-category match counting between a candidate
//! document and a reference document.
//!
//! Three item pools are drawn from each document, independently of each
//! other: one event-type item per event, and one role item plus one
//! argument item per argument. Triggers are never used.
//!
//! Event-type and role items match by multiset intersection of exact
//! labels. Argument items match one-to-one within an exact
//! `(event_type, role)` group, with an edge wherever the argument texts pass
//! the similarity threshold; the count is the size of a maximum matching.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::hash::Hash;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::event_model::EventDocument;
use crate::similarity::{normalize_text, Similarity, SimilarityError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeItem<'a> {
    pub event_type: &'a str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RoleItem<'a> {
    pub event_type: &'a str,
    pub role: &'a str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArgItem<'a> {
    pub event_type: &'a str,
    pub role: &'a str,
    pub text: &'a str,
}

impl<'a> ArgItem<'a> {
    pub fn key(&self) -> RoleItem<'a> {
        RoleItem {
            event_type: self.event_type,
            role: self.role,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Items<'a> {
    pub types: Vec<TypeItem<'a>>,
    pub roles: Vec<RoleItem<'a>>,
    pub args: Vec<ArgItem<'a>>,
}

impl Items<'_> {
    /// Collapses each pool to distinct items. Argument items are compared
    /// by labels and normalized text.
    pub fn dedupe(&mut self) {
        dedupe_by(&mut self.types, |t| *t);
        dedupe_by(&mut self.roles, |r| *r);
        dedupe_by(&mut self.args, |a| (a.event_type, a.role, normalize_text(a.text)));
    }
}

fn dedupe_by<T, K: Hash + Eq>(items: &mut Vec<T>, key: impl Fn(&T) -> K) {
    let mut seen = HashSet::new();
    items.retain(|item| seen.insert(key(item)));
}

pub fn extract_items(doc: &EventDocument) -> Items<'_> {
    let mut items = Items::default();
    for event in &doc.events {
        let event_type = event.event_type.trim();
        items.types.push(TypeItem { event_type });
        for arg in &event.arguments {
            let role = arg.role.trim();
            items.roles.push(RoleItem { event_type, role });
            items.args.push(ArgItem {
                event_type,
                role,
                text: &arg.text,
            });
        }
    }
    items
}

/// Size of the multiset intersection: `Σ_t min(count_cand(t), count_ref(t))`.
pub fn match_labels<T: Hash + Eq>(cand: &[T], reference: &[T]) -> usize {
    let mut counts: HashMap<&T, (usize, usize)> = HashMap::new();
    for t in cand {
        counts.entry(t).or_default().0 += 1;
    }
    for t in reference {
        counts.entry(t).or_default().1 += 1;
    }
    counts.values().map(|&(c, r)| c.min(r)).sum()
}

/// Maximum-cardinality one-to-one matching of argument items. Only items
/// with identical `(event_type, role)` can be paired.
pub fn match_args(
    cand: &[ArgItem<'_>],
    reference: &[ArgItem<'_>],
    similarity: &Similarity,
) -> Result<usize, SimilarityError> {
    let mut groups: BTreeMap<RoleItem<'_>, (Vec<&str>, Vec<&str>)> = BTreeMap::new();
    for item in cand {
        groups.entry(item.key()).or_default().0.push(item.text);
    }
    for item in reference {
        groups.entry(item.key()).or_default().1.push(item.text);
    }
    groups.retain(|_, (c, r)| !c.is_empty() && !r.is_empty());

    // Score every candidate/reference pair of every group in one batch.
    let mut pairs = Vec::new();
    for (c, r) in groups.values() {
        for a in c {
            for b in r {
                pairs.push((*a, *b));
            }
        }
    }
    let scores = similarity.score_pairs(&pairs)?;

    let mut offset = 0;
    let mut matched = 0;
    for (c, r) in groups.values() {
        let adjacency: Vec<Vec<usize>> = (0..c.len())
            .map(|i| {
                (0..r.len())
                    .filter(|&j| similarity.accepts(scores[offset + i * r.len() + j]))
                    .collect()
            })
            .collect();
        offset += c.len() * r.len();
        matched += max_bipartite_matching(&adjacency, r.len());
    }
    Ok(matched)
}

/// Kuhn's augmenting-path algorithm. `adjacency[i]` lists the right-side
/// vertices (in `0..right_len`) adjacent to left vertex `i`.
pub fn max_bipartite_matching(adjacency: &[Vec<usize>], right_len: usize) -> usize {
    fn augment(
        v: usize,
        adjacency: &[Vec<usize>],
        visited: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for &to in &adjacency[v] {
            if visited[to] {
                continue;
            }
            visited[to] = true;
            if owner[to].is_none_or(|u| augment(u, adjacency, visited, owner)) {
                owner[to] = Some(v);
                return true;
            }
        }
        false
    }

    let mut owner = vec![None; right_len];
    let mut visited = vec![false; right_len];
    let mut size = 0;
    for v in 0..adjacency.len() {
        visited.iter_mut().for_each(|x| *x = false);
        if augment(v, adjacency, &mut visited, &mut owner) {
            size += 1;
        }
    }
    size
}

/// Tallies for one category.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryCounts {
    pub matched: usize,
    pub cand: usize,
    #[serde(rename = "ref")]
    pub reference: usize,
}

impl CategoryCounts {
    pub fn new(matched: usize, cand: usize, reference: usize) -> Self {
        Self {
            matched,
            cand,
            reference,
        }
    }

    pub fn swapped(self) -> Self {
        Self {
            matched: self.matched,
            cand: self.reference,
            reference: self.cand,
        }
    }
}

impl Add for CategoryCounts {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            matched: self.matched + rhs.matched,
            cand: self.cand + rhs.cand,
            reference: self.reference + rhs.reference,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchCounts {
    pub etype: CategoryCounts,
    pub role: CategoryCounts,
    pub arg: CategoryCounts,
}

impl MatchCounts {
    pub fn categories(&self) -> [CategoryCounts; 3] {
        [self.etype, self.role, self.arg]
    }

    pub fn swapped(self) -> Self {
        Self {
            etype: self.etype.swapped(),
            role: self.role.swapped(),
            arg: self.arg.swapped(),
        }
    }
}

impl Add for MatchCounts {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            etype: self.etype + rhs.etype,
            role: self.role + rhs.role,
            arg: self.arg + rhs.arg,
        }
    }
}

impl AddAssign for MatchCounts {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl std::iter::Sum for MatchCounts {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), Add::add)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MatchOptions {
    /// Set semantics: collapse duplicate items within each document first.
    pub dedupe_items: bool,
}

pub fn match_documents(
    cand: &EventDocument,
    reference: &EventDocument,
    similarity: &Similarity,
    options: MatchOptions,
) -> Result<MatchCounts, SimilarityError> {
    let mut c = extract_items(cand);
    let mut r = extract_items(reference);
    if options.dedupe_items {
        c.dedupe();
        r.dedupe();
    }
    Ok(MatchCounts {
        etype: CategoryCounts::new(match_labels(&c.types, &r.types), c.types.len(), r.types.len()),
        role: CategoryCounts::new(match_labels(&c.roles, &r.roles), c.roles.len(), r.roles.len()),
        arg: CategoryCounts::new(
            match_args(&c.args, &r.args, similarity)?,
            c.args.len(),
            r.args.len(),
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event_model::{Argument, Event};
    use crate::similarity::{SimScore, SimilarityProvider};

    fn figure_one() -> EventDocument {
        EventDocument::new("a1", "art1", "annotator_1").with_event(
            Event::new("ARREST-JAIL")
                .with_trigger(crate::event_model::Trigger::new("arrested"))
                .with_argument(Argument::new("VICTIM", "Over 450 people")),
        )
    }

    fn arg<'a>(t: &'a str, r: &'a str, x: &'a str) -> ArgItem<'a> {
        ArgItem {
            event_type: t,
            role: r,
            text: x,
        }
    }

    #[test]
    fn extracts_items_without_triggers() {
        let doc = figure_one();
        let items = extract_items(&doc);
        assert_eq!(items.types, [TypeItem { event_type: "ARREST-JAIL" }]);
        assert_eq!(
            items.roles,
            [RoleItem {
                event_type: "ARREST-JAIL",
                role: "VICTIM"
            }]
        );
        assert_eq!(items.args, [arg("ARREST-JAIL", "VICTIM", "Over 450 people")]);
        assert!(!items.args.iter().any(|a| a.text == "arrested"));
    }

    #[test]
    fn empty_document_yields_no_items() {
        let doc = EventDocument::new("e", "s", "m");
        assert_eq!(extract_items(&doc), Items::default());
    }

    #[test]
    fn repeated_roles_are_kept() {
        let doc = EventDocument::new("e", "s", "m").with_event(
            Event::new("MEET")
                .with_argument(Argument::new("ENTITY", "Støre"))
                .with_argument(Argument::new("ENTITY", "Biden")),
        );
        let items = extract_items(&doc);
        assert_eq!((items.types.len(), items.roles.len(), items.args.len()), (1, 2, 2));
        assert_eq!(items.roles[0], items.roles[1]);
    }

    #[test]
    fn label_intersection_uses_min_counts() {
        assert_eq!(match_labels(&["A", "A", "B"], &["A", "B", "B"]), 2);
        assert_eq!(match_labels::<&str>(&[], &["A"]), 0);
        assert_eq!(match_labels(&["A"], &["A"]), 1);
    }

    #[test]
    fn args_identity_and_dice() {
        let exact = Similarity::exact(0.7).unwrap();
        let lexical = Similarity::lexical(0.7).unwrap();
        let c = [arg("T", "R", "over 450 people")];
        assert_eq!(match_args(&c, &c, &exact).unwrap(), 1);
        // Dice("a b c", "a b") = 0.8 > 0.7
        assert_eq!(
            match_args(&[arg("T", "R", "a b c")], &[arg("T", "R", "a b")], &lexical).unwrap(),
            1
        );
    }

    struct Table(Vec<((&'static str, &'static str), f64)>);

    impl SimilarityProvider for Table {
        fn name(&self) -> &'static str {
            "table"
        }
        fn score_pairs(&self, pairs: &[(&str, &str)]) -> Result<Vec<SimScore>, SimilarityError> {
            Ok(pairs
                .iter()
                .map(|p| {
                    let v = self
                        .0
                        .iter()
                        .find(|(k, _)| *k == *p || (k.1, k.0) == *p)
                        .map_or(0.0, |(_, v)| *v);
                    SimScore::new(v)
                })
                .collect())
        }
    }

    #[test]
    fn args_match_one_to_one() {
        let sim = Similarity::with_provider(
            Box::new(Table(vec![(("x", "y"), 0.9), (("y", "y"), 1.0)])),
            0.7,
        )
        .unwrap();
        let c = [arg("T", "R", "x"), arg("T", "R", "y")];
        let r = [arg("T", "R", "y")];
        assert_eq!(match_args(&c, &r, &sim).unwrap(), 1);
    }

    #[test]
    fn args_never_cross_groups() {
        let exact = Similarity::exact(0.7).unwrap();
        let c = [arg("T", "R", "x"), arg("T", "S", "y")];
        let r = [arg("T", "S", "x"), arg("U", "R", "y")];
        assert_eq!(match_args(&c, &r, &exact).unwrap(), 0);
    }

    #[test]
    fn augmenting_paths_beat_greedy() {
        // Greedy would pair 0-0 and strand 1; the maximum is 2.
        assert_eq!(max_bipartite_matching(&[vec![0, 1], vec![0]], 2), 2);
        assert_eq!(max_bipartite_matching(&[vec![], vec![]], 3), 0);
        assert_eq!(max_bipartite_matching(&[vec![0], vec![0], vec![0]], 1), 1);
    }

    #[test]
    fn identical_documents_match_fully() {
        let doc = figure_one().with_event(
            Event::new("DIE")
                .with_argument(Argument::new("VICTIM", "two"))
                .with_argument(Argument::new("PLACE", "Oslo")),
        );
        let sim = Similarity::exact(0.7).unwrap();
        let counts = match_documents(&doc, &doc, &sim, MatchOptions::default()).unwrap();
        for c in counts.categories() {
            assert_eq!(c.matched, c.cand);
            assert_eq!(c.matched, c.reference);
        }
        assert_eq!(counts.etype.matched, 2);
        assert_eq!(counts.arg.matched, 3);
    }

    #[test]
    fn empty_candidate_matches_nothing() {
        let sim = Similarity::lexical(0.7).unwrap();
        let empty = EventDocument::new("e", "art1", "m");
        let counts = match_documents(&empty, &figure_one(), &sim, MatchOptions::default()).unwrap();
        assert_eq!(counts.etype, CategoryCounts::new(0, 0, 1));
        assert_eq!(counts.role, CategoryCounts::new(0, 0, 1));
        assert_eq!(counts.arg, CategoryCounts::new(0, 0, 1));
    }

    #[test]
    fn renamed_role_breaks_role_and_arg() {
        let mut renamed = figure_one();
        renamed.events[0].arguments[0].role = "AGENT".into();
        let sim = Similarity::exact(0.7).unwrap();
        let counts = match_documents(&renamed, &figure_one(), &sim, MatchOptions::default()).unwrap();
        assert_eq!(counts.etype.matched, 1);
        assert_eq!(counts.role.matched, 0);
        assert_eq!(counts.arg.matched, 0);
    }

    #[test]
    fn dedupe_gives_set_semantics() {
        let cand = EventDocument::new("c", "s", "m")
            .with_event(Event::new("ATTACK").with_argument(Argument::new("PLACE", "Oslo")))
            .with_event(Event::new("ATTACK").with_argument(Argument::new("PLACE", "oslo ")));
        let reference = EventDocument::new("r", "s", "h")
            .with_event(Event::new("ATTACK").with_argument(Argument::new("PLACE", "Oslo")));
        let sim = Similarity::exact(0.7).unwrap();
        let multi = match_documents(&cand, &reference, &sim, MatchOptions::default()).unwrap();
        assert_eq!(multi.etype, CategoryCounts::new(1, 2, 1));
        assert_eq!(multi.arg, CategoryCounts::new(1, 2, 1));
        let set = match_documents(&cand, &reference, &sim, MatchOptions { dedupe_items: true }).unwrap();
        assert_eq!(set.etype, CategoryCounts::new(1, 1, 1));
        assert_eq!(set.role, CategoryCounts::new(1, 1, 1));
        assert_eq!(set.arg, CategoryCounts::new(1, 1, 1));
    }

    #[test]
    fn counts_add_and_swap() {
        let a = MatchCounts {
            etype: CategoryCounts::new(1, 2, 3),
            ..Default::default()
        };
        let total: MatchCounts = [a, a].into_iter().sum();
        assert_eq!(total.etype, CategoryCounts::new(2, 4, 6));
        assert_eq!(a.swapped().etype, CategoryCounts::new(1, 3, 2));
    }
}
