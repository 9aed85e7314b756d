//! A predicate-conditioned first-order linear-chain tagger over S/B/I/E tags.
//!
//! Each (sentence, predicate) pair is one sequence. Scores are sums of
//! emission weights (feature × tag) and transition weights (tag × tag, plus a
//! start row). Decoding is Viterbi restricted to the S/B/I/E grammar with
//! `rel` forced at the predicate and forbidden elsewhere.

mod features;
mod persist;
mod train;

pub use features::{distance_bucket, extract_features, FeatureVector};
pub use persist::{load_model, model_to_string, save_model, MODEL_HEADER};
pub use train::{train, TrainConfig};

use std::collections::{BTreeSet, HashMap};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::model::{
    spans_from_tags, AnnotatedSentence, DecodeMode, Position, PositionTag, RoleLabel,
};

/// Name of the start state in transition tables and model files.
pub const START: &str = "<s>";

/// O, rel, then S/B/I/E for each role label in sorted order.
pub fn label_set<'a>(roles: impl IntoIterator<Item = &'a RoleLabel>) -> Vec<PositionTag> {
    let roles: BTreeSet<&RoleLabel> = roles.into_iter().collect();
    let mut labels = vec![PositionTag::O, PositionTag::Rel];
    for r in roles {
        for p in Position::ALL {
            labels.push(PositionTag::Arg(p, r.clone()));
        }
    }
    labels
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaggerModel {
    labels: Vec<PositionTag>,
    feature_names: Vec<String>,
    feature_ids: HashMap<String, usize>,
    /// Row-major `feature × label`.
    emission: Vec<f64>,
    /// Row-major `(label + start row) × label`; the start row is last.
    transition: Vec<f64>,
}

impl TaggerModel {
    /// Model with every weight zero.
    pub fn zero(labels: Vec<PositionTag>) -> Self {
        let n = labels.len();
        TaggerModel {
            labels,
            feature_names: Vec::new(),
            feature_ids: HashMap::new(),
            emission: Vec::new(),
            transition: vec![0.0; (n + 1) * n],
        }
    }

    pub fn labels(&self) -> &[PositionTag] {
        &self.labels
    }

    pub fn num_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn label_index(&self, tag: &PositionTag) -> Option<usize> {
        self.labels.iter().position(|l| l == tag)
    }

    pub(crate) fn intern(&mut self, name: &str) -> usize {
        if let Some(&id) = self.feature_ids.get(name) {
            return id;
        }
        let id = self.feature_names.len();
        self.feature_names.push(name.to_owned());
        self.feature_ids.insert(name.to_owned(), id);
        self.emission.extend(std::iter::repeat_n(0.0, self.labels.len()));
        id
    }

    pub(crate) fn feature_name(&self, id: usize) -> &str {
        &self.feature_names[id]
    }

    pub(crate) fn emission_row(&self, feature: usize) -> &[f64] {
        let n = self.labels.len();
        &self.emission[feature * n..(feature + 1) * n]
    }

    pub(crate) fn emission_mut(&mut self, feature: usize, label: usize) -> &mut f64 {
        let n = self.labels.len();
        &mut self.emission[feature * n + label]
    }

    /// `prev = None` addresses the start row.
    pub(crate) fn transition_mut(&mut self, prev: Option<usize>, label: usize) -> &mut f64 {
        let n = self.labels.len();
        let row = prev.unwrap_or(n);
        &mut self.transition[row * n + label]
    }

    pub(crate) fn transition_at(&self, prev: Option<usize>, label: usize) -> f64 {
        let n = self.labels.len();
        self.transition[prev.unwrap_or(n) * n + label]
    }

    pub fn emission_weight(&self, feature: &str, label: &PositionTag) -> f64 {
        match (self.feature_ids.get(feature), self.label_index(label)) {
            (Some(&f), Some(l)) => self.emission_row(f)[l],
            _ => 0.0,
        }
    }

    pub fn transition_weight(&self, prev: Option<&PositionTag>, label: &PositionTag) -> f64 {
        let Some(l) = self.label_index(label) else {
            return 0.0;
        };
        match prev {
            None => self.transition_at(None, l),
            Some(p) => match self.label_index(p) {
                Some(p) => self.transition_at(Some(p), l),
                None => 0.0,
            },
        }
    }

    pub fn set_emission(&mut self, feature: &str, label: &PositionTag, weight: f64) {
        let l = self.label_index(label).expect("label in label set");
        let f = self.intern(feature);
        *self.emission_mut(f, l) = weight;
    }

    pub fn set_transition(&mut self, prev: Option<&PositionTag>, label: &PositionTag, weight: f64) {
        let l = self.label_index(label).expect("label in label set");
        let p = prev.map(|p| self.label_index(p).expect("label in label set"));
        *self.transition_mut(p, l) = weight;
    }

    /// Known feature ids at each position of the sequence for `predicate`.
    pub(crate) fn feature_ids(&self, s: &AnnotatedSentence, predicate: usize) -> Vec<Vec<usize>> {
        (1..=s.len())
            .map(|t| {
                extract_features(s, predicate, t)
                    .names()
                    .iter()
                    .filter_map(|n| self.feature_ids.get(n).copied())
                    .collect()
            })
            .collect()
    }

    fn emission_scores(&self, feats: &[Vec<usize>]) -> Vec<Vec<f64>> {
        let n = self.labels.len();
        feats
            .iter()
            .map(|fs| {
                let mut row = vec![0.0; n];
                for &f in fs {
                    for (acc, w) in row.iter_mut().zip(self.emission_row(f)) {
                        *acc += w;
                    }
                }
                row
            })
            .collect()
    }

    pub(crate) fn decode_ids(&self, feats: &[Vec<usize>], predicate: usize) -> Vec<usize> {
        let emissions = self.emission_scores(feats);
        viterbi(&self.labels, &emissions, |p, l| self.transition_at(p, l), predicate)
    }

    /// Best grammar-valid tag sequence for `predicate` (1-based).
    pub fn viterbi_decode(&self, s: &AnnotatedSentence, predicate: usize) -> Vec<PositionTag> {
        let feats = self.feature_ids(s, predicate);
        self.decode_ids(&feats, predicate)
            .into_iter()
            .map(|i| self.labels[i].clone())
            .collect()
    }

    /// Model score of an arbitrary tag sequence.
    pub fn sequence_score(&self, s: &AnnotatedSentence, predicate: usize, tags: &[PositionTag]) -> f64 {
        let mut total = 0.0;
        let mut prev: Option<&PositionTag> = None;
        for (t, tag) in tags.iter().enumerate() {
            for name in extract_features(s, predicate, t + 1).names() {
                total += self.emission_weight(name, tag);
            }
            total += self.transition_weight(prev, tag);
            prev = Some(tag);
        }
        total
    }
}

/// Constrained Viterbi over label indices. Ties go to the lower label index.
fn viterbi(
    labels: &[PositionTag],
    emissions: &[Vec<f64>],
    transition: impl Fn(Option<usize>, usize) -> f64,
    predicate: usize,
) -> Vec<usize> {
    let n = labels.len();
    let len = emissions.len();
    if len == 0 {
        return Vec::new();
    }
    let allowed_at = |t: usize, l: usize| {
        let is_rel = labels[l] == PositionTag::Rel;
        let fits_position = (t + 1 == predicate) == is_rel;
        fits_position && (t > 0 || labels[l].may_start()) && (t + 1 < len || labels[l].may_end())
    };
    let follows: Vec<Vec<bool>> = labels
        .iter()
        .map(|p| labels.iter().map(|l| p.may_precede(l)).collect())
        .collect();

    let mut score = vec![f64::NEG_INFINITY; n];
    for l in 0..n {
        if allowed_at(0, l) {
            score[l] = transition(None, l) + emissions[0][l];
        }
    }
    let mut back = vec![vec![usize::MAX; n]; len];
    for t in 1..len {
        let mut next = vec![f64::NEG_INFINITY; n];
        for l in 0..n {
            if !allowed_at(t, l) {
                continue;
            }
            let mut best = f64::NEG_INFINITY;
            let mut arg = usize::MAX;
            for p in 0..n {
                if score[p] == f64::NEG_INFINITY || !follows[p][l] {
                    continue;
                }
                let s = score[p] + transition(Some(p), l);
                if s > best {
                    best = s;
                    arg = p;
                }
            }
            if arg != usize::MAX {
                next[l] = best + emissions[t][l];
                back[t][l] = arg;
            }
        }
        score = next;
    }

    let mut last = usize::MAX;
    let mut best = f64::NEG_INFINITY;
    for (l, &s) in score.iter().enumerate() {
        if s > best {
            best = s;
            last = l;
        }
    }
    assert!(last != usize::MAX, "all-O path with rel is always valid");
    let mut path = vec![last; len];
    for t in (1..len).rev() {
        path[t - 1] = back[t][path[t]];
    }
    path
}

/// Tags `s` at the given predicate positions, replacing any existing frames.
pub fn tag(model: &TaggerModel, s: &AnnotatedSentence, predicates: &[usize]) -> Result<AnnotatedSentence> {
    let predicates: BTreeSet<usize> = predicates.iter().copied().collect();
    let mut frames = Vec::with_capacity(predicates.len());
    for p in predicates {
        if p == 0 || p > s.len() {
            return Err(Error::InvalidPredicateIndex {
                sentence: s.id.clone(),
                index: p,
                length: s.len(),
            });
        }
        let tags = model.viterbi_decode(s, p);
        frames.push(spans_from_tags(&tags, DecodeMode::Strict)?);
    }
    Ok(s.with_frames(frames))
}

/// Tags every sentence at its own (gold) predicate positions.
pub fn tag_corpus(model: &TaggerModel, corpus: &Corpus) -> Result<Corpus> {
    corpus
        .iter()
        .map(|s| tag(model, s, &s.predicates()))
        .collect::<Result<Vec<_>>>()
        .map(Corpus::new)
}
