//! Agreement-based selection of learner/correction pairs.
//!
//! Each side's SRL output is flattened into word-level
//! ⟨predicate, argument word, role⟩ tuples. A tuple is shared when the other
//! side has a tuple with the same role whose predicate and argument words are
//! both aligned to it. L2-recall and L1-recall are the shared fractions of
//! each side's tuples; pairs with both recalls above a threshold are kept.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use crate::corpus::{Alignments, Corpus, SentencePair};
use crate::error::{Error, Result};
use crate::model::{Alignment, AnnotatedSentence, RoleLabel, Side};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoleTuple {
    /// Token index (1-based) of the predicate.
    pub predicate: usize,
    /// Token index (1-based) of a word inside one of the predicate's spans.
    pub argument: usize,
    pub role: RoleLabel,
}

impl RoleTuple {
    pub fn new(predicate: usize, argument: usize, role: RoleLabel) -> Self {
        RoleTuple {
            predicate,
            argument,
            role,
        }
    }
}

/// One tuple per word of every span of every frame.
pub fn extract_tuples(s: &AnnotatedSentence) -> BTreeSet<RoleTuple> {
    s.frames
        .iter()
        .flat_map(|f| {
            f.spans.iter().flat_map(move |span| {
                span.indices()
                    .map(move |a| RoleTuple::new(f.predicate, a, span.label.clone()))
            })
        })
        .collect()
}

/// How tuple roles are compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatchOptions {
    pub am_coarse: bool,
}

impl Default for MatchOptions {
    fn default() -> Self {
        MatchOptions { am_coarse: true }
    }
}

fn links_by_source(links: impl Iterator<Item = (usize, usize)>) -> HashMap<usize, Vec<usize>> {
    let mut map: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, j) in links {
        map.entry(i).or_default().push(j);
    }
    map
}

fn matched_side(
    own: &BTreeSet<RoleTuple>,
    other: &BTreeSet<RoleTuple>,
    links: &HashMap<usize, Vec<usize>>,
    options: MatchOptions,
) -> BTreeSet<RoleTuple> {
    let other: HashSet<(usize, usize, RoleLabel)> = other
        .iter()
        .map(|t| (t.predicate, t.argument, t.role.normalized(options.am_coarse)))
        .collect();
    let none = Vec::new();
    own.iter()
        .filter(|t| {
            let role = t.role.normalized(options.am_coarse);
            let ps = links.get(&(t.predicate - 1)).unwrap_or(&none);
            let args = links.get(&(t.argument - 1)).unwrap_or(&none);
            ps.iter().any(|&p| {
                args.iter()
                    .any(|&a| other.contains(&(p + 1, a + 1, role.clone())))
            })
        })
        .cloned()
        .collect()
}

/// Tuples of each side that have an aligned, identically-roled counterpart
/// on the other side. Alignment links are 0-based, tuple indices 1-based.
pub fn shared_tuples(
    alignment: &Alignment,
    l2: &BTreeSet<RoleTuple>,
    l1: &BTreeSet<RoleTuple>,
    options: MatchOptions,
) -> (BTreeSet<RoleTuple>, BTreeSet<RoleTuple>) {
    let forward = links_by_source(alignment.links.iter().copied());
    let backward = links_by_source(alignment.links.iter().map(|&(i, j)| (j, i)));
    (
        matched_side(l2, l1, &forward, options),
        matched_side(l1, l2, &backward, options),
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairRecall {
    pub shared_l2: usize,
    pub shared_l1: usize,
    pub total_l2: usize,
    pub total_l1: usize,
    pub l2_recall: f64,
    pub l1_recall: f64,
    /// Both sides have at least one tuple.
    pub eligible: bool,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn recall_pair(pair: &SentencePair, options: MatchOptions) -> PairRecall {
    let l2 = extract_tuples(&pair.l2);
    let l1 = extract_tuples(&pair.l1);
    let (m2, m1) = shared_tuples(&pair.alignment, &l2, &l1, options);
    PairRecall {
        shared_l2: m2.len(),
        shared_l1: m1.len(),
        total_l2: l2.len(),
        total_l1: l1.len(),
        l2_recall: ratio(m2.len(), l2.len()),
        l1_recall: ratio(m1.len(), l1.len()),
        eligible: !l2.is_empty() && !l1.is_empty(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectionConfig {
    p: f64,
}

impl SelectionConfig {
    pub const DEFAULT_THRESHOLD: f64 = 0.9;

    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidConfig(format!(
                "threshold p must lie in [0, 1], got {}",
                p
            )));
        }
        Ok(SelectionConfig { p })
    }

    pub fn threshold(&self) -> f64 {
        self.p
    }

    /// Strict comparison on both recalls.
    pub fn accepts(&self, r: &PairRecall) -> bool {
        r.eligible && r.l2_recall > self.p && r.l1_recall > self.p
    }
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            p: Self::DEFAULT_THRESHOLD,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectionStats {
    pub pool: usize,
    pub selected: usize,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    pub recalls: Vec<PairRecall>,
    /// Indices of selected pairs, in input order.
    pub selected: Vec<usize>,
    pub stats: SelectionStats,
}

impl Selection {
    pub fn is_selected(&self, index: usize) -> bool {
        self.selected.binary_search(&index).is_ok()
    }
}

/// Keeps eligible pairs whose recalls both exceed the threshold.
pub fn select(recalls: &[PairRecall], config: SelectionConfig) -> Selection {
    let selected: Vec<usize> = recalls
        .iter()
        .enumerate()
        .filter(|(_, r)| config.accepts(r))
        .map(|(i, _)| i)
        .collect();
    let stats = SelectionStats {
        pool: recalls.len(),
        selected: selected.len(),
        ratio: ratio(selected.len(), recalls.len()),
    };
    Selection {
        recalls: recalls.to_vec(),
        selected,
        stats,
    }
}

/// Computes recalls for every pair and selects.
pub fn select_pairs(pairs: &[SentencePair], config: SelectionConfig, options: MatchOptions) -> Selection {
    let recalls: Vec<PairRecall> = pairs.iter().map(|p| recall_pair(p, options)).collect();
    select(&recalls, config)
}

/// The sentences of the selected pairs on one side, in pair order.
pub fn selected_side(pairs: &[SentencePair], selection: &Selection, side: Side) -> Corpus {
    selection
        .selected
        .iter()
        .map(|&i| match side {
            Side::L2 => pairs[i].l2.clone(),
            Side::L1 => pairs[i].l1.clone(),
        })
        .collect()
}

/// Per-pair TSV with a header row; recalls use four decimals.
pub fn selection_report_tsv(pairs: &[SentencePair], selection: &Selection) -> String {
    let mut out =
        String::from("pair_id\ttotal_l2\ttotal_l1\tshared_l2\tshared_l1\tl2_recall\tl1_recall\tselected\n");
    for (i, (pair, r)) in pairs.iter().zip(&selection.recalls).enumerate() {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{:.4}\t{:.4}\t{}",
            pair.pair_id(),
            r.total_l2,
            r.total_l1,
            r.shared_l2,
            r.shared_l1,
            r.l2_recall,
            r.l1_recall,
            u8::from(selection.is_selected(i))
        );
    }
    out
}

/// Aligns identical word forms: a longest common subsequence first, then
/// each remaining L2 token to the nearest unlinked L1 token with the same form.
pub fn heuristic_align(l2: &AnnotatedSentence, l1: &AnnotatedSentence) -> Alignment {
    let a: Vec<&str> = l2.tokens.iter().map(|t| t.form.as_str()).collect();
    let b: Vec<&str> = l1.tokens.iter().map(|t| t.form.as_str()).collect();
    let (n, m) = (a.len(), b.len());

    // suffix LCS lengths
    let mut dp = vec![vec![0u32; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            dp[i][j] = if a[i] == b[j] {
                dp[i + 1][j + 1] + 1
            } else {
                dp[i + 1][j].max(dp[i][j + 1])
            };
        }
    }

    let mut links = BTreeSet::new();
    let mut used_a = vec![false; n];
    let mut used_b = vec![false; m];
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if a[i] == b[j] && dp[i][j] == dp[i + 1][j + 1] + 1 {
            links.insert((i, j));
            used_a[i] = true;
            used_b[j] = true;
            i += 1;
            j += 1;
        } else if dp[i + 1][j] >= dp[i][j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }

    for i in 0..n {
        if used_a[i] {
            continue;
        }
        let nearest = (0..m)
            .filter(|&j| !used_b[j] && b[j] == a[i])
            .min_by_key(|&j| (i.abs_diff(j), j));
        if let Some(j) = nearest {
            links.insert((i, j));
            used_a[i] = true;
            used_b[j] = true;
        }
    }

    Alignment {
        pair_id: l2.pair_id.clone(),
        links,
    }
}

/// Heuristic alignments for every pair id present in both corpora, in L2 order.
pub fn heuristic_alignments(l2: &Corpus, l1: &Corpus) -> Alignments {
    let by_pair: HashMap<&str, &AnnotatedSentence> =
        l1.iter().map(|s| (s.pair_id.as_str(), s)).collect();
    l2.iter()
        .filter_map(|s| {
            by_pair
                .get(s.pair_id.as_str())
                .map(|o| (s.pair_id.clone(), heuristic_align(s, o)))
        })
        .collect()
}
