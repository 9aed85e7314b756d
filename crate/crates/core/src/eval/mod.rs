//! Span-level SRL evaluation.
//!
//! A predicted span counts as correct when a gold span with the same start,
//! end and label exists in the frame of the same predicate. Predicate tokens
//! (`rel`) are never scored.

mod confusion;
mod oracle;
mod report;

pub use confusion::{confusion_matrix, ConfusionMatrix, OUTSIDE};
pub use oracle::{apply_oracle, oracle_sequence, OracleKind, OracleReport, OracleStage};
pub use report::{iaa_table_tsv, render_json, render_text, render_tsv, ReportFormat};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::model::{AnnotatedSentence, Frame, RoleLabel};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ScoreOptions {
    /// Collapse adjunct subtypes (`AM-TMP`, ...) into bare `AM`.
    pub am_coarse: bool,
}

/// Rounds half away from zero to two decimals.
pub fn round2(x: f64) -> f64 {
    let scaled = x * 100.0;
    let r = (scaled + scaled.signum() * 1e-9).round() / 100.0;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Two-decimal rendering used in every report.
pub fn fmt2(x: f64) -> String {
    format!("{:.2}", round2(x))
}

fn ser_round2<S: serde::Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round2(*x))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub matched: usize,
    pub predicted: usize,
    pub gold: usize,
}

impl Counts {
    pub fn new(matched: usize, predicted: usize, gold: usize) -> Self {
        Counts {
            matched,
            predicted,
            gold,
        }
    }

    pub fn precision(&self) -> f64 {
        if self.predicted == 0 {
            0.0
        } else {
            100.0 * self.matched as f64 / self.predicted as f64
        }
    }

    pub fn recall(&self) -> f64 {
        if self.gold == 0 {
            0.0
        } else {
            100.0 * self.matched as f64 / self.gold as f64
        }
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }
}

impl std::ops::AddAssign for Counts {
    fn add_assign(&mut self, other: Counts) {
        self.matched += other.matched;
        self.predicted += other.predicted;
        self.gold += other.gold;
    }
}

/// Counts with precision, recall and F1 as percentages.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Score {
    #[serde(flatten)]
    pub counts: Counts,
    #[serde(serialize_with = "ser_round2")]
    pub precision: f64,
    #[serde(serialize_with = "ser_round2")]
    pub recall: f64,
    #[serde(serialize_with = "ser_round2")]
    pub f1: f64,
}

impl From<Counts> for Score {
    fn from(counts: Counts) -> Self {
        Score {
            counts,
            precision: counts.precision(),
            recall: counts.recall(),
            f1: counts.f1(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoreReport {
    #[serde(flatten)]
    pub overall: Score,
    /// Core arguments (A0–A4) only.
    pub arguments: Score,
    /// Adjuncts only.
    pub adjuncts: Score,
    pub per_role: BTreeMap<String, Score>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub groups: Option<BTreeMap<String, ScoreReport>>,
    /// F(L2) − F(L1) per language (or `ALL`), in points.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_delta")]
    pub delta_f: Option<BTreeMap<String, f64>>,
}

fn ser_delta<S: serde::Serializer>(
    d: &Option<BTreeMap<String, f64>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let d = d.as_ref().expect("skipped when absent");
    let mut map = s.serialize_map(Some(d.len()))?;
    for (k, v) in d {
        map.serialize_entry(k, &round2(*v))?;
    }
    map.end()
}

impl ScoreReport {
    pub fn matched(&self) -> usize {
        self.overall.counts.matched
    }

    pub fn predicted(&self) -> usize {
        self.overall.counts.predicted
    }

    pub fn gold(&self) -> usize {
        self.overall.counts.gold
    }

    pub fn precision(&self) -> f64 {
        self.overall.precision
    }

    pub fn recall(&self) -> f64 {
        self.overall.recall
    }

    pub fn f1(&self) -> f64 {
        self.overall.f1
    }
}

/// Per-label span counts accumulated over a corpus.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    per_label: BTreeMap<RoleLabel, Counts>,
}

impl Tally {
    pub fn total(&self) -> Counts {
        let mut c = Counts::default();
        for v in self.per_label.values() {
            c += *v;
        }
        c
    }

    fn class(&self, core: bool) -> Counts {
        let mut c = Counts::default();
        for (l, v) in &self.per_label {
            if l.is_core() == core {
                c += *v;
            }
        }
        c
    }

    pub fn merge(&mut self, other: &Tally) {
        for (l, c) in &other.per_label {
            *self.per_label.entry(l.clone()).or_default() += *c;
        }
    }

    /// Adds the span comparison of one predicate's frames; either side may be absent.
    pub fn add_frames(&mut self, pred: Option<&Frame>, gold: Option<&Frame>, options: ScoreOptions) {
        let norm = |f: Option<&Frame>| -> BTreeSet<(usize, usize, RoleLabel)> {
            f.map(|f| {
                f.spans
                    .iter()
                    .map(|s| (s.start, s.end, s.label.normalized(options.am_coarse)))
                    .collect()
            })
            .unwrap_or_default()
        };
        let p = norm(pred);
        let g = norm(gold);
        for t in &p {
            let c = self.per_label.entry(t.2.clone()).or_default();
            c.predicted += 1;
            if g.contains(t) {
                c.matched += 1;
            }
        }
        for t in &g {
            self.per_label.entry(t.2.clone()).or_default().gold += 1;
        }
    }

    pub fn add_sentence(&mut self, pred: &AnnotatedSentence, gold: &AnnotatedSentence, options: ScoreOptions) {
        for_each_frame_pair(pred, gold, |p, g| self.add_frames(p, g, options));
    }

    pub fn report(&self) -> ScoreReport {
        ScoreReport {
            overall: self.total().into(),
            arguments: self.class(true).into(),
            adjuncts: self.class(false).into(),
            per_role: self
                .per_label
                .iter()
                .map(|(l, c)| (l.to_string(), Score::from(*c)))
                .collect(),
            groups: None,
            delta_f: None,
        }
    }
}

/// Visits frames of `pred` and `gold` matched on predicate index, in
/// predicate order. Frames present on one side only are paired with `None`.
pub(crate) fn for_each_frame_pair<'a>(
    pred: &'a AnnotatedSentence,
    gold: &'a AnnotatedSentence,
    mut f: impl FnMut(Option<&'a Frame>, Option<&'a Frame>),
) {
    let predicates: BTreeSet<usize> = pred
        .frames
        .iter()
        .chain(&gold.frames)
        .map(|fr| fr.predicate)
        .collect();
    for p in predicates {
        f(pred.frame_for(p), gold.frame_for(p));
    }
}

/// Pairs every gold sentence with the predicted sentence of the same id.
pub(crate) fn align_corpora<'a>(
    pred: &'a Corpus,
    gold: &'a Corpus,
) -> Result<Vec<(&'a AnnotatedSentence, &'a AnnotatedSentence)>> {
    let by_id: HashMap<&str, &AnnotatedSentence> =
        pred.sentences.iter().map(|s| (s.id.as_str(), s)).collect();
    if by_id.len() != pred.len() {
        return Err(Error::MismatchedCorpora("duplicate ids in predictions".into()));
    }
    let mut out = Vec::with_capacity(gold.len());
    for g in &gold.sentences {
        let p = by_id.get(g.id.as_str()).ok_or_else(|| {
            Error::MismatchedCorpora(format!("sentence `{}` missing from predictions", g.id))
        })?;
        if p.len() != g.len() {
            return Err(Error::MismatchedCorpora(format!(
                "sentence `{}` has {} tokens in predictions but {} in gold",
                g.id,
                p.len(),
                g.len()
            )));
        }
        out.push((*p, g));
    }
    if out.len() != pred.len() {
        let gold_ids: BTreeSet<&str> = gold.sentences.iter().map(|s| s.id.as_str()).collect();
        let extra = pred
            .sentences
            .iter()
            .find(|s| !gold_ids.contains(s.id.as_str()))
            .map(|s| s.id.clone())
            .unwrap_or_default();
        return Err(Error::MismatchedCorpora(format!(
            "sentence `{}` missing from gold",
            extra
        )));
    }
    Ok(out)
}

/// Micro-averaged P/R/F of `pred` against `gold`.
pub fn score(pred: &Corpus, gold: &Corpus, options: ScoreOptions) -> Result<ScoreReport> {
    let mut tally = Tally::default();
    for (p, g) in align_corpora(pred, gold)? {
        tally.add_sentence(p, g, options);
    }
    Ok(tally.report())
}

/// Inter-annotator agreement: annotator `a` scored against annotator `b`.
pub fn iaa(a: &Corpus, b: &Corpus, options: ScoreOptions) -> Result<ScoreReport> {
    score(a, b, options)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupBy {
    Lang,
    Side,
    LangSide,
}

impl FromStr for GroupBy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "lang" => Ok(GroupBy::Lang),
            "side" => Ok(GroupBy::Side),
            "lang,side" | "side,lang" | "lang×side" | "lang-side" => Ok(GroupBy::LangSide),
            _ => Err(format!("unknown grouping `{}` (expected lang, side or lang,side)", s)),
        }
    }
}

impl fmt::Display for GroupBy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupBy::Lang => "lang",
            GroupBy::Side => "side",
            GroupBy::LangSide => "lang,side",
        })
    }
}

fn group_key(s: &AnnotatedSentence, by: GroupBy) -> String {
    match by {
        GroupBy::Lang => s.lang.to_string(),
        GroupBy::Side => s.side.to_string(),
        GroupBy::LangSide => format!("{}-{}", s.lang, s.side),
    }
}

/// Scores per group (taken from gold metadata) plus ΔF = F(L2) − F(L1).
pub fn score_grouped(
    pred: &Corpus,
    gold: &Corpus,
    by: GroupBy,
    options: ScoreOptions,
) -> Result<ScoreReport> {
    let mut overall = Tally::default();
    let mut groups: BTreeMap<String, Tally> = BTreeMap::new();
    for (p, g) in align_corpora(pred, gold)? {
        if (p.lang, p.side) != (g.lang, g.side) {
            return Err(Error::MismatchedCorpora(format!(
                "sentence `{}` has different language or side metadata",
                g.id
            )));
        }
        let mut t = Tally::default();
        t.add_sentence(p, g, options);
        overall.merge(&t);
        groups.entry(group_key(g, by)).or_default().merge(&t);
    }
    let groups: BTreeMap<String, ScoreReport> =
        groups.into_iter().map(|(k, t)| (k, t.report())).collect();
    let mut report = overall.report();
    report.delta_f = delta_f(&groups, by);
    report.groups = Some(groups);
    Ok(report)
}

fn delta_f(groups: &BTreeMap<String, ScoreReport>, by: GroupBy) -> Option<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    match by {
        GroupBy::Lang => return None,
        GroupBy::Side => {
            if let (Some(l2), Some(l1)) = (groups.get("L2"), groups.get("L1")) {
                out.insert("ALL".to_owned(), l2.f1() - l1.f1());
            }
        }
        GroupBy::LangSide => {
            for key in groups.keys() {
                if let Some(lang) = key.strip_suffix("-L2") {
                    if let (Some(l2), Some(l1)) = (groups.get(key), groups.get(&format!("{}-L1", lang))) {
                        out.insert(lang.to_owned(), l2.f1() - l1.f1());
                    }
                }
            }
        }
    }
    Some(out)
}

/// ΔF between two group scores, F(L2) − F(L1).
pub fn delta(l2: &ScoreReport, l1: &ScoreReport) -> f64 {
    l2.f1() - l1.f1()
}
