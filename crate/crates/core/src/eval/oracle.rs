//! Oracle transformations: idealized, gold-guided edits of a predicted frame,
//! each repairing one error type. Applied in sequence and re-scored after each
//! step they attribute the gap to gold to individual error types.
//!
//! No transformation may leave overlapping spans or a span covering the
//! predicate; an edit that would is skipped.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{align_corpora, score, ScoreOptions, ScoreReport};
use crate::corpus::Corpus;
use crate::error::Result;
use crate::model::{Frame, RoleLabel, Span};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum OracleKind {
    Fix,
    Move,
    Merge,
    Split,
    Boundary,
    Drop,
    Add,
}

impl OracleKind {
    /// Canonical application order.
    pub const SEQUENCE: [OracleKind; 7] = [
        OracleKind::Fix,
        OracleKind::Move,
        OracleKind::Merge,
        OracleKind::Split,
        OracleKind::Boundary,
        OracleKind::Drop,
        OracleKind::Add,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OracleKind::Fix => "Fix",
            OracleKind::Move => "Move",
            OracleKind::Merge => "Merge",
            OracleKind::Split => "Split",
            OracleKind::Boundary => "Boundary",
            OracleKind::Drop => "Drop",
            OracleKind::Add => "Add",
        }
    }
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OracleKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        OracleKind::SEQUENCE
            .iter()
            .copied()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown oracle transformation `{}`", s))
    }
}

/// Applies one transformation to `pred` using `gold` (same predicate).
pub fn apply_oracle(pred: &Frame, gold: &Frame, kind: OracleKind) -> Frame {
    let mut out = pred.clone();
    match kind {
        OracleKind::Fix => fix_labels(&mut out, gold),
        OracleKind::Move => move_core(&mut out, gold),
        OracleKind::Merge => merge_spans(&mut out, gold),
        OracleKind::Split => split_spans(&mut out, gold),
        OracleKind::Boundary => fix_boundaries(&mut out, gold),
        OracleKind::Drop => drop_spans(&mut out, gold),
        OracleKind::Add => add_spans(&mut out, gold),
    }
    out.sort();
    out
}

fn fix_labels(pred: &mut Frame, gold: &Frame) {
    for s in &mut pred.spans {
        if let Some(g) = gold.spans.iter().find(|g| g.same_extent(s)) {
            s.label = g.label.clone();
        }
    }
}

/// Relocates a core argument that occurs exactly once on both sides.
fn move_core(pred: &mut Frame, gold: &Frame) {
    for n in 0..=RoleLabel::MAX_CORE {
        let label = RoleLabel::Core(n);
        let in_pred: Vec<usize> = (0..pred.spans.len())
            .filter(|&i| pred.spans[i].label == label)
            .collect();
        let in_gold: Vec<&Span> = gold.spans.iter().filter(|g| g.label == label).collect();
        if let ([i], [g]) = (in_pred.as_slice(), in_gold.as_slice()) {
            if !pred.spans[*i].same_extent(g) && pred.fits(g, Some(*i)) {
                pred.spans[*i] = (*g).clone();
            }
        }
    }
}

fn gap(first: &Span, second: &Span) -> usize {
    second.start - first.end - 1
}

/// Combines two predicted spans at most one token apart whose joint extent
/// is a gold span.
fn merge_spans(pred: &mut Frame, gold: &Frame) {
    pred.sort();
    let mut k = 0;
    while k + 1 < pred.spans.len() {
        let (a, b) = (&pred.spans[k], &pred.spans[k + 1]);
        let target = (gap(a, b) <= 1)
            .then(|| {
                gold.spans
                    .iter()
                    .find(|g| g.start == a.start && g.end == b.end)
            })
            .flatten();
        match target {
            Some(g) if !g.contains(pred.predicate) => {
                pred.spans[k] = g.clone();
                pred.spans.remove(k + 1);
            }
            _ => k += 1,
        }
    }
}

/// Splits a predicted span covering exactly two gold spans at most one token apart.
fn split_spans(pred: &mut Frame, gold: &Frame) {
    let mut out = Vec::with_capacity(pred.spans.len());
    for s in &pred.spans {
        let first = gold.spans.iter().find(|g| g.start == s.start);
        let second = gold.spans.iter().find(|g| g.end == s.end);
        match (first, second) {
            (Some(g1), Some(g2)) if g1.end < g2.start && gap(g1, g2) <= 1 => {
                out.push(g1.clone());
                out.push(g2.clone());
            }
            _ => out.push(s.clone()),
        }
    }
    pred.spans = out;
}

/// Snaps a span to the boundaries of an overlapping gold span with the same
/// label; with several candidates the largest overlap wins, then the
/// leftmost.
fn fix_boundaries(pred: &mut Frame, gold: &Frame) {
    for i in 0..pred.spans.len() {
        let s = &pred.spans[i];
        let best = gold
            .spans
            .iter()
            .filter(|g| g.label == s.label && g.overlaps(s))
            .max_by(|a, b| {
                s.overlap_len(a)
                    .cmp(&s.overlap_len(b))
                    .then(b.start.cmp(&a.start))
            });
        if let Some(g) = best {
            if !g.same_extent(s) && pred.fits(g, Some(i)) {
                pred.spans[i] = g.clone();
            }
        }
    }
}

/// Removes every predicted span that is not exactly a gold span. Spans that
/// overlap no gold span are the typical case; spans still wrong after the
/// earlier transformations are removed as well, so that `Add` can restore
/// the gold frame.
fn drop_spans(pred: &mut Frame, gold: &Frame) {
    pred.spans.retain(|s| gold.spans.contains(s));
}

fn add_spans(pred: &mut Frame, gold: &Frame) {
    let missing: Vec<Span> = gold
        .spans
        .iter()
        .filter(|g| !pred.spans.iter().any(|s| s.overlaps(g)))
        .cloned()
        .collect();
    pred.spans.extend(missing);
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleStage {
    pub kind: OracleKind,
    pub report: ScoreReport,
    /// F after this stage minus F before it, in points.
    pub gain: f64,
    /// Share of the initial error (100 − F₀) removed by this stage, in percent.
    pub error_reduction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub initial: ScoreReport,
    pub stages: Vec<OracleStage>,
}

/// Applies all transformations in canonical order, re-scoring after each.
pub fn oracle_sequence(pred: &Corpus, gold: &Corpus, options: ScoreOptions) -> Result<OracleReport> {
    let coarse = |c: &Corpus| -> Corpus {
        if options.am_coarse {
            c.iter().map(|s| s.coarsened()).collect()
        } else {
            c.clone()
        }
    };
    let gold = coarse(gold);
    let pred = coarse(pred);

    // working copy: one predicted frame for every gold or predicted predicate
    let mut work = Vec::with_capacity(gold.len());
    for (p, g) in align_corpora(&pred, &gold)? {
        let mut frames: Vec<Frame> = p.frames.clone();
        for gf in &g.frames {
            if p.frame_for(gf.predicate).is_none() {
                frames.push(Frame::empty(gf.predicate));
            }
        }
        frames.sort_by_key(|f| f.predicate);
        work.push(p.with_frames(frames));
    }
    let mut work = Corpus::new(work);

    let initial = score(&work, &gold, options)?;
    let base_error = 100.0 - initial.f1();
    let mut prev = initial.f1();
    let mut stages = Vec::with_capacity(OracleKind::SEQUENCE.len());
    for kind in OracleKind::SEQUENCE {
        for (s, g) in work.sentences.iter_mut().zip(&gold.sentences) {
            for frame in &mut s.frames {
                let empty = Frame::empty(frame.predicate);
                let gf = g.frame_for(frame.predicate).unwrap_or(&empty);
                *frame = apply_oracle(frame, gf, kind);
            }
        }
        let report = score(&work, &gold, options)?;
        let gain = report.f1() - prev;
        prev = report.f1();
        stages.push(OracleStage {
            kind,
            error_reduction: if base_error > 0.0 { 100.0 * gain / base_error } else { 0.0 },
            gain,
            report,
        });
    }
    Ok(OracleReport { initial, stages })
}
