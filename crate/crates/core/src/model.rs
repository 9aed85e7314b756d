//! Sentences, predicate frames, role-labeled spans and the S/B/I/E tag scheme.
//!
//! Token indices are 1-based throughout this module. A frame holds the
//! arguments and adjuncts of one predicate occurrence; the predicate token
//! itself is tagged `rel` and never appears inside a span.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("ill-formed tag sequence at position {position}: {reason}")]
    IllFormedTagSequence { position: usize, reason: String },

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("invalid role label `{0}`")]
    InvalidLabel(String),

    #[error("invalid tag `{0}`")]
    InvalidTag(String),
}

fn ill_formed(position: usize, reason: impl Into<String>) -> ModelError {
    ModelError::IllFormedTagSequence {
        position,
        reason: reason.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Lang {
    Eng,
    Jpn,
    Rus,
    Ara,
    Other,
}

impl Lang {
    pub const ALL: [Lang; 5] = [Lang::Eng, Lang::Jpn, Lang::Rus, Lang::Ara, Lang::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            Lang::Eng => "ENG",
            Lang::Jpn => "JPN",
            Lang::Rus => "RUS",
            Lang::Ara => "ARA",
            Lang::Other => "OTHER",
        }
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Lang {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Lang::ALL
            .iter()
            .copied()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| format!("unknown language `{}`", s))
    }
}

/// Which half of a learner/correction pair a sentence is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    L2,
    L1,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::L2 => "L2",
            Side::L1 => "L1",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "L2" => Ok(Side::L2),
            "L1" => Ok(Side::L1),
            _ => Err(format!("unknown side `{}`", s)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Token {
    pub index: usize,
    pub form: String,
}

/// Semantic role of an argument span: a numbered core argument or an
/// adjunct with an optional functional subtype (`AM`, `AM-TMP`, ...).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RoleLabel {
    Core(u8),
    Adjunct(Option<String>),
}

impl RoleLabel {
    pub const MAX_CORE: u8 = 4;

    pub fn core(n: u8) -> Self {
        RoleLabel::Core(n)
    }

    pub fn adjunct() -> Self {
        RoleLabel::Adjunct(None)
    }

    pub fn is_core(&self) -> bool {
        matches!(self, RoleLabel::Core(_))
    }

    /// Collapses adjunct subtypes to bare `AM`.
    pub fn coarse(&self) -> RoleLabel {
        match self {
            RoleLabel::Core(n) => RoleLabel::Core(*n),
            RoleLabel::Adjunct(_) => RoleLabel::Adjunct(None),
        }
    }

    pub fn normalized(&self, am_coarse: bool) -> RoleLabel {
        if am_coarse {
            self.coarse()
        } else {
            self.clone()
        }
    }
}

impl fmt::Display for RoleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoleLabel::Core(n) => write!(f, "A{}", n),
            RoleLabel::Adjunct(None) => f.write_str("AM"),
            RoleLabel::Adjunct(Some(sub)) => write!(f, "AM-{}", sub),
        }
    }
}

impl FromStr for RoleLabel {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let invalid = || ModelError::InvalidLabel(s.to_owned());
        if s == "AM" {
            return Ok(RoleLabel::Adjunct(None));
        }
        if let Some(sub) = s.strip_prefix("AM-") {
            if sub.is_empty() || sub.chars().any(|c| c.is_whitespace()) {
                return Err(invalid());
            }
            return Ok(RoleLabel::Adjunct(Some(sub.to_owned())));
        }
        let digits = s.strip_prefix('A').ok_or_else(invalid)?;
        match digits {
            "0" | "1" | "2" | "3" | "4" => Ok(RoleLabel::Core(digits.as_bytes()[0] - b'0')),
            _ => Err(invalid()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Position {
    S,
    B,
    I,
    E,
}

impl Position {
    pub const ALL: [Position; 4] = [Position::S, Position::B, Position::I, Position::E];

    fn as_char(self) -> char {
        match self {
            Position::S => 'S',
            Position::B => 'B',
            Position::I => 'I',
            Position::E => 'E',
        }
    }
}

/// Per-token tag of one frame column.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PositionTag {
    O,
    Rel,
    Arg(Position, RoleLabel),
}

impl PositionTag {
    pub fn arg(position: Position, label: RoleLabel) -> Self {
        PositionTag::Arg(position, label)
    }

    pub fn label(&self) -> Option<&RoleLabel> {
        match self {
            PositionTag::Arg(_, l) => Some(l),
            _ => None,
        }
    }

    pub fn position(&self) -> Option<Position> {
        match self {
            PositionTag::Arg(p, _) => Some(*p),
            _ => None,
        }
    }

    /// Whether `next` may directly follow `self` under the S/B/I/E grammar.
    pub fn may_precede(&self, next: &PositionTag) -> bool {
        match self {
            PositionTag::Arg(Position::B, l) | PositionTag::Arg(Position::I, l) => matches!(
                next,
                PositionTag::Arg(Position::I, m) | PositionTag::Arg(Position::E, m) if m == l
            ),
            _ => !matches!(
                next,
                PositionTag::Arg(Position::I, _) | PositionTag::Arg(Position::E, _)
            ),
        }
    }

    /// Whether a sequence may start with this tag.
    pub fn may_start(&self) -> bool {
        !matches!(
            self,
            PositionTag::Arg(Position::I, _) | PositionTag::Arg(Position::E, _)
        )
    }

    /// Whether a sequence may end with this tag.
    pub fn may_end(&self) -> bool {
        !matches!(
            self,
            PositionTag::Arg(Position::B, _) | PositionTag::Arg(Position::I, _)
        )
    }
}

impl fmt::Display for PositionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PositionTag::O => f.write_str("O"),
            PositionTag::Rel => f.write_str("rel"),
            PositionTag::Arg(p, l) => write!(f, "{}-{}", p.as_char(), l),
        }
    }
}

impl FromStr for PositionTag {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "O" => return Ok(PositionTag::O),
            "rel" => return Ok(PositionTag::Rel),
            _ => {}
        }
        let invalid = || ModelError::InvalidTag(s.to_owned());
        let (pos, label) = s.split_once('-').ok_or_else(invalid)?;
        let position = match pos {
            "S" => Position::S,
            "B" => Position::B,
            "I" => Position::I,
            "E" => Position::E,
            _ => return Err(invalid()),
        };
        let label = label.parse().map_err(|_| invalid())?;
        Ok(PositionTag::Arg(position, label))
    }
}

/// Inclusive, 1-based token range carrying a role label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub label: RoleLabel,
}

impl Span {
    pub fn new(start: usize, end: usize, label: RoleLabel) -> Self {
        Span { start, end, label }
    }

    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, index: usize) -> bool {
        self.start <= index && index <= self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start <= other.end && other.start <= self.end
    }

    pub fn same_extent(&self, other: &Span) -> bool {
        self.start == other.start && self.end == other.end
    }

    /// Number of tokens shared with `other`.
    pub fn overlap_len(&self, other: &Span) -> usize {
        let lo = self.start.max(other.start);
        let hi = self.end.min(other.end);
        if lo > hi {
            0
        } else {
            hi + 1 - lo
        }
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.start, self.end, self.label)
    }
}

/// The role-labeled spans of one predicate, sorted by start position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Frame {
    pub predicate: usize,
    pub spans: Vec<Span>,
}

impl Frame {
    /// Builds a frame, sorting the spans and rejecting overlaps or spans that
    /// cover the predicate.
    pub fn new(predicate: usize, mut spans: Vec<Span>) -> Result<Self, ModelError> {
        spans.sort();
        let frame = Frame { predicate, spans };
        if let Some(problem) = frame.structural_problem() {
            return Err(ModelError::InvalidFrame(problem));
        }
        Ok(frame)
    }

    pub fn empty(predicate: usize) -> Self {
        Frame {
            predicate,
            spans: Vec::new(),
        }
    }

    fn structural_problem(&self) -> Option<String> {
        if self.predicate == 0 {
            return Some("predicate index must be at least 1".into());
        }
        for (i, s) in self.spans.iter().enumerate() {
            if s.start == 0 || s.start > s.end {
                return Some(format!("span {} has invalid bounds", s));
            }
            if s.contains(self.predicate) {
                return Some(format!("span {} covers the predicate", s));
            }
            if let RoleLabel::Core(n) = s.label {
                if n > RoleLabel::MAX_CORE {
                    return Some(format!("span {} has core index above A4", s));
                }
            }
            for t in &self.spans[i + 1..] {
                if s.overlaps(t) {
                    return Some(format!("spans {} and {} overlap", s, t));
                }
            }
        }
        None
    }

    /// Checks the frame against a sentence of `length` tokens.
    pub fn check(&self, length: usize) -> Result<(), ModelError> {
        if let Some(problem) = self.structural_problem() {
            return Err(ModelError::InvalidFrame(problem));
        }
        if self.predicate > length {
            return Err(ModelError::InvalidFrame(format!(
                "predicate {} beyond sentence length {}",
                self.predicate, length
            )));
        }
        if let Some(s) = self.spans.iter().find(|s| s.end > length) {
            return Err(ModelError::InvalidFrame(format!(
                "span {} beyond sentence length {}",
                s, length
            )));
        }
        Ok(())
    }

    /// True if `span` could be added without overlapping an existing span or
    /// the predicate. `skip` excludes one existing span from the check.
    pub fn fits(&self, span: &Span, skip: Option<usize>) -> bool {
        !span.contains(self.predicate)
            && self
                .spans
                .iter()
                .enumerate()
                .all(|(i, s)| Some(i) == skip || !s.overlaps(span))
    }

    pub fn coarsened(&self) -> Frame {
        Frame {
            predicate: self.predicate,
            spans: self
                .spans
                .iter()
                .map(|s| Span::new(s.start, s.end, s.label.coarse()))
                .collect(),
        }
    }

    pub(crate) fn sort(&mut self) {
        self.spans.sort();
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeMode {
    Strict,
    /// Repairs orphan `I`/`E` tags and unterminated `B` runs instead of failing.
    Lenient,
}

/// Decodes one frame column into its predicate and spans.
pub fn spans_from_tags(tags: &[PositionTag], mode: DecodeMode) -> Result<Frame, ModelError> {
    match mode {
        DecodeMode::Strict => decode_strict(tags),
        DecodeMode::Lenient => decode_lenient(tags),
    }
}

fn decode_strict(tags: &[PositionTag]) -> Result<Frame, ModelError> {
    let mut predicate = None;
    let mut spans = Vec::new();
    // (label, start) of the currently open B run
    let mut open: Option<(&RoleLabel, usize)> = None;

    for (i, tag) in tags.iter().enumerate() {
        let pos = i + 1;
        match tag {
            PositionTag::Arg(Position::I, l) | PositionTag::Arg(Position::E, l) => {
                match open {
                    None => return Err(ill_formed(pos, format!("{} without a preceding B", tag))),
                    Some((ol, _)) if ol != l => {
                        return Err(ill_formed(pos, format!("{} inside a run labeled {}", tag, ol)))
                    }
                    Some((_, start)) => {
                        if matches!(tag, PositionTag::Arg(Position::E, _)) {
                            spans.push(Span::new(start, pos, l.clone()));
                            open = None;
                        }
                    }
                }
                continue;
            }
            _ => {}
        }
        if let Some((l, start)) = open {
            return Err(ill_formed(
                pos,
                format!("B-{} opened at {} is not closed by E-{}", l, start, l),
            ));
        }
        match tag {
            PositionTag::O => {}
            PositionTag::Rel => {
                if predicate.is_some() {
                    return Err(ill_formed(pos, "more than one rel"));
                }
                predicate = Some(pos);
            }
            PositionTag::Arg(Position::S, l) => spans.push(Span::new(pos, pos, l.clone())),
            PositionTag::Arg(Position::B, l) => open = Some((l, pos)),
            PositionTag::Arg(_, _) => unreachable!(),
        }
    }
    if let Some((l, start)) = open {
        return Err(ill_formed(
            tags.len(),
            format!("B-{} opened at {} is never closed", l, start),
        ));
    }
    let predicate = predicate.ok_or_else(|| ill_formed(0, "no rel tag"))?;
    Ok(Frame { predicate, spans })
}

fn decode_lenient(tags: &[PositionTag]) -> Result<Frame, ModelError> {
    let mut predicate = None;
    let mut spans = Vec::new();
    // (label, start, last position carrying the label)
    let mut open: Option<(&RoleLabel, usize, usize)> = None;

    for (i, tag) in tags.iter().enumerate() {
        let pos = i + 1;
        if let (Some((ol, start, _)), PositionTag::Arg(p, l)) = (open, tag) {
            if ol == l && matches!(p, Position::I | Position::E) {
                if *p == Position::E {
                    spans.push(Span::new(start, pos, l.clone()));
                    open = None;
                } else {
                    open = Some((ol, start, pos));
                }
                continue;
            }
        }
        if let Some((l, start, last)) = open.take() {
            spans.push(Span::new(start, last, l.clone()));
        }
        match tag {
            PositionTag::O => {}
            // extra rel tags are dropped; the first one names the predicate
            PositionTag::Rel => {
                predicate.get_or_insert(pos);
            }
            PositionTag::Arg(Position::S, l) | PositionTag::Arg(Position::E, l) => {
                spans.push(Span::new(pos, pos, l.clone()))
            }
            PositionTag::Arg(Position::B, l) | PositionTag::Arg(Position::I, l) => {
                open = Some((l, pos, pos))
            }
        }
    }
    if let Some((l, start, last)) = open {
        spans.push(Span::new(start, last, l.clone()));
    }
    let predicate = predicate.ok_or_else(|| ill_formed(0, "no rel tag"))?;
    Ok(Frame { predicate, spans })
}

/// Encodes a frame as one tag per token.
pub fn tags_from_spans(frame: &Frame, length: usize) -> Result<Vec<PositionTag>, ModelError> {
    frame.check(length)?;
    let mut tags = vec![PositionTag::O; length];
    tags[frame.predicate - 1] = PositionTag::Rel;
    for s in &frame.spans {
        if s.start == s.end {
            tags[s.start - 1] = PositionTag::Arg(Position::S, s.label.clone());
        } else {
            tags[s.start - 1] = PositionTag::Arg(Position::B, s.label.clone());
            for t in &mut tags[s.start..s.end - 1] {
                *t = PositionTag::Arg(Position::I, s.label.clone());
            }
            tags[s.end - 1] = PositionTag::Arg(Position::E, s.label.clone());
        }
    }
    Ok(tags)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnotatedSentence {
    pub id: String,
    pub lang: Lang,
    pub side: Side,
    pub pair_id: String,
    pub tokens: Vec<Token>,
    pub frames: Vec<Frame>,
}

impl AnnotatedSentence {
    /// Creates an unannotated sentence with tokens numbered from 1.
    pub fn from_forms<S: AsRef<str>>(
        id: impl Into<String>,
        lang: Lang,
        side: Side,
        pair_id: impl Into<String>,
        forms: &[S],
    ) -> Self {
        AnnotatedSentence {
            id: id.into(),
            lang,
            side,
            pair_id: pair_id.into(),
            tokens: forms
                .iter()
                .enumerate()
                .map(|(i, f)| Token {
                    index: i + 1,
                    form: f.as_ref().to_owned(),
                })
                .collect(),
            frames: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn form(&self, index: usize) -> &str {
        &self.tokens[index - 1].form
    }

    pub fn predicates(&self) -> Vec<usize> {
        self.frames.iter().map(|f| f.predicate).collect()
    }

    pub fn frame_for(&self, predicate: usize) -> Option<&Frame> {
        self.frames.iter().find(|f| f.predicate == predicate)
    }

    /// Copy of this sentence with its frames replaced.
    pub fn with_frames(&self, frames: Vec<Frame>) -> Self {
        AnnotatedSentence {
            frames,
            ..self.clone()
        }
    }

    /// Copy with adjunct subtypes collapsed to bare `AM`.
    pub fn coarsened(&self) -> Self {
        self.with_frames(self.frames.iter().map(Frame::coarsened).collect())
    }
}

/// A broken invariant found by [`validate_sentence`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Empty,
    TokenIndex { position: usize, found: usize },
    EmptyForm { index: usize },
    WhitespaceInForm { index: usize },
    PredicateOutOfBounds { frame: usize, predicate: usize },
    DuplicatePredicate { predicate: usize },
    UnorderedFrames { frame: usize },
    InvalidBounds { frame: usize, span: Span },
    OutOfBounds { frame: usize, span: Span },
    CoversPredicate { frame: usize, span: Span },
    Overlap { frame: usize, first: Span, second: Span },
    CoreIndex { frame: usize, span: Span },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "sentence has no tokens"),
            Violation::TokenIndex { position, found } => {
                write!(f, "token {} has index {}", position, found)
            }
            Violation::EmptyForm { index } => write!(f, "token {} has an empty form", index),
            Violation::WhitespaceInForm { index } => {
                write!(f, "token {} contains whitespace", index)
            }
            Violation::PredicateOutOfBounds { frame, predicate } => {
                write!(f, "frame {}: predicate {} out of bounds", frame, predicate)
            }
            Violation::DuplicatePredicate { predicate } => {
                write!(f, "predicate {} has more than one frame", predicate)
            }
            Violation::UnorderedFrames { frame } => {
                write!(f, "frame {}: predicates not in increasing order", frame)
            }
            Violation::InvalidBounds { frame, span } => {
                write!(f, "frame {}: span {} has start after end", frame, span)
            }
            Violation::OutOfBounds { frame, span } => {
                write!(f, "frame {}: span {} out of bounds", frame, span)
            }
            Violation::CoversPredicate { frame, span } => {
                write!(f, "frame {}: span {} covers the predicate", frame, span)
            }
            Violation::Overlap {
                frame,
                first,
                second,
            } => write!(f, "frame {}: spans {} and {} overlap", frame, first, second),
            Violation::CoreIndex { frame, span } => {
                write!(f, "frame {}: span {} has core index above A4", frame, span)
            }
        }
    }
}

/// Lists every broken invariant of `s`; an empty list means the sentence is valid.
/// Frame numbers in violations are 1-based.
pub fn validate_sentence(s: &AnnotatedSentence) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = s.tokens.len();
    if n == 0 {
        out.push(Violation::Empty);
    }
    for (i, t) in s.tokens.iter().enumerate() {
        if t.index != i + 1 {
            out.push(Violation::TokenIndex {
                position: i + 1,
                found: t.index,
            });
        }
        if t.form.is_empty() {
            out.push(Violation::EmptyForm { index: i + 1 });
        } else if t.form.chars().any(char::is_whitespace) {
            out.push(Violation::WhitespaceInForm { index: i + 1 });
        }
    }

    let mut seen = BTreeSet::new();
    let mut prev: Option<usize> = None;
    for (fi, frame) in s.frames.iter().enumerate() {
        let fno = fi + 1;
        if frame.predicate == 0 || frame.predicate > n {
            out.push(Violation::PredicateOutOfBounds {
                frame: fno,
                predicate: frame.predicate,
            });
        }
        if !seen.insert(frame.predicate) {
            out.push(Violation::DuplicatePredicate {
                predicate: frame.predicate,
            });
        } else if prev.is_some_and(|p| p > frame.predicate) {
            out.push(Violation::UnorderedFrames { frame: fno });
        }
        prev = Some(frame.predicate);

        for (si, span) in frame.spans.iter().enumerate() {
            if span.start == 0 || span.start > span.end {
                out.push(Violation::InvalidBounds {
                    frame: fno,
                    span: span.clone(),
                });
                continue;
            }
            if span.end > n {
                out.push(Violation::OutOfBounds {
                    frame: fno,
                    span: span.clone(),
                });
            }
            if span.contains(frame.predicate) {
                out.push(Violation::CoversPredicate {
                    frame: fno,
                    span: span.clone(),
                });
            }
            if matches!(span.label, RoleLabel::Core(k) if k > RoleLabel::MAX_CORE) {
                out.push(Violation::CoreIndex {
                    frame: fno,
                    span: span.clone(),
                });
            }
            for other in &frame.spans[si + 1..] {
                if other.start <= other.end && span.overlaps(other) {
                    out.push(Violation::Overlap {
                        frame: fno,
                        first: span.clone(),
                        second: other.clone(),
                    });
                }
            }
        }
    }
    out
}

/// Word alignment between the L2 and L1 sides of a pair. Indices are 0-based
/// (`(l2, l1)`), unlike token indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alignment {
    pub pair_id: String,
    pub links: BTreeSet<(usize, usize)>,
}

impl Alignment {
    pub fn new(pair_id: impl Into<String>, links: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Alignment {
            pair_id: pair_id.into(),
            links: links.into_iter().collect(),
        }
    }

    pub fn identity(pair_id: impl Into<String>, length: usize) -> Self {
        Alignment::new(pair_id, (0..length).map(|i| (i, i)))
    }

    /// Alignment with the two sides exchanged.
    pub fn inverted(&self) -> Self {
        Alignment::new(self.pair_id.clone(), self.links.iter().map(|&(i, j)| (j, i)))
    }

    /// First link whose indices fall outside the given sentence lengths.
    pub fn out_of_range(&self, l2_len: usize, l1_len: usize) -> Option<(usize, usize)> {
        self.links
            .iter()
            .copied()
            .find(|&(i, j)| i >= l2_len || j >= l1_len)
    }
}
