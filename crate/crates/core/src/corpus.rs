//! Corpus, alignment and split files, and pairing of L2/L1 corpora.
//!
//! Corpus files are a tab-separated column format, one block per sentence:
//!
//! ```text
//! # id = s1
//! # lang = ENG
//! # side = L2
//! # pair = p1
//! 1    他    _    S-A0
//! 2    吃    Y    rel
//! 3    饭    _    S-A1
//!
//! ```
//!
//! Columns are the 1-based index, the word form, `Y` for predicate tokens
//! (`_` otherwise) and one tag column per frame in predicate order.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{Read, Write};

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, ParseError, Result};
use crate::model::{
    spans_from_tags, tags_from_spans, validate_sentence, Alignment, AnnotatedSentence, DecodeMode,
    Lang, PositionTag, Side, Token,
};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Corpus {
    pub sentences: Vec<AnnotatedSentence>,
}

impl Corpus {
    pub fn new(sentences: Vec<AnnotatedSentence>) -> Self {
        Corpus { sentences }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, AnnotatedSentence> {
        self.sentences.iter()
    }

    pub fn get(&self, id: &str) -> Option<&AnnotatedSentence> {
        self.sentences.iter().find(|s| s.id == id)
    }

    /// Keeps only the sentences whose id satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&AnnotatedSentence) -> bool) -> Corpus {
        Corpus::new(self.sentences.iter().filter(|s| keep(s)).cloned().collect())
    }
}

impl FromIterator<AnnotatedSentence> for Corpus {
    fn from_iter<I: IntoIterator<Item = AnnotatedSentence>>(iter: I) -> Self {
        Corpus::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a AnnotatedSentence;
    type IntoIter = std::slice::Iter<'a, AnnotatedSentence>;

    fn into_iter(self) -> Self::IntoIter {
        self.sentences.iter()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ReadOptions {
    /// Repair ill-formed tag columns instead of rejecting them.
    pub lenient: bool,
}

fn read_text<R: Read>(mut input: R) -> Result<String> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    String::from_utf8(bytes).map_err(|e| {
        let line = bytes_line(e.as_bytes(), e.utf8_error().valid_up_to());
        ParseError::new(line, "input is not valid UTF-8").into()
    })
}

fn bytes_line(bytes: &[u8], offset: usize) -> usize {
    bytes[..offset].iter().filter(|&&b| b == b'\n').count() + 1
}

/// Splits text into LF-terminated lines, rejecting carriage returns.
fn lines(text: &str) -> std::result::Result<Vec<&str>, ParseError> {
    let mut out: Vec<&str> = text.split('\n').collect();
    if out.last() == Some(&"") {
        out.pop();
    }
    for (i, l) in out.iter().enumerate() {
        if l.contains('\r') {
            return Err(ParseError::new(i + 1, "CR found; line endings must be LF"));
        }
    }
    Ok(out)
}

pub fn read_corpus<R: Read>(input: R) -> Result<Corpus> {
    read_corpus_with(input, ReadOptions::default())
}

pub fn read_corpus_with<R: Read>(input: R, options: ReadOptions) -> Result<Corpus> {
    let text = read_text(input)?;
    Ok(parse_corpus(&text, options)?)
}

pub fn parse_corpus(text: &str, options: ReadOptions) -> std::result::Result<Corpus, ParseError> {
    let lines = lines(text)?;
    let mut sentences = Vec::new();
    let mut ids = HashSet::new();
    let mut i = 0;
    while i < lines.len() {
        if lines[i].is_empty() {
            return Err(ParseError::new(i + 1, "unexpected blank line"));
        }
        let start = i;
        while i < lines.len() && !lines[i].is_empty() {
            i += 1;
        }
        let sentence = parse_block(&lines[start..i], start + 1, options)?;
        if !ids.insert(sentence.id.clone()) {
            return Err(ParseError::new(
                start + 1,
                format!("duplicate sentence id `{}`", sentence.id),
            ));
        }
        sentences.push(sentence);
        // skip the single separating blank line
        i += 1;
    }
    Ok(Corpus::new(sentences))
}

const HEADER_KEYS: [&str; 4] = ["id", "lang", "side", "pair"];

fn parse_block(
    block: &[&str],
    first_line: usize,
    options: ReadOptions,
) -> std::result::Result<AnnotatedSentence, ParseError> {
    let mut headers = [None; 4];
    let mut k = 0;
    while k < block.len() && block[k].starts_with('#') {
        let lineno = first_line + k;
        let rest = block[k]
            .strip_prefix("# ")
            .ok_or_else(|| ParseError::new(lineno, "header must look like `# key = value`"))?;
        let (key, value) = rest
            .split_once(" = ")
            .ok_or_else(|| ParseError::new(lineno, "header must look like `# key = value`"))?;
        let slot = HEADER_KEYS
            .iter()
            .position(|&h| h == key)
            .ok_or_else(|| ParseError::new(lineno, format!("unknown header `{}`", key)))?;
        if headers[slot].is_some() {
            return Err(ParseError::new(lineno, format!("repeated header `{}`", key)));
        }
        if value.is_empty() || value.contains('\t') {
            return Err(ParseError::new(lineno, format!("bad value for header `{}`", key)));
        }
        headers[slot] = Some((value, lineno));
        k += 1;
    }
    let missing = |key: &str| ParseError::new(first_line, format!("missing `# {} = ...` header", key));
    let (id, _) = headers[0].ok_or_else(|| missing("id"))?;
    let (lang, lang_line) = headers[1].ok_or_else(|| missing("lang"))?;
    let (side, side_line) = headers[2].ok_or_else(|| missing("side"))?;
    let (pair, _) = headers[3].ok_or_else(|| missing("pair"))?;
    let lang: Lang = lang.parse().map_err(|e| ParseError::new(lang_line, e))?;
    let side: Side = side.parse().map_err(|e| ParseError::new(side_line, e))?;

    let token_lines = &block[k..];
    if token_lines.is_empty() {
        return Err(ParseError::new(first_line, format!("sentence `{}` has no tokens", id)));
    }
    let first_token_line = first_line + k;

    let mut tokens = Vec::with_capacity(token_lines.len());
    let mut marked = Vec::new();
    let mut columns: Vec<Vec<PositionTag>> = Vec::new();
    let mut width = None;
    for (t, line) in token_lines.iter().enumerate() {
        let lineno = first_token_line + t;
        if line.starts_with('#') {
            return Err(ParseError::new(lineno, "header after token lines"));
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 3 {
            return Err(ParseError::new(
                lineno,
                format!("expected at least 3 columns, found {}", fields.len()),
            ));
        }
        match width {
            None => {
                width = Some(fields.len());
                columns = vec![Vec::with_capacity(token_lines.len()); fields.len() - 3];
            }
            Some(w) if w != fields.len() => {
                return Err(ParseError::new(
                    lineno,
                    format!("expected {} columns, found {}", w, fields.len()),
                ))
            }
            _ => {}
        }
        let index: usize = fields[0]
            .parse()
            .map_err(|_| ParseError::new(lineno, format!("non-integer index `{}`", fields[0])))?;
        if index != t + 1 {
            return Err(ParseError::new(
                lineno,
                format!("expected token index {}, found {}", t + 1, index),
            ));
        }
        let form = fields[1];
        if form.is_empty() || form.chars().any(char::is_whitespace) {
            return Err(ParseError::new(lineno, "form must be non-empty without whitespace"));
        }
        match fields[2] {
            "Y" => marked.push(index),
            "_" => {}
            other => {
                return Err(ParseError::new(
                    lineno,
                    format!("predicate column must be `Y` or `_`, found `{}`", other),
                ))
            }
        }
        for (c, field) in fields[3..].iter().enumerate() {
            let tag: PositionTag = field
                .parse()
                .map_err(|e| ParseError::new(lineno, format!("column {}: {}", c + 4, e)))?;
            columns[c].push(tag);
        }
        tokens.push(Token {
            index,
            form: form.to_owned(),
        });
    }

    if columns.len() != marked.len() {
        return Err(ParseError::new(
            first_token_line,
            format!(
                "{} predicates marked but {} frame columns",
                marked.len(),
                columns.len()
            ),
        ));
    }
    let mode = if options.lenient {
        DecodeMode::Lenient
    } else {
        DecodeMode::Strict
    };
    let mut frames = Vec::with_capacity(columns.len());
    for (c, (column, &predicate)) in columns.iter().zip(&marked).enumerate() {
        let frame = spans_from_tags(column, mode).map_err(|e| {
            let line = match &e {
                crate::model::ModelError::IllFormedTagSequence { position, .. } if *position > 0 => {
                    first_token_line + position - 1
                }
                _ => first_token_line,
            };
            ParseError::new(line, format!("column {}: {}", c + 4, e))
        })?;
        if frame.predicate != predicate {
            return Err(ParseError::new(
                first_token_line + frame.predicate - 1,
                format!(
                    "column {}: rel at token {} but predicate {} is marked for this column",
                    c + 4,
                    frame.predicate,
                    predicate
                ),
            ));
        }
        frames.push(frame);
    }

    let sentence = AnnotatedSentence {
        id: id.to_owned(),
        lang,
        side,
        pair_id: pair.to_owned(),
        tokens,
        frames,
    };
    if let Some(v) = validate_sentence(&sentence).first() {
        return Err(ParseError::new(first_line, format!("sentence `{}`: {}", id, v)));
    }
    Ok(sentence)
}

pub fn write_corpus<W: Write>(corpus: &Corpus, mut out: W) -> Result<()> {
    let mut buf = String::new();
    for s in &corpus.sentences {
        format_sentence(s, &mut buf)?;
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}

/// Canonical text of a corpus.
pub fn corpus_to_string(corpus: &Corpus) -> Result<String> {
    let mut buf = String::new();
    for s in &corpus.sentences {
        format_sentence(s, &mut buf)?;
    }
    Ok(buf)
}

fn format_sentence(s: &AnnotatedSentence, buf: &mut String) -> Result<()> {
    use std::fmt::Write as _;

    let n = s.len();
    let columns = s
        .frames
        .iter()
        .map(|f| tags_from_spans(f, n))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let predicates = s.predicates();
    let _ = writeln!(buf, "# id = {}", s.id);
    let _ = writeln!(buf, "# lang = {}", s.lang);
    let _ = writeln!(buf, "# side = {}", s.side);
    let _ = writeln!(buf, "# pair = {}", s.pair_id);
    for (i, token) in s.tokens.iter().enumerate() {
        let mark = if predicates.contains(&(i + 1)) { "Y" } else { "_" };
        let _ = write!(buf, "{}\t{}\t{}", i + 1, token.form, mark);
        for col in &columns {
            let _ = write!(buf, "\t{}", col[i]);
        }
        buf.push('\n');
    }
    buf.push('\n');
    Ok(())
}

pub type Alignments = IndexMap<String, Alignment>;

/// Reads `pair_id<TAB>i-j i-j ...` lines, keeping file order.
pub fn read_alignments<R: Read>(input: R) -> Result<Alignments> {
    let text = read_text(input)?;
    Ok(parse_alignments(&text)?)
}

pub fn parse_alignments(text: &str) -> std::result::Result<Alignments, ParseError> {
    let mut out = IndexMap::new();
    for (i, line) in lines(text)?.into_iter().enumerate() {
        let lineno = i + 1;
        let (pair_id, links) = line
            .split_once('\t')
            .ok_or_else(|| ParseError::new(lineno, "expected `pair_id<TAB>links`"))?;
        if pair_id.is_empty() {
            return Err(ParseError::new(lineno, "empty pair id"));
        }
        let mut alignment = Alignment::new(pair_id, []);
        for link in links.split(' ').filter(|l| !l.is_empty()) {
            let parsed = link
                .split_once('-')
                .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)));
            match parsed {
                Some(pair) => {
                    alignment.links.insert(pair);
                }
                None => {
                    return Err(ParseError::new(
                        lineno,
                        format!("malformed link `{}`", link),
                    ))
                }
            }
        }
        if out.insert(pair_id.to_owned(), alignment).is_some() {
            return Err(ParseError::new(
                lineno,
                format!("duplicate pair id `{}`", pair_id),
            ));
        }
    }
    Ok(out)
}

pub fn write_alignments<'a, W, I>(alignments: I, mut out: W) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a Alignment>,
{
    let mut buf = String::new();
    for a in alignments {
        buf.push_str(&a.pair_id);
        buf.push('\t');
        let links: Vec<String> = a.links.iter().map(|(i, j)| format!("{}-{}", i, j)).collect();
        buf.push_str(&links.join(" "));
        buf.push('\n');
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}

/// A learner sentence, its correction and the word alignment between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SentencePair {
    pub l2: AnnotatedSentence,
    pub l1: AnnotatedSentence,
    pub alignment: Alignment,
}

impl SentencePair {
    pub fn pair_id(&self) -> &str {
        &self.l2.pair_id
    }

    pub fn lang(&self) -> Lang {
        self.l2.lang
    }

    /// The same pair seen from the other side: sentences exchanged, links inverted.
    pub fn swapped(&self) -> SentencePair {
        SentencePair {
            l2: self.l1.clone(),
            l1: self.l2.clone(),
            alignment: self.alignment.inverted(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairingProblem {
    MissingL1(String),
    MissingL2(String),
    MissingAlignment(String),
    /// Alignment names a pair with no sentences.
    OrphanAlignment(String),
    DuplicatePairId { side: Side, pair_id: String },
    WrongSide { id: String, expected: Side },
    LinkOutOfRange { pair_id: String, link: (usize, usize) },
}

impl fmt::Display for PairingProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairingProblem::MissingL1(p) => write!(f, "pair `{}` has no L1 sentence", p),
            PairingProblem::MissingL2(p) => write!(f, "pair `{}` has no L2 sentence", p),
            PairingProblem::MissingAlignment(p) => write!(f, "pair `{}` has no alignment", p),
            PairingProblem::OrphanAlignment(p) => {
                write!(f, "alignment for unknown pair `{}`", p)
            }
            PairingProblem::DuplicatePairId { side, pair_id } => {
                write!(f, "pair `{}` occurs twice on the {} side", pair_id, side)
            }
            PairingProblem::WrongSide { id, expected } => {
                write!(f, "sentence `{}` is not marked {}", id, expected)
            }
            PairingProblem::LinkOutOfRange { pair_id, link } => write!(
                f,
                "pair `{}`: link {}-{} is out of range",
                pair_id, link.0, link.1
            ),
        }
    }
}

/// Pairing failure. The successfully matched pairs are kept so callers can
/// proceed with them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingError {
    pub matched: Vec<SentencePair>,
    pub problems: Vec<PairingProblem>,
}

impl fmt::Display for PairingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let problems: Vec<String> = self.problems.iter().map(|p| p.to_string()).collect();
        write!(
            f,
            "{} problem(s), {} pair(s) matched: {}",
            self.problems.len(),
            self.matched.len(),
            problems.join("; ")
        )
    }
}

impl std::error::Error for PairingError {}

/// Matches L2 and L1 sentences on `pair_id`, in L2 corpus order.
pub fn pair_corpora(
    l2: &Corpus,
    l1: &Corpus,
    alignments: &Alignments,
) -> std::result::Result<Vec<SentencePair>, PairingError> {
    let mut problems = Vec::new();
    let mut l1_by_pair: IndexMap<&str, &AnnotatedSentence> = IndexMap::new();
    for s in &l1.sentences {
        if s.side != Side::L1 {
            problems.push(PairingProblem::WrongSide {
                id: s.id.clone(),
                expected: Side::L1,
            });
        } else if l1_by_pair.insert(&s.pair_id, s).is_some() {
            problems.push(PairingProblem::DuplicatePairId {
                side: Side::L1,
                pair_id: s.pair_id.clone(),
            });
        }
    }

    let mut matched = Vec::new();
    let mut seen_l2 = HashSet::new();
    for s in &l2.sentences {
        if s.side != Side::L2 {
            problems.push(PairingProblem::WrongSide {
                id: s.id.clone(),
                expected: Side::L2,
            });
            continue;
        }
        if !seen_l2.insert(s.pair_id.as_str()) {
            problems.push(PairingProblem::DuplicatePairId {
                side: Side::L2,
                pair_id: s.pair_id.clone(),
            });
            continue;
        }
        let Some(&other) = l1_by_pair.get(s.pair_id.as_str()) else {
            problems.push(PairingProblem::MissingL1(s.pair_id.clone()));
            continue;
        };
        let Some(alignment) = alignments.get(&s.pair_id) else {
            problems.push(PairingProblem::MissingAlignment(s.pair_id.clone()));
            continue;
        };
        if let Some(link) = alignment.out_of_range(s.len(), other.len()) {
            problems.push(PairingProblem::LinkOutOfRange {
                pair_id: s.pair_id.clone(),
                link,
            });
            continue;
        }
        matched.push(SentencePair {
            l2: s.clone(),
            l1: other.clone(),
            alignment: alignment.clone(),
        });
    }
    for pair_id in l1_by_pair.keys() {
        if !seen_l2.contains(pair_id) {
            problems.push(PairingProblem::MissingL2((*pair_id).to_owned()));
        }
    }
    for pair_id in alignments.keys() {
        if !seen_l2.contains(pair_id.as_str()) && !l1_by_pair.contains_key(pair_id.as_str()) {
            problems.push(PairingProblem::OrphanAlignment(pair_id.clone()));
        }
    }

    if problems.is_empty() {
        Ok(matched)
    } else {
        Err(PairingError { matched, problems })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitSpec {
    pub dev_pairs_per_lang: usize,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            dev_pairs_per_lang: 50,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub dev: Vec<SentencePair>,
    pub test_l2: Vec<AnnotatedSentence>,
    pub test_l1: Vec<AnnotatedSentence>,
}

/// Draws `dev_pairs_per_lang` development pairs per language (seeded); every
/// other pair contributes its L2 side to `test_l2` and its L1 side to
/// `test_l1`. Outputs keep input order.
pub fn split_dataset(pairs: &[SentencePair], spec: SplitSpec, seed: u64) -> Result<Split> {
    let mut by_lang: BTreeMap<Lang, Vec<usize>> = BTreeMap::new();
    for (i, p) in pairs.iter().enumerate() {
        by_lang.entry(p.lang()).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_dev = vec![false; pairs.len()];
    for (lang, mut indices) in by_lang {
        if indices.len() < spec.dev_pairs_per_lang {
            return Err(Error::InsufficientData {
                lang: lang.to_string(),
                needed: spec.dev_pairs_per_lang,
                available: indices.len(),
            });
        }
        indices.shuffle(&mut rng);
        for &i in &indices[..spec.dev_pairs_per_lang] {
            in_dev[i] = true;
        }
    }
    let mut split = Split {
        dev: Vec::new(),
        test_l2: Vec::new(),
        test_l1: Vec::new(),
    };
    for (p, dev) in pairs.iter().zip(in_dev) {
        if dev {
            split.dev.push(p.clone());
        } else {
            split.test_l2.push(p.l2.clone());
            split.test_l1.push(p.l1.clone());
        }
    }
    Ok(split)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SplitName {
    Dev,
    TestL2,
    TestL1,
}

impl SplitName {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitName::Dev => "dev",
            SplitName::TestL2 => "test_l2",
            SplitName::TestL1 => "test_l1",
        }
    }
}

impl fmt::Display for SplitName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SplitName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "dev" => Ok(SplitName::Dev),
            "test_l2" => Ok(SplitName::TestL2),
            "test_l1" => Ok(SplitName::TestL1),
            _ => Err(format!("unknown split `{}`", s)),
        }
    }
}

pub type SplitAssignment = IndexMap<String, SplitName>;

impl Split {
    /// Sentence id → split name, dev pairs first (L2 then L1 of each pair).
    pub fn assignment(&self) -> SplitAssignment {
        let mut out = IndexMap::new();
        for p in &self.dev {
            out.insert(p.l2.id.clone(), SplitName::Dev);
            out.insert(p.l1.id.clone(), SplitName::Dev);
        }
        for s in &self.test_l2 {
            out.insert(s.id.clone(), SplitName::TestL2);
        }
        for s in &self.test_l1 {
            out.insert(s.id.clone(), SplitName::TestL1);
        }
        out
    }
}

pub fn read_split<R: Read>(input: R) -> Result<SplitAssignment> {
    let text = read_text(input)?;
    let mut out = IndexMap::new();
    for (i, line) in lines(&text)?.into_iter().enumerate() {
        let lineno = i + 1;
        let (id, name) = line
            .split_once('\t')
            .ok_or_else(|| ParseError::new(lineno, "expected `id<TAB>split`"))?;
        let name: SplitName = name.parse().map_err(|e| ParseError::new(lineno, e))?;
        if id.is_empty() {
            return Err(ParseError::new(lineno, "empty sentence id").into());
        }
        if out.insert(id.to_owned(), name).is_some() {
            return Err(ParseError::new(lineno, format!("duplicate sentence id `{}`", id)).into());
        }
    }
    Ok(out)
}

pub fn write_split<W: Write>(assignment: &SplitAssignment, mut out: W) -> Result<()> {
    let mut buf = String::new();
    for (id, name) in assignment {
        buf.push_str(id);
        buf.push('\t');
        buf.push_str(name.as_str());
        buf.push('\n');
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}
