//! Plain-text model files, fields separated by TABs.
//!
//! ```text
//! SRLMODEL v1
//! O    rel    S-A0    B-A0    I-A0    E-A0
//! E    w=他    S-A0    1.5
//! T    <s>    S-A0    0.25
//! ```
//!
//! Emission lines are sorted by feature name, then label order; transition
//! lines follow, start row first. Zero weights are omitted.

use std::collections::{BTreeSet, HashSet};
use std::io::{Read, Write};

use super::{TaggerModel, START};
use crate::error::{Error, ParseError, Result};
use crate::model::{Position, PositionTag};

pub const MODEL_HEADER: &str = "SRLMODEL v1";

pub fn model_to_string(model: &TaggerModel) -> String {
    let n = model.labels.len();
    let mut out = String::new();
    out.push_str(MODEL_HEADER);
    out.push('\n');
    let labels: Vec<String> = model.labels.iter().map(|l| l.to_string()).collect();
    out.push_str(&labels.join("\t"));
    out.push('\n');

    let mut ids: Vec<usize> = (0..model.num_features()).collect();
    ids.sort_by(|&a, &b| model.feature_name(a).cmp(model.feature_name(b)));
    for f in ids {
        for (l, &w) in model.emission_row(f).iter().enumerate() {
            if w != 0.0 {
                out.push_str(&format!("E\t{}\t{}\t{}\n", model.feature_name(f), labels[l], w));
            }
        }
    }
    let rows = std::iter::once(None).chain((0..n).map(Some));
    for prev in rows {
        let prev_name = prev.map_or(START, |p| labels[p].as_str());
        for (l, name) in labels.iter().enumerate() {
            let w = model.transition_at(prev, l);
            if w != 0.0 {
                out.push_str(&format!("T\t{}\t{}\t{}\n", prev_name, name, w));
            }
        }
    }
    out
}

pub fn save_model<W: Write>(model: &TaggerModel, mut out: W) -> Result<()> {
    out.write_all(model_to_string(model).as_bytes())?;
    Ok(())
}

pub fn load_model<R: Read>(mut input: R) -> Result<TaggerModel> {
    let mut text = String::new();
    input
        .read_to_string(&mut text)
        .map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => Error::Parse(ParseError::new(0, "model file is not UTF-8")),
            _ => Error::Io(e),
        })?;
    parse_model(&text)
}

fn parse_weight(s: &str, line: usize) -> std::result::Result<f64, ParseError> {
    let w: f64 = s
        .parse()
        .map_err(|_| ParseError::new(line, format!("bad weight `{}`", s)))?;
    if !w.is_finite() {
        return Err(ParseError::new(line, format!("non-finite weight `{}`", s)));
    }
    Ok(w)
}

fn parse_model(text: &str) -> Result<TaggerModel> {
    if text.is_empty() {
        return Err(ParseError::new(1, "empty model file").into());
    }
    if !text.ends_with('\n') {
        let lineno = text.matches('\n').count() + 1;
        return Err(ParseError::new(lineno, "truncated model file (no final newline)").into());
    }
    let lines: Vec<&str> = text[..text.len() - 1].split('\n').collect();
    if lines[0] != MODEL_HEADER {
        if lines[0].starts_with("SRLMODEL ") {
            return Err(Error::VersionMismatch(lines[0]["SRLMODEL ".len()..].to_owned()));
        }
        return Err(ParseError::new(1, "missing `SRLMODEL v1` header").into());
    }
    let label_line = lines
        .get(1)
        .ok_or_else(|| ParseError::new(2, "missing label set"))?;
    let labels = label_line
        .split('\t')
        .map(|s| s.parse::<PositionTag>().map_err(|e| ParseError::new(2, e.to_string())))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    check_label_set(&labels)?;

    let mut model = TaggerModel::zero(labels);
    let mut seen_e = HashSet::new();
    let mut seen_t = HashSet::new();
    for (i, line) in lines.iter().enumerate().skip(2) {
        let lineno = i + 1;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(ParseError::new(lineno, format!("expected 4 columns, found {}", fields.len())).into());
        }
        let label = |s: &str| -> std::result::Result<PositionTag, ParseError> {
            let tag: PositionTag = s
                .parse()
                .map_err(|_| ParseError::new(lineno, format!("bad label `{}`", s)))?;
            if model.label_index(&tag).is_none() {
                return Err(ParseError::new(lineno, format!("label `{}` not in label set", s)));
            }
            Ok(tag)
        };
        let weight = parse_weight(fields[3], lineno)?;
        match fields[0] {
            "E" => {
                let tag = label(fields[2])?;
                if fields[1].is_empty() {
                    return Err(ParseError::new(lineno, "empty feature name").into());
                }
                if !seen_e.insert((fields[1].to_owned(), fields[2].to_owned())) {
                    return Err(ParseError::new(lineno, "duplicate emission weight").into());
                }
                model.set_emission(fields[1], &tag, weight);
            }
            "T" => {
                let prev = if fields[1] == START {
                    None
                } else {
                    Some(label(fields[1])?)
                };
                let tag = label(fields[2])?;
                if !seen_t.insert((fields[1].to_owned(), fields[2].to_owned())) {
                    return Err(ParseError::new(lineno, "duplicate transition weight").into());
                }
                model.set_transition(prev.as_ref(), &tag, weight);
            }
            other => {
                return Err(ParseError::new(lineno, format!("unknown record type `{}`", other)).into())
            }
        }
    }
    Ok(model)
}

/// The label set must contain O and rel, have no duplicates, and carry all
/// four positions of every role it mentions.
fn check_label_set(labels: &[PositionTag]) -> std::result::Result<(), ParseError> {
    let set: BTreeSet<&PositionTag> = labels.iter().collect();
    if set.len() != labels.len() {
        return Err(ParseError::new(2, "duplicate label in label set"));
    }
    if !set.contains(&PositionTag::O) || !set.contains(&PositionTag::Rel) {
        return Err(ParseError::new(2, "label set must contain O and rel"));
    }
    for l in labels {
        if let Some(role) = l.label() {
            for p in Position::ALL {
                if !set.contains(&PositionTag::Arg(p, role.clone())) {
                    return Err(ParseError::new(
                        2,
                        format!("label set has {} but not {}", l, PositionTag::Arg(p, role.clone())),
                    ));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RoleLabel;
    use crate::tagger::label_set;

    fn sample() -> TaggerModel {
        let mut m = TaggerModel::zero(label_set(&[RoleLabel::Core(0)]));
        let s0: PositionTag = "S-A0".parse().unwrap();
        m.set_emission("w=b", &s0, 0.1 + 0.2);
        m.set_emission("w=a", &PositionTag::O, -1.0);
        m.set_emission("w=a", &s0, 1.0 / 3.0);
        m.set_transition(None, &s0, 2.5);
        m.set_transition(Some(&s0), &PositionTag::Rel, 1e-7);
        m
    }

    #[test]
    fn canonical_layout() {
        let text = model_to_string(&sample());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "SRLMODEL v1");
        assert_eq!(lines[1], "O\trel\tS-A0\tB-A0\tI-A0\tE-A0");
        assert_eq!(lines[2], "E\tw=a\tO\t-1");
        assert_eq!(lines[3], "E\tw=a\tS-A0\t0.3333333333333333");
        assert_eq!(lines[4], "E\tw=b\tS-A0\t0.30000000000000004");
        assert_eq!(lines[5], "T\t<s>\tS-A0\t2.5");
        assert_eq!(lines[6], "T\tS-A0\trel\t0.0000001");
        assert_eq!(lines.len(), 7);
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let text = model_to_string(&sample());
        let back = load_model(text.as_bytes()).unwrap();
        assert_eq!(model_to_string(&back), text);
    }

    #[test]
    fn rejects_bad_files() {
        let text = model_to_string(&sample());
        let truncated = &text[..text.len() - 3];
        assert!(matches!(load_model(truncated.as_bytes()), Err(Error::Parse(_))));
        assert!(matches!(load_model("".as_bytes()), Err(Error::Parse(_))));
        assert!(matches!(load_model("SRLMODEL v1\n".as_bytes()), Err(Error::Parse(_))));
        assert!(matches!(
            load_model(text.replace("v1", "v2").as_bytes()),
            Err(Error::VersionMismatch(v)) if v == "v2"
        ));
        assert!(matches!(load_model("O\trel\n".as_bytes()), Err(Error::Parse(_))));
        let missing_e = "SRLMODEL v1\nO\trel\tS-A0\tB-A0\tI-A0\n";
        assert!(matches!(load_model(missing_e.as_bytes()), Err(Error::Parse(_))));
        let unknown = format!("{}E\tw=x\tS-A1\t1\n", text);
        assert!(matches!(load_model(unknown.as_bytes()), Err(Error::Parse(p)) if p.line == 8));
        let dup = format!("{}E\tw=a\tO\t2\n", text);
        assert!(matches!(load_model(dup.as_bytes()), Err(Error::Parse(_))));
    }

    #[test]
    fn labels_only_model_is_valid() {
        let m = load_model("SRLMODEL v1\nO\trel\n".as_bytes()).unwrap();
        assert_eq!(m.labels().len(), 2);
        assert_eq!(m.num_features(), 0);
    }
}
