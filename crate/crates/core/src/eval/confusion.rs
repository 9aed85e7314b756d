use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{align_corpora, for_each_frame_pair, ScoreOptions};
use crate::corpus::Corpus;
use crate::error::Result;
use crate::model::{Frame, Span};

/// Stand-in label for "no span".
pub const OUTSIDE: &str = "O";

/// Label confusions between gold (rows) and predicted (columns) spans.
///
/// Only three configurations are counted: a predicted span whose boundaries
/// equal a gold span's, a predicted span overlapping no gold span, and a gold
/// span overlapping no predicted span. Partial overlaps are ignored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub counts: BTreeMap<(String, String), usize>,
}

impl ConfusionMatrix {
    pub fn get(&self, gold: &str, pred: &str) -> usize {
        self.counts
            .get(&(gold.to_owned(), pred.to_owned()))
            .copied()
            .unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    fn bump(&mut self, gold: String, pred: String) {
        *self.counts.entry((gold, pred)).or_default() += 1;
    }

    pub fn add_frames(&mut self, pred: &[Span], gold: &[Span], options: ScoreOptions) {
        let label = |s: &Span| s.label.normalized(options.am_coarse).to_string();
        for p in pred {
            if let Some(g) = gold.iter().find(|g| g.same_extent(p)) {
                self.bump(label(g), label(p));
            } else if !gold.iter().any(|g| g.overlaps(p)) {
                self.bump(OUTSIDE.to_owned(), label(p));
            }
        }
        for g in gold {
            if !pred.iter().any(|p| p.overlaps(g)) {
                self.bump(label(g), OUTSIDE.to_owned());
            }
        }
    }

    /// Every label seen, sorted lexicographically with `O` last.
    pub fn labels(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self
            .counts
            .keys()
            .flat_map(|(g, p)| [g.as_str(), p.as_str()])
            .filter(|&l| l != OUTSIDE)
            .collect();
        let mut out: Vec<String> = set.into_iter().map(str::to_owned).collect();
        out.push(OUTSIDE.to_owned());
        out
    }

    /// Square TSV: header row of predicted labels, one row per gold label.
    pub fn to_tsv(&self) -> String {
        let labels = self.labels();
        let mut out = String::from("gold\\pred");
        for l in &labels {
            out.push('\t');
            out.push_str(l);
        }
        out.push('\n');
        for g in &labels {
            out.push_str(g);
            for p in &labels {
                out.push('\t');
                out.push_str(&self.get(g, p).to_string());
            }
            out.push('\n');
        }
        out
    }
}

fn frame_spans(f: Option<&Frame>) -> &[Span] {
    f.map_or(&[], |f| f.spans.as_slice())
}

pub fn confusion_matrix(pred: &Corpus, gold: &Corpus, options: ScoreOptions) -> Result<ConfusionMatrix> {
    let mut m = ConfusionMatrix::default();
    for (p, g) in align_corpora(pred, gold)? {
        for_each_frame_pair(p, g, |pf, gf| m.add_frames(frame_spans(pf), frame_spans(gf), options));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RoleLabel;

    fn span(a: usize, b: usize, l: &str) -> Span {
        Span::new(a, b, l.parse::<RoleLabel>().unwrap())
    }

    #[test]
    fn three_counting_cases() {
        let mut m = ConfusionMatrix::default();
        m.add_frames(&[span(2, 3, "A0")], &[span(2, 3, "A1")], ScoreOptions::default());
        assert_eq!(m.get("A1", "A0"), 1);

        let mut m = ConfusionMatrix::default();
        m.add_frames(&[span(1, 1, "AM")], &[], ScoreOptions::default());
        assert_eq!(m.get(OUTSIDE, "AM"), 1);

        let mut m = ConfusionMatrix::default();
        m.add_frames(&[span(2, 4, "A0")], &[span(2, 3, "A0")], ScoreOptions::default());
        assert_eq!(m.total(), 0);
    }

    #[test]
    fn tsv_orders_labels_with_o_last() {
        let mut m = ConfusionMatrix::default();
        m.add_frames(
            &[span(1, 1, "AM"), span(3, 3, "A1")],
            &[span(3, 3, "A0"), span(5, 6, "A2")],
            ScoreOptions::default(),
        );
        assert_eq!(m.labels(), ["A0", "A1", "A2", "AM", "O"]);
        let tsv = m.to_tsv();
        assert!(tsv.starts_with("gold\\pred\tA0\tA1\tA2\tAM\tO\n"));
        assert!(tsv.contains("\nA0\t0\t1\t0\t0\t0\n"));
        assert!(tsv.contains("\nO\t0\t0\t0\t1\t0\n"));
        assert!(tsv.contains("\nA2\t0\t0\t0\t0\t1\n"));
    }
}
