//! Lexical and positional feature templates. No POS tags or parse
//! information is used.

use crate::model::AnnotatedSentence;

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";

/// Feature names active at one position of a predicate-conditioned sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureVector {
    names: Vec<String>,
}

impl FeatureVector {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Signed distance from the predicate, bucketed.
pub fn distance_bucket(position: usize, predicate: usize) -> &'static str {
    let d = position as i64 - predicate as i64;
    match d {
        0 => "0",
        1 => "+1",
        -1 => "-1",
        2 => "+2",
        -2 => "-2",
        3..=5 => "+3..5",
        -5..=-3 => "-3..5",
        d if d > 5 => "+>5",
        _ => "->5",
    }
}

fn form_at(s: &AnnotatedSentence, index: i64) -> &str {
    if index < 1 {
        BOS
    } else if index as usize > s.len() {
        EOS
    } else {
        s.form(index as usize)
    }
}

/// Features for token `position` given the predicate at `predicate`
/// (both 1-based).
pub fn extract_features(s: &AnnotatedSentence, predicate: usize, position: usize) -> FeatureVector {
    let t = position as i64;
    let p = predicate as i64;
    let w = form_at(s, t);
    let prev = form_at(s, t - 1);
    let next = form_at(s, t + 1);
    let pw = form_at(s, p);
    let dist = distance_bucket(position, predicate);
    let side = match position.cmp(&predicate) {
        std::cmp::Ordering::Less => "L",
        std::cmp::Ordering::Equal => "P",
        std::cmp::Ordering::Greater => "R",
    };

    let mut names = vec![
        format!("w={}", w),
        format!("w-1={}", prev),
        format!("w+1={}", next),
        format!("w-1w={}|{}", prev, w),
        format!("ww+1={}|{}", w, next),
        format!("p={}", pw),
        format!("p-1={}", form_at(s, p - 1)),
        format!("p+1={}", form_at(s, p + 1)),
        format!("dist={}", dist),
        format!("side={}", side),
        format!("w&p={}|{}", w, pw),
        format!("dist&p={}|{}", dist, pw),
    ];
    if position == predicate {
        names.push("is_pred".to_owned());
    }
    FeatureVector { names }
}
