//! Generators and brute-force reference implementations shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use srlkit::agreement::RoleTuple;
use srlkit::{AnnotatedSentence, Corpus, Frame, Lang, Position, PositionTag, RoleLabel, Side, Span};

pub const LABELS: [&str; 8] = ["A0", "A1", "A2", "A3", "A4", "AM", "AM-TMP", "AM-LOC"];

pub fn label(s: &str) -> RoleLabel {
    s.parse().unwrap()
}

pub fn span(start: usize, end: usize, l: &str) -> Span {
    Span::new(start, end, label(l))
}

pub fn frame(predicate: usize, spans: &[(usize, usize, &str)]) -> Frame {
    Frame::new(predicate, spans.iter().map(|&(a, b, l)| span(a, b, l)).collect()).unwrap()
}

pub fn sentence(id: &str, lang: Lang, side: Side, pair: &str, forms: &[&str], frames: Vec<Frame>) -> AnnotatedSentence {
    let mut s = AnnotatedSentence::from_forms(id, lang, side, pair, forms);
    s.frames = frames;
    s
}

pub fn random_label(rng: &mut ChaCha8Rng, labels: &[&str]) -> RoleLabel {
    label(labels[rng.gen_range(0..labels.len())])
}

/// Random valid frame for a sentence of `n` tokens with the given predicate.
pub fn random_frame(rng: &mut ChaCha8Rng, n: usize, predicate: usize, labels: &[&str]) -> Frame {
    let mut spans = Vec::new();
    let mut t = 1;
    while t <= n {
        if t == predicate || !rng.gen_bool(0.45) {
            t += 1;
            continue;
        }
        let mut end = t + rng.gen_range(0..3);
        end = end.min(n);
        if t < predicate && end >= predicate {
            end = predicate - 1;
        }
        spans.push(Span::new(t, end, random_label(rng, labels)));
        t = end + 1 + rng.gen_range(0..2);
    }
    Frame::new(predicate, spans).unwrap()
}

pub fn random_forms(rng: &mut ChaCha8Rng, n: usize, vocab: usize) -> Vec<String> {
    (0..n).map(|_| format!("w{}", rng.gen_range(0..vocab))).collect()
}

/// A random sentence with 0..=3 frames on distinct predicates.
pub fn random_sentence(rng: &mut ChaCha8Rng, id: &str, side: Side, max_len: usize) -> AnnotatedSentence {
    let n = rng.gen_range(1..=max_len);
    let forms = random_forms(rng, n, 6);
    let mut s = AnnotatedSentence::from_forms(id, Lang::Eng, side, id, &forms);
    let preds: BTreeSet<usize> = (0..rng.gen_range(0..=3.min(n))).map(|_| rng.gen_range(1..=n)).collect();
    s.frames = preds.into_iter().map(|p| random_frame(rng, n, p, &LABELS)).collect();
    s
}

/// A second annotation of the same tokens: frames re-drawn, some predicates
/// kept, dropped or added.
pub fn reannotate(rng: &mut ChaCha8Rng, s: &AnnotatedSentence) -> AnnotatedSentence {
    let n = s.len();
    let mut preds: BTreeSet<usize> = s.predicates().into_iter().filter(|_| rng.gen_bool(0.8)).collect();
    if rng.gen_bool(0.3) {
        preds.insert(rng.gen_range(1..=n));
    }
    let frames = preds
        .into_iter()
        .map(|p| match s.frame_for(p) {
            Some(f) if rng.gen_bool(0.3) => f.clone(),
            _ => random_frame(rng, n, p, &LABELS),
        })
        .collect();
    s.with_frames(frames)
}

/// Brute-force span counts: every (pred, gold) span pair of every predicate
/// is compared; returns (matched, predicted, gold).
pub fn brute_force_counts(pred: &Corpus, gold: &Corpus) -> (usize, usize, usize) {
    let (mut m, mut p, mut g) = (0, 0, 0);
    for (ps, gs) in pred.iter().zip(gold.iter()) {
        let mut by_pred: BTreeMap<usize, (Vec<&Span>, Vec<&Span>)> = BTreeMap::new();
        for f in &ps.frames {
            by_pred.entry(f.predicate).or_default().0.extend(f.spans.iter());
        }
        for f in &gs.frames {
            by_pred.entry(f.predicate).or_default().1.extend(f.spans.iter());
        }
        for (pp, gg) in by_pred.values() {
            p += pp.len();
            g += gg.len();
            for a in pp {
                for b in gg {
                    if a.start == b.start && a.end == b.end && a.label == b.label {
                        m += 1;
                    }
                }
            }
        }
    }
    (m, p, g)
}

pub fn prf(m: usize, p: usize, g: usize) -> (f64, f64, f64) {
    let precision = if p == 0 { 0.0 } else { 100.0 * m as f64 / p as f64 };
    let recall = if g == 0 { 0.0 } else { 100.0 * m as f64 / g as f64 };
    let f = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    (precision, recall, f)
}

/// Double loop over all tuple pairs; roles compared after optional AM coarsening.
pub fn brute_force_shared(
    links: &BTreeSet<(usize, usize)>,
    l2: &BTreeSet<RoleTuple>,
    l1: &BTreeSet<RoleTuple>,
    am_coarse: bool,
) -> (BTreeSet<RoleTuple>, BTreeSet<RoleTuple>) {
    let mut m2 = BTreeSet::new();
    let mut m1 = BTreeSet::new();
    for a in l2 {
        for b in l1 {
            let roles_equal = a.role.normalized(am_coarse) == b.role.normalized(am_coarse);
            if roles_equal
                && links.contains(&(a.predicate - 1, b.predicate - 1))
                && links.contains(&(a.argument - 1, b.argument - 1))
            {
                m2.insert(a.clone());
                m1.insert(b.clone());
            }
        }
    }
    (m2, m1)
}

pub fn random_tuples(rng: &mut ChaCha8Rng, n: usize, count: usize) -> BTreeSet<RoleTuple> {
    (0..count)
        .map(|_| {
            RoleTuple::new(
                rng.gen_range(1..=n),
                rng.gen_range(1..=n),
                random_label(rng, &LABELS),
            )
        })
        .collect()
}

/// Independent S/B/I/E grammar check including the forced predicate tag.
pub fn grammar_valid(tags: &[PositionTag], predicate: usize) -> bool {
    let mut open: Option<&RoleLabel> = None;
    for (i, t) in tags.iter().enumerate() {
        let at_pred = i + 1 == predicate;
        if at_pred != (*t == PositionTag::Rel) {
            return false;
        }
        match (t, open) {
            (PositionTag::Arg(Position::I, l), Some(o)) if l == o => {}
            (PositionTag::Arg(Position::E, l), Some(o)) if l == o => open = None,
            (_, Some(_)) => return false,
            (PositionTag::Arg(Position::B, l), None) => open = Some(l),
            (PositionTag::Arg(Position::I, _), None) | (PositionTag::Arg(Position::E, _), None) => return false,
            _ => {}
        }
    }
    open.is_none()
}

/// Every grammar-valid sequence of `labels` of length `n` with `rel` at
/// `predicate`, visited depth-first.
pub fn enumerate_valid(labels: &[PositionTag], n: usize, predicate: usize, visit: &mut dyn FnMut(&[usize])) {
    fn go(
        labels: &[PositionTag],
        n: usize,
        predicate: usize,
        prefix: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if prefix.len() == n {
            let tags: Vec<PositionTag> = prefix.iter().map(|&i| labels[i].clone()).collect();
            if grammar_valid(&tags, predicate) {
                visit(prefix);
            }
            return;
        }
        for l in 0..labels.len() {
            let pos = prefix.len() + 1;
            if (pos == predicate) != (labels[l] == PositionTag::Rel) {
                continue;
            }
            if let Some(&prev) = prefix.last() {
                let ok = match (&labels[prev], &labels[l]) {
                    (PositionTag::Arg(Position::B | Position::I, a), PositionTag::Arg(Position::I | Position::E, b)) => {
                        a == b
                    }
                    (PositionTag::Arg(Position::B | Position::I, _), _) => false,
                    (_, PositionTag::Arg(Position::I | Position::E, _)) => false,
                    _ => true,
                };
                if !ok {
                    continue;
                }
            }
            prefix.push(l);
            go(labels, n, predicate, prefix, visit);
            prefix.pop();
        }
    }
    go(labels, n, predicate, &mut Vec::new(), visit);
}

/// Twenty sentences whose roles are each keyed by words never used
/// elsewhere, so the tagging problem is linearly separable.
pub fn toy_corpus() -> Corpus {
    let a0 = ["alice", "bob", "carol", "dave", "erin"];
    let a1 = ["apple", "book", "cake", "door", "egg"];
    let am = ["today", "here", "now", "later", "there"];
    let a2 = ["mary", "tom", "sam", "ann", "joe"];
    let preds = ["eats", "gives", "reads", "opens"];
    let mut out = Vec::new();
    for i in 0..20 {
        let id = format!("toy{:02}", i + 1);
        let (w0, w1, wm, w2, v) = (a0[i % 5], a1[(i + 1) % 5], am[(i + 2) % 5], a2[(i + 3) % 5], preds[i % 4]);
        let (forms, fr): (Vec<&str>, Frame) = match i % 4 {
            0 => (vec![w0, v, w1], frame(2, &[(1, 1, "A0"), (3, 3, "A1")])),
            1 => (vec![wm, w0, v, w1], frame(3, &[(1, 1, "AM-TMP"), (2, 2, "A0"), (4, 4, "A1")])),
            2 => (vec![w0, v, w1, "to", w2], frame(2, &[(1, 1, "A0"), (3, 3, "A1"), (4, 5, "A2")])),
            _ => (vec!["the", w0, v, "the", w1, wm], frame(3, &[(2, 2, "A0"), (5, 5, "A1"), (6, 6, "AM-TMP")])),
        };
        out.push(sentence(&id, Lang::Eng, Side::L1, &id, &forms, vec![fr]));
    }
    Corpus::new(out)
}

fn role_sentence(
    rng: &mut ChaCha8Rng,
    vocab: &str,
    id: &str,
    side: Side,
    swap_roles: bool,
) -> AnnotatedSentence {
    let w = |rng: &mut ChaCha8Rng, class: &str| format!("{}{}{}", vocab, class, rng.gen_range(0..8));
    let (a0, a1, tm, v) = (w(rng, "a"), w(rng, "o"), w(rng, "t"), w(rng, "v"));
    let (r0, r1, rt) = if swap_roles { ("A1", "A0", "A2") } else { ("A0", "A1", "AM-TMP") };
    let template = rng.gen_range(0..5);
    let (forms, fr) = match template {
        0 => (vec![a0, v, a1], frame(2, &[(1, 1, r0), (3, 3, r1)])),
        1 => (vec![tm, a0, v, a1], frame(3, &[(1, 1, rt), (2, 2, r0), (4, 4, r1)])),
        2 => (vec![a0, tm, v, a1], frame(3, &[(1, 1, r0), (2, 2, rt), (4, 4, r1)])),
        3 => (vec![a1, v], frame(2, &[(1, 1, r1)])),
        _ => (vec![v, a1, tm], frame(1, &[(2, 2, r1), (3, 3, rt)])),
    };
    let forms: Vec<&str> = forms.iter().map(String::as_str).collect();
    sentence(id, Lang::Eng, side, id, &forms, vec![fr])
}

/// Inputs for the retraining loop: a base training corpus over one
/// vocabulary, evaluation sets over a held-out vocabulary, and a 200-pair
/// pool in which 50 pairs annotate held-out words consistently on both
/// sides while the remaining 150 disagree on every role.
pub fn retrain_fixture(seed: u64) -> srlkit::pipeline::RetrainInputs {
    use rand::SeedableRng;
    use srlkit::pipeline::{EvalSets, RetrainInputs};
    use srlkit::Alignment;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let train = Corpus::new(
        (0..60)
            .map(|i| role_sentence(&mut rng, "b", &format!("train{}", i), Side::L1, false))
            .collect(),
    );
    let mut pool_l2 = Vec::new();
    let mut pool_l1 = Vec::new();
    let mut alignments = srlkit::Alignments::new();
    for i in 0..200 {
        let id = format!("pool{:03}", i);
        let good = i % 4 == 0;
        let vocab = if good { "h" } else { "n" };
        let mut l2 = role_sentence(&mut rng, vocab, &id, Side::L2, false);
        let mut l1 = l2.clone();
        if !good {
            l1.frames = relabel(&l2.frames);
        }
        l2.id = format!("{}-l2", id);
        l1.id = format!("{}-l1", id);
        l1.side = Side::L1;
        alignments.insert(id.clone(), Alignment::identity(id.as_str(), l2.len()));
        pool_l2.push(l2);
        pool_l1.push(l1);
    }
    let eval = |rng: &mut ChaCha8Rng, prefix: &str, side: Side, n: usize| {
        Corpus::new(
            (0..n)
                .map(|i| role_sentence(rng, "h", &format!("{}{}", prefix, i), side, false))
                .collect(),
        )
    };
    let mut dev = eval(&mut rng, "dev-l2-", Side::L2, 10);
    dev.sentences.extend(eval(&mut rng, "dev-l1-", Side::L1, 10).sentences);
    RetrainInputs {
        train,
        pool_l2: Corpus::new(pool_l2),
        pool_l1: Corpus::new(pool_l1),
        alignments: Some(alignments),
        eval: EvalSets {
            dev,
            test_l2: eval(&mut rng, "test-l2-", Side::L2, 40),
            test_l1: eval(&mut rng, "test-l1-", Side::L1, 40),
        },
    }
}

fn relabel(frames: &[Frame]) -> Vec<Frame> {
    frames
        .iter()
        .map(|f| {
            let spans = f
                .spans
                .iter()
                .map(|s| {
                    let l = match s.label.to_string().as_str() {
                        "A0" => "A1",
                        "A1" => "A0",
                        _ => "A2",
                    };
                    span(s.start, s.end, l)
                })
                .collect();
            Frame::new(f.predicate, spans).unwrap()
        })
        .collect()
}
