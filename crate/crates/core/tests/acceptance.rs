//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use srlkit::agreement::{extract_tuples, recall_pair, select, shared_tuples, MatchOptions, SelectionConfig};
use srlkit::corpus::{
    corpus_to_string, parse_alignments, parse_corpus, read_corpus, split_dataset, write_alignments, ReadOptions,
    SplitSpec,
};
use srlkit::eval::{apply_oracle, confusion_matrix, fmt2, oracle_sequence, score, score_grouped, GroupBy, OracleKind, ScoreOptions};
use srlkit::pipeline::{run_retrain, NoArtifacts, PoolAnnotations, RetrainParams};
use srlkit::tagger::{label_set, load_model, model_to_string, tag_corpus, train, TaggerModel, TrainConfig};
use srlkit::{Alignment, AnnotatedSentence, Corpus, Error, Frame, Lang, SentencePair, Side};

use common::*;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> Result<(), String> {
    check(elapsed < Duration::from_secs(limit_secs), || {
        format!("took {:.2} s, limit {} s", elapsed.as_secs_f64(), limit_secs)
    })
}

fn scorer_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..500 {
        let n = rng.gen_range(1..=5);
        let gold: Corpus = (0..n)
            .map(|i| random_sentence(&mut rng, &format!("s{}", i), Side::L1, 8))
            .collect();
        let pred: Corpus = gold.iter().map(|s| reannotate(&mut rng, s)).collect();
        let report = score(&pred, &gold, ScoreOptions::default()).map_err(|e| e.to_string())?;
        let (m, p, g) = brute_force_counts(&pred, &gold);
        let (bp, br, bf) = prf(m, p, g);
        check(
            (report.matched(), report.predicted(), report.gold()) == (m, p, g)
                && report.precision() == bp
                && report.recall() == br
                && report.f1() == bf,
            || format!("case {}: scorer {:?} vs brute force {:?}", case, report.overall.counts, (m, p, g)),
        )?;
    }
    within(start.elapsed(), 10)?;
    Ok(format!("500 corpora, {:.2} s", start.elapsed().as_secs_f64()))
}

/// `groups` sentences of 101 tokens, predicate first and 100 single-token
/// arguments each, of which `matched` in total carry the gold label.
fn delta_group(lang: Lang, side: Side, matched: usize, total: usize) -> (Vec<AnnotatedSentence>, Vec<AnnotatedSentence>) {
    let per = 100;
    let forms: Vec<String> = (0..=per).map(|i| format!("t{}", i)).collect();
    let mut gold = Vec::new();
    let mut pred = Vec::new();
    let mut left = matched;
    for k in 0..total / per {
        let id = format!("{}-{}-{}", lang, side, k);
        let base = AnnotatedSentence::from_forms(&id, lang, side, &id, &forms);
        let g: Vec<_> = (2..=per + 1).map(|t| span(t, t, "A0")).collect();
        let p: Vec<_> = (2..=per + 1)
            .map(|t| {
                if left > 0 {
                    left -= 1;
                    span(t, t, "A0")
                } else {
                    span(t, t, "A1")
                }
            })
            .collect();
        gold.push(base.with_frames(vec![Frame::new(1, g).unwrap()]));
        pred.push(base.with_frames(vec![Frame::new(1, p).unwrap()]));
    }
    (pred, gold)
}

fn delta_anchor() -> Outcome {
    let mut rendered = Vec::new();
    for (l1_hits, l2_hits, want_l1, want_l2, want) in [
        (7381, 6920, "73.81", "69.20", "-4.61"),
        (7412, 6871, "74.12", "68.71", "-5.41"),
    ] {
        let (mut pred, mut gold) = delta_group(Lang::Eng, Side::L1, l1_hits, 10_000);
        let (p2, g2) = delta_group(Lang::Eng, Side::L2, l2_hits, 10_000);
        pred.extend(p2);
        gold.extend(g2);
        let report = score_grouped(&Corpus::new(pred), &Corpus::new(gold), GroupBy::LangSide, ScoreOptions::default())
            .map_err(|e| e.to_string())?;
        let groups = report.groups.as_ref().ok_or("no groups")?;
        let f_l1 = fmt2(groups["ENG-L1"].f1());
        let f_l2 = fmt2(groups["ENG-L2"].f1());
        let d = fmt2(report.delta_f.as_ref().ok_or("no delta")?["ENG"]);
        check(f_l1 == want_l1 && f_l2 == want_l2 && d == want, || {
            format!("F(L1)={} F(L2)={} dF={}, expected {} {} {}", f_l1, f_l2, d, want_l1, want_l2, want)
        })?;
        rendered.push(d);
    }
    Ok(format!("dF = {} and {}", rendered[0], rendered[1]))
}

fn overlapping(f: &Frame) -> bool {
    f.spans
        .iter()
        .enumerate()
        .any(|(i, a)| f.spans[i + 1..].iter().any(|b| a.overlaps(b)) || a.contains(f.predicate))
}

fn oracle_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for case in 0..200 {
        let n = rng.gen_range(2..=12);
        let p = rng.gen_range(1..=n);
        let gold = random_frame(&mut rng, n, p, &LABELS);
        let pred = random_frame(&mut rng, n, p, &LABELS);
        let mut current = pred.clone();
        for kind in OracleKind::SEQUENCE {
            current = apply_oracle(&current, &gold, kind);
            check(!overlapping(&current), || format!("case {}: {} created an overlap", case, kind))?;
        }
        let forms: Vec<String> = (0..n).map(|i| format!("t{}", i)).collect();
        let s = AnnotatedSentence::from_forms("s", Lang::Eng, Side::L1, "s", &forms);
        let report = oracle_sequence(
            &Corpus::new(vec![s.with_frames(vec![pred])]),
            &Corpus::new(vec![s.with_frames(vec![gold])]),
            ScoreOptions::default(),
        )
        .map_err(|e| e.to_string())?;
        let mut prev = report.initial.f1();
        for stage in &report.stages {
            check(stage.report.f1() >= prev, || {
                format!("case {}: F fell from {} to {} at {}", case, prev, stage.report.f1(), stage.kind)
            })?;
            prev = stage.report.f1();
        }
        let last = report.stages.last().map(|s| &s.report).ok_or("no stages")?;
        // A gold frame without spans scores 0 by convention; check exactness instead.
        let exact = last.matched() == last.gold() && last.predicted() == last.gold();
        check(exact && (last.gold() == 0 || fmt2(last.f1()) == "100.00"), || {
            format!("case {}: terminal F {}", case, fmt2(last.f1()))
        })?;
    }
    within(start.elapsed(), 10)?;
    Ok(format!("200 frame pairs, {:.2} s", start.elapsed().as_secs_f64()))
}

fn confusion_counting() -> Outcome {
    // Tokens 1..6, predicate 4.
    // gold (1,1,A0) vs pred (1,1,A1): boundaries match      -> (A0, A1)
    // gold (2,3,A1) vs pred (2,2,A1): overlap, no match     -> nothing
    // pred (5,5,AM) overlaps no gold span                   -> (O, AM)
    // gold (6,6,A2) overlaps no predicted span              -> (A2, O)
    let forms = ["a", "b", "c", "v", "d", "e"];
    let gold = sentence("c", Lang::Eng, Side::L1, "c", &forms, vec![frame(4, &[(1, 1, "A0"), (2, 3, "A1"), (6, 6, "A2")])]);
    let pred = gold.with_frames(vec![frame(4, &[(1, 1, "A1"), (2, 2, "A1"), (5, 5, "AM")])]);
    let m = confusion_matrix(&Corpus::new(vec![pred]), &Corpus::new(vec![gold]), ScoreOptions::default())
        .map_err(|e| e.to_string())?;
    let expected: Vec<((String, String), usize)> = vec![
        (("A0".into(), "A1".into()), 1),
        (("A2".into(), "O".into()), 1),
        (("O".into(), "AM".into()), 1),
    ];
    let got: Vec<((String, String), usize)> = m.counts.clone().into_iter().collect();
    check(got == expected, || format!("matrix {:?}", got))?;
    check(m.get("A1", "A1") == 0 && m.get("A1", "O") == 0 && m.get("O", "A1") == 0, || {
        "overlap event was counted".into()
    })?;
    Ok("3 events counted, overlap ignored".into())
}

fn agreement_metric() -> Outcome {
    let opts = MatchOptions::default();
    // (a) identical pair, identity alignment.
    let s = sentence("x", Lang::Eng, Side::L2, "x", &["he", "eats", "rice", "now"], vec![frame(2, &[(1, 1, "A0"), (3, 4, "A1")])]);
    let mut l1 = s.clone();
    l1.side = Side::L1;
    let pair = SentencePair {
        alignment: Alignment::identity("x", 4),
        l2: s,
        l1,
    };
    let r = recall_pair(&pair, opts);
    check(r.eligible && r.l2_recall == 1.0 && r.l1_recall == 1.0, || format!("identity pair {:?}", r))?;

    // (b) worked example.
    let l2 = sentence("w", Lang::Eng, Side::L2, "w", &["a", "p", "b"], vec![frame(2, &[(1, 1, "A0"), (3, 3, "A1")])]);
    let l1 = sentence("w", Lang::Eng, Side::L1, "w", &["a", "x", "p", "b", "c"], vec![frame(3, &[(1, 1, "A0"), (4, 4, "A1"), (5, 5, "AM")])]);
    let worked = SentencePair {
        alignment: Alignment::new("w", [(1, 2), (0, 0), (2, 3)]),
        l2,
        l1,
    };
    let r = recall_pair(&worked, opts);
    let (m2, m1) = brute_force_shared(
        &worked.alignment.links,
        &extract_tuples(&worked.l2),
        &extract_tuples(&worked.l1),
        true,
    );
    check(
        r.l2_recall == 1.0 && (r.l1_recall - 0.6667).abs() <= 0.00005 && (m2.len(), m1.len()) == (2, 2),
        || format!("worked example {:?}", r),
    )?;

    // (c) swap symmetry.
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for case in 0..200 {
        let a = random_sentence(&mut rng, "p", Side::L2, 9);
        let b = random_sentence(&mut rng, "p", Side::L1, 9);
        let links: BTreeSet<(usize, usize)> = (0..rng.gen_range(0..15))
            .map(|_| (rng.gen_range(0..a.len()), rng.gen_range(0..b.len())))
            .collect();
        let pair = SentencePair {
            alignment: Alignment::new("p", links),
            l2: a,
            l1: b,
        };
        let x = recall_pair(&pair, opts);
        let y = recall_pair(&pair.swapped(), opts);
        check(
            (x.l2_recall, x.l1_recall, x.shared_l2, x.shared_l1, x.eligible)
                == (y.l1_recall, y.l2_recall, y.shared_l1, y.shared_l2, y.eligible),
            || format!("case {}: {:?} vs swapped {:?}", case, x, y),
        )?;
    }

    // (d) recalls of exactly 0.9 on both sides are rejected at p = 0.9.
    let forms: Vec<String> = (0..11).map(|i| format!("t{}", i)).collect();
    let base = AnnotatedSentence::from_forms("b", Lang::Eng, Side::L2, "b", &forms);
    let l2 = base.with_frames(vec![frame(1, &[(2, 11, "A0")])]);
    let mut l1 = l2.clone();
    l1.side = Side::L1;
    let boundary = SentencePair {
        alignment: Alignment::new("b", (0..10).map(|i| (i, i))),
        l2,
        l1,
    };
    let r = recall_pair(&boundary, opts);
    let sel = select(&[r], SelectionConfig::new(0.9).map_err(|e| e.to_string())?);
    check(r.l2_recall == 0.9 && r.l1_recall == 0.9 && sel.selected.is_empty(), || {
        format!("boundary {:?}, selected {:?}", r, sel.selected)
    })?;
    Ok("identity, worked example, 200 swaps, strict boundary".into())
}

fn shared_tuples_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for case in 0..200 {
        let (n2, n1) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let (c2, c1) = (rng.gen_range(0..=20), rng.gen_range(0..=20));
        let l2 = random_tuples(&mut rng, n2, c2);
        let l1 = random_tuples(&mut rng, n1, c1);
        let links: BTreeSet<(usize, usize)> = (0..rng.gen_range(0..=24))
            .map(|_| (rng.gen_range(0..n2), rng.gen_range(0..n1)))
            .collect();
        let alignment = Alignment::new("r", links.iter().copied());
        for am_coarse in [true, false] {
            let got = shared_tuples(&alignment, &l2, &l1, MatchOptions { am_coarse });
            let want = brute_force_shared(&links, &l2, &l1, am_coarse);
            check(got == want, || format!("case {} (am_coarse={}): mismatch", case, am_coarse))?;
        }
    }
    Ok("200 random pairs, both AM conventions".into())
}

fn viterbi_optimality() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let roles = ["A0", "A1", "AM"];
    for case in 0..100 {
        let role = label(roles[case % 3]);
        let mut model = TaggerModel::zero(label_set([&role]));
        let labels = model.labels().to_vec();
        let n = rng.gen_range(1..=7);
        let forms = random_forms(&mut rng, n, 4);
        let s = AnnotatedSentence::from_forms("v", Lang::Eng, Side::L1, "v", &forms);
        let p = rng.gen_range(1..=n);
        // Multiples of 1/8 keep every sum exact.
        let weight = |rng: &mut ChaCha8Rng| rng.gen_range(-16..=16) as f64 / 8.0;
        for t in 1..=n {
            for name in srlkit::tagger::extract_features(&s, p, t).names() {
                for l in &labels {
                    if rng.gen_bool(0.3) {
                        let w = weight(&mut rng);
                        model.set_emission(name, l, w);
                    }
                }
            }
        }
        for prev in std::iter::once(None).chain(labels.iter().map(Some)) {
            for l in &labels {
                let w = weight(&mut rng);
                model.set_transition(prev, l, w);
            }
        }
        let decoded = model.viterbi_decode(&s, p);
        check(grammar_valid(&decoded, p), || format!("case {}: invalid decode {:?}", case, decoded))?;

        // Tables built through the public weight accessors only.
        let emission: Vec<Vec<f64>> = (1..=n)
            .map(|t| {
                let names = srlkit::tagger::extract_features(&s, p, t);
                labels
                    .iter()
                    .map(|l| names.names().iter().map(|f| model.emission_weight(f, l)).sum())
                    .collect()
            })
            .collect();
        let mut best = f64::NEG_INFINITY;
        enumerate_valid(&labels, n, p, &mut |seq| {
            let mut total = 0.0;
            for (t, &l) in seq.iter().enumerate() {
                let prev = t.checked_sub(1).map(|u| &labels[seq[u]]);
                total += emission[t][l] + model.transition_weight(prev, &labels[l]);
            }
            best = best.max(total);
        });
        let got = model.sequence_score(&s, p, &decoded);
        check(got == best, || format!("case {}: decoded score {} vs best {}", case, got, best))?;
    }
    within(start.elapsed(), 30)?;
    Ok(format!("100 models, {:.2} s", start.elapsed().as_secs_f64()))
}

fn tagger_convergence() -> Outcome {
    let corpus = toy_corpus();
    let cfg = TrainConfig::default();
    check(cfg.epochs <= 10, || "default epoch budget above 10".into())?;
    let a = train(&corpus, &cfg).map_err(|e| e.to_string())?;
    let b = train(&corpus, &cfg).map_err(|e| e.to_string())?;
    let tagged = tag_corpus(&a, &corpus).map_err(|e| e.to_string())?;
    let report = score(&tagged, &corpus, ScoreOptions::default()).map_err(|e| e.to_string())?;
    check(fmt2(report.f1()) == "100.00", || format!("training-set F = {}", fmt2(report.f1())))?;
    check(model_to_string(&a) == model_to_string(&b), || "two runs differ".into())?;
    Ok(format!("F = {} after {} epochs, runs identical", fmt2(report.f1()), cfg.epochs))
}

fn retraining_loop() -> Outcome {
    let start = Instant::now();
    let inputs = retrain_fixture(7);
    let params = RetrainParams {
        pool_annotations: PoolAnnotations::Imported,
        ..RetrainParams::default()
    };
    let out = run_retrain(&inputs, &params, &mut NoArtifacts).map_err(|e| e.to_string())?;
    let r = &out.report;
    check(r.selection.selected == 50, || format!("selected {} pairs, expected 50", r.selection.selected))?;
    for (name, b, a) in [
        ("test_l2", &r.baseline.test_l2, &r.retrained.test_l2),
        ("test_l1", &r.baseline.test_l1, &r.retrained.test_l1),
    ] {
        check(a.f1() >= b.f1(), || format!("{}: retrained F {} below baseline {}", name, fmt2(a.f1()), fmt2(b.f1())))?;
    }

    let none = RetrainParams {
        selection: SelectionConfig::new(1.0).map_err(|e| e.to_string())?,
        ..params
    };
    let empty = run_retrain(&inputs, &none, &mut NoArtifacts).map_err(|e| e.to_string())?;
    check(empty.report.selection.selected == 0, || "p = 1 selected pairs".into())?;
    check(
        model_to_string(&empty.retrained_model) == model_to_string(&empty.baseline_model),
        || "empty selection changed the model".into(),
    )?;
    within(start.elapsed(), 60)?;
    Ok(format!(
        "test_l2 F {} -> {}, test_l1 F {} -> {}, {:.2} s",
        fmt2(r.baseline.test_l2.f1()),
        fmt2(r.retrained.test_l2.f1()),
        fmt2(r.baseline.test_l1.f1()),
        fmt2(r.retrained.test_l1.f1()),
        start.elapsed().as_secs_f64()
    ))
}

const CANONICAL: &str = "# id = s1\n# lang = ENG\n# side = L2\n# pair = p1\n\
1\the\t_\tS-A0\tO\n2\teats\tY\trel\tO\n3\trice\t_\tB-A1\tS-A0\n4\tslowly\t_\tE-A1\tO\n5\tsaid\tY\tO\trel\n\
\n# id = s2\n# lang = ENG\n# side = L1\n# pair = p1\n\
1\the\t_\tO\n2\tate\tY\trel\n3\trice\t_\tS-AM-TMP\n\n";

fn io_round_trips() -> Outcome {
    let corpus = read_corpus(CANONICAL.as_bytes()).map_err(|e| e.to_string())?;
    let written = corpus_to_string(&corpus).map_err(|e| e.to_string())?;
    check(written == CANONICAL, || format!("corpus write differs:\n{}", written))?;
    check(read_corpus(written.as_bytes()).map_err(|e| e.to_string())? == corpus, || "corpus re-read differs".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let random: Corpus = (0..50).map(|i| random_sentence(&mut rng, &format!("r{}", i), Side::L1, 10)).collect();
    let text = corpus_to_string(&random).map_err(|e| e.to_string())?;
    let back = read_corpus(text.as_bytes()).map_err(|e| e.to_string())?;
    check(back == random && corpus_to_string(&back).map_err(|e| e.to_string())? == text, || {
        "random corpus round trip differs".into()
    })?;

    let align_text = "p1\t0-0 1-1 2-2 2-3\np2\t\np3\t0-1 1-0\n";
    let aligns = parse_alignments(align_text).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    write_alignments(aligns.values(), &mut out).map_err(|e| e.to_string())?;
    check(out == align_text.as_bytes(), || format!("alignment write differs: {:?}", String::from_utf8_lossy(&out)))?;
    check(parse_alignments(std::str::from_utf8(&out).unwrap()).map_err(|e| e.to_string())? == aligns, || {
        "alignment re-read differs".into()
    })?;

    let model = train(&toy_corpus(), &TrainConfig::default()).map_err(|e| e.to_string())?;
    let model_text = model_to_string(&model);
    let loaded = load_model(model_text.as_bytes()).map_err(|e| e.to_string())?;
    check(model_to_string(&loaded) == model_text, || "model write differs".into())?;
    for s in toy_corpus().iter() {
        let p = s.predicates()[0];
        check(loaded.viterbi_decode(s, p) == model.viterbi_decode(s, p), || "reloaded model decodes differently".into())?;
    }

    let crlf = CANONICAL.replacen("\n", "\r\n", 3);
    match read_corpus(crlf.as_bytes()) {
        Err(Error::Parse(e)) if e.line == 1 => {}
        other => return Err(format!("CRLF input gave {:?}", other.map(|c| c.len()))),
    }
    let bad_tag = CANONICAL.replace("3\trice\t_\tB-A1\tS-A0", "3\trice\t_\tX-A1\tS-A0");
    match read_corpus(bad_tag.as_bytes()) {
        Err(Error::Parse(e)) if e.line == 7 => {}
        other => return Err(format!("bad tag column gave {:?}", other.map(|c| c.len()))),
    }
    let bad_seq = CANONICAL.replace("4\tslowly\t_\tE-A1\tO", "4\tslowly\t_\tO\tO");
    match parse_corpus(&bad_seq, ReadOptions::default()) {
        Err(e) if e.line > 0 => {}
        other => return Err(format!("ill-formed tag sequence gave {:?}", other.map(|c| c.len()))),
    }
    Ok("corpus, alignment and model files; CRLF and bad tags rejected".into())
}

fn split_sizes() -> Outcome {
    let mut pairs = Vec::new();
    for lang in [Lang::Eng, Lang::Jpn, Lang::Rus, Lang::Ara] {
        for i in 0..150 {
            let id = format!("{}-{}", lang, i);
            let l2 = AnnotatedSentence::from_forms(format!("{}-l2", id), lang, Side::L2, &id, &["a"]);
            let l1 = AnnotatedSentence::from_forms(format!("{}-l1", id), lang, Side::L1, &id, &["a"]);
            pairs.push(SentencePair {
                alignment: Alignment::identity(id.as_str(), 1),
                l2,
                l1,
            });
        }
    }
    let split = split_dataset(&pairs, SplitSpec::default(), 1).map_err(|e| e.to_string())?;
    let sizes = (split.dev.len(), split.test_l2.len(), split.test_l1.len());
    check(sizes == (200, 400, 400), || format!("sizes {:?}", sizes))?;
    Ok("200 dev pairs, 400 L2 test, 400 L1 test".into())
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("scorer matches brute-force counter", scorer_equivalence),
        ("dF arithmetic anchor", delta_anchor),
        ("oracle transform sequence", oracle_suite),
        ("confusion-matrix counting", confusion_counting),
        ("agreement metric", agreement_metric),
        ("shared tuples match brute force", shared_tuples_equivalence),
        ("Viterbi optimality", viterbi_optimality),
        ("tagger convergence", tagger_convergence),
        ("retraining loop", retraining_loop),
        ("IO round trips", io_round_trips),
        ("split sizes", split_sizes),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {}", msg))
        });
        match result {
            Ok(detail) => println!("PASS {:>2} {}: {}", i + 1, name, detail),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {}: {}", i + 1, name, why);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
