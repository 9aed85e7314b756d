mod common;

use srlkit::pipeline::{run_retrain, ExtendWith, NoArtifacts, PoolAnnotations, RetrainParams};
use srlkit::tagger::model_to_string;

fn imported() -> RetrainParams {
    RetrainParams {
        pool_annotations: PoolAnnotations::Imported,
        ..RetrainParams::default()
    }
}

#[test]
fn retraining_is_deterministic() {
    let inputs = common::retrain_fixture(3);
    let a = run_retrain(&inputs, &imported(), &mut NoArtifacts).unwrap();
    let b = run_retrain(&inputs, &imported(), &mut NoArtifacts).unwrap();
    assert_eq!(a.report, b.report);
    assert_eq!(model_to_string(&a.retrained_model), model_to_string(&b.retrained_model));
}

#[test]
fn extension_follows_extend_with() {
    let inputs = common::retrain_fixture(5);
    for (mode, per_pair) in [(ExtendWith::L1, 1), (ExtendWith::L2, 1), (ExtendWith::Both, 2)] {
        let params = RetrainParams {
            extend_with: mode,
            ..imported()
        };
        let out = run_retrain(&inputs, &params, &mut NoArtifacts).unwrap();
        assert_eq!(out.extension.len(), per_pair * out.selection.selected.len(), "{}", mode);
        assert_eq!(out.report.selection.extension_sentences, out.extension.len());
    }
}

#[test]
fn report_deltas_are_retrained_minus_baseline() {
    let out = run_retrain(&common::retrain_fixture(9), &imported(), &mut NoArtifacts).unwrap();
    let r = &out.report;
    assert_eq!(r.deltas["test_l2"].f1, r.retrained.test_l2.f1() - r.baseline.test_l2.f1());
    assert_eq!(r.deltas["dev"].f1, r.retrained.dev.f1() - r.baseline.dev.f1());
    assert!(r.render_tsv().starts_with("metric\tgroup\tvalue\n"));
}
