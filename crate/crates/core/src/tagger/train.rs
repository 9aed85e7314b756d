use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{extract_features, label_set, TaggerModel};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::model::tags_from_spans;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrainConfig {
    pub epochs: usize,
    /// Seeds the per-epoch shuffle.
    pub seed: u64,
    pub averaged: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 10,
            seed: 1,
            averaged: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        Ok(())
    }
}

struct Sequence {
    predicate: usize,
    features: Vec<Vec<usize>>,
    gold: Vec<usize>,
}

/// Averaged structured perceptron over one sequence per (sentence, predicate).
pub fn train(corpus: &Corpus, config: &TrainConfig) -> Result<TaggerModel> {
    config.validate()?;
    let roles: Vec<_> = corpus
        .iter()
        .flat_map(|s| s.frames.iter().flat_map(|f| f.spans.iter().map(|sp| &sp.label)))
        .collect();
    let mut model = TaggerModel::zero(label_set(roles));

    let mut sequences = Vec::new();
    for s in corpus {
        for frame in &s.frames {
            let tags = tags_from_spans(frame, s.len())?;
            let gold = tags
                .iter()
                .map(|t| model.label_index(t).expect("label set covers training tags"))
                .collect();
            let features = (1..=s.len())
                .map(|t| {
                    extract_features(s, frame.predicate, t)
                        .names()
                        .iter()
                        .map(|n| model.intern(n))
                        .collect()
                })
                .collect();
            sequences.push(Sequence {
                predicate: frame.predicate,
                features,
                gold,
            });
        }
    }
    if sequences.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    // Daumé-style averaging: totals accumulate step × update.
    let mut em_total = vec![0.0; model.emission.len()];
    let mut tr_total = vec![0.0; model.transition.len()];
    let n = model.labels.len();
    let mut step = 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..sequences.len()).collect();

    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let seq = &sequences[i];
            let predicted = model.decode_ids(&seq.features, seq.predicate);
            if predicted != seq.gold {
                for t in 0..seq.gold.len() {
                    let (g, p) = (seq.gold[t], predicted[t]);
                    if g != p {
                        for &f in &seq.features[t] {
                            *model.emission_mut(f, g) += 1.0;
                            *model.emission_mut(f, p) -= 1.0;
                            em_total[f * n + g] += step;
                            em_total[f * n + p] -= step;
                        }
                    }
                    let gp = t.checked_sub(1).map(|u| seq.gold[u]);
                    let pp = t.checked_sub(1).map(|u| predicted[u]);
                    if (gp, g) != (pp, p) {
                        *model.transition_mut(gp, g) += 1.0;
                        *model.transition_mut(pp, p) -= 1.0;
                        tr_total[gp.unwrap_or(n) * n + g] += step;
                        tr_total[pp.unwrap_or(n) * n + p] -= step;
                    }
                }
            }
            step += 1.0;
        }
    }

    if config.averaged {
        for (w, u) in model.emission.iter_mut().zip(&em_total) {
            *w -= u / step;
        }
        for (w, u) in model.transition.iter_mut().zip(&tr_total) {
            *w -= u / step;
        }
    }
    Ok(model)
}
