//! The selection-and-retraining loop.
//!
//! 1. train a baseline tagger on the base training corpus;
//! 2. tag the pool's L2 and L1 sides at their predicate positions (or keep
//!    imported annotations);
//! 3. pair the pool, compute tuple recalls and select at threshold `p`;
//! 4. extend the training corpus with the selected pairs' sentences
//!    (L1 side by default);
//! 5. retrain;
//! 6. evaluate both models on dev, test-L2 and test-L1.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::agreement::{
    heuristic_alignments, select_pairs, selected_side, selection_report_tsv, MatchOptions, Selection,
    SelectionConfig,
};
use crate::corpus::{
    corpus_to_string, pair_corpora, read_corpus, read_alignments, read_split, write_alignments,
    Alignments, Corpus, SentencePair, SplitAssignment, SplitName,
};
use crate::error::{Error, Result};
use crate::eval::{fmt2, score, ScoreOptions, ScoreReport};
use crate::model::Side;
use crate::tagger::{model_to_string, tag_corpus, train, TaggerModel, TrainConfig};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExtendWith {
    #[default]
    L1,
    L2,
    Both,
}

impl FromStr for ExtendWith {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "l1" => Ok(ExtendWith::L1),
            "l2" => Ok(ExtendWith::L2),
            "both" => Ok(ExtendWith::Both),
            _ => Err(format!("extend_with must be l1, l2 or both, got `{}`", s)),
        }
    }
}

impl fmt::Display for ExtendWith {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtendWith::L1 => "l1",
            ExtendWith::L2 => "l2",
            ExtendWith::Both => "both",
        })
    }
}

/// Where the pool's SRL annotations come from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PoolAnnotations {
    /// Tag the pool with the baseline model.
    #[default]
    Tag,
    /// Use the frames already present in the pool files.
    Imported,
}

impl FromStr for PoolAnnotations {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "tag" => Ok(PoolAnnotations::Tag),
            "imported" => Ok(PoolAnnotations::Imported),
            _ => Err(format!("pool_annotations must be tag or imported, got `{}`", s)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AlignSource {
    File(PathBuf),
    Heuristic,
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct RetrainParams {
    pub selection: SelectionConfig,
    pub train: TrainConfig,
    pub score: ScoreOptions,
    pub matching: MatchOptions,
    pub extend_with: ExtendWith,
    pub pool_annotations: PoolAnnotations,
}

/// Settings of the `retrain` command, read from a flat `key = value` file.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub train: PathBuf,
    pub pool_l2: PathBuf,
    pub pool_l1: PathBuf,
    pub alignments: AlignSource,
    pub eval_l2: PathBuf,
    pub eval_l1: PathBuf,
    pub splits: PathBuf,
    pub report_dir: PathBuf,
    pub params: RetrainParams,
}

const CONFIG_KEYS: [&str; 16] = [
    "train",
    "pool_l2",
    "pool_l1",
    "alignments",
    "eval_l2",
    "eval_l1",
    "splits",
    "report_dir",
    "p",
    "epochs",
    "seed",
    "averaged",
    "am_coarse",
    "extend_with",
    "pool_annotations",
    "match_am_coarse",
];

impl PipelineConfig {
    /// Parses config text; relative paths are resolved against `base`.
    /// Blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let invalid = |msg: String| Error::InvalidConfig(msg);
        let mut values: BTreeMap<&str, &str> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("line {}: expected key=value", i + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !CONFIG_KEYS.contains(&k) {
                return Err(invalid(format!("line {}: unknown key `{}`", i + 1, k)));
            }
            if values.insert(k, v).is_some() {
                return Err(invalid(format!("line {}: key `{}` given twice", i + 1, k)));
            }
        }
        let path = |key: &str| -> Result<PathBuf> {
            let v = values
                .get(key)
                .ok_or_else(|| invalid(format!("missing required key `{}`", key)))?;
            Ok(base.join(v))
        };
        fn parsed<T: FromStr>(values: &BTreeMap<&str, &str>, key: &str, default: T) -> Result<T>
        where
            T::Err: fmt::Display,
        {
            match values.get(key) {
                None => Ok(default),
                Some(v) => v
                    .parse()
                    .map_err(|e| Error::InvalidConfig(format!("bad value for `{}`: {}", key, e))),
            }
        }

        let alignments = match values.get("alignments") {
            None | Some(&"heuristic") => AlignSource::Heuristic,
            Some(p) => AlignSource::File(base.join(p)),
        };
        let train_cfg = TrainConfig {
            epochs: parsed(&values, "epochs", TrainConfig::default().epochs)?,
            seed: parsed(&values, "seed", TrainConfig::default().seed)?,
            averaged: parsed(&values, "averaged", true)?,
        };
        train_cfg.validate()?;
        let am_coarse = parsed(&values, "am_coarse", false)?;
        let params = RetrainParams {
            selection: SelectionConfig::new(parsed(&values, "p", SelectionConfig::DEFAULT_THRESHOLD)?)?,
            train: train_cfg,
            score: ScoreOptions { am_coarse },
            matching: MatchOptions {
                am_coarse: parsed(&values, "match_am_coarse", true)? || am_coarse,
            },
            extend_with: parsed(&values, "extend_with", ExtendWith::default())?,
            pool_annotations: parsed(&values, "pool_annotations", PoolAnnotations::default())?,
        };
        Ok(PipelineConfig {
            train: path("train")?,
            pool_l2: path("pool_l2")?,
            pool_l1: path("pool_l1")?,
            alignments,
            eval_l2: path("eval_l2")?,
            eval_l1: path("eval_l1")?,
            splits: path("splits")?,
            report_dir: path("report_dir")?,
            params,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        PipelineConfig::parse(&text, base)
    }

    /// Every input path must exist before the run starts.
    pub fn check_paths(&self) -> Result<()> {
        let mut paths = vec![
            &self.train,
            &self.pool_l2,
            &self.pool_l1,
            &self.eval_l2,
            &self.eval_l1,
            &self.splits,
        ];
        if let AlignSource::File(p) = &self.alignments {
            paths.push(p);
        }
        for p in paths {
            if !p.exists() {
                return Err(Error::InvalidConfig(format!("{} does not exist", p.display())));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalSets {
    pub dev: Corpus,
    pub test_l2: Corpus,
    pub test_l1: Corpus,
}

impl EvalSets {
    /// Distributes evaluation sentences according to a split file.
    pub fn from_assignment(eval_l2: &Corpus, eval_l1: &Corpus, assignment: &SplitAssignment) -> Result<Self> {
        let mut sets = EvalSets {
            dev: Corpus::default(),
            test_l2: Corpus::default(),
            test_l1: Corpus::default(),
        };
        let mut used = 0;
        for s in eval_l2.iter().chain(eval_l1) {
            let name = assignment
                .get(&s.id)
                .ok_or_else(|| Error::MissingMetadata(format!("sentence `{}` has no split", s.id)))?;
            used += 1;
            let target = match (name, s.side) {
                (SplitName::Dev, _) => &mut sets.dev,
                (SplitName::TestL2, Side::L2) => &mut sets.test_l2,
                (SplitName::TestL1, Side::L1) => &mut sets.test_l1,
                (n, side) => {
                    return Err(Error::MismatchedCorpora(format!(
                        "sentence `{}` is {} but assigned to {}",
                        s.id, side, n
                    )))
                }
            };
            target.sentences.push(s.clone());
        }
        if used != assignment.len() {
            let known: std::collections::HashSet<&str> =
                eval_l2.iter().chain(eval_l1).map(|s| s.id.as_str()).collect();
            let missing = assignment
                .keys()
                .find(|k| !known.contains(k.as_str()))
                .cloned()
                .unwrap_or_default();
            return Err(Error::MissingMetadata(format!(
                "split file names unknown sentence `{}`",
                missing
            )));
        }
        Ok(sets)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitScores {
    pub dev: ScoreReport,
    pub test_l2: ScoreReport,
    pub test_l1: ScoreReport,
}

impl SplitScores {
    fn iter(&self) -> [(&'static str, &ScoreReport); 3] {
        [("dev", &self.dev), ("test_l2", &self.test_l2), ("test_l1", &self.test_l1)]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelectionSummary {
    pub threshold: f64,
    pub pool: usize,
    pub selected: usize,
    pub ratio: f64,
    pub extension_sentences: usize,
    pub extend_with: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitDelta {
    pub f1: f64,
    pub per_role: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RetrainReport {
    pub baseline: SplitScores,
    pub selection: SelectionSummary,
    pub retrained: SplitScores,
    /// Retrained minus baseline F, per split.
    pub deltas: BTreeMap<String, SplitDelta>,
}

impl RetrainReport {
    fn build(baseline: SplitScores, selection: SelectionSummary, retrained: SplitScores) -> Self {
        let mut deltas = BTreeMap::new();
        for ((name, b), (_, r)) in baseline.iter().into_iter().zip(retrained.iter()) {
            let roles: std::collections::BTreeSet<&String> =
                b.per_role.keys().chain(r.per_role.keys()).collect();
            let per_role = roles
                .into_iter()
                .map(|role| {
                    let f = |rep: &ScoreReport| rep.per_role.get(role).map_or(0.0, |s| s.f1);
                    (role.clone(), f(r) - f(b))
                })
                .collect();
            deltas.insert(
                name.to_owned(),
                SplitDelta {
                    f1: r.f1() - b.f1(),
                    per_role,
                },
            );
        }
        RetrainReport {
            baseline,
            selection,
            retrained,
            deltas,
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let s = &self.selection;
        let _ = writeln!(
            out,
            "selection: p={} pool={} selected={} ({:.2}%) extension={} sentences ({})",
            s.threshold,
            s.pool,
            s.selected,
            100.0 * s.ratio,
            s.extension_sentences,
            s.extend_with
        );
        let _ = writeln!(
            out,
            "{:<10}{:>10}{:>10}{:>10}{:>10}{:>10}{:>10}{:>9}",
            "split", "base P", "base R", "base F", "re P", "re R", "re F", "dF"
        );
        for ((name, b), (_, r)) in self.baseline.iter().into_iter().zip(self.retrained.iter()) {
            let _ = writeln!(
                out,
                "{:<10}{:>10}{:>10}{:>10}{:>10}{:>10}{:>10}{:>9}",
                name,
                fmt2(b.precision()),
                fmt2(b.recall()),
                fmt2(b.f1()),
                fmt2(r.precision()),
                fmt2(r.recall()),
                fmt2(r.f1()),
                fmt2(self.deltas[name].f1)
            );
        }
        out
    }

    /// `metric<TAB>group<TAB>value` rows; group is the split name.
    pub fn render_tsv(&self) -> String {
        let mut out = String::from("metric\tgroup\tvalue\n");
        let s = &self.selection;
        let _ = writeln!(out, "pool\tselection\t{}", s.pool);
        let _ = writeln!(out, "selected\tselection\t{}", s.selected);
        let _ = writeln!(out, "ratio\tselection\t{:.4}", s.ratio);
        let _ = writeln!(out, "extension\tselection\t{}", s.extension_sentences);
        for ((name, b), (_, r)) in self.baseline.iter().into_iter().zip(self.retrained.iter()) {
            for (prefix, rep) in [("baseline", b), ("retrained", r)] {
                let _ = writeln!(out, "{}.P\t{}\t{}", prefix, name, fmt2(rep.precision()));
                let _ = writeln!(out, "{}.R\t{}\t{}", prefix, name, fmt2(rep.recall()));
                let _ = writeln!(out, "{}.F\t{}\t{}", prefix, name, fmt2(rep.f1()));
            }
            let d = &self.deltas[name];
            let _ = writeln!(out, "dF\t{}\t{}", name, fmt2(d.f1));
            for (role, v) in &d.per_role {
                let _ = writeln!(out, "dF[{}]\t{}\t{}", role, name, fmt2(*v));
            }
        }
        out
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug)]
pub struct RetrainInputs {
    pub train: Corpus,
    pub pool_l2: Corpus,
    pub pool_l1: Corpus,
    /// `None` aligns the pool heuristically.
    pub alignments: Option<Alignments>,
    pub eval: EvalSets,
}

#[derive(Clone, Debug)]
pub struct RetrainOutcome {
    pub report: RetrainReport,
    pub baseline_model: TaggerModel,
    pub retrained_model: TaggerModel,
    pub pairs: Vec<SentencePair>,
    pub selection: Selection,
    pub extension: Corpus,
}

/// Pipeline stages, in order. Each names the directory its artifacts go to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Baseline,
    Pool,
    Select,
    Extend,
    Retrain,
    Evaluate,
}

impl Stage {
    pub fn dir_name(self) -> &'static str {
        match self {
            Stage::Baseline => "01-baseline",
            Stage::Pool => "02-pool",
            Stage::Select => "03-select",
            Stage::Extend => "04-extend",
            Stage::Retrain => "05-retrain",
            Stage::Evaluate => "06-evaluate",
        }
    }
}

/// Receives each stage's artifacts as `(file name, contents)` pairs.
pub trait ArtifactSink {
    fn stage(&mut self, stage: Stage, files: Vec<(&'static str, String)>) -> Result<()>;
}

/// Discards artifacts.
pub struct NoArtifacts;

impl ArtifactSink for NoArtifacts {
    fn stage(&mut self, _: Stage, _: Vec<(&'static str, String)>) -> Result<()> {
        Ok(())
    }
}

/// Writes each stage's artifacts to `<root>/<stage dir>/`.
pub struct DirArtifacts {
    pub root: PathBuf,
}

impl ArtifactSink for DirArtifacts {
    fn stage(&mut self, stage: Stage, files: Vec<(&'static str, String)>) -> Result<()> {
        let dir = self.root.join(stage.dir_name());
        fs::create_dir_all(&dir)?;
        for (name, contents) in files {
            fs::write(dir.join(name), contents)?;
        }
        Ok(())
    }
}

fn evaluate(model: &TaggerModel, eval: &EvalSets, options: ScoreOptions) -> Result<SplitScores> {
    let run = |gold: &Corpus| -> Result<ScoreReport> { score(&tag_corpus(model, gold)?, gold, options) };
    Ok(SplitScores {
        dev: run(&eval.dev)?,
        test_l2: run(&eval.test_l2)?,
        test_l1: run(&eval.test_l1)?,
    })
}

pub fn run_retrain(
    inputs: &RetrainInputs,
    params: &RetrainParams,
    sink: &mut dyn ArtifactSink,
) -> Result<RetrainOutcome> {
    let baseline_model = train(&inputs.train, &params.train)?;
    sink.stage(Stage::Baseline, vec![("baseline.model", model_to_string(&baseline_model))])?;

    let (pool_l2, pool_l1) = match params.pool_annotations {
        PoolAnnotations::Tag => (
            tag_corpus(&baseline_model, &inputs.pool_l2)?,
            tag_corpus(&baseline_model, &inputs.pool_l1)?,
        ),
        PoolAnnotations::Imported => (inputs.pool_l2.clone(), inputs.pool_l1.clone()),
    };
    sink.stage(
        Stage::Pool,
        vec![
            ("pool_l2.conll", corpus_to_string(&pool_l2)?),
            ("pool_l1.conll", corpus_to_string(&pool_l1)?),
        ],
    )?;

    let alignments = match &inputs.alignments {
        Some(a) => a.clone(),
        None => heuristic_alignments(&pool_l2, &pool_l1),
    };
    let pairs = pair_corpora(&pool_l2, &pool_l1, &alignments)?;
    let selection = select_pairs(&pairs, params.selection, params.matching);
    let mut align_text = Vec::new();
    write_alignments(pairs.iter().map(|p| &p.alignment), &mut align_text)?;
    sink.stage(
        Stage::Select,
        vec![
            ("selection.tsv", selection_report_tsv(&pairs, &selection)),
            ("alignments.txt", String::from_utf8(align_text).expect("ASCII alignment text")),
        ],
    )?;

    let mut extension = Corpus::default();
    if matches!(params.extend_with, ExtendWith::L2 | ExtendWith::Both) {
        extension.sentences.extend(selected_side(&pairs, &selection, Side::L2).sentences);
    }
    if matches!(params.extend_with, ExtendWith::L1 | ExtendWith::Both) {
        extension.sentences.extend(selected_side(&pairs, &selection, Side::L1).sentences);
    }
    sink.stage(Stage::Extend, vec![("extension.conll", corpus_to_string(&extension)?)])?;

    let mut extended = inputs.train.clone();
    extended.sentences.extend(extension.sentences.iter().cloned());
    let retrained_model = train(&extended, &params.train)?;
    sink.stage(Stage::Retrain, vec![("retrained.model", model_to_string(&retrained_model))])?;

    let baseline = evaluate(&baseline_model, &inputs.eval, params.score)?;
    let retrained = evaluate(&retrained_model, &inputs.eval, params.score)?;
    let summary = SelectionSummary {
        threshold: params.selection.threshold(),
        pool: selection.stats.pool,
        selected: selection.stats.selected,
        ratio: selection.stats.ratio,
        extension_sentences: extension.len(),
        extend_with: params.extend_with.to_string(),
    };
    let report = RetrainReport::build(baseline, summary, retrained);
    sink.stage(
        Stage::Evaluate,
        vec![
            ("report.txt", report.render_text()),
            ("report.tsv", report.render_tsv()),
            ("report.json", report.render_json()),
        ],
    )?;

    Ok(RetrainOutcome {
        report,
        baseline_model,
        retrained_model,
        pairs,
        selection,
        extension,
    })
}

fn read_corpus_file(path: &Path) -> Result<Corpus> {
    read_corpus(fs::File::open(path)?)
}

/// Loads every input named by `config` and runs the loop, writing stage
/// artifacts under `config.report_dir`.
pub fn retrain(config: &PipelineConfig) -> Result<RetrainOutcome> {
    config.check_paths()?;
    let eval_l2 = read_corpus_file(&config.eval_l2)?;
    let eval_l1 = read_corpus_file(&config.eval_l1)?;
    let assignment = read_split(fs::File::open(&config.splits)?)?;
    let inputs = RetrainInputs {
        train: read_corpus_file(&config.train)?,
        pool_l2: read_corpus_file(&config.pool_l2)?,
        pool_l1: read_corpus_file(&config.pool_l1)?,
        alignments: match &config.alignments {
            AlignSource::File(p) => Some(read_alignments(fs::File::open(p)?)?),
            AlignSource::Heuristic => None,
        },
        eval: EvalSets::from_assignment(&eval_l2, &eval_l1, &assignment)?,
    };
    let mut sink = DirArtifacts {
        root: config.report_dir.clone(),
    };
    run_retrain(&inputs, &config.params, &mut sink)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CONFIG: &str = "# retraining run\n\
train = data/train.conll\n\
pool_l2 = pool/l2.conll\n\
pool_l1 = pool/l1.conll\n\
eval_l2 = eval/l2.conll\n\
eval_l1 = eval/l1.conll\n\
splits = eval/splits.tsv\n\
report_dir = out\n\
p = 0.8\n\
epochs = 3\n";

    #[test]
    fn parses_config() {
        let cfg = PipelineConfig::parse(CONFIG, Path::new("/base")).unwrap();
        assert_eq!(cfg.train, Path::new("/base/data/train.conll"));
        assert_eq!(cfg.alignments, AlignSource::Heuristic);
        assert_eq!(cfg.params.selection.threshold(), 0.8);
        assert_eq!(cfg.params.train.epochs, 3);
        assert_eq!(cfg.params.train.seed, 1);
        assert_eq!(cfg.params.extend_with, ExtendWith::L1);
        assert!(cfg.params.matching.am_coarse);
        assert!(!cfg.params.score.am_coarse);
    }

    #[test]
    fn rejects_bad_configs() {
        let unknown = format!("{}colour = blue\n", CONFIG);
        assert!(matches!(
            PipelineConfig::parse(&unknown, Path::new(".")),
            Err(Error::InvalidConfig(m)) if m.contains("colour")
        ));
        let missing = CONFIG.replace("splits = eval/splits.tsv\n", "");
        assert!(PipelineConfig::parse(&missing, Path::new(".")).is_err());
        for bad in ["p = 1.5", "epochs = 0", "extend_with = all", "p = x"] {
            let text = format!("{}{}\n", CONFIG.replace("p = 0.8\n", "").replace("epochs = 3\n", ""), bad);
            assert!(PipelineConfig::parse(&text, Path::new(".")).is_err(), "{}", bad);
        }
        let twice = format!("{}p = 0.5\n", CONFIG);
        assert!(PipelineConfig::parse(&twice, Path::new(".")).is_err());
    }

    #[test]
    fn missing_paths_are_reported() {
        let cfg = PipelineConfig::parse(CONFIG, Path::new("/nonexistent")).unwrap();
        assert!(matches!(cfg.check_paths(), Err(Error::InvalidConfig(_))));
    }
}
