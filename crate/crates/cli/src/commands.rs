use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use srlkit::agreement::{
    extract_tuples, heuristic_alignments, select_pairs, selected_side, selection_report_tsv, MatchOptions,
    SelectionConfig,
};
use srlkit::corpus::{
    corpus_to_string, pair_corpora, read_alignments, read_corpus, read_corpus_with, split_dataset, write_alignments,
    write_split, Alignments, ReadOptions, SplitSpec,
};
use srlkit::eval::{
    confusion_matrix, iaa_table_tsv, oracle_sequence, render_json, render_text, render_tsv, score,
    score_grouped, ReportFormat, ScoreOptions, ScoreReport,
};
use srlkit::pipeline::{retrain, PipelineConfig};
use srlkit::tagger::{load_model, model_to_string, tag_corpus, train, TrainConfig};
use srlkit::{Corpus, Result, Side};

use crate::{Command, Global};

/// Where results go: the chosen format on stdout, and every format as a
/// file when an output directory is given.
struct Sink<'a> {
    global: &'a Global,
}

impl Sink<'_> {
    fn out_dir(&self) -> Result<Option<&Path>> {
        match &self.global.out {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                Ok(Some(dir))
            }
            None => Ok(None),
        }
    }

    fn print(&self, text: &str) -> Result<()> {
        io::stdout().lock().write_all(text.as_bytes())?;
        Ok(())
    }

    /// `render` produces the report in a given format.
    fn report(&self, stem: &str, render: impl Fn(ReportFormat) -> String) -> Result<()> {
        if let Some(dir) = self.out_dir()? {
            for f in [ReportFormat::Text, ReportFormat::Tsv, ReportFormat::Json] {
                fs::write(dir.join(format!("{}.{}", stem, f.extension())), render(f))?;
            }
        }
        self.print(&render(self.global.format))
    }

    /// Writes `name` into the output directory, or to stdout without one.
    fn file(&self, name: &str, contents: &str) -> Result<()> {
        match self.out_dir()? {
            Some(dir) => {
                fs::write(dir.join(name), contents)?;
                Ok(())
            }
            None => self.print(contents),
        }
    }
}

fn open_corpus(path: &Path) -> Result<Corpus> {
    read_corpus(BufReader::new(File::open(path)?))
}

fn open_corpus_with(path: &Path, lenient: bool) -> Result<Corpus> {
    read_corpus_with(BufReader::new(File::open(path)?), ReadOptions { lenient })
}

fn alignments_for(spec: &str, l2: &Corpus, l1: &Corpus) -> Result<Alignments> {
    if spec == "heuristic" {
        Ok(heuristic_alignments(l2, l1))
    } else {
        read_alignments(BufReader::new(File::open(spec)?))
    }
}

fn score_renderer(report: &ScoreReport) -> impl Fn(ReportFormat) -> String + '_ {
    move |f| match f {
        ReportFormat::Text => render_text(report),
        ReportFormat::Tsv => render_tsv(report),
        ReportFormat::Json => render_json(report),
    }
}

pub fn run(global: &Global, command: Command) -> Result<()> {
    let sink = Sink { global };
    let options = ScoreOptions {
        am_coarse: global.am_coarse,
    };
    match command {
        Command::Score {
            pred,
            gold,
            group_by,
            lenient,
            confusion,
        } => {
            let pred = open_corpus_with(&pred, lenient)?;
            let gold = open_corpus(&gold)?;
            let report = match group_by {
                Some(by) => score_grouped(&pred, &gold, by, options)?,
                None => score(&pred, &gold, options)?,
            };
            let matrix = confusion_matrix(&pred, &gold, options)?;
            sink.report("score", score_renderer(&report))?;
            if let Some(dir) = sink.out_dir()? {
                fs::write(dir.join("confusion.tsv"), matrix.to_tsv())?;
            }
            if confusion {
                sink.print("\n")?;
                sink.print(&matrix.to_tsv())?;
            }
            Ok(())
        }
        Command::Iaa { a, b, group_by } => {
            let a = open_corpus(&a)?;
            let b = open_corpus(&b)?;
            // `a` plays the predicted side, `b` the reference.
            let report = score_grouped(&a, &b, group_by, options)?;
            sink.report("iaa", |f| match f {
                ReportFormat::Text => render_text(&report),
                ReportFormat::Tsv => iaa_table_tsv(&report),
                ReportFormat::Json => render_json(&report),
            })
        }
        Command::Oracle { pred, gold, lenient } => {
            let pred = open_corpus_with(&pred, lenient)?;
            let gold = open_corpus(&gold)?;
            let report = oracle_sequence(&pred, &gold, options)?;
            sink.report("oracle", |f| match f {
                ReportFormat::Text => report.render_text(),
                ReportFormat::Tsv => report.render_tsv(),
                ReportFormat::Json => report.render_json(),
            })
        }
        Command::Tuples { corpus } => {
            let corpus = open_corpus(&corpus)?;
            let rows: Vec<(String, usize, usize, String)> = corpus
                .iter()
                .flat_map(|s| {
                    extract_tuples(s)
                        .into_iter()
                        .map(|t| (s.id.clone(), t.predicate, t.argument, t.role.to_string()))
                })
                .collect();
            sink.report("tuples", |f| match f {
                ReportFormat::Json => {
                    let items: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|(id, p, a, r)| {
                            serde_json::json!({"sentence": id, "predicate": p, "argument": a, "role": r})
                        })
                        .collect();
                    let mut s = serde_json::to_string_pretty(&items).expect("tuples serialize");
                    s.push('\n');
                    s
                }
                _ => {
                    let mut s = String::from("sentence\tpredicate\targument\trole\n");
                    for (id, p, a, r) in &rows {
                        s.push_str(&format!("{}\t{}\t{}\t{}\n", id, p, a, r));
                    }
                    s
                }
            })
        }
        Command::Align { l2, l1 } => {
            let l2 = open_corpus(&l2)?;
            let l1 = open_corpus(&l1)?;
            let alignments = heuristic_alignments(&l2, &l1);
            let mut buf = Vec::new();
            write_alignments(alignments.values(), &mut buf)?;
            sink.file("alignments.txt", &String::from_utf8_lossy(&buf))
        }
        Command::Select {
            l2,
            l1,
            align,
            p,
            match_fine,
        } => {
            let l2 = open_corpus(&l2)?;
            let l1 = open_corpus(&l1)?;
            let alignments = alignments_for(&align, &l2, &l1)?;
            let pairs = pair_corpora(&l2, &l1, &alignments)?;
            let matching = MatchOptions {
                am_coarse: global.am_coarse || !match_fine,
            };
            let selection = select_pairs(&pairs, SelectionConfig::new(p)?, matching);
            let dir = global.out.clone().unwrap_or_else(|| PathBuf::from("."));
            fs::create_dir_all(&dir)?;
            let report = selection_report_tsv(&pairs, &selection);
            fs::write(dir.join("selection.tsv"), &report)?;
            fs::write(
                dir.join("selected_l2.conll"),
                corpus_to_string(&selected_side(&pairs, &selection, Side::L2))?,
            )?;
            fs::write(
                dir.join("selected_l1.conll"),
                corpus_to_string(&selected_side(&pairs, &selection, Side::L1))?,
            )?;
            let s = selection.stats;
            eprintln!(
                "selected {} of {} pairs ({:.2}%) at p = {}",
                s.selected,
                s.pool,
                100.0 * s.ratio,
                p
            );
            sink.print(&report)
        }
        Command::Split {
            l2,
            l1,
            align,
            dev_per_lang,
        } => {
            let l2 = open_corpus(&l2)?;
            let l1 = open_corpus(&l1)?;
            let alignments = alignments_for(&align, &l2, &l1)?;
            let pairs = pair_corpora(&l2, &l1, &alignments)?;
            let spec = SplitSpec {
                dev_pairs_per_lang: dev_per_lang,
            };
            let split = split_dataset(&pairs, spec, global.seed.unwrap_or(1))?;
            let mut buf = Vec::new();
            write_split(&split.assignment(), &mut buf)?;
            eprintln!(
                "{} dev pairs, {} L2 test sentences, {} L1 test sentences",
                split.dev.len(),
                split.test_l2.len(),
                split.test_l1.len()
            );
            sink.file("splits.tsv", &String::from_utf8_lossy(&buf))
        }
        Command::Train {
            corpus,
            epochs,
            no_average,
            model,
        } => {
            let corpus = open_corpus(&corpus)?;
            let config = TrainConfig {
                epochs,
                seed: global.seed.unwrap_or(TrainConfig::default().seed),
                averaged: !no_average,
            };
            let text = model_to_string(&train(&corpus, &config)?);
            match model {
                Some(path) => {
                    fs::write(path, text)?;
                    Ok(())
                }
                None => sink.file("model.srl", &text),
            }
        }
        Command::Tag { model, corpus } => {
            let model = load_model(BufReader::new(File::open(&model)?))?;
            let corpus = open_corpus(&corpus)?;
            sink.file("tagged.conll", &corpus_to_string(&tag_corpus(&model, &corpus)?)?)
        }
        Command::Retrain {
            config,
            extend_with,
            pool_annotations,
        } => {
            let mut config = PipelineConfig::load(&config)?;
            if global.am_coarse {
                config.params.score.am_coarse = true;
                config.params.matching.am_coarse = true;
            }
            if let Some(seed) = global.seed {
                config.params.train.seed = seed;
            }
            if let Some(dir) = &global.out {
                config.report_dir = dir.clone();
            }
            if let Some(e) = extend_with {
                config.params.extend_with = e;
            }
            if let Some(p) = pool_annotations {
                config.params.pool_annotations = p;
            }
            let outcome = retrain(&config)?;
            let report = outcome.report;
            sink.print(&match global.format {
                ReportFormat::Text => report.render_text(),
                ReportFormat::Tsv => report.render_tsv(),
                ReportFormat::Json => report.render_json(),
            })
        }
    }
}
