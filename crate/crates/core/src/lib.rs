//! Semantic role labelling for parallel learner (L2) and native (L1)
//! sentence corpora: data model and corpus I/O, scoring, cross-lingual
//! agreement filtering, a linear-chain tagger and the retraining loop.

pub mod agreement;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod model;
pub mod pipeline;
pub mod tagger;

pub use corpus::{Alignments, Corpus, SentencePair};
pub use error::{Error, ParseError, Result};
pub use model::{
    Alignment, AnnotatedSentence, DecodeMode, Frame, Lang, ModelError, Position, PositionTag, RoleLabel, Side,
    Span, Token,
};
