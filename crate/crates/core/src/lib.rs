//! Multi-task data augmentation for neural machine translation corpora.
//!
//! A parallel corpus is turned into a multi-task training set: the original
//! pairs (the main task) plus one synthetic copy per auxiliary task, each
//! marked by a tag token prepended to the source. The auxiliary tasks rewrite
//! the target side so that the target prefix becomes less useful for
//! predicting the next word:
//!
//! | task      | target side                                              |
//! |-----------|----------------------------------------------------------|
//! | `swap`    | pairs of words swapped until a fraction α is displaced    |
//! | `token`   | a fraction α of words replaced by an UNK symbol           |
//! | `source`  | a copy of the source sentence                             |
//! | `reverse` | words in reverse order                                    |
//! | `mono`    | words reordered to follow the source alignment            |
//! | `replace` | α·t aligned word pairs replaced by random lexicon entries |
//!
//! The [`metrics`] module scores system outputs with an adjusted sentence
//! BLEU and counts hallucinations, alone or comparing two systems.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod align;
pub mod cli;
pub mod error;
pub mod metrics;
pub mod pipeline;
pub mod transform;

pub use align::{
    build_lexicon, intersect, parse_alignment_line, BilingualLexicon, Link, OneToOneAlignment,
    WordAlignment,
};
pub use error::{Error, Result};
pub use metrics::{
    adjusted_bleu, adjusted_bleu_text, disjoint_hallucinations, hallucination_report,
    is_hallucination, AdjustedBleu, HallucinationParams,
};
pub use pipeline::{
    augment_corpus, build_lexicon_from_files, corpus_stats, intersect_files, line_rng,
    AlignmentFiles, AugmentConfig, Manifest,
};
pub use transform::{apply_task, SentencePair, TaskContext, TaskKind, TaskSpec};
