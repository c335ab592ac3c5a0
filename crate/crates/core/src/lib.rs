//! Divide-and-conquer summarization primitives.
//!
//! A long structured document is split into section-level source/target pairs
//! by assigning every reference-summary sentence to the section holding its
//! best ROUGE-L match. Sections are then summarized independently and the
//! partial summaries concatenated.
//!
//! This crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function over in-memory values; dataset IO, subprocess adapters, the
//! worker pool and the CLI live in the `dancer` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod align;
pub mod blocking;
pub mod compile;
pub mod examples;
pub mod rouge;
pub mod section;
pub mod stats;
pub mod summarize;
pub mod text;

pub use align::{
    align_summary, alignment_distribution, build_section_targets, AlignError, AlignOptions,
    Assignment, Denominator, SectionTarget,
};
pub use blocking::TrigramBlocker;
pub use compile::{PartialSummary, SectionJob, SummaryHypothesis};
pub use examples::{generate_examples, GenConfig, TrainingExample};
pub use rouge::{
    bootstrap_ci, lcs_length, rouge_l_precision, rouge_score, BootstrapError, RougeScore,
    RougeVariant,
};
pub use section::{classify_header, select_sections, KeywordTable, SectionType};
pub use stats::{copied_ngram_fraction, corpus_stats, CopyCounting, CopyStats, CorpusStats};
pub use summarize::{summarize_section, SummarizeError, SummarizerSpec};
pub use text::{split_sentences, tokenize, Document, DocumentError, Section, Sentence};
