//! Corpus statistics and copied n-gram analysis.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::align::SectionTally;
use crate::examples::{section_pairs, GenConfig};
use crate::rouge::ngram_counts;
use crate::section::{KeywordTable, SectionType};
use crate::text::Document;

/// n-gram orders reported by [`CopyStats`].
pub const COPY_ORDERS: [usize; 4] = [1, 2, 3, 4];

/// How target n-grams are counted when measuring copying.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CopyCounting {
    /// Distinct n-gram sets.
    #[default]
    Distinct,
    /// Multisets with clipped counts.
    Multiset,
}

/// Share of the target's n-grams that also occur in the source; 0 when the
/// target has fewer than `n` tokens.
pub fn copied_ngram_fraction<T: Ord>(
    source: &[T],
    target: &[T],
    n: usize,
    counting: CopyCounting,
) -> f64 {
    if n == 0 || target.len() < n {
        return 0.0;
    }
    match counting {
        CopyCounting::Distinct => {
            let src: BTreeSet<&[T]> = source.windows(n).collect();
            let tgt: BTreeSet<&[T]> = target.windows(n).collect();
            let copied = tgt.iter().filter(|g| src.contains(*g)).count();
            copied as f64 / tgt.len() as f64
        }
        CopyCounting::Multiset => {
            let src = ngram_counts(source, n);
            let tgt = ngram_counts(target, n);
            let copied: usize = tgt
                .iter()
                .map(|(g, &c)| c.min(src.get(g).copied().unwrap_or(0)))
                .sum();
            copied as f64 / (target.len() - n + 1) as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n_documents: u64,
    pub n_examples: u64,
    pub avg_document_words: f64,
    pub avg_summary_words: f64,
    /// Untruncated source length of the emitted examples.
    pub avg_example_words: f64,
    /// Untruncated target length of the emitted examples.
    pub avg_target_words: f64,
    pub avg_summary_sentences: f64,
    /// Share of aligned summary sentences per section type.
    pub section_distribution: BTreeMap<SectionType, f64>,
}

/// Mean copied n-gram fraction over all examples, per order n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CopyStats {
    pub per_n: BTreeMap<usize, f64>,
}

/// Single-pass accumulator behind [`corpus_stats`] and [`copy_stats`].
///
/// Counts are integers and copy fractions are summed in sorted order on
/// [`finish`](Self::finish), so the result does not depend on document order
/// or on how the corpus was sharded before [`merge`](Self::merge).
#[derive(Debug, Clone, Default)]
pub struct StatsAccumulator {
    n_documents: u64,
    n_examples: u64,
    document_words: u64,
    summary_words: u64,
    summary_sentences: u64,
    example_words: u64,
    target_words: u64,
    tally: SectionTally,
    copy: [Vec<f64>; 4],
}

impl StatsAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_document(
        &mut self,
        doc: &Document,
        table: &KeywordTable,
        config: &GenConfig,
        counting: CopyCounting,
    ) {
        self.n_documents += 1;
        self.document_words += doc.word_count() as u64;
        self.summary_words += doc.summary_word_count() as u64;
        self.summary_sentences += doc.summary().len() as u64;
        self.tally
            .add_document(doc, table, config.align.denominator);

        for pair in section_pairs(doc, config, table) {
            let source: Vec<&String> = pair.section.tokens().collect();
            let target: Vec<&String> = pair.target.tokens().collect();
            if source.is_empty() || target.is_empty() {
                continue;
            }
            self.n_examples += 1;
            self.example_words += source.len() as u64;
            self.target_words += target.len() as u64;
            for (slot, n) in self.copy.iter_mut().zip(COPY_ORDERS) {
                slot.push(copied_ngram_fraction(&source, &target, n, counting));
            }
        }
    }

    pub fn merge(mut self, other: StatsAccumulator) -> StatsAccumulator {
        self.n_documents += other.n_documents;
        self.n_examples += other.n_examples;
        self.document_words += other.document_words;
        self.summary_words += other.summary_words;
        self.summary_sentences += other.summary_sentences;
        self.example_words += other.example_words;
        self.target_words += other.target_words;
        self.tally = self.tally.merge(other.tally);
        for (mine, theirs) in self.copy.iter_mut().zip(other.copy) {
            mine.extend(theirs);
        }
        self
    }

    pub fn finish(mut self) -> (CorpusStats, CopyStats) {
        let avg = |num: u64, den: u64| {
            if den == 0 {
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        let section_distribution = self
            .tally
            .fractions()
            .unwrap_or_else(|| SectionType::ALL.into_iter().map(|t| (t, 0.0)).collect());
        let stats = CorpusStats {
            n_documents: self.n_documents,
            n_examples: self.n_examples,
            avg_document_words: avg(self.document_words, self.n_documents),
            avg_summary_words: avg(self.summary_words, self.n_documents),
            avg_example_words: avg(self.example_words, self.n_examples),
            avg_target_words: avg(self.target_words, self.n_examples),
            avg_summary_sentences: avg(self.summary_sentences, self.n_documents),
            section_distribution,
        };
        let per_n = COPY_ORDERS
            .into_iter()
            .zip(self.copy.iter_mut())
            .map(|(n, fractions)| {
                fractions.sort_by(f64::total_cmp);
                let mean = if fractions.is_empty() {
                    0.0
                } else {
                    fractions.iter().sum::<f64>() / fractions.len() as f64
                };
                (n, mean)
            })
            .collect();
        (stats, CopyStats { per_n })
    }
}

fn accumulate<'a>(
    docs: impl IntoIterator<Item = &'a Document>,
    table: &KeywordTable,
    config: &GenConfig,
    counting: CopyCounting,
) -> StatsAccumulator {
    let mut acc = StatsAccumulator::new();
    for doc in docs {
        acc.add_document(doc, table, config, counting);
    }
    acc
}

/// Dataset statistics. An empty corpus gives all-zero fields.
pub fn corpus_stats<'a>(
    docs: impl IntoIterator<Item = &'a Document>,
    table: &KeywordTable,
    config: &GenConfig,
) -> CorpusStats {
    accumulate(docs, table, config, CopyCounting::Distinct)
        .finish()
        .0
}

pub fn copy_stats<'a>(
    docs: impl IntoIterator<Item = &'a Document>,
    table: &KeywordTable,
    config: &GenConfig,
    counting: CopyCounting,
) -> CopyStats {
    accumulate(docs, table, config, counting).finish().1
}
