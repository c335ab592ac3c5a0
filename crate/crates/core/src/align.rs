//! Summary-to-section alignment.
//!
//! Every summary sentence goes to the section holding the document sentence
//! with the highest ROUGE-L precision against it. Ties go to the smallest
//! section index, then the smallest sentence index. Summary sentences grouped
//! per section, in summary order, form the section-level targets.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rouge::lcs_length;
use crate::section::{classify_header, KeywordTable, SectionType};
use crate::text::{Document, Sentence};

/// Which sentence length divides the LCS when scoring a
/// (summary sentence, document sentence) pair.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Denominator {
    /// `LCS / |summary sentence|`. The denominator is constant per summary
    /// sentence, so the argmax is the document sentence with the longest LCS.
    #[default]
    Summary,
    /// `LCS / |document sentence|`.
    #[serde(rename = "doc")]
    Document,
}

impl FromStr for Denominator {
    type Err = AlignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "summary" => Ok(Denominator::Summary),
            "doc" | "document" => Ok(Denominator::Document),
            other => Err(AlignError::UnknownDenominator(other.into())),
        }
    }
}

impl fmt::Display for Denominator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Denominator::Summary => "summary",
            Denominator::Document => "doc",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignOptions {
    pub denominator: Denominator,
    /// Leave summary sentences without any overlap out of the targets.
    pub drop_zero_overlap: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlignError {
    #[error("document has no sentences to align against")]
    EmptyDocument,
    #[error("document has no summary sentences")]
    EmptySummary,
    #[error("summary sentence {0} is assigned more than once")]
    DuplicateAssignment(usize),
    #[error("summary sentence {0} is not assigned")]
    MissingAssignment(usize),
    #[error("assignment refers to summary sentence {0}, which does not exist")]
    UnknownSummaryIndex(usize),
    #[error("corpus has no summary sentences")]
    EmptyCorpus,
    #[error("unknown alignment denominator {0:?} (expected summary or doc)")]
    UnknownDenominator(alloc::string::String),
}

/// Where one summary sentence was assigned.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub summary_sentence_index: usize,
    pub section_index: usize,
    pub best_sentence_index: usize,
    pub best_score: f64,
}

/// Summary sentences assigned to one section, in summary order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionTarget {
    pub section_index: usize,
    pub summary_indices: Vec<usize>,
    pub target_sentences: Vec<Sentence>,
}

impl SectionTarget {
    pub fn tokens(&self) -> impl Iterator<Item = &alloc::string::String> + '_ {
        self.target_sentences.iter().flat_map(|s| s.tokens().iter())
    }
}

/// An exact fraction `lcs / len`.
#[derive(Clone, Copy)]
struct Ratio {
    num: usize,
    den: usize,
}

impl Ratio {
    fn beats(self, other: Ratio) -> bool {
        // num/den > other.num/other.den with den, other.den > 0
        self.num * other.den > other.num * self.den
    }

    fn value(self) -> f64 {
        if self.den == 0 {
            0.0
        } else {
            self.num as f64 / self.den as f64
        }
    }
}

/// Aligns every summary sentence with the default summary-length denominator.
pub fn align_summary(doc: &Document) -> Result<Vec<Assignment>, AlignError> {
    align_summary_with(doc, Denominator::Summary)
}

pub fn align_summary_with(
    doc: &Document,
    denominator: Denominator,
) -> Result<Vec<Assignment>, AlignError> {
    if doc.sections().iter().all(|s| s.sentences().is_empty()) {
        return Err(AlignError::EmptyDocument);
    }
    if doc.summary().is_empty() {
        return Err(AlignError::EmptySummary);
    }

    let assignments = doc
        .summary()
        .iter()
        .enumerate()
        .map(|(m, summary_sentence)| {
            let a = summary_sentence.tokens();
            let mut best: Option<(usize, usize, Ratio)> = None;
            for section in doc.sections() {
                for (n, sentence) in section.sentences().iter().enumerate() {
                    let lcs = lcs_length(a, sentence.tokens());
                    let den = match denominator {
                        Denominator::Summary => a.len(),
                        Denominator::Document => sentence.len(),
                    };
                    let score = Ratio { num: lcs, den };
                    let better = match best {
                        None => true,
                        Some((_, _, current)) => score.beats(current),
                    };
                    if better {
                        best = Some((section.index(), n, score));
                    }
                }
            }
            // at least one section has a sentence, checked above
            let (k, n, score) = best.expect("non-empty document");
            Assignment {
                summary_sentence_index: m,
                section_index: k,
                best_sentence_index: n,
                best_score: score.value(),
            }
        })
        .collect();
    Ok(assignments)
}

/// Groups the summary sentences of `doc` by assigned section.
///
/// Targets come out in ascending section order; sections without any
/// sentence produce no target. `assignments` must cover every summary
/// sentence exactly once.
pub fn build_section_targets(
    doc: &Document,
    assignments: &[Assignment],
) -> Result<Vec<SectionTarget>, AlignError> {
    let summary = doc.summary();
    let mut section_of: Vec<Option<usize>> = vec![None; summary.len()];
    for a in assignments {
        let slot = section_of
            .get_mut(a.summary_sentence_index)
            .ok_or(AlignError::UnknownSummaryIndex(a.summary_sentence_index))?;
        if slot.is_some() {
            return Err(AlignError::DuplicateAssignment(a.summary_sentence_index));
        }
        *slot = Some(a.section_index);
    }
    if assignments.is_empty() {
        return Ok(Vec::new());
    }

    let mut grouped: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (m, section) in section_of.iter().enumerate() {
        let k = section.ok_or(AlignError::MissingAssignment(m))?;
        grouped.entry(k).or_default().push(m);
    }
    Ok(grouped
        .into_iter()
        .map(|(section_index, summary_indices)| SectionTarget {
            section_index,
            target_sentences: summary_indices
                .iter()
                .map(|&m| summary[m].clone())
                .collect(),
            summary_indices,
        })
        .collect())
}

/// Count of summary sentences per section type, mergeable across shards.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SectionTally {
    counts: [u64; 6],
}

impl SectionTally {
    fn slot(ty: SectionType) -> usize {
        SectionType::ALL
            .iter()
            .position(|&t| t == ty)
            .expect("ALL lists every type")
    }

    pub fn add(&mut self, ty: SectionType, count: u64) {
        self.counts[Self::slot(ty)] += count;
    }

    /// Tallies the aligned summary sentences of one document. Documents that
    /// cannot be aligned contribute nothing.
    pub fn add_document(&mut self, doc: &Document, table: &KeywordTable, denominator: Denominator) {
        let Ok(assignments) = align_summary_with(doc, denominator) else {
            return;
        };
        for a in assignments {
            let header = doc.sections()[a.section_index].header();
            self.add(classify_header(header, table), 1);
        }
    }

    pub fn merge(mut self, other: SectionTally) -> SectionTally {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn count(&self, ty: SectionType) -> u64 {
        self.counts[Self::slot(ty)]
    }

    /// Fraction per type, every type present. `None` when nothing was tallied.
    pub fn fractions(&self) -> Option<BTreeMap<SectionType, f64>> {
        let total = self.total();
        if total == 0 {
            return None;
        }
        Some(
            SectionType::ALL
                .into_iter()
                .map(|t| (t, self.count(t) as f64 / total as f64))
                .collect(),
        )
    }
}

/// Fraction of all summary sentences aligned to each section type.
pub fn alignment_distribution<'a>(
    corpus: impl IntoIterator<Item = &'a Document>,
    table: &KeywordTable,
    denominator: Denominator,
) -> Result<BTreeMap<SectionType, f64>, AlignError> {
    let mut tally = SectionTally::default();
    for doc in corpus {
        tally.add_document(doc, table, denominator);
    }
    tally.fractions().ok_or(AlignError::EmptyCorpus)
}
