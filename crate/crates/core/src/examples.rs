//! Section-level training examples.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::align::{align_summary_with, build_section_targets, AlignOptions, SectionTarget};
use crate::section::{select_sections_of, KeywordTable, SectionType};
use crate::text::{Document, Section, Sentence};

pub const DEFAULT_MAX_SOURCE_WORDS: usize = 500;
pub const DEFAULT_MAX_TARGET_WORDS: usize = 100;
pub const DEFAULT_MAX_SUMMARY_WORDS: usize = 120;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub max_source_words: usize,
    pub max_target_words: usize,
    /// Cap on each built-in partial summary at prediction time.
    pub max_summary_words: usize,
    pub selected_types: Vec<SectionType>,
    pub align: AlignOptions,
    /// Truncate at sentence boundaries instead of mid-sentence, when at
    /// least one whole sentence fits.
    pub sentence_truncation: bool,
    /// When no section is selected, treat the first K sections as
    /// introductions instead of producing nothing.
    pub fallback_first_k: Option<usize>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_source_words: DEFAULT_MAX_SOURCE_WORDS,
            max_target_words: DEFAULT_MAX_TARGET_WORDS,
            max_summary_words: DEFAULT_MAX_SUMMARY_WORDS,
            selected_types: SectionType::SELECTED.to_vec(),
            align: AlignOptions::default(),
            sentence_truncation: false,
            fallback_first_k: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("{0} must be at least 1")]
    ZeroCap(&'static str),
    #[error("no section types selected")]
    NoSelectedTypes,
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.max_source_words == 0 {
            return Err(ConfigError::ZeroCap("max_source_words"));
        }
        if self.max_target_words == 0 {
            return Err(ConfigError::ZeroCap("max_target_words"));
        }
        if self.max_summary_words == 0 {
            return Err(ConfigError::ZeroCap("max_summary_words"));
        }
        if self.selected_types.is_empty() {
            return Err(ConfigError::NoSelectedTypes);
        }
        Ok(())
    }

    /// Selected sections of `doc`, applying the first-K fallback.
    pub fn select<'d>(
        &self,
        doc: &'d Document,
        table: &KeywordTable,
    ) -> Vec<(&'d Section, SectionType)> {
        let selected = select_sections_of(doc, table, &self.selected_types);
        match self.fallback_first_k {
            Some(k) if selected.is_empty() => doc
                .sections()
                .iter()
                .take(k)
                .map(|s| (s, SectionType::Introduction))
                .collect(),
            _ => selected,
        }
    }
}

/// One (section, partial summary) pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingExample {
    pub doc_id: String,
    pub section_index: usize,
    pub section_type: SectionType,
    #[serde(with = "space_joined")]
    pub source: Vec<String>,
    #[serde(with = "space_joined")]
    pub target: Vec<String>,
}

/// Serializes a token list as a single space-joined string.
pub mod space_joined {
    use alloc::string::String;
    use alloc::vec::Vec;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(tokens: &[String], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&tokens.join(" "))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<String>, D::Error> {
        let joined = String::deserialize(d)?;
        Ok(joined.split_whitespace().map(String::from).collect())
    }
}

/// A selected section with its untruncated aligned target.
#[derive(Debug, Clone)]
pub struct SectionPair<'d> {
    pub section: &'d Section,
    pub section_type: SectionType,
    pub target: SectionTarget,
}

impl SectionPair<'_> {
    pub fn source_tokens(&self) -> Vec<String> {
        self.section.tokens().cloned().collect()
    }

    pub fn target_tokens(&self) -> Vec<String> {
        self.target.tokens().cloned().collect()
    }
}

/// Aligns the whole document, then keeps the selected sections that
/// received at least one summary sentence.
pub fn section_pairs<'d>(
    doc: &'d Document,
    config: &GenConfig,
    table: &KeywordTable,
) -> Vec<SectionPair<'d>> {
    let selected = config.select(doc, table);
    if selected.is_empty() {
        return Vec::new();
    }
    let Ok(assignments) = align_summary_with(doc, config.align.denominator) else {
        return Vec::new();
    };
    let Ok(mut targets) = build_section_targets(doc, &assignments) else {
        return Vec::new();
    };
    if config.align.drop_zero_overlap {
        for t in &mut targets {
            let keep: Vec<bool> = t
                .summary_indices
                .iter()
                .map(|&m| assignments[m].best_score > 0.0)
                .collect();
            let mut flags = keep.iter();
            t.summary_indices.retain(|_| *flags.next().unwrap());
            let mut flags = keep.iter();
            t.target_sentences.retain(|_| *flags.next().unwrap());
        }
        targets.retain(|t| !t.summary_indices.is_empty());
    }

    selected
        .into_iter()
        .filter_map(|(section, section_type)| {
            let pos = targets
                .iter()
                .position(|t| t.section_index == section.index())?;
            Some(SectionPair {
                section,
                section_type,
                target: targets[pos].clone(),
            })
        })
        .collect()
}

/// First `cap` tokens of `sentences`. With `at_boundary`, stops at the last
/// sentence that fits whole, unless not even the first one does.
pub fn truncate_tokens(sentences: &[Sentence], cap: usize, at_boundary: bool) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    if at_boundary {
        for s in sentences {
            if out.len() + s.len() > cap {
                break;
            }
            out.extend(s.tokens().iter().cloned());
        }
        if !out.is_empty() || sentences.is_empty() {
            return out;
        }
    }
    sentences
        .iter()
        .flat_map(|s| s.tokens().iter())
        .take(cap)
        .cloned()
        .collect()
}

/// Training examples for one document, in section order.
pub fn generate_examples(
    doc: &Document,
    config: &GenConfig,
    table: &KeywordTable,
) -> Vec<TrainingExample> {
    section_pairs(doc, config, table)
        .into_iter()
        .map(|pair| TrainingExample {
            doc_id: doc.doc_id().into(),
            section_index: pair.section.index(),
            section_type: pair.section_type,
            source: truncate_tokens(
                pair.section.sentences(),
                config.max_source_words,
                config.sentence_truncation,
            ),
            target: truncate_tokens(
                &pair.target.target_sentences,
                config.max_target_words,
                config.sentence_truncation,
            ),
        })
        .filter(|e| !e.source.is_empty() && !e.target.is_empty())
        .collect()
}
