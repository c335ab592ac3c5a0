//! Section-type classification from header keywords, and section selection.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::text::{tokenize, Document, Section};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectionType {
    Introduction,
    Literature,
    Methods,
    Results,
    Conclusion,
    Other,
}

impl SectionType {
    /// Every type, in classification precedence order, `Other` last.
    pub const ALL: [SectionType; 6] = [
        SectionType::Introduction,
        SectionType::Literature,
        SectionType::Methods,
        SectionType::Results,
        SectionType::Conclusion,
        SectionType::Other,
    ];

    /// Types that feed summarization by default.
    pub const SELECTED: [SectionType; 4] = [
        SectionType::Introduction,
        SectionType::Methods,
        SectionType::Results,
        SectionType::Conclusion,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SectionType::Introduction => "introduction",
            SectionType::Literature => "literature",
            SectionType::Methods => "methods",
            SectionType::Results => "results",
            SectionType::Conclusion => "conclusion",
            SectionType::Other => "other",
        }
    }
}

impl fmt::Display for SectionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownSectionType(pub String);

impl fmt::Display for UnknownSectionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown section type {:?}", self.0)
    }
}

impl FromStr for SectionType {
    type Err = UnknownSectionType;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SectionType::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownSectionType(s.to_string()))
    }
}

/// Keywords per section type. Matching is against whole header tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordTable {
    entries: Vec<(SectionType, Vec<String>)>,
}

impl Default for KeywordTable {
    fn default() -> Self {
        let table: [(SectionType, &[&str]); 5] = [
            (SectionType::Introduction, &["introduction", "case"]),
            (
                SectionType::Literature,
                &["background", "literature", "related"],
            ),
            (
                SectionType::Methods,
                &["method", "methods", "techniques", "methodology"],
            ),
            (
                SectionType::Results,
                &[
                    "result",
                    "results",
                    "experimental",
                    "experiment",
                    "experiments",
                ],
            ),
            (
                SectionType::Conclusion,
                &[
                    "conclusion",
                    "conclusions",
                    "concluding",
                    "discussion",
                    "limitations",
                ],
            ),
        ];
        KeywordTable {
            entries: table
                .into_iter()
                .map(|(t, kws)| (t, kws.iter().map(|k| k.to_string()).collect()))
                .collect(),
        }
    }
}

impl KeywordTable {
    /// An empty table, classifying everything as `Other`.
    pub fn empty() -> Self {
        KeywordTable {
            entries: Vec::new(),
        }
    }

    /// Replaces the keywords of `ty`. Keywords are lowercased. `Other` cannot
    /// carry keywords and is ignored.
    pub fn set(&mut self, ty: SectionType, keywords: impl IntoIterator<Item = String>) {
        if ty == SectionType::Other {
            return;
        }
        let keywords: Vec<String> = keywords.into_iter().map(|k| k.to_lowercase()).collect();
        match self.entries.iter_mut().find(|(t, _)| *t == ty) {
            Some(entry) => entry.1 = keywords,
            None => {
                self.entries.push((ty, keywords));
                self.entries.sort_by_key(|(t, _)| *t);
            }
        }
    }

    pub fn keywords(&self, ty: SectionType) -> &[String] {
        self.entries
            .iter()
            .find(|(t, _)| *t == ty)
            .map(|(_, k)| k.as_slice())
            .unwrap_or(&[])
    }

    /// Entries in precedence order.
    pub fn entries(&self) -> impl Iterator<Item = (SectionType, &[String])> {
        self.entries.iter().map(|(t, k)| (*t, k.as_slice()))
    }
}

/// Classifies a section header.
///
/// The header is tokenized (lowercase, punctuation stripped) and the first
/// type in precedence order with a keyword equal to some header token wins.
pub fn classify_header(header: &str, table: &KeywordTable) -> SectionType {
    let tokens = tokenize(header);
    table
        .entries()
        .find(|(_, kws)| kws.iter().any(|k| tokens.iter().any(|t| t == k)))
        .map(|(t, _)| t)
        .unwrap_or(SectionType::Other)
}

/// Sections of `doc` whose type is one of `selected`, in document order.
pub fn select_sections_of<'d>(
    doc: &'d Document,
    table: &KeywordTable,
    selected: &[SectionType],
) -> Vec<(&'d Section, SectionType)> {
    doc.sections()
        .iter()
        .map(|s| (s, classify_header(s.header(), table)))
        .filter(|(_, t)| selected.contains(t))
        .collect()
}

/// Sections classified as introduction, methods, results or conclusion,
/// in document order.
pub fn select_sections<'d>(
    doc: &'d Document,
    table: &KeywordTable,
) -> Vec<(&'d Section, SectionType)> {
    select_sections_of(doc, table, &SectionType::SELECTED)
}
