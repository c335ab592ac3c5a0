//! Document model, word tokenizer and rule-based sentence splitter.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

/// Abbreviations that end in a period but do not end a sentence.
/// Entries are lowercase and include the trailing period.
const ABBREVIATIONS: &[&str] = &[
    "al.", "approx.", "ca.", "cf.", "ch.", "co.", "def.", "dr.", "e.g.", "ed.", "eds.", "eq.",
    "eqs.", "et.", "fig.", "figs.", "i.e.", "inc.", "jr.", "lem.", "ltd.", "mr.", "mrs.", "ms.",
    "no.", "nos.", "pp.", "prof.", "prop.", "ref.", "refs.", "resp.", "sec.", "secs.", "sr.",
    "st.", "tab.", "thm.", "viz.", "vol.", "vs.",
];

const CLOSERS: &[char] = &[')', ']', '}', '"', '\'', '\u{201d}', '\u{2019}'];
const OPENERS: &[char] = &['(', '[', '"', '\'', '\u{201c}', '\u{2018}'];

/// Lowercased word tokens of `text`.
///
/// Splits on whitespace and strips leading and trailing punctuation from each
/// word. Intra-word hyphens survive, as do dataset placeholders such as
/// `@xmath0` and `@xcite`. Words made only of punctuation disappear.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().filter_map(normalize_word).collect()
}

/// Number of tokens [`tokenize`] would produce, without allocating them.
pub fn count_tokens(text: &str) -> usize {
    text.split_whitespace()
        .filter(|w| strip_word(w).is_some())
        .count()
}

fn strip_word(word: &str) -> Option<&str> {
    let end = word.trim_end_matches(|c: char| !c.is_alphanumeric());
    let mut rest = end;
    loop {
        let mut chars = rest.chars();
        let first = chars.next()?;
        if first.is_alphanumeric() {
            return Some(rest);
        }
        let tail = chars.as_str();
        if first == '@' && tail.starts_with(|c: char| c.is_alphanumeric()) {
            return Some(rest);
        }
        rest = tail;
    }
}

fn normalize_word(word: &str) -> Option<String> {
    strip_word(word).map(str::to_lowercase)
}

/// Splits `text` into sentences.
///
/// A boundary is a run of `.`, `!` or `?` (plus any closing quotes or
/// brackets) followed by whitespace and then an uppercase letter or a digit,
/// optionally behind an opening quote or bracket. A period ending a known
/// abbreviation is not a boundary. Sentence texts
/// are trimmed slices of the input, so joining them with whitespace gives the
/// input back up to whitespace.
pub fn split_sentences(text: &str) -> Vec<Sentence> {
    split_spans(text).into_iter().map(Sentence::new).collect()
}

fn split_spans(text: &str) -> Vec<&str> {
    let mut spans = Vec::new();
    let bytes_len = text.len();
    let mut start = 0;
    let mut iter = text.char_indices().peekable();

    while let Some((i, c)) = iter.next() {
        if !matches!(c, '.' | '!' | '?') {
            continue;
        }
        let mut end = i + c.len_utf8();
        while let Some(&(j, d)) = iter.peek() {
            if matches!(d, '.' | '!' | '?') || CLOSERS.contains(&d) {
                end = j + d.len_utf8();
                iter.next();
            } else {
                break;
            }
        }
        let after = &text[end..];
        if !after.starts_with(char::is_whitespace) {
            continue;
        }
        if !starts_sentence(after.trim_start()) {
            continue;
        }
        if c == '.' && is_abbreviation(&text[start..end]) {
            continue;
        }
        let span = text[start..end].trim();
        if !span.is_empty() {
            spans.push(span);
        }
        start = end;
    }
    if start < bytes_len {
        let span = text[start..].trim();
        if !span.is_empty() {
            spans.push(span);
        }
    }
    spans
}

fn starts_sentence(rest: &str) -> bool {
    let mut chars = rest.chars();
    match chars.next() {
        Some(c) if c.is_uppercase() || c.is_ascii_digit() => true,
        Some(c) if OPENERS.contains(&c) => chars
            .next()
            .is_some_and(|d| d.is_uppercase() || d.is_ascii_digit()),
        _ => false,
    }
}

/// `chunk` ends with the period under inspection, possibly followed by closers.
fn is_abbreviation(chunk: &str) -> bool {
    let chunk = chunk.trim_end_matches(CLOSERS);
    let word = chunk
        .rsplit(char::is_whitespace)
        .next()
        .unwrap_or("")
        .trim_start_matches(OPENERS);
    let lower = word.to_lowercase();
    ABBREVIATIONS.contains(&lower.as_str())
}

/// A sentence and its word tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    text: String,
    tokens: Vec<String>,
}

impl Sentence {
    pub fn new(text: impl Into<String>) -> Self {
        let text = text.into();
        let tokens = tokenize(&text);
        Sentence { text, tokens }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// A first-level section of a document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    header: String,
    sentences: Vec<Sentence>,
    index: usize,
}

impl Section {
    pub fn header(&self) -> &str {
        &self.header
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    /// Position of this section within its document.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }

    /// All tokens of the section, in order.
    pub fn tokens(&self) -> impl Iterator<Item = &String> + '_ {
        self.sentences.iter().flat_map(|s| s.tokens.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("document {0:?} has no sections")]
    NoSections(String),
    #[error("document {0:?} has an empty summary")]
    EmptySummary(String),
}

/// A sectioned document together with its reference summary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    doc_id: String,
    sections: Vec<Section>,
    summary: Vec<Sentence>,
}

impl Document {
    /// Builds a document from `(header, sentences)` pairs in source order.
    ///
    /// Sentences without any token are dropped. A section may end up with no
    /// sentences; it keeps its index so later sections are not renumbered.
    pub fn new(
        doc_id: impl Into<String>,
        sections: impl IntoIterator<Item = (String, Vec<Sentence>)>,
        summary: Vec<Sentence>,
    ) -> Result<Self, DocumentError> {
        let doc_id = doc_id.into();
        let sections: Vec<Section> = sections
            .into_iter()
            .enumerate()
            .map(|(index, (header, sentences))| Section {
                header,
                sentences: sentences.into_iter().filter(|s| !s.is_empty()).collect(),
                index,
            })
            .collect();
        if sections.is_empty() {
            return Err(DocumentError::NoSections(doc_id));
        }
        let summary: Vec<Sentence> = summary.into_iter().filter(|s| !s.is_empty()).collect();
        if summary.is_empty() {
            return Err(DocumentError::EmptySummary(doc_id));
        }
        Ok(Document {
            doc_id,
            sections,
            summary,
        })
    }

    /// Convenience constructor from raw section texts and a raw summary,
    /// running the sentence splitter on each.
    pub fn from_text<'a>(
        doc_id: impl Into<String>,
        sections: impl IntoIterator<Item = (&'a str, &'a str)>,
        summary: &str,
    ) -> Result<Self, DocumentError> {
        Document::new(
            doc_id,
            sections
                .into_iter()
                .map(|(h, body)| (h.to_string(), split_sentences(body))),
            split_sentences(summary),
        )
    }

    pub fn doc_id(&self) -> &str {
        &self.doc_id
    }

    pub fn sections(&self) -> &[Section] {
        &self.sections
    }

    pub fn summary(&self) -> &[Sentence] {
        &self.summary
    }

    pub fn word_count(&self) -> usize {
        self.sections.iter().map(Section::word_count).sum()
    }

    pub fn summary_word_count(&self) -> usize {
        self.summary.iter().map(Sentence::len).sum()
    }
}
