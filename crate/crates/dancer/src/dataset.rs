//! JSONL dataset readers and the native writer.
//!
//! Two input layouts are understood, one document per line:
//!
//! * `arxiv-pubmed`: the public arXiv/PubMed release. Required fields are
//!   `article_id`, `sections` (list of sentence lists), `section_names` and
//!   `abstract_text` (sentences wrapped in `<S> ... </S>`).
//! * `native`: `{"doc_id": ..., "sections": [{"header": ..., "text": ...}],
//!   "summary": ...}` where `text` and `summary` are either raw text (run
//!   through the sentence splitter) or lists of sentences.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use dancer_core::text::{split_sentences, Document, DocumentError, Sentence};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetFormat {
    #[default]
    ArxivPubmed,
    Native,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: file not found")]
    NotFound { path: PathBuf },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

#[derive(Debug, Error)]
pub enum RecordErrorKind {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("missing required field {0:?}")]
    MissingField(&'static str),
    #[error("field {0:?} has the wrong type")]
    WrongType(&'static str),
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error("read failed: {0}")]
    Io(#[from] io::Error),
}

/// A record that could not be turned into a document.
#[derive(Debug, Error)]
#[error("line {line}: {kind}")]
pub struct RecordError {
    /// 1-based line number in the input file.
    pub line: usize,
    pub kind: RecordErrorKind,
}

/// Streams documents from a JSONL file in file order. Blank lines are
/// skipped; every other line yields a document or a [`RecordError`].
pub struct DatasetReader<R> {
    lines: io::Lines<R>,
    format: DatasetFormat,
    line: usize,
}

impl<R: BufRead> DatasetReader<R> {
    pub fn new(reader: R, format: DatasetFormat) -> Self {
        DatasetReader {
            lines: reader.lines(),
            format,
            line: 0,
        }
    }
}

impl<R: BufRead> Iterator for DatasetReader<R> {
    type Item = Result<Document, RecordError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let raw = self.lines.next()?;
            self.line += 1;
            let line = self.line;
            let text = match raw {
                Ok(t) => t,
                Err(e) => {
                    return Some(Err(RecordError {
                        line,
                        kind: e.into(),
                    }))
                }
            };
            if text.trim().is_empty() {
                continue;
            }
            return Some(
                parse_record(&text, self.format).map_err(|kind| RecordError { line, kind }),
            );
        }
    }
}

pub fn load_dataset(
    path: impl AsRef<Path>,
    format: DatasetFormat,
) -> Result<DatasetReader<BufReader<File>>, LoadError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| match source.kind() {
        io::ErrorKind::NotFound => LoadError::NotFound {
            path: path.to_owned(),
        },
        _ => LoadError::Io {
            path: path.to_owned(),
            source,
        },
    })?;
    Ok(DatasetReader::new(BufReader::new(file), format))
}

/// Parses one JSONL record.
pub fn parse_record(line: &str, format: DatasetFormat) -> Result<Document, RecordErrorKind> {
    let value: Value = serde_json::from_str(line)?;
    match format {
        DatasetFormat::ArxivPubmed => parse_arxiv(&value),
        DatasetFormat::Native => parse_native(&value),
    }
}

fn field<'v>(value: &'v Value, name: &'static str) -> Result<&'v Value, RecordErrorKind> {
    value.get(name).ok_or(RecordErrorKind::MissingField(name))
}

fn string_list(value: &Value, name: &'static str) -> Result<Vec<String>, RecordErrorKind> {
    value
        .as_array()
        .ok_or(RecordErrorKind::WrongType(name))?
        .iter()
        .map(|v| {
            v.as_str()
                .map(str::to_owned)
                .ok_or(RecordErrorKind::WrongType(name))
        })
        .collect()
}

fn id_string(value: &Value, name: &'static str) -> Result<String, RecordErrorKind> {
    match value {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(RecordErrorKind::WrongType(name)),
    }
}

/// Removes the `<S>`/`</S>` sentence markers of the release abstracts.
fn strip_sentence_tags(s: &str) -> String {
    s.split_whitespace()
        .filter(|w| *w != "<S>" && *w != "</S>")
        .collect::<Vec<_>>()
        .join(" ")
}

fn parse_arxiv(value: &Value) -> Result<Document, RecordErrorKind> {
    let doc_id = id_string(field(value, "article_id")?, "article_id")?;
    let sections = field(value, "sections")?
        .as_array()
        .ok_or(RecordErrorKind::WrongType("sections"))?;
    let names = string_list(field(value, "section_names")?, "section_names")?;
    let abstract_text = string_list(field(value, "abstract_text")?, "abstract_text")?;

    let sections = sections
        .iter()
        .enumerate()
        .map(|(i, sentences)| {
            let sentences = string_list(sentences, "sections")?;
            let header = names.get(i).cloned().unwrap_or_default();
            Ok((header, sentences.into_iter().map(Sentence::new).collect()))
        })
        .collect::<Result<Vec<(String, Vec<Sentence>)>, RecordErrorKind>>()?;
    let summary = abstract_text
        .iter()
        .map(|s| Sentence::new(strip_sentence_tags(s)))
        .collect();
    Ok(Document::new(doc_id, sections, summary)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TextOrSentences {
    Text(String),
    Sentences(Vec<String>),
}

impl TextOrSentences {
    fn into_sentences(self) -> Vec<Sentence> {
        match self {
            TextOrSentences::Text(t) => split_sentences(&t),
            TextOrSentences::Sentences(s) => s.into_iter().map(Sentence::new).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NativeSection {
    pub header: String,
    pub text: TextOrSentences,
}

/// A document in the native layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NativeRecord {
    pub doc_id: String,
    pub sections: Vec<NativeSection>,
    pub summary: TextOrSentences,
}

impl NativeRecord {
    /// Native record keeping the document's sentence segmentation.
    pub fn from_document(doc: &Document) -> Self {
        let sentences = |s: &[Sentence]| {
            TextOrSentences::Sentences(s.iter().map(|x| x.text().into()).collect())
        };
        NativeRecord {
            doc_id: doc.doc_id().into(),
            sections: doc
                .sections()
                .iter()
                .map(|s| NativeSection {
                    header: s.header().into(),
                    text: sentences(s.sentences()),
                })
                .collect(),
            summary: sentences(doc.summary()),
        }
    }

    pub fn into_document(self) -> Result<Document, DocumentError> {
        Document::new(
            self.doc_id,
            self.sections
                .into_iter()
                .map(|s| (s.header, s.text.into_sentences())),
            self.summary.into_sentences(),
        )
    }
}

fn parse_native(value: &Value) -> Result<Document, RecordErrorKind> {
    for name in ["doc_id", "sections", "summary"] {
        field(value, name)?;
    }
    let record: NativeRecord = serde_json::from_value(value.clone())?;
    Ok(record.into_document()?)
}

/// Writes `doc` as one native JSONL line.
pub fn write_native(out: &mut impl Write, doc: &Document) -> io::Result<()> {
    serde_json::to_writer(&mut *out, &NativeRecord::from_document(doc))?;
    out.write_all(b"\n")
}
