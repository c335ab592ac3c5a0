//! Line-delimited JSON helpers for examples and hypotheses.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use dancer_core::{SummaryHypothesis, TrainingExample};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Writes one JSON object per line and returns the number written.
pub fn write_jsonl<T: Serialize>(
    out: &mut impl Write,
    items: impl IntoIterator<Item = T>,
) -> io::Result<usize> {
    let mut count = 0;
    for item in items {
        serde_json::to_writer(&mut *out, &item)?;
        out.write_all(b"\n")?;
        count += 1;
    }
    Ok(count)
}

/// Parses every non-blank line; errors carry the 1-based line number.
pub fn read_jsonl<T: DeserializeOwned>(
    reader: impl BufRead,
) -> impl Iterator<Item = Result<T, (usize, String)>> {
    reader
        .lines()
        .enumerate()
        .filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|(i, line)| {
            let line = line.map_err(|e| (i + 1, e.to_string()))?;
            serde_json::from_str(&line).map_err(|e| (i + 1, e.to_string()))
        })
}

/// Writes examples to `path` as JSONL and returns the count.
pub fn write_examples(
    examples: impl IntoIterator<Item = TrainingExample>,
    path: &Path,
) -> io::Result<usize> {
    let mut out = BufWriter::new(File::create(path)?);
    let n = write_jsonl(&mut out, examples)?;
    out.flush()?;
    Ok(n)
}

pub fn read_examples(path: &Path) -> io::Result<Vec<TrainingExample>> {
    read_all(path)
}

pub fn read_hypotheses(path: &Path) -> io::Result<Vec<SummaryHypothesis>> {
    read_all(path)
}

fn read_all<T: DeserializeOwned>(path: &Path) -> io::Result<Vec<T>> {
    let reader = BufReader::new(File::open(path)?);
    read_jsonl(reader)
        .map(|r| {
            r.map_err(|(line, msg)| {
                io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("{}:{line}: {msg}", path.display()),
                )
            })
        })
        .collect()
}
