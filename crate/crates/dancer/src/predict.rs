//! Parallel prediction: sections of many documents are fanned out over a
//! worker pool and the partial summaries reassembled in document order.
//!
//! Every worker owns at most one adapter process, so requests are never
//! interleaved on a single pipe. Results are keyed by job position, which
//! makes the output independent of the worker count.

use std::collections::VecDeque;
use std::fmt;
use std::sync::mpsc::{self, Receiver, Sender};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::Duration;

use dancer_core::compile::{builtin_partial, plan_jobs, PartialSummary, SectionJob};
use dancer_core::{Document, GenConfig, KeywordTable, SummarizerSpec, SummaryHypothesis};
use serde::Serialize;

use crate::adapter::AdapterProcess;
use crate::dataset::RecordError;

/// Documents gathered before their sections are dispatched.
pub const BATCH_DOCUMENTS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct SummarizerSettings {
    pub spec: SummarizerSpec,
    /// Only meaningful for built-in summarizers; adapters apply their own
    /// decoding constraints.
    pub block_trigrams: bool,
    /// Cap on each built-in partial summary.
    pub max_words: usize,
}

/// A recoverable problem tied to a record, document or section.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub doc_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub section_index: Option<usize>,
    pub message: String,
}

impl Diagnostic {
    pub fn for_record(err: &RecordError) -> Self {
        Diagnostic {
            line: Some(err.line),
            doc_id: None,
            section_index: None,
            message: err.kind.to_string(),
        }
    }

    pub fn for_document(doc_id: &str, message: impl Into<String>) -> Self {
        Diagnostic {
            line: None,
            doc_id: Some(doc_id.to_owned()),
            section_index: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(id) = &self.doc_id {
            write!(f, "document {id}")?;
            if let Some(k) = self.section_index {
                write!(f, " section {k}")?;
            }
            f.write_str(": ")?;
        }
        f.write_str(&self.message)
    }
}

enum WorkerState {
    Builtin,
    External {
        command: String,
        timeout: Duration,
        process: Option<AdapterProcess>,
    },
}

impl WorkerState {
    fn new(spec: &SummarizerSpec) -> Self {
        match spec {
            SummarizerSpec::External {
                command,
                timeout_ms,
            } => WorkerState::External {
                command: command.clone(),
                timeout: Duration::from_millis(*timeout_ms),
                process: None,
            },
            _ => WorkerState::Builtin,
        }
    }

    fn run(&mut self, job: &SectionJob, settings: &SummarizerSettings) -> Result<String, String> {
        match self {
            WorkerState::Builtin => builtin_partial(
                job,
                &settings.spec,
                settings.block_trigrams,
                settings.max_words,
            )
            .map_err(|e| e.to_string()),
            WorkerState::External {
                command,
                timeout,
                process,
            } => {
                if !process.as_ref().is_some_and(AdapterProcess::is_healthy) {
                    // a failed process is replaced rather than reused
                    *process = Some(AdapterProcess::spawn(command).map_err(|e| e.to_string())?);
                }
                let p = process.as_mut().expect("spawned above");
                p.request(&job.request_id(), &job.source_text(), *timeout)
                    .map_err(|e| e.to_string())
            }
        }
    }
}

type JobResult = (usize, Result<String, String>);

/// A fixed set of worker threads summarizing sections.
pub struct SectionPool {
    jobs: Option<Sender<(usize, SectionJob)>>,
    results: Receiver<JobResult>,
    handles: Vec<JoinHandle<()>>,
}

impl SectionPool {
    pub fn new(settings: SummarizerSettings, workers: usize) -> Self {
        let workers = workers.max(1);
        let (job_tx, job_rx) = mpsc::channel::<(usize, SectionJob)>();
        let (result_tx, result_rx) = mpsc::channel();
        let job_rx = Arc::new(Mutex::new(job_rx));
        let settings = Arc::new(settings);
        let handles = (0..workers)
            .map(|_| {
                let job_rx = Arc::clone(&job_rx);
                let result_tx = result_tx.clone();
                let settings = Arc::clone(&settings);
                thread::spawn(move || {
                    let mut state = WorkerState::new(&settings.spec);
                    loop {
                        let next = job_rx.lock().expect("job queue poisoned").recv();
                        let Ok((idx, job)) = next else { break };
                        let out = state.run(&job, &settings);
                        if result_tx.send((idx, out)).is_err() {
                            break;
                        }
                    }
                })
            })
            .collect();
        SectionPool {
            jobs: Some(job_tx),
            results: result_rx,
            handles,
        }
    }

    /// Runs every job and returns the results in job order.
    pub fn run(&self, jobs: Vec<SectionJob>) -> Vec<Result<String, String>> {
        let n = jobs.len();
        let sender = self.jobs.as_ref().expect("pool is open");
        for (idx, job) in jobs.into_iter().enumerate() {
            sender.send((idx, job)).expect("workers alive");
        }
        let mut slots: Vec<Option<Result<String, String>>> = (0..n).map(|_| None).collect();
        for _ in 0..n {
            let (idx, out) = self.results.recv().expect("workers alive");
            slots[idx] = Some(out);
        }
        slots
            .into_iter()
            .map(|s| s.expect("every job answered"))
            .collect()
    }
}

impl Drop for SectionPool {
    fn drop(&mut self) {
        self.jobs.take();
        for h in self.handles.drain(..) {
            let _ = h.join();
        }
    }
}

/// Result for one input record.
#[derive(Debug, Clone, PartialEq)]
pub enum CorpusItem {
    Summary {
        hypothesis: SummaryHypothesis,
        diagnostics: Vec<Diagnostic>,
    },
    /// The record could not be read as a document.
    Skipped(Diagnostic),
}

/// Summarizes documents in batches over a shared pool.
pub struct CorpusSummarizer {
    pool: SectionPool,
    table: KeywordTable,
    config: GenConfig,
}

impl CorpusSummarizer {
    pub fn new(
        settings: SummarizerSettings,
        table: KeywordTable,
        config: GenConfig,
        workers: usize,
    ) -> Self {
        CorpusSummarizer {
            pool: SectionPool::new(settings, workers),
            table,
            config,
        }
    }

    /// Summarizes `docs`, returning one hypothesis per document in order.
    pub fn summarize(&self, docs: &[Document]) -> Vec<(SummaryHypothesis, Vec<Diagnostic>)> {
        let plans: Vec<Vec<SectionJob>> = docs
            .iter()
            .map(|d| plan_jobs(d, &self.config, &self.table))
            .collect();
        let all_jobs: Vec<SectionJob> = plans.iter().flatten().cloned().collect();
        let mut results = self.pool.run(all_jobs).into_iter();

        docs.iter()
            .zip(plans)
            .map(|(doc, jobs)| {
                let mut diagnostics = Vec::new();
                if jobs.is_empty() {
                    diagnostics.push(Diagnostic::for_document(
                        doc.doc_id(),
                        "no section selected; summary is empty",
                    ));
                }
                let parts = jobs
                    .into_iter()
                    .map(|job| {
                        let partial = match results.next().expect("one result per job") {
                            Ok(p) => p,
                            Err(message) => {
                                diagnostics.push(Diagnostic {
                                    line: None,
                                    doc_id: Some(job.doc_id.clone()),
                                    section_index: Some(job.section_index),
                                    message,
                                });
                                String::new()
                            }
                        };
                        PartialSummary {
                            section_index: job.section_index,
                            section_type: job.section_type,
                            partial,
                        }
                    })
                    .collect();
                (
                    SummaryHypothesis::assemble(doc.doc_id(), parts),
                    diagnostics,
                )
            })
            .collect()
    }
}

/// Streams [`CorpusItem`]s for `records`, in input order.
pub struct SummarizeStream<I> {
    records: I,
    summarizer: CorpusSummarizer,
    ready: VecDeque<CorpusItem>,
    batch: usize,
}

impl<I> Iterator for SummarizeStream<I>
where
    I: Iterator<Item = Result<Document, RecordError>>,
{
    type Item = CorpusItem;

    fn next(&mut self) -> Option<CorpusItem> {
        if let Some(item) = self.ready.pop_front() {
            return Some(item);
        }
        // Skipped records keep their position relative to the documents.
        let mut slots: Vec<Result<usize, Diagnostic>> = Vec::new();
        let mut docs = Vec::new();
        while docs.len() < self.batch {
            match self.records.next() {
                None => break,
                Some(Ok(doc)) => {
                    slots.push(Ok(docs.len()));
                    docs.push(doc);
                }
                Some(Err(e)) => slots.push(Err(Diagnostic::for_record(&e))),
            }
        }
        let mut done = self.summarizer.summarize(&docs).into_iter();
        for slot in slots {
            self.ready.push_back(match slot {
                Ok(_) => {
                    let (hypothesis, diagnostics) = done.next().expect("one per document");
                    CorpusItem::Summary {
                        hypothesis,
                        diagnostics,
                    }
                }
                Err(d) => CorpusItem::Skipped(d),
            });
        }
        self.ready.pop_front()
    }
}

/// Summarizes a stream of records with `workers` parallel workers.
pub fn summarize_corpus<I>(
    records: I,
    settings: SummarizerSettings,
    table: KeywordTable,
    config: GenConfig,
    workers: usize,
) -> SummarizeStream<I::IntoIter>
where
    I: IntoIterator<Item = Result<Document, RecordError>>,
{
    SummarizeStream {
        records: records.into_iter(),
        summarizer: CorpusSummarizer::new(settings, table, config, workers),
        ready: VecDeque::new(),
        batch: BATCH_DOCUMENTS,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dancer_core::compile::summarize_document;
    use dancer_core::SectionType;

    fn docs() -> Vec<Document> {
        (0..5)
            .map(|i| {
                Document::from_text(
                    format!("d{i}"),
                    [
                        ("Introduction", "Alpha beta gamma. Delta epsilon."),
                        ("Background", "Zeta eta. Theta."),
                        ("Methods", "Iota kappa lambda. Mu nu."),
                        ("Results", "Xi omicron. Pi rho sigma."),
                        ("Conclusion", "Tau upsilon. Phi chi psi omega."),
                    ],
                    "Alpha beta. Iota kappa.",
                )
                .unwrap()
            })
            .collect()
    }

    fn lead(n: usize) -> SummarizerSettings {
        SummarizerSettings {
            spec: SummarizerSpec::Lead { n },
            block_trigrams: false,
            max_words: 120,
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let table = KeywordTable::default();
        let config = GenConfig::default();
        let settings = lead(1);
        let sequential: Vec<SummaryHypothesis> = docs()
            .iter()
            .map(|d| {
                summarize_document(d, &config, &table, |j| {
                    builtin_partial(j, &settings.spec, false, 120)
                })
                .hypothesis
            })
            .collect();
        for workers in [1, 2, 4, 8] {
            let s = CorpusSummarizer::new(settings.clone(), table.clone(), config.clone(), workers);
            let got: Vec<SummaryHypothesis> =
                s.summarize(&docs()).into_iter().map(|(h, _)| h).collect();
            assert_eq!(got, sequential, "workers = {workers}");
        }
        assert_eq!(sequential[0].parts.len(), 4);
        assert_eq!(sequential[0].parts[1].section_type, SectionType::Methods);
    }

    #[test]
    fn stream_keeps_record_positions() {
        let mut records: Vec<Result<Document, RecordError>> = docs().into_iter().map(Ok).collect();
        records.insert(
            2,
            Err(RecordError {
                line: 3,
                kind: crate::dataset::RecordErrorKind::MissingField("sections"),
            }),
        );
        let items: Vec<CorpusItem> = summarize_corpus(
            records,
            lead(1),
            KeywordTable::default(),
            GenConfig::default(),
            3,
        )
        .collect();
        assert_eq!(items.len(), 6);
        assert!(matches!(&items[2], CorpusItem::Skipped(d) if d.line == Some(3)));
        let ids: Vec<String> = items
            .iter()
            .filter_map(|i| match i {
                CorpusItem::Summary { hypothesis, .. } => Some(hypothesis.doc_id.clone()),
                CorpusItem::Skipped(_) => None,
            })
            .collect();
        assert_eq!(ids, ["d0", "d1", "d2", "d3", "d4"]);
    }

    #[test]
    fn empty_stream() {
        let items: Vec<CorpusItem> = summarize_corpus(
            Vec::new(),
            lead(1),
            KeywordTable::default(),
            GenConfig::default(),
            2,
        )
        .collect();
        assert!(items.is_empty());
    }

    #[test]
    fn no_selected_section_is_diagnosed() {
        let d = Document::from_text("x", [("Preface", "Some words.")], "Words.").unwrap();
        let s = CorpusSummarizer::new(lead(1), KeywordTable::default(), GenConfig::default(), 1);
        let out = s.summarize(&[d]);
        assert_eq!(out[0].0.final_summary, "");
        assert_eq!(out[0].1.len(), 1);
    }

    #[test]
    fn sections_are_summarized_independently() {
        let d = &docs()[0];
        let permuted = Document::new(
            "d0",
            d.sections()
                .iter()
                .rev()
                .map(|s| (s.header().to_owned(), s.sentences().to_vec())),
            d.summary().to_vec(),
        )
        .unwrap();
        let s = CorpusSummarizer::new(lead(1), KeywordTable::default(), GenConfig::default(), 2);
        let a = &s.summarize(std::slice::from_ref(d))[0].0;
        let b = &s.summarize(&[permuted])[0].0;
        let by_type = |h: &SummaryHypothesis| {
            let mut v: Vec<(SectionType, String)> = h
                .parts
                .iter()
                .map(|p| (p.section_type, p.partial.clone()))
                .collect();
            v.sort();
            v
        };
        assert_eq!(by_type(a), by_type(b));
    }
}
