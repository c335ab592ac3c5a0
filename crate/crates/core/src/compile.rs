//! Prediction-time planning and recombination of section summaries.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::examples::GenConfig;
use crate::section::{KeywordTable, SectionType};
use crate::summarize::{summarize_section, SummarizeError, SummarizerSpec};
use crate::text::{count_tokens, tokenize, Document, Sentence};

/// One section to summarize, already truncated to the source cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionJob {
    pub doc_id: String,
    pub section_index: usize,
    pub section_type: SectionType,
    pub sentences: Vec<Sentence>,
}

impl SectionJob {
    /// Source text handed to external summarizers.
    pub fn source_text(&self) -> String {
        let texts: Vec<&str> = self.sentences.iter().map(Sentence::text).collect();
        texts.join(" ")
    }

    /// Adapter request id, unique within a corpus run.
    pub fn request_id(&self) -> String {
        alloc::format!("{}#{}", self.doc_id, self.section_index)
    }
}

/// The selected sections of `doc`, each truncated to
/// `config.max_source_words` tokens. Target information is never read.
pub fn plan_jobs(doc: &Document, config: &GenConfig, table: &KeywordTable) -> Vec<SectionJob> {
    config
        .select(doc, table)
        .into_iter()
        .filter(|(section, _)| !section.sentences().is_empty())
        .map(|(section, section_type)| SectionJob {
            doc_id: doc.doc_id().into(),
            section_index: section.index(),
            section_type,
            sentences: truncate_sentences(section.sentences(), config.max_source_words),
        })
        .collect()
}

/// Keeps whole sentences while they fit in `cap` tokens and cuts the first
/// overflowing sentence at the word where the cap is reached.
pub fn truncate_sentences(sentences: &[Sentence], cap: usize) -> Vec<Sentence> {
    let mut out = Vec::new();
    let mut used = 0;
    for s in sentences {
        if used + s.len() <= cap {
            used += s.len();
            out.push(s.clone());
            continue;
        }
        let head = cap_text(s.text(), cap - used);
        if !head.is_empty() {
            out.push(Sentence::new(head));
        }
        break;
    }
    out
}

/// Longest whitespace-word prefix of `text` holding at most `cap` tokens.
pub fn cap_text(text: &str, cap: usize) -> String {
    let mut out = String::new();
    let mut used = 0;
    for word in text.split_whitespace() {
        let n = count_tokens(word);
        if used + n > cap {
            break;
        }
        used += n;
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Runs a built-in summarizer on one job and caps the result.
pub fn builtin_partial(
    job: &SectionJob,
    spec: &SummarizerSpec,
    block_trigrams: bool,
    max_words: usize,
) -> Result<String, SummarizeError> {
    let picked = summarize_section(&job.sentences, spec, block_trigrams)?;
    let texts: Vec<&str> = picked.iter().map(Sentence::text).collect();
    Ok(cap_text(&texts.join(" "), max_words))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialSummary {
    pub section_index: usize,
    pub section_type: SectionType,
    pub partial: String,
}

/// Per-section summaries of one document and their concatenation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryHypothesis {
    pub doc_id: String,
    #[serde(rename = "final")]
    pub final_summary: String,
    pub parts: Vec<PartialSummary>,
}

impl SummaryHypothesis {
    /// Orders `parts` by section index and joins the non-empty partials with
    /// single spaces.
    pub fn assemble(doc_id: impl Into<String>, mut parts: Vec<PartialSummary>) -> Self {
        parts.sort_by_key(|p| p.section_index);
        let final_summary = join_partials(&parts);
        SummaryHypothesis {
            doc_id: doc_id.into(),
            final_summary,
            parts,
        }
    }

    /// Whether `final_summary` is exactly the concatenation of the parts.
    pub fn is_consistent(&self) -> bool {
        self.parts
            .windows(2)
            .all(|w| w[0].section_index < w[1].section_index)
            && join_partials(&self.parts) == self.final_summary
    }

    /// Share of trigrams in the final summary that repeat an earlier one.
    /// Sections are summarized independently, so this measures cross-section
    /// repetition that nothing removes.
    pub fn repetition_rate(&self) -> f64 {
        let tokens = tokenize(&self.final_summary);
        if tokens.len() < 3 {
            return 0.0;
        }
        let total = tokens.len() - 2;
        let distinct: BTreeSet<&[String]> = tokens.windows(3).collect();
        (total - distinct.len()) as f64 / total as f64
    }
}

fn join_partials(parts: &[PartialSummary]) -> String {
    let texts: Vec<&str> = parts
        .iter()
        .map(|p| p.partial.trim())
        .filter(|p| !p.is_empty())
        .collect();
    texts.join(" ")
}

/// Outcome of summarizing one document sequentially.
#[derive(Debug, Clone)]
pub struct DocumentRun<E> {
    pub hypothesis: SummaryHypothesis,
    /// `(section_index, error)` for every section whose summarizer failed;
    /// those sections contribute an empty partial.
    pub failures: Vec<(usize, E)>,
}

/// Summarizes each planned section of `doc` with `run`, in document order,
/// and concatenates the partials.
pub fn summarize_document<E>(
    doc: &Document,
    config: &GenConfig,
    table: &KeywordTable,
    mut run: impl FnMut(&SectionJob) -> Result<String, E>,
) -> DocumentRun<E> {
    let mut failures = Vec::new();
    let parts = plan_jobs(doc, config, table)
        .iter()
        .map(|job| {
            let partial = run(job).unwrap_or_else(|e| {
                failures.push((job.section_index, e));
                String::new()
            });
            PartialSummary {
                section_index: job.section_index,
                section_type: job.section_type,
                partial,
            }
        })
        .collect();
    DocumentRun {
        hypothesis: SummaryHypothesis::assemble(doc.doc_id(), parts),
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn doc() -> Document {
        Document::from_text(
            "d1",
            [
                ("Introduction", "Intro one. Intro two."),
                ("Related work", "Rel one. Rel two."),
                ("Methods", "Meth one. Meth two."),
            ],
            "A summary.",
        )
        .unwrap()
    }

    #[test]
    fn lead_one_concatenates_selected_sections() {
        let spec = SummarizerSpec::Lead { n: 1 };
        let run = summarize_document(
            &doc(),
            &GenConfig::default(),
            &KeywordTable::default(),
            |j| builtin_partial(j, &spec, false, 120),
        );
        assert!(run.failures.is_empty());
        assert_eq!(run.hypothesis.final_summary, "Intro one. Meth one.");
        let idx: Vec<usize> = run
            .hypothesis
            .parts
            .iter()
            .map(|p| p.section_index)
            .collect();
        assert_eq!(idx, vec![0, 2]);
        assert!(run.hypothesis.is_consistent());
    }

    #[test]
    fn failures_leave_empty_partials() {
        let run = summarize_document(
            &doc(),
            &GenConfig::default(),
            &KeywordTable::default(),
            |j| {
                if j.section_index == 0 {
                    Err("boom")
                } else {
                    Ok(j.source_text())
                }
            },
        );
        assert_eq!(run.failures, vec![(0, "boom")]);
        assert_eq!(run.hypothesis.parts[0].partial, "");
        assert_eq!(run.hypothesis.final_summary, "Meth one. Meth two.");
    }

    #[test]
    fn no_selected_sections_gives_empty_summary() {
        let d = Document::from_text("x", [("Preface", "Words here.")], "S.").unwrap();
        let run = summarize_document(&d, &GenConfig::default(), &KeywordTable::default(), |j| {
            Ok::<_, ()>(j.source_text())
        });
        assert!(run.hypothesis.parts.is_empty());
        assert_eq!(run.hypothesis.final_summary, "");
    }

    #[test]
    fn source_is_truncated_to_cap() {
        let body: Vec<String> = (0..30).map(|i| alloc::format!("w{i}")).collect();
        let body = body.join(" ") + ". Second sentence here.";
        let d = Document::from_text("x", [("Introduction", body.as_str())], "S.").unwrap();
        let cfg = GenConfig {
            max_source_words: 10,
            ..GenConfig::default()
        };
        let jobs = plan_jobs(&d, &cfg, &KeywordTable::default());
        assert_eq!(jobs[0].sentences.len(), 1);
        assert_eq!(tokenize(&jobs[0].source_text()).len(), 10);
        assert_eq!(jobs[0].request_id(), "x#0");
    }

    #[test]
    fn cap_text_counts_tokens_not_words() {
        assert_eq!(cap_text("a , b c", 2), "a , b");
        assert_eq!(cap_text("a b c", 0), "");
        assert_eq!(cap_text("", 5), "");
    }

    #[test]
    fn assemble_sorts_and_measures_repetition() {
        let h = SummaryHypothesis::assemble(
            "d",
            vec![
                PartialSummary {
                    section_index: 3,
                    section_type: SectionType::Conclusion,
                    partial: "the cat sat".to_string(),
                },
                PartialSummary {
                    section_index: 1,
                    section_type: SectionType::Introduction,
                    partial: "the cat sat".to_string(),
                },
            ],
        );
        assert_eq!(h.parts[0].section_index, 1);
        assert_eq!(h.final_summary, "the cat sat the cat sat");
        // four trigrams, one of them a repeat
        assert!((h.repetition_rate() - 0.25).abs() < 1e-12);
    }
}
