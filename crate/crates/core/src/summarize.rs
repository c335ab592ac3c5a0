//! Built-in extractive section summarizers and the summarizer spec.
//!
//! `Lead` keeps the first sentences. `LexRank` ranks sentences by the
//! stationary distribution of a damped random walk over the thresholded
//! cosine-similarity graph. `SumBasic` repeatedly picks the sentence with the
//! highest mean word probability and squares the probabilities of the words
//! it used. External models are reached through an adapter process, which
//! lives in the `dancer` crate.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blocking::TrigramBlocker;
use crate::text::Sentence;

pub const DEFAULT_LEXRANK_THRESHOLD: f64 = 0.1;
pub const DEFAULT_DAMPING: f64 = 0.85;
pub const DEFAULT_MAX_SENTENCES: usize = 3;
pub const DEFAULT_TIMEOUT_MS: u64 = 60_000;
const POWER_ITERATION_TOLERANCE: f64 = 1e-6;
const POWER_ITERATION_LIMIT: usize = 100;

/// Which summarizer runs on each section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SummarizerSpec {
    Lead {
        n: usize,
    },
    LexRank {
        max_sentences: usize,
        threshold: f64,
        damping: f64,
    },
    SumBasic {
        max_sentences: usize,
    },
    /// A line-delimited JSON adapter process.
    External {
        command: String,
        timeout_ms: u64,
    },
}

impl SummarizerSpec {
    pub fn lexrank(max_sentences: usize) -> Self {
        SummarizerSpec::LexRank {
            max_sentences,
            threshold: DEFAULT_LEXRANK_THRESHOLD,
            damping: DEFAULT_DAMPING,
        }
    }

    pub fn validate(&self) -> Result<(), SummarizeError> {
        let bad = |msg: &str| Err(SummarizeError::InvalidSpec(msg.to_string()));
        match self {
            SummarizerSpec::Lead { n: 0 } => bad("lead needs n >= 1"),
            SummarizerSpec::LexRank {
                max_sentences: 0, ..
            }
            | SummarizerSpec::SumBasic { max_sentences: 0 } => bad("max_sentences must be >= 1"),
            SummarizerSpec::LexRank { damping, .. } if !(*damping > 0.0 && *damping < 1.0) => {
                bad("damping must be in (0, 1)")
            }
            SummarizerSpec::LexRank { threshold, .. } if !(0.0..=1.0).contains(threshold) => {
                bad("threshold must be in [0, 1]")
            }
            SummarizerSpec::External { command, .. } if command.trim().is_empty() => {
                bad("external command is empty")
            }
            SummarizerSpec::External { timeout_ms: 0, .. } => bad("timeout must be positive"),
            _ => Ok(()),
        }
    }

    pub fn is_external(&self) -> bool {
        matches!(self, SummarizerSpec::External { .. })
    }
}

impl fmt::Display for SummarizerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SummarizerSpec::Lead { n } => write!(f, "lead:{n}"),
            SummarizerSpec::LexRank { max_sentences, .. } => write!(f, "lexrank:{max_sentences}"),
            SummarizerSpec::SumBasic { max_sentences } => write!(f, "sumbasic:{max_sentences}"),
            SummarizerSpec::External { command, .. } => write!(f, "external:{command}"),
        }
    }
}

/// Parses `lead:N`, `lexrank[:K]`, `sumbasic[:K]` or `external:CMD`.
impl FromStr for SummarizerSpec {
    type Err = SummarizeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        let count = |arg: Option<&str>, default: usize| -> Result<usize, SummarizeError> {
            match arg {
                None => Ok(default),
                Some(a) => a
                    .parse()
                    .map_err(|_| SummarizeError::InvalidSpec(alloc::format!("bad count {a:?}"))),
            }
        };
        let spec = match kind {
            "lead" => SummarizerSpec::Lead { n: count(arg, 10)? },
            "lexrank" => SummarizerSpec::lexrank(count(arg, DEFAULT_MAX_SENTENCES)?),
            "sumbasic" => SummarizerSpec::SumBasic {
                max_sentences: count(arg, DEFAULT_MAX_SENTENCES)?,
            },
            "external" => SummarizerSpec::External {
                command: arg.unwrap_or("").to_string(),
                timeout_ms: DEFAULT_TIMEOUT_MS,
            },
            other => {
                return Err(SummarizeError::InvalidSpec(alloc::format!(
                "unknown summarizer {other:?} (expected lead:N, lexrank, sumbasic or external:CMD)"
            )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SummarizeError {
    #[error("invalid summarizer: {0}")]
    InvalidSpec(String),
    #[error("section has no sentences")]
    EmptySource,
    #[error("external summarizers run through an adapter process")]
    NeedsAdapter,
}

/// Summarizes one section with a built-in summarizer.
///
/// With `block_trigrams`, candidate sentences are visited in rank order and
/// one is skipped when appending it would repeat a trigram of the output so
/// far (or of itself).
pub fn summarize_section(
    source: &[Sentence],
    spec: &SummarizerSpec,
    block_trigrams: bool,
) -> Result<Vec<Sentence>, SummarizeError> {
    if source.is_empty() {
        return Err(SummarizeError::EmptySource);
    }
    let (ranked, limit): (Vec<usize>, usize) = match *spec {
        SummarizerSpec::Lead { n } => ((0..source.len()).collect(), n),
        SummarizerSpec::LexRank {
            max_sentences,
            threshold,
            damping,
        } => (
            rank_desc(&lexrank_scores(source, threshold, damping)),
            max_sentences,
        ),
        SummarizerSpec::SumBasic { max_sentences } => (sumbasic_order(source), max_sentences),
        SummarizerSpec::External { .. } => return Err(SummarizeError::NeedsAdapter),
    };

    let mut picked: Vec<usize> = if block_trigrams {
        let mut blocker = TrigramBlocker::new();
        let mut picked = Vec::new();
        for i in ranked {
            if picked.len() == limit {
                break;
            }
            let mut trial = blocker.clone();
            let ok = source[i].tokens().iter().all(|t| {
                let allowed = trial.allows(t);
                trial.push(t.clone());
                allowed
            });
            if ok {
                blocker = trial;
                picked.push(i);
            }
        }
        picked
    } else {
        ranked.into_iter().take(limit).collect()
    };
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| source[i].clone()).collect())
}

/// Indices sorted by descending score, ties by ascending index.
fn rank_desc(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

fn term_frequencies(sentence: &Sentence) -> BTreeMap<&str, f64> {
    let mut tf = BTreeMap::new();
    for t in sentence.tokens() {
        *tf.entry(t.as_str()).or_insert(0.0) += 1.0;
    }
    tf
}

/// Cosine similarity of raw term-frequency vectors.
pub fn cosine(a: &BTreeMap<&str, f64>, b: &BTreeMap<&str, f64>) -> f64 {
    let dot: f64 = a.iter().filter_map(|(w, x)| b.get(w).map(|y| x * y)).sum();
    let na = libm::sqrt(a.values().map(|x| x * x).sum());
    let nb = libm::sqrt(b.values().map(|x| x * x).sum());
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Row-stochastic transition matrix of the thresholded similarity graph.
/// Rows without any edge become uniform.
pub fn lexrank_matrix(source: &[Sentence], threshold: f64) -> Vec<Vec<f64>> {
    let n = source.len();
    let tfs: Vec<_> = source.iter().map(term_frequencies).collect();
    let mut matrix = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if cosine(&tfs[i], &tfs[j]) >= threshold && !tfs[i].is_empty() && !tfs[j].is_empty() {
                matrix[i][j] = 1.0;
            }
        }
        let degree: f64 = matrix[i].iter().sum();
        for x in &mut matrix[i] {
            *x = if degree > 0.0 {
                *x / degree
            } else {
                1.0 / n as f64
            };
        }
    }
    matrix
}

/// LexRank centrality of each sentence; non-negative and summing to 1.
pub fn lexrank_scores(source: &[Sentence], threshold: f64, damping: f64) -> Vec<f64> {
    let n = source.len();
    if n == 0 {
        return Vec::new();
    }
    let matrix = lexrank_matrix(source, threshold);
    let teleport = (1.0 - damping) / n as f64;
    let mut p = vec![1.0 / n as f64; n];
    for _ in 0..POWER_ITERATION_LIMIT {
        let mut next = vec![teleport; n];
        for (i, row) in matrix.iter().enumerate() {
            for (j, w) in row.iter().enumerate() {
                next[j] += damping * w * p[i];
            }
        }
        let delta: f64 = next.iter().zip(&p).map(|(a, b)| libm::fabs(a - b)).sum();
        p = next;
        if delta < POWER_ITERATION_TOLERANCE {
            break;
        }
    }
    p
}

/// SumBasic selection order over every sentence of `source`.
pub fn sumbasic_order(source: &[Sentence]) -> Vec<usize> {
    let total: usize = source.iter().map(Sentence::len).sum();
    let mut prob: BTreeMap<&str, f64> = BTreeMap::new();
    for t in source.iter().flat_map(|s| s.tokens()) {
        *prob.entry(t.as_str()).or_insert(0.0) += 1.0;
    }
    for p in prob.values_mut() {
        *p /= total.max(1) as f64;
    }

    let mut remaining: Vec<usize> = (0..source.len()).collect();
    let mut order = Vec::with_capacity(source.len());
    while !remaining.is_empty() {
        let mut best: Option<(usize, f64)> = None;
        for (pos, &i) in remaining.iter().enumerate() {
            let tokens = source[i].tokens();
            let score = if tokens.is_empty() {
                0.0
            } else {
                tokens.iter().map(|t| prob[t.as_str()]).sum::<f64>() / tokens.len() as f64
            };
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((pos, score));
            }
        }
        let (pos, _) = best.expect("remaining is non-empty");
        let chosen = remaining.remove(pos);
        for t in source[chosen].tokens() {
            if let Some(p) = prob.get_mut(t.as_str()) {
                *p *= *p;
            }
        }
        order.push(chosen);
    }
    order
}
