//! ROUGE evaluation of summary hypotheses against reference abstracts.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use dancer_core::rouge::{DEFAULT_CONFIDENCE, DEFAULT_RESAMPLES, DEFAULT_SEED};
use dancer_core::text::tokenize;
use dancer_core::SummaryHypothesis;
use dancer_core::{bootstrap_ci, rouge_score, BootstrapError, Document, RougeScore, RougeVariant};
use rayon::prelude::*;
use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalOptions {
    /// Stem tokens with the Snowball English stemmer before scoring.
    pub stem: bool,
    pub resamples: usize,
    pub confidence: f64,
    pub seed: u64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            stem: false,
            resamples: DEFAULT_RESAMPLES,
            confidence: DEFAULT_CONFIDENCE,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no hypothesis matched a reference document")]
    NoPairs,
    #[error("document id {0:?} appears more than once among the {1}")]
    DuplicateId(String, &'static str),
    #[error(transparent)]
    Bootstrap(#[from] BootstrapError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantReport {
    pub variant: String,
    pub mean: RougeScore,
    /// Bootstrap interval of the mean F1.
    pub f1_ci: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_pairs: usize,
    pub confidence: f64,
    pub stemmed: bool,
    pub variants: Vec<VariantReport>,
    /// Hypotheses without a reference, sorted.
    pub unmatched_hypotheses: Vec<String>,
    /// References without a hypothesis, sorted.
    pub unmatched_references: Vec<String>,
}

impl EvalReport {
    pub fn variant(&self, v: RougeVariant) -> Option<&VariantReport> {
        let name = v.to_string();
        self.variants.iter().find(|r| r.variant == name)
    }

    /// Aligned plain-text table.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let pct = (self.confidence * 100.0).round();
        let _ = writeln!(
            s,
            "{:<8} {:>9} {:>9} {:>9}   {:>3}% CI (f1)",
            "metric", "precision", "recall", "f1", pct
        );
        for r in &self.variants {
            let _ = writeln!(
                s,
                "{:<8} {:>9.4} {:>9.4} {:>9.4}   [{:.4}, {:.4}]",
                r.variant, r.mean.precision, r.mean.recall, r.mean.f1, r.f1_ci.0, r.f1_ci.1
            );
        }
        let _ = writeln!(s, "pairs: {}", self.n_pairs);
        if !self.unmatched_hypotheses.is_empty() || !self.unmatched_references.is_empty() {
            let _ = writeln!(
                s,
                "unmatched: {} hypotheses, {} references",
                self.unmatched_hypotheses.len(),
                self.unmatched_references.len()
            );
        }
        s
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_table())
    }
}

/// Tokenizes `text` for scoring, stemming when asked.
pub fn eval_tokens(text: &str, stem: bool) -> Vec<String> {
    let tokens = tokenize(text);
    if !stem {
        return tokens;
    }
    let stemmer = Stemmer::create(Algorithm::English);
    tokens
        .iter()
        .map(|t| stemmer.stem(t).into_owned())
        .collect()
}

fn stem_all(tokens: Vec<String>, stem: bool) -> Vec<String> {
    if !stem {
        return tokens;
    }
    let stemmer = Stemmer::create(Algorithm::English);
    tokens
        .iter()
        .map(|t| stemmer.stem(t).into_owned())
        .collect()
}

/// Scores every (candidate, reference) pair on the report variants.
pub fn score_pairs(pairs: &[(Vec<String>, Vec<String>)]) -> Vec<[RougeScore; 3]> {
    pairs
        .par_iter()
        .map(|(cand, reference)| RougeVariant::REPORT.map(|v| rouge_score(cand, reference, v)))
        .collect()
}

fn sorted_mean(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum::<f64>() / values.len() as f64
}

/// Aggregates per-pair token sequences into a report. Pairs are resampled
/// in the given order, so callers wanting reproducible intervals should pass
/// them in a canonical order.
pub fn evaluate_tokens(
    pairs: &[(Vec<String>, Vec<String>)],
    options: &EvalOptions,
) -> Result<Vec<VariantReport>, EvalError> {
    if pairs.is_empty() {
        return Err(EvalError::NoPairs);
    }
    let scores = score_pairs(pairs);
    RougeVariant::REPORT
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let column: Vec<RougeScore> = scores.iter().map(|s| s[i]).collect();
            let f1: Vec<f64> = column.iter().map(|s| s.f1).collect();
            let f1_ci = bootstrap_ci(&f1, options.resamples, options.confidence, options.seed)?;
            Ok(VariantReport {
                variant: v.to_string(),
                mean: RougeScore {
                    precision: sorted_mean(column.iter().map(|s| s.precision).collect()),
                    recall: sorted_mean(column.iter().map(|s| s.recall).collect()),
                    f1: sorted_mean(f1),
                },
                f1_ci,
            })
        })
        .collect()
}

/// Joins hypotheses and references on `doc_id` and scores each final
/// summary against the reference abstract.
pub fn evaluate(
    hypotheses: impl IntoIterator<Item = SummaryHypothesis>,
    references: impl IntoIterator<Item = Document>,
    options: &EvalOptions,
) -> Result<EvalReport, EvalError> {
    let mut hyps: BTreeMap<String, String> = BTreeMap::new();
    for h in hypotheses {
        if hyps.contains_key(&h.doc_id) {
            return Err(EvalError::DuplicateId(h.doc_id, "hypotheses"));
        }
        hyps.insert(h.doc_id, h.final_summary);
    }
    let mut refs: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for d in references {
        let id = d.doc_id().to_owned();
        if refs.contains_key(&id) {
            return Err(EvalError::DuplicateId(id, "references"));
        }
        let tokens: Vec<String> = d
            .summary()
            .iter()
            .flat_map(|s| s.tokens().iter().cloned())
            .collect();
        refs.insert(id, tokens);
    }

    let unmatched_hypotheses = hyps
        .keys()
        .filter(|k| !refs.contains_key(*k))
        .cloned()
        .collect();
    let unmatched_references: Vec<String> = refs
        .keys()
        .filter(|k| !hyps.contains_key(*k))
        .cloned()
        .collect();
    let pairs: Vec<(Vec<String>, Vec<String>)> = refs
        .into_iter()
        .filter_map(|(id, reference)| {
            let text = hyps.get(&id)?;
            Some((
                eval_tokens(text, options.stem),
                stem_all(reference, options.stem),
            ))
        })
        .collect();

    let variants = evaluate_tokens(&pairs, options)?;
    Ok(EvalReport {
        n_pairs: pairs.len(),
        confidence: options.confidence,
        stemmed: options.stem,
        variants,
        unmatched_hypotheses,
        unmatched_references,
    })
}
