//! ROUGE-N and ROUGE-L scoring, plus a percentile bootstrap for corpus means.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 0x5eed_da5c;
pub const DEFAULT_RESAMPLES: usize = 1000;
pub const DEFAULT_CONFIDENCE: f64 = 0.95;

/// Length of the longest common subsequence of `x` and `y`.
///
/// Classic O(|x|·|y|) dynamic program keeping a single row.
pub fn lcs_length<T: PartialEq>(x: &[T], y: &[T]) -> usize {
    let (long, short) = if x.len() >= y.len() { (x, y) } else { (y, x) };
    if short.is_empty() {
        return 0;
    }
    let mut row = vec![0usize; short.len() + 1];
    for a in long {
        let mut diag = 0;
        for (j, b) in short.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if a == b { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[short.len()]
}

/// ROUGE-L precision of candidate `y` against `x`: `LCS(x, y) / |y|`.
///
/// An empty candidate scores 0.
pub fn rouge_l_precision<T: PartialEq>(x: &[T], y: &[T]) -> f64 {
    if y.is_empty() {
        log::warn!("ROUGE-L precision with an empty candidate; scoring 0");
        return 0.0;
    }
    lcs_length(x, y) as f64 / y.len() as f64
}

/// Which ROUGE measure to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RougeVariant {
    /// n-gram overlap with clipped counts; `n` must be at least 1.
    Ngram(usize),
    Lcs,
}

impl RougeVariant {
    pub const ROUGE_1: RougeVariant = RougeVariant::Ngram(1);
    pub const ROUGE_2: RougeVariant = RougeVariant::Ngram(2);
    pub const ROUGE_L: RougeVariant = RougeVariant::Lcs;

    /// The variants in the standard evaluation report.
    pub const REPORT: [RougeVariant; 3] = [Self::ROUGE_1, Self::ROUGE_2, Self::ROUGE_L];
}

impl fmt::Display for RougeVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RougeVariant::Ngram(n) => write!(f, "rouge-{n}"),
            RougeVariant::Lcs => f.write_str("rouge-l"),
        }
    }
}

/// Precision, recall and F1 of one ROUGE variant.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RougeScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl RougeScore {
    pub const ZERO: RougeScore = RougeScore {
        precision: 0.0,
        recall: 0.0,
        f1: 0.0,
    };

    /// Builds a score from `overlap` hits over the candidate and reference
    /// unit counts. Zero denominators yield zero components.
    pub fn from_counts(overlap: usize, candidate_units: usize, reference_units: usize) -> Self {
        let precision = ratio(overlap, candidate_units);
        let recall = ratio(overlap, reference_units);
        RougeScore::from_pr(precision, recall)
    }

    pub fn from_pr(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        RougeScore {
            precision,
            recall,
            f1,
        }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Multiset of the n-grams of `tokens`.
pub fn ngram_counts<T: Ord>(tokens: &[T], n: usize) -> BTreeMap<&[T], usize> {
    let mut counts = BTreeMap::new();
    if n == 0 || tokens.len() < n {
        return counts;
    }
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

/// Scores `candidate` against `reference`.
///
/// ROUGE-N counts each candidate n-gram at most as often as it occurs in the
/// reference. ROUGE-L uses LCS over the full token sequences. F1 is the
/// unweighted harmonic mean.
pub fn rouge_score<T: Ord>(candidate: &[T], reference: &[T], variant: RougeVariant) -> RougeScore {
    match variant {
        RougeVariant::Ngram(n) => {
            if n == 0 {
                return RougeScore::ZERO;
            }
            let cand = ngram_counts(candidate, n);
            let refs = ngram_counts(reference, n);
            let overlap = cand
                .iter()
                .map(|(gram, &c)| c.min(refs.get(gram).copied().unwrap_or(0)))
                .sum();
            let cand_total = candidate.len().saturating_sub(n - 1);
            let ref_total = reference.len().saturating_sub(n - 1);
            RougeScore::from_counts(overlap, cand_total, ref_total)
        }
        RougeVariant::Lcs => {
            let lcs = lcs_length(candidate, reference);
            RougeScore::from_counts(lcs, candidate.len(), reference.len())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BootstrapError {
    #[error("bootstrap needs at least one score")]
    Empty,
    #[error("confidence level {0} is outside (0, 1)")]
    Confidence(f64),
    #[error("resample count must be positive")]
    NoResamples,
}

/// Percentile-bootstrap confidence interval for the mean of `scores`.
///
/// Draws `resamples` samples of size `scores.len()` with replacement from a
/// ChaCha8 stream seeded with `seed`, and returns the `(1-c)/2` and `(1+c)/2`
/// empirical quantiles of the resampled means.
pub fn bootstrap_ci(
    scores: &[f64],
    resamples: usize,
    confidence: f64,
    seed: u64,
) -> Result<(f64, f64), BootstrapError> {
    if scores.is_empty() {
        return Err(BootstrapError::Empty);
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(BootstrapError::Confidence(confidence));
    }
    if resamples == 0 {
        return Err(BootstrapError::NoResamples);
    }
    let first = scores[0];
    if scores.iter().all(|&s| s == first) {
        return Ok((first, first));
    }

    let n = scores.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| {
            let total: f64 = (0..n).map(|_| scores[rng.gen_range(0..n)]).sum();
            total / n as f64
        })
        .collect();
    means.sort_by(f64::total_cmp);

    let alpha = 1.0 - confidence;
    let lo = libm::floor(alpha / 2.0 * resamples as f64) as usize;
    let hi = (libm::ceil((1.0 - alpha / 2.0) * resamples as f64) as usize).saturating_sub(1);
    let lo = lo.min(resamples - 1);
    let hi = hi.clamp(lo, resamples - 1);
    Ok((means[lo], means[hi]))
}
