//! Adequacy tooling and cross-level comparison experiments: Gini
//! coefficient, discrete power-law (Lotka) fit, rank correlation, method
//! pair comparisons across aggregation levels, and per-group score
//! summaries.
//!
//! Everything here is deterministic given its inputs: collections iterate in
//! key order, totals use pairwise summation upstream, and the comparison
//! reports reproduce bit-for-bit for a fixed corpus.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::aggregate::{object_scores, AggregateError, CountingMethod};
use crate::corpus::{AttributionMap, CorpusError, EntityLevel, Publication};
use crate::registry::{self, RegistryError};

/// Failure modes of the statistics and experiments.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("no scores given")]
    EmptyScores,
    #[error("undefined Gini: all scores are zero")]
    AllZero,
    #[error("negative score {value} at position {index}")]
    Negative { index: usize, value: f64 },
    #[error("insufficient data: {got} authors, need at least {need}")]
    InsufficientData { got: usize, need: usize },
    #[error("rankings have different lengths: {a} vs {b}")]
    MismatchedLength { a: usize, b: usize },
    #[error("too few common objects: {got}, need at least 2")]
    TooFewCommon { got: usize },
    #[error("rank correlation undefined: an input has zero rank variance")]
    ZeroVariance,
    #[error("too few groups: {got}, need at least 2 non-empty")]
    TooFewGroups { got: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error(transparent)]
    Aggregate(#[from] AggregateError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

// ---------------------------------------------------------------------------
// Gini
// ---------------------------------------------------------------------------

/// Gini coefficient of a non-negative score distribution: 0 for perfect
/// equality, approaching 1 as scores concentrate.
pub fn gini(scores: &[f64]) -> Result<f64, HarnessError> {
    if scores.is_empty() {
        return Err(HarnessError::EmptyScores);
    }
    for (index, &value) in scores.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(HarnessError::Negative { index, value });
        }
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    let total: f64 = sorted.iter().sum();
    if total == 0.0 {
        return Err(HarnessError::AllZero);
    }
    let n = sorted.len() as f64;
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(i, x)| (i as f64 + 1.0) * x)
        .sum();
    Ok(2.0 * weighted / (n * total) - (n + 1.0) / n)
}

// ---------------------------------------------------------------------------
// Lotka fit
// ---------------------------------------------------------------------------

/// Truncation point of the zeta-function sums.
const ZETA_CUTOFF: u64 = 100_000;
const MIN_AUTHORS: usize = 10;
const ALPHA_LO: f64 = 1.01;
const ALPHA_HI: f64 = 12.0;

/// Result of fitting a discrete power law to publication counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LotkaFit {
    /// Maximum-likelihood exponent; infinite in the degenerate all-ones case.
    pub exponent: f64,
    /// Kolmogorov–Smirnov distance between the empirical and fitted
    /// distributions; smaller is better.
    pub ks_distance: f64,
    pub authors: usize,
    /// True when every author has exactly one publication, which any
    /// exponent fits in the limit.
    pub degenerate: bool,
}

/// Truncated Riemann zeta with a continuous tail correction.
fn zeta(alpha: f64) -> f64 {
    let head: f64 = (1..=ZETA_CUTOFF).map(|k| (k as f64).powf(-alpha)).sum();
    head + (ZETA_CUTOFF as f64).powf(1.0 - alpha) / (alpha - 1.0)
}

/// Fits a discrete power law `P(k) ∝ k^(-exponent)` to per-author
/// publication counts by maximum likelihood, with a golden-section search
/// over the exponent and a Kolmogorov–Smirnov fit statistic.
pub fn lotka_fit(counts: &BTreeMap<String, u64>) -> Result<LotkaFit, HarnessError> {
    if counts.len() < MIN_AUTHORS {
        return Err(HarnessError::InsufficientData {
            got: counts.len(),
            need: MIN_AUTHORS,
        });
    }
    if let Some((author, _)) = counts.iter().find(|(_, &c)| c == 0) {
        return Err(HarnessError::Parameter(format!(
            "publication counts must be positive, {author} has 0"
        )));
    }
    let n = counts.len() as f64;
    if counts.values().all(|&c| c == 1) {
        return Ok(LotkaFit {
            exponent: f64::INFINITY,
            ks_distance: 0.0,
            authors: counts.len(),
            degenerate: true,
        });
    }

    let log_sum: f64 = counts.values().map(|&c| (c as f64).ln()).sum();
    let log_likelihood = |alpha: f64| -alpha * log_sum - n * zeta(alpha).ln();

    // Golden-section maximization over the exponent window.
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (ALPHA_LO, ALPHA_HI);
    let mut a = hi - phi * (hi - lo);
    let mut b = lo + phi * (hi - lo);
    let (mut fa, mut fb) = (log_likelihood(a), log_likelihood(b));
    for _ in 0..90 {
        if fa > fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = log_likelihood(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = log_likelihood(b);
        }
    }
    let exponent = 0.5 * (lo + hi);

    // KS distance over the distinct observed counts.
    let z = zeta(exponent);
    let mut histogram: BTreeMap<u64, usize> = BTreeMap::new();
    for &c in counts.values() {
        *histogram.entry(c).or_insert(0) += 1;
    }
    let mut ks: f64 = 0.0;
    let mut empirical = 0.0;
    let mut theoretical_head = 0.0;
    let mut next = 1u64;
    for (&k, &count) in &histogram {
        while next <= k.min(ZETA_CUTOFF) {
            theoretical_head += (next as f64).powf(-exponent);
            next += 1;
        }
        let theoretical = if k <= ZETA_CUTOFF {
            theoretical_head / z
        } else {
            // Continuous tail beyond the truncation point.
            let tail = (k as f64).powf(1.0 - exponent) / (exponent - 1.0);
            1.0 - tail / z
        };
        empirical += count as f64 / n;
        ks = ks.max((empirical - theoretical.min(1.0)).abs());
    }
    Ok(LotkaFit {
        exponent,
        ks_distance: ks,
        authors: counts.len(),
        degenerate: false,
    })
}

/// Draws `count` samples from the discrete power law with the given
/// exponent, truncated at the same cutoff the fit uses. Deterministic for a
/// fixed seed.
pub fn sample_power_law(count: usize, exponent: f64, seed: u64) -> Result<Vec<u64>, HarnessError> {
    if exponent <= 1.0 || !exponent.is_finite() {
        return Err(HarnessError::Parameter(format!(
            "power-law exponent must be finite and > 1, got {exponent}"
        )));
    }
    let weights: Vec<f64> = (1..=ZETA_CUTOFF)
        .map(|k| (k as f64).powf(-exponent))
        .collect();
    let total: f64 = weights.iter().sum();
    let mut cumulative = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in &weights {
        acc += w / total;
        cumulative.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let u: f64 = rng.random();
            match cumulative.binary_search_by(|c| c.partial_cmp(&u).expect("finite")) {
                Ok(i) | Err(i) => i as u64 + 1,
            }
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Spearman rank correlation
// ---------------------------------------------------------------------------

/// Average ranks (1-based), ties sharing the mean of their positions.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).expect("finite scores"));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + 1 + j + 1) as f64 / 2.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation of two paired score lists, with average-rank
/// tie handling.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64, HarnessError> {
    if a.len() != b.len() {
        return Err(HarnessError::MismatchedLength {
            a: a.len(),
            b: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(HarnessError::TooFewCommon { got: a.len() });
    }
    let ra = average_ranks(a);
    let rb = average_ranks(b);
    let n = ra.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - mean) * (y - mean);
        var_a += (x - mean).powi(2);
        var_b += (y - mean).powi(2);
    }
    if var_a == 0.0 || var_b == 0.0 {
        return Err(HarnessError::ZeroVariance);
    }
    Ok(cov / (var_a * var_b).sqrt())
}

// ---------------------------------------------------------------------------
// Method-pair comparison
// ---------------------------------------------------------------------------

/// One object's score under the two compared methods.
#[derive(Debug, Clone, PartialEq)]
pub struct ScorePair {
    pub object: String,
    pub score_a: f64,
    pub score_b: f64,
}

/// Comparison of one method pair at one aggregation level.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub method_a: String,
    pub method_b: String,
    pub level: EntityLevel,
    /// Scores of the objects both methods credited, in object order.
    pub pairs: Vec<ScorePair>,
    pub spearman_rho: f64,
    /// Share of the top-k objects (by score) the two methods agree on.
    pub top_k_overlap: f64,
    pub k: usize,
}

impl ComparisonReport {
    /// Plot-data CSV: one row per common object with both scores.
    pub fn pairs_csv(&self) -> String {
        let mut out = String::from("object,score_a,score_b\n");
        for p in &self.pairs {
            let _ = writeln!(out, "{},{},{}", p.object, p.score_a, p.score_b);
        }
        out
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} vs {} at {} level: rho {:.4} over {} objects, top-{} overlap {:.2}",
            self.method_a,
            self.method_b,
            self.level,
            self.spearman_rho,
            self.pairs.len(),
            self.k,
            self.top_k_overlap
        )
    }
}

/// Summary CSV over a batch of comparison reports.
pub fn comparison_csv(reports: &[ComparisonReport]) -> String {
    let mut out = String::from("method_a,method_b,level,objects,spearman_rho,k,top_k_overlap\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.method_a,
            r.method_b,
            r.level,
            r.pairs.len(),
            r.spearman_rho,
            r.k,
            r.top_k_overlap
        );
    }
    out
}

fn top_objects(pairs: &[ScorePair], score: impl Fn(&ScorePair) -> f64, k: usize) -> BTreeSet<&str> {
    let mut ranked: Vec<&ScorePair> = pairs.iter().collect();
    ranked.sort_by(|x, y| {
        score(y)
            .partial_cmp(&score(x))
            .expect("finite scores")
            .then_with(|| x.object.cmp(&y.object))
    });
    ranked.iter().take(k).map(|p| p.object.as_str()).collect()
}

/// Scores every named method at author basic level against each requested
/// object level and correlates all method pairs. One report per (pair,
/// level), in deterministic order: levels as given, pairs in list order.
pub fn run_comparison(
    method_names: &[&str],
    publications: &[Publication],
    levels: &[EntityLevel],
    top_k: usize,
) -> Result<Vec<ComparisonReport>, HarnessError> {
    if method_names.len() < 2 {
        return Err(HarnessError::Parameter(format!(
            "need at least two methods to compare, got {}",
            method_names.len()
        )));
    }
    if top_k == 0 {
        return Err(HarnessError::Parameter("top_k must be at least 1".into()));
    }
    let mut reports = Vec::new();
    for &level in levels {
        let attribution =
            AttributionMap::derive(publications, EntityLevel::Author, level, BTreeMap::new())?;
        let mut tables = Vec::with_capacity(method_names.len());
        for name in method_names {
            let f = registry::build(name)?;
            let method = CountingMethod::new(f, EntityLevel::Author, level)?;
            tables.push(object_scores(&method, publications, &attribution)?);
        }
        for i in 0..tables.len() {
            for j in (i + 1)..tables.len() {
                let objects: Vec<String> = tables[i]
                    .sorted_rows()
                    .into_iter()
                    .map(|r| r.object)
                    .filter(|o| tables[j].score_of(o).is_some())
                    .collect();
                let mut pairs: Vec<ScorePair> = objects
                    .into_iter()
                    .map(|object| ScorePair {
                        score_a: tables[i].score_of(&object).expect("filtered"),
                        score_b: tables[j].score_of(&object).expect("filtered"),
                        object,
                    })
                    .collect();
                pairs.sort_by(|x, y| x.object.cmp(&y.object));
                if pairs.len() < 2 {
                    return Err(HarnessError::TooFewCommon { got: pairs.len() });
                }
                let a: Vec<f64> = pairs.iter().map(|p| p.score_a).collect();
                let b: Vec<f64> = pairs.iter().map(|p| p.score_b).collect();
                let rho = spearman(&a, &b)?;
                let k = top_k.min(pairs.len());
                let top_a = top_objects(&pairs, |p| p.score_a, k);
                let top_b = top_objects(&pairs, |p| p.score_b, k);
                let overlap = top_a.intersection(&top_b).count() as f64 / k as f64;
                reports.push(ComparisonReport {
                    method_a: method_names[i].to_string(),
                    method_b: method_names[j].to_string(),
                    level,
                    pairs,
                    spearman_rho: rho,
                    top_k_overlap: overlap,
                    k,
                });
            }
        }
    }
    Ok(reports)
}

// ---------------------------------------------------------------------------
// Group comparison
// ---------------------------------------------------------------------------

/// Score statistics of one group of objects.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    pub group: String,
    pub members: usize,
    pub mean: f64,
    pub median: f64,
    pub std_dev: f64,
}

/// Per-group summaries plus the balance statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupComparison {
    /// Non-empty groups in label order.
    pub groups: Vec<GroupSummary>,
    /// Largest group mean divided by smallest; 1 means equal scores across
    /// groups, infinity when some group mean is zero.
    pub extreme_mean_ratio: f64,
    /// Dropped empty groups and unlabeled objects.
    pub warnings: Vec<String>,
}

/// Summarizes object scores per group and reports how far the group means
/// spread. Empty groups are dropped with a warning; fewer than two
/// non-empty groups is an error.
pub fn group_comparison(
    scores: &BTreeMap<String, f64>,
    grouping: &BTreeMap<String, String>,
) -> Result<GroupComparison, HarnessError> {
    let mut warnings = Vec::new();
    let mut members: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for label in grouping.values() {
        members.entry(label).or_default();
    }
    for (object, &score) in scores {
        match grouping.get(object) {
            Some(label) => members
                .get_mut(label.as_str())
                .expect("pre-seeded")
                .push(score),
            None => warnings.push(format!("object {object} has no group label; skipped")),
        }
    }
    let mut groups = Vec::new();
    for (label, mut values) in members {
        if values.is_empty() {
            warnings.push(format!("group {label} has no scored members; dropped"));
            continue;
        }
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let median = if values.len() % 2 == 1 {
            values[values.len() / 2]
        } else {
            0.5 * (values[values.len() / 2 - 1] + values[values.len() / 2])
        };
        let variance = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        groups.push(GroupSummary {
            group: label.to_string(),
            members: values.len(),
            mean,
            median,
            std_dev: variance.sqrt(),
        });
    }
    if groups.len() < 2 {
        return Err(HarnessError::TooFewGroups { got: groups.len() });
    }
    let max_mean = groups
        .iter()
        .map(|g| g.mean)
        .fold(f64::NEG_INFINITY, f64::max);
    let min_mean = groups.iter().map(|g| g.mean).fold(f64::INFINITY, f64::min);
    let extreme_mean_ratio = if min_mean > 0.0 {
        max_mean / min_mean
    } else {
        f64::INFINITY
    };
    Ok(GroupComparison {
        groups,
        extreme_mean_ratio,
        warnings,
    })
}
