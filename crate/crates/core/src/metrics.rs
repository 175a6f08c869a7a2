//! Adjusted sentence-level BLEU and hallucination counting.
//!
//! The adjusted score only looks at unigram and bigram precision, weighted
//! 0.8 and 0.2. Unigram precision is not smoothed, so a hypothesis sharing no
//! word with its reference scores exactly 0. Bigram precision adds 0.1 to
//! both the matched and the total count.

use std::collections::HashMap;
use std::hash::Hash;

use serde::Serialize;

use crate::error::MetricsError;

pub const UNIGRAM_WEIGHT: f64 = 0.8;
pub const BIGRAM_WEIGHT: f64 = 0.2;
pub const BIGRAM_SMOOTHING: f64 = 0.1;
pub const DEFAULT_THRESHOLD: f64 = 10.0;
pub const DEFAULT_MARGIN: f64 = 20.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AdjustedBleu {
    /// In [0, 100].
    pub score: f64,
    pub p1: f64,
    pub p2_smoothed: f64,
    pub brevity_penalty: f64,
    /// Set for an empty hypothesis, which scores 0.
    pub degenerate: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BleuOptions {
    pub brevity_penalty: bool,
    pub lowercase: bool,
}

impl Default for BleuOptions {
    fn default() -> Self {
        BleuOptions {
            brevity_penalty: true,
            lowercase: true,
        }
    }
}

fn ngram_counts<T: Eq + Hash>(tokens: &[T], n: usize) -> HashMap<&[T], usize> {
    let mut counts = HashMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

fn clipped_matches<T: Eq + Hash>(hyp: &[T], reference: &[T], n: usize) -> usize {
    let ref_counts = ngram_counts(reference, n);
    ngram_counts(hyp, n)
        .into_iter()
        .map(|(gram, c)| c.min(ref_counts.get(gram).copied().unwrap_or(0)))
        .sum()
}

/// Scores an already tokenized (and, if wanted, lowercased) hypothesis.
pub fn adjusted_bleu<T: Eq + Hash>(
    hyp: &[T],
    reference: &[T],
    brevity_penalty: bool,
) -> Result<AdjustedBleu, MetricsError> {
    if reference.is_empty() {
        return Err(MetricsError::EmptyReference);
    }
    if hyp.is_empty() {
        return Ok(AdjustedBleu {
            score: 0.0,
            p1: 0.0,
            p2_smoothed: 1.0,
            brevity_penalty: 1.0,
            degenerate: true,
        });
    }
    let h = hyp.len() as f64;
    let p1 = clipped_matches(hyp, reference, 1) as f64 / h;
    let bigrams = hyp.len() - 1;
    let p2_smoothed = (clipped_matches(hyp, reference, 2) as f64 + BIGRAM_SMOOTHING)
        / (bigrams as f64 + BIGRAM_SMOOTHING);
    let bp = if !brevity_penalty || hyp.len() >= reference.len() {
        1.0
    } else {
        (1.0 - reference.len() as f64 / h).exp()
    };
    let score = if p1 == 0.0 {
        0.0
    } else {
        100.0 * bp * (UNIGRAM_WEIGHT * p1.ln() + BIGRAM_WEIGHT * p2_smoothed.ln()).exp()
    };
    Ok(AdjustedBleu {
        // exp(ln 1) may land a hair above 100
        score: score.min(100.0),
        p1,
        p2_smoothed,
        brevity_penalty: bp,
        degenerate: false,
    })
}

/// Whitespace-tokenizes both sides and scores them.
pub fn adjusted_bleu_text(
    hyp: &str,
    reference: &str,
    opts: BleuOptions,
) -> Result<AdjustedBleu, MetricsError> {
    if opts.lowercase {
        let (h, r) = (hyp.to_lowercase(), reference.to_lowercase());
        adjusted_bleu(&words(&h), &words(&r), opts.brevity_penalty)
    } else {
        adjusted_bleu(&words(hyp), &words(reference), opts.brevity_penalty)
    }
}

fn words(s: &str) -> Vec<&str> {
    s.split_whitespace().collect()
}

/// True when the lowercased adjusted BLEU falls below `threshold`.
pub fn is_hallucination(hyp: &str, reference: &str, threshold: f64) -> Result<bool, MetricsError> {
    Ok(adjusted_bleu_text(hyp, reference, BleuOptions::default())?.score < threshold)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HallucinationParams {
    pub threshold: f64,
    pub margin: f64,
    pub brevity_penalty: bool,
}

impl Default for HallucinationParams {
    fn default() -> Self {
        HallucinationParams {
            threshold: DEFAULT_THRESHOLD,
            margin: DEFAULT_MARGIN,
            brevity_penalty: true,
        }
    }
}

/// How a sentence was classified when comparing two systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Neither,
    /// Only A hallucinates and B beats it by at least the margin.
    AOnly,
    BOnly,
    Both,
    /// A hallucinates, B does not, but B is within the margin.
    ANear,
    BNear,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Neither => "none",
            Verdict::AOnly => "a_only",
            Verdict::BOnly => "b_only",
            Verdict::Both => "both",
            Verdict::ANear => "a",
            Verdict::BNear => "b",
        }
    }
}

fn verdict(a: f64, b: f64, p: &HallucinationParams) -> Verdict {
    match (a < p.threshold, b < p.threshold) {
        (false, false) => Verdict::Neither,
        (true, true) => Verdict::Both,
        (true, false) if b >= a + p.margin => Verdict::AOnly,
        (true, false) => Verdict::ANear,
        (false, true) if a >= b + p.margin => Verdict::BOnly,
        (false, true) => Verdict::BNear,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HallucinationReport {
    pub params: HallucinationParams,
    pub scores_a: Vec<f64>,
    pub scores_b: Option<Vec<f64>>,
    pub flags_a: Vec<bool>,
    pub flags_b: Option<Vec<bool>>,
    /// Only filled when two systems are compared.
    pub verdicts: Option<Vec<Verdict>>,
    pub a_only: usize,
    pub b_only: usize,
}

impl HallucinationReport {
    pub fn len(&self) -> usize {
        self.scores_a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores_a.is_empty()
    }

    pub fn count_a(&self) -> usize {
        self.flags_a.iter().filter(|&&f| f).count()
    }

    pub fn count_b(&self) -> Option<usize> {
        self.flags_b
            .as_ref()
            .map(|f| f.iter().filter(|&&x| x).count())
    }

    /// `index<TAB>scoreA[<TAB>scoreB]<TAB>flag` per sentence, 0-based index.
    pub fn write_tsv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        for i in 0..self.len() {
            write!(w, "{i}\t{:.4}", self.scores_a[i])?;
            match (&self.scores_b, &self.verdicts) {
                (Some(b), Some(v)) => writeln!(w, "\t{:.4}\t{}", b[i], v[i].label())?,
                _ => writeln!(w, "\t{}", if self.flags_a[i] { "H" } else { "-" })?,
            }
        }
        Ok(())
    }

    pub fn summary(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("sentences".to_string(), self.len().to_string()),
            ("threshold".to_string(), self.params.threshold.to_string()),
            ("hallucinations_a".to_string(), self.count_a().to_string()),
        ];
        if let Some(b) = self.count_b() {
            out.push(("margin".to_string(), self.params.margin.to_string()));
            out.push(("hallucinations_b".to_string(), b.to_string()));
            out.push(("a_only".to_string(), self.a_only.to_string()));
            out.push(("b_only".to_string(), self.b_only.to_string()));
        }
        out
    }
}

fn score_all<S: AsRef<str> + Sync, R: AsRef<str> + Sync>(
    hyps: &[S],
    refs: &[R],
    bp: bool,
) -> Result<Vec<f64>, MetricsError> {
    use rayon::prelude::*;
    let opts = BleuOptions {
        brevity_penalty: bp,
        lowercase: true,
    };
    (0..hyps.len())
        .into_par_iter()
        .map(|i| adjusted_bleu_text(hyps[i].as_ref(), refs[i].as_ref(), opts).map(|b| b.score))
        .collect()
}

/// Scores one system, and optionally a second one, against the references.
pub fn hallucination_report<S, R>(
    refs: &[R],
    sys_a: &[S],
    sys_b: Option<&[S]>,
    params: HallucinationParams,
) -> Result<HallucinationReport, MetricsError>
where
    S: AsRef<str> + Sync,
    R: AsRef<str> + Sync,
{
    let check = |what, got: usize| {
        if got == refs.len() {
            Ok(())
        } else {
            Err(MetricsError::LengthMismatch {
                what,
                got,
                expected: refs.len(),
            })
        }
    };
    check("system A", sys_a.len())?;
    if let Some(b) = sys_b {
        check("system B", b.len())?;
    }
    let scores_a = score_all(sys_a, refs, params.brevity_penalty)?;
    let flags_a: Vec<bool> = scores_a.iter().map(|&s| s < params.threshold).collect();
    let mut report = HallucinationReport {
        params,
        scores_a,
        scores_b: None,
        flags_b: None,
        verdicts: None,
        flags_a,
        a_only: 0,
        b_only: 0,
    };
    if let Some(b) = sys_b {
        let scores_b = score_all(b, refs, params.brevity_penalty)?;
        let verdicts: Vec<Verdict> = report
            .scores_a
            .iter()
            .zip(&scores_b)
            .map(|(&a, &b)| verdict(a, b, &params))
            .collect();
        report.a_only = verdicts.iter().filter(|v| **v == Verdict::AOnly).count();
        report.b_only = verdicts.iter().filter(|v| **v == Verdict::BOnly).count();
        report.flags_b = Some(scores_b.iter().map(|&s| s < params.threshold).collect());
        report.scores_b = Some(scores_b);
        report.verdicts = Some(verdicts);
    }
    Ok(report)
}

/// Counts sentences where exactly one system hallucinates and the other
/// scores at least `margin` points higher.
pub fn disjoint_hallucinations<S, R>(
    sys_a: &[S],
    sys_b: &[S],
    refs: &[R],
    threshold: f64,
    margin: f64,
) -> Result<HallucinationReport, MetricsError>
where
    S: AsRef<str> + Sync,
    R: AsRef<str> + Sync,
{
    let params = HallucinationParams {
        threshold,
        margin,
        ..Default::default()
    };
    hallucination_report(refs, sys_a, Some(sys_b), params)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub frequency: f64,
}

/// Normalized frequencies over `[0, 100]` in bins of `bin_width`. Bins are
/// half-open except the last, which also holds 100.
pub fn score_histogram(scores: &[f64], bin_width: f64) -> Result<Vec<HistogramBin>, MetricsError> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(MetricsError::BinWidth(bin_width));
    }
    if scores.is_empty() {
        return Err(MetricsError::EmptyScores);
    }
    if let Some(&bad) = scores.iter().find(|s| !(0.0..=100.0).contains(*s)) {
        return Err(MetricsError::ScoreRange(bad));
    }
    let n_bins = ((100.0 / bin_width) - 1e-9).ceil().max(1.0) as usize;
    let mut counts = vec![0usize; n_bins];
    for &s in scores {
        let i = ((s / bin_width).floor() as usize).min(n_bins - 1);
        counts[i] += 1;
    }
    let total = scores.len() as f64;
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| HistogramBin {
            lower: i as f64 * bin_width,
            upper: ((i + 1) as f64 * bin_width).min(100.0),
            frequency: c as f64 / total,
        })
        .collect())
}

pub fn write_histogram_tsv<W: std::io::Write>(
    bins: &[HistogramBin],
    mut w: W,
) -> std::io::Result<()> {
    for b in bins {
        writeln!(w, "{}\t{}\t{:.6}", b.lower, b.upper, b.frequency)?;
    }
    Ok(())
}
