//! Random-respondent detection.
//!
//! Each completed respondent is scored from the empirical probabilities of
//! the options they chose on exclusive questions, smoothed as
//! `(count + 0.5) / (n + m/2)` so unseen options keep a finite score. The
//! score is oriented so that larger means "more random" before any
//! threshold is applied, and reported in its natural units.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::matrix::ResponseMatrix;
use super::{AnalysisConfig, ScoreKind, ThresholdMethod};

/// Fewer completed respondents than this and detection is not attempted.
pub const MIN_COMPLETED: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomRespondent {
    pub respondent_id: String,
    pub score: f64,
    pub threshold: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomRespondentReport {
    pub score: ScoreKind,
    pub method: ThresholdMethod,
    pub threshold: Option<f64>,
    pub respondents: Vec<RandomRespondent>,
    /// Why detection was skipped, if it was.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

impl RandomRespondentReport {
    pub fn flagged(&self) -> impl Iterator<Item = &RandomRespondent> {
        self.respondents.iter().filter(|r| r.flagged)
    }
}

/// Type-7 (linear interpolation) quantile of a sorted sample.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// [`quantile`] of the sample in which each value occurs `count` times.
fn weighted_quantile(sorted: &[(f64, usize)], q: f64) -> f64 {
    let total: usize = sorted.iter().map(|x| x.1).sum();
    let h = (total - 1) as f64 * q;
    let at = |k: usize| {
        let mut seen = 0;
        for &(v, c) in sorted {
            seen += c;
            if k < seen {
                return v;
            }
        }
        unreachable!("k < total")
    };
    let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
    at(lo) + (h - lo as f64) * (at(hi) - at(lo))
}

fn term(kind: ScoreKind, p: f64) -> f64 {
    match kind {
        ScoreKind::Surprisal => -p.log2(),
        ScoreKind::PLogP => p * p.log2(),
    }
}

/// +1 when a larger score means more random.
fn orientation(kind: ScoreKind) -> f64 {
    match kind {
        ScoreKind::Surprisal => 1.0,
        ScoreKind::PLogP => -1.0,
    }
}

/// Scores completed respondents and flags those on the random side of the
/// threshold. Breakoff records take no part, neither in probability
/// estimates nor in scoring.
pub fn detect_random_respondents(m: &ResponseMatrix<'_>, cfg: &AnalysisConfig) -> RandomRespondentReport {
    let mut report = RandomRespondentReport {
        score: cfg.score,
        method: cfg.threshold,
        threshold: None,
        respondents: Vec::new(),
        skipped: None,
    };
    let completed: Vec<usize> = (0..m.respondents().len())
        .filter(|&r| m.respondents()[r].completed)
        .collect();
    if completed.len() < MIN_COMPLETED {
        report.skipped = Some(format!(
            "insufficient data: {} completed respondents, need {MIN_COMPLETED}",
            completed.len()
        ));
        return report;
    }

    // Smoothed p(option | question) from completed respondents.
    let probs: Vec<Vec<f64>> = (0..m.questions().len())
        .map(|qi| {
            let k = m.questions()[qi].options.len();
            let mut counts = vec![0.0; k];
            for &r in &completed {
                if let Some(c) = m.cell(qi, r) {
                    counts[c.option] += 1.0;
                }
            }
            let n: f64 = counts.iter().sum();
            counts.iter().map(|c| (c + 0.5) / (n + 0.5 * k as f64)).collect()
        })
        .collect();
    // Per respondent, the questions answered and the option chosen.
    let answers: Vec<Vec<(usize, usize)>> = completed
        .iter()
        .map(|&r| {
            (0..m.questions().len())
                .filter_map(|qi| m.cell(qi, r).map(|c| (qi, c.option)))
                .collect()
        })
        .collect();
    let score_of = |a: &[(usize, usize)]| -> f64 { a.iter().map(|&(qi, o)| term(cfg.score, probs[qi][o])).sum() };
    let sign = orientation(cfg.score);
    let scores: Vec<f64> = answers.iter().map(|a| score_of(a)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let b = cfg.bootstrap_b.max(1);
    // Threshold on the oriented scale (larger = more random).
    let oriented_threshold = match cfg.threshold {
        ThresholdMethod::RandomNull => {
            // Drawing from sorted probabilities keeps the threshold
            // unchanged when option ids are relabeled.
            let sorted_probs: Vec<Vec<f64>> = probs
                .iter()
                .map(|ps| {
                    let mut ps = ps.clone();
                    ps.sort_by(f64::total_cmp);
                    ps
                })
                .collect();
            let mut synthetic: Vec<f64> = (0..b)
                .map(|_| {
                    let template = &answers[rng.random_range(0..answers.len())];
                    let s: f64 = template
                        .iter()
                        .map(|&(qi, _)| {
                            let o = rng.random_range(0..sorted_probs[qi].len());
                            term(cfg.score, sorted_probs[qi][o])
                        })
                        .sum();
                    sign * s
                })
                .collect();
            synthetic.sort_by(f64::total_cmp);
            quantile(&synthetic, cfg.alpha)
        }
        ThresholdMethod::PooledPercentile => {
            // b resamples of size n, pooled; kept as draw counts per score.
            let n = scores.len();
            let mut hits = vec![0usize; n];
            for _ in 0..b * n {
                hits[rng.random_range(0..n)] += 1;
            }
            let mut pooled: Vec<(f64, usize)> = scores.iter().map(|s| sign * s).zip(hits).collect();
            pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
            weighted_quantile(&pooled, 1.0 - cfg.alpha)
        }
    };
    let threshold = sign * oriented_threshold;
    report.threshold = Some(threshold);
    report.respondents = completed
        .iter()
        .zip(&scores)
        .map(|(&r, &score)| RandomRespondent {
            respondent_id: m.respondents()[r].respondent_id.clone(),
            score,
            threshold,
            flagged: sign * score > oriented_threshold,
        })
        .collect();
    report
}
