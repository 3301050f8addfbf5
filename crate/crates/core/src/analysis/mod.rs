//! Analyses over collected responses: pairwise correlation, order bias,
//! wording-variant bias, breakoff tallies and random-respondent detection.

pub mod breakoff;
pub mod correlation;
pub mod matrix;
pub mod order;
pub mod random;
pub mod stats;
pub mod variant;

mod report;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{ResponseRecord, Survey, Terminal};
use stats::{chi_squared_gof, chi_squared_independence, mann_whitney_u};

pub use breakoff::{analyze_breakoff, BreakoffTallies, PositionCount, QuestionCount};
pub use correlation::{analyze_correlations, CorrelationEntry};
pub use matrix::{Cell, ResponseMatrix};
pub use order::{analyze_order_bias, OrderBiasEntry};
pub use random::{detect_random_respondents, RandomRespondent, RandomRespondentReport};
pub use report::DynamicReport;
pub use variant::{analyze_variant_bias, VariantBiasEntry};

/// How two samples of an unordered question are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnorderedTest {
    /// Chi-squared test of homogeneity on the 2×m table of counts.
    Homogeneity,
    /// Goodness of fit of the second sample's counts to the first sample's
    /// relative frequencies.
    GoodnessOfFit,
}

/// Degrees of freedom for [`UnorderedTest::GoodnessOfFit`] with m
/// categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GofDf {
    /// m − 1
    Standard,
    /// (m − 1)²
    Squared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreKind {
    /// Σ −log2 p(chosen); higher is more random.
    Surprisal,
    /// Σ p(chosen)·log2 p(chosen); lower is treated as more random.
    PLogP,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMethod {
    /// Score distribution of synthetic respondents that answer every
    /// question they reach uniformly at random; the threshold is its
    /// α-quantile on the random side.
    RandomNull,
    /// 1 − α quantile of the pooled bootstrap resamples of observed scores.
    PooledPercentile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub alpha: f64,
    /// Minimum |ρ| or V for a correlation flag.
    pub strength: f64,
    /// Smallest sample a comparison is run on.
    pub min_group: usize,
    pub bootstrap_b: usize,
    pub seed: u64,
    pub unordered_test: UnorderedTest,
    pub gof_df: GofDf,
    pub score: ScoreKind,
    pub threshold: ThresholdMethod,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            alpha: 0.05,
            strength: 0.5,
            min_group: 5,
            bootstrap_b: 2000,
            seed: 0,
            unordered_test: UnorderedTest::Homogeneity,
            gof_df: GofDf::Standard,
            score: ScoreKind::Surprisal,
            threshold: ThresholdMethod::RandomNull,
        }
    }
}

impl AnalysisConfig {
    /// Goodness of fit with (m − 1)² degrees of freedom, the p·log2 p score
    /// and the pooled-percentile threshold.
    pub fn legacy() -> Self {
        AnalysisConfig {
            unordered_test: UnorderedTest::GoodnessOfFit,
            gof_df: GofDf::Squared,
            score: ScoreKind::PLogP,
            threshold: ThresholdMethod::PooledPercentile,
            ..Self::default()
        }
    }

    pub fn is_legacy(&self) -> bool {
        self.unordered_test == UnorderedTest::GoodnessOfFit
            && self.gof_df == GofDf::Squared
            && self.score == ScoreKind::PLogP
            && self.threshold == ThresholdMethod::PooledPercentile
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    MannWhitney,
    Chi2Homogeneity,
    Chi2Gof,
}

/// Outcome of comparing two answer samples of one question.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub test: TestKind,
    pub statistic: f64,
    pub df: Option<f64>,
    pub p_value: f64,
    pub low_confidence: bool,
}

/// Compares two samples of option indices on an `m`-option scale: ranks for
/// ordered questions, counts otherwise. `a` is the reference sample for the
/// goodness-of-fit variant. `None` when the test is undefined (no spread).
pub(crate) fn compare_samples(
    a: &[usize],
    b: &[usize],
    m: usize,
    ordered: bool,
    cfg: &AnalysisConfig,
) -> Option<Comparison> {
    if ordered {
        let ra: Vec<f64> = a.iter().map(|&o| o as f64 + 1.0).collect();
        let rb: Vec<f64> = b.iter().map(|&o| o as f64 + 1.0).collect();
        let r = mann_whitney_u(&ra, &rb).ok()?;
        return Some(Comparison {
            test: TestKind::MannWhitney,
            statistic: r.statistic,
            df: None,
            p_value: r.p_value,
            low_confidence: r.low_confidence,
        });
    }
    let counts = |xs: &[usize]| {
        let mut c = vec![0.0; m];
        for &o in xs {
            c[o] += 1.0;
        }
        c
    };
    let (ca, cb) = (counts(a), counts(b));
    match cfg.unordered_test {
        UnorderedTest::Homogeneity => {
            let r = chi_squared_independence(&[ca, cb]).ok()?;
            Some(Comparison {
                test: TestKind::Chi2Homogeneity,
                statistic: r.chi2,
                df: Some(r.df),
                p_value: r.p_value,
                low_confidence: r.low_confidence,
            })
        }
        UnorderedTest::GoodnessOfFit => {
            let na = a.len() as f64;
            let freqs: Vec<f64> = ca.iter().map(|c| c / na).collect();
            let k = freqs.iter().filter(|f| **f > 0.0).count() as f64;
            let df = match cfg.gof_df {
                GofDf::Standard => k - 1.0,
                GofDf::Squared => (k - 1.0) * (k - 1.0),
            };
            let r = chi_squared_gof(&cb, &freqs, df).ok()?;
            Some(Comparison {
                test: TestKind::Chi2Gof,
                statistic: r.statistic,
                df: Some(df),
                p_value: r.p_value,
                low_confidence: r.low_confidence,
            })
        }
    }
}

/// Reduces a raw response log to one record per respondent: the completed
/// record if there is one, otherwise the longest breakoff.
pub fn snapshot(records: Vec<ResponseRecord>) -> Vec<ResponseRecord> {
    let mut best: BTreeMap<String, ResponseRecord> = BTreeMap::new();
    for rec in records {
        let key = |r: &ResponseRecord| (r.terminal == Terminal::Completed, r.events.len());
        match best.get(&rec.respondent_id) {
            Some(cur) if key(cur) >= key(&rec) => {}
            _ => {
                best.insert(rec.respondent_id.clone(), rec);
            }
        }
    }
    best.into_values().collect()
}

/// Runs every analysis. Records for another survey version or that do not
/// fit the survey are counted as rejected and left out.
pub fn analyze(survey: &Survey, records: &[ResponseRecord], cfg: &AnalysisConfig) -> DynamicReport {
    let (accepted, rejected): (Vec<&ResponseRecord>, Vec<&ResponseRecord>) = records
        .iter()
        .partition(|r| r.source_digest == survey.source_digest && r.validate_against(survey).is_ok());
    let accepted: Vec<ResponseRecord> = accepted.into_iter().cloned().collect();
    let matrix = ResponseMatrix::build(survey, &accepted);
    let tallies = analyze_breakoff(&accepted);
    DynamicReport {
        survey_id: survey.survey_id.clone(),
        source_digest: survey.source_digest.clone(),
        generated_at_unix: None,
        config: cfg.clone(),
        respondents: accepted.len(),
        completed: accepted.iter().filter(|r| r.terminal == Terminal::Completed).count(),
        rejected_records: rejected.len(),
        correlations: analyze_correlations(&matrix, cfg),
        order_bias: analyze_order_bias(&matrix, cfg),
        variant_bias: analyze_variant_bias(&matrix, cfg),
        breakoff_by_position: tallies.by_position,
        breakoff_by_question: tallies.by_question,
        breakoff_without_answers: tallies.without_answers,
        random_respondents: detect_random_respondents(&matrix, cfg),
    }
}
