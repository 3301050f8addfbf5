use serde::{Deserialize, Serialize};

use super::matrix::ResponseMatrix;
use super::stats::{chi_squared_independence, spearman_rho};
use super::AnalysisConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEntry {
    pub q_a: String,
    pub q_b: String,
    /// `spearman_rho` or `cramers_v`.
    pub statistic_name: String,
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
    pub low_confidence: bool,
    pub flagged: bool,
    /// Both questions carry the same CORRELATED label.
    pub expected: bool,
}

impl CorrelationEntry {
    /// Undeclared correlation, or a declared one that the data do not show.
    pub fn is_finding(&self) -> bool {
        self.flagged != self.expected
    }
}

/// Tests every pair of exclusive questions answered together by at least
/// `min_group` respondents. Pairs whose statistic is undefined (a question
/// with a single observed answer) are left out.
pub fn analyze_correlations(m: &ResponseMatrix<'_>, cfg: &AnalysisConfig) -> Vec<CorrelationEntry> {
    let qs = m.questions();
    let mut out = Vec::new();
    for a in 0..qs.len() {
        for b in a + 1..qs.len() {
            let pairs: Vec<(usize, usize)> = m
                .column(a)
                .iter()
                .zip(m.column(b))
                .filter_map(|(x, y)| Some((x.as_ref()?.option, y.as_ref()?.option)))
                .collect();
            if pairs.len() < cfg.min_group {
                continue;
            }
            let (qa, qb) = (qs[a], qs[b]);
            let tested = if qa.ordered && qb.ordered {
                let xs: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
                let ys: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
                spearman_rho(&xs, &ys)
                    .ok()
                    .map(|r| ("spearman_rho", r.statistic, r.p_value, r.low_confidence))
            } else {
                let mut table = vec![vec![0.0; qb.options.len()]; qa.options.len()];
                for &(x, y) in &pairs {
                    table[x][y] += 1.0;
                }
                chi_squared_independence(&table)
                    .ok()
                    .map(|r| ("cramers_v", r.cramers_v, r.p_value, r.low_confidence))
            };
            let Some((name, statistic, p_value, low_confidence)) = tested else {
                continue;
            };
            let expected = matches!(
                (&qa.correlated_group, &qb.correlated_group),
                (Some(x), Some(y)) if x == y
            );
            out.push(CorrelationEntry {
                q_a: qa.question_id.clone(),
                q_b: qb.question_id.clone(),
                statistic_name: name.to_string(),
                statistic,
                p_value,
                n: pairs.len(),
                low_confidence,
                flagged: p_value < cfg.alpha && statistic.abs() >= cfg.strength,
                expected,
            });
        }
    }
    out
}
