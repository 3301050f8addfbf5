use serde::{Deserialize, Serialize};

use super::matrix::ResponseMatrix;
use super::{compare_samples, AnalysisConfig, TestKind};

/// Whether `question`'s answers depend on seeing `other` first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderBiasEntry {
    pub question: String,
    pub other: String,
    pub test: TestKind,
    pub statistic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub df: Option<f64>,
    pub p_value: f64,
    /// Respondents who saw `question` before `other`.
    pub n_before: usize,
    /// Respondents who saw `other` before `question`.
    pub n_after: usize,
    pub low_confidence: bool,
    pub flagged: bool,
}

/// For every pair of exclusive questions, splits the respondents who saw
/// both by which came first and compares each question's answers across
/// the two groups. Pairs with a group smaller than `min_group` are skipped,
/// so a survey in a fixed order yields nothing.
pub fn analyze_order_bias(m: &ResponseMatrix<'_>, cfg: &AnalysisConfig) -> Vec<OrderBiasEntry> {
    let qs = m.questions();
    let mut out = Vec::new();
    for i in 0..qs.len() {
        for j in i + 1..qs.len() {
            let both: Vec<(_, _)> = m
                .column(i)
                .iter()
                .zip(m.column(j))
                .filter_map(|(x, y)| Some(((*x)?, (*y)?)))
                .collect();
            let i_first = both.iter().filter(|(x, y)| x.position < y.position).count();
            if i_first < cfg.min_group || both.len() - i_first < cfg.min_group {
                continue;
            }
            for (target, other, pick) in [(i, j, 0usize), (j, i, 1usize)] {
                let (mut before, mut after) = (Vec::new(), Vec::new());
                for (x, y) in &both {
                    let (t, o) = if pick == 0 { (x, y) } else { (y, x) };
                    if t.position < o.position {
                        before.push(t.option);
                    } else {
                        after.push(t.option);
                    }
                }
                let q = qs[target];
                let Some(c) = compare_samples(&before, &after, q.options.len(), q.ordered, cfg) else {
                    continue;
                };
                out.push(OrderBiasEntry {
                    question: q.question_id.clone(),
                    other: qs[other].question_id.clone(),
                    test: c.test,
                    statistic: c.statistic,
                    df: c.df,
                    p_value: c.p_value,
                    n_before: before.len(),
                    n_after: after.len(),
                    low_confidence: c.low_confidence,
                    flagged: c.p_value < cfg.alpha,
                });
            }
        }
    }
    out
}
