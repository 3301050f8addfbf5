use serde::{Deserialize, Serialize};

use super::matrix::ResponseMatrix;
use super::{compare_samples, AnalysisConfig, TestKind};
use crate::model::{BlockId, BranchType};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantBiasEntry {
    pub block: BlockId,
    pub variant_a: String,
    pub variant_b: String,
    pub test: TestKind,
    pub statistic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub df: Option<f64>,
    pub p_value: f64,
    pub n_a: usize,
    pub n_b: usize,
    pub low_confidence: bool,
    pub flagged: bool,
}

/// Compares the answers to each pair of wording variants of every ALL
/// block, option by option in authored position. Variants answered fewer
/// than `min_group` times are skipped.
pub fn analyze_variant_bias(m: &ResponseMatrix<'_>, cfg: &AnalysisConfig) -> Vec<VariantBiasEntry> {
    let mut out = Vec::new();
    for block in m.survey().blocks() {
        if !matches!(block.branch_type(), Ok(BranchType::All)) {
            continue;
        }
        let samples: Vec<(usize, Vec<usize>)> = block
            .questions
            .iter()
            .filter_map(|q| m.question_index(&q.question_id))
            .map(|qi| (qi, m.column(qi).iter().flatten().map(|c| c.option).collect()))
            .collect();
        for (x, (qa, a)) in samples.iter().enumerate() {
            for (qb, b) in &samples[x + 1..] {
                if a.len() < cfg.min_group || b.len() < cfg.min_group {
                    continue;
                }
                let (va, vb) = (m.questions()[*qa], m.questions()[*qb]);
                let width = va.options.len().max(vb.options.len());
                let Some(c) = compare_samples(a, b, width, va.ordered && vb.ordered, cfg) else {
                    continue;
                };
                out.push(VariantBiasEntry {
                    block: block.id.clone(),
                    variant_a: va.question_id.clone(),
                    variant_b: vb.question_id.clone(),
                    test: c.test,
                    statistic: c.statistic,
                    df: c.df,
                    p_value: c.p_value,
                    n_a: a.len(),
                    n_b: b.len(),
                    low_confidence: c.low_confidence,
                    flagged: c.p_value < cfg.alpha,
                });
            }
        }
    }
    out
}
