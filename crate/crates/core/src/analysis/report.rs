use std::fmt;

use serde::{Deserialize, Serialize};

use super::breakoff::{PositionCount, QuestionCount};
use super::correlation::CorrelationEntry;
use super::order::OrderBiasEntry;
use super::random::RandomRespondentReport;
use super::variant::VariantBiasEntry;
use super::AnalysisConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicReport {
    pub survey_id: String,
    pub source_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at_unix: Option<u64>,
    pub config: AnalysisConfig,
    pub respondents: usize,
    pub completed: usize,
    /// Records for another survey version or not matching the survey.
    pub rejected_records: usize,
    pub correlations: Vec<CorrelationEntry>,
    pub order_bias: Vec<OrderBiasEntry>,
    pub variant_bias: Vec<VariantBiasEntry>,
    pub breakoff_by_position: Vec<PositionCount>,
    pub breakoff_by_question: Vec<QuestionCount>,
    pub breakoff_without_answers: usize,
    pub random_respondents: RandomRespondentReport,
}

impl DynamicReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Number of results that call for a closer look: unexpected or missing
    /// correlations, bias flags and flagged respondents.
    pub fn finding_count(&self) -> usize {
        self.correlations.iter().filter(|c| c.is_finding()).count()
            + self.order_bias.iter().filter(|e| e.flagged).count()
            + self.variant_bias.iter().filter(|e| e.flagged).count()
            + self.random_respondents.flagged().count()
    }
}

impl fmt::Display for DynamicReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "survey {} ({})", self.survey_id, self.source_digest)?;
        writeln!(
            f,
            "respondents: {} ({} completed), rejected records: {}",
            self.respondents, self.completed, self.rejected_records
        )?;
        writeln!(f, "alpha: {}", self.config.alpha)?;

        writeln!(f, "\ncorrelations ({} pairs tested)", self.correlations.len())?;
        for c in self.correlations.iter().filter(|c| c.is_finding()) {
            let what = if c.flagged { "correlated, not declared" } else { "declared, not correlated" };
            writeln!(
                f,
                "  {} ~ {}: {} = {:.3}, p = {:.3e}, n = {} [{what}]",
                c.q_a, c.q_b, c.statistic_name, c.statistic, c.p_value, c.n
            )?;
        }

        writeln!(f, "\norder bias ({} tests)", self.order_bias.len())?;
        for e in self.order_bias.iter().filter(|e| e.flagged) {
            writeln!(
                f,
                "  {} depends on {} coming first: {:?} = {:.3}, p = {:.3e} ({} before, {} after)",
                e.question, e.other, e.test, e.statistic, e.p_value, e.n_before, e.n_after
            )?;
        }

        writeln!(f, "\nvariant bias ({} tests)", self.variant_bias.len())?;
        for e in self.variant_bias.iter().filter(|e| e.flagged) {
            writeln!(
                f,
                "  block {}: {} vs {}: {:?} = {:.3}, p = {:.3e}",
                e.block, e.variant_a, e.variant_b, e.test, e.statistic, e.p_value
            )?;
        }

        writeln!(f, "\nbreakoff by position")?;
        for p in self.breakoff_by_position.iter().take(10) {
            writeln!(f, "  {:>4}  {}", p.position, p.count)?;
        }
        writeln!(f, "breakoff by question")?;
        for q in self.breakoff_by_question.iter().take(10) {
            writeln!(f, "  {:>6}  {}", q.question_id, q.count)?;
        }

        let rr = &self.random_respondents;
        writeln!(f, "\nrandom respondents")?;
        match (&rr.skipped, rr.threshold) {
            (Some(why), _) => writeln!(f, "  skipped: {why}")?,
            (None, Some(t)) => {
                writeln!(f, "  threshold {t:.3} ({:?}, {:?})", rr.score, rr.method)?;
                for r in rr.flagged() {
                    writeln!(f, "  {} score {:.3}", r.respondent_id, r.score)?;
                }
            }
            (None, None) => {}
        }
        writeln!(f, "\nfindings: {}", self.finding_count())
    }
}
