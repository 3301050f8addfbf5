//! Injects a one-rank order effect and a wording effect into simulated
//! data and shows that the order-bias and variant-bias tests pick them up.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use survey_core::analysis::matrix::ResponseMatrix;
use survey_core::analysis::order::analyze_order_bias;
use survey_core::analysis::variant::analyze_variant_bias;
use survey_core::analysis::AnalysisConfig;
use survey_core::csv_frontend::parse_survey;
use survey_core::simulator::{simulate_with, ChoiceContext, Respondent};

const SURVEY: &str = "\
QUESTION,OPTIONS,BLOCK,ORDERED,BRANCH
How satisfied are you with the product?,1,1,true,
,2,1,,
,3,1,,
,4,1,,
How satisfied are you with support?,1,1,true,
,2,1,,
,3,1,,
,4,1,,
Would you recommend us?,Yes,2,false,3
,No,2,,3
Would you tell a friend about us?,Yes,2,false,3
,No,2,,3
Anything else?,No,3,,
,Yes,3,,
";

/// Rates the product one point higher when the support question came
/// first, and says Yes more often to the "tell a friend" wording.
struct Biased;

impl Respondent for Biased {
    fn choose(&mut self, ctx: &ChoiceContext<'_>, rng: &mut ChaCha8Rng) -> BTreeSet<String> {
        let q = ctx.question;
        let m = q.options.len();
        let i = if q.text.contains("product") {
            let support_first = ctx.history.iter().any(|e| e.question_id == "q6");
            (rng.random_range(0..m - 1) + usize::from(support_first)).min(m - 1)
        } else if q.text.contains("friend") {
            usize::from(rng.random_bool(0.25))
        } else {
            rng.random_range(0..m)
        };
        BTreeSet::from([q.options[i].option_id.clone()])
    }
}

fn main() {
    let (survey, _) = parse_survey(SURVEY).expect("survey parses");
    let records = simulate_with(&survey, 400, 1, |_, _| Biased);
    let m = ResponseMatrix::build(&survey, &records);
    let cfg = AnalysisConfig::default();

    println!("order bias");
    for e in analyze_order_bias(&m, &cfg) {
        println!(
            "  {} when {} comes first: {:?} = {:.3}, p = {:.2e}{}",
            e.question,
            e.other,
            e.test,
            e.statistic,
            e.p_value,
            if e.flagged { "  FLAGGED" } else { "" }
        );
    }
    println!("variant bias");
    for e in analyze_variant_bias(&m, &cfg) {
        println!(
            "  block {}: {} vs {}: {:?} = {:.3}, p = {:.2e}{}",
            e.block,
            e.variant_a,
            e.variant_b,
            e.test,
            e.statistic,
            e.p_value,
            if e.flagged { "  FLAGGED" } else { "" }
        );
    }
}
