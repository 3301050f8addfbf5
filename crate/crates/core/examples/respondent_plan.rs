//! Shows the randomization a respondent id receives: ALL-block variant
//! choices, question order and option order. The same id always gets the
//! same plan, here and in the browser runner.
//!
//!     cargo run -p survey-core --example respondent_plan -- survey.csv A3KX9-ASSIGNMENT

use survey_core::csv_frontend::parse_survey;
use survey_core::engine::make_plan;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../golden/plan_fixture.csv").into());
    let respondent = args.next().unwrap_or_else(|| "respondent-000".into());

    let (survey, _) = parse_survey(&std::fs::read_to_string(path)?)?;
    let plan = make_plan(&survey, &respondent);
    println!("respondent {:?}, seed {}", plan.respondent_id, plan.seed);
    for (block, question) in &plan.variant_choice {
        println!("  block {block} shows variant {question}");
    }
    println!("question order: {}", plan.question_sequence().join(" "));
    for q in plan.question_sequence() {
        if let Some(opts) = plan.option_order.get(q) {
            if !opts.is_empty() {
                println!("  {q}: {}", opts.join(" "));
            }
        }
    }
    Ok(())
}
