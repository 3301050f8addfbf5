//! Walks one respondent through a survey with the interpreter, always
//! picking the last displayed option, and prints each step. Branches are
//! followed as they would be in the browser.
//!
//!     cargo run -p survey-core --example interpret -- survey.csv some-respondent

use survey_core::csv_frontend::parse_survey;
use survey_core::engine::{make_plan, Answer, InterpreterState, Step};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../golden/plan_fixture.csv").into());
    let respondent = args.next().unwrap_or_else(|| "respondent-001".into());

    let (survey, _) = parse_survey(&std::fs::read_to_string(path)?)?;
    let plan = make_plan(&survey, &respondent);
    let mut state = InterpreterState::new(&survey, &plan);
    let mut step = state.start()?;
    while let Step::NextQuestion { question, position } = step {
        let qid = &question.question_id;
        let answer = if question.freetext.is_some() {
            println!("{position:>3}. [{qid}] {} -> \"12345\"", question.text);
            Answer {
                question_id: qid.clone(),
                chosen_option_ids: Default::default(),
                freetext_value: Some("12345".into()),
            }
        } else if !question.is_answerable() {
            println!("{position:>3}. [{qid}] {}", question.text);
            Answer::empty(qid)
        } else {
            let shown = &plan.option_order[qid];
            let pick = shown.last().expect("answerable question has options");
            let text = &question.options.iter().find(|o| &o.option_id == pick).unwrap().text;
            println!("{position:>3}. [{qid}] {} -> {text}", question.text);
            Answer::choice(qid, pick)
        };
        step = state.step(answer)?;
    }
    println!("finished after {} questions", state.events().len());
    Ok(())
}
