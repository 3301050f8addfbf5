//! Simulates two kinds of breakoff and prints the ranked tallies. A
//! question that drives people away tops the by-question list while its
//! positions stay spread out; early fatigue piles up at low positions.

use survey_core::analysis::breakoff::analyze_breakoff;
use survey_core::csv_frontend::parse_survey;
use survey_core::simulator::{simulate, BreakoffRule, Profile};

fn main() {
    let mut csv = String::from("QUESTION,OPTIONS\n");
    for q in 0..12 {
        csv.push_str(&format!("Question {q},yes\n,no\n"));
    }
    let (survey, _) = parse_survey(&csv).expect("survey parses");
    let target = survey.questions_by_row()[6].question_id.clone();

    let cases = [
        (
            format!("abandon at {target} with p = 0.5"),
            Profile::uniform().with_breakoff(BreakoffRule::AtQuestion { question_id: target.clone(), p: 0.5 }),
        ),
        (
            "abandon within the first 6 positions, p = 0.08 each".to_string(),
            Profile::uniform().with_breakoff(BreakoffRule::AfterPosition { up_to: 6, p: 0.08 }),
        ),
    ];
    for (label, profile) in cases {
        let tallies = analyze_breakoff(&simulate(&survey, &profile, 500, 3));
        println!("{label}");
        let by_q: Vec<String> = tallies.by_question.iter().take(5).map(|c| format!("{}={}", c.question_id, c.count)).collect();
        let by_p: Vec<String> = tallies.by_position.iter().take(8).map(|c| format!("{}={}", c.position, c.count)).collect();
        println!("  by question: {}", by_q.join(" "));
        println!("  by position: {}", by_p.join(" "));
    }
}
