//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use survey_core::csv_frontend::parse_survey;
use survey_core::engine::{make_plan, Answer, InterpreterState, Step};
use survey_core::model::Survey;

pub fn survey(csv: &str) -> Survey {
    parse_survey(csv).expect("test survey parses").0
}

/// Every number of questions a respondent can be shown, found by trying
/// every answer to every question through the interpreter.
pub fn enumerate_path_lengths(s: &Survey, respondent_id: &str) -> BTreeSet<usize> {
    fn go(st: InterpreterState<'_>, step: Step<'_>, out: &mut BTreeSet<usize>) {
        let Step::NextQuestion { question, .. } = step else {
            out.insert(st.events().len());
            return;
        };
        let answers: Vec<Answer> = if !question.is_answerable() {
            vec![Answer::empty(&question.question_id)]
        } else if question.exclusive {
            question
                .options
                .iter()
                .map(|o| Answer::choice(&question.question_id, &o.option_id))
                .collect()
        } else {
            // Any non-empty subset; a branch-free checkbox is represented by
            // its first option since the choice cannot change the path.
            vec![Answer::choice(&question.question_id, &question.options[0].option_id)]
        };
        for a in answers {
            let mut next = st.clone();
            let step = next.step(a).expect("valid answer");
            go(next, step, out);
        }
    }
    let plan = make_plan(s, respondent_id);
    let mut st = InterpreterState::new(s, &plan);
    let step = st.start().unwrap();
    let mut out = BTreeSet::new();
    go(st.clone(), step, &mut out);
    out
}

/// One block of `n` unordered questions with `m` options each.
pub fn flat_csv(n: usize, m: usize) -> String {
    let mut csv = String::from("QUESTION,OPTIONS\n");
    for q in 0..n {
        for o in 0..m {
            let text = if o == 0 { format!("Question {q}") } else { String::new() };
            writeln!(csv, "{text},Option {o}").unwrap();
        }
    }
    csv
}

/// `blocks` variant blocks of `variants` wordings with `m` options each,
/// every variant branching to the next block, and one closing question.
pub fn variant_csv(blocks: usize, variants: usize, m: usize, ordered: bool) -> String {
    let mut csv = String::from("QUESTION,OPTIONS,BLOCK,BRANCH,ORDERED\n");
    for b in 1..=blocks {
        for v in 0..variants {
            for o in 0..m {
                let text = if o == 0 { format!("Block {b} wording {v}") } else { String::new() };
                writeln!(csv, "{text},Option {o},{b},{},{ordered}", b + 1).unwrap();
            }
        }
    }
    writeln!(csv, "Closing question,Yes,{},,", blocks + 1).unwrap();
    writeln!(csv, ",No,{},,", blocks + 1).unwrap();
    csv
}

/// The three-block toy: block 1 holds a branch question (skip block 2 or
/// not) and one other question, block 2 has five questions, block 3 one.
pub const THREE_BLOCK_TOY: &str = "QUESTION,OPTIONS,BLOCK,BRANCH\n\
    Skip ahead?,Yes,1,3\n,No,1,\nFirst question,x,1,\n\
    C1,x,2,\nC2,x,2,\nC3,x,2,\nC4,x,2,\nC5,x,2,\n\
    Last question,x,3,\n";

/// Question id -> option id -> weight, peaked on a random permutation of
/// `weights` per question.
pub fn peaked_preferences(
    s: &Survey,
    weights: &[f64],
    rng: &mut impl rand::Rng,
) -> BTreeMap<String, BTreeMap<String, f64>> {
    use rand::seq::SliceRandom;
    s.questions()
        .filter(|q| q.is_exclusive_choice())
        .map(|q| {
            let mut w = weights.to_vec();
            w.resize(q.options.len(), 0.0);
            w.shuffle(rng);
            let map = q.options.iter().zip(w).map(|(o, w)| (o.option_id.clone(), w)).collect();
            (q.question_id.clone(), map)
        })
        .collect()
}
