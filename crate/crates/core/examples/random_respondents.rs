//! Mixes profiled and uniformly random respondents, runs random-respondent
//! detection with the default and the compatibility scoring, and reports
//! recall and false positives against the known labels.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use survey_core::analysis::matrix::ResponseMatrix;
use survey_core::analysis::random::detect_random_respondents;
use survey_core::analysis::AnalysisConfig;
use survey_core::csv_frontend::parse_survey;
use survey_core::simulator::{simulate_labeled, Profile};

fn main() {
    let mut csv = String::from("QUESTION,OPTIONS\n");
    for q in 0..30 {
        csv.push_str(&format!("Question {q},a\n,b\n,c\n,d\n"));
    }
    let (survey, _) = parse_survey(&csv).expect("survey parses");

    // Each question has a favourite option, chosen with probability 0.7.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let prefs = survey
        .questions()
        .map(|q| {
            use rand::Rng;
            let fav = rng.random_range(0..q.options.len());
            let w = q
                .options
                .iter()
                .enumerate()
                .map(|(i, o)| (o.option_id.clone(), if i == fav { 0.7 } else { 0.1 }))
                .collect();
            (q.question_id.clone(), w)
        })
        .collect();
    let profile = Profile::collection(vec![(0.9, Profile::profiled(prefs)), (0.1, Profile::uniform())]);
    let sims = simulate_labeled(&survey, &profile, 200, 11);
    let records: Vec<_> = sims.iter().map(|s| s.record.clone()).collect();
    let m = ResponseMatrix::build(&survey, &records);

    for (name, cfg) in [
        ("default", AnalysisConfig::default()),
        ("legacy", AnalysisConfig::legacy()),
    ] {
        let report = detect_random_respondents(&m, &cfg);
        let flagged: std::collections::BTreeSet<_> = report.flagged().map(|r| r.respondent_id.as_str()).collect();
        let (mut tp, mut random, mut fp) = (0, 0, 0);
        for s in &sims {
            let hit = flagged.contains(s.record.respondent_id.as_str());
            if s.member == 1 {
                random += 1;
                tp += usize::from(hit);
            } else {
                fp += usize::from(hit);
            }
        }
        println!(
            "{name:>12}: {:?}/{:?}, threshold {:.3}, recall {tp}/{random}, false positives {fp}/{}",
            report.score,
            report.method,
            report.threshold.unwrap_or(f64::NAN),
            sims.len() - random
        );
    }
}
