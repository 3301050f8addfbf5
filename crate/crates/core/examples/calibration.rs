//! Compares the default analysis methods with the alternatives available in
//! `AnalysisConfig`: null flag rates of the order test variants, and
//! random-respondent recall and false positives for each score/threshold
//! combination. Run in release mode; it simulates a few hundred surveys.
//!
//!     cargo run --release -p survey-core --example calibration

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use survey_core::analysis::matrix::ResponseMatrix;
use survey_core::analysis::order::analyze_order_bias;
use survey_core::analysis::random::detect_random_respondents;
use survey_core::analysis::{AnalysisConfig, GofDf, ScoreKind, ThresholdMethod, UnorderedTest};
use survey_core::csv_frontend::parse_survey;
use survey_core::simulator::{simulate, simulate_labeled, Profile};
use survey_core::Survey;

fn flat(n: usize, m: usize) -> Survey {
    let mut csv = String::from("QUESTION,OPTIONS\n");
    for q in 0..n {
        for o in 0..m {
            let text = if o == 0 { format!("Question {q}") } else { String::new() };
            csv.push_str(&format!("{text},Option {o}\n"));
        }
    }
    parse_survey(&csv).expect("survey parses").0
}

fn order_null_rates(trials: u64) {
    let s = flat(4, 4);
    let variants = [
        ("homogeneity", UnorderedTest::Homogeneity, GofDf::Standard),
        ("gof, m-1 df", UnorderedTest::GoodnessOfFit, GofDf::Standard),
        ("gof, (m-1)^2 df", UnorderedTest::GoodnessOfFit, GofDf::Squared),
    ];
    let mut counts = [(0usize, 0usize); 3];
    for seed in 0..trials {
        let m = ResponseMatrix::build(&s, &simulate(&s, &Profile::uniform(), 300, seed));
        for (i, (_, test, df)) in variants.iter().enumerate() {
            let cfg = AnalysisConfig {
                unordered_test: *test,
                gof_df: *df,
                ..AnalysisConfig::default()
            };
            for e in analyze_order_bias(&m, &cfg) {
                counts[i].0 += usize::from(e.flagged);
                counts[i].1 += 1;
            }
        }
    }
    println!("order test null flag rate at alpha 0.05 ({trials} surveys, n = 300, 4 x 4 unordered)");
    for ((name, _, _), (f, t)) in variants.iter().zip(counts) {
        println!("  {name:<16} {:.3} ({f}/{t})", f as f64 / t as f64);
    }
}

fn random_detection(trials: u64) {
    let s = flat(30, 4);
    let combos = [
        (ScoreKind::Surprisal, ThresholdMethod::RandomNull),
        (ScoreKind::Surprisal, ThresholdMethod::PooledPercentile),
        (ScoreKind::PLogP, ThresholdMethod::RandomNull),
        (ScoreKind::PLogP, ThresholdMethod::PooledPercentile),
    ];
    let mut sums = [(0.0, 0.0); 4];
    for seed in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prefs = s
            .questions()
            .map(|q| {
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
        let p = Profile::collection(vec![(0.9, Profile::profiled(prefs)), (0.1, Profile::uniform())]);
        let sims = simulate_labeled(&s, &p, 200, seed);
        let records: Vec<_> = sims.iter().map(|x| x.record.clone()).collect();
        let m = ResponseMatrix::build(&s, &records);
        for (i, (score, threshold)) in combos.iter().enumerate() {
            let cfg = AnalysisConfig {
                score: *score,
                threshold: *threshold,
                seed,
                ..AnalysisConfig::default()
            };
            let flagged: BTreeSet<_> = detect_random_respondents(&m, &cfg)
                .flagged()
                .map(|r| r.respondent_id.clone())
                .collect();
            let (mut tp, mut pos, mut fp, mut neg) = (0.0, 0.0, 0.0, 0.0);
            for x in &sims {
                let hit = f64::from(u8::from(flagged.contains(&x.record.respondent_id)));
                if x.member == 1 {
                    tp += hit;
                    pos += 1.0;
                } else {
                    fp += hit;
                    neg += 1.0;
                }
            }
            sums[i].0 += if pos > 0.0 { tp / pos } else { 0.0 };
            sums[i].1 += fp / neg;
        }
    }
    println!("random respondents ({trials} seeds, n = 200, 30 x 4, 10% uniform)");
    for ((score, threshold), (recall, fpr)) in combos.iter().zip(sums) {
        println!(
            "  {:<10} {:<17} recall {:.3}  false-positive rate {:.3}",
            format!("{score:?}"),
            format!("{threshold:?}"),
            recall / trials as f64,
            fpr / trials as f64
        );
    }
}

fn main() {
    order_null_rates(50);
    println!();
    random_detection(20);
}
