//! Simulates respondents from a profile and writes them as JSON lines.
//! Without a profile argument, a mix of 80% peaked respondents and 20%
//! uniform clickers with some early breakoff is used.
//!
//!     cargo run -p survey-core --example simulate_responses -- survey.csv 500 out.jsonl [profile.json]

use std::collections::BTreeMap;
use std::io::Write;

use survey_core::csv_frontend::parse_survey;
use survey_core::simulator::{simulate_labeled, BreakoffRule, Profile};
use survey_core::Terminal;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/demographics.csv").into());
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(200);
    let out = args.next().unwrap_or_else(|| "target/responses.jsonl".into());
    let (survey, _) = parse_survey(&std::fs::read_to_string(path)?)?;

    let profile = match args.next() {
        Some(p) => Profile::from_json(&std::fs::read_to_string(p)?)?,
        None => {
            // First option twice as likely as the rest.
            let prefs = survey
                .questions()
                .filter(|q| q.is_exclusive_choice())
                .map(|q| {
                    let w: BTreeMap<String, f64> = q
                        .options
                        .iter()
                        .enumerate()
                        .map(|(i, o)| (o.option_id.clone(), if i == 0 { 2.0 } else { 1.0 }))
                        .collect();
                    (q.question_id.clone(), w)
                })
                .collect();
            Profile::collection(vec![(0.8, Profile::profiled(prefs)), (0.2, Profile::uniform())])
                .with_breakoff(BreakoffRule::AfterPosition { up_to: 3, p: 0.05 })
        }
    };
    println!("{}", serde_json::to_string(&profile)?);

    let sims = simulate_labeled(&survey, &profile, n, 2024);
    let mut file = std::io::BufWriter::new(std::fs::File::create(&out)?);
    for s in &sims {
        serde_json::to_writer(&mut file, &s.record)?;
        file.write_all(b"\n")?;
    }
    let breakoffs = sims.iter().filter(|s| s.record.terminal == Terminal::Breakoff).count();
    println!("{n} respondents, {breakoffs} broke off -> {out}");
    Ok(())
}
