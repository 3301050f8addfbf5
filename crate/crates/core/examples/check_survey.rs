//! Parses a survey CSV and prints the static report: well-formedness
//! violations, path-length bounds, simulated average path length and
//! maximum entropy.
//!
//!     cargo run -p survey-core --example check_survey -- my_survey.csv

use survey_core::csv_frontend::parse_survey;
use survey_core::static_analysis::{analyze_static, StaticConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/demographics.csv").into());
    let text = std::fs::read_to_string(&path)?;
    let (survey, diagnostics) = match parse_survey(&text) {
        Ok(x) => x,
        Err(e) => {
            for d in &e.diagnostics.errors {
                eprintln!("{path}: {d}");
            }
            std::process::exit(1);
        }
    };
    let report = analyze_static(&survey, Some(&diagnostics), StaticConfig { n_sim: 2000, seed: 0 });
    print!("{report}");
    if !report.is_valid() {
        std::process::exit(1);
    }
    Ok(())
}
