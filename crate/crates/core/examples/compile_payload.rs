//! Compiles a survey CSV into `payload.json` and a self-contained
//! `index.html`.
//!
//!     cargo run -p survey-core --example compile_payload -- golden/plan_fixture.csv out/

use std::path::PathBuf;

use survey_core::compiler::{compile, wrap_html};
use survey_core::csv_frontend::parse_survey;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let input = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../golden/plan_fixture.csv").into());
    let out = PathBuf::from(args.next().unwrap_or_else(|| "target/payload".into()));

    let (survey, _) = parse_survey(&std::fs::read_to_string(&input)?)?;
    let payload = compile(&survey)?;
    std::fs::create_dir_all(&out)?;
    std::fs::write(out.join("payload.json"), payload.to_json())?;
    std::fs::write(out.join("index.html"), wrap_html(&payload))?;

    println!("{} ({} questions)", payload.survey_id, payload.questions().count());
    println!("wrote {}", out.display());
    Ok(())
}
