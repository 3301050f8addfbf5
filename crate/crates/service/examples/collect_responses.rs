//! Deploys a compiled survey in-process, submits simulated records over the
//! HTTP routes the browser runner uses, and reads the stored log back.
//!
//!     cargo run -p survey-service --example collect_responses

use std::sync::Arc;

use axum::body::Body;
use axum::http::Request;
use http_body_util::BodyExt;
use survey_core::compiler::{compile, wrap_html};
use survey_core::csv_frontend::{emit_csv, parse_survey};
use survey_core::simulator::{simulate, BreakoffRule, Profile};
use survey_core::Terminal;
use survey_service::http::{router, Deployment, HTML_FILE, PAYLOAD_FILE, SOURCE_FILE};
use tower::ServiceExt;

const SURVEY: &str = "QUESTION,OPTIONS,BLOCK\nDo you cycle?,Yes,1\n,No,1\nHow often?,Daily,2\n,Weekly,2\n,Rarely,2\n";

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let (survey, _) = parse_survey(SURVEY)?;
    let payload = compile(&survey)?;
    std::fs::write(dir.path().join(PAYLOAD_FILE), payload.to_json())?;
    std::fs::write(dir.path().join(HTML_FILE), wrap_html(&payload))?;
    std::fs::write(dir.path().join(SOURCE_FILE), emit_csv(&survey))?;

    let deployment = Arc::new(Deployment::load(dir.path(), None)?);
    let profile = Profile::uniform().with_breakoff(BreakoffRule::AfterPosition { up_to: 1, p: 0.3 });
    for record in simulate(&survey, &profile, 10, 1) {
        let uri = match record.terminal {
            Terminal::Completed => "/response",
            Terminal::Breakoff => "/breakoff",
        };
        let req = Request::post(uri)
            .header("content-type", "application/json")
            .body(Body::from(serde_json::to_vec(&record)?))?;
        let resp = router(deployment.clone()).oneshot(req).await?;
        let status = resp.status();
        let body = resp.into_body().collect().await?.to_bytes();
        println!("POST {uri:<10} {} -> {status} {}", record.respondent_id, String::from_utf8_lossy(&body));
    }

    let req = Request::get("/health").body(Body::empty())?;
    let body = router(deployment.clone()).oneshot(req).await?.into_body().collect().await?.to_bytes();
    println!("GET /health -> {}", String::from_utf8_lossy(&body));
    let log = deployment.store.snapshot()?;
    println!("{} records in {}", log.records.len(), deployment.store.path().display());
    Ok(())
}
