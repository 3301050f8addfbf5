//! Lowers a checked survey to the JSON payload the browser runner executes,
//! and wraps it in a single HTML page.
//!
//! The payload keeps only what execution needs. Correlation labels and
//! diagnostics stay behind, and blocks no branch decision can reach are
//! dropped. Field order is fixed by the struct definitions below; see
//! `docs/payload.md`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::CompileError;
use crate::model::{Block, BlockId, BranchType, Question, Survey};
use crate::static_analysis::{check_wellformed, reachable_top_blocks};

pub const SCHEMA_VERSION: u32 = 1;

/// Name of the runner script the HTML shell loads.
pub const RUNNER_BUNDLE: &str = "runner.js";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Payload {
    pub schema_version: u32,
    pub survey_id: String,
    pub source_digest: String,
    pub blocks: Vec<PayloadBlock>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayloadBlock {
    pub id: BlockId,
    pub branch_type: BranchType,
    pub questions: Vec<PayloadQuestion>,
    pub subblocks: Vec<PayloadBlock>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayloadQuestion {
    pub id: String,
    /// Source row; the runner orders option draws by it.
    pub row: usize,
    pub text: String,
    pub exclusive: bool,
    pub ordered: bool,
    pub randomize: bool,
    pub instructional: bool,
    pub freetext: Option<PayloadFreetext>,
    pub options: Vec<PayloadOption>,
    /// option id -> top-level block id; keys in byte order.
    pub branch_map: BTreeMap<String, BlockId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayloadFreetext {
    pub pattern: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayloadOption {
    pub id: String,
    pub text: String,
}

impl Payload {
    /// Pretty-printed JSON with a trailing newline. This exact byte string is
    /// what gets written to `payload.json` and served.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("payload serializes");
        s.push('\n');
        s
    }

    pub fn questions(&self) -> impl Iterator<Item = &PayloadQuestion> {
        fn walk<'a>(b: &'a PayloadBlock, out: &mut Vec<&'a PayloadQuestion>) {
            out.extend(b.questions.iter());
            for sub in &b.subblocks {
                walk(sub, out);
            }
        }
        let mut out = Vec::new();
        for b in &self.blocks {
            walk(b, &mut out);
        }
        out.into_iter()
    }
}

/// Compiles a well-formed survey. Authored option order is kept; the runner
/// randomizes per respondent.
pub fn compile(survey: &Survey) -> Result<Payload, CompileError> {
    let violations = check_wellformed(survey);
    if !violations.is_empty() {
        return Err(CompileError::CompileOnInvalidSurvey(violations));
    }
    let blocks = reachable_top_blocks(survey)
        .into_iter()
        .map(|i| lower_block(&survey.top_blocks[i]))
        .collect();
    Ok(Payload {
        schema_version: SCHEMA_VERSION,
        survey_id: survey.survey_id.clone(),
        source_digest: survey.source_digest.clone(),
        blocks,
    })
}

fn lower_block(block: &Block) -> PayloadBlock {
    PayloadBlock {
        id: block.id.clone(),
        branch_type: block.branch_type().expect("checked well-formed"),
        questions: block.questions.iter().map(lower_question).collect(),
        subblocks: block.subblocks.iter().map(lower_block).collect(),
    }
}

fn lower_question(q: &Question) -> PayloadQuestion {
    PayloadQuestion {
        id: q.question_id.clone(),
        row: q.source_row,
        text: q.text.clone(),
        exclusive: q.exclusive,
        ordered: q.ordered,
        randomize: q.randomize,
        instructional: q.is_instructional,
        freetext: q.freetext.as_ref().map(|f| PayloadFreetext {
            pattern: f.pattern.clone(),
        }),
        options: q
            .options
            .iter()
            .map(|o| PayloadOption {
                id: o.option_id.clone(),
                text: o.text.clone(),
            })
            .collect(),
        branch_map: q
            .options
            .iter()
            .filter_map(|o| o.branch_target.clone().map(|t| (o.option_id.clone(), t)))
            .collect(),
    }
}

/// Self-contained page: the payload as an inline JSON script block, a mount
/// point and the runner script.
pub fn wrap_html(payload: &Payload) -> String {
    // `<\/` is a legal JSON escape and keeps question HTML from closing the
    // script element early.
    let json = payload.to_json().replace("</", "<\\/");
    format!(
        "<!DOCTYPE html>\n\
         <html lang=\"en\">\n\
         <head>\n\
         <meta charset=\"utf-8\">\n\
         <meta name=\"viewport\" content=\"width=device-width, initial-scale=1\">\n\
         <title>{title}</title>\n\
         </head>\n\
         <body>\n\
         <main id=\"survey-root\"></main>\n\
         <script type=\"application/json\" id=\"survey-payload\">\n{json}</script>\n\
         <script src=\"{RUNNER_BUNDLE}\"></script>\n\
         </body>\n\
         </html>\n",
        title = escape_html(&payload.survey_id),
    )
}

fn escape_html(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
