//! Reads the tabular survey language from CSV.
//!
//! Each data row either starts a question (non-empty `QUESTION` cell) or adds
//! an option to the question above it. Rows are numbered by CSV record, with
//! the header as row 1; question and option ids are `q<row>` and `opt<row>`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::{
    parse_block_id, Block, BlockId, Freetext, OptionSpec, Question, Segment, Survey,
};

/// Canonical column names, in the order [`emit_csv`] writes them.
pub const COLUMNS: [&str; 9] = [
    "QUESTION",
    "OPTIONS",
    "BLOCK",
    "EXCLUSIVE",
    "ORDERED",
    "BRANCH",
    "RANDOMIZE",
    "FREETEXT",
    "CORRELATED",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
enum Column {
    Question,
    Options,
    Block,
    Exclusive,
    Ordered,
    Branch,
    Randomize,
    Freetext,
    Correlated,
}

impl Column {
    fn from_header(h: &str) -> Option<Column> {
        Some(match h.trim().to_ascii_uppercase().as_str() {
            "QUESTION" => Column::Question,
            "OPTIONS" | "OPTION" => Column::Options,
            "BLOCK" => Column::Block,
            "EXCLUSIVE" => Column::Exclusive,
            "ORDERED" => Column::Ordered,
            "BRANCH" => Column::Branch,
            "RANDOMIZE" => Column::Randomize,
            "FREETEXT" => Column::Freetext,
            "CORRELATED" => Column::Correlated,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        COLUMNS[self as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DiagnosticCode {
    // errors
    CsvSyntax,
    MissingRequiredColumn,
    DuplicateColumn,
    MalformedBlockId,
    MalformedBoolean,
    OptionBeforeFirstQuestion,
    InconsistentBlockWithinQuestion,
    EmptySurvey,
    // warnings
    UnrecognizedHeader,
    DuplicateQuestion,
    EmptyOptionRow,
    IgnoredOptionsForFreetext,
    IgnoredBranch,
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    /// 1-based CSV row; `None` for whole-file problems.
    pub row: Option<usize>,
    pub code: DiagnosticCode,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.row {
            Some(row) => write!(f, "row {row}: {}: {}", self.code, self.message),
            None => write!(f, "{}: {}", self.code, self.message),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseDiagnostics {
    pub warnings: Vec<Diagnostic>,
    pub errors: Vec<Diagnostic>,
}

impl ParseDiagnostics {
    fn warn(&mut self, row: Option<usize>, code: DiagnosticCode, message: impl Into<String>) {
        self.warnings.push(Diagnostic {
            row,
            code,
            message: message.into(),
        });
    }

    fn error(&mut self, row: Option<usize>, code: DiagnosticCode, message: impl Into<String>) {
        self.errors.push(Diagnostic {
            row,
            code,
            message: message.into(),
        });
    }

    pub fn has_error(&self, code: DiagnosticCode) -> bool {
        self.errors.iter().any(|d| d.code == code)
    }

    pub fn has_warning(&self, code: DiagnosticCode) -> bool {
        self.warnings.iter().any(|d| d.code == code)
    }
}

/// Parsing failed; `diagnostics.errors` is non-empty.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("survey did not parse: {}", summarize(&.diagnostics.errors))]
pub struct ParseError {
    pub diagnostics: ParseDiagnostics,
}

fn summarize(errors: &[Diagnostic]) -> String {
    errors
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed boolean {0:?}; expected true/false, yes/no or 1/0")]
pub struct MalformedBoolean(pub String);

/// Reads a flag cell. Empty cells take `default`.
pub fn boolean_cell(cell: &str, default: bool) -> Result<bool, MalformedBoolean> {
    match cell.trim().to_ascii_lowercase().as_str() {
        "" => Ok(default),
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(MalformedBoolean(cell.to_string())),
    }
}

/// One data row with cells keyed by canonical column.
#[derive(Debug, Clone)]
pub struct RawRow {
    pub row_number: usize,
    cells: HashMap<Column, String>,
}

impl RawRow {
    fn get(&self, column: Column) -> &str {
        self.cells.get(&column).map(String::as_str).unwrap_or("")
    }

    fn is_blank(&self) -> bool {
        self.cells.values().all(|c| c.is_empty())
    }
}

struct PendingQuestion {
    question: Question,
    /// Branch cell on a question row whose option cell is empty.
    row_branch: Option<BlockId>,
    row_branch_used: bool,
}

/// Parses survey CSV text into a [`Survey`].
pub fn parse_survey(csv_text: &str) -> Result<(Survey, ParseDiagnostics), ParseError> {
    let mut diags = ParseDiagnostics::default();
    let rows = match read_rows(csv_text, &mut diags) {
        Some(rows) => rows,
        None => return Err(ParseError { diagnostics: diags }),
    };

    let mut finished: Vec<Question> = Vec::new();
    let mut current: Option<PendingQuestion> = None;

    for row in rows.iter().filter(|r| !r.is_blank()) {
        let n = row.row_number;
        let question_text = row.get(Column::Question);
        if !question_text.is_empty() {
            if let Some(done) = current.take() {
                finished.push(finish_question(done, &mut diags));
            }
            current = start_question(row, &mut diags);
            continue;
        }

        let Some(pending) = current.as_mut() else {
            diags.error(
                Some(n),
                DiagnosticCode::OptionBeforeFirstQuestion,
                "option row appears before any question",
            );
            continue;
        };
        let block_cell = row.get(Column::Block);
        if !block_cell.is_empty() {
            match parse_block_id(block_cell) {
                Ok(b) if b != pending.question.block => diags.error(
                    Some(n),
                    DiagnosticCode::InconsistentBlockWithinQuestion,
                    format!(
                        "option row says block {b} but question {} is in block {}",
                        pending.question.question_id, pending.question.block
                    ),
                ),
                Ok(_) => {}
                Err(_) => diags.error(
                    Some(n),
                    DiagnosticCode::MalformedBlockId,
                    format!("malformed block id {block_cell:?}"),
                ),
            }
        }
        let option_text = row.get(Column::Options);
        if pending.question.freetext.is_some() {
            diags.warn(
                Some(n),
                DiagnosticCode::IgnoredOptionsForFreetext,
                format!(
                    "free-text question {} takes no options; row ignored",
                    pending.question.question_id
                ),
            );
            continue;
        }
        if option_text.is_empty() {
            diags.warn(Some(n), DiagnosticCode::EmptyOptionRow, "row has no option text; ignored");
            continue;
        }
        let branch_target = branch_cell(row, &mut diags);
        pending.question.options.push(OptionSpec {
            option_id: format!("opt{n}"),
            text: option_text.to_string(),
            branch_target,
            source_row: n,
        });
    }
    if let Some(done) = current.take() {
        finished.push(finish_question(done, &mut diags));
    }

    if finished.is_empty() && diags.errors.is_empty() {
        diags.error(None, DiagnosticCode::EmptySurvey, "survey has no questions");
    }
    if !diags.errors.is_empty() {
        return Err(ParseError { diagnostics: diags });
    }

    warn_duplicates(&finished, &mut diags);
    let top_blocks = build_blocks(finished);
    let mut survey = Survey {
        survey_id: String::new(),
        top_blocks,
        source_digest: String::new(),
    };
    let digest = hex::encode(Sha256::digest(emit_csv(&survey).as_bytes()));
    survey.survey_id = format!("survey-{}", &digest[..12]);
    survey.source_digest = digest;
    Ok((survey, diags))
}

fn read_rows(csv_text: &str, diags: &mut ParseDiagnostics) -> Option<Vec<RawRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(csv_text.as_bytes());
    let mut records = reader.records();

    let header = match records.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => {
            diags.error(Some(1), DiagnosticCode::CsvSyntax, e.to_string());
            return None;
        }
        None => {
            diags.error(None, DiagnosticCode::MissingRequiredColumn, "input has no header row");
            return None;
        }
    };

    let mut columns: Vec<Option<Column>> = Vec::with_capacity(header.len());
    let mut seen: HashMap<Column, usize> = HashMap::new();
    for (i, h) in header.iter().enumerate() {
        let h = h.trim().trim_start_matches('\u{feff}');
        match Column::from_header(h) {
            Some(c) => {
                if seen.insert(c, i).is_some() {
                    diags.error(
                        Some(1),
                        DiagnosticCode::DuplicateColumn,
                        format!("column {} appears more than once", c.name()),
                    );
                }
                columns.push(Some(c));
            }
            None => {
                if !h.is_empty() {
                    diags.warn(
                        Some(1),
                        DiagnosticCode::UnrecognizedHeader,
                        format!("unrecognized header {h:?} ignored"),
                    );
                }
                columns.push(None);
            }
        }
    }
    for required in [Column::Question, Column::Options] {
        if !seen.contains_key(&required) {
            diags.error(
                Some(1),
                DiagnosticCode::MissingRequiredColumn,
                format!("required column {} is missing", required.name()),
            );
        }
    }
    if !diags.errors.is_empty() {
        return None;
    }

    let mut rows = Vec::new();
    for (i, record) in records.enumerate() {
        let row_number = i + 2;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                diags.error(Some(row_number), DiagnosticCode::CsvSyntax, e.to_string());
                return None;
            }
        };
        let cells = columns
            .iter()
            .zip(record.iter())
            .filter_map(|(c, v)| c.map(|c| (c, v.trim().to_string())))
            .collect();
        rows.push(RawRow { row_number, cells });
    }
    Some(rows)
}

fn flag(row: &RawRow, column: Column, default: bool, diags: &mut ParseDiagnostics) -> bool {
    match boolean_cell(row.get(column), default) {
        Ok(v) => v,
        Err(e) => {
            diags.error(
                Some(row.row_number),
                DiagnosticCode::MalformedBoolean,
                format!("{}: {e}", column.name()),
            );
            default
        }
    }
}

fn branch_cell(row: &RawRow, diags: &mut ParseDiagnostics) -> Option<BlockId> {
    let cell = row.get(Column::Branch);
    if cell.is_empty() {
        return None;
    }
    match parse_block_id(cell) {
        Ok(b) => Some(b),
        Err(_) => {
            diags.error(
                Some(row.row_number),
                DiagnosticCode::MalformedBlockId,
                format!("malformed branch target {cell:?}"),
            );
            None
        }
    }
}

fn start_question(row: &RawRow, diags: &mut ParseDiagnostics) -> Option<PendingQuestion> {
    let n = row.row_number;
    let block_cell = row.get(Column::Block);
    let block = if block_cell.is_empty() {
        BlockId::top_level(1)
    } else {
        match parse_block_id(block_cell) {
            Ok(b) => b,
            Err(_) => {
                diags.error(
                    Some(n),
                    DiagnosticCode::MalformedBlockId,
                    format!("malformed block id {block_cell:?}"),
                );
                BlockId::top_level(1)
            }
        }
    };
    let exclusive = flag(row, Column::Exclusive, true, diags);
    let ordered = flag(row, Column::Ordered, false, diags);
    let randomize = flag(row, Column::Randomize, true, diags);
    let is_freetext = flag(row, Column::Freetext, false, diags);
    let correlated = row.get(Column::Correlated);
    let option_text = row.get(Column::Options);
    let branch = branch_cell(row, diags);

    let mut question = Question {
        question_id: format!("q{n}"),
        text: row.get(Column::Question).to_string(),
        options: Vec::new(),
        exclusive,
        ordered,
        randomize,
        freetext: None,
        correlated_group: (!correlated.is_empty()).then(|| correlated.to_string()),
        block,
        is_instructional: false,
        source_row: n,
    };
    let mut row_branch = None;
    if is_freetext {
        question.freetext = Some(Freetext {
            pattern: (!option_text.is_empty()).then(|| option_text.to_string()),
        });
        if branch.is_some() {
            diags.warn(
                Some(n),
                DiagnosticCode::IgnoredBranch,
                "free-text questions cannot branch; BRANCH cell ignored",
            );
        }
    } else if option_text.is_empty() {
        row_branch = branch;
    } else {
        question.options.push(OptionSpec {
            option_id: format!("opt{n}"),
            text: option_text.to_string(),
            branch_target: branch,
            source_row: n,
        });
    }
    Some(PendingQuestion {
        question,
        row_branch,
        row_branch_used: false,
    })
}

fn finish_question(mut pending: PendingQuestion, diags: &mut ParseDiagnostics) -> Question {
    let q = &mut pending.question;
    if q.freetext.is_none() && q.options.is_empty() {
        // A lone empty option: the question text is an instruction.
        q.options.push(OptionSpec {
            option_id: format!("opt{}", q.source_row),
            text: String::new(),
            branch_target: pending.row_branch.take(),
            source_row: q.source_row,
        });
        pending.row_branch_used = true;
    }
    if pending.row_branch.is_some() && !pending.row_branch_used {
        diags.warn(
            Some(q.source_row),
            DiagnosticCode::IgnoredBranch,
            "BRANCH cell on a question row without option text is ignored",
        );
    }
    q.is_instructional =
        q.freetext.is_none() && q.options.len() == 1 && q.options[0].text.is_empty();
    pending.question
}

fn normalize_text(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn warn_duplicates(questions: &[Question], diags: &mut ParseDiagnostics) {
    let mut first_seen: HashMap<String, &Question> = HashMap::new();
    for q in questions {
        let key = normalize_text(&q.text);
        match first_seen.get(&key) {
            Some(prev) => diags.warn(
                Some(q.source_row),
                DiagnosticCode::DuplicateQuestion,
                format!("question {} duplicates {}", q.question_id, prev.question_id),
            ),
            None => {
                first_seen.insert(key, q);
            }
        }
    }
}

/// Builds the containment tree, creating empty intermediate blocks where a
/// question names a nested block whose parents hold no questions.
fn build_blocks(questions: Vec<Question>) -> Vec<Block> {
    let mut by_path: BTreeMap<Vec<Segment>, Block> = BTreeMap::new();
    for q in questions {
        for ancestor in q.block.lineage() {
            by_path
                .entry(ancestor.segments().to_vec())
                .or_insert_with(|| Block::new(ancestor.clone()));
        }
        by_path
            .get_mut(q.block.segments())
            .expect("inserted above")
            .questions
            .push(q);
    }
    for block in by_path.values_mut() {
        block.questions.sort_by_key(|q| q.source_row);
    }
    // BTreeMap order is canonical order, and deeper paths sort after their
    // parents, so assemble children bottom-up by draining longest paths first.
    let mut paths: Vec<Vec<Segment>> = by_path.keys().cloned().collect();
    paths.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| b.cmp(a)));
    for path in paths {
        if path.len() == 1 {
            continue;
        }
        let block = by_path.remove(&path).expect("present");
        let parent = by_path
            .get_mut(&path[..path.len() - 1])
            .expect("lineage inserted");
        parent.subblocks.push(block);
    }
    let mut top: Vec<Block> = by_path.into_values().collect();
    fn sort_tree(b: &mut Block) {
        b.subblocks.sort_by(|x, y| x.id.canonical_cmp(&y.id));
        b.subblocks.iter_mut().for_each(sort_tree);
    }
    top.iter_mut().for_each(sort_tree);
    top.sort_by_key(|b| b.id.top_number());
    top
}

/// Canonical CSV rendering. Rows keep their original numbers (gaps become
/// empty records) so ids survive a round trip through [`parse_survey`].
pub fn emit_csv(survey: &Survey) -> String {
    let mut rows: BTreeMap<usize, [String; 9]> = BTreeMap::new();
    let bool_str = |b: bool| if b { "true" } else { "false" }.to_string();
    for q in survey.questions() {
        let block = q.block.to_string();
        let mut first = [
            q.text.clone(),
            String::new(),
            block.clone(),
            bool_str(q.exclusive),
            bool_str(q.ordered),
            String::new(),
            bool_str(q.randomize),
            bool_str(q.freetext.is_some()),
            q.correlated_group.clone().unwrap_or_default(),
        ];
        if let Some(ft) = &q.freetext {
            first[1] = ft.pattern.clone().unwrap_or_default();
        }
        for o in &q.options {
            let branch = o
                .branch_target
                .as_ref()
                .map(ToString::to_string)
                .unwrap_or_default();
            if o.source_row == q.source_row {
                first[1] = o.text.clone();
                first[5] = branch;
            } else {
                rows.insert(
                    o.source_row,
                    [
                        String::new(),
                        o.text.clone(),
                        block.clone(),
                        String::new(),
                        String::new(),
                        branch,
                        String::new(),
                        String::new(),
                        String::new(),
                    ],
                );
            }
        }
        rows.insert(q.source_row, first);
    }

    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    writer.write_record(COLUMNS).expect("in-memory write");
    let last = rows.keys().next_back().copied().unwrap_or(1);
    let empty: [String; 9] = Default::default();
    for n in 2..=last {
        writer
            .write_record(rows.get(&n).unwrap_or(&empty))
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 input")
}
