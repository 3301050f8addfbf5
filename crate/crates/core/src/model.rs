//! Core survey types: block identifiers, questions, blocks and response records.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ModelError;

/// One dot-separated component of a [`BlockId`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Segment {
    /// Ordered sibling, e.g. the `2` in `1.2`.
    Numeric(u32),
    /// Floating sibling, e.g. the `a1` in `1.a1`. Has no fixed position.
    Floating(String),
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Segment::Numeric(n) => write!(f, "{n}"),
            Segment::Floating(label) => f.write_str(label),
        }
    }
}

/// Hierarchical block identifier matching `[1-9][0-9]*(.[a-z1-9][0-9]*)*`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockId {
    segments: Vec<Segment>,
}

/// Result of [`compare_blocks`]. Floating siblings have no order, so this is
/// richer than [`std::cmp::Ordering`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockOrdering {
    Less,
    Equal,
    Greater,
    Incomparable,
}

impl BlockId {
    pub fn top_level(n: u32) -> Self {
        assert!(n > 0, "block numbers start at 1");
        BlockId {
            segments: vec![Segment::Numeric(n)],
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn depth(&self) -> usize {
        self.segments.len()
    }

    pub fn is_top_level(&self) -> bool {
        self.segments.len() == 1
    }

    /// True iff the last segment is a floating label.
    pub fn is_floating(&self) -> bool {
        matches!(self.segments.last(), Some(Segment::Floating(_)))
    }

    /// True iff any segment is floating, i.e. the block lives inside a
    /// floating subtree.
    pub fn within_floating(&self) -> bool {
        self.segments
            .iter()
            .any(|s| matches!(s, Segment::Floating(_)))
    }

    /// Number of the top-level block containing this one.
    pub fn top_number(&self) -> u32 {
        match self.segments[0] {
            Segment::Numeric(n) => n,
            Segment::Floating(_) => unreachable!("first segment is always numeric"),
        }
    }

    pub fn top(&self) -> BlockId {
        BlockId {
            segments: self.segments[..1].to_vec(),
        }
    }

    pub fn parent(&self) -> Option<BlockId> {
        (self.segments.len() > 1).then(|| BlockId {
            segments: self.segments[..self.segments.len() - 1].to_vec(),
        })
    }

    /// Ancestors from the top-level block down to (and including) `self`.
    pub fn lineage(&self) -> impl Iterator<Item = BlockId> + '_ {
        (1..=self.segments.len()).map(|k| BlockId {
            segments: self.segments[..k].to_vec(),
        })
    }

    pub fn is_ancestor_of(&self, other: &BlockId) -> bool {
        other.segments.len() > self.segments.len()
            && other.segments[..self.segments.len()] == self.segments[..]
    }

    /// Canonical sibling order: numeric segments ascending, then floating
    /// labels ascending. Used only to fix an iteration order, never as the
    /// display order.
    pub(crate) fn canonical_cmp(&self, other: &BlockId) -> Ordering {
        self.segments.cmp(&other.segments)
    }
}

/// Parses a block id, rejecting anything outside the block grammar.
pub fn parse_block_id(s: &str) -> Result<BlockId, ModelError> {
    let malformed = || ModelError::MalformedBlockId(s.to_string());
    if s.is_empty() {
        return Err(malformed());
    }
    let mut segments = Vec::new();
    for (i, part) in s.split('.').enumerate() {
        let mut chars = part.chars();
        let first = chars.next().ok_or_else(malformed)?;
        if !chars.as_str().bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        match first {
            '1'..='9' => {
                let n: u32 = part.parse().map_err(|_| malformed())?;
                segments.push(Segment::Numeric(n));
            }
            'a'..='z' if i > 0 => segments.push(Segment::Floating(part.to_string())),
            _ => return Err(malformed()),
        }
    }
    Ok(BlockId { segments })
}

/// Partial order over blocks: lexicographic on numeric segments, incomparable
/// as soon as the first differing pair involves a floating segment or one id
/// is a prefix of the other (a block's own questions mix freely with its
/// children).
pub fn compare_blocks(a: &BlockId, b: &BlockId) -> BlockOrdering {
    for (x, y) in a.segments.iter().zip(&b.segments) {
        if x == y {
            continue;
        }
        return match (x, y) {
            (Segment::Numeric(x), Segment::Numeric(y)) => {
                if x < y {
                    BlockOrdering::Less
                } else {
                    BlockOrdering::Greater
                }
            }
            _ => BlockOrdering::Incomparable,
        };
    }
    if a.segments.len() == b.segments.len() {
        BlockOrdering::Equal
    } else {
        BlockOrdering::Incomparable
    }
}

impl fmt::Display for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, seg) in self.segments.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{seg}")?;
        }
        Ok(())
    }
}

impl FromStr for BlockId {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_block_id(s)
    }
}

impl Serialize for BlockId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BlockId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_block_id(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionSpec {
    pub option_id: String,
    pub text: String,
    pub branch_target: Option<BlockId>,
    /// 1-based CSV row the option was read from.
    pub source_row: usize,
}

/// Free-text entry settings. `pattern` is an optional regular expression the
/// runner enforces on input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Freetext {
    pub pattern: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Question {
    pub question_id: String,
    pub text: String,
    pub options: Vec<OptionSpec>,
    pub exclusive: bool,
    pub ordered: bool,
    pub randomize: bool,
    pub freetext: Option<Freetext>,
    pub correlated_group: Option<String>,
    pub block: BlockId,
    pub is_instructional: bool,
    pub source_row: usize,
}

impl Question {
    pub fn has_branch_map(&self) -> bool {
        self.options.iter().any(|o| o.branch_target.is_some())
    }

    /// Questions whose answers are one of several listed options: everything
    /// except instructions and free text.
    pub fn is_answerable(&self) -> bool {
        !self.is_instructional && self.freetext.is_none()
    }

    /// Radio-button questions, the only kind the pairwise statistics use.
    pub fn is_exclusive_choice(&self) -> bool {
        self.is_answerable() && self.exclusive
    }

    pub fn option(&self, option_id: &str) -> Option<&OptionSpec> {
        self.options.iter().find(|o| o.option_id == option_id)
    }

    pub fn option_index(&self, option_id: &str) -> Option<usize> {
        self.options.iter().position(|o| o.option_id == option_id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BranchType {
    None,
    One,
    All,
}

impl fmt::Display for BranchType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BranchType::None => "NONE",
            BranchType::One => "ONE",
            BranchType::All => "ALL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub id: BlockId,
    /// Directly contained questions, ascending by source row.
    pub questions: Vec<Question>,
    /// Child blocks in canonical order (numeric ascending, then floating).
    pub subblocks: Vec<Block>,
}

impl Block {
    pub fn new(id: BlockId) -> Self {
        Block {
            id,
            questions: Vec::new(),
            subblocks: Vec::new(),
        }
    }

    pub fn branch_type(&self) -> Result<BranchType, ModelError> {
        block_branch_type(self)
    }

    /// Pre-order walk: this block, then each subblock's walk.
    pub fn walk(&self) -> Vec<&Block> {
        let mut out = vec![self];
        for sub in &self.subblocks {
            out.extend(sub.walk());
        }
        out
    }

    /// Every question in this block and its descendants, in pre-order.
    pub fn all_questions(&self) -> impl Iterator<Item = &Question> {
        self.walk().into_iter().flat_map(|b| b.questions.iter())
    }
}

/// Classifies a block by its directly contained questions.
pub fn block_branch_type(block: &Block) -> Result<BranchType, ModelError> {
    let branching: Vec<&Question> = block.questions.iter().filter(|q| q.has_branch_map()).collect();
    match branching.len() {
        0 => Ok(BranchType::None),
        1 => Ok(BranchType::One),
        k if k < block.questions.len() => Err(ModelError::InconsistentBranchBlock {
            block: block.id.clone(),
            reason: format!(
                "{k} of {} questions branch; expected one or all",
                block.questions.len()
            ),
        }),
        _ => {
            let mut targets = BTreeSet::new();
            for q in &branching {
                for o in &q.options {
                    match &o.branch_target {
                        Some(t) => {
                            targets.insert(t.to_string());
                        }
                        None => {
                            return Err(ModelError::InconsistentBranchBlock {
                                block: block.id.clone(),
                                reason: format!(
                                    "variant {} has option {} without a branch target",
                                    q.question_id, o.option_id
                                ),
                            })
                        }
                    }
                }
            }
            if targets.len() == 1 {
                Ok(BranchType::All)
            } else {
                Err(ModelError::InconsistentBranchBlock {
                    block: block.id.clone(),
                    reason: format!(
                        "all questions branch but to different targets: {}",
                        targets.into_iter().collect::<Vec<_>>().join(", ")
                    ),
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Survey {
    pub survey_id: String,
    /// Ascending by block number.
    pub top_blocks: Vec<Block>,
    /// SHA-256 (hex) of the canonical CSV rendering.
    pub source_digest: String,
}

impl Survey {
    pub fn blocks(&self) -> impl Iterator<Item = &Block> {
        self.top_blocks.iter().flat_map(|b| b.walk())
    }

    pub fn questions(&self) -> impl Iterator<Item = &Question> {
        self.top_blocks.iter().flat_map(|b| b.all_questions())
    }

    /// Questions ascending by source row.
    pub fn questions_by_row(&self) -> Vec<&Question> {
        let mut qs: Vec<&Question> = self.questions().collect();
        qs.sort_by_key(|q| q.source_row);
        qs
    }

    pub fn question(&self, question_id: &str) -> Option<&Question> {
        self.questions().find(|q| q.question_id == question_id)
    }

    pub fn block(&self, id: &BlockId) -> Option<&Block> {
        self.blocks().find(|b| &b.id == id)
    }

    pub fn top_block_index(&self, id: &BlockId) -> Option<usize> {
        self.top_blocks.iter().position(|b| &b.id == id)
    }

    pub fn question_count(&self) -> usize {
        self.questions().count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Terminal {
    Completed,
    Breakoff,
}

/// One displayed question and the respondent's answer to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerEvent {
    pub question_id: String,
    /// 1-based position at which the question was displayed.
    pub display_position: u32,
    pub chosen_option_ids: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freetext_value: Option<String>,
}

/// A respondent's answer trace. One JSON object per line in `responses.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub respondent_id: String,
    pub seed: u32,
    pub source_digest: String,
    pub events: Vec<AnswerEvent>,
    pub terminal: Terminal,
    /// Milliseconds since the Unix epoch, one per event.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_times: Option<Vec<u64>>,
}

impl ResponseRecord {
    /// Checks the record-level invariants that do not need the survey.
    pub fn validate_shape(&self) -> Result<(), ModelError> {
        for (i, e) in self.events.iter().enumerate() {
            if e.display_position as usize != i + 1 {
                return Err(ModelError::InvalidRecord(format!(
                    "event {} has display_position {}; positions must run 1..n without gaps",
                    i + 1,
                    e.display_position
                )));
            }
        }
        if let Some(times) = &self.wall_times {
            if times.len() != self.events.len() {
                return Err(ModelError::InvalidRecord(format!(
                    "{} wall times for {} events",
                    times.len(),
                    self.events.len()
                )));
            }
        }
        Ok(())
    }

    /// Checks answers against the survey: known questions, known options,
    /// and the exclusive/checkbox cardinality rules.
    pub fn validate_against(&self, survey: &Survey) -> Result<(), ModelError> {
        self.validate_shape()?;
        let mut seen = BTreeSet::new();
        for e in &self.events {
            let q = survey.question(&e.question_id).ok_or_else(|| {
                ModelError::InvalidRecord(format!("unknown question {}", e.question_id))
            })?;
            if !seen.insert(&e.question_id) {
                return Err(ModelError::InvalidRecord(format!(
                    "question {} answered twice",
                    e.question_id
                )));
            }
            check_answer(q, &e.chosen_option_ids)?;
        }
        Ok(())
    }
}

pub(crate) fn check_answer(q: &Question, chosen: &BTreeSet<String>) -> Result<(), ModelError> {
    if let Some(bad) = chosen.iter().find(|id| q.option(id).is_none()) {
        return Err(ModelError::InvalidRecord(format!(
            "option {bad} does not belong to question {}",
            q.question_id
        )));
    }
    if !q.is_answerable() {
        return Ok(());
    }
    let n = chosen.len();
    if q.exclusive && n != 1 {
        return Err(ModelError::InvalidRecord(format!(
            "exclusive question {} needs exactly one choice, got {n}",
            q.question_id
        )));
    }
    if !q.exclusive && n == 0 {
        return Err(ModelError::InvalidRecord(format!(
            "checkbox question {} needs at least one choice",
            q.question_id
        )));
    }
    Ok(())
}
