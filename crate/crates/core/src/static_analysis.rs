//! Pre-deployment checks and survey statistics.
//!
//! The flow between top-level blocks forms a DAG: each block either falls
//! through to the next block or follows its single branch question (or its
//! variant set). Path statistics only need the number of questions each block
//! contributes, so they are computed over that DAG rather than over the
//! combinatorially many question orders.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::csv_frontend::ParseDiagnostics;
use crate::error::ModelError;
use crate::model::{Block, BlockId, BranchType, Question, Survey};
use crate::simulator::{simulate, Profile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ViolationCode {
    /// Branch into a nested or floating block.
    NonTopLevelTarget,
    /// Branch to a block that does not exist.
    UnknownTarget,
    /// Branch to the same or a lower-numbered top-level block.
    BackwardBranch,
    /// Several but not all questions branch, or variants disagree on target.
    InconsistentBranchBlock,
    /// More than one branch question (or variant set) under one top-level block.
    MultipleBranchQuestions,
    /// A branch question inside a floating block.
    FloatingBranch,
    /// A branch map on a checkbox question.
    CheckboxBranch,
    /// A branch map on an instructional question.
    InstructionalBranch,
    /// A variant (ALL) block with child blocks.
    AllBlockWithChildren,
    /// Variants of one block differ in option count or answer type.
    VariantShapeMismatch,
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub location: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub code: String,
    pub location: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathBounds {
    pub min: usize,
    pub max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub block: BlockId,
    pub branch_type: Option<BranchType>,
    pub questions: usize,
    pub path_contribution: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticReport {
    pub survey_id: String,
    pub source_digest: String,
    pub question_count: usize,
    /// Path statistics are only computed for well-formed surveys.
    pub min_path_len: Option<usize>,
    pub max_path_len: Option<usize>,
    pub avg_path_len: Option<f64>,
    pub avg_path_simulations: usize,
    pub max_entropy_bits: f64,
    pub blocks: Vec<BlockSummary>,
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl StaticReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StaticConfig {
    pub n_sim: usize,
    pub seed: u64,
}

impl Default for StaticConfig {
    fn default() -> Self {
        StaticConfig { n_sim: 5000, seed: 0 }
    }
}

/// Runs every check and, if the survey is well formed, the path statistics.
pub fn analyze_static(
    survey: &Survey,
    parse: Option<&ParseDiagnostics>,
    config: StaticConfig,
) -> StaticReport {
    let violations = check_wellformed(survey);
    let mut warnings: Vec<Warning> = parse
        .map(|d| {
            d.warnings
                .iter()
                .map(|w| Warning {
                    code: w.code.to_string(),
                    location: w.row.map(|r| format!("row {r}")).unwrap_or_default(),
                    message: w.message.clone(),
                })
                .collect()
        })
        .unwrap_or_default();

    let blocks = survey
        .top_blocks
        .iter()
        .map(|b| BlockSummary {
            block: b.id.clone(),
            branch_type: top_branch_type(b),
            questions: b.all_questions().count(),
            path_contribution: contribution(b).0,
        })
        .collect();

    let mut report = StaticReport {
        survey_id: survey.survey_id.clone(),
        source_digest: survey.source_digest.clone(),
        question_count: survey.question_count(),
        min_path_len: None,
        max_path_len: None,
        avg_path_len: None,
        avg_path_simulations: 0,
        max_entropy_bits: max_entropy_bits(survey),
        blocks,
        violations,
        warnings: Vec::new(),
    };
    if report.violations.is_empty() {
        let graph = FlowGraph::new(survey);
        for idx in graph.unreachable() {
            warnings.push(Warning {
                code: "UnreachableBlock".into(),
                location: format!("block {}", survey.top_blocks[idx].id),
                message: "no branch decision leads to this block; it is dropped on compile".into(),
            });
        }
        let bounds = graph.bounds(|n| n.questions);
        report.min_path_len = Some(bounds.min);
        report.max_path_len = Some(bounds.max);
        report.avg_path_len = Some(average_path_length(survey, config.n_sim, config.seed));
        report.avg_path_simulations = config.n_sim;
    }
    report.warnings = warnings;
    report
}

fn loc_question(q: &Question) -> String {
    format!("block {} / {}", q.block, q.question_id)
}

/// Returns every well-formedness violation; empty means the survey may be
/// compiled and deployed.
pub fn check_wellformed(survey: &Survey) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |code, location: String, message: String| {
        out.push(Violation {
            code,
            location,
            message,
        })
    };

    for top in &survey.top_blocks {
        let top_number = top.id.top_number();
        let mut branch_units: Vec<String> = Vec::new();

        for block in top.walk() {
            let bt = match block.branch_type() {
                Ok(bt) => Some(bt),
                Err(ModelError::InconsistentBranchBlock { reason, .. }) => {
                    push(
                        ViolationCode::InconsistentBranchBlock,
                        format!("block {}", block.id),
                        reason,
                    );
                    None
                }
                Err(e) => unreachable!("branch_type only reports inconsistency: {e}"),
            };
            match bt {
                Some(BranchType::One) => {
                    let q = block.questions.iter().find(|q| q.has_branch_map()).expect("ONE");
                    branch_units.push(q.question_id.clone());
                }
                Some(BranchType::All) => {
                    branch_units.push(format!("variants of block {}", block.id));
                    if !block.subblocks.is_empty() {
                        push(
                            ViolationCode::AllBlockWithChildren,
                            format!("block {}", block.id),
                            "a variant block cannot contain other blocks".into(),
                        );
                    }
                    check_variant_shape(block, &mut push);
                }
                _ => {}
            }

            for q in &block.questions {
                if !q.has_branch_map() {
                    continue;
                }
                if block.id.within_floating() {
                    push(
                        ViolationCode::FloatingBranch,
                        loc_question(q),
                        "floating blocks cannot contain branch questions".into(),
                    );
                }
                if q.is_instructional {
                    push(
                        ViolationCode::InstructionalBranch,
                        loc_question(q),
                        "instructional questions cannot branch".into(),
                    );
                } else if !q.exclusive {
                    push(
                        ViolationCode::CheckboxBranch,
                        loc_question(q),
                        "checkbox questions cannot branch".into(),
                    );
                }
                let mut reported = BTreeSet::new();
                for o in &q.options {
                    let Some(target) = &o.branch_target else { continue };
                    if !reported.insert(target.to_string()) {
                        continue;
                    }
                    let loc = format!("{} / {}", loc_question(q), o.option_id);
                    if !target.is_top_level() {
                        push(
                            ViolationCode::NonTopLevelTarget,
                            loc,
                            format!("branch target {target} is not a top-level block"),
                        );
                    } else if survey.top_block_index(target).is_none() {
                        push(
                            ViolationCode::UnknownTarget,
                            loc,
                            format!("branch target {target} does not exist"),
                        );
                    } else if target.top_number() <= top_number {
                        push(
                            ViolationCode::BackwardBranch,
                            loc,
                            format!(
                                "branch from block {} to block {target} does not move forward",
                                top.id
                            ),
                        );
                    }
                }
            }
        }

        if branch_units.len() > 1 {
            push(
                ViolationCode::MultipleBranchQuestions,
                format!("block {}", top.id),
                format!(
                    "top-level block has {} branch points ({}); at most one is allowed",
                    branch_units.len(),
                    branch_units.join(", ")
                ),
            );
        }
    }
    out
}

fn check_variant_shape(block: &Block, push: &mut impl FnMut(ViolationCode, String, String)) {
    let first = &block.questions[0];
    for q in &block.questions[1..] {
        if q.options.len() != first.options.len()
            || q.exclusive != first.exclusive
            || q.ordered != first.ordered
            || q.is_instructional != first.is_instructional
        {
            push(
                ViolationCode::VariantShapeMismatch,
                loc_question(q),
                format!(
                    "variant {} does not share the option scale of {}",
                    q.question_id, first.question_id
                ),
            );
        }
    }
}

/// Branch type of a top-level block with its descendants taken into
/// account: ALL if it is itself a variant block, ONE if any block inside it
/// branches, NONE otherwise. `None` if some block is inconsistent.
fn top_branch_type(top: &Block) -> Option<BranchType> {
    let mut result = BranchType::None;
    for block in top.walk() {
        match block.branch_type().ok()? {
            BranchType::None => {}
            BranchType::All if block.id == top.id => return Some(BranchType::All),
            _ => result = BranchType::One,
        }
    }
    Some(result)
}

/// (questions shown, answerable questions shown) for one block subtree.
fn contribution(block: &Block) -> (usize, usize) {
    if matches!(block.branch_type(), Ok(BranchType::All)) {
        let answerable = usize::from(block.questions[0].is_answerable());
        return (1, answerable);
    }
    let mut shown = block.questions.len();
    let mut answerable = block.questions.iter().filter(|q| q.is_answerable()).count();
    for sub in &block.subblocks {
        let (s, a) = contribution(sub);
        shown += s;
        answerable += a;
    }
    (shown, answerable)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Next {
    Block(usize),
    End,
}

#[derive(Debug, Clone)]
struct FlowNode {
    questions: usize,
    answerable: usize,
    successors: Vec<Next>,
}

/// Top-level block DAG of a well-formed survey.
#[derive(Debug, Clone)]
struct FlowGraph {
    nodes: Vec<FlowNode>,
}

impl FlowGraph {
    fn new(survey: &Survey) -> Self {
        let n = survey.top_blocks.len();
        let fall_through = |i: usize| if i + 1 < n { Next::Block(i + 1) } else { Next::End };
        let nodes = survey
            .top_blocks
            .iter()
            .enumerate()
            .map(|(i, top)| {
                let (questions, answerable) = contribution(top);
                let mut successors = BTreeSet::new();
                let branching = top.walk().into_iter().find_map(|b| match b.branch_type() {
                    Ok(BranchType::One) => b.questions.iter().find(|q| q.has_branch_map()),
                    Ok(BranchType::All) => b.questions.first(),
                    _ => None,
                });
                match branching {
                    None => {
                        successors.insert(fall_through(i));
                    }
                    Some(q) => {
                        for o in &q.options {
                            let next = o
                                .branch_target
                                .as_ref()
                                .and_then(|t| survey.top_block_index(t))
                                .filter(|&t| t > i)
                                .map(Next::Block)
                                .unwrap_or_else(|| fall_through(i));
                            successors.insert(next);
                        }
                    }
                }
                FlowNode {
                    questions,
                    answerable,
                    successors: successors.into_iter().collect(),
                }
            })
            .collect();
        FlowGraph { nodes }
    }

    /// Shortest and longest root-to-end totals of `weight`.
    fn bounds(&self, weight: impl Fn(&FlowNode) -> usize) -> PathBounds {
        if self.nodes.is_empty() {
            return PathBounds { min: 0, max: 0 };
        }
        let mut best = vec![(0usize, 0usize); self.nodes.len()];
        for i in (0..self.nodes.len()).rev() {
            let node = &self.nodes[i];
            let (mut lo, mut hi) = (usize::MAX, 0);
            for s in &node.successors {
                let (l, h) = match s {
                    Next::End => (0, 0),
                    Next::Block(j) => best[*j],
                };
                lo = lo.min(l);
                hi = hi.max(h);
            }
            let w = weight(node);
            best[i] = (w + lo, w + hi);
        }
        PathBounds {
            min: best[0].0,
            max: best[0].1,
        }
    }

    fn unreachable(&self) -> Vec<usize> {
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::new();
        if !self.nodes.is_empty() {
            seen[0] = true;
            queue.push_back(0);
        }
        while let Some(i) = queue.pop_front() {
            for s in &self.nodes[i].successors {
                if let Next::Block(j) = *s {
                    if !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        (0..self.nodes.len()).filter(|&i| !seen[i]).collect()
    }
}

/// Indices of top-level blocks some branch decision can reach.
pub fn reachable_top_blocks(survey: &Survey) -> Vec<usize> {
    let graph = FlowGraph::new(survey);
    let dead: BTreeSet<usize> = graph.unreachable().into_iter().collect();
    (0..survey.top_blocks.len()).filter(|i| !dead.contains(i)).collect()
}

/// Fewest and most questions a completing respondent can be shown.
pub fn path_length_bounds(survey: &Survey) -> PathBounds {
    FlowGraph::new(survey).bounds(|n| n.questions)
}

/// Mean number of questions shown to `n_sim` simulated uniform-random
/// respondents.
pub fn average_path_length(survey: &Survey, n_sim: usize, seed: u64) -> f64 {
    if n_sim == 0 {
        return 0.0;
    }
    let records = simulate(survey, &Profile::uniform(), n_sim, seed);
    let total: usize = records.iter().map(|r| r.events.len()).sum();
    total as f64 / n_sim as f64
}

/// Upper bound on response entropy: the answerable length of the longest
/// path times log2 of the largest option count.
pub fn max_entropy_bits(survey: &Survey) -> f64 {
    let n = FlowGraph::new(survey).bounds(|node| node.answerable).max;
    let m = survey
        .questions()
        .filter(|q| q.is_answerable())
        .map(|q| q.options.len())
        .max()
        .unwrap_or(0);
    if n == 0 || m <= 1 {
        return 0.0;
    }
    n as f64 * (m as f64).log2()
}

impl fmt::Display for StaticReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "survey {} ({} questions)", self.survey_id, self.question_count)?;
        writeln!(f, "digest {}", self.source_digest)?;
        writeln!(f)?;
        writeln!(f, "blocks:")?;
        for b in &self.blocks {
            let bt = b
                .branch_type
                .map(|t| t.to_string())
                .unwrap_or_else(|| "INCONSISTENT".into());
            writeln!(
                f,
                "  {:<8} {:<12} {:>4} questions, {:>4} on any path",
                b.block.to_string(),
                bt,
                b.questions,
                b.path_contribution
            )?;
        }
        writeln!(f)?;
        match (self.min_path_len, self.max_path_len, self.avg_path_len) {
            (Some(min), Some(max), Some(avg)) => {
                writeln!(f, "min path length:  {min}")?;
                writeln!(f, "max path length:  {max}")?;
                writeln!(
                    f,
                    "avg path length:  {avg:.3} ({} simulated respondents)",
                    self.avg_path_simulations
                )?;
            }
            _ => writeln!(f, "path statistics: not computed (survey has violations)")?,
        }
        writeln!(f, "max entropy:      {:.2} bits", self.max_entropy_bits)?;
        if !self.violations.is_empty() {
            writeln!(f)?;
            writeln!(f, "violations ({}):", self.violations.len())?;
            for v in &self.violations {
                writeln!(f, "  {}  {}: {}", v.code, v.location, v.message)?;
            }
        }
        if !self.warnings.is_empty() {
            writeln!(f)?;
            writeln!(f, "warnings ({}):", self.warnings.len())?;
            for w in &self.warnings {
                writeln!(f, "  {}  {}: {}", w.code, w.location, w.message)?;
            }
        }
        Ok(())
    }
}
