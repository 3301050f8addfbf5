//! Per-respondent randomization.
//!
//! All draws come from one [`Prng`] seeded with `seed_from_id(respondent_id)`
//! and happen in three passes, which the browser runner must replay exactly:
//!
//! 1. Variant choice: for each variant (ALL) block in canonical pre-order,
//!    `below(variant_count)` picks the variant, indexing variants by source row.
//! 2. Slot shuffle: for each other block in canonical pre-order, its direct
//!    questions (by source row) followed by its subblocks (canonical order)
//!    are shuffled as units; numbered subblocks are then put back in ascending
//!    order within the slots they occupy, so only questions and floating
//!    subblocks move freely.
//! 3. Option order: for each question by source row with at least two
//!    options: unordered+randomized questions are shuffled; ordered+randomized
//!    questions are reversed when `below(2) == 1`; everything else keeps the
//!    authored order and draws nothing. Instructions and free text draw nothing.
//!
//! Canonical pre-order visits top-level blocks ascending, and within a block
//! the block itself before its subblocks (numbered ascending, then floating
//! labels ascending). Top-level blocks that no branch decision reaches are
//! left out of every pass, matching the compiled payload.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::prng::{seed_from_id, shuffle, Prng};
use crate::model::{Block, BlockId, BranchType, Question, Segment, Survey};
use crate::static_analysis::reachable_top_blocks;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "lowercase")]
pub enum PlanUnit {
    Question(String),
    Block(BlockId),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyPlan {
    pub respondent_id: String,
    pub seed: u32,
    pub source_digest: String,
    /// Every block in the order it is entered.
    pub block_order: Vec<BlockId>,
    /// Arranged children of each non-variant block, keyed by block id.
    pub units: BTreeMap<String, Vec<PlanUnit>>,
    /// Displayed direct questions of each block, keyed by block id.
    pub question_order: BTreeMap<String, Vec<String>>,
    /// Chosen question of each variant block.
    pub variant_choice: BTreeMap<String, String>,
    /// Display order of option ids, for every question.
    pub option_order: BTreeMap<String, Vec<String>>,
    /// Flattened question sequence of each top-level block, ascending.
    pub top_sequences: Vec<Vec<String>>,
}

impl SurveyPlan {
    /// The full display order assuming no branch skips any block.
    pub fn question_sequence(&self) -> Vec<&str> {
        self.top_sequences
            .iter()
            .flatten()
            .map(String::as_str)
            .collect()
    }
}

fn is_variant_block(b: &Block) -> bool {
    matches!(b.branch_type(), Ok(BranchType::All))
}

/// Builds the randomized plan for one respondent.
pub fn make_plan(survey: &Survey, respondent_id: &str) -> SurveyPlan {
    let seed = seed_from_id(respondent_id);
    let mut prng = Prng::new(seed);
    let reachable: BTreeSet<usize> = reachable_top_blocks(survey).into_iter().collect();
    let live_tops: Vec<&Block> = reachable.iter().map(|&i| &survey.top_blocks[i]).collect();
    let blocks: Vec<&Block> = live_tops.iter().flat_map(|b| b.walk()).collect();

    let mut variant_choice = BTreeMap::new();
    for b in blocks.iter().filter(|b| is_variant_block(b)) {
        let k = prng.below(b.questions.len() as u32) as usize;
        variant_choice.insert(b.id.to_string(), b.questions[k].question_id.clone());
    }

    let mut units = BTreeMap::new();
    for b in blocks.iter().filter(|b| !is_variant_block(b)) {
        units.insert(b.id.to_string(), arrange_units(b, &mut prng));
    }

    let mut option_order = BTreeMap::new();
    let mut questions: Vec<&Question> = live_tops.iter().flat_map(|b| b.all_questions()).collect();
    questions.sort_by_key(|q| q.source_row);
    for q in questions {
        option_order.insert(q.question_id.clone(), order_options(q, &mut prng));
    }

    let mut block_order = Vec::new();
    let mut question_order = BTreeMap::new();
    let top_sequences = survey
        .top_blocks
        .iter()
        .enumerate()
        .map(|(i, top)| {
            let mut seq = Vec::new();
            if !reachable.contains(&i) {
                return seq;
            }
            expand(
                top,
                &units,
                &variant_choice,
                &mut seq,
                &mut block_order,
                &mut question_order,
            );
            seq
        })
        .collect();

    SurveyPlan {
        respondent_id: respondent_id.to_string(),
        seed,
        source_digest: survey.source_digest.clone(),
        block_order,
        units,
        question_order,
        variant_choice,
        option_order,
        top_sequences,
    }
}

fn arrange_units(block: &Block, prng: &mut Prng) -> Vec<PlanUnit> {
    let mut units: Vec<PlanUnit> = block
        .questions
        .iter()
        .map(|q| PlanUnit::Question(q.question_id.clone()))
        .chain(block.subblocks.iter().map(|b| PlanUnit::Block(b.id.clone())))
        .collect();
    shuffle(&mut units, prng);

    let is_numbered = |u: &PlanUnit| {
        matches!(u, PlanUnit::Block(id) if matches!(id.segments().last(), Some(Segment::Numeric(_))))
    };
    let slots: Vec<usize> = (0..units.len()).filter(|&i| is_numbered(&units[i])).collect();
    let mut numbered: Vec<PlanUnit> = slots.iter().map(|&i| units[i].clone()).collect();
    numbered.sort_by(|a, b| match (a, b) {
        (PlanUnit::Block(x), PlanUnit::Block(y)) => x.canonical_cmp(y),
        _ => unreachable!("only block units are numbered"),
    });
    for (slot, unit) in slots.into_iter().zip(numbered) {
        units[slot] = unit;
    }
    units
}

fn order_options(q: &Question, prng: &mut Prng) -> Vec<String> {
    let mut ids: Vec<String> = q.options.iter().map(|o| o.option_id.clone()).collect();
    if !q.is_answerable() || ids.len() < 2 || !q.randomize {
        return ids;
    }
    if q.ordered {
        if prng.below(2) == 1 {
            ids.reverse();
        }
    } else {
        shuffle(&mut ids, prng);
    }
    ids
}

fn expand(
    block: &Block,
    units: &BTreeMap<String, Vec<PlanUnit>>,
    variants: &BTreeMap<String, String>,
    seq: &mut Vec<String>,
    block_order: &mut Vec<BlockId>,
    question_order: &mut BTreeMap<String, Vec<String>>,
) {
    let key = block.id.to_string();
    block_order.push(block.id.clone());
    if let Some(chosen) = variants.get(&key) {
        seq.push(chosen.clone());
        question_order.insert(key, vec![chosen.clone()]);
        return;
    }
    let mut direct = Vec::new();
    for unit in &units[&key] {
        match unit {
            PlanUnit::Question(id) => {
                seq.push(id.clone());
                direct.push(id.clone());
            }
            PlanUnit::Block(id) => {
                let sub = block
                    .subblocks
                    .iter()
                    .find(|b| &b.id == id)
                    .expect("unit names a child block");
                expand(sub, units, variants, seq, block_order, question_order);
            }
        }
    }
    question_order.insert(key, direct);
}
