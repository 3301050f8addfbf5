//! The survey state machine: a block stack, a question stack and a branch
//! reference cell. A branch chosen inside a top-level block is remembered and
//! only taken once every question of that block has been answered.

use std::collections::{BTreeSet, HashMap};

use super::plan::SurveyPlan;
use crate::error::EngineError;
use crate::model::{check_answer, AnswerEvent, BlockId, Question, Survey};

/// A respondent's answer to the pending question.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    pub question_id: String,
    pub chosen_option_ids: BTreeSet<String>,
    pub freetext_value: Option<String>,
}

impl Answer {
    pub fn choice(question_id: &str, option_id: &str) -> Self {
        Answer {
            question_id: question_id.to_string(),
            chosen_option_ids: BTreeSet::from([option_id.to_string()]),
            freetext_value: None,
        }
    }

    pub fn empty(question_id: &str) -> Self {
        Answer {
            question_id: question_id.to_string(),
            chosen_option_ids: BTreeSet::new(),
            freetext_value: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step<'a> {
    NextQuestion { question: &'a Question, position: u32 },
    Finished,
}

#[derive(Debug, Clone)]
pub struct InterpreterState<'a> {
    survey: &'a Survey,
    plan: &'a SurveyPlan,
    lookup: HashMap<&'a str, &'a Question>,
    /// Top-level block indices; the next block is at the end.
    block_stack: Vec<usize>,
    /// Question ids of the current block; the next question is at the end.
    question_stack: Vec<String>,
    branch_ref: Option<BlockId>,
    pending: Option<&'a Question>,
    answered: Vec<AnswerEvent>,
}

impl<'a> InterpreterState<'a> {
    /// Pushes every top-level block; call [`start`](Self::start) to display
    /// the first question.
    pub fn new(survey: &'a Survey, plan: &'a SurveyPlan) -> Self {
        InterpreterState {
            survey,
            plan,
            lookup: survey.questions().map(|q| (q.question_id.as_str(), q)).collect(),
            block_stack: (0..survey.top_blocks.len()).rev().collect(),
            question_stack: Vec::new(),
            branch_ref: None,
            pending: None,
            answered: Vec::new(),
        }
    }

    pub fn start(&mut self) -> Result<Step<'a>, EngineError> {
        self.advance()
    }

    pub fn pending(&self) -> Option<&'a Question> {
        self.pending
    }

    pub fn branch_ref(&self) -> Option<&BlockId> {
        self.branch_ref.as_ref()
    }

    pub fn events(&self) -> &[AnswerEvent] {
        &self.answered
    }

    pub fn into_events(self) -> Vec<AnswerEvent> {
        self.answered
    }

    pub fn plan(&self) -> &'a SurveyPlan {
        self.plan
    }

    /// Records the answer to the pending question and moves on.
    pub fn step(&mut self, answer: Answer) -> Result<Step<'a>, EngineError> {
        let question = self.pending.ok_or(EngineError::NotRunning)?;
        if answer.question_id != question.question_id {
            return Err(EngineError::AnswerMismatch {
                expected: question.question_id.clone(),
                got: answer.question_id,
            });
        }
        check_answer(question, &answer.chosen_option_ids)?;

        if question.has_branch_map() {
            let target = answer
                .chosen_option_ids
                .iter()
                .find_map(|id| question.option(id).and_then(|o| o.branch_target.clone()));
            if target.is_some() {
                self.branch_ref = target;
            }
        }
        self.answered.push(AnswerEvent {
            question_id: answer.question_id,
            display_position: self.answered.len() as u32 + 1,
            chosen_option_ids: answer.chosen_option_ids,
            freetext_value: answer.freetext_value,
        });
        self.pending = None;
        self.advance()
    }

    fn advance(&mut self) -> Result<Step<'a>, EngineError> {
        loop {
            if let Some(id) = self.question_stack.pop() {
                let q = self.lookup[id.as_str()];
                self.pending = Some(q);
                return Ok(Step::NextQuestion {
                    question: q,
                    position: self.answered.len() as u32 + 1,
                });
            }
            if let Some(target) = self.branch_ref.take() {
                while let Some(&top) = self.block_stack.last() {
                    if self.survey.top_blocks[top].id == target {
                        break;
                    }
                    self.block_stack.pop();
                }
                if self.block_stack.is_empty() {
                    return Err(EngineError::UnknownBranchTarget(target));
                }
            }
            match self.block_stack.pop() {
                Some(idx) => {
                    self.question_stack = self.plan.top_sequences[idx].iter().rev().cloned().collect();
                }
                None => return Ok(Step::Finished),
            }
        }
    }
}
