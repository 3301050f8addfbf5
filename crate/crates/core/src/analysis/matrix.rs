use std::collections::HashMap;

use crate::model::{Question, ResponseRecord, Survey, Terminal};

/// One answer to an exclusive question: the authored option index and the
/// position it was displayed at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub option: usize,
    pub position: u32,
}

impl Cell {
    /// Ordinal rank on the authored scale, starting at 1.
    pub fn rank(&self) -> f64 {
        self.option as f64 + 1.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RespondentRow {
    pub respondent_id: String,
    pub completed: bool,
}

/// Answers to exclusive questions, question by respondent. Respondents are
/// sorted by id so that every analysis is invariant to record order.
#[derive(Debug, Clone)]
pub struct ResponseMatrix<'s> {
    survey: &'s Survey,
    questions: Vec<&'s Question>,
    index: HashMap<&'s str, usize>,
    respondents: Vec<RespondentRow>,
    cells: Vec<Vec<Option<Cell>>>,
}

impl<'s> ResponseMatrix<'s> {
    /// Builds the matrix from records already checked against `survey`.
    /// Breakoff records are included. Events for unknown questions or
    /// options are ignored.
    pub fn build(survey: &'s Survey, records: &[ResponseRecord]) -> Self {
        let questions: Vec<&Question> = survey
            .questions_by_row()
            .into_iter()
            .filter(|q| q.is_exclusive_choice())
            .collect();
        let index: HashMap<&str, usize> = questions
            .iter()
            .enumerate()
            .map(|(i, q)| (q.question_id.as_str(), i))
            .collect();
        let mut sorted: Vec<&ResponseRecord> = records.iter().collect();
        sorted.sort_by(|a, b| a.respondent_id.cmp(&b.respondent_id));

        let mut cells = vec![vec![None; sorted.len()]; questions.len()];
        let mut respondents = Vec::with_capacity(sorted.len());
        for (r, rec) in sorted.iter().enumerate() {
            respondents.push(RespondentRow {
                respondent_id: rec.respondent_id.clone(),
                completed: rec.terminal == Terminal::Completed,
            });
            for e in &rec.events {
                let Some(&qi) = index.get(e.question_id.as_str()) else {
                    continue;
                };
                let option = e
                    .chosen_option_ids
                    .iter()
                    .next()
                    .and_then(|o| questions[qi].option_index(o));
                if let Some(option) = option {
                    cells[qi][r] = Some(Cell {
                        option,
                        position: e.display_position,
                    });
                }
            }
        }
        ResponseMatrix {
            survey,
            questions,
            index,
            respondents,
            cells,
        }
    }

    pub fn survey(&self) -> &'s Survey {
        self.survey
    }

    /// Exclusive questions by source row.
    pub fn questions(&self) -> &[&'s Question] {
        &self.questions
    }

    pub fn question_index(&self, question_id: &str) -> Option<usize> {
        self.index.get(question_id).copied()
    }

    pub fn respondents(&self) -> &[RespondentRow] {
        &self.respondents
    }

    pub fn column(&self, question: usize) -> &[Option<Cell>] {
        &self.cells[question]
    }

    pub fn cell(&self, question: usize, respondent: usize) -> Option<Cell> {
        self.cells[question][respondent]
    }
}
