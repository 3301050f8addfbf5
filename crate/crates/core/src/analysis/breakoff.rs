use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{ResponseRecord, Terminal};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionCount {
    pub position: u32,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionCount {
    pub question_id: String,
    pub count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BreakoffTallies {
    /// Descending by count, then ascending by position.
    pub by_position: Vec<PositionCount>,
    /// Descending by count, then ascending by question id.
    pub by_question: Vec<QuestionCount>,
    /// Breakoff records with no answers at all.
    pub without_answers: usize,
}

/// Tallies the last answered position and question of every breakoff.
pub fn analyze_breakoff(records: &[ResponseRecord]) -> BreakoffTallies {
    let mut pos: BTreeMap<u32, usize> = BTreeMap::new();
    let mut qs: BTreeMap<&str, usize> = BTreeMap::new();
    let mut without_answers = 0;
    for r in records.iter().filter(|r| r.terminal == Terminal::Breakoff) {
        match r.events.last() {
            Some(e) => {
                *pos.entry(e.display_position).or_default() += 1;
                *qs.entry(&e.question_id).or_default() += 1;
            }
            None => without_answers += 1,
        }
    }
    let mut by_position: Vec<PositionCount> = pos
        .into_iter()
        .map(|(position, count)| PositionCount { position, count })
        .collect();
    by_position.sort_by(|a, b| b.count.cmp(&a.count).then(a.position.cmp(&b.position)));
    let mut by_question: Vec<QuestionCount> = qs
        .into_iter()
        .map(|(q, count)| QuestionCount {
            question_id: q.to_string(),
            count,
        })
        .collect();
    by_question.sort_by(|a, b| b.count.cmp(&a.count).then(a.question_id.cmp(&b.question_id)));
    BreakoffTallies {
        by_position,
        by_question,
        without_answers,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AnswerEvent;

    fn rec(terminal: Terminal, qs: &[&str]) -> ResponseRecord {
        ResponseRecord {
            respondent_id: "r".into(),
            seed: 0,
            source_digest: String::new(),
            events: qs
                .iter()
                .enumerate()
                .map(|(i, q)| AnswerEvent {
                    question_id: q.to_string(),
                    display_position: i as u32 + 1,
                    chosen_option_ids: Default::default(),
                    freetext_value: None,
                })
                .collect(),
            terminal,
            wall_times: None,
        }
    }

    #[test]
    fn completed_records_tally_nothing() {
        let t = analyze_breakoff(&[rec(Terminal::Completed, &["q2", "q3"])]);
        assert!(t.by_position.is_empty() && t.by_question.is_empty());
    }

    #[test]
    fn ranks_descending() {
        let t = analyze_breakoff(&[
            rec(Terminal::Breakoff, &["q2", "q3"]),
            rec(Terminal::Breakoff, &["q3"]),
            rec(Terminal::Breakoff, &["q5", "q3"]),
            rec(Terminal::Breakoff, &[]),
        ]);
        assert_eq!(t.by_question, [QuestionCount { question_id: "q3".into(), count: 3 }]);
        assert_eq!(t.by_position[0], PositionCount { position: 2, count: 2 });
        assert_eq!(t.by_position[1], PositionCount { position: 1, count: 1 });
        assert_eq!(t.without_answers, 1);
    }
}
