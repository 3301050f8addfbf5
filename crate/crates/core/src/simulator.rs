//! Synthetic respondents driven through the real plan and interpreter.
//!
//! Respondent `i` of a run with seed `s` is called `sim-<s>-<i>`; its plan
//! comes from that id exactly as a live respondent's would, and its choices
//! come from a ChaCha stream keyed by `(s, i)`, so runs are reproducible and
//! independent of evaluation order.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{make_plan, Answer, InterpreterState, Step};
use crate::error::ProfileError;
use crate::model::{AnswerEvent, Question, ResponseRecord, Survey, Terminal};

/// What a respondent sees when asked to answer.
#[derive(Debug, Clone, Copy)]
pub struct ChoiceContext<'a> {
    pub question: &'a Question,
    /// Option ids in display order.
    pub displayed_options: &'a [String],
    pub position: u32,
    /// Answers given so far.
    pub history: &'a [AnswerEvent],
}

/// A model of how one respondent answers and when they give up.
pub trait Respondent {
    /// Chosen option ids for an answerable question.
    fn choose(&mut self, ctx: &ChoiceContext<'_>, rng: &mut ChaCha8Rng) -> BTreeSet<String>;

    /// Called after each answer while questions remain; `true` abandons the
    /// survey.
    fn abandons(&mut self, _answered: &AnswerEvent, _rng: &mut ChaCha8Rng) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum BreakoffRule {
    /// After each answer at display position `<= up_to`, abandon with
    /// probability `p`.
    AfterPosition { up_to: u32, p: f64 },
    /// After answering `question_id`, abandon with probability `p`.
    AtQuestion { question_id: String, p: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedProfile {
    pub weight: f64,
    pub profile: Profile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileKind {
    /// Uniform over displayed options; checkbox questions get a uniform
    /// non-empty subset.
    UniformRandom,
    /// Always the displayed option at `index` (clamped to the last one).
    Positional { index: usize },
    /// Categorical weights per question, keyed by option id. Questions not
    /// listed are answered uniformly.
    Profiled {
        preferences: BTreeMap<String, BTreeMap<String, f64>>,
    },
    /// Each respondent draws one member by weight.
    Collection { members: Vec<WeightedProfile> },
}

/// Respondent profile, also the `--profile` JSON file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    #[serde(flatten)]
    pub kind: ProfileKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub breakoff: Vec<BreakoffRule>,
}

impl Profile {
    pub fn uniform() -> Self {
        ProfileKind::UniformRandom.into()
    }

    pub fn positional(index: usize) -> Self {
        ProfileKind::Positional { index }.into()
    }

    pub fn profiled(preferences: BTreeMap<String, BTreeMap<String, f64>>) -> Self {
        ProfileKind::Profiled { preferences }.into()
    }

    pub fn collection(members: Vec<(f64, Profile)>) -> Self {
        ProfileKind::Collection {
            members: members
                .into_iter()
                .map(|(weight, profile)| WeightedProfile { weight, profile })
                .collect(),
        }
        .into()
    }

    pub fn with_breakoff(mut self, rule: BreakoffRule) -> Self {
        self.breakoff.push(rule);
        self
    }

    pub fn from_json(text: &str) -> Result<Self, ProfileError> {
        let profile: Profile = serde_json::from_str(text)?;
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<(), ProfileError> {
        let bad = |msg: String| Err(ProfileError::Invalid(msg));
        for rule in &self.breakoff {
            let p = match rule {
                BreakoffRule::AfterPosition { p, .. } | BreakoffRule::AtQuestion { p, .. } => *p,
            };
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("breakoff probability {p} outside [0, 1]"));
            }
        }
        match &self.kind {
            ProfileKind::UniformRandom | ProfileKind::Positional { .. } => Ok(()),
            ProfileKind::Profiled { preferences } => {
                for (q, weights) in preferences {
                    if weights.values().any(|w| !w.is_finite() || *w < 0.0) {
                        return bad(format!("negative or non-finite weight for {q}"));
                    }
                    if weights.values().sum::<f64>() <= 0.0 {
                        return bad(format!("weights for {q} sum to zero"));
                    }
                }
                Ok(())
            }
            ProfileKind::Collection { members } => {
                if members.is_empty() {
                    return bad("collection has no members".into());
                }
                if members.iter().any(|m| !(0.0..=1.0).contains(&m.weight)) {
                    return bad("member weights must lie in [0, 1]".into());
                }
                let total: f64 = members.iter().map(|m| m.weight).sum();
                if (total - 1.0).abs() > 1e-9 {
                    return bad(format!("member weights sum to {total}, not 1"));
                }
                members.iter().try_for_each(|m| m.profile.validate())
            }
        }
    }
}

impl From<ProfileKind> for Profile {
    fn from(kind: ProfileKind) -> Self {
        Profile {
            kind,
            breakoff: Vec::new(),
        }
    }
}

/// A [`Profile`] resolved to a concrete (non-collection) behaviour, carrying
/// the breakoff rules of every enclosing collection.
struct ProfileRespondent<'p> {
    kind: &'p ProfileKind,
    breakoff: Vec<&'p BreakoffRule>,
}

impl<'p> ProfileRespondent<'p> {
    /// Returns the respondent and the index path of the chosen member
    /// (top-level member index, 0 for plain profiles).
    fn resolve(profile: &'p Profile, rng: &mut ChaCha8Rng) -> (Self, usize) {
        let mut breakoff: Vec<&BreakoffRule> = profile.breakoff.iter().collect();
        let mut current = profile;
        let mut top_member = None;
        while let ProfileKind::Collection { members } = &current.kind {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut pick = members.len() - 1;
            for (i, m) in members.iter().enumerate() {
                acc += m.weight;
                if u < acc {
                    pick = i;
                    break;
                }
            }
            top_member.get_or_insert(pick);
            current = &members[pick].profile;
            breakoff.extend(current.breakoff.iter());
        }
        (
            ProfileRespondent {
                kind: &current.kind,
                breakoff,
            },
            top_member.unwrap_or(0),
        )
    }
}

fn uniform_subset(options: &[String], rng: &mut ChaCha8Rng) -> BTreeSet<String> {
    loop {
        let chosen: BTreeSet<String> = options
            .iter()
            .filter(|_| rng.random_bool(0.5))
            .cloned()
            .collect();
        if !chosen.is_empty() {
            return chosen;
        }
    }
}

fn weighted_pick<'a>(options: &'a [String], weights: &[f64], rng: &mut ChaCha8Rng) -> &'a String {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return &options[rng.random_range(0..options.len())];
    }
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (o, w) in options.iter().zip(weights) {
        acc += w;
        if u < acc {
            return o;
        }
    }
    options.iter().zip(weights).rev().find(|(_, w)| **w > 0.0).map(|(o, _)| o).expect("positive total")
}

impl Respondent for ProfileRespondent<'_> {
    fn choose(&mut self, ctx: &ChoiceContext<'_>, rng: &mut ChaCha8Rng) -> BTreeSet<String> {
        let shown = ctx.displayed_options;
        let one = |o: &String| BTreeSet::from([o.clone()]);
        match self.kind {
            ProfileKind::UniformRandom => {
                if ctx.question.exclusive {
                    one(&shown[rng.random_range(0..shown.len())])
                } else {
                    uniform_subset(shown, rng)
                }
            }
            ProfileKind::Positional { index } => one(&shown[(*index).min(shown.len() - 1)]),
            ProfileKind::Profiled { preferences } => match preferences.get(&ctx.question.question_id) {
                Some(weights) => {
                    let w: Vec<f64> = shown.iter().map(|o| weights.get(o).copied().unwrap_or(0.0)).collect();
                    one(weighted_pick(shown, &w, rng))
                }
                None if ctx.question.exclusive => one(&shown[rng.random_range(0..shown.len())]),
                None => uniform_subset(shown, rng),
            },
            ProfileKind::Collection { .. } => unreachable!("collections are resolved first"),
        }
    }

    fn abandons(&mut self, answered: &AnswerEvent, rng: &mut ChaCha8Rng) -> bool {
        let mut gone = false;
        for rule in &self.breakoff {
            let applies = match rule {
                BreakoffRule::AfterPosition { up_to, .. } => answered.display_position <= *up_to,
                BreakoffRule::AtQuestion { question_id, .. } => &answered.question_id == question_id,
            };
            let p = match rule {
                BreakoffRule::AfterPosition { p, .. } | BreakoffRule::AtQuestion { p, .. } => *p,
            };
            // Draw for every applicable rule so the stream does not depend on
            // which rule fired first.
            if applies && rng.random_bool(p) {
                gone = true;
            }
        }
        gone
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulatedRespondent {
    pub record: ResponseRecord,
    /// Index of the collection member this respondent was drawn from (0 for
    /// plain profiles).
    pub member: usize,
}

pub fn respondent_id(seed: u64, index: usize) -> String {
    format!("sim-{seed}-{index}")
}

fn choice_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Runs one respondent through the survey.
pub fn run_respondent<R: Respondent + ?Sized>(
    survey: &Survey,
    respondent_id: &str,
    respondent: &mut R,
    rng: &mut ChaCha8Rng,
) -> ResponseRecord {
    let plan = make_plan(survey, respondent_id);
    let mut state = InterpreterState::new(survey, &plan);
    let mut step = state.start().expect("plans of checked surveys execute");
    let mut terminal = Terminal::Completed;
    while let Step::NextQuestion { question, position } = step {
        let answer = if question.is_instructional {
            Answer::empty(&question.question_id)
        } else if question.freetext.is_some() {
            Answer {
                freetext_value: Some(String::new()),
                ..Answer::empty(&question.question_id)
            }
        } else {
            let ctx = ChoiceContext {
                question,
                displayed_options: &plan.option_order[&question.question_id],
                position,
                history: state.events(),
            };
            Answer {
                question_id: question.question_id.clone(),
                chosen_option_ids: respondent.choose(&ctx, rng),
                freetext_value: None,
            }
        };
        step = state.step(answer).expect("simulated answers are valid");
        if matches!(step, Step::NextQuestion { .. }) {
            let last = state.events().last().expect("just answered");
            if respondent.abandons(last, rng) {
                terminal = Terminal::Breakoff;
                break;
            }
        }
    }
    ResponseRecord {
        respondent_id: respondent_id.to_string(),
        seed: plan.seed,
        source_digest: survey.source_digest.clone(),
        events: state.into_events(),
        terminal,
        wall_times: None,
    }
}

/// Simulates `n` respondents with a custom model built per respondent.
pub fn simulate_with<R, F>(survey: &Survey, n: usize, seed: u64, mut make: F) -> Vec<ResponseRecord>
where
    R: Respondent,
    F: FnMut(usize, &mut ChaCha8Rng) -> R,
{
    (0..n)
        .map(|i| {
            let mut rng = choice_rng(seed, i);
            let mut respondent = make(i, &mut rng);
            run_respondent(survey, &respondent_id(seed, i), &mut respondent, &mut rng)
        })
        .collect()
}

/// Simulates `n` respondents and reports which collection member each came
/// from.
pub fn simulate_labeled(survey: &Survey, profile: &Profile, n: usize, seed: u64) -> Vec<SimulatedRespondent> {
    (0..n)
        .map(|i| {
            let mut rng = choice_rng(seed, i);
            let (mut respondent, member) = ProfileRespondent::resolve(profile, &mut rng);
            let record = run_respondent(survey, &respondent_id(seed, i), &mut respondent, &mut rng);
            SimulatedRespondent { record, member }
        })
        .collect()
}

pub fn simulate(survey: &Survey, profile: &Profile, n: usize, seed: u64) -> Vec<ResponseRecord> {
    simulate_labeled(survey, profile, n, seed)
        .into_iter()
        .map(|s| s.record)
        .collect()
}
