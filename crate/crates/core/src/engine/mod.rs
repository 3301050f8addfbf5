//! Deterministic randomization and execution semantics shared with the
//! browser runner.

pub mod interpreter;
pub mod plan;
pub mod prng;

pub use interpreter::{Answer, InterpreterState, Step};
pub use plan::{make_plan, PlanUnit, SurveyPlan};
pub use prng::{seed_from_id, shuffle, Prng};
