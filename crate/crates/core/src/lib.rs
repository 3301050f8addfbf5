//! Survey programming toolkit.
//!
//! Surveys are written as CSV tables ([`csv_frontend`]), checked and measured
//! before deployment ([`static_analysis`]), randomized per respondent and
//! executed ([`engine`]), compiled to a JSON/HTML payload ([`compiler`]),
//! exercised with synthetic respondents ([`simulator`]) and finally analyzed
//! for order bias, wording-variant bias, breakoff and random respondents
//! ([`analysis`]).
//!
//! ```
//! use survey_core::csv_frontend::parse_survey;
//! use survey_core::static_analysis::{check_wellformed, path_length_bounds};
//!
//! let csv = "QUESTION,OPTIONS,BLOCK\nHow old are you?,Under 30,1\n,30 or over,1\nAny pets?,Yes,2\n,No,2\n";
//! let (survey, _warnings) = parse_survey(csv).unwrap();
//! assert!(check_wellformed(&survey).is_empty());
//! assert_eq!(path_length_bounds(&survey).max, 2);
//! ```

pub mod analysis;
pub mod compiler;
pub mod csv_frontend;
pub mod engine;
pub mod error;
pub mod model;
pub mod simulator;
pub mod static_analysis;

pub use error::{CompileError, EngineError, ModelError, ProfileError, StatsError};
pub use model::{
    compare_blocks, parse_block_id, AnswerEvent, Block, BlockId, BlockOrdering, BranchType,
    OptionSpec, Question, ResponseRecord, Survey, Terminal,
};
