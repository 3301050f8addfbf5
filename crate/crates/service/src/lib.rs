//! Deployment and orchestration for `survey-core`: a JSON-lines response
//! store, the HTTP service that hosts a compiled survey, and the `survey`
//! command line.

pub mod cli;
pub mod http;
pub mod store;
