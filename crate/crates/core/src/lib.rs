//! Diagnostic benchmark harness for browser-operating agents.
//!
//! Tasks isolate single web interactions or chain them into checkpointed
//! shopping flows; every agent action is logged against a three-level
//! taxonomy so that task failures can be attributed to the interactions
//! that caused them.

pub mod attribution;
pub mod environment;
pub mod logmodel;
pub mod refagents;
pub mod reporting;
pub mod runner;
pub mod tasks;
pub mod taxonomy;
