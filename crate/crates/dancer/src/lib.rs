//! Dataset IO, adapter processes, parallel prediction, evaluation and the
//! command-line front end built on `dancer-core`.

pub mod adapter;
pub mod cli;
pub mod config;
pub mod dataset;
pub mod eval;
pub mod jsonl;
pub mod predict;
