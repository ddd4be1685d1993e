//! Batch front end for the BFV toolkit: model spec files, pipeline
//! orchestration with disk caching, deterministic artifact files, and the
//! property selftest.

pub mod cache;
pub mod exprs;
pub mod io;
pub mod pipeline;
pub mod sample;
pub mod selftest;
pub mod spec;
