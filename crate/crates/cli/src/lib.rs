//! Plate localization pipeline, synthetic corpus generator and evaluator
//! built on `platemorph-core`.

pub mod config;
pub mod eval;
pub mod pipeline;
pub mod synth;
