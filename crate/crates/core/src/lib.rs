//! Minimum-cost emergency backup of at-risk data-center content over an
//! optical backbone.

pub mod netmodel;
pub mod pathgen;
pub mod planner;
pub mod harness;
