//! Independent oracles shared by the property tests and the acceptance run.
#![allow(dead_code)]

pub mod samplers;
pub mod strength;
