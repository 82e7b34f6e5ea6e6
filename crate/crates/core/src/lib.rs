//! Estimate the parameter and initial condition of the quadratic map
//! `y ↦ 1 + θy²` from the signs of its orbit.
//!
//! The stages live in their own modules: [`dynamics`] and [`symbolic`] for the
//! map and its cells, [`strength`] for the matching score, [`samplers`] and
//! [`strength_mcmc`] for the candidate orbit, [`grid_search`] for the zoom
//! over θ, [`polish_mcmc`] for the final refinement, and [`pipeline`] for
//! end-to-end runs that write their results to disk.

pub mod dynamics;
pub mod error;
pub mod grid_search;
pub mod pipeline;
pub mod polish_mcmc;
pub mod samplers;
pub mod strength;
pub mod strength_mcmc;
pub mod symbolic;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/map.md")]
    mod map {}
    #[doc = include_str!("../../../book/src/strength.md")]
    mod strength {}
    #[doc = include_str!("../../../book/src/samplers.md")]
    mod samplers {}
    #[doc = include_str!("../../../book/src/zooming.md")]
    mod zooming {}
    #[doc = include_str!("../../../book/src/polishing.md")]
    mod polishing {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
