//! Random sampling primitives: seeded streams, truncated exponential and
//! normal laws, and the slice update for the quadratic map.

mod rng;
mod slice;
mod truncated;

pub use rng::{grid_stream_id, RngStream, POLISH_STREAM, PROFILE_STREAM};
pub use slice::{
    quadratic_slice_pieces, residual, site_pieces, update_site, Neighbors, SlicePieces,
};
pub use truncated::{
    sample_truncated_exponential, sample_truncated_normal, sample_uniform,
    truncated_exponential_from_uniform, TAIL_LIMIT,
};
