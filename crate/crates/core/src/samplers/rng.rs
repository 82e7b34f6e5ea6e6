use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// A reproducible uniform stream.
///
/// Backed by ChaCha8, which is counter based: the output is a pure function
/// of `(seed, stream, counter)`, so streams can be split per chain and
/// resumed at any position.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Stream `stream` of the generator keyed by `seed`.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        RngStream {
            seed,
            stream,
            inner,
        }
    }

    /// Positions a fresh stream at `counter` 32-bit words.
    pub fn at(seed: u64, stream: u64, counter: u64) -> Self {
        let mut rng = Self::with_stream(seed, stream);
        rng.inner.set_word_pos(u128::from(counter));
        rng
    }

    /// Independent stream for grid level `level`, grid point `index`.
    pub fn for_grid_point(master: u64, level: usize, index: usize) -> Self {
        Self::with_stream(master, grid_stream_id(level, index))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Number of 32-bit words consumed so far.
    pub fn counter(&self) -> u64 {
        self.inner.get_word_pos() as u64
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on the open interval `(0, 1)`.
    #[inline]
    pub fn open01(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        ((self.next_u64() >> 11) as f64 + 0.5) * SCALE
    }
}

/// Stream id used for grid point `index` at level `level` (levels count
/// from 1): `level × 1000 + index`.
pub fn grid_stream_id(level: usize, index: usize) -> u64 {
    (level as u64) * 1000 + index as u64
}

/// Stream id reserved for the polishing chain.
pub const POLISH_STREAM: u64 = 0;

/// Stream id of the full-data strength chain at the grid maximizer.
pub const PROFILE_STREAM: u64 = 1;
