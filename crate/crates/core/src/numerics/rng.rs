use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Seedable, reproducible random stream.
///
/// The bit source is ChaCha8 keyed by `seed` (expanded through
/// `SeedableRng::seed_from_u64`) on the 64-bit ChaCha stream `stream`.
/// Every derived quantity is computed here from raw `u64` words, so a trace is
/// bit-identical on every platform for the same seed and call sequence:
///
/// * `uniform()`: `(word >> 11) * 2^-53`, in `[0, 1)`.
/// * `exponential(rate)`: `-ln(1 - uniform()) / rate`.
/// * `below(n)`: Lemire's multiply-shift with rejection.
///
/// Substreams from [`RngStream::substream`] share the key and use stream id
/// `splitmix64(parent_stream ^ splitmix64(tag))`, so independent work items
/// (for example one CE sample) can draw in any order or in parallel.
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

    fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent stream identified by `tag`, unaffected by how much of the
    /// parent has been consumed.
    pub fn substream(&self, tag: u64) -> Self {
        Self::with_stream(self.seed, splitmix64(self.stream ^ splitmix64(tag)))
    }

    /// Substream addressed by two indices (e.g. iteration and sample).
    pub fn substream2(&self, a: u64, b: u64) -> Self {
        self.substream(a).substream(b)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn exponential(&mut self, rate: f64) -> f64 {
        -libm::log1p(-self.uniform()) / rate
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Uniform integer in `[0, n)`; `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
