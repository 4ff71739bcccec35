use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Reproducible random stream keyed by `(root_seed, stream_id)`.
///
/// Every stream is a ChaCha8 keystream: the key comes from the root seed and
/// the stream id selects the 64-bit nonce, so replicate `i` draws the same
/// numbers no matter which thread runs it or in what order.
#[derive(Debug, Clone)]
pub struct RngStream {
    root_seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(root_seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(root_seed);
        inner.set_stream(stream_id);
        Self {
            root_seed,
            stream_id,
            inner,
        }
    }

    pub fn root_seed(&self) -> u64 {
        self.root_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
