//! Deterministic random streams addressed by `(root_seed, path)`.
//!
//! Every randomized step in the crate draws from a stream derived here, never
//! from a global generator. The path is folded into a 64-bit key with the
//! SplitMix64 finalizer, the key is expanded to a 256-bit ChaCha8 seed, and
//! all draws come from that generator. ChaCha8 output is specified
//! bit-for-bit, so sequences are identical across platforms.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: a bijective 64-bit avalanche permutation.
#[inline]
pub const fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a root seed and a path into one 64-bit key.
///
/// Each element is mixed together with its depth, so `[a, b]` and `[b, a]`
/// and `[a]` and `[a, 0]` all produce unrelated keys.
pub fn derive_seed(root_seed: u64, path: &[u64]) -> u64 {
    let mut h = mix64(root_seed ^ GOLDEN);
    for (depth, &p) in path.iter().enumerate() {
        let salt = mix64((depth as u64 + 1).wrapping_mul(GOLDEN));
        h = mix64(h.rotate_left(23) ^ mix64(p ^ salt));
    }
    h
}

/// A reproducible random stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    root_seed: u64,
    path: Vec<u64>,
    rng: ChaCha8Rng,
}

/// Derives the stream for `(root_seed, path)`.
pub fn derive_stream(root_seed: u64, path: &[u64]) -> RngStream {
    RngStream::new(root_seed, path.to_vec())
}

impl RngStream {
    pub fn new(root_seed: u64, path: Vec<u64>) -> Self {
        let key = derive_seed(root_seed, &path);
        let mut seed = [0u8; 32];
        let mut state = key;
        for chunk in seed.chunks_exact_mut(8) {
            state = state.wrapping_add(GOLDEN);
            chunk.copy_from_slice(&mix64(state).to_le_bytes());
        }
        RngStream {
            root_seed,
            path,
            rng: ChaCha8Rng::from_seed(seed),
        }
    }

    pub fn root_seed(&self) -> u64 {
        self.root_seed
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }

    /// Fresh stream at `path ++ [tag]`; does not consume from `self`.
    pub fn child(&self, tag: u64) -> RngStream {
        let mut path = self.path.clone();
        path.push(tag);
        RngStream::new(self.root_seed, path)
    }

    /// Uniform draw in `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform draw in `[lo, hi)`.
    #[inline]
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal draw.
    #[inline]
    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform integer in `0..n`. Panics if `n == 0`.
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.random::<u64>()
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        items.shuffle(&mut self.rng);
    }

    /// `k` distinct indices from `0..n`, in draw order.
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        let mut all: Vec<usize> = (0..n).collect();
        let k = k.min(n);
        for i in 0..k {
            let j = i + self.below(n - i);
            all.swap(i, j);
        }
        all.truncate(k);
        all
    }
}

/// Well-separated tags for sub-stream derivation.
pub mod tags {
    pub const FOLDS: u64 = 0xF01D_0000;
    pub const CV_REPEAT: u64 = 0xC0F0_0001;
    pub const SENSOR_NOISE: u64 = 0x5E45_0001;
    pub const LABEL_NOISE: u64 = 0x1ABE_0001;
    pub const PRUNE_SPLIT: u64 = 0x9E0E_0001;
    pub const INTERNAL_CV: u64 = 0x1C0F_0001;
    pub const ENSEMBLE_CV: u64 = 0xE5CF_0001;
    pub const BOOTSTRAP: u64 = 0xB007_0001;
    pub const SUBSPACE: u64 = 0x5B5B_0001;
    pub const ROTATION: u64 = 0x4071_0001;
    pub const SELECTION: u64 = 0x5E1E_0001;
    pub const INIT: u64 = 0x1417_0001;
    pub const SHUFFLE: u64 = 0x5F0F_0001;
    pub const KMEANS: u64 = 0x63EA_0001;
    pub const SPLIT_FEATURES: u64 = 0xFEA7_0001;
    pub const PROBE: u64 = 0x940B_0001;
}
