//! Minimal deterministic generator used everywhere a seed appears.
//!
//! The generator is splitmix64 (Steele, Lea, Flood 2014). It is fully
//! specified here so that feature vectors, fold splits, and bootstrap
//! replicates are reproducible across platforms and implementations.

/// splitmix64 stream.
#[derive(Debug, Clone, Copy)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Derive an independent substream for `index` (parallel replicates).
    pub fn substream(seed: u64, index: u64) -> Self {
        SplitMix64::new(seed ^ mix(index.wrapping_add(0x9E3779B97F4A7C15)))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        mix(self.state)
    }

    /// Uniform index in `[0, n)`. `n` must be nonzero.
    pub fn next_index(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_index(i + 1);
            items.swap(i, j);
        }
    }
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}
