//! Seeded generators and discrete samplers shared by walks, training, and evaluation.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from a base seed and a path of indices.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix64(base), |acc, &p| mix64(acc ^ mix64(p)))
}

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Walker/Vose alias table for O(1) sampling from a fixed discrete distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<u32>,
}

impl AliasTable {
    /// Builds a table from nonnegative weights. Returns `None` if the weights
    /// are empty or sum to zero.
    pub fn new(weights: &[f64]) -> Option<Self> {
        let mut prob = vec![0.0; weights.len()];
        let mut alias = vec![0u32; weights.len()];
        if !build_alias(weights, &mut prob, &mut alias) {
            return None;
        }
        Some(AliasTable { prob, alias })
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_alias(&self.prob, &self.alias, rng)
    }
}

/// Fills `prob`/`alias` (same length as `weights`) with a Vose alias table.
/// Returns `false` if the weights are empty or do not sum to a positive value.
pub(crate) fn build_alias(weights: &[f64], prob: &mut [f64], alias: &mut [u32]) -> bool {
    let n = weights.len();
    let total: f64 = weights.iter().sum();
    if n == 0 || !total.is_finite() || total <= 0.0 {
        return false;
    }
    let mut small = Vec::with_capacity(n);
    let mut large = Vec::with_capacity(n);
    for (i, w) in weights.iter().enumerate() {
        prob[i] = w * n as f64 / total;
        alias[i] = i as u32;
        if prob[i] < 1.0 {
            small.push(i);
        } else {
            large.push(i);
        }
    }
    while let (Some(s), Some(&l)) = (small.pop(), large.last()) {
        alias[s] = l as u32;
        prob[l] = (prob[l] + prob[s]) - 1.0;
        if prob[l] < 1.0 {
            large.pop();
            small.push(l);
        }
    }
    // Leftovers are 1 up to rounding.
    for i in large.into_iter().chain(small) {
        prob[i] = 1.0;
    }
    true
}

#[inline]
pub(crate) fn sample_alias<R: Rng + ?Sized>(prob: &[f64], alias: &[u32], rng: &mut R) -> usize {
    let i = rng.gen_range(0..prob.len());
    if rng.gen::<f64>() < prob[i] {
        i
    } else {
        alias[i] as usize
    }
}

/// Samples an index proportionally to `weights` by a linear cumulative scan.
#[inline]
pub fn sample_cumulative<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut target = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if target < w {
            return i;
        }
        target -= w;
    }
    // Rounding can leave a sliver past the end; return the last positive weight.
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}
