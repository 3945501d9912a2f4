use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cmap::{build_triangulation, enumerate_pairings};
use crate::error::Result;

/// Exact law of `(vertices, genus, connected)` over all pairings of size
/// `n`, by enumeration.
pub fn exact_topology_distribution(n: usize) -> Result<BTreeMap<(usize, usize, bool), f64>> {
    let mut counts: BTreeMap<(usize, usize, bool), usize> = BTreeMap::new();
    let mut total = 0usize;
    for p in enumerate_pairings(n)? {
        let t = build_triangulation(p)?;
        *counts.entry((t.vertex_count(), t.genus(), t.is_connected())).or_default() += 1;
        total += 1;
    }
    Ok(counts
        .into_iter()
        .map(|(k, c)| (k, c as f64 / total as f64))
        .collect())
}

/// Longest cycle of a uniform permutation of `size` elements, as a fraction
/// of `size`.
pub fn longest_cycle_fraction(size: usize, rng: &mut ChaCha8Rng) -> f64 {
    let mut perm: Vec<usize> = (0..size).collect();
    perm.shuffle(rng);
    let mut seen = vec![false; size];
    let mut longest = 0;
    for start in 0..size {
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = perm[x];
            len += 1;
        }
        longest = longest.max(len);
    }
    longest as f64 / size as f64
}

pub fn mean_longest_cycle_fraction(size: usize, trials: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials).map(|_| longest_cycle_fraction(size, &mut rng)).sum::<f64>() / trials as f64
}
