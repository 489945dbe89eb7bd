//! Plug-in (empirical-frequency) estimate of `I(M; Z)` from simulated runs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::codec::{BlockTranscript, CodeRates};
use crate::error::{domain, Result};
use crate::prob::entropy_of;
use crate::seed::hash_symbols;

/// Fewest samples a plug-in estimate is computed from by default.
pub const DEFAULT_MIN_SAMPLES: usize = 100;

/// Largest observation alphabet kept verbatim; longer sequences are hashed.
pub const IDENTITY_LIMIT: f64 = 65536.0;

/// Reduction of Eve's observation sequence to a finite label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Quantizer {
    /// The full sequence, as a base-`alphabet` integer.
    Identity { alphabet: usize, length: usize },
    /// A seeded hash into `buckets` labels. Merging observations can only
    /// lose information, so the estimate becomes a lower bound.
    Hashed { buckets: u64, seed: u64 },
}

impl Quantizer {
    pub fn for_sequences(alphabet: usize, length: usize, seed: u64) -> Self {
        if (alphabet as f64).powi(length as i32) <= IDENTITY_LIMIT {
            Quantizer::Identity { alphabet, length }
        } else {
            Quantizer::Hashed {
                buckets: IDENTITY_LIMIT as u64,
                seed,
            }
        }
    }

    pub fn cells(&self) -> f64 {
        match *self {
            Quantizer::Identity { alphabet, length } => (alphabet as f64).powi(length as i32),
            Quantizer::Hashed { buckets, .. } => buckets as f64,
        }
    }

    pub fn apply(&self, seq: &[u8]) -> u64 {
        match *self {
            Quantizer::Identity { alphabet, .. } => {
                seq.iter().fold(0, |acc, &s| acc * alphabet as u64 + s as u64)
            }
            Quantizer::Hashed { buckets, seed } => hash_symbols(seed, seq) % buckets,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PluginEstimate {
    /// Estimate in bits, clipped at 0.
    pub bits: f64,
    pub samples: usize,
    /// `|M||Z| / (2 N ln 2)`, the usual first-order bias of the plug-in estimator.
    pub bias_bound: f64,
    pub message_cells: f64,
    pub observation_cells: f64,
}

/// Plug-in `I(A;B)` from paired samples.
pub fn plugin_leakage<A: Ord + Clone, B: Ord + Clone>(
    pairs: &[(A, B)],
    message_cells: f64,
    observation_cells: f64,
    min_samples: usize,
) -> Result<PluginEstimate> {
    let n = pairs.len();
    if n == 0 || n < min_samples {
        return domain(format!(
            "{n} samples are too few for a plug-in estimate (need at least {})",
            min_samples.max(1)
        ));
    }
    let mut ca: BTreeMap<&A, usize> = BTreeMap::new();
    let mut cb: BTreeMap<&B, usize> = BTreeMap::new();
    let mut cab: BTreeMap<(&A, &B), usize> = BTreeMap::new();
    for (a, b) in pairs {
        *ca.entry(a).or_default() += 1;
        *cb.entry(b).or_default() += 1;
        *cab.entry((a, b)).or_default() += 1;
    }
    let freq = |counts: Vec<usize>| -> Vec<f64> {
        counts.into_iter().map(|c| c as f64 / n as f64).collect()
    };
    let h_a = entropy_of(&freq(ca.into_values().collect()));
    let h_b = entropy_of(&freq(cb.into_values().collect()));
    let h_ab = entropy_of(&freq(cab.into_values().collect()));
    Ok(PluginEstimate {
        bits: (h_a + h_b - h_ab).max(0.0),
        samples: n,
        bias_bound: message_cells * observation_cells / (2.0 * n as f64 * std::f64::consts::LN_2),
        message_cells,
        observation_cells,
    })
}

/// Plug-in estimate of `I(M^b; Z^b)` from transcripts (one sample per run).
pub fn plugin_from_transcripts(
    transcripts: &[BlockTranscript],
    rates: &CodeRates,
    quantizer: Quantizer,
    min_samples: usize,
) -> Result<PluginEstimate> {
    let Some(first) = transcripts.first() else {
        return domain("no transcripts");
    };
    let b = first.blocks.len() - 1;
    let pairs: Vec<(Vec<u64>, u64)> = transcripts
        .iter()
        .map(|t| {
            let msgs = t.blocks[1..].iter().map(|r| r.m0 * rates.m1 + r.m1).collect();
            let z: Vec<u8> = t.blocks[1..].iter().flat_map(|r| r.z.iter().copied()).collect();
            (msgs, quantizer.apply(&z))
        })
        .collect();
    let message_cells = ((rates.m0 * rates.m1) as f64).powi(b as i32);
    plugin_leakage(&pairs, message_cells, quantizer.cells(), min_samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn independent_pairs_stay_under_the_bias_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pairs: Vec<(u8, u8)> = (0..5000).map(|_| (rng.gen_range(0..4), rng.gen_range(0..4))).collect();
        let est = plugin_leakage(&pairs, 4.0, 4.0, 100).unwrap();
        assert!(est.bits <= est.bias_bound, "{} > {}", est.bits, est.bias_bound);
    }

    #[test]
    fn identical_pairs_approach_log_k() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pairs: Vec<(u8, u8)> = (0..20000)
            .map(|_| {
                let v = rng.gen_range(0..8);
                (v, v)
            })
            .collect();
        let est = plugin_leakage(&pairs, 8.0, 8.0, 100).unwrap();
        assert!((est.bits - 3.0).abs() < 0.01, "{}", est.bits);
    }

    #[test]
    fn too_few_samples() {
        let pairs = vec![(0u8, 0u8); 10];
        assert!(plugin_leakage(&pairs, 2.0, 2.0, 100).is_err());
        assert!(plugin_leakage::<u8, u8>(&[], 2.0, 2.0, 0).is_err());
    }

    #[test]
    fn quantizer_switches_to_hashing() {
        let q = Quantizer::for_sequences(2, 16, 1);
        assert!(matches!(q, Quantizer::Identity { .. }));
        assert_eq!(q.apply(&[0; 15].iter().copied().chain([1]).collect::<Vec<_>>()), 1);
        let h = Quantizer::for_sequences(2, 17, 1);
        assert_eq!(h.cells(), 65536.0);
        assert!(h.apply(&[1; 17]) < 65536);
    }
}
