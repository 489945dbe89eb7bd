//! Random binning `σ` and key hash `κ` on state sequences.
//!
//! Both are realized the same way: a seeded uniformly random permutation of
//! `S^n` followed by reduction modulo the range. This keeps every bin within
//! one element of `|S|^n / range`, makes the map onto its range whenever
//! `range ≤ |S|^n`, and one-to-one when `range = |S|^n`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::decoder::StatePosterior;
use crate::error::{domain, resource, Result};

/// Largest `|S|^n` for which binning tables are materialized.
pub const SEQUENCE_CAP: usize = 1 << 20;

/// Integer encoding of sequences in `A^n`, first symbol most significant
/// (so integer order is lexicographic order).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceSpace {
    pub alphabet: usize,
    pub n: usize,
    pub count: usize,
}

impl SequenceSpace {
    pub fn new(alphabet: usize, n: usize, cap: usize) -> Result<Self> {
        if alphabet == 0 || n == 0 {
            return domain("sequence space needs a nonempty alphabet and n ≥ 1");
        }
        let mut count: usize = 1;
        for _ in 0..n {
            count = match count.checked_mul(alphabet) {
                Some(c) if c <= cap => c,
                _ => return resource(format!("{alphabet}^{n} sequences exceed the cap of {cap}")),
            };
        }
        Ok(SequenceSpace { alphabet, n, count })
    }

    pub fn index(&self, seq: &[u8]) -> usize {
        seq.iter().fold(0, |acc, &s| acc * self.alphabet + s as usize)
    }

    pub fn write_sequence(&self, mut index: usize, out: &mut [u8]) {
        for slot in out.iter_mut().rev() {
            *slot = (index % self.alphabet) as u8;
            index /= self.alphabet;
        }
    }

    pub fn sequence(&self, index: usize) -> Vec<u8> {
        let mut out = vec![0; self.n];
        self.write_sequence(index, &mut out);
        out
    }

    /// `Π p(s_i)` for every sequence, indexed by [`SequenceSpace::index`].
    pub fn product_law(&self, p: &[f64]) -> Vec<f64> {
        let mut law = vec![1.0];
        for _ in 0..self.n {
            law = law
                .iter()
                .flat_map(|&w| p.iter().map(move |&q| w * q))
                .collect();
        }
        law
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct SeededBinning {
    space: SequenceSpace,
    range: u64,
    seed: u64,
    table: Vec<u32>,
}

impl SeededBinning {
    fn new(space: SequenceSpace, range: u64, seed: u64) -> Result<Self> {
        if range == 0 || range > u32::MAX as u64 {
            return domain(format!("hash range {range} must lie in 1..2^32"));
        }
        let mut perm: Vec<u32> = (0..space.count as u32).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let table = perm.iter().map(|&p| (p as u64 % range) as u32).collect();
        Ok(SeededBinning {
            space,
            range,
            seed,
            table,
        })
    }

    fn apply(&self, seq: &[u8]) -> u64 {
        self.table[self.space.index(seq)] as u64
    }

    /// Law of the hash value under an i.i.d. sequence law.
    fn image_law(&self, seq_law: &[f64]) -> Vec<f64> {
        let mut law = vec![0.0; self.range as usize];
        for (i, &p) in seq_law.iter().enumerate() {
            law[self.table[i] as usize] += p;
        }
        law
    }
}

/// Slepian-Wolf code: `σ: S^n → [0, m2)` and an in-bin ML decoder `φ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SWCode {
    binning: SeededBinning,
    /// members of each bin, ascending
    bins: Vec<Vec<u32>>,
}

impl SWCode {
    pub fn new(s_size: usize, n: usize, range: u64, seed: u64) -> Result<Self> {
        let space = SequenceSpace::new(s_size, n, SEQUENCE_CAP)?;
        let binning = SeededBinning::new(space, range, seed)?;
        if range as usize > SEQUENCE_CAP {
            return resource(format!("{range} Slepian-Wolf bins exceed the cap of {SEQUENCE_CAP}"));
        }
        let mut bins = vec![Vec::new(); range as usize];
        for (s, &b) in binning.table.iter().enumerate() {
            bins[b as usize].push(s as u32);
        }
        Ok(SWCode { binning, bins })
    }

    pub fn seed(&self) -> u64 {
        self.binning.seed
    }

    pub fn range(&self) -> u64 {
        self.binning.range
    }

    pub fn space(&self) -> &SequenceSpace {
        &self.binning.space
    }

    /// `σ(s^n)`.
    pub fn encode(&self, s: &[u8]) -> u64 {
        self.binning.apply(s)
    }

    /// Sequence indices in bin `index`, ascending.
    pub fn bin(&self, index: u64) -> &[u32] {
        &self.bins[index as usize]
    }

    /// `φ`: the most likely member of bin `index` under `Π p(s_i|u_i,y_i)`,
    /// ties to the lexicographically smallest. `None` when the bin is empty.
    pub fn decode(&self, index: u64, u: &[u8], y: &[u8], post: &StatePosterior) -> Option<Vec<u8>> {
        let members = self.bins.get(index as usize)?;
        let space = &self.binning.space;
        let mut seq = vec![0u8; space.n];
        let mut best: Option<(f64, u32)> = None;
        for &m in members {
            space.write_sequence(m as usize, &mut seq);
            let mut score = 0.0;
            for i in 0..space.n {
                score += post.log_prob(seq[i], u[i], y[i]);
                if let Some((b, _)) = best {
                    if score <= b {
                        break;
                    }
                }
            }
            if best.map_or(true, |(b, _)| score > b) {
                best = Some((score, m));
            }
        }
        best.map(|(_, m)| space.sequence(m as usize))
    }

    /// Law of `σ(S^n)` for i.i.d. states.
    pub fn index_law(&self, p_s: &[f64]) -> Vec<f64> {
        self.binning.image_law(&self.binning.space.product_law(p_s))
    }

    /// `σ` on every sequence, indexed by [`SequenceSpace::index`].
    pub fn table(&self) -> &[u32] {
        &self.binning.table
    }
}

/// Key function `κ: S^n → [0, m1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyFn {
    binning: SeededBinning,
}

impl KeyFn {
    pub fn new(s_size: usize, n: usize, range: u64, seed: u64) -> Result<Self> {
        let space = SequenceSpace::new(s_size, n, SEQUENCE_CAP)?;
        Ok(KeyFn {
            binning: SeededBinning::new(space, range, seed)?,
        })
    }

    pub fn seed(&self) -> u64 {
        self.binning.seed
    }

    pub fn range(&self) -> u64 {
        self.binning.range
    }

    /// `κ(s^n)`.
    pub fn key_of(&self, s: &[u8]) -> u64 {
        self.binning.apply(s)
    }

    /// Exact law of `K = κ(S^n)` for i.i.d. states.
    pub fn key_law(&self, p_s: &[f64]) -> Vec<f64> {
        self.binning.image_law(&self.binning.space.product_law(p_s))
    }

    /// `κ` on every sequence, indexed by [`SequenceSpace::index`].
    pub fn table(&self) -> &[u32] {
        &self.binning.table
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_index_round_trip() {
        let sp = SequenceSpace::new(3, 4, SEQUENCE_CAP).unwrap();
        assert_eq!(sp.count, 81);
        for i in 0..sp.count {
            assert_eq!(sp.index(&sp.sequence(i)), i);
        }
        assert_eq!(sp.sequence(1), vec![0, 0, 0, 1]);
        let law = sp.product_law(&[0.5, 0.3, 0.2]);
        assert!((law.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((law[1] - 0.5 * 0.5 * 0.5 * 0.3).abs() < 1e-15);
    }

    #[test]
    fn binning_is_balanced_and_onto() {
        let sw = SWCode::new(2, 6, 5, 3).unwrap();
        let sizes: Vec<usize> = (0..5).map(|b| sw.bin(b).len()).collect();
        assert!(sizes.iter().all(|&s| s == 12 || s == 13), "{sizes:?}");
        assert_eq!(sizes.iter().sum::<usize>(), 64);
    }

    #[test]
    fn full_range_is_injective() {
        let sw = SWCode::new(2, 5, 32, 3).unwrap();
        assert!((0..32).all(|b| sw.bin(b).len() == 1));
    }

    #[test]
    fn seeds_are_respected() {
        let a = KeyFn::new(2, 8, 4, 1).unwrap();
        let b = KeyFn::new(2, 8, 4, 1).unwrap();
        let c = KeyFn::new(2, 8, 4, 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.table(), c.table());
        let law = a.key_law(&[0.5, 0.5]);
        assert!(law.iter().all(|&p| (p - 0.25).abs() < 1e-12));
    }
}
