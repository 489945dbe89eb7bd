//! Causal stochastic encoding `x_i ~ p(x | u_i(L), s_i)`.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use super::codebook::Codebook;
use crate::channel::ShannonStrategy;
use crate::error::{domain, Result};

/// Pre-built samplers for the rows of `p(x|u,s)`.
#[derive(Clone, Debug)]
pub struct StrategySampler {
    s_size: usize,
    rows: Vec<WeightedIndex<f64>>,
}

impl StrategySampler {
    pub fn new(strat: &ShannonStrategy) -> Result<Self> {
        let map = strat.map();
        let rows = (0..map.input_cells())
            .map(|i| {
                WeightedIndex::new(map.row(i))
                    .map_err(|e| crate::Error::Domain(format!("strategy row {i}: {e}")))
            })
            .collect::<Result<_>>()?;
        Ok(StrategySampler {
            s_size: map.inputs()[1].size,
            rows,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, u: u8, s: u8, rng: &mut R) -> u8 {
        self.rows[u as usize * self.s_size + s as usize].sample(rng) as u8
    }
}

/// Emits one channel input per state symbol. It only ever holds the current
/// state symbol, so `x_i` cannot depend on `s_{i+1}, ..`.
pub struct CausalEncoder<'a> {
    codeword: &'a [u8],
    sampler: &'a StrategySampler,
    position: usize,
}

impl<'a> CausalEncoder<'a> {
    pub fn new(codeword: &'a [u8], sampler: &'a StrategySampler) -> Self {
        CausalEncoder {
            codeword,
            sampler,
            position: 0,
        }
    }

    /// Feeds `s_i`, returns `x_i`.
    pub fn step<R: Rng + ?Sized>(&mut self, s: u8, rng: &mut R) -> u8 {
        let x = self.sampler.sample(self.codeword[self.position], s, rng);
        self.position += 1;
        x
    }

    /// State symbols consumed so far.
    pub fn consumed(&self) -> usize {
        self.position
    }
}

/// Picks `L` uniformly in `B(m0, c, m2)` and encodes `s` causally.
pub fn encode_block<R: Rng + ?Sized>(
    cb: &Codebook,
    m0: u64,
    c: u64,
    m2: u64,
    s: &[u8],
    strat: &ShannonStrategy,
    rng: &mut R,
) -> Result<(Vec<u8>, u64)> {
    let r = cb.rates();
    if m0 >= r.m0 || c >= r.m1 || m2 >= r.m2 {
        return domain(format!(
            "bin ({m0}, {c}, {m2}) outside ({}, {}, {})",
            r.m0, r.m1, r.m2
        ));
    }
    if s.len() != r.n {
        return domain(format!("state block has length {}, expected {}", s.len(), r.n));
    }
    if strat.u_size() != cb.u_size() {
        return domain("strategy and codebook disagree on |U|");
    }
    let sampler = StrategySampler::new(strat)?;
    let l = r.bin_number(m0, c, m2) * r.residual + rng.gen_range(0..r.residual);
    let mut enc = CausalEncoder::new(cb.codeword(l), &sampler);
    let x = s.iter().map(|&si| enc.step(si, rng)).collect();
    Ok((x, l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{generate_codebook, CodeRates};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn direct_strategy_copies_the_codeword() {
        let st = ShannonStrategy::deterministic(vec![0.5, 0.5], 2, 2, |u, _| u).unwrap();
        let r = CodeRates::quantize(6, 1.0, 0.5, 0.0, 0.0).unwrap();
        let cb = generate_codebook(r, &[0.5, 0.5], 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (x, l) = encode_block(&cb, 3, 0, 0, &[1, 0, 1, 1, 0, 0], &st, &mut rng).unwrap();
        assert_eq!(x, cb.codeword(l));
        assert_eq!(r.split(l).m0, 3);
    }

    #[test]
    fn singleton_bin_fixes_the_index() {
        let st = ShannonStrategy::deterministic(vec![0.5, 0.5], 2, 2, |u, s| u ^ s).unwrap();
        let r = CodeRates::from_counts(4, 4, 2, 2, 1).unwrap();
        let cb = generate_codebook(r, &[0.5, 0.5], 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let (_, l) = encode_block(&cb, 2, 1, 0, &[0, 0, 1, 1], &st, &mut rng).unwrap();
            assert_eq!(l, r.bin_number(2, 1, 0));
        }
    }

    #[test]
    fn empirical_kernel_matches() {
        // stochastic map: x = u xor s with prob 0.8, flipped otherwise
        let mut map = vec![0.0; 8];
        for u in 0..2 {
            for s in 0..2 {
                let x = u ^ s;
                map[(u * 2 + s) * 2 + x] = 0.8;
                map[(u * 2 + s) * 2 + (1 - x)] = 0.2;
            }
        }
        let st = ShannonStrategy::from_parts(vec![0.5, 0.5], 2, 2, map).unwrap();
        let sampler = StrategySampler::new(&st).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let trials = 10_000;
        let mut hits = 0;
        for _ in 0..trials {
            if sampler.sample(1, 0, &mut rng) == 1 {
                hits += 1;
            }
        }
        let p = hits as f64 / trials as f64;
        let sigma = (0.8f64 * 0.2 / trials as f64).sqrt();
        assert!((p - 0.8).abs() <= 3.0 * sigma, "{p}");
    }

    #[test]
    fn encoder_consumes_one_state_per_symbol() {
        let st = ShannonStrategy::deterministic(vec![0.5, 0.5], 2, 2, |u, s| u ^ s).unwrap();
        let sampler = StrategySampler::new(&st).unwrap();
        let word = [1u8, 0, 1];
        let mut enc = CausalEncoder::new(&word, &sampler);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(enc.step(1, &mut rng), 0);
        assert_eq!(enc.consumed(), 1);
    }
}
