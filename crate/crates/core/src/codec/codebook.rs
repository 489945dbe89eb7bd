use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, resource, Result};

/// Default cap on codebook symbols (codewords × blocklength).
pub const DEFAULT_CODEBOOK_CAP: usize = 1 << 24;

/// Integral message counts for one blocklength.
///
/// A rate `r` is realized as a count `k = ⌊2^{n r}⌋`, so the effective rate
/// is `log2(k)/n`. The codebook holds `m0 · m1 · m2 · residual` codewords;
/// `residual ≥ 1` is what keeps the innermost bins non-empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeRates {
    pub n: usize,
    /// wiretap-protected messages `2^{nR0}`
    pub m0: u64,
    /// pad-protected messages (and keys, ciphers) `2^{nR1}`
    pub m1: u64,
    /// reconciliation indices `2^{nR2}`
    pub m2: u64,
    /// codewords per innermost bin `2^{n(R̄−R0−R1−R2)}`
    pub residual: u64,
}

/// Position of a codeword index in the three-level partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinIndex {
    pub m0: u64,
    pub c: u64,
    pub m2: u64,
    pub residual: u64,
}

fn count_for(n: usize, rate: f64, label: &str) -> Result<u64> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return domain(format!("{label} = {rate} must be a nonnegative rate"));
    }
    let raw = (n as f64 * rate).exp2();
    if raw > u32::MAX as f64 {
        return resource(format!("2^(n·{label}) = {raw:.3e} is too large"));
    }
    Ok(((raw + 1e-9).floor() as u64).max(1))
}

impl CodeRates {
    pub fn from_counts(n: usize, m0: u64, m1: u64, m2: u64, residual: u64) -> Result<Self> {
        if n == 0 {
            return domain("blocklength must be positive");
        }
        if m0 == 0 || m1 == 0 || m2 == 0 || residual == 0 {
            return domain("message counts and bin sizes must be at least 1");
        }
        let total = [m0, m1, m2, residual]
            .iter()
            .try_fold(1u64, |acc, &k| acc.checked_mul(k));
        match total {
            Some(t) if t <= u32::MAX as u64 => Ok(CodeRates {
                n,
                m0,
                m1,
                m2,
                residual,
            }),
            _ => resource("codebook index space exceeds 2^32"),
        }
    }

    /// Quantizes real rates to integral counts. Fails when the quantized
    /// `R0 + R1 + R2` leaves no room inside `R̄`.
    pub fn quantize(n: usize, r_bar: f64, r0: f64, r1: f64, r2: f64) -> Result<Self> {
        if n == 0 {
            return domain("blocklength must be positive");
        }
        let total = count_for(n, r_bar, "r_bar")?;
        let m0 = count_for(n, r0, "r0")?;
        let m1 = count_for(n, r1, "r1")?;
        let m2 = count_for(n, r2, "r2")?;
        let inner = m0 * m1 * m2;
        let residual = total / inner;
        if residual == 0 {
            return domain(format!(
                "at n = {n} the bins are empty: 2^(nR0)·2^(nR1)·2^(nR2) = {inner} exceeds 2^(nR̄) = {total}"
            ));
        }
        Self::from_counts(n, m0, m1, m2, residual)
    }

    /// Like [`CodeRates::quantize`], but rounds the reconciliation count up
    /// so the quantized `R2` does not drop below the requested value.
    pub fn quantize_split(n: usize, split: &crate::rates::RateTuple) -> Result<Self> {
        if n == 0 {
            return domain("blocklength must be positive");
        }
        let m2 = count_for(n, split.r2, "r2")?;
        let m2 = if (m2 as f64) < (n as f64 * split.r2).exp2() - 1e-9 { m2 + 1 } else { m2 };
        let r2 = (m2 as f64).log2() / n as f64;
        Self::quantize(n, split.r_bar, split.r0, split.r1, r2)
    }

    pub fn codewords(&self) -> u64 {
        self.m0 * self.m1 * self.m2 * self.residual
    }

    fn rate(&self, k: u64) -> f64 {
        (k as f64).log2() / self.n as f64
    }

    pub fn r_bar(&self) -> f64 {
        self.rate(self.codewords())
    }

    pub fn r0(&self) -> f64 {
        self.rate(self.m0)
    }

    pub fn r1(&self) -> f64 {
        self.rate(self.m1)
    }

    pub fn r2(&self) -> f64 {
        self.rate(self.m2)
    }

    /// Secret-message rate `R0 + R1`.
    pub fn secret_rate(&self) -> f64 {
        self.rate(self.m0 * self.m1)
    }

    pub fn as_tuple(&self) -> crate::rates::RateTuple {
        crate::rates::RateTuple {
            r_bar: self.r_bar(),
            r0: self.r0(),
            r1: self.r1(),
            r2: self.r2(),
        }
    }

    /// Sizes of `B(m0)`, `B(m0,c)` and `B(m0,c,m2)`.
    pub fn bin_sizes(&self) -> [u64; 3] {
        let inner = self.residual;
        [self.m1 * self.m2 * inner, self.m2 * inner, inner]
    }

    /// Number of innermost bins `B(m0,c,m2)`.
    pub fn bins(&self) -> u64 {
        self.m0 * self.m1 * self.m2
    }

    /// Flat innermost-bin number of `(m0, c, m2)`.
    pub fn bin_number(&self, m0: u64, c: u64, m2: u64) -> u64 {
        (m0 * self.m1 + c) * self.m2 + m2
    }

    pub fn split(&self, l: u64) -> BinIndex {
        let residual = l % self.residual;
        let rest = l / self.residual;
        let m2 = rest % self.m2;
        let rest = rest / self.m2;
        BinIndex {
            m0: rest / self.m1,
            c: rest % self.m1,
            m2,
            residual,
        }
    }

    pub fn join(&self, b: &BinIndex) -> u64 {
        self.bin_number(b.m0, b.c, b.m2) * self.residual + b.residual
    }
}

/// `codewords` sequences in `U^n`, drawn i.i.d. from `p(u)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Codebook {
    rates: CodeRates,
    u_size: usize,
    symbols: Vec<u8>,
}

impl Codebook {
    pub fn rates(&self) -> &CodeRates {
        &self.rates
    }

    pub fn u_size(&self) -> usize {
        self.u_size
    }

    pub fn len(&self) -> u64 {
        self.rates.codewords()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn codeword(&self, l: u64) -> &[u8] {
        let n = self.rates.n;
        let start = l as usize * n;
        &self.symbols[start..start + n]
    }
}

pub fn generate_codebook(rates: CodeRates, p_u: &[f64], seed: u64) -> Result<Codebook> {
    if p_u.is_empty() || p_u.len() > 256 {
        return domain(format!("|U| = {} must lie in 1..=256", p_u.len()));
    }
    let cells = (rates.codewords() as usize).checked_mul(rates.n);
    match cells {
        Some(c) if c <= DEFAULT_CODEBOOK_CAP => {}
        _ => {
            return resource(format!(
                "codebook of {} codewords of length {} exceeds {DEFAULT_CODEBOOK_CAP} symbols; use a smaller n or R̄",
                rates.codewords(),
                rates.n
            ))
        }
    }
    let dist = WeightedIndex::new(p_u)
        .map_err(|e| crate::Error::Domain(format!("p(u) is not a distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let symbols = (0..rates.codewords() as usize * rates.n)
        .map(|_| dist.sample(&mut rng) as u8)
        .collect();
    Ok(Codebook {
        rates,
        u_size: p_u.len(),
        symbols,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_rates_at_n4() {
        let r = CodeRates::quantize(4, 1.0, 0.25, 0.25, 0.25).unwrap();
        assert_eq!(r.codewords(), 16);
        assert_eq!(r.bin_sizes(), [8, 4, 2]);
        let cb = generate_codebook(r, &[0.5, 0.5], 1).unwrap();
        assert_eq!(cb.len(), 16);
    }

    #[test]
    fn full_split_gives_singletons() {
        let r = CodeRates::quantize(4, 0.75, 0.25, 0.25, 0.25).unwrap();
        assert_eq!(r.bin_sizes()[2], 1);
    }

    #[test]
    fn overfull_split_is_rejected() {
        assert!(CodeRates::quantize(4, 0.5, 0.25, 0.25, 0.25).is_err());
        assert!(CodeRates::quantize(0, 0.5, 0.0, 0.0, 0.0).is_err());
        assert!(CodeRates::quantize(4, -0.5, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn partition_is_a_bijection() {
        let r = CodeRates::from_counts(3, 3, 2, 5, 2).unwrap();
        let mut seen = vec![false; r.codewords() as usize];
        for l in 0..r.codewords() {
            let b = r.split(l);
            assert!(b.m0 < 3 && b.c < 2 && b.m2 < 5 && b.residual < 2);
            assert_eq!(r.join(&b), l);
            let again = r.join(&b) as usize;
            assert!(!seen[again]);
            seen[again] = true;
        }
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let r = CodeRates::quantize(6, 1.0, 0.5, 0.0, 0.0).unwrap();
        let a = generate_codebook(r, &[0.2, 0.3, 0.5], 9).unwrap();
        let b = generate_codebook(r, &[0.2, 0.3, 0.5], 9).unwrap();
        let c = generate_codebook(r, &[0.2, 0.3, 0.5], 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn oversized_codebook_is_a_resource_error() {
        let r = CodeRates::quantize(30, 0.9, 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            generate_codebook(r, &[0.5, 0.5], 0),
            Err(crate::Error::Resource(_))
        ));
    }
}
