//! Exact leakage to Eve for a fixed code system, by enumeration.
//!
//! Eve observes `Z_1 .. Z_b` (the dummy block's output is not part of the
//! leakage, matching `Z^b = Z_1 .. Z_b`). Within block `j ≥ 1` her output
//! depends on the past only through the innermost bin
//! `(m0_j, k_{j−1} ⊕ m1_j, σ(s_{j−1}))` and on the fresh state `s_j`:
//!
//! `G_j(z | bin, s) = (1/|bin|) Σ_{l ∈ bin} Π_i p(z_i | u_{j,i}(l), s_i)`.

use serde::{Deserialize, Serialize};

use crate::codec::{Codebook, Scheme, SequenceSpace};
use crate::error::{resource, Result};
use crate::prob::entropy_of;

/// Default bound on the number of enumerated states.
pub const DEFAULT_ENUMERATION_CAP: usize = 10_000_000;

/// The four sums of the leakage bound, in bits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeakageTerms {
    /// `Σ_j I(M0_j; S_j Z_j)`
    pub resolvability: f64,
    /// `Σ_j I(N_j; Z^{j−1})`
    pub interblock: f64,
    /// `Σ_j D(P_{K_{j−1}} || Q_K)`
    pub key_uniformity: f64,
    /// `Σ_j I(K_{j−1} N_j; Z^{j−1})`
    pub key_secrecy: f64,
    /// The four terms for each block `j = 1..b`.
    pub per_block: Vec<[f64; 4]>,
    /// `Σ_j I(K_{j−1}; N_j)`: dependence between the key and the
    /// reconciliation index drawn from the same state block. The four-term
    /// bound treats the cipher as hiding `M1_j` from Eve's block-`j` output
    /// once `M0_j`, `S_j` and `C_j` are known, which only holds when this
    /// vanishes; at small `n` it does not.
    pub key_bin_dependence: f64,
}

impl LeakageTerms {
    /// The four-term bound.
    pub fn total(&self) -> f64 {
        self.resolvability + self.interblock + self.key_uniformity + self.key_secrecy
    }

    /// The four-term bound plus [`LeakageTerms::key_bin_dependence`], which
    /// is a valid bound for every code.
    pub fn total_with_dependence(&self) -> f64 {
        self.total() + self.key_bin_dependence
    }
}

/// `I(A;B)` for a dense joint with `A` on rows.
pub fn mutual_information_2d(p: &[f64], cols: usize) -> f64 {
    let rows = p.len() / cols;
    let mut pa = vec![0.0; rows];
    let mut pb = vec![0.0; cols];
    for a in 0..rows {
        for b in 0..cols {
            let v = p[a * cols + b];
            pa[a] += v;
            pb[b] += v;
        }
    }
    (entropy_of(&pa) + entropy_of(&pb) - entropy_of(p)).max(0.0)
}

fn checked_cells(factors: &[usize], cap: usize, what: &str) -> Result<usize> {
    let mut cells: usize = 1;
    for &f in factors {
        cells = match cells.checked_mul(f) {
            Some(c) if c <= cap => c,
            _ => {
                return resource(format!(
                    "{what} needs more than {cap} enumerated states; use plugin_leakage or smaller n, b"
                ))
            }
        };
    }
    Ok(cells)
}

/// Precomputed laws shared by the exact computations.
struct Enumeration {
    s_space: SequenceSpace,
    z_count: usize,
    p_s: Vec<f64>,
    sigma: Vec<u32>,
    kappa: Vec<u32>,
    /// `G_j` for `j = 1..b`, each indexed `[bin][s][z]`
    eve: Vec<Vec<f64>>,
}

impl Enumeration {
    fn new(scheme: &Scheme, cap: usize) -> Result<Self> {
        let rates = scheme.system.rates;
        let d = scheme.channel.sizes();
        let s_space = SequenceSpace::new(d.s, rates.n, cap)?;
        let z_space = SequenceSpace::new(d.z, rates.n, cap)?;
        checked_cells(
            &[rates.bins() as usize, s_space.count, z_space.count],
            cap,
            "Eve's block law",
        )?;
        let w = eve_kernel(scheme);
        let eve = scheme.system.codebooks[1..]
            .iter()
            .map(|cb| block_law(cb, &w, d.s, d.z, &s_space, z_space.count))
            .collect();
        Ok(Enumeration {
            p_s: s_space.product_law(scheme.channel.state_dist()),
            sigma: scheme.system.sw.table().to_vec(),
            kappa: scheme.system.key.table().to_vec(),
            s_space,
            z_count: z_space.count,
            eve,
        })
    }

    fn g(&self, j: usize, bin: usize) -> &[f64] {
        let block = self.s_space.count * self.z_count;
        &self.eve[j - 1][bin * block..(bin + 1) * block]
    }
}

/// `p(z|u,s) = Σ_x p(x|u,s) Σ_y p(y,z|x,s)`, indexed `(u·|S| + s)·|Z| + z`.
fn eve_kernel(scheme: &Scheme) -> Vec<f64> {
    let d = scheme.channel.sizes();
    let nu = scheme.strategy.u_size();
    let mut w = vec![0.0; nu * d.s * d.z];
    for u in 0..nu {
        for s in 0..d.s {
            for x in 0..d.x {
                let px = scheme.strategy.prob(u, s, x);
                if px == 0.0 {
                    continue;
                }
                for y in 0..d.y {
                    for z in 0..d.z {
                        w[(u * d.s + s) * d.z + z] += px * scheme.channel.prob(x, s, y, z);
                    }
                }
            }
        }
    }
    w
}

/// `G(z | bin, s)` for one codebook.
fn block_law(
    cb: &Codebook,
    w: &[f64],
    s_size: usize,
    z_size: usize,
    s_space: &SequenceSpace,
    z_count: usize,
) -> Vec<f64> {
    let rates = cb.rates();
    let n = rates.n;
    let block = s_space.count * z_count;
    let mut out = vec![0.0; rates.bins() as usize * block];
    let scale = 1.0 / rates.residual as f64;
    let mut s_seq = vec![0u8; n];
    for l in 0..cb.len() {
        let bin = (l / rates.residual) as usize;
        let u = cb.codeword(l);
        for s in 0..s_space.count {
            s_space.write_sequence(s, &mut s_seq);
            // Kronecker product of the per-letter laws of z_i
            let mut law = vec![scale];
            for i in 0..n {
                let row = &w[(u[i] as usize * s_size + s_seq[i] as usize) * z_size..][..z_size];
                law = law
                    .iter()
                    .flat_map(|&a| row.iter().map(move |&b| a * b))
                    .collect();
            }
            let dst = &mut out[bin * block + s * z_count..][..z_count];
            for (d, v) in dst.iter_mut().zip(&law) {
                *d += v;
            }
        }
    }
    out
}

/// Exact `I(M^b; Z^b)` for the scheme's fixed code system, with
/// `M_j = (M0_j, M1_j)` uniform.
pub fn exact_leakage(scheme: &Scheme, cap: usize) -> Result<f64> {
    let rates = scheme.system.rates;
    let b = scheme.system.blocks();
    let d = scheme.channel.sizes();
    let msgs = (rates.m0 * rates.m1) as usize;
    let z_count = SequenceSpace::new(d.z, rates.n, cap)?.count;
    let s_count = SequenceSpace::new(d.s, rates.n, cap)?.count;
    let mut factors = vec![s_count];
    for _ in 0..b {
        factors.push(msgs);
        factors.push(z_count);
    }
    checked_cells(&factors, cap, "exact leakage")?;
    let en = Enumeration::new(scheme, cap)?;
    let ns = en.s_space.count;
    let nz = en.z_count;
    let pm = 1.0 / msgs as f64;

    // alpha[(mh · zh_count + zh) · ns + s]
    let mut alpha = en.p_s.clone();
    let mut mh_count = 1usize;
    let mut zh_count = 1usize;
    for j in 1..=b {
        let new_zh = zh_count * nz;
        let mut next = vec![0.0; mh_count * msgs * new_zh * ns];
        for mh in 0..mh_count {
            for zh in 0..zh_count {
                for s in 0..ns {
                    let a = alpha[(mh * zh_count + zh) * ns + s];
                    if a == 0.0 {
                        continue;
                    }
                    let k = en.kappa[s] as u64;
                    let nn = en.sigma[s] as u64;
                    for m0 in 0..rates.m0 {
                        for m1 in 0..rates.m1 {
                            let c = (k + m1) % rates.m1;
                            let g = en.g(j, rates.bin_number(m0, c, nn) as usize);
                            let m = (m0 * rates.m1 + m1) as usize;
                            let w = a * pm;
                            for s2 in 0..ns {
                                let ws = w * en.p_s[s2];
                                if ws == 0.0 {
                                    continue;
                                }
                                let row = &g[s2 * nz..(s2 + 1) * nz];
                                let base = (mh * msgs + m) * new_zh + zh * nz;
                                for (z, &gz) in row.iter().enumerate() {
                                    next[(base + z) * ns + s2] += ws * gz;
                                }
                            }
                        }
                    }
                }
            }
        }
        alpha = next;
        mh_count *= msgs;
        zh_count = new_zh;
    }
    let joint: Vec<f64> = alpha.chunks(ns).map(|c| c.iter().sum()).collect();
    Ok(mutual_information_2d(&joint, zh_count))
}

/// The four terms of the leakage bound, computed exactly for the scheme's
/// fixed code system.
pub fn leakage_decomposition(scheme: &Scheme, cap: usize) -> Result<LeakageTerms> {
    let rates = scheme.system.rates;
    let b = scheme.system.blocks();
    let d = scheme.channel.sizes();
    let z_count = SequenceSpace::new(d.z, rates.n, cap)?.count;
    let s_count = SequenceSpace::new(d.s, rates.n, cap)?.count;
    let mut factors = vec![s_count; 2];
    factors.extend(std::iter::repeat(z_count).take(b));
    checked_cells(&factors, cap, "leakage decomposition")?;
    let en = Enumeration::new(scheme, cap)?;
    let ns = en.s_space.count;
    let nz = en.z_count;
    let (c0, c1, c2) = (rates.m0 as usize, rates.m1 as usize, rates.m2 as usize);

    let mut p_n = vec![0.0; c2];
    let mut p_k = vec![0.0; c1];
    for s in 0..ns {
        p_n[en.sigma[s] as usize] += en.p_s[s];
        p_k[en.kappa[s] as usize] += en.p_s[s];
    }
    let key_div = ((c1 as f64).log2() - entropy_of(&p_k)).max(0.0);
    let mut p_kn = vec![0.0; c1 * c2];
    for s in 0..ns {
        p_kn[en.kappa[s] as usize * c2 + en.sigma[s] as usize] += en.p_s[s];
    }
    let key_bin = mutual_information_2d(&p_kn, c2);

    // H_j(z | nn, s): Eve's block law with M0 and the (uniform) cipher averaged out
    let h_law = |j: usize| -> Vec<f64> {
        let mut h = vec![0.0; c2 * ns * nz];
        let w = 1.0 / (c0 * c1) as f64;
        for nn in 0..c2 {
            for m0 in 0..c0 {
                for c in 0..c1 {
                    let g = en.g(j, rates.bin_number(m0 as u64, c as u64, nn as u64) as usize);
                    for (dst, &v) in h[nn * ns * nz..(nn + 1) * ns * nz].iter_mut().zip(g) {
                        *dst += w * v;
                    }
                }
            }
        }
        h
    };

    let mut per_block = Vec::with_capacity(b);
    // beta[zh · ns + s] = p(z^{j−1}, s_{j−1}); before block 1 it is just p(s_0)
    let mut beta = en.p_s.clone();
    let mut zh_count = 1usize;
    for j in 1..=b {
        // term 1: I(M0_j; S_j Z_j), cipher uniform and independent of N_j
        let mut t1 = vec![0.0; c0 * ns * nz];
        for m0 in 0..c0 {
            for c in 0..c1 {
                for nn in 0..c2 {
                    let w = p_n[nn] / (c0 * c1) as f64;
                    if w == 0.0 {
                        continue;
                    }
                    let g = en.g(j, rates.bin_number(m0 as u64, c as u64, nn as u64) as usize);
                    for s in 0..ns {
                        let ws = w * en.p_s[s];
                        for z in 0..nz {
                            t1[(m0 * ns + s) * nz + z] += ws * g[s * nz + z];
                        }
                    }
                }
            }
        }
        let term1 = mutual_information_2d(&t1, ns * nz);

        // terms 2 and 4 from p(z^{j−1}, s_{j−1}); both vanish for j = 1
        let (term2, term4) = if j == 1 {
            (0.0, 0.0)
        } else {
            let mut pn_z = vec![0.0; c2 * zh_count];
            let mut pkn_z = vec![0.0; c1 * c2 * zh_count];
            for zh in 0..zh_count {
                for s in 0..ns {
                    let v = beta[zh * ns + s];
                    let nn = en.sigma[s] as usize;
                    let k = en.kappa[s] as usize;
                    pn_z[nn * zh_count + zh] += v;
                    pkn_z[(k * c2 + nn) * zh_count + zh] += v;
                }
            }
            (
                mutual_information_2d(&pn_z, zh_count),
                mutual_information_2d(&pkn_z, zh_count),
            )
        };
        per_block.push([term1, term2, key_div, term4]);

        if j < b {
            let h = h_law(j);
            let new_zh = zh_count * nz;
            let mut next = vec![0.0; new_zh * ns];
            for zh in 0..zh_count {
                for s in 0..ns {
                    let v = beta[zh * ns + s];
                    if v == 0.0 {
                        continue;
                    }
                    let nn = en.sigma[s] as usize;
                    for s2 in 0..ns {
                        let w = v * en.p_s[s2];
                        let row = &h[(nn * ns + s2) * nz..][..nz];
                        for (z, &hz) in row.iter().enumerate() {
                            next[(zh * nz + z) * ns + s2] += w * hz;
                        }
                    }
                }
            }
            // block 1 starts from p(s_0) with an empty history
            beta = next;
            zh_count = new_zh;
        }
    }
    let sum = |k: usize| per_block.iter().map(|t| t[k]).sum::<f64>();
    Ok(LeakageTerms {
        resolvability: sum(0),
        interblock: sum(1),
        key_uniformity: sum(2),
        key_secrecy: sum(3),
        per_block,
        key_bin_dependence: b as f64 * key_bin,
    })
}

/// `S(κ(S_1) σ(S_1) | Z_1)`: how far the key and reconciliation index of the
/// first message block are from uniform and independent of Eve's output.
pub fn key_security_index(scheme: &Scheme, cap: usize) -> Result<f64> {
    let rates = scheme.system.rates;
    let (c1, c2) = (rates.m1 as usize, rates.m2 as usize);
    let en = Enumeration::new(scheme, cap)?;
    let (ns, nz) = (en.s_space.count, en.z_count);
    checked_cells(&[c1 * c2, nz], cap, "security index")?;
    let c0 = rates.m0 as usize;
    let mut p_n = vec![0.0; c2];
    for s in 0..ns {
        p_n[en.sigma[s] as usize] += en.p_s[s];
    }
    // p(s_1, z_1) with block-1 inputs averaged out
    let mut ps_z = vec![0.0; ns * nz];
    for m0 in 0..c0 {
        for c in 0..c1 {
            for nn in 0..c2 {
                let w = p_n[nn] / (c0 * c1) as f64;
                if w == 0.0 {
                    continue;
                }
                let g = en.g(1, rates.bin_number(m0 as u64, c as u64, nn as u64) as usize);
                for s in 0..ns {
                    let ws = w * en.p_s[s];
                    for z in 0..nz {
                        ps_z[s * nz + z] += ws * g[s * nz + z];
                    }
                }
            }
        }
    }
    let mut pkf = vec![0.0; c1 * c2 * nz];
    for s in 0..ns {
        let key = en.kappa[s] as usize * c2 + en.sigma[s] as usize;
        for z in 0..nz {
            pkf[key * nz + z] += ps_z[s * nz + z];
        }
    }
    let mut pk = vec![0.0; c1 * c2];
    for (k, row) in pkf.chunks(nz).enumerate() {
        pk[k] = row.iter().sum();
    }
    let divergence = ((c1 * c2) as f64).log2() - entropy_of(&pk);
    Ok((divergence + mutual_information_2d(&pkf, nz)).max(0.0))
}

/// Exact leakage averaged over `members` code systems of the seeded ensemble.
pub fn ensemble_leakage(
    scheme: &Scheme,
    seed: u64,
    members: u64,
    cap: usize,
) -> Result<f64> {
    let mut total = 0.0;
    for member in 0..members {
        let sys = crate::codec::CodeSystem::generate(
            scheme.system.rates,
            scheme.strategy.u_dist(),
            scheme.channel.sizes().s,
            scheme.system.blocks(),
            seed,
            member,
        )?;
        let s = Scheme::new(scheme.channel.clone(), scheme.strategy.clone(), sys)?;
        total += exact_leakage(&s, cap)?;
    }
    Ok(total / members.max(1) as f64)
}
