//! Maximum likelihood decoders for the codeword index and for the state
//! sequence inside a Slepian-Wolf bin.

use super::codebook::Codebook;
use super::hashing::SWCode;
use crate::channel::{S, U, Y};
use crate::error::{domain, Result};
use crate::prob::JointTable;

/// `log2 p(y|u)` from a joint containing `U` and `Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputLikelihood {
    y_size: usize,
    log_p: Vec<f64>,
}

impl OutputLikelihood {
    pub fn from_joint(joint: &JointTable) -> Result<Self> {
        let uy = joint.marginal(&[U, Y])?;
        let sizes = uy.sizes();
        let (nu, ny) = (sizes[0], sizes[1]);
        let mut log_p = vec![f64::NEG_INFINITY; nu * ny];
        for u in 0..nu {
            let row = &uy.probs()[u * ny..(u + 1) * ny];
            let pu: f64 = row.iter().sum();
            if pu <= 0.0 {
                continue;
            }
            for y in 0..ny {
                if row[y] > 0.0 {
                    log_p[u * ny + y] = (row[y] / pu).log2();
                }
            }
        }
        Ok(OutputLikelihood { y_size: ny, log_p })
    }

    #[inline]
    pub fn log_prob(&self, y: u8, u: u8) -> f64 {
        self.log_p[u as usize * self.y_size + y as usize]
    }

    /// `argmax_l Π p(y_i | u_i(l))`, ties to the smallest `l`.
    pub fn decode(&self, cb: &Codebook, y: &[u8]) -> u64 {
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        let mut first = true;
        for l in 0..cb.len() {
            let word = cb.codeword(l);
            let mut score = 0.0;
            let mut pruned = false;
            for (&yi, &ui) in y.iter().zip(word) {
                score += self.log_prob(yi, ui);
                // log-likelihoods only decrease: stop once we cannot win
                if !first && score <= best {
                    pruned = true;
                    break;
                }
            }
            if first || (!pruned && score > best) {
                best = score;
                arg = l;
                first = false;
            }
        }
        arg
    }
}

/// `log2 p(s|u,y)` from a joint containing `U`, `S` and `Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct StatePosterior {
    s_size: usize,
    y_size: usize,
    log_p: Vec<f64>,
}

impl StatePosterior {
    pub fn from_joint(joint: &JointTable) -> Result<Self> {
        let uys = joint.marginal(&[U, Y, S])?;
        let sizes = uys.sizes();
        let (nu, ny, ns) = (sizes[0], sizes[1], sizes[2]);
        let mut log_p = vec![f64::NEG_INFINITY; nu * ny * ns];
        for uy in 0..nu * ny {
            let row = &uys.probs()[uy * ns..(uy + 1) * ns];
            let total: f64 = row.iter().sum();
            if total <= 0.0 {
                continue;
            }
            for s in 0..ns {
                if row[s] > 0.0 {
                    log_p[uy * ns + s] = (row[s] / total).log2();
                }
            }
        }
        Ok(StatePosterior {
            s_size: ns,
            y_size: ny,
            log_p,
        })
    }

    #[inline]
    pub fn log_prob(&self, s: u8, u: u8, y: u8) -> f64 {
        self.log_p[(u as usize * self.y_size + y as usize) * self.s_size + s as usize]
    }
}

/// Maximum-likelihood decoding of the codeword index from Bob's block output.
pub fn ml_decode(cb: &Codebook, y: &[u8], joint: &JointTable) -> Result<u64> {
    if y.len() != cb.rates().n {
        return domain(format!("output block has length {}, expected {}", y.len(), cb.rates().n));
    }
    Ok(OutputLikelihood::from_joint(joint)?.decode(cb, y))
}

/// In-bin ML reconstruction `φ(index, u, y)` of the state sequence.
/// `Ok(None)` flags an empty bin.
pub fn sw_decode(
    sw: &SWCode,
    index: u64,
    u: &[u8],
    y: &[u8],
    joint: &JointTable,
) -> Result<Option<Vec<u8>>> {
    let n = sw.space().n;
    if u.len() != n || y.len() != n {
        return domain(format!("side information must have length {n}"));
    }
    if index >= sw.range() {
        return domain(format!("bin index {index} out of range {}", sw.range()));
    }
    Ok(sw.decode(index, u, y, &StatePosterior::from_joint(joint)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{induce_joint, preset, Preset, PresetParams};
    use crate::codec::{generate_codebook, CodeRates};

    fn ex1_joint(eps_s: f64) -> JointTable {
        let (ch, st) = preset(
            Preset::Ex1,
            PresetParams {
                eps_s,
                ..Default::default()
            },
        )
        .unwrap();
        induce_joint(&ch, &st).unwrap()
    }

    #[test]
    fn noiseless_output_recovers_the_index() {
        // ex1 with X = U xor S gives Y = U
        let j = ex1_joint(0.3);
        let r = CodeRates::quantize(8, 0.5, 0.0, 0.0, 0.0).unwrap();
        let cb = generate_codebook(r, &[0.5, 0.5], 4).unwrap();
        for l in 0..cb.len() {
            let got = ml_decode(&cb, cb.codeword(l), &j).unwrap();
            // a duplicate codeword decodes to its first copy
            assert_eq!(cb.codeword(got), cb.codeword(l));
            assert!(got <= l);
        }
    }

    #[test]
    fn singleton_bins_reconstruct_exactly() {
        let j = ex1_joint(0.3);
        let sw = SWCode::new(2, 5, 32, 11).unwrap();
        let u = [0, 1, 1, 0, 1];
        for idx in 0..32usize {
            let s = sw.space().sequence(idx);
            let got = sw_decode(&sw, sw.encode(&s), &u, &u, &j).unwrap().unwrap();
            assert_eq!(got, s);
        }
    }

    #[test]
    fn decoders_check_lengths() {
        let j = ex1_joint(0.3);
        let r = CodeRates::quantize(4, 0.5, 0.0, 0.0, 0.0).unwrap();
        let cb = generate_codebook(r, &[0.5, 0.5], 4).unwrap();
        assert!(ml_decode(&cb, &[0, 1], &j).is_err());
        let sw = SWCode::new(2, 4, 2, 1).unwrap();
        assert!(sw_decode(&sw, 0, &[0; 3], &[0; 4], &j).is_err());
        assert!(sw_decode(&sw, 2, &[0; 4], &[0; 4], &j).is_err());
    }
}
