//! Wiretap channels with a random state known causally at the encoder, and
//! the Shannon-strategy view of them.
//!
//! A channel is the kernel `p(y,z|x,s)` plus a state law `p(s)`. A Shannon
//! strategy picks an auxiliary `U` independent of `S` and a stochastic map
//! `p(x|u,s)`; composing the two gives an ordinary wiretap channel with input
//! `U` whose joint law is built by [`induce_joint`].

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::prob::{Alphabet, JointTable, Kernel};

/// Variable labels used throughout the crate.
pub const U: &str = "U";
pub const S: &str = "S";
pub const X: &str = "X";
pub const Y: &str = "Y";
pub const Z: &str = "Z";

/// Tolerance used when validating user-provided channel files.
pub const FILE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WiretapChannel {
    /// `p(y,z|x,s)`; inputs `(X,S)`, outputs `(Y,Z)`.
    transition: Kernel,
    state_dist: Vec<f64>,
}

impl WiretapChannel {
    pub fn new(state_dist: Vec<f64>, transition: Kernel) -> Result<Self> {
        let names: Vec<&str> = transition.inputs().iter().map(|a| a.name.as_str()).collect();
        let outs: Vec<&str> = transition.outputs().iter().map(|a| a.name.as_str()).collect();
        if names != [X, S] || outs != [Y, Z] {
            return domain("channel kernel must map (X,S) to (Y,Z)");
        }
        if transition.inputs()[1].size != state_dist.len() {
            return domain("state distribution does not match the state alphabet");
        }
        // validates and renormalizes
        let state = JointTable::with_tolerance(
            vec![transition.inputs()[1].clone()],
            state_dist,
            FILE_TOLERANCE,
        )?;
        Ok(WiretapChannel {
            transition,
            state_dist: state.probs().to_vec(),
        })
    }

    /// Builds a channel from a function `p(y,z | x,s)`.
    pub fn from_fn(
        sizes: ChannelSizes,
        state_dist: Vec<f64>,
        f: impl Fn(usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let kernel = Kernel::from_fn(
            vec![Alphabet::new(X, sizes.x)?, Alphabet::new(S, sizes.s)?],
            vec![Alphabet::new(Y, sizes.y)?, Alphabet::new(Z, sizes.z)?],
            |i, o| f(i[0], i[1], o[0], o[1]),
        )?;
        Self::new(state_dist, kernel)
    }

    pub fn sizes(&self) -> ChannelSizes {
        let i = self.transition.inputs();
        let o = self.transition.outputs();
        ChannelSizes {
            s: i[1].size,
            x: i[0].size,
            y: o[0].size,
            z: o[1].size,
        }
    }

    pub fn state_dist(&self) -> &[f64] {
        &self.state_dist
    }

    pub fn transition(&self) -> &Kernel {
        &self.transition
    }

    /// `p(y,z|x,s)`.
    pub fn prob(&self, x: usize, s: usize, y: usize, z: usize) -> f64 {
        let d = self.sizes();
        self.transition.row(x * d.s + s)[y * d.z + z]
    }

    /// The channel seen by a strategy that ignores the state: `p(y,z|x) = Σ_s p(s) p(y,z|x,s)`.
    pub fn is_state_independent(&self, tol: f64) -> bool {
        let d = self.sizes();
        (0..d.x).all(|x| {
            let first = self.transition.row(x * d.s);
            (1..d.s).all(|s| {
                self.transition
                    .row(x * d.s + s)
                    .iter()
                    .zip(first)
                    .all(|(a, b)| (a - b).abs() <= tol)
            })
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelSizes {
    pub s: usize,
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

/// Auxiliary input law `p(u)` and encoder map `p(x|u,s)`. `U` is independent
/// of `S` by construction: the strategy carries no joint law with the state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShannonStrategy {
    u_dist: Vec<f64>,
    /// inputs `(U,S)`, output `X`
    map: Kernel,
}

impl ShannonStrategy {
    pub fn new(u_dist: Vec<f64>, map: Kernel) -> Result<Self> {
        let ins: Vec<&str> = map.inputs().iter().map(|a| a.name.as_str()).collect();
        let outs: Vec<&str> = map.outputs().iter().map(|a| a.name.as_str()).collect();
        if ins != [U, S] || outs != [X] {
            return domain("strategy kernel must map (U,S) to X");
        }
        if map.inputs()[0].size != u_dist.len() {
            return domain("p(u) does not match the auxiliary alphabet");
        }
        let u = JointTable::with_tolerance(
            vec![map.inputs()[0].clone()],
            u_dist,
            FILE_TOLERANCE,
        )?;
        Ok(ShannonStrategy {
            u_dist: u.probs().to_vec(),
            map,
        })
    }

    /// Strategy with a deterministic encoder `x = f(u, s)`.
    pub fn deterministic(
        u_dist: Vec<f64>,
        s_size: usize,
        x_size: usize,
        f: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let u_size = u_dist.len();
        let map = Kernel::from_fn(
            vec![Alphabet::new(U, u_size)?, Alphabet::new(S, s_size)?],
            vec![Alphabet::new(X, x_size)?],
            |i, o| if f(i[0], i[1]) == o[0] { 1.0 } else { 0.0 },
        )?;
        Self::new(u_dist, map)
    }

    /// Strategy from raw `p(u)` and row-major `p(x|u,s)` (index `(u*|S| + s)*|X| + x`).
    pub fn from_parts(u_dist: Vec<f64>, s_size: usize, x_size: usize, map: Vec<f64>) -> Result<Self> {
        let kernel = Kernel::with_tolerance(
            vec![Alphabet::new(U, u_dist.len())?, Alphabet::new(S, s_size)?],
            vec![Alphabet::new(X, x_size)?],
            map,
            FILE_TOLERANCE,
        )?;
        Self::new(u_dist, kernel)
    }

    pub fn u_dist(&self) -> &[f64] {
        &self.u_dist
    }

    pub fn u_size(&self) -> usize {
        self.u_dist.len()
    }

    pub fn map(&self) -> &Kernel {
        &self.map
    }

    /// `p(x|u,s)`.
    pub fn prob(&self, u: usize, s: usize, x: usize) -> f64 {
        let s_size = self.map.inputs()[1].size;
        self.map.row(u * s_size + s)[x]
    }
}

/// Joint law of `(U,S,X,Y,Z)`: `p(u) p(s) p(x|u,s) p(y,z|x,s)`.
pub fn induce_joint(ch: &WiretapChannel, strat: &ShannonStrategy) -> Result<JointTable> {
    let d = ch.sizes();
    let m = strat.map();
    if m.inputs()[1].size != d.s || m.outputs()[0].size != d.x {
        return domain(format!(
            "strategy is for |S|={}, |X|={} but the channel has |S|={}, |X|={}",
            m.inputs()[1].size,
            m.outputs()[0].size,
            d.s,
            d.x
        ));
    }
    let nu = strat.u_size();
    let yz = d.y * d.z;
    let mut probs = vec![0.0; nu * d.s * d.x * yz];
    for u in 0..nu {
        let pu = strat.u_dist()[u];
        for s in 0..d.s {
            let pus = pu * ch.state_dist()[s];
            let xrow = m.row(u * d.s + s);
            for x in 0..d.x {
                let w = pus * xrow[x];
                let base = ((u * d.s + s) * d.x + x) * yz;
                let chrow = ch.transition().row(x * d.s + s);
                for (cell, &q) in probs[base..base + yz].iter_mut().zip(chrow) {
                    *cell = w * q;
                }
            }
        }
    }
    JointTable::with_tolerance(
        vec![
            Alphabet::new(U, nu)?,
            Alphabet::new(S, d.s)?,
            Alphabet::new(X, d.x)?,
            Alphabet::new(Y, d.y)?,
            Alphabet::new(Z, d.z)?,
        ],
        probs,
        1e-9,
    )
}

/// Channel whose legitimate output is the pair `(S, Y)` (state also known at
/// the decoder). The new `Y` symbol for `(s, y)` is `s*|Y| + y`.
pub fn two_sided_reduction(ch: &WiretapChannel) -> Result<WiretapChannel> {
    let d = ch.sizes();
    let sizes = ChannelSizes {
        y: d.s * d.y,
        ..d
    };
    WiretapChannel::from_fn(sizes, ch.state_dist().to_vec(), |x, s, ys, z| {
        let (s_seen, y) = (ys / d.y, ys % d.y);
        if s_seen == s {
            ch.prob(x, s, y, z)
        } else {
            0.0
        }
    })
}

/// The binary (and one ternary) examples used to check the rate formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// `Y = X⊕S`, `Z = X`.
    Ex1,
    /// `Y = X`, `Z = X⊕S`.
    Ex2,
    /// `Y = X`, `Z = X⊕S⊕Φ`.
    Ex3,
    /// `Y = X⊕S⊕Ψ`, `Z = X⊕S⊕Φ`, realized as `Z = Y⊕Φ'` when `εψ ≤ εφ`.
    Ex4,
    /// State-independent ternary channel with `Z` a degraded version of `Y`.
    Ex5,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::Ex1, Preset::Ex2, Preset::Ex3, Preset::Ex4, Preset::Ex5];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Ex1 => "ex1",
            Preset::Ex2 => "ex2",
            Preset::Ex3 => "ex3",
            Preset::Ex4 => "ex4",
            Preset::Ex5 => "ex5",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown preset {s:?} (expected ex1..ex5)")))
    }
}

impl std::fmt::Display for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Crossover parameters of the presets: `P(S=1)`, `P(Φ=1)`, `P(Ψ=1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PresetParams {
    pub eps_s: f64,
    pub eps_phi: f64,
    pub eps_psi: f64,
}

impl Default for PresetParams {
    fn default() -> Self {
        PresetParams {
            eps_s: 0.3,
            eps_phi: 0.2,
            eps_psi: 0.1,
        }
    }
}

fn bit(p: f64, b: usize) -> f64 {
    if b == 1 {
        p
    } else {
        1.0 - p
    }
}

/// Ternary symmetric crossover: stays with probability `1-e`, else moves to
/// one of the two other symbols uniformly.
fn ternary_symmetric(e: f64, from: usize, to: usize) -> f64 {
    if from == to {
        1.0 - e
    } else {
        e / 2.0
    }
}

/// Bob's ternary channel in `ex5`: symbol 0 is clean, symbols 1 and 2 swap
/// with probability `e`.
fn ex5_bob(e: f64, x: usize, y: usize) -> f64 {
    match (x, y) {
        (0, 0) => 1.0,
        (0, _) | (_, 0) => 0.0,
        (a, b) if a == b => 1.0 - e,
        _ => e,
    }
}

/// Channel and canonical strategy of a preset.
///
/// The canonical strategy is `X = U⊕S` with `U ~ Bern(1/2)` for `ex1`..`ex4`
/// and `X = U` with `U` uniform for `ex5`.
pub fn preset(which: Preset, params: PresetParams) -> Result<(WiretapChannel, ShannonStrategy)> {
    for (name, v) in [
        ("eps_s", params.eps_s),
        ("eps_phi", params.eps_phi),
        ("eps_psi", params.eps_psi),
    ] {
        if !(0.0..=0.5).contains(&v) {
            return domain(format!("{name} = {v} must lie in [0, 0.5]"));
        }
    }
    let PresetParams {
        eps_s,
        eps_phi,
        eps_psi,
    } = params;
    let binary = ChannelSizes {
        s: 2,
        x: 2,
        y: 2,
        z: 2,
    };
    let ps = vec![1.0 - eps_s, eps_s];
    let ch = match which {
        Preset::Ex1 => WiretapChannel::from_fn(binary, ps, |x, s, y, z| {
            f64::from(u8::from(y == x ^ s && z == x))
        })?,
        Preset::Ex2 => WiretapChannel::from_fn(binary, ps, |x, s, y, z| {
            f64::from(u8::from(y == x && z == x ^ s))
        })?,
        Preset::Ex3 => WiretapChannel::from_fn(binary, ps, |x, s, y, z| {
            if y == x {
                bit(eps_phi, z ^ x ^ s)
            } else {
                0.0
            }
        })?,
        Preset::Ex4 => {
            if eps_psi <= eps_phi {
                let delta = if eps_psi >= 0.5 {
                    0.0
                } else {
                    (eps_phi - eps_psi) / (1.0 - 2.0 * eps_psi)
                };
                WiretapChannel::from_fn(binary, ps, |x, s, y, z| {
                    bit(eps_psi, y ^ x ^ s) * bit(delta, z ^ y)
                })?
            } else {
                WiretapChannel::from_fn(binary, ps, |x, s, y, z| {
                    bit(eps_psi, y ^ x ^ s) * bit(eps_phi, z ^ x ^ s)
                })?
            }
        }
        Preset::Ex5 => {
            let ternary = ChannelSizes {
                s: 2,
                x: 3,
                y: 3,
                z: 3,
            };
            WiretapChannel::from_fn(ternary, ps, |x, _s, y, z| {
                ex5_bob(eps_psi, x, y) * ternary_symmetric(eps_phi, y, z)
            })?
        }
    };
    let strat = match which {
        Preset::Ex5 => ShannonStrategy::deterministic(vec![1.0 / 3.0; 3], 2, 3, |u, _| u)?,
        _ => ShannonStrategy::deterministic(vec![0.5, 0.5], 2, 2, |u, s| u ^ s)?,
    };
    Ok((ch, strat))
}

/// File form of a channel: either explicit tables or a named preset.
///
/// ```json
/// { "s_size": 2, "x_size": 2, "y_size": 2, "z_size": 2,
///   "state_dist": [0.7, 0.3],
///   "transition": [ ... ] }
/// ```
///
/// `transition` is `p(y,z|x,s)` flattened row-major over `(x, s, y, z)`,
/// i.e. entry `((x*|S| + s)*|Y| + y)*|Z| + z`. The preset form is
/// `{ "preset": "ex3", "eps_s": 0.2, "eps_phi": 0.3 }`. Each `(x,s)` row and
/// `state_dist` must sum to 1 within 1e-9.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_psi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_dist: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition: Option<Vec<f64>>,
}

/// A loaded channel, plus the canonical strategy when it came from a preset.
#[derive(Clone, Debug)]
pub struct LoadedChannel {
    pub channel: WiretapChannel,
    pub canonical: Option<ShannonStrategy>,
    pub preset: Option<(Preset, PresetParams)>,
}

impl ChannelSpec {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            let line = text.lines().nth(e.line().saturating_sub(1)).unwrap_or("");
            Error::Parse(format!(
                "line {}, column {}: {e}\n  | {}",
                e.line(),
                e.column(),
                line.trim_end()
            ))
        })
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn for_preset(which: Preset, params: PresetParams) -> Self {
        ChannelSpec {
            preset: Some(which.name().to_string()),
            eps_s: Some(params.eps_s),
            eps_phi: Some(params.eps_phi),
            eps_psi: Some(params.eps_psi),
            ..Default::default()
        }
    }

    pub fn load(&self) -> Result<LoadedChannel> {
        let explicit = self.s_size.is_some()
            || self.x_size.is_some()
            || self.y_size.is_some()
            || self.z_size.is_some()
            || self.state_dist.is_some()
            || self.transition.is_some();
        match (&self.preset, explicit) {
            (Some(_), true) => Err(Error::Parse(
                "a channel file gives either a preset or explicit tables, not both".into(),
            )),
            (Some(name), false) => {
                let which: Preset = name.parse().map_err(|e: Error| Error::Parse(e.to_string()))?;
                let defaults = PresetParams::default();
                let params = PresetParams {
                    eps_s: self.eps_s.unwrap_or(defaults.eps_s),
                    eps_phi: self.eps_phi.unwrap_or(defaults.eps_phi),
                    eps_psi: self.eps_psi.unwrap_or(defaults.eps_psi),
                };
                let (channel, strat) = preset(which, params)?;
                Ok(LoadedChannel {
                    channel,
                    canonical: Some(strat),
                    preset: Some((which, params)),
                })
            }
            (None, _) => {
                if self.eps_s.is_some() || self.eps_phi.is_some() || self.eps_psi.is_some() {
                    return Err(Error::Parse("eps parameters only apply to presets".into()));
                }
                let need = |v: Option<usize>, name: &str| {
                    v.ok_or_else(|| Error::Parse(format!("missing field {name}")))
                };
                let sizes = ChannelSizes {
                    s: need(self.s_size, "s_size")?,
                    x: need(self.x_size, "x_size")?,
                    y: need(self.y_size, "y_size")?,
                    z: need(self.z_size, "z_size")?,
                };
                let state_dist = self
                    .state_dist
                    .clone()
                    .ok_or_else(|| Error::Parse("missing field state_dist".into()))?;
                let transition = self
                    .transition
                    .clone()
                    .ok_or_else(|| Error::Parse("missing field transition".into()))?;
                let kernel = Kernel::with_tolerance(
                    vec![Alphabet::new(X, sizes.x)?, Alphabet::new(S, sizes.s)?],
                    vec![Alphabet::new(Y, sizes.y)?, Alphabet::new(Z, sizes.z)?],
                    transition,
                    FILE_TOLERANCE,
                )?;
                Ok(LoadedChannel {
                    channel: WiretapChannel::new(state_dist, kernel)?,
                    canonical: None,
                    preset: None,
                })
            }
        }
    }

    /// Explicit-table form of an in-memory channel.
    pub fn from_channel(ch: &WiretapChannel) -> Self {
        let d = ch.sizes();
        ChannelSpec {
            s_size: Some(d.s),
            x_size: Some(d.x),
            y_size: Some(d.y),
            z_size: Some(d.z),
            state_dist: Some(ch.state_dist().to_vec()),
            transition: Some(ch.transition().probs().to_vec()),
            ..Default::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(eps_s: f64, eps_phi: f64, eps_psi: f64) -> PresetParams {
        PresetParams {
            eps_s,
            eps_phi,
            eps_psi,
        }
    }

    #[test]
    fn ex1_canonical_strategy_makes_bob_noiseless() {
        let (ch, strat) = preset(Preset::Ex1, params(0.3, 0.0, 0.0)).unwrap();
        let j = induce_joint(&ch, &strat).unwrap();
        assert_abs_diff_eq!(j.mutual_information(&[U], &[Y], &[]).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(j.probs().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        // Z = X
        assert_abs_diff_eq!(j.conditional_entropy(&[Z], &[X]).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(j.conditional_entropy(&[X], &[Z]).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn joint_factorizes() {
        let (ch, strat) = preset(Preset::Ex3, params(0.2, 0.3, 0.0)).unwrap();
        let j = induce_joint(&ch, &strat).unwrap();
        let us = j.marginal(&[U, S]).unwrap();
        for u in 0..2 {
            for s in 0..2 {
                assert_abs_diff_eq!(
                    us.get(&[u, s]),
                    strat.u_dist()[u] * ch.state_dist()[s],
                    epsilon = 1e-15
                );
            }
        }
        let s = j.marginal(&[S]).unwrap();
        assert_abs_diff_eq!(s.probs()[1], 0.2, epsilon = 1e-15);
    }

    #[test]
    fn point_mass_state_has_no_entropy() {
        let (ch, strat) = preset(Preset::Ex2, params(0.0, 0.0, 0.0)).unwrap();
        let j = induce_joint(&ch, &strat).unwrap();
        assert_eq!(j.entropy(&[S]).unwrap(), 0.0);
        // Z = X = Y
        assert_abs_diff_eq!(j.conditional_entropy(&[Z], &[Y]).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn ex4_is_physically_degraded() {
        let (ch, strat) = preset(Preset::Ex4, params(0.3, 0.2, 0.1)).unwrap();
        let j = induce_joint(&ch, &strat).unwrap();
        assert!(j.mutual_information(&[X], &[Z], &[Y]).unwrap() <= 1e-9);
        // marginal crossovers match the additive-noise description
        let xsz = j.marginal(&[X, S, Z]).unwrap();
        let flip: f64 = (0..2)
            .flat_map(|x| (0..2).map(move |s| (x, s)))
            .map(|(x, s)| xsz.get(&[x, s, 1 ^ x ^ s]))
            .sum();
        assert_abs_diff_eq!(flip, 0.2, epsilon = 1e-12);
    }

    #[test]
    fn two_sided_reduction_reveals_state() {
        let (ch, strat) = preset(Preset::Ex1, params(0.3, 0.0, 0.0)).unwrap();
        let red = two_sided_reduction(&ch).unwrap();
        assert_eq!(red.sizes().y, 4);
        let j = induce_joint(&red, &strat).unwrap();
        assert_abs_diff_eq!(j.conditional_entropy(&[S], &[U, Y]).unwrap(), 0.0, epsilon = 1e-12);

        let (ch0, strat0) = preset(Preset::Ex3, params(0.0, 0.3, 0.0)).unwrap();
        let a = induce_joint(&ch0, &strat0).unwrap();
        let b = induce_joint(&two_sided_reduction(&ch0).unwrap(), &strat0).unwrap();
        assert_abs_diff_eq!(
            a.mutual_information(&[U], &[Y], &[]).unwrap(),
            b.mutual_information(&[U], &[Y], &[]).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn preset_validation() {
        assert!("ex9".parse::<Preset>().is_err());
        assert!(preset(Preset::Ex1, params(0.7, 0.0, 0.0)).is_err());
        let (ch5, s5) = preset(Preset::Ex5, PresetParams::default()).unwrap();
        assert!(ch5.is_state_independent(0.0));
        assert_eq!(s5.u_size(), 3);
        let j = induce_joint(&ch5, &s5).unwrap();
        assert!(j.mutual_information(&[X], &[Z], &[Y]).unwrap() <= 1e-9);
    }

    #[test]
    fn incompatible_strategy_is_rejected() {
        let (ch5, _) = preset(Preset::Ex5, PresetParams::default()).unwrap();
        let (_, s1) = preset(Preset::Ex1, PresetParams::default()).unwrap();
        assert!(induce_joint(&ch5, &s1).is_err());
    }

    #[test]
    fn spec_file_round_trip_and_errors() {
        let (ch, _) = preset(Preset::Ex3, params(0.2, 0.3, 0.0)).unwrap();
        let text = serde_json::to_string_pretty(&ChannelSpec::from_channel(&ch)).unwrap();
        let back = ChannelSpec::from_json_str(&text).unwrap().load().unwrap();
        assert_eq!(back.channel, ch);

        let p = ChannelSpec::from_json_str(r#"{"preset": "ex4", "eps_phi": 0.25}"#)
            .unwrap()
            .load()
            .unwrap();
        assert_eq!(p.preset.unwrap().1.eps_phi, 0.25);

        let bad = "{\n  \"s_size\": 2,\n  \"x_size\": oops\n}";
        match ChannelSpec::from_json_str(bad) {
            Err(Error::Parse(msg)) => assert!(msg.contains("line 3"), "{msg}"),
            other => panic!("expected parse error, got {other:?}"),
        }
        let unnormalized = r#"{"s_size":1,"x_size":1,"y_size":1,"z_size":2,
            "state_dist":[1.0],"transition":[0.5,0.6]}"#;
        assert!(ChannelSpec::from_json_str(unnormalized).unwrap().load().is_err());
        let both = r#"{"preset":"ex1","s_size":2}"#;
        assert!(ChannelSpec::from_json_str(both).unwrap().load().is_err());
    }
}
