//! Multistart projected-gradient search over Shannon strategies.
//!
//! Every parameter block is a probability simplex. Gradients are forward
//! differences of an objective that renormalizes each block, so perturbed
//! points never leave the domain. Each of the three rate expressions is
//! maximized on its own and the best is kept.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{RateBounds, RateComponents};
use crate::channel::{ShannonStrategy, WiretapChannel, S, U, X, Y, Z};
use crate::error::{resource, Result};
use crate::prob::{entropy_of, Alphabet, JointTable};
use crate::seed::derive_seed;

/// Largest number of free parameters the optimizer accepts.
const PARAM_CAP: usize = 4096;
const FD_STEP: f64 = 1e-7;
const LATTICE_CAP: f64 = 2000.0;

/// Number of compositions of `grid` into `parts` parts.
fn lattice_points(parts: usize, grid: usize) -> f64 {
    // C(grid + parts - 1, parts - 1)
    (1..parts).fold(1.0, |acc, k| acc * (grid + k) as f64 / k as f64)
}

/// Which strategies the search ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyFamily {
    /// Any `p(u)` and any `p(x|u,s)`.
    General,
    /// `X = (U + S) mod |X|` with `|U| = |X|`; only `p(u)` varies.
    Additive,
    /// `X = U` with `|U| = |X|`; only `p(u)` varies.
    Direct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Csi0,
    Csi1,
    Csi2,
}

impl Objective {
    pub const ALL: [Objective; 3] = [Objective::Csi0, Objective::Csi1, Objective::Csi2];

    fn eval(self, c: &RateComponents) -> f64 {
        match self {
            Objective::Csi0 => c.r_csi0(),
            Objective::Csi1 => c.r_csi1(),
            Objective::Csi2 => c.r_csi2(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// `|U|`; `None` picks `|X|·|S|` for the general family and `|X|` otherwise.
    pub u_cardinality: Option<usize>,
    /// Random starting points per objective (on top of the lattice start).
    pub restarts: usize,
    /// Lattice divisions used to scan `p(u)` for the deterministic start.
    pub grid: usize,
    /// Ascent iterations per start.
    pub iterations: usize,
    /// Stop a start once an iteration gains less than this.
    pub tolerance: f64,
    pub seed: u64,
    pub family: StrategyFamily,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            u_cardinality: None,
            restarts: 6,
            grid: 8,
            iterations: 300,
            tolerance: 1e-10,
            seed: 0x5eed,
            family: StrategyFamily::General,
        }
    }
}

impl OptimizerConfig {
    pub fn u_size(&self, ch: &WiretapChannel) -> usize {
        let d = ch.sizes();
        match (self.family, self.u_cardinality) {
            (StrategyFamily::General, Some(k)) => k,
            (StrategyFamily::General, None) => d.x * d.s,
            _ => d.x,
        }
    }
}

/// Result of maximizing the achievable rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    pub value: f64,
    pub objective: Objective,
    pub strategy: ShannonStrategy,
    pub bounds: RateBounds,
}

/// Result of maximizing `I(U;Y) − I(U;Z)` over state-correlated inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperBound {
    pub value: f64,
    /// `I(XS;Z|Y)` under the optimizing input; the bound is only a converse
    /// when this is (numerically) zero.
    pub degradedness_gap: f64,
    pub degraded: bool,
}

type Blocks = Vec<Vec<f64>>;

fn normalized(blocks: &[Vec<f64>]) -> Blocks {
    blocks
        .iter()
        .map(|b| {
            let clipped: Vec<f64> = b.iter().map(|v| v.max(0.0)).collect();
            let total: f64 = clipped.iter().sum();
            if total > 0.0 {
                clipped.iter().map(|v| v / total).collect()
            } else {
                vec![1.0 / b.len() as f64; b.len()]
            }
        })
        .collect()
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, &s) in sorted.iter().enumerate() {
        cumulative += s;
        let t = (cumulative - 1.0) / (i + 1) as f64;
        if s - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

fn random_simplex(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..len).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = draws.iter().sum();
    draws.iter().map(|d| d / total).collect()
}

/// Compositions of `grid` into `parts` nonnegative parts, as simplex points.
fn lattice(parts: usize, grid: usize) -> Vec<Vec<f64>> {
    fn rec(left: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(left - k, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut raw = Vec::new();
    rec(grid, parts, &mut Vec::new(), &mut raw);
    raw.into_iter()
        .map(|c| c.iter().map(|&k| k as f64 / grid as f64).collect())
        .collect()
}

struct Ascent<'a> {
    f: &'a (dyn Fn(&[Vec<f64>]) -> f64 + Sync),
    iterations: usize,
    tolerance: f64,
}

impl Ascent<'_> {
    fn gradient(&self, x: &[Vec<f64>], fx: f64) -> Blocks {
        let mut probe = x.to_vec();
        let mut g: Blocks = x.iter().map(|b| vec![0.0; b.len()]).collect();
        for bi in 0..x.len() {
            for k in 0..x[bi].len() {
                let keep = probe[bi][k];
                probe[bi][k] = keep + FD_STEP;
                g[bi][k] = ((self.f)(&probe) - fx) / FD_STEP;
                probe[bi][k] = keep;
            }
        }
        g
    }

    fn run(&self, start: Blocks) -> (Blocks, f64) {
        let mut x = normalized(&start);
        let mut fx = (self.f)(&x);
        let mut step = 0.05;
        let mut stalled = 0;
        for _ in 0..self.iterations {
            let g = self.gradient(&x, fx);
            let norm = g.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
            if !(norm > 0.0) || !norm.is_finite() {
                break;
            }
            let mut improved = false;
            while step > 1e-12 {
                let cand: Blocks = x
                    .iter()
                    .zip(&g)
                    .map(|(b, gb)| {
                        let moved: Vec<f64> =
                            b.iter().zip(gb).map(|(v, d)| v + step * d / norm).collect();
                        project_simplex(&moved)
                    })
                    .collect();
                let fc = (self.f)(&cand);
                if fc > fx {
                    stalled = if fc - fx < self.tolerance { stalled + 1 } else { 0 };
                    x = cand;
                    fx = fc;
                    step *= 1.5;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved || stalled >= 5 {
                break;
            }
        }
        (x, fx)
    }
}

/// Strategy shape for a given family and cardinality.
struct StrategyShape {
    family: StrategyFamily,
    u: usize,
    s: usize,
    x: usize,
}

impl StrategyShape {
    fn param_count(&self) -> usize {
        match self.family {
            StrategyFamily::General => self.u + self.u * self.s * self.x,
            _ => self.u,
        }
    }

    /// `p(x|u,s)` as one flat row-major vector.
    fn map(&self, blocks: &[Vec<f64>]) -> Vec<f64> {
        match self.family {
            StrategyFamily::General => blocks[1..].iter().flatten().copied().collect(),
            StrategyFamily::Additive | StrategyFamily::Direct => {
                let mut m = vec![0.0; self.u * self.s * self.x];
                for u in 0..self.u {
                    for s in 0..self.s {
                        let x = match self.family {
                            StrategyFamily::Additive => (u + s) % self.x,
                            _ => u,
                        };
                        m[(u * self.s + s) * self.x + x] = 1.0;
                    }
                }
                m
            }
        }
    }

    fn strategy(&self, blocks: &[Vec<f64>]) -> Result<ShannonStrategy> {
        ShannonStrategy::from_parts(blocks[0].clone(), self.s, self.x, self.map(blocks))
    }

    /// Uniform `p(u)` with the `u`-th deterministic encoder `s -> x`
    /// (encoders enumerated in base `|X|`).
    fn deterministic_start(&self, pu: Vec<f64>) -> Blocks {
        let mut blocks = vec![pu];
        if self.family == StrategyFamily::General {
            let functions = (self.x as u128).pow(self.s as u32);
            for u in 0..self.u {
                let mut code = (u as u128) % functions;
                let mut rows = vec![vec![0.0; self.x]; self.s];
                for row in rows.iter_mut() {
                    row[(code % self.x as u128) as usize] = 1.0;
                    code /= self.x as u128;
                }
                blocks.extend(rows);
            }
        }
        blocks
    }

    fn random_start(&self, rng: &mut ChaCha8Rng) -> Blocks {
        let mut blocks = vec![random_simplex(rng, self.u)];
        if self.family == StrategyFamily::General {
            for _ in 0..self.u * self.s {
                blocks.push(random_simplex(rng, self.x));
            }
        }
        blocks
    }

    /// Pads a smaller strategy with zero-probability symbols.
    fn embed(&self, strat: &ShannonStrategy) -> Blocks {
        let mut pu = strat.u_dist().to_vec();
        pu.resize(self.u, 0.0);
        let mut blocks = vec![pu];
        if self.family == StrategyFamily::General {
            for u in 0..self.u {
                for s in 0..self.s {
                    let row = if u < strat.u_size() {
                        (0..self.x).map(|x| strat.prob(u, s, x)).collect()
                    } else {
                        vec![1.0 / self.x as f64; self.x]
                    };
                    blocks.push(row);
                }
            }
        }
        blocks
    }
}

/// Joint of `(U,S,X,Y,Z)` from `p(u|s)` (one row per state, or a single
/// shared row when `U` is independent of `S`) and flat `p(x|u,s)`.
fn joint_of(ch: &WiretapChannel, pu_given_s: &[Vec<f64>], map: &[f64]) -> JointTable {
    let d = ch.sizes();
    let nu = pu_given_s[0].len();
    let yz = d.y * d.z;
    let mut probs = vec![0.0; nu * d.s * d.x * yz];
    for u in 0..nu {
        for s in 0..d.s {
            let row = if pu_given_s.len() == 1 { 0 } else { s };
            let pus = pu_given_s[row][u] * ch.state_dist()[s];
            if pus == 0.0 {
                continue;
            }
            for x in 0..d.x {
                let w = pus * map[(u * d.s + s) * d.x + x];
                if w == 0.0 {
                    continue;
                }
                let base = ((u * d.s + s) * d.x + x) * yz;
                let chrow = ch.transition().row(x * d.s + s);
                for (cell, &q) in probs[base..base + yz].iter_mut().zip(chrow) {
                    *cell = w * q;
                }
            }
        }
    }
    let vars = vec![
        Alphabet { name: U.into(), size: nu },
        Alphabet { name: S.into(), size: d.s },
        Alphabet { name: X.into(), size: d.x },
        Alphabet { name: Y.into(), size: d.y },
        Alphabet { name: Z.into(), size: d.z },
    ];
    JointTable::from_weights(vars, probs).expect("joint of a valid strategy")
}

/// `p(u,s,y,z)` with `X` summed out: all the optimizer objectives need.
/// Cheaper to build and query than a labelled [`JointTable`].
struct Compact {
    dims: [usize; 4],
    p: Vec<f64>,
}

impl Compact {
    fn new(ch: &WiretapChannel, pu_given_s: &[Vec<f64>], map: &[f64]) -> Self {
        let d = ch.sizes();
        let nu = pu_given_s[0].len();
        let yz = d.y * d.z;
        let mut p = vec![0.0; nu * d.s * yz];
        let mut total = 0.0;
        for u in 0..nu {
            for s in 0..d.s {
                let row = if pu_given_s.len() == 1 { 0 } else { s };
                let pus = pu_given_s[row][u] * ch.state_dist()[s];
                if pus == 0.0 {
                    continue;
                }
                let base = (u * d.s + s) * yz;
                for x in 0..d.x {
                    let w = pus * map[(u * d.s + s) * d.x + x];
                    if w == 0.0 {
                        continue;
                    }
                    let chrow = ch.transition().row(x * d.s + s);
                    for (cell, &q) in p[base..base + yz].iter_mut().zip(chrow) {
                        *cell += w * q;
                    }
                    total += w;
                }
            }
        }
        if total > 0.0 {
            p.iter_mut().for_each(|v| *v /= total);
        }
        Compact {
            dims: [nu, d.s, d.y, d.z],
            p,
        }
    }

    /// Entropy of the marginal on the axes flagged in `keep` (order U,S,Y,Z).
    fn entropy(&self, keep: [bool; 4]) -> f64 {
        let mut strides = [0usize; 4];
        let mut size = 1;
        for a in (0..4).rev() {
            if keep[a] {
                strides[a] = size;
                size *= self.dims[a];
            }
        }
        let mut m = vec![0.0; size];
        let [nu, ns, ny, nz] = self.dims;
        let mut flat = 0;
        for u in 0..nu {
            for s in 0..ns {
                for y in 0..ny {
                    let head = u * strides[0] + s * strides[1] + y * strides[2];
                    for z in 0..nz {
                        m[head + z * strides[3]] += self.p[flat];
                        flat += 1;
                    }
                }
            }
        }
        entropy_of(&m)
    }

    fn components(&self) -> RateComponents {
        let (t, f) = (true, false);
        let h_u = self.entropy([t, f, f, f]);
        let h_y = self.entropy([f, f, t, f]);
        let h_z = self.entropy([f, f, f, t]);
        let h_uy = self.entropy([t, f, t, f]);
        let h_uz = self.entropy([t, f, f, t]);
        let h_sz = self.entropy([f, t, f, t]);
        let h_usz = self.entropy([t, t, f, t]);
        let h_usy = self.entropy([t, t, t, f]);
        RateComponents {
            i_uy: (h_u + h_y - h_uy).max(0.0),
            i_uz: (h_u + h_z - h_uz).max(0.0),
            i_usz: (h_u + h_sz - h_usz).max(0.0),
            h_s_given_z: (h_sz - h_z).max(0.0),
            h_s_given_uy: (h_usy - h_uy).max(0.0),
        }
    }

    /// `I(U;Y) − I(U;Z)`.
    fn wiretap_rate(&self) -> f64 {
        let (t, f) = (true, false);
        self.entropy([f, f, t, f]) - self.entropy([t, f, t, f]) - self.entropy([f, f, f, t])
            + self.entropy([t, f, f, t])
    }
}

fn best_of(results: Vec<(Blocks, f64)>) -> (Blocks, f64) {
    // first maximum wins: deterministic under seeded ordering
    results
        .into_iter()
        .reduce(|best, r| if r.1 > best.1 { r } else { best })
        .expect("at least one start")
}

fn optimize_at(
    ch: &WiretapChannel,
    cfg: &OptimizerConfig,
    u_size: usize,
    warm: Option<&ShannonStrategy>,
) -> Result<LowerBound> {
    let d = ch.sizes();
    let shape = StrategyShape {
        family: cfg.family,
        u: u_size,
        s: d.s,
        x: d.x,
    };
    if shape.param_count() > PARAM_CAP {
        return resource(format!(
            "{} strategy parameters exceed the optimizer cap of {PARAM_CAP}",
            shape.param_count()
        ));
    }
    let components = |blocks: &[Vec<f64>]| -> RateComponents {
        let b = normalized(blocks);
        Compact::new(ch, &b[..1], &shape.map(&b)).components()
    };

    // lattice scan over p(u) for the deterministic start
    // shrink the lattice until it has at most LATTICE_CAP points
    let mut grid = cfg.grid.max(1);
    while grid > 1 && lattice_points(u_size, grid) > LATTICE_CAP {
        grid -= 1;
    }
    let lattice_start = lattice(u_size, grid)
        .into_iter()
        .map(|pu| shape.deterministic_start(pu))
        .map(|b| {
            let c = components(&b);
            let v = Objective::ALL.iter().map(|o| o.eval(&c)).fold(f64::MIN, f64::max);
            (b, v)
        })
        .reduce(|best, r| if r.1 > best.1 { r } else { best })
        .expect("nonempty lattice")
        .0;

    let mut jobs: Vec<(Objective, Blocks)> = Vec::new();
    for (oi, &obj) in Objective::ALL.iter().enumerate() {
        jobs.push((obj, lattice_start.clone()));
        jobs.push((obj, shape.deterministic_start(vec![1.0 / u_size as f64; u_size])));
        if let Some(w) = warm {
            jobs.push((obj, shape.embed(w)));
        }
        for r in 0..cfg.restarts {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
                cfg.seed,
                "optimizer",
                ((u_size as u64) << 32) | ((oi as u64) << 16) | r as u64,
            ));
            jobs.push((obj, shape.random_start(&mut rng)));
        }
    }

    let results: Vec<(Objective, Blocks, f64)> = jobs
        .into_par_iter()
        .map(|(obj, start)| {
            let f = |b: &[Vec<f64>]| obj.eval(&components(b));
            let ascent = Ascent {
                f: &f,
                iterations: cfg.iterations,
                tolerance: cfg.tolerance,
            };
            let (x, v) = ascent.run(start);
            (obj, x, v)
        })
        .collect();

    let (objective, blocks, _) = results
        .into_iter()
        .reduce(|best, r| if r.2 > best.2 { r } else { best })
        .expect("at least one start");
    let blocks = normalized(&blocks);
    let strategy = shape.strategy(&blocks)?;
    let joint = crate::channel::induce_joint(ch, &strategy)?;
    let bounds = super::rate_components(&joint)?;
    Ok(LowerBound {
        value: bounds.best(),
        objective,
        strategy,
        bounds,
    })
}

/// Maximizes `max(R0, R1, R2)` over the configured strategy family.
///
/// For the general family the search runs at every cardinality from 2 up to
/// the configured `|U|`, each level warm-started from the previous optimum,
/// so the returned value never decreases as `|U|` grows.
pub fn lower_bound(ch: &WiretapChannel, cfg: &OptimizerConfig) -> Result<LowerBound> {
    let target = cfg.u_size(ch);
    if target == 0 {
        return crate::error::domain("u_cardinality must be positive");
    }
    let d = ch.sizes();
    let top = StrategyShape {
        family: cfg.family,
        u: target,
        s: d.s,
        x: d.x,
    };
    if top.param_count() > PARAM_CAP {
        return resource(format!(
            "{} strategy parameters exceed the optimizer cap of {PARAM_CAP}",
            top.param_count()
        ));
    }
    let first = if cfg.family == StrategyFamily::General {
        target.min(2)
    } else {
        target
    };
    let mut best = optimize_at(ch, cfg, first, None)?;
    for k in first + 1..=target {
        let next = optimize_at(ch, cfg, k, Some(&best.strategy))?;
        if next.value >= best.value {
            best = next;
        } else {
            // keep the smaller-cardinality optimum, re-expressed on |U| = k
            let shape = StrategyShape {
                family: cfg.family,
                u: k,
                s: ch.sizes().s,
                x: ch.sizes().x,
            };
            let strategy = shape.strategy(&shape.embed(&best.strategy))?;
            best = LowerBound { strategy, ..best };
        }
    }
    Ok(best)
}

/// Maximizes `I(U;Y) − I(U;Z)` over `p(u|s) p(x|u,s)` (`U` may depend on
/// the state). This is a converse only for channels where `Z` is a degraded
/// version of `Y`; the degradedness gap is reported alongside.
pub fn upper_bound_degraded(ch: &WiretapChannel, cfg: &OptimizerConfig) -> Result<UpperBound> {
    let d = ch.sizes();
    let nu = cfg
        .u_cardinality
        .unwrap_or(d.x * d.s)
        .max(1);
    let params = d.s * nu + nu * d.s * d.x;
    if params > PARAM_CAP {
        return resource(format!(
            "{params} input parameters exceed the optimizer cap of {PARAM_CAP}"
        ));
    }
    let split = |b: &[Vec<f64>]| -> (Blocks, Vec<f64>) {
        let b = normalized(b);
        let pu = b[..d.s].to_vec();
        let map: Vec<f64> = b[d.s..].iter().flatten().copied().collect();
        (pu, map)
    };
    let objective = |b: &[Vec<f64>]| -> f64 {
        let (pu, map) = split(b);
        Compact::new(ch, &pu, &map).wiretap_rate()
    };

    let deterministic = |pu: Vec<f64>| -> Blocks {
        let mut blocks = vec![pu; d.s];
        let functions = (d.x as u128).pow(d.s as u32);
        for u in 0..nu {
            let mut code = (u as u128) % functions;
            let mut rows = vec![vec![0.0; d.x]; d.s];
            for row in rows.iter_mut() {
                row[(code % d.x as u128) as usize] = 1.0;
                code /= d.x as u128;
            }
            blocks.extend(rows);
        }
        blocks
    };
    let mut starts = vec![deterministic(vec![1.0 / nu as f64; nu])];
    for r in 0..cfg.restarts.max(1) * 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, "converse", r as u64));
        let mut blocks: Blocks = (0..d.s).map(|_| random_simplex(&mut rng, nu)).collect();
        blocks.extend((0..nu * d.s).map(|_| random_simplex(&mut rng, d.x)));
        starts.push(blocks);
    }
    let results: Vec<(Blocks, f64)> = starts
        .into_par_iter()
        .map(|start| {
            Ascent {
                f: &objective,
                iterations: cfg.iterations,
                tolerance: cfg.tolerance,
            }
            .run(start)
        })
        .collect();
    let (blocks, value) = best_of(results);
    let (pu, map) = split(&blocks);
    let j = joint_of(ch, &pu, &map);
    let gap = j.merge(&[X, S], "XS")?.mutual_information(&["XS"], &[Z], &[Y])?;
    Ok(UpperBound {
        value: value.max(0.0),
        degradedness_gap: gap,
        degraded: gap <= 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{preset, Preset, PresetParams};
    use crate::prob::h2;

    #[test]
    fn compact_matches_the_labelled_joint() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for which in Preset::ALL {
            let (ch, _) = preset(which, PresetParams::default()).unwrap();
            let d = ch.sizes();
            for nu in 1..=4 {
                let pu: Vec<Vec<f64>> = (0..d.s).map(|_| random_simplex(&mut rng, nu)).collect();
                let map: Vec<f64> = (0..nu * d.s).flat_map(|_| random_simplex(&mut rng, d.x)).collect();
                for rows in [&pu[..1], &pu[..]] {
                    let j = joint_of(&ch, rows, &map);
                    let c = Compact::new(&ch, rows, &map);
                    let (a, b) = (c.components(), RateComponents::from_joint(&j).unwrap());
                    for (x, y) in [
                        (a.i_uy, b.i_uy),
                        (a.i_uz, b.i_uz),
                        (a.i_usz, b.i_usz),
                        (a.h_s_given_z, b.h_s_given_z),
                        (a.h_s_given_uy, b.h_s_given_uy),
                    ] {
                        assert!((x - y).abs() < 1e-12, "{which}: {x} vs {y}");
                    }
                    assert!((c.wiretap_rate() - (b.i_uy - b.i_uz)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn projection_lands_on_simplex() {
        let p = project_simplex(&[0.8, 0.5, -0.2]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|&v| v >= 0.0));
        assert_eq!(project_simplex(&[0.2, 0.8]), vec![0.2, 0.8]);
    }

    #[test]
    fn lattice_counts() {
        assert_eq!(lattice(2, 4).len(), 5);
        assert_eq!(lattice(3, 4).len(), 15);
    }

    #[test]
    fn ex1_reaches_state_entropy() {
        let (ch, _) = preset(Preset::Ex1, PresetParams::default()).unwrap();
        let lb = lower_bound(&ch, &OptimizerConfig::default()).unwrap();
        assert!(lb.value >= h2(0.3) - 1e-2, "{}", lb.value);
        // the returned strategy reproduces the value
        let j = crate::channel::induce_joint(&ch, &lb.strategy).unwrap();
        let again = crate::rates::rate_components(&j).unwrap().best();
        assert!((again - lb.value).abs() < 1e-9);
    }

    #[test]
    fn eve_seeing_bob_output_gives_nothing() {
        // point-mass state, Z = Y
        let (ch, _) = preset(
            Preset::Ex2,
            PresetParams {
                eps_s: 0.0,
                eps_phi: 0.0,
                eps_psi: 0.0,
            },
        )
        .unwrap();
        let lb = lower_bound(&ch, &OptimizerConfig::default()).unwrap();
        assert!(lb.value.abs() < 1e-6, "{}", lb.value);
        let ub = upper_bound_degraded(&ch, &OptimizerConfig::default()).unwrap();
        assert!(ub.value.abs() < 1e-6);
    }

    #[test]
    fn cardinality_cap_is_a_resource_error() {
        let (ch, _) = preset(Preset::Ex1, PresetParams::default()).unwrap();
        let cfg = OptimizerConfig {
            u_cardinality: Some(2000),
            ..Default::default()
        };
        assert!(matches!(lower_bound(&ch, &cfg), Err(crate::Error::Resource(_))));
    }
}
