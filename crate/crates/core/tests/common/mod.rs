#![allow(dead_code)]

use csi_wiretap::channel::{preset, Preset, PresetParams, ShannonStrategy, WiretapChannel};
use csi_wiretap::prob::{Alphabet, JointTable};
use rand::Rng;

/// Flat Dirichlet(1) sample.
pub fn simplex<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

pub fn random_preset<R: Rng>(rng: &mut R) -> (Preset, PresetParams, WiretapChannel) {
    let which = Preset::ALL[rng.gen_range(0..Preset::ALL.len())];
    let mut eps = || rng.gen_range(0.01..=0.5);
    let params = PresetParams {
        eps_s: eps(),
        eps_phi: eps(),
        eps_psi: eps(),
    };
    let (ch, _) = preset(which, params).expect("preset parameters are in range");
    (which, params, ch)
}

/// A random Shannon strategy with `|U| = |X|·|S|`: random `p(u)` and a
/// random stochastic map `p(x|u,s)`.
pub fn random_strategy<R: Rng>(rng: &mut R, ch: &WiretapChannel) -> ShannonStrategy {
    let d = ch.sizes();
    let nu = d.x * d.s;
    let u = simplex(rng, nu);
    let map: Vec<f64> = (0..nu * d.s).flat_map(|_| simplex(rng, d.x)).collect();
    ShannonStrategy::from_parts(u, d.s, d.x, map).expect("valid strategy")
}

/// Random table over variables named `A`, `B`, `C`, .. with the given sizes.
pub fn random_table<R: Rng>(rng: &mut R, sizes: &[usize]) -> JointTable {
    let names = ["A", "B", "C", "D", "E"];
    let vars = sizes
        .iter()
        .zip(names)
        .map(|(&k, n)| Alphabet::new(n, k).unwrap())
        .collect();
    let cells: usize = sizes.iter().product();
    // sparsify a little so zero cells are exercised
    let w: Vec<f64> = (0..cells)
        .map(|_| if rng.gen_bool(0.15) { 0.0 } else { rng.gen::<f64>() })
        .collect();
    if w.iter().all(|&v| v == 0.0) {
        let mut w = w;
        w[0] = 1.0;
        return JointTable::from_weights(vars, w).unwrap();
    }
    JointTable::from_weights(vars, w).unwrap()
}
