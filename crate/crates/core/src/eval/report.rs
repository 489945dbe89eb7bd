//! Monte Carlo runs of the scheme and their summary.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::leakage::{
    ensemble_leakage, exact_leakage, key_security_index, leakage_decomposition, LeakageTerms,
    DEFAULT_ENUMERATION_CAP,
};
use super::plugin::{plugin_from_transcripts, PluginEstimate, Quantizer, DEFAULT_MIN_SAMPLES};
use crate::codec::{run_block_markov, BlockTranscript, CodeRates, Scheme};
use crate::error::{domain, Error, Result};
use crate::rates::RateTuple;
use crate::seed::derive_seed;

/// Slack allowed in the per-block union bound check.
pub const UNION_BOUND_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub runs: usize,
    pub seed: u64,
    /// Code systems averaged for the ensemble leakage figure.
    pub ensemble: u64,
    pub enumeration_cap: usize,
    pub min_plugin_samples: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            runs: 1000,
            seed: 0,
            ensemble: 8,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            min_plugin_samples: DEFAULT_MIN_SAMPLES,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LeakageMethod {
    Exact,
    Plugin,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Leakage {
    pub bits: f64,
    pub method: LeakageMethod,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub runs: usize,
    pub seed: u64,
    pub n: usize,
    pub b: usize,
    pub counts: CodeRates,
    /// Rates realized by the integral counts.
    pub rates: RateTuple,
    pub secret_rate: f64,
    /// `b·R/(b+1)`: the dummy block carries no message.
    pub throughput: f64,
    /// Mean over blocks `1..=b` of the per-block message error frequency.
    pub p_e: f64,
    /// Frequency of runs with a message error in any block.
    pub p_e_any_block: f64,
    pub p_e_per_block: Vec<f64>,
    /// `l̂_j ≠ L_j`
    pub codeword_error_per_block: Vec<f64>,
    /// Bob's `ŝ_{j−1} ≠ s_{j−1}`
    pub reconciliation_error_per_block: Vec<f64>,
    /// `φ(σ(s_{j−1}), u_{j−1}(L_{j−1}), y_{j−1}) ≠ s_{j−1}`
    pub ideal_reconciliation_error_per_block: Vec<f64>,
    pub empty_bin_failures: usize,
    /// `P_e(j) ≤ P(l̂_j ≠ L_j) + P(ŝ_{j−1} ≠ s_{j−1})` held in every block.
    pub union_bound_holds: bool,
    pub causality_violations: usize,
    /// `S(κ(S_1)σ(S_1) | Z_1)` when small enough to enumerate.
    pub security_index: Option<f64>,
    pub leakage: Option<Leakage>,
    pub plugin: Option<PluginEstimate>,
    /// Exact leakage averaged over the seeded code ensemble.
    pub ensemble_leakage: Option<f64>,
    pub decomposition: Option<LeakageTerms>,
}

fn frequency(hits: usize, total: usize) -> f64 {
    hits as f64 / total as f64
}

/// Error statistics and a plug-in leakage estimate from transcripts.
pub fn measure(transcripts: &[BlockTranscript], rates: &CodeRates, seed: u64) -> Result<SimReport> {
    measure_with(transcripts, rates, seed, DEFAULT_MIN_SAMPLES)
}

fn measure_with(
    transcripts: &[BlockTranscript],
    rates: &CodeRates,
    seed: u64,
    min_samples: usize,
) -> Result<SimReport> {
    let Some(first) = transcripts.first() else {
        return domain("at least one transcript required");
    };
    let b = first.blocks.len() - 1;
    if b == 0 || transcripts.iter().any(|t| t.blocks.len() != b + 1) {
        return domain("transcripts must all have the same number of message blocks (≥ 1)");
    }
    let runs = transcripts.len();
    let mut msg = vec![0usize; b];
    let mut cw = vec![0usize; b];
    let mut rec = vec![0usize; b];
    let mut ideal = vec![0usize; b];
    let mut any = 0;
    let mut empty = 0;
    let mut violations = 0;
    for t in transcripts {
        let mut failed = false;
        for j in 1..=b {
            let r = &t.blocks[j];
            if r.message_error() {
                msg[j - 1] += 1;
                failed = true;
            }
            cw[j - 1] += r.codeword_error() as usize;
            rec[j - 1] += t.reconciliation_error(j) as usize;
            ideal[j - 1] += r.ideal_reconciliation_error as usize;
            empty += r.bob.as_ref().is_some_and(|e| e.s_prev_hat.is_none()) as usize;
        }
        any += failed as usize;
        violations += t.causality_violations().len();
    }
    let per = |v: &[usize]| v.iter().map(|&h| frequency(h, runs)).collect::<Vec<_>>();
    let p_e_per_block = per(&msg);
    let codeword_error_per_block = per(&cw);
    let reconciliation_error_per_block = per(&rec);
    let union_bound_holds = (0..b).all(|j| {
        p_e_per_block[j]
            <= codeword_error_per_block[j] + reconciliation_error_per_block[j] + UNION_BOUND_SLACK
    });
    let d_z = first.blocks[1].z.len();
    let z_size = transcripts
        .iter()
        .flat_map(|t| t.blocks.iter().flat_map(|r| r.z.iter()))
        .max()
        .map_or(1, |&m| m as usize + 1);
    let quantizer = Quantizer::for_sequences(z_size, d_z * b, derive_seed(seed, "quantizer", 0));
    let plugin = match plugin_from_transcripts(transcripts, rates, quantizer, min_samples) {
        Ok(p) => Some(p),
        Err(Error::Domain(_)) => None,
        Err(e) => return Err(e),
    };
    let secret_rate = rates.secret_rate();
    Ok(SimReport {
        runs,
        seed,
        n: rates.n,
        b,
        counts: *rates,
        rates: rates.as_tuple(),
        secret_rate,
        throughput: b as f64 * secret_rate / (b + 1) as f64,
        p_e: p_e_per_block.iter().sum::<f64>() / b as f64,
        p_e_any_block: frequency(any, runs),
        p_e_per_block,
        codeword_error_per_block,
        reconciliation_error_per_block,
        ideal_reconciliation_error_per_block: per(&ideal),
        empty_bin_failures: empty,
        union_bound_holds,
        causality_violations: violations,
        security_index: None,
        leakage: plugin.as_ref().map(|p| Leakage {
            bits: p.bits,
            method: LeakageMethod::Plugin,
        }),
        plugin,
        ensemble_leakage: None,
        decomposition: None,
    })
}

/// Turns a resource-cap error into "not computed".
fn optional<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Resource(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// All transcripts of a simulation; run `r` draws from its own seeded
/// stream, so the result does not depend on the number of threads.
pub fn simulate_runs(scheme: &Scheme, runs: usize, seed: u64) -> Vec<BlockTranscript> {
    (0..runs)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "run", r as u64));
            run_block_markov(scheme, &mut rng)
        })
        .collect()
}

/// Runs the scheme `cfg.runs` times and assembles the report; exact
/// quantities are filled in whenever they fit under the enumeration cap.
pub fn simulate(scheme: &Scheme, cfg: &SimConfig) -> Result<SimReport> {
    if cfg.runs == 0 {
        return domain("at least one run required");
    }
    let transcripts = simulate_runs(scheme, cfg.runs, cfg.seed);
    let mut report = measure_with(&transcripts, scheme.rates(), cfg.seed, cfg.min_plugin_samples)?;
    let cap = cfg.enumeration_cap;
    report.security_index = optional(key_security_index(scheme, cap))?;
    if let Some(bits) = optional(exact_leakage(scheme, cap))? {
        report.leakage = Some(Leakage {
            bits,
            method: LeakageMethod::Exact,
        });
        if cfg.ensemble > 0 {
            report.ensemble_leakage = optional(ensemble_leakage(scheme, cfg.seed, cfg.ensemble, cap))?;
        }
    }
    report.decomposition = optional(leakage_decomposition(scheme, cap))?;
    Ok(report)
}
