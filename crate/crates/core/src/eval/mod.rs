//! What the coding theorems bound, measured: error frequencies, the security
//! index, exact and plug-in leakage, and the four-term leakage bound.

mod leakage;
mod plugin;
mod report;
mod security;

pub use leakage::{
    ensemble_leakage, exact_leakage, key_security_index, leakage_decomposition, mutual_information_2d,
    LeakageTerms, DEFAULT_ENUMERATION_CAP,
};
pub use plugin::{
    plugin_from_transcripts, plugin_leakage, PluginEstimate, Quantizer, DEFAULT_MIN_SAMPLES,
};
pub use report::{
    measure, simulate, simulate_runs, Leakage, LeakageMethod, SimConfig, SimReport,
    UNION_BOUND_SLACK,
};
pub use security::{security_index, security_index_parts};
