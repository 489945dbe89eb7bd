//! The block-Markov coding machine: bin-partitioned random codebooks, a
//! causal stochastic encoder, Slepian-Wolf reconciliation of the previous
//! block's state, a key hash on that state, a one-time pad, and maximum
//! likelihood decoders.
//!
//! Indices are 0-based throughout: a message set `[1:K]` is `0..K` here.

mod codebook;
mod decoder;
mod encoder;
mod hashing;
mod markov;
mod otp;

pub use codebook::{generate_codebook, BinIndex, CodeRates, Codebook, DEFAULT_CODEBOOK_CAP};
pub use decoder::{ml_decode, sw_decode, OutputLikelihood, StatePosterior};
pub use encoder::{encode_block, CausalEncoder, StrategySampler};
pub use hashing::{KeyFn, SWCode, SequenceSpace, SEQUENCE_CAP};
pub use markov::{
    run_block_markov, BlockRecord, BlockTranscript, BobEstimate, CodeSystem, Scheme,
};
pub use otp::{otp_decrypt, otp_encrypt};
