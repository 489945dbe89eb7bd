//! Secrecy over wiretap channels whose state is known causally at the
//! encoder: information measures, achievable-rate expressions, a block-Markov
//! code built on Shannon strategies, and leakage evaluation.

pub mod channel;
pub mod codec;
pub mod error;
pub mod eval;
pub mod prob;
pub mod rates;
pub mod seed;
pub mod verify;

pub use error::{Error, Result};
