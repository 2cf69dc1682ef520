//! Lossy compression of Bernoulli(1/2) sources with LDGM codes.
//!
//! The encoder runs message passing over a Markov random field on
//! generalized codewords (assignments over `{0, 1, *}`), then decimates:
//! high-bias information bits are fixed, the code is reduced, and message
//! passing resumes on the residual code. Decoding is the sparse product
//! `y_hat = A x` over GF(2).

pub mod bench;
pub mod cli;
pub mod code;
pub mod decimate;
pub mod error;
pub mod genword;
pub mod mp;
pub mod mrf;

pub use code::{decode, distortion, generate_code, DegreeDistribution, LdgmCode, ReducedCode};
pub use decimate::{encode, CleanupRule, DecimationPolicy, EncodeStats, Pseudomarginal};
pub use error::{Contradiction, Error, Result};
pub use genword::{Assignment, Symbol};
pub use mp::{MessageState, MpParams};
pub use mrf::Weights;
