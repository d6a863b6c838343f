//! Stability bounds for sparse frequency estimation.
//!
//! The crate evaluates a band-limited minorant of `χ_[0,3]`, turns it into
//! lower bounds on the sampled energy of exponential sums with separated or
//! pairwise-colliding frequencies, checks the resulting Vandermonde
//! singular-value bounds, and combines them with a Gaussian noise model into
//! an a posteriori error certificate for estimates produced by ESPRIT.

pub mod bounds;
pub mod error;
pub mod estimation;
pub mod experiments;
pub mod localizing;
pub mod noise;
pub mod scenarios;
pub mod torus;
pub mod vandermonde;

pub use error::{Error, Result};
pub use torus::{ExponentialSum, Frequency, MatchPartition, Origin, SampleGrid};
