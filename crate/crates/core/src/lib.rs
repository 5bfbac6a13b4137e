//! Numerics for the eigenvalues of products of independent complex Gaussian
//! matrices: Meijer G-function evaluation, radial distributions, samplers,
//! hole and overcrowding probabilities.

pub mod ensemble;
pub mod error;
pub mod hole;
pub mod logprob;
pub mod overcrowd;
pub mod quad;
pub mod sampler;
pub mod special_fn;
pub mod validate;

pub use ensemble::{ComplexPoint, EnsembleParams, Size};
pub use error::{Error, Result};
pub use logprob::LogProb;
pub use special_fn::{GEvalResult, MeijerGConfig};

/// Library version tag embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
