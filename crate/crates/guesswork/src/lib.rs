//! Guesswork — the expected number of sequential guesses, in decreasing
//! probability order, to identify a word drawn from a probabilistic language
//! model — computed four ways:
//!
//! * [`exact`]: full enumeration of all n^m word probabilities (the oracle);
//! * [`histogram`]: quantification of the log-product range into Δ-wide bins
//!   with rigorous multiplicative error intervals, filled by enumeration,
//!   convolution, a Markov-chain dynamic program, or uniform random
//!   selection with replicated confidence intervals;
//! * [`normal`]: central-limit approximations of the log-product density —
//!   binned, double-integral and erf closed forms, and the asymptotic
//!   leading term n^m·A·B^m·m^{-1/2} with least-squares fitting;
//! * [`bounds`]: the Massey and Arikan lower bounds and the exponential
//!   entropy ansatz.
//!
//! Models of order zero (uniform i.i.d.), one (i.i.d.) and two (first-order
//! Markov digram chains) live in [`model`], including digram-table
//! ingestion, stationary distributions and entropies. All guesswork values
//! are carried in natural-log domain ([`GuessworkEstimate`]) since n^m
//! overflows f64 long before the interesting regime ends.
//!
//! ```
//! use guesswork::{SymbolDistribution, guesswork_exact_first};
//!
//! let d = SymbolDistribution::from_probs(&[0.7, 0.3]).unwrap();
//! let g = guesswork_exact_first(&d, 2).unwrap();
//! assert!((g.value() - 1.90).abs() < 1e-12);
//! ```

#![forbid(unsafe_code)]

mod enumerate;
mod rng;
#[cfg(test)]
mod testdata;

pub mod bounds;
pub mod error;
pub mod estimate;
pub mod exact;
pub mod histogram;
pub mod model;
pub mod normal;
pub mod special;

mod logsum;

pub use bounds::{arikan_lower, entropy_ansatz, massey_lower};
pub use error::{Error, Result};
pub use estimate::{EstimateParams, GuessworkEstimate, Method};
pub use exact::{
    guesswork_exact_first, guesswork_exact_second, guesswork_uniform, DEFAULT_ENUM_CAP,
};
pub use histogram::{
    guesswork_from_histogram, histogram_enumerate, histogram_sample, quantization_interval,
    replicate_estimate, Backend, LogProductHistogram, ModelRef, ReplicateEstimate,
};
pub use model::{
    entropy_order0, entropy_order1, entropy_order2, stationary_distribution, DigramCountTable,
    EntropyValue, MarkovSource, SymbolDistribution,
};
pub use normal::{
    count_moments_analytic, count_moments_sampled, fit_power_law, guesswork_leading_term,
    guesswork_normal_binned, guesswork_normal_closed, guesswork_normal_integral, leading_constants,
    MomentSource, NormalLogModel, PowerLawFit,
};
