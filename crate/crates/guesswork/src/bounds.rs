//! Closed-form comparators: the Massey and Arikan lower bounds and the
//! exponential-entropy ansatz ½(b^H + 1), which matches guesswork exactly in
//! zero order and only there.

use crate::estimate::{EstimateParams, GuessworkEstimate, Method};
use crate::logsum::log_add_exp;
use crate::model::{EntropyValue, SymbolDistribution};

/// Massey's lower bound (1/4)·b^H + 1, applied to an entropy of any order.
///
/// The bound is a theorem only when the word entropy is at least 2 bits;
/// below that it can exceed the true guesswork. It is applied verbatim
/// here, callers decide where to trust it.
pub fn massey_lower(h: &EntropyValue) -> GuessworkEstimate {
    // ln(b^H/4 + 1)
    let log_g = log_add_exp(h.nats() - (4.0f64).ln(), 0.0);
    GuessworkEstimate::new(
        log_g,
        Method::Massey,
        EstimateParams::new(h.alphabet_size, h.word_length),
    )
}

/// Arikan's lower bound [Σ√p_i]^{2m} / (1 + m·ln n) for first-order models.
pub fn arikan_lower(dist: &SymbolDistribution, m: u32) -> GuessworkEstimate {
    let sqrt_sum: f64 = dist.probs().iter().map(|p| p.sqrt()).sum();
    let n = dist.len();
    let log_g = 2.0 * f64::from(m) * sqrt_sum.ln() - (1.0 + f64::from(m) * (n as f64).ln()).ln();
    GuessworkEstimate::new(log_g, Method::Arikan, EstimateParams::new(n, m))
}

/// The exponential-entropy ansatz ½(b^H + 1).
pub fn entropy_ansatz(h: &EntropyValue) -> GuessworkEstimate {
    let log_g = log_add_exp(h.nats(), 0.0) - std::f64::consts::LN_2;
    GuessworkEstimate::new(
        log_g,
        Method::EntropyAnsatz,
        EstimateParams::new(h.alphabet_size, h.word_length),
    )
}
