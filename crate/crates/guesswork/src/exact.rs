//! Ground-truth guesswork by full enumeration: every word's probability is
//! formed, the list is sorted in decreasing order, and the expected rank is
//! accumulated. This is the correctness oracle for every estimator in the
//! crate.

use rayon::prelude::*;

use crate::enumerate::{collect_log_products, WordModel};
use crate::error::{Error, Result};
use crate::estimate::{EstimateParams, GuessworkEstimate, Method};
use crate::logsum::CompensatedSum;
use crate::model::{MarkovSource, SymbolDistribution};

/// Default ceiling on the number of enumerated products.
pub const DEFAULT_ENUM_CAP: u64 = 100_000_000;

/// Zero-order guesswork, G = (n^m + 1) / 2, in log domain.
pub fn guesswork_uniform(n: usize, m: u32) -> GuessworkEstimate {
    let log_nm = m as f64 * (n as f64).ln();
    // ln((n^m + 1)/2) = m ln n + ln(1 + n^-m) - ln 2
    let log_g = log_nm + (-log_nm).exp().ln_1p() - std::f64::consts::LN_2;
    GuessworkEstimate::new(log_g, Method::Exact, EstimateParams::new(n, m))
}

/// First-order guesswork by full enumeration of all n^m products.
pub fn guesswork_exact_first(dist: &SymbolDistribution, m: u32) -> Result<GuessworkEstimate> {
    guesswork_exact_first_capped(dist, m, DEFAULT_ENUM_CAP)
}

pub fn guesswork_exact_first_capped(
    dist: &SymbolDistribution,
    m: u32,
    cap: u64,
) -> Result<GuessworkEstimate> {
    let total = checked_word_count(dist.len(), m, cap)?;
    let mut scratch = Vec::new();
    let model = WordModel::first(dist.probs(), &mut scratch);
    let logs = collect_log_products(&model, m, total);
    let log_g = rank_weighted_sum(logs);
    Ok(GuessworkEstimate::new(
        log_g,
        Method::Exact,
        EstimateParams::new(dist.len(), m),
    ))
}

/// Second-order guesswork by full enumeration. Zero-probability words sort
/// after every positive-probability word and contribute nothing.
pub fn guesswork_exact_second(source: &MarkovSource, m: u32) -> Result<GuessworkEstimate> {
    guesswork_exact_second_capped(source, m, DEFAULT_ENUM_CAP)
}

pub fn guesswork_exact_second_capped(
    source: &MarkovSource,
    m: u32,
    cap: u64,
) -> Result<GuessworkEstimate> {
    let total = checked_word_count(source.len(), m, cap)?;
    let model = WordModel::second(source.initial(), source.transitions());
    let logs = collect_log_products(&model, m, total);
    let log_g = rank_weighted_sum(logs);
    Ok(GuessworkEstimate::new(
        log_g,
        Method::Exact,
        EstimateParams::new(source.len(), m),
    ))
}

/// Whether n^m products fit under an enumeration cap.
pub fn within_enumeration_cap(n: usize, m: u32, cap: u64) -> bool {
    checked_word_count(n, m, cap).is_ok()
}

/// n^m when it stays at or below the cap, as an error otherwise.
pub(crate) fn checked_word_count(n: usize, m: u32, cap: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::ZeroLength);
    }
    let log_total = m as f64 * (n as f64).ln();
    if log_total > (cap as f64).ln() + 1e-9 {
        return Err(Error::EnumerationCapExceeded {
            required: log_total.exp(),
            cap: cap as f64,
        });
    }
    let mut total = 1u64;
    for _ in 0..m {
        total = total.saturating_mul(n as u64);
    }
    if total > cap {
        return Err(Error::EnumerationCapExceeded {
            required: total as f64,
            cap: cap as f64,
        });
    }
    Ok(total)
}

/// Sorts log-products in decreasing probability order and accumulates
/// Σ p·rank with compensation. Ranks stay exact in f64 up to the cap.
fn rank_weighted_sum(mut logs: Vec<f64>) -> f64 {
    logs.par_sort_unstable_by(|a, b| b.total_cmp(a));
    let mut sum = CompensatedSum::new();
    for (r, &lp) in logs.iter().enumerate() {
        if lp == f64::NEG_INFINITY {
            break; // zero-probability tail contributes nothing
        }
        sum.add(lp.exp() * (r + 1) as f64);
    }
    sum.value().ln()
}
