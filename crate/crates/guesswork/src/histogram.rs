//! Quantification and random-selection estimators: log-products are binned
//! into Δ-wide subranges, guesswork is estimated from the bin counts, and
//! the estimate carries a rigorous multiplicative interval (half a bin per
//! quantization step) plus, for replicated sampling, a statistical one.

use rayon::prelude::*;

use crate::enumerate::{fold_words, WordModel};
use crate::error::{Error, Result};
use crate::estimate::{EstimateParams, GuessworkEstimate, Method};
use crate::exact::{checked_word_count, DEFAULT_ENUM_CAP};
use crate::logsum::{log_add_exp, log_sum_exp};
use crate::model::{MarkovSource, SymbolDistribution};
use crate::rng::{draw_index, substream};

/// The 99 % two-sided normal quantile used by the replicate interval.
pub const CONFIDENCE_LAMBDA: f64 = 2.58;

/// Counts overflow f64 past this many nats of total weight; the enumeration
/// and convolution backends must stay below it (sampling has no such limit,
/// its raw counts are small and only the scale lives in log domain).
const MAX_LINEAR_LOG_TOTAL: f64 = 700.0;

/// A first- or second-order model by reference.
#[derive(Clone, Copy)]
pub enum ModelRef<'a> {
    First(&'a SymbolDistribution),
    Second(&'a MarkovSource),
}

impl<'a> ModelRef<'a> {
    pub fn alphabet_size(&self) -> usize {
        match self {
            ModelRef::First(d) => d.len(),
            ModelRef::Second(s) => s.len(),
        }
    }

    /// (origin, per-word span) of -ln(word probability) for length-m words.
    /// First order: exact bounds from p1 and pn. Second order: the loose
    /// bounds max(p)·max(P)^{m-1} and min(p)·min⁺(P)^{m-1}, taking only
    /// nonzero entries.
    fn log_range(&self, m: u32) -> (f64, f64) {
        match self {
            ModelRef::First(d) => {
                let origin = -(m as f64) * d.p_max().ln();
                (origin, m as f64 * d.log_span())
            }
            ModelRef::Second(s) => {
                let b = s.range_bounds();
                let steps = (m - 1) as f64;
                let origin = -b.p_max.ln() - steps * b.t_max.ln();
                let span =
                    (b.p_max / b.p_min_positive).ln() + steps * (b.t_max / b.t_min_positive).ln();
                (origin, span)
            }
        }
    }
}

/// How the bins get filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Enumerate all n^m products and bin each one (subject to the cap).
    Full,
    /// First order only: bin single symbols, then self-convolve the bin
    /// vector m times (counts of bin-index sums).
    Convolve,
    /// Second order only: dynamic program over (position, last symbol, bin)
    /// with per-step quantization.
    DpChain,
}

impl Backend {
    fn name(self) -> &'static str {
        match self {
            Backend::Full => "full",
            Backend::Convolve => "convolve",
            Backend::DpChain => "dp-chain",
        }
    }
}

/// Binned counts of -ln(word probability).
///
/// Raw counts are kept linear while the scale factor (1 for enumeration,
/// n^m/(m·S) for sampling) lives in log domain, so nothing here overflows
/// even when n^m does.
#[derive(Debug, Clone)]
pub struct LogProductHistogram {
    /// Bin width Δ in nats; 0 in the degenerate single-bin case.
    delta: f64,
    /// Log-domain origin: the lower bound of -ln(word probability).
    origin: f64,
    /// Raw bin counts (length m·N, or 1 when degenerate).
    counts: Vec<f64>,
    /// ln of the factor mapping raw counts to word counts.
    log_scale: f64,
    /// ln(n^m).
    log_total: f64,
    /// Raw count of zero-probability words (second order; scaled like counts).
    zero_count: f64,
    /// Half-bin error steps per word: 1 for full/sample, m for the
    /// per-symbol/per-step backends. The mid-rule representative shifts by
    /// (exponent-1)·Δ/2 accordingly.
    interval_exponent: u32,
    sampled: bool,
    params: EstimateParams,
}

impl LogProductHistogram {
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    pub fn log_total(&self) -> f64 {
        self.log_total
    }

    pub fn zero_count(&self) -> f64 {
        self.zero_count
    }

    pub fn params(&self) -> &EstimateParams {
        &self.params
    }

    /// Multiplicative quantization factor Q = exp(steps·Δ/2) such that the
    /// enumerated G lies within [Q⁻¹, Q]·G^Q for the full backend.
    pub fn quantization_factor(&self) -> f64 {
        (self.interval_exponent as f64 * self.delta / 2.0).exp()
    }

    /// ln(Σ counts + zero_count) + log_scale; equals log_total when mass is
    /// conserved.
    pub fn log_mass(&self) -> f64 {
        let mut s = self.zero_count;
        for &c in &self.counts {
            s += c;
        }
        s.ln() + self.log_scale
    }

    /// Mid-rule representative -ln(probability) for bin j.
    fn representative(&self, j: usize) -> f64 {
        let shift = (self.interval_exponent - 1) as f64 * self.delta / 2.0;
        self.origin + shift + (j as f64 + 0.5) * self.delta
    }
}

/// Builds the histogram by exhaustive construction with the requested
/// backend.
pub fn histogram_enumerate(
    model: ModelRef<'_>,
    m: u32,
    bins_per_symbol: u32,
    backend: Backend,
) -> Result<LogProductHistogram> {
    histogram_enumerate_capped(model, m, bins_per_symbol, backend, DEFAULT_ENUM_CAP)
}

pub fn histogram_enumerate_capped(
    model: ModelRef<'_>,
    m: u32,
    bins_per_symbol: u32,
    backend: Backend,
    cap: u64,
) -> Result<LogProductHistogram> {
    if m == 0 {
        return Err(Error::ZeroLength);
    }
    match (backend, model) {
        (Backend::Full, _) => histogram_full(model, m, bins_per_symbol, cap),
        (Backend::Convolve, ModelRef::First(d)) => histogram_convolve(d, m, bins_per_symbol),
        (Backend::DpChain, ModelRef::Second(s)) => histogram_dp_chain(s, m, bins_per_symbol),
        (b, _) => Err(Error::BackendMismatch { backend: b.name() }),
    }
}

fn base_params(model: ModelRef<'_>, m: u32, bins: u32) -> EstimateParams {
    let mut p = EstimateParams::new(model.alphabet_size(), m);
    p.bins = Some(bins);
    p
}

fn degenerate(
    model: ModelRef<'_>,
    m: u32,
    origin: f64,
    sampled_meta: Option<(u64, u64)>,
) -> LogProductHistogram {
    // Uniform range: every word has the same probability, one bin holds all
    // n^m of them. Stored as a raw count of 1 at scale n^m.
    let n = model.alphabet_size();
    let log_total = m as f64 * (n as f64).ln();
    let mut params = base_params(model, m, 1);
    if let Some((samples, seed)) = sampled_meta {
        params.samples = Some(samples);
        params.seed = Some(seed);
    }
    LogProductHistogram {
        delta: 0.0,
        origin,
        counts: vec![1.0],
        log_scale: log_total,
        log_total,
        zero_count: 0.0,
        interval_exponent: 1,
        sampled: sampled_meta.is_some(),
        params,
    }
}

fn histogram_full(
    model: ModelRef<'_>,
    m: u32,
    bins_per_symbol: u32,
    cap: u64,
) -> Result<LogProductHistogram> {
    let n = model.alphabet_size();
    let (origin, span) = model.log_range(m);
    if span <= 0.0 {
        return Ok(degenerate(model, m, origin, None));
    }
    let total = checked_word_count(n, m, cap)?;
    let nb = (m as usize) * bins_per_symbol as usize;
    let delta = span / nb as f64;

    let mut scratch = Vec::new();
    let word_model = match model {
        ModelRef::First(d) => WordModel::first(d.probs(), &mut scratch),
        ModelRef::Second(s) => WordModel::second(s.initial(), s.transitions()),
    };

    let (counts, zero_count) = fold_words(
        &word_model,
        m,
        total,
        || (vec![0.0f64; nb], 0.0f64),
        |acc: &mut (Vec<f64>, f64), log_p| {
            if log_p == f64::NEG_INFINITY {
                acc.1 += 1.0;
            } else {
                let x = -log_p - origin;
                let j = ((x / delta) as isize).clamp(0, nb as isize - 1) as usize;
                acc.0[j] += 1.0;
            }
        },
        |(mut ca, za), (cb, zb)| {
            for (a, b) in ca.iter_mut().zip(&cb) {
                *a += b;
            }
            (ca, za + zb)
        },
    );

    Ok(LogProductHistogram {
        delta,
        origin,
        counts,
        log_scale: 0.0,
        log_total: m as f64 * (n as f64).ln(),
        zero_count,
        interval_exponent: 1,
        sampled: false,
        params: base_params(model, m, bins_per_symbol),
    })
}

fn histogram_convolve(
    dist: &SymbolDistribution,
    m: u32,
    bins_per_symbol: u32,
) -> Result<LogProductHistogram> {
    let model = ModelRef::First(dist);
    let n = dist.len();
    let log_total = m as f64 * (n as f64).ln();
    if log_total > MAX_LINEAR_LOG_TOTAL {
        return Err(Error::CountOverflow { log_total });
    }
    let (origin, span) = model.log_range(m);
    if span <= 0.0 {
        return Ok(degenerate(model, m, origin, None));
    }
    let big_n = bins_per_symbol as usize;
    let nb = m as usize * big_n;
    let delta = span / nb as f64;

    // single-symbol bin vector over N bins of width Δ
    let mut base = vec![0.0f64; big_n];
    let lp1 = dist.p_max().ln();
    for &p in dist.probs() {
        let x = lp1 - p.ln();
        let j = ((x / delta) as usize).min(big_n - 1);
        base[j] += 1.0;
    }

    // self-convolve m times: counts of bin-index sums
    let mut acc = vec![1.0f64];
    for _ in 0..m {
        let mut out = vec![0.0f64; acc.len() + big_n - 1];
        for (i, &a) in acc.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in base.iter().enumerate() {
                if b != 0.0 {
                    out[i + j] += a * b;
                }
            }
        }
        acc = out;
    }
    acc.resize(nb, 0.0);

    Ok(LogProductHistogram {
        delta,
        origin,
        counts: acc,
        log_scale: 0.0,
        log_total,
        zero_count: 0.0,
        interval_exponent: m,
        sampled: false,
        params: base_params(model, m, bins_per_symbol),
    })
}

fn histogram_dp_chain(
    source: &MarkovSource,
    m: u32,
    bins_per_symbol: u32,
) -> Result<LogProductHistogram> {
    let model = ModelRef::Second(source);
    let n = source.len();
    let log_total = m as f64 * (n as f64).ln();
    if log_total > MAX_LINEAR_LOG_TOTAL {
        return Err(Error::CountOverflow { log_total });
    }
    let (origin, span) = model.log_range(m);
    if span <= 0.0 {
        return Ok(degenerate(model, m, origin, None));
    }
    let nb = m as usize * bins_per_symbol as usize;
    let delta = span / nb as f64;
    let bounds = source.range_bounds();

    // quantized per-step increments; one overflow slot beyond the last bin
    let ln_tmax = bounds.t_max.ln();
    let step_bin: Vec<Vec<Option<usize>>> = source
        .transitions()
        .iter()
        .map(|row| {
            row.iter()
                .map(|&p| {
                    if p > 0.0 {
                        Some(((ln_tmax - p.ln()) / delta) as usize)
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();

    let slots = nb + 1;
    let mut dp = vec![0.0f64; n * slots];
    let ln_pmax = bounds.p_max.ln();
    for (i, &p) in source.initial().iter().enumerate() {
        if p > 0.0 {
            let j = (((ln_pmax - p.ln()) / delta) as usize).min(nb);
            dp[i * slots + j] += 1.0;
        }
    }

    let mut next = vec![0.0f64; n * slots];
    for _ in 1..m {
        next.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            let row = &dp[i * slots..(i + 1) * slots];
            for k in 0..n {
                let Some(s) = step_bin[i][k] else { continue };
                let dst = &mut next[k * slots..(k + 1) * slots];
                for (j, &c) in row.iter().enumerate() {
                    if c != 0.0 {
                        dst[(j + s).min(nb)] += c;
                    }
                }
            }
        }
        std::mem::swap(&mut dp, &mut next);
    }

    let mut counts = vec![0.0f64; nb];
    for i in 0..n {
        for j in 0..nb {
            counts[j] += dp[i * slots + j];
        }
        counts[nb - 1] += dp[i * slots + nb];
    }

    // the DP walks only nonzero paths; the zero-probability word count is
    // the complement of the walked mass
    let walked: f64 = counts.iter().sum();
    let zero_count = (log_total.exp() - walked).max(0.0);

    Ok(LogProductHistogram {
        delta,
        origin,
        counts,
        log_scale: 0.0,
        log_total,
        zero_count,
        interval_exponent: m,
        sampled: false,
        params: base_params(model, m, bins_per_symbol),
    })
}

/// Random-selection histogram: m·S words drawn uniformly under the counting
/// measure (every one of the n^m words equally likely), binned by their true
/// log-products, scaled by n^m/(m·S). Zero-probability words count toward
/// the m·S total but land in no bin.
pub fn histogram_sample(
    model: ModelRef<'_>,
    m: u32,
    bins_per_symbol: u32,
    samples_per_length: u64,
    seed: u64,
) -> Result<LogProductHistogram> {
    histogram_sample_stream(model, m, bins_per_symbol, samples_per_length, seed, 0)
}

pub(crate) fn histogram_sample_stream(
    model: ModelRef<'_>,
    m: u32,
    bins_per_symbol: u32,
    samples_per_length: u64,
    seed: u64,
    stream: u64,
) -> Result<LogProductHistogram> {
    if m == 0 {
        return Err(Error::ZeroLength);
    }
    if samples_per_length == 0 {
        return Err(Error::EmptyInput);
    }
    let n = model.alphabet_size();
    let log_total = m as f64 * (n as f64).ln();
    let draws = m as u64 * samples_per_length;
    let (origin, span) = model.log_range(m);
    if span <= 0.0 {
        // every sampled word lands in the single bin; the scaled count is
        // n^m exactly, so skip the draws entirely
        return Ok(degenerate(
            model,
            m,
            origin,
            Some((samples_per_length, seed)),
        ));
    }
    let nb = m as usize * bins_per_symbol as usize;
    let delta = span / nb as f64;

    let mut counts = vec![0.0f64; nb];
    let mut zero_count = 0.0f64;
    let mut rng = substream(seed, stream);

    match model {
        ModelRef::First(d) => {
            let logp: Vec<f64> = d.probs().iter().map(|p| p.ln()).collect();
            for _ in 0..draws {
                let mut lw = 0.0;
                for _ in 0..m {
                    lw += logp[draw_index(&mut rng, n)];
                }
                let x = -lw - origin;
                let j = ((x / delta) as isize).clamp(0, nb as isize - 1) as usize;
                counts[j] += 1.0;
            }
        }
        ModelRef::Second(s) => {
            let log_init: Vec<f64> = s
                .initial()
                .iter()
                .map(|&p| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY })
                .collect();
            let mut log_trans = vec![f64::NEG_INFINITY; n * n];
            for (i, row) in s.transitions().iter().enumerate() {
                for (j, &p) in row.iter().enumerate() {
                    if p > 0.0 {
                        log_trans[i * n + j] = p.ln();
                    }
                }
            }
            for _ in 0..draws {
                let mut prev = draw_index(&mut rng, n);
                let mut lw = log_init[prev];
                for _ in 1..m {
                    let cur = draw_index(&mut rng, n);
                    lw += log_trans[prev * n + cur];
                    prev = cur;
                }
                if lw == f64::NEG_INFINITY {
                    zero_count += 1.0;
                } else {
                    let x = -lw - origin;
                    let j = ((x / delta) as isize).clamp(0, nb as isize - 1) as usize;
                    counts[j] += 1.0;
                }
            }
        }
    }

    let mut params = base_params(model, m, bins_per_symbol);
    params.samples = Some(samples_per_length);
    params.seed = Some(seed);
    Ok(LogProductHistogram {
        delta,
        origin,
        counts,
        log_scale: log_total - (draws as f64).ln(),
        log_total,
        zero_count,
        interval_exponent: 1,
        sampled: true,
        params,
    })
}

/// Guesswork from bin counts:
/// G^Q = Σ_j c_j·[C_j + (c_j+1)/2]·P_j with P_j the mid-rule probability of
/// bin j, evaluated entirely in log domain. The attached interval is the
/// quantization factor of the histogram's construction.
pub fn guesswork_from_histogram(hist: &LogProductHistogram) -> Result<GuessworkEstimate> {
    let mut log_cum = f64::NEG_INFINITY; // ln C_j
    let mut terms = Vec::with_capacity(hist.counts.len());
    for (j, &c) in hist.counts.iter().enumerate() {
        if c <= 0.0 {
            continue;
        }
        let log_c = c.ln() + hist.log_scale;
        // ln((c_j + 1)/2)
        let log_half = log_add_exp(log_c, 0.0) - std::f64::consts::LN_2;
        let log_rank = log_add_exp(log_cum, log_half);
        terms.push(log_c + log_rank - hist.representative(j));
        log_cum = log_add_exp(log_cum, log_c);
    }
    if terms.is_empty() {
        return Err(Error::EmptyHistogram);
    }
    let log_g = log_sum_exp(&terms);
    let method = if hist.sampled {
        Method::Sample
    } else {
        Method::Quantify
    };
    let half = hist.interval_exponent as f64 * hist.delta / 2.0;
    Ok(
        GuessworkEstimate::new(log_g, method, hist.params)
            .with_interval(log_g - half, log_g + half),
    )
}

/// The multiplicative factor Q ≥ 1 of the rigorous quantization interval:
/// first order (p1/pn)^{1/2N}, second order
/// [max(p)/min(p)]^{1/2mN}·[max(P)/min⁺(P)]^{(m-1)/2mN}. The enumerated G
/// lies in [Q⁻¹·G^Q, Q·G^Q] for the full backend; the convolve and dp-chain
/// backends accumulate a half-bin per step, widening the factor to Q^m.
pub fn quantization_interval(model: ModelRef<'_>, m: u32, bins_per_symbol: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::ZeroLength);
    }
    let (_, span) = model.log_range(m);
    if span <= 0.0 {
        return Ok(1.0);
    }
    let nb = m as f64 * f64::from(bins_per_symbol);
    Ok((span / (2.0 * nb)).exp())
}

/// Replicated random selection with independent RNG substreams.
#[derive(Debug, Clone)]
pub struct ReplicateEstimate {
    /// Mean estimate G^R with the 99 % confidence interval attached.
    pub estimate: GuessworkEstimate,
    /// s^R / G^R: sample standard deviation relative to the mean.
    pub rel_std: f64,
    /// R = λ·s^R/(G^R·√T): relative half-width of the interval.
    pub rel_half_width: f64,
    /// ln G of each replicate, in replicate order.
    pub replicate_logs: Vec<f64>,
}

/// Runs `histogram_sample` + `guesswork_from_histogram` T times on
/// substreams seed/0..T and forms the 99 % confidence interval
/// [1−R, 1+R]·G^R.
pub fn replicate_estimate(
    model: ModelRef<'_>,
    m: u32,
    bins_per_symbol: u32,
    samples_per_length: u64,
    replicates: u32,
    seed: u64,
) -> Result<ReplicateEstimate> {
    if replicates < 2 {
        return Err(Error::TooFewReplicates);
    }
    let logs: Vec<f64> = (0..replicates as u64)
        .into_par_iter()
        .map(|t| {
            let hist =
                histogram_sample_stream(model, m, bins_per_symbol, samples_per_length, seed, t)?;
            Ok(guesswork_from_histogram(&hist)?.log_value)
        })
        .collect::<Result<_>>()?;

    // mean and std of astronomically scaled values, shifted by the max log
    let hi = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let shifted: Vec<f64> = logs.iter().map(|&l| (l - hi).exp()).collect();
    let t = shifted.len() as f64;
    let mean = shifted.iter().sum::<f64>() / t;
    let var = shifted.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (t - 1.0);
    let rel_std = var.sqrt() / mean;
    let rel_half_width = CONFIDENCE_LAMBDA * rel_std / t.sqrt();

    let log_mean = hi + mean.ln();
    let lo = if rel_half_width < 1.0 {
        log_mean + (1.0 - rel_half_width).ln()
    } else {
        f64::NEG_INFINITY
    };
    let hi_bound = log_mean + rel_half_width.ln_1p();

    let mut params = EstimateParams::new(model.alphabet_size(), m);
    params.bins = Some(bins_per_symbol);
    params.samples = Some(samples_per_length);
    params.replicates = Some(replicates);
    params.seed = Some(seed);

    let estimate =
        GuessworkEstimate::new(log_mean, Method::Sample, params).with_interval(lo, hi_bound);
    Ok(ReplicateEstimate {
        estimate,
        rel_std,
        rel_half_width,
        replicate_logs: logs,
    })
}
