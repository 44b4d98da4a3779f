//! Central-limit approximations: the counting-measure density of
//! -ln(word probability) is modelled as a normal with per-symbol mean μ₁ and
//! std σ₁, from which guesswork follows by binned summation, a double
//! integral, an erf closed form, or the asymptotic leading term
//! n^m·A·B^m·m^{-1/2}, plus least-squares fitting of that form to data.

use crate::error::{Error, Result};
use crate::estimate::{EstimateParams, GuessworkEstimate, Method};
use crate::histogram::ModelRef;
use crate::logsum::{log_add_exp, log_sum_exp, CompensatedSum};
use crate::model::SymbolDistribution;
use crate::rng::{draw_index, substream, MOMENT_STREAM};
use crate::special::{erf, erfc, normal_cdf, normal_mass};

use std::f64::consts::{LN_2, PI, SQRT_2};

/// Where the moments of a [`NormalLogModel`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentSource {
    Analytic,
    Sampled {
        samples: u64,
        m_probe: u32,
        seed: u64,
        /// Zero-probability words discarded from moment estimation.
        zero_words: u64,
    },
}

/// Normal model of the log-product density under the counting measure.
///
/// `x = -ln(word probability) - origin(m)` is approximately
/// N(μ₁·m, σ₁²·m), where `origin(m) = origin_intercept + origin_slope·m` is
/// the quantization range's lower bound (first order: m·ln(1/p1), so the
/// intercept is 0 and the slope ln(1/p1)).
#[derive(Debug, Clone, PartialEq)]
pub struct NormalLogModel {
    /// Per-symbol mean of x under the counting measure, in nats.
    pub mu1: f64,
    /// Per-symbol standard deviation of x, in nats.
    pub sigma1: f64,
    /// Alphabet size.
    pub n: usize,
    /// origin(m) = origin_intercept + origin_slope·m.
    pub origin_intercept: f64,
    pub origin_slope: f64,
    /// Per-symbol width of the quantization range (ln(p1/pn) in first
    /// order); sets the bin width Δ = span1/N of the binned estimator.
    pub span1: f64,
    pub source: MomentSource,
}

impl NormalLogModel {
    /// The per-symbol probability anchor exp(-origin_slope): p1 for a
    /// first-order model, max(P_ij) for a second-order one.
    pub fn p1(&self) -> f64 {
        (-self.origin_slope).exp()
    }

    fn origin(&self, m: u32) -> f64 {
        self.origin_intercept + self.origin_slope * f64::from(m)
    }

    /// ln of the prefactor n^m·(n·p1·e^{-(2μ₁-σ₁²)/2})^m, expressed through
    /// origin(m) so it also covers second-order models.
    fn log_prefactor(&self, m: u32) -> f64 {
        let mf = f64::from(m);
        let log_nm = mf * (self.n as f64).ln();
        2.0 * log_nm - self.origin(m) - mf * (2.0 * self.mu1 - self.sigma1 * self.sigma1) / 2.0
    }
}

/// Analytic counting-measure moments of x = ln(p1/p_symbol):
/// μ₁ = (1/n)·Σ ln(p1/p_i), σ₁² = (1/n)·Σ ln²(p1/p_i) − μ₁².
pub fn count_moments_analytic(dist: &SymbolDistribution) -> NormalLogModel {
    let n = dist.len();
    let p1 = dist.p_max();
    let mut sum = CompensatedSum::new();
    let mut sum_sq = CompensatedSum::new();
    for &p in dist.probs() {
        let x = (p1 / p).ln();
        sum.add(x);
        sum_sq.add(x * x);
    }
    let mu1 = sum.value() / n as f64;
    let var = (sum_sq.value() / n as f64 - mu1 * mu1).max(0.0);
    NormalLogModel {
        mu1,
        sigma1: var.sqrt(),
        n,
        origin_intercept: 0.0,
        origin_slope: -p1.ln(),
        span1: dist.log_span(),
        source: MomentSource::Analytic,
    }
}

/// Moments estimated from uniformly sampled words of length `m_probe`:
/// mean(x)/m and std(x)/√m of the shifted log-products. Second-order
/// zero-probability words are discarded from the moments and counted in the
/// source record.
pub fn count_moments_sampled(
    model: ModelRef<'_>,
    samples: u64,
    m_probe: u32,
    seed: u64,
) -> Result<NormalLogModel> {
    if samples < 100 {
        return Err(Error::InsufficientPoints {
            needed: 100,
            found: samples as usize,
        });
    }
    if m_probe == 0 {
        return Err(Error::ZeroLength);
    }
    let n = model.alphabet_size();
    let mut rng = substream(seed, MOMENT_STREAM);

    let (origin_intercept, origin_slope, span1) = match model {
        ModelRef::First(d) => (0.0, -d.p_max().ln(), d.log_span()),
        ModelRef::Second(s) => {
            let b = s.range_bounds();
            let slope = -b.t_max.ln();
            let intercept = -b.p_max.ln() - slope;
            let span_word = (b.p_max / b.p_min_positive).ln()
                + f64::from(m_probe - 1) * (b.t_max / b.t_min_positive).ln();
            (intercept, slope, span_word / f64::from(m_probe))
        }
    };
    let origin = origin_intercept + origin_slope * f64::from(m_probe);

    let mut count = 0u64;
    let mut zero_words = 0u64;
    let mut sum = CompensatedSum::new();
    let mut sum_sq = CompensatedSum::new();
    match model {
        ModelRef::First(d) => {
            let logp: Vec<f64> = d.probs().iter().map(|p| p.ln()).collect();
            for _ in 0..samples {
                let mut lw = 0.0;
                for _ in 0..m_probe {
                    lw += logp[draw_index(&mut rng, n)];
                }
                let x = -lw - origin;
                sum.add(x);
                sum_sq.add(x * x);
                count += 1;
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
            for _ in 0..samples {
                let mut prev = draw_index(&mut rng, n);
                let mut lw = log_init[prev];
                for _ in 1..m_probe {
                    let cur = draw_index(&mut rng, n);
                    lw += log_trans[prev * n + cur];
                    prev = cur;
                }
                if lw == f64::NEG_INFINITY {
                    zero_words += 1;
                } else {
                    let x = -lw - origin;
                    sum.add(x);
                    sum_sq.add(x * x);
                    count += 1;
                }
            }
        }
    }
    if count < 2 {
        return Err(Error::AllZeroSamples);
    }

    let mf = f64::from(m_probe);
    let kf = count as f64;
    let mean = sum.value() / kf;
    let var = ((sum_sq.value() - kf * mean * mean) / (kf - 1.0)).max(0.0);
    Ok(NormalLogModel {
        mu1: mean / mf,
        sigma1: (var / mf).sqrt(),
        n,
        origin_intercept,
        origin_slope,
        span1,
        source: MomentSource::Sampled {
            samples,
            m_probe,
            seed,
            zero_words,
        },
    })
}

fn base_params(nm: &NormalLogModel, m: u32) -> EstimateParams {
    EstimateParams::new(nm.n, m)
}

/// Binned-summation estimate with normal bin counts: c_j = n^m·∫_bin N(x; μ₁m,
/// σ₁²m) dx over the range [0, mNΔ] with Δ = span1/N.
pub fn guesswork_normal_binned(
    nm: &NormalLogModel,
    m: u32,
    bins_per_symbol: u32,
) -> Result<GuessworkEstimate> {
    if m == 0 {
        return Err(Error::ZeroLength);
    }
    let mf = f64::from(m);
    let log_nm = mf * (nm.n as f64).ln();
    let mut params = base_params(nm, m);
    params.bins = Some(bins_per_symbol);
    if nm.sigma1 == 0.0 {
        // all mass at x = 0: G = (n^m + 1)/2
        let log_g = log_nm + (-log_nm).exp().ln_1p() - LN_2;
        return Ok(GuessworkEstimate::new(log_g, Method::NormalBinned, params));
    }
    let nb = m as usize * bins_per_symbol as usize;
    let delta = nm.span1 / f64::from(bins_per_symbol);
    let mu = nm.mu1 * mf;
    let sd = nm.sigma1 * mf.sqrt();
    let origin = nm.origin(m);

    let mut log_cum = f64::NEG_INFINITY;
    let mut terms = Vec::with_capacity(nb);
    for j in 0..nb {
        let a = j as f64 * delta;
        let b = a + delta;
        let mass = normal_mass(a, b, mu, sd);
        if mass <= 0.0 {
            continue;
        }
        let log_c = log_nm + mass.ln();
        let log_half = log_add_exp(log_c, 0.0) - LN_2;
        let log_rank = log_add_exp(log_cum, log_half);
        terms.push(log_c + log_rank - (origin + (j as f64 + 0.5) * delta));
        log_cum = log_add_exp(log_cum, log_c);
    }
    if terms.is_empty() {
        return Err(Error::EmptyHistogram);
    }
    Ok(GuessworkEstimate::new(
        log_sum_exp(&terms),
        Method::NormalBinned,
        params,
    ))
}

/// The double-integral value I(m) behind the integral form, in unscaled
/// coordinates: ∫₀^U N(x; (μ₁-σ₁²)m, σ₁²m)·[Φ((x-μ₁m)/(σ₁√m)) - Φ(-μ₁√m/σ₁)] dx.
pub(crate) fn normal_integral_value(nm: &NormalLogModel, m: u32) -> Result<f64> {
    if nm.sigma1 == 0.0 {
        return Err(Error::SigmaZero);
    }
    let mf = f64::from(m);
    let sd = nm.sigma1 * mf.sqrt();
    let outer_mean = (nm.mu1 - nm.sigma1 * nm.sigma1) * mf;
    let inner_mean = nm.mu1 * mf;
    // upper limit: the quantization range end, extended until the truncated
    // outer tail mass drops below 1e-12 (~7.1 sigma)
    let upper = (mf * nm.span1).max(outer_mean + 8.0 * sd).max(inner_mean);
    let inner_floor = normal_cdf((0.0 - inner_mean) / sd);
    let f = |x: f64| {
        let outer = (-(x - outer_mean) * (x - outer_mean) / (2.0 * sd * sd)).exp()
            / (sd * (2.0 * PI).sqrt());
        let inner = normal_cdf((x - inner_mean) / sd) - inner_floor;
        outer * inner.max(0.0)
    };

    // panel the outer Gaussian so adaptive refinement cannot mistake the
    // far-off bump for a zero integrand
    let mut cuts = vec![0.0, upper];
    for k in [-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0] {
        let x = outer_mean + k * sd;
        if x > 0.0 && x < upper {
            cuts.push(x);
        }
    }
    cuts.sort_by(f64::total_cmp);

    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += adaptive_simpson(&f, w[0], w[1], 1e-10);
    }
    Ok(total)
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth >= 48 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth + 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth + 1)
    }

    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    if whole == 0.0 {
        // the panelling keeps the bump inside a panel whose coarse estimate
        // is nonzero; a zero panel really is (numerically) empty
        return 0.0;
    }
    let tol = whole.abs() * rel_tol;
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 0)
}

/// Guesswork from the left-shifted double integral of the normal density
/// (the integral form of the approximation family).
pub fn guesswork_normal_integral(nm: &NormalLogModel, m: u32) -> Result<GuessworkEstimate> {
    if m == 0 {
        return Err(Error::ZeroLength);
    }
    if nm.sigma1 == 0.0 {
        return Err(Error::SigmaZero);
    }
    let integral = normal_integral_value(nm, m)?;
    if integral <= 0.0 {
        return Err(Error::ClosedFormDomain { m });
    }
    let log_g = nm.log_prefactor(m) + integral.ln();
    Ok(GuessworkEstimate::new(
        log_g,
        Method::NormalIntegral,
        base_params(nm, m),
    ))
}

/// Closed-form guesswork:
/// n^m·(n·p1·e^{-(2μ₁-σ₁²)/2})^m·¼·[2·erf(μ₁√m/(σ₁√2)) − 1 − erf(σ₁√m/2)²],
/// valid for large m. The bracket is evaluated through erfc so its decay to
/// zero keeps relative accuracy.
pub fn guesswork_normal_closed(nm: &NormalLogModel, m: u32) -> Result<GuessworkEstimate> {
    if m == 0 {
        return Err(Error::ZeroLength);
    }
    if nm.sigma1 == 0.0 {
        return Err(Error::SigmaZero);
    }
    let mf = f64::from(m);
    let a = nm.mu1 * mf.sqrt() / (nm.sigma1 * SQRT_2);
    let b = nm.sigma1 * mf.sqrt() / 2.0;
    // 2·erf(a) − 1 − erf(b)² = (1 + erf(b))·erfc(b) − 2·erfc(a)
    let bracket = (1.0 + erf(b)) * erfc(b) - 2.0 * erfc(a);
    if bracket <= 0.0 {
        return Err(Error::ClosedFormDomain { m });
    }
    let log_g = nm.log_prefactor(m) + bracket.ln() - (4.0f64).ln();
    Ok(GuessworkEstimate::new(
        log_g,
        Method::NormalErf,
        base_params(nm, m),
    ))
}

/// Constants (A, B) of the asymptotic form n^m·A·B^m·m^{-1/2}:
/// A = 1/(σ₁√π), B = n·p1·e^{-(μ₁-σ₁²/4)} (first order; the general form
/// folds the range intercept into A).
pub fn leading_constants(nm: &NormalLogModel) -> Result<(f64, f64)> {
    if nm.sigma1 == 0.0 {
        return Err(Error::SigmaZero);
    }
    if nm.mu1 / (nm.sigma1 * SQRT_2) <= nm.sigma1 / 2.0 {
        return Err(Error::AsymptoticInvalid);
    }
    let a = (-nm.origin_intercept).exp() / (nm.sigma1 * PI.sqrt());
    let b = nm.n as f64 * nm.p1() * (-(nm.mu1 - nm.sigma1 * nm.sigma1 / 4.0)).exp();
    Ok((a, b))
}

/// Guesswork from the leading term n^m·A·B^m·m^{-1/2}.
pub fn guesswork_leading_term(nm: &NormalLogModel, m: u32) -> Result<GuessworkEstimate> {
    if m == 0 {
        return Err(Error::ZeroLength);
    }
    let (a, b) = leading_constants(nm)?;
    let mf = f64::from(m);
    let log_g = mf * (nm.n as f64).ln() + a.ln() + mf * b.ln() - 0.5 * mf.ln();
    Ok(GuessworkEstimate::new(
        log_g,
        Method::LeadingTerm,
        base_params(nm, m),
    ))
}

/// Least-squares fit of ln(G/n^m) + ½·ln(m) = ln A + m·ln B.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawFit {
    pub a: f64,
    pub b: f64,
    pub m_range: (u32, u32),
    /// Root-mean-square residual of the fit, log domain.
    pub residual: f64,
}

impl PowerLawFit {
    /// ln(G/n^m) predicted at word length m.
    pub fn log_ratio(&self, m: u32) -> f64 {
        self.a.ln() + f64::from(m) * self.b.ln() - 0.5 * f64::from(m).ln()
    }
}

/// Fits (m, ln(G/n^m)) pairs inside `m_range` to the asymptotic form. The
/// fit is linear in (ln A, ln B), so scaling every G by a constant scales A
/// and leaves B untouched.
pub fn fit_power_law(series: &[(u32, f64)], m_range: (u32, u32)) -> Result<PowerLawFit> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(m, _)| *m >= m_range.0 && *m <= m_range.1 && *m > 0)
        .map(|&(m, log_ratio)| (f64::from(m), log_ratio + 0.5 * f64::from(m).ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientPoints {
            needed: 3,
            found: pts.len(),
        });
    }
    let k = pts.len() as f64;
    let mean_m = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_m) * (p.0 - mean_m)).sum();
    if sxx == 0.0 {
        return Err(Error::DimensionMismatch(
            "power-law fit needs at least two distinct word lengths".into(),
        ));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_m) * (p.1 - mean_y)).sum();
    let ln_b = sxy / sxx;
    let ln_a = mean_y - ln_b * mean_m;
    let ss_res: f64 = pts
        .iter()
        .map(|p| {
            let r = p.1 - (ln_a + ln_b * p.0);
            r * r
        })
        .sum();
    Ok(PowerLawFit {
        a: ln_a.exp(),
        b: ln_b.exp(),
        m_range,
        residual: (ss_res / k).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{guesswork_exact_first, guesswork_uniform};
    use crate::model::DigramCountTable;
    use crate::testdata::REFERENCE_PROBS;

    fn reference_model() -> NormalLogModel {
        let d = SymbolDistribution::from_probs(&REFERENCE_PROBS).unwrap();
        count_moments_analytic(&d)
    }

    #[test]
    fn analytic_moments_match_direct_sums() {
        let d = SymbolDistribution::from_probs(&REFERENCE_PROBS).unwrap();
        let nm = count_moments_analytic(&d);
        // independent direct computation
        let xs: Vec<f64> = REFERENCE_PROBS
            .iter()
            .map(|p| (REFERENCE_PROBS[0] / p).ln())
            .collect();
        let mu = xs.iter().sum::<f64>() / 10.0;
        let var = xs.iter().map(|x| x * x).sum::<f64>() / 10.0 - mu * mu;
        assert!((nm.mu1 - mu).abs() < 1e-14);
        assert!((nm.sigma1 - var.sqrt()).abs() < 1e-14);
        // published constants to the accuracy the rounded inputs support
        assert!((nm.mu1 - 0.824535).abs() < 2e-5);
        assert!((nm.sigma1 - 0.678331).abs() < 2e-5);
    }

    #[test]
    fn analytic_moments_uniform_degenerate() {
        let d = SymbolDistribution::uniform(8).unwrap();
        let nm = count_moments_analytic(&d);
        assert_eq!(nm.mu1, 0.0);
        assert_eq!(nm.sigma1, 0.0);
    }

    #[test]
    fn analytic_moments_two_point() {
        let d = SymbolDistribution::from_probs(&[0.7, 0.3]).unwrap();
        let nm = count_moments_analytic(&d);
        let half_log = 0.5 * (0.7f64 / 0.3).ln();
        assert!((nm.mu1 - half_log).abs() < 1e-14);
        assert!((nm.sigma1 - half_log).abs() < 1e-14);
        assert!((nm.mu1 - 0.42365).abs() < 1e-5);
    }

    #[test]
    fn sampled_moments_converge_to_analytic() {
        let d = SymbolDistribution::from_probs(&REFERENCE_PROBS).unwrap();
        let analytic = count_moments_analytic(&d);
        let m_probe = 8u32;
        let samples = 100_000u64;
        let nm = count_moments_sampled(ModelRef::First(&d), samples, m_probe, 5).unwrap();
        let k = (samples * u64::from(m_probe)) as f64;
        let se_mu = analytic.sigma1 / k.sqrt();
        assert!(
            (nm.mu1 - analytic.mu1).abs() < 3.0 * se_mu,
            "mu {} vs {}",
            nm.mu1,
            analytic.mu1
        );
        // std of a std estimate: sigma/sqrt(2K)
        let se_sigma = analytic.sigma1 / (2.0 * k).sqrt();
        assert!((nm.sigma1 - analytic.sigma1).abs() < 4.0 * se_sigma);
    }

    #[test]
    fn sampled_moments_uniform_sigma_zero() {
        let d = SymbolDistribution::uniform(5).unwrap();
        let nm = count_moments_sampled(ModelRef::First(&d), 500, 3, 1).unwrap();
        assert_eq!(nm.sigma1, 0.0);
        assert_eq!(nm.mu1, 0.0);
    }

    #[test]
    fn sampled_moments_reject_tiny_samples() {
        let d = SymbolDistribution::uniform(5).unwrap();
        assert!(matches!(
            count_moments_sampled(ModelRef::First(&d), 99, 3, 1),
            Err(Error::InsufficientPoints { .. })
        ));
    }

    #[test]
    fn english_second_order_sampled_snapshot() {
        // regression pin for the fixed (seed, stream) drawing scheme; these
        // values are part of the reproducibility contract
        let s = DigramCountTable::bundled_english()
            .normalize_rows()
            .unwrap();
        let nm = count_moments_sampled(ModelRef::Second(&s), 1_000_000, 20, 1).unwrap();
        let MomentSource::Sampled { zero_words, .. } = nm.source else {
            panic!("sampled source expected");
        };
        assert!((nm.mu1 - 3.412_392_872_272_14).abs() < 1e-12);
        assert!((nm.sigma1 - 1.192057273215767).abs() < 1e-12);
        assert_eq!(zero_words, 998_493);
    }

    #[test]
    fn binned_uniform_degenerate_is_exact() {
        let d = SymbolDistribution::uniform(6).unwrap();
        let nm = count_moments_analytic(&d);
        let g = guesswork_normal_binned(&nm, 4, 10).unwrap();
        assert!((g.value() - guesswork_uniform(6, 4).value()).abs() < 1e-9);
    }

    #[test]
    fn binned_tracks_integral_closely() {
        let nm = reference_model();
        for m in [10u32, 15, 20] {
            let b = guesswork_normal_binned(&nm, m, 10).unwrap();
            let i = guesswork_normal_integral(&nm, m).unwrap();
            let rel = ((b.log_value - i.log_value).exp() - 1.0).abs();
            assert!(rel < 0.005, "m={m}: binned vs integral off by {rel}");
        }
    }

    #[test]
    fn binned_vs_closed_converges_with_m() {
        // the closed form is asymptotic: several percent off at m=15,
        // inside 1 % only for m around 25 and beyond
        let nm = reference_model();
        let b15 = guesswork_normal_binned(&nm, 15, 10).unwrap();
        let c15 = guesswork_normal_closed(&nm, 15).unwrap();
        let rel15 = ((b15.log_value - c15.log_value).exp() - 1.0).abs();
        assert!(rel15 < 0.05, "m=15 binned vs closed {rel15}");
        let b40 = guesswork_normal_binned(&nm, 40, 10).unwrap();
        let c40 = guesswork_normal_closed(&nm, 40).unwrap();
        let rel40 = ((b40.log_value - c40.log_value).exp() - 1.0).abs();
        assert!(rel40 < 0.01, "m=40 binned vs closed {rel40}");
        assert!(rel40 < rel15);
    }

    #[test]
    fn binned_small_m_deviates_from_exact() {
        let d = SymbolDistribution::from_probs(&REFERENCE_PROBS).unwrap();
        let nm = count_moments_analytic(&d);
        let g = guesswork_normal_binned(&nm, 3, 10).unwrap();
        let exact = guesswork_exact_first(&d, 3).unwrap();
        let rel = ((g.log_value - exact.log_value).exp() - 1.0).abs();
        assert!(rel > 0.05, "CLT should be visibly off at m=3, got {rel}");
    }

    #[test]
    fn integral_agrees_with_closed_for_large_m() {
        let nm = reference_model();
        for m in [30u32, 60, 120] {
            let i = guesswork_normal_integral(&nm, m).unwrap();
            let c = guesswork_normal_closed(&nm, m).unwrap();
            let rel = ((i.log_value - c.log_value).exp() - 1.0).abs();
            assert!(rel < 0.005, "m={m}: {rel}");
        }
    }

    #[test]
    fn integral_value_decreases_in_m() {
        let nm = reference_model();
        let vals: Vec<f64> = [5u32, 10, 15, 20, 30]
            .iter()
            .map(|&m| normal_integral_value(&nm, m).unwrap())
            .collect();
        for w in vals.windows(2) {
            assert!(w[1] < w[0], "integral not decreasing: {vals:?}");
        }
    }

    #[test]
    fn integral_and_closed_reject_degenerate_sigma() {
        let d = SymbolDistribution::uniform(4).unwrap();
        let nm = count_moments_analytic(&d);
        assert!(matches!(
            guesswork_normal_integral(&nm, 5),
            Err(Error::SigmaZero)
        ));
        assert!(matches!(
            guesswork_normal_closed(&nm, 5),
            Err(Error::SigmaZero)
        ));
        assert!(matches!(
            guesswork_normal_closed(&reference_model(), 0),
            Err(Error::ZeroLength)
        ));
    }

    #[test]
    fn two_normal_family_members_stay_in_band() {
        // internal consistency only: binned and integral within 1 % at m=25
        let d = SymbolDistribution::from_probs(&[0.7, 0.3]).unwrap();
        let nm = count_moments_analytic(&d);
        let b = guesswork_normal_binned(&nm, 25, 64).unwrap();
        let i = guesswork_normal_integral(&nm, 25).unwrap();
        let rel = ((b.log_value - i.log_value).exp() - 1.0).abs();
        assert!(rel < 0.01, "binned vs integral at m=25: {rel}");
    }

    #[test]
    fn leading_constants_reference_dist() {
        let nm = reference_model();
        let (a, b) = leading_constants(&nm).unwrap();
        assert!((a - 0.832).abs() < 1e-3, "A = {a}");
        assert!((b - 0.912).abs() < 1e-3, "B = {b}");
    }

    #[test]
    fn leading_constants_two_point() {
        let d = SymbolDistribution::from_probs(&[0.7, 0.3]).unwrap();
        let nm = count_moments_analytic(&d);
        let (a, b) = leading_constants(&nm).unwrap();
        assert!((a - 1.332).abs() < 1e-3, "A = {a}");
        assert!((b - 0.9586).abs() < 1e-3, "B = {b}");
    }

    #[test]
    fn leading_term_requires_condition() {
        let d = SymbolDistribution::uniform(3).unwrap();
        let nm = count_moments_analytic(&d);
        assert!(matches!(
            guesswork_leading_term(&nm, 10),
            Err(Error::SigmaZero)
        ));
        // a model violating mu1/(sigma1*sqrt(2)) > sigma1/2
        let bad = NormalLogModel {
            mu1: 0.1,
            sigma1: 1.5,
            n: 10,
            origin_intercept: 0.0,
            origin_slope: 1.0,
            span1: 3.0,
            source: MomentSource::Analytic,
        };
        assert!(matches!(
            guesswork_leading_term(&bad, 10),
            Err(Error::AsymptoticInvalid)
        ));
    }

    #[test]
    fn closed_over_leading_approaches_one() {
        let nm = reference_model();
        let ratios: Vec<f64> = [50u32, 100, 200]
            .iter()
            .map(|&m| {
                let c = guesswork_normal_closed(&nm, m).unwrap();
                let l = guesswork_leading_term(&nm, m).unwrap();
                (c.log_value - l.log_value).exp()
            })
            .collect();
        assert!((ratios[2] - 1.0).abs() < 0.05, "m=200 ratio {}", ratios[2]);
        assert!(
            (ratios[2] - 1.0).abs() <= (ratios[1] - 1.0).abs() + 1e-12
                && (ratios[1] - 1.0).abs() <= (ratios[0] - 1.0).abs() + 1e-12,
            "approach not monotone: {ratios:?}"
        );
    }

    #[test]
    fn normal_family_finite_at_extreme_sizes() {
        let nm = NormalLogModel {
            mu1: 0.9,
            sigma1: 0.7,
            n: 128,
            origin_intercept: 0.0,
            origin_slope: 2.2,
            span1: 4.0,
            source: MomentSource::Analytic,
        };
        let m = 200u32;
        for log_g in [
            guesswork_normal_binned(&nm, m, 16).unwrap().log_value,
            guesswork_normal_integral(&nm, m).unwrap().log_value,
            guesswork_normal_closed(&nm, m).unwrap().log_value,
            guesswork_leading_term(&nm, m).unwrap().log_value,
        ] {
            assert!(log_g.is_finite());
        }
    }

    #[test]
    fn fit_recovers_exact_power_law() {
        let (a, b) = (0.5f64, 0.9f64);
        let series: Vec<(u32, f64)> = (5..=30)
            .map(|m| {
                let lr = a.ln() + f64::from(m) * b.ln() - 0.5 * f64::from(m).ln();
                (m, lr)
            })
            .collect();
        let fit = fit_power_law(&series, (5, 30)).unwrap();
        assert!((fit.a - a).abs() < 1e-10);
        assert!((fit.b - b).abs() < 1e-10);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn fit_is_scale_equivariant() {
        let series: Vec<(u32, f64)> = (3..=20)
            .map(|m| (m, -0.3 * f64::from(m) + 0.1 * f64::from(m % 3)))
            .collect();
        let fit = fit_power_law(&series, (3, 20)).unwrap();
        let k = 7.5f64;
        let scaled: Vec<(u32, f64)> = series.iter().map(|&(m, lr)| (m, lr + k.ln())).collect();
        let fit2 = fit_power_law(&scaled, (3, 20)).unwrap();
        assert!((fit2.a / fit.a - k).abs() < 1e-12);
        assert_eq!(fit.b.to_bits(), fit2.b.to_bits());
    }

    #[test]
    fn fit_rejects_degenerate_input() {
        assert!(matches!(
            fit_power_law(&[(5, 0.0), (6, 0.0)], (1, 10)),
            Err(Error::InsufficientPoints { .. })
        ));
        assert!(matches!(
            fit_power_law(&[(5, 0.0), (5, 0.1), (5, 0.2)], (1, 10)),
            Err(Error::DimensionMismatch(_))
        ));
    }
}

#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn moments_nonnegative_and_zero_iff_uniform(
            weights in prop::collection::vec(0.05f64..1.0, 2..10),
        ) {
            let d = SymbolDistribution::from_weights(&weights).unwrap();
            let nm = count_moments_analytic(&d);
            prop_assert!(nm.mu1 >= 0.0);
            prop_assert!(nm.sigma1 >= 0.0);
            let uniform = d.probs().windows(2).all(|w| w[0] == w[1]);
            prop_assert_eq!(nm.mu1 == 0.0, uniform);
            prop_assert_eq!(nm.sigma1 == 0.0, uniform);
        }
    }
}
