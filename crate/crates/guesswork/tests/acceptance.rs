//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with its measured values and wall time (visible under `--nocapture`).
//!
//! Criteria pin tolerances in code; nothing is deferred to calibration.

use std::time::Instant;

use guesswork::histogram::Backend;
use guesswork::*;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

const REFERENCE_PROBS: [f64; 10] = [
    0.185430, 0.159282, 0.154767, 0.149299, 0.128534, 0.058154, 0.051858, 0.051490, 0.033738,
    0.027448,
];

fn reference_dist() -> SymbolDistribution {
    SymbolDistribution::from_probs(&REFERENCE_PROBS).unwrap()
}

fn english() -> MarkovSource {
    DigramCountTable::bundled_english()
        .normalize_rows()
        .unwrap()
}

fn report(no: u32, name: &str, pass: bool, detail: &str, elapsed_ms: f64, budget_ms: f64) {
    println!(
        "criterion {no:>2} [{}] {name}: {detail} ({elapsed_ms:.1} ms, budget {budget_ms:.0} ms)",
        if pass { "PASS" } else { "FAIL" },
    );
    assert!(pass, "criterion {no} failed: {detail}");
    assert!(
        elapsed_ms <= budget_ms,
        "criterion {no} exceeded its runtime budget: {elapsed_ms:.1} ms > {budget_ms:.0} ms"
    );
}

/// Deterministic random instances shared by criteria 7 and 8:
/// n in 2..=8, m in 1..=6, weights uniform.
fn random_instances(count: usize, seed: u64) -> Vec<(SymbolDistribution, u32)> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(2..=8usize);
            let m = rng.random_range(1..=6u32);
            let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.02..1.0)).collect();
            (SymbolDistribution::from_weights(&weights).unwrap(), m)
        })
        .collect()
}

#[test]
fn criterion_01_reference_moments() {
    let d = reference_dist();
    count_moments_analytic(&d); // warm
    let t0 = Instant::now();
    let nm = count_moments_analytic(&d);
    let elapsed = t0.elapsed().as_secs_f64() * 1e3;
    let d_mu = (nm.mu1 - 0.824535).abs();
    let d_sigma = (nm.sigma1 - 0.678331).abs();
    let pass = d_mu < 1e-5 && d_sigma < 1e-5;
    report(
        1,
        "reference moment constants",
        pass,
        &format!(
            "mu1 = {:.7} (|err| {:.2e}), sigma1 = {:.7} (|err| {:.2e}), tolerance 1e-5",
            nm.mu1, d_mu, nm.sigma1, d_sigma
        ),
        elapsed,
        1.0,
    );
}

#[test]
fn criterion_02_leading_term_constants() {
    let nm = count_moments_analytic(&reference_dist());
    leading_constants(&nm).unwrap(); // warm
    let t0 = Instant::now();
    let (a, b) = leading_constants(&nm).unwrap();
    let elapsed = t0.elapsed().as_secs_f64() * 1e3;
    let pass = (a - 0.832).abs() <= 1e-3 && (b - 0.912).abs() <= 1e-3;
    report(
        2,
        "leading-term constants",
        pass,
        &format!("A = {a:.4} (want 0.832±0.001), B = {b:.4} (want 0.912±0.001)"),
        elapsed,
        1.0,
    );
}

#[test]
fn criterion_03_normal_fit_reproduction() {
    let t0 = Instant::now();
    let nm = count_moments_analytic(&reference_dist());
    let series: Vec<(u32, f64)> = (9..=40)
        .map(|m| {
            let g = guesswork_normal_binned(&nm, m, 10).unwrap();
            (m, g.ratio.ln())
        })
        .collect();
    let fit = fit_power_law(&series, (9, 40)).unwrap();
    let elapsed = t0.elapsed().as_secs_f64() * 1e3;
    let pass = (fit.b - 0.920).abs() <= 0.005 && (fit.a - 0.592).abs() <= 0.05;
    report(
        3,
        "normal-binned fit over 9..=40",
        pass,
        &format!(
            "A = {:.4} (want 0.592±0.05), B = {:.4} (want 0.920±0.005)",
            fit.a, fit.b
        ),
        elapsed,
        10_000.0,
    );
}

type Series = Vec<(u32, f64)>;

/// Shared by criteria 4 and 5: English first-order sampled series
/// (S = 1e5, T = 20) and second-order dp-chain quantified series, 9..=30.
fn english_series() -> (Series, Series) {
    let source = english();
    let first = source.marginal_distribution().unwrap();
    let ms: Vec<u32> = (9..=30).collect();
    let first_series: Vec<(u32, f64)> = ms
        .iter()
        .map(|&m| {
            let r = replicate_estimate(ModelRef::First(&first), m, 64, 100_000, 20, 1).unwrap();
            (m, r.estimate.ratio.ln())
        })
        .collect();
    let second_series: Vec<(u32, f64)> = ms
        .iter()
        .map(|&m| {
            let h =
                histogram_enumerate(ModelRef::Second(&source), m, 128, Backend::DpChain).unwrap();
            let g = guesswork_from_histogram(&h).unwrap();
            (m, g.ratio.ln())
        })
        .collect();
    (first_series, second_series)
}

fn max_rel_dev(series: &[(u32, f64)], fit: &PowerLawFit) -> f64 {
    series
        .iter()
        .map(|&(m, lr)| ((lr - fit.log_ratio(m)).exp() - 1.0).abs())
        .fold(0.0, f64::max)
}

#[test]
fn criterion_04_table1_reproduction() {
    let t0 = Instant::now();
    let (first_series, second_series) = english_series();
    let fit1 = fit_power_law(&first_series, (9, 30)).unwrap();
    let fit2 = fit_power_law(&second_series, (9, 30)).unwrap();
    let dev1 = max_rel_dev(&first_series, &fit1);
    let dev2 = max_rel_dev(&second_series, &fit2);
    let elapsed = t0.elapsed().as_secs_f64() * 1e3;
    let pass = (fit1.b - 0.801).abs() <= 0.01
        && (fit2.b - 0.554).abs() <= 0.02
        && dev1 <= 0.10
        && dev2 <= 0.10;
    report(
        4,
        "Table 1 fits (desk-scaled)",
        pass,
        &format!(
            "order 1: B = {:.4} (want 0.801±0.01, A = {:.3}), max dev {:.1}%; \
             order 2: B = {:.4} (want 0.554±0.02, A = {:.3}), max dev {:.1}%",
            fit1.b,
            fit1.a,
            dev1 * 100.0,
            fit2.b,
            fit2.a,
            dev2 * 100.0
        ),
        elapsed,
        300_000.0,
    );
}

#[test]
fn criterion_05_order_gap_at_m30() {
    let t0 = Instant::now();
    let source = english();
    let first = source.marginal_distribution().unwrap();
    let g1 = replicate_estimate(ModelRef::First(&first), 30, 64, 100_000, 20, 1)
        .unwrap()
        .estimate;
    let h = histogram_enumerate(ModelRef::Second(&source), 30, 128, Backend::DpChain).unwrap();
    let g2 = guesswork_from_histogram(&h).unwrap();
    let gap_log10 = (g1.log_value - g2.log_value) / std::f64::consts::LN_10;
    let elapsed = t0.elapsed().as_secs_f64() * 1e3;
    let pass = (4.5..=5.5).contains(&gap_log10);
    report(
        5,
        "order-1/order-2 gap at m = 30",
        pass,
        &format!("G1/G2 = 10^{gap_log10:.3} (want within [10^4.5, 10^5.5])"),
        elapsed,
        300_000.0,
    );
}

#[test]
fn criterion_06_ansatz_crossover() {
    let t0 = Instant::now();
    let d = reference_dist();
    let mut ratios = Vec::new();
    for m in 1..=20u32 {
        let h = histogram_enumerate(ModelRef::First(&d), m, 1024, Backend::Convolve).unwrap();
        let gq = guesswork_from_histogram(&h).unwrap();
        let ansatz = entropy_ansatz(&entropy_order1(&d, m, std::f64::consts::E));
        ratios.push((m, (ansatz.log_value - gq.log_value).exp()));
    }
    let over_small = ratios
        .iter()
        .filter(|(m, _)| *m <= 9)
        .all(|(_, r)| *r > 1.0);
    let under_large = ratios
        .iter()
        .filter(|(m, _)| *m >= 13)
        .all(|(_, r)| *r < 1.0);
    let crossing = ratios
        .iter()
        .find(|(_, r)| *r < 1.0)
        .map(|(m, _)| *m)
        .unwrap_or(u32::MAX);
    let elapsed = t0.elapsed().as_secs_f64() * 1e3;
    let pass = over_small && under_large && (9..=13).contains(&crossing);
    report(
        6,
        "entropy-ansatz crossover",
        pass,
        &format!(
            "over for m<=9: {over_small}, under for m>=13: {under_large}, first m below 1: {crossing}"
        ),
        elapsed,
        30_000.0,
    );
}

#[test]
fn criterion_07_interval_containment() {
    let t0 = Instant::now();
    let instances = random_instances(200, 20_240_001);
    let mut violations = 0usize;
    let mut checked = 0usize;
    for (d, m) in &instances {
        let exact = guesswork_exact_first(d, *m).unwrap();
        for bins in [4u32, 16, 64] {
            let h = histogram_enumerate(ModelRef::First(d), *m, bins, Backend::Full).unwrap();
            let g = guesswork_from_histogram(&h).unwrap();
            let (lo, hi) = g.interval.unwrap();
            checked += 1;
            if exact.log_value < lo - 1e-9 || exact.log_value > hi + 1e-9 {
                violations += 1;
            }
        }
    }
    let elapsed = t0.elapsed().as_secs_f64() * 1e3;
    report(
        7,
        "quantization interval containment",
        violations == 0,
        &format!("{violations} violations in {checked} (200 instances x N in {{4,16,64}})"),
        elapsed,
        120_000.0,
    );
}

#[test]
fn criterion_08_bound_ordering() {
    let t0 = Instant::now();
    let instances = random_instances(200, 20_240_001);
    let mut arikan_violations = 0usize;
    let mut massey_violations = 0usize;
    let mut massey_in_regime = 0usize;
    let mut massey_logged = 0usize;
    for (d, m) in &instances {
        let exact = guesswork_exact_first(d, *m).unwrap();
        if arikan_lower(d, *m).log_value > exact.log_value + 1e-9 {
            arikan_violations += 1;
        }
        let h = entropy_order1(d, *m, 2.0);
        let massey = massey_lower(&h);
        // Massey's inequality is a theorem for word entropy >= 2 bits; below
        // that regime violations are expected and only logged.
        if h.value >= 2.0 {
            massey_in_regime += 1;
            if massey.log_value > exact.log_value + 1e-9 {
                massey_violations += 1;
            }
        } else if massey.log_value > exact.log_value + 1e-9 {
            massey_logged += 1;
        }
    }
    let elapsed = t0.elapsed().as_secs_f64() * 1e3;
    let pass = arikan_violations == 0 && massey_violations == 0;
    report(
        8,
        "lower-bound ordering",
        pass,
        &format!(
            "arikan: {arikan_violations}/200 violations; massey: {massey_violations}/{massey_in_regime} \
             violations at >=2 bits ({massey_logged} logged below the regime)"
        ),
        elapsed,
        60_000.0,
    );
}

#[test]
fn criterion_09_monte_carlo_coverage() {
    let t0 = Instant::now();
    let d = SymbolDistribution::from_probs(&[0.7, 0.3]).unwrap();
    let m = 6u32;
    let bins = 32u32;
    let h = histogram_enumerate(ModelRef::First(&d), m, bins, Backend::Full).unwrap();
    let gq = guesswork_from_histogram(&h).unwrap();
    let mut hits = 0usize;
    for trial in 0..100u64 {
        let r =
            replicate_estimate(ModelRef::First(&d), m, bins, 10_000, 20, 9_000 + trial).unwrap();
        let (lo, hi) = r.estimate.interval.unwrap();
        if lo <= gq.log_value && gq.log_value <= hi {
            hits += 1;
        }
    }
    let elapsed = t0.elapsed().as_secs_f64() * 1e3;
    report(
        9,
        "99% CI coverage of G^Q",
        hits >= 90,
        &format!("{hits}/100 trials contained the full-enumeration G^Q (want >= 90)"),
        elapsed,
        120_000.0,
    );
}

#[test]
fn criterion_10_stationary_solver() {
    let table = DigramCountTable::bundled_english();
    let t0 = Instant::now();
    let source = table.normalize_rows().unwrap();
    let elapsed = t0.elapsed().as_secs_f64() * 1e3;
    let p = source.initial();
    let residual = guesswork::model::fixed_point_residual(source.transitions(), p);
    let sum: f64 = p.iter().sum();
    let pass = residual < 1e-10 && p.iter().all(|&v| v >= 0.0) && (sum - 1.0).abs() < 1e-12;
    report(
        10,
        "English stationary solve",
        pass,
        &format!(
            "residual = {residual:.2e}, sum = {sum:.15}, min component = {:.3e}",
            p.iter().cloned().fold(f64::MAX, f64::min)
        ),
        elapsed,
        10.0,
    );
}

#[test]
fn criterion_11_scale_within_a_minute() {
    let mut rng = ChaCha12Rng::seed_from_u64(77);
    let weights: Vec<f64> = (0..100).map(|_| rng.random_range(0.01..1.0)).collect();
    let d = SymbolDistribution::from_weights(&weights).unwrap();
    let t0 = Instant::now();
    let r = replicate_estimate(ModelRef::First(&d), 100, 64, 100_000, 5, 3).unwrap();
    let elapsed = t0.elapsed().as_secs_f64() * 1e3;
    let pass = r.estimate.log_value.is_finite() && r.estimate.ratio > 0.0;
    report(
        11,
        "n = 100, m = 100 sampling scale",
        pass,
        &format!(
            "log10 G = {:.3}, ratio = {:.3e}, R = {:.2e}",
            r.estimate.log10_value(),
            r.estimate.ratio,
            r.rel_half_width
        ),
        elapsed,
        60_000.0,
    );
}

#[test]
fn criterion_12_normal_family_consistency() {
    let t0 = Instant::now();
    let nm = count_moments_analytic(&reference_dist());
    let mut worst = 0.0f64;
    let mut detail = String::new();
    for m in [10u32, 20, 40] {
        let b = guesswork_normal_binned(&nm, m, 64).unwrap().log_value;
        let i = guesswork_normal_integral(&nm, m).unwrap().log_value;
        let c = guesswork_normal_closed(&nm, m).unwrap().log_value;
        let lo = b.min(i).min(c);
        let hi = b.max(i).max(c);
        let spread = (hi - lo).exp() - 1.0;
        worst = worst.max(spread);
        detail.push_str(&format!(
            "m={m}: spread {:.2}% (binned/integral {:.2}%, closed off {:.2}%); ",
            spread * 100.0,
            ((b - i).exp() - 1.0).abs() * 100.0,
            ((c - i).exp() - 1.0).abs() * 100.0,
        ));
    }
    let elapsed = t0.elapsed().as_secs_f64() * 1e3;
    report(
        12,
        "normal family within 1%",
        worst <= 0.01,
        detail.trim_end_matches("; "),
        elapsed,
        5_000.0,
    );
}
