//! Language models of order zero, one and two: a sorted symbol distribution
//! for the i.i.d. case and a Markov digram source, plus digram-table
//! ingestion, stationary distributions and entropies of all three orders.

use crate::error::{Error, Result};
use crate::logsum::CompensatedSum;

/// Tolerance for accepting an externally supplied probability vector as
/// normalized before snapping it to an exact sum of 1.
const SUM_TOLERANCE: f64 = 1e-6;

/// Row sums of a stochastic matrix must hold to this.
const ROW_SUM_TOLERANCE: f64 = 1e-12;

/// Fixed-point residual required of a stationary vector.
const STATIONARY_TOLERANCE: f64 = 1e-10;

/// First-order model: symbol probabilities sorted in decreasing order.
///
/// Construction normalizes exactly and keeps the permutation back to the
/// caller's original ordering for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolDistribution {
    probs: Vec<f64>,
    /// `permutation[rank]` = index of that symbol in the caller's input.
    permutation: Vec<usize>,
}

impl SymbolDistribution {
    /// Accepts a probability vector. Entries must be positive and sum to 1
    /// within 1e-6; the vector is then renormalized exactly and sorted in
    /// decreasing order. Use [`SymbolDistribution::from_weights`] for raw
    /// weights that carry explicit normalize intent.
    pub fn from_probs(raw: &[f64]) -> Result<Self> {
        let sum = Self::validate_positive(raw)?;
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self::build(raw, sum))
    }

    /// Accepts arbitrary positive weights and normalizes them.
    pub fn from_weights(raw: &[f64]) -> Result<Self> {
        let sum = Self::validate_positive(raw)?;
        Ok(Self::build(raw, sum))
    }

    /// Uniform distribution on `n` symbols.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        Ok(Self {
            probs: vec![1.0 / n as f64; n],
            permutation: (0..n).collect(),
        })
    }

    /// Parses the distribution file format: one probability per line,
    /// `#` starts a comment, blank lines ignored.
    pub fn parse(text: &str, normalize: bool) -> Result<Self> {
        let mut vals = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let v: f64 = body.parse().map_err(|e| Error::Parse {
                what: "distribution file",
                detail: format!("line {}: {e}", lineno + 1),
            })?;
            vals.push(v);
        }
        if normalize {
            Self::from_weights(&vals)
        } else {
            Self::from_probs(&vals)
        }
    }

    fn validate_positive(raw: &[f64]) -> Result<f64> {
        if raw.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut sum = CompensatedSum::new();
        for (index, &value) in raw.iter().enumerate() {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::NonPositiveProbability { index, value });
            }
            sum.add(value);
        }
        Ok(sum.value())
    }

    fn build(raw: &[f64], sum: f64) -> Self {
        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by(|&a, &b| raw[b].total_cmp(&raw[a]).then(a.cmp(&b)));
        let probs = order.iter().map(|&i| raw[i] / sum).collect();
        Self {
            probs,
            permutation: order,
        }
    }

    /// Probabilities in decreasing order.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Alphabet size n.
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// For each rank (descending probability), the position of that symbol
    /// in the original input.
    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    /// Largest probability p1.
    pub fn p_max(&self) -> f64 {
        self.probs[0]
    }

    /// Smallest probability p_n (positive by construction).
    pub fn p_min(&self) -> f64 {
        *self.probs.last().unwrap()
    }

    /// ln(p1/pn): the per-symbol quantization span of the histogram module.
    pub fn log_span(&self) -> f64 {
        (self.p_max() / self.p_min()).ln()
    }

    /// Single-symbol Shannon entropy in nats.
    pub fn entropy_nats(&self) -> f64 {
        let mut h = CompensatedSum::new();
        for &p in &self.probs {
            h.add(-p * p.ln());
        }
        h.value()
    }
}

/// Raw digram occurrence counts with symbol labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigramCountTable {
    counts: Vec<Vec<u64>>,
    labels: Vec<String>,
}

impl DigramCountTable {
    pub fn new(counts: Vec<Vec<u64>>, labels: Vec<String>) -> Result<Self> {
        let n = counts.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if labels.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} rows",
                labels.len(),
                n
            )));
        }
        for (row, r) in counts.iter().enumerate() {
            if r.len() != n {
                return Err(Error::RaggedRow {
                    row,
                    expected: n,
                    found: r.len(),
                });
            }
            if r.iter().all(|&c| c == 0) {
                return Err(Error::ZeroRow { row });
            }
        }
        Ok(Self { counts, labels })
    }

    /// Parses a whitespace-separated integer matrix. A leading row of
    /// non-numeric tokens is taken as column labels; a non-numeric first
    /// token on each data row is taken as a row label. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<&str>> = Vec::new();
        for line in text.lines() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            rows.push(body.split_whitespace().collect());
        }
        if rows.is_empty() {
            return Err(Error::EmptyInput);
        }

        let is_num = |t: &str| t.parse::<i64>().is_ok();
        let header: Option<Vec<String>> = if rows[0].iter().any(|t| !is_num(t)) {
            Some(rows.remove(0).iter().map(|s| s.to_string()).collect())
        } else {
            None
        };
        if rows.is_empty() {
            return Err(Error::EmptyInput);
        }
        let row_labels = !is_num(rows[0][0]);

        let mut labels = Vec::new();
        let mut counts = Vec::new();
        let expected_cols = rows[0].len() - usize::from(row_labels);
        for (rowno, toks) in rows.iter().enumerate() {
            let (label, data) = if row_labels {
                (toks[0].to_string(), &toks[1..])
            } else {
                (format!("{rowno}"), &toks[..])
            };
            if data.len() != expected_cols {
                return Err(Error::RaggedRow {
                    row: rowno,
                    expected: expected_cols,
                    found: data.len(),
                });
            }
            let mut row = Vec::with_capacity(data.len());
            for (col, tok) in data.iter().enumerate() {
                let v: i64 = tok.parse().map_err(|e| Error::Parse {
                    what: "digram table",
                    detail: format!("row {rowno}, column {col}: {e}"),
                })?;
                if v < 0 {
                    return Err(Error::NegativeCount { row: rowno, col });
                }
                row.push(v as u64);
            }
            labels.push(label);
            counts.push(row);
        }
        if let Some(h) = header {
            let offset = h.len() - expected_cols; // tolerate a corner token
            let col_labels: Vec<String> = h[offset..].to_vec();
            if row_labels && col_labels != labels {
                return Err(Error::DimensionMismatch(
                    "row labels do not match column labels".into(),
                ));
            }
            if !row_labels {
                labels = col_labels;
            }
        }
        Self::new(counts, labels)
    }

    /// The digram table from the bundled English data file.
    pub fn bundled_english() -> Self {
        Self::parse(ENGLISH_DIGRAMS).expect("bundled English digram table must parse")
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn count(&self, row: usize, col: usize) -> u64 {
        self.counts[row][col]
    }

    /// Index of a label, if present.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Row-normalizes the counts into a Markov source with the transition
    /// matrix set and the initial distribution left at the stationary
    /// solution of that matrix.
    pub fn normalize_rows(&self) -> Result<MarkovSource> {
        let n = self.len();
        let mut transitions = vec![vec![0.0f64; n]; n];
        for (i, row) in self.counts.iter().enumerate() {
            let total: u64 = row.iter().sum();
            debug_assert!(total > 0, "zero rows rejected at construction");
            for (j, &c) in row.iter().enumerate() {
                transitions[i][j] = c as f64 / total as f64;
            }
        }
        MarkovSource::from_transitions(transitions, self.labels.clone())
    }
}

const ENGLISH_DIGRAMS: &str = include_str!(concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../../data/english_digrams.txt"
));

/// Second-order model: initial symbol distribution plus a row-stochastic
/// transition matrix P with P[i][j] = Pr(next = j | current = i).
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovSource {
    initial: Vec<f64>,
    transitions: Vec<Vec<f64>>,
    labels: Vec<String>,
    stationary: bool,
}

impl MarkovSource {
    /// Builds a source from a transition matrix, solving for the stationary
    /// distribution to use as the initial vector.
    pub fn from_transitions(transitions: Vec<Vec<f64>>, labels: Vec<String>) -> Result<Self> {
        Self::validate_transitions(&transitions)?;
        let initial = stationary_distribution(&transitions)?;
        Ok(Self {
            initial,
            transitions,
            labels,
            stationary: true,
        })
    }

    /// Builds a source with an explicit initial distribution (not required
    /// to be stationary).
    pub fn with_initial(
        initial: Vec<f64>,
        transitions: Vec<Vec<f64>>,
        labels: Vec<String>,
    ) -> Result<Self> {
        Self::validate_transitions(&transitions)?;
        if initial.len() != transitions.len() {
            return Err(Error::DimensionMismatch(format!(
                "initial vector length {} vs {} states",
                initial.len(),
                transitions.len()
            )));
        }
        let mut sum = 0.0;
        for (index, &value) in initial.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::NonPositiveProbability { index, value });
            }
            sum += value;
        }
        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE.max(SUM_TOLERANCE) {
            return Err(Error::NotNormalized { sum });
        }
        let initial: Vec<f64> = initial.iter().map(|v| v / sum).collect();
        let stationary = fixed_point_residual(&transitions, &initial) < STATIONARY_TOLERANCE;
        Ok(Self {
            initial,
            transitions,
            labels,
            stationary,
        })
    }

    fn validate_transitions(transitions: &[Vec<f64>]) -> Result<()> {
        let n = transitions.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        for (row, r) in transitions.iter().enumerate() {
            if r.len() != n {
                return Err(Error::RaggedRow {
                    row,
                    expected: n,
                    found: r.len(),
                });
            }
            let mut sum = 0.0;
            for (col, &p) in r.iter().enumerate() {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::NegativeCount { row, col });
                }
                sum += p;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::NotNormalized { sum });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn transitions(&self) -> &[Vec<f64>] {
        &self.transitions
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Whether the initial vector satisfies the stationary fixed point.
    pub fn is_stationary(&self) -> bool {
        self.stationary
    }

    /// Initial distribution as a sorted first-order model (used for the
    /// first-order view of a digram source).
    pub fn marginal_distribution(&self) -> Result<SymbolDistribution> {
        // Components can be zero in pathological chains; the first-order
        // model requires strictly positive entries.
        SymbolDistribution::from_weights(&self.initial)
    }

    /// Largest / smallest initial probability and largest / smallest
    /// nonzero transition probability: the loose bounds that set the
    /// quantization histogram's range.
    pub fn range_bounds(&self) -> RangeBounds {
        let mut p_max = f64::MIN;
        let mut p_min = f64::MAX;
        for &p in &self.initial {
            p_max = p_max.max(p);
            if p > 0.0 {
                p_min = p_min.min(p);
            }
        }
        let mut t_max = f64::MIN;
        let mut t_min = f64::MAX;
        for row in &self.transitions {
            for &p in row {
                if p > 0.0 {
                    t_max = t_max.max(p);
                    t_min = t_min.min(p);
                }
            }
        }
        RangeBounds {
            p_max,
            p_min_positive: p_min,
            t_max,
            t_min_positive: t_min,
        }
    }
}

/// Extremes used for the second-order log-product range.
#[derive(Debug, Clone, Copy)]
pub struct RangeBounds {
    pub p_max: f64,
    pub p_min_positive: f64,
    pub t_max: f64,
    pub t_min_positive: f64,
}

/// Residual ‖Pᵀp − p‖∞ of the stationary fixed point.
pub fn fixed_point_residual(transitions: &[Vec<f64>], p: &[f64]) -> f64 {
    let n = p.len();
    let mut worst = 0.0f64;
    for j in 0..n {
        let mut acc = 0.0;
        for i in 0..n {
            acc += transitions[i][j] * p[i];
        }
        worst = worst.max((acc - p[j]).abs());
    }
    worst
}

/// Solves (Pᵀ − I)p = 0 with Σp = 1 by direct elimination, falling back to
/// power iteration when the linear solve produces negative components or a
/// residual above tolerance.
pub fn stationary_distribution(transitions: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = transitions.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if n == 1 {
        return Ok(vec![1.0]);
    }

    if let Some(p) = stationary_linear(transitions) {
        if p.iter().all(|&v| v >= 0.0)
            && fixed_point_residual(transitions, &p) < STATIONARY_TOLERANCE
        {
            return Ok(p);
        }
    }
    stationary_power(transitions)
}

/// Direct solve: rows of (Pᵀ − I), last equation replaced by Σp = 1.
/// Gaussian elimination with partial pivoting; None when singular.
fn stationary_linear(transitions: &[Vec<f64>]) -> Option<Vec<f64>> {
    let n = transitions.len();
    let mut a = vec![vec![0.0f64; n + 1]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = transitions[j][i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    a[n - 1][..=n].fill(1.0);

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r1, &r2| a[r1][col].abs().total_cmp(&a[r2][col].abs()))
            .unwrap();
        if a[pivot][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, pivot);
        let pivot_row = a[col].clone();
        for (row, r) in a.iter_mut().enumerate() {
            if row == col {
                continue;
            }
            let f = r[col] / pivot_row[col];
            if f == 0.0 {
                continue;
            }
            for (cell, p) in r[col..].iter_mut().zip(&pivot_row[col..]) {
                *cell -= f * p;
            }
        }
    }
    let mut p = vec![0.0; n];
    for i in 0..n {
        p[i] = a[i][n] / a[i][i];
    }
    // renormalize exactly; elimination drift is at machine scale
    let s: f64 = p.iter().sum();
    if s <= 0.0 || !s.is_finite() {
        return None;
    }
    for v in &mut p {
        *v /= s;
    }
    Some(p)
}

const POWER_ITERATION_CAP: usize = 1_000_000;
const POWER_ITERATION_TOL: f64 = 1e-12;

fn stationary_power(transitions: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = transitions.len();
    let mut p = vec![1.0 / n as f64; n];
    let mut next = vec![0.0f64; n];
    for _ in 0..POWER_ITERATION_CAP {
        for v in next.iter_mut() {
            *v = 0.0;
        }
        for (row, &pi) in transitions.iter().zip(&p) {
            if pi == 0.0 {
                continue;
            }
            for (nj, &t) in next.iter_mut().zip(row) {
                *nj += t * pi;
            }
        }
        let s: f64 = next.iter().sum();
        let mut delta = 0.0f64;
        for j in 0..n {
            next[j] /= s;
            delta = delta.max((next[j] - p[j]).abs());
        }
        std::mem::swap(&mut p, &mut next);
        if delta < POWER_ITERATION_TOL {
            if fixed_point_residual(transitions, &p) < STATIONARY_TOLERANCE {
                return Ok(p);
            }
            return Err(Error::StationaryNonConvergence);
        }
    }
    Err(Error::StationaryNonConvergence)
}

/// Entropy of an m-symbol word in base-b digits, carrying the model order
/// and enough metadata to convert back to raw guess counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyValue {
    /// Entropy in base-`base` units.
    pub value: f64,
    /// Base of the logarithm (strictly greater than 1).
    pub base: f64,
    /// Model order: 0, 1 or 2.
    pub order: u8,
    /// Word length m.
    pub word_length: u32,
    /// Alphabet size n.
    pub alphabet_size: usize,
}

impl EntropyValue {
    /// The same entropy in nats.
    pub fn nats(&self) -> f64 {
        self.value * self.base.ln()
    }
}

/// Zero-order word entropy: m·log_b(n).
pub fn entropy_order0(n: usize, m: u32, base: f64) -> EntropyValue {
    EntropyValue {
        value: f64::from(m) * (n as f64).ln() / base.ln(),
        base,
        order: 0,
        word_length: m,
        alphabet_size: n,
    }
}

/// First-order word entropy: m·Σ p_i log_b(1/p_i).
pub fn entropy_order1(dist: &SymbolDistribution, m: u32, base: f64) -> EntropyValue {
    EntropyValue {
        value: f64::from(m) * dist.entropy_nats() / base.ln(),
        base,
        order: 1,
        word_length: m,
        alphabet_size: dist.len(),
    }
}

/// Second-order word entropy via the chain rule,
/// H = H(X1) + Σ_{k=2..m} H(X_k | X_{k-1}), where the conditional term at
/// step k weights the per-row transition entropies by the marginal
/// distribution of X_{k-1}, advanced with q ← Pᵀq. The convention
/// 0·log(1/0) = 0 applies throughout (zero transitions carry no mass).
pub fn entropy_order2(source: &MarkovSource, m: u32, base: f64) -> EntropyValue {
    let n = source.len();
    let row_entropy: Vec<f64> = source
        .transitions()
        .iter()
        .map(|row| {
            let mut h = 0.0;
            for &p in row {
                if p > 0.0 {
                    h -= p * p.ln();
                }
            }
            h
        })
        .collect();

    let mut h = CompensatedSum::new();
    for &p in source.initial() {
        if p > 0.0 {
            h.add(-p * p.ln());
        }
    }

    let mut q = source.initial().to_vec();
    let mut next = vec![0.0f64; n];
    for _step in 2..=m {
        let cond: f64 = q.iter().zip(&row_entropy).map(|(qi, hi)| qi * hi).sum();
        h.add(cond);

        for v in next.iter_mut() {
            *v = 0.0;
        }
        for (row, &qi) in source.transitions().iter().zip(&q) {
            if qi == 0.0 {
                continue;
            }
            for (nj, &t) in next.iter_mut().zip(row) {
                *nj += t * qi;
            }
        }
        std::mem::swap(&mut q, &mut next);
    }

    EntropyValue {
        value: h.value() / base.ln(),
        base,
        order: 2,
        word_length: m,
        alphabet_size: n,
    }
}
