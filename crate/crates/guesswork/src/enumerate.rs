//! Exhaustive word enumeration shared by the exact oracle and the full
//! histogram backend.
//!
//! Words are walked odometer-style with a prefix-sum of per-symbol logs, so
//! each word's log-product is the exact left-to-right sum of its symbol
//! terms regardless of where a parallel chunk starts. That keeps results
//! bit-independent of the partitioning; only the final reduction order is
//! fixed separately by merging chunk results in index order.

use rayon::prelude::*;

/// Log-probability view of a first- or second-order model.
pub(crate) enum WordModel<'a> {
    First {
        log_probs: &'a [f64],
    },
    Second {
        log_initial: Vec<f64>,
        log_trans: Vec<Vec<f64>>,
    },
}

impl<'a> WordModel<'a> {
    pub fn first(probs: &'a [f64], scratch: &'a mut Vec<f64>) -> Self {
        scratch.clear();
        scratch.extend(probs.iter().map(|p| p.ln()));
        WordModel::First { log_probs: scratch }
    }

    pub fn second(initial: &[f64], transitions: &[Vec<f64>]) -> Self {
        let log = |p: f64| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY };
        WordModel::Second {
            log_initial: initial.iter().map(|&p| log(p)).collect(),
            log_trans: transitions
                .iter()
                .map(|row| row.iter().map(|&p| log(p)).collect())
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            WordModel::First { log_probs } => log_probs.len(),
            WordModel::Second { log_initial, .. } => log_initial.len(),
        }
    }
}

/// Walks one chunk of the word space, invoking `visit` with each word's
/// log-product.
struct Odometer<'a> {
    model: &'a WordModel<'a>,
    digits: Vec<usize>,
    /// prefix[k] = log product of digits[0..=k]
    prefix: Vec<f64>,
}

impl<'a> Odometer<'a> {
    fn new(model: &'a WordModel<'a>, m: usize, start: u64) -> Self {
        let n = model.n() as u64;
        let mut digits = vec![0usize; m];
        let mut w = start;
        for k in (0..m).rev() {
            digits[k] = (w % n) as usize;
            w /= n;
        }
        let mut o = Self {
            model,
            digits,
            prefix: vec![0.0; m],
        };
        o.recompute_from(0);
        o
    }

    #[inline]
    fn term(&self, k: usize) -> f64 {
        match self.model {
            WordModel::First { log_probs } => log_probs[self.digits[k]],
            WordModel::Second {
                log_initial,
                log_trans,
            } => {
                if k == 0 {
                    log_initial[self.digits[0]]
                } else {
                    log_trans[self.digits[k - 1]][self.digits[k]]
                }
            }
        }
    }

    fn recompute_from(&mut self, k: usize) {
        for i in k..self.digits.len() {
            let t = self.term(i);
            self.prefix[i] = if i == 0 { t } else { self.prefix[i - 1] + t };
        }
    }

    #[inline]
    fn log_product(&self) -> f64 {
        self.prefix[self.digits.len() - 1]
    }

    /// Advances to the next word; `false` once the space is exhausted.
    fn advance(&mut self) -> bool {
        let n = self.model.n();
        let m = self.digits.len();
        let mut k = m;
        while k > 0 {
            k -= 1;
            self.digits[k] += 1;
            if self.digits[k] < n {
                self.recompute_from(k);
                return true;
            }
            self.digits[k] = 0;
        }
        false
    }
}

/// Number of words per parallel chunk. Large enough to amortize odometer
/// setup, small enough to spread across cores.
const CHUNK: u64 = 1 << 16;

/// Folds every word's log-product into per-chunk accumulators, merging them
/// in ascending chunk order.
pub(crate) fn fold_words<A, Init, Fold, Merge>(
    model: &WordModel<'_>,
    m: u32,
    total: u64,
    init: Init,
    fold: Fold,
    merge: Merge,
) -> A
where
    A: Send,
    Init: Fn() -> A + Sync,
    Fold: Fn(&mut A, f64) + Sync,
    Merge: Fn(A, A) -> A,
{
    let m = m as usize;
    let chunks = total.div_ceil(CHUNK).max(1);
    let parts: Vec<A> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(total);
            let mut acc = init();
            if start >= end {
                return acc;
            }
            let mut odo = Odometer::new(model, m, start);
            let mut i = start;
            loop {
                fold(&mut acc, odo.log_product());
                i += 1;
                if i >= end || !odo.advance() {
                    break;
                }
            }
            acc
        })
        .collect();
    parts.into_iter().reduce(merge).unwrap_or_else(init)
}

/// Collects all log-products into a vector indexed by word number.
pub(crate) fn collect_log_products(model: &WordModel<'_>, m: u32, total: u64) -> Vec<f64> {
    let m = m as usize;
    let mut out = vec![0.0f64; total as usize];
    let chunks: Vec<(u64, &mut [f64])> = {
        let mut rest = out.as_mut_slice();
        let mut start = 0u64;
        let mut v = Vec::new();
        while !rest.is_empty() {
            let take = (CHUNK as usize).min(rest.len());
            let (head, tail) = rest.split_at_mut(take);
            v.push((start, head));
            start += take as u64;
            rest = tail;
        }
        v
    };
    chunks.into_par_iter().for_each(|(start, slot)| {
        let mut odo = Odometer::new(model, m, start);
        let last = slot.len() - 1;
        for (k, cell) in slot.iter_mut().enumerate() {
            *cell = odo.log_product();
            if k < last {
                odo.advance();
            }
        }
    });
    out
}
