//! Log-domain helpers. Guesswork values reach n^m for alphabet sizes around
//! a hundred and word lengths in the hundreds, far past f64 range, so every
//! accumulation that can grow like n^m runs on natural-log representatives.

/// ln(exp(a) + exp(b)), stable for any ordering, with -inf as the empty sum.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// ln(Σ exp(x_i)) over a slice; returns -inf for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let mut hi = f64::NEG_INFINITY;
    for &x in xs {
        if x > hi {
            hi = x;
        }
    }
    if hi == f64::NEG_INFINITY || !hi.is_finite() {
        return hi;
    }
    let mut s = 0.0;
    for &x in xs {
        s += (x - hi).exp();
    }
    hi + s.ln()
}

/// Neumaier-compensated sum for long positive accumulations.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
