//! The common result type every estimator returns: a guesswork value carried
//! in log domain with method metadata and an optional error interval.

use std::fmt;

/// How a guesswork value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Exact,
    Quantify,
    Sample,
    NormalBinned,
    NormalIntegral,
    NormalErf,
    LeadingTerm,
    Massey,
    Arikan,
    EntropyAnsatz,
}

impl Method {
    pub const ALL: [Method; 10] = [
        Method::Exact,
        Method::Quantify,
        Method::Sample,
        Method::NormalBinned,
        Method::NormalIntegral,
        Method::NormalErf,
        Method::LeadingTerm,
        Method::Massey,
        Method::Arikan,
        Method::EntropyAnsatz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Quantify => "quantify",
            Method::Sample => "sample",
            Method::NormalBinned => "normal-binned",
            Method::NormalIntegral => "normal-integral",
            Method::NormalErf => "normal-erf",
            Method::LeadingTerm => "leading-term",
            Method::Massey => "massey",
            Method::Arikan => "arikan",
            Method::EntropyAnsatz => "entropy-ansatz",
        }
    }

    pub fn from_name(s: &str) -> Option<Method> {
        Method::ALL.iter().copied().find(|m| m.name() == s)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Run parameters attached to an estimate, populated as applicable.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EstimateParams {
    pub m: u32,
    pub n: usize,
    pub bins: Option<u32>,
    pub samples: Option<u64>,
    pub replicates: Option<u32>,
    pub seed: Option<u64>,
}

impl EstimateParams {
    pub fn new(n: usize, m: u32) -> Self {
        Self {
            m,
            n,
            ..Self::default()
        }
    }
}

/// A guesswork value in natural-log domain.
#[derive(Debug, Clone, PartialEq)]
pub struct GuessworkEstimate {
    /// ln(G).
    pub log_value: f64,
    /// G / n^m, always representable (it lives in (0, 1] up to estimator noise).
    pub ratio: f64,
    pub method: Method,
    /// Optional log-domain (lower, upper) bounds on ln(G).
    pub interval: Option<(f64, f64)>,
    pub params: EstimateParams,
}

impl GuessworkEstimate {
    pub fn new(log_value: f64, method: Method, params: EstimateParams) -> Self {
        let ratio = (log_value - params.m as f64 * (params.n as f64).ln()).exp();
        Self {
            log_value,
            ratio,
            method,
            interval: None,
            params,
        }
    }

    pub fn with_interval(mut self, lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= self.log_value && self.log_value <= hi);
        self.interval = Some((lo, hi));
        self
    }

    /// G itself, infinite when it exceeds f64 range.
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }

    /// log10(G), the scale the sweep output reports.
    pub fn log10_value(&self) -> f64 {
        self.log_value / std::f64::consts::LN_10
    }
}
