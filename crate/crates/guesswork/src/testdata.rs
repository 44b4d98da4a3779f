//! Shared fixtures for unit tests: the ten-symbol reference distribution
//! used throughout the test suite.

/// Ten probabilities, sorted descending, summing to 1 exactly in decimal.
pub(crate) const REFERENCE_PROBS: [f64; 10] = [
    0.185430, 0.159282, 0.154767, 0.149299, 0.128534, 0.058154, 0.051858, 0.051490, 0.033738,
    0.027448,
];
