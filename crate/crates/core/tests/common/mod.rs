#![allow(dead_code)]

use prioq_core::ctmc::{auto_truncate, TruncationOutcome, TruncationSpec};
use prioq_core::ModelParams;

/// Stable points used across the oracle tests, degenerate ones included.
pub const GRID: [(f64, f64, f64); 5] = [
    (1.0, 1.0, 4.0),
    (2.0, 1.0, 5.0),
    (0.5, 2.0, 4.0),
    (1.0, 0.0, 2.0),
    (0.0, 1.0, 2.0),
];

pub fn params(l1: f64, l2: f64, mu: f64) -> ModelParams {
    ModelParams::new(l1, l2, mu).unwrap()
}

pub fn solve(p: &ModelParams) -> TruncationOutcome {
    let out = auto_truncate(p, &TruncationSpec::default()).unwrap();
    assert!(out.tail_mass() < 1e-12);
    out
}

pub fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

/// `F0_2'(1)` from symbolic differentiation of the boundary function.
pub fn exact_f02_prime(p: &ModelParams) -> f64 {
    let (a, b, m) = (p.lambda1, p.lambda2, p.mu);
    let num = a.powi(3) + 3.0 * a * a * b - a * a * m + 2.0 * a * b * b - a * b * m - a * m * m
        + m.powi(3);
    b * num / ((m - a) * (m + a).powi(2) * (m - a - b))
}
