//! Parameter grids shared by the integration and acceptance targets.
#![allow(dead_code)]

use banditlab::{BanditParams, Order};

/// `{-2, -0.5, 0, 0.5, 2} x {0, 0.3} x {0, 1}` in `(α, β, c)`.
pub fn density_grid() -> Vec<BanditParams> {
    let mut out = Vec::with_capacity(20);
    for alpha in [-2.0, -0.5, 0.0, 0.5, 2.0] {
        for beta in [0.0, 0.3] {
            for centre in [0.0, 1.0] {
                out.push(BanditParams { alpha, beta, centre });
            }
        }
    }
    out
}

/// Fifty `(μ̄, μ_, order, a, b)` cases: five mean pairs, both orders, five intervals.
pub fn interval_cases() -> Vec<(f64, f64, Order, f64, f64)> {
    let pairs = [(0.2, -0.2), (0.1, -0.1), (0.5, 0.1), (0.0, -0.4), (1.0, -1.0)];
    let intervals = [(-0.5, 0.5), (-2.0, 1.0), (0.0, 0.3), (0.5, 3.0), (-3.0, -1.0)];
    let mut out = Vec::with_capacity(50);
    for &(hi, lo) in &pairs {
        for order in [Order::H0, Order::H1] {
            for &(a, b) in &intervals {
                out.push((hi, lo, order, a, b));
            }
        }
    }
    out
}
