//! Modulus of continuity and the direct error bound built on it.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::analysis::grid::GridSpec;
use crate::error::{DnoError, Result};

/// `(10 e^2 - 3) / e^2`, the weight of `omega(g, 1/n)` in the direct bound.
pub const DIRECT_COEFFICIENT: f64 = 9.593_994_150_290_161;

/// Grid size used for moduli unless the caller says otherwise: `2^14 + 1`
/// points, so `1 / 2^j` steps are exact multiples of the spacing on `[0, 1]`.
pub const MODULUS_RESOLUTION: usize = 16_385;

/// `max_i (max - min)` of `values` over every window of `span + 1` consecutive entries.
pub fn windowed_range(values: &[f64], span: usize) -> f64 {
    if values.len() < 2 || span == 0 {
        return 0.0;
    }
    let width = span + 1;
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut best = 0.0f64;
    for (i, &v) in values.iter().enumerate() {
        while maxq.back().is_some_and(|&j| values[j] <= v) {
            maxq.pop_back();
        }
        maxq.push_back(i);
        while minq.back().is_some_and(|&j| values[j] >= v) {
            minq.pop_back();
        }
        minq.push_back(i);
        let start = (i + 1).saturating_sub(width);
        while maxq.front().is_some_and(|&j| j < start) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&j| j < start) {
            minq.pop_front();
        }
        best = best.max(values[maxq[0]] - values[minq[0]]);
    }
    best
}

/// Modulus of equispaced samples with the given spacing at step `h`:
/// all steps that are multiples of `spacing` up to `h`. Nondecreasing in `h`.
pub fn modulus_on_grid(values: &[f64], spacing: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(DnoError::Domain(format!("step must be positive, got {h}")));
    }
    let span = ((h / spacing) + 1e-9).floor() as usize;
    Ok(windowed_range(values, span.min(values.len().saturating_sub(1))))
}

/// `sup_{0 < s <= h} sup_x |g(x) - g(x + s)|` over `[a, b]`.
///
/// Samples `g` with spacing `h / m`, where `m` is the smallest integer giving
/// at least `grid.resolution` points on `[a, b]`, so steps of exactly `h`
/// are included. Steps larger than `b - a` are clamped to it.
pub fn modulus<G: Fn(f64) -> f64>(g: G, h: f64, a: f64, b: f64, grid: &GridSpec) -> Result<f64> {
    if !(h > 0.0) {
        return Err(DnoError::Domain(format!("step must be positive, got {h}")));
    }
    if !(a < b) {
        return Err(DnoError::Domain(format!("invalid interval [{a}, {b}]")));
    }
    if grid.resolution < 2 {
        return Err(DnoError::Config("modulus needs at least two grid points".into()));
    }
    let h = h.min(b - a);
    let coarse = (b - a) / (grid.resolution - 1) as f64;
    let m = ((h / coarse) - 1e-9).ceil().max(1.0);
    let spacing = h / m;
    let count = ((b - a) / spacing + 1e-9).floor() as usize;
    let mut values: Vec<f64> = (0..=count).map(|i| g(a + i as f64 * spacing)).collect();
    if a + count as f64 * spacing < b - 1e-12 * (b - a) {
        values.push(g(b));
    }
    Ok(windowed_range(&values, m as usize))
}

/// Terms of `2 tau + 2 d omega(g, eps) + DIRECT_COEFFICIENT omega(g, 1/n) + 3 e^{-n} (f_sup + tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectBound {
    pub radial_term: f64,
    pub norm_net_term: f64,
    pub resolution_term: f64,
    pub tail_term: f64,
    pub total: f64,
}

/// Upper bound on `sup |f - G|` for an operator built with `n` and `eps` from
/// a `tau`-radial `f` with profile `g` on `[0, 1]`.
pub fn direct_bound<G: Fn(f64) -> f64>(
    tau: f64,
    d: usize,
    g: G,
    n: usize,
    eps: f64,
    f_sup: f64,
    grid: &GridSpec,
) -> Result<DirectBound> {
    if !(tau >= 0.0) || !(eps > 0.0) || n == 0 || d == 0 || !(f_sup >= 0.0) {
        return Err(DnoError::Precondition(format!(
            "direct bound needs tau >= 0, eps > 0, n >= 1, d >= 1, f_sup >= 0 (got {tau}, {eps}, {n}, {d}, {f_sup})"
        )));
    }
    let radial_term = 2.0 * tau;
    let norm_net_term = 2.0 * d as f64 * modulus(&g, eps, 0.0, 1.0, grid)?;
    let resolution_term = DIRECT_COEFFICIENT * modulus(&g, 1.0 / n as f64, 0.0, 1.0, grid)?;
    let tail_term = 3.0 * (-(n as f64)).exp() * (f_sup + tau);
    Ok(DirectBound {
        radial_term,
        norm_net_term,
        resolution_term,
        tail_term,
        total: radial_term + norm_net_term + resolution_term + tail_term,
    })
}
