//! Shallow sigmoid nets realizing polynomials on `[-1, 1]`, and the square,
//! norm and product nets built from them.
//!
//! Every neuron has the form `c_j * sigma(mu_j t + t0)`. Its Taylor expansion
//! around `t0` matches the degree-`j` coefficient of the current polynomial;
//! the lower-order terms it introduces are subtracted before moving to degree
//! `j - 1`, and the shared constant `c_j sigma(t0)` is cancelled by a neuron
//! with zero input weight. Each step contributes at most `eps / k` of error.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::activation::{default_table, DEFAULT_MAX_ORDER};
use crate::analysis::grid::{ball_points, interval_points, GridSpec, VERIFICATION_SEED};
use crate::error::{DnoError, Result};
use crate::netcore::{Layer, LayeredNetwork};
use crate::par;
use crate::precision::Precision;

/// Below this accuracy the cancellation inside the nets needs double-word evaluation.
pub const EXTENDED_PRECISION_BELOW: f64 = 1e-3;
/// Accuracies at or below this are rejected: weights approach `1e13` and
/// the verification can no longer be trusted.
pub const CONDITIONING_FLOOR: f64 = 1e-5;
/// Significant bits kept in readout coefficients. Sums of a few of them, and
/// products with integers up to `2^12`, stay exact in binary64.
const READOUT_BITS: i32 = 40;
const MIN_DERIVATIVE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct PolyNetSpec {
    /// `u_0, ..., u_k`, lowest degree first.
    pub coefficients: Vec<f64>,
    pub eps: f64,
    /// Expansion point; `None` picks the one maximizing `min_j |sigma^{(j)}(t0)|`.
    pub t0: Option<f64>,
}

impl PolyNetSpec {
    pub fn new(coefficients: Vec<f64>, eps: f64) -> Self {
        Self { coefficients, eps, t0: None }
    }

    pub fn with_expansion_point(mut self, t0: f64) -> Self {
        self.t0 = Some(t0);
        self
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }
}

/// Rejects accuracies outside `(CONDITIONING_FLOOR, 1)`.
pub fn check_accuracy(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(DnoError::Precondition(format!("accuracy must lie in (0, 1), got {eps}")));
    }
    if eps <= CONDITIONING_FLOOR {
        return Err(DnoError::Conditioning(format!(
            "accuracy {eps:e} is at or below the floor {CONDITIONING_FLOOR:e}"
        )));
    }
    Ok(())
}

pub fn precision_for(eps: f64) -> Precision {
    if eps < EXTENDED_PRECISION_BELOW {
        Precision::Extended
    } else {
        Precision::Standard
    }
}

/// Point of `[0.1, 2]` maximizing `min_{1<=j<=k} |sigma^{(j)}(t0)|` on a 1e-3 grid.
pub fn default_expansion_point(k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let table = default_table();
    let score = |t: f64| (1..=k).map(|j| table.derivative_unchecked(j, t).abs()).fold(f64::INFINITY, f64::min);
    let mut best = (0.1, f64::NEG_INFINITY);
    for i in 0..=1900 {
        let t = 0.1 + i as f64 * 1e-3;
        let s = score(t);
        if s > best.1 {
            best = (t, s);
        }
    }
    best.0
}

/// Hidden neurons `(mu_j, c_j)` with `c_const` and readout constant; no verification.
struct Neurons {
    t0: f64,
    mu: Vec<f64>,
    c: Vec<f64>,
    constant: f64,
}

fn quantize(x: f64, quantum: f64) -> f64 {
    (x / quantum).round() * quantum
}

fn plan(spec: &PolyNetSpec, t0: f64, quantum: Option<f64>) -> Result<Neurons> {
    let k = spec.degree();
    let table = default_table();
    let step_eps = spec.eps / k as f64;
    let deriv: Vec<f64> = (0..=k + 1).map(|j| table.derivative_unchecked(j, t0)).collect();
    let mut u = spec.coefficients.clone();
    let (mut mu, mut c) = (Vec::new(), Vec::new());
    for j in (1..=k).rev() {
        let lead = u[j];
        if lead == 0.0 {
            continue;
        }
        let sup_next = table.sup_abs(j + 1)?;
        let m = (step_eps * deriv[j].abs() * (j + 1) as f64 / (lead.abs() * sup_next)).min(1.0);
        let mut factorial = 1.0;
        for i in 2..=j {
            factorial *= i as f64;
        }
        let mut cj = factorial * lead / (m.powi(j as i32) * deriv[j]);
        if let Some(q) = quantum {
            cj = quantize(cj, q);
        }
        // subtract the realized terms of degree 1..=j
        let mut fi = 1.0;
        for i in 1..=j {
            fi *= i as f64;
            u[i] -= cj * deriv[i] * m.powi(i as i32) / fi;
        }
        u[j] = 0.0;
        mu.push(m);
        c.push(cj);
    }
    Ok(Neurons { t0, mu, c, constant: u[0] })
}

fn assemble(n: &Neurons) -> Result<LayeredNetwork> {
    let mut weights = n.mu.clone();
    weights.push(0.0);
    let mut readout = n.c.clone();
    readout.push(-n.c.iter().sum::<f64>());
    let rows = weights.len();
    let layer = Layer::new(rows, 1, weights, vec![n.t0; rows])?;
    LayeredNetwork::new(1, vec![layer], readout, n.constant)
}

fn horner(u: &[f64], t: f64) -> f64 {
    u.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

/// Shallow net with at most `k + 1` neurons within `eps` of the polynomial on `[-1, 1]`.
pub fn construct_poly_net(spec: &PolyNetSpec) -> Result<LayeredNetwork> {
    check_accuracy(spec.eps)?;
    let u = &spec.coefficients;
    if u.is_empty() {
        return Err(DnoError::Precondition("polynomial has no coefficients".into()));
    }
    if let Some(v) = u.iter().find(|v| !v.is_finite()) {
        return Err(DnoError::Domain(format!("non-finite coefficient {v}")));
    }
    let k = spec.degree();
    if k > 0 && u[k] == 0.0 {
        return Err(DnoError::Precondition("leading coefficient is zero".into()));
    }
    if k + 1 > DEFAULT_MAX_ORDER {
        return Err(DnoError::Capability(format!("degree {k} exceeds the supported maximum {}", DEFAULT_MAX_ORDER - 1)));
    }
    if k == 0 {
        let layer = Layer::new(1, 1, vec![0.0], vec![0.0])?;
        return LayeredNetwork::new(1, vec![layer], vec![0.0], u[0]);
    }
    let t0 = spec.t0.unwrap_or_else(|| default_expansion_point(k));
    let table = default_table();
    for j in 1..=k {
        let v = table.derivative(j, t0)?;
        if v.abs() <= MIN_DERIVATIVE {
            return Err(DnoError::Precondition(format!(
                "|sigma^({j})(t0)| = {:.3e} at t0 = {t0} is too small",
                v.abs()
            )));
        }
    }
    let dry = plan(spec, t0, None)?;
    let largest = dry.c.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let quantum = (largest.log2().floor() as i32 - READOUT_BITS) as f64;
    let neurons = plan(spec, t0, Some(quantum.exp2()))?;
    let net = assemble(&neurons)?.with_min_precision(precision_for(spec.eps));

    let grid = GridSpec::default();
    let points = interval_points(-1.0, 1.0, &grid)?;
    let errors = par::map(&points, |&t| Ok::<_, DnoError>((net.evaluate(&[t])? - horner(u, t)).abs()));
    let measured = errors.into_iter().try_fold(0.0f64, |m, e| e.map(|e| m.max(e)))?;
    if !(measured <= spec.eps) {
        return Err(DnoError::Construction { measured, tolerance: spec.eps });
    }
    Ok(net)
}

/// Three-neuron net for `t^2` on `[-1, 1]`.
pub fn square_net(eps: f64) -> Result<LayeredNetwork> {
    construct_poly_net(&PolyNetSpec::new(vec![0.0, 0.0, 1.0], eps))
}

/// Width-`3d` net for `|x|^2` on the unit ball, accurate to `d * eps`.
pub fn norm_net(d: usize, eps: f64) -> Result<LayeredNetwork> {
    if d == 0 {
        return Err(DnoError::Precondition("dimension must be at least 1".into()));
    }
    let sq = square_net(eps)?;
    let inner = &sq.layers()[0];
    let m = inner.rows;
    let mut weights = vec![0.0; m * d * d];
    let mut bias = Vec::with_capacity(m * d);
    let mut readout = Vec::with_capacity(m * d);
    for i in 0..d {
        for j in 0..m {
            weights[(i * m + j) * d + i] = inner.weights[j];
            bias.push(inner.bias[j]);
            readout.push(sq.readout()[j]);
        }
    }
    let layer = Layer::new(m * d, d, weights, bias)?;
    let net = LayeredNetwork::new(d, vec![layer], readout, d as f64 * sq.readout_constant())?
        .with_min_precision(sq.min_precision());

    let tolerance = d as f64 * eps;
    let points = ball_points(d, &GridSpec::default())?;
    let errors = par::map(&points, |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        Ok::<_, DnoError>((net.evaluate(x)? - r2).abs())
    });
    let measured = errors.into_iter().try_fold(0.0f64, |m, e| e.map(|e| m.max(e)))?;
    if !(measured <= tolerance) {
        return Err(DnoError::Construction { measured, tolerance });
    }
    Ok(net)
}

/// Nine-neuron net for `(t, t') -> t t'` on `[-1, 1]^2`, from
/// `t t' = 2 ((t + t') / 2)^2 - t^2 / 2 - t'^2 / 2` with square nets of accuracy `eps / 3`.
pub fn product_gate(eps: f64) -> Result<LayeredNetwork> {
    check_accuracy(eps)?;
    let sq = square_net(eps / 3.0)?;
    let inner = &sq.layers()[0];
    let m = inner.rows;
    let mut weights = Vec::with_capacity(6 * m);
    let mut bias = Vec::with_capacity(3 * m);
    let mut readout = Vec::with_capacity(3 * m);
    let blocks: [([f64; 2], f64); 3] = [([0.5, 0.5], 2.0), ([1.0, 0.0], -0.5), ([0.0, 1.0], -0.5)];
    for (direction, scale) in blocks {
        for j in 0..m {
            weights.extend(direction.iter().map(|v| v * inner.weights[j]));
            bias.push(inner.bias[j]);
            readout.push(scale * sq.readout()[j]);
        }
    }
    let layer = Layer::new(3 * m, 2, weights, bias)?;
    let net = LayeredNetwork::new(2, vec![layer], readout, sq.readout_constant())?.with_min_precision(sq.min_precision());

    let side = 200;
    let h = 2.0 / (side - 1) as f64;
    let mut points: Vec<[f64; 2]> = (0..side * side)
        .map(|i| [-1.0 + (i / side) as f64 * h, -1.0 + (i % side) as f64 * h])
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(VERIFICATION_SEED);
    points.extend((0..1000).map(|_| [rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)]));
    let errors = par::map(&points, |p| Ok::<_, DnoError>((net.evaluate(p)? - p[0] * p[1]).abs()));
    let measured = errors.into_iter().try_fold(0.0f64, |m, e| e.map(|e| m.max(e)))?;
    if !(measured <= eps) {
        return Err(DnoError::Construction { measured, tolerance: eps });
    }
    Ok(net)
}
