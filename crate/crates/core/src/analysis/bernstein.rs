//! Derivative bounds for the univariate operator and the inverse inequality.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::grid::{interval_points, GridSpec};
use crate::analysis::modulus::{modulus, MODULUS_RESOLUTION};
use crate::constructor::{build_univariate, UnivariateOperator};
use crate::error::{DnoError, Result};
use crate::par;

fn sup_derivative(op: &UnivariateOperator, grid: &GridSpec) -> Result<f64> {
    let points = interval_points(-1.0, 1.0, grid)?;
    Ok(par::map(&points, |&t| op.derivative(t).abs()).into_iter().fold(0.0, f64::max))
}

/// `sup_{[-1,1]} |G*'| / (n max_k |beta_k|)`.
pub fn bernstein_ratio(op: &UnivariateOperator, grid: &GridSpec) -> Result<f64> {
    let scale = op.max_abs_coefficient();
    if scale == 0.0 {
        return Err(DnoError::UndefinedRatio("all coefficients are zero".into()));
    }
    Ok(sup_derivative(op, grid)? / (op.n() as f64 * scale))
}

/// `sup_{[-1,1]} |G*'| / (sup |g*'| + n e^{-n} sup |g*|)`.
pub fn bernstein_smooth_ratio(op: &UnivariateOperator, g_deriv_sup: f64, g_sup: f64, grid: &GridSpec) -> Result<f64> {
    let n = op.n() as f64;
    let denominator = g_deriv_sup + n * (-n).exp() * g_sup;
    if !(denominator > 0.0) || !denominator.is_finite() {
        return Err(DnoError::UndefinedRatio(format!("denominator {denominator}")));
    }
    Ok(sup_derivative(op, grid)? / denominator)
}

/// Operator sampling a random `+-1` function at the `2n + 1` distinct nodes
/// (the clamped end coefficients repeat the end values).
pub fn random_sign_operator<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<UnivariateOperator> {
    let signs: Vec<f64> = (0..=2 * n).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
    build_univariate(|t| signs[((t + 1.0) * n as f64).round() as usize], n)
}

/// `max / min` of a list of positive values.
pub fn spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseEntry {
    pub n: usize,
    /// `omega(g*, 1/n) + ||g*|| / n`.
    pub smoothness: f64,
    /// `(1/n) sum_{k=1}^n sup |g* - G*_k|`.
    pub mean_error: f64,
    pub c_hat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseCheck {
    pub entries: Vec<InverseEntry>,
    /// `n` values whose denominator vanished.
    pub skipped: Vec<usize>,
    /// Sup errors `E_k` for `k = 1..=max n`.
    pub errors: Vec<f64>,
}

impl InverseCheck {
    pub fn spread(&self) -> f64 {
        spread(&self.entries.iter().map(|e| e.c_hat).collect::<Vec<_>>())
    }
}

/// Ratios `C_n = [omega(g*, 1/n) + ||g*|| / n] / [(1/n) sum_{k<=n} ||g* - G*_k||]`.
pub fn inverse_check<G: Fn(f64) -> f64 + Sync + Send>(g: G, n_list: &[usize], grid: &GridSpec) -> Result<InverseCheck> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) || n_list[0] == 0 {
        return Err(DnoError::Config("n list must be nonempty, positive and strictly increasing".into()));
    }
    let top = *n_list.last().unwrap();
    let points = interval_points(-1.0, 1.0, grid)?;
    let targets: Vec<f64> = points.iter().map(|&t| g(t)).collect();
    if let Some(i) = targets.iter().position(|v| !v.is_finite()) {
        return Err(DnoError::Data { index: i, point: vec![points[i]] });
    }
    let sup_norm = targets.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let ks: Vec<usize> = (1..=top).collect();
    let errors = par::map(&ks, |&k| -> Result<f64> {
        let op = build_univariate(&g, k)?;
        Ok(points.iter().zip(&targets).map(|(&t, &v)| (v - op.evaluate(t)).abs()).fold(0.0, f64::max))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let modulus_grid = GridSpec::new(MODULUS_RESOLUTION.max(grid.resolution), 0, grid.seed);
    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    for &n in n_list {
        let mean_error = errors[..n].iter().sum::<f64>() / n as f64;
        if mean_error == 0.0 {
            skipped.push(n);
            continue;
        }
        let smoothness = modulus(&g, 1.0 / n as f64, -1.0, 1.0, &modulus_grid)? + sup_norm / n as f64;
        entries.push(InverseEntry { n, smoothness, mean_error, c_hat: smoothness / mean_error });
    }
    Ok(InverseCheck { entries, skipped, errors })
}
