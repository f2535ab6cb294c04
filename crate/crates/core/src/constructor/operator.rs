//! Partition-of-unity operators: `t -> sum_k beta_k phi(n t - k + 2n)` on
//! `[-1, 1]`, and its composition with the norm net on the unit ball.

use serde::{Deserialize, Serialize};

use crate::activation::{bell_derivative_unchecked, bell_unchecked};
use crate::constructor::polynet::{check_accuracy, norm_net};
use crate::error::{DnoError, Result};
use crate::netcore::{Layer, LayeredNetwork, NetworkFile};
use crate::precision::{CompensatedSum, Precision};

/// Bell terms with `|argument|` beyond this are dropped; each is below `1.2 e^{-40}`.
pub const BELL_WINDOW: f64 = 40.0;

const OPERATOR_FORMAT: &str = "dno-operator";
const OPERATOR_VERSION: u32 = 1;

/// Last-coordinate value of node `k`: `(k - 2n) / n` clamped to `[-1, 1]`.
pub fn node_coordinate(n: usize, k: usize) -> f64 {
    if k < n {
        -1.0
    } else if k > 3 * n {
        1.0
    } else {
        (k as f64 - 2.0 * n as f64) / n as f64
    }
}

/// The `4n + 1` points `(0, ..., 0, node_coordinate(n, k))` of `R^d`.
pub fn make_nodes(n: usize, d: usize) -> Result<Vec<Vec<f64>>> {
    if n == 0 || d == 0 {
        return Err(DnoError::Precondition(format!("need n >= 1 and d >= 1, got n = {n}, d = {d}")));
    }
    Ok((0..=4 * n)
        .map(|k| {
            let mut p = vec![0.0; d];
            p[d - 1] = node_coordinate(n, k);
            p
        })
        .collect())
}

fn sample_at<F: Fn(&[f64]) -> f64>(sampler: &F, index: usize, point: &[f64]) -> Result<f64> {
    let v = sampler(point);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(DnoError::Data { index, point: point.to_vec() })
    }
}

/// Window of `k` in `0..=4n` whose bell argument `base - k` lies within [`BELL_WINDOW`].
fn window(n: usize, base: f64) -> std::ops::RangeInclusive<usize> {
    let top = 4 * n;
    let lo = (base - BELL_WINDOW).ceil().max(0.0);
    let hi = (base + BELL_WINDOW).floor().min(top as f64);
    if lo > hi {
        #[allow(clippy::reversed_empty_ranges)]
        return 1..=0;
    }
    lo as usize..=hi as usize
}

fn bell_sum(beta: &[f64], n: usize, s: f64) -> f64 {
    let base = n as f64 * s + 2.0 * n as f64;
    window(n, base).map(|k| beta[k] * bell_unchecked(base - k as f64)).collect::<CompensatedSum>().value()
}

fn bell_sum_derivative(beta: &[f64], n: usize, s: f64) -> f64 {
    let base = n as f64 * s + 2.0 * n as f64;
    let sum: CompensatedSum = window(n, base).map(|k| beta[k] * bell_derivative_unchecked(base - k as f64)).collect();
    n as f64 * sum.value()
}

/// `G*(t) = sum_{k=0}^{4n} beta_k phi(n t - k + 2n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnivariateOperator {
    n: usize,
    beta: Vec<f64>,
}

impl UnivariateOperator {
    pub fn from_coefficients(n: usize, beta: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(DnoError::Precondition("n must be at least 1".into()));
        }
        if beta.len() != 4 * n + 1 {
            return Err(DnoError::Shape { expected: 4 * n + 1, got: beta.len() });
        }
        if let Some(b) = beta.iter().find(|b| !b.is_finite()) {
            return Err(DnoError::Domain(format!("non-finite coefficient {b}")));
        }
        Ok(Self { n, beta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.beta
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.beta.iter().fold(0.0f64, |m, b| m.max(b.abs()))
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        bell_sum(&self.beta, self.n, t)
    }

    /// All `4n + 1` terms, without the window.
    pub fn evaluate_full(&self, t: f64) -> f64 {
        let base = self.n as f64 * t + 2.0 * self.n as f64;
        self.beta
            .iter()
            .enumerate()
            .map(|(k, b)| b * bell_unchecked(base - k as f64))
            .collect::<CompensatedSum>()
            .value()
    }

    pub fn derivative(&self, t: f64) -> f64 {
        bell_sum_derivative(&self.beta, self.n, t)
    }

    /// One hidden layer of `2(4n + 1)` sigmoids: each bell is
    /// `(sigma(z + 1) - sigma(z - 1)) / 2`.
    pub fn to_network(&self) -> Result<LayeredNetwork> {
        let n = self.n as f64;
        let mut weights = Vec::with_capacity(2 * self.beta.len());
        let mut bias = Vec::with_capacity(2 * self.beta.len());
        let mut readout = Vec::with_capacity(2 * self.beta.len());
        for (k, &b) in self.beta.iter().enumerate() {
            let offset = 2.0 * n - k as f64;
            for (shift, sign) in [(1.0, 0.5), (-1.0, -0.5)] {
                weights.push(n);
                bias.push(offset + shift);
                readout.push(sign * b);
            }
        }
        let layer = Layer::new(weights.len(), 1, weights, bias)?;
        LayeredNetwork::new(1, vec![layer], readout, 0.0)
    }
}

/// Samples `g*` at the clamped nodes `(k - 2n) / n`.
pub fn build_univariate<F: Fn(f64) -> f64>(sampler: F, n: usize) -> Result<UnivariateOperator> {
    if n == 0 {
        return Err(DnoError::Precondition("n must be at least 1".into()));
    }
    let beta = (0..=4 * n)
        .map(|k| {
            let t = node_coordinate(n, k);
            sample_at(&|p: &[f64]| sampler(p[0]), k, &[t])
        })
        .collect::<Result<Vec<_>>>()?;
    UnivariateOperator::from_coefficients(n, beta)
}

/// How the operator reads the norm net and where it samples `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DnoForm {
    /// Bell argument `n (2 N(x) - 1) - k + 2n`; node `k` is sampled at the
    /// axis point whose squared norm is `(1 + t_k) / 2`. Converges to
    /// `g(|x|^2)` for `f = g(|x|^2)`.
    #[default]
    Rescaled,
    /// Bell argument `n N(x) - k + 2n`, samples at the nodes themselves.
    /// Converges to `g(|x|^4)` rather than to `f`.
    AsPrinted,
}

impl std::str::FromStr for DnoForm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "rescaled" => Ok(DnoForm::Rescaled),
            "as-printed" => Ok(DnoForm::AsPrinted),
            other => Err(format!("unknown operator form `{other}` (expected rescaled|as-printed)")),
        }
    }
}

/// Deep-net operator on the unit ball.
#[derive(Debug, Clone, PartialEq)]
pub struct DnoOperator {
    n: usize,
    eps: f64,
    d: usize,
    form: DnoForm,
    nodes: Vec<Vec<f64>>,
    sample_points: Vec<Vec<f64>>,
    samples: Vec<f64>,
    norm_net: LayeredNetwork,
}

/// Where node `k` is sampled under `form`.
pub fn sample_points(n: usize, d: usize, form: DnoForm) -> Result<Vec<Vec<f64>>> {
    let nodes = make_nodes(n, d)?;
    Ok(match form {
        DnoForm::AsPrinted => nodes,
        DnoForm::Rescaled => (0..=4 * n)
            .map(|k| {
                let mut p = vec![0.0; d];
                p[d - 1] = ((1.0 + node_coordinate(n, k)) / 2.0).sqrt();
                p
            })
            .collect(),
    })
}

pub fn build_dno<F: Fn(&[f64]) -> f64>(sampler: F, n: usize, eps: f64, d: usize) -> Result<DnoOperator> {
    build_dno_with(sampler, n, eps, d, DnoForm::default())
}

pub fn build_dno_with<F: Fn(&[f64]) -> f64>(sampler: F, n: usize, eps: f64, d: usize, form: DnoForm) -> Result<DnoOperator> {
    check_accuracy(eps)?;
    let nodes = make_nodes(n, d)?;
    let points = sample_points(n, d, form)?;
    let samples = points
        .iter()
        .enumerate()
        .map(|(k, p)| sample_at(&sampler, k, p))
        .collect::<Result<Vec<_>>>()?;
    let norm_net = norm_net(d, eps)?;
    Ok(DnoOperator { n, eps, d, form, nodes, sample_points: points, samples, norm_net })
}

impl DnoOperator {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn form(&self) -> DnoForm {
        self.form
    }

    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }

    pub fn sample_points(&self) -> &[Vec<f64>] {
        &self.sample_points
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn norm_net(&self) -> &LayeredNetwork {
        &self.norm_net
    }

    /// The univariate operator this one factors through.
    pub fn univariate(&self) -> UnivariateOperator {
        UnivariateOperator { n: self.n, beta: self.samples.clone() }
    }

    /// Argument `s(x)` handed to the univariate part.
    pub fn inner(&self, x: &[f64]) -> Result<f64> {
        self.inner_with(x, Precision::Standard)
    }

    /// As [`inner`](Self::inner), with the norm net evaluated at `precision` or better.
    pub fn inner_with(&self, x: &[f64], precision: Precision) -> Result<f64> {
        let r2 = self.norm_net.evaluate_with(x, precision)?;
        Ok(match self.form {
            DnoForm::Rescaled => 2.0 * r2 - 1.0,
            DnoForm::AsPrinted => r2,
        })
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.evaluate_with(x, Precision::Standard)
    }

    pub fn evaluate_with(&self, x: &[f64], precision: Precision) -> Result<f64> {
        Ok(bell_sum(&self.samples, self.n, self.inner_with(x, precision)?))
    }

    /// Two hidden layers: the norm net's `3d` neurons, then a sigmoid pair per node.
    pub fn flatten(&self) -> Result<LayeredNetwork> {
        let n = self.n as f64;
        let first = self.norm_net.layers()[0].clone();
        let a = self.norm_net.readout();
        let c0 = self.norm_net.readout_constant();
        // argument = scale * N(x) + offset - k + 2n
        let (scale, offset) = match self.form {
            DnoForm::Rescaled => (2.0 * n, -n),
            DnoForm::AsPrinted => (n, 0.0),
        };
        let pairs = self.samples.len();
        let mut weights = Vec::with_capacity(2 * pairs * a.len());
        let mut bias = Vec::with_capacity(2 * pairs);
        let mut readout = Vec::with_capacity(2 * pairs);
        for (k, &f) in self.samples.iter().enumerate() {
            let centre = scale * c0 + offset + 2.0 * n - k as f64;
            for (shift, sign) in [(1.0, 0.5), (-1.0, -0.5)] {
                weights.extend(a.iter().map(|w| scale * w));
                bias.push(centre + shift);
                readout.push(sign * f);
            }
        }
        let second = Layer::new(2 * pairs, a.len(), weights, bias)?;
        Ok(LayeredNetwork::new(self.d, vec![first, second], readout, 0.0)?
            .with_min_precision(self.norm_net.min_precision()))
    }

    pub fn to_json(&self) -> Result<String> {
        let file = OperatorFile {
            format: OPERATOR_FORMAT.to_string(),
            version: OPERATOR_VERSION,
            network: self.flatten()?.to_wire(),
            norm_net: self.norm_net.to_wire(),
            sidecar: Sidecar {
                n: self.n,
                eps: self.eps,
                d: self.d,
                form: self.form,
                nodes: self.nodes.clone(),
                sample_points: self.sample_points.clone(),
                samples: self.samples.clone(),
            },
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    /// Reads an operator file; the stored flattened network must match the
    /// one rebuilt from the sidecar and norm net.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: OperatorFile = serde_json::from_str(text)?;
        if file.format != OPERATOR_FORMAT || file.version != OPERATOR_VERSION {
            return Err(DnoError::Serde(format!("unsupported operator file {} v{}", file.format, file.version)));
        }
        let s = file.sidecar;
        let norm_net = LayeredNetwork::from_wire(file.norm_net)?;
        if s.samples.len() != 4 * s.n + 1 || s.nodes != make_nodes(s.n, s.d)? || s.sample_points != sample_points(s.n, s.d, s.form)? {
            return Err(DnoError::Serde("sidecar is inconsistent with n and d".into()));
        }
        let op = DnoOperator {
            n: s.n,
            eps: s.eps,
            d: s.d,
            form: s.form,
            nodes: s.nodes,
            sample_points: s.sample_points,
            samples: s.samples,
            norm_net,
        };
        if op.flatten()? != LayeredNetwork::from_wire(file.network)? {
            return Err(DnoError::Serde("stored network does not match the sidecar".into()));
        }
        Ok(op)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    n: usize,
    eps: f64,
    d: usize,
    form: DnoForm,
    nodes: Vec<Vec<f64>>,
    sample_points: Vec<Vec<f64>>,
    samples: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct OperatorFile {
    format: String,
    version: u32,
    network: NetworkFile,
    norm_net: NetworkFile,
    sidecar: Sidecar,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_matches_full_sum() {
        let op = build_univariate(|t| (3.0 * t).sin(), 50).unwrap();
        for i in 0..=200 {
            let t = -1.2 + i as f64 * 0.012;
            assert!((op.evaluate(t) - op.evaluate_full(t)).abs() < 1e-15);
        }
    }

    #[test]
    fn window_is_empty_far_away() {
        assert!(window(4, -100.0).is_empty());
        assert!(window(4, 200.0).is_empty());
        assert_eq!(window(4, 8.0), 0..=16);
    }
}
