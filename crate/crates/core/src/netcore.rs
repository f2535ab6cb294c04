//! Explicit layered sigmoid networks: `x -> a . sigma(W_L ... sigma(W_1 x + b_1) ... + b_L) + c`.

use serde::{Deserialize, Serialize};

use crate::activation::sigmoid_unchecked;
use crate::error::{DnoError, Result};
use crate::precision::{dot2, DoubleDouble, Precision, Scalar};

const FORMAT: &str = "dno-network";
const VERSION: u32 = 1;

/// One affine map `z = W h + b` followed by the sigmoid.
///
/// `weights` is row-major with shape `rows x cols`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub rows: usize,
    pub cols: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Layer {
    pub fn new(rows: usize, cols: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        if weights.len() != rows * cols {
            return Err(DnoError::Shape { expected: rows * cols, got: weights.len() });
        }
        if bias.len() != rows {
            return Err(DnoError::Shape { expected: rows, got: bias.len() });
        }
        if rows == 0 || cols == 0 {
            return Err(DnoError::Precondition("layers need at least one row and one column".into()));
        }
        if let Some(w) = weights.iter().chain(&bias).find(|w| !w.is_finite()) {
            return Err(DnoError::Domain(format!("non-finite parameter {w}")));
        }
        Ok(Self { rows, cols, weights, bias })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.cols..(i + 1) * self.cols]
    }

    fn forward<S: Scalar>(&self, input: &[S]) -> Vec<S> {
        (0..self.rows)
            .map(|i| S::affine(self.row(i), input, self.bias[i]).sigmoid())
            .collect()
    }
}

/// A feed-forward sigmoid network with a linear readout.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredNetwork {
    input_dim: usize,
    layers: Vec<Layer>,
    readout: Vec<f64>,
    readout_constant: f64,
    min_precision: Precision,
}

impl LayeredNetwork {
    pub fn new(input_dim: usize, layers: Vec<Layer>, readout: Vec<f64>, readout_constant: f64) -> Result<Self> {
        if layers.is_empty() {
            return Err(DnoError::Precondition("a network needs at least one hidden layer".into()));
        }
        let mut width = input_dim;
        for layer in &layers {
            if layer.cols != width {
                return Err(DnoError::Shape { expected: width, got: layer.cols });
            }
            width = layer.rows;
        }
        if readout.len() != width {
            return Err(DnoError::Shape { expected: width, got: readout.len() });
        }
        if let Some(a) = readout.iter().chain(std::iter::once(&readout_constant)).find(|a| !a.is_finite()) {
            return Err(DnoError::Domain(format!("non-finite readout {a}")));
        }
        Ok(Self { input_dim, layers, readout, readout_constant, min_precision: Precision::Standard })
    }

    /// Marks the network as needing at least `precision` to reproduce its
    /// verified accuracy. Requests for lower precision are raised to it.
    pub fn with_min_precision(mut self, precision: Precision) -> Self {
        self.min_precision = precision;
        self
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn readout(&self) -> &[f64] {
        &self.readout
    }

    pub fn readout_constant(&self) -> f64 {
        self.readout_constant
    }

    pub fn min_precision(&self) -> Precision {
        self.min_precision
    }

    pub fn widths(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.rows).collect()
    }

    /// `d_L + sum_k (d_{k-1} d_k + d_k)` with `d_0` the input dimension.
    pub fn parameter_count(&self) -> usize {
        self.readout.len() + self.layers.iter().map(|l| l.cols * l.rows + l.rows).sum::<usize>()
    }

    pub fn max_abs_weight(&self) -> f64 {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.bias))
            .chain(&self.readout)
            .fold(0.0f64, |m, w| m.max(w.abs()))
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(DnoError::Shape { expected: self.input_dim, got: x.len() });
        }
        if let Some(v) = x.iter().find(|v| !v.is_finite()) {
            return Err(DnoError::Domain(format!("non-finite input {v}")));
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.evaluate_with(x, Precision::Standard)
    }

    pub fn evaluate_with(&self, x: &[f64], precision: Precision) -> Result<f64> {
        self.check_input(x)?;
        Ok(match precision.max(self.min_precision) {
            Precision::Standard => self.forward::<f64>(x),
            Precision::Extended => self.forward::<DoubleDouble>(x),
        })
    }

    fn forward<S: Scalar>(&self, x: &[f64]) -> f64 {
        let mut h: Vec<S> = x.iter().map(|&v| S::lift(v)).collect();
        for layer in &self.layers {
            h = layer.forward(&h);
        }
        S::affine(&self.readout, &h, self.readout_constant).lower()
    }

    /// Exact chain-rule derivative of a univariate network.
    pub fn evaluate_derivative(&self, t: f64) -> Result<f64> {
        if self.input_dim != 1 {
            return Err(DnoError::Capability(format!(
                "input derivative needs a univariate network, got input dimension {}",
                self.input_dim
            )));
        }
        self.check_input(&[t])?;
        let mut h = vec![t];
        let mut dh = vec![1.0];
        for layer in &self.layers {
            let mut next = Vec::with_capacity(layer.rows);
            let mut dnext = Vec::with_capacity(layer.rows);
            for i in 0..layer.rows {
                let row = layer.row(i);
                let z = f64::affine(row, &h, layer.bias[i]);
                next.push(sigmoid_unchecked(z));
                dnext.push(sigmoid_unchecked(z) * sigmoid_unchecked(-z) * dot2(row, &dh));
            }
            h = next;
            dh = dnext;
        }
        Ok(dot2(&self.readout, &dh))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_wire())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_wire(serde_json::from_str(text)?)
    }

    pub(crate) fn to_wire(&self) -> NetworkFile {
        NetworkFile {
            format: FORMAT.to_string(),
            version: VERSION,
            input_dim: self.input_dim,
            precision: self.min_precision,
            layers: self.layers.clone(),
            readout: self.readout.clone(),
            readout_constant: self.readout_constant,
        }
    }

    pub(crate) fn from_wire(file: NetworkFile) -> Result<Self> {
        if file.format != FORMAT {
            return Err(DnoError::Serde(format!("unexpected format tag {:?}", file.format)));
        }
        if file.version != VERSION {
            return Err(DnoError::Serde(format!("unsupported version {}", file.version)));
        }
        let layers = file
            .layers
            .into_iter()
            .map(|l| Layer::new(l.rows, l.cols, l.weights, l.bias))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(file.input_dim, layers, file.readout, file.readout_constant)?.with_min_precision(file.precision))
    }
}

/// On-disk form of a [`LayeredNetwork`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct NetworkFile {
    pub format: String,
    pub version: u32,
    pub input_dim: usize,
    pub precision: Precision,
    pub layers: Vec<Layer>,
    pub readout: Vec<f64>,
    pub readout_constant: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_half() -> LayeredNetwork {
        LayeredNetwork::new(2, vec![Layer::new(1, 2, vec![0.0, 0.0], vec![0.0]).unwrap()], vec![1.0], 0.0).unwrap()
    }

    #[test]
    fn zero_weights_give_one_half() {
        let net = constant_half();
        for x in [[0.0, 0.0], [0.3, -0.9], [1e3, 7.0]] {
            assert_eq!(net.evaluate(&x).unwrap(), 0.5);
            assert_eq!(net.evaluate_with(&x, Precision::Extended).unwrap(), 0.5);
        }
    }

    #[test]
    fn parameter_count_formula() {
        let one = LayeredNetwork::new(1, vec![Layer::new(3, 1, vec![0.0; 3], vec![0.0; 3]).unwrap()], vec![0.0; 3], 0.0)
            .unwrap();
        assert_eq!(one.parameter_count(), 9);
        let two = LayeredNetwork::new(
            2,
            vec![
                Layer::new(3, 2, vec![0.0; 6], vec![0.0; 3]).unwrap(),
                Layer::new(4, 3, vec![0.0; 12], vec![0.0; 4]).unwrap(),
            ],
            vec![0.0; 4],
            0.0,
        )
        .unwrap();
        assert_eq!(two.parameter_count(), 29);
    }

    #[test]
    fn malformed_networks_are_rejected() {
        assert!(matches!(LayeredNetwork::new(1, vec![], vec![], 0.0), Err(DnoError::Precondition(_))));
        assert!(matches!(Layer::new(2, 2, vec![0.0; 3], vec![0.0; 2]), Err(DnoError::Shape { .. })));
        assert!(Layer::new(1, 1, vec![f64::NAN], vec![0.0]).is_err());
        let l1 = Layer::new(3, 2, vec![0.0; 6], vec![0.0; 3]).unwrap();
        let l2 = Layer::new(2, 2, vec![0.0; 4], vec![0.0; 2]).unwrap();
        assert!(matches!(LayeredNetwork::new(2, vec![l1, l2], vec![0.0; 2], 0.0), Err(DnoError::Shape { .. })));
    }

    #[test]
    fn input_dimension_is_checked() {
        let net = constant_half();
        assert!(matches!(net.evaluate(&[0.0]), Err(DnoError::Shape { expected: 2, got: 1 })));
        assert!(matches!(net.evaluate_derivative(0.0), Err(DnoError::Capability(_))));
    }

    #[test]
    fn min_precision_is_preserved_through_json() {
        let net = constant_half().with_min_precision(Precision::Extended);
        let back = LayeredNetwork::from_json(&net.to_json().unwrap()).unwrap();
        assert_eq!(back, net);
        assert_eq!(back.min_precision(), Precision::Extended);
    }

    #[test]
    fn wrong_format_tag_is_rejected() {
        let text = constant_half().to_json().unwrap().replace("dno-network", "other");
        assert!(matches!(LayeredNetwork::from_json(&text), Err(DnoError::Serde(_))));
    }
}
