//! WebAssembly bindings for the demo page in `www/`.
//!
//! Three views: the bell function and its translates summing to one, the
//! three-neuron square net against `t^2`, and a radial operator along a ray
//! as `n` grows. Curves are returned as flat `Float64Array`s sampled on a
//! uniform grid the page also knows.

use dno_core::activation::bell_unchecked;
use dno_core::constructor::{build_dno, square_net};
use dno_core::corpus::Profile;
use wasm_bindgen::prelude::*;

fn js(e: dno_core::DnoError) -> JsError {
    JsError::new(&e.to_string())
}

fn grid(lo: f64, hi: f64, samples: usize) -> impl Iterator<Item = f64> {
    let m = samples.max(2);
    (0..m).map(move |i| lo + (hi - lo) * i as f64 / (m - 1) as f64)
}

/// `phi(t - shift)` on `samples` points of `[lo, hi]`.
#[wasm_bindgen]
pub fn bell_curve(lo: f64, hi: f64, samples: usize, shift: f64) -> Vec<f64> {
    grid(lo, hi, samples).map(|t| bell_unchecked(t - shift)).collect()
}

/// `sum_{|i| <= terms} phi(t - i)`; equals one up to rounding once `terms`
/// covers the plotted range.
#[wasm_bindgen]
pub fn partition_sum(lo: f64, hi: f64, samples: usize, terms: i32) -> Vec<f64> {
    grid(lo, hi, samples).map(|t| (-terms..=terms).map(|i| bell_unchecked(t - i as f64)).sum()).collect()
}

#[wasm_bindgen]
pub struct SquareView {
    values: Vec<f64>,
    max_error: f64,
    max_weight: f64,
}

#[wasm_bindgen]
impl SquareView {
    /// Net output on the sampled grid of `[-1, 1]`.
    #[wasm_bindgen(getter)]
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn max_error(&self) -> f64 {
        self.max_error
    }

    #[wasm_bindgen(getter)]
    pub fn max_weight(&self) -> f64 {
        self.max_weight
    }
}

/// Builds the three-neuron square net for `eps` and samples it on `[-1, 1]`.
#[wasm_bindgen]
pub fn square_view(eps: f64, samples: usize) -> Result<SquareView, JsError> {
    let net = square_net(eps).map_err(js)?;
    let mut values = Vec::with_capacity(samples);
    let mut max_error = 0.0f64;
    for t in grid(-1.0, 1.0, samples) {
        let v = net.evaluate(&[t]).map_err(js)?;
        max_error = max_error.max((v - t * t).abs());
        values.push(v);
    }
    Ok(SquareView { values, max_error, max_weight: net.max_abs_weight() })
}

fn profile(name: &str) -> Result<Profile, JsError> {
    Ok(match name {
        "linear" => Profile::Linear,
        "sqrt" => Profile::Power { alpha: 0.5 },
        "kink" => Profile::ShiftedAbs { alpha: 1.0 },
        "cos" => Profile::SmoothCos,
        other => return Err(JsError::new(&format!("unknown profile `{other}`"))),
    })
}

/// Target `g(r^2)` along the ray `x = (r, 0)`, `r` in `[0, 1]`.
#[wasm_bindgen]
pub fn radial_target(name: &str, samples: usize) -> Result<Vec<f64>, JsError> {
    let g = profile(name)?;
    Ok(grid(0.0, 1.0, samples).map(|r| g.evaluate(r * r)).collect())
}

/// Operator built from `f(x) = g(|x|^2)` in the plane, evaluated along the
/// same ray.
#[wasm_bindgen]
pub fn radial_operator(name: &str, n: usize, eps: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    let g = profile(name)?;
    let op = build_dno(|x: &[f64]| g.evaluate(x.iter().map(|v| v * v).sum()), n, eps, 2).map_err(js)?;
    grid(0.0, 1.0, samples).map(|r| op.evaluate(&[r, 0.0]).map_err(js)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curves_have_the_requested_length() {
        assert_eq!(bell_curve(-3.0, 3.0, 101, 0.0).len(), 101);
        let sums = partition_sum(-3.0, 3.0, 61, 40);
        assert!(sums.iter().all(|s| (s - 1.0).abs() < 1e-12));
    }

    #[test]
    fn square_view_respects_eps() {
        let v = square_view(0.05, 401).unwrap_or_else(|_| panic!("construction"));
        assert!(v.max_error() <= 0.05);
        assert_eq!(v.values().len(), 401);
    }

    #[test]
    fn radial_operator_tracks_the_target() {
        let target = radial_target("linear", 51).unwrap_or_else(|_| panic!("profile"));
        let approx = radial_operator("linear", 64, 1e-3, 51).unwrap_or_else(|_| panic!("operator"));
        let worst = target.iter().zip(&approx).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst < 0.02, "{worst}");
    }
}
