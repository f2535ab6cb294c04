//! The logistic sigmoid, its derivatives of every order, and the bell
//! function built from two shifted sigmoids.

use std::sync::LazyLock;

use crate::error::{DnoError, Result};

/// Highest derivative order held by the shared table.
pub const DEFAULT_MAX_ORDER: usize = 16;

/// `(e^2 - 1) / (2e)`: envelope constant of both the bell and its derivative.
pub const BELL_ENVELOPE: f64 = 1.175_201_193_643_801_4;

static DEFAULT_TABLE: LazyLock<SigmoidDerivativeTable> = LazyLock::new(|| {
    SigmoidDerivativeTable::new(DEFAULT_MAX_ORDER).expect("default order fits in i128")
});

fn check_finite(t: f64) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(DnoError::Domain(format!("non-finite input {t}")))
    }
}

/// `1 / (1 + e^{-t})` without range checks.
#[inline]
pub fn sigmoid_unchecked(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

pub fn sigmoid(t: f64) -> Result<f64> {
    check_finite(t)?;
    Ok(sigmoid_unchecked(t))
}

/// `sigma^{(order)}(t)` from the shared table of order [`DEFAULT_MAX_ORDER`].
pub fn sigmoid_derivative(order: usize, t: f64) -> Result<f64> {
    DEFAULT_TABLE.derivative(order, t)
}

pub fn default_table() -> &'static SigmoidDerivativeTable {
    &DEFAULT_TABLE
}

/// Derivatives of the sigmoid as integer polynomials in `s = sigma(t)`.
///
/// Row `j` holds `P_j` with `sigma^{(j)} = P_j(sigma)`; `P_0(s) = s` and
/// `P_{j+1} = P_j' * s(1 - s)`. For `j >= 1` every `P_j` carries the factor
/// `s(1 - s)`, which is split off (`Q_j`) so that evaluation in the tails can
/// use `1 - sigma(t) = sigma(-t)` without cancellation.
#[derive(Debug, Clone)]
pub struct SigmoidDerivativeTable {
    max_order: usize,
    rows: Vec<Vec<i128>>,
    reduced: Vec<Vec<i128>>,
}

impl SigmoidDerivativeTable {
    pub fn new(max_order: usize) -> Result<Self> {
        let overflow = || DnoError::Capability(format!("order {max_order} overflows i128 coefficients"));
        let mut rows: Vec<Vec<i128>> = vec![vec![0, 1]];
        for j in 0..max_order {
            let p = &rows[j];
            // derivative of P_j
            let dp: Vec<i128> = (1..p.len())
                .map(|m| p[m].checked_mul(m as i128).ok_or_else(overflow))
                .collect::<Result<_>>()?;
            // times (s - s^2)
            let mut next = vec![0i128; dp.len() + 2];
            for (m, &c) in dp.iter().enumerate() {
                next[m + 1] = next[m + 1].checked_add(c).ok_or_else(overflow)?;
                next[m + 2] = next[m + 2].checked_sub(c).ok_or_else(overflow)?;
            }
            while next.len() > 1 && *next.last().unwrap() == 0 {
                next.pop();
            }
            rows.push(next);
        }
        let reduced = rows.iter().map(|p| divide_by_logistic_factor(p)).collect();
        Ok(Self { max_order, rows, reduced })
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Coefficients of `P_order`, lowest degree first.
    pub fn row(&self, order: usize) -> Option<&[i128]> {
        self.rows.get(order).map(Vec::as_slice)
    }

    fn check_order(&self, order: usize) -> Result<()> {
        if order > self.max_order {
            return Err(DnoError::Capability(format!(
                "derivative order {order} exceeds table order {}",
                self.max_order
            )));
        }
        Ok(())
    }

    pub fn derivative(&self, order: usize, t: f64) -> Result<f64> {
        self.check_order(order)?;
        check_finite(t)?;
        Ok(self.derivative_unchecked(order, t))
    }

    pub(crate) fn derivative_unchecked(&self, order: usize, t: f64) -> f64 {
        let s = sigmoid_unchecked(t);
        if order == 0 {
            return s;
        }
        let s_bar = sigmoid_unchecked(-t);
        s * s_bar * horner(&self.reduced[order], s)
    }

    /// Evaluates `P_order` at an arbitrary `s`.
    pub fn polynomial_at(&self, order: usize, s: f64) -> Result<f64> {
        self.check_order(order)?;
        Ok(horner(&self.rows[order], s))
    }

    /// `sup_t |sigma^{(order)}(t)| = max_{s in [0,1]} |P_order(s)|`.
    ///
    /// Dense scan in `s` followed by golden-section refinement around the
    /// best sample.
    pub fn sup_abs(&self, order: usize) -> Result<f64> {
        self.check_order(order)?;
        let p = &self.rows[order];
        let f = |s: f64| horner(p, s).abs();
        const SAMPLES: usize = 4096;
        let h = 1.0 / SAMPLES as f64;
        let (best_i, mut best) = (0..=SAMPLES)
            .map(|i| (i, f(i as f64 * h)))
            .fold((0, f64::NEG_INFINITY), |acc, v| if v.1 > acc.1 { v } else { acc });
        let (mut a, mut b) = (((best_i as f64) - 1.0) * h, ((best_i as f64) + 1.0) * h);
        a = a.max(0.0);
        b = b.min(1.0);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if f(c) > f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        best = best.max(f(0.5 * (a + b)));
        Ok(best)
    }
}

fn horner(coefficients: &[i128], s: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, &c| acc * s + c as f64)
}

/// Exact division of `p(s)` by `s - s^2`; the input must vanish at 0 and 1
/// (all rows with order >= 1 do). Order 0 maps to an empty quotient.
fn divide_by_logistic_factor(p: &[i128]) -> Vec<i128> {
    if p.len() < 3 {
        // P_0 = s is not divisible; P_j for j >= 1 has degree >= 2
        return Vec::new();
    }
    // p(s) = s * r(s); r(s) = (1 - s) q(s)
    let r = &p[1..];
    let deg = r.len() - 1;
    let mut q = vec![0i128; deg];
    // r_m = q_m - q_{m-1}  =>  q_m = r_m + q_{m-1}
    let mut prev = 0i128;
    for m in 0..deg {
        prev += r[m];
        q[m] = prev;
    }
    debug_assert_eq!(r[deg], -q[deg - 1]);
    q
}

/// `(sigma(t+1) - sigma(t-1)) / 2`, written in the cancellation-free product
/// form `(e^2 - 1) / (2 e^2 (1 + e^{t-1})(1 + e^{-t-1}))`.
#[inline]
pub fn bell_unchecked(t: f64) -> f64 {
    const NUMERATOR: f64 = 0.432_332_358_381_693_6; // (e^2 - 1) / (2 e^2)
    NUMERATOR / ((1.0 + (t - 1.0).exp()) * (1.0 + (-t - 1.0).exp()))
}

pub fn bell(t: f64) -> Result<f64> {
    check_finite(t)?;
    Ok(bell_unchecked(t))
}

/// `phi'(t) = phi(t) * (sigma(-t-1) sigma(1-t) - sigma(t-1) sigma(t+1))`.
#[inline]
pub fn bell_derivative_unchecked(t: f64) -> f64 {
    let factor = sigmoid_unchecked(-t - 1.0) * sigmoid_unchecked(1.0 - t)
        - sigmoid_unchecked(t - 1.0) * sigmoid_unchecked(t + 1.0);
    bell_unchecked(t) * factor
}

pub fn bell_derivative(t: f64) -> Result<f64> {
    check_finite(t)?;
    Ok(bell_derivative_unchecked(t))
}

/// `BELL_ENVELOPE * e^{-|t|}`, which dominates both `phi` and `|phi'|`.
pub fn bell_envelope(t: f64) -> f64 {
    BELL_ENVELOPE * (-t.abs()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sigmoid_reference_values() {
        assert_eq!(sigmoid(0.0).unwrap(), 0.5);
        // 1 / (1 + e^{-1}) to 25 digits: 0.7310585786300048792511592
        assert_relative_eq!(sigmoid(1.0).unwrap(), 0.731_058_578_630_004_9, max_relative = 1e-15);
        for t in [0.3, 2.0, 17.5, 400.0, 800.0] {
            let s = sigmoid(t).unwrap() + sigmoid(-t).unwrap();
            assert!((s - 1.0).abs() <= f64::EPSILON, "t = {t}");
        }
        assert!(sigmoid(800.0).unwrap() <= 1.0 && sigmoid(-800.0).unwrap() >= 0.0);
    }

    #[test]
    fn sigmoid_rejects_non_finite() {
        assert!(matches!(sigmoid(f64::NAN), Err(DnoError::Domain(_))));
        assert!(sigmoid(f64::INFINITY).is_err());
        assert!(bell(f64::NEG_INFINITY).is_err());
        assert!(bell_derivative(f64::NAN).is_err());
    }

    #[test]
    fn table_rows_follow_the_recurrence() {
        let table = SigmoidDerivativeTable::new(4).unwrap();
        assert_eq!(table.row(0).unwrap(), &[0, 1]);
        assert_eq!(table.row(1).unwrap(), &[0, 1, -1]);
        assert_eq!(table.row(2).unwrap(), &[0, 1, -3, 2]);
        assert_eq!(table.row(3).unwrap(), &[0, 1, -7, 12, -6]);
        for j in 0..=4 {
            assert_eq!(table.row(j).unwrap().len(), j + 2, "degree of P_{j} is j + 1");
        }
    }

    #[test]
    fn even_derivatives_vanish_at_zero() {
        let table = default_table();
        for j in (2..=DEFAULT_MAX_ORDER).step_by(2) {
            assert_eq!(table.polynomial_at(j, 0.5).unwrap(), 0.0, "P_{j}(1/2)");
        }
        assert!(sigmoid_derivative(2, 0.0).unwrap().abs() < 1e-17);
        assert!(sigmoid_derivative(4, 0.0).unwrap().abs() < 1e-17);
        assert_eq!(sigmoid_derivative(1, 0.0).unwrap(), 0.25);
    }

    #[test]
    fn order_beyond_table_is_a_capability_error() {
        let table = SigmoidDerivativeTable::new(3).unwrap();
        assert!(matches!(table.derivative(4, 0.0), Err(DnoError::Capability(_))));
        assert!(sigmoid_derivative(DEFAULT_MAX_ORDER + 1, 0.0).is_err());
    }

    #[test]
    fn first_derivative_matches_central_differences() {
        let h = 1e-5;
        for i in 0..=600 {
            let t = -3.0 + i as f64 * 0.01;
            let fd = (sigmoid_unchecked(t + h) - sigmoid_unchecked(t - h)) / (2.0 * h);
            let d = sigmoid_derivative(1, t).unwrap();
            assert!((fd - d).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn higher_derivatives_match_differences_of_lower_ones() {
        let h = 1e-5;
        for j in 1..8 {
            for t in [-2.5, -0.7, 0.4, 1.9] {
                let fd = (sigmoid_derivative(j, t + h).unwrap() - sigmoid_derivative(j, t - h).unwrap()) / (2.0 * h);
                assert_relative_eq!(sigmoid_derivative(j + 1, t).unwrap(), fd, epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn derivative_tails_do_not_cancel() {
        // sigma'(40) = e^{-40} / (1 + e^{-40})^2
        let want = (-40f64).exp() / (1.0 + (-40f64).exp()).powi(2);
        assert_relative_eq!(sigmoid_derivative(1, 40.0).unwrap(), want, max_relative = 1e-14);
    }

    #[test]
    fn sup_of_low_order_derivatives() {
        let table = default_table();
        assert_relative_eq!(table.sup_abs(1).unwrap(), 0.25, max_relative = 1e-12);
        // |sigma''| peaks at s = 1/2 - sqrt(3)/6 with value sqrt(3)/18
        assert_relative_eq!(table.sup_abs(2).unwrap(), 3f64.sqrt() / 18.0, max_relative = 1e-10);
        assert_relative_eq!(table.sup_abs(3).unwrap(), 0.125, max_relative = 1e-10);
    }

    #[test]
    fn bell_reference_values() {
        // (sigma(1) - sigma(-1)) / 2 at 50 digits
        assert_relative_eq!(bell(0.0).unwrap(), 0.231_058_578_630_004_87, max_relative = 1e-15);
        assert_relative_eq!(BELL_ENVELOPE, 1.175_201_193_643_801_4, max_relative = 1e-15);
        assert_relative_eq!(BELL_ENVELOPE, 1f64.sinh(), max_relative = 1e-15);
        assert_eq!(bell_derivative(0.0).unwrap(), 0.0);
    }

    #[test]
    fn bell_product_form_equals_sigmoid_difference() {
        for i in -200..=200 {
            let t = i as f64 * 0.05;
            let direct = 0.5 * (sigmoid_unchecked(t + 1.0) - sigmoid_unchecked(t - 1.0));
            assert_relative_eq!(bell_unchecked(t), direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn bell_is_positive_symmetric_and_enveloped() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5000 {
            let t: f64 = rng.random_range(-700.0..700.0);
            let b = bell_unchecked(t);
            assert_eq!(b, bell_unchecked(-t));
            assert!(b <= bell_envelope(t) * (1.0 + 1e-12));
            assert!(bell_derivative_unchecked(t).abs() <= bell_envelope(t) * (1.0 + 1e-12));
            if t.abs() < 700.0 {
                assert!(b > 0.0);
            }
            if t > 0.0 && t < 700.0 {
                assert!(bell_derivative_unchecked(t) < 0.0);
            }
        }
    }

    #[test]
    fn partition_of_unity_on_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let t: f64 = rng.random_range(-5.0..5.0);
            let total: crate::precision::CompensatedSum = (-60..=60).map(|i| bell_unchecked(t - i as f64)).collect();
            assert!((total.value() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn bell_derivative_matches_central_differences() {
        let h = 1e-5;
        for i in 0..=2000 {
            let t = -10.0 + i as f64 * 0.01;
            let fd = (bell_unchecked(t + h) - bell_unchecked(t - h)) / (2.0 * h);
            let d = bell_derivative_unchecked(t);
            if d.abs() > 1e-6 {
                assert!(((fd - d) / d).abs() < 1e-7, "t = {t}: {fd} vs {d}");
            } else {
                assert!((fd - d).abs() < 1e-12, "t = {t}");
            }
        }
    }

    #[test]
    fn bell_derivative_equals_half_sigmoid_derivative_difference() {
        for i in -100..=100 {
            let t = i as f64 * 0.1;
            let want = 0.5 * (sigmoid_derivative(1, t + 1.0).unwrap() - sigmoid_derivative(1, t - 1.0).unwrap());
            assert!((bell_derivative_unchecked(t) - want).abs() < 1e-15);
        }
    }
}
