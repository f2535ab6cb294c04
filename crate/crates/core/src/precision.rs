//! Error-free transformations, compensated summation and double-word
//! ("double-double") arithmetic.
//!
//! The constructed networks carry readout weights far larger than their
//! outputs, so every dot product goes through [`dot2`] and the extended mode
//! evaluates whole networks in [`DoubleDouble`].

use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Arithmetic used when evaluating a network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// IEEE double with compensated dot products.
    #[default]
    Standard,
    /// Double-word arithmetic (about 32 significant digits).
    Extended,
}

impl std::str::FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "standard" => Ok(Precision::Standard),
            "extended" => Ok(Precision::Extended),
            other => Err(format!("unknown precision `{other}` (expected standard|extended)")),
        }
    }
}

impl std::fmt::Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Precision::Standard => f.write_str("standard"),
            Precision::Extended => f.write_str("extended"),
        }
    }
}

/// `a + b = s + e` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Requires `|a| >= |b|` (or `a == 0`).
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// `a * b = p + e` exactly (via fused multiply-add).
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// Dot product computed as if in twice the working precision, then rounded
/// (Ogita, Rump & Oishi, "Dot2").
pub fn dot2(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut p = 0.0;
    let mut s = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let (h, r) = two_prod(x, y);
        let (q, t) = two_sum(p, h);
        p = q;
        s += t + r;
    }
    p + s
}

/// Neumaier's improved Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

const LN2: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    #[inline]
    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        Self { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn add_f64(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Self { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Self { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let (p, e) = two_prod(q1, b);
        let (s, f) = two_sum(self.hi, -p);
        let s = s + (f - e + self.lo);
        let q2 = s / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo }
    }

    /// Exact scaling by `2^k`.
    pub fn ldexp(self, k: i32) -> Self {
        let half = k / 2;
        let a = 2f64.powi(half);
        let b = 2f64.powi(k - half);
        Self { hi: self.hi * a * b, lo: self.lo * a * b }
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.78 {
            return Self::from_f64(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return Self::ZERO;
        }
        if self.hi == 0.0 && self.lo == 0.0 {
            return Self::ONE;
        }
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2.mul_f64(k)).ldexp(-10);

        // expm1 on the reduced argument, |r| < 3.4e-4
        let mut term = r;
        let mut acc = r;
        for i in 2..=12 {
            term = (term * r).div_f64(i as f64);
            acc = acc + term;
        }
        // expm1(2x) = 2 expm1(x) + expm1(x)^2
        for _ in 0..10 {
            acc = acc.mul_f64(2.0) + acc * acc;
        }
        (acc + Self::ONE).ldexp(k as i32)
    }

    /// Logistic function, branching on the sign so that `exp` never overflows.
    pub fn sigmoid(self) -> Self {
        if self.hi >= 0.0 {
            let e = (-self).exp();
            Self::ONE / (Self::ONE + e)
        } else {
            let e = self.exp();
            e / (Self::ONE + e)
        }
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;

    #[inline]
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;

    #[inline]
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;

    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;

    #[inline]
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;

    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo }.add_f64(q3)
    }
}

/// Scalar type a network can be evaluated in.
pub trait Scalar: Copy + Send + Sync {
    fn lift(x: f64) -> Self;
    fn lower(self) -> f64;
    fn sigmoid(self) -> Self;
    /// `w . xs + bias`, accumulated without cancellation loss.
    fn affine(weights: &[f64], xs: &[Self], bias: f64) -> Self;
    fn scale(self, w: f64) -> Self;
    fn plus(self, other: Self) -> Self;
    fn times(self, other: Self) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn lift(x: f64) -> Self {
        x
    }

    #[inline]
    fn lower(self) -> f64 {
        self
    }

    #[inline]
    fn sigmoid(self) -> Self {
        crate::activation::sigmoid_unchecked(self)
    }

    fn affine(weights: &[f64], xs: &[Self], bias: f64) -> Self {
        let mut p = bias;
        let mut s = 0.0;
        for (&w, &x) in weights.iter().zip(xs) {
            let (h, r) = two_prod(w, x);
            let (q, t) = two_sum(p, h);
            p = q;
            s += t + r;
        }
        p + s
    }

    #[inline]
    fn scale(self, w: f64) -> Self {
        self * w
    }

    #[inline]
    fn plus(self, other: Self) -> Self {
        self + other
    }

    #[inline]
    fn times(self, other: Self) -> Self {
        self * other
    }
}

impl Scalar for DoubleDouble {
    #[inline]
    fn lift(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }

    #[inline]
    fn lower(self) -> f64 {
        self.to_f64()
    }

    #[inline]
    fn sigmoid(self) -> Self {
        DoubleDouble::sigmoid(self)
    }

    fn affine(weights: &[f64], xs: &[Self], bias: f64) -> Self {
        weights
            .iter()
            .zip(xs)
            .fold(DoubleDouble::from_f64(bias), |acc, (&w, &x)| acc + x.mul_f64(w))
    }

    #[inline]
    fn scale(self, w: f64) -> Self {
        self.mul_f64(w)
    }

    #[inline]
    fn plus(self, other: Self) -> Self {
        self + other
    }

    #[inline]
    fn times(self, other: Self) -> Self {
        self * other
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd(hi: f64, lo: f64) -> DoubleDouble {
        DoubleDouble { hi, lo }
    }

    fn rel_err(got: DoubleDouble, want: DoubleDouble) -> f64 {
        ((got - want).to_f64() / want.to_f64()).abs()
    }

    #[test]
    fn error_free_transformations_are_exact() {
        let (s, e) = two_sum(1.0, 1e-20);
        assert_eq!(s, 1.0);
        assert_eq!(e, 1e-20);
        let (p, e) = two_prod(1.0 + f64::EPSILON, 1.0 - f64::EPSILON);
        assert_eq!(p, 1.0);
        assert_eq!(e, -f64::EPSILON * f64::EPSILON);
    }

    #[test]
    fn dot2_survives_cancellation() {
        let a = [1e16, 1.0, -1e16];
        let b = [1.0, 1.0, 1.0];
        assert_eq!(dot2(&a, &b), 1.0);
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert_ne!(naive, 1.0);
    }

    #[test]
    fn neumaier_sum_recovers_small_terms() {
        let acc: CompensatedSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(acc.value(), 2.0);
    }

    // Reference values from a 50-digit evaluation, split into (hi, lo).
    #[test]
    fn exp_matches_high_precision_reference() {
        let cases = [
            (1.0, dd(std::f64::consts::E, 1.4456468917292502e-16)),
            (-1.0, dd(0.36787944117144233, -1.2428753672788363e-17)),
            (-37.5, dd(5.175555005801869e-17, -2.3609618230840602e-33)),
            (0.1, dd(1.1051709180756477, -8.149523913327619e-17)),
            (20.25, dd(622964442.1984454, 4.431525420935365e-08)),
        ];
        for (x, want) in cases {
            let got = DoubleDouble::from_f64(x).exp();
            assert!(rel_err(got, want) < 1e-30, "exp({x}): {got:?} vs {want:?}");
        }
    }

    #[test]
    fn sigmoid_matches_high_precision_reference() {
        let cases = [
            (1.0, dd(0.7310585786300049, -1.679727399649845e-17)),
            (-3.0, dd(0.04742587317756678, -1.793305391834216e-19)),
            (1.3, dd(0.7858349830425586, 9.853764789154056e-18)),
        ];
        for (x, want) in cases {
            let got = DoubleDouble::from_f64(x).sigmoid();
            assert!(rel_err(got, want) < 1e-30, "sigmoid({x}): {got:?} vs {want:?}");
        }
    }

    #[test]
    fn division_roundtrip() {
        let a = DoubleDouble::new(1.0, 1e-20);
        let b = DoubleDouble::from_f64(3.0);
        let q = a / b;
        assert!(rel_err(q * b, a) < 1e-31);
    }

    #[test]
    fn precision_parses() {
        assert_eq!("Extended".parse::<Precision>().unwrap(), Precision::Extended);
        assert!("quad".parse::<Precision>().is_err());
        assert!(Precision::Standard < Precision::Extended);
    }
}
