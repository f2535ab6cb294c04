//! Error sweeps over `n` and log-log rate fits.

use serde::{Deserialize, Serialize};

use crate::analysis::grid::{ball_points, GridSpec};
use crate::analysis::modulus::{direct_bound, MODULUS_RESOLUTION};
use crate::constructor::{build_dno, DnoOperator};
use crate::error::{DnoError, Result};
use crate::par;
use crate::precision::Precision;

/// How `eps` is chosen for each `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "rule", content = "value")]
pub enum EpsRule {
    Fixed(f64),
    /// `eps_n = n^{-p}`.
    Power(f64),
}

impl EpsRule {
    pub fn eps(&self, n: usize) -> f64 {
        match *self {
            EpsRule::Fixed(e) => e,
            EpsRule::Power(p) => (n as f64).powf(-p),
        }
    }
}

impl std::fmt::Display for EpsRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EpsRule::Fixed(e) => write!(f, "fixed:{e}"),
            EpsRule::Power(p) => write!(f, "n^-{p}"),
        }
    }
}

impl std::str::FromStr for EpsRule {
    type Err = String;

    /// Accepts `fixed:<eps>` or `n^-<p>`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(v) = s.strip_prefix("fixed:") {
            v.parse().map(EpsRule::Fixed).map_err(|_| format!("bad eps in `{s}`"))
        } else if let Some(v) = s.strip_prefix("n^-") {
            v.parse().map(EpsRule::Power).map_err(|_| format!("bad exponent in `{s}`"))
        } else {
            Err(format!("unknown eps rule `{s}` (expected fixed:<eps> or n^-<p>)"))
        }
    }
}

/// Radial information needed to evaluate the direct bound.
#[derive(Clone, Copy)]
pub struct BoundInputs<'a> {
    pub tau: f64,
    pub profile: &'a (dyn Fn(f64) -> f64 + Sync),
    pub f_sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub d: usize,
    pub n: Vec<usize>,
    pub eps: Vec<f64>,
    pub error: Vec<f64>,
    pub bound: Vec<Option<f64>>,
    pub argmax: Vec<Vec<f64>>,
    pub grid: GridSpec,
}

impl SweepResult {
    /// Rows whose error exceeds the bound.
    pub fn violations(&self) -> Vec<usize> {
        self.n
            .iter()
            .enumerate()
            .filter(|&(i, _)| self.bound[i].is_some_and(|b| !(self.error[i] <= b)))
            .map(|(_, &n)| n)
            .collect()
    }
}

/// The `n` values, accuracy rule, grid and evaluation precision of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub n_list: Vec<usize>,
    pub rule: EpsRule,
    pub grid: GridSpec,
    pub precision: Precision,
}

impl SweepSpec {
    pub fn new(n_list: Vec<usize>, rule: EpsRule, grid: GridSpec) -> Self {
        Self { n_list, rule, grid, precision: Precision::Standard }
    }
}

/// Reference function compared against the operator in a sweep.
pub type Target<'a> = &'a (dyn Fn(&[f64]) -> f64 + Sync);

/// Measures `sup |target - G|` on the ball grid for each operator.
///
/// `target` defaults to the sampled function itself.
pub fn sweep<F>(
    f: &F,
    target: Option<Target<'_>>,
    d: usize,
    spec: &SweepSpec,
    bound: Option<BoundInputs<'_>>,
) -> Result<SweepResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if spec.n_list.len() < 2 {
        return Err(DnoError::Config("a sweep needs at least two n values".into()));
    }
    let grid = &spec.grid;
    let points = ball_points(d, grid)?;
    let target_values: Vec<f64> = match target {
        Some(t) => par::map(&points, |x| t(x)),
        None => par::map(&points, |x| f(x)),
    };
    let modulus_grid = GridSpec::new(MODULUS_RESOLUTION, 0, grid.seed);
    let mut out = SweepResult { d, n: vec![], eps: vec![], error: vec![], bound: vec![], argmax: vec![], grid: *grid };
    for &n in &spec.n_list {
        let eps = spec.rule.eps(n);
        let op = build_dno(f, n, eps, d)?;
        let (error, at) = sup_deviation(&op, &points, &target_values, spec.precision)?;
        out.n.push(n);
        out.eps.push(eps);
        out.error.push(error);
        out.argmax.push(points[at].clone());
        out.bound.push(match bound {
            Some(b) => Some(direct_bound(b.tau, d, b.profile, n, eps, b.f_sup, &modulus_grid)?.total),
            None => None,
        });
    }
    Ok(out)
}

pub(crate) fn sup_deviation(
    op: &DnoOperator,
    points: &[Vec<f64>],
    target: &[f64],
    precision: Precision,
) -> Result<(f64, usize)> {
    let values = par::map(points, |x| op.evaluate_with(x, precision));
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, (v, t)) in values.into_iter().zip(target).enumerate() {
        let e = (v? - t).abs();
        let e = if e.is_nan() { f64::INFINITY } else { e };
        if e > best.0 {
            best = (e, i);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub alpha_hat: f64,
    pub log_constant: f64,
    pub r2: f64,
    /// Standard error of the slope.
    pub slope_stderr: f64,
    /// Half-width of the 95% confidence interval for `alpha_hat`.
    pub ci_half_width: f64,
    pub n_used: Vec<usize>,
}

/// Two-sided 97.5% quantiles of Student's t for 1..=30 degrees of freedom.
const T_975: [f64; 30] = [
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
    2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042,
];

/// Least squares on `(log n, log error)` with `alpha_hat = -slope`; the
/// first `skip` points are dropped.
pub fn rate_fit(n: &[usize], errors: &[f64], skip: usize) -> Result<RateReport> {
    if n.len() != errors.len() {
        return Err(DnoError::Shape { expected: n.len(), got: errors.len() });
    }
    let n = &n[skip.min(n.len())..];
    let errors = &errors[skip.min(errors.len())..];
    if n.len() < 4 {
        return Err(DnoError::Config(format!("rate fit needs at least 4 points, got {}", n.len())));
    }
    if let Some(i) = errors.iter().position(|&e| !(e > 0.0) || !e.is_finite()) {
        return Err(DnoError::ExactRepresentation(format!("error at n = {} is {}", n[i], errors[i])));
    }
    let xs: Vec<f64> = n.iter().map(|&v| (v as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r2 = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 0.0 };
    let dof = xs.len() - 2;
    let slope_stderr = (ss_res / dof as f64 / sxx).sqrt();
    let t = T_975.get(dof - 1).copied().unwrap_or(1.96);
    Ok(RateReport {
        alpha_hat: -slope,
        log_constant: intercept,
        r2,
        slope_stderr,
        ci_half_width: t * slope_stderr,
        n_used: n.to_vec(),
    })
}
