//! Rate-based verdicts on the smoothness and radial structure of a sampled function.
//!
//! The candidate profile is the last-axis slice `g_f(t) = f(0, ..., sqrt t)`.
//! Operators built from `f` converge to `g_f(|x|^2)`; how fast they do (the
//! residual sweep) measures smoothness, while how far `f` is from
//! `g_f(|x|^2)` measures radialness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::grid::{ball_points, random_ball_point, GridSpec};
use crate::analysis::modulus::{direct_bound, MODULUS_RESOLUTION};
use crate::analysis::rate::{rate_fit, EpsRule, RateReport};
use crate::constructor::build_dno;
use crate::error::{DnoError, Result};
use crate::par;
use crate::precision::Precision;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Largest radial defect still called radial.
    pub radial_tau: f64,
    /// Smallest R^2 of the residual fit for either positive verdict.
    pub r2_min: f64,
    /// Allowed gap between the pilot and final exponents, and largest
    /// allowed confidence half-width.
    pub alpha_band: f64,
    /// Plateau when `error(n_max) >= plateau_ratio * error(n_min)`.
    pub plateau_ratio: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { radial_tau: 0.1, r2_min: 0.9, alpha_band: 0.25, plateau_ratio: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualifyConfig {
    pub n_list: Vec<usize>,
    pub seed: u64,
    pub grid: GridSpec,
    /// Random ball points used for the radial defect.
    pub defect_samples: usize,
    /// Points of `[0, 1]` at which the recovered profile is reported.
    pub profile_samples: usize,
    /// Leading sweep points left out of the fits.
    pub skip: usize,
    pub thresholds: Thresholds,
    pub precision: Precision,
}

impl QualifyConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            n_list: vec![8, 16, 32, 64, 128],
            seed,
            grid: GridSpec::with_seed(seed),
            defect_samples: 10_000,
            profile_samples: 33,
            skip: 0,
            thresholds: Thresholds::default(),
            precision: Precision::Standard,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "verdict")]
pub enum SmoothVerdict {
    Qualified { alpha_hat: f64 },
    NotQualified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "verdict")]
pub enum RadialVerdict {
    RadialWithin { tau_hat: f64 },
    NonRadial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualificationReport {
    pub seed: u64,
    pub d: usize,
    pub n: Vec<usize>,
    pub eps: Vec<f64>,
    /// `sup |f - G|` per `n`.
    pub error: Vec<f64>,
    /// `sup |G - g_f(|x|^2)|` per `n`; the rate is fitted on these.
    pub residual: Vec<f64>,
    /// Direct bound evaluated with the recovered profile and `tau_hat`.
    pub bound: Vec<f64>,
    pub alpha_pilot: Option<f64>,
    pub alpha_hat: Option<f64>,
    pub alpha_ci_half_width: Option<f64>,
    pub r2: f64,
    pub tau_hat: f64,
    /// `max |g_f(t) - f(0, ..., -sqrt t)|`, part of `tau_hat`.
    pub slice_asymmetry: f64,
    pub plateau: bool,
    pub profile: Vec<[f64; 2]>,
    pub eps_rule: EpsRule,
    pub thresholds: Thresholds,
    pub verdict_smooth: SmoothVerdict,
    pub verdict_radial: RadialVerdict,
}

fn slice<F: Fn(&[f64]) -> f64>(f: &F, d: usize, t: f64, sign: f64) -> f64 {
    let mut x = vec![0.0; d];
    x[d - 1] = sign * t.max(0.0).sqrt();
    f(&x)
}

struct Pass {
    eps: Vec<f64>,
    error: Vec<f64>,
    residual: Vec<f64>,
}

fn run_pass<F>(f: &F, d: usize, cfg: &QualifyConfig, rule: EpsRule, points: &[Vec<f64>], fx: &[f64], gx: &[f64]) -> Result<Pass>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let mut pass = Pass { eps: vec![], error: vec![], residual: vec![] };
    for &n in &cfg.n_list {
        let eps = rule.eps(n);
        let op = build_dno(f, n, eps, d)?;
        let values = par::map(points, |x| op.evaluate_with(x, cfg.precision));
        let (mut error, mut residual) = (0.0f64, 0.0f64);
        for (i, v) in values.into_iter().enumerate() {
            let v = v?;
            error = error.max((v - fx[i]).abs());
            residual = residual.max((v - gx[i]).abs());
        }
        pass.eps.push(eps);
        pass.error.push(error);
        pass.residual.push(residual);
    }
    Ok(pass)
}

fn fit(cfg: &QualifyConfig, residual: &[f64]) -> Result<Option<RateReport>> {
    match rate_fit(&cfg.n_list, residual, cfg.skip) {
        Ok(r) => Ok(Some(r)),
        Err(DnoError::ExactRepresentation(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn qualify<F>(f: &F, d: usize, cfg: &QualifyConfig) -> Result<QualificationReport>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if d == 0 {
        return Err(DnoError::Domain("dimension must be at least 1".into()));
    }
    if cfg.n_list.windows(2).any(|w| w[0] >= w[1]) || cfg.n_list.len() < 4 + cfg.skip {
        return Err(DnoError::Config("qualification needs an increasing n list with at least 4 fitted values".into()));
    }
    let checked = |x: &[f64]| -> Result<f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(DnoError::Data { index: 0, point: x.to_vec() })
        }
    };
    let g = |t: f64| slice(f, d, t, 1.0);

    let m = cfg.profile_samples.max(2);
    let profile: Vec<[f64; 2]> = (0..m)
        .map(|i| {
            let t = i as f64 / (m - 1) as f64;
            Ok([t, checked(&{
                let mut x = vec![0.0; d];
                x[d - 1] = t.sqrt();
                x
            })?])
        })
        .collect::<Result<_>>()?;

    let slice_grid: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
    let slice_asymmetry = slice_grid.iter().map(|&t| (g(t) - slice(f, d, t, -1.0)).abs()).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x7A0_D3F);
    let defect_points: Vec<Vec<f64>> = (0..cfg.defect_samples).map(|_| random_ball_point(&mut rng, d)).collect();
    let mut defect = 0.0f64;
    for x in &defect_points {
        let v = checked(x)?;
        defect = defect.max((v - g(x.iter().map(|v| v * v).sum())).abs());
    }
    let tau_hat = defect.max(slice_asymmetry);

    let points = ball_points(d, &cfg.grid)?;
    let fx = par::map(&points, |x| checked(x)).into_iter().collect::<Result<Vec<_>>>()?;
    let gx = par::map(&points, |x| g(x.iter().map(|v| v * v).sum()));

    let pilot_rule = EpsRule::Power(2.0);
    let pilot = run_pass(f, d, cfg, pilot_rule, &points, &fx, &gx)?;
    let pilot_fit = fit(cfg, &pilot.residual)?;
    let alpha_pilot = pilot_fit.as_ref().map(|r| r.alpha_hat);
    let rule = EpsRule::Power(1.0 + alpha_pilot.unwrap_or(1.0).clamp(0.0, 1.0));
    let last = if rule == pilot_rule { pilot } else { run_pass(f, d, cfg, rule, &points, &fx, &gx)? };
    let final_fit = fit(cfg, &last.residual)?;

    let f_sup = fx.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let modulus_grid = GridSpec::new(MODULUS_RESOLUTION, 0, cfg.seed);
    let bound = cfg
        .n_list
        .iter()
        .zip(&last.eps)
        .map(|(&n, &eps)| Ok(direct_bound(tau_hat, d, g, n, eps, f_sup, &modulus_grid)?.total))
        .collect::<Result<Vec<_>>>()?;

    let th = cfg.thresholds;
    let r2 = final_fit.as_ref().map_or(0.0, |r| r.r2);
    let plateau = last.error[last.error.len() - 1] >= th.plateau_ratio * last.error[cfg.skip];
    let verdict_smooth = match (&final_fit, alpha_pilot) {
        (Some(r), Some(a0))
            if r.r2 >= th.r2_min && (r.alpha_hat - a0).abs() <= th.alpha_band && r.ci_half_width <= th.alpha_band =>
        {
            SmoothVerdict::Qualified { alpha_hat: r.alpha_hat }
        }
        _ => SmoothVerdict::NotQualified,
    };
    let verdict_radial = if tau_hat <= th.radial_tau && final_fit.is_some() && r2 >= th.r2_min {
        RadialVerdict::RadialWithin { tau_hat }
    } else {
        RadialVerdict::NonRadial
    };

    Ok(QualificationReport {
        seed: cfg.seed,
        d,
        n: cfg.n_list.clone(),
        eps: last.eps,
        error: last.error,
        residual: last.residual,
        bound,
        alpha_pilot,
        alpha_hat: final_fit.as_ref().map(|r| r.alpha_hat),
        alpha_ci_half_width: final_fit.as_ref().map(|r| r.ci_half_width),
        r2,
        tau_hat,
        slice_asymmetry,
        plateau,
        profile,
        eps_rule: rule,
        thresholds: th,
        verdict_smooth,
        verdict_radial,
    })
}
