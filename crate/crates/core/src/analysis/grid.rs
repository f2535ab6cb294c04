//! Evaluation grids and sup-norm estimation.
//!
//! A grid is a deterministic part (equispaced points on an interval, Halton
//! points inside the ball) plus seeded uniform random points, so estimates are
//! reproducible without being aligned to any particular lattice.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{DnoError, Result};
use crate::par;

/// Seed used by the constructors' internal verification grids.
pub const VERIFICATION_SEED: u64 = 0x5EED_0FD0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Number of deterministic points.
    pub resolution: usize,
    /// Number of seeded random points added to the deterministic ones.
    pub random: usize,
    pub seed: u64,
}

impl GridSpec {
    pub const fn new(resolution: usize, random: usize, seed: u64) -> Self {
        Self { resolution, random, seed }
    }

    pub const fn with_seed(seed: u64) -> Self {
        Self { resolution: 10_000, random: 1_000, seed }
    }

    fn check(&self) -> Result<()> {
        if self.resolution + self.random == 0 {
            return Err(DnoError::Config("grid has no points".into()));
        }
        Ok(())
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::with_seed(VERIFICATION_SEED)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Domain {
    Interval { a: f64, b: f64 },
    Ball { d: usize },
}

impl Domain {
    pub fn points(&self, grid: &GridSpec) -> Result<Vec<Vec<f64>>> {
        match *self {
            Domain::Interval { a, b } => Ok(interval_points(a, b, grid)?.into_iter().map(|t| vec![t]).collect()),
            Domain::Ball { d } => ball_points(d, grid),
        }
    }
}

/// `resolution` equispaced points including both ends, then `random` uniform draws.
pub fn interval_points(a: f64, b: f64, grid: &GridSpec) -> Result<Vec<f64>> {
    grid.check()?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(DnoError::Domain(format!("invalid interval [{a}, {b}]")));
    }
    let mut out = Vec::with_capacity(grid.resolution + grid.random);
    match grid.resolution {
        0 => {}
        1 => out.push(0.5 * (a + b)),
        m => {
            let h = (b - a) / (m - 1) as f64;
            out.extend((0..m).map(|i| if i == m - 1 { b } else { a + i as f64 * h }));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(grid.seed);
    out.extend((0..grid.random).map(|_| rng.random_range(a..=b)));
    Ok(out)
}

/// Origin, then Halton points of the cube `[-1,1]^d` that fall in the closed
/// unit ball (`resolution` points in total), then `random` uniform ball points.
pub fn ball_points(d: usize, grid: &GridSpec) -> Result<Vec<Vec<f64>>> {
    grid.check()?;
    if d == 0 {
        return Err(DnoError::Domain("dimension must be at least 1".into()));
    }
    let primes = first_primes(d);
    let mut out = Vec::with_capacity(grid.resolution + grid.random);
    if grid.resolution > 0 {
        out.push(vec![0.0; d]);
    }
    let mut index = 1u64;
    while out.len() < grid.resolution {
        let p: Vec<f64> = primes.iter().map(|&b| 2.0 * radical_inverse(index, b) - 1.0).collect();
        index += 1;
        if p.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
            out.push(p);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(grid.seed);
    out.extend((0..grid.random).map(|_| random_ball_point(&mut rng, d)));
    Ok(out)
}

/// Uniform point of the unit ball: Gaussian direction, radius `U^{1/d}`.
pub fn random_ball_point<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-300 {
            let u: f64 = rng.random();
            let r = u.powf(1.0 / d as f64);
            return g.into_iter().map(|v| v / norm * r).collect();
        }
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    r
}

fn first_primes(count: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(count);
    let mut c = 2u64;
    while primes.len() < count {
        if primes.iter().take_while(|&&p| p * p <= c).all(|&p| !c.is_multiple_of(p)) {
            primes.push(c);
        }
        c += 1;
    }
    primes
}

/// Largest deviation found on a grid and where it occurred.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupError {
    pub value: f64,
    pub argmax: Vec<f64>,
}

/// `max |target(x) - approx(x)|` over the points of `domain` under `grid`.
///
/// A NaN deviation counts as infinite so that failures are never hidden.
pub fn sup_error<F, G>(target: F, approx: G, domain: &Domain, grid: &GridSpec) -> Result<SupError>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
    G: Fn(&[f64]) -> f64 + Sync + Send,
{
    let points = domain.points(grid)?;
    sup_error_on(&points, |x| Ok(target(x) - approx(x)))
}

/// Sup of `|deviation(x)|` over explicit points, with errors propagated.
pub fn sup_error_on<D>(points: &[Vec<f64>], deviation: D) -> Result<SupError>
where
    D: Fn(&[f64]) -> Result<f64> + Sync + Send,
{
    if points.is_empty() {
        return Err(DnoError::Config("grid has no points".into()));
    }
    let values = par::map(points, |x| deviation(x));
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, v) in values.into_iter().enumerate() {
        let v = v?;
        let a = if v.is_nan() { f64::INFINITY } else { v.abs() };
        if a > best.1 {
            best = (i, a);
        }
    }
    Ok(SupError { value: best.1, argmax: points[best.0].clone() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_grid_has_both_ends() {
        let p = interval_points(-1.0, 1.0, &GridSpec::new(5, 0, 0)).unwrap();
        assert_eq!(p, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn ball_grid_stays_in_ball() {
        for d in [1, 2, 5] {
            let pts = ball_points(d, &GridSpec::new(2000, 500, 3)).unwrap();
            assert_eq!(pts.len(), 2500);
            assert!(pts.iter().all(|p| p.len() == d && p.iter().map(|v| v * v).sum::<f64>() <= 1.0 + 1e-15));
        }
    }

    #[test]
    fn grids_are_seed_reproducible() {
        let a = ball_points(3, &GridSpec::new(100, 100, 9)).unwrap();
        let b = ball_points(3, &GridSpec::new(100, 100, 9)).unwrap();
        let c = ball_points(3, &GridSpec::new(100, 100, 10)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn empty_grid_is_a_config_error() {
        let e = sup_error(|_| 0.0, |_| 0.0, &Domain::Interval { a: 0.0, b: 1.0 }, &GridSpec::new(0, 0, 0));
        assert!(matches!(e, Err(DnoError::Config(_))));
    }

    #[test]
    fn sup_error_examples() {
        let dom = Domain::Interval { a: -1.0, b: 1.0 };
        let g = GridSpec::default();
        assert_eq!(sup_error(|x| x[0], |x| x[0], &dom, &g).unwrap().value, 0.0);
        let e = sup_error(|x| x[0], |x| x[0] + 0.1, &dom, &g).unwrap().value;
        assert!((e - 0.1).abs() < 1e-15);
        let s = sup_error(|x| x[0] * x[0], |_| 0.0, &dom, &g).unwrap();
        assert_eq!(s.value, 1.0);
        assert_eq!(s.argmax, vec![-1.0]);
    }
}
