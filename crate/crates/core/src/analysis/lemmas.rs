//! Randomized checks of the sequence recursions and of the transfer of
//! Hölder continuity between a near-radial function and its profile.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::grid::random_ball_point;
use crate::corpus::TestFunction;
use crate::error::{DnoError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum SequenceKind {
    /// `sigma_n <= (k/n)^p sigma_k + tau_k` for all `1 <= k <= n`.
    Single { p: f64 },
    /// `mu_n <= (k/n)^r mu_k + nu_k + psi_k` and `nu_n <= (k/n)^s nu_k + psi_k`, `0 < r < s`.
    Coupled { r: f64, s: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceCheck {
    pub kind: SequenceKind,
    pub trials: usize,
    pub passed: usize,
    /// Largest `lhs / bound` seen over all trials and indices.
    pub worst_ratio: f64,
    /// Trials in which the bound without the first-term contribution fails.
    pub failed_without_first_term: usize,
}

/// Random nonnegative sequence with occasional zeros and spikes.
fn random_sequence(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let style = rng.random_range(0..4);
    (0..len)
        .map(|i| match style {
            0 => rng.random::<f64>(),
            1 => rng.random::<f64>() * ((i + 1) as f64).powf(-rng.random_range(0.0..2.0)),
            2 => {
                if rng.random_bool(0.2) {
                    rng.random::<f64>() * 10.0
                } else {
                    0.0
                }
            }
            _ => (-(i as f64) * rng.random_range(0.0..0.5)).exp(),
        })
        .collect()
}

/// Largest sequence obeying the single recursion with forcing `tau` and
/// first term `first`, scaled down at random where the recursion leaves room.
fn saturate(rng: &mut ChaCha8Rng, tau: &[f64], first: f64, p: f64) -> Vec<f64> {
    let len = tau.len();
    let mut sigma = vec![0.0; len];
    sigma[0] = first;
    for n in 2..=len {
        let cap = (1..n)
            .map(|k| (k as f64 / n as f64).powf(p) * sigma[k - 1] + tau[k - 1])
            .fold(f64::INFINITY, f64::min);
        let slack = if rng.random_bool(0.7) { 1.0 } else { rng.random::<f64>() };
        sigma[n - 1] = cap * slack;
    }
    sigma
}

fn holds(lhs: f64, bound: f64) -> bool {
    lhs <= bound * (1.0 + 1e-12) + 1e-300
}

/// Generates `trials` instances satisfying the hypothesis by construction and
/// checks the conclusion at every index.
///
/// The single case checks `sigma_n <= n^{-p} sigma_1 + 4^p n^{-p} sum_{k<=n} k^{p-1} tau_k`.
/// The coupled case checks the explicit majorant
/// `n^{-r} mu_1 + 4^r n^{-r} [sum k^{r-1} psi_k + nu_1 sum k^{r-1-s}
///  + 4^s sum_j j^{s-1} psi_j sum_{k=j}^n k^{r-1-s}]`.
pub fn sequence_lemma_check(kind: SequenceKind, trials: usize, len: usize, seed: u64) -> Result<SequenceCheck> {
    match kind {
        SequenceKind::Single { p } if !(p > 0.0) => {
            return Err(DnoError::Precondition(format!("need p > 0, got {p}")));
        }
        SequenceKind::Coupled { r, s } if !(r > 0.0 && r < s) => {
            return Err(DnoError::Precondition(format!("need 0 < r < s, got r = {r}, s = {s}")));
        }
        _ => {}
    }
    if trials == 0 || len == 0 {
        return Err(DnoError::Precondition("need at least one trial of positive length".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SequenceCheck { kind, trials, passed: 0, worst_ratio: 0.0, failed_without_first_term: 0 };
    for _ in 0..trials {
        let mut ok = true;
        let mut ok_without_first = true;
        match kind {
            SequenceKind::Single { p } => {
                let tau = random_sequence(&mut rng, len);
                let first = rng.random::<f64>() * 5.0;
                let sigma = saturate(&mut rng, &tau, first, p);
                let mut acc = 0.0;
                for n in 1..=len {
                    acc += (n as f64).powf(p - 1.0) * tau[n - 1];
                    let scale = (n as f64).powf(-p);
                    let tail = 4f64.powf(p) * scale * acc;
                    let bound = scale * first + tail;
                    ok &= holds(sigma[n - 1], bound);
                    ok_without_first &= holds(sigma[n - 1], tail);
                    if bound > 0.0 {
                        out.worst_ratio = out.worst_ratio.max(sigma[n - 1] / bound);
                    }
                }
            }
            SequenceKind::Coupled { r, s } => {
                let psi = random_sequence(&mut rng, len);
                let nu1 = rng.random::<f64>() * 5.0;
                let nu = saturate(&mut rng, &psi, nu1, s);
                let forcing: Vec<f64> = nu.iter().zip(&psi).map(|(a, b)| a + b).collect();
                let mu1 = rng.random::<f64>() * 5.0;
                let mu = saturate(&mut rng, &forcing, mu1, r);
                for n in 1..=len {
                    let pw = |k: usize, e: f64| (k as f64).powf(e);
                    let a: f64 = (1..=n).map(|k| pw(k, r - 1.0) * psi[k - 1]).sum();
                    let b: f64 = (1..=n).map(|k| pw(k, r - 1.0 - s)).sum();
                    let mut c = 0.0;
                    let mut suffix = 0.0;
                    for j in (1..=n).rev() {
                        suffix += pw(j, r - 1.0 - s);
                        c += pw(j, s - 1.0) * psi[j - 1] * suffix;
                    }
                    let scale = pw(n, -r);
                    let tail = 4f64.powf(r) * scale * (a + nu1 * b + 4f64.powf(s) * c);
                    let bound = scale * mu1 + tail;
                    ok &= holds(mu[n - 1], bound);
                    ok_without_first &= holds(mu[n - 1], tail);
                    if bound > 0.0 {
                        out.worst_ratio = out.worst_ratio.max(mu[n - 1] / bound);
                    }
                }
            }
        }
        out.passed += ok as usize;
        out.failed_without_first_term += (!ok_without_first) as usize;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferCheck {
    pub id: String,
    pub pairs: usize,
    /// `2^alpha d^{alpha/2} c`.
    pub ball_constant: f64,
    /// `2 tau + nu`.
    pub slack: f64,
    pub ball_violations: usize,
    pub profile_violations: usize,
    /// Largest `|f(x) - f(x')| - ball_constant |x - x'|^alpha` seen (at most `slack` when passing).
    pub ball_excess: f64,
    /// Largest `|g_f(t) - g_f(t')| - c |t - t'|^alpha` seen.
    pub profile_excess: f64,
}

impl TransferCheck {
    pub fn passed(&self) -> bool {
        self.ball_violations == 0 && self.profile_violations == 0
    }
}

/// Checks on random pairs that
/// `|f(x) - f(x')| <= 2^alpha d^{alpha/2} c |x - x'|^alpha + 2 tau + nu` on the ball and
/// `|g_f(t) - g_f(t')| <= c |t - t'|^alpha + 2 tau + nu` for the axis slice `g_f` on `[0, 1]`.
pub fn lip_transfer_check(f: &TestFunction, pairs: usize, seed: u64) -> Result<TransferCheck> {
    let m = &f.metadata;
    if !m.is_radial || m.profile.is_none() {
        return Err(DnoError::Config(format!("{}: transfer check needs radial metadata", f.id)));
    }
    let d = f.d;
    let alpha = m.alpha;
    let ball_constant = 2f64.powf(alpha) * (d as f64).powf(alpha / 2.0) * m.c;
    let slack = 2.0 * m.tau + m.nu;
    let tol = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = TransferCheck {
        id: f.id.clone(),
        pairs,
        ball_constant,
        slack,
        ball_violations: 0,
        profile_violations: 0,
        ball_excess: f64::NEG_INFINITY,
        profile_excess: f64::NEG_INFINITY,
    };
    for i in 0..pairs {
        let x = random_ball_point(&mut rng, d);
        let y = if i % 2 == 0 {
            random_ball_point(&mut rng, d)
        } else {
            // nearby partner, pulled back into the ball if needed
            let step = rng.random_range(1e-4..0.1);
            let dir = random_ball_point(&mut rng, d);
            let mut y: Vec<f64> = x.iter().zip(&dir).map(|(a, b)| a + step * b).collect();
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1.0 {
                y.iter_mut().for_each(|v| *v /= norm);
            }
            y
        };
        let dist = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let excess = (f.evaluate(&x) - f.evaluate(&y)).abs() - ball_constant * dist.powf(alpha);
        out.ball_excess = out.ball_excess.max(excess);
        if excess > slack + tol {
            out.ball_violations += 1;
        }

        let t: f64 = rng.random();
        let s: f64 = if i % 2 == 0 { rng.random() } else { (t + rng.random_range(-0.01..0.01)).clamp(0.0, 1.0) };
        let excess = (f.axis_slice(t) - f.axis_slice(s)).abs() - m.c * (t - s).abs().powf(alpha);
        out.profile_excess = out.profile_excess.max(excess);
        if excess > slack + tol {
            out.profile_violations += 1;
        }
    }
    Ok(out)
}
