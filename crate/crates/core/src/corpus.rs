//! Test functions with known smoothness and radial structure.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::grid::{ball_points, GridSpec};
use crate::error::{DnoError, Result};

/// Frequency of the non-radial perturbation `sin(PERTURBATION_FREQUENCY * x_j)`.
pub const PERTURBATION_FREQUENCY: f64 = 5.0;

/// Radial profile `g` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Profile {
    Linear,
    Power { alpha: f64 },
    ShiftedAbs { alpha: f64 },
    SmoothCos,
    Constant { value: f64 },
}

impl Profile {
    pub fn evaluate(&self, t: f64) -> f64 {
        match *self {
            Profile::Linear => t,
            Profile::Power { alpha } => t.max(0.0).powf(alpha),
            Profile::ShiftedAbs { alpha } => (t - 0.5).abs().powf(alpha),
            Profile::SmoothCos => 0.5 * (PI * t).cos(),
            Profile::Constant { value } => value,
        }
    }

    /// Hölder exponent.
    pub fn alpha(&self) -> f64 {
        match *self {
            Profile::Power { alpha } | Profile::ShiftedAbs { alpha } => alpha,
            _ => 1.0,
        }
    }

    /// Hölder constant on `[0, 1]` for [`Profile::alpha`].
    pub fn constant(&self) -> f64 {
        match self {
            Profile::SmoothCos => PI / 2.0,
            Profile::Constant { .. } => 0.0,
            _ => 1.0,
        }
    }

    /// `max_{t in [0,1]} |g(t)|`.
    pub fn sup_norm(&self) -> f64 {
        match *self {
            Profile::ShiftedAbs { alpha } => 0.5f64.powf(alpha),
            Profile::SmoothCos => 0.5,
            Profile::Constant { value } => value.abs(),
            _ => 1.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Profile::Linear => "linear",
            Profile::Power { .. } => "power",
            Profile::ShiftedAbs { .. } => "shifted-abs",
            Profile::SmoothCos => "smooth-cos",
            Profile::Constant { .. } => "constant",
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Profile::Power { alpha } | Profile::ShiftedAbs { alpha } if !(alpha > 0.0 && alpha <= 1.0) => {
                Err(DnoError::Domain(format!("exponent must lie in (0, 1], got {alpha}")))
            }
            Profile::Constant { value } if !value.is_finite() => Err(DnoError::Domain(format!("non-finite constant {value}"))),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonRadialKind {
    /// `f(x) = x_1`.
    Coordinate,
    /// `f(x) = x_1 x_2`.
    Bilinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "family")]
enum Formula {
    Radial { profile: Profile, tau: f64, coordinate: usize },
    NonRadial { kind: NonRadialKind },
}

/// Ground truth carried by a [`TestFunction`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub is_radial: bool,
    pub profile: Option<Profile>,
    pub alpha: f64,
    pub c: f64,
    pub tau: f64,
    pub nu: f64,
    /// Upper bound on `sup |f|` over the ball.
    pub sup_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub id: String,
    pub d: usize,
    formula: Formula,
    pub metadata: Metadata,
}

/// Result of checking a function against its metadata on seeded samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Audit {
    /// `max |f(x) - g(|x|^2)|` over ball samples (for non-radial entries,
    /// `g` is the last-axis slice `t -> f(0, ..., sqrt t)`).
    pub radial_defect: f64,
    /// `max |g(t) - g(t')| / |t - t'|^alpha` over pairs in `[0, 1]` (radial entries only).
    pub holder_quotient: f64,
}

impl TestFunction {
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        match self.formula {
            Formula::Radial { profile, tau, coordinate } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                let base = profile.evaluate(r2);
                if tau == 0.0 {
                    base
                } else {
                    base + tau * (PERTURBATION_FREQUENCY * x[coordinate]).sin()
                }
            }
            Formula::NonRadial { kind: NonRadialKind::Coordinate } => x[0],
            Formula::NonRadial { kind: NonRadialKind::Bilinear } => x[0] * x[1],
        }
    }

    /// The profile `g` for radial entries.
    pub fn profile(&self) -> Option<Profile> {
        self.metadata.profile
    }

    /// Coordinate carrying the perturbation, for radial entries.
    pub fn perturbed_coordinate(&self) -> Option<usize> {
        match self.formula {
            Formula::Radial { coordinate, .. } => Some(coordinate),
            Formula::NonRadial { .. } => None,
        }
    }

    /// `t -> f(0, ..., 0, sqrt t)`.
    pub fn axis_slice(&self, t: f64) -> f64 {
        let mut x = vec![0.0; self.d];
        x[self.d - 1] = t.max(0.0).sqrt();
        self.evaluate(&x)
    }

    pub fn audit(&self, seed: u64) -> Result<Audit> {
        let points = ball_points(self.d, &GridSpec::new(10_000, 1_000, seed))?;
        let reference = |r2: f64| match self.metadata.profile {
            Some(g) => g.evaluate(r2),
            None => self.axis_slice(r2),
        };
        let radial_defect = points
            .iter()
            .map(|x| (self.evaluate(x) - reference(x.iter().map(|v| v * v).sum())).abs())
            .fold(0.0, f64::max);
        let mut holder_quotient = 0.0f64;
        if let Some(g) = self.metadata.profile {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9);
            let alpha = g.alpha();
            for i in 0..10_000 {
                let (t, s): (f64, f64) = if i % 4 == 0 {
                    // close pairs probe the local behaviour
                    let t = rng.random_range(0.0..=1.0);
                    (t, (t + rng.random_range(-1e-3..1e-3)).clamp(0.0, 1.0))
                } else {
                    (rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0))
                };
                let h = (t - s).abs();
                if h > 0.0 {
                    holder_quotient = holder_quotient.max((g.evaluate(t) - g.evaluate(s)).abs() / h.powf(alpha));
                }
            }
        }
        Ok(Audit { radial_defect, holder_quotient })
    }

    fn checked(self, seed: u64) -> Result<Self> {
        let audit = self.audit(seed)?;
        let m = &self.metadata;
        if m.is_radial && audit.radial_defect > m.tau + 1e-12 {
            return Err(DnoError::Precondition(format!(
                "{}: radial defect {:.3e} exceeds declared tau {}",
                self.id, audit.radial_defect, m.tau
            )));
        }
        if m.is_radial && audit.holder_quotient > m.c + 1e-9 {
            return Err(DnoError::Precondition(format!(
                "{}: Hölder quotient {:.6} exceeds declared c {}",
                self.id, audit.holder_quotient, m.c
            )));
        }
        Ok(self)
    }
}

/// `f(x) = g(|x|^2) + tau sin(5 x_j)` with `j = seed mod max(d - 1, 1)`, so the
/// last axis stays unperturbed when `d >= 2`.
pub fn make_radial(profile: Profile, d: usize, tau: f64, seed: u64) -> Result<TestFunction> {
    profile.validate()?;
    if d == 0 {
        return Err(DnoError::Domain("dimension must be at least 1".into()));
    }
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(DnoError::Domain(format!("tau must be finite and nonnegative, got {tau}")));
    }
    let coordinate = (seed % (d.max(2) - 1) as u64) as usize;
    let id = match profile {
        Profile::Power { alpha } | Profile::ShiftedAbs { alpha } => format!("{}{alpha}-d{d}-tau{tau}", profile.name()),
        Profile::Constant { value } => format!("constant{value}-d{d}"),
        _ => format!("{}-d{d}-tau{tau}", profile.name()),
    };
    TestFunction {
        id,
        d,
        formula: Formula::Radial { profile, tau, coordinate },
        metadata: Metadata {
            is_radial: true,
            profile: Some(profile),
            alpha: profile.alpha(),
            c: profile.constant(),
            tau,
            nu: 0.0,
            sup_norm: profile.sup_norm() + tau,
        },
    }
    .checked(seed)
}

pub fn make_nonradial(kind: NonRadialKind, d: usize) -> Result<TestFunction> {
    if d < 2 {
        return Err(DnoError::Domain(format!("non-radial controls need d >= 2, got {d}")));
    }
    let (name, c, sup_norm) = match kind {
        NonRadialKind::Coordinate => ("coordinate", 1.0, 1.0),
        NonRadialKind::Bilinear => ("bilinear", 2f64.sqrt(), 0.5),
    };
    Ok(TestFunction {
        id: format!("{name}-d{d}"),
        d,
        formula: Formula::NonRadial { kind },
        metadata: Metadata { is_radial: false, profile: None, alpha: 1.0, c, tau: 0.0, nu: 0.0, sup_norm },
    })
}

/// One line of a corpus manifest: `id kind d alpha tau seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub kind: String,
    pub d: usize,
    pub alpha: Option<f64>,
    pub tau: f64,
    pub seed: u64,
}

impl ManifestEntry {
    pub fn build(&self) -> Result<TestFunction> {
        let alpha = || self.alpha.ok_or_else(|| DnoError::Config(format!("{}: `{}` needs an exponent", self.id, self.kind)));
        let mut f = match self.kind.as_str() {
            "linear" => make_radial(Profile::Linear, self.d, self.tau, self.seed)?,
            "smooth-cos" => make_radial(Profile::SmoothCos, self.d, self.tau, self.seed)?,
            "power" => make_radial(Profile::Power { alpha: alpha()? }, self.d, self.tau, self.seed)?,
            "shifted-abs" => make_radial(Profile::ShiftedAbs { alpha: alpha()? }, self.d, self.tau, self.seed)?,
            "constant" => make_radial(Profile::Constant { value: alpha()? }, self.d, 0.0, self.seed)?,
            "coordinate" => make_nonradial(NonRadialKind::Coordinate, self.d)?,
            "bilinear" => make_nonradial(NonRadialKind::Bilinear, self.d)?,
            other => return Err(DnoError::Config(format!("{}: unknown kind `{other}`", self.id))),
        };
        f.id = self.id.clone();
        Ok(f)
    }
}

/// Parses a manifest. Blank lines and `#` comments are skipped; `-` stands
/// for a missing exponent (for `constant` the column holds the value).
pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |what: &str| DnoError::Config(format!("manifest line {}: {what}", lineno + 1));
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 6 {
            return Err(bad(&format!("expected 6 columns, found {}", cols.len())));
        }
        let alpha = match cols[3] {
            "-" => None,
            s => Some(s.parse::<f64>().map_err(|_| bad("bad exponent"))?),
        };
        out.push(ManifestEntry {
            id: cols[0].to_string(),
            kind: cols[1].to_string(),
            d: cols[2].parse().map_err(|_| bad("bad dimension"))?,
            alpha,
            tau: cols[4].parse().map_err(|_| bad("bad tau"))?,
            seed: cols[5].parse().map_err(|_| bad("bad seed"))?,
        });
    }
    Ok(out)
}

pub const DEFAULT_MANIFEST: &str = "\
# id                 kind         d  alpha  tau   seed
linear-radial        linear       2  -      0     1
power-half-radial    power        3  0.5    0     2
power-half-tau       power        2  0.5    0.05  3
shifted-abs-radial   shifted-abs  2  1      0     4
shifted-abs-half     shifted-abs  3  0.5    0     5
smooth-cos-radial    smooth-cos   2  -      0     6
linear-tau           linear       3  -      0.05  7
constant-radial      constant     2  1      0     8
coordinate           coordinate   2  -      0     9
bilinear             bilinear     2  -      0     10
";

pub fn default_corpus() -> Result<Vec<TestFunction>> {
    parse_manifest(DEFAULT_MANIFEST)?.iter().map(ManifestEntry::build).collect()
}

/// Looks up `id` in the default manifest.
pub fn lookup(id: &str) -> Result<TestFunction> {
    parse_manifest(DEFAULT_MANIFEST)?
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| DnoError::Config(format!("no corpus entry `{id}`")))?
        .build()
}

pub type NamedFn = (&'static str, fn(f64) -> f64);

/// Named functions on `[-1, 1]` for the univariate checks.
pub fn univariate_suite() -> Vec<NamedFn> {
    vec![
        ("identity", |t| t),
        ("sqrt-abs", |t| t.abs().sqrt()),
        ("abs", |t| t.abs()),
        ("smooth-cos-rescaled", |t| Profile::SmoothCos.evaluate((t + 1.0) / 2.0)),
        ("power-half-rescaled", |t| Profile::Power { alpha: 0.5 }.evaluate((t + 1.0) / 2.0)),
    ]
}
