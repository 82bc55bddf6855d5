//! Paths `Γ ↦ (B, θ, φ)` through the reduced two-level control space.
//!
//! `B` is the splitting of the level pair and `(θ, φ)` the spherical angles
//! of the effective field direction. Paths come either from analytic families
//! with exact derivatives ([`BetaPath`]) or from sample tables interpolated by
//! cubic splines ([`SampledPath`]).

use std::f64::consts::{PI, TAU};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spline::CubicSpline;

/// Absolute splitting below which a path point counts as the crossing.
pub const CROSSING_THRESHOLD: f64 = 1e-12;

/// A point `(B, θ, φ)` with `B ≥ 0`, `θ ∈ [0, π]` and `φ ∈ [0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterPoint {
    pub b: f64,
    pub theta: f64,
    pub phi: f64,
}

/// `(∂_Γ B, ∂_Γ θ, ∂_Γ φ)` in the canonical chart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathDerivative {
    pub db: f64,
    pub dtheta: f64,
    pub dphi: f64,
}

impl PathDerivative {
    /// Modulus `√(θ'² + φ'² sin²θ)` of the transverse drive per unit Γ.
    pub fn drive_norm(&self, theta: f64) -> f64 {
        let s = theta.sin();
        (self.dtheta * self.dtheta + self.dphi * self.dphi * s * s).sqrt()
    }
}

impl ParameterPoint {
    /// Canonicalizing constructor; any real `(b, θ, φ)` describes a field.
    pub fn new(b: f64, theta: f64, phi: f64) -> Self {
        canonicalize(
            b,
            theta,
            phi,
            PathDerivative {
                db: 0.0,
                dtheta: 0.0,
                dphi: 0.0,
            },
        )
        .0
    }

    /// Unit field direction `(sinθ cosφ, sinθ sinφ, cosθ)`.
    pub fn direction(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Maps raw coordinates onto the canonical chart, transforming the
/// derivative alongside. Exactly at a pole φ keeps its incoming value.
pub fn canonicalize(
    b: f64,
    theta: f64,
    phi: f64,
    d: PathDerivative,
) -> (ParameterPoint, PathDerivative) {
    let (mut b, mut theta, mut phi) = (b, theta, phi);
    let mut d = d;
    if b < 0.0 {
        b = -b;
        d.db = -d.db;
        theta = PI - theta;
        d.dtheta = -d.dtheta;
        phi += PI;
    }
    theta = theta.rem_euclid(TAU);
    if theta > PI {
        theta = TAU - theta;
        d.dtheta = -d.dtheta;
        phi += PI;
    }
    phi = phi.rem_euclid(TAU);
    if phi >= TAU {
        phi = 0.0;
    }
    (ParameterPoint { b, theta, phi }, d)
}

/// A one-parameter path through `(B, θ, φ)`.
pub trait ParameterPath: Send + Sync {
    /// Closed interval of admissible Γ.
    fn gamma_range(&self) -> (f64, f64);

    fn point_at(&self, gamma: f64) -> ParameterPoint;

    fn derivative_at(&self, gamma: f64) -> PathDerivative;

    /// Γ at which the splitting vanishes, if the path reaches a crossing.
    fn crossing_gamma(&self) -> Option<f64>;

    /// Transverse drive per unit Γ, `√(θ'² + φ'² sin²θ)`.
    fn drive_norm(&self, gamma: f64) -> f64 {
        let p = self.point_at(gamma);
        self.derivative_at(gamma).drive_norm(p.theta)
    }
}

/// Parameters of the power-law family `θ = θ₀ + Γ^β`, `Γ = Bτ`, `φ = φ₀`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaFamilyParams {
    pub beta: f64,
    pub theta0: f64,
    pub tau: f64,
    pub phi0: f64,
}

impl BetaFamilyParams {
    pub fn new(beta: f64, theta0: f64, tau: f64, phi0: f64) -> Result<Self> {
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::Input(format!(
                "beta must be non-negative, got {beta}"
            )));
        }
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::Input(format!("tau must be positive, got {tau}")));
        }
        Ok(Self {
            beta,
            theta0,
            tau,
            phi0,
        })
    }
}

/// Path of the β family on `Γ ∈ [0, gamma_max]`, crossing at `Γ = 0`.
#[derive(Clone, Debug)]
pub struct BetaPath {
    params: BetaFamilyParams,
    gamma_max: f64,
}

pub fn make_beta_path(params: BetaFamilyParams, gamma_max: f64) -> Result<BetaPath> {
    if !(gamma_max > 0.0) || !gamma_max.is_finite() {
        return Err(Error::Input(format!(
            "gamma_max must be positive, got {gamma_max}"
        )));
    }
    Ok(BetaPath { params, gamma_max })
}

impl BetaPath {
    pub fn params(&self) -> &BetaFamilyParams {
        &self.params
    }

    fn raw(&self, gamma: f64) -> (ParameterPoint, PathDerivative) {
        let p = &self.params;
        let g = gamma.max(0.0);
        let dtheta = if p.beta == 0.0 {
            0.0
        } else if g == 0.0 && p.beta < 1.0 {
            f64::INFINITY
        } else {
            p.beta * g.powf(p.beta - 1.0)
        };
        canonicalize(
            g / p.tau,
            p.theta0 + g.powf(p.beta),
            p.phi0,
            PathDerivative {
                db: 1.0 / p.tau,
                dtheta,
                dphi: 0.0,
            },
        )
    }
}

impl ParameterPath for BetaPath {
    fn gamma_range(&self) -> (f64, f64) {
        (0.0, self.gamma_max)
    }

    fn point_at(&self, gamma: f64) -> ParameterPoint {
        self.raw(gamma).0
    }

    /// For `β < 1` the angle derivative diverges at `Γ = 0` and is reported
    /// as `+∞` (up to chart sign).
    fn derivative_at(&self, gamma: f64) -> PathDerivative {
        self.raw(gamma).1
    }

    fn crossing_gamma(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// One row of a sampled path table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub gamma: f64,
    pub b: f64,
    pub theta: f64,
    pub phi: f64,
}

/// Path interpolated from a table of samples.
#[derive(Clone, Debug)]
pub struct SampledPath {
    b: CubicSpline,
    theta: CubicSpline,
    phi: CubicSpline,
    range: (f64, f64),
    crossing: Option<f64>,
}

pub fn make_sampled_path(samples: &[(f64, ParameterPoint)]) -> Result<SampledPath> {
    if samples.len() < 4 {
        return Err(Error::Input(format!(
            "a sampled path needs at least 4 samples, got {}",
            samples.len()
        )));
    }
    if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::Input(
            "sample Γ values must be strictly increasing".into(),
        ));
    }
    if samples.iter().any(|(g, p)| {
        !(g.is_finite() && p.b.is_finite() && p.theta.is_finite() && p.phi.is_finite())
    }) {
        return Err(Error::Input("non-finite value in path samples".into()));
    }
    let gammas: Vec<f64> = samples.iter().map(|s| s.0).collect();
    // unwrap φ so the spline does not see 2π jumps
    let mut phis = Vec::with_capacity(samples.len());
    let mut prev: Option<f64> = None;
    for (_, p) in samples {
        let mut phi = p.phi;
        if let Some(q) = prev {
            phi += ((q - phi) / TAU).round() * TAU;
        }
        phis.push(phi);
        prev = Some(phi);
    }
    let spline = |ys: Vec<f64>| {
        CubicSpline::new(gammas.clone(), ys)
            .ok_or_else(|| Error::Input("could not build spline".into()))
    };
    let b = spline(samples.iter().map(|s| s.1.b).collect())?;
    let theta = spline(samples.iter().map(|s| s.1.theta).collect())?;
    let phi = spline(phis)?;
    let range = (gammas[0], gammas[gammas.len() - 1]);
    let bs: Vec<f64> = samples.iter().map(|s| s.1.b).collect();
    let crossing = detect_crossing(&b, &gammas).or_else(|| detect_kink(&gammas, &bs));
    Ok(SampledPath {
        b,
        theta,
        phi,
        range,
        crossing,
    })
}

/// First Γ where the interpolated splitting drops to the crossing threshold.
fn detect_crossing(b: &CubicSpline, gammas: &[f64]) -> Option<f64> {
    const SUB: usize = 16;
    let below = |g: f64| b.eval(g) <= CROSSING_THRESHOLD;
    if below(gammas[0]) {
        return Some(gammas[0]);
    }
    for w in gammas.windows(2) {
        let mut lo = w[0];
        for s in 1..=SUB {
            let hi = w[0] + (w[1] - w[0]) * s as f64 / SUB as f64;
            if below(hi) {
                let mut hi = hi;
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if below(mid) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return Some(hi);
            }
            lo = hi;
        }
    }
    None
}

/// A field magnitude that passes through zero between samples shows up as a
/// V-shaped minimum of `|B|`; both one-sided linear extrapolations then land
/// on the same zero.
fn detect_kink(gammas: &[f64], bs: &[f64]) -> Option<f64> {
    let n = gammas.len();
    for i in 1..n.saturating_sub(2) {
        let sl = (bs[i] - bs[i - 1]) / (gammas[i] - gammas[i - 1]);
        let sr = (bs[i + 2] - bs[i + 1]) / (gammas[i + 2] - gammas[i + 1]);
        if !(sl < 0.0 && sr > 0.0) {
            continue;
        }
        let zl = gammas[i] - bs[i] / sl;
        let zr = gammas[i + 1] - bs[i + 1] / sr;
        let h = gammas[i + 1] - gammas[i];
        let inside = |z: f64| z >= gammas[i] - 1e-12 * h && z <= gammas[i + 1] + 1e-12 * h;
        if inside(zl) && inside(zr) && (zl - zr).abs() <= 0.05 * h {
            return Some(0.5 * (zl + zr));
        }
    }
    None
}

impl SampledPath {
    fn raw(&self, gamma: f64) -> (ParameterPoint, PathDerivative) {
        let g = gamma.clamp(self.range.0, self.range.1);
        let mut b = self.b.eval(g);
        let mut db = self.b.derivative(g);
        if let Some(c) = self.crossing {
            if (g - c).abs() <= f64::EPSILON * c.abs().max(1.0) {
                b = 0.0;
                db = db.abs();
            }
        }
        canonicalize(
            b,
            self.theta.eval(g),
            self.phi.eval(g),
            PathDerivative {
                db,
                dtheta: self.theta.derivative(g),
                dphi: self.phi.derivative(g),
            },
        )
    }

    /// Reads a `gamma,b,theta,phi` CSV table.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        Self::from_reader(file)
    }

    pub fn from_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        let expected = ["gamma", "b", "theta", "phi"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(Error::Input(format!(
                "expected header `gamma,b,theta,phi`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut samples = Vec::new();
        for row in rdr.deserialize::<PathSample>() {
            let s = row?;
            samples.push((
                s.gamma,
                ParameterPoint {
                    b: s.b,
                    theta: s.theta,
                    phi: s.phi,
                },
            ));
        }
        make_sampled_path(&samples)
    }
}

impl ParameterPath for SampledPath {
    fn gamma_range(&self) -> (f64, f64) {
        self.range
    }

    fn point_at(&self, gamma: f64) -> ParameterPoint {
        self.raw(gamma).0
    }

    fn derivative_at(&self, gamma: f64) -> PathDerivative {
        self.raw(gamma).1
    }

    fn crossing_gamma(&self) -> Option<f64> {
        self.crossing
    }
}

/// Samples `path` at `n` uniformly spaced Γ values.
pub fn tabulate(path: &dyn ParameterPath, n: usize) -> Vec<(f64, ParameterPoint)> {
    let (lo, hi) = path.gamma_range();
    (0..n)
        .map(|k| {
            let g = lo + (hi - lo) * k as f64 / (n - 1) as f64;
            (g, path.point_at(g))
        })
        .collect()
}
