//! Three-level STIRAP: Hamiltonian, closed-form eigensystem, the Gaussian
//! pulse pair, its reduction to the dark/lower-bright two-level problem, and
//! the arc path that reaches the crossing in finite time.
//!
//! Couplings enter with a negative sign,
//!
//! ```text
//!     [  0    −Ω12    0  ]
//! H = [ −Ω12   Δ    −Ω23 ]
//!     [  0    −Ω23    0  ]
//! ```
//!
//! so with `Θ = atan(Ω12/Ω23)` and `tan 2Φ = 2√(Ω12² + Ω23²)/Δ`
//!
//! ```text
//! |E₊⟩ = sinΘ sinΦ |1⟩ − cosΦ |2⟩ + cosΘ sinΦ |3⟩
//! |E₋⟩ = sinΘ cosΦ |1⟩ + sinΦ |2⟩ + cosΘ cosΦ |3⟩
//! |E₀⟩ = cosΘ |1⟩ − sinΘ |3⟩
//! ```

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::adiabaticity::{
    spectral_condition, transverse_drive, SpectralReport, DEFAULT_SPECTRAL_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::export::write_float_csv;
use crate::holonomy::{
    compose_segments, directional_limit_frame, transport_segment, ApproachDirection,
    HolonomyResult, LevelSelector, SegmentMeta, Side, SubspaceFrame,
};
use crate::linalg::{eigensystem, CVector, HermitianOperator, StateVector};
use crate::path::{ParameterPath, ParameterPoint, PathDerivative};
use crate::propagator::{
    adiabatic_deviation, propagate_with_stride, DriveProgram, ScheduleInterpolant, Trajectory,
};
use crate::schedule::{synthesize_schedule, Direction, Schedule};

/// Index of the dark state in the ascending spectrum away from the crossing.
pub const DARK_LEVEL: usize = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StirapParams {
    pub omega12: f64,
    pub omega23: f64,
    pub delta_detuning: f64,
    pub omega0: f64,
}

impl StirapParams {
    pub fn new(omega12: f64, omega23: f64, delta_detuning: f64, omega0: f64) -> Result<Self> {
        if !(omega12 >= 0.0 && omega23 >= 0.0 && omega0 >= 0.0) {
            return Err(Error::Input("Rabi frequencies must be non-negative".into()));
        }
        if !delta_detuning.is_finite()
            || !omega0.is_finite()
            || !omega12.is_finite()
            || !omega23.is_finite()
        {
            return Err(Error::Input("non-finite STIRAP parameter".into()));
        }
        Ok(Self {
            omega12,
            omega23,
            delta_detuning,
            omega0,
        })
    }

    /// Pulse peak `omega0` and detuning, both couplings off.
    pub fn pulses(delta_detuning: f64, omega0: f64) -> Result<Self> {
        Self::new(0.0, 0.0, delta_detuning, omega0)
    }

    pub fn with_couplings(&self, omega12: f64, omega23: f64) -> Self {
        Self {
            omega12,
            omega23,
            ..*self
        }
    }
}

pub fn stirap_hamiltonian(p: &StirapParams) -> HermitianOperator {
    let (a, b, d) = (p.omega12, p.omega23, p.delta_detuning);
    HermitianOperator::from_raw(crate::linalg::CMatrix::from_row_slice(
        3,
        3,
        &[
            C64::new(0.0, 0.0),
            C64::new(-a, 0.0),
            C64::new(0.0, 0.0),
            C64::new(-a, 0.0),
            C64::new(d, 0.0),
            C64::new(-b, 0.0),
            C64::new(0.0, 0.0),
            C64::new(-b, 0.0),
            C64::new(0.0, 0.0),
        ],
    ))
}

/// `(E₋, E₀, E₊)`; `E₀ = 0` exactly.
pub fn stirap_energies(p: &StirapParams) -> (f64, f64, f64) {
    let s = p.omega12 * p.omega12 + p.omega23 * p.omega23;
    let d = p.delta_detuning;
    let r = (4.0 * s + d * d).sqrt();
    // the smaller-magnitude root in cancellation-free form
    let small = if d >= 0.0 {
        -2.0 * s / (r + d)
    } else {
        2.0 * s / (r - d)
    };
    let large = if d >= 0.0 {
        0.5 * (d + r)
    } else {
        0.5 * (d - r)
    };
    if d >= 0.0 {
        (small, 0.0, large)
    } else {
        (large, 0.0, small)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StirapEigensystem {
    pub e_plus: f64,
    pub e_minus: f64,
    pub e_zero: f64,
    pub theta_mix: f64,
    pub phi_mix: f64,
    /// `|E₊⟩, |E₋⟩, |E₀⟩`
    pub states: [StateVector; 3],
}

/// Closed-form eigensystem. Fails at the crossing point, where the mixing
/// angles are undefined; [`stirap_energies`] still applies there.
pub fn stirap_eigensystem(p: &StirapParams) -> Result<StirapEigensystem> {
    if p.omega12 == 0.0 && p.omega23 == 0.0 {
        return Err(Error::CrossingPoint);
    }
    let (e_minus, e_zero, e_plus) = stirap_energies(p);
    let theta = p.omega12.atan2(p.omega23);
    let rms = p.omega12.hypot(p.omega23);
    let phi = 0.5 * (2.0 * rms).atan2(p.delta_detuning);
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let v = |x: [f64; 3]| {
        StateVector::from_raw(CVector::from_iterator(
            3,
            x.iter().map(|&r| C64::new(r, 0.0)),
        ))
    };
    Ok(StirapEigensystem {
        e_plus,
        e_minus,
        e_zero,
        theta_mix: theta,
        phi_mix: phi,
        states: [
            v([st * sp, -cp, ct * sp]),
            v([st * cp, sp, ct * cp]),
            v([ct, 0.0, -st]),
        ],
    })
}

/// `(Ω12, Ω23) = Ω₀ (e^{−(α−½)²}, e^{−(α+½)²})`.
pub fn gaussian_path(alpha: f64, omega0: f64) -> (f64, f64) {
    (
        omega0 * (-(alpha - 0.5).powi(2)).exp(),
        omega0 * (-(alpha + 0.5).powi(2)).exp(),
    )
}

/// Late-stage inversion of the lower-bright gap along the Gaussian path,
/// `α = ½ + √(−½ ln[(Δ/Ω₀)²(Γ² + Γ)])`, with `Γ` the gap in units of `Δ`.
pub fn alpha_of_gamma(gamma: f64, p: &StirapParams) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("Γ must be positive, got {gamma}")));
    }
    let ratio = p.delta_detuning / p.omega0;
    let arg = ratio * ratio * (gamma * gamma + gamma);
    if !(arg > 0.0) {
        return Err(Error::Domain(
            "detuning and pulse peak must be nonzero".into(),
        ));
    }
    if arg > 1.0 {
        return Err(Error::Domain(format!(
            "Γ = {gamma} violates Γ² + Γ ≤ (Ω₀/Δ)² = {}",
            1.0 / (ratio * ratio)
        )));
    }
    Ok(0.5 + (-0.5 * arg.ln()).sqrt())
}

/// `Ω12² + Ω23²` along the Gaussian path and its α-derivative.
fn coupling_power(alpha: f64, omega0: f64) -> (f64, f64) {
    let (a, b) = gaussian_path(alpha, omega0);
    let s = a * a + b * b;
    let ds = -4.0 * (alpha - 0.5) * a * a - 4.0 * (alpha + 0.5) * b * b;
    (s, ds)
}

/// Lower-bright gap `−E₋` at coupling power `s`.
fn bright_gap(s: f64, detuning: f64) -> f64 {
    let r = (4.0 * s + detuning * detuning).sqrt();
    if detuning >= 0.0 {
        2.0 * s / (r + detuning)
    } else {
        0.5 * (r - detuning)
    }
}

/// `−E₋(α)` along the Gaussian path and `d(−E₋)/dα`.
pub fn gaussian_gap(alpha: f64, detuning: f64, omega0: f64) -> (f64, f64) {
    let (s, ds) = coupling_power(alpha, omega0);
    let r = (4.0 * s + detuning * detuning).sqrt();
    (bright_gap(s, detuning), ds / r)
}

/// Mixing angle `Θ(α) = atan(e^{2α})` and `dΘ/dα = 1/cosh 2α`.
pub fn gaussian_mixing(alpha: f64) -> (f64, f64) {
    let theta = if alpha > 0.0 {
        FRAC_PI_2 - (-2.0 * alpha).exp().atan()
    } else {
        (2.0 * alpha).exp().atan()
    };
    (theta, 1.0 / (2.0 * alpha).cosh())
}

/// Solves `−E₋(α) = gap` for `α ≥ 0`, where the gap decreases monotonically.
fn invert_gaussian_gap(gap: f64, detuning: f64, omega0: f64) -> f64 {
    let g0 = gaussian_gap(0.0, detuning, omega0).0;
    if gap >= g0 {
        return 0.0;
    }
    let target = gap.ln();
    let f = |a: f64| gaussian_gap(a, detuning, omega0).0.ln() - target;
    let (mut lo, mut hi) = (0.0, 1.0);
    while f(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    let mut a = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (g, dg) = gaussian_gap(a, detuning, omega0);
        let val = g.ln() - target;
        if val == 0.0 {
            break;
        }
        if val > 0.0 {
            lo = a;
        } else {
            hi = a;
        }
        let step = val / (dg / g);
        let next = a - step;
        if step.abs() <= 1e-15 * a.max(1.0) {
            a = next;
            break;
        }
        a = if next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 1e-15 * a.max(1.0) {
            break;
        }
    }
    a
}

fn require_positive_detuning(p: &StirapParams) -> Result<()> {
    if !(p.delta_detuning > 0.0 && p.omega0 > 0.0) {
        return Err(Error::Input(
            "detuning and pulse peak must be positive".into(),
        ));
    }
    Ok(())
}

/// The dark/lower-bright pair on the late Gaussian leg as a two-level path:
/// `B = ΓΔδ = −E₋`, `θ = Θ`, `φ = 0`, crossing at `Γ = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StirapReducedPath {
    detuning: f64,
    omega0: f64,
    delta: f64,
    gamma_max: f64,
}

impl StirapReducedPath {
    pub fn new(p: &StirapParams, delta: f64) -> Result<Self> {
        require_positive_detuning(p)?;
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Input(format!(
                "delta must lie in (0, 1), got {delta}"
            )));
        }
        let gamma_max =
            gaussian_gap(0.0, p.delta_detuning, p.omega0).0 / (p.delta_detuning * delta);
        Ok(Self {
            detuning: p.delta_detuning,
            omega0: p.omega0,
            delta,
            gamma_max,
        })
    }

    /// `α(Γ)` by exact inversion of `−E₋(α) = ΓΔδ`.
    pub fn alpha_at(&self, gamma: f64) -> f64 {
        if gamma <= 0.0 {
            return f64::INFINITY;
        }
        invert_gaussian_gap(
            gamma * self.detuning * self.delta,
            self.detuning,
            self.omega0,
        )
    }

    pub fn gamma_of_alpha(&self, alpha: f64) -> f64 {
        gaussian_gap(alpha, self.detuning, self.omega0).0 / (self.detuning * self.delta)
    }
}

impl ParameterPath for StirapReducedPath {
    fn gamma_range(&self) -> (f64, f64) {
        (0.0, self.gamma_max)
    }

    fn point_at(&self, gamma: f64) -> ParameterPoint {
        let g = gamma.clamp(0.0, self.gamma_max);
        if g == 0.0 {
            return ParameterPoint::new(0.0, FRAC_PI_2, 0.0);
        }
        let alpha = self.alpha_at(g);
        ParameterPoint::new(
            g * self.detuning * self.delta,
            gaussian_mixing(alpha).0,
            0.0,
        )
    }

    fn derivative_at(&self, gamma: f64) -> PathDerivative {
        let g = gamma.clamp(0.0, self.gamma_max);
        let db = self.detuning * self.delta;
        if g == 0.0 {
            return PathDerivative {
                db,
                dtheta: 0.0,
                dphi: 0.0,
            };
        }
        let alpha = self.alpha_at(g);
        let dgap = gaussian_gap(alpha, self.detuning, self.omega0).1;
        let dalpha = db / dgap;
        PathDerivative {
            db,
            dtheta: gaussian_mixing(alpha).1 * dalpha,
            dphi: 0.0,
        }
    }

    fn crossing_gamma(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// Pulse parameter where the late leg starts. Past it the dump pulse dominates.
pub const LATE_LEG_ALPHA: f64 = 1.5;

/// Start of the late leg, at `α = LATE_LEG_ALPHA`.
pub fn default_gamma_start(p: &StirapParams, delta: f64) -> Result<f64> {
    Ok(StirapReducedPath::new(p, delta)?.gamma_of_alpha(LATE_LEG_ALPHA))
}

/// Uniform-violation schedule of the reduced path toward `Γ = 0`.
pub fn stirap_schedule(
    p: &StirapParams,
    delta: f64,
    gamma_start: f64,
    t_max: f64,
) -> Result<Schedule> {
    let path = StirapReducedPath::new(p, delta)?;
    synthesize_schedule(&path, delta, gamma_start, Direction::Decreasing, t_max)
}

/// `(t, ln Γ)` pairs of a schedule.
pub fn ln_gamma_samples(s: &Schedule) -> Vec<(f64, f64)> {
    s.times
        .iter()
        .zip(&s.gammas)
        .map(|(&t, &g)| (t, g.ln()))
        .collect()
}

/// Data behind the three panels of the Γ-dynamics figure.
#[derive(Clone, Debug, PartialEq)]
pub struct Fig5Data {
    pub schedule: Schedule,
}

impl Fig5Data {
    pub fn compute(p: &StirapParams, delta: f64) -> Result<Self> {
        let g0 = default_gamma_start(p, delta)?;
        Ok(Self {
            schedule: stirap_schedule(p, delta, g0, f64::INFINITY)?,
        })
    }

    /// Writes `gdot_vs_g.csv`, `gamma_vs_t.csv` and `lngamma_vs_t.csv`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let s = &self.schedule;
        let file = |name: &str| std::fs::File::create(dir.join(name));
        write_float_csv(
            file("gdot_vs_g.csv")?,
            &["gamma", "gamma_dot"],
            s.gammas
                .iter()
                .zip(&s.gamma_dots)
                .map(|(&g, &d)| vec![g, d]),
        )?;
        write_float_csv(
            file("gamma_vs_t.csv")?,
            &["t", "gamma"],
            s.times.iter().zip(&s.gammas).map(|(&t, &g)| vec![t, g]),
        )?;
        write_float_csv(
            file("lngamma_vs_t.csv")?,
            &["t", "ln_gamma"],
            ln_gamma_samples(s).into_iter().map(|(t, l)| vec![t, l]),
        )
    }
}

/// Whole Gaussian pulse sequence in α, `α ∈ [−α_end, α_end]`, reduced to the
/// dark/lower-bright pair. No crossing lies on it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianAlphaPath {
    detuning: f64,
    omega0: f64,
    alpha_end: f64,
}

impl GaussianAlphaPath {
    pub fn new(p: &StirapParams, alpha_end: f64) -> Result<Self> {
        require_positive_detuning(p)?;
        if !(alpha_end > 0.0 && alpha_end.is_finite()) {
            return Err(Error::Input("alpha_end must be positive".into()));
        }
        Ok(Self {
            detuning: p.delta_detuning,
            omega0: p.omega0,
            alpha_end,
        })
    }
}

impl ParameterPath for GaussianAlphaPath {
    fn gamma_range(&self) -> (f64, f64) {
        (-self.alpha_end, self.alpha_end)
    }

    fn point_at(&self, alpha: f64) -> ParameterPoint {
        ParameterPoint::new(
            gaussian_gap(alpha, self.detuning, self.omega0).0,
            gaussian_mixing(alpha).0,
            0.0,
        )
    }

    fn derivative_at(&self, alpha: f64) -> PathDerivative {
        PathDerivative {
            db: gaussian_gap(alpha, self.detuning, self.omega0).1,
            dtheta: gaussian_mixing(alpha).1,
            dphi: 0.0,
        }
    }

    fn crossing_gamma(&self) -> Option<f64> {
        None
    }
}

/// Gaussian pulse pair driven by the uniform-violation schedule in α, from
/// `−α_end` to `α_end` where `α_end` puts the reduced gap at
/// `truncation`·(gap at `α = 1`).
#[derive(Clone, Debug)]
pub struct GaussianProgram {
    pub program: DriveProgram,
    pub schedule: Schedule,
    pub alpha_end: f64,
}

pub fn gaussian_program(p: &StirapParams, delta: f64, truncation: f64) -> Result<GaussianProgram> {
    require_positive_detuning(p)?;
    if !(truncation > 0.0 && truncation < 1.0) {
        return Err(Error::Input("truncation must lie in (0, 1)".into()));
    }
    let gap_start = gaussian_gap(1.0, p.delta_detuning, p.omega0).0;
    let alpha_end = invert_gaussian_gap(truncation * gap_start, p.delta_detuning, p.omega0);
    let path = GaussianAlphaPath::new(p, alpha_end)?;
    let schedule = synthesize_schedule(
        &path,
        delta,
        -alpha_end,
        Direction::Increasing,
        f64::INFINITY,
    )?;
    let interp = ScheduleInterpolant::new(&schedule);
    let params = *p;
    let program = DriveProgram::new(schedule.duration(), move |t| {
        let (a, b) = gaussian_path(interp.gamma_at(t), params.omega0);
        stirap_hamiltonian(&params.with_couplings(a, b))
    })?;
    Ok(GaussianProgram {
        program,
        schedule,
        alpha_end,
    })
}

/// Pulse sequence that reaches the crossing in finite time: switch `Ω23` on,
/// rotate `Θ` from 0 to π/2 on the circle `Ω12² + Ω23² = Ω₀²`, switch `Ω12`
/// off.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcConfig {
    pub tau_arc: f64,
    /// Duration of each linear switching ramp.
    pub ramp_time: f64,
    /// Samples of the arc used for the spectral check.
    pub n_check: usize,
    pub threshold: f64,
}

/// Propagation step the default switching ramps are resolved with.
pub const ARC_STEP: f64 = 0.05;

/// Steps per switching ramp.
pub const RAMP_STEPS: usize = 20;

impl ArcConfig {
    pub fn new(tau_arc: f64) -> Self {
        Self {
            tau_arc,
            ramp_time: RAMP_STEPS as f64 * ARC_STEP,
            n_check: 4096,
            threshold: DEFAULT_SPECTRAL_THRESHOLD,
        }
    }

    pub fn duration(&self) -> f64 {
        self.tau_arc + 2.0 * self.ramp_time
    }

    /// `Θ` on the arc, `s ∈ [0, τ]`, and its rate.
    pub fn mixing_at(&self, s: f64) -> (f64, f64) {
        let x = PI * s / self.tau_arc;
        (
            0.25 * PI * (1.0 - x.cos()),
            0.25 * PI * PI / self.tau_arc * x.sin(),
        )
    }

    /// `(Ω12, Ω23)` at time `t`.
    pub fn couplings_at(&self, t: f64, omega0: f64) -> (f64, f64) {
        let r = self.ramp_time;
        if t < r {
            (0.0, omega0 * (t / r).clamp(0.0, 1.0))
        } else if t <= r + self.tau_arc {
            let (theta, _) = self.mixing_at(t - r);
            (omega0 * theta.sin(), omega0 * theta.cos())
        } else {
            let s = ((t - r - self.tau_arc) / r).clamp(0.0, 1.0);
            (omega0 * (1.0 - s), 0.0)
        }
    }
}

/// Gap of the dark/lower-bright pair on the arc, `√(4Ω₀² + Δ²)/2 − Δ/2`.
pub fn arc_gap(p: &StirapParams) -> f64 {
    bright_gap(p.omega0 * p.omega0, p.delta_detuning)
}

#[derive(Clone, Debug)]
pub struct ArcProgram {
    pub program: DriveProgram,
    pub report: SpectralReport,
    pub b0: f64,
}

pub fn alternative_path(p: &StirapParams, tau_arc: f64, n_check: usize) -> Result<ArcProgram> {
    alternative_path_with(
        p,
        &ArcConfig {
            n_check,
            ..ArcConfig::new(tau_arc)
        },
    )
}

pub fn alternative_path_with(p: &StirapParams, cfg: &ArcConfig) -> Result<ArcProgram> {
    if !(p.omega0 > 0.0) {
        return Err(Error::Input("pulse peak must be positive".into()));
    }
    let b0 = arc_gap(p);
    if !(cfg.tau_arc > 10.0 / b0) {
        return Err(Error::Input(format!(
            "tau_arc must exceed 10/B₀ = {}, got {}",
            10.0 / b0,
            cfg.tau_arc
        )));
    }
    if !(cfg.ramp_time > 0.0) {
        return Err(Error::Input("ramp_time must be positive".into()));
    }
    let n = cfg.n_check;
    let times: Vec<f64> = (0..n).map(|j| cfg.tau_arc * j as f64 / n as f64).collect();
    let drive: Vec<C64> = times
        .iter()
        .map(|&s| {
            let (theta, rate) = cfg.mixing_at(s);
            transverse_drive(theta, rate, 0.0)
        })
        .collect();
    let report = spectral_condition(&times, &drive, &vec![b0; n], cfg.threshold)?;
    let (params, cfg) = (*p, *cfg);
    let program = DriveProgram::new(cfg.duration(), move |t| {
        let (a, b) = cfg.couplings_at(t, params.omega0);
        stirap_hamiltonian(&params.with_couplings(a, b))
    })?;
    Ok(ArcProgram {
        program,
        report,
        b0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum TransferSource {
    Gaussian { delta: f64, truncation: f64 },
    Alternative { tau_arc: f64, ramp_time: f64 },
    ZeroPulse { duration: f64 },
}

#[derive(Clone, Debug)]
pub struct TransferReport {
    pub trajectory: Trajectory,
    pub final_p3: f64,
    /// Largest loss from the dark state along the run.
    pub dark_deviation: f64,
    pub spectral: Option<SpectralReport>,
    pub schedule: Option<Schedule>,
}

/// Propagates `|1⟩` through the chosen pulse program with step `dt`.
pub fn stirap_transfer_experiment(
    p: &StirapParams,
    source: &TransferSource,
    dt: f64,
) -> Result<TransferReport> {
    let (program, spectral, schedule) = match *source {
        TransferSource::Gaussian { delta, truncation } => {
            let g = gaussian_program(p, delta, truncation)?;
            (g.program, None, Some(g.schedule))
        }
        TransferSource::Alternative { tau_arc, ramp_time } => {
            let a = alternative_path_with(
                p,
                &ArcConfig {
                    ramp_time,
                    ..ArcConfig::new(tau_arc)
                },
            )?;
            (a.program, Some(a.report), None)
        }
        TransferSource::ZeroPulse { duration } => {
            let params = p.with_couplings(0.0, 0.0);
            (
                DriveProgram::new(duration, move |_| stirap_hamiltonian(&params))?,
                None,
                None,
            )
        }
    };
    if !(dt > 0.0) {
        return Err(Error::Input("time step must be positive".into()));
    }
    let n_steps = ((program.duration() / dt).ceil() as usize).max(crate::propagator::MIN_STEPS);
    let stride = (n_steps / 4096).max(1);
    let trajectory = propagate_with_stride(&program, &StateVector::basis(3, 0), n_steps, stride)?;
    let final_p3 = trajectory.final_state().populations()[2];
    let dark_deviation = adiabatic_deviation(&trajectory);
    Ok(TransferReport {
        trajectory,
        final_p3,
        dark_deviation,
        spectral,
        schedule,
    })
}

/// Coupling-plane family `(Ω12, Ω23) ↦ H` at fixed detuning.
pub fn coupling_family(p: &StirapParams) -> impl Fn(&[f64]) -> HermitianOperator {
    let params = *p;
    move |x: &[f64]| stirap_hamiltonian(&params.with_couplings(x[0], x[1]))
}

/// Leaving the origin with `Ω23` switched on first.
pub fn initial_direction() -> ApproachDirection {
    ApproachDirection::new(vec![0.0, 1.0], Side::Outgoing).expect("unit tangent")
}

/// Returning to the origin with `Ω12` switched off last.
pub fn final_direction() -> ApproachDirection {
    ApproachDirection::new(vec![-1.0, 0.0], Side::Incoming).expect("unit tangent")
}

/// Dark-state frame at the origin of the coupling plane along `dir`.
pub fn dark_state_limit(p: &StirapParams, dir: &ApproachDirection) -> Result<SubspaceFrame> {
    let family = coupling_family(p);
    Ok(directional_limit_frame(
        &family,
        &[0.0, 0.0],
        dir,
        &LevelSelector::Indices(vec![DARK_LEVEL]),
    )?
    .frame)
}

/// Transports the dark state around the Gaussian loop, split at `α = 0` into
/// two segments that start and end at the crossing with directional limits.
pub fn dark_state_loop(p: &StirapParams, alpha_end: f64, n: usize) -> Result<HolonomyResult> {
    if n < 4 {
        return Err(Error::Input(
            "need at least four samples per segment".into(),
        ));
    }
    let family = coupling_family(p);
    let selector = LevelSelector::Indices(vec![DARK_LEVEL]);
    let frame_at = |alpha: f64| -> Result<SubspaceFrame> {
        let (a, b) = gaussian_path(alpha, p.omega0);
        let ef = eigensystem(&family(&[a, b]));
        SubspaceFrame::from_levels(&ef, &selector.select(ef.energies())?)
    };
    let segment = |from: f64, to: f64, start: Option<SubspaceFrame>, end: Option<SubspaceFrame>| {
        let alphas: Vec<f64> = (0..n)
            .map(|k| from + (to - from) * k as f64 / (n - 1) as f64)
            .collect();
        let mut frames = alphas
            .iter()
            .map(|&a| frame_at(a))
            .collect::<Result<Vec<_>>>()?;
        if let Some(f) = start {
            frames.insert(0, f);
        }
        if let Some(f) = end {
            frames.push(f);
        }
        let times: Vec<f64> = (0..frames.len()).map(|k| k as f64).collect();
        let mut seg = transport_segment(&frames, &times)?;
        seg.dynamical_phase = 0.0;
        Ok::<_, Error>(seg)
    };
    let mut first = segment(
        -alpha_end,
        0.0,
        Some(dark_state_limit(p, &initial_direction())?),
        None,
    )?;
    first.segments = vec![SegmentMeta {
        label: "switch-on".into(),
        start: vec![0.0, 0.0],
        end: vec![
            gaussian_path(0.0, p.omega0).0,
            gaussian_path(0.0, p.omega0).1,
        ],
        start_direction: Some(initial_direction()),
        end_direction: None,
    }];
    let mut second = segment(
        0.0,
        alpha_end,
        None,
        Some(dark_state_limit(p, &final_direction())?),
    )?;
    second.segments = vec![SegmentMeta {
        label: "switch-off".into(),
        start: first.segments[0].end.clone(),
        end: vec![0.0, 0.0],
        start_direction: None,
        end_direction: Some(final_direction()),
    }];
    compose_segments(&[first, second])
}
