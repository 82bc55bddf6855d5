//! Uniform-violation schedules: `|Γ̇|·‖∂_Γ(θ, φ)‖ = δ·B(Γ)`.
//!
//! The equation is autonomous, so the schedule is the quadrature
//! `t(Γ) = ∫ dΓ ‖∂_Γ(θ, φ)‖ / (δ B)`. Toward a crossing the integral is taken
//! in `w = −ln|Γ − Γ_c|`, which keeps the step count proportional to the
//! number of decades approached rather than to the local stiffness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::write_float_csv;
use crate::path::{BetaFamilyParams, ParameterPath};

/// Drive modulus below which a path counts as drive-free.
pub const ZERO_DRIVE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Increasing => 1.0,
            Direction::Decreasing => -1.0,
        }
    }

    fn from_sign(x: f64) -> Self {
        if x >= 0.0 {
            Direction::Increasing
        } else {
            Direction::Decreasing
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleOptions {
    /// Local relative tolerance of each quadrature step.
    pub rtol: f64,
    /// Largest step in `ln|Γ − Γ_c|` when approaching a crossing.
    pub max_log_step: f64,
    /// Smallest number of steps across the range when no crossing is approached.
    pub min_linear_steps: usize,
    /// Approach stops once `|Γ − Γ_c|` falls to this fraction of its start value.
    pub stop_fraction: f64,
    /// Sampling stops once a time step is smaller than this fraction of the elapsed time.
    pub time_resolution: f64,
    /// Power-law exponents below `1 − fit_margin` count as finite-time approaches.
    pub fit_margin: f64,
    /// Fit window in units of the starting distance to the crossing.
    pub fit_window: (f64, f64),
}

impl Default for ScheduleOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            max_log_step: 1e-3,
            min_linear_steps: 20_000,
            stop_fraction: 1e-6,
            time_resolution: 1e-9,
            fit_margin: 0.05,
            fit_window: (1e-6, 1e-4),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    /// Came within the stop fraction of the crossing.
    ApproachLimit,
    TimeLimit,
    RangeBoundary,
    /// Time steps fell below the floating-point resolution of the elapsed time.
    Resolution,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub times: Vec<f64>,
    pub gammas: Vec<f64>,
    /// `Γ̇` at each sample, signed by the direction of travel.
    pub gamma_dots: Vec<f64>,
    pub delta: f64,
    pub reached_crossing: bool,
    pub crossing_time: Option<f64>,
    pub crossing_gamma: Option<f64>,
    pub stop: StopReason,
    /// Fitted `p` in `|Γ̇| ∝ |Γ − Γ_c|^p` over the last two decades of approach.
    pub tail_exponent: Option<f64>,
}

impl Schedule {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    /// Writes `t,gamma,b,theta,phi`.
    pub fn write_csv<W: std::io::Write>(&self, path: &dyn ParameterPath, writer: W) -> Result<()> {
        write_float_csv(
            writer,
            &["t", "gamma", "b", "theta", "phi"],
            self.times.iter().zip(&self.gammas).map(|(&t, &g)| {
                let p = path.point_at(g);
                vec![t, g, p.b, p.theta, p.phi]
            }),
        )
    }
}

fn validate_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::Input(format!(
            "delta must lie in (0, 1), got {delta}"
        )))
    }
}

/// Integrates the uniform-violation constraint from `gamma_start`.
pub fn synthesize_schedule(
    path: &dyn ParameterPath,
    delta: f64,
    gamma_start: f64,
    direction: Direction,
    t_max: f64,
) -> Result<Schedule> {
    synthesize_schedule_with(
        path,
        delta,
        gamma_start,
        direction,
        t_max,
        &ScheduleOptions::default(),
    )
}

pub fn synthesize_schedule_with(
    path: &dyn ParameterPath,
    delta: f64,
    gamma_start: f64,
    direction: Direction,
    t_max: f64,
    opts: &ScheduleOptions,
) -> Result<Schedule> {
    validate_delta(delta)?;
    if !(t_max > 0.0) {
        return Err(Error::Input(format!("t_max must be positive, got {t_max}")));
    }
    let (lo, hi) = path.gamma_range();
    if !(gamma_start >= lo && gamma_start <= hi) {
        return Err(Error::Input(format!(
            "gamma_start {gamma_start} outside path range [{lo}, {hi}]"
        )));
    }
    if !(path.point_at(gamma_start).b > 0.0) {
        return Err(Error::Input("splitting vanishes at gamma_start".into()));
    }
    let sigma = direction.sign();
    let crossing = path.crossing_gamma();
    if let Some(c) = crossing {
        if (c - gamma_start) * sigma <= 0.0 {
            return Err(Error::Input(format!(
                "direction points away from the crossing at Γ = {c}"
            )));
        }
    }

    // dt/dΓ along the direction of travel
    let rate = |g: f64| -> f64 {
        let p = path.point_at(g);
        path.derivative_at(g).drive_norm(p.theta) / (p.b * delta)
    };
    let speed = |g: f64| -> f64 {
        let p = path.point_at(g);
        sigma * p.b * delta / path.derivative_at(g).drive_norm(p.theta)
    };

    let chart = match crossing {
        Some(c) => {
            let s0 = (gamma_start - c).abs();
            let side = (gamma_start - c).signum();
            let u0 = -s0.ln();
            Chart::Log {
                c,
                side,
                u0,
                u_end: u0 - opts.stop_fraction.ln(),
            }
        }
        None => {
            let length = if sigma > 0.0 {
                hi - gamma_start
            } else {
                gamma_start - lo
            };
            if !(length > 0.0) {
                return Err(Error::Input(
                    "gamma_start sits on the range boundary".into(),
                ));
            }
            Chart::Linear {
                g0: gamma_start,
                sigma,
                u_end: length,
            }
        }
    };

    if chart.probe(64).iter().all(|&g| {
        let p = path.point_at(g);
        path.derivative_at(g).drive_norm(p.theta) <= ZERO_DRIVE
    }) {
        return Err(Error::TriviallyAdiabatic);
    }

    let cap = match chart {
        Chart::Log { .. } => opts.max_log_step,
        Chart::Linear { u_end, .. } => u_end / opts.min_linear_steps as f64,
    };
    let integrand = |u: f64| chart.jacobian(u) * rate(chart.gamma(u));

    let (mut u, u_end) = (chart.start(), chart.end());
    let mut t = KahanSum::default();
    let mut times = vec![0.0];
    let mut gammas = vec![gamma_start];
    let mut gamma_dots = vec![speed(gamma_start)];
    let mut h = cap;
    let mut stop = match chart {
        Chart::Log { .. } => StopReason::ApproachLimit,
        Chart::Linear { .. } => StopReason::RangeBoundary,
    };
    while u < u_end {
        h = h.min(u_end - u);
        let (fine, coarse) = gauss_pair(&integrand, u, u + h);
        if !fine.is_finite() {
            return Err(Error::Domain(format!(
                "schedule rate is not finite near Γ = {}",
                chart.gamma(u + h)
            )));
        }
        if (fine - coarse).abs() > opts.rtol * fine.abs() && h > cap * 1e-9 {
            h *= 0.5;
            continue;
        }
        if t.value() + fine > t_max {
            let target = t_max - t.value();
            let (mut a, mut b) = (u, u + h);
            for _ in 0..100 {
                let mid = 0.5 * (a + b);
                if gauss_pair(&integrand, u, mid).0 < target {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            let g = chart.gamma(0.5 * (a + b));
            if g != *gammas.last().unwrap() {
                times.push(t_max);
                gammas.push(g);
                gamma_dots.push(speed(g));
            }
            stop = StopReason::TimeLimit;
            break;
        }
        if fine < opts.time_resolution * (t.value() + fine) {
            stop = StopReason::Resolution;
            break;
        }
        t.add(fine);
        u = if u_end - (u + h) <= 0.0 { u_end } else { u + h };
        let g = chart.gamma(u);
        times.push(t.value());
        gammas.push(g);
        gamma_dots.push(speed(g));
        h = (2.0 * h).min(cap);
    }

    let mut schedule = Schedule {
        times,
        gammas,
        gamma_dots,
        delta,
        reached_crossing: false,
        crossing_time: None,
        crossing_gamma: crossing,
        stop,
        tail_exponent: None,
    };
    if let (Chart::Log { c, side, .. }, StopReason::ApproachLimit | StopReason::Resolution) =
        (chart, stop)
    {
        let s0 = (gamma_start - c).abs();
        let fit = power_law_fit(
            |s| speed(c + side * s).abs(),
            opts.fit_window.0 * s0,
            opts.fit_window.1 * s0,
        );
        if let Some(fit) = fit {
            schedule.tail_exponent = Some(fit.slope);
            if fit.slope < 1.0 - opts.fit_margin {
                // finish the approach without sampling, then extrapolate the power law
                let mut rest = KahanSum::default();
                let mut v = u;
                while v < u_end {
                    let w = (v + cap).min(u_end);
                    rest.add(gauss_pair(&integrand, v, w).0);
                    v = w;
                }
                let s_end = opts.stop_fraction * s0;
                let r_end = speed(c + side * s_end).abs();
                rest.add(s_end / (r_end * (1.0 - fit.slope)));
                schedule.reached_crossing = true;
                schedule.crossing_time = Some(t.value() + rest.value());
            }
        }
    }
    Ok(schedule)
}

#[derive(Clone, Copy)]
enum Chart {
    /// `Γ = c + side·e^{−u}`
    Log {
        c: f64,
        side: f64,
        u0: f64,
        u_end: f64,
    },
    /// `Γ = g0 + sigma·u`
    Linear { g0: f64, sigma: f64, u_end: f64 },
}

impl Chart {
    fn start(&self) -> f64 {
        match *self {
            Chart::Log { u0, .. } => u0,
            Chart::Linear { .. } => 0.0,
        }
    }

    fn end(&self) -> f64 {
        match *self {
            Chart::Log { u_end, .. } | Chart::Linear { u_end, .. } => u_end,
        }
    }

    fn gamma(&self, u: f64) -> f64 {
        match *self {
            Chart::Log { c, side, .. } => c + side * (-u).exp(),
            Chart::Linear { g0, sigma, .. } => g0 + sigma * u,
        }
    }

    /// `|dΓ/du|`
    fn jacobian(&self, u: f64) -> f64 {
        match *self {
            Chart::Log { .. } => (-u).exp(),
            Chart::Linear { .. } => 1.0,
        }
    }

    fn probe(&self, n: usize) -> Vec<f64> {
        let (a, b) = (self.start(), self.end());
        (0..n)
            .map(|k| self.gamma(a + (b - a) * k as f64 / (n - 1) as f64))
            .collect()
    }
}

/// Five- and three-point Gauss–Legendre estimates of `∫_a^b f`.
fn gauss_pair(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    const X5: [f64; 2] = [0.906_179_845_938_664, 0.538_469_310_105_683_1];
    const W5: [f64; 3] = [
        0.236_926_885_056_189_1,
        0.478_628_670_499_366_5,
        0.568_888_888_888_888_9,
    ];
    const X3: f64 = 0.774_596_669_241_483_4;
    let m = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let f0 = f(m);
    let fine = W5[0] * (f(m - r * X5[0]) + f(m + r * X5[0]))
        + W5[1] * (f(m - r * X5[1]) + f(m + r * X5[1]))
        + W5[2] * f0;
    let coarse = 5.0 / 9.0 * (f(m - r * X3) + f(m + r * X3)) + 8.0 / 9.0 * f0;
    (r * fine, r * coarse)
}

#[derive(Default)]
struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Fits `ln f(s)` against `ln s` on log-spaced points of `[lo, hi]`.
fn power_law_fit(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Option<LogLogFit> {
    const FIT_POINTS: usize = 25;
    let pts: Vec<(f64, f64)> = (0..FIT_POINTS)
        .map(|k| {
            let s = lo * (hi / lo).powf(k as f64 / (FIT_POINTS - 1) as f64);
            (s.ln(), f(s).ln())
        })
        .collect();
    if pts.iter().any(|p| !p.1.is_finite()) {
        return None;
    }
    LogLogFit::new(&pts)
}

/// Least-squares line through `(x, y)` with its largest absolute residual.
#[derive(Clone, Copy, Debug)]
struct LogLogFit {
    slope: f64,
    residual: f64,
}

impl LogLogFit {
    fn new(pts: &[(f64, f64)]) -> Option<Self> {
        if pts.len() < 3 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        if !(sxx > 0.0) {
            return None;
        }
        let slope = sxy / sxx;
        let residual = pts
            .iter()
            .map(|p| (p.1 - my - slope * (p.0 - mx)).abs())
            .fold(0.0, f64::max);
        Some(Self { slope, residual })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeasibilityKind {
    TriviallyAdiabatic,
    FeasibleFiniteTime,
    InfeasibleInfiniteTime,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityEvidence {
    pub fit_residual: Option<f64>,
    /// Fit window as distances from the crossing.
    pub window: (f64, f64),
    /// Time integrated before extrapolating the tail, when a schedule was run.
    pub horizon: Option<f64>,
    pub fit_margin: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityVerdict {
    pub kind: FeasibilityKind,
    pub crossing_time: Option<f64>,
    pub local_exponent: Option<f64>,
    pub evidence: FeasibilityEvidence,
}

/// Decides whether the uniform-violation schedule reaches the crossing in
/// finite time, from the power law `|Γ̇| ∝ |Γ − Γ_c|^p` near the crossing.
pub fn classify_feasibility(
    path: &dyn ParameterPath,
    delta: f64,
    gamma_start: f64,
) -> Result<FeasibilityVerdict> {
    classify_feasibility_with(path, delta, gamma_start, &ScheduleOptions::default())
}

pub fn classify_feasibility_with(
    path: &dyn ParameterPath,
    delta: f64,
    gamma_start: f64,
    opts: &ScheduleOptions,
) -> Result<FeasibilityVerdict> {
    validate_delta(delta)?;
    let c = path
        .crossing_gamma()
        .ok_or_else(|| Error::Input("path has no crossing to classify".into()))?;
    let s0 = (gamma_start - c).abs();
    if !(s0 > 0.0) {
        return Err(Error::Input("gamma_start sits on the crossing".into()));
    }
    let side = (gamma_start - c).signum();
    let window = (opts.fit_window.0 * s0, opts.fit_window.1 * s0);
    let mut evidence = FeasibilityEvidence {
        fit_residual: None,
        window,
        horizon: None,
        fit_margin: opts.fit_margin,
    };

    let drive_at = |g: f64| {
        let p = path.point_at(g);
        (p, path.derivative_at(g).drive_norm(p.theta))
    };
    let approach_free = (0..64).all(|k| {
        let s = s0 * opts.stop_fraction.powf(k as f64 / 63.0);
        drive_at(c + side * s).1 <= ZERO_DRIVE
    });
    if approach_free {
        return Ok(FeasibilityVerdict {
            kind: FeasibilityKind::TriviallyAdiabatic,
            crossing_time: None,
            local_exponent: None,
            evidence,
        });
    }

    let indeterminate = |residual: f64, exponent: f64| Error::Indeterminate {
        residual,
        exponent,
        window_lo: window.0,
        window_hi: window.1,
    };
    let fit = power_law_fit(
        |s| {
            let (p, d) = drive_at(c + side * s);
            p.b * delta / d
        },
        window.0,
        window.1,
    )
    .ok_or_else(|| indeterminate(f64::INFINITY, f64::NAN))?;
    if fit.residual > 0.1 {
        return Err(indeterminate(fit.residual, fit.slope));
    }
    evidence.fit_residual = Some(fit.residual);

    if fit.slope < 1.0 - opts.fit_margin {
        let sched = synthesize_schedule_with(
            path,
            delta,
            gamma_start,
            Direction::from_sign(c - gamma_start),
            f64::INFINITY,
            opts,
        )?;
        evidence.horizon = Some(sched.duration());
        Ok(FeasibilityVerdict {
            kind: FeasibilityKind::FeasibleFiniteTime,
            crossing_time: sched.crossing_time,
            local_exponent: Some(fit.slope),
            evidence,
        })
    } else {
        Ok(FeasibilityVerdict {
            kind: FeasibilityKind::InfeasibleInfiniteTime,
            crossing_time: None,
            local_exponent: Some(fit.slope),
            evidence,
        })
    }
}

/// Closed-form approach `Γ(t)` for the power-law family.
///
/// For `β ≠ 1`, `t` is measured from the crossing (`Γ = 0` at `t = 0`) and
/// the result is `|((1−β)/β)(δ/τ)t|^{1/(β−1)}`. For `β = 1`, `t` is measured
/// from the instant `Γ = 1` and the result is `e^{−δt/τ}`. For `β = 0` every
/// schedule is adiabatic and `None` is returned.
pub fn beta_closed_form(p: &BetaFamilyParams, delta: f64, t: f64) -> Result<Option<f64>> {
    let beta = p.beta;
    if !(beta >= 0.0) {
        return Err(Error::Input(format!(
            "beta must be non-negative, got {beta}"
        )));
    }
    if beta == 0.0 {
        return Ok(None);
    }
    if beta == 1.0 {
        return Ok(Some((-delta * t / p.tau).exp()));
    }
    let base = ((1.0 - beta) / beta * (delta / p.tau) * t).abs();
    Ok(Some(base.powf(1.0 / (beta - 1.0))))
}

/// Time for the power-law family to reach the crossing from `gamma_start`,
/// `βτΓ₀^{β−1} / ((β−1)δ)`; `None` unless `β > 1`.
pub fn beta_crossing_time(p: &BetaFamilyParams, delta: f64, gamma_start: f64) -> Option<f64> {
    (p.beta > 1.0)
        .then(|| p.beta * p.tau * gamma_start.powf(p.beta - 1.0) / ((p.beta - 1.0) * delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::make_beta_path;

    fn beta_path(beta: f64) -> crate::path::BetaPath {
        make_beta_path(BetaFamilyParams::new(beta, 0.3, 1.0, 0.0).unwrap(), 2.0).unwrap()
    }

    #[test]
    fn beta_two_is_linear() {
        let path = beta_path(2.0);
        let s =
            synthesize_schedule(&path, 0.01, 1.0, Direction::Decreasing, f64::INFINITY).unwrap();
        assert!(s.reached_crossing);
        for (&t, &g) in s.times.iter().zip(&s.gammas) {
            assert!((g - (1.0 - 0.005 * t)).abs() < 1e-10, "t = {t}");
        }
        assert!((s.crossing_time.unwrap() - 200.0).abs() < 1e-8);
        assert!(s.tail_exponent.unwrap().abs() < 1e-8);
    }

    #[test]
    fn beta_one_never_arrives() {
        let path = beta_path(1.0);
        let s = synthesize_schedule(&path, 0.01, 1.0, Direction::Decreasing, 500.0).unwrap();
        assert_eq!(s.stop, StopReason::TimeLimit);
        assert!(!s.reached_crossing);
        assert_eq!(*s.times.last().unwrap(), 500.0);
        assert!((s.gammas.last().unwrap() - (-5.0f64).exp()).abs() < 1e-10);
        let open =
            synthesize_schedule(&path, 0.01, 1.0, Direction::Decreasing, f64::INFINITY).unwrap();
        assert_eq!(open.stop, StopReason::ApproachLimit);
        assert!(!open.reached_crossing && open.crossing_time.is_none());
    }

    #[test]
    fn beta_zero_is_trivial() {
        let path = beta_path(0.0);
        let r = synthesize_schedule(&path, 0.01, 1.0, Direction::Decreasing, 10.0);
        assert_eq!(r.unwrap_err(), Error::TriviallyAdiabatic);
    }

    #[test]
    fn rejects_bad_inputs() {
        let path = beta_path(2.0);
        for d in [0.0, 1.0, -0.1, f64::NAN] {
            assert!(matches!(
                synthesize_schedule(&path, d, 1.0, Direction::Decreasing, 1.0),
                Err(Error::Input(_))
            ));
        }
        assert!(synthesize_schedule(&path, 0.01, 1.0, Direction::Increasing, 1.0).is_err());
        assert!(synthesize_schedule(&path, 0.01, 3.0, Direction::Decreasing, 1.0).is_err());
    }

    #[test]
    fn classification_of_beta_family() {
        let expect = [
            (0.0, FeasibilityKind::TriviallyAdiabatic),
            (0.5, FeasibilityKind::InfeasibleInfiniteTime),
            (1.0, FeasibilityKind::InfeasibleInfiniteTime),
            (2.0, FeasibilityKind::FeasibleFiniteTime),
        ];
        for (beta, kind) in expect {
            let v = classify_feasibility(&beta_path(beta), 0.01, 1.0).unwrap();
            assert_eq!(v.kind, kind, "beta = {beta}");
            if beta > 0.0 {
                assert!((v.local_exponent.unwrap() - (2.0 - beta)).abs() < 1e-6);
            }
        }
        let v = classify_feasibility(&beta_path(2.0), 0.01, 1.0).unwrap();
        assert!((v.crossing_time.unwrap() - 200.0).abs() < 1e-8);
    }

    #[test]
    fn closed_form_examples() {
        let p = BetaFamilyParams::new(1.0, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(beta_closed_form(&p, 0.01, 0.0).unwrap(), Some(1.0));
        let p = BetaFamilyParams::new(2.0, 0.0, 1.0, 0.0).unwrap();
        assert!((beta_closed_form(&p, 0.01, 1.0).unwrap().unwrap() - 0.005).abs() < 1e-16);
        let p = BetaFamilyParams::new(0.0, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(beta_closed_form(&p, 0.01, 1.0).unwrap(), None);
        let p = BetaFamilyParams::new(0.75, 0.0, 1.0, 0.0).unwrap();
        let far = beta_closed_form(&p, 0.01, 1e6).unwrap().unwrap();
        let near = beta_closed_form(&p, 0.01, 1e3).unwrap().unwrap();
        assert!(far < near);
    }

    #[test]
    fn csv_columns() {
        let path = beta_path(2.0);
        let s = synthesize_schedule(&path, 0.01, 1.0, Direction::Decreasing, 1.0).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&path, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,gamma,b,theta,phi\n"));
        assert_eq!(text.lines().count(), s.len() + 1);
    }
}
