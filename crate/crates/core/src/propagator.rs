//! Time-dependent Schrödinger propagation with the midpoint exponential
//! `ψ_{k+1} = exp(−i H(t_k + Δt/2) Δt) ψ_k`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::adiabaticity::{spin_hamiltonian, transverse_drive};
use crate::error::{Error, Result};
use crate::export::write_float_csv;
use crate::linalg::{
    eigensystem, smooth_frames, unitary_exp, EigenFrame, HermitianOperator, StateVector,
};
use crate::path::{ParameterPath, ParameterPoint};
use crate::schedule::Schedule;

pub const MIN_STEPS: usize = 256;

type HamiltonianFn = dyn Fn(f64) -> HermitianOperator + Send + Sync;
type FrameFn = dyn Fn(f64) -> EigenFrame + Send + Sync;

/// A Hamiltonian on `[0, duration]` together with the frames populations
/// are measured against.
#[derive(Clone)]
pub struct DriveProgram {
    duration: f64,
    dim: usize,
    hamiltonian: Arc<HamiltonianFn>,
    frame: Option<Arc<FrameFn>>,
}

impl std::fmt::Debug for DriveProgram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DriveProgram")
            .field("duration", &self.duration)
            .field("dim", &self.dim)
            .finish_non_exhaustive()
    }
}

impl DriveProgram {
    pub fn new(
        duration: f64,
        hamiltonian: impl Fn(f64) -> HermitianOperator + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::Input(format!(
                "program duration must be positive, got {duration}"
            )));
        }
        let dim = hamiltonian(0.0).dim();
        Ok(Self {
            duration,
            dim,
            hamiltonian: Arc::new(hamiltonian),
            frame: None,
        })
    }

    /// Replaces the instantaneous eigenframe, e.g. by a directional limit at
    /// instants where the spectrum is degenerate.
    pub fn with_frames(
        mut self,
        frame: impl Fn(f64) -> EigenFrame + Send + Sync + 'static,
    ) -> Self {
        self.frame = Some(Arc::new(frame));
        self
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian_at(&self, t: f64) -> HermitianOperator {
        (self.hamiltonian)(t)
    }

    pub fn eigenframe_at(&self, t: f64) -> EigenFrame {
        match &self.frame {
            Some(f) => f(t),
            None => eigensystem(&self.hamiltonian_at(t)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    /// Occupations of the gauge-smoothed instantaneous eigenstates, ascending energy.
    pub populations: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("trajectories are never empty")
    }

    pub fn final_populations(&self) -> &[f64] {
        self.populations
            .last()
            .expect("trajectories are never empty")
    }

    /// Writes `t,re_c1,im_c1,...,p_level1,...`.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let dim = self.states.first().map_or(0, StateVector::dim);
        let mut header = vec!["t".to_string()];
        for k in 1..=dim {
            header.push(format!("re_c{k}"));
            header.push(format!("im_c{k}"));
        }
        for k in 1..=dim {
            header.push(format!("p_level{k}"));
        }
        let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
        write_float_csv(
            writer,
            &header_refs,
            self.times.iter().enumerate().map(|(i, &t)| {
                let mut row = vec![t];
                for z in self.states[i].amplitudes().iter() {
                    row.push(z.re);
                    row.push(z.im);
                }
                row.extend_from_slice(&self.populations[i]);
                row
            }),
        )
    }
}

/// Propagates `psi0` through the program with `n_steps` equal steps and
/// records every step.
pub fn propagate(prog: &DriveProgram, psi0: &StateVector, n_steps: usize) -> Result<Trajectory> {
    propagate_with_stride(prog, psi0, n_steps, 1)
}

/// As [`propagate`], recording every `stride`-th step and the final one.
pub fn propagate_with_stride(
    prog: &DriveProgram,
    psi0: &StateVector,
    n_steps: usize,
    stride: usize,
) -> Result<Trajectory> {
    if n_steps < MIN_STEPS {
        return Err(Error::Input(format!(
            "at least {MIN_STEPS} steps required, got {n_steps}"
        )));
    }
    if stride == 0 {
        return Err(Error::Input("record stride must be positive".into()));
    }
    if psi0.dim() != prog.dim() {
        return Err(Error::Input(format!(
            "state dimension {} does not match program dimension {}",
            psi0.dim(),
            prog.dim()
        )));
    }
    let dt = prog.duration() / n_steps as f64;
    let mut psi = psi0.clone();
    let mut times = vec![0.0];
    let mut states = vec![psi.clone()];
    for k in 0..n_steps {
        let u = unitary_exp(&prog.hamiltonian_at((k as f64 + 0.5) * dt), dt);
        psi = u.apply(&psi);
        if (k + 1) % stride == 0 || k + 1 == n_steps {
            times.push(if k + 1 == n_steps {
                prog.duration()
            } else {
                (k + 1) as f64 * dt
            });
            states.push(psi.clone());
        }
    }
    let frames: Vec<EigenFrame> = times.iter().map(|&t| prog.eigenframe_at(t)).collect();
    let frames = smooth_frames(&frames)?;
    let populations = frames
        .iter()
        .zip(&states)
        .map(|(f, s)| f.populations(s.amplitudes()))
        .collect();
    Ok(Trajectory {
        times,
        states,
        populations,
    })
}

/// Largest loss from the instantaneous eigenstate that was occupied most at
/// the start.
pub fn adiabatic_deviation(traj: &Trajectory) -> f64 {
    let Some(first) = traj.populations.first() else {
        return 0.0;
    };
    let level = first
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map_or(0, |(k, _)| k);
    traj.populations
        .iter()
        .map(|p| 1.0 - p[level])
        .fold(0.0, f64::max)
}

/// The three polar-angle drives of the rotating-field demonstration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fig1Case {
    /// `θ̇ = a·cos(bt/2)`
    Half,
    /// `θ̇ = a·cos(bt)`
    Resonant,
    /// `θ̇ = a·cos(2bt)`
    Double,
}

impl Fig1Case {
    pub const ALL: [Fig1Case; 3] = [Fig1Case::Half, Fig1Case::Resonant, Fig1Case::Double];

    /// Drive frequency in units of `b`.
    pub fn multiple(self) -> f64 {
        match self {
            Fig1Case::Half => 0.5,
            Fig1Case::Resonant => 1.0,
            Fig1Case::Double => 2.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Fig1Case::Half => "half",
            Fig1Case::Resonant => "resonant",
            Fig1Case::Double => "double",
        }
    }
}

impl std::str::FromStr for Fig1Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "half" => Ok(Fig1Case::Half),
            "resonant" => Ok(Fig1Case::Resonant),
            "double" => Ok(Fig1Case::Double),
            other => Err(Error::Input(format!("unknown case {other:?}"))),
        }
    }
}

/// Field of constant strength `b` whose polar angle oscillates as
/// `θ(t) = θ₀ + (amplitude/(kb))·sin(kbt)` while `φ = phi_rate·t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig1Config {
    pub case: Fig1Case,
    pub b: f64,
    pub phi_rate: f64,
    pub duration: f64,
    pub theta0: f64,
    /// Peak of `θ̇`.
    pub amplitude: f64,
}

impl Fig1Config {
    /// Field strength 1, drive `0.005·b`, `φ̇ = 0.001·b`, polar start `θ₀ = 0`,
    /// 400 Larmor periods.
    pub fn new(case: Fig1Case, b: f64) -> Self {
        Self {
            case,
            b,
            phi_rate: 0.001 * b,
            duration: 400.0 * std::f64::consts::TAU / b,
            theta0: 0.0,
            amplitude: 0.005 * b,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.b > 0.0) {
            return Err(Error::Input(format!("b must be positive, got {}", self.b)));
        }
        if !(self.duration >= 200.0 * std::f64::consts::TAU / self.b) {
            return Err(Error::Input(
                "duration must span at least 200 Larmor periods".into(),
            ));
        }
        if !(self.phi_rate.is_finite() && self.amplitude.is_finite() && self.theta0.is_finite()) {
            return Err(Error::Input("non-finite drive parameter".into()));
        }
        Ok(())
    }

    pub fn point_at(&self, t: f64) -> ParameterPoint {
        let w = self.case.multiple() * self.b;
        ParameterPoint::new(
            self.b,
            self.theta0 + self.amplitude / w * (w * t).sin(),
            self.phi_rate * t,
        )
    }

    /// `(θ, θ̇, φ̇)` without chart canonicalization.
    pub fn angles_at(&self, t: f64) -> (f64, f64, f64) {
        let w = self.case.multiple() * self.b;
        (
            self.theta0 + self.amplitude / w * (w * t).sin(),
            self.amplitude * (w * t).cos(),
            self.phi_rate,
        )
    }

    /// Transverse drive `−(iθ̇ + φ̇ sinθ)` and gap `b` on the grid `t_j = jτ/n`.
    pub fn drive_samples(&self, n: usize) -> (Vec<f64>, Vec<num_complex::Complex64>, Vec<f64>) {
        let times: Vec<f64> = (0..n)
            .map(|j| self.duration * j as f64 / n as f64)
            .collect();
        let drive = times
            .iter()
            .map(|&t| {
                let (theta, dtheta, dphi) = self.angles_at(t);
                transverse_drive(theta, dtheta, dphi)
            })
            .collect();
        (times, drive, vec![self.b; n])
    }
}

/// The rotating-field program with default drive parameters.
pub fn fig1_program(case: Fig1Case, b: f64, phi_rate: f64, duration: f64) -> Result<DriveProgram> {
    fig1_program_with(&Fig1Config {
        phi_rate,
        duration,
        ..Fig1Config::new(case, b)
    })
}

pub fn fig1_program_with(cfg: &Fig1Config) -> Result<DriveProgram> {
    cfg.validate()?;
    let cfg = *cfg;
    DriveProgram::new(cfg.duration, move |t| spin_hamiltonian(&cfg.point_at(t)))
}

/// Spin Hamiltonian along `path` driven by the schedule, up to `t_end`.
///
/// `Γ(t)` between samples is cubic Hermite interpolation using the stored
/// rates.
pub fn schedule_program(
    path: Arc<dyn ParameterPath>,
    schedule: &Schedule,
    t_end: f64,
) -> Result<DriveProgram> {
    if !(t_end > 0.0 && t_end <= schedule.duration()) {
        return Err(Error::Input(format!(
            "t_end must lie in (0, {}], got {t_end}",
            schedule.duration()
        )));
    }
    let interp = ScheduleInterpolant::new(schedule);
    DriveProgram::new(t_end, move |t| {
        spin_hamiltonian(&path.point_at(interp.gamma_at(t)))
    })
}

/// Cubic Hermite interpolation of `Γ(t)` through a schedule's samples.
#[derive(Clone, Debug)]
pub struct ScheduleInterpolant {
    times: Vec<f64>,
    gammas: Vec<f64>,
    rates: Vec<f64>,
}

impl ScheduleInterpolant {
    pub fn new(s: &Schedule) -> Self {
        let rates = s
            .gamma_dots
            .iter()
            .map(|&r| if r.is_finite() { r } else { 0.0 })
            .collect();
        Self {
            times: s.times.clone(),
            gammas: s.gammas.clone(),
            rates,
        }
    }

    pub fn gamma_at(&self, t: f64) -> f64 {
        let n = self.times.len();
        if n == 1 || t <= self.times[0] {
            return self.gammas[0];
        }
        if t >= self.times[n - 1] {
            return self.gammas[n - 1];
        }
        let i = self.times.partition_point(|&x| x <= t) - 1;
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let h = t1 - t0;
        if !(h > 0.0) {
            return self.gammas[i + 1];
        }
        let x = (t - t0) / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * x) * (1.0 - x).powi(2),
            x * (1.0 - x).powi(2),
            x * x * (3.0 - 2.0 * x),
            x * x * (x - 1.0),
        );
        h00 * self.gammas[i]
            + h10 * h * self.rates[i]
            + h01 * self.gammas[i + 1]
            + h11 * h * self.rates[i + 1]
    }

    /// First sample time at which `|Γ − Γ_c|` is at most `s`.
    pub fn time_at_distance(&self, crossing: f64, s: f64) -> Option<f64> {
        self.times
            .iter()
            .zip(&self.gammas)
            .find(|(_, &g)| (g - crossing).abs() <= s)
            .map(|(&t, _)| t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use num_complex::Complex64 as C64;
    use std::f64::consts::TAU;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn stationary_state_stays_put() {
        let prog = DriveProgram::new(10.0, |_| HermitianOperator::diagonal(&[0.0, 1.0])).unwrap();
        let traj = propagate(&prog, &StateVector::basis(2, 0), 256).unwrap();
        for p in &traj.populations {
            assert!((p[0] - 1.0).abs() < 1e-12 && p[1].abs() < 1e-12);
        }
        assert!(adiabatic_deviation(&traj) < 1e-9);
    }

    #[test]
    fn rabi_oscillation() {
        let omega = 1.3;
        let h = HermitianOperator::new(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.0), c(0.5 * omega), c(0.5 * omega), c(0.0)],
        ))
        .unwrap();
        let prog = DriveProgram::new(TAU / omega, move |_| h.clone()).unwrap();
        let traj = propagate(&prog, &StateVector::basis(2, 0), 4096).unwrap();
        for (t, s) in traj.times.iter().zip(&traj.states) {
            let p_down = s.populations()[1];
            assert!((p_down - (0.5 * omega * t).sin().powi(2)).abs() < 1e-6);
        }
    }

    #[test]
    fn input_checks() {
        let prog = DriveProgram::new(1.0, |_| HermitianOperator::zeros(2)).unwrap();
        assert!(propagate(&prog, &StateVector::basis(2, 0), 100).is_err());
        assert!(propagate(&prog, &StateVector::basis(3, 0), 300).is_err());
        assert!(DriveProgram::new(0.0, |_| HermitianOperator::zeros(2)).is_err());
    }

    #[test]
    fn stride_keeps_final_sample() {
        let prog = DriveProgram::new(1.0, |_| HermitianOperator::diagonal(&[0.0, 1.0])).unwrap();
        let traj = propagate_with_stride(&prog, &StateVector::basis(2, 1), 300, 7).unwrap();
        assert_eq!(*traj.times.last().unwrap(), 1.0);
        assert_eq!(traj.times.len(), 300 / 7 + 2);
    }

    #[test]
    fn fig1_cases_parse() {
        for case in Fig1Case::ALL {
            assert_eq!(case.name().parse::<Fig1Case>().unwrap(), case);
        }
        assert!("triple".parse::<Fig1Case>().is_err());
    }

    #[test]
    fn fig1_rejects_short_runs() {
        assert!(fig1_program(Fig1Case::Half, 1.0, 0.001, 100.0).is_err());
        assert!(fig1_program(Fig1Case::Half, 0.0, 0.001, 1e4).is_err());
    }

    #[test]
    fn csv_header() {
        let prog = DriveProgram::new(1.0, |_| HermitianOperator::diagonal(&[0.0, 1.0])).unwrap();
        let traj = propagate(&prog, &StateVector::basis(2, 0), 256).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,re_c1,im_c1,re_c2,im_c2,p_level1,p_level2\n"));
    }
}
