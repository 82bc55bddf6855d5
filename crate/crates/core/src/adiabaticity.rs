//! Adiabaticity conditions for a two-level system in a rotating field.
//!
//! Sign convention: `H = −(B/2) n·σ`, so the state aligned with the field is
//! the ground state at `−B/2`. Transforming with
//! `A(θ, φ) = e^{iθσ_y/2} e^{iφσ_z/2}` gives the rotated Hamiltonian
//!
//! ```text
//! H̃ = iȦA† + AHA† = −½ [ B + φ̇cosθ        −iθ̇ − φ̇sinθ ]
//!                        [ iθ̇ − φ̇sinθ     −B − φ̇cosθ   ]
//! ```
//!
//! whose off-diagonal part drives transitions between the two levels.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, HermitianOperator, UnitaryOperator};
use crate::path::ParameterPoint;

/// Default pass threshold standing in for "≪ 1" in the spectral condition.
pub const DEFAULT_SPECTRAL_THRESHOLD: f64 = 0.1;

/// Zero-padding factor applied before the discrete Fourier transform.
pub const SPECTRAL_PADDING: usize = 8;

const MIN_SPECTRAL_SAMPLES: usize = 256;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Lab-frame Hamiltonian `−(B/2)(sinθcosφ σx + sinθsinφ σy + cosθ σz)`.
pub fn spin_hamiltonian(p: &ParameterPoint) -> HermitianOperator {
    let [nx, ny, nz] = p.direction();
    let h = -0.5 * p.b;
    HermitianOperator::from_raw(CMatrix::from_row_slice(
        2,
        2,
        &[
            c(h * nz, 0.0),
            c(h * nx, -h * ny),
            c(h * nx, h * ny),
            c(-h * nz, 0.0),
        ],
    ))
}

/// Frame rotation `A(θ, φ) = e^{iθσ_y/2} e^{iφσ_z/2}`.
pub fn rotation_operator(theta: f64, phi: f64) -> UnitaryOperator {
    let (s, co) = (0.5 * theta).sin_cos();
    let ep = C64::from_polar(1.0, 0.5 * phi);
    let em = ep.conj();
    // [[c, s], [−s, c]] · diag(e^{iφ/2}, e^{−iφ/2})
    UnitaryOperator::from_raw(CMatrix::from_row_slice(
        2,
        2,
        &[ep * co, em * s, -ep * s, em * co],
    ))
}

/// Entries of the rotated-frame Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotatedFrameData {
    /// `B + φ̇ cosθ`
    pub diag: f64,
    /// `−iθ̇ − φ̇ sinθ`
    pub offdiag: C64,
    /// `√(θ̇² + φ̇² sin²θ)`
    pub drive_mod: f64,
}

impl RotatedFrameData {
    /// The full matrix `H̃ = −½ [[diag, offdiag], [offdiag*, −diag]]`.
    pub fn matrix(&self) -> CMatrix {
        CMatrix::from_row_slice(
            2,
            2,
            &[
                c(-0.5 * self.diag, 0.0),
                -0.5 * self.offdiag,
                -0.5 * self.offdiag.conj(),
                c(0.5 * self.diag, 0.0),
            ],
        )
    }
}

/// Transverse drive `−(iθ̇ + φ̇ sinθ)`; its modulus is branch independent.
pub fn transverse_drive(theta: f64, theta_dot: f64, phi_dot: f64) -> C64 {
    c(-phi_dot * theta.sin(), -theta_dot)
}

pub fn rotated_hamiltonian(p: &ParameterPoint, theta_dot: f64, phi_dot: f64) -> RotatedFrameData {
    let (s, co) = p.theta.sin_cos();
    RotatedFrameData {
        diag: p.b + phi_dot * co,
        offdiag: transverse_drive(p.theta, theta_dot, phi_dot),
        drive_mod: theta_dot.hypot(phi_dot * s),
    }
}

/// Ratio of transverse drive to rotated-frame splitting.
///
/// Returns `+∞` when the splitting vanishes under a nonzero drive; the gap
/// condition cannot hold at such an instant.
pub fn gap_condition_ratio(p: &ParameterPoint, theta_dot: f64, phi_dot: f64) -> f64 {
    let r = rotated_hamiltonian(p, theta_dot, phi_dot);
    if r.drive_mod == 0.0 {
        return 0.0;
    }
    let denom = r.diag.abs();
    if denom == 0.0 {
        f64::INFINITY
    } else {
        r.drive_mod / denom
    }
}

/// Outcome of the spectral (Fourier) adiabaticity test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    /// `|∫ dt f(ω = B(t))|`
    pub margin: f64,
    /// `|ω|` at the maximum of `|f(ω)|`.
    pub dominant_freq: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Evaluates the Fourier transform `f(ω) = ∫ drive(t) e^{−iωt} dt` of a
/// uniformly sampled drive at the instantaneous gap and integrates it over
/// the sampling window.
///
/// The transform uses the rectangle rule on the samples (rectangular window,
/// zero-padded by [`SPECTRAL_PADDING`]) and linear interpolation between
/// frequency bins.
pub fn spectral_condition(
    times: &[f64],
    drive: &[C64],
    gap: &[f64],
    threshold: f64,
) -> Result<SpectralReport> {
    let n = times.len();
    if n < MIN_SPECTRAL_SAMPLES {
        return Err(Error::Input(format!(
            "spectral condition needs at least {MIN_SPECTRAL_SAMPLES} samples, got {n}"
        )));
    }
    if drive.len() != n || gap.len() != n {
        return Err(Error::Input(
            "drive, gap and time samples differ in length".into(),
        ));
    }
    let t0 = times[0];
    let dt = (times[n - 1] - t0) / (n - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::Input("time grid must be increasing".into()));
    }
    let scale = times[n - 1].abs().max(t0.abs()).max(dt);
    for (k, &t) in times.iter().enumerate() {
        if (t - (t0 + k as f64 * dt)).abs() > 1e-9 * scale {
            return Err(Error::Input(format!(
                "time grid is not uniform at sample {k}"
            )));
        }
    }

    let spectrum = padded_spectrum(drive, dt, t0);
    let n_pad = spectrum.len();
    let d_omega = std::f64::consts::TAU / (n_pad as f64 * dt);
    let nyquist = std::f64::consts::PI / dt;

    let mut acc = c(0.0, 0.0);
    for &omega in gap {
        if omega.abs() > nyquist {
            return Err(Error::Input(format!(
                "gap {omega} exceeds the Nyquist frequency {nyquist} of the sampling"
            )));
        }
        acc += interpolate_spectrum(&spectrum, omega / d_omega) * dt;
    }

    let (k_max, _) = spectrum
        .iter()
        .enumerate()
        .fold((0, -1.0), |(kb, vb), (k, z)| {
            let v = z.norm();
            if v > vb {
                (k, v)
            } else {
                (kb, vb)
            }
        });
    let signed_k = if k_max > n_pad / 2 {
        k_max as f64 - n_pad as f64
    } else {
        k_max as f64
    };
    let margin = acc.norm();
    Ok(SpectralReport {
        margin,
        dominant_freq: (signed_k * d_omega).abs(),
        threshold,
        passed: margin < threshold,
    })
}

/// `f(ω_k)` on the bins `ω_k = 2πk / (N_pad Δt)`, negative frequencies wrapped.
fn padded_spectrum(drive: &[C64], dt: f64, t0: f64) -> Vec<C64> {
    let n_pad = drive.len() * SPECTRAL_PADDING;
    let mut buf = vec![c(0.0, 0.0); n_pad];
    buf[..drive.len()].copy_from_slice(drive);
    let fft: Arc<dyn rustfft::Fft<f64>> = FftPlanner::new().plan_fft_forward(n_pad);
    fft.process(&mut buf);
    let d_omega = std::f64::consts::TAU / (n_pad as f64 * dt);
    for (k, z) in buf.iter_mut().enumerate() {
        let kk = if k > n_pad / 2 {
            k as f64 - n_pad as f64
        } else {
            k as f64
        };
        *z *= C64::from_polar(dt, -kk * d_omega * t0);
    }
    buf
}

fn interpolate_spectrum(spectrum: &[C64], position: f64) -> C64 {
    let n = spectrum.len() as i64;
    let k0 = position.floor();
    let frac = position - k0;
    let i0 = (k0 as i64).rem_euclid(n) as usize;
    let i1 = (k0 as i64 + 1).rem_euclid(n) as usize;
    spectrum[i0] * (1.0 - frac) + spectrum[i1] * frac
}
