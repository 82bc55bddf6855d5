#![allow(dead_code)]

use levelcross::linalg::{CMatrix, CVector};
use levelcross::{HermitianOperator, C64};
use rand::{Rng, SeedableRng};

pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize, scale: f64) -> HermitianOperator {
    let mut m = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = C64::new(scale * rng.gen_range(-1.0..1.0), 0.0);
        for j in i + 1..dim {
            let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    HermitianOperator::new(m).unwrap()
}

/// Random unitary from the eigenvectors of a random Hermitian matrix times phases.
pub fn random_unitary<R: Rng>(rng: &mut R, dim: usize) -> CMatrix {
    let h = random_hermitian(rng, dim, 1.0);
    levelcross::unitary_exp(&h, rng.gen_range(0.5..3.0)).into_matrix()
}

/// `min_φ ‖a − e^{iφ} b‖`.
pub fn phase_distance(a: &CVector, b: &CVector) -> f64 {
    let o = b.dotc(a);
    let phase = if o.norm() > 0.0 {
        o / o.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    (a - b * phase).norm()
}

/// Distance between two angles on the circle.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Γ(t) of the power-law family started at `g0` and driven toward `Γ = 0`
/// at the uniform-violation rate `Γ̇ = −δΓ^{2−β}/(βτ)`.
pub fn power_law_gamma(beta: f64, tau: f64, delta: f64, g0: f64, t: f64) -> f64 {
    if beta == 1.0 {
        g0 * (-delta * t / tau).exp()
    } else {
        let base = g0.powf(beta - 1.0) - (beta - 1.0) * delta * t / (beta * tau);
        base.max(0.0).powf(1.0 / (beta - 1.0))
    }
}

/// Three-point derivative on a non-uniform grid.
pub fn nonuniform_derivative(x: [f64; 3], y: [f64; 3]) -> f64 {
    let (h1, h2) = (x[1] - x[0], x[2] - x[1]);
    (-h2 / (h1 * (h1 + h2))) * y[0]
        + ((h2 - h1) / (h1 * h2)) * y[1]
        + (h1 / (h2 * (h1 + h2))) * y[2]
}

/// Two-level Landau–Zener sweep `H = ½[[−(d₀ + ct), Ω], [Ω, d₀ + ct]]` on
/// `[0, T]`; its generator does not commute with itself at different times.
pub fn chirped_rabi(duration: f64) -> levelcross::propagator::DriveProgram {
    let (omega, d0, chirp) = (1.0, -2.0, 4.0 / duration);
    levelcross::propagator::DriveProgram::new(duration, move |t| {
        let d = d0 + chirp * t;
        HermitianOperator::from_real_rows(&[&[-0.5 * d, 0.5 * omega], &[0.5 * omega, 0.5 * d]])
            .unwrap()
    })
    .unwrap()
}

/// Final-state error of `n` steps against `2n` steps.
pub fn step_doubling_error(prog: &levelcross::propagator::DriveProgram, n: usize) -> f64 {
    use levelcross::propagator::propagate_with_stride;
    let psi0 = levelcross::StateVector::basis(prog.dim(), 0);
    let coarse = propagate_with_stride(prog, &psi0, n, (n / 256).max(1)).unwrap();
    let fine = propagate_with_stride(prog, &psi0, 2 * n, (n / 128).max(1)).unwrap();
    (coarse.final_state().amplitudes() - fine.final_state().amplitudes()).norm()
}

/// Berry phase of the spin ground level around the cone `θ = θ₀` from full
/// propagation: the field turns once in time `T`, the dynamical phase
/// `BT/2` is removed, and the `1/T` non-adiabatic correction is cancelled
/// by Richardson extrapolation over `T` and `2T`.
pub fn spin_berry_by_propagation(theta0: f64, period: f64) -> f64 {
    use levelcross::adiabaticity::spin_hamiltonian;
    use levelcross::path::ParameterPoint;
    use levelcross::propagator::{propagate_with_stride, DriveProgram};
    let phase_at = |t_loop: f64| {
        let prog = DriveProgram::new(t_loop, move |t| {
            spin_hamiltonian(&ParameterPoint::new(
                1.0,
                theta0,
                std::f64::consts::TAU * t / t_loop,
            ))
        })
        .unwrap();
        let ground = levelcross::eigensystem(&prog.hamiltonian_at(0.0)).vector(0);
        let psi0 = levelcross::StateVector::new(ground.clone()).unwrap();
        let n = (t_loop / 0.02).ceil() as usize;
        let traj = propagate_with_stride(&prog, &psi0, n, (n / 256).max(1)).unwrap();
        let overlap = ground.dotc(traj.final_state().amplitudes());
        overlap.arg() - 0.5 * t_loop
    };
    let (a, b) = (phase_at(period), phase_at(2.0 * period));
    // unwrap the pair before extrapolating
    let b =
        a + (b - a + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI;
    let r = 2.0 * b - a;
    let wrapped = r - std::f64::consts::TAU * (r / std::f64::consts::TAU).round();
    if wrapped <= -std::f64::consts::PI {
        wrapped + std::f64::consts::TAU
    } else {
        wrapped
    }
}

/// Largest energy and state (up to phase) disagreement between the closed
/// forms and numerical diagonalization of the three-level Hamiltonian, over
/// `n` random draws.
pub fn stirap_closed_form_errors(seed: u64, n: usize) -> (f64, f64, bool) {
    use levelcross::stirap::{stirap_eigensystem, stirap_hamiltonian, StirapParams};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let (mut e_err, mut v_err, mut dark_flat) = (0.0f64, 0.0f64, true);
    for _ in 0..n {
        let p = StirapParams::new(
            rng.gen_range(0.0..3.0),
            rng.gen_range(0.0..3.0),
            rng.gen_range(-3.0..3.0),
            1.0,
        )
        .unwrap();
        let closed = stirap_eigensystem(&p).unwrap();
        dark_flat &= closed.e_zero == 0.0;
        let num = levelcross::eigensystem(&stirap_hamiltonian(&p));
        // ascending order is E₋ < E₀ < E₊
        let pairs = [
            (closed.e_minus, &closed.states[1]),
            (closed.e_zero, &closed.states[2]),
            (closed.e_plus, &closed.states[0]),
        ];
        for (k, (e, v)) in pairs.into_iter().enumerate() {
            e_err = e_err.max((num.energies()[k] - e).abs());
            v_err = v_err.max(phase_distance(&num.vector(k), v.amplitudes()));
        }
    }
    (e_err, v_err, dark_flat)
}

/// Two-dimensional level inside four dimensions, carried along a loop in a
/// plane of generators.
pub struct LoopFamily {
    g1: HermitianOperator,
    g2: HermitianOperator,
    radius: f64,
}

impl LoopFamily {
    pub fn random(seed: u64) -> Self {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        Self {
            g1: random_hermitian(&mut rng, 4, 1.0),
            g2: random_hermitian(&mut rng, 4, 1.0),
            radius: rng.gen_range(0.3..1.0),
        }
    }

    pub fn frame(&self, s: f64) -> levelcross::holonomy::SubspaceFrame {
        let (x, y) = (
            (std::f64::consts::TAU * s).cos() * self.radius,
            (std::f64::consts::TAU * s).sin() * self.radius,
        );
        let h = HermitianOperator::new(
            self.g1.matrix() * C64::new(x, 0.0) + self.g2.matrix() * C64::new(y, 0.0),
        )
        .unwrap();
        let u = levelcross::unitary_exp(&h, -1.0).into_matrix();
        levelcross::holonomy::SubspaceFrame::new(u.columns(0, 2).into_owned(), 0.0).unwrap()
    }

    pub fn frames(&self, nodes: &[f64]) -> Vec<levelcross::holonomy::SubspaceFrame> {
        nodes.iter().map(|&s| self.frame(s)).collect()
    }
}

pub fn uniform(n: usize) -> Vec<f64> {
    (0..n).map(|k| k as f64 / (n - 1) as f64).collect()
}

/// Nodes bunched toward both ends, `½(1 − cos(πk/(n−1)))`.
pub fn clustered(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| 0.5 * (1.0 - (std::f64::consts::PI * k as f64 / (n - 1) as f64).cos()))
        .collect()
}

/// Rebuilds the drive modulus from path derivatives and a finite-difference
/// Γ̇; returns the fraction of interior samples matching `Bδ` within 1e-6.
pub fn constraint_fraction(
    path: &dyn levelcross::path::ParameterPath,
    s: &levelcross::schedule::Schedule,
) -> f64 {
    let good = (1..s.len() - 1)
        .filter(|&i| {
            let gdot = nonuniform_derivative(
                [s.times[i - 1], s.times[i], s.times[i + 1]],
                [s.gammas[i - 1], s.gammas[i], s.gammas[i + 1]],
            );
            let p = path.point_at(s.gammas[i]);
            let drive = path.derivative_at(s.gammas[i]).drive_norm(p.theta) * gdot.abs();
            let target = p.b * s.delta;
            (drive - target).abs() <= 1e-6 * target
        })
        .count();
    good as f64 / (s.len() - 2) as f64
}
