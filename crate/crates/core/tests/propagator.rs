mod common;

use std::sync::Arc;

use common::{chirped_rabi, step_doubling_error};
use levelcross::path::{make_beta_path, BetaFamilyParams, ParameterPath};
use levelcross::propagator::{
    adiabatic_deviation, propagate, propagate_with_stride, schedule_program, ScheduleInterpolant,
};
use levelcross::schedule::{synthesize_schedule, Direction};
use levelcross::stirap::{stirap_hamiltonian, StirapParams};
use levelcross::{eigensystem, StateVector, C64};
use proptest::prelude::*;

#[test]
fn norm_is_conserved_over_long_runs() {
    let p = StirapParams::pulses(1.0, 1.0).unwrap();
    let prog = levelcross::propagator::DriveProgram::new(5000.0, move |t| {
        let x = t / 5000.0;
        stirap_hamiltonian(&p.with_couplings((3.0 * x).sin(), (7.0 * x).cos()))
    })
    .unwrap();
    let traj = propagate_with_stride(&prog, &StateVector::basis(3, 0), 100_000, 1000).unwrap();
    let drift = traj
        .states
        .iter()
        .map(|s| (s.norm() - 1.0).abs())
        .fold(0.0, f64::max);
    assert!(drift < 1e-10, "norm drift {drift}");
}

#[test]
fn midpoint_stepping_is_second_order() {
    let duration = 20.0;
    let prog = chirped_rabi(duration);
    let scaled: Vec<f64> = (10..=14)
        .map(|k| {
            let n = 1usize << k;
            let dt = duration / n as f64;
            step_doubling_error(&prog, n) / (dt * dt)
        })
        .collect();
    let (lo, hi) = scaled
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    assert!(hi / lo < 1.5, "error/Δt² ranges over {scaled:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn populations_ignore_global_phase(phase in 0.0f64..6.3, re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let p = StirapParams::new(0.3, 0.7, 1.0, 1.0).unwrap();
        let frame = eigensystem(&stirap_hamiltonian(&p));
        let psi = StateVector::normalized(levelcross::linalg::CVector::from_vec(vec![
            C64::new(re, im),
            C64::new(0.5, -0.2),
            C64::new(-0.1, 0.9),
        ]))
        .unwrap();
        let rotated = psi.amplitudes() * C64::from_polar(1.0, phase);
        let a = frame.populations(psi.amplitudes());
        let b = frame.populations(&rotated);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-15);
        }
    }
}

#[test]
fn synthesized_schedule_stays_adiabatic() {
    let delta = 0.01;
    let path: Arc<dyn ParameterPath> =
        Arc::new(make_beta_path(BetaFamilyParams::new(2.0, 0.3, 1.0, 0.0).unwrap(), 2.0).unwrap());
    let s = synthesize_schedule(
        path.as_ref(),
        delta,
        1.0,
        Direction::Decreasing,
        f64::INFINITY,
    )
    .unwrap();
    let t_end = ScheduleInterpolant::new(&s)
        .time_at_distance(0.0, 1e-4)
        .unwrap();
    let prog = schedule_program(path.clone(), &s, t_end).unwrap();
    let ground = StateVector::new(eigensystem(&prog.hamiltonian_at(0.0)).vector(0)).unwrap();
    let n = (t_end / 0.01).ceil() as usize;
    let traj = propagate_with_stride(&prog, &ground, n, 10).unwrap();
    let dev = adiabatic_deviation(&traj);
    assert!(dev < 5.0 * delta, "deviation {dev}");
}

#[test]
fn short_runs_are_rejected() {
    let prog = chirped_rabi(1.0);
    assert!(propagate(&prog, &StateVector::basis(2, 0), 10).is_err());
    assert!(propagate(&prog, &StateVector::basis(3, 0), 1000).is_err());
}
