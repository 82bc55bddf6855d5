mod common;

use common::max_abs;
use levelcross::adiabaticity::{
    rotated_hamiltonian, rotation_operator, spectral_condition, spin_hamiltonian, transverse_drive,
    DEFAULT_SPECTRAL_THRESHOLD,
};
use levelcross::path::ParameterPoint;
use levelcross::C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[test]
fn rotated_frame_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = 1e-7;
    let i = C64::new(0.0, 1.0);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let b = rng.gen_range(0.0..5.0);
        let theta = rng.gen_range(0.0..PI);
        let phi = rng.gen_range(0.0..2.0 * PI);
        let (td, pd) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let p = ParameterPoint { b, theta, phi };
        let a = rotation_operator(theta, phi);
        let a_plus = rotation_operator(theta + td * h, phi + pd * h);
        let a_minus = rotation_operator(theta - td * h, phi - pd * h);
        let a_dot = (a_plus.matrix() - a_minus.matrix()) / C64::new(2.0 * h, 0.0);
        let lab = spin_hamiltonian(&p);
        let assembled =
            a.matrix() * lab.matrix() * a.matrix().adjoint() + a_dot * a.matrix().adjoint() * i;
        let expected = rotated_hamiltonian(&p, td, pd).matrix();
        worst = worst.max(max_abs(&(assembled - expected)));
    }
    assert!(worst < 1e-5, "worst entry error {worst}");
}

#[test]
fn rotation_diagonalizes_static_field() {
    let p = ParameterPoint::new(1.7, 1.1, 4.0);
    let r = rotated_hamiltonian(&p, 0.0, 0.0).matrix();
    assert!((r[(0, 0)].re + 0.85).abs() < 1e-15 && (r[(1, 1)].re - 0.85).abs() < 1e-15);
    assert!(r[(0, 1)].norm() == 0.0);
}

fn random_drive(seed: u64) -> (Vec<f64>, Vec<C64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 1024;
    let times: Vec<f64> = (0..n).map(|k| 0.1 * k as f64).collect();
    let drive = (0..n)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let gap = (0..n).map(|_| rng.gen_range(0.0..10.0)).collect();
    (times, drive, gap)
}

proptest! {
    #[test]
    fn drive_modulus_is_branch_independent(theta in 0.0f64..PI, td in -5.0f64..5.0, pd in -5.0f64..5.0) {
        let plus = C64::new(-pd * theta.sin(), td);
        let minus = transverse_drive(theta, td, pd);
        prop_assert_eq!(plus.norm(), minus.norm());
        let r = rotated_hamiltonian(&ParameterPoint { b: 1.0, theta, phi: 0.0 }, td, pd);
        prop_assert!((r.drive_mod - minus.norm()).abs() <= 1e-15 * (1.0 + r.drive_mod));
    }

    #[test]
    fn margin_is_homogeneous_in_amplitude(scale in 1e-3f64..1e3, seed: u64) {
        let (t, d, g) = random_drive(seed);
        let base = spectral_condition(&t, &d, &g, DEFAULT_SPECTRAL_THRESHOLD).unwrap().margin;
        let scaled: Vec<C64> = d.iter().map(|z| z * scale).collect();
        let m = spectral_condition(&t, &scaled, &g, DEFAULT_SPECTRAL_THRESHOLD).unwrap().margin;
        prop_assert!((m - scale * base).abs() <= 1e-10 * scale * base);
    }
}
