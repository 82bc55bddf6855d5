mod common;

use common::{constraint_fraction, power_law_gamma};
use levelcross::path::{make_beta_path, BetaFamilyParams, BetaPath, ParameterPath};
use levelcross::schedule::{
    beta_closed_form, beta_crossing_time, classify_feasibility, synthesize_schedule, Direction,
    FeasibilityKind, Schedule,
};
use levelcross::stirap::{StirapParams, StirapReducedPath};
use levelcross::Error;

const TAU: f64 = 1.0;
const THETA0: f64 = 0.3;

fn beta_path(beta: f64) -> BetaPath {
    make_beta_path(BetaFamilyParams::new(beta, THETA0, TAU, 0.0).unwrap(), 2.0).unwrap()
}

fn run(beta: f64, delta: f64) -> Schedule {
    synthesize_schedule(
        &beta_path(beta),
        delta,
        1.0,
        Direction::Decreasing,
        f64::INFINITY,
    )
    .unwrap()
}

#[test]
fn schedules_follow_power_law_solution() {
    for beta in [1.0, 1.5, 2.0, 3.0] {
        for delta in [0.005, 0.01, 0.05] {
            let s = run(beta, delta);
            let mut worst: f64 = 0.0;
            for (&t, &g) in s.times.iter().zip(&s.gammas) {
                let exact = power_law_gamma(beta, TAU, delta, 1.0, t);
                worst = worst.max((g - exact).abs() / exact);
            }
            assert!(
                worst < 1e-5,
                "β = {beta}, δ = {delta}: worst relative error {worst}"
            );
        }
    }
}

#[test]
fn closed_form_matches_direct_solution() {
    for beta in [1.0, 1.5, 2.0, 3.0] {
        let p = BetaFamilyParams::new(beta, THETA0, TAU, 0.0).unwrap();
        let delta = 0.02;
        let t_cross = beta_crossing_time(&p, delta, 1.0);
        for k in 0..50 {
            let t = k as f64;
            let from_closed = match t_cross {
                Some(tc) => beta_closed_form(&p, delta, tc - t).unwrap().unwrap(),
                None => beta_closed_form(&p, delta, t).unwrap().unwrap(),
            };
            let direct = power_law_gamma(beta, TAU, delta, 1.0, t);
            assert!(
                (from_closed - direct).abs() <= 1e-12 * direct,
                "β = {beta}, t = {t}"
            );
        }
    }
}

#[test]
fn schedules_saturate_the_constraint() {
    for beta in [1.0, 1.5, 2.0, 3.0] {
        for delta in [0.005, 0.05] {
            let s = run(beta, delta);
            let path = beta_path(beta);
            let f = constraint_fraction(&path, &s);
            assert!(f >= 0.99, "β = {beta}, δ = {delta}: {f}");
            // the stored rates satisfy the identity exactly
            for (&g, &gdot) in s.gammas.iter().zip(&s.gamma_dots) {
                let p = path.point_at(g);
                let target = p.b * delta;
                assert!(
                    (path.derivative_at(g).drive_norm(p.theta) * gdot.abs() - target).abs()
                        <= 1e-9 * target
                );
            }
        }
    }
    let p = StirapParams::pulses(1.0, 1.0).unwrap();
    let path = StirapReducedPath::new(&p, 0.01).unwrap();
    let s = synthesize_schedule(&path, 0.01, 10.0, Direction::Decreasing, f64::INFINITY).unwrap();
    assert!(constraint_fraction(&path, &s) >= 0.99);
}

#[test]
fn classifier_separates_beta_family() {
    for beta in [0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 2.0, 4.0] {
        let v = classify_feasibility(&beta_path(beta), 0.01, 1.0).unwrap();
        let expected = if beta == 0.0 {
            FeasibilityKind::TriviallyAdiabatic
        } else if beta > 1.0 {
            FeasibilityKind::FeasibleFiniteTime
        } else {
            FeasibilityKind::InfeasibleInfiniteTime
        };
        assert_eq!(v.kind, expected, "β = {beta}");
        if expected == FeasibilityKind::FeasibleFiniteTime {
            let p = BetaFamilyParams::new(beta, THETA0, TAU, 0.0).unwrap();
            let exact = beta_crossing_time(&p, 0.01, 1.0).unwrap();
            assert!((v.crossing_time.unwrap() - exact).abs() < 1e-6 * exact);
        }
    }
}

#[test]
fn crossing_time_scales_inversely_with_delta() {
    for beta in [1.5, 2.0, 3.0] {
        let base = run(beta, 0.01).crossing_time.unwrap() * 0.01;
        for delta in [0.002, 0.005, 0.02, 0.05, 0.2] {
            let scaled = run(beta, delta).crossing_time.unwrap() * delta;
            assert!(
                (scaled - base).abs() <= 1e-8 * base,
                "β = {beta}, δ = {delta}"
            );
        }
    }
}

#[test]
fn crossing_time_is_reached_in_finite_time_only_above_one() {
    assert!(run(2.0, 0.01).reached_crossing);
    assert!(!run(1.0, 0.01).reached_crossing);
    assert_eq!(
        synthesize_schedule(&beta_path(0.0), 0.01, 1.0, Direction::Decreasing, 1.0).unwrap_err(),
        Error::TriviallyAdiabatic
    );
}
