use std::f64::consts::PI;

use linkvol::potential::{complex_dist_mod, PotentialFunction, Tolerances};
use linkvol::solver::{newton, search, NewtonConfig, SearchConfig};
use linkvol::{parse_pd, twist_knot_diagram, twist_solutions, SideId};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FIG8: &str = "Q[1,6,2,7] Q[6,3,5,2] Q[8,4,7,5] Q[3,1,4,8]";
const FOUR_PI2: f64 = 4.0 * PI * PI;

fn random_z(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::from_polar(rng.random_range(-2.0f64..2.0).exp(), rng.random_range(-PI..PI))).collect()
}

/// Every twist-knot solution for n = 1..5 with its potential.
fn twist_points() -> Vec<(PotentialFunction, Vec<Complex64>)> {
    let tol = Tolerances::default();
    let mut out = Vec::new();
    for n in 1..=5 {
        let pf = PotentialFunction::build(&twist_knot_diagram(n).unwrap());
        for row in twist_solutions(n, &tol).unwrap().rows {
            out.push((pf.clone(), row.point.z));
        }
    }
    out
}

fn is_integer_multiple(d: Complex64, m: f64, tol: f64) -> bool {
    let q = d / m;
    (q.re - q.re.round()).abs() < tol && q.im.abs() < tol
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let potentials = [
        PotentialFunction::build(&parse_pd(FIG8).unwrap()),
        PotentialFunction::build(&twist_knot_diagram(3).unwrap()),
        PotentialFunction::build(&parse_pd(FIG8).unwrap().with_switched(&[0])),
    ];
    let h: f64 = 1e-6;
    for i in 0..100 {
        let pf = &potentials[i % potentials.len()];
        let z = random_z(&mut rng, pf.n());
        let grad = pf.log_derivatives(&z).unwrap();
        let scale = grad.iter().map(|g| g.norm()).fold(0.0, f64::max);
        for k in 0..pf.n() {
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[k] *= h.exp();
            zm[k] *= (-h).exp();
            let fd = (pf.eval_v(&zp).unwrap() - pf.eval_v(&zm).unwrap()) / (2.0 * h);
            let rel = (fd - grad[k]).norm() / scale;
            assert!(rel < 1e-5, "point {i}, side {}: fd {fd} vs {}", k + 1, grad[k]);
        }
    }
}

#[test]
fn log_derivatives_sum_to_zero_and_match_residuals() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let pf = PotentialFunction::build(&twist_knot_diagram(4).unwrap());
    for _ in 0..200 {
        let z = random_z(&mut rng, pf.n());
        let ld = pf.log_derivatives(&z).unwrap();
        let s: Complex64 = ld.iter().sum();
        assert!(is_integer_multiple(s, 2.0 * PI, 1e-12) && s.re.abs() < 1e-12, "sum {s}");
        let h = pf.h_residuals(&z).unwrap();
        for (l, hk) in ld.iter().zip(&h) {
            let e = l.exp();
            assert!((e - (hk + 1.0)).norm() < 1e-10 * (1.0 + e.norm()));
        }
        assert_eq!(ld[2], pf.log_derivative(&z, SideId(3)).unwrap());
    }
}

#[test]
fn scale_invariance_mod_four_pi_squared() {
    let pts = twist_points();
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let (pf, z) = &pts[rng.random_range(0..pts.len())];
        let lambda = Complex64::from_polar(rng.random_range(-3.0f64..3.0).exp(), rng.random_range(-PI..PI));
        let scaled: Vec<Complex64> = z.iter().map(|w| w * lambda).collect();
        let d = pf.eval_v0(&scaled, &tol).unwrap().v0 - pf.eval_v0(z, &tol).unwrap().v0;
        assert!(is_integer_multiple(d, FOUR_PI2, 1e-9), "lambda {lambda}: delta {d}");
    }
}

#[test]
fn shifted_log_branch_changes_v0_by_four_pi_squared() {
    let tol = Tolerances::default();
    let mut nontrivial = 0;
    for (pf, z) in twist_points() {
        let base = pf.eval_v0(&z, &tol).unwrap().v0;
        let r = pf.flattening(&z, tol.flat).unwrap();
        for k in 0..pf.n() {
            for m in [-2i64, -1, 1, 3] {
                let mut shifts = vec![0; pf.n()];
                shifts[k] = m;
                let d = pf.eval_v0_shifted(&z, &shifts, &tol).unwrap().v0 - base;
                assert!(is_integer_multiple(d, FOUR_PI2, 1e-9), "delta {d}");
                if r[k] != 0 {
                    assert!(d.norm() > 1.0);
                    nontrivial += 1;
                }
            }
        }
    }
    assert!(nontrivial > 0);
}

#[test]
fn flattening_is_even_and_balanced() {
    let tol = Tolerances::default();
    for (pf, z) in twist_points() {
        let r = pf.flattening(&z, tol.flat).unwrap();
        assert_eq!(r.iter().sum::<i64>(), 0, "{r:?}");
        assert!(r.iter().all(|k| k % 2 == 0));
    }
    let pf = PotentialFunction::build(&parse_pd(FIG8).unwrap());
    let (set, _) = search(&pf, &SearchConfig { n_starts: 64, ..Default::default() });
    assert!(!set.is_empty());
    for p in &set.points {
        assert_eq!(p.r.iter().sum::<i64>(), 0);
        assert!(p.r.iter().all(|k| k % 2 == 0));
    }
}

#[test]
fn frozen_flattening_of_first_twist_knot() {
    let rows = twist_solutions(1, &Tolerances::default()).unwrap().rows;
    assert_eq!(rows[0].point.r, vec![0; 8]);
    assert_eq!(rows[1].point.r, vec![0, 0, 0, 0, -2, 0, 0, 2]);
}

#[test]
fn conjugate_solution_has_conjugate_v0() {
    let tol = Tolerances::default();
    for (pf, z) in twist_points() {
        let zc: Vec<Complex64> = z.iter().map(|w| w.conj()).collect();
        assert!(pf.max_residual(&zc).unwrap() < 1e-11);
        let a = pf.eval_v0(&z, &tol).unwrap().v0;
        let b = pf.eval_v0(&zc, &tol).unwrap().v0;
        assert!(complex_dist_mod(b, a.conj(), FOUR_PI2) < 1e-9, "{a} {b}");
    }
}

#[test]
fn inverted_solution_solves_the_mirror() {
    let tol = Tolerances::default();
    for n in 1..=4 {
        let d = twist_knot_diagram(n).unwrap();
        let pf = PotentialFunction::build(&d);
        let pm = PotentialFunction::build(&d.mirror());
        for row in twist_solutions(n, &tol).unwrap().rows {
            let w: Vec<Complex64> = row.point.z.iter().map(|x| x.inv()).collect();
            assert!(pm.max_residual(&w).unwrap() < 1e-11);
            let a = pf.eval_v0(&row.point.z, &tol).unwrap().v0;
            let b = pm.eval_v0(&w, &tol).unwrap().v0;
            assert!(complex_dist_mod(b, -a, FOUR_PI2) < 1e-9, "{a} {b}");
        }
    }
}

#[test]
fn v0_is_constant_along_a_component() {
    let tol = Tolerances::default();
    for d in [parse_pd(FIG8).unwrap(), twist_knot_diagram(2).unwrap()] {
        let pf = PotentialFunction::build(&d);
        let (set, gauge) = search(&pf, &SearchConfig { n_starts: 64, ..Default::default() });
        let (p, rep) = set.geometric().unwrap();
        let v_ref = rep.v0;
        let moving = *gauge.pinned.keys().last().unwrap();
        assert_ne!(moving, SideId(1));
        let mut g = gauge.clone();
        let mut z = p.z.clone();
        let start = z[moving.index()];
        let cfg = NewtonConfig::default();
        for step in 1..=50 {
            let s = step as f64 / 50.0;
            let target = start * Complex64::from_polar(1.0 + 0.2 * s, 0.3 * s);
            g.pinned.insert(moving, target);
            z[moving.index()] = target;
            z = newton(&pf, &g, &z, &cfg).unwrap().z;
            let v = pf.eval_v0(&z, &tol).unwrap().v0;
            assert!(complex_dist_mod(v, v_ref, FOUR_PI2) < 1e-9, "step {step}: {v} vs {v_ref}");
        }
        assert!((z[moving.index()] - start).norm() > 0.1 * start.norm());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaling_preserves_residuals(
        mods in proptest::collection::vec(-2.0f64..2.0, 8),
        args in proptest::collection::vec(-3.1f64..3.1, 8),
        lm in -3.0f64..3.0,
        la in -3.1f64..3.1,
    ) {
        let pf = PotentialFunction::build(&parse_pd(FIG8).unwrap());
        let z: Vec<Complex64> = mods.iter().zip(&args).map(|(m, a)| Complex64::from_polar(m.exp(), *a)).collect();
        let lambda = Complex64::from_polar(lm.exp(), la);
        let zs: Vec<Complex64> = z.iter().map(|w| w * lambda).collect();
        let (h, hs) = (pf.h_residuals(&z).unwrap(), pf.h_residuals(&zs).unwrap());
        for (a, b) in h.iter().zip(&hs) {
            prop_assert!((a - b).norm() < 1e-9 * (1.0 + a.norm()));
        }
    }
}
