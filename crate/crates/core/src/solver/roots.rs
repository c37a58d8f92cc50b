//! All complex roots of an integer polynomial: Aberth–Ehrlich iteration
//! followed by Newton polishing of each root.

use num_complex::Complex64;
use thiserror::Error;

use super::intpoly::{horner, IntPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootError {
    #[error("polynomial is zero or constant")]
    Degree,
    #[error("root iteration did not converge")]
    NoConvergence,
}

/// Roots sorted by real part, then imaginary part.
pub fn univariate_roots(p: &IntPoly) -> Result<Vec<Complex64>, RootError> {
    let deg = match p.degree() {
        Some(d) if d >= 1 => d,
        _ => return Err(RootError::Degree),
    };
    let c = p.to_f64();
    let lead = c[deg];
    let monic: Vec<f64> = c.iter().map(|v| v / lead).collect();
    let dc: Vec<f64> = (1..=deg).map(|i| monic[i] * i as f64).collect();

    // Initial guesses on a circle enclosing all roots (Cauchy bound),
    // rotated off the real axis.
    let bound = 1.0 + monic[..deg].iter().map(|v| v.abs()).fold(0.0, f64::max);
    let radius = bound.min(
        // Fujiwara-style tighter estimate
        2.0 * (0..deg).map(|i| monic[i].abs().powf(1.0 / (deg - i) as f64)).fold(0.0, f64::max),
    );
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius.max(1e-3), 0.4 + 2.0 * std::f64::consts::PI * k as f64 / deg as f64))
        .collect();

    let mut converged = false;
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..deg {
            let pv = horner(&monic, z[i]);
            let dv = horner(&dc, z[i]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dv;
            let s: Complex64 = (0..deg).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            z[i] -= w;
            max_step = max_step.max(w.norm() / z[i].norm().max(1.0));
        }
        if max_step < 1e-15 {
            converged = true;
            break;
        }
    }
    if !converged && z.iter().any(|&r| horner(&monic, r).norm() > 1e-8 * (1.0 + r.norm()).powi(deg as i32)) {
        return Err(RootError::NoConvergence);
    }

    for r in z.iter_mut() {
        *r = polish(&monic, &dc, *r);
    }
    // Real coefficients: an isolated root within rounding of the real axis
    // is real (a conjugate pair would show up as two nearby roots).
    let snapped: Vec<Complex64> = (0..deg)
        .map(|i| {
            let r = z[i];
            let isolated = (0..deg).all(|j| j == i || (z[j] - r).norm() > 1e-6 * r.norm().max(1.0));
            if isolated && r.im.abs() <= 1e-10 * r.norm().max(1.0) {
                polish(&monic, &dc, Complex64::new(r.re, 0.0))
            } else {
                r
            }
        })
        .collect();
    let mut z = snapped;
    z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(z)
}

/// Newton steps until the correction drops below `1e-14` relative.
fn polish(p: &[f64], dp: &[f64], mut z: Complex64) -> Complex64 {
    for _ in 0..50 {
        let d = horner(dp, z);
        if d.norm() == 0.0 {
            break;
        }
        let step = horner(p, z) / d;
        z -= step;
        if step.norm() <= 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    z
}
