//! Principal-branch complex dilogarithm and the functions built on it.
//!
//! Branch conventions: `log` has imaginary part in `(-pi, pi]`, and `Li2`
//! is cut along `[1, inf)`. A point exactly on the cut takes the value
//! approached from below (`arg(1 - z) = +pi`).

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use thiserror::Error;

/// `pi^2 / 6`, i.e. `Li2(1)`.
pub const ZETA2: f64 = PI * PI / 6.0;

/// Inputs larger than this are rejected; `1/z` would lose all precision.
const MAX_MODULUS: f64 = 1e300;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum DilogError {
    #[error("logarithm of zero")]
    LogOfZero,
    #[error("argument {0} is not finite or exceeds the supported range")]
    OutOfRange(Complex64),
    #[error("degenerate tetrahedron shape {0} (must avoid 0 and 1)")]
    Degenerate(Complex64),
}

/// Principal logarithm, `Im` in `(-pi, pi]`.
pub fn log_p(z: Complex64) -> Result<Complex64, DilogError> {
    if z.re == 0.0 && z.im == 0.0 {
        return Err(DilogError::LogOfZero);
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(DilogError::OutOfRange(z));
    }
    // atan2 returns -pi for (-x, -0.0); fold it onto +pi.
    let mut arg = z.im.atan2(z.re);
    if arg == -PI {
        arg = PI;
    }
    Ok(Complex64::new(z.norm().ln(), arg))
}

/// Argument in `(-pi, pi]`.
fn arg_p(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a == -PI {
        PI
    } else {
        a
    }
}

/// `B_{2k} / (2k+1)!` for k = 1..=N, from `B_{2k} = (-1)^{k+1} 2 (2k)! zeta(2k) / (2 pi)^{2k}`.
fn bernoulli_coefficients() -> &'static [f64; 24] {
    static COEFFS: OnceLock<[f64; 24]> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut out = [0.0; 24];
        let two_pi = 2.0 * PI;
        for (i, slot) in out.iter_mut().enumerate() {
            let k = i as i32 + 1;
            let zeta = match k {
                1 => ZETA2,
                2 => PI.powi(4) / 90.0,
                _ => {
                    // Tail beyond n terms is below n^(1-2k)/(2k-1).
                    let mut s = 0.0;
                    for n in (1..=4000u32).rev() {
                        s += (n as f64).powi(-2 * k);
                    }
                    s
                }
            };
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            *slot = sign * 2.0 * zeta / (two_pi.powi(2 * k) * (2 * k + 1) as f64);
        }
        out
    })
}

/// Taylor series, valid for `|z| <= 0.5`.
fn li2_series(z: Complex64) -> Complex64 {
    let mut term = z;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..=60u32 {
        let kf = k as f64;
        sum += term / (kf * kf);
        term *= z;
        if term.norm() < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
    }
    sum
}

/// Series in `u = -log(1 - z)`, valid for `|z| <= 1`, `Re z <= 1/2`.
fn li2_bernoulli(z: Complex64) -> Complex64 {
    let u = -(Complex64::new(1.0, 0.0) - z).ln();
    let u2 = u * u;
    let coeffs = bernoulli_coefficients();
    // u - u^2/4 + sum_k c_k u^(2k+1)
    let mut acc = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = acc * u2 + c;
    }
    u - u2 / 4.0 + acc * u2 * u
}

/// `Li2` for `|z| <= 1`.
fn li2_unit_disk(z: Complex64) -> Complex64 {
    if z.re > 0.5 {
        // Reflection; 1 - z lands in |w| <= 1, Re w < 1/2.
        let w = Complex64::new(1.0, 0.0) - z;
        if w.re == 0.0 && w.im == 0.0 {
            return Complex64::new(ZETA2, 0.0);
        }
        return Complex64::new(ZETA2, 0.0) - z.ln() * w.ln() - li2_small(w);
    }
    li2_small(z)
}

/// `Li2` for `|z| <= 1`, `Re z <= 1/2`.
fn li2_small(z: Complex64) -> Complex64 {
    if z.norm() <= 0.5 {
        li2_series(z)
    } else {
        li2_bernoulli(z)
    }
}

/// Principal-branch dilogarithm `Li2(z) = -int_0^z log(1-t)/t dt`.
pub fn li2(z: Complex64) -> Result<Complex64, DilogError> {
    if !z.re.is_finite() || !z.im.is_finite() || z.norm() > MAX_MODULUS {
        return Err(DilogError::OutOfRange(z));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if z.re == 1.0 && z.im == 0.0 {
        return Ok(Complex64::new(ZETA2, 0.0));
    }
    if z.norm() <= 1.0 {
        return Ok(li2_unit_disk(z));
    }
    // Inversion. With the principal log of -z this also reproduces the
    // below-the-cut value for real z > 1 (there -z = -x + 0i has arg +pi).
    let minus_z = Complex64::new(-z.re, -z.im);
    let l = log_p(minus_z)?;
    let inv = z.inv();
    Ok(Complex64::new(-ZETA2, 0.0) - 0.5 * l * l - li2_unit_disk(inv))
}

/// Bloch–Wigner function `D(z) = Im Li2(z) + arg(1 - z) ln|z|`.
///
/// `D(z)` is the signed hyperbolic volume of the ideal tetrahedron with
/// shape `z`.
pub fn bloch_wigner(z: Complex64) -> Result<f64, DilogError> {
    let one = Complex64::new(1.0, 0.0);
    if z == Complex64::new(0.0, 0.0) || z == one {
        return Err(DilogError::Degenerate(z));
    }
    let li = li2(z)?;
    Ok(li.im + arg_p(one - z) * z.norm().ln())
}

/// The function `L(u; p, q) = Li2(u) - pi^2/6 + q pi i log(u)/2 + log(1-u) (log u + p pi i)/2`
/// on flattened shapes.
pub fn lhat(u: Complex64, p: i64, q: i64) -> Result<Complex64, DilogError> {
    let one = Complex64::new(1.0, 0.0);
    if u == Complex64::new(0.0, 0.0) || u == one {
        return Err(DilogError::Degenerate(u));
    }
    let log_u = log_p(u)?;
    let log_1mu = log_p(one - u)?;
    let pi_i = Complex64::new(0.0, PI);
    Ok(li2(u)? - ZETA2 + 0.5 * (q as f64) * pi_i * log_u + 0.5 * log_1mu * (log_u + (p as f64) * pi_i))
}
