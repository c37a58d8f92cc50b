//! The potential function of a diagram, its logarithmic derivatives, the
//! equation set H and the corrected potential V0.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{LinkDiagram, SideId};
use crate::dilog::{bloch_wigner, li2, log_p, DilogError};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `a / b`, moved onto the real axis when it lies within rounding of the
/// cut `(1, inf)`. Solutions with real parameters put ratios exactly on the
/// cut; this keeps `V` and the log-derivatives on one side of it regardless
/// of the overall scale of `z`.
fn ratio(a: Complex64, b: Complex64) -> Complex64 {
    let q = a / b;
    if q.re > 1.0 && q.im.abs() <= 1e-13 * q.re {
        Complex64::new(q.re, 0.0)
    } else {
        q
    }
}

/// `sign * Li2(z_num / z_den)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DilogTerm {
    pub sign: i8,
    pub num: SideId,
    pub den: SideId,
}

/// A factor `(1 - z_num/z_den)^exp` of one equation of H.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HFactor {
    pub num: usize,
    pub den: usize,
    pub exp: i32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialFunction {
    terms: Vec<DilogTerm>,
    n: usize,
    // per side, net exponents after formal cancellation
    factors: Vec<Vec<HFactor>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub solve: f64,
    pub flat: f64,
    pub ess: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { solve: 1e-12, flat: 1e-8, ess: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PotentialError {
    #[error("expected {expected} side values, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("side {0} has value zero or non-finite")]
    BadVariable(SideId),
    #[error("term z{num}/z{den} is degenerate at this point")]
    DegenerateRatio { num: SideId, den: SideId },
    #[error("flattening for side {side} is not an even integer multiple of pi*i: {value}")]
    Flattening { side: SideId, value: Complex64 },
    #[error(transparent)]
    Dilog(#[from] DilogError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionPoint {
    pub z: Vec<Complex64>,
    pub r: Vec<i64>,
    pub essential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeReport {
    pub v0: Complex64,
    pub vol: f64,
    pub cs: f64,
    /// Sum of signed Bloch–Wigner volumes of the tetrahedra, when computed.
    pub bw_volume: Option<f64>,
    /// Largest edge-class gluing residual, when computed.
    pub max_gluing_residual: Option<f64>,
}

/// Reduce `x` into `(-m/2, m/2]`.
pub fn reduce_mod(x: f64, m: f64) -> f64 {
    let mut y = x - m * (x / m).round();
    if y <= -m / 2.0 {
        y += m;
    } else if y > m / 2.0 {
        y -= m;
    }
    y
}

/// Distance from `a` to `b` modulo `m` (on the real line).
pub fn dist_mod(a: f64, b: f64, m: f64) -> f64 {
    reduce_mod(a - b, m).abs()
}

/// Distance between two complex values modulo `m` in the real part and
/// exactly in the imaginary part.
pub fn complex_dist_mod(a: Complex64, b: Complex64, m: f64) -> f64 {
    dist_mod(a.re, b.re, m).hypot(a.im - b.im)
}

impl PotentialFunction {
    /// Four terms per crossing `(a,b,c,d)`:
    /// `Li2(b/a) - Li2(b/c) + Li2(d/c) - Li2(d/a)`.
    pub fn build(d: &LinkDiagram) -> Self {
        let mut terms = Vec::with_capacity(4 * d.crossings().len());
        for c in d.crossings() {
            let [a, b, cc, dd] = c.quad;
            terms.push(DilogTerm { sign: 1, num: b, den: a });
            terms.push(DilogTerm { sign: -1, num: b, den: cc });
            terms.push(DilogTerm { sign: 1, num: dd, den: cc });
            terms.push(DilogTerm { sign: -1, num: dd, den: a });
        }
        Self::from_terms(terms, d.n_sides())
    }

    pub fn from_terms(terms: Vec<DilogTerm>, n: usize) -> Self {
        let mut acc: Vec<BTreeMap<(usize, usize), i32>> = vec![BTreeMap::new(); n];
        for t in &terms {
            let (i, j, s) = (t.num.index(), t.den.index(), t.sign as i32);
            *acc[i].entry((i, j)).or_default() -= s;
            *acc[j].entry((i, j)).or_default() += s;
        }
        let factors = acc
            .into_iter()
            .map(|m| {
                m.into_iter().filter(|&(_, e)| e != 0).map(|((num, den), exp)| HFactor { num, den, exp }).collect()
            })
            .collect();
        Self { terms, n, factors }
    }

    pub fn terms(&self) -> &[DilogTerm] {
        &self.terms
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Factors of the equation for side `k` (0-based).
    pub fn factors(&self, k: usize) -> &[HFactor] {
        &self.factors[k]
    }

    fn check(&self, z: &[Complex64]) -> Result<(), PotentialError> {
        if z.len() != self.n {
            return Err(PotentialError::Dimension { expected: self.n, got: z.len() });
        }
        for (k, w) in z.iter().enumerate() {
            if !(w.re.is_finite() && w.im.is_finite()) || w.norm() == 0.0 {
                return Err(PotentialError::BadVariable(SideId::from_index(k)));
            }
        }
        Ok(())
    }

    /// `V(z)`, principal branch.
    pub fn eval_v(&self, z: &[Complex64]) -> Result<Complex64, PotentialError> {
        self.check(z)?;
        let mut sum = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let r = ratio(z[t.num.index()], z[t.den.index()]);
            if !(r.re.is_finite() && r.im.is_finite()) || r.norm() == 0.0 {
                return Err(PotentialError::DegenerateRatio { num: t.num, den: t.den });
            }
            sum += f64::from(t.sign) * li2(r)?;
        }
        Ok(sum)
    }

    /// `z_k dV/dz_k`, principal branch of each `log(1 - ratio)`.
    pub fn log_derivative(&self, z: &[Complex64], k: SideId) -> Result<Complex64, PotentialError> {
        self.check(z)?;
        self.log_derivative_unchecked(z, k.index())
    }

    fn log_derivative_unchecked(&self, z: &[Complex64], k: usize) -> Result<Complex64, PotentialError> {
        let mut sum = Complex64::new(0.0, 0.0);
        for f in &self.factors[k] {
            let w = ONE - ratio(z[f.num], z[f.den]);
            let l = log_p(w).map_err(|_| PotentialError::DegenerateRatio {
                num: SideId::from_index(f.num),
                den: SideId::from_index(f.den),
            })?;
            sum += f64::from(f.exp) * l;
        }
        Ok(sum)
    }

    pub fn log_derivatives(&self, z: &[Complex64]) -> Result<Vec<Complex64>, PotentialError> {
        self.check(z)?;
        (0..self.n).map(|k| self.log_derivative_unchecked(z, k)).collect()
    }

    /// `exp(z_k dV/dz_k) - 1` for every side, evaluated as a product of
    /// rational factors.
    pub fn h_residuals(&self, z: &[Complex64]) -> Result<Vec<Complex64>, PotentialError> {
        self.check(z)?;
        let mut out = Vec::with_capacity(self.n);
        for k in 0..self.n {
            let mut p = ONE;
            for f in &self.factors[k] {
                let w = ONE - ratio(z[f.num], z[f.den]);
                if f.exp < 0 && w.norm() == 0.0 {
                    return Err(PotentialError::DegenerateRatio {
                        num: SideId::from_index(f.num),
                        den: SideId::from_index(f.den),
                    });
                }
                p *= w.powi(f.exp);
            }
            out.push(p - ONE);
        }
        Ok(out)
    }

    pub fn max_residual(&self, z: &[Complex64]) -> Result<f64, PotentialError> {
        Ok(self.h_residuals(z)?.iter().map(|h| h.norm()).fold(0.0, f64::max))
    }

    /// Residuals `h_k` and their Jacobian with respect to `log z_j`.
    pub fn residual_jacobian(&self, z: &[Complex64]) -> Result<(Vec<Complex64>, Vec<Vec<Complex64>>), PotentialError> {
        self.check(z)?;
        let mut h = Vec::with_capacity(self.n);
        let mut jac = vec![vec![Complex64::new(0.0, 0.0); self.n]; self.n];
        for k in 0..self.n {
            let mut p = ONE;
            let row = &mut jac[k];
            for f in &self.factors[k] {
                let r = z[f.num] / z[f.den];
                let w = ONE - r;
                if w.norm() == 0.0 {
                    return Err(PotentialError::DegenerateRatio {
                        num: SideId::from_index(f.num),
                        den: SideId::from_index(f.den),
                    });
                }
                p *= w.powi(f.exp);
                // d log(1 - r) / d log z_num = -r/(1-r); opposite for z_den
                let g = f64::from(f.exp) * r / w;
                row[f.num] -= g;
                row[f.den] += g;
            }
            for v in row.iter_mut() {
                *v *= p;
            }
            h.push(p - ONE);
        }
        Ok((h, jac))
    }

    /// True when every term ratio stays at least `tol` away from 0, 1 and
    /// infinity.
    pub fn is_essential(&self, z: &[Complex64], tol: f64) -> bool {
        if self.check(z).is_err() {
            return false;
        }
        self.terms.iter().all(|t| {
            let r = z[t.num.index()] / z[t.den.index()];
            r.re.is_finite() && r.im.is_finite() && r.norm() > tol && (r - ONE).norm() > tol && r.norm() < 1.0 / tol
        })
    }

    /// Flattening integers `r_k` with `z_k dV/dz_k = r_k pi i`.
    pub fn flattening(&self, z: &[Complex64], tol_flat: f64) -> Result<Vec<i64>, PotentialError> {
        let ld = self.log_derivatives(z)?;
        let mut r = Vec::with_capacity(self.n);
        for (k, l) in ld.iter().enumerate() {
            let rk = (l.im / PI).round();
            let err = (l - Complex64::new(0.0, rk * PI)).norm();
            if err > tol_flat || rk.rem_euclid(2.0) != 0.0 {
                return Err(PotentialError::Flattening { side: SideId::from_index(k), value: *l });
            }
            r.push(rk as i64);
        }
        Ok(r)
    }

    /// `V0 = V - sum_k r_k pi i log z_k`, with `vol = Im V0` and
    /// `cs = -Re V0` reduced into `(-pi^2/2, pi^2/2]`.
    pub fn eval_v0(&self, z: &[Complex64], tol: &Tolerances) -> Result<VolumeReport, PotentialError> {
        let r = self.flattening(z, tol.flat)?;
        self.eval_v0_with(z, &r, &vec![0; self.n])
    }

    /// `V0` computed with `log z_k` replaced by `log_p z_k + 2 pi i shifts[k]`.
    pub fn eval_v0_shifted(
        &self,
        z: &[Complex64],
        shifts: &[i64],
        tol: &Tolerances,
    ) -> Result<VolumeReport, PotentialError> {
        let r = self.flattening(z, tol.flat)?;
        self.eval_v0_with(z, &r, shifts)
    }

    fn eval_v0_with(&self, z: &[Complex64], r: &[i64], shifts: &[i64]) -> Result<VolumeReport, PotentialError> {
        let mut v0 = self.eval_v(z)?;
        for k in 0..self.n {
            let l = log_p(z[k])? + Complex64::new(0.0, 2.0 * PI * shifts[k] as f64);
            v0 -= Complex64::new(0.0, r[k] as f64 * PI) * l;
        }
        Ok(VolumeReport { v0, vol: v0.im, cs: reduce_mod(-v0.re, PI * PI), bw_volume: None, max_gluing_residual: None })
    }

    /// `sum sign * D(ratio)` over the terms; the tetrahedral volume sum
    /// written in the potential's own variables.
    pub fn term_volume(&self, z: &[Complex64]) -> Result<f64, PotentialError> {
        self.check(z)?;
        let mut s = 0.0;
        for t in &self.terms {
            s += f64::from(t.sign) * bloch_wigner(z[t.num.index()] / z[t.den.index()])?;
        }
        Ok(s)
    }

    /// Validate a solution: residuals, essentiality and flattening.
    pub fn solution_point(&self, z: Vec<Complex64>, tol: &Tolerances) -> Result<SolutionPoint, PotentialError> {
        let essential = self.is_essential(&z, tol.ess);
        let r = self.flattening(&z, tol.flat)?;
        Ok(SolutionPoint { z, r, essential })
    }
}
