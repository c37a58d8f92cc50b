//! Exact solution family of the twist-knot equations, parametrized by a
//! root `t` of a single integer polynomial.
//!
//! With `a = 2`, `b = -1`, `y_{n+1} = 1` and `x_{n+1} = 3` fixed, the
//! remaining sides are rational functions of `t = x_0`:
//! `y_0 = (t+2)/t`, `x_1 = t(t+2)/(t^2-4t+8)`, `y_1 = 4/t`, and for `k >= 1`
//! `x_{k+1} = x_k y_k / (x_k + y_k - x_{k-1})`,
//! `y_{k+1} = x_k + y_k - x_k y_k / y_{k-1}`.
//! The last free equation reduces to `y_n (3t - 4) = 3t`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::intpoly::{IntPoly, RatFn};
use super::roots::univariate_roots;
use super::{SolutionSet, SolverError};
use crate::diagram::{twist_knot_diagram, TwistSides};
use crate::potential::{PotentialFunction, SolutionPoint, Tolerances, VolumeReport};

/// `x_k(t)` and `y_k(t)` for `k = 0..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistSequence {
    pub x: Vec<RatFn>,
    pub y: Vec<RatFn>,
}

fn p(c: &[i64]) -> IntPoly {
    IntPoly::from_i64s(c)
}

pub fn twist_sequence(n: usize) -> TwistSequence {
    let len = n.max(1) + 1;
    let mut x = Vec::with_capacity(len);
    let mut y = Vec::with_capacity(len);
    x.push(RatFn::poly(IntPoly::t()));
    y.push(RatFn::new(p(&[2, 1]), IntPoly::t()));
    x.push(RatFn::new(p(&[0, 2, 1]), p(&[8, -4, 1])));
    y.push(RatFn::new(p(&[4]), IntPoly::t()));
    for k in 1..len - 1 {
        let xy = x[k].mul(&y[k]);
        let xn = xy.div(&x[k].add(&y[k]).sub(&x[k - 1]));
        let yn = x[k].add(&y[k]).sub(&xy.div(&y[k - 1]));
        x.push(xn);
        y.push(yn);
    }
    x.truncate(n + 1);
    y.truncate(n + 1);
    TwistSequence { x, y }
}

fn check_n(n: i64) -> Result<usize, SolverError> {
    if n < 1 {
        Err(SolverError::BadTwistIndex(n))
    } else {
        Ok(n as usize)
    }
}

/// The polynomial whose roots are the admissible values of `t`, with
/// content 1 and positive leading coefficient.
pub fn twist_defining_polynomial(n: i64) -> Result<IntPoly, SolverError> {
    let n = check_n(n)?;
    let seq = twist_sequence(n);
    Ok(defining_polynomial_from(&seq, n))
}

fn defining_polynomial_from(seq: &TwistSequence, n: usize) -> IntPoly {
    let yn = &seq.y[n];
    let mut poly = (&(&yn.num * &p(&[-4, 3])) - &(&yn.den * &p(&[0, 3]))).primitive_part();
    let mut dens: Vec<&IntPoly> = seq.x.iter().chain(seq.y.iter()).map(|r| &r.den).collect();
    let t = IntPoly::t();
    dens.push(&t);
    for d in dens {
        loop {
            let g = poly.gcd(d);
            if g.degree().unwrap_or(0) == 0 {
                break;
            }
            poly = poly.div_exact(&g).expect("gcd divides");
        }
    }
    poly.normalized()
}

/// One admissible root together with its side vector and volume data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwistRow {
    pub t: Complex64,
    pub point: SolutionPoint,
    pub report: VolumeReport,
    pub max_residual: f64,
    pub geometric: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwistReport {
    pub n: usize,
    pub polynomial: IntPoly,
    pub sequence: TwistSequence,
    /// Sorted by decreasing volume; the first row is geometric.
    pub rows: Vec<TwistRow>,
}

impl TwistReport {
    pub fn solution_set(&self) -> SolutionSet {
        SolutionSet {
            points: self.rows.iter().map(|r| r.point.clone()).collect(),
            reports: self.rows.iter().map(|r| r.report).collect(),
            geometric_index: if self.rows.is_empty() { None } else { Some(0) },
        }
    }
}

/// Side vector of the twist-knot diagram at parameter `t`.
pub fn twist_point(seq: &TwistSequence, n: usize, t: Complex64) -> Vec<Complex64> {
    let s = TwistSides { n };
    let mut z = vec![Complex64::new(0.0, 0.0); 2 * (n + 3)];
    z[s.a().index()] = Complex64::new(2.0, 0.0);
    z[s.b().index()] = Complex64::new(-1.0, 0.0);
    for k in 0..=n {
        z[s.x(k).index()] = seq.x[k].eval(t);
        z[s.y(k).index()] = seq.y[k].eval(t);
    }
    z[s.x(n + 1).index()] = Complex64::new(3.0, 0.0);
    z[s.y(n + 1).index()] = Complex64::new(1.0, 0.0);
    z
}

/// Every root of the defining polynomial, verified against all equations
/// of H for the twist-knot diagram.
pub fn twist_solutions(n: i64, tol: &Tolerances) -> Result<TwistReport, SolverError> {
    let n = check_n(n)?;
    let seq = twist_sequence(n);
    let polynomial = defining_polynomial_from(&seq, n);
    let pf = PotentialFunction::build(&twist_knot_diagram(n as i64)?);
    let roots = univariate_roots(&polynomial)?;
    let mut rows = Vec::with_capacity(roots.len());
    for t in roots {
        let z = twist_point(&seq, n, t);
        let max_residual = pf.max_residual(&z)?;
        if max_residual > tol.solve {
            return Err(SolverError::Unverified { t, residual: max_residual });
        }
        let point = pf.solution_point(z, tol)?;
        if !point.essential {
            return Err(SolverError::NotEssential { t });
        }
        let report = pf.eval_v0(&point.z, tol)?;
        rows.push(TwistRow { t, point, report, max_residual, geometric: false });
    }
    rows.sort_by(|a, b| b.report.vol.total_cmp(&a.report.vol).then(b.t.im.total_cmp(&a.t.im)));
    if let Some(first) = rows.first_mut() {
        first.geometric = true;
    }
    Ok(TwistReport { n, polynomial, sequence: seq, rows })
}
