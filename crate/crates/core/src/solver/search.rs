//! Damped Gauss–Newton on the rational form of H, and a seeded multi-start
//! search with an adaptively learned gauge.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{projective_distance, SolutionSet, SolverError};
use crate::diagram::SideId;
use crate::potential::{PotentialFunction, SolutionPoint, Tolerances};

/// Coordinates held fixed, and equations left out of the Newton system.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GaugeSpec {
    pub pinned: BTreeMap<SideId, Complex64>,
    pub dropped_equations: BTreeSet<SideId>,
}

impl GaugeSpec {
    /// `z_1 = 1`, equation of the last side dropped.
    pub fn base(n: usize) -> Self {
        let mut g = GaugeSpec::default();
        g.pinned.insert(SideId(1), Complex64::new(1.0, 0.0));
        g.dropped_equations.insert(SideId::from_index(n - 1));
        g
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonConfig {
    pub max_iter: usize,
    pub tol: Tolerances,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self { max_iter: 100, tol: Tolerances::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n_starts: usize,
    pub seed: u64,
    pub radius: f64,
    pub newton: NewtonConfig,
    /// Projective distance below which two solutions are identified.
    pub tol_dedupe: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { n_starts: 500, seed: 0, radius: 10.0, newton: NewtonConfig::default(), tol_dedupe: 1e-6 }
    }
}

/// A converged run, with the columns (free coordinates) along which the
/// solution is not isolated.
#[derive(Debug, Clone)]
pub(crate) struct Converged {
    pub point: SolutionPoint,
    pub flat_columns: Vec<usize>,
}

fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|h| h.norm()).fold(0.0, f64::max)
}

fn residual_norm(pf: &PotentialFunction, z: &[Complex64], eqs: &[usize]) -> Option<f64> {
    let h = pf.h_residuals(z).ok()?;
    let s: f64 = eqs.iter().map(|&k| h[k].norm_sqr()).sum();
    s.is_finite().then_some(s.sqrt())
}

/// Reduced Jacobian (selected equations by free columns).
fn reduced(
    pf: &PotentialFunction,
    z: &[Complex64],
    eqs: &[usize],
    free: &[usize],
) -> Result<(DVector<Complex64>, DMatrix<Complex64>), SolverError> {
    let (h, jac) = pf.residual_jacobian(z)?;
    let hv = DVector::from_iterator(eqs.len(), eqs.iter().map(|&k| h[k]));
    let jm = DMatrix::from_fn(eqs.len(), free.len(), |i, j| jac[eqs[i]][free[j]]);
    Ok((hv, jm))
}

/// Free columns to pin so that the remaining columns of `j` are
/// independent; greedy column-pivoted Gram–Schmidt.
fn dependent_columns(j: &DMatrix<Complex64>) -> Vec<usize> {
    let scale = j.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    let mut cols: Vec<DVector<Complex64>> = (0..j.ncols()).map(|c| j.column(c).into_owned()).collect();
    let mut remaining: Vec<usize> = (0..j.ncols()).collect();
    let mut chosen = Vec::new();
    loop {
        let Some((pos, &best)) =
            remaining.iter().enumerate().max_by(|a, b| cols[*a.1].norm().total_cmp(&cols[*b.1].norm()))
        else {
            break;
        };
        if cols[best].norm() <= 1e-7 * scale {
            break;
        }
        remaining.remove(pos);
        chosen.push(best);
        let q = cols[best].normalize();
        for &c in &remaining {
            let proj = q.dotc(&cols[c]);
            cols[c] -= &q * proj;
        }
    }
    remaining.sort_unstable();
    remaining
}

pub(crate) fn newton_run(
    pf: &PotentialFunction,
    gauge: &GaugeSpec,
    start: &[Complex64],
    cfg: &NewtonConfig,
) -> Result<Converged, SolverError> {
    let n = pf.n();
    for (&s, &v) in &gauge.pinned {
        if start.get(s.index()).is_none_or(|&w| (w - v).norm() > 1e-12 * (1.0 + v.norm())) {
            return Err(SolverError::PinViolated(s));
        }
    }
    let free: Vec<usize> = (0..n).filter(|k| !gauge.pinned.contains_key(&SideId::from_index(*k))).collect();
    let eqs: Vec<usize> = (0..n).filter(|k| !gauge.dropped_equations.contains(&SideId::from_index(*k))).collect();

    let mut z = start.to_vec();
    let mut norm = residual_norm(pf, &z, &eqs).ok_or(SolverError::Diverged { residual: f64::INFINITY })?;
    for iter in 0..=cfg.max_iter {
        let full = pf.h_residuals(&z)?;
        if max_abs(&full) < cfg.tol.solve {
            if !pf.is_essential(&z, cfg.tol.ess) {
                return Err(SolverError::NonEssentialLimit);
            }
            let (_, jm) = reduced(pf, &z, &eqs, &free)?;
            let flat_columns = dependent_columns(&jm).into_iter().map(|c| free[c]).collect();
            let point = pf.solution_point(z, &cfg.tol)?;
            return Ok(Converged { point, flat_columns });
        }
        if iter == cfg.max_iter {
            break;
        }
        let (hv, jm) = reduced(pf, &z, &eqs, &free)?;
        let finite = |v: &Complex64| v.re.is_finite() && v.im.is_finite();
        if !hv.iter().all(finite) || !jm.iter().all(finite) {
            return Err(SolverError::Diverged { residual: norm });
        }
        let svd = jm.try_svd(true, true, f64::EPSILON, 1000).ok_or(SolverError::Diverged { residual: norm })?;
        let smax = svd.singular_values.max();
        let step = svd.solve(&(-hv), 1e-13 * smax.max(1e-300)).map_err(|_| SolverError::Diverged { residual: norm })?;

        // backtracking on the residual norm
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let mut trial = z.clone();
            for (j, &c) in free.iter().enumerate() {
                trial[c] *= (step[j] * alpha).exp();
            }
            if let Some(tn) = residual_norm(pf, &trial, &eqs) {
                if tn < norm || accepted.is_none() && alpha < 1e-6 {
                    accepted = Some((trial, tn));
                    break;
                }
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((trial, tn)) => {
                z = trial;
                norm = tn;
            }
            None => return Err(SolverError::Diverged { residual: norm }),
        }
        if z.iter().any(|w| !(w.norm() > 1e-150 && w.norm() < 1e150)) {
            return Err(SolverError::Diverged { residual: norm });
        }
    }
    Err(SolverError::Diverged { residual: norm })
}

/// Newton's method restricted to the free coordinates of `gauge`.
pub fn newton(
    pf: &PotentialFunction,
    gauge: &GaugeSpec,
    start: &[Complex64],
    cfg: &NewtonConfig,
) -> Result<SolutionPoint, SolverError> {
    newton_run(pf, gauge, start, cfg).map(|c| c.point)
}

/// Start `index` of a seeded search: log-uniform modulus in
/// `[1/radius, radius]`, uniform argument.
pub fn start_point(n: usize, gauge: &GaugeSpec, seed: u64, index: u64, radius: f64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let lr = radius.ln();
    (0..n)
        .map(|k| {
            let m = (rng.random_range(-1.0..=1.0) * lr).exp();
            let a = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            let w = Complex64::from_polar(m, a);
            gauge.pinned.get(&SideId::from_index(k)).copied().unwrap_or(w)
        })
        .collect()
}

fn run_batch(
    pf: &PotentialFunction,
    gauge: &GaugeSpec,
    cfg: &SearchConfig,
    range: std::ops::Range<usize>,
) -> Vec<Option<Converged>> {
    range
        .into_par_iter()
        .map(|i| {
            let start = start_point(pf.n(), gauge, cfg.seed, i as u64, cfg.radius);
            newton_run(pf, gauge, &start, &cfg.newton).ok()
        })
        .collect()
}

/// Learn a gauge from the first converged start, then run every start
/// under it and keep the distinct essential solutions.
pub fn search(pf: &PotentialFunction, cfg: &SearchConfig) -> (SolutionSet, GaugeSpec) {
    let base = GaugeSpec::base(pf.n());
    let mut gauge = base.clone();
    let mut first_pass: Vec<Option<Converged>> = Vec::new();
    let chunk = 32;
    let mut lo = 0;
    while lo < cfg.n_starts {
        let hi = (lo + chunk).min(cfg.n_starts);
        let batch = run_batch(pf, &base, cfg, lo..hi);
        let found = batch.iter().flatten().next().cloned();
        first_pass.extend(batch);
        lo = hi;
        if let Some(c) = found {
            for k in c.flat_columns {
                gauge.pinned.insert(SideId::from_index(k), c.point.z[k]);
            }
            break;
        }
    }

    let results = if gauge == base {
        first_pass.extend(run_batch(pf, &gauge, cfg, lo..cfg.n_starts));
        first_pass
    } else {
        run_batch(pf, &gauge, cfg, 0..cfg.n_starts)
    };

    let mut points: Vec<SolutionPoint> = Vec::new();
    for c in results.into_iter().flatten() {
        if !c.point.essential {
            continue;
        }
        if points.iter().all(|p| projective_distance(&p.z, &c.point.z) > cfg.tol_dedupe) {
            points.push(c.point);
        }
    }
    let mut reports = Vec::with_capacity(points.len());
    let mut kept = Vec::with_capacity(points.len());
    for p in points {
        if let Ok(r) = pf.eval_v0(&p.z, &cfg.newton.tol) {
            reports.push(r);
            kept.push(p);
        }
    }
    let geometric_index = reports.iter().enumerate().max_by(|a, b| a.1.vol.total_cmp(&b.1.vol)).map(|(i, _)| i);
    (SolutionSet { points: kept, reports, geometric_index }, gauge)
}
