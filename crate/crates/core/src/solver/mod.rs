//! Solving the equation set H: the exact twist-knot family and a generic
//! multi-start Newton search.

pub mod intpoly;
pub mod roots;
pub mod search;
pub mod twist;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{DiagramError, SideId};
use crate::potential::{PotentialError, SolutionPoint, VolumeReport};

pub use intpoly::{IntPoly, RatFn};
pub use roots::{univariate_roots, RootError};
pub use search::{newton, search, GaugeSpec, NewtonConfig, SearchConfig};
pub use twist::{twist_defining_polynomial, twist_sequence, twist_solutions, TwistReport, TwistRow, TwistSequence};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("twist knot index must be at least 1, got {0}")]
    BadTwistIndex(i64),
    #[error("start value for pinned side {0} differs from the pinned constant")]
    PinViolated(SideId),
    #[error("Newton iteration did not converge (residual {residual:.3e})")]
    Diverged { residual: f64 },
    #[error("Newton converged to a non-essential point")]
    NonEssentialLimit,
    #[error("root t = {t} fails the full equation set (residual {residual:.3e})")]
    Unverified { t: Complex64, residual: f64 },
    #[error("root t = {t} gives a non-essential point")]
    NotEssential { t: Complex64 },
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// Distinct essential solutions with their volume data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub points: Vec<SolutionPoint>,
    pub reports: Vec<VolumeReport>,
    /// Index of the point with the largest `Im V0`.
    pub geometric_index: Option<usize>,
}

impl SolutionSet {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn geometric(&self) -> Option<(&SolutionPoint, &VolumeReport)> {
        self.geometric_index.map(|i| (&self.points[i], &self.reports[i]))
    }
}

/// Divide by the first coordinate.
pub fn projective_normalize(z: &[Complex64]) -> Vec<Complex64> {
    let s = z[0];
    z.iter().map(|w| w / s).collect()
}

/// Relative distance between the projective classes of `a` and `b`.
pub fn projective_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let (na, nb) = (projective_normalize(a), projective_normalize(b));
    na.iter().zip(&nb).map(|(x, y)| (x - y).norm() / (1.0 + x.norm().max(y.norm()))).fold(0.0, f64::max)
}
