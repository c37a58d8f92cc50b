//! Complex volumes of link complements computed from a diagram's
//! dilogarithm potential.

pub mod diagram;
pub mod dilog;
pub mod potential;
pub mod solver;
pub mod triangulation;
pub mod unionfind;

use num_complex::Complex64;
use thiserror::Error;

pub use diagram::{parse_pd, twist_knot_diagram, Crossing, DiagramError, LinkDiagram, SideId};
pub use dilog::{bloch_wigner, lhat, li2, log_p, DilogError};
pub use potential::{DilogTerm, PotentialError, PotentialFunction, SolutionPoint, Tolerances, VolumeReport};
pub use solver::{
    search, twist_defining_polynomial, twist_solutions, GaugeSpec, IntPoly, SearchConfig, SolutionSet, SolverError,
};
pub use triangulation::{EdgeLabel, Triangulation, TriangulationError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
}

/// `V0` at a solution together with the tetrahedral volume and the largest
/// edge gluing residual.
pub fn full_report(
    pf: &PotentialFunction,
    tri: &Triangulation,
    z: &[Complex64],
    tol: &Tolerances,
) -> Result<VolumeReport, Error> {
    let mut r = pf.eval_v0(z, tol)?;
    r.bw_volume = Some(tri.bw_volume(z)?);
    r.max_gluing_residual = Some(tri.max_gluing_residual(z)?);
    Ok(r)
}
