//! Octahedral ideal triangulation of a link complement with two extra
//! points removed: one octahedron per crossing, split into four
//! tetrahedra around the axis `EF`.
//!
//! Octahedron vertices `A, B, C, D` sit at the four sides of the crossing
//! (in the quad order, so `A` and `C` are on the over-strand), `E` below and
//! `F` above. Every tetrahedron lists its vertices as `E, F, A|C, B|D`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{LinkDiagram, SideId};
use crate::dilog::{bloch_wigner, log_p, DilogError};
use crate::unionfind::UnionFind;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Local vertex pairs of a tetrahedron, indexed by slot.
pub const EDGE_SLOTS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

pub fn slot_of(i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    EDGE_SLOTS.iter().position(|&s| s == (a, b)).expect("distinct local vertices")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OctVertex {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl OctVertex {
    fn equator(p: usize) -> Self {
        [OctVertex::A, OctVertex::B, OctVertex::C, OctVertex::D][p % 4]
    }

    /// Position of the vertex in the tetrahedron's local order.
    pub fn tag(self) -> usize {
        match self {
            OctVertex::E => 0,
            OctVertex::F => 1,
            OctVertex::A | OctVertex::C => 2,
            OctVertex::B | OctVertex::D => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Corner {
    AB,
    BC,
    CD,
    DA,
}

impl Corner {
    const ALL: [Corner; 4] = [Corner::AB, Corner::BC, Corner::CD, Corner::DA];

    /// Equator positions `(p, p+1)` spanned by the corner.
    pub fn positions(self) -> (usize, usize) {
        let p = self as usize;
        (p, (p + 1) % 4)
    }

    pub fn sign(self) -> i8 {
        match self {
            Corner::AB | Corner::CD => 1,
            Corner::BC | Corner::DA => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tetrahedron {
    pub crossing: usize,
    pub corner: Corner,
    pub sign: i8,
    /// Shape ratio `z_num / z_den` on the horizontal edge.
    pub shape: (SideId, SideId),
    pub vertices: [OctVertex; 4],
}

impl Tetrahedron {
    fn local(&self, v: OctVertex) -> Option<usize> {
        self.vertices.iter().position(|&w| w == v)
    }
}

/// Which of `u`, `u' = 1/(1-u)`, `u'' = 1 - 1/u` sits on an edge slot,
/// where `u` is the tetrahedron's shape ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShapeRole {
    U,
    UPrime,
    UDoublePrime,
}

impl ShapeRole {
    pub fn apply(self, u: Complex64) -> Complex64 {
        match self {
            ShapeRole::U => u,
            ShapeRole::UPrime => (ONE - u).inv(),
            ShapeRole::UDoublePrime => ONE - u.inv(),
        }
    }
}

/// Role of `slot` in a tetrahedron with orientation sign `sign`. Opposite
/// slots share a role.
pub fn shape_of_edge_slot(sign: i8, slot: usize) -> ShapeRole {
    match (EDGE_SLOTS[slot], sign > 0) {
        ((0, 1), _) | ((2, 3), _) => ShapeRole::U,
        ((0, 3), true) | ((1, 2), true) | ((0, 2), false) | ((1, 3), false) => ShapeRole::UPrime,
        _ => ShapeRole::UDoublePrime,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeLabel {
    /// Horizontal edges.
    A,
    /// Classes through `BF`, `DF`, `AE` or `CE`.
    B,
    /// Axes `EF`.
    C,
    D,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeClass {
    /// `(tetrahedron, edge slot)`.
    pub members: Vec<(usize, usize)>,
    pub label: EdgeLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacePairing {
    /// `(tetrahedron, local vertex opposite the face)`.
    pub a: (usize, usize),
    pub b: (usize, usize),
    /// Image in `b` of each local vertex of `a` (`None` at the opposite vertex).
    pub map: [Option<usize>; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VertexClass {
    MinusInfinity,
    PlusInfinity,
    /// Link component (0-based).
    Cusp(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TriangulationError {
    #[error("face {face} of tetrahedron {tet} is glued {count} times")]
    Unglued { tet: usize, face: usize, count: usize },
    #[error("edge identifications reverse an edge")]
    EdgeOrientation,
    #[error("vertices of different kinds are identified")]
    VertexClasses,
    #[error("expected {expected} side values, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error(transparent)]
    Dilog(#[from] DilogError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Triangulation {
    pub tetrahedra: Vec<Tetrahedron>,
    pub face_pairings: Vec<FacePairing>,
    pub edge_classes: Vec<EdgeClass>,
    /// Class of vertex `(crossing, OctVertex)` stored per crossing in the
    /// order `A, B, C, D, E, F`.
    pub vertex_classes: Vec<[VertexClass; 6]>,
    pub n_face_classes: usize,
    pub n_vertex_classes: usize,
}

/// Counts for a quick summary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub tetrahedra: usize,
    pub face_classes: usize,
    pub edge_classes: usize,
    pub vertex_classes: usize,
    pub edge_labels: BTreeMap<EdgeLabel, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluingResidual {
    pub class: usize,
    pub label: EdgeLabel,
    /// `|prod - 1|`.
    pub residual: f64,
    /// Sum of principal logs of the edge parameters.
    pub log_sum: Complex64,
}

fn oct_index(v: OctVertex) -> usize {
    v as usize
}

impl Triangulation {
    pub fn build(d: &LinkDiagram) -> Result<Self, TriangulationError> {
        let nc = d.crossings().len();
        let mut tetrahedra = Vec::with_capacity(4 * nc);
        for (k, c) in d.crossings().iter().enumerate() {
            for corner in Corner::ALL {
                let (p, q) = corner.positions();
                let (even, odd) = if p % 2 == 0 { (p, q) } else { (q, p) };
                tetrahedra.push(Tetrahedron {
                    crossing: k,
                    corner,
                    sign: corner.sign(),
                    shape: (c.quad[q], c.quad[p]),
                    vertices: [OctVertex::E, OctVertex::F, OctVertex::equator(even), OctVertex::equator(odd)],
                });
            }
        }
        let tet_of = |k: usize, p: usize| 4 * k + p % 4;
        // face of a tetrahedron containing the three octahedron vertices
        let face = |t: usize, vs: [OctVertex; 3]| -> (usize, [usize; 3]) {
            let tet = &tetrahedra[t];
            let locals = vs.map(|v| tet.local(v).expect("vertex in tetrahedron"));
            let opposite = (0..4).find(|i| !locals.contains(i)).expect("three of four");
            (opposite, locals)
        };

        let mut face_pairings = Vec::with_capacity(8 * nc);
        let mut pair = |ta: usize, va: [OctVertex; 3], tb: usize, vb: [OctVertex; 3]| {
            let (fa, la) = face(ta, va);
            let (fb, lb) = face(tb, vb);
            let mut map = [None; 4];
            for i in 0..3 {
                map[la[i]] = Some(lb[i]);
            }
            face_pairings.push(FacePairing { a: (ta, fa), b: (tb, fb), map });
        };

        // Interior faces EFX shared by the two tetrahedra around X.
        for k in 0..nc {
            for p in 0..4 {
                let x = OctVertex::equator(p);
                pair(tet_of(k, p + 3), [OctVertex::E, OctVertex::F, x], tet_of(k, p), [OctVertex::E, OctVertex::F, x]);
            }
        }

        // Exterior faces along each side: under ends use E, over ends F.
        // The face toward the next side at one end meets the face toward the
        // previous side at the other; vertices match by kind.
        for [(k1, p1), (k2, p2)] in d.side_ends() {
            let pole = |p: usize| if p % 2 == 1 { OctVertex::E } else { OctVertex::F };
            let (x, y) = (OctVertex::equator(p1), OctVertex::equator(p2));
            let (x_next, x_prev) = (OctVertex::equator(p1 + 1), OctVertex::equator(p1 + 3));
            let (y_next, y_prev) = (OctVertex::equator(p2 + 1), OctVertex::equator(p2 + 3));
            // kind-preserving order: pole, A|C, B|D
            let order = |pole: OctVertex, u: OctVertex, v: OctVertex| {
                if u.tag() == 2 {
                    [pole, u, v]
                } else {
                    [pole, v, u]
                }
            };
            pair(tet_of(k1, p1), order(pole(p1), x, x_next), tet_of(k2, p2 + 3), order(pole(p2), y, y_prev));
            pair(tet_of(k1, p1 + 3), order(pole(p1), x, x_prev), tet_of(k2, p2), order(pole(p2), y, y_next));
        }

        let n_tet = tetrahedra.len();
        let mut glued = vec![0usize; 4 * n_tet];
        for fp in &face_pairings {
            glued[4 * fp.a.0 + fp.a.1] += 1;
            glued[4 * fp.b.0 + fp.b.1] += 1;
        }
        if let Some(i) = glued.iter().position(|&g| g != 1) {
            return Err(TriangulationError::Unglued { tet: i / 4, face: i % 4, count: glued[i] });
        }

        let mut faces = UnionFind::new(4 * n_tet);
        let mut edges = UnionFind::new(6 * n_tet);
        let mut verts = UnionFind::new(6 * nc);
        for fp in &face_pairings {
            faces.union(4 * fp.a.0 + fp.a.1, 4 * fp.b.0 + fp.b.1);
            let (ta, tb) = (&tetrahedra[fp.a.0], &tetrahedra[fp.b.0]);
            let locals: Vec<usize> = (0..4).filter(|&i| i != fp.a.1).collect();
            for &i in &locals {
                let j = fp.map[i].expect("face vertex");
                verts.union(6 * ta.crossing + oct_index(ta.vertices[i]), 6 * tb.crossing + oct_index(tb.vertices[j]));
            }
            for (x, &i) in locals.iter().enumerate() {
                for &j in &locals[x + 1..] {
                    let (mi, mj) = (fp.map[i].unwrap(), fp.map[j].unwrap());
                    edges
                        .union_oriented(6 * fp.a.0 + slot_of(i, j), 6 * fp.b.0 + slot_of(mi, mj), (i < j) != (mi < mj))
                        .map_err(|_| TriangulationError::EdgeOrientation)?;
                }
            }
        }
        // Twist: BF ~ DF and AE ~ CE inside each octahedron.
        for k in 0..nc {
            let (ab, cd) = (tet_of(k, 0), tet_of(k, 2));
            for (v, w, pole) in [(OctVertex::B, OctVertex::D, OctVertex::F), (OctVertex::A, OctVertex::C, OctVertex::E)]
            {
                let (tv, tw) = (&tetrahedra[ab], &tetrahedra[cd]);
                let sv = slot_of(tv.local(v).unwrap(), tv.local(pole).unwrap());
                let sw = slot_of(tw.local(w).unwrap(), tw.local(pole).unwrap());
                edges
                    .union_oriented(6 * ab + sv, 6 * cd + sw, false)
                    .map_err(|_| TriangulationError::EdgeOrientation)?;
            }
        }

        let (edge_of, n_edges) = edges.classes();
        let mut edge_classes: Vec<EdgeClass> =
            (0..n_edges).map(|_| EdgeClass { members: Vec::new(), label: EdgeLabel::D }).collect();
        for (i, &c) in edge_of.iter().enumerate() {
            edge_classes[c].members.push((i / 6, i % 6));
        }
        for class in &mut edge_classes {
            let has = |s: &[(usize, usize)]| class.members.iter().any(|&(_, m)| s.contains(&EDGE_SLOTS[m]));
            class.label = if has(&[(2, 3)]) {
                EdgeLabel::A
            } else if has(&[(0, 1)]) {
                EdgeLabel::C
            } else if has(&[(0, 2), (1, 3)]) {
                EdgeLabel::B
            } else {
                EdgeLabel::D
            };
        }

        let n_face_classes = faces.classes().1;
        let (vert_of, n_vertex_classes) = verts.classes();
        let mut strand = UnionFind::new(d.n_sides());
        for c in d.crossings() {
            strand.union(c.quad[0].index(), c.quad[2].index());
            strand.union(c.quad[1].index(), c.quad[3].index());
        }
        let (component_of, _) = strand.classes();
        // A/C -> -inf, B/D -> +inf, E -> under-strand component, F -> over-strand component.
        let mut names: BTreeMap<usize, VertexClass> = BTreeMap::new();
        let mut vertex_classes = Vec::with_capacity(nc);
        for (k, c) in d.crossings().iter().enumerate() {
            let mut row = [VertexClass::MinusInfinity; 6];
            for (i, v) in [OctVertex::A, OctVertex::B, OctVertex::C, OctVertex::D, OctVertex::E, OctVertex::F]
                .into_iter()
                .enumerate()
            {
                let want = match v {
                    OctVertex::A | OctVertex::C => VertexClass::MinusInfinity,
                    OctVertex::B | OctVertex::D => VertexClass::PlusInfinity,
                    OctVertex::E => VertexClass::Cusp(component_of[c.quad[1].index()]),
                    OctVertex::F => VertexClass::Cusp(component_of[c.quad[0].index()]),
                };
                let cls = vert_of[6 * k + i];
                let name = *names.entry(cls).or_insert(want);
                if name != want {
                    return Err(TriangulationError::VertexClasses);
                }
                row[i] = name;
            }
            vertex_classes.push(row);
        }

        Ok(Self { tetrahedra, face_pairings, edge_classes, vertex_classes, n_face_classes, n_vertex_classes })
    }

    pub fn census(&self) -> Census {
        let mut edge_labels = BTreeMap::new();
        for l in [EdgeLabel::A, EdgeLabel::B, EdgeLabel::C, EdgeLabel::D] {
            edge_labels.insert(l, 0);
        }
        for c in &self.edge_classes {
            *edge_labels.entry(c.label).or_insert(0) += 1;
        }
        Census {
            tetrahedra: self.tetrahedra.len(),
            face_classes: self.n_face_classes,
            edge_classes: self.edge_classes.len(),
            vertex_classes: self.n_vertex_classes,
            edge_labels,
        }
    }

    fn raw_shape(&self, t: usize, z: &[Complex64]) -> Complex64 {
        let (num, den) = self.tetrahedra[t].shape;
        z[num.index()] / z[den.index()]
    }

    /// Edge parameter of `slot` in tetrahedron `t` at `z`.
    pub fn edge_parameter(&self, t: usize, slot: usize, z: &[Complex64]) -> Complex64 {
        shape_of_edge_slot(self.tetrahedra[t].sign, slot).apply(self.raw_shape(t, z))
    }

    fn check(&self, z: &[Complex64]) -> Result<(), TriangulationError> {
        let n = 2 * self.vertex_classes.len();
        if z.len() != n {
            return Err(TriangulationError::Dimension { expected: n, got: z.len() });
        }
        Ok(())
    }

    /// `|prod - 1|` of the edge parameters around every edge class.
    pub fn gluing_residuals(&self, z: &[Complex64]) -> Result<Vec<GluingResidual>, TriangulationError> {
        self.check(z)?;
        self.edge_classes
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mut prod = ONE;
                let mut log_sum = Complex64::new(0.0, 0.0);
                for &(t, s) in &c.members {
                    let u = self.raw_shape(t, z);
                    if u == ONE || u.norm() == 0.0 || !u.re.is_finite() || !u.im.is_finite() {
                        return Err(TriangulationError::Dilog(DilogError::Degenerate(u)));
                    }
                    let p = self.edge_parameter(t, s, z);
                    prod *= p;
                    log_sum += log_p(p)?;
                }
                Ok(GluingResidual { class: i, label: c.label, residual: (prod - ONE).norm(), log_sum })
            })
            .collect()
    }

    pub fn max_gluing_residual(&self, z: &[Complex64]) -> Result<f64, TriangulationError> {
        Ok(self.gluing_residuals(z)?.iter().map(|r| r.residual).fold(0.0, f64::max))
    }

    /// `sum sigma * D(u^sigma)` over the tetrahedra.
    pub fn bw_volume(&self, z: &[Complex64]) -> Result<f64, TriangulationError> {
        self.check(z)?;
        let mut v = 0.0;
        for (t, tet) in self.tetrahedra.iter().enumerate() {
            let u = self.raw_shape(t, z);
            let us = if tet.sign > 0 { u } else { u.inv() };
            v += f64::from(tet.sign) * bloch_wigner(us)?;
        }
        Ok(v)
    }
}
