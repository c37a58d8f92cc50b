//! Link diagrams as crossing quadruples over side labels.
//!
//! A crossing is stored as the four incident sides listed counterclockwise,
//! with the over-strand in positions 0 and 2. The two readings that differ by
//! a half turn describe the same crossing; the lexicographically smaller one
//! is kept.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::unionfind::UnionFind;

/// A side of the diagram: an arc between two adjacent crossing points.
/// Labels are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SideId(pub u32);

impl SideId {
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_index(i: usize) -> Self {
        SideId(i as u32 + 1)
    }
}

impl fmt::Display for SideId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Crossing {
    pub id: usize,
    /// `(a, b, c, d)` counterclockwise; `a`-`c` is the over-strand.
    pub quad: [SideId; 4],
}

impl Crossing {
    pub fn new(id: usize, quad: [SideId; 4]) -> Self {
        Self { id, quad: canonical_quad(quad) }
    }

    pub fn is_over(position: usize) -> bool {
        position.is_multiple_of(2)
    }

    /// Positions (0..4) at which `side` is attached.
    pub fn positions_of(&self, side: SideId) -> impl Iterator<Item = usize> + '_ {
        (0..4).filter(move |&p| self.quad[p] == side)
    }
}

/// The smaller of `(a,b,c,d)` and its half-turn `(c,d,a,b)`.
pub fn canonical_quad(q: [SideId; 4]) -> [SideId; 4] {
    let rotated = [q[2], q[3], q[0], q[1]];
    if rotated < q {
        rotated
    } else {
        q
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("line {line}: malformed record `{text}`")]
    Malformed { line: usize, text: String },
    #[error("diagram has no crossings")]
    Empty,
    #[error("side label {label} is out of range 1..={max}")]
    LabelOutOfRange { label: u32, max: u32 },
    #[error("side {side} appears {count} times; every side must appear exactly twice")]
    Multiplicity { side: u32, count: usize },
    #[error(
        "crossing {crossing} has a kink on side {side}; remove it with a Reidemeister I move \
         (delete the loop and merge the two sides) before loading"
    )]
    Kink { crossing: usize, side: u32 },
    #[error("diagram is disconnected (split); only non-split diagrams are supported")]
    Disconnected,
    #[error("twist knot index must be at least 1, got {0}")]
    BadTwistIndex(i64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkDiagram {
    crossings: Vec<Crossing>,
    n_sides: usize,
    n_components: usize,
}

impl LinkDiagram {
    /// Validate and canonicalize a list of quadruples (already in the
    /// over-strand-at-0/2 convention).
    pub fn from_quads(quads: &[[u32; 4]]) -> Result<Self, DiagramError> {
        if quads.is_empty() {
            return Err(DiagramError::Empty);
        }
        let n_sides = 2 * quads.len();
        let max = n_sides as u32;
        let mut counts = vec![0usize; n_sides];
        for q in quads {
            for &label in q {
                if label == 0 || label > max {
                    return Err(DiagramError::LabelOutOfRange { label, max });
                }
                counts[label as usize - 1] += 1;
            }
        }
        if let Some((i, &count)) = counts.iter().enumerate().find(|(_, &c)| c != 2) {
            return Err(DiagramError::Multiplicity { side: i as u32 + 1, count });
        }
        let crossings: Vec<Crossing> =
            quads.iter().enumerate().map(|(id, q)| Crossing::new(id, q.map(SideId))).collect();
        for c in &crossings {
            for p in 0..4 {
                if c.quad[p] == c.quad[(p + 1) % 4] {
                    return Err(DiagramError::Kink { crossing: c.id + 1, side: c.quad[p].0 });
                }
            }
        }

        // Connectivity of the 4-valent graph: crossings joined by shared sides.
        let mut first_seen: Vec<Option<usize>> = vec![None; n_sides];
        let mut graph = UnionFind::new(crossings.len());
        for c in &crossings {
            for s in c.quad {
                match first_seen[s.index()] {
                    Some(other) => {
                        graph.union(other, c.id);
                    }
                    None => first_seen[s.index()] = Some(c.id),
                }
            }
        }
        if graph.classes().1 != 1 {
            return Err(DiagramError::Disconnected);
        }

        // Link components: strands pass straight through a crossing.
        let mut strands = UnionFind::new(n_sides);
        for c in &crossings {
            strands.union(c.quad[0].index(), c.quad[2].index());
            strands.union(c.quad[1].index(), c.quad[3].index());
        }
        let n_components = strands.classes().1;

        Ok(Self { crossings, n_sides, n_components })
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn n_sides(&self) -> usize {
        self.n_sides
    }

    pub fn n_components(&self) -> usize {
        self.n_components
    }

    /// Every (crossing index, position) at which each side is attached.
    pub fn side_ends(&self) -> Vec<[(usize, usize); 2]> {
        let mut ends: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(2); self.n_sides];
        for (k, c) in self.crossings.iter().enumerate() {
            for p in 0..4 {
                ends[c.quad[p].index()].push((k, p));
            }
        }
        ends.into_iter().map(|v| [v[0], v[1]]).collect()
    }

    /// True when every side is over at one end and under at the other.
    pub fn is_alternating(&self) -> bool {
        self.side_ends().iter().all(|[(_, p), (_, q)]| Crossing::is_over(*p) != Crossing::is_over(*q))
    }

    /// Canonical `Q[a,b,c,d]` records, one per line.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for c in &self.crossings {
            let [a, b, cc, d] = c.quad;
            out.push_str(&format!("Q[{a},{b},{cc},{d}]\n"));
        }
        out
    }

    /// The same diagram with every crossing switched.
    pub fn mirror(&self) -> LinkDiagram {
        let crossings = self
            .crossings
            .iter()
            .map(|c| {
                let [a, b, cc, d] = c.quad;
                Crossing::new(c.id, [b, cc, d, a])
            })
            .collect();
        LinkDiagram { crossings, n_sides: self.n_sides, n_components: self.n_components }
    }

    /// A copy with the listed crossings (0-based) switched.
    pub fn with_switched(&self, which: &[usize]) -> LinkDiagram {
        let crossings = self
            .crossings
            .iter()
            .map(|c| {
                if which.contains(&c.id) {
                    let [a, b, cc, d] = c.quad;
                    Crossing::new(c.id, [b, cc, d, a])
                } else {
                    *c
                }
            })
            .collect();
        LinkDiagram { crossings, n_sides: self.n_sides, n_components: self.n_components }
    }
}

/// Parse a diagram file.
///
/// Records are `X[i,j,k,l]` (planar-diagram code: counterclockwise from the
/// incoming under-strand) or `Q[a,b,c,d]` (counterclockwise with the
/// over-strand first). `#` starts a comment. Several records may share a
/// line.
pub fn parse_pd(text: &str) -> Result<LinkDiagram, DiagramError> {
    let mut quads = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut rest = line;
        loop {
            rest = rest.trim_start_matches(|c: char| c.is_whitespace() || c == ',' || c == ';');
            if rest.is_empty() {
                break;
            }
            let malformed = || DiagramError::Malformed { line: lineno + 1, text: raw.trim().to_string() };
            let kind = rest.chars().next().ok_or_else(malformed)?;
            if kind != 'X' && kind != 'Q' {
                return Err(malformed());
            }
            let open = rest[1..].trim_start();
            if !open.starts_with('[') {
                return Err(malformed());
            }
            let close = open.find(']').ok_or_else(malformed)?;
            let body = &open[1..close];
            let nums: Vec<u32> =
                body.split(',').map(|t| t.trim().parse::<u32>()).collect::<Result<_, _>>().map_err(|_| malformed())?;
            let [i, j, k, l]: [u32; 4] = nums.try_into().map_err(|_| malformed())?;
            quads.push(if kind == 'X' { [j, k, l, i] } else { [i, j, k, l] });
            rest = &open[close + 1..];
        }
    }
    LinkDiagram::from_quads(&quads)
}

/// Side indices of the twist-knot diagram, in the order
/// `a, b, x_0..x_{n+1}, y_0..y_{n+1}`.
#[derive(Debug, Clone, Copy)]
pub struct TwistSides {
    pub n: usize,
}

impl TwistSides {
    pub fn a(&self) -> SideId {
        SideId(1)
    }
    pub fn b(&self) -> SideId {
        SideId(2)
    }
    pub fn x(&self, k: usize) -> SideId {
        assert!(k <= self.n + 1);
        SideId(3 + k as u32)
    }
    pub fn y(&self, k: usize) -> SideId {
        assert!(k <= self.n + 1);
        SideId((self.n + 5 + k) as u32)
    }
}

/// The `(n+3)`-crossing diagram of the twist knot `T_n` (`T_1` is the
/// figure-eight, `T_2` is `5_2`).
pub fn twist_knot_diagram(n: i64) -> Result<LinkDiagram, DiagramError> {
    if n < 1 {
        return Err(DiagramError::BadTwistIndex(n));
    }
    let s = TwistSides { n: n as usize };
    let mut quads = vec![[s.b().0, s.y(0).0, s.y(s.n + 1).0, s.a().0], [s.x(0).0, s.b().0, s.a().0, s.x(s.n + 1).0]];
    for k in 0..=s.n {
        quads.push([s.x(k + 1).0, s.y(k + 1).0, s.y(k).0, s.x(k).0]);
    }
    LinkDiagram::from_quads(&quads)
}
