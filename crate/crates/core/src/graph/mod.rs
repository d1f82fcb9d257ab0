//! Finite graphs on the torus, stored as rotation systems.
//!
//! Every undirected edge is a pair of half-edges. A half-edge knows its
//! source vertex, its twin, the next half-edge counterclockwise around its
//! source, and the integer translation (`Offset`) it crosses when lifted to
//! the universal cover. Faces are the cycles of `face_next = prev . twin`,
//! so each face lies on the left of its half-edges and is traversed
//! counterclockwise.

mod builtin;
mod ops;
mod spec;

use std::collections::VecDeque;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Invariant, Result};

pub use builtin::Builtin;
pub use ops::{find_isomorphism, is_isomorphism, Duality};
pub use spec::{Coord, GraphSpec};

pub type VertexId = usize;
pub type HalfEdgeId = usize;
pub type FaceId = usize;

/// A translation in the period lattice Z^2.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Offset {
    pub m: i32,
    pub n: i32,
}

impl Offset {
    pub const ZERO: Offset = Offset { m: 0, n: 0 };

    pub const fn new(m: i32, n: i32) -> Self {
        Offset { m, n }
    }

    pub fn is_zero(self) -> bool {
        self.m == 0 && self.n == 0
    }
}

impl Add for Offset {
    type Output = Offset;
    fn add(self, o: Offset) -> Offset {
        Offset::new(self.m + o.m, self.n + o.n)
    }
}

impl AddAssign for Offset {
    fn add_assign(&mut self, o: Offset) {
        self.m += o.m;
        self.n += o.n;
    }
}

impl Sub for Offset {
    type Output = Offset;
    fn sub(self, o: Offset) -> Offset {
        Offset::new(self.m - o.m, self.n - o.n)
    }
}

impl Neg for Offset {
    type Output = Offset;
    fn neg(self) -> Offset {
        Offset::new(-self.m, -self.n)
    }
}

impl Mul<i32> for Offset {
    type Output = Offset;
    fn mul(self, k: i32) -> Offset {
        Offset::new(self.m * k, self.n * k)
    }
}

impl fmt::Display for Offset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.m, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfEdge {
    pub source: VertexId,
    pub twin: HalfEdgeId,
    /// Next half-edge counterclockwise around `source`.
    pub next: HalfEdgeId,
    pub offset: Offset,
}

/// Which side of the duality a graph represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    /// Every vertex has degree 3.
    Primal3Regular,
    /// Every face is a triangle.
    DualTriangulation,
    /// Any cellular torus graph.
    General,
    /// Periodic graph without a cellular torus embedding (covering graphs).
    /// Rotation order is bookkeeping only; face invariants are not enforced.
    Covering,
}

/// A finite cellularly embedded graph of genus 1.
#[derive(Debug, Clone)]
pub struct TorusGraph {
    half_edges: Vec<HalfEdge>,
    prev: Vec<HalfEdgeId>,
    out: Vec<Vec<HalfEdgeId>>,
    faces: Vec<Vec<HalfEdgeId>>,
    face_of: Vec<FaceId>,
    positions: Option<Vec<[f64; 2]>>,
    role: Role,
}

impl TorusGraph {
    /// Validates a raw rotation system and builds the graph.
    ///
    /// Positions, when given, are a-priori coordinates in the unit square of
    /// the torus (one per vertex).
    pub fn from_half_edges(
        vertex_count: usize,
        half_edges: Vec<HalfEdge>,
        positions: Option<Vec<[f64; 2]>>,
        role: Role,
    ) -> Result<Self> {
        let count = half_edges.len();
        if vertex_count == 0 {
            return Err(Error::invariant(Invariant::Connectivity, "graph has no vertices"));
        }
        if count == 0 || !count.is_multiple_of(2) {
            return Err(Error::invariant(
                Invariant::TwinInvolution,
                format!("{count} half-edges cannot be paired"),
            ));
        }
        for (h, he) in half_edges.iter().enumerate() {
            if he.source >= vertex_count {
                return Err(Error::invariant(
                    Invariant::Rotation,
                    format!("half-edge {h} has source {} out of range", he.source),
                ));
            }
            if he.twin >= count || he.twin == h || half_edges[he.twin].twin != h {
                return Err(Error::invariant(
                    Invariant::TwinInvolution,
                    format!("half-edge {h} has twin {} which does not pair back", he.twin),
                ));
            }
            if half_edges[he.twin].offset != -he.offset {
                return Err(Error::invariant(
                    Invariant::TwinDisplacement,
                    format!(
                        "half-edge {h} has displacement {} but its twin has {}",
                        he.offset, half_edges[he.twin].offset
                    ),
                ));
            }
            if he.next >= count {
                return Err(Error::invariant(
                    Invariant::Rotation,
                    format!("half-edge {h} has next {} out of range", he.next),
                ));
            }
        }

        let mut prev = vec![usize::MAX; count];
        for (h, he) in half_edges.iter().enumerate() {
            if prev[he.next] != usize::MAX {
                return Err(Error::invariant(
                    Invariant::Rotation,
                    format!("half-edge {} is the successor of two half-edges", he.next),
                ));
            }
            if half_edges[he.next].source != he.source {
                return Err(Error::invariant(
                    Invariant::Rotation,
                    format!("successor of half-edge {h} leaves a different vertex"),
                ));
            }
            prev[he.next] = h;
        }

        // One rotation cycle per vertex.
        let mut out: Vec<Vec<HalfEdgeId>> = vec![Vec::new(); vertex_count];
        let mut seen = vec![false; count];
        for h in 0..count {
            if seen[h] {
                continue;
            }
            let v = half_edges[h].source;
            if !out[v].is_empty() {
                return Err(Error::invariant(
                    Invariant::Rotation,
                    format!("vertex {v} has more than one rotation cycle"),
                ));
            }
            let mut cur = h;
            loop {
                seen[cur] = true;
                out[v].push(cur);
                cur = half_edges[cur].next;
                if cur == h {
                    break;
                }
            }
        }
        if let Some(v) = out.iter().position(Vec::is_empty) {
            return Err(Error::invariant(Invariant::Connectivity, format!("vertex {v} is isolated")));
        }

        if let Some(pos) = &positions {
            if pos.len() != vertex_count {
                return Err(Error::invariant(
                    Invariant::Positions,
                    format!("{} positions for {vertex_count} vertices", pos.len()),
                ));
            }
            if pos.iter().flatten().any(|c| !c.is_finite()) {
                return Err(Error::invariant(Invariant::Positions, "non-finite coordinate"));
            }
        }

        let mut faces = Vec::new();
        let mut face_of = vec![usize::MAX; count];
        for h in 0..count {
            if face_of[h] != usize::MAX {
                continue;
            }
            let f = faces.len();
            let mut cycle = Vec::new();
            let mut cur = h;
            loop {
                face_of[cur] = f;
                cycle.push(cur);
                cur = prev[half_edges[cur].twin];
                if cur == h {
                    break;
                }
            }
            faces.push(cycle);
        }

        let graph = TorusGraph { half_edges, prev, out, faces, face_of, positions, role };
        graph.validate()?;
        Ok(graph)
    }

    fn validate(&self) -> Result<()> {
        match self.role {
            Role::Primal3Regular => {
                if let Some(v) = (0..self.vertex_count()).find(|&v| self.degree(v) != 3) {
                    return Err(Error::invariant(
                        Invariant::ThreeRegular,
                        format!("vertex {v} has degree {}", self.degree(v)),
                    ));
                }
            }
            Role::DualTriangulation => {
                if let Some(f) = (0..self.face_count()).find(|&f| self.faces[f].len() != 3) {
                    return Err(Error::invariant(
                        Invariant::Triangulation,
                        format!("face {f} has {} sides", self.faces[f].len()),
                    ));
                }
            }
            Role::General | Role::Covering => {}
        }

        if self.role != Role::Covering {
            let chi = self.euler_characteristic();
            if chi != 0 {
                return Err(Error::invariant(
                    Invariant::EulerCharacteristic,
                    format!(
                        "V={} E={} F={} gives {chi}",
                        self.vertex_count(),
                        self.edge_count(),
                        self.face_count()
                    ),
                ));
            }
            for (f, cycle) in self.faces.iter().enumerate() {
                let sum = cycle.iter().fold(Offset::ZERO, |acc, &h| acc + self.half_edges[h].offset);
                if !sum.is_zero() {
                    return Err(Error::invariant(
                        Invariant::FaceClosure,
                        format!("face {f} has displacement sum {sum}"),
                    ));
                }
            }
        }

        let potential = self.spanning_potential();
        if let Some(v) = potential.iter().position(Option::is_none) {
            return Err(Error::invariant(
                Invariant::Connectivity,
                format!("vertex {v} is unreachable from vertex 0"),
            ));
        }
        let potential: Vec<Offset> = potential.into_iter().map(Option::unwrap).collect();
        let mut lattice = Lattice2::default();
        for he in &self.half_edges {
            let target = self.half_edges[he.twin].source;
            lattice.add(potential[he.source] + he.offset - potential[target]);
        }
        if lattice.index() != 1 {
            return Err(Error::invariant(
                Invariant::PeriodLattice,
                format!("cycle displacements generate a sublattice of index {}", lattice.index()),
            ));
        }
        Ok(())
    }

    /// Lift offsets of every vertex along a breadth-first spanning tree rooted
    /// at vertex 0. `None` marks unreachable vertices.
    pub(crate) fn spanning_potential(&self) -> Vec<Option<Offset>> {
        let mut pot = vec![None; self.vertex_count()];
        pot[0] = Some(Offset::ZERO);
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            let base = pot[v].unwrap();
            for &h in &self.out[v] {
                let t = self.target(h);
                if pot[t].is_none() {
                    pot[t] = Some(base + self.half_edges[h].offset);
                    queue.push_back(t);
                }
            }
        }
        pot
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    pub fn half_edge_count(&self) -> usize {
        self.half_edges.len()
    }

    pub fn edge_count(&self) -> usize {
        self.half_edges.len() / 2
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn half_edge(&self, h: HalfEdgeId) -> &HalfEdge {
        &self.half_edges[h]
    }

    pub fn half_edges(&self) -> &[HalfEdge] {
        &self.half_edges
    }

    pub fn source(&self, h: HalfEdgeId) -> VertexId {
        self.half_edges[h].source
    }

    pub fn target(&self, h: HalfEdgeId) -> VertexId {
        self.half_edges[self.half_edges[h].twin].source
    }

    pub fn twin(&self, h: HalfEdgeId) -> HalfEdgeId {
        self.half_edges[h].twin
    }

    pub fn offset(&self, h: HalfEdgeId) -> Offset {
        self.half_edges[h].offset
    }

    /// `tau.e`: the next half-edge counterclockwise around the source.
    pub fn next(&self, h: HalfEdgeId) -> HalfEdgeId {
        self.half_edges[h].next
    }

    pub fn prev(&self, h: HalfEdgeId) -> HalfEdgeId {
        self.prev[h]
    }

    /// Successor of `h` along the face on its left.
    pub fn face_next(&self, h: HalfEdgeId) -> HalfEdgeId {
        self.prev[self.half_edges[h].twin]
    }

    /// Outgoing half-edges of `v` in counterclockwise order.
    pub fn out_edges(&self, v: VertexId) -> &[HalfEdgeId] {
        &self.out[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.out[v].len()
    }

    pub fn faces(&self) -> &[Vec<HalfEdgeId>] {
        &self.faces
    }

    /// Face on the left of `h`.
    pub fn face_of(&self, h: HalfEdgeId) -> FaceId {
        self.face_of[h]
    }

    pub fn positions(&self) -> Option<&[[f64; 2]]> {
        self.positions.as_deref()
    }

    pub fn is_three_regular(&self) -> bool {
        (0..self.vertex_count()).all(|v| self.degree(v) == 3)
    }

    /// Undirected edges as their lower-numbered half-edge.
    pub fn edges(&self) -> impl Iterator<Item = HalfEdgeId> + '_ {
        (0..self.half_edges.len()).filter(move |&h| h < self.half_edges[h].twin)
    }

    /// Lattice offsets of each corner of face `f`, relative to the source of
    /// the first half-edge of the face cycle.
    pub fn face_corner_offsets(&self, f: FaceId) -> Vec<Offset> {
        let mut acc = Offset::ZERO;
        self.faces[f]
            .iter()
            .map(|&h| {
                let here = acc;
                acc += self.half_edges[h].offset;
                here
            })
            .collect()
    }
}

/// Hermite normal form of a sublattice of Z^2, grown one generator at a time.
#[derive(Debug, Default, Clone, Copy)]
struct Lattice2 {
    a: i64,
    b: i64,
    c: i64,
}

impl Lattice2 {
    fn add(&mut self, v: Offset) {
        let (x, y) = (v.m as i64, v.n as i64);
        if x == 0 && self.a == 0 {
            self.c = gcd(self.c, y);
        } else {
            let (g, s, t) = ext_gcd(self.a, x);
            let rem = (x / g) * self.b - (self.a / g) * y;
            self.b = s * self.b + t * y;
            self.a = g;
            self.c = gcd(self.c, rem);
        }
        if self.a < 0 {
            self.a = -self.a;
            self.b = -self.b;
        }
        if self.c != 0 {
            self.b = self.b.rem_euclid(self.c);
        }
    }

    fn index(&self) -> i64 {
        self.a * self.c
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, s, t) = ext_gcd(b, a.rem_euclid(b));
        // a = q b + r with r = a.rem_euclid(b)
        let q = (a - a.rem_euclid(b)) / b;
        (g, t, s - q * t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_index_of_generators() {
        let mut l = Lattice2::default();
        l.add(Offset::new(2, 0));
        l.add(Offset::new(0, 3));
        assert_eq!(l.index(), 6);
        l.add(Offset::new(1, 1));
        assert_eq!(l.index(), 1);

        let mut l = Lattice2::default();
        l.add(Offset::new(1, 1));
        l.add(Offset::new(1, -1));
        assert_eq!(l.index(), 2);
        l.add(Offset::new(-3, 5));
        assert_eq!(l.index(), 2);
        l.add(Offset::new(0, 1));
        assert_eq!(l.index(), 1);
    }

    #[test]
    fn rank_one_lattice_has_zero_index() {
        let mut l = Lattice2::default();
        l.add(Offset::new(2, 1));
        l.add(Offset::new(-4, -2));
        assert_eq!(l.index(), 0);
    }

    #[test]
    fn ext_gcd_bezout() {
        for a in -7..8 {
            for b in -7..8 {
                let (g, s, t) = ext_gcd(a, b);
                assert_eq!(g, gcd(a, b), "{a} {b}");
                assert_eq!(s * a + t * b, g, "{a} {b}");
            }
        }
    }
}
