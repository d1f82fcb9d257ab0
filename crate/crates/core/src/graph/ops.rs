//! Graph constructions: duality, face refinement, covering graphs, and a
//! map-isomorphism check used to compare constructions.

use std::collections::VecDeque;

use super::{FaceId, HalfEdge, HalfEdgeId, Offset, Role, TorusGraph};
use crate::error::{Error, Result};

/// The dual of a graph together with the lift bookkeeping that relates the
/// two. Dual half-edge `h` crosses primal half-edge `h` from its right face
/// to its left face, so it is `h` turned a quarter counterclockwise.
#[derive(Debug, Clone)]
pub struct Duality {
    pub dual: TorusGraph,
    /// For each primal half-edge `h`: the translation taking the
    /// representative lift of the face left of `h` to the copy of that face
    /// which has the base lift of `source(h)` as a corner.
    pub corner: Vec<Offset>,
}

impl TorusGraph {
    pub fn dual(&self) -> Result<TorusGraph> {
        Ok(self.duality()?.dual)
    }

    pub fn duality(&self) -> Result<Duality> {
        let role = match self.role {
            Role::Primal3Regular => Role::DualTriangulation,
            Role::DualTriangulation => Role::Primal3Regular,
            Role::General => Role::General,
            Role::Covering => return Err(Error::input("covering graphs carry no face structure to dualize")),
        };
        let count = self.half_edge_count();
        let mut corner = vec![Offset::ZERO; count];
        let mut dual_pos = self.positions.as_ref().map(|_| Vec::with_capacity(self.face_count()));
        for f in 0..self.face_count() {
            let offs = self.face_corner_offsets(f);
            let (anchor, centroid) = self.face_anchor(f);
            if let (Some(out), Some(c)) = (dual_pos.as_mut(), centroid) {
                out.push(c);
            }
            for (&h, &o) in self.faces[f].iter().zip(&offs) {
                corner[h] = anchor - o;
            }
        }

        let half_edges = (0..count)
            .map(|h| {
                let t = self.twin(h);
                HalfEdge {
                    source: self.face_of(t),
                    twin: t,
                    next: self.twin(self.prev(h)),
                    offset: corner[h] - self.offset(h) - corner[t],
                }
            })
            .collect();
        let dual = TorusGraph::from_half_edges(self.face_count(), half_edges, dual_pos, role)
            .map_err(|e| Error::Internal(format!("dual construction failed: {e}")))?;
        Ok(Duality { dual, corner })
    }

    /// Lift translation that brings the centroid of face `f` (in a-priori
    /// coordinates) into the unit square, with that reduced centroid. Without
    /// positions the anchor is zero.
    pub fn face_anchor(&self, f: FaceId) -> (Offset, Option<[f64; 2]>) {
        let Some(pos) = &self.positions else {
            return (Offset::ZERO, None);
        };
        let offs = self.face_corner_offsets(f);
        let k = offs.len() as f64;
        let (mut x, mut y) = (0.0, 0.0);
        for (&h, o) in self.faces[f].iter().zip(&offs) {
            let p = pos[self.source(h)];
            x += p[0] + o.m as f64;
            y += p[1] + o.n as f64;
        }
        let (x, y) = (x / k, y / k);
        let a = Offset::new(x.floor() as i32, y.floor() as i32);
        (a, Some([x - a.m as f64, y - a.n as f64]))
    }

    /// Inserts a vertex inside triangular face `face`, joined to its three
    /// corners. New edges get ids after the existing ones; the new vertex id
    /// is `vertex_count()`.
    pub fn refine_face(&self, face: FaceId) -> Result<TorusGraph> {
        let cycle = self
            .faces
            .get(face)
            .ok_or_else(|| Error::input(format!("face {face} out of range ({} faces)", self.face_count())))?;
        if cycle.len() != 3 {
            return Err(Error::input(format!("face {face} has {} sides, not 3", cycle.len())));
        }
        let offs = self.face_corner_offsets(face);
        let w = self.vertex_count();
        let base = self.half_edge_count();

        let mut positions = self.positions.clone();
        let (anchor, centroid) = self.face_anchor(face);
        if let (Some(pos), Some(c)) = (positions.as_mut(), centroid) {
            pos.push(c);
        }

        let mut half_edges = self.half_edges.clone();
        let spoke = |j: usize| base + 2 * j;
        let hub = |j: usize| base + 2 * j + 1;
        for j in 0..3 {
            let h = cycle[j];
            let d = anchor - offs[j];
            half_edges.push(HalfEdge { source: self.source(h), twin: hub(j), next: self.next(h), offset: d });
            half_edges.push(HalfEdge { source: w, twin: spoke(j), next: hub((j + 1) % 3), offset: -d });
        }
        for j in 0..3 {
            half_edges[cycle[j]].next = spoke(j);
        }
        TorusGraph::from_half_edges(w + 1, half_edges, positions, self.role)
    }

    /// The graph whose vertices are the undirected edges of `self`, two being
    /// adjacent when the edges share an endpoint (once per shared endpoint
    /// incidence). Vertex `i` is the `i`-th undirected edge in id order.
    pub fn covering_graph(&self) -> Result<TorusGraph> {
        let mut index = vec![usize::MAX; self.half_edge_count()];
        let mut n = 0;
        for h in self.edges() {
            index[h] = n;
            index[self.twin(h)] = n;
            n += 1;
        }
        // Translation from the representative of an edge-vertex to the copy
        // met when leaving `source(a)` along `a`.
        let lift = |a: HalfEdgeId| if a < self.twin(a) { Offset::ZERO } else { self.offset(a) };

        let mut pairs: Vec<(usize, usize, Offset)> = Vec::new();
        for v in 0..self.vertex_count() {
            let out = self.out_edges(v);
            for i in 0..out.len() {
                for j in i + 1..out.len() {
                    let (a, b) = (out[i], out[j]);
                    pairs.push((index[a], index[b], lift(b) - lift(a)));
                }
            }
        }

        let mut half_edges = Vec::with_capacity(2 * pairs.len());
        let mut around: Vec<Vec<HalfEdgeId>> = vec![Vec::new(); n];
        for &(u, v, d) in &pairs {
            let h = half_edges.len();
            half_edges.push(HalfEdge { source: u, twin: h + 1, next: 0, offset: d });
            half_edges.push(HalfEdge { source: v, twin: h, next: 0, offset: -d });
            around[u].push(h);
            around[v].push(h + 1);
        }
        for list in &around {
            for (i, &h) in list.iter().enumerate() {
                half_edges[h].next = list[(i + 1) % list.len()];
            }
        }
        TorusGraph::from_half_edges(n, half_edges, None, Role::Covering)
    }

    /// Graph with every half-edge relabelled by `map` (a permutation), so that
    /// half-edge `map[h]` of the result plays the role of `h`.
    pub fn relabel(&self, map: &[HalfEdgeId]) -> Result<TorusGraph> {
        let mut half_edges = vec![self.half_edges[0]; self.half_edge_count()];
        for (h, he) in self.half_edges.iter().enumerate() {
            half_edges[map[h]] =
                HalfEdge { source: he.source, twin: map[he.twin], next: map[he.next], offset: he.offset };
        }
        TorusGraph::from_half_edges(self.vertex_count(), half_edges, self.positions.clone(), self.role)
    }
}

/// Checks whether `map` (half-edge of `a` to half-edge of `b`) is an
/// orientation-preserving isomorphism of rotation systems that also matches
/// displacements up to a choice of vertex lifts.
pub fn is_isomorphism(a: &TorusGraph, b: &TorusGraph, map: &[HalfEdgeId]) -> bool {
    let count = a.half_edge_count();
    if b.half_edge_count() != count || b.vertex_count() != a.vertex_count() || map.len() != count {
        return false;
    }
    let mut hit = vec![false; count];
    for &x in map {
        if x >= count || hit[x] {
            return false;
        }
        hit[x] = true;
    }
    if (0..count).any(|h| map[a.twin(h)] != b.twin(map[h]) || map[a.next(h)] != b.next(map[h])) {
        return false;
    }
    let mut vmap = vec![usize::MAX; a.vertex_count()];
    for h in 0..count {
        let (s, t) = (a.source(h), b.source(map[h]));
        if vmap[s] == usize::MAX {
            vmap[s] = t;
        } else if vmap[s] != t {
            return false;
        }
    }
    // Lift gauge: offset_b(map h) = offset_a(h) + gauge(target) - gauge(source).
    let mut gauge: Vec<Option<Offset>> = vec![None; a.vertex_count()];
    gauge[0] = Some(Offset::ZERO);
    let mut queue = VecDeque::from([0]);
    while let Some(v) = queue.pop_front() {
        for &h in a.out_edges(v) {
            let t = a.target(h);
            let want = gauge[v].unwrap() + b.offset(map[h]) - a.offset(h);
            match gauge[t] {
                None => {
                    gauge[t] = Some(want);
                    queue.push_back(t);
                }
                Some(g) if g != want => return false,
                Some(_) => {}
            }
        }
    }
    true
}

/// Searches for an isomorphism in the sense of [`is_isomorphism`].
pub fn find_isomorphism(a: &TorusGraph, b: &TorusGraph) -> Option<Vec<HalfEdgeId>> {
    let count = a.half_edge_count();
    if b.half_edge_count() != count || b.vertex_count() != a.vertex_count() {
        return None;
    }
    'candidate: for image in 0..count {
        let mut map = vec![usize::MAX; count];
        map[0] = image;
        let mut stack = vec![0];
        while let Some(h) = stack.pop() {
            for (x, y) in [(a.twin(h), b.twin(map[h])), (a.next(h), b.next(map[h]))] {
                if map[x] == usize::MAX {
                    map[x] = y;
                    stack.push(x);
                } else if map[x] != y {
                    continue 'candidate;
                }
            }
        }
        if is_isomorphism(a, b, &map) {
            return Some(map);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Builtin;

    #[test]
    fn dual_of_honeycomb_counts() {
        let d = Builtin::Honeycomb.graph().dual().unwrap();
        assert_eq!((d.vertex_count(), d.edge_count(), d.face_count()), (2, 6, 4));
        assert_eq!(d.role(), Role::DualTriangulation);
    }

    #[test]
    fn dual_faces_match_primal_vertices() {
        for b in Builtin::ALL {
            let g = b.graph();
            let d = g.dual().unwrap();
            assert_eq!(d.face_count(), g.vertex_count(), "{b}");
            assert_eq!(d.vertex_count(), g.face_count(), "{b}");
        }
    }

    #[test]
    fn double_dual_reverses_half_edges() {
        for b in Builtin::ALL {
            let g = b.graph();
            let dd = g.dual().unwrap().dual().unwrap();
            let reverse: Vec<_> = (0..g.half_edge_count()).map(|h| g.twin(h)).collect();
            assert!(is_isomorphism(&g, &dd, &reverse), "{b}");
        }
    }

    #[test]
    fn refine_counts_and_preserves_edges() {
        let d = Builtin::SquareOctagon.graph().dual().unwrap();
        let r = d.refine_face(0).unwrap();
        assert_eq!(r.vertex_count(), d.vertex_count() + 1);
        assert_eq!(r.edge_count(), d.edge_count() + 3);
        assert_eq!(r.face_count(), d.face_count() + 2);
        assert_eq!(r.degree(d.vertex_count()), 3);
        for h in 0..d.half_edge_count() {
            assert_eq!(r.source(h), d.source(h));
            assert_eq!(r.twin(h), d.twin(h));
            assert_eq!(r.offset(h), d.offset(h));
        }
    }

    #[test]
    fn refine_rejects_bad_faces() {
        let d = Builtin::SquareOctagon.graph().dual().unwrap();
        assert!(d.refine_face(99).is_err());
        let g = Builtin::SquareOctagon.graph();
        let octagon = (0..g.face_count()).find(|&f| g.faces()[f].len() == 8).unwrap();
        assert!(g.refine_face(octagon).is_err());
    }

    #[test]
    fn covering_of_z2() {
        let c = Builtin::Z2Bond.graph().covering_graph().unwrap();
        assert_eq!(c.vertex_count(), 2);
        assert!((0..2).all(|v| c.degree(v) == 6));
    }

    #[test]
    fn isomorphism_search_finds_relabelling() {
        let g = Builtin::Honeycomb.graph();
        let count = g.half_edge_count();
        let perm: Vec<_> = (0..count).map(|h| (h + 5) % count).collect();
        let r = g.relabel(&perm).unwrap();
        let found = find_isomorphism(&g, &r).unwrap();
        assert!(is_isomorphism(&g, &r, &found));
    }
}
