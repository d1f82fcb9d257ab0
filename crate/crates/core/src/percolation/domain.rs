//! Discretisation of a plane domain by a scaled periodic triangulation.
//!
//! Sites are lifts of the triangulation's vertices; points are lifts of its
//! triangles (for a triangulation that is the dual of a 3-regular graph,
//! points are the vertices of that graph). The domain keeps the largest
//! edge-connected set of triangles whose corners all lie in the region,
//! trimmed so that its boundary is a single simple cycle.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::geometry::Polygon;
use crate::graph::{FaceId, HalfEdgeId, Offset, TorusGraph, VertexId};

/// Beyond this many candidate sites the discretisation refuses to run.
pub const MAX_SITES: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    pub vertex: VertexId,
    pub offset: Offset,
    pub position: Complex64,
}

/// What lies across one edge of a triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    Point(u32),
    /// Boundary edge `i`, from `boundary[i]` to `boundary[i + 1]`.
    Slot(u32),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub face: FaceId,
    /// Lift of the first corner of the face cycle.
    pub offset: Offset,
    /// Site ids counterclockwise; edge `j` runs from corner `j` to `j + 1`.
    pub corners: [u32; 3],
    /// Triangulation half-edge along edge `j`.
    pub edges: [HalfEdgeId; 3],
    pub across: [Link; 3],
    pub position: Complex64,
}

/// A discretised domain with marked boundary sites.
#[derive(Debug, Clone)]
pub struct DiscreteDomain {
    tri: Arc<TorusGraph>,
    periods: [Complex64; 2],
    mesh: f64,
    shape: Polygon,
    sites: Vec<Site>,
    adj_start: Vec<u32>,
    adj: Vec<u32>,
    points: Vec<Point>,
    boundary: Vec<u32>,
    boundary_pos: Vec<u32>,
    marks: Vec<usize>,
    mark_points: Vec<Complex64>,
    key_frame: Offset,
    refined_sites: Vec<bool>,
}

const NOT_BOUNDARY: u32 = u32::MAX;

type SiteKey = (usize, i32, i32);

impl DiscreteDomain {
    /// Discretises `shape` by the triangulation embedded in `em`, scaled by
    /// `mesh`. `marks` are boundary points of `shape`, counterclockwise.
    pub fn new(em: &Embedding, shape: Polygon, mesh: f64, marks: &[Complex64]) -> Result<Self> {
        let tri = em.graph_arc().clone();
        if !(mesh > 0.0 && mesh.is_finite()) {
            return Err(Error::input(format!("mesh must be positive, got {mesh}")));
        }
        if tri.faces().iter().any(|f| f.len() != 3) {
            return Err(Error::input("domain discretisation needs a triangulation"));
        }
        let [p1, p2] = em.periods();
        let cell = (p1.conj() * p2).im.abs() * mesh * mesh;
        let estimate = shape.area() / cell * tri.vertex_count() as f64;
        if estimate > MAX_SITES as f64 {
            return Err(Error::Resource(format!("about {estimate:.3e} sites (limit {MAX_SITES})")));
        }

        // Candidate sites: every lift inside the closed polygon.
        let det = (p1.conj() * p2).im;
        let coords = |z: Complex64| ((z.conj() * p2).im / det, (p1.conj() * z).im / det);
        let mut candidates: Vec<Site> = Vec::new();
        let mut index: HashMap<SiteKey, u32> = HashMap::new();
        let (mut amin, mut amax, mut bmin, mut bmax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &z in shape.vertices() {
            for v in 0..tri.vertex_count() {
                let (a, b) = coords(z / mesh - em.positions()[v]);
                amin = amin.min(a);
                amax = amax.max(a);
                bmin = bmin.min(b);
                bmax = bmax.max(b);
            }
        }
        for n in (bmin.floor() as i32 - 1)..=(bmax.ceil() as i32 + 1) {
            for m in (amin.floor() as i32 - 1)..=(amax.ceil() as i32 + 1) {
                for v in 0..tri.vertex_count() {
                    let o = Offset::new(m, n);
                    let z = em.lift(v, o) * mesh;
                    if shape.contains(z) {
                        index.insert((v, m, n), candidates.len() as u32);
                        candidates.push(Site { vertex: v, offset: o, position: z });
                    }
                }
            }
        }

        // Candidate triangles, keyed by the lift of their first corner.
        let face_offsets: Vec<Vec<Offset>> = (0..tri.face_count()).map(|f| tri.face_corner_offsets(f)).collect();
        let mut faces_at: Vec<Vec<FaceId>> = vec![Vec::new(); tri.vertex_count()];
        for (f, cycle) in tri.faces().iter().enumerate() {
            faces_at[tri.source(cycle[0])].push(f);
        }
        let mut tris: Vec<(FaceId, Offset, [u32; 3])> = Vec::new();
        for s in &candidates {
            for &f in &faces_at[s.vertex] {
                let cycle = &tri.faces()[f];
                let mut corners = [0u32; 3];
                let mut ok = true;
                for j in 0..3 {
                    let o = s.offset + face_offsets[f][j];
                    match index.get(&(tri.source(cycle[j]), o.m, o.n)) {
                        Some(&id) => corners[j] = id,
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    tris.push((f, s.offset, corners));
                }
            }
        }
        if tris.is_empty() {
            return Err(Error::input("the region contains no triangle of the scaled lattice"));
        }
        let tri_index: HashMap<(FaceId, i32, i32), u32> =
            tris.iter().enumerate().map(|(i, t)| ((t.0, t.1.m, t.1.n), i as u32)).collect();

        // Neighbour across each edge, if it is a candidate too.
        let neighbour = |f: FaceId, o: Offset, j: usize| -> Option<u32> {
            let h = tri.faces()[f][j];
            let t = tri.twin(h);
            let g = tri.face_of(t);
            let i = tri.faces()[g].iter().position(|&x| x == t).unwrap();
            let lift = o + face_offsets[f][j] + tri.offset(h) - face_offsets[g][i];
            tri_index.get(&(g, lift.m, lift.n)).copied()
        };
        let tri_adj: Vec<[Option<u32>; 3]> =
            tris.iter().map(|&(f, o, _)| [neighbour(f, o, 0), neighbour(f, o, 1), neighbour(f, o, 2)]).collect();

        // Keep the largest component; strip pinch sites until the boundary
        // is a single simple cycle.
        let mut alive = vec![true; tris.len()];
        loop {
            keep_largest_component(&tri_adj, &mut alive);
            let mut out_count: HashMap<u32, u32> = HashMap::new();
            for (i, t) in tris.iter().enumerate() {
                if !alive[i] {
                    continue;
                }
                for j in 0..3 {
                    if !matches!(tri_adj[i][j], Some(q) if alive[q as usize]) {
                        *out_count.entry(t.2[j]).or_default() += 1;
                    }
                }
            }
            let mut pinches: Vec<u32> = out_count.into_iter().filter(|&(_, c)| c > 1).map(|(s, _)| s).collect();
            if pinches.is_empty() {
                break;
            }
            pinches.sort_unstable();
            for (i, t) in tris.iter().enumerate() {
                if alive[i] && t.2.iter().any(|c| pinches.binary_search(c).is_ok()) {
                    alive[i] = false;
                }
            }
            if !alive.iter().any(|&a| a) {
                return Err(Error::input("the region is too thin for the lattice at this mesh"));
            }
        }

        // Renumber sites and points in candidate order.
        let mut site_new = vec![u32::MAX; candidates.len()];
        for (i, t) in tris.iter().enumerate() {
            if alive[i] {
                for &c in &t.2 {
                    site_new[c as usize] = 0;
                }
            }
        }
        let mut sites = Vec::new();
        for (old, slot) in site_new.iter_mut().enumerate() {
            if *slot == 0 {
                *slot = sites.len() as u32;
                sites.push(candidates[old]);
            }
        }
        let mut point_new = vec![u32::MAX; tris.len()];
        let mut count = 0u32;
        for (i, a) in alive.iter().enumerate() {
            if *a {
                point_new[i] = count;
                count += 1;
            }
        }
        let mut points = Vec::with_capacity(count as usize);
        for (i, &(f, o, corners)) in tris.iter().enumerate() {
            if !alive[i] {
                continue;
            }
            let corners = corners.map(|c| site_new[c as usize]);
            let position = corners.iter().map(|&c| sites[c as usize].position).sum::<Complex64>() / 3.0;
            let cycle = &tri.faces()[f];
            let mut across = [Link::Slot(u32::MAX); 3];
            for j in 0..3 {
                if let Some(q) = tri_adj[i][j] {
                    if alive[q as usize] {
                        across[j] = Link::Point(point_new[q as usize]);
                    }
                }
            }
            points.push(Point { face: f, offset: o, corners, edges: [cycle[0], cycle[1], cycle[2]], across, position });
        }

        let mut dom = DiscreteDomain {
            tri,
            periods: em.periods(),
            mesh,
            shape,
            sites,
            adj_start: Vec::new(),
            adj: Vec::new(),
            points,
            boundary: Vec::new(),
            boundary_pos: Vec::new(),
            marks: Vec::new(),
            mark_points: Vec::new(),
            key_frame: Offset::ZERO,
            refined_sites: Vec::new(),
        };
        dom.refined_sites = vec![false; dom.sites.len()];
        dom.rebuild_topology()?;
        dom.set_marks(marks)?;
        Ok(dom)
    }

    /// Recomputes site adjacency, the boundary cycle and boundary slots from
    /// the point list.
    fn rebuild_topology(&mut self) -> Result<()> {
        let n = self.sites.len();
        let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(self.points.len() * 6);
        for p in &self.points {
            for j in 0..3 {
                let (a, b) = (p.corners[j], p.corners[(j + 1) % 3]);
                pairs.push((a, b));
                pairs.push((b, a));
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        self.adj_start = vec![0; n + 1];
        for &(a, _) in &pairs {
            self.adj_start[a as usize + 1] += 1;
        }
        for i in 0..n {
            self.adj_start[i + 1] += self.adj_start[i];
        }
        self.adj = pairs.iter().map(|&(_, b)| b).collect();

        // Boundary: triangle edges with nothing across, oriented with the
        // domain on the left.
        let mut next = vec![NOT_BOUNDARY; n];
        let mut edges = 0usize;
        for p in &self.points {
            for j in 0..3 {
                if matches!(p.across[j], Link::Slot(_)) {
                    next[p.corners[j] as usize] = p.corners[(j + 1) % 3];
                    edges += 1;
                }
            }
        }
        let start = next.iter().position(|&x| x != NOT_BOUNDARY).ok_or_else(|| {
            Error::Degenerate("discretised domain has no boundary".into())
        })?;
        let mut boundary = vec![start as u32];
        let mut cur = next[start];
        while cur as usize != start {
            if boundary.len() > edges {
                return Err(Error::Internal("boundary walk does not close".into()));
            }
            boundary.push(cur);
            cur = next[cur as usize];
        }
        if boundary.len() != edges {
            return Err(Error::Degenerate(format!(
                "discretised domain has holes ({} boundary edges, outer cycle of {})",
                edges,
                boundary.len()
            )));
        }
        self.boundary_pos = vec![NOT_BOUNDARY; n];
        for (i, &b) in boundary.iter().enumerate() {
            self.boundary_pos[b as usize] = i as u32;
        }
        let boundary_pos = &self.boundary_pos;
        for p in &mut self.points {
            for j in 0..3 {
                if let Link::Slot(_) = p.across[j] {
                    p.across[j] = Link::Slot(boundary_pos[p.corners[j] as usize]);
                }
            }
        }
        self.boundary = boundary;
        Ok(())
    }

    fn set_marks(&mut self, marks: &[Complex64]) -> Result<()> {
        let tol = 1e-9 * (1.0 + self.shape.diameter());
        let mut idx = Vec::with_capacity(marks.len());
        for (k, &z) in marks.iter().enumerate() {
            if self.shape.boundary_distance(z) > tol {
                return Err(Error::input(format!("mark {k} at {z} is not on the domain boundary")));
            }
            let mut best = (f64::INFINITY, u32::MAX);
            for &b in &self.boundary {
                let d = (self.sites[b as usize].position - z).norm();
                if d < best.0 || (d == best.0 && b < best.1) {
                    best = (d, b);
                }
            }
            idx.push(self.boundary_pos[best.1 as usize] as usize);
        }
        let len = self.boundary.len();
        if let Some(&first) = idx.first() {
            let rel: Vec<usize> = idx.iter().map(|&i| (i + len - first) % len).collect();
            if rel.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::input("marks are not in counterclockwise order along the boundary"));
            }
        }
        self.marks = idx;
        self.mark_points = marks.to_vec();
        Ok(())
    }

    /// Same sites and points with different marks.
    pub fn with_marks(&self, marks: &[Complex64]) -> Result<Self> {
        let mut d = self.clone();
        d.set_marks(marks)?;
        Ok(d)
    }

    /// The domain `shape - shift` (in lattice units of the scaled periods),
    /// realised by relabelling: every site and point moves down by `shift`.
    /// Random keys follow the new labels, so states are coupled by lattice
    /// identity with the original domain.
    pub fn translated(&self, shift: Offset) -> Self {
        let by = -self.translation(shift);
        let mut d = self.clone();
        for s in &mut d.sites {
            s.offset = s.offset - shift;
            s.position += by;
        }
        for p in &mut d.points {
            p.offset = p.offset - shift;
            p.position += by;
        }
        d.shape = self.shape.translated(by);
        d.mark_points = self.mark_points.iter().map(|z| z + by).collect();
        d
    }

    /// Keys are computed from `offset + frame`; a translated domain with
    /// frame `shift` draws exactly the states of the original.
    pub fn with_key_frame(&self, frame: Offset) -> Self {
        let mut d = self.clone();
        d.key_frame = frame;
        d
    }

    /// Inserts a new site inside every triangle that is a lift of face
    /// `face`, joined to the three corners. The boundary is unchanged.
    pub fn refined(&self, face: FaceId) -> Result<Self> {
        let tri2 = Arc::new(self.tri.refine_face(face)?);
        let w = self.tri.vertex_count();
        let (anchor, _) = self.tri.face_anchor(face);
        let base = self.tri.half_edge_count();
        let spoke = |j: usize| base + 2 * j;
        let hub = |j: usize| base + 2 * j + 1;
        let offs = self.tri.face_corner_offsets(face);

        let mut d = self.clone();
        d.tri = tri2.clone();
        let old_points = std::mem::take(&mut d.points);
        // Each refined triangle becomes three consecutive points.
        let mut first_sub = vec![u32::MAX; old_points.len()];
        let mut count = 0u32;
        for (i, p) in old_points.iter().enumerate() {
            first_sub[i] = count;
            count += if p.face == face { 3 } else { 1 };
        }
        let remap = |link: Link, from_edge: HalfEdgeId| -> Link {
            match link {
                Link::Point(q) => {
                    let q = q as usize;
                    if old_points[q].face == face {
                        // The sub-triangle of q that holds the twin edge.
                        let t = self.tri.twin(from_edge);
                        let j = old_points[q].edges.iter().position(|&e| e == t).unwrap();
                        Link::Point(first_sub[q] + j as u32)
                    } else {
                        Link::Point(first_sub[q])
                    }
                }
                s => s,
            }
        };
        let mut points = Vec::with_capacity(count as usize);
        for p in &old_points {
            if p.face != face {
                let mut q = *p;
                for j in 0..3 {
                    q.across[j] = remap(p.across[j], p.edges[j]);
                }
                points.push(q);
                continue;
            }
            let site = d.sites.len() as u32;
            d.sites.push(Site { vertex: w, offset: p.offset + anchor, position: p.position });
            d.refined_sites.push(true);
            let me = points.len() as u32;
            for j in 0..3 {
                let k = (j + 1) % 3;
                let h = p.edges[j];
                let sub_face = tri2.face_of(h);
                points.push(Point {
                    face: sub_face,
                    offset: p.offset + offs[j],
                    corners: [p.corners[j], p.corners[k], site],
                    edges: [h, spoke(k), hub(j)],
                    across: [
                        remap(p.across[j], h),
                        Link::Point(me + k as u32),
                        Link::Point(me + ((j + 2) % 3) as u32),
                    ],
                    position: (d.sites[p.corners[j] as usize].position
                        + d.sites[p.corners[k] as usize].position
                        + p.position)
                        / 3.0,
                });
            }
        }
        d.points = points;
        d.rebuild_topology()?;
        let marks = d.mark_points.clone();
        d.set_marks(&marks)?;
        Ok(d)
    }

    /// Plane vector of lattice offset `o` at this mesh.
    pub fn translation(&self, o: Offset) -> Complex64 {
        (self.periods[0] * o.m as f64 + self.periods[1] * o.n as f64) * self.mesh
    }

    pub fn periods(&self) -> [Complex64; 2] {
        self.periods
    }

    pub fn triangulation(&self) -> &TorusGraph {
        &self.tri
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    pub fn shape(&self) -> &Polygon {
        &self.shape
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn site_count(&self) -> usize {
        self.sites.len()
    }

    pub fn neighbours(&self, s: usize) -> &[u32] {
        &self.adj[self.adj_start[s] as usize..self.adj_start[s + 1] as usize]
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Boundary sites, counterclockwise, starting at the lowest site id.
    pub fn boundary(&self) -> &[u32] {
        &self.boundary
    }

    /// Position of `site` in the boundary cycle.
    pub fn boundary_index(&self, site: usize) -> Option<usize> {
        match self.boundary_pos[site] {
            NOT_BOUNDARY => None,
            i => Some(i as usize),
        }
    }

    /// Boundary-cycle indices of the marks.
    pub fn marks(&self) -> &[usize] {
        &self.marks
    }

    pub fn mark_points(&self) -> &[Complex64] {
        &self.mark_points
    }

    pub fn mark_site(&self, k: usize) -> usize {
        self.boundary[self.marks[k]] as usize
    }

    /// Whether `site` was added by [`DiscreteDomain::refined`].
    pub fn is_refined_site(&self, site: usize) -> bool {
        self.refined_sites[site]
    }

    /// Random key of a site: its lattice identity.
    pub fn site_key(&self, s: usize) -> u64 {
        let site = &self.sites[s];
        let o = site.offset + self.key_frame;
        lattice_key(site.vertex, o)
    }

    /// Site id of lattice site `(vertex, offset)`, if present.
    pub fn find_site(&self, vertex: VertexId, offset: Offset) -> Option<usize> {
        self.sites.iter().position(|s| s.vertex == vertex && s.offset == offset)
    }

    /// Point id of lattice triangle `(face, offset)`, if present.
    pub fn find_point(&self, face: FaceId, offset: Offset) -> Option<usize> {
        self.points.iter().position(|p| p.face == face && p.offset == offset)
    }

    /// Point nearest to `z` (lowest id on ties).
    pub fn nearest_point(&self, z: Complex64) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, p) in self.points.iter().enumerate() {
            let d = (p.position - z).norm_sqr();
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }

    /// Inclusive boundary arc from mark `from` to mark `to`, counterclockwise.
    pub fn arc(&self, from: usize, to: usize) -> BoundaryArc {
        BoundaryArc { start: self.marks[from], end: self.marks[to], len: self.boundary.len() }
    }

    /// Whether boundary index `i` lies on `arc`.
    pub fn on_arc(&self, arc: BoundaryArc, i: usize) -> bool {
        arc.contains(i)
    }
}

/// Inclusive range of boundary-cycle indices, read counterclockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryArc {
    pub start: usize,
    pub end: usize,
    pub len: usize,
}

impl BoundaryArc {
    pub fn contains(&self, i: usize) -> bool {
        (i + self.len - self.start) % self.len <= (self.end + self.len - self.start) % self.len
    }

    /// Indices strictly between the endpoints.
    pub fn interior_contains(&self, i: usize) -> bool {
        let rel = (i + self.len - self.start) % self.len;
        rel > 0 && rel < (self.end + self.len - self.start) % self.len
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        let span = (self.end + self.len - self.start) % self.len;
        (0..=span).map(move |k| (self.start + k) % self.len)
    }
}

pub fn lattice_key(vertex: VertexId, o: Offset) -> u64 {
    const BIAS: i64 = 1 << 23;
    let m = ((o.m as i64 + BIAS) as u64) & 0xFF_FFFF;
    let n = ((o.n as i64 + BIAS) as u64) & 0xFF_FFFF;
    ((vertex as u64) << 48) | (m << 24) | n
}

fn keep_largest_component(adj: &[[Option<u32>; 3]], alive: &mut [bool]) {
    let mut comp = vec![u32::MAX; adj.len()];
    let mut best = (0usize, u32::MAX);
    let mut label = 0u32;
    let mut stack = Vec::new();
    for s in 0..adj.len() {
        if !alive[s] || comp[s] != u32::MAX {
            continue;
        }
        let mut size = 0;
        comp[s] = label;
        stack.push(s);
        while let Some(x) = stack.pop() {
            size += 1;
            for y in adj[x].iter().flatten() {
                let y = *y as usize;
                if alive[y] && comp[y] == u32::MAX {
                    comp[y] = label;
                    stack.push(y);
                }
            }
        }
        if size > best.0 {
            best = (size, label);
        }
        label += 1;
    }
    for (a, c) in alive.iter_mut().zip(&comp) {
        *a = *a && *c == best.1;
    }
}
