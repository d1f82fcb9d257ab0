//! Plane embeddings of torus graphs.
//!
//! An [`Embedding`] places one lift of every vertex in the plane and fixes
//! the two period vectors; every other lift is a translate by an integer
//! combination of the periods.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Duality, HalfEdgeId, Offset, TorusGraph, VertexId};

/// Hard cap on the number of lifts materialised by [`Embedding::lift_patch`].
pub const MAX_PATCH_LIFTS: usize = 20_000_000;

/// Primitive cube root of unity.
pub fn tau() -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU / 3.0)
}

/// Where each dual vertex sits inside its primal face.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub enum DualPlacement {
    /// Mean of the face corners.
    #[default]
    Centroid,
    /// Least-squares circumcenter of the face corners.
    Circumcenter,
}

#[derive(Debug, Clone)]
pub struct Embedding {
    graph: Arc<TorusGraph>,
    positions: Vec<Complex64>,
    periods: [Complex64; 2],
}

/// One lift of a vertex in the universal cover.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lift {
    pub vertex: VertexId,
    pub offset: Offset,
    pub position: Complex64,
}

/// Half-open axis-aligned window `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Window {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Window { x0, x1, y0, y1 }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.x0 && z.re < self.x1 && z.im >= self.y0 && z.im < self.y1
    }

    fn is_empty(&self) -> bool {
        !(self.x1 > self.x0 && self.y1 > self.y0)
    }
}

/// Real-linear map fixing 1 and sending i to `beta`.
pub fn phi(beta: Complex64, z: Complex64) -> Complex64 {
    z.re + beta * z.im
}

impl Embedding {
    /// Builds an embedding from explicit data. The periods must be real-linearly
    /// independent.
    pub fn from_parts(graph: Arc<TorusGraph>, positions: Vec<Complex64>, periods: [Complex64; 2]) -> Result<Self> {
        if positions.len() != graph.vertex_count() {
            return Err(Error::input(format!(
                "{} positions for {} vertices",
                positions.len(),
                graph.vertex_count()
            )));
        }
        if periods[0].norm() == 0.0 || (periods[1] / periods[0]).im == 0.0 {
            return Err(Error::Degenerate("period vectors are real-linearly dependent".into()));
        }
        Ok(Embedding { graph, positions, periods })
    }

    /// The a-priori torus coordinates with periods `(1, i)`.
    pub fn square(graph: Arc<TorusGraph>) -> Result<Self> {
        let positions = graph
            .positions()
            .ok_or_else(|| Error::input("graph has no a-priori positions"))?
            .iter()
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        Embedding::from_parts(graph, positions, [Complex64::new(1.0, 0.0), Complex64::i()])
    }

    /// The balanced embedding with periods `(1, alpha)` and vertex 0 at the
    /// origin.
    pub fn balanced(graph: Arc<TorusGraph>, alpha: Complex64) -> Result<Self> {
        if alpha.im == 0.0 {
            return Err(Error::Degenerate(format!("modulus {alpha} is real")));
        }
        let zero = vec![Complex64::new(0.0, 0.0); graph.vertex_count()];
        Embedding::from_parts(graph, zero, [Complex64::new(1.0, 0.0), alpha])?.balance()
    }

    /// Moves every vertex to the barycenter of its neighbours (keeping the
    /// periods), by solving the Laplacian system with vertex 0 pinned at the
    /// origin.
    pub fn balance(&self) -> Result<Self> {
        let g = &*self.graph;
        let n = g.vertex_count();
        let mut positions = vec![Complex64::new(0.0, 0.0); n];
        if n > 1 {
            let dim = n - 1;
            let mut lap = DMatrix::<f64>::zeros(dim, dim);
            let mut rhs_re = DVector::<f64>::zeros(dim);
            let mut rhs_im = DVector::<f64>::zeros(dim);
            for h in 0..g.half_edge_count() {
                let (s, t) = (g.source(h), g.target(h));
                if s == 0 {
                    continue;
                }
                let shift = self.translation(g.offset(h));
                rhs_re[s - 1] += shift.re;
                rhs_im[s - 1] += shift.im;
                if s != t {
                    lap[(s - 1, s - 1)] += 1.0;
                    if t != 0 {
                        lap[(s - 1, t - 1)] -= 1.0;
                    }
                }
            }
            let chol = lap
                .cholesky()
                .ok_or_else(|| Error::Internal("barycentric system is singular".into()))?;
            let x = chol.solve(&rhs_re);
            let y = chol.solve(&rhs_im);
            for v in 1..n {
                positions[v] = Complex64::new(x[v - 1], y[v - 1]);
            }
        }
        Embedding::from_parts(self.graph.clone(), positions, self.periods)
    }

    /// Applies `phi_beta` to positions and periods.
    pub fn shear(&self, beta: Complex64) -> Result<Self> {
        if beta.im == 0.0 {
            return Err(Error::Degenerate(format!("shear parameter {beta} is real")));
        }
        let f = |z: Complex64| phi(beta, z);
        Embedding::from_parts(
            self.graph.clone(),
            self.positions.iter().map(|&z| f(z)).collect(),
            [f(self.periods[0]), f(self.periods[1])],
        )
    }

    /// Rescales so that the first period is 1 and conjugates if needed so that
    /// the modulus lies in the upper half-plane.
    pub fn normalized(&self) -> Self {
        let s = self.periods[0].inv();
        let flip = (self.periods[1] * s).im < 0.0;
        let f = |z: Complex64| if flip { (z * s).conj() } else { z * s };
        Embedding {
            graph: self.graph.clone(),
            positions: self.positions.iter().map(|&z| f(z)).collect(),
            periods: [f(self.periods[0]), f(self.periods[1])],
        }
    }

    /// Multiplies every coordinate by `s`.
    pub fn scaled(&self, s: Complex64) -> Self {
        Embedding {
            graph: self.graph.clone(),
            positions: self.positions.iter().map(|&z| z * s).collect(),
            periods: [self.periods[0] * s, self.periods[1] * s],
        }
    }

    pub fn graph(&self) -> &TorusGraph {
        &self.graph
    }

    pub fn graph_arc(&self) -> &Arc<TorusGraph> {
        &self.graph
    }

    pub fn positions(&self) -> &[Complex64] {
        &self.positions
    }

    pub fn periods(&self) -> [Complex64; 2] {
        self.periods
    }

    /// `p2 / p1`.
    pub fn modulus(&self) -> Complex64 {
        self.periods[1] / self.periods[0]
    }

    pub fn translation(&self, o: Offset) -> Complex64 {
        self.periods[0] * o.m as f64 + self.periods[1] * o.n as f64
    }

    /// Position of the lift of `v` translated by `o`.
    pub fn lift(&self, v: VertexId, o: Offset) -> Complex64 {
        self.positions[v] + self.translation(o)
    }

    pub fn edge_vector(&self, h: HalfEdgeId) -> Complex64 {
        let g = &*self.graph;
        self.lift(g.target(h), g.offset(h)) - self.positions[g.source(h)]
    }

    /// Largest distance between a vertex and the barycenter of its neighbours.
    pub fn barycenter_residual(&self) -> f64 {
        let g = &*self.graph;
        (0..g.vertex_count())
            .map(|v| {
                let sum: Complex64 = g.out_edges(v).iter().map(|&h| self.edge_vector(h)).sum();
                sum.norm() / g.degree(v) as f64
            })
            .fold(0.0, f64::max)
    }

    /// Sum of squared edge lengths over one period.
    pub fn dirichlet_energy(&self) -> f64 {
        self.graph.edges().map(|h| self.edge_vector(h).norm_sqr()).sum()
    }

    /// Every lift whose position lies in `window`, sorted by `(n, m, vertex)`.
    pub fn lift_patch(&self, window: Window) -> Result<Vec<Lift>> {
        if window.is_empty() {
            return Ok(Vec::new());
        }
        let [p1, p2] = self.periods;
        let cell = (p1.conj() * p2).im.abs();
        let estimate =
            (window.x1 - window.x0) * (window.y1 - window.y0) / cell * self.graph.vertex_count() as f64;
        if !estimate.is_finite() || estimate > MAX_PATCH_LIFTS as f64 {
            return Err(Error::Resource(format!(
                "window would hold about {estimate:.3e} lifts (limit {MAX_PATCH_LIFTS})"
            )));
        }
        // Lattice coordinates of a plane point: z = a p1 + b p2.
        let det = (p1.conj() * p2).im;
        let coords = |z: Complex64| ((z.conj() * p2).im / det, (p1.conj() * z).im / det);
        let (mut amin, mut amax, mut bmin, mut bmax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for v in 0..self.graph.vertex_count() {
            for z in [
                Complex64::new(window.x0, window.y0),
                Complex64::new(window.x1, window.y0),
                Complex64::new(window.x0, window.y1),
                Complex64::new(window.x1, window.y1),
            ] {
                let (a, b) = coords(z - self.positions[v]);
                amin = amin.min(a);
                amax = amax.max(a);
                bmin = bmin.min(b);
                bmax = bmax.max(b);
            }
        }
        let mut out = Vec::new();
        for n in (bmin.floor() as i32 - 1)..=(bmax.ceil() as i32 + 1) {
            for m in (amin.floor() as i32 - 1)..=(amax.ceil() as i32 + 1) {
                for v in 0..self.graph.vertex_count() {
                    let o = Offset::new(m, n);
                    let z = self.lift(v, o);
                    if window.contains(z) {
                        out.push(Lift { vertex: v, offset: o, position: z });
                    }
                }
            }
        }
        Ok(out)
    }

    /// Dual vertex positions and the duality bookkeeping they refer to.
    pub fn dual_geometry(&self, placement: DualPlacement) -> Result<DualGeometry> {
        let duality = self.graph.duality()?;
        let g = &*self.graph;
        let positions = g
            .faces()
            .iter()
            .map(|cycle| {
                let corners: Vec<Complex64> = cycle
                    .iter()
                    .map(|&h| self.positions[g.source(h)] - self.translation(duality.corner[h]))
                    .collect();
                match placement {
                    DualPlacement::Centroid => corners.iter().sum::<Complex64>() / corners.len() as f64,
                    DualPlacement::Circumcenter => circumcenter(&corners),
                }
            })
            .collect();
        Ok(DualGeometry { duality, positions, periods: self.periods })
    }

    /// `psi(e)` for every half-edge; requires a 3-regular graph.
    pub fn psi_all(&self, placement: DualPlacement) -> Result<Vec<Complex64>> {
        let g = &*self.graph;
        if !g.is_three_regular() {
            return Err(Error::input("psi is only defined on 3-regular graphs"));
        }
        let dual = self.dual_geometry(placement)?;
        let t = tau();
        Ok((0..g.half_edge_count())
            .map(|h| {
                let h1 = g.next(h);
                let h2 = g.next(h1);
                dual.edge_vector(h) + t * dual.edge_vector(h1) + t * t * dual.edge_vector(h2)
            })
            .collect())
    }

    pub fn psi(&self, h: HalfEdgeId) -> Result<Complex64> {
        Ok(self.psi_all(DualPlacement::Centroid)?[h])
    }
}

/// The dual graph placed inside an embedding.
#[derive(Debug, Clone)]
pub struct DualGeometry {
    pub duality: Duality,
    /// Position of the representative lift of each face.
    pub positions: Vec<Complex64>,
    pub periods: [Complex64; 2],
}

impl DualGeometry {
    fn translation(&self, o: Offset) -> Complex64 {
        self.periods[0] * o.m as f64 + self.periods[1] * o.n as f64
    }

    /// Vector of the dual edge crossing primal half-edge `h`, from the face
    /// on the right of `h` to the face on its left.
    pub fn edge_vector(&self, h: HalfEdgeId) -> Complex64 {
        let d = &self.duality.dual;
        self.positions[d.target(h)] + self.translation(d.offset(h)) - self.positions[d.source(h)]
    }

    /// The dual as an embedding in its own right.
    pub fn embedding(&self) -> Result<Embedding> {
        Embedding::from_parts(Arc::new(self.duality.dual.clone()), self.positions.clone(), self.periods)
    }
}

/// Least-squares circle center through `points`.
fn circumcenter(points: &[Complex64]) -> Complex64 {
    // |p|^2 = 2 c.p + k, unknowns (cx, cy, k).
    let n = points.len();
    let mut a = DMatrix::<f64>::zeros(n, 3);
    let mut b = DVector::<f64>::zeros(n);
    for (i, p) in points.iter().enumerate() {
        a[(i, 0)] = 2.0 * p.re;
        a[(i, 1)] = 2.0 * p.im;
        a[(i, 2)] = 1.0;
        b[i] = p.norm_sqr();
    }
    let ata = a.transpose() * &a;
    let atb = a.transpose() * b;
    match ata.lu().solve(&atb) {
        Some(x) => Complex64::new(x[0], x[1]),
        None => points.iter().sum::<Complex64>() / n as f64,
    }
}
