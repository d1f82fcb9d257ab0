//! Periodic circle packings of torus triangulations.
//!
//! Radii come from the uniform-neighbour iteration: at each vertex, pretend
//! all neighbours share one radius that reproduces the current angle sum,
//! then pick the radius that would make that uniform flower close up
//! exactly. The layout places faces one at a time across a breadth-first
//! tree of the face adjacency, and the period vectors are fitted from the
//! placed edge vectors.

use std::collections::VecDeque;
use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Offset, TorusGraph};

#[derive(Debug, Clone, Copy)]
pub struct PackingOptions {
    /// Target for the largest angle-sum deviation from 2 pi.
    pub tolerance: f64,
    pub max_iterations: u64,
}

impl Default for PackingOptions {
    fn default() -> Self {
        PackingOptions { tolerance: 1e-12, max_iterations: 1_000_000 }
    }
}

/// A packing normalised so that the first period is 1 and the second lies in
/// the upper half-plane.
#[derive(Debug, Clone, Serialize)]
pub struct CirclePacking {
    pub radii: Vec<f64>,
    pub centers: Vec<Complex64>,
    pub periods: [Complex64; 2],
    /// Largest deviation of an angle sum from 2 pi.
    pub angle_residual: f64,
    /// Largest `| |c_u - c_v| - (r_u + r_v) |` over edges, in normalised units.
    pub tangency_error: f64,
    /// Largest misfit of the placed edge vectors against a pure-translation
    /// model of the deck group (zero when the holonomy has no rotation part).
    pub holonomy_error: f64,
    pub iterations: u64,
}

impl CirclePacking {
    pub fn modulus(&self) -> Complex64 {
        self.periods[1] / self.periods[0]
    }
}

/// Angle at a circle of radius `r` in the triangle formed with tangent
/// circles of radii `a` and `b`.
fn corner_angle(r: f64, a: f64, b: f64) -> f64 {
    let (x, y, z) = (r + a, r + b, a + b);
    ((x * x + y * y - z * z) / (2.0 * x * y)).clamp(-1.0, 1.0).acos()
}

fn angle_sums(tri: &TorusGraph, radii: &[f64], out: &mut [f64]) {
    out.fill(0.0);
    for cycle in tri.faces() {
        let [a, b, c] = [tri.source(cycle[0]), tri.source(cycle[1]), tri.source(cycle[2])];
        out[a] += corner_angle(radii[a], radii[b], radii[c]);
        out[b] += corner_angle(radii[b], radii[c], radii[a]);
        out[c] += corner_angle(radii[c], radii[a], radii[b]);
    }
}

fn residual(sums: &[f64]) -> f64 {
    sums.iter().map(|s| (s - TAU).abs()).fold(0.0, f64::max)
}

pub fn pack(tri: &TorusGraph, opts: PackingOptions) -> Result<CirclePacking> {
    if tri.faces().iter().any(|f| f.len() != 3) {
        return Err(Error::input("circle packing needs a triangulation"));
    }
    if let Some(v) = (0..tri.vertex_count()).find(|&v| tri.degree(v) < 3) {
        return Err(Error::Degenerate(format!("vertex {v} has degree {} < 3", tri.degree(v))));
    }
    let n = tri.vertex_count();
    let mut radii = vec![1.0; n];
    let mut sums = vec![0.0; n];
    let mut corners: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for cycle in tri.faces() {
        let [a, b, c] = [tri.source(cycle[0]), tri.source(cycle[1]), tri.source(cycle[2])];
        corners[a].push((b, c));
        corners[b].push((c, a));
        corners[c].push((a, b));
    }

    let mut iterations = 0;
    angle_sums(tri, &radii, &mut sums);
    let mut res = residual(&sums);
    while res > opts.tolerance {
        if iterations >= opts.max_iterations {
            return Err(Error::NonConvergence { iterations, residual: res });
        }
        for v in 0..n {
            let k = corners[v].len() as f64;
            let theta: f64 = corners[v].iter().map(|&(a, b)| corner_angle(radii[v], radii[a], radii[b])).sum();
            let beta = (theta / (2.0 * k)).sin();
            let delta = (PI / k).sin();
            let neighbour = radii[v] * beta / (1.0 - beta);
            radii[v] = neighbour * (1.0 - delta) / delta;
        }
        let scale = radii[0];
        radii.iter_mut().for_each(|r| *r /= scale);
        iterations += 1;
        angle_sums(tri, &radii, &mut sums);
        let next = residual(&sums);
        // Rounding floor just above a very tight tolerance: stop instead of
        // spinning until the iteration cap.
        let stalled = next >= res && next < 1e3 * opts.tolerance;
        res = next;
        if stalled {
            break;
        }
    }

    let (centers, periods, holonomy_error) = layout(tri, &radii)?;

    // Normalise: first period to 1, second into the upper half-plane.
    let s = periods[0].inv();
    let flip = (periods[1] * s).im < 0.0;
    let f = |z: Complex64| if flip { (z * s).conj() } else { z * s };
    let scale = s.norm();
    let centers: Vec<Complex64> = centers.into_iter().map(f).collect();
    let periods = [f(periods[0]), f(periods[1])];
    let radii: Vec<f64> = radii.into_iter().map(|r| r * scale).collect();

    let mut tangency_error: f64 = 0.0;
    for h in 0..tri.half_edge_count() {
        let (u, v) = (tri.source(h), tri.target(h));
        let o = tri.offset(h);
        let d = centers[v] + periods[0] * o.m as f64 + periods[1] * o.n as f64 - centers[u];
        tangency_error = tangency_error.max((d.norm() - radii[u] - radii[v]).abs());
    }

    Ok(CirclePacking {
        radii,
        centers,
        periods,
        angle_residual: res,
        tangency_error,
        holonomy_error: holonomy_error * scale,
        iterations,
    })
}

/// Places every face once and fits centres plus periods to the placed edge
/// vectors by least squares.
fn layout(tri: &TorusGraph, radii: &[f64]) -> Result<(Vec<Complex64>, [Complex64; 2], f64)> {
    let faces = tri.faces();
    let fcount = faces.len();
    // Placed centre of each corner of each face, indexed like the face cycle.
    let mut placed: Vec<Option<[Complex64; 3]>> = vec![None; fcount];
    let position_in_face = |h: usize| faces[tri.face_of(h)].iter().position(|&x| x == h).unwrap();

    let [h0, h1, _] = [faces[0][0], faces[0][1], faces[0][2]];
    let (a, b, c) = (tri.source(h0), tri.source(h1), tri.source(faces[0][2]));
    let za = Complex64::new(0.0, 0.0);
    let zb = Complex64::new(radii[a] + radii[b], 0.0);
    let zc = za + Complex64::from_polar(radii[a] + radii[c], corner_angle(radii[a], radii[b], radii[c]));
    placed[0] = Some([za, zb, zc]);

    let mut queue = VecDeque::from([0usize]);
    while let Some(f) = queue.pop_front() {
        let pts = placed[f].unwrap();
        for (j, &h) in faces[f].iter().enumerate() {
            let t = tri.twin(h);
            let g = tri.face_of(t);
            if placed[g].is_some() {
                continue;
            }
            // Across edge h: twin runs from h's target back to h's source.
            let p = pts[(j + 1) % 3];
            let q = pts[j];
            let i = position_in_face(t);
            let x = tri.source(faces[g][(i + 2) % 3]);
            let (rp, rq, rx) = (radii[tri.source(t)], radii[tri.target(t)], radii[x]);
            let dir = (q - p).arg() + corner_angle(rp, rq, rx);
            let z = p + Complex64::from_polar(rp + rx, dir);
            let mut new = [Complex64::new(0.0, 0.0); 3];
            new[i] = p;
            new[(i + 1) % 3] = q;
            new[(i + 2) % 3] = z;
            placed[g] = Some(new);
            queue.push_back(g);
        }
    }
    if placed.iter().any(Option::is_none) {
        return Err(Error::Internal("face adjacency is disconnected".into()));
    }

    // Unknowns: centres of vertices 1.. (vertex 0 pinned at its first
    // placement is not needed: pin c_0 = 0) and the two periods.
    let n = tri.vertex_count();
    let cols = n - 1 + 2;
    let rows = tri.half_edge_count();
    let mut m = DMatrix::<f64>::zeros(rows, cols);
    let mut rhs_re = DVector::<f64>::zeros(rows);
    let mut rhs_im = DVector::<f64>::zeros(rows);
    for (f, cycle) in faces.iter().enumerate() {
        let pts = placed[f].unwrap();
        for (j, &h) in cycle.iter().enumerate() {
            let e = pts[(j + 1) % 3] - pts[j];
            let (s, t) = (tri.source(h), tri.target(h));
            let o: Offset = tri.offset(h);
            if t != 0 {
                m[(h, t - 1)] += 1.0;
            }
            if s != 0 {
                m[(h, s - 1)] -= 1.0;
            }
            m[(h, n - 1)] = o.m as f64;
            m[(h, n)] = o.n as f64;
            rhs_re[h] = e.re;
            rhs_im[h] = e.im;
        }
    }
    let mt = m.transpose();
    let normal = &mt * &m;
    let chol = normal
        .cholesky()
        .ok_or_else(|| Error::Internal("period fit is singular".into()))?;
    let xr = chol.solve(&(&mt * &rhs_re));
    let xi = chol.solve(&(&mt * &rhs_im));
    let fit_re = &m * &xr - &rhs_re;
    let fit_im = &m * &xi - &rhs_im;
    let misfit = (0..rows).map(|r| fit_re[r].hypot(fit_im[r])).fold(0.0, f64::max);

    let mut centers = vec![Complex64::new(0.0, 0.0); n];
    for v in 1..n {
        centers[v] = Complex64::new(xr[v - 1], xi[v - 1]);
    }
    let periods = [Complex64::new(xr[n - 1], xi[n - 1]), Complex64::new(xr[n], xi[n])];
    Ok((centers, periods, misfit))
}

/// The packing modulus of a triangulation.
pub fn alpha_cp(tri: &TorusGraph) -> Result<Complex64> {
    Ok(pack(tri, PackingOptions::default())?.modulus())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Builtin;

    #[test]
    fn corner_angle_of_equal_circles() {
        assert!((corner_angle(1.0, 1.0, 1.0) - PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn honeycomb_dual_has_equal_radii() {
        let p = pack(&Builtin::Honeycomb.graph().dual().unwrap(), PackingOptions::default()).unwrap();
        assert!((p.radii[0] - p.radii[1]).abs() < 1e-12);
    }

    #[test]
    fn square_octagon_dual_has_two_sizes() {
        let p = pack(&Builtin::SquareOctagon.graph().dual().unwrap(), PackingOptions::default()).unwrap();
        assert!((p.radii[0] - p.radii[1]).abs() > 1e-3);
        assert!(p.angle_residual < 1e-10);
    }

    #[test]
    fn iteration_cap_reports_residual() {
        let tri = Builtin::SquareOctagonRefined.graph().dual().unwrap();
        match pack(&tri, PackingOptions { tolerance: 1e-12, max_iterations: 1 }) {
            Err(Error::NonConvergence { iterations, residual }) => {
                assert_eq!(iterations, 1);
                assert!(residual > 0.0);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn non_triangulation_rejected() {
        assert!(pack(&Builtin::SquareOctagon.graph(), PackingOptions::default()).is_err());
    }
}
