//! Discrete contour integrals of the separation fields.

use std::collections::VecDeque;

use num_complex::Complex64;
use serde::Serialize;

use super::domain::{DiscreteDomain, Link};
use super::separation::{fill_separation, increments, EdgeRef, Separation, SeparationScratch};
use super::{check_probability, check_trials, TrialRng};
use crate::embedding::tau;
use crate::error::{Error, Result};
use crate::parallel::{map_chunks, Workers};
use crate::stats::Moments;

/// A closed chain of points, each adjacent to the next (the last to the
/// first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contour {
    points: Vec<usize>,
}

impl Contour {
    /// `chain` must repeat its first point at the end.
    pub fn new(dom: &DiscreteDomain, chain: &[usize]) -> Result<Self> {
        if chain.len() < 4 || chain.first() != chain.last() {
            return Err(Error::input("contour is not closed (the chain must end where it starts)"));
        }
        let points = chain[..chain.len() - 1].to_vec();
        let c = Contour { points };
        c.edges(dom)?;
        Ok(c)
    }

    /// Points nearest to a circle, joined into an adjacent chain by shortest
    /// paths.
    pub fn circle(dom: &DiscreteDomain, center: Complex64, radius: f64) -> Result<Self> {
        if dom.points().is_empty() || !(radius > 0.0) {
            return Err(Error::input("circle contour needs a positive radius"));
        }
        let spacing = mean_link_length(dom);
        let samples = ((std::f64::consts::TAU * radius / (0.5 * spacing)).ceil() as usize).max(8);
        let mut anchors: Vec<usize> = Vec::with_capacity(samples);
        for z in crate::geometry::circle(center, radius, samples) {
            let p = dom.nearest_point(z);
            if anchors.last() != Some(&p) {
                anchors.push(p);
            }
        }
        while anchors.len() > 1 && anchors.first() == anchors.last() {
            anchors.pop();
        }
        if anchors.len() < 3 {
            return Err(Error::input("circle is too small for the mesh"));
        }
        let mut chain = Vec::new();
        for k in 0..anchors.len() {
            let path = shortest_path(dom, anchors[k], anchors[(k + 1) % anchors.len()])
                .ok_or_else(|| Error::input("contour leaves the domain"))?;
            chain.extend_from_slice(&path[..path.len() - 1]);
        }
        Ok(Contour { points: chain })
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn positions(&self, dom: &DiscreteDomain) -> Vec<Complex64> {
        self.points.iter().map(|&p| dom.points()[p].position).collect()
    }

    /// Oriented edges with both ends on or inside the chain.
    pub fn enclosed_edges(&self, dom: &DiscreteDomain) -> Vec<EdgeRef> {
        let poly = self.positions(dom);
        let mut on_chain = vec![false; dom.points().len()];
        for &p in &self.points {
            on_chain[p] = true;
        }
        let inside: Vec<bool> =
            dom.points().iter().enumerate().map(|(i, p)| on_chain[i] || winding(&poly, p.position) != 0).collect();
        let mut out = Vec::new();
        for (i, p) in dom.points().iter().enumerate() {
            if !inside[i] {
                continue;
            }
            for (j, l) in p.across.iter().enumerate() {
                if let Link::Point(q) = l {
                    if inside[*q as usize] {
                        out.push(EdgeRef { point: i as u32, side: j as u8 });
                    }
                }
            }
        }
        out
    }

    /// Edge `k` goes from point `k` to point `k + 1` (cyclically).
    pub fn edges(&self, dom: &DiscreteDomain) -> Result<Vec<EdgeRef>> {
        let n = self.points.len();
        (0..n)
            .map(|k| {
                let (z, w) = (self.points[k], self.points[(k + 1) % n]);
                let p = dom.points().get(z).ok_or_else(|| Error::input(format!("point {z} is not in the domain")))?;
                let side = p
                    .across
                    .iter()
                    .position(|&l| l == Link::Point(w as u32))
                    .ok_or_else(|| Error::input(format!("contour points {z} and {w} are not adjacent")))?;
                Ok(EdgeRef { point: z as u32, side: side as u8 })
            })
            .collect()
    }
}

fn winding(poly: &[Complex64], z: Complex64) -> i32 {
    let n = poly.len();
    let mut w = 0;
    for k in 0..n {
        let (a, b) = (poly[k], poly[(k + 1) % n]);
        let cross = (b - a).re * (z - a).im - (b - a).im * (z - a).re;
        if a.im <= z.im {
            if b.im > z.im && cross > 0.0 {
                w += 1;
            }
        } else if b.im <= z.im && cross < 0.0 {
            w -= 1;
        }
    }
    w
}

fn mean_link_length(dom: &DiscreteDomain) -> f64 {
    let pts = dom.points();
    let (mut sum, mut n) = (0.0, 0usize);
    for p in pts.iter().take(64) {
        for l in p.across {
            if let Link::Point(q) = l {
                sum += (pts[q as usize].position - p.position).norm();
                n += 1;
            }
        }
    }
    if n == 0 {
        dom.mesh()
    } else {
        sum / n as f64
    }
}

fn shortest_path(dom: &DiscreteDomain, from: usize, to: usize) -> Option<Vec<usize>> {
    let pts = dom.points();
    let mut prev = vec![usize::MAX; pts.len()];
    prev[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            break;
        }
        for l in pts[x].across {
            if let Link::Point(q) = l {
                let q = q as usize;
                if prev[q] == usize::MAX {
                    prev[q] = x;
                    queue.push_back(q);
                }
            }
        }
    }
    if prev[to] == usize::MAX {
        return None;
    }
    let mut path = vec![to];
    while *path.last().unwrap() != from {
        path.push(prev[*path.last().unwrap()]);
    }
    path.reverse();
    Some(path)
}

/// `sum f(z_k) (z_{k+1} - z_k)` around a closed chain.
pub fn riemann_sum(positions: &[Complex64], values: &[Complex64]) -> Complex64 {
    let n = positions.len();
    (0..n).map(|k| values[k] * (positions[(k + 1) % n] - positions[k])).sum()
}

/// A complex mean with standard errors of its two parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexEstimate {
    pub value: Complex64,
    pub se: [f64; 2],
}

impl ComplexEstimate {
    fn from_moments(re: &Moments, im: &Moments) -> Self {
        ComplexEstimate { value: Complex64::new(re.mean(), im.mean()), se: [re.standard_error(), im.standard_error()] }
    }

    pub fn abs(&self) -> f64 {
        self.value.norm()
    }

    /// Conservative error of `abs()`: the length of the error vector.
    pub fn abs_se(&self) -> f64 {
        self.se[0].hypot(self.se[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourIntegrals {
    pub trials: u64,
    pub length: usize,
    pub s: ComplexEstimate,
    pub h: ComplexEstimate,
    /// `sum psi(e) P_A(e)` over the oriented edges enclosed by the chain,
    /// when `psi` was supplied.
    pub edge_sum: Option<ComplexEstimate>,
}

#[derive(Debug, Clone, Default)]
struct Acc {
    m: [Moments; 6],
}

/// Monte Carlo contour integrals of `S` and `H` (and optionally the
/// `psi`-weighted sum of `P_A` over the enclosed edges). Each trial contributes its own Riemann
/// sums, so the errors account for correlations along the contour.
/// `psi` is indexed by half-edge of the domain's triangulation.
pub fn contour_integrals(
    dom: &DiscreteDomain,
    contour: &Contour,
    psi: Option<&[Complex64]>,
    p: f64,
    trials: u64,
    seed: u64,
    workers: Workers,
) -> Result<ContourIntegrals> {
    check_probability(p)?;
    check_trials(trials)?;
    if dom.marks().len() < 3 {
        return Err(Error::input("contour integrals need marks A, B, C"));
    }
    if let Some(psi) = psi {
        if psi.len() != dom.triangulation().half_edge_count() {
            return Err(Error::input("psi must have one value per half-edge"));
        }
    }
    contour.edges(dom)?;
    let edges = if psi.is_some() { contour.enclosed_edges(dom) } else { Vec::new() };
    let positions = contour.positions(dom);
    let n = positions.len();
    let dz: Vec<Complex64> = (0..n).map(|k| positions[(k + 1) % n] - positions[k]).collect();
    let weights: Option<Vec<Complex64>> = psi.map(|psi| edges.iter().map(|e| psi[e.half_edge(dom)]).collect());
    let ends: Vec<(usize, usize)> = edges.iter().map(|e| (e.point as usize, e.target(dom))).collect();
    let t = tau();
    let chunks = map_chunks(trials, workers, |range| {
        let mut scratch = SeparationScratch::new(dom);
        let mut sep = Separation::default();
        let mut open = vec![false; dom.site_count()];
        let mut acc = Acc::default();
        for k in range {
            let rng = TrialRng::new(seed, k, p);
            for (s, o) in open.iter_mut().enumerate() {
                *o = rng.open(dom, s);
            }
            fill_separation(dom, &open, &mut scratch, &mut sep);
            let (mut s_sum, mut h_sum, mut e_sum) = (Complex64::default(), Complex64::default(), Complex64::default());
            for (k, &z) in contour.points().iter().enumerate() {
                let (a, b, c) = (sep.a[z] as u8 as f64, sep.b[z] as u8 as f64, sep.c[z] as u8 as f64);
                s_sum += (a + b + c) * dz[k];
                h_sum += (a + t * b + t * t * c) * dz[k];
            }
            if let Some(w) = &weights {
                for (&(from, to), &wk) in ends.iter().zip(w) {
                    if increments(&sep, from, to)[0] {
                        e_sum += wk;
                    }
                }
            }
            for (m, x) in acc.m.iter_mut().zip([s_sum.re, s_sum.im, h_sum.re, h_sum.im, e_sum.re, e_sum.im]) {
                m.push(x);
            }
        }
        acc
    });
    let mut total = Acc::default();
    for c in &chunks {
        for (t, m) in total.m.iter_mut().zip(&c.m) {
            t.merge(m);
        }
    }
    let m = &total.m;
    Ok(ContourIntegrals {
        trials,
        length: n,
        s: ComplexEstimate::from_moments(&m[0], &m[1]),
        h: ComplexEstimate::from_moments(&m[2], &m[3]),
        edge_sum: psi.map(|_| ComplexEstimate::from_moments(&m[4], &m[5])),
    })
}
