//! Edge-increment ratios on growing domains, and shifted-domain couplings.

use num_complex::Complex64;
use serde::Serialize;

use super::domain::DiscreteDomain;
use super::separation::{fill_separation, increments, EdgeRef, Separation, SeparationScratch};
use super::{check_probability, check_trials, TrialRng};
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::geometry::Polygon;
use crate::graph::{HalfEdgeId, Offset};
use crate::parallel::{map_chunks, Workers};
use crate::stats::{CrossingStats, Estimate};

#[derive(Debug, Clone)]
pub struct PiRatioOptions {
    /// Circumradii of the regular-polygon domains, at mesh 1.
    pub radii: Vec<f64>,
    /// Polygon side count; must be a multiple of 12 so the marks sit on
    /// corners.
    pub sides: usize,
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    pub workers: Workers,
}

impl Default for PiRatioOptions {
    fn default() -> Self {
        PiRatioOptions { radii: vec![4.0, 8.0, 16.0], sides: 48, p: 0.5, trials: 10_000, seed: 0, workers: Workers::default() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PiRatioRow {
    pub radius: f64,
    pub sites: usize,
    /// `P_A` of the numerator and denominator edge of each pair.
    pub increments: Vec<(CrossingStats, CrossingStats)>,
    /// `P_A(e) / P_A(e')`, with a delta-method standard error.
    pub ratios: Vec<Estimate>,
}

/// Locates the lift of half-edge `h` whose source point is closest to `z`.
pub fn edge_near(dom: &DiscreteDomain, h: HalfEdgeId, z: Complex64) -> Result<EdgeRef> {
    let mut best: Option<(f64, usize, usize)> = None;
    for (i, p) in dom.points().iter().enumerate() {
        if let Some(j) = p.edges.iter().position(|&e| e == h) {
            let d = (p.position - z).norm_sqr();
            if best.is_none_or(|b| d < b.0) && EdgeRef::new(dom, i, j).is_ok() {
                best = Some((d, i, j));
            }
        }
    }
    let (_, i, j) = best.ok_or_else(|| Error::input(format!("half-edge {h} has no interior lift in the domain")))?;
    EdgeRef::new(dom, i, j)
}

/// Ratios `P_A(e) / P_A(e')` at mesh 1 on regular polygons of growing
/// radius centred at the origin, marks at 90, 210 and 330 degrees. Each pair
/// is a pair of triangulation half-edges, located at their lifts nearest the
/// centre.
pub fn pi_ratio(tri: &Embedding, pairs: &[(HalfEdgeId, HalfEdgeId)], opts: &PiRatioOptions) -> Result<Vec<PiRatioRow>> {
    check_probability(opts.p)?;
    check_trials(opts.trials)?;
    if opts.sides == 0 || !opts.sides.is_multiple_of(12) {
        return Err(Error::input("polygon side count must be a positive multiple of 12"));
    }
    let origin = Complex64::new(0.0, 0.0);
    let mut rows = Vec::with_capacity(opts.radii.len());
    for &r in &opts.radii {
        let shape = Polygon::regular(origin, r, opts.sides)?;
        let marks: Vec<Complex64> = [90.0f64, 210.0, 330.0]
            .iter()
            .map(|deg| shape.vertices()[(deg / 360.0 * opts.sides as f64).round() as usize % opts.sides])
            .collect();
        let dom = DiscreteDomain::new(tri, shape, 1.0, &marks)?;
        let edges: Vec<(EdgeRef, EdgeRef)> = pairs
            .iter()
            .map(|&(e, f)| Ok((edge_near(&dom, e, origin)?, edge_near(&dom, f, origin)?)))
            .collect::<Result<_>>()?;
        let stats = paired_increments(&dom, &edges, opts.p, opts.trials, opts.seed, opts.workers);
        let mut increments = Vec::new();
        let mut ratios = Vec::new();
        for s in &stats {
            let n = opts.trials as f64;
            let (x, y, xy) = (s.x as f64 / n, s.y as f64 / n, s.xy as f64 / n);
            if s.y == 0 {
                return Err(Error::InsufficientTrials(format!(
                    "denominator edge never had an increment in {} trials at radius {r}",
                    opts.trials
                )));
            }
            let ratio = x / y;
            // Delta method with the sample (co)variances of the indicators.
            let (vx, vy, cxy) = (x * (1.0 - x), y * (1.0 - y), xy - x * y);
            let var = (vx - 2.0 * ratio * cxy + ratio * ratio * vy) / (y * y * n);
            increments.push((CrossingStats::from_counts(opts.trials, s.x), CrossingStats::from_counts(opts.trials, s.y)));
            ratios.push(Estimate::new(ratio, var.max(0.0).sqrt()));
        }
        rows.push(PiRatioRow { radius: r, sites: dom.site_count(), increments, ratios });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, Default)]
struct PairCounts {
    x: u64,
    y: u64,
    xy: u64,
}

fn paired_increments(
    dom: &DiscreteDomain,
    edges: &[(EdgeRef, EdgeRef)],
    p: f64,
    trials: u64,
    seed: u64,
    workers: Workers,
) -> Vec<PairCounts> {
    let ends: Vec<[(usize, usize); 2]> = edges
        .iter()
        .map(|(e, f)| [(e.point as usize, e.target(dom)), (f.point as usize, f.target(dom))])
        .collect();
    let chunks = map_chunks(trials, workers, |range| {
        let mut scratch = SeparationScratch::new(dom);
        let mut sep = Separation::default();
        let mut open = vec![false; dom.site_count()];
        let mut counts = vec![PairCounts::default(); edges.len()];
        for k in range {
            let rng = TrialRng::new(seed, k, p);
            for (s, o) in open.iter_mut().enumerate() {
                *o = rng.open(dom, s);
            }
            fill_separation(dom, &open, &mut scratch, &mut sep);
            for (c, [(a, b), (u, v)]) in counts.iter_mut().zip(&ends) {
                let x = increments(&sep, *a, *b)[0];
                let y = increments(&sep, *u, *v)[0];
                c.x += x as u64;
                c.y += y as u64;
                c.xy += (x && y) as u64;
            }
        }
        counts
    });
    let mut total = vec![PairCounts::default(); edges.len()];
    for chunk in &chunks {
        for (t, c) in total.iter_mut().zip(chunk) {
            t.x += c.x;
            t.y += c.y;
            t.xy += c.xy;
        }
    }
    total
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ShiftComparison {
    /// `P_A` of the edge in the original domain.
    pub original: CrossingStats,
    /// `P_A` of the same lattice edge in the domain moved by `-shift`.
    pub shifted: CrossingStats,
    /// Paired difference `original - shifted`.
    pub difference: Estimate,
    pub relative_difference: f64,
}

/// Compares `P_A(e)` in `dom` and in `dom` translated by minus the lattice
/// vector `shift`, with site states shared by lattice identity.
pub fn shifted_pa_comparison(
    dom: &DiscreteDomain,
    edge: EdgeRef,
    shift: Offset,
    p: f64,
    trials: u64,
    seed: u64,
    workers: Workers,
) -> Result<ShiftComparison> {
    check_probability(p)?;
    check_trials(trials)?;
    EdgeRef::new(dom, edge.point as usize, edge.side as usize)?;
    let moved = dom.translated(shift);
    let pt = &dom.points()[edge.point as usize];
    let there = moved
        .find_point(pt.face, pt.offset)
        .ok_or_else(|| Error::input("edge leaves the shifted domain"))?;
    let edge2 = EdgeRef::new(&moved, there, edge.side as usize).map_err(|_| Error::input("edge leaves the shifted domain"))?;
    let e1 = (edge.point as usize, edge.target(dom));
    let e2 = (edge2.point as usize, edge2.target(&moved));
    let chunks = map_chunks(trials, workers, |range| {
        let mut s1 = SeparationScratch::new(dom);
        let mut s2 = SeparationScratch::new(&moved);
        let (mut sep1, mut sep2) = (Separation::default(), Separation::default());
        let mut open1 = vec![false; dom.site_count()];
        let mut open2 = vec![false; moved.site_count()];
        let mut c = PairCounts::default();
        for k in range {
            let rng = TrialRng::new(seed, k, p);
            for (s, o) in open1.iter_mut().enumerate() {
                *o = rng.open(dom, s);
            }
            for (s, o) in open2.iter_mut().enumerate() {
                *o = rng.open(&moved, s);
            }
            fill_separation(dom, &open1, &mut s1, &mut sep1);
            fill_separation(&moved, &open2, &mut s2, &mut sep2);
            let x = increments(&sep1, e1.0, e1.1)[0];
            let y = increments(&sep2, e2.0, e2.1)[0];
            c.x += x as u64;
            c.y += y as u64;
            c.xy += (x && y) as u64;
        }
        c
    });
    let mut t = PairCounts::default();
    for c in &chunks {
        t.x += c.x;
        t.y += c.y;
        t.xy += c.xy;
    }
    let n = trials as f64;
    let (x, y) = (t.x as f64 / n, t.y as f64 / n);
    // The difference of two indicators takes values -1, 0, 1.
    let ones = (t.x - t.xy) as f64;
    let minus = (t.y - t.xy) as f64;
    let mean = (ones - minus) / n;
    let second = (ones + minus) / n;
    let var = if trials > 1 { (second - mean * mean) * n / (n - 1.0) } else { 0.0 };
    let original = CrossingStats::from_counts(trials, t.x);
    let shifted = CrossingStats::from_counts(trials, t.y);
    Ok(ShiftComparison {
        original,
        shifted,
        difference: Estimate::new(mean, (var.max(0.0) / n).sqrt()),
        relative_difference: if y > 0.0 { x / y - 1.0 } else { f64::NAN },
    })
}
