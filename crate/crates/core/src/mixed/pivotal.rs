//! Pivotal sites, the q-derivative of crossing probabilities and the
//! pivotality gap between neighbouring face centres.

use serde::Serialize;

use super::{
    check_q, crosses, site_uniforms, states_from, touches_both, MixedConfig, MixedDomain, SiteKind, ARC_AB, ARC_BC,
    ARC_CD, ARC_DA,
};
use crate::error::{Error, Result};
use crate::parallel::{map_chunks, Workers};
use crate::stats::{Counts, CrossingStats, Estimate, Moments};
use crate::unionfind::UnionFind;

/// Pivotal sites for the crossing event, split by type.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PivotalSets {
    pub type_i: Vec<usize>,
    pub type_ii: Vec<usize>,
    pub type_iii: Vec<usize>,
}

impl PivotalSets {
    pub fn contains(&self, s: usize) -> bool {
        self.type_i.contains(&s) || self.type_ii.contains(&s) || self.type_iii.contains(&s)
    }

    pub fn len(&self) -> usize {
        self.type_i.len() + self.type_ii.len() + self.type_iii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Per-domain data and buffers for pivotality tests.
struct Pivots<'a> {
    dom: &'a MixedDomain,
    /// Whether the neighbours of a site stay connected among themselves.
    ring: Vec<bool>,
    uf: UnionFind,
}

impl<'a> Pivots<'a> {
    fn new(dom: &'a MixedDomain) -> Self {
        let ring = (0..dom.site_count()).map(|s| ring_connected(dom, s)).collect();
        Pivots { dom, ring, uf: UnionFind::new(dom.site_count()) }
    }

    /// Sites whose flip cannot matter: off the arcs, with a single-coloured
    /// neighbourhood that is closed, or open and connected around the site.
    fn may_be_pivotal(&self, open: &[bool], s: usize) -> bool {
        if self.dom.arc_bits(s) != 0 {
            return true;
        }
        let nb = self.dom.neighbours(s);
        let opened = nb.iter().filter(|&&t| open[t as usize]).count();
        !(opened == 0 || (opened == nb.len() && self.ring[s]))
    }

    /// Exact pivotality by evaluating the event with `s` open and closed;
    /// `current` is the event for `open` itself.
    fn pivotal(&mut self, open: &mut [bool], s: usize, current: bool) -> bool {
        // With s in its current state the event is `current`; only the other
        // state needs evaluating.
        let was = open[s];
        open[s] = !was;
        let flipped = crosses(self.dom, open, &mut self.uf, None);
        open[s] = was;
        if was {
            current && !flipped
        } else {
            flipped && !current
        }
    }

    fn sets(&mut self, open: &mut [bool]) -> PivotalSets {
        let current = crosses(self.dom, open, &mut self.uf, None);
        let mut out = PivotalSets::default();
        for s in 0..self.dom.site_count() {
            // An open site can only be pivotal when the event holds, a closed
            // one only when it fails.
            if open[s] != current || !self.may_be_pivotal(open, s) {
                continue;
            }
            if self.pivotal(open, s, current) {
                match self.dom.kind(s) {
                    SiteKind::I => out.type_i.push(s),
                    SiteKind::II => out.type_ii.push(s),
                    SiteKind::III => out.type_iii.push(s),
                }
            }
        }
        out
    }
}

fn ring_connected(dom: &MixedDomain, s: usize) -> bool {
    let nb = dom.neighbours(s);
    if nb.is_empty() {
        return true;
    }
    let mut seen = vec![false; nb.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for (j, &t) in nb.iter().enumerate() {
            if !seen[j] && dom.neighbours(nb[i] as usize).contains(&t) {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.iter().all(|&x| x)
}

/// Sites `v` such that the crossing holds with `v` open and fails with `v`
/// closed.
pub fn pivotal_sites(dom: &MixedDomain, cfg: &MixedConfig) -> Result<PivotalSets> {
    if cfg.open.len() != dom.site_count() {
        return Err(Error::input("configuration does not match the domain"));
    }
    let mut open = cfg.open.clone();
    Ok(Pivots::new(dom).sets(&mut open))
}

/// Pivotality read off the arms at `v`: with `v` removed, open clusters of
/// its neighbours reach `AB` and `CD`, closed ones reach `BC` and `DA`
/// (a site on an arc is its own arm), and neither colour crosses without
/// `v`.
pub fn four_arm_pivotal(dom: &MixedDomain, cfg: &MixedConfig, v: usize) -> Result<bool> {
    if cfg.open.len() != dom.site_count() || v >= dom.site_count() {
        return Err(Error::input("configuration or site does not match the domain"));
    }
    let n = dom.site_count();
    let mut arms = [false; 4];
    for colour in [true, false] {
        let ok = |s: usize| s != v && cfg.open[s] == colour;
        let mut uf = UnionFind::new(n);
        for s in 0..n {
            if ok(s) {
                for &t in dom.neighbours(s) {
                    if ok(t as usize) {
                        uf.union(s, t as usize);
                    }
                }
            }
        }
        let (a, b) = if colour { (ARC_AB, ARC_CD) } else { (ARC_BC, ARC_DA) };
        if touches_both(dom, &mut uf, ok, a, b) {
            return Ok(false);
        }
        let mut reach = [false; 4];
        let mut root_arcs = vec![0u8; n];
        for s in 0..n {
            if ok(s) {
                let r = uf.find(s);
                root_arcs[r] |= dom.arc_bits(s);
            }
        }
        for &t in dom.neighbours(v) {
            let t = t as usize;
            if ok(t) {
                let bits = root_arcs[uf.find(t)];
                for (arc, r) in reach.iter_mut().enumerate() {
                    *r |= bits >> arc & 1 == 1;
                }
            }
        }
        for (arc, r) in reach.iter_mut().enumerate() {
            *r |= dom.on_arc(v, arc);
        }
        arms[a] = reach[a];
        arms[b] = reach[b];
    }
    Ok(arms.iter().all(|&x| x))
}

/// Monte Carlo estimate of `E[|Piv ∩ V2| - |Piv ∩ V3|]`, the q-derivative of
/// the crossing probability.
pub fn russo_derivative(dom: &MixedDomain, q: f64, trials: u64, seed: u64, workers: Workers) -> Result<Estimate> {
    check_q(q)?;
    check_trials(trials)?;
    let chunks = map_chunks(trials, workers, |range| {
        let mut piv = Pivots::new(dom);
        let (mut u, mut open) = (Vec::new(), Vec::new());
        let mut m = Moments::default();
        for k in range {
            site_uniforms(dom, seed, k, &mut u);
            states_from(dom, &u, q, &mut open);
            let sets = piv.sets(&mut open);
            m.push(sets.type_ii.len() as f64 - sets.type_iii.len() as f64);
        }
        m
    });
    let mut total = Moments::default();
    chunks.iter().for_each(|c| total.merge(c));
    Ok(Estimate::from_moments(&total))
}

pub(super) fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        Err(Error::input("at least one trial is required"))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterpolationPoint {
    pub q: f64,
    pub crossing: CrossingStats,
    pub derivative: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interpolation {
    pub points: Vec<InterpolationPoint>,
    /// Crossing probability at the last grid value minus the first, from
    /// paired trials.
    pub difference: Estimate,
    /// Trapezoidal integral of the derivative estimates over the grid; its
    /// error adds the weighted errors (valid under any correlation).
    pub quadrature: Estimate,
}

impl Interpolation {
    /// Whether the difference and the quadrature agree within `k` combined
    /// standard errors.
    pub fn agrees(&self, k: f64) -> bool {
        (self.difference.value - self.quadrature.value).abs()
            <= k * (self.difference.standard_error + self.quadrature.standard_error) + 1e-12
    }
}

#[derive(Debug, Clone, Default)]
struct GridAcc {
    cross: Vec<Counts>,
    deriv: Vec<Moments>,
    diff: Moments,
}

/// Crossing probabilities and derivative estimates on a grid of `q` values
/// in `[0, 1/2]`, all from the same trials (site variables are shared, so
/// the samples are coupled across the grid).
pub fn interpolate(dom: &MixedDomain, q_grid: &[f64], trials: u64, seed: u64, workers: Workers) -> Result<Interpolation> {
    if q_grid.is_empty() {
        return Err(Error::input("q grid is empty"));
    }
    if q_grid.iter().any(|&q| !(0.0..=0.5).contains(&q)) || q_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::input("q grid must be sorted and lie in [0, 1/2]"));
    }
    check_trials(trials)?;
    let g = q_grid.len();
    let chunks = map_chunks(trials, workers, |range| {
        let mut piv = Pivots::new(dom);
        let (mut u, mut open) = (Vec::new(), Vec::new());
        let mut acc = GridAcc { cross: vec![Counts::default(); g], deriv: vec![Moments::default(); g], ..Default::default() };
        for k in range {
            site_uniforms(dom, seed, k, &mut u);
            let mut ends = (false, false);
            for (i, &q) in q_grid.iter().enumerate() {
                states_from(dom, &u, q, &mut open);
                let hit = crosses(dom, &open, &mut piv.uf, None);
                let sets = piv.sets(&mut open);
                acc.cross[i].record(hit);
                acc.deriv[i].push(sets.type_ii.len() as f64 - sets.type_iii.len() as f64);
                if i == 0 {
                    ends.0 = hit;
                }
                if i == g - 1 {
                    ends.1 = hit;
                }
            }
            acc.diff.push(ends.1 as u8 as f64 - ends.0 as u8 as f64);
        }
        acc
    });
    let mut total = GridAcc { cross: vec![Counts::default(); g], deriv: vec![Moments::default(); g], ..Default::default() };
    for c in &chunks {
        for i in 0..g {
            total.cross[i].merge(&c.cross[i]);
            total.deriv[i].merge(&c.deriv[i]);
        }
        total.diff.merge(&c.diff);
    }
    let points: Vec<InterpolationPoint> = (0..g)
        .map(|i| InterpolationPoint {
            q: q_grid[i],
            crossing: total.cross[i].stats(),
            derivative: Estimate::from_moments(&total.deriv[i]),
        })
        .collect();
    let (mut value, mut se) = (0.0, 0.0);
    for w in points.windows(2) {
        let h = w[1].q - w[0].q;
        value += 0.5 * h * (w[0].derivative.value + w[1].derivative.value);
        se += 0.5 * h * (w[0].derivative.standard_error + w[1].derivative.standard_error);
    }
    Ok(Interpolation { points, difference: Estimate::from_moments(&total.diff), quadrature: Estimate::new(value, se) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PivotalGap {
    pub v: usize,
    pub w: usize,
    pub pivotal_v: CrossingStats,
    pub pivotal_w: CrossingStats,
    /// Paired estimate of `P[v pivotal] - P[w pivotal]`.
    pub difference: Estimate,
}

/// Paired estimate of `P[v pivotal] - P[w pivotal]` from shared samples.
pub fn pivotal_gap(dom: &MixedDomain, v: usize, w: usize, q: f64, trials: u64, seed: u64, workers: Workers) -> Result<PivotalGap> {
    check_q(q)?;
    check_trials(trials)?;
    if v >= dom.site_count() || w >= dom.site_count() {
        return Err(Error::input("site is not in the domain"));
    }
    let chunks = map_chunks(trials, workers, |range| {
        let mut piv = Pivots::new(dom);
        let (mut u, mut open) = (Vec::new(), Vec::new());
        let (mut cv, mut cw, mut d) = (Counts::default(), Counts::default(), Moments::default());
        for k in range {
            site_uniforms(dom, seed, k, &mut u);
            states_from(dom, &u, q, &mut open);
            let current = crosses(dom, &open, &mut piv.uf, None);
            let a = piv.pivotal(&mut open, v, current);
            let b = if w == v { a } else { piv.pivotal(&mut open, w, current) };
            cv.record(a);
            cw.record(b);
            d.push(a as u8 as f64 - b as u8 as f64);
        }
        (cv, cw, d)
    });
    let (mut cv, mut cw, mut d) = (Counts::default(), Counts::default(), Moments::default());
    for (a, b, m) in &chunks {
        cv.merge(a);
        cw.merge(b);
        d.merge(m);
    }
    Ok(PivotalGap { v, w, pivotal_v: cv.stats(), pivotal_w: cw.stats(), difference: Estimate::from_moments(&d) })
}

/// The gap between a type-II face centre `v` and the centre one lattice step
/// to its right.
pub fn delta_v(dom: &MixedDomain, v: usize, q: f64, trials: u64, seed: u64, workers: Workers) -> Result<PivotalGap> {
    if v >= dom.site_count() || dom.kind(v) != SiteKind::II {
        return Err(Error::input("delta_v needs a type-II face centre"));
    }
    let (x, y) = dom.doubled_coords(v);
    let (k, l) = (((x - 1) / 2) as usize, ((y - 1) / 2) as usize);
    let w = dom.face_centre(k + 1, l).ok_or_else(|| Error::input("the site to the right is outside the domain"))?;
    pivotal_gap(dom, v, w, q, trials, seed, workers)
}
