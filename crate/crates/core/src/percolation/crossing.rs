//! Crossing events between boundary arcs.

use num_complex::Complex64;

use super::domain::{BoundaryArc, DiscreteDomain};
use super::{check_probability, check_trials, Configuration, TrialRng};
use crate::error::{Error, Result};
use crate::parallel::{map_chunks, Workers};
use crate::stats::{Counts, CrossingStats};
use crate::unionfind::UnionFind;

fn require_marks(dom: &DiscreteDomain, n: usize) -> Result<()> {
    if dom.marks().len() < n {
        return Err(Error::input(format!("need {n} marks, domain has {}", dom.marks().len())));
    }
    Ok(())
}

fn check_len(dom: &DiscreteDomain, cfg: &Configuration) -> Result<()> {
    if cfg.len() != dom.site_count() {
        return Err(Error::input(format!("configuration has {} sites, domain {}", cfg.len(), dom.site_count())));
    }
    Ok(())
}

/// Whether sites of colour `open` join arc `from` to arc `to` (inclusive
/// arcs), by union-find over the sites of that colour.
pub fn crossing_from_marks(dom: &DiscreteDomain, cfg: &Configuration, from: BoundaryArc, to: BoundaryArc, open: bool) -> Result<bool> {
    check_len(dom, cfg)?;
    let n = dom.site_count();
    let mut uf = UnionFind::new(n);
    for s in 0..n {
        if cfg.open[s] != open {
            continue;
        }
        for &t in dom.neighbours(s) {
            let t = t as usize;
            if t > s && cfg.open[t] == open {
                uf.union(s, t);
            }
        }
    }
    let b = dom.boundary();
    let mut roots: Vec<usize> =
        from.indices().map(|i| b[i] as usize).filter(|&s| cfg.open[s] == open).map(|s| uf.find(s)).collect();
    roots.sort_unstable();
    Ok(to.indices().map(|i| b[i] as usize).filter(|&s| cfg.open[s] == open).any(|s| roots.binary_search(&uf.find(s)).is_ok()))
}

/// Open crossing from `[A, B]` to `[C, D]`.
pub fn crossing(dom: &DiscreteDomain, cfg: &Configuration) -> Result<bool> {
    require_marks(dom, 4)?;
    crossing_from_marks(dom, cfg, dom.arc(0, 1), dom.arc(2, 3), true)
}

/// Closed crossing from `[B, C]` to `[D, A]`; on a triangulation exactly one
/// of this and [`crossing`] happens.
pub fn closed_crossing(dom: &DiscreteDomain, cfg: &Configuration) -> Result<bool> {
    require_marks(dom, 4)?;
    crossing_from_marks(dom, cfg, dom.arc(1, 2), dom.arc(3, 0), false)
}

/// Per-worker buffers for the lazily sampled flood.
#[derive(Debug, Clone)]
pub struct CrossingScratch {
    stamp: u32,
    sampled: Vec<u32>,
    state: Vec<bool>,
    visited: Vec<u32>,
    stack: Vec<u32>,
}

impl CrossingScratch {
    pub fn new(dom: &DiscreteDomain) -> Self {
        let n = dom.site_count();
        CrossingScratch { stamp: 0, sampled: vec![0; n], state: vec![false; n], visited: vec![0; n], stack: Vec::new() }
    }

    fn next_trial(&mut self) {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.sampled.fill(0);
            self.visited.fill(0);
            self.stamp = 1;
        }
    }

    #[inline]
    fn open(&mut self, dom: &DiscreteDomain, rng: &TrialRng, s: usize) -> bool {
        if self.sampled[s] != self.stamp {
            self.sampled[s] = self.stamp;
            self.state[s] = rng.open(dom, s);
        }
        self.state[s]
    }

    /// Floods the open clusters of the sites on `from`, sampling only sites
    /// it touches, and returns the smallest position along `along` that the
    /// flood reaches.
    fn first_reached(&mut self, dom: &DiscreteDomain, rng: &TrialRng, from: BoundaryArc, along: BoundaryArc) -> Option<usize> {
        self.next_trial();
        let b = dom.boundary();
        for i in from.indices() {
            let s = b[i] as usize;
            if self.visited[s] != self.stamp && self.open(dom, rng, s) {
                self.visited[s] = self.stamp;
                self.stack.push(s as u32);
            }
        }
        let mut best: Option<usize> = None;
        let span = (along.end + along.len - along.start) % along.len;
        while let Some(s) = self.stack.pop() {
            let s = s as usize;
            if let Some(i) = dom.boundary_index(s) {
                let rel = (i + along.len - along.start) % along.len;
                if rel <= span && best.is_none_or(|x| rel < x) {
                    best = Some(rel);
                }
            }
            for &t in dom.neighbours(s) {
                let t = t as usize;
                if self.visited[t] != self.stamp && self.open(dom, rng, t) {
                    self.visited[t] = self.stamp;
                    self.stack.push(t as u32);
                }
            }
        }
        best
    }
}

/// Monte Carlo estimate of the open crossing probability from `[A, B]` to
/// `[C, D]`. Trial `k` uses replicate `k`.
pub fn estimate_crossing(dom: &DiscreteDomain, p: f64, trials: u64, seed: u64, workers: Workers) -> Result<CrossingStats> {
    require_marks(dom, 4)?;
    check_probability(p)?;
    check_trials(trials)?;
    let (from, to) = (dom.arc(0, 1), dom.arc(2, 3));
    let span = (to.end + to.len - to.start) % to.len;
    let chunks = map_chunks(trials, workers, |range| {
        let mut scratch = CrossingScratch::new(dom);
        let mut counts = Counts::default();
        for k in range {
            let rng = TrialRng::new(seed, k, p);
            counts.record(scratch.first_reached(dom, &rng, from, to).is_some_and(|r| r <= span));
        }
        counts
    });
    let mut total = Counts::default();
    chunks.iter().for_each(|c| total.merge(c));
    Ok(total.stats())
}

/// Crossing probabilities from `[A, B]` to `[C, D]` for several points `D`
/// on the arc from `C` to `A`, all from the same trials. `dom` carries the
/// marks `A, B, C`.
pub fn estimate_cardy(
    dom: &DiscreteDomain,
    d_points: &[Complex64],
    p: f64,
    trials: u64,
    seed: u64,
    workers: Workers,
) -> Result<Vec<CrossingStats>> {
    require_marks(dom, 3)?;
    check_probability(p)?;
    check_trials(trials)?;
    let (a, b, c) = (dom.mark_points()[0], dom.mark_points()[1], dom.mark_points()[2]);
    let along = dom.arc(2, 0);
    let mut spans = Vec::with_capacity(d_points.len());
    for &d in d_points {
        let four = dom.with_marks(&[a, b, c, d])?;
        let i = four.marks()[3];
        spans.push((i + along.len - along.start) % along.len);
    }
    let from = dom.arc(0, 1);
    let chunks = map_chunks(trials, workers, |range| {
        let mut scratch = CrossingScratch::new(dom);
        let mut counts = vec![Counts::default(); spans.len()];
        for k in range {
            let rng = TrialRng::new(seed, k, p);
            let reached = scratch.first_reached(dom, &rng, from, along);
            for (c, &span) in counts.iter_mut().zip(&spans) {
                c.record(reached.is_some_and(|r| r <= span));
            }
        }
        counts
    });
    let mut total = vec![Counts::default(); spans.len()];
    for chunk in &chunks {
        for (t, c) in total.iter_mut().zip(chunk) {
            t.merge(c);
        }
    }
    Ok(total.iter().map(Counts::stats).collect())
}

/// Runs the same trials on `dom` and on `refined` (a refinement of it whose
/// added sites get their own independent states) and counts the trials whose
/// crossing indicators differ.
pub fn refinement_mismatches(
    dom: &DiscreteDomain,
    refined: &DiscreteDomain,
    p: f64,
    trials: u64,
    seed: u64,
    workers: Workers,
) -> Result<u64> {
    require_marks(dom, 4)?;
    require_marks(refined, 4)?;
    check_probability(p)?;
    check_trials(trials)?;
    let chunks = map_chunks(trials, workers, |range| {
        let mut s1 = CrossingScratch::new(dom);
        let mut s2 = CrossingScratch::new(refined);
        range
            .filter(|&k| {
                let rng = TrialRng::new(seed, k, p);
                trial_crossing(dom, &mut s1, &rng) != trial_crossing(refined, &mut s2, &rng)
            })
            .count() as u64
    });
    Ok(chunks.iter().sum())
}

fn trial_crossing(dom: &DiscreteDomain, scratch: &mut CrossingScratch, rng: &TrialRng) -> bool {
    let (from, to) = (dom.arc(0, 1), dom.arc(2, 3));
    let span = (to.end + to.len - to.start) % to.len;
    scratch.first_reached(dom, rng, from, to).is_some_and(|r| r <= span)
}
