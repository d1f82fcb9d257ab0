//! Separation events and the fields built from them.
//!
//! `E_A(z)` holds when a simple open path from arc `[C, A]` to arc `[A, B]`
//! cuts the point `z` off from the arc `[B, C]`. Treat the exterior of the
//! two arcs `[C, A]` and `[A, B]` as one extra vertex joined to the open
//! sites touching it. Such paths, closed up through that vertex, are exactly
//! the cycles through it, and the edges lying on such cycles are the edges
//! of the biconnected blocks that contain it. So the event is decided by a
//! breadth-first search from the exterior of `[B, C]` that may not cross
//! those edges or pass those sites along the boundary. Open loops hanging
//! off a single cut vertex do not block.

use num_complex::Complex64;
use serde::Serialize;

use super::domain::{DiscreteDomain, Link};
use super::{check_probability, check_trials, Configuration, TrialRng};
use crate::embedding::tau;
use crate::error::{Error, Result};
use crate::parallel::{map_chunks, Workers};
use crate::stats::{Counts, CrossingStats, Estimate, Moments};
use crate::unionfind::UnionFind;

const ARC_AB: u8 = 1;
const ARC_BC: u8 = 2;
const ARC_CA: u8 = 4;

/// One oriented edge between two points: side `side` of point `point`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct EdgeRef {
    pub point: u32,
    pub side: u8,
}

impl EdgeRef {
    pub fn new(dom: &DiscreteDomain, point: usize, side: usize) -> Result<Self> {
        let p = dom
            .points()
            .get(point)
            .ok_or_else(|| Error::input(format!("point {point} is not in the domain")))?;
        if side > 2 {
            return Err(Error::input(format!("side must be 0, 1 or 2, got {side}")));
        }
        match p.across[side] {
            Link::Point(_) => Ok(EdgeRef { point: point as u32, side: side as u8 }),
            Link::Slot(_) => Err(Error::input(format!("side {side} of point {point} is on the boundary"))),
        }
    }

    /// Point at the other end.
    pub fn target(&self, dom: &DiscreteDomain) -> usize {
        match dom.points()[self.point as usize].across[self.side as usize] {
            Link::Point(q) => q as usize,
            Link::Slot(_) => unreachable!("edge refs are interior"),
        }
    }

    /// The edge rotated counterclockwise by `k` thirds of a turn about its
    /// source point (the next edge of the 3-regular graph, `k` times).
    pub fn rotated(&self, k: usize) -> EdgeRef {
        EdgeRef { point: self.point, side: ((self.side as usize + k) % 3) as u8 }
    }

    /// Triangulation half-edge crossed by this edge; as a half-edge of the
    /// 3-regular graph it is this edge itself.
    pub fn half_edge(&self, dom: &DiscreteDomain) -> usize {
        dom.points()[self.point as usize].edges[self.side as usize]
    }
}

/// `E_A`, `E_B`, `E_C` at every point of one configuration.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Separation {
    pub a: Vec<bool>,
    pub b: Vec<bool>,
    pub c: Vec<bool>,
}

impl Separation {
    pub fn get(&self, x: usize) -> &[bool] {
        match x {
            0 => &self.a,
            1 => &self.b,
            _ => &self.c,
        }
    }
}

/// Reusable buffers for [`separation_events`].
#[derive(Debug, Clone)]
pub struct SeparationScratch {
    uf: UnionFind,
    mask: Vec<u8>,
    slot_owner: Vec<u32>,
    reached: Vec<bool>,
    queue: Vec<u32>,
    member: Vec<u8>,
    disc: Vec<u32>,
    low: Vec<u32>,
    parent: Vec<u32>,
    order: Vec<u32>,
    in_block: Vec<bool>,
    dfs: Vec<(u32, u32)>,
    hub: Vec<u32>,
}

impl SeparationScratch {
    pub fn new(dom: &DiscreteDomain) -> Self {
        let mut slot_owner = vec![u32::MAX; dom.boundary().len()];
        for (i, p) in dom.points().iter().enumerate() {
            for link in p.across {
                if let Link::Slot(s) = link {
                    slot_owner[s as usize] = i as u32;
                }
            }
        }
        SeparationScratch {
            uf: UnionFind::new(dom.site_count()),
            mask: vec![0; dom.site_count()],
            slot_owner,
            reached: vec![false; dom.points().len() + dom.boundary().len()],
            queue: Vec::new(),
            member: vec![0; dom.site_count()],
            disc: vec![0; dom.site_count() + 1],
            low: vec![0; dom.site_count() + 1],
            parent: vec![0; dom.site_count() + 1],
            order: Vec::new(),
            in_block: vec![false; dom.site_count()],
            dfs: Vec::new(),
            hub: Vec::new(),
        }
    }
}

/// Computes the three separation events at every point.
pub fn separation_events(dom: &DiscreteDomain, cfg: &Configuration) -> Result<Separation> {
    if dom.marks().len() < 3 {
        return Err(Error::input("separation events need marks A, B, C"));
    }
    if cfg.len() != dom.site_count() {
        return Err(Error::input("configuration does not match the domain"));
    }
    let mut scratch = SeparationScratch::new(dom);
    let mut out = Separation::default();
    fill_separation(dom, &cfg.open, &mut scratch, &mut out);
    Ok(out)
}

pub(crate) fn fill_separation(dom: &DiscreteDomain, open: &[bool], scratch: &mut SeparationScratch, out: &mut Separation) {
    let n = dom.site_count();
    let uf = &mut scratch.uf;
    uf.reset();
    for s in 0..n {
        if !open[s] {
            continue;
        }
        for &t in dom.neighbours(s) {
            let t = t as usize;
            if t > s && open[t] {
                uf.union(s, t);
            }
        }
    }
    scratch.mask.fill(0);
    let (ab, bc, ca) = (dom.arc(0, 1), dom.arc(1, 2), dom.arc(2, 0));
    for (i, &s) in dom.boundary().iter().enumerate() {
        let s = s as usize;
        if !open[s] {
            continue;
        }
        let bits = ((ab.contains(i) as u8) * ARC_AB) | ((bc.contains(i) as u8) * ARC_BC) | ((ca.contains(i) as u8) * ARC_CA);
        let r = uf.find(s);
        scratch.mask[r] |= bits;
    }
    // Per site: bit x set when its cluster touches both arcs ending at mark x.
    for s in 0..n {
        scratch.member[s] = 0;
        if open[s] {
            let m = scratch.mask[uf.find(s)];
            let has = |bits: u8| m & bits == bits;
            scratch.member[s] =
                (has(ARC_CA | ARC_AB) as u8) | (has(ARC_AB | ARC_BC) as u8) << 1 | (has(ARC_BC | ARC_CA) as u8) << 2;
        }
    }
    let len = dom.boundary().len();
    let marks = dom.marks();
    for (x, dest) in [&mut out.a, &mut out.b, &mut out.c].into_iter().enumerate() {
        // Slots from mark x+1 up to mark x+2 are the far arc; the rest is
        // the exterior joined to the separating paths.
        let (from, to) = (marks[(x + 1) % 3], marks[(x + 2) % 3]);
        let span = (to + len - from) % len;
        let far = |i: usize| (i + len - from) % len < span;
        mark_blocks(dom, scratch, 1u8 << x, &far);
        reach_from_slots(dom, scratch, (0..span).map(|k| (from + k) % len));
        let np = dom.points().len();
        dest.clear();
        dest.extend(scratch.reached[..np].iter().map(|r| !r));
    }
}

/// Sets `in_block` for the member sites lying in a biconnected block with
/// the exterior vertex (iterative Tarjan, rooted at the exterior).
fn mark_blocks(dom: &DiscreteDomain, scratch: &mut SeparationScratch, bit: u8, far: &dyn Fn(usize) -> bool) {
    let n = dom.site_count();
    let len = dom.boundary().len();
    let root = n;
    let member = &scratch.member;
    let is_member = |s: usize| member[s] & bit != 0;
    // Sites touching a slot outside the far arc.
    let touches_hub = |s: usize| {
        dom.boundary_index(s).is_some_and(|b| !far(b) || !far((b + len - 1) % len))
    };
    scratch.hub.clear();
    for &s in dom.boundary() {
        if is_member(s as usize) && touches_hub(s as usize) {
            scratch.hub.push(s);
        }
    }
    scratch.disc.fill(0);
    scratch.in_block.fill(false);
    scratch.order.clear();
    let (disc, low, parent) = (&mut scratch.disc, &mut scratch.low, &mut scratch.parent);
    let mut counter = 1u32;
    disc[root] = counter;
    low[root] = counter;
    scratch.dfs.clear();
    scratch.dfs.push((root as u32, 0));
    while let Some(top) = scratch.dfs.last_mut() {
        let v = top.0 as usize;
        let k = top.1 as usize;
        top.1 += 1;
        let next = if v == root {
            scratch.hub.get(k).map(|&w| w as usize)
        } else {
            let nb = dom.neighbours(v);
            if k < nb.len() {
                Some(nb[k] as usize)
            } else if k == nb.len() && touches_hub(v) {
                Some(root)
            } else {
                None
            }
        };
        match next {
            None => {
                scratch.dfs.pop();
                if let Some(&(p, _)) = scratch.dfs.last() {
                    let p = p as usize;
                    low[p] = low[p].min(low[v]);
                }
            }
            Some(w) if w != root && !is_member(w) => {}
            Some(w) => {
                if disc[w] == 0 {
                    counter += 1;
                    disc[w] = counter;
                    low[w] = counter;
                    parent[w] = v as u32;
                    scratch.order.push(w as u32);
                    scratch.dfs.push((w as u32, 0));
                } else if w != parent[v] as usize || v == root {
                    low[v] = low[v].min(disc[w]);
                }
            }
        }
    }
    for &w in &scratch.order {
        let w = w as usize;
        let p = parent[w] as usize;
        scratch.in_block[w] = p == root || (low[w] < disc[p] && scratch.in_block[p]);
    }
}

fn reach_from_slots(dom: &DiscreteDomain, scratch: &mut SeparationScratch, seeds: impl Iterator<Item = usize>) {
    let np = dom.points().len();
    let len = dom.boundary().len();
    let in_block = &scratch.in_block;
    let blocked = |s: u32| in_block[s as usize];
    scratch.reached.fill(false);
    scratch.queue.clear();
    for i in seeds {
        if !scratch.reached[np + i] {
            scratch.reached[np + i] = true;
            scratch.queue.push((np + i) as u32);
        }
    }
    let boundary = dom.boundary();
    let points = dom.points();
    let (reached, queue) = (&mut scratch.reached, &mut scratch.queue);
    let visit = |m: usize, reached: &mut Vec<bool>, queue: &mut Vec<u32>| {
        if !reached[m] {
            reached[m] = true;
            queue.push(m as u32);
        }
    };
    while let Some(node) = queue.pop() {
        let node = node as usize;
        if node < np {
            let p = &points[node];
            for j in 0..3 {
                if blocked(p.corners[j]) && blocked(p.corners[(j + 1) % 3]) {
                    continue;
                }
                let m = match p.across[j] {
                    Link::Point(q) => q as usize,
                    Link::Slot(i) => np + i as usize,
                };
                visit(m, reached, queue);
            }
        } else {
            let i = node - np;
            let (s, t) = (boundary[i], boundary[(i + 1) % len]);
            if !(blocked(s) && blocked(t)) {
                visit(scratch.slot_owner[i] as usize, reached, queue);
            }
            if !blocked(s) {
                visit(np + (i + len - 1) % len, reached, queue);
            }
            if !blocked(t) {
                visit(np + (i + 1) % len, reached, queue);
            }
        }
    }
}

/// Estimates of the separation fields at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldRecord {
    pub point: usize,
    pub position: Complex64,
    /// Occurrence counts of `E_A`, `E_B`, `E_C` and their sum.
    pub counts: [u64; 3],
    pub trials: u64,
    pub h_a: CrossingStats,
    pub h_b: CrossingStats,
    pub h_c: CrossingStats,
    pub s: Estimate,
    pub h: Complex64,
    /// Standard errors of the real and imaginary parts of `h`.
    pub h_se: [f64; 2],
}

#[derive(Debug, Clone, Default)]
struct FieldAcc {
    counts: [u64; 3],
    s: Moments,
    re: Moments,
    im: Moments,
}

/// Monte Carlo estimates of `H_A`, `H_B`, `H_C`, their sum `S` and the
/// combination `H = H_A + tau H_B + tau^2 H_C` at the given points.
pub fn estimate_h(
    dom: &DiscreteDomain,
    points: &[usize],
    p: f64,
    trials: u64,
    seed: u64,
    workers: Workers,
) -> Result<Vec<FieldRecord>> {
    check_probability(p)?;
    check_trials(trials)?;
    if dom.marks().len() < 3 {
        return Err(Error::input("separation fields need marks A, B, C"));
    }
    if let Some(&z) = points.iter().find(|&&z| z >= dom.points().len()) {
        return Err(Error::input(format!("point {z} is not in the domain")));
    }
    let t = tau();
    let chunks = map_chunks(trials, workers, |range| {
        let mut scratch = SeparationScratch::new(dom);
        let mut sep = Separation::default();
        let mut open = vec![false; dom.site_count()];
        let mut acc = vec![FieldAcc::default(); points.len()];
        for k in range {
            let rng = TrialRng::new(seed, k, p);
            for (s, o) in open.iter_mut().enumerate() {
                *o = rng.open(dom, s);
            }
            fill_separation(dom, &open, &mut scratch, &mut sep);
            for (a, &z) in acc.iter_mut().zip(points) {
                let e = [sep.a[z], sep.b[z], sep.c[z]];
                for x in 0..3 {
                    a.counts[x] += e[x] as u64;
                }
                a.s.push((e[0] as u8 + e[1] as u8 + e[2] as u8) as f64);
                let h = e[0] as u8 as f64 + t * e[1] as u8 as f64 + t * t * e[2] as u8 as f64;
                a.re.push(h.re);
                a.im.push(h.im);
            }
        }
        acc
    });
    let mut total = vec![FieldAcc::default(); points.len()];
    for chunk in &chunks {
        for (t, c) in total.iter_mut().zip(chunk) {
            for x in 0..3 {
                t.counts[x] += c.counts[x];
            }
            t.s.merge(&c.s);
            t.re.merge(&c.re);
            t.im.merge(&c.im);
        }
    }
    Ok(points
        .iter()
        .zip(&total)
        .map(|(&z, a)| FieldRecord {
            point: z,
            position: dom.points()[z].position,
            counts: a.counts,
            trials,
            h_a: CrossingStats::from_counts(trials, a.counts[0]),
            h_b: CrossingStats::from_counts(trials, a.counts[1]),
            h_c: CrossingStats::from_counts(trials, a.counts[2]),
            s: Estimate::from_moments(&a.s),
            h: Complex64::new(a.re.mean(), a.im.mean()),
            h_se: [a.re.standard_error(), a.im.standard_error()],
        })
        .collect())
}

/// Increment probabilities across one edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IncrementRecord {
    pub edge: EdgeRef,
    /// `P[E_X(target) and not E_X(source)]` for `X = A, B, C`.
    pub pa: CrossingStats,
    pub pb: CrossingStats,
    pub pc: CrossingStats,
}

pub(crate) fn increments(sep: &Separation, from: usize, to: usize) -> [bool; 3] {
    [sep.a[to] && !sep.a[from], sep.b[to] && !sep.b[from], sep.c[to] && !sep.c[from]]
}

/// Monte Carlo estimates of `P_A`, `P_B`, `P_C` on each edge.
pub fn estimate_pa(
    dom: &DiscreteDomain,
    edges: &[EdgeRef],
    p: f64,
    trials: u64,
    seed: u64,
    workers: Workers,
) -> Result<Vec<IncrementRecord>> {
    check_probability(p)?;
    check_trials(trials)?;
    if dom.marks().len() < 3 {
        return Err(Error::input("increment probabilities need marks A, B, C"));
    }
    for e in edges {
        EdgeRef::new(dom, e.point as usize, e.side as usize)?;
    }
    let ends: Vec<(usize, usize)> = edges.iter().map(|e| (e.point as usize, e.target(dom))).collect();
    let chunks = map_chunks(trials, workers, |range| {
        let mut scratch = SeparationScratch::new(dom);
        let mut sep = Separation::default();
        let mut open = vec![false; dom.site_count()];
        let mut counts = vec![[Counts::default(); 3]; edges.len()];
        for k in range {
            let rng = TrialRng::new(seed, k, p);
            for (s, o) in open.iter_mut().enumerate() {
                *o = rng.open(dom, s);
            }
            fill_separation(dom, &open, &mut scratch, &mut sep);
            for (c, &(z, w)) in counts.iter_mut().zip(&ends) {
                let inc = increments(&sep, z, w);
                for x in 0..3 {
                    c[x].record(inc[x]);
                }
            }
        }
        counts
    });
    let mut total = vec![[Counts::default(); 3]; edges.len()];
    for chunk in &chunks {
        for (t, c) in total.iter_mut().zip(chunk) {
            for x in 0..3 {
                t[x].merge(&c[x]);
            }
        }
    }
    Ok(edges
        .iter()
        .zip(&total)
        .map(|(&edge, c)| IncrementRecord { edge, pa: c[0].stats(), pb: c[1].stats(), pc: c[2].stats() })
        .collect())
}
