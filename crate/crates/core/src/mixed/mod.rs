//! Mixed percolation on the centered square lattice.
//!
//! Integer sites (type I) are open with probability 1/2; face centres
//! `(k + 1/2, l + 1/2)` are type II when `k + l` is even (open with
//! probability `q`) and type III otherwise (open with probability `1 - q`).
//! At `q = 0` or `q = 1` the model is bond percolation on a square lattice
//! (through its covering graph); at `q = 1/2` it is homogeneous site
//! percolation on the centered square lattice.

mod exact;
mod pivotal;

pub use exact::{exact_polynomial, Observable, Polynomial, EXACT_SITE_LIMIT};
pub use pivotal::{
    delta_v, four_arm_pivotal, interpolate, pivotal_gap, pivotal_sites, russo_derivative, Interpolation,
    InterpolationPoint, PivotalGap, PivotalSets,
};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::parallel::{map_chunks, Workers};
use crate::rng::{stream, CounterRng};
use crate::stats::{CrossingStats, Counts};
use crate::unionfind::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SiteKind {
    /// Integer site, open with probability 1/2.
    I,
    /// Face centre open with probability `q`.
    II,
    /// Face centre open with probability `1 - q`.
    III,
}

impl SiteKind {
    pub fn open_probability(self, q: f64) -> f64 {
        match self {
            SiteKind::I => 0.5,
            SiteKind::II => q,
            SiteKind::III => 1.0 - q,
        }
    }
}

/// Boundary arcs of the crossing event, between consecutive marks.
pub const ARC_AB: usize = 0;
pub const ARC_BC: usize = 1;
pub const ARC_CD: usize = 2;
pub const ARC_DA: usize = 3;

/// A `width x height` rectangle of the centered square lattice with four
/// marks on its perimeter.
#[derive(Debug, Clone)]
pub struct MixedDomain {
    width: usize,
    height: usize,
    /// Which face-centre parity is type II; flipping it is the same as
    /// shifting the rectangle by one lattice step.
    parity: usize,
    kinds: Vec<SiteKind>,
    coords: Vec<(i64, i64)>,
    adj_start: Vec<u32>,
    adj: Vec<u32>,
    perimeter: Vec<u32>,
    marks: Vec<usize>,
    mark_points: Vec<Complex64>,
    /// Bit `a` set when the site lies on arc `a` (marks on both incident
    /// arcs; face centres on none).
    arcs: Vec<u8>,
}

impl MixedDomain {
    /// Integer sites `(k, l)`, `0 <= k <= width`, `0 <= l <= height`, and the
    /// centres of the `width * height` unit faces. One of the extents may be
    /// zero (a segment without faces).
    pub fn new(width: usize, height: usize, marks: &[Complex64]) -> Result<Self> {
        Self::with_parity(width, height, 0, marks)
    }

    pub fn with_parity(width: usize, height: usize, parity: usize, marks: &[Complex64]) -> Result<Self> {
        if width == 0 && height == 0 {
            return Err(Error::input("rectangle must have a positive extent"));
        }
        if (width + 1) * (height + 1) + width * height > u32::MAX as usize / 2 {
            return Err(Error::Resource("rectangle too large".into()));
        }
        let parity = parity % 2;
        let cols = width + 1;
        let n_int = cols * (height + 1);
        let mut kinds = Vec::with_capacity(n_int + width * height);
        let mut coords = Vec::with_capacity(kinds.capacity());
        for l in 0..=height {
            for k in 0..=width {
                kinds.push(SiteKind::I);
                coords.push((2 * k as i64, 2 * l as i64));
            }
        }
        for l in 0..height {
            for k in 0..width {
                kinds.push(if (k + l + parity).is_multiple_of(2) { SiteKind::II } else { SiteKind::III });
                coords.push((2 * k as i64 + 1, 2 * l as i64 + 1));
            }
        }
        let int_id = |k: usize, l: usize| (l * cols + k) as u32;
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); kinds.len()];
        for l in 0..=height {
            for k in 0..=width {
                let s = int_id(k, l) as usize;
                if k < width {
                    lists[s].push(int_id(k + 1, l));
                    lists[int_id(k + 1, l) as usize].push(s as u32);
                }
                if l < height {
                    lists[s].push(int_id(k, l + 1));
                    lists[int_id(k, l + 1) as usize].push(s as u32);
                }
            }
        }
        for l in 0..height {
            for k in 0..width {
                let c = (n_int + l * width + k) as u32;
                for s in [int_id(k, l), int_id(k + 1, l), int_id(k + 1, l + 1), int_id(k, l + 1)] {
                    lists[c as usize].push(s);
                    lists[s as usize].push(c);
                }
            }
        }
        let mut adj_start = Vec::with_capacity(lists.len() + 1);
        let mut adj = Vec::new();
        adj_start.push(0);
        for mut list in lists {
            list.sort_unstable();
            adj.extend(list);
            adj_start.push(adj.len() as u32);
        }

        // Counterclockwise from the origin.
        let mut perimeter = Vec::with_capacity(2 * (width + height));
        perimeter.extend((0..width).map(|k| int_id(k, 0)));
        perimeter.extend((0..height).map(|l| int_id(width, l)));
        perimeter.extend((1..=width).rev().map(|k| int_id(k, height)));
        perimeter.extend((1..=height).rev().map(|l| int_id(0, l)));

        let mut dom = MixedDomain {
            width,
            height,
            parity,
            kinds,
            coords,
            adj_start,
            adj,
            perimeter,
            marks: Vec::new(),
            mark_points: Vec::new(),
            arcs: Vec::new(),
        };
        dom.set_marks(marks)?;
        Ok(dom)
    }

    fn set_marks(&mut self, marks: &[Complex64]) -> Result<()> {
        if marks.len() != 4 {
            return Err(Error::input(format!("mixed domains take four marks, got {}", marks.len())));
        }
        let (w, h) = (self.width as f64, self.height as f64);
        let tol = 1e-9 * (1.0 + w + h);
        let mut idx = Vec::with_capacity(4);
        for (k, &z) in marks.iter().enumerate() {
            let inside = z.re >= -tol && z.re <= w + tol && z.im >= -tol && z.im <= h + tol;
            let on_side =
                z.re.abs() <= tol || (z.re - w).abs() <= tol || z.im.abs() <= tol || (z.im - h).abs() <= tol;
            if !(inside && on_side) {
                return Err(Error::input(format!("mark {k} at {z} is not on the rectangle boundary")));
            }
            let mut best = (f64::INFINITY, 0);
            for (i, &s) in self.perimeter.iter().enumerate() {
                let d = (self.position(s as usize) - z).norm();
                if d < best.0 {
                    best = (d, i);
                }
            }
            idx.push(best.1);
        }
        let len = self.perimeter.len();
        let rel: Vec<usize> = idx.iter().map(|&i| (i + len - idx[0]) % len).collect();
        if rel.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::input("marks are not in counterclockwise order along the boundary"));
        }
        let mut arcs = vec![0u8; self.kinds.len()];
        for a in 0..4 {
            let (from, to) = (idx[a], idx[(a + 1) % 4]);
            let span = (to + len - from) % len;
            for k in 0..=span {
                arcs[self.perimeter[(from + k) % len] as usize] |= 1 << a;
            }
        }
        self.marks = idx;
        self.mark_points = marks.to_vec();
        self.arcs = arcs;
        Ok(())
    }

    pub fn with_marks(&self, marks: &[Complex64]) -> Result<Self> {
        let mut d = self.clone();
        d.set_marks(marks)?;
        Ok(d)
    }

    /// The same rectangle with types II and III exchanged.
    pub fn swapped_types(&self) -> Self {
        let mut d = self.clone();
        d.parity ^= 1;
        for k in &mut d.kinds {
            *k = match *k {
                SiteKind::II => SiteKind::III,
                SiteKind::III => SiteKind::II,
                SiteKind::I => SiteKind::I,
            };
        }
        d
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn parity(&self) -> usize {
        self.parity
    }

    pub fn site_count(&self) -> usize {
        self.kinds.len()
    }

    pub fn kind(&self, s: usize) -> SiteKind {
        self.kinds[s]
    }

    pub fn kinds(&self) -> &[SiteKind] {
        &self.kinds
    }

    pub fn count(&self, kind: SiteKind) -> usize {
        self.kinds.iter().filter(|&&k| k == kind).count()
    }

    pub fn sites_of(&self, kind: SiteKind) -> impl Iterator<Item = usize> + '_ {
        (0..self.kinds.len()).filter(move |&s| self.kinds[s] == kind)
    }

    pub fn position(&self, s: usize) -> Complex64 {
        let (x, y) = self.coords[s];
        Complex64::new(x as f64 / 2.0, y as f64 / 2.0)
    }

    /// Lattice coordinates doubled, so that face centres are odd.
    pub fn doubled_coords(&self, s: usize) -> (i64, i64) {
        self.coords[s]
    }

    pub fn integer_site(&self, k: usize, l: usize) -> Option<usize> {
        (k <= self.width && l <= self.height).then(|| l * (self.width + 1) + k)
    }

    /// Centre of the face with lower-left corner `(k, l)`.
    pub fn face_centre(&self, k: usize, l: usize) -> Option<usize> {
        (k < self.width && l < self.height).then(|| (self.width + 1) * (self.height + 1) + l * self.width + k)
    }

    pub fn neighbours(&self, s: usize) -> &[u32] {
        &self.adj[self.adj_start[s] as usize..self.adj_start[s + 1] as usize]
    }

    /// Perimeter integer sites, counterclockwise from the origin (a segment
    /// is traversed out and back).
    pub fn perimeter(&self) -> &[u32] {
        &self.perimeter
    }

    pub fn marks(&self) -> &[usize] {
        &self.marks
    }

    pub fn mark_points(&self) -> &[Complex64] {
        &self.mark_points
    }

    pub fn mark_site(&self, k: usize) -> usize {
        self.perimeter[self.marks[k]] as usize
    }

    pub fn on_arc(&self, s: usize, arc: usize) -> bool {
        self.arcs[s] >> arc & 1 == 1
    }

    pub(crate) fn arc_bits(&self, s: usize) -> u8 {
        self.arcs[s]
    }
}

/// Site states of one mixed-percolation sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedConfig {
    pub open: Vec<bool>,
    pub q: f64,
    pub seed: u64,
    pub replicate: u64,
}

impl MixedConfig {
    pub fn uniform(dom: &MixedDomain, open: bool) -> Self {
        MixedConfig { open: vec![open; dom.site_count()], q: 0.5, seed: 0, replicate: 0 }
    }
}

pub(crate) fn check_q(q: f64) -> Result<()> {
    if (0.0..=1.0).contains(&q) {
        Ok(())
    } else {
        Err(Error::input(format!("q must lie in [0, 1], got {q}")))
    }
}

/// Uniform variable of each site for one trial, keyed by lattice position;
/// a site is open when its variable is below its open probability, which
/// couples samples monotonically across `q`.
pub(crate) fn site_uniforms(dom: &MixedDomain, seed: u64, replicate: u64, out: &mut Vec<f64>) {
    let rng = CounterRng::new(seed, stream::MIXED, replicate);
    out.clear();
    out.extend(dom.coords.iter().map(|&(x, y)| rng.uniform(((x as u64) << 32) ^ (y as u64 & 0xFFFF_FFFF))));
}

pub(crate) fn states_from(dom: &MixedDomain, u: &[f64], q: f64, open: &mut Vec<bool>) {
    open.clear();
    open.extend(dom.kinds.iter().zip(u).map(|(k, &u)| u < k.open_probability(q)));
}

pub fn sample_mixed(dom: &MixedDomain, q: f64, seed: u64, replicate: u64) -> Result<MixedConfig> {
    check_q(q)?;
    let mut u = Vec::new();
    site_uniforms(dom, seed, replicate, &mut u);
    let mut open = Vec::new();
    states_from(dom, &u, q, &mut open);
    Ok(MixedConfig { open, q, seed, replicate })
}

/// Open chain from arc `AB` to arc `CD`.
pub fn crossing_mixed(dom: &MixedDomain, cfg: &MixedConfig) -> Result<bool> {
    if cfg.open.len() != dom.site_count() {
        return Err(Error::input("configuration does not match the domain"));
    }
    let mut uf = UnionFind::new(dom.site_count());
    Ok(crosses(dom, &cfg.open, &mut uf, None))
}

/// Monte Carlo crossing probability at `q`; trial `k` is replicate `k`.
pub fn estimate_mixed_crossing(dom: &MixedDomain, q: f64, trials: u64, seed: u64, workers: Workers) -> Result<CrossingStats> {
    check_q(q)?;
    pivotal::check_trials(trials)?;
    let chunks = map_chunks(trials, workers, |range| {
        let mut uf = UnionFind::new(dom.site_count());
        let (mut u, mut open) = (Vec::new(), Vec::new());
        let mut counts = Counts::default();
        for k in range {
            site_uniforms(dom, seed, k, &mut u);
            states_from(dom, &u, q, &mut open);
            counts.record(crosses(dom, &open, &mut uf, None));
        }
        counts
    });
    let mut total = Counts::default();
    chunks.iter().for_each(|c| total.merge(c));
    Ok(total.stats())
}

/// Crossing test with site `skip` treated as closed.
pub(crate) fn crosses(dom: &MixedDomain, open: &[bool], uf: &mut UnionFind, skip: Option<usize>) -> bool {
    let n = dom.site_count();
    let ok = |s: usize| open[s] && Some(s) != skip;
    uf.reset();
    for s in 0..n {
        if !ok(s) {
            continue;
        }
        for &t in dom.neighbours(s) {
            let t = t as usize;
            if t > s && ok(t) {
                uf.union(s, t);
            }
        }
    }
    touches_both(dom, uf, ok, ARC_AB, ARC_CD)
}

/// Whether some cluster (as recorded in `uf`) of sites passing `ok`
/// touches both arcs.
pub(crate) fn touches_both(dom: &MixedDomain, uf: &mut UnionFind, ok: impl Fn(usize) -> bool, a: usize, b: usize) -> bool {
    let mut roots: Vec<usize> =
        dom.perimeter.iter().map(|&s| s as usize).filter(|&s| ok(s) && dom.on_arc(s, a)).map(|s| uf.find(s)).collect();
    roots.sort_unstable();
    dom.perimeter
        .iter()
        .map(|&s| s as usize)
        .filter(|&s| ok(s) && dom.on_arc(s, b))
        .any(|s| roots.binary_search(&uf.find(s)).is_ok())
}
