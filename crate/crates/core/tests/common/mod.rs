#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Arc;

use confperc::embedding::Embedding;
use confperc::graph::Builtin;
use confperc::mixed::{MixedDomain, SiteKind, ARC_AB, ARC_CD, EXACT_SITE_LIMIT};
use confperc::modulus::alpha_rw;
use confperc::percolation::triangulation_of;
use confperc::unionfind::UnionFind;
use confperc::Complex64;
use num_rational::Ratio;

/// The triangular lattice, as the triangulation dual to the balanced
/// honeycomb.
pub fn triangular() -> Embedding {
    let g = Arc::new(Builtin::Honeycomb.graph());
    let a = alpha_rw(&g).unwrap();
    triangulation_of(&Embedding::balanced(g, a).unwrap()).unwrap()
}

/// Crossing between the left and right sides.
pub fn horizontal(w: usize, h: usize) -> MixedDomain {
    let (x, y) = (w as f64, h as f64);
    let c = Complex64::new;
    MixedDomain::new(w, h, &[c(0.0, y), c(0.0, 0.0), c(x, 0.0), c(x, y)]).unwrap()
}

/// Rectangles small enough to enumerate.
pub fn small_rectangles() -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for w in 1..=10 {
        for h in 1..=10 {
            if (w + 1) * (h + 1) + w * h <= EXACT_SITE_LIMIT {
                out.push((w, h));
            }
        }
    }
    out
}

/// Crossing probability of bond percolation whose bonds are the integer
/// sites, each joining its two diagonal face centres of the given type.
pub fn bond_crossing(d: &MixedDomain, endpoint: SiteKind) -> Ratio<i128> {
    let ints: Vec<usize> = d.sites_of(SiteKind::I).collect();
    let mut ids: HashMap<(i64, i64), usize> = HashMap::new();
    let mut bonds = Vec::new();
    for &s in &ints {
        let (x, y) = d.doubled_coords(s);
        let mut ends = Vec::new();
        for (dx, dy) in [(-1, -1), (1, -1), (1, 1), (-1, 1)] {
            let (cx, cy) = (x + dx, y + dy);
            // Face with lower-left corner ((cx-1)/2, (cy-1)/2); the type rule
            // extends beyond the rectangle.
            let (k, l) = ((cx - 1).div_euclid(2), (cy - 1).div_euclid(2));
            let even = (k + l + d.parity() as i64).rem_euclid(2) == 0;
            let kind = if even { SiteKind::II } else { SiteKind::III };
            if kind == endpoint {
                let n = ids.len();
                ends.push(*ids.entry((cx, cy)).or_insert(n));
            }
        }
        assert_eq!(ends.len(), 2);
        bonds.push((ends[0], ends[1]));
    }
    let mut hits = 0i128;
    for mask in 0..1u32 << ints.len() {
        let mut uf = UnionFind::new(ids.len());
        for (i, &(a, b)) in bonds.iter().enumerate() {
            if mask >> i & 1 == 1 {
                uf.union(a, b);
            }
        }
        let open = |i: usize| mask >> i & 1 == 1;
        let mut hit = false;
        for (i, &s) in ints.iter().enumerate() {
            for (j, &t) in ints.iter().enumerate() {
                if open(i) && open(j) && d.on_arc(s, ARC_AB) && d.on_arc(t, ARC_CD) && uf.connected(bonds[i].0, bonds[j].0) {
                    hit = true;
                }
            }
        }
        hits += hit as i128;
    }
    Ratio::new(hits, 1 << ints.len())
}
