//! The on-disk graph description.
//!
//! ```json
//! {
//!   "vertices": [3, 3, 3, 3],
//!   "edges": [[0, 1, 0, 0], [1, 2, 0, -1]],
//!   "positions": [[0, 0], ["1/3", 0]],
//!   "rotations": [[0, 3, 10]],
//!   "role": "primal-3-regular"
//! }
//! ```
//!
//! `vertices[v]` is the declared degree of `v`. Edge `k = [u, v, dx, dy]`
//! becomes half-edges `2k` (u to v, displacement `(dx, dy)`) and `2k+1`
//! (v to u, the negated displacement). The counterclockwise order around
//! each vertex comes from `rotations` (half-edge ids per vertex) when given,
//! and otherwise from the angles of the edge vectors in the square
//! embedding defined by `positions`. One of the two must be present.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{HalfEdge, Offset, Role, TorusGraph};
use crate::error::{Error, Invariant, Result};

/// A coordinate: a JSON number or an exact fraction such as `"5/6"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coord {
    Number(f64),
    Fraction(String),
}

impl Coord {
    pub fn value(&self) -> Result<f64> {
        match self {
            Coord::Number(x) => Ok(*x),
            Coord::Fraction(s) => {
                let parse = |t: &str| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::input(format!("bad coordinate {s:?}")))
                };
                match s.split_once('/') {
                    Some((p, q)) => {
                        let q = parse(q)?;
                        if q == 0.0 {
                            return Err(Error::input(format!("zero denominator in {s:?}")));
                        }
                        Ok(parse(p)? / q)
                    }
                    None => parse(s),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub vertices: Vec<usize>,
    pub edges: Vec<[i64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<[Coord; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotations: Option<Vec<Vec<usize>>>,
    #[serde(default = "default_role")]
    pub role: Role,
}

fn default_role() -> Role {
    Role::General
}

impl GraphSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph spec serializes")
    }

    pub fn build(&self) -> Result<TorusGraph> {
        let vcount = self.vertices.len();
        let mut half: Vec<(usize, usize, Offset)> = Vec::with_capacity(2 * self.edges.len());
        for (k, &[u, v, dx, dy]) in self.edges.iter().enumerate() {
            let in_range = |x: i64| x >= 0 && (x as usize) < vcount;
            if !in_range(u) || !in_range(v) {
                return Err(Error::input(format!("edge {k} references a missing vertex")));
            }
            let small = |x: i64| i32::try_from(x).map_err(|_| Error::input(format!("edge {k} displacement overflows")));
            let d = Offset::new(small(dx)?, small(dy)?);
            half.push((u as usize, v as usize, d));
            half.push((v as usize, u as usize, -d));
        }

        let positions = match &self.positions {
            Some(ps) => Some(
                ps.iter()
                    .map(|[x, y]| Ok([x.value()?, y.value()?]))
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };

        let rotations = match (&self.rotations, &positions) {
            (Some(r), _) => r.clone(),
            (None, Some(pos)) => rotations_from_positions(vcount, &half, pos)?,
            (None, None) => {
                return Err(Error::input(
                    "either `rotations` or `positions` is required to fix the cyclic order",
                ))
            }
        };
        if rotations.len() != vcount {
            return Err(Error::invariant(
                Invariant::Rotation,
                format!("{} rotation lists for {vcount} vertices", rotations.len()),
            ));
        }

        let mut next = vec![usize::MAX; half.len()];
        for (v, cycle) in rotations.iter().enumerate() {
            for (i, &h) in cycle.iter().enumerate() {
                if h >= half.len() {
                    return Err(Error::invariant(Invariant::Rotation, format!("unknown half-edge {h}")));
                }
                if half[h].0 != v {
                    return Err(Error::invariant(
                        Invariant::Rotation,
                        format!("half-edge {h} listed at vertex {v} but leaves vertex {}", half[h].0),
                    ));
                }
                if next[h] != usize::MAX {
                    return Err(Error::invariant(Invariant::Rotation, format!("half-edge {h} listed twice")));
                }
                next[h] = cycle[(i + 1) % cycle.len()];
            }
        }
        if let Some(h) = next.iter().position(|&n| n == usize::MAX) {
            return Err(Error::invariant(
                Invariant::Rotation,
                format!("half-edge {h} missing from the rotation lists"),
            ));
        }

        for (v, &deg) in self.vertices.iter().enumerate() {
            let actual = half.iter().filter(|e| e.0 == v).count();
            if actual != deg {
                return Err(Error::invariant(
                    Invariant::DeclaredDegree,
                    format!("vertex {v} declares degree {deg} but has {actual}"),
                ));
            }
        }

        let half_edges = half
            .iter()
            .enumerate()
            .map(|(h, &(s, _, d))| HalfEdge { source: s, twin: h ^ 1, next: next[h], offset: d })
            .collect();
        TorusGraph::from_half_edges(vcount, half_edges, positions, self.role)
    }
}

fn rotations_from_positions(
    vcount: usize,
    half: &[(usize, usize, Offset)],
    pos: &[[f64; 2]],
) -> Result<Vec<Vec<usize>>> {
    if pos.len() != vcount {
        return Err(Error::invariant(
            Invariant::Positions,
            format!("{} positions for {vcount} vertices", pos.len()),
        ));
    }
    let mut rot: Vec<Vec<(f64, usize)>> = vec![Vec::new(); vcount];
    for (h, &(s, t, d)) in half.iter().enumerate() {
        let dx = pos[t][0] + d.m as f64 - pos[s][0];
        let dy = pos[t][1] + d.n as f64 - pos[s][1];
        if dx == 0.0 && dy == 0.0 {
            return Err(Error::invariant(Invariant::Positions, format!("half-edge {h} has zero length")));
        }
        let mut a = dy.atan2(dx);
        if a < 0.0 {
            a += 2.0 * PI;
        }
        rot[s].push((a, h));
    }
    rot.into_iter()
        .enumerate()
        .map(|(v, mut list)| {
            list.sort_by(|a, b| a.0.total_cmp(&b.0));
            if list.windows(2).any(|w| (w[1].0 - w[0].0).abs() < 1e-12) {
                return Err(Error::invariant(
                    Invariant::Positions,
                    format!("two edges leave vertex {v} in the same direction"),
                ));
            }
            Ok(list.into_iter().map(|(_, h)| h).collect())
        })
        .collect()
}
