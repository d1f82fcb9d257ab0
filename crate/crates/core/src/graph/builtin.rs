use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Coord, GraphSpec, Role, TorusGraph};
use crate::error::{Error, Result};

/// The named graphs shipped with the library.
///
/// Rotation order for all of them is derived from the listed unit-square
/// positions (counterclockwise by angle of the edge vector).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Builtin {
    /// One period of the honeycomb lattice (4 vertices, 6 edges).
    #[serde(rename = "T_h")]
    Honeycomb,
    /// One period of the square-octagon lattice, dual to the centered square
    /// lattice (4 vertices, 6 edges).
    #[serde(rename = "T_s")]
    SquareOctagon,
    /// `T_s` with the vertex at the origin replaced by a small triangle.
    #[serde(rename = "T_s_refined")]
    SquareOctagonRefined,
    /// One period of Z^2 (1 vertex, 2 loops).
    #[serde(rename = "Z2_bond")]
    Z2Bond,
}

impl Builtin {
    pub const ALL: [Builtin; 4] =
        [Builtin::Honeycomb, Builtin::SquareOctagon, Builtin::SquareOctagonRefined, Builtin::Z2Bond];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Honeycomb => "T_h",
            Builtin::SquareOctagon => "T_s",
            Builtin::SquareOctagonRefined => "T_s_refined",
            Builtin::Z2Bond => "Z2_bond",
        }
    }

    pub fn spec(self) -> GraphSpec {
        let frac = |s: &str| Coord::Fraction(s.to_string());
        let int = |x: f64| Coord::Number(x);
        match self {
            Builtin::Honeycomb => GraphSpec {
                vertices: vec![3; 4],
                edges: vec![
                    [0, 1, 0, 0],
                    [1, 2, 0, 0],
                    [1, 2, 0, -1],
                    [2, 3, 0, 0],
                    [3, 0, 1, 0],
                    [3, 0, 1, 1],
                ],
                positions: Some(vec![
                    [int(0.0), int(0.0)],
                    [frac("1/3"), int(0.0)],
                    [frac("1/2"), frac("1/2")],
                    [frac("5/6"), frac("1/2")],
                ]),
                rotations: None,
                role: Role::Primal3Regular,
            },
            Builtin::SquareOctagon => GraphSpec {
                vertices: vec![3; 4],
                edges: vec![
                    [0, 2, 0, 0],
                    [1, 2, 0, 0],
                    [2, 3, 0, 0],
                    [3, 0, 0, 1],
                    [3, 1, 0, 1],
                    [1, 0, 1, 0],
                ],
                positions: Some(vec![
                    [int(0.0), int(0.0)],
                    [frac("1/2"), int(0.0)],
                    [frac("1/4"), frac("1/4")],
                    [frac("1/4"), frac("3/4")],
                ]),
                rotations: None,
                role: Role::Primal3Regular,
            },
            // T_s translated by (1/8, 1/8), with the vertex on the horizontal
            // edge replaced by a triangle whose corners point at its three
            // former neighbours.
            Builtin::SquareOctagonRefined => GraphSpec {
                vertices: vec![3; 6],
                edges: vec![
                    [0, 2, 0, 0],
                    [1, 2, 0, 0],
                    [2, 3, 0, 0],
                    [3, 4, 0, 1],
                    [3, 1, 0, 1],
                    [1, 5, 1, 0],
                    [0, 4, 0, 0],
                    [4, 5, 0, 0],
                    [5, 0, 0, 0],
                ],
                positions: Some(vec![
                    [frac("3/16"), frac("3/16")],
                    [frac("5/8"), frac("1/8")],
                    [frac("3/8"), frac("3/8")],
                    [frac("3/8"), frac("7/8")],
                    [frac("3/16"), frac("1/16")],
                    [frac("1/16"), frac("1/8")],
                ]),
                rotations: None,
                role: Role::Primal3Regular,
            },
            Builtin::Z2Bond => GraphSpec {
                vertices: vec![4],
                edges: vec![[0, 0, 1, 0], [0, 0, 0, 1]],
                positions: Some(vec![[int(0.0), int(0.0)]]),
                rotations: None,
                role: Role::General,
            },
        }
    }

    pub fn graph(self) -> TorusGraph {
        self.spec().build().expect("built-in graphs are valid")
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::input(format!("unknown built-in graph {s:?} (expected T_h, T_s, T_s_refined or Z2_bond)")))
    }
}
