//! Modulus solvers: the random-walk isotropic modulus, covariance and
//! harmonicity diagnostics, and the circle packing modulus.

mod packing;
mod walk;

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::embedding::Embedding;
use crate::error::{Error, Invariant, Result};
use crate::graph::{TorusGraph, VertexId};

pub use packing::{alpha_cp, pack, CirclePacking, PackingOptions};
pub use walk::{walk_covariance, WalkCovariance, WalkOptions};

/// Per-edge second moments of the edge vectors of an embedding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Covariance {
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
}

impl Covariance {
    /// `|xx - yy| + |xy|`: zero exactly when the matrix is scalar.
    pub fn anisotropy(&self) -> f64 {
        (self.xx - self.yy).abs() + self.xy.abs()
    }
}

/// Coefficients of `sum (u + alpha v)^2 = a + 2 b alpha + c alpha^2` over the
/// undirected edges of the balanced square embedding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsotropyQuadratic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl IsotropyQuadratic {
    pub fn of(g: &Arc<TorusGraph>) -> Result<Self> {
        let em = Embedding::balanced(g.clone(), Complex64::i())?;
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for h in g.edges() {
            let e = em.edge_vector(h);
            a += e.re * e.re;
            b += e.re * e.im;
            c += e.im * e.im;
        }
        Ok(IsotropyQuadratic { a, b, c })
    }

    /// Both roots, upper half-plane first.
    pub fn roots(&self) -> Result<[Complex64; 2]> {
        let IsotropyQuadratic { a, b, c } = *self;
        if c <= 0.0 {
            return Err(Error::invariant(
                Invariant::PeriodLattice,
                "all edge vectors are horizontal; the embedding is degenerate",
            ));
        }
        let disc = a * c - b * b;
        if disc <= 0.0 {
            return Err(Error::invariant(
                Invariant::PeriodLattice,
                "edge vectors are collinear; the isotropy quadratic has real roots",
            ));
        }
        let re = -b / c;
        let im = disc.sqrt() / c;
        Ok([Complex64::new(re, im), Complex64::new(re, -im)])
    }

    pub fn eval(&self, alpha: Complex64) -> Complex64 {
        self.a + 2.0 * self.b * alpha + self.c * alpha * alpha
    }
}

/// The modulus in the upper half-plane for which the lifted random walk is
/// isotropic. Works from the balanced embedding; a-priori positions are not
/// needed.
pub fn alpha_rw(g: &Arc<TorusGraph>) -> Result<Complex64> {
    Ok(IsotropyQuadratic::of(g)?.roots()?[0])
}

/// Averages of `x^2`, `y^2` and `xy` over undirected edge vectors.
pub fn covariance(em: &Embedding) -> Covariance {
    let g = em.graph();
    let (mut xx, mut yy, mut xy) = (0.0, 0.0, 0.0);
    for h in g.edges() {
        let e = em.edge_vector(h);
        xx += e.re * e.re;
        yy += e.im * e.im;
        xy += e.re * e.im;
    }
    let n = g.edge_count() as f64;
    Covariance { xx: xx / n, yy: yy / n, xy: xy / n }
}

/// Discrete Laplacian of `z -> z^2` at vertex `z` of a 3-regular embedding.
pub fn zeta_defect(em: &Embedding, z: VertexId) -> Result<Complex64> {
    let g = em.graph();
    if g.degree(z) != 3 || !g.is_three_regular() {
        return Err(Error::input("the z^2 defect is defined on 3-regular graphs"));
    }
    Ok(g.out_edges(z).iter().map(|&h| em.edge_vector(h).powi(2)).sum::<Complex64>() / 3.0)
}
