//! Plane polygons and curves in complex coordinates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simple polygon, stored counterclockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    vertices: Vec<Complex64>,
}

impl Polygon {
    /// Builds a polygon, reorienting clockwise input.
    pub fn new(mut vertices: Vec<Complex64>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::input("a polygon needs at least 3 vertices"));
        }
        if vertices.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::input("polygon vertex is not finite"));
        }
        let area = signed_area(&vertices);
        if area.abs() < 1e-300 {
            return Err(Error::input("polygon has zero area"));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        Ok(Polygon { vertices })
    }

    pub fn rectangle(x0: f64, y0: f64, width: f64, height: f64) -> Result<Self> {
        Polygon::new(vec![
            Complex64::new(x0, y0),
            Complex64::new(x0 + width, y0),
            Complex64::new(x0 + width, y0 + height),
            Complex64::new(x0, y0 + height),
        ])
    }

    pub fn unit_square() -> Self {
        Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap()
    }

    /// Equilateral triangle with corners `A = (0,0)`, `B = (side,0)` and `C`
    /// above, counterclockwise.
    pub fn equilateral(side: f64) -> Result<Self> {
        let c = Complex64::new(side / 2.0, side * 3f64.sqrt() / 2.0);
        Polygon::new(vec![Complex64::new(0.0, 0.0), Complex64::new(side, 0.0), c])
    }

    /// Regular `n`-gon of circumradius `r` around `center`.
    pub fn regular(center: Complex64, r: f64, n: usize) -> Result<Self> {
        Polygon::new(
            (0..n)
                .map(|k| center + Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / n as f64))
                .collect(),
        )
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn edges(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Point-in-polygon by crossing number; boundary points count as inside.
    pub fn contains(&self, z: Complex64) -> bool {
        if self.boundary_distance(z) <= 1e-12 * (1.0 + z.norm()) {
            return true;
        }
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.im > z.im) != (b.im > z.im) {
                let x = a.re + (z.im - a.im) / (b.im - a.im) * (b.re - a.re);
                if z.re < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        self.edges().map(|(a, b)| segment_distance(z, a, b)).fold(f64::INFINITY, f64::min)
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for a in &self.vertices {
            for b in &self.vertices {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    pub fn translated(&self, by: Complex64) -> Self {
        Polygon { vertices: self.vertices.iter().map(|z| z + by).collect() }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Polygon { vertices: self.vertices.iter().map(|z| z * s).collect() }
    }
}

fn signed_area(v: &[Complex64]) -> f64 {
    let n = v.len();
    (0..n).map(|i| (v[i].conj() * v[(i + 1) % n]).im).sum::<f64>() / 2.0
}

pub fn segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

/// Points `center + r e^{i theta}` at `n` equal angles, counterclockwise.
pub fn circle(center: Complex64, r: f64, n: usize) -> Vec<Complex64> {
    (0..n).map(|k| center + Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / n as f64)).collect()
}
