//! Static SVG figures: an embedding patch and a circle packing.

use std::fmt::Write;

use confperc::embedding::{DualPlacement, Embedding};
use confperc::graph::Offset;
use confperc::modulus::CirclePacking;
use confperc::Complex64;

const SIZE: f64 = 600.0;

struct Canvas {
    body: String,
    origin: Complex64,
    scale: f64,
}

impl Canvas {
    fn new(lo: Complex64, hi: Complex64) -> Self {
        let span = (hi.re - lo.re).max(hi.im - lo.im).max(1e-9);
        Canvas { body: String::new(), origin: lo, scale: SIZE / span }
    }

    /// Plane coordinates to SVG pixels (y pointing down).
    fn px(&self, z: Complex64) -> (f64, f64) {
        ((z.re - self.origin.re) * self.scale, SIZE - (z.im - self.origin.im) * self.scale)
    }

    fn line(&mut self, a: Complex64, b: Complex64, style: &str) {
        let ((x1, y1), (x2, y2)) = (self.px(a), self.px(b));
        let _ = writeln!(self.body, r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" {style}/>"#);
    }

    fn circle(&mut self, c: Complex64, r: f64, style: &str) {
        let (x, y) = self.px(c);
        let _ = writeln!(self.body, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{:.2}" {style}/>"#, r * self.scale);
    }

    fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body
        )
    }
}

/// Primal edges solid, dual edges dashed, over a 2x2 block of periods.
pub fn embedding_patch(em: &Embedding) -> String {
    let [p1, p2] = em.periods();
    let corners = [Complex64::new(0.0, 0.0), p1 * 2.0, p2 * 2.0, (p1 + p2) * 2.0];
    let lo = Complex64::new(corners.iter().map(|z| z.re).fold(f64::MAX, f64::min), corners.iter().map(|z| z.im).fold(f64::MAX, f64::min));
    let hi = Complex64::new(corners.iter().map(|z| z.re).fold(f64::MIN, f64::max), corners.iter().map(|z| z.im).fold(f64::MIN, f64::max));
    let mut canvas = Canvas::new(lo, hi);
    let g = em.graph();
    let dual = em.dual_geometry(DualPlacement::Centroid).ok();
    for m in 0..2 {
        for n in 0..2 {
            let shift = em.translation(Offset::new(m, n));
            for h in g.edges() {
                let a = em.positions()[g.source(h)] + shift;
                canvas.line(a, a + em.edge_vector(h), r#"stroke="black" stroke-width="1.5""#);
            }
            if let Some(d) = &dual {
                let tri = &d.duality.dual;
                for h in tri.edges() {
                    let a = d.positions[tri.source(h)] + shift;
                    canvas.line(a, a + d.edge_vector(h), r#"stroke="steelblue" stroke-dasharray="4 3""#);
                }
            }
            for &z in em.positions() {
                canvas.circle(z + shift, 0.01, r#"fill="black""#);
            }
        }
    }
    canvas.finish()
}

/// Circles over a 2x2 block of periods, with tangency edges.
pub fn packing(p: &CirclePacking, edges: &[(usize, usize, Offset)]) -> String {
    let [p1, p2] = p.periods;
    let at = |o: Offset| p1 * o.m as f64 + p2 * o.n as f64;
    let corners = [Complex64::new(0.0, 0.0), p1 * 2.0, p2 * 2.0, (p1 + p2) * 2.0];
    let lo = Complex64::new(corners.iter().map(|z| z.re).fold(f64::MAX, f64::min), corners.iter().map(|z| z.im).fold(f64::MAX, f64::min));
    let hi = Complex64::new(corners.iter().map(|z| z.re).fold(f64::MIN, f64::max), corners.iter().map(|z| z.im).fold(f64::MIN, f64::max));
    let mut canvas = Canvas::new(lo, hi);
    for m in 0..2 {
        for n in 0..2 {
            let shift = at(Offset::new(m, n));
            for (c, r) in p.centers.iter().zip(&p.radii) {
                canvas.circle(c + shift, *r, r#"fill="none" stroke="black""#);
            }
            for &(u, v, o) in edges {
                canvas.line(p.centers[u] + shift, p.centers[v] + at(o) + shift, r#"stroke="indianred" stroke-width="0.8""#);
            }
        }
    }
    canvas.finish()
}
