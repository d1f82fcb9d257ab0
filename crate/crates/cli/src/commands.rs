//! One function per command, each producing in-memory artifacts.

use std::sync::Arc;

use confperc::embedding::{DualPlacement, Embedding};
use confperc::geometry::Polygon;
use confperc::graph::{Builtin, GraphSpec, Offset, TorusGraph};
use confperc::mixed::{
    estimate_mixed_crossing, exact_polynomial, interpolate, MixedDomain, Observable, EXACT_SITE_LIMIT,
};
use confperc::modulus::{alpha_cp, alpha_rw, covariance, pack, zeta_defect, PackingOptions};
use confperc::parallel::Workers;
use confperc::percolation::{
    contour_integrals, estimate_cardy, estimate_crossing, estimate_h, triangulation_of, Contour, DiscreteDomain,
};
use confperc::Complex64;
use serde::Serialize;

use crate::config::{
    parse_points, AlphaSource, CardyArgs, CrossArgs, DomainArgs, EmbedArgs, Experiment, HfieldArgs, LatticeArgs,
    MixedArgs, ModulusArgs, PackArgs, PivotalArgs, RectangleArgs, Shape,
};
use crate::error::CliError;
use crate::output::Artifact;
use crate::svg;

pub fn run(exp: &Experiment, workers: Workers) -> Result<Vec<Artifact>, CliError> {
    exp.validate().map_err(CliError::Config)?;
    match exp {
        Experiment::Embed(a) => embed(a),
        Experiment::Modulus(a) => modulus(a),
        Experiment::Pack(a) => pack_cmd(a),
        Experiment::Cross(a) => cross(a, workers),
        Experiment::Cardy(a) => cardy(a, workers),
        Experiment::Hfield(a) => hfield(a, workers),
        Experiment::Mixed(a) => mixed(a, workers),
        Experiment::Pivotal(a) => pivotal(a, workers),
    }
}

fn seed_of(s: &crate::config::SamplingArgs) -> u64 {
    s.seed.expect("validated")
}

pub fn load_graph(name: &str) -> Result<Arc<TorusGraph>, CliError> {
    if let Some(b) = Builtin::ALL.iter().find(|b| b.name() == name) {
        return Ok(Arc::new(b.graph()));
    }
    let text = std::fs::read_to_string(name)
        .map_err(|e| CliError::Config(format!("graph {name:?} is neither a built-in nor a readable file: {e}")))?;
    Ok(Arc::new(GraphSpec::from_json(&text)?.build()?))
}

/// The graph itself when every face is a triangle, else the dual of a
/// 3-regular graph.
fn triangulation_for_packing(g: &TorusGraph) -> Result<Option<TorusGraph>, CliError> {
    if g.faces().iter().all(|f| f.len() == 3) {
        Ok(Some(g.clone()))
    } else if g.is_three_regular() {
        Ok(Some(g.dual()?))
    } else {
        Ok(None)
    }
}

fn resolve_alpha(g: &Arc<TorusGraph>, source: AlphaSource) -> Result<Complex64, CliError> {
    match source {
        AlphaSource::Rw => Ok(alpha_rw(g)?),
        AlphaSource::Cp => {
            let tri = triangulation_for_packing(g)?
                .ok_or_else(|| CliError::Config("the packing modulus needs a 3-regular graph or a triangulation".into()))?;
            Ok(alpha_cp(&tri)?)
        }
        AlphaSource::Explicit(z) => Ok(z),
    }
}

fn lattice(args: &LatticeArgs) -> Result<(Embedding, Complex64), CliError> {
    let g = load_graph(&args.graph)?;
    let alpha = resolve_alpha(&g, args.alpha)?;
    let primal = Embedding::balanced(g, alpha)?;
    Ok((triangulation_of(&primal)?, alpha))
}

fn polygon(args: &DomainArgs) -> Result<Polygon, CliError> {
    Ok(match (&args.polygon, args.shape) {
        (Some(text), _) => Polygon::new(parse_points(text).map_err(CliError::Config)?)?,
        (None, Shape::Square) => Polygon::unit_square(),
        (None, Shape::Triangle) => Polygon::equilateral(1.0)?,
    })
}

fn marks(args: &DomainArgs, shape: &Polygon, needed: usize) -> Result<Vec<Complex64>, CliError> {
    let marks = match &args.marks {
        Some(text) => parse_points(text).map_err(CliError::Config)?,
        None if shape.vertices().len() >= needed => shape.vertices()[..needed].to_vec(),
        None => return Err(CliError::Config(format!("the polygon has fewer than {needed} corners; pass --marks"))),
    };
    if marks.len() != needed {
        return Err(CliError::Config(format!("expected {needed} marks, got {}", marks.len())));
    }
    Ok(marks)
}

// ------------------------------------------------------------- geometry

#[derive(Serialize)]
struct PositionRow {
    vertex: usize,
    x: f64,
    y: f64,
}

#[derive(Serialize)]
struct EdgeRow {
    half_edge: usize,
    source: usize,
    target: usize,
    m: i32,
    n: i32,
    dx: f64,
    dy: f64,
    psi_re: Option<f64>,
    psi_im: Option<f64>,
}

#[derive(Serialize)]
struct EmbeddingRow {
    graph: String,
    alpha_re: f64,
    alpha_im: f64,
    barycenter_residual: f64,
    dirichlet_energy: f64,
}

fn embed(a: &EmbedArgs) -> Result<Vec<Artifact>, CliError> {
    let g = load_graph(&a.lattice.graph)?;
    let alpha = resolve_alpha(&g, a.lattice.alpha)?;
    let em = Embedding::balanced(g.clone(), alpha)?;
    let psi = if g.is_three_regular() { Some(em.psi_all(DualPlacement::Centroid)?) } else { None };
    let positions: Vec<PositionRow> =
        em.positions().iter().enumerate().map(|(vertex, z)| PositionRow { vertex, x: z.re, y: z.im }).collect();
    let edges: Vec<EdgeRow> = (0..g.half_edge_count())
        .map(|h| {
            let (e, o) = (em.edge_vector(h), g.offset(h));
            EdgeRow {
                half_edge: h,
                source: g.source(h),
                target: g.target(h),
                m: o.m,
                n: o.n,
                dx: e.re,
                dy: e.im,
                psi_re: psi.as_ref().map(|p| p[h].re),
                psi_im: psi.as_ref().map(|p| p[h].im),
            }
        })
        .collect();
    let summary = EmbeddingRow {
        graph: a.lattice.graph.clone(),
        alpha_re: alpha.re,
        alpha_im: alpha.im,
        barycenter_residual: em.barycenter_residual(),
        dirichlet_energy: em.dirichlet_energy(),
    };
    let mut out = vec![
        Artifact::csv("embedding.csv", &[summary])?,
        Artifact::csv("positions.csv", &positions)?,
        Artifact::csv("edges.csv", &edges)?,
    ];
    if a.svg {
        out.push(Artifact::text("embedding.svg", svg::embedding_patch(&em)));
    }
    Ok(out)
}

#[derive(Serialize)]
struct ModulusRow {
    graph: String,
    alpha_rw_re: f64,
    alpha_rw_im: f64,
    alpha_cp_re: Option<f64>,
    alpha_cp_im: Option<f64>,
    cov_xx: f64,
    cov_yy: f64,
    cov_xy: f64,
    zeta_defect_sum: Option<f64>,
    angle_residual: Option<f64>,
}

fn modulus(a: &ModulusArgs) -> Result<Vec<Artifact>, CliError> {
    let g = load_graph(&a.graph)?;
    let rw = alpha_rw(&g)?;
    let em = Embedding::balanced(g.clone(), rw)?;
    let cov = covariance(&em);
    let zeta = if g.is_three_regular() {
        let mut total = Complex64::new(0.0, 0.0);
        for z in 0..g.vertex_count() {
            total += zeta_defect(&em, z)?;
        }
        Some(total.norm())
    } else {
        None
    };
    let packed = match triangulation_for_packing(&g)? {
        Some(tri) => Some(pack(&tri, PackingOptions::default())?),
        None => None,
    };
    let row = ModulusRow {
        graph: a.graph.clone(),
        alpha_rw_re: rw.re,
        alpha_rw_im: rw.im,
        alpha_cp_re: packed.as_ref().map(|p| p.modulus().re),
        alpha_cp_im: packed.as_ref().map(|p| p.modulus().im),
        cov_xx: cov.xx,
        cov_yy: cov.yy,
        cov_xy: cov.xy,
        zeta_defect_sum: zeta,
        angle_residual: packed.as_ref().map(|p| p.angle_residual),
    };
    Ok(vec![Artifact::csv("modulus.csv", &[row])?])
}

#[derive(Serialize)]
struct CircleRow {
    vertex: usize,
    x: f64,
    y: f64,
    radius: f64,
}

#[derive(Serialize)]
struct PackingRow {
    graph: String,
    alpha_re: f64,
    alpha_im: f64,
    angle_residual: f64,
    tangency_error: f64,
    holonomy_error: f64,
    iterations: u64,
}

fn pack_cmd(a: &PackArgs) -> Result<Vec<Artifact>, CliError> {
    if !(a.tolerance > 0.0) || a.max_iterations == 0 {
        return Err(CliError::Config("tolerance and iteration cap must be positive".into()));
    }
    let g = load_graph(&a.graph)?;
    let tri = triangulation_for_packing(&g)?
        .ok_or_else(|| CliError::Config("packing needs a 3-regular graph or a triangulation".into()))?;
    let p = pack(&tri, PackingOptions { tolerance: a.tolerance, max_iterations: a.max_iterations })?;
    let circles: Vec<CircleRow> = p
        .centers
        .iter()
        .zip(&p.radii)
        .enumerate()
        .map(|(vertex, (c, &radius))| CircleRow { vertex, x: c.re, y: c.im, radius })
        .collect();
    let summary = PackingRow {
        graph: a.graph.clone(),
        alpha_re: p.modulus().re,
        alpha_im: p.modulus().im,
        angle_residual: p.angle_residual,
        tangency_error: p.tangency_error,
        holonomy_error: p.holonomy_error,
        iterations: p.iterations,
    };
    let mut out = vec![Artifact::csv("packing.csv", &[summary])?, Artifact::csv("circles.csv", &circles)?];
    if a.svg {
        let edges: Vec<(usize, usize, Offset)> = tri.edges().map(|h| (tri.source(h), tri.target(h), tri.offset(h))).collect();
        out.push(Artifact::text("packing.svg", svg::packing(&p, &edges)));
    }
    Ok(out)
}

// ---------------------------------------------------------- percolation

#[derive(Serialize)]
struct CrossRow {
    delta: f64,
    sites: usize,
    p: f64,
    trials: u64,
    successes: u64,
    estimate: f64,
    standard_error: f64,
}

fn cross(a: &CrossArgs, workers: Workers) -> Result<Vec<Artifact>, CliError> {
    let (tri, _) = lattice(&a.lattice)?;
    let shape = polygon(&a.domain)?;
    let marks = marks(&a.domain, &shape, 4)?;
    let mut rows = Vec::new();
    for &delta in &a.delta {
        let dom = DiscreteDomain::new(&tri, shape.clone(), delta, &marks)?;
        let s = estimate_crossing(&dom, a.p, a.sampling.trials, seed_of(&a.sampling), workers)?;
        rows.push(CrossRow {
            delta,
            sites: dom.site_count(),
            p: a.p,
            trials: s.trials,
            successes: s.successes,
            estimate: s.estimate,
            standard_error: s.standard_error,
        });
    }
    Ok(vec![Artifact::csv("crossing.csv", &rows)?])
}

#[derive(Serialize)]
struct CardyRow {
    ratio: f64,
    delta: f64,
    sites: usize,
    trials: u64,
    successes: u64,
    estimate: f64,
    standard_error: f64,
}

fn cardy(a: &CardyArgs, workers: Workers) -> Result<Vec<Artifact>, CliError> {
    if a.ratio.iter().any(|r| !(0.0..=1.0).contains(r)) {
        return Err(CliError::Config("ratios must lie in [0, 1]".into()));
    }
    let (tri, _) = lattice(&a.lattice)?;
    let shape = Polygon::equilateral(1.0)?;
    let v = shape.vertices().to_vec();
    let dom = DiscreteDomain::new(&tri, shape, a.delta, &v)?;
    let d: Vec<Complex64> = a.ratio.iter().map(|r| v[2] + (v[0] - v[2]) * *r).collect();
    let stats = estimate_cardy(&dom, &d, 0.5, a.sampling.trials, seed_of(&a.sampling), workers)?;
    let rows: Vec<CardyRow> = a
        .ratio
        .iter()
        .zip(&stats)
        .map(|(&ratio, s)| CardyRow {
            ratio,
            delta: a.delta,
            sites: dom.site_count(),
            trials: s.trials,
            successes: s.successes,
            estimate: s.estimate,
            standard_error: s.standard_error,
        })
        .collect();
    Ok(vec![Artifact::csv("cardy.csv", &rows)?])
}

#[derive(Serialize)]
struct ContourRow {
    delta: f64,
    sites: usize,
    contour_points: usize,
    trials: u64,
    s_re: f64,
    s_im: f64,
    s_se_re: f64,
    s_se_im: f64,
    h_re: f64,
    h_im: f64,
    h_se_re: f64,
    h_se_im: f64,
}

#[derive(Serialize)]
struct FieldRow {
    delta: f64,
    point: usize,
    x: f64,
    y: f64,
    h_a: f64,
    h_b: f64,
    h_c: f64,
    s: f64,
    h_re: f64,
    h_im: f64,
}

fn hfield(a: &HfieldArgs, workers: Workers) -> Result<Vec<Artifact>, CliError> {
    let (tri, _) = lattice(&a.lattice)?;
    let shape = polygon(&a.domain)?;
    let marks = marks(&a.domain, &shape, 3)?;
    let centre = parse_points(&a.centre).map_err(CliError::Config)?;
    let [centre] = centre.as_slice() else {
        return Err(CliError::Config("the contour centre is one point \"x,y\"".into()));
    };
    let seed = seed_of(&a.sampling);
    let (mut rows, mut field) = (Vec::new(), Vec::new());
    for &delta in &a.delta {
        let dom = DiscreteDomain::new(&tri, shape.clone(), delta, &marks)?;
        let contour = Contour::circle(&dom, *centre, a.radius)?;
        let r = contour_integrals(&dom, &contour, None, 0.5, a.sampling.trials, seed, workers)?;
        rows.push(ContourRow {
            delta,
            sites: dom.site_count(),
            contour_points: r.length,
            trials: r.trials,
            s_re: r.s.value.re,
            s_im: r.s.value.im,
            s_se_re: r.s.se[0],
            s_se_im: r.s.se[1],
            h_re: r.h.value.re,
            h_im: r.h.value.im,
            h_se_re: r.h.se[0],
            h_se_im: r.h.se[1],
        });
        if a.field {
            for rec in estimate_h(&dom, contour.points(), 0.5, a.sampling.trials, seed, workers)? {
                field.push(FieldRow {
                    delta,
                    point: rec.point,
                    x: rec.position.re,
                    y: rec.position.im,
                    h_a: rec.h_a.estimate,
                    h_b: rec.h_b.estimate,
                    h_c: rec.h_c.estimate,
                    s: rec.s.value,
                    h_re: rec.h.re,
                    h_im: rec.h.im,
                });
            }
        }
    }
    let mut out = vec![Artifact::csv("contour.csv", &rows)?];
    if a.field {
        out.push(Artifact::csv("field.csv", &field)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------- mixed

fn rectangle(a: &RectangleArgs) -> Result<MixedDomain, CliError> {
    let (w, h) = (a.width as f64, a.height as f64);
    let marks = match &a.marks {
        Some(text) => parse_points(text).map_err(CliError::Config)?,
        None => vec![Complex64::new(0.0, h), Complex64::new(0.0, 0.0), Complex64::new(w, 0.0), Complex64::new(w, h)],
    };
    Ok(MixedDomain::with_parity(a.width, a.height, a.parity, &marks)?)
}

#[derive(Serialize)]
struct MixedRow {
    q: f64,
    trials: u64,
    successes: u64,
    estimate: f64,
    standard_error: f64,
    exact: Option<f64>,
}

fn mixed(a: &MixedArgs, workers: Workers) -> Result<Vec<Artifact>, CliError> {
    let dom = rectangle(&a.rectangle)?;
    let exact = if dom.site_count() <= EXACT_SITE_LIMIT { Some(exact_polynomial(&dom, Observable::Crossing)?) } else { None };
    let mut rows = Vec::new();
    for &q in &a.q {
        let s = estimate_mixed_crossing(&dom, q, a.sampling.trials, seed_of(&a.sampling), workers)?;
        rows.push(MixedRow {
            q,
            trials: s.trials,
            successes: s.successes,
            estimate: s.estimate,
            standard_error: s.standard_error,
            exact: exact.as_ref().map(|p| p.eval_f64(q)),
        });
    }
    let mut out = vec![Artifact::csv("mixed.csv", &rows)?];
    if let Some(p) = exact {
        out.push(Artifact::text("polynomial.txt", format!("{p}\n")));
    }
    Ok(out)
}

#[derive(Serialize)]
struct PivotalRow {
    q: f64,
    crossing: f64,
    crossing_se: f64,
    derivative: f64,
    derivative_se: f64,
}

#[derive(Serialize)]
struct PivotalSummary {
    difference: f64,
    difference_se: f64,
    quadrature: f64,
    quadrature_se: f64,
    agree_within_3se: bool,
}

fn pivotal(a: &PivotalArgs, workers: Workers) -> Result<Vec<Artifact>, CliError> {
    let dom = rectangle(&a.rectangle)?;
    let r = interpolate(&dom, &a.q_grid, a.sampling.trials, seed_of(&a.sampling), workers)?;
    let rows: Vec<PivotalRow> = r
        .points
        .iter()
        .map(|p| PivotalRow {
            q: p.q,
            crossing: p.crossing.estimate,
            crossing_se: p.crossing.standard_error,
            derivative: p.derivative.value,
            derivative_se: p.derivative.standard_error,
        })
        .collect();
    let summary = PivotalSummary {
        difference: r.difference.value,
        difference_se: r.difference.standard_error,
        quadrature: r.quadrature.value,
        quadrature_se: r.quadrature.standard_error,
        agree_within_3se: r.agrees(3.0),
    };
    Ok(vec![Artifact::csv("pivotal.csv", &rows)?, Artifact::csv("pivotal_summary.csv", &[summary])?])
}
