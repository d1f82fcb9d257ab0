//! Browser bindings. Every operation returns a JSON string; the native
//! `*_json` functions carry the logic so they can be tested off the browser.

use std::sync::Arc;

use confperc::embedding::Embedding;
use confperc::geometry::Polygon;
use confperc::graph::{Builtin, TorusGraph};
use confperc::modulus::{alpha_cp, alpha_rw};
use confperc::parallel::Workers;
use confperc::percolation::{crossing, estimate_crossing, sample_configuration, triangulation_of, DiscreteDomain};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Smallest mesh the page accepts; finer domains are too slow in a tab.
const MIN_DELTA: f64 = 0.01;

fn builtin(name: &str) -> Result<Arc<TorusGraph>, String> {
    Builtin::ALL
        .iter()
        .find(|b| b.name() == name)
        .map(|b| Arc::new(b.graph()))
        .ok_or_else(|| format!("unknown lattice {name:?}"))
}

fn square_domain(graph: &str, delta: f64) -> Result<DiscreteDomain, String> {
    if !(MIN_DELTA..=0.5).contains(&delta) {
        return Err(format!("mesh must lie in [{MIN_DELTA}, 0.5]"));
    }
    let g = builtin(graph)?;
    let alpha = alpha_rw(&g).map_err(|e| e.to_string())?;
    let em = Embedding::balanced(g, alpha).map_err(|e| e.to_string())?;
    let tri = triangulation_of(&em).map_err(|e| e.to_string())?;
    let square = Polygon::unit_square();
    let marks = square.vertices().to_vec();
    DiscreteDomain::new(&tri, square, delta, &marks).map_err(|e| e.to_string())
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serialises")
}

#[derive(Serialize)]
struct Moduli {
    graph: String,
    rw: [f64; 2],
    /// Absent for lattices without a circle packing (e.g. the square grid).
    cp: Option<[f64; 2]>,
}

pub fn moduli_json(graph: &str) -> Result<String, String> {
    let g = builtin(graph)?;
    let rw = alpha_rw(&g).map_err(|e| e.to_string())?;
    let tri = if g.faces().iter().all(|f| f.len() == 3) {
        Some((*g).clone())
    } else if g.is_three_regular() {
        Some(g.dual().map_err(|e| e.to_string())?)
    } else {
        None
    };
    let cp = match tri {
        Some(t) => Some(alpha_cp(&t).map_err(|e| e.to_string())?),
        None => None,
    };
    Ok(json(&Moduli { graph: graph.into(), rw: [rw.re, rw.im], cp: cp.map(|z| [z.re, z.im]) }))
}

#[derive(Serialize)]
struct Crossing {
    sites: usize,
    trials: u64,
    estimate: f64,
    standard_error: f64,
}

pub fn crossing_json(graph: &str, delta: f64, trials: u32, seed: u32) -> Result<String, String> {
    let dom = square_domain(graph, delta)?;
    let s = estimate_crossing(&dom, 0.5, trials.into(), seed.into(), Workers::SINGLE).map_err(|e| e.to_string())?;
    Ok(json(&Crossing { sites: dom.site_count(), trials: s.trials, estimate: s.estimate, standard_error: s.standard_error }))
}

#[derive(Serialize)]
struct Sample {
    /// Flat `[x0, y0, x1, y1, ...]` site positions in the unit square.
    positions: Vec<f64>,
    open: Vec<bool>,
    crosses: bool,
}

pub fn sample_json(graph: &str, delta: f64, seed: u32, replicate: u32) -> Result<String, String> {
    let dom = square_domain(graph, delta)?;
    let cfg = sample_configuration(&dom, 0.5, seed.into(), replicate.into()).map_err(|e| e.to_string())?;
    let crosses = crossing(&dom, &cfg).map_err(|e| e.to_string())?;
    let positions = dom.sites().iter().flat_map(|s| [s.position.re, s.position.im]).collect();
    Ok(json(&Sample { positions, open: cfg.open, crosses }))
}

fn to_js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// Random-walk and circle-packing moduli of a built-in lattice.
#[wasm_bindgen]
pub fn moduli(graph: &str) -> Result<String, JsError> {
    to_js(moduli_json(graph))
}

/// Monte Carlo bottom-to-top crossing probability of the unit square.
#[wasm_bindgen(js_name = crossingEstimate)]
pub fn crossing_estimate(graph: &str, delta: f64, trials: u32, seed: u32) -> Result<String, JsError> {
    to_js(crossing_json(graph, delta, trials, seed))
}

/// One critical configuration of the unit square, for drawing.
#[wasm_bindgen]
pub fn sample(graph: &str, delta: f64, seed: u32, replicate: u32) -> Result<String, JsError> {
    to_js(sample_json(graph, delta, seed, replicate))
}

/// Names of the built-in lattices, as a JSON array.
#[wasm_bindgen]
pub fn lattices() -> String {
    json(&Builtin::ALL.iter().map(|b| b.name()).collect::<Vec<_>>())
}

