//! Site percolation on discretised domains.
//!
//! A [`DiscreteDomain`] is a region of the plane intersected with a scaled
//! periodic triangulation. Sites carry the random states; points (the
//! triangles) are where the separation fields live, and the edges between
//! points are the edges of the 3-regular graph dual to the triangulation.

mod contour;
mod crossing;
mod domain;
mod incipient;
mod separation;

pub use contour::{contour_integrals, riemann_sum, ComplexEstimate, Contour, ContourIntegrals};
pub use crossing::{
    closed_crossing, crossing, crossing_from_marks, estimate_cardy, estimate_crossing, refinement_mismatches,
    CrossingScratch,
};
pub use domain::{lattice_key, BoundaryArc, DiscreteDomain, Link, Point, Site, MAX_SITES};
pub use incipient::{edge_near, pi_ratio, shifted_pa_comparison, PiRatioOptions, PiRatioRow, ShiftComparison};
pub use separation::{
    estimate_h, estimate_pa, separation_events, EdgeRef, FieldRecord, IncrementRecord, Separation,
    SeparationScratch,
};

use num_complex::Complex64;

use crate::embedding::{DualPlacement, Embedding};
use crate::error::{Error, Result};
use crate::geometry::Polygon;
use crate::rng::{stream, CounterRng};

/// Open/closed state of every site of one domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub open: Vec<bool>,
    pub seed: u64,
    pub replicate: u64,
}

impl Configuration {
    pub fn uniform(dom: &DiscreteDomain, open: bool) -> Self {
        Configuration { open: vec![open; dom.site_count()], seed: 0, replicate: 0 }
    }

    pub fn len(&self) -> usize {
        self.open.len()
    }

    pub fn is_empty(&self) -> bool {
        self.open.is_empty()
    }

    /// The colour-swapped configuration.
    pub fn flipped(&self) -> Self {
        Configuration { open: self.open.iter().map(|b| !b).collect(), ..*self }
    }
}

/// Discretises `shape` by the triangulation dual to the 3-regular graph
/// embedded in `primal` (triangulation vertices at face centroids).
pub fn discretize(primal: &Embedding, shape: Polygon, mesh: f64, marks: &[Complex64]) -> Result<DiscreteDomain> {
    let tri = triangulation_of(primal)?;
    DiscreteDomain::new(&tri, shape, mesh, marks)
}

/// The dual triangulation of a 3-regular embedding, half-edge ids shared with
/// the primal.
pub fn triangulation_of(primal: &Embedding) -> Result<Embedding> {
    if !primal.graph().is_three_regular() {
        return Err(Error::input("domains are built from 3-regular graphs (their duals are triangulations)"));
    }
    primal.dual_geometry(DualPlacement::Centroid)?.embedding()
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::input(format!("probability must lie in [0, 1], got {p}")))
    }
}

/// Site generator for one trial.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TrialRng {
    rng: CounterRng,
    p: f64,
}

impl TrialRng {
    pub(crate) fn new(seed: u64, replicate: u64, p: f64) -> Self {
        TrialRng { rng: CounterRng::new(seed, stream::SITES, replicate), p }
    }

    #[inline]
    pub(crate) fn open(&self, dom: &DiscreteDomain, site: usize) -> bool {
        self.rng.bernoulli(dom.site_key(site), self.p)
    }
}

/// Independent site states, open with probability `p`, fixed by
/// `(seed, replicate)` and the sites' lattice identities.
pub fn sample_configuration(dom: &DiscreteDomain, p: f64, seed: u64, replicate: u64) -> Result<Configuration> {
    check_probability(p)?;
    let t = TrialRng::new(seed, replicate, p);
    Ok(Configuration { open: (0..dom.site_count()).map(|s| t.open(dom, s)).collect(), seed, replicate })
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        Err(Error::input("at least one trial is required"))
    } else {
        Ok(())
    }
}
