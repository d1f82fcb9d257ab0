//! Monte Carlo covariance of the lifted simple random walk.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::Covariance;
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::parallel::{map_chunks, Workers};
use crate::stats::{Estimate, Moments};

#[derive(Debug, Clone, Copy)]
pub struct WalkOptions {
    pub steps: u64,
    pub replicates: u64,
    pub seed: u64,
    pub workers: Workers,
}

/// Empirical covariance of `Z_n / sqrt(n)` with standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WalkCovariance {
    pub xx: Estimate,
    pub yy: Estimate,
    pub xy: Estimate,
}

impl WalkCovariance {
    pub fn point(&self) -> Covariance {
        Covariance { xx: self.xx.value, yy: self.yy.value, xy: self.xy.value }
    }
}

/// Replicate `r` uses ChaCha8 stream `r` under `seed`; the start vertex is
/// drawn from the stationary law (uniform over half-edges).
pub fn walk_covariance(em: &Embedding, opts: WalkOptions) -> Result<WalkCovariance> {
    if opts.replicates == 0 {
        return Err(Error::input("random-walk covariance needs at least one replicate"));
    }
    if opts.steps == 0 {
        return Err(Error::input("random-walk covariance needs at least one step"));
    }
    let g = em.graph();
    let vectors: Vec<Complex64> = (0..g.half_edge_count()).map(|h| em.edge_vector(h)).collect();
    let scale = 1.0 / opts.steps as f64;

    let parts = map_chunks(opts.replicates, opts.workers, |range| {
        let mut m = [Moments::default(); 3];
        for r in range {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(r);
            let mut v = g.source(rng.gen_range(0..g.half_edge_count()));
            let mut z = Complex64::new(0.0, 0.0);
            for _ in 0..opts.steps {
                let out = g.out_edges(v);
                let h = out[rng.gen_range(0..out.len())];
                z += vectors[h];
                v = g.target(h);
            }
            m[0].push(z.re * z.re * scale);
            m[1].push(z.im * z.im * scale);
            m[2].push(z.re * z.im * scale);
        }
        m
    });
    let mut total = [Moments::default(); 3];
    for part in &parts {
        for (t, p) in total.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    Ok(WalkCovariance {
        xx: Estimate::from_moments(&total[0]),
        yy: Estimate::from_moments(&total[1]),
        xy: Estimate::from_moments(&total[2]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Builtin;
    use crate::modulus::covariance;
    use std::sync::Arc;

    fn opts(steps: u64, replicates: u64) -> WalkOptions {
        WalkOptions { steps, replicates, seed: 11, workers: Workers::SINGLE }
    }

    #[test]
    fn single_step_matches_edge_average() {
        let em = Embedding::balanced(Arc::new(Builtin::SquareOctagon.graph()), Complex64::i()).unwrap();
        let exact = covariance(&em);
        let est = walk_covariance(&em, opts(1, 40_000)).unwrap();
        assert!(est.xx.within(exact.xx, 4.0), "{est:?} vs {exact:?}");
        assert!(est.yy.within(exact.yy, 4.0));
        assert!(est.xy.within(exact.xy, 4.0));
    }

    #[test]
    fn zero_replicates_rejected() {
        let em = Embedding::balanced(Arc::new(Builtin::Honeycomb.graph()), Complex64::i()).unwrap();
        assert!(walk_covariance(&em, opts(10, 0)).is_err());
    }

    #[test]
    fn reproducible() {
        let em = Embedding::balanced(Arc::new(Builtin::Honeycomb.graph()), Complex64::i()).unwrap();
        let a = walk_covariance(&em, opts(50, 600)).unwrap();
        let b = walk_covariance(&em, WalkOptions { workers: Workers(Some(3)), ..opts(50, 600) }).unwrap();
        assert_eq!(a, b);
    }
}
