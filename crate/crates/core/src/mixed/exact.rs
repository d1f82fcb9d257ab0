//! Exact polynomials in `q` by exhaustive enumeration, in rational
//! arithmetic.

use std::fmt;

use num_rational::Ratio;
use num_traits::Zero;

use super::{MixedDomain, SiteKind, ARC_AB, ARC_CD};
use crate::error::{Error, Result};

/// Largest domain enumerated exhaustively.
pub const EXACT_SITE_LIMIT: usize = 22;

type Q = Ratio<i128>;

/// A polynomial in `q` with exact rational coefficients, lowest degree
/// first, without trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<Q>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn coefficients(&self) -> &[Q] {
        &self.coeffs
    }

    /// Degree, with the zero polynomial at 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, q: Q) -> Q {
        self.coeffs.iter().rev().fold(Q::zero(), |acc, c| acc * q + c)
    }

    pub fn eval_f64(&self, q: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * q + *c.numer() as f64 / *c.denom() as f64)
    }

    pub fn derivative(&self) -> Self {
        Polynomial::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * Q::from_integer(i as i128)).collect())
    }

    /// `p(1 - q)`.
    pub fn reflected(&self) -> Self {
        let mut out = vec![Q::zero(); self.coeffs.len()];
        for (i, c) in self.coeffs.iter().enumerate() {
            for (j, b) in binomials(i).into_iter().enumerate() {
                let sign = if j % 2 == 0 { 1 } else { -1 };
                out[j] += c * Q::from_integer(sign * b);
            }
        }
        Polynomial::new(out)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c}) q"),
                _ => format!("({c}) q^{i}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

fn binomials(n: usize) -> Vec<i128> {
    let mut row = vec![1i128];
    for k in 0..n {
        let next = row[k] * (n - k) as i128 / (k + 1) as i128;
        row.push(next);
    }
    row
}

/// Quantity whose expectation is expanded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// Indicator of the crossing from `AB` to `CD`.
    Crossing,
    /// `|Piv ∩ V2| - |Piv ∩ V3|`.
    Russo,
    /// `1[v pivotal] - 1[w pivotal]`.
    PivotalGap { v: usize, w: usize },
}

/// Exact expectation of `observable` as a polynomial in `q`, by enumerating
/// all configurations.
pub fn exact_polynomial(dom: &MixedDomain, observable: Observable) -> Result<Polynomial> {
    let n = dom.site_count();
    if n > EXACT_SITE_LIMIT {
        return Err(Error::Resource(format!("{n} sites exceed the enumeration limit of {EXACT_SITE_LIMIT}")));
    }
    if let Observable::PivotalGap { v, w } = observable {
        if v >= n || w >= n {
            return Err(Error::input("site is not in the domain"));
        }
    }
    let mask_of = |pred: &dyn Fn(usize) -> bool| (0..n).filter(|&s| pred(s)).fold(0u32, |m, s| m | 1 << s);
    let nbr: Vec<u32> = (0..n).map(|s| dom.neighbours(s).iter().fold(0u32, |m, &t| m | 1 << t)).collect();
    let ab = mask_of(&|s| dom.on_arc(s, ARC_AB));
    let cd = mask_of(&|s| dom.on_arc(s, ARC_CD));
    let ii = mask_of(&|s| dom.kind(s) == SiteKind::II);
    let iii = mask_of(&|s| dom.kind(s) == SiteKind::III);

    let total = 1usize << n;
    let mut cross = vec![0u64; total.div_ceil(64)];
    for mask in 0..total as u32 {
        let mut reach = ab & mask;
        let mut frontier = reach;
        while frontier != 0 {
            let s = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let new = nbr[s] & mask & !reach;
            reach |= new;
            frontier |= new;
        }
        if reach & cd != 0 {
            cross[mask as usize / 64] |= 1 << (mask % 64);
        }
    }
    let hit = |m: u32| cross[m as usize / 64] >> (m % 64) & 1 == 1;
    let pivotal = |m: u32, s: usize| hit(m | 1 << s) && !hit(m & !(1 << s));

    let (n2, n3) = (ii.count_ones() as usize, iii.count_ones() as usize);
    let n1 = n - n2 - n3;
    // table[a][b]: summed observable over configurations with a open type-II
    // and b open type-III sites.
    let mut table = vec![vec![0i128; n3 + 1]; n2 + 1];
    let q_sites: Vec<usize> = (0..n).filter(|&s| (ii | iii) >> s & 1 == 1).collect();
    for mask in 0..total as u32 {
        let value: i128 = match observable {
            Observable::Crossing => hit(mask) as i128,
            Observable::Russo => q_sites
                .iter()
                .filter(|&&s| pivotal(mask, s))
                .map(|&s| if ii >> s & 1 == 1 { 1 } else { -1 })
                .sum(),
            Observable::PivotalGap { v, w } => pivotal(mask, v) as i128 - pivotal(mask, w) as i128,
        };
        if value != 0 {
            table[(mask & ii).count_ones() as usize][(mask & iii).count_ones() as usize] += value;
        }
    }

    // Weight q^a (1-q)^(n2-a) (1-q)^b q^(n3-b) / 2^n1.
    let scale = Q::new(1, 1i128 << n1);
    let mut coeffs = vec![Q::zero(); n2 + n3 + 1];
    for (a, row) in table.iter().enumerate() {
        for (b, &t) in row.iter().enumerate() {
            if t == 0 {
                continue;
            }
            let shift = a + n3 - b;
            let m = n2 - a + b;
            for (j, c) in binomials(m).into_iter().enumerate() {
                let sign = if j % 2 == 0 { 1 } else { -1 };
                coeffs[shift + j] += scale * Q::from_integer(sign * c * t);
            }
        }
    }
    Ok(Polynomial::new(coeffs))
}
