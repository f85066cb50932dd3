//! Jet-evaluable vector-valued fields on coordinate charts, chart domains and
//! deterministic sampling.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{GeomError, Result};
use crate::jet::{Jet, MAX_ORDER};

type EvalFn = dyn Fn(&[f64], usize) -> Result<Vec<Jet>> + Send + Sync;

/// A smooth map from a `dim`-dimensional chart to `ℝ^len`, evaluable as jets
/// of any order up to three at a chart point.
#[derive(Clone)]
pub struct Field {
    dim: usize,
    len: usize,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("dim", &self.dim)
            .field("len", &self.len)
            .finish_non_exhaustive()
    }
}

impl Field {
    /// A field given as a function of the coordinate jets.
    pub fn from_jet_map<F>(dim: usize, len: usize, f: F) -> Self
    where
        F: Fn(&[Jet]) -> Result<Vec<Jet>> + Send + Sync + 'static,
    {
        Field {
            dim,
            len,
            eval: Arc::new(move |x: &[f64], order: usize| f(&Jet::coordinates(x, order))),
        }
    }

    /// A field given directly as a point evaluator returning jets in `dim`
    /// variables at the requested order.
    pub fn from_point_fn<F>(dim: usize, len: usize, f: F) -> Self
    where
        F: Fn(&[f64], usize) -> Result<Vec<Jet>> + Send + Sync + 'static,
    {
        Field {
            dim,
            len,
            eval: Arc::new(f),
        }
    }

    pub fn constant(dim: usize, values: Vec<f64>) -> Self {
        let len = values.len();
        Field::from_point_fn(dim, len, move |_, order| {
            Ok(values.iter().map(|&v| Jet::constant(dim, order, v)).collect())
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn eval(&self, x: &[f64], order: usize) -> Result<Vec<Jet>> {
        if x.len() != self.dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if order > MAX_ORDER {
            return Err(GeomError::InvalidOrder(order));
        }
        let out = (self.eval)(x, order).map_err(|e| e.at_point(x))?;
        if out.len() != self.len {
            return Err(GeomError::DimensionMismatch {
                expected: self.len,
                got: out.len(),
            });
        }
        Ok(out)
    }

    pub fn values(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.eval(x, 0)?.iter().map(Jet::value).collect())
    }

    /// `self ∘ map`, where `map` sends the new chart into this field's chart.
    pub fn compose(&self, map: &Field) -> Field {
        assert_eq!(map.len, self.dim, "compose: map target dimension");
        let outer = self.clone();
        let inner = map.clone();
        Field::from_point_fn(map.dim, self.len, move |u, order| {
            let y = inner.eval(u, order)?;
            let y0: Vec<f64> = y.iter().map(Jet::value).collect();
            let f = outer.eval(&y0, order)?;
            Ok(f.iter().map(|fj| Jet::compose(fj, &y)).collect())
        })
    }

    /// `self ∘ π` for the coordinate projection `π` from a `new_dim` chart
    /// that reads this field's variable `i` from new coordinate `var_map[i]`.
    pub fn reindexed(&self, new_dim: usize, var_map: Vec<usize>) -> Field {
        assert_eq!(var_map.len(), self.dim);
        let inner = self.clone();
        Field::from_point_fn(new_dim, self.len, move |x, order| {
            let sub: Vec<f64> = var_map.iter().map(|&i| x[i]).collect();
            let f = inner.eval(&sub, order)?;
            Ok(f.iter().map(|j| j.reindex(new_dim, &var_map)).collect())
        })
    }

    /// Component-wise post-processing of the evaluated jets.
    pub fn map_jets<F>(&self, len: usize, f: F) -> Field
    where
        F: Fn(&[f64], Vec<Jet>) -> Result<Vec<Jet>> + Send + Sync + 'static,
    {
        let inner = self.clone();
        Field::from_point_fn(self.dim, len, move |x, order| f(x, inner.eval(x, order)?))
    }
}

/// One factor of a product chart domain.
#[derive(Clone, Debug, PartialEq)]
pub enum DomainBlock {
    Interval { lo: f64, hi: f64 },
    Ball { dim: usize, radius: f64 },
}

impl DomainBlock {
    pub fn dim(&self) -> usize {
        match self {
            DomainBlock::Interval { .. } => 1,
            DomainBlock::Ball { dim, .. } => *dim,
        }
    }
}

/// Margin kept from the boundary when drawing sample points.
pub const SAMPLE_MARGIN: f64 = 0.05;

/// Default seed of the sampling sequence.
pub const DEFAULT_SEED: u64 = 17;

const PRIMES: [u64; 24] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// Point `index` of the Halton sequence in the unit cube `[0,1)^dim`.
pub fn halton(index: u64, dim: usize) -> Vec<f64> {
    assert!(dim <= PRIMES.len(), "halton: dimension {dim} too large");
    (0..dim).map(|d| radical_inverse(index, PRIMES[d])).collect()
}

/// Product of intervals and balls describing where a chart is valid.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartDomain {
    blocks: Vec<DomainBlock>,
}

impl ChartDomain {
    pub fn new(blocks: Vec<DomainBlock>) -> Self {
        ChartDomain { blocks }
    }

    pub fn ball(dim: usize, radius: f64) -> Self {
        ChartDomain::new(vec![DomainBlock::Ball { dim, radius }])
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        ChartDomain::new(vec![DomainBlock::Interval { lo, hi }])
    }

    pub fn boxed(bounds: &[(f64, f64)]) -> Self {
        ChartDomain::new(
            bounds
                .iter()
                .map(|&(lo, hi)| DomainBlock::Interval { lo, hi })
                .collect(),
        )
    }

    pub fn blocks(&self) -> &[DomainBlock] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(DomainBlock::dim).sum()
    }

    pub fn product(&self, other: &ChartDomain) -> ChartDomain {
        let mut blocks = self.blocks.clone();
        blocks.extend(other.blocks.iter().cloned());
        ChartDomain { blocks }
    }

    /// Signed distance-like margin: positive inside, the smallest distance to
    /// any block boundary (max-norm across blocks).
    pub fn interior_margin(&self, x: &[f64]) -> f64 {
        let mut off = 0;
        let mut m = f64::INFINITY;
        for b in &self.blocks {
            match *b {
                DomainBlock::Interval { lo, hi } => {
                    let v = x[off];
                    m = m.min((v - lo).min(hi - v));
                    off += 1;
                }
                DomainBlock::Ball { dim, radius } => {
                    let r2: f64 = x[off..off + dim].iter().map(|v| v * v).sum();
                    m = m.min(radius - libm::sqrt(r2));
                    off += dim;
                }
            }
        }
        m
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && self.interior_margin(x) > 0.0
    }

    pub fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if !(self.interior_margin(x) > 0.0) {
            return Err(GeomError::OutsideDomain { point: x.to_vec() });
        }
        Ok(())
    }

    /// A point well inside the domain (the centre of every block).
    pub fn center(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        for b in &self.blocks {
            match *b {
                DomainBlock::Interval { lo, hi } => out.push(0.5 * (lo + hi)),
                DomainBlock::Ball { dim, .. } => out.extend(core::iter::repeat_n(0.0, dim)),
            }
        }
        out
    }

    fn map_unit_cube(&self, c: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        let mut off = 0;
        for b in &self.blocks {
            match *b {
                DomainBlock::Interval { lo, hi } => {
                    out.push(lo + (hi - lo) * c[off]);
                    off += 1;
                }
                DomainBlock::Ball { dim, radius } => {
                    for d in 0..dim {
                        out.push(radius * (2.0 * c[off + d] - 1.0));
                    }
                    off += dim;
                }
            }
        }
        out
    }

    /// `count` deterministic sample points from the Halton sequence (offset
    /// by `seed`), rejecting points within [`SAMPLE_MARGIN`] of the boundary.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        self.sample_with_margin(count, seed, SAMPLE_MARGIN)
    }

    pub fn sample_with_margin(&self, count: usize, seed: u64, margin: f64) -> Vec<Vec<f64>> {
        let dim = self.dim();
        let mut out = Vec::with_capacity(count);
        let start = 1 + seed.wrapping_mul(7919) % 1_000_003;
        let mut index = start;
        let limit = start + 10_000 * (count as u64 + 1);
        while out.len() < count && index < limit {
            let p = self.map_unit_cube(&halton(index, dim));
            if self.interior_margin(&p) > margin {
                out.push(p);
            }
            index += 1;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn halton_first_points() {
        assert_eq!(halton(1, 2), vec![0.5, 1.0 / 3.0]);
        assert_eq!(halton(2, 2), vec![0.25, 2.0 / 3.0]);
    }

    #[test]
    fn samples_respect_margin_and_are_reproducible() {
        let d = ChartDomain::ball(2, 1.0).product(&ChartDomain::interval(0.5, 2.0));
        let a = d.sample(50, 3);
        let b = d.sample(50, 3);
        assert_eq!(a, b);
        assert_eq!(a.len(), 50);
        for p in &a {
            assert!(d.interior_margin(p) > SAMPLE_MARGIN);
        }
        assert_ne!(a, d.sample(50, 4));
    }

    #[test]
    fn compose_matches_direct_chain_rule() {
        // f(y) = y0 * y1, map(u) = (sin u, u^2)  =>  f(u) = u^2 sin u
        let f = Field::from_jet_map(2, 1, |y| Ok(vec![&y[0] * &y[1]]));
        let m = Field::from_jet_map(1, 2, |u| Ok(vec![u[0].sin(), &u[0] * &u[0]]));
        let h = f.compose(&m).eval(&[0.7], 3).unwrap();
        let u = 0.7f64;
        let (s, c) = (libm::sin(u), libm::cos(u));
        assert_relative_eq!(h[0].value(), u * u * s, epsilon = 1e-14);
        assert_relative_eq!(h[0].d1(0), 2.0 * u * s + u * u * c, epsilon = 1e-14);
        assert_relative_eq!(
            h[0].d2(0, 0),
            2.0 * s + 4.0 * u * c - u * u * s,
            epsilon = 1e-13
        );
    }

    #[test]
    fn reindexed_field_ignores_other_variables() {
        let f = Field::from_jet_map(1, 1, |y| Ok(vec![y[0].exp()]));
        let g = f.reindexed(3, vec![2]);
        let v = g.eval(&[5.0, 6.0, 0.0], 2).unwrap();
        assert_relative_eq!(v[0].value(), 1.0);
        assert_eq!(v[0].d1(0), 0.0);
        assert_relative_eq!(v[0].d1(2), 1.0);
        assert_relative_eq!(v[0].d2(2, 2), 1.0);
    }

    #[test]
    fn dimension_checks() {
        let f = Field::constant(2, vec![1.0]);
        assert!(f.eval(&[0.0], 1).is_err());
        assert!(f.eval(&[0.0, 0.0], 4).is_err());
        let d = ChartDomain::boxed(&[(0.0, 1.0)]);
        assert!(d.check(&[1.5]).is_err());
        assert!(d.check(&[0.5]).is_ok());
    }
}
