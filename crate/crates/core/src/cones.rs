//! Metric cones, sine-cosine joins and the product-of-cones isometry.
//!
//! Cones are explicit product charts `(u, t)` with `t` bounded away from the
//! apex. Joins use coordinates `(u₁, u₂, θ)` in this fixed order. The product
//! of the cones over `g₁` and `g₂` is identified with the cone over their
//! join through `(t, s) = (r sin θ, r cos θ)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use crate::error::{GeomError, Result};
use crate::field::{ChartDomain, Field};
use crate::hypersurface::Embedding;
use crate::jet::Jet;
use crate::residual::{ResidualAccumulator, ResidualSummary};
use crate::riemann::MetricField;
use crate::zoo::{canonical_orientation, product_metric};

/// `t² g + dt²` on `base × (lo, hi)`, coordinates `(u, t)`.
pub fn cone_metric(base: &MetricField, lo: f64, hi: f64) -> Result<MetricField> {
    if !(lo > 0.0) || !(hi > lo) || !hi.is_finite() {
        return Err(GeomError::InvalidParameter(format!("cone: invalid radial range ({lo}, {hi})")));
    }
    let n = base.dim;
    let m = n + 1;
    let gb = base.components.clone();
    let map: Vec<usize> = (0..n).collect();
    let comps = Field::from_point_fn(m, m * m, move |x, order| {
        let g = gb.eval(&x[..n], order)?;
        let t = Jet::variable(m, order, n, x[n]);
        let t2 = t.mul_jet(&t);
        let mut out = vec![Jet::constant(m, order, 0.0); m * m];
        for i in 0..n {
            for j in 0..n {
                out[i * m + j] = g[i * n + j].reindex(m, &map).mul_jet(&t2);
            }
        }
        out[n * m + n] = Jet::constant(m, order, 1.0);
        Ok(out)
    });
    MetricField::new(
        format!("C({})", base.label),
        base.domain.product(&ChartDomain::interval(lo, hi)),
        comps,
    )
}

/// The slice `t = c` of a cone chart; `λ = 1/c` for the inward normal.
pub fn cone_slice(cone: &MetricField, base_domain: &ChartDomain, c: f64) -> Result<Embedding> {
    let n = base_domain.dim();
    let map = Field::from_jet_map(n, n + 1, move |u| {
        let mut v = u.to_vec();
        v.push(Jet::constant(n, u[0].order(), c));
        Ok(v)
    });
    canonical_orientation(Embedding::new(format!("t={c}"), base_domain.clone(), cone.clone(), map, 1)?)
}

/// Lower and upper `θ` bounds of join charts.
pub const JOIN_THETA: (f64, f64) = (0.1, FRAC_PI_2 - 0.1);

/// `sin²θ g₁ + cos²θ g₂ + dθ²` in coordinates `(u₁, u₂, θ)`.
pub fn sine_cone_join(g1: &MetricField, g2: &MetricField) -> Result<MetricField> {
    let (p, q) = (g1.dim, g2.dim);
    let n = p + q + 1;
    let (a, b) = (g1.components.clone(), g2.components.clone());
    let comps = Field::from_point_fn(n, n * n, move |x, order| {
        let theta = x[p + q];
        if !(theta > 0.0 && theta < FRAC_PI_2) {
            return Err(GeomError::OutsideDomain { point: x.to_vec() });
        }
        let ja = a.eval(&x[..p], order)?;
        let jb = b.eval(&x[p..p + q], order)?;
        let th = Jet::variable(n, order, p + q, theta);
        let (s, c) = (th.sin(), th.cos());
        let (s2, c2) = (s.mul_jet(&s), c.mul_jet(&c));
        let amap: Vec<usize> = (0..p).collect();
        let bmap: Vec<usize> = (p..p + q).collect();
        let mut out = vec![Jet::constant(n, order, 0.0); n * n];
        for i in 0..p {
            for j in 0..p {
                out[i * n + j] = ja[i * p + j].reindex(n, &amap).mul_jet(&s2);
            }
        }
        for i in 0..q {
            for j in 0..q {
                out[(p + i) * n + p + j] = jb[i * q + j].reindex(n, &bmap).mul_jet(&c2);
            }
        }
        out[(n - 1) * n + n - 1] = Jet::constant(n, order, 1.0);
        Ok(out)
    });
    MetricField::new(
        format!("{} * {}", g1.label, g2.label),
        g1.domain
            .product(&g2.domain)
            .product(&ChartDomain::interval(JOIN_THETA.0, JOIN_THETA.1)),
        comps,
    )
}

/// Radial range used for the factor cones of the product-of-cones chart.
pub const PRODUCT_CONE_RANGE: (f64, f64) = (1e-3, 1e3);

/// `(t² g₁ + dt²) + (s² g₂ + ds²)` in coordinates `(u₁, t, u₂, s)`.
pub fn product_of_cones(g1: &MetricField, g2: &MetricField) -> Result<MetricField> {
    let (lo, hi) = PRODUCT_CONE_RANGE;
    product_metric(&cone_metric(g1, lo, hi)?, &cone_metric(g2, lo, hi)?)
}

/// `(u₁, u₂, θ, r) ↦ (u₁, r sin θ, u₂, r cos θ)`.
pub fn join_to_product_map(p: usize, q: usize) -> Field {
    let n = p + q + 2;
    Field::from_jet_map(n, n, move |x| {
        let (th, r) = (&x[p + q], &x[p + q + 1]);
        let mut out = Vec::with_capacity(n);
        out.extend_from_slice(&x[..p]);
        out.push(r.mul_jet(&th.sin()));
        out.extend_from_slice(&x[p..p + q]);
        out.push(r.mul_jet(&th.cos()));
        Ok(out)
    })
}

/// `Φ*G` at `x`: `Σ ∂_a Φ^μ G_μν(Φ(x)) ∂_b Φ^ν`.
pub fn pullback_metric(metric: &MetricField, map: &Field, x: &[f64]) -> Result<Vec<f64>> {
    let src = map.dim();
    let m = map.len();
    let jets = map.eval(x, 1)?;
    let y: Vec<f64> = jets.iter().map(Jet::value).collect();
    let g = metric.metric_values(&y)?;
    let mut out = vec![0.0; src * src];
    for a in 0..src {
        for b in 0..src {
            let mut s = 0.0;
            for mu in 0..m {
                let ja = jets[mu].d1(a);
                if ja == 0.0 {
                    continue;
                }
                for nu in 0..m {
                    s += ja * g[mu * m + nu] * jets[nu].d1(b);
                }
            }
            out[a * src + b] = s;
        }
    }
    Ok(out)
}

/// Componentwise `|Φ*(product of cones) − cone over the join|` at each
/// sample `(u₁, u₂, θ, r)`.
pub fn product_cone_isometry_residual(g1: &MetricField, g2: &MetricField, sample: &[Vec<f64>]) -> Result<ResidualSummary> {
    let (p, q) = (g1.dim, g2.dim);
    let product = product_of_cones(g1, g2)?;
    let join = sine_cone_join(g1, g2)?;
    let (lo, hi) = PRODUCT_CONE_RANGE;
    let cone = cone_metric(&join, lo, hi)?;
    let map = join_to_product_map(p, q);
    let mut acc = ResidualAccumulator::default();
    for x in sample {
        let (th, r) = (x[p + q], x[p + q + 1]);
        if !(r > 0.0) || !(th > 0.0 && th < FRAC_PI_2) {
            return Err(GeomError::Domain {
                op: "product_cone_isometry_residual",
                value: if r > 0.0 { th } else { r },
                point: x.clone(),
            });
        }
        let pulled = pullback_metric(&product, &map, x)?;
        let direct = cone.metric_values(x)?;
        let worst = pulled
            .iter()
            .zip(&direct)
            .fold(0.0f64, |m, (a, b)| m.max(libm::fabs(a - b)));
        acc.push(worst);
    }
    Ok(acc.finish())
}

/// The `r = 1` slice of the product of cones, `(u₁, u₂, θ) ↦ (u₁, sin θ, u₂,
/// cos θ)`: the join as an umbilical hypersurface with `λ = 1`.
pub fn product_cone_unit_slice(g1: &MetricField, g2: &MetricField) -> Result<Embedding> {
    let (p, q) = (g1.dim, g2.dim);
    let n = p + q + 1;
    let map = Field::from_jet_map(n, n + 1, move |x| {
        let th = &x[p + q];
        let mut out = Vec::with_capacity(n + 1);
        out.extend_from_slice(&x[..p]);
        out.push(th.sin());
        out.extend_from_slice(&x[p..p + q]);
        out.push(th.cos());
        Ok(out)
    });
    let domain = g1
        .domain
        .product(&g2.domain)
        .product(&ChartDomain::interval(JOIN_THETA.0, JOIN_THETA.1));
    canonical_orientation(Embedding::new(
        format!("r=1 in C({}) × C({})", g1.label, g2.label),
        domain,
        product_of_cones(g1, g2)?,
        map,
        1,
    )?)
}

/// The slice `θ = θ₀` of a join chart, `(u₁, u₂) ↦ (u₁, u₂, θ₀)`.
pub fn join_theta_slice(join: &MetricField, theta: f64) -> Result<Embedding> {
    let n = join.dim - 1;
    if !(theta > JOIN_THETA.0 && theta < JOIN_THETA.1) {
        return Err(GeomError::OutsideDomain { point: vec![theta] });
    }
    let blocks = join.domain.blocks();
    let domain = ChartDomain::new(blocks[..blocks.len() - 1].to_vec());
    let map = Field::from_jet_map(n, n + 1, move |u| {
        let mut v = u.to_vec();
        v.push(Jet::constant(n, u[0].order(), theta));
        Ok(v)
    });
    Embedding::new(format!("θ={theta}"), domain, join.clone(), map, 1)
}
