//! Levi-Civita connection and curvature of a metric on a chart.
//!
//! Conventions: `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z` and
//! `R(X,Y,Z,W) = g(R(X,Y)Z, W)`, so the unit sphere has `R(X,Y,Y,X) > 0`
//! and the curvature operator defined by `g(R(X∧Y), Z∧W) = −R(X,Y,Z,W)` is
//! the identity on the unit sphere.
//!
//! Index layouts: `Γ^k_ij` at `(k*n + i)*n + j`; `R_ijkl` at
//! `((i*n + j)*n + k)*n + l`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{GeomError, Result};
use crate::field::{ChartDomain, Field};
use crate::jet::Jet;
use crate::linalg;

/// A Riemannian metric given by jet-evaluable components on a chart.
#[derive(Clone, Debug)]
pub struct MetricField {
    pub label: String,
    pub dim: usize,
    pub domain: ChartDomain,
    /// `dim²` row-major components `g_ij`.
    pub components: Field,
    /// Einstein constant `c` with `Ric = c g`, when known.
    pub einstein: Option<f64>,
}

impl MetricField {
    pub fn new(label: impl Into<String>, domain: ChartDomain, components: Field) -> Result<Self> {
        let dim = domain.dim();
        if dim < 1 {
            return Err(GeomError::InvalidParameter("metric dimension must be ≥ 1".into()));
        }
        if components.dim() != dim || components.len() != dim * dim {
            return Err(GeomError::DimensionMismatch {
                expected: dim * dim,
                got: components.len(),
            });
        }
        Ok(MetricField {
            label: label.into(),
            dim,
            domain,
            components,
            einstein: None,
        })
    }

    pub fn with_einstein(mut self, constant: f64) -> Self {
        self.einstein = Some(constant);
        self
    }

    pub fn metric_jets(&self, x: &[f64], order: usize) -> Result<Vec<Jet>> {
        self.domain.check(x)?;
        self.components.eval(x, order)
    }

    pub fn metric_values(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.domain.check(x)?;
        self.components.values(x)
    }

    /// Metric jets of order `order` plus inverse and Christoffel symbols.
    pub fn geometry(&self, x: &[f64], order: usize) -> Result<LocalGeometry> {
        if order < 1 {
            return Err(GeomError::InvalidOrder(order));
        }
        let g = self.metric_jets(x, order)?;
        LocalGeometry::from_metric_jets(x, self.dim, g)
    }

    /// Metric `c² g` on the same chart (Einstein constant is scale invariant).
    pub fn rescaled(&self, c2: f64) -> MetricField {
        let comps = self
            .components
            .map_jets(self.dim * self.dim, move |_, g| Ok(g.iter().map(|v| v.scale(c2)).collect()));
        MetricField {
            label: alloc::format!("{}·{}", c2, self.label),
            dim: self.dim,
            domain: self.domain.clone(),
            components: comps,
            einstein: self.einstein,
        }
    }

    pub fn smallest_eigenvalue(&self, x: &[f64]) -> Result<f64> {
        let g = self.metric_values(x)?;
        Ok(linalg::symmetric_eigenvalues(&g, self.dim)[0])
    }
}

/// Metric, inverse metric and Christoffel symbols as jets at one point.
#[derive(Clone, Debug)]
pub struct LocalGeometry {
    pub point: Vec<f64>,
    pub dim: usize,
    /// Metric jets at the requested order.
    pub g: Vec<Jet>,
    pub ginv: Vec<Jet>,
    /// Christoffel symbols, one order below the metric.
    pub christoffel: Vec<Jet>,
}

impl LocalGeometry {
    pub fn from_metric_jets(x: &[f64], n: usize, g: Vec<Jet>) -> Result<Self> {
        let order = g[0].order();
        if order < 1 {
            return Err(GeomError::InvalidOrder(order));
        }
        let ginv = linalg::inverse(&g, n).map_err(|e| e.at_point(x))?;
        // dg[(l*n + i)*n + j] = ∂_l g_ij
        let mut dg = Vec::with_capacity(n * n * n);
        for l in 0..n {
            for ij in 0..n * n {
                dg.push(g[ij].partial(l));
            }
        }
        let d = |l: usize, i: usize, j: usize| &dg[(l * n + i) * n + j];
        // lowered symbols Γ_lij = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
        let mut lower = vec![Jet::constant(n, order - 1, 0.0); n * n * n];
        for l in 0..n {
            for i in 0..n {
                for j in i..n {
                    let v = (&(d(i, j, l) + d(j, i, l)) - d(l, i, j)).scale(0.5);
                    lower[(l * n + i) * n + j] = v.clone();
                    lower[(l * n + j) * n + i] = v;
                }
            }
        }
        let ginv_t: Vec<Jet> = ginv.iter().map(|v| v.truncate(order - 1)).collect();
        let mut christoffel = vec![Jet::constant(n, order - 1, 0.0); n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let mut s = Jet::constant(n, order - 1, 0.0);
                    for l in 0..n {
                        s += ginv_t[k * n + l].mul_jet(&lower[(l * n + i) * n + j]);
                    }
                    christoffel[(k * n + j) * n + i] = s.clone();
                    christoffel[(k * n + i) * n + j] = s;
                }
            }
        }
        Ok(LocalGeometry {
            point: x.to_vec(),
            dim: n,
            g,
            ginv,
            christoffel,
        })
    }

    #[inline]
    pub fn gamma(&self, k: usize, i: usize, j: usize) -> &Jet {
        let n = self.dim;
        &self.christoffel[(k * n + i) * n + j]
    }

    pub fn christoffel_values(&self) -> Vec<f64> {
        self.christoffel.iter().map(Jet::value).collect()
    }

    pub fn metric_values(&self) -> Vec<f64> {
        self.g.iter().map(Jet::value).collect()
    }

    pub fn inverse_values(&self) -> Vec<f64> {
        self.ginv.iter().map(Jet::value).collect()
    }

    fn gamma_partials(&self) -> Result<Vec<Jet>> {
        let n = self.dim;
        if self.christoffel[0].order() < 1 {
            return Err(GeomError::InvalidOrder(self.g[0].order()));
        }
        let mut out = Vec::with_capacity(n * self.christoffel.len());
        for i in 0..n {
            for c in &self.christoffel {
                out.push(c.partial(i));
            }
        }
        Ok(out)
    }

    /// `R_ijkl` as jets two orders below the metric (requires metric order ≥ 2).
    pub fn riemann_jets(&self) -> Result<Vec<Jet>> {
        let n = self.dim;
        let dgam = self.gamma_partials()?;
        let q = dgam[0].order();
        let gam: Vec<Jet> = self.christoffel.iter().map(|c| c.truncate(q)).collect();
        let gt: Vec<Jet> = self.g.iter().map(|c| c.truncate(q)).collect();
        let n3 = n * n * n;
        let dg = |i: usize, m: usize, a: usize, b: usize| &dgam[i * n3 + (m * n + a) * n + b];
        let gm = |m: usize, a: usize, b: usize| &gam[(m * n + a) * n + b];
        let zero = Jet::constant(n, q, 0.0);
        // Rup[((m*n + k)*n + i)*n + j] = R^m_kij for i < j
        let mut rup = vec![zero.clone(); n * n3];
        for m in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in i + 1..n {
                        let mut s = dg(i, m, j, k) - dg(j, m, i, k);
                        for p in 0..n {
                            s += gm(m, i, p).mul_jet(gm(p, j, k));
                            s -= gm(m, j, p).mul_jet(gm(p, i, k));
                        }
                        rup[((m * n + k) * n + i) * n + j] = s;
                    }
                }
            }
        }
        let mut r = vec![zero; n * n3];
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut s = Jet::constant(n, q, 0.0);
                        for m in 0..n {
                            s += gt[l * n + m].mul_jet(&rup[((m * n + k) * n + i) * n + j]);
                        }
                        r[((j * n + i) * n + k) * n + l] = -&s;
                        r[((i * n + j) * n + k) * n + l] = s;
                    }
                }
            }
        }
        Ok(r)
    }

    /// Ricci tensor from the contracted Christoffel formula (independent of
    /// [`riemann_jets`](Self::riemann_jets)).
    pub fn ricci_direct(&self) -> Result<Vec<f64>> {
        let n = self.dim;
        let gam = self.christoffel_values();
        let g = |m: usize, a: usize, b: usize| gam[(m * n + a) * n + b];
        // ∂_i Γ^m_ab values
        let dg = |i: usize, m: usize, a: usize, b: usize| self.gamma(m, a, b).d1(i);
        if self.christoffel[0].order() < 1 {
            return Err(GeomError::InvalidOrder(self.g[0].order()));
        }
        let mut ric = vec![0.0; n * n];
        for j in 0..n {
            for k in 0..n {
                let mut s = 0.0;
                for m in 0..n {
                    s += dg(m, m, j, k) - dg(j, m, m, k);
                    for p in 0..n {
                        s += g(m, m, p) * g(p, j, k) - g(m, j, p) * g(p, m, k);
                    }
                }
                ric[j * n + k] = s;
            }
        }
        Ok(ric)
    }
}

/// Curvature quantities at one chart point.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureAtPoint {
    pub point: Vec<f64>,
    pub dim: usize,
    pub metric: Vec<f64>,
    pub riemann: Vec<f64>,
    pub ricci: Vec<f64>,
    /// Ricci tensor from the direct Christoffel formula.
    pub ricci_direct: Vec<f64>,
    pub scalar: f64,
}

impl CurvatureAtPoint {
    #[inline]
    pub fn r(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.dim;
        self.riemann[((i * n + j) * n + k) * n + l]
    }

    /// `R(X,Y,Z,W)` for coordinate vectors.
    pub fn eval(&self, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
        let n = self.dim;
        let mut s = 0.0;
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if y[j] == 0.0 {
                    continue;
                }
                for k in 0..n {
                    if z[k] == 0.0 {
                        continue;
                    }
                    for l in 0..n {
                        s += x[i] * y[j] * z[k] * w[l] * self.r(i, j, k, l);
                    }
                }
            }
        }
        s
    }

    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.dim;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += x[i] * self.metric[i * n + j] * y[j];
            }
        }
        s
    }

    /// Largest violation of the pair symmetries and the first Bianchi identity.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.r(i, j, k, l);
                        worst = worst
                            .max(libm::fabs(r + self.r(j, i, k, l)))
                            .max(libm::fabs(r + self.r(i, j, l, k)))
                            .max(libm::fabs(r - self.r(k, l, i, j)))
                            .max(libm::fabs(r + self.r(j, k, i, l) + self.r(k, i, j, l)));
                    }
                }
            }
        }
        worst
    }

    /// `max |Ric − (scal/n) g|`.
    pub fn einstein_residual(&self) -> f64 {
        let n = self.dim as f64;
        self.ricci
            .iter()
            .zip(&self.metric)
            .map(|(r, g)| libm::fabs(r - self.scalar / n * g))
            .fold(0.0, f64::max)
    }
}

pub fn christoffels(metric: &MetricField, x: &[f64]) -> Result<Vec<f64>> {
    Ok(metric.geometry(x, 1)?.christoffel_values())
}

pub fn curvature(metric: &MetricField, x: &[f64]) -> Result<CurvatureAtPoint> {
    let geo = metric.geometry(x, 2)?;
    curvature_from_geometry(&geo)
}

pub fn curvature_from_geometry(geo: &LocalGeometry) -> Result<CurvatureAtPoint> {
    let n = geo.dim;
    let riemann: Vec<f64> = geo.riemann_jets()?.iter().map(Jet::value).collect();
    let ginv = geo.inverse_values();
    let idx = |i: usize, j: usize, k: usize, l: usize| ((i * n + j) * n + k) * n + l;
    let mut ricci = vec![0.0; n * n];
    for j in 0..n {
        for k in 0..n {
            let mut s = 0.0;
            for a in 0..n {
                for b in 0..n {
                    s += ginv[a * n + b] * riemann[idx(a, j, k, b)];
                }
            }
            ricci[j * n + k] = s;
        }
    }
    let scalar = (0..n * n).map(|ab| ginv[ab] * ricci[ab]).sum();
    Ok(CurvatureAtPoint {
        point: geo.point.clone(),
        dim: n,
        metric: geo.metric_values(),
        riemann,
        ricci,
        ricci_direct: geo.ricci_direct()?,
        scalar,
    })
}

/// `K(X,Y) = R(X,Y,Y,X) / (|X|²|Y|² − g(X,Y)²)`.
pub fn sectional_curvature(curv: &CurvatureAtPoint, x: &[f64], y: &[f64]) -> Result<f64> {
    let den = curv.inner(x, x) * curv.inner(y, y) - curv.inner(x, y) * curv.inner(x, y);
    let scale = curv.inner(x, x) * curv.inner(y, y);
    if !(den > 1e-14 * scale) {
        return Err(GeomError::DegeneratePlane);
    }
    Ok(curv.eval(x, y, y, x) / den)
}

/// Index pairs `(a, b)`, `a < b`, labelling the orthonormal basis of `Λ²`.
pub fn two_vector_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            out.push((a, b));
        }
    }
    out
}

/// Matrix of the curvature operator on `Λ²` in the basis `e_a ∧ e_b` built
/// from a `g`-orthonormal frame; entries `−R(e_a, e_b, e_c, e_d)`.
pub fn curvature_operator(curv: &CurvatureAtPoint) -> Result<DMatrix<f64>> {
    let n = curv.dim;
    let frame = linalg::orthonormal_frame(&curv.metric, n).map_err(|e| e.at_point(&curv.point))?;
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|c| (0..n).map(|r| frame[(r, c)]).collect())
        .collect();
    let pairs = two_vector_pairs(n);
    let m = pairs.len();
    let mut op = DMatrix::<f64>::zeros(m, m);
    for (p, &(a, b)) in pairs.iter().enumerate() {
        for (q, &(c, d)) in pairs.iter().enumerate().skip(p) {
            let v = -curv.eval(&cols[a], &cols[b], &cols[c], &cols[d]);
            op[(p, q)] = v;
            op[(q, p)] = v;
        }
    }
    Ok(op)
}

/// Orthonormal-frame components of the Riemann tensor, `R(e_i,e_j,e_k,e_l)`.
pub fn frame_riemann(curv: &CurvatureAtPoint) -> Result<Vec<f64>> {
    let n = curv.dim;
    let frame = linalg::orthonormal_frame(&curv.metric, n)?;
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|c| (0..n).map(|r| frame[(r, c)]).collect())
        .collect();
    let mut out = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    out[((i * n + j) * n + k) * n + l] = curv.eval(&cols[i], &cols[j], &cols[k], &cols[l]);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn flat(n: usize) -> MetricField {
        let mut id = vec![0.0; n * n];
        for i in 0..n {
            id[i * n + i] = 1.0;
        }
        MetricField::new("flat", ChartDomain::ball(n, 10.0), Field::constant(n, id)).unwrap()
    }

    fn polar() -> MetricField {
        let comps = Field::from_jet_map(2, 4, |x| {
            let r = &x[0];
            let zero = Jet::constant(2, r.order(), 0.0);
            Ok(vec![Jet::constant(2, r.order(), 1.0), zero.clone(), zero, r * r])
        });
        MetricField::new("polar", ChartDomain::boxed(&[(0.1, 5.0), (-3.0, 3.0)]), comps).unwrap()
    }

    pub(crate) fn stereo_sphere(n: usize) -> MetricField {
        let comps = Field::from_jet_map(n, n * n, move |u| {
            let q = u[0].order();
            let mut s = Jet::constant(n, q, 1.0);
            for ui in u {
                s += ui * ui;
            }
            let f = (&s * &s).recip()?.scale(4.0);
            let zero = Jet::constant(n, q, 0.0);
            let mut out = vec![zero; n * n];
            for i in 0..n {
                out[i * n + i] = f.clone();
            }
            Ok(out)
        });
        MetricField::new("S", ChartDomain::ball(n, 3.0), comps).unwrap()
    }

    #[test]
    fn flat_christoffels_vanish() {
        let g = christoffels(&flat(3), &[0.3, -0.2, 1.0]).unwrap();
        assert!(g.iter().all(|&v| v == 0.0));
        let c = curvature(&flat(3), &[0.3, -0.2, 1.0]).unwrap();
        assert_eq!(c.scalar, 0.0);
    }

    #[test]
    fn polar_christoffels() {
        let g = christoffels(&polar(), &[2.0, 0.5]).unwrap();
        // Γ^r_θθ = −r, Γ^θ_rθ = 1/r
        assert_relative_eq!(g[3], -2.0, epsilon = 1e-14);
        assert_relative_eq!(g[5], 0.5, epsilon = 1e-14);
        assert_relative_eq!(g[6], 0.5, epsilon = 1e-14);
        let c = curvature(&polar(), &[2.0, 0.5]).unwrap();
        assert!(c.riemann.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn stereographic_sphere_at_origin_has_zero_symbols() {
        let g = christoffels(&stereo_sphere(2), &[0.0, 0.0]).unwrap();
        assert!(g.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn unit_two_sphere_curvature() {
        let m = stereo_sphere(2);
        for x in m.domain.sample(10, 1) {
            let c = curvature(&m, &x).unwrap();
            assert_relative_eq!(c.scalar, 2.0, epsilon = 1e-11);
            let k = sectional_curvature(&c, &[1.0, 0.0], &[0.3, 1.0]).unwrap();
            assert_relative_eq!(k, 1.0, epsilon = 1e-11);
        }
    }

    #[test]
    fn five_sphere_scalar_and_operator() {
        let m = stereo_sphere(5);
        let c = curvature(&m, &[0.2, -0.1, 0.3, 0.05, -0.4]).unwrap();
        assert_relative_eq!(c.scalar, 20.0, epsilon = 1e-10);
        let op = curvature_operator(&c).unwrap();
        assert_relative_eq!(op, DMatrix::identity(10, 10), epsilon = 1e-10);
        assert!(c.symmetry_residual() < 1e-11);
        for (a, b) in c.ricci.iter().zip(&c.ricci_direct) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!(c.einstein_residual() < 1e-10);
    }

    #[test]
    fn parallel_vectors_are_a_degenerate_plane() {
        let c = curvature(&stereo_sphere(2), &[0.1, 0.1]).unwrap();
        assert_eq!(
            sectional_curvature(&c, &[1.0, 2.0], &[2.0, 4.0]),
            Err(GeomError::DegeneratePlane)
        );
    }

    #[test]
    fn outside_domain_is_rejected() {
        assert!(matches!(
            curvature(&polar(), &[0.0, 0.0]),
            Err(GeomError::OutsideDomain { .. })
        ));
    }
}
