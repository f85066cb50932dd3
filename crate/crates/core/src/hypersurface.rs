//! Geometry of a hypersurface `x: U ⊂ ℝⁿ → (M̄, ḡ)` given in charts.
//!
//! The unit normal is `N = orientation · ḡ⁻¹ν / |ν|` where `ν` is the
//! cofactor covector of the tangent frame (`ν_μ = (−1)^μ det T_{−μ}`), the
//! second fundamental form is `II_ab = ḡ(∇̄_a ∂_b x, N)` and the shape
//! operator is the Weingarten map `A X = −(∇̄_X N)^T`, so that
//! `ḡ(II(X,Y), N) = g(AX, Y)` and, on an umbilical hypersurface,
//! `∇̄_X N = −λX`. The unit sphere in flat space with inward normal has
//! `λ = 1`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{GeomError, Result};
use crate::field::{ChartDomain, Field};
use crate::forms::{binomial, Form, FormField, FormValue};
use crate::jet::Jet;
use crate::linalg;
use crate::residual::{ResidualAccumulator, ResidualSummary};
use crate::riemann::{self, LocalGeometry, MetricField};

/// Umbilicity level below which Gauss/Codazzi residuals are meaningful.
pub const UMBILIC_TOLERANCE: f64 = 1e-7;

/// Smallest admissible singular value of the differential.
pub const RANK_TOLERANCE: f64 = 1e-8;

/// A parametrised hypersurface of an `(n+1)`-dimensional chart.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub label: String,
    pub intrinsic_dim: usize,
    pub domain: ChartDomain,
    pub ambient: MetricField,
    /// `u ↦ x(u)`, `n → n+1` components.
    pub map: Field,
    /// `±1`, selecting the normal branch relative to the cofactor normal.
    pub orientation: i32,
}

impl Embedding {
    pub fn new(
        label: impl Into<String>,
        domain: ChartDomain,
        ambient: MetricField,
        map: Field,
        orientation: i32,
    ) -> Result<Self> {
        let n = domain.dim();
        if map.dim() != n || map.len() != n + 1 || ambient.dim != n + 1 {
            return Err(GeomError::DimensionMismatch {
                expected: n + 1,
                got: map.len(),
            });
        }
        if orientation != 1 && orientation != -1 {
            return Err(GeomError::InvalidParameter("orientation must be ±1".into()));
        }
        Ok(Embedding {
            label: label.into(),
            intrinsic_dim: n,
            domain,
            ambient,
            map,
            orientation,
        })
    }

    pub fn flipped(&self) -> Embedding {
        let mut e = self.clone();
        e.orientation = -e.orientation;
        e
    }

    pub fn with_orientation(&self, orientation: i32) -> Embedding {
        let mut e = self.clone();
        e.orientation = orientation;
        e
    }

    /// The same hypersurface in the rescaled ambient `c² ḡ`.
    pub fn in_rescaled_ambient(&self, c2: f64) -> Embedding {
        let mut e = self.clone();
        e.ambient = self.ambient.rescaled(c2);
        e
    }

    pub fn map_jets(&self, u: &[f64], order: usize) -> Result<Vec<Jet>> {
        self.domain.check(u)?;
        self.map.eval(u, order)
    }

    /// Tangent frame, normal and fundamental forms at `u` (map jets of `order ≥ 2`).
    pub fn jets(&self, u: &[f64], order: usize) -> Result<HypersurfaceJets> {
        let x = self.map_jets(u, order)?;
        HypersurfaceJets::from_map_jets(&self.ambient, u, x, self.orientation)
    }

    /// Induced metric as a metric field on the hypersurface chart (order ≤ 2).
    pub fn induced_metric(&self) -> MetricField {
        let e = self.clone();
        let n = self.intrinsic_dim;
        let comps = Field::from_point_fn(n, n * n, move |u, order| {
            if order >= crate::jet::MAX_ORDER {
                return Err(GeomError::InvalidOrder(order + 1));
            }
            let x = e.map.eval(u, order + 1)?;
            Ok(NormalFrame::from_map_jets(&e.ambient, u, &x, e.orientation)?.g)
        });
        MetricField {
            label: alloc::format!("{} (induced)", self.label),
            dim: n,
            domain: self.domain.clone(),
            components: comps,
            einstein: None,
        }
    }

    /// `(γ, β) = (i*(N⌟σ), i*σ)` as form fields over the induced metric
    /// (evaluable up to order 2).
    pub fn pullback_fields(&self, sigma: &FormField) -> Result<(FormField, FormField)> {
        let k = sigma.degree;
        let n = self.intrinsic_dim;
        if k < 1 || k > n + 1 || sigma.dim() != n + 1 {
            return Err(GeomError::DegreeOverflow { degree: k, dim: n + 1 });
        }
        let metric = self.induced_metric();
        let (e1, s1) = (self.clone(), sigma.clone());
        let gamma = Field::from_point_fn(n, binomial(n, k - 1), move |u, order| {
            Ok(e1.pullback_jets_at(&s1, u, order)?.0.comps)
        });
        let (e2, s2) = (self.clone(), sigma.clone());
        let beta = Field::from_point_fn(n, binomial(n, k), move |u, order| {
            Ok(e2.pullback_jets_at(&s2, u, order)?.1.comps)
        });
        Ok((
            FormField::new(alloc::format!("i*(N⌟{})", sigma.label), metric.clone(), k - 1, gamma)?,
            FormField::new(alloc::format!("i*{}", sigma.label), metric, k, beta)?,
        ))
    }

    fn pullback_jets_at(&self, sigma: &FormField, u: &[f64], order: usize) -> Result<(Form<Jet>, Form<Jet>)> {
        if order >= crate::jet::MAX_ORDER {
            return Err(GeomError::InvalidOrder(order + 1));
        }
        let x = self.map_jets(u, order + 1)?;
        let frame = NormalFrame::from_map_jets(&self.ambient, u, &x, self.orientation)?;
        frame.pullback(sigma, &x)
    }
}

/// Tangent frame, metrics and unit normal at one point, one jet order below
/// the map jets.
#[derive(Clone, Debug)]
pub struct NormalFrame {
    pub n: usize,
    /// `tangent[μ*n + a] = ∂_a x^μ`.
    pub tangent: Vec<Jet>,
    pub gbar: Vec<Jet>,
    pub gbar_inv: Vec<Jet>,
    pub g: Vec<Jet>,
    /// Unit normal `N^μ`.
    pub normal: Vec<Jet>,
    /// Lowered normal `N_μ = ḡ_μν N^ν`.
    pub normal_flat: Vec<Jet>,
}

/// Ambient metric components as jets along the map.
fn ambient_metric_along(ambient: &MetricField, x: &[Jet], order: usize) -> Result<Vec<Jet>> {
    let x0: Vec<f64> = x.iter().map(Jet::value).collect();
    let xt: Vec<Jet> = x.iter().map(|v| v.truncate(order)).collect();
    let gb = ambient.metric_jets(&x0, order)?;
    Ok(gb.iter().map(|c| Jet::compose(c, &xt)).collect())
}

impl NormalFrame {
    pub fn from_map_jets(ambient: &MetricField, u: &[f64], x: &[Jet], orientation: i32) -> Result<Self> {
        let n = u.len();
        let m = n + 1;
        let q = x[0].order();
        if q < 1 {
            return Err(GeomError::InvalidOrder(q));
        }
        let r = q - 1;
        let mut tangent = Vec::with_capacity(m * n);
        for xm in x {
            for a in 0..n {
                tangent.push(xm.partial(a));
            }
        }
        let gbar = ambient_metric_along(ambient, x, r)?;
        let gbar_inv = linalg::inverse(&gbar, m).map_err(|e| e.at_point(u))?;
        // induced metric
        let mut g = vec![Jet::constant(n, r, 0.0); n * n];
        let mut gt = vec![Jet::constant(n, r, 0.0); m * n]; // ḡ_μν T^ν_b
        for mu in 0..m {
            for b in 0..n {
                let mut s = Jet::constant(n, r, 0.0);
                for nu in 0..m {
                    s += gbar[mu * m + nu].mul_jet(&tangent[nu * n + b]);
                }
                gt[mu * n + b] = s;
            }
        }
        for a in 0..n {
            for b in a..n {
                let mut s = Jet::constant(n, r, 0.0);
                for mu in 0..m {
                    s += tangent[mu * n + a].mul_jet(&gt[mu * n + b]);
                }
                g[b * n + a] = s.clone();
                g[a * n + b] = s;
            }
        }
        let gv = linalg::mat_values(&g);
        let min_eig = linalg::symmetric_eigenvalues(&gv, n)[0];
        let sigma_min = libm::sqrt(min_eig.max(0.0));
        if !(sigma_min > RANK_TOLERANCE) {
            return Err(GeomError::RankDeficient {
                point: u.to_vec(),
                sigma_min,
            });
        }
        // cofactor covector: pick the best-conditioned coordinate to normalise
        let tv: Vec<f64> = tangent.iter().map(Jet::value).collect();
        let mut best = (0, 0.0f64);
        for mu in 0..m {
            let mut minor = DMatrix::<f64>::zeros(n, n);
            for a in 0..n {
                for (j, nu) in (0..m).filter(|&nu| nu != mu).enumerate() {
                    minor[(a, j)] = tv[nu * n + a];
                }
            }
            let cof = if mu % 2 == 0 { 1.0 } else { -1.0 } * minor.determinant();
            if libm::fabs(cof) > libm::fabs(best.1) {
                best = (mu, cof);
            }
        }
        let (mstar, cof) = best;
        let s = if cof > 0.0 { 1.0 } else { -1.0 };
        let rest: Vec<usize> = (0..m).filter(|&nu| nu != mstar).collect();
        let mut mat = Vec::with_capacity(n * n);
        for a in 0..n {
            for &nu in &rest {
                mat.push(tangent[nu * n + a].clone());
            }
        }
        let rhs: Vec<Jet> = (0..n).map(|a| tangent[mstar * n + a].scale(-s)).collect();
        let sol = linalg::solve(&mat, n, &rhs).map_err(|e| e.at_point(u))?;
        let mut nu_cov = vec![Jet::constant(n, r, 0.0); m];
        nu_cov[mstar] = Jet::constant(n, r, s);
        for (j, &nu) in rest.iter().enumerate() {
            nu_cov[nu] = sol[j].clone();
        }
        let mut raw = vec![Jet::constant(n, r, 0.0); m];
        for mu in 0..m {
            for nu in 0..m {
                raw[mu] += gbar_inv[mu * m + nu].mul_jet(&nu_cov[nu]);
            }
        }
        let mut norm2 = Jet::constant(n, r, 0.0);
        for mu in 0..m {
            norm2 += raw[mu].mul_jet(&nu_cov[mu]);
        }
        let inv_norm = norm2.sqrt()?.recip()?.scale(orientation as f64);
        let normal = raw.iter().map(|v| v.mul_jet(&inv_norm)).collect();
        let normal_flat = nu_cov.iter().map(|v| v.mul_jet(&inv_norm)).collect();
        Ok(NormalFrame {
            n,
            tangent,
            gbar,
            gbar_inv,
            g,
            normal,
            normal_flat,
        })
    }

    /// `(γ, β) = (i*(N⌟σ), i*σ)` at the frame's jet order.
    pub fn pullback(&self, sigma: &FormField, x: &[Jet]) -> Result<(Form<Jet>, Form<Jet>)> {
        let n = self.n;
        let r = self.g[0].order();
        let x0: Vec<f64> = x.iter().map(Jet::value).collect();
        let xt: Vec<Jet> = x.iter().map(|v| v.truncate(r)).collect();
        let s = sigma.eval(&x0, r)?;
        let s = Form {
            dim: s.dim,
            degree: s.degree,
            comps: s.comps.iter().map(|c| Jet::compose(c, &xt)).collect(),
        };
        let beta = s.pullback(&self.tangent, n);
        let gamma = s.interior(&self.normal)?.pullback(&self.tangent, n);
        Ok((gamma, beta))
    }
}

/// Everything needed for second-order hypersurface identities at one point.
#[derive(Clone, Debug)]
pub struct HypersurfaceJets {
    pub point: Vec<f64>,
    pub x: Vec<Jet>,
    pub frame: NormalFrame,
    /// `∇̄_a ∂_b x` as ambient vectors: `accel[(μ*n + a)*n + b]`, order `q−2`.
    pub accel: Vec<Jet>,
    /// `II_ab`, order `q−2`.
    pub second: Vec<Jet>,
    /// `λ = tr(g⁻¹ II)/n`, order `q−2`.
    pub lambda: Jet,
    /// Ambient Christoffel symbols along the map, order `q−2`.
    pub ambient_christoffel: Vec<Jet>,
}

impl HypersurfaceJets {
    pub fn from_map_jets(ambient: &MetricField, u: &[f64], x: Vec<Jet>, orientation: i32) -> Result<Self> {
        let n = u.len();
        let m = n + 1;
        let q = x[0].order();
        if q < 2 {
            return Err(GeomError::InvalidOrder(q));
        }
        let r = q - 2;
        let frame = NormalFrame::from_map_jets(ambient, u, &x, orientation)?;
        let x0: Vec<f64> = x.iter().map(Jet::value).collect();
        let xt: Vec<Jet> = x.iter().map(|v| v.truncate(r)).collect();
        let geo = ambient.geometry(&x0, r + 1)?;
        let ambient_christoffel: Vec<Jet> = geo.christoffel.iter().map(|c| Jet::compose(c, &xt)).collect();
        let tan: Vec<Jet> = frame.tangent.iter().map(|v| v.truncate(r)).collect();
        let mut accel = vec![Jet::constant(n, r, 0.0); m * n * n];
        for mu in 0..m {
            for a in 0..n {
                let ta = &frame.tangent[mu * n + a];
                for b in a..n {
                    let mut s = ta.partial(b);
                    for rho in 0..m {
                        let t_ra = &tan[rho * n + a];
                        if t_ra.is_zero() {
                            continue;
                        }
                        for sg in 0..m {
                            let gam = &ambient_christoffel[(mu * m + rho) * m + sg];
                            if gam.is_zero() {
                                continue;
                            }
                            s += gam.mul_jet(t_ra).mul_jet(&tan[sg * n + b]);
                        }
                    }
                    accel[(mu * n + b) * n + a] = s.clone();
                    accel[(mu * n + a) * n + b] = s;
                }
            }
        }
        let nflat: Vec<Jet> = frame.normal_flat.iter().map(|v| v.truncate(r)).collect();
        let mut second = vec![Jet::constant(n, r, 0.0); n * n];
        for a in 0..n {
            for b in a..n {
                let mut s = Jet::constant(n, r, 0.0);
                for mu in 0..m {
                    s += accel[(mu * n + a) * n + b].mul_jet(&nflat[mu]);
                }
                second[b * n + a] = s.clone();
                second[a * n + b] = s;
            }
        }
        let ginv = linalg::inverse(&frame.g, n).map_err(|e| e.at_point(u))?;
        let mut tr = Jet::constant(n, r, 0.0);
        for a in 0..n {
            for b in 0..n {
                tr += ginv[a * n + b].truncate(r).mul_jet(&second[b * n + a]);
            }
        }
        let lambda = tr.scale(1.0 / n as f64);
        Ok(HypersurfaceJets {
            point: u.to_vec(),
            x,
            frame,
            accel,
            second,
            lambda,
            ambient_christoffel,
        })
    }

    pub fn n(&self) -> usize {
        self.frame.n
    }

    pub fn induced_metric_values(&self) -> Vec<f64> {
        linalg::mat_values(&self.frame.g)
    }

    pub fn second_values(&self) -> Vec<f64> {
        linalg::mat_values(&self.second)
    }

    pub fn ambient_point(&self) -> Vec<f64> {
        self.x.iter().map(Jet::value).collect()
    }

    /// `sqrt(tr((g⁻¹ Å)²))` with `Å = II − λ g`.
    pub fn umbilicity(&self) -> Result<f64> {
        let n = self.n();
        let g = self.induced_metric_values();
        let ginv = linalg::inverse(&g, n)?;
        let lam = self.lambda.value();
        let ii = self.second_values();
        let tl: Vec<f64> = ii.iter().zip(&g).map(|(h, gg)| h - lam * gg).collect();
        let a = linalg::to_dmatrix(&ginv, n, n) * linalg::to_dmatrix(&tl, n, n);
        Ok(libm::sqrt((&a * &a).trace().max(0.0)))
    }

    /// Weingarten map `A = −(∇̄ N)^T` in coordinates, `A[c*n + a] = A^c_a`.
    pub fn weingarten(&self) -> Result<Vec<f64>> {
        let n = self.n();
        let m = n + 1;
        let t = linalg::mat_values(&self.frame.tangent);
        let gbar = linalg::mat_values(&self.frame.gbar);
        let dn = self.normal_derivative();
        // project onto the tangent frame: (∇̄_a N)^T = g^{cb} ḡ(∇̄_a N, T_b) T_c
        let g = self.induced_metric_values();
        let ginv = linalg::inverse(&g, n)?;
        let mut out = vec![0.0; n * n];
        for a in 0..n {
            let mut proj = vec![0.0; n];
            for b in 0..n {
                let mut s = 0.0;
                for mu in 0..m {
                    for nu in 0..m {
                        s += dn[mu * n + a] * gbar[mu * m + nu] * t[nu * n + b];
                    }
                }
                proj[b] = s;
            }
            for c in 0..n {
                out[c * n + a] = -(0..n).map(|b| ginv[c * n + b] * proj[b]).sum::<f64>();
            }
        }
        Ok(out)
    }

    /// `∇̄_a N` as ambient vectors, values, `dn[μ*n + a]`.
    pub fn normal_derivative(&self) -> Vec<f64> {
        let n = self.n();
        let m = n + 1;
        let t = linalg::mat_values(&self.frame.tangent);
        let nv: Vec<f64> = self.frame.normal.iter().map(Jet::value).collect();
        let mut out = vec![0.0; m * n];
        for mu in 0..m {
            for a in 0..n {
                let mut s = self.frame.normal[mu].d1(a);
                for rho in 0..m {
                    for sg in 0..m {
                        s += self.ambient_christoffel[(mu * m + rho) * m + sg].value() * t[rho * n + a] * nv[sg];
                    }
                }
                out[mu * n + a] = s;
            }
        }
        out
    }

    pub fn point_data(&self) -> Result<HypersurfacePointData> {
        let n = self.n();
        let g = self.induced_metric_values();
        let ii = self.second_values();
        let ginv = linalg::inverse(&g, n)?;
        let mut shape = vec![0.0; n * n];
        for c in 0..n {
            for a in 0..n {
                shape[c * n + a] = (0..n).map(|b| ginv[c * n + b] * ii[b * n + a]).sum();
            }
        }
        let lam = self.lambda.value();
        Ok(HypersurfacePointData {
            point: self.point.clone(),
            induced_metric: g,
            normal: self.frame.normal.iter().map(Jet::value).collect(),
            second_fundamental: ii,
            shape_operator: shape,
            mean_curvature: lam,
            lambda_estimate: lam,
            umbilicity: self.umbilicity()?,
        })
    }

    /// Residual vectors of `∇̄_X Y = ∇_X Y + λ g(X,Y) N` and `∇̄_X N = −λX`
    /// over coordinate fields, measured in `ḡ`.
    pub fn connection_residuals(&self) -> Result<(f64, f64)> {
        let n = self.n();
        let m = n + 1;
        let geo = LocalGeometry::from_metric_jets(&self.point, n, self.frame.g.clone())?;
        let t = linalg::mat_values(&self.frame.tangent);
        let gbar = linalg::mat_values(&self.frame.gbar);
        let nv: Vec<f64> = self.frame.normal.iter().map(Jet::value).collect();
        let g = self.induced_metric_values();
        let lam = self.lambda.value();
        let norm = |v: &[f64]| -> f64 {
            let mut s = 0.0;
            for mu in 0..m {
                for nu in 0..m {
                    s += v[mu] * gbar[mu * m + nu] * v[nu];
                }
            }
            libm::sqrt(s.max(0.0))
        };
        let mut tang: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let v: Vec<f64> = (0..m)
                    .map(|mu| {
                        let intrinsic: f64 = (0..n).map(|c| geo.gamma(c, a, b).value() * t[mu * n + c]).sum();
                        self.accel[(mu * n + a) * n + b].value() - intrinsic - lam * g[a * n + b] * nv[mu]
                    })
                    .collect();
                tang = tang.max(norm(&v));
            }
        }
        let dn = self.normal_derivative();
        let mut normal: f64 = 0.0;
        for a in 0..n {
            let v: Vec<f64> = (0..m).map(|mu| dn[mu * n + a] + lam * t[mu * n + a]).collect();
            normal = normal.max(norm(&v));
        }
        Ok((tang, normal))
    }

    /// `max |ḡ(II(∂_a,∂_b),N) − g(A ∂_a, ∂_b)|` with `A` the Weingarten map.
    pub fn shape_duality_residual(&self) -> Result<f64> {
        let n = self.n();
        let a = self.weingarten()?;
        let g = self.induced_metric_values();
        let ii = self.second_values();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let gaij: f64 = (0..n).map(|c| a[c * n + i] * g[c * n + j]).sum();
                worst = worst.max(libm::fabs(ii[i * n + j] - gaij));
            }
        }
        Ok(worst)
    }
}

/// Values of the fundamental forms at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct HypersurfacePointData {
    pub point: Vec<f64>,
    pub induced_metric: Vec<f64>,
    pub normal: Vec<f64>,
    pub second_fundamental: Vec<f64>,
    /// `g⁻¹ II`, `shape[c*n + a] = A^c_a`.
    pub shape_operator: Vec<f64>,
    /// `ḡ(H, N)` with `H = tr_g II / n`.
    pub mean_curvature: f64,
    pub lambda_estimate: f64,
    pub umbilicity: f64,
}

pub fn first_fundamental_form(e: &Embedding, u: &[f64]) -> Result<Vec<f64>> {
    let x = e.map_jets(u, 1)?;
    let frame = NormalFrame::from_map_jets(&e.ambient, u, &x, e.orientation)?;
    Ok(linalg::mat_values(&frame.g))
}

pub fn second_fundamental_form(e: &Embedding, u: &[f64]) -> Result<HypersurfacePointData> {
    e.jets(u, 2)?.point_data()
}

pub fn umbilicity_residual(e: &Embedding, u: &[f64]) -> Result<f64> {
    e.jets(u, 2)?.umbilicity()
}

fn require_umbilic(h: &HypersurfaceJets) -> Result<()> {
    let r = h.umbilicity()?;
    if !(r < UMBILIC_TOLERANCE) {
        return Err(GeomError::NotUmbilical {
            point: h.point.clone(),
            residual: r,
            tolerance: UMBILIC_TOLERANCE,
        });
    }
    Ok(())
}

/// Pushforward of a `g`-orthonormal frame of the hypersurface: columns are
/// ambient vectors `x_* e_i`.
fn pushed_frame(h: &HypersurfaceJets) -> Result<(DMatrix<f64>, Vec<Vec<f64>>)> {
    let n = h.n();
    let m = n + 1;
    let e = linalg::orthonormal_frame(&h.induced_metric_values(), n)?;
    let t = linalg::mat_values(&h.frame.tangent);
    let pushed = (0..n)
        .map(|i| {
            (0..m)
                .map(|mu| (0..n).map(|a| t[mu * n + a] * e[(a, i)]).sum())
                .collect()
        })
        .collect();
    Ok((e, pushed))
}

struct PointCurvatures {
    h: HypersurfaceJets,
    intrinsic: riemann::CurvatureAtPoint,
    ambient: riemann::CurvatureAtPoint,
}

fn point_curvatures(e: &Embedding, u: &[f64]) -> Result<PointCurvatures> {
    let h = e.jets(u, 3)?;
    require_umbilic(&h)?;
    let geo = LocalGeometry::from_metric_jets(u, h.n(), h.frame.g.clone())?;
    let intrinsic = riemann::curvature_from_geometry(&geo)?;
    let ambient = riemann::curvature(&e.ambient, &h.ambient_point())?;
    Ok(PointCurvatures { h, intrinsic, ambient })
}

/// `R̄(X,Y,Z,W) − R(X,Y,Z,W) − λ² g(X∧Y, Z∧W)` over all orthonormal frame
/// quadruples, where `g(X∧Y, Z∧W) = g(X,Z)g(Y,W) − g(X,W)g(Y,Z)`.
pub fn gauss_residual(e: &Embedding, u: &[f64]) -> Result<ResidualSummary> {
    let pc = point_curvatures(e, u)?;
    let n = pc.h.n();
    let (frame, pushed) = pushed_frame(&pc.h)?;
    let cols: Vec<Vec<f64>> = (0..n).map(|c| (0..n).map(|r| frame[(r, c)]).collect()).collect();
    let lam2 = pc.h.lambda.value() * pc.h.lambda.value();
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut acc = ResidualAccumulator::default();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let rbar = pc.ambient.eval(&pushed[i], &pushed[j], &pushed[k], &pushed[l]);
                    let r = pc.intrinsic.eval(&cols[i], &cols[j], &cols[k], &cols[l]);
                    let wedge = delta(i, k) * delta(j, l) - delta(i, l) * delta(j, k);
                    acc.push(rbar - r - lam2 * wedge);
                }
            }
        }
    }
    Ok(acc.finish())
}

/// Codazzi residuals at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CodazziResidual {
    /// `R̄(X,Y,Z,N) − (dλ∧Z♭)(X,Y)` over frame triples.
    pub codazzi: ResidualSummary,
    /// `Ric̄(X,N) − (n−1) dλ(X)` over the frame.
    pub traced: ResidualSummary,
    /// `|dλ|` in the frame (zero on an extrinsic sphere).
    pub dlambda: ResidualSummary,
}

pub fn codazzi_residual(e: &Embedding, u: &[f64]) -> Result<CodazziResidual> {
    let pc = point_curvatures(e, u)?;
    let n = pc.h.n();
    let m = n + 1;
    let (frame, pushed) = pushed_frame(&pc.h)?;
    let nv: Vec<f64> = pc.h.frame.normal.iter().map(Jet::value).collect();
    // dλ(e_i)
    let dl: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|a| pc.h.lambda.d1(a) * frame[(a, i)]).sum())
        .collect();
    let mut cod = ResidualAccumulator::default();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let lhs = pc.ambient.eval(&pushed[i], &pushed[j], &pushed[k], &nv);
                let dk = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                let rhs = dl[i] * dk(k, j) - dl[j] * dk(k, i);
                cod.push(lhs - rhs);
            }
        }
    }
    let ginv_bar = linalg::inverse(&pc.ambient.metric, m)?;
    let mut traced = ResidualAccumulator::default();
    for i in 0..n {
        // Ric̄(X, N) = ḡ^{ab} R̄(∂_a, X, N, ∂_b)
        let mut ric = 0.0;
        for a in 0..m {
            for b in 0..m {
                let w = ginv_bar[a * m + b];
                if w == 0.0 {
                    continue;
                }
                let mut ea = vec![0.0; m];
                ea[a] = 1.0;
                let mut eb = vec![0.0; m];
                eb[b] = 1.0;
                ric += w * pc.ambient.eval(&ea, &pushed[i], &nv, &eb);
            }
        }
        traced.push(ric - (n as f64 - 1.0) * dl[i]);
    }
    Ok(CodazziResidual {
        codazzi: cod.finish(),
        traced: traced.finish(),
        dlambda: ResidualSummary::from_values(dl.iter().copied()),
    })
}

/// Outcome of the Einstein-ambient `λ²` check over a sample.
#[derive(Clone, Debug, PartialEq)]
pub struct EinsteinLambdaReport {
    /// `λ² − scal_g/(n(n−1)) + scal_ḡ/(n(n+1))` per sample.
    pub formula: ResidualSummary,
    /// `max λ − min λ` over the sample ("constant on samples").
    pub lambda_spread: f64,
    pub scal_spread: f64,
    /// `(n+1) scal_g − (n−1) scal_ḡ` minimum over samples (must be ≥ 0).
    pub inequality_margin: f64,
    pub lambda_mean: f64,
    pub scal_g_mean: f64,
    pub scal_ambient_mean: f64,
}

impl EinsteinLambdaReport {
    pub fn inequality_holds(&self, tolerance: f64) -> bool {
        self.inequality_margin >= -tolerance
    }
}

pub fn einstein_lambda_check(e: &Embedding, sample: &[Vec<f64>]) -> Result<EinsteinLambdaReport> {
    if e.ambient.einstein.is_none() {
        return Err(GeomError::NotEinstein(e.ambient.label.clone()));
    }
    let n = e.intrinsic_dim as f64;
    let mut formula = ResidualAccumulator::default();
    let (mut lmin, mut lmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut smin, mut smax) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut margin = f64::INFINITY;
    let (mut lsum, mut ssum, mut sbsum) = (0.0, 0.0, 0.0);
    for u in sample {
        let pc = point_curvatures(e, u)?;
        let lam = pc.h.lambda.value();
        let sg = pc.intrinsic.scalar;
        let sb = pc.ambient.scalar;
        formula.push(lam * lam - sg / (n * (n - 1.0)) + sb / (n * (n + 1.0)));
        lmin = lmin.min(lam);
        lmax = lmax.max(lam);
        smin = smin.min(sg);
        smax = smax.max(sg);
        margin = margin.min((n + 1.0) * sg - (n - 1.0) * sb);
        lsum += lam;
        ssum += sg;
        sbsum += sb;
    }
    let cnt = sample.len().max(1) as f64;
    Ok(EinsteinLambdaReport {
        formula: formula.finish(),
        lambda_spread: lmax - lmin,
        scal_spread: smax - smin,
        inequality_margin: margin,
        lambda_mean: lsum / cnt,
        scal_g_mean: ssum / cnt,
        scal_ambient_mean: sbsum / cnt,
    })
}

/// Values of `γ`, `β` at `u` with the decomposition residual
/// `max |σ − (N♭∧γ̂ + β̂)|` along the hypersurface, where hats denote the
/// extension by zero on the normal direction.
#[derive(Clone, Debug, PartialEq)]
pub struct PulledBack {
    pub gamma: FormValue,
    pub beta: FormValue,
    pub decomposition: f64,
}

pub fn pullback_forms(e: &Embedding, sigma: &FormField, u: &[f64]) -> Result<PulledBack> {
    let n = e.intrinsic_dim;
    let m = n + 1;
    let k = sigma.degree;
    if k < 1 || k > m || sigma.dim() != m {
        return Err(GeomError::DegreeOverflow { degree: k, dim: m });
    }
    let x = e.map_jets(u, 1)?;
    let frame = NormalFrame::from_map_jets(&e.ambient, u, &x, e.orientation)?;
    let (gamma, beta) = frame.pullback(sigma, &x)?;
    let (gamma, beta) = (gamma.values(), beta.values());
    // Rebuild σ from (γ, β) in the ambient basis {T_1..T_n, N}: with dual
    // coframe θ^a (θ^a(T_b)=δ, θ^a(N)=0) and N♭ the dual of N,
    // σ = N♭∧γ(θ) + β(θ). The dual coframe is the inverse of [T | N].
    let x0: Vec<f64> = x.iter().map(Jet::value).collect();
    let sv = sigma.value(&x0)?;
    let t = linalg::mat_values(&frame.tangent);
    let nv: Vec<f64> = frame.normal.iter().map(Jet::value).collect();
    let mut basis = DMatrix::<f64>::zeros(m, m);
    for mu in 0..m {
        for a in 0..n {
            basis[(mu, a)] = t[mu * n + a];
        }
        basis[(mu, n)] = nv[mu];
    }
    let dual = basis
        .try_inverse()
        .ok_or_else(|| GeomError::RankDeficient { point: u.to_vec(), sigma_min: 0.0 })?;
    // coframe pulled to ambient coordinates: θ^c_μ = dual[(c, μ)]
    // the first n rows map ambient vectors to hypersurface coordinates
    let to_frame: Vec<f64> = (0..n * m).map(|i| dual[(i / m, i % m)]).collect();
    let gamma_amb = gamma.pullback(&to_frame, m);
    let beta_amb = beta.pullback(&to_frame, m);
    let nflat = Form::from_components(m, 1, (0..m).map(|mu| dual[(n, mu)]).collect())?;
    let rebuilt = nflat.wedge(&gamma_amb)?.plus(&beta_amb);
    let decomposition = rebuilt.minus(&sv).max_abs_value();
    Ok(PulledBack {
        gamma,
        beta,
        decomposition,
    })
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

    fn graph(n: usize) -> Embedding {
        let map = Field::from_jet_map(n, n + 1, move |u| {
            let mut v = u.to_vec();
            v.push(Jet::constant(n, u[0].order(), 0.0));
            Ok(v)
        });
        Embedding::new("plane", ChartDomain::ball(n, 1.0), flat(n + 1), map, 1).unwrap()
    }

    /// Unit sphere `S²` via colatitude/longitude, radius `r`.
    fn spherical(r: f64) -> Embedding {
        let map = Field::from_jet_map(2, 3, move |u| {
            let (th, ph) = (&u[0], &u[1]);
            Ok(vec![
                th.sin().mul_jet(&ph.cos()).scale(r),
                th.sin().mul_jet(&ph.sin()).scale(r),
                th.cos().scale(r),
            ])
        });
        Embedding::new("S2", ChartDomain::boxed(&[(0.3, 2.8), (-3.0, 3.0)]), flat(3), map, 1).unwrap()
    }

    fn cylinder() -> Embedding {
        let map = Field::from_jet_map(2, 3, |u| Ok(vec![u[0].cos(), u[0].sin(), u[1].clone()]));
        Embedding::new("cyl", ChartDomain::boxed(&[(-3.0, 3.0), (-1.0, 1.0)]), flat(3), map, 1).unwrap()
    }

    #[test]
    fn plane_is_totally_geodesic() {
        let e = graph(3);
        let u = [0.1, -0.2, 0.3];
        let g = first_fundamental_form(&e, &u).unwrap();
        assert_eq!(g, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let d = second_fundamental_form(&e, &u).unwrap();
        assert!(d.second_fundamental.iter().all(|v| v.abs() < 1e-15));
        assert!(umbilicity_residual(&e, &u).unwrap() < 1e-15);
    }

    #[test]
    fn spherical_coordinates_first_form_and_scaling() {
        let g = first_fundamental_form(&spherical(1.0), &[core::f64::consts::FRAC_PI_2, 0.4]).unwrap();
        assert_relative_eq!(g[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(g[3], 1.0, epsilon = 1e-15);
        let g2 = first_fundamental_form(&spherical(2.0), &[1.0, 0.4]).unwrap();
        let g1 = first_fundamental_form(&spherical(1.0), &[1.0, 0.4]).unwrap();
        for (a, b) in g2.iter().zip(&g1) {
            assert_relative_eq!(*a, 4.0 * b, epsilon = 1e-14);
        }
    }

    #[test]
    fn sphere_lambda_sign_follows_orientation() {
        let e = spherical(1.0);
        let u = [1.0, 0.4];
        let l = second_fundamental_form(&e, &u).unwrap().lambda_estimate;
        assert_relative_eq!(l.abs(), 1.0, epsilon = 1e-13);
        let lf = second_fundamental_form(&e.flipped(), &u).unwrap().lambda_estimate;
        assert_relative_eq!(lf, -l, epsilon = 1e-13);
        let h = e.jets(&u, 2).unwrap();
        assert!(h.umbilicity().unwrap() < 1e-13);
        assert!(h.shape_duality_residual().unwrap() < 1e-13);
        let (t, nres) = h.connection_residuals().unwrap();
        assert!(t < 1e-12 && nres < 1e-12, "{t} {nres}");
    }

    #[test]
    fn cylinder_umbilicity() {
        let r = umbilicity_residual(&cylinder(), &[0.3, 0.2]).unwrap();
        assert_relative_eq!(r, core::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-13);
    }

    #[test]
    fn ellipsoid_is_not_umbilical() {
        // x² + y² + 4z² = 1
        let map = Field::from_jet_map(2, 3, |u| {
            let (th, ph) = (&u[0], &u[1]);
            Ok(vec![th.sin().mul_jet(&ph.cos()), th.sin().mul_jet(&ph.sin()), th.cos().scale(0.5)])
        });
        let e = Embedding::new("ellipsoid", ChartDomain::boxed(&[(0.3, 2.8), (-3.0, 3.0)]), flat(3), map, 1).unwrap();
        assert!(umbilicity_residual(&e, &[0.9, 0.7]).unwrap() > 0.1);
        assert!(matches!(gauss_residual(&e, &[0.9, 0.7]), Err(GeomError::NotUmbilical { .. })));
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let map = Field::from_jet_map(2, 3, |u| Ok(vec![u[0].clone(), u[0].clone(), u[0].clone()]));
        let e = Embedding::new("line", ChartDomain::ball(2, 1.0), flat(3), map, 1).unwrap();
        assert!(matches!(
            first_fundamental_form(&e, &[0.1, 0.1]),
            Err(GeomError::RankDeficient { .. })
        ));
    }

    #[test]
    fn einstein_check_refuses_unflagged_ambient() {
        let e = spherical(1.0);
        assert!(matches!(
            einstein_lambda_check(&e, &[vec![1.0, 0.2]]),
            Err(GeomError::NotEinstein(_))
        ));
    }

    #[test]
    fn sphere_gauss_codazzi_and_decomposition() {
        let e = spherical(1.0);
        let u = [1.1, 0.3];
        assert!(gauss_residual(&e, &u).unwrap().max < 1e-12);
        let c = codazzi_residual(&e, &u).unwrap();
        assert!(c.codazzi.max < 1e-12 && c.traced.max < 1e-12 && c.dlambda.max < 1e-12);
        let vol = FormField::constant("vol", flat(3), 3, vec![1.0]).unwrap();
        let p = pullback_forms(&e, &vol, &u).unwrap();
        assert!(p.decomposition < 1e-13);
        assert!(p.beta.comps.is_empty());
        let sigma = FormField::constant("s", flat(3), 2, vec![0.3, -1.0, 0.7]).unwrap();
        let p = pullback_forms(&e, &sigma, &u).unwrap();
        assert!(p.decomposition < 1e-13, "{}", p.decomposition);
    }
}
