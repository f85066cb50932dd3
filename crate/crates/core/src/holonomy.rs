//! Numerical parallel transport and restricted-holonomy estimation.
//!
//! Transport integrates `dP/ds = −Γ(ċ) P` for the frame matrix `P` with the
//! classical fourth-order Runge–Kutta scheme. Holonomies are expressed in a
//! `g`-orthonormal frame at the base point, where they are orthogonal
//! matrices. Only the restricted (local) holonomy is accessible from a single
//! chart; all dimensions reported here are numerical estimates.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GeomError, Result};
use crate::forms::{combinations, Form, FormValue};
use crate::jet::Jet;
use crate::linalg::{self, small_determinant};
use crate::riemann::{self, MetricField};

/// Singular values below this fraction of the largest count as zero.
pub const RANK_REL_TOL: f64 = 1e-6;
/// Spans whose largest singular value is below this are zero.
pub const RANK_ABS_FLOOR: f64 = 1e-9;
/// Default number of RK4 steps per loop.
pub const DEFAULT_STEPS: usize = 512;
/// Minimum number of loops for a fixed-subspace estimate.
pub const MIN_LOOPS: usize = 20;
/// Finite-difference step for the ∇-residual of detected invariant forms.
pub const NABLA_STEP: f64 = 1e-4;

type SegmentFn = dyn Fn(f64) -> (Vec<f64>, Vec<f64>) + Send + Sync;

/// A smooth curve piece on `[0,1]` returning position and velocity.
#[derive(Clone)]
pub struct Segment(Arc<SegmentFn>);

impl fmt::Debug for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Segment")
    }
}

impl Segment {
    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(f64) -> (Vec<f64>, Vec<f64>) + Send + Sync + 'static,
    {
        Segment(Arc::new(f))
    }

    pub fn line(a: Vec<f64>, b: Vec<f64>) -> Self {
        Segment::from_fn(move |s| {
            let pos = a.iter().zip(&b).map(|(p, q)| p + s * (q - p)).collect();
            let vel = a.iter().zip(&b).map(|(p, q)| q - p).collect();
            (pos, vel)
        })
    }

    pub fn at(&self, s: f64) -> (Vec<f64>, Vec<f64>) {
        (self.0)(s)
    }
}

/// A piecewise-smooth path; `steps` RK4 steps are spread over the segments.
#[derive(Clone, Debug)]
pub struct Path {
    pub segments: Vec<Segment>,
    pub steps: usize,
}

impl Path {
    pub fn new(segments: Vec<Segment>, steps: usize) -> Self {
        Path { segments, steps }
    }

    pub fn start(&self) -> Vec<f64> {
        self.segments[0].at(0.0).0
    }

    pub fn end(&self) -> Vec<f64> {
        self.segments[self.segments.len() - 1].at(1.0).0
    }

    pub fn reversed(&self) -> Path {
        let segments = self
            .segments
            .iter()
            .rev()
            .map(|seg| {
                let seg = seg.clone();
                Segment::from_fn(move |s| {
                    let (p, v) = seg.at(1.0 - s);
                    (p, v.iter().map(|x| -x).collect())
                })
            })
            .collect();
        Path {
            segments,
            steps: self.steps,
        }
    }
}

/// A closed path through a base point.
#[derive(Clone, Debug)]
pub struct LoopSpec {
    pub base_point: Vec<f64>,
    pub path: Path,
}

impl LoopSpec {
    pub fn new(base_point: Vec<f64>, path: Path) -> Result<Self> {
        let closed = |p: &[f64]| p.iter().zip(&base_point).all(|(a, b)| libm::fabs(a - b) < 1e-12);
        if !closed(&path.start()) || !closed(&path.end()) {
            return Err(GeomError::InvalidParameter("loop does not start and end at its base point".into()));
        }
        Ok(LoopSpec { base_point, path })
    }
}

/// `A^k_j = Γ^k_ij ċ^i` at a curve point.
fn connection_matrix(metric: &MetricField, x: &[f64], v: &[f64]) -> Result<DMatrix<f64>> {
    if !metric.domain.contains(x) {
        return Err(GeomError::OutsideDomain { point: x.to_vec() });
    }
    let n = metric.dim;
    let gam = riemann::christoffels(metric, x)?;
    let mut a = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                s += gam[(k * n + i) * n + j] * v[i];
            }
            a[(k, j)] = s;
        }
    }
    Ok(a)
}

/// Generic RK4 driver along a path for a linear ODE `dY/ds = F(x, ẋ, Y)`.
fn integrate<F>(metric: &MetricField, path: &Path, y0: DMatrix<f64>, rhs: F) -> Result<DMatrix<f64>>
where
    F: Fn(&DMatrix<f64>, &DMatrix<f64>) -> DMatrix<f64>,
{
    if path.steps < 16 {
        return Err(GeomError::InvalidParameter("transport needs at least 16 steps".into()));
    }
    let per = (path.steps / path.segments.len()).max(16);
    let mut y = y0;
    for seg in &path.segments {
        let h = 1.0 / per as f64;
        let a_at = |s: f64| -> Result<DMatrix<f64>> {
            let (p, v) = seg.at(s);
            connection_matrix(metric, &p, &v)
        };
        let mut a0 = a_at(0.0)?;
        for i in 0..per {
            let s = i as f64 * h;
            let am = a_at(s + 0.5 * h)?;
            let a1 = a_at(s + h)?;
            let k1 = rhs(&a0, &y);
            let k2 = rhs(&am, &(&y + &k1 * (0.5 * h)));
            let k3 = rhs(&am, &(&y + &k2 * (0.5 * h)));
            let k4 = rhs(&a1, &(&y + &k3 * h));
            y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            a0 = a1;
        }
    }
    Ok(y)
}

/// Transport matrix `P` (coordinates at the start to coordinates at the end).
pub fn transport_matrix(metric: &MetricField, path: &Path) -> Result<DMatrix<f64>> {
    let n = metric.dim;
    integrate(metric, path, DMatrix::identity(n, n), |a, p| -(a * p))
}

/// Parallel transport of a tangent vector along `path`.
pub fn parallel_transport(metric: &MetricField, path: &Path, v0: &[f64]) -> Result<Vec<f64>> {
    let p = transport_matrix(metric, path)?;
    let v = &p * DMatrix::from_column_slice(v0.len(), 1, v0);
    Ok(v.iter().copied().collect())
}

/// `Λ^k` of a matrix acting on increasing multi-indices: entries `det M[I,J]`.
pub fn exterior_power(m: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let n = m.nrows();
    let combos = combinations(n, k);
    let c = combos.len();
    let mut out = DMatrix::<f64>::zeros(c, c);
    if k == 0 {
        out[(0, 0)] = 1.0;
        return out;
    }
    let mut minor = Vec::with_capacity(k * k);
    for (r, i) in combos.iter().enumerate() {
        for (s, j) in combos.iter().enumerate() {
            minor.clear();
            for &a in i {
                for &b in j {
                    minor.push(m[(a, b)]);
                }
            }
            out[(r, s)] = small_determinant(&minor, k);
        }
    }
    out
}

/// Parallel transport of a k-form value: `σ(1) = σ(0) ∘ Λ^k(P⁻¹)`.
pub fn transport_form(metric: &MetricField, path: &Path, sigma: &FormValue) -> Result<FormValue> {
    let p = transport_matrix(metric, path)?;
    let pinv = p
        .try_inverse()
        .ok_or(GeomError::SingularMetric { point: path.end() })?;
    let l = exterior_power(&pinv, sigma.degree);
    let c = sigma.comps.len();
    let comps = (0..c)
        .map(|j| (0..c).map(|i| sigma.comps[i] * l[(i, j)]).sum())
        .collect();
    Ok(Form {
        dim: sigma.dim,
        degree: sigma.degree,
        comps,
    })
}

/// Transport of a k-form by integrating `dσ_I/ds = Σ_s Γ^p_{a i_s} ċ^a σ_{…p…}`
/// directly on `Λ^k` (independent of [`transport_form`]).
pub fn transport_form_direct(metric: &MetricField, path: &Path, sigma: &FormValue) -> Result<FormValue> {
    let n = metric.dim;
    let k = sigma.degree;
    let combos = combinations(n, k);
    let c = combos.len();
    let y0 = DMatrix::from_column_slice(c, 1, &sigma.comps);
    // build the Λ^k generator from A on the fly
    let lift = move |a: &DMatrix<f64>| -> DMatrix<f64> {
        let mut g = DMatrix::<f64>::zeros(c, c);
        let tmpl = Form {
            dim: n,
            degree: k,
            comps: vec![0.0; c],
        };
        for (col, _) in combos.iter().enumerate() {
            let mut e = tmpl.clone();
            e.comps[col] = 1.0;
            for (row, i) in combos.iter().enumerate() {
                let mut s = 0.0;
                let mut idx = i.clone();
                for slot in 0..k {
                    for p in 0..n {
                        // A^p_{i_s} = Γ^p_{a i_s} ċ^a
                        let w = a[(p, i[slot])];
                        if w == 0.0 {
                            continue;
                        }
                        idx.copy_from_slice(i);
                        idx[slot] = p;
                        if let Some((sg, v)) = e.get(&idx) {
                            s += w * sg as f64 * v;
                        }
                    }
                }
                g[(row, col)] = s;
            }
        }
        g
    };
    let y = integrate(metric, path, y0, |a, y| lift(a) * y)?;
    Ok(Form {
        dim: n,
        degree: k,
        comps: y.iter().copied().collect(),
    })
}

/// Holonomy of a loop in a `g`-orthonormal frame at the base point.
pub fn loop_holonomy(metric: &MetricField, lp: &LoopSpec) -> Result<DMatrix<f64>> {
    let n = metric.dim;
    let p = transport_matrix(metric, &lp.path)?;
    let g = metric.metric_values(&lp.base_point)?;
    let e = linalg::orthonormal_frame(&g, n)?;
    let einv = e.clone().try_inverse().ok_or(GeomError::SingularMetric {
        point: lp.base_point.clone(),
    })?;
    Ok(einv * p * e)
}

fn skew_vector(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut v = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            v.push(0.5 * (m[(i, j)] - m[(j, i)]));
        }
    }
    v
}

fn skew_from_vector(v: &[f64], n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut r = 0;
    for i in 0..n {
        for j in i + 1..n {
            m[(i, j)] = v[r];
            m[(j, i)] = -v[r];
            r += 1;
        }
    }
    m
}

fn rows_to_matrix(rows: &[Vec<f64>], width: usize) -> DMatrix<f64> {
    let mut m = DMatrix::<f64>::zeros(rows.len().max(1), width);
    for (i, r) in rows.iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            m[(i, j)] = *v;
        }
    }
    m
}

/// Contract all four slots of `R_ijkl` with the frame columns.
fn frame_tensor4(r: &[f64], e: &DMatrix<f64>, n: usize) -> Vec<f64> {
    let mut cur = r.to_vec();
    for slot in 0..4 {
        let mut next = vec![0.0; cur.len()];
        let stride = n.pow(3 - slot as u32);
        for idx in 0..cur.len() {
            let a = (idx / stride) % n;
            let base = idx - a * stride;
            let mut s = 0.0;
            for i in 0..n {
                s += e[(i, a)] * cur[base + i * stride];
            }
            next[idx] = s;
        }
        cur = next;
    }
    cur
}

/// Numerical rank of the span of the curvature operators `R(e_a, e_b)` in
/// `so(n)`, optionally augmented by `(∇_{e_m} R)(e_a, e_b)`: a pointwise lower
/// bound for the restricted holonomy algebra.
pub fn curvature_span_dimension(metric: &MetricField, x: &[f64], include_first_derivative: bool) -> Result<usize> {
    let n = metric.dim;
    if n < 2 {
        return Ok(0);
    }
    let order = if include_first_derivative { 3 } else { 2 };
    let geo = metric.geometry(x, order)?;
    let rj = geo.riemann_jets()?;
    let e = linalg::orthonormal_frame(&geo.metric_values(), n)?;
    let pairs = riemann::two_vector_pairs(n);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let push_tensor = |t: &[f64], rows: &mut Vec<Vec<f64>>| {
        let f = frame_tensor4(t, &e, n);
        for &(a, b) in &pairs {
            rows.push(
                pairs
                    .iter()
                    .map(|&(c, d)| f[((a * n + b) * n + c) * n + d])
                    .collect(),
            );
        }
    };
    let rv: Vec<f64> = rj.iter().map(Jet::value).collect();
    push_tensor(&rv, &mut rows);
    if include_first_derivative {
        let idx = |i: usize, j: usize, k: usize, l: usize| ((i * n + j) * n + k) * n + l;
        let gam = geo.christoffel_values();
        let gm = |p: usize, a: usize, b: usize| gam[(p * n + a) * n + b];
        for m in 0..n {
            let mut t = vec![0.0; n * n * n * n];
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            let mut s = rj[idx(i, j, k, l)].d1(m);
                            for p in 0..n {
                                s -= gm(p, m, i) * rv[idx(p, j, k, l)]
                                    + gm(p, m, j) * rv[idx(i, p, k, l)]
                                    + gm(p, m, k) * rv[idx(i, j, p, l)]
                                    + gm(p, m, l) * rv[idx(i, j, k, p)];
                            }
                            t[idx(i, j, k, l)] = s;
                        }
                    }
                }
            }
            // coordinate directions span the same space as frame directions
            push_tensor(&t, &mut rows);
        }
    }
    Ok(linalg::numerical_rank(
        &rows_to_matrix(&rows, pairs.len()),
        RANK_REL_TOL,
        RANK_ABS_FLOOR,
    ))
}

/// Estimated restricted holonomy and invariant forms.
#[derive(Clone, Debug)]
pub struct HolonomyEstimate {
    pub algebra_dim: usize,
    pub fixed_form_subspaces: Vec<FixedSubspace>,
    pub loop_count: usize,
    pub tolerance_used: f64,
    /// `max | |P v|_g − |v|_g |` over loops and frame vectors.
    pub isometry_error: f64,
    /// Pointwise curvature-span lower bound at the base point.
    pub curvature_span: usize,
}

/// Transport-invariant k-forms at the base point.
#[derive(Clone, Debug)]
pub struct FixedSubspace {
    pub degree: usize,
    /// Orthonormal basis in the frame `e^I`, converted to coordinate components.
    pub basis: Vec<FormValue>,
    /// `∇`-residual of each basis element extended by radial transport.
    pub nabla_residuals: Vec<f64>,
}

impl FixedSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Parallelograms in every coordinate plane at three scales plus seeded
/// random smooth loops, topped up with random loops to at least
/// [`MIN_LOOPS`].
pub fn default_loops(metric: &MetricField, base: &[f64], steps: usize, seed: u64) -> Result<Vec<LoopSpec>> {
    let n = metric.dim;
    let margin = metric.domain.interior_margin(base);
    if !(margin > 0.0) {
        return Err(GeomError::OutsideDomain { point: base.to_vec() });
    }
    let mut loops = Vec::new();
    for &scale in &[0.1, 0.2, 0.35] {
        let h = scale * margin.min(2.0);
        for i in 0..n {
            for j in i + 1..n {
                let p0 = base.to_vec();
                let mut p1 = p0.clone();
                p1[i] += h;
                let mut p2 = p1.clone();
                p2[j] += h;
                let mut p3 = p0.clone();
                p3[j] += h;
                let path = Path::new(
                    vec![
                        Segment::line(p0.clone(), p1.clone()),
                        Segment::line(p1, p2.clone()),
                        Segment::line(p2, p3.clone()),
                        Segment::line(p3, p0.clone()),
                    ],
                    steps,
                );
                loops.push(LoopSpec::new(p0, path)?);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let randoms = 8.max(MIN_LOOPS.saturating_sub(loops.len()));
    let amp = 0.25 * margin.min(2.0);
    for _ in 0..randoms {
        let coeffs: Vec<[Vec<f64>; 2]> = (1..=2)
            .map(|m| {
                let mut draw = || -> Vec<f64> {
                    (0..n).map(|_| rng.gen_range(-1.0..1.0) * amp / (2.0 * m as f64 * libm::sqrt(n as f64))).collect()
                };
                [draw(), draw()]
            })
            .collect();
        let b = base.to_vec();
        let seg = Segment::from_fn(move |s| {
            let mut p = b.clone();
            let mut v = vec![0.0; b.len()];
            for (mi, [a, c]) in coeffs.iter().enumerate() {
                let w = 2.0 * PI * (mi + 1) as f64;
                let (sn, cs) = (libm::sin(w * s), libm::cos(w * s));
                for d in 0..p.len() {
                    p[d] += a[d] * (cs - 1.0) + c[d] * sn;
                    v[d] += -a[d] * w * sn + c[d] * w * cs;
                }
            }
            (p, v)
        });
        loops.push(LoopSpec::new(base.to_vec(), Path::new(vec![seg], steps))?);
    }
    Ok(loops)
}

/// Null space of stacked `Λ^k(H) − I` across loop holonomies.
pub fn fixed_subspace_frame(holonomies: &[DMatrix<f64>], degree: usize, tolerance: f64) -> DMatrix<f64> {
    let n = holonomies[0].nrows();
    let c = combinations(n, degree).len();
    let mut stacked = DMatrix::<f64>::zeros(c * holonomies.len(), c);
    for (i, h) in holonomies.iter().enumerate() {
        let l = exterior_power(h, degree) - DMatrix::<f64>::identity(c, c);
        stacked.view_mut((i * c, 0), (c, c)).copy_from(&l);
    }
    linalg::null_space(&stacked, tolerance)
}

/// Coordinate components of the frame form `Σ c_I e^I` at a point with frame `e`.
fn frame_form_to_coords(c: &[f64], e: &DMatrix<f64>, degree: usize) -> Result<FormValue> {
    let n = e.nrows();
    let einv = e.clone().try_inverse().ok_or(GeomError::SingularMetric { point: Vec::new() })?;
    let jac: Vec<f64> = (0..n * n).map(|i| einv[(i / n, i % n)]).collect();
    let f = Form::from_components(n, degree, c.to_vec())?;
    Ok(f.pullback(&jac, n))
}

/// Extend `sigma` (at `base`) by transport along straight lines and return
/// the largest component of `∇σ` at a few off-base points, relative to `|σ|`.
pub fn nabla_residual_by_transport(metric: &MetricField, base: &[f64], sigma: &FormValue, steps: usize) -> Result<f64> {
    let n = metric.dim;
    let margin = metric.domain.interior_margin(base);
    let offset = 0.2 * margin.min(2.0);
    let extend = |y: &[f64]| -> Result<FormValue> {
        let path = Path::new(vec![Segment::line(base.to_vec(), y.to_vec())], steps);
        transport_form(metric, &path, sigma)
    };
    let scale = sigma.max_abs_value().max(1e-300);
    let mut worst: f64 = 0.0;
    for dir in 0..n.min(3) {
        let mut y = base.to_vec();
        y[dir] += offset;
        y[(dir + 1) % n] -= 0.5 * offset;
        let at = extend(&y)?;
        let gam = riemann::christoffels(metric, &y)?;
        for a in 0..n {
            let mut yp = y.clone();
            yp[a] += NABLA_STEP;
            let mut ym = y.clone();
            ym[a] -= NABLA_STEP;
            let d = extend(&yp)?.minus(&extend(&ym)?).scaled(0.5 / NABLA_STEP);
            // Γ correction: (∇_a σ)_I = ∂_a σ_I − Σ_s Γ^p_{a i_s} σ_{…p…}
            for (r, i) in combinations(n, sigma.degree).iter().enumerate() {
                let mut corr = 0.0;
                let mut idx = i.clone();
                for s in 0..sigma.degree {
                    for p in 0..n {
                        let g = gam[(p * n + a) * n + i[s]];
                        if g == 0.0 {
                            continue;
                        }
                        idx.copy_from_slice(i);
                        idx[s] = p;
                        if let Some((sg, v)) = at.get(&idx) {
                            corr += g * sg as f64 * v;
                        }
                    }
                }
                worst = worst.max(libm::fabs(d.comps[r] - corr) / scale);
            }
        }
    }
    Ok(worst)
}

/// Estimated holonomy-algebra dimension (skew parts of loop holonomies closed
/// under brackets) and transport-invariant forms of the requested degrees.
pub fn estimate_holonomy(metric: &MetricField, loops: &[LoopSpec], degrees: &[usize]) -> Result<HolonomyEstimate> {
    let n = metric.dim;
    if loops.is_empty() {
        return Err(GeomError::InvalidParameter("no loops".into()));
    }
    let base = loops[0].base_point.clone();
    if loops.iter().any(|l| l.base_point != base) {
        return Err(GeomError::InvalidParameter("loops have inconsistent base points".into()));
    }
    if !degrees.is_empty() && loops.len() < MIN_LOOPS {
        return Err(GeomError::InvalidParameter(alloc::format!(
            "fixed-form detection needs at least {MIN_LOOPS} loops, got {}",
            loops.len()
        )));
    }
    let g = metric.metric_values(&base)?;
    let e = linalg::orthonormal_frame(&g, n)?;
    let mut hols = Vec::with_capacity(loops.len());
    let mut iso: f64 = 0.0;
    for lp in loops {
        let h = loop_holonomy(metric, lp)?;
        for c in 0..n {
            let norm: f64 = (0..n).map(|r| h[(r, c)] * h[(r, c)]).sum::<f64>();
            iso = iso.max(libm::fabs(libm::sqrt(norm) - 1.0));
        }
        hols.push(h);
    }
    let width = n * (n - 1) / 2;
    let mut rows: Vec<Vec<f64>> = hols.iter().map(skew_vector).collect();
    let mut dim = linalg::numerical_rank(&rows_to_matrix(&rows, width), RANK_REL_TOL, RANK_ABS_FLOOR);
    for _ in 0..3 {
        if dim == 0 || dim == width {
            break;
        }
        let basis = span_basis(&rows, width, dim);
        let mut added = rows.clone();
        for a in &basis {
            for b in &basis {
                let (ma, mb) = (skew_from_vector(a, n), skew_from_vector(b, n));
                let br = &ma * &mb - &mb * &ma;
                added.push(skew_vector(&br));
            }
        }
        let nd = linalg::numerical_rank(&rows_to_matrix(&added, width), RANK_REL_TOL, RANK_ABS_FLOOR);
        rows = added;
        if nd == dim {
            break;
        }
        dim = nd;
    }
    let mut fixed = Vec::new();
    for &k in degrees {
        if k > n {
            return Err(GeomError::DegreeOverflow { degree: k, dim: n });
        }
        let frame_basis = fixed_subspace_frame(&hols, k, RANK_REL_TOL);
        let mut basis = Vec::new();
        let mut res = Vec::new();
        for c in 0..frame_basis.ncols() {
            let coeffs: Vec<f64> = frame_basis.column(c).iter().copied().collect();
            let form = frame_form_to_coords(&coeffs, &e, k)?;
            res.push(nabla_residual_by_transport(metric, &base, &form, loops[0].path.steps)?);
            basis.push(form);
        }
        fixed.push(FixedSubspace {
            degree: k,
            basis,
            nabla_residuals: res,
        });
    }
    Ok(HolonomyEstimate {
        algebra_dim: dim,
        fixed_form_subspaces: fixed,
        loop_count: loops.len(),
        tolerance_used: RANK_REL_TOL,
        isometry_error: iso,
        curvature_span: curvature_span_dimension(metric, &base, false)?,
    })
}

/// Leading right singular vectors spanning the row space.
fn span_basis(rows: &[Vec<f64>], width: usize, dim: usize) -> Vec<Vec<f64>> {
    let m = rows_to_matrix(rows, width);
    let padded = if m.nrows() < width {
        let mut p = DMatrix::<f64>::zeros(width, width);
        p.view_mut((0, 0), (m.nrows(), width)).copy_from(&m);
        p
    } else {
        m
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    order
        .iter()
        .take(dim)
        .map(|&i| (0..width).map(|c| vt[(i, c)]).collect())
        .collect()
}

/// `max |P_reverse P − I|` for a loop.
pub fn reverse_loop_error(metric: &MetricField, lp: &LoopSpec) -> Result<f64> {
    let p = transport_matrix(metric, &lp.path)?;
    let q = transport_matrix(metric, &lp.path.reversed())?;
    let n = metric.dim;
    Ok((q * p - DMatrix::<f64>::identity(n, n)).amax())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ChartDomain, Field};
    use approx::assert_relative_eq;

    fn flat(n: usize) -> MetricField {
        let mut id = vec![0.0; n * n];
        for i in 0..n {
            id[i * n + i] = 1.0;
        }
        MetricField::new("flat", ChartDomain::ball(n, 3.0), Field::constant(n, id)).unwrap()
    }

    #[test]
    fn flat_transport_is_identity() {
        let m = flat(3);
        let loops = default_loops(&m, &[0.0, 0.0, 0.0], 64, 1).unwrap();
        for lp in &loops {
            let h = loop_holonomy(&m, lp).unwrap();
            assert!((h - DMatrix::<f64>::identity(3, 3)).amax() < 1e-15);
        }
        assert_eq!(curvature_span_dimension(&m, &[0.1, 0.2, 0.3], true).unwrap(), 0);
    }

    #[test]
    fn exterior_power_of_diagonal() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 3.0, 5.0]));
        let l = exterior_power(&m, 2);
        assert_relative_eq!(l[(0, 0)], 6.0);
        assert_relative_eq!(l[(1, 1)], 10.0);
        assert_relative_eq!(l[(2, 2)], 15.0);
    }

    #[test]
    fn open_loops_are_rejected() {
        let p = Path::new(vec![Segment::line(vec![0.0, 0.0], vec![1.0, 0.0])], 32);
        assert!(LoopSpec::new(vec![0.0, 0.0], p).is_err());
    }
}
