//! Differential forms on a chart.
//!
//! A k-form is stored by its components on strictly increasing multi-indices
//! in lexicographic order, with `σ(e_{i1},…,e_{ik}) = σ_{i1…ik}` (no `1/k!`).
//! The wedge product carries the full shuffle sum, so `(dx∧dy)(e_x,e_y) = 1`.
//!
//! * `(dσ)_{i0…ik} = Σ_j (−1)^j ∂_{ij} σ_{…î_j…}`
//! * `(∇_a σ)_I = ∂_a σ_I − Σ_s Γ^p_{a i_s} σ_{i_1…p…i_k}`
//! * `d*σ = −g^{ab} (∇_a σ)(∂_b, …)`
//! * `(*σ)_J = ± √det g · σ^I · sign(I J)` with `J` the complement of `I`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{GeomError, Result};
use crate::field::Field;
use crate::jet::Jet;
use crate::linalg::{self, small_determinant, Coeff};
use crate::riemann::{LocalGeometry, MetricField};

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: usize = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Strictly increasing `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, k));
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Lexicographic rank of a strictly increasing multi-index.
pub fn multi_index_rank(n: usize, idx: &[usize]) -> usize {
    let k = idx.len();
    let mut r = 0;
    let mut start = 0;
    for (j, &i) in idx.iter().enumerate() {
        for v in start..i {
            r += binomial(n - 1 - v, k - 1 - j);
        }
        start = i + 1;
    }
    r
}

/// Sort in place and return the permutation sign, or 0 on a repeated index.
pub fn sort_with_sign(idx: &mut [usize]) -> i32 {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        0
    } else {
        sign
    }
}

/// Components of a k-form at one point, over plain values or jets.
#[derive(Clone, Debug, PartialEq)]
pub struct Form<T> {
    pub dim: usize,
    pub degree: usize,
    pub comps: Vec<T>,
}

pub type FormValue = Form<f64>;

impl<T: Coeff> Form<T> {
    pub fn zero(dim: usize, degree: usize, template: &T) -> Self {
        Form {
            dim,
            degree,
            comps: vec![template.zero_like(); binomial(dim, degree)],
        }
    }

    pub fn from_components(dim: usize, degree: usize, comps: Vec<T>) -> Result<Self> {
        if comps.len() != binomial(dim, degree) {
            return Err(GeomError::DimensionMismatch {
                expected: binomial(dim, degree),
                got: comps.len(),
            });
        }
        Ok(Form { dim, degree, comps })
    }

    /// Forms of degree above the dimension have no components.
    pub fn is_trivially_zero(&self) -> bool {
        self.degree > self.dim
    }

    /// Component on an arbitrary multi-index (sign from sorting, zero on repeats).
    pub fn get(&self, idx: &[usize]) -> Option<(i32, &T)> {
        let mut s: Vec<usize> = idx.to_vec();
        let sign = sort_with_sign(&mut s);
        if sign == 0 {
            return None;
        }
        Some((sign, &self.comps[multi_index_rank(self.dim, &s)]))
    }

    fn get_signed(&self, idx: &[usize]) -> Option<T> {
        self.get(idx).map(|(s, v)| if s > 0 { v.clone() } else { v.scaled(-1.0) })
    }

    pub fn plus(&self, o: &Self) -> Self {
        assert_eq!((self.dim, self.degree), (o.dim, o.degree));
        Form {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.plus(b)).collect(),
        }
    }

    pub fn minus(&self, o: &Self) -> Self {
        assert_eq!((self.dim, self.degree), (o.dim, o.degree));
        Form {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.minus(b)).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Form {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().map(|a| a.scaled(s)).collect(),
        }
    }

    pub fn times(&self, f: &T) -> Self {
        Form {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().map(|a| a.times(f)).collect(),
        }
    }

    pub fn values(&self) -> FormValue {
        Form {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().map(Coeff::val).collect(),
        }
    }

    pub fn max_abs_value(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, v| m.max(libm::fabs(v.val())))
    }

    pub fn wedge(&self, o: &Self) -> Result<Self> {
        assert_eq!(self.dim, o.dim);
        let n = self.dim;
        let (p, q) = (self.degree, o.degree);
        if p + q > n {
            return Err(GeomError::DegreeOverflow { degree: p + q, dim: n });
        }
        let template = self.comps.first().or(o.comps.first()).expect("non-empty form");
        let mut out = Form::zero(n, p + q, template);
        let left = combinations(n, p);
        let right = combinations(n, q);
        for (a, i) in left.iter().enumerate() {
            if self.comps[a].is_zero() {
                continue;
            }
            for (b, j) in right.iter().enumerate() {
                if o.comps[b].is_zero() || i.iter().any(|x| j.contains(x)) {
                    continue;
                }
                let mut idx: Vec<usize> = i.iter().chain(j.iter()).copied().collect();
                let sign = sort_with_sign(&mut idx);
                let t = self.comps[a].times(&o.comps[b]);
                let slot = &mut out.comps[multi_index_rank(n, &idx)];
                if sign > 0 {
                    slot.accumulate(&t);
                } else {
                    *slot = slot.minus(&t);
                }
            }
        }
        Ok(out)
    }

    /// `v ⌟ σ`, `(v⌟σ)_J = v^a σ_{aJ}`.
    pub fn interior(&self, v: &[T]) -> Result<Self> {
        if self.degree == 0 {
            return Err(GeomError::InteriorOfScalar);
        }
        let n = self.dim;
        let mut out = Form::zero(n, self.degree - 1, &self.comps[0]);
        for (r, j) in combinations(n, self.degree - 1).iter().enumerate() {
            let mut acc = self.comps[0].zero_like();
            let mut idx = Vec::with_capacity(self.degree);
            for (a, va) in v.iter().enumerate() {
                if va.is_zero() || j.contains(&a) {
                    continue;
                }
                idx.clear();
                idx.push(a);
                idx.extend_from_slice(j);
                if let Some(c) = self.get_signed(&idx) {
                    acc.accumulate(&va.times(&c));
                }
            }
            out.comps[r] = acc;
        }
        Ok(out)
    }

    /// `σ(v_1, …, v_k)`.
    pub fn eval(&self, vectors: &[&[T]]) -> Result<T> {
        if vectors.len() != self.degree {
            return Err(GeomError::DimensionMismatch {
                expected: self.degree,
                got: vectors.len(),
            });
        }
        let mut f = self.clone();
        for v in vectors {
            f = f.interior(v)?;
        }
        Ok(f.comps[0].clone())
    }

    /// Pullback through a linear map with matrix `jac[μ*src + a] = ∂x^μ/∂u^a`.
    pub fn pullback(&self, jac: &[T], src: usize) -> Self {
        let n = self.dim;
        let k = self.degree;
        assert_eq!(jac.len(), n * src);
        let template = &jac[0];
        let mut out = Form::zero(src, k, template);
        if k == 0 {
            out.comps[0] = self.comps[0].clone();
            return out;
        }
        if k > src {
            return out;
        }
        let targets = combinations(n, k);
        let sources = combinations(src, k);
        let mut minor = Vec::with_capacity(k * k);
        for (ti, i) in targets.iter().enumerate() {
            if self.comps[ti].is_zero() {
                continue;
            }
            for (si, a) in sources.iter().enumerate() {
                minor.clear();
                for &mu in i {
                    for &b in a {
                        minor.push(jac[mu * src + b].clone());
                    }
                }
                let d = small_determinant(&minor, k);
                out.comps[si].accumulate(&d.times(&self.comps[ti]));
            }
        }
        out
    }

    /// Contravariant components `σ^I = Σ_J det(g^{-1}[I,J]) σ_J`.
    pub fn raised(&self, ginv: &[T]) -> Vec<T> {
        let n = self.dim;
        let k = self.degree;
        if k == 0 {
            return self.comps.clone();
        }
        let combos = combinations(n, k);
        let mut out = vec![self.comps[0].zero_like(); combos.len()];
        let mut minor = Vec::with_capacity(k * k);
        for (r, i) in combos.iter().enumerate() {
            for (c, j) in combos.iter().enumerate() {
                if self.comps[c].is_zero() {
                    continue;
                }
                minor.clear();
                for &a in i {
                    for &b in j {
                        minor.push(ginv[a * n + b].clone());
                    }
                }
                out[r].accumulate(&small_determinant(&minor, k).times(&self.comps[c]));
            }
        }
        out
    }

    /// Pointwise inner product induced by the metric (orthonormal `e_I` are unit).
    pub fn inner(&self, o: &Self, ginv: &[T]) -> T {
        let up = self.raised(ginv);
        let mut s = self.comps[0].zero_like();
        for (a, b) in up.iter().zip(&o.comps) {
            s.accumulate(&a.times(b));
        }
        s
    }

    /// Hodge star given `√det g` and the inverse metric.
    pub fn hodge(&self, ginv: &[T], sqrt_det: &T, orientation: i32) -> Self {
        let n = self.dim;
        let k = self.degree;
        let up = self.raised(ginv);
        let mut out = Form::zero(n, n - k, sqrt_det);
        for (r, i) in combinations(n, k).iter().enumerate() {
            let j: Vec<usize> = (0..n).filter(|x| !i.contains(x)).collect();
            let mut all: Vec<usize> = i.iter().chain(j.iter()).copied().collect();
            let sign = sort_with_sign(&mut all) * orientation;
            let t = up[r].times(sqrt_det).scaled(sign as f64);
            out.comps[multi_index_rank(n, &j)].accumulate(&t);
        }
        out
    }

    /// Musical flat of a vector: `v♭_a = g_ab v^b`.
    pub fn flat(v: &[T], g: &[T]) -> Self {
        let n = v.len();
        let comps = (0..n)
            .map(|a| {
                let mut s = v[0].zero_like();
                for b in 0..n {
                    s.accumulate(&g[a * n + b].times(&v[b]));
                }
                s
            })
            .collect();
        Form { dim: n, degree: 1, comps }
    }
}

impl Form<Jet> {
    pub fn order(&self) -> usize {
        self.comps.first().map(Jet::order).unwrap_or(0)
    }

    pub fn partial(&self, i: usize) -> Form<Jet> {
        Form {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().map(|c| c.partial(i)).collect(),
        }
    }

    pub fn truncate(&self, order: usize) -> Form<Jet> {
        Form {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().map(|c| c.truncate(order)).collect(),
        }
    }

    /// Exterior derivative, one jet order lower.
    pub fn exterior_derivative(&self) -> Form<Jet> {
        let n = self.dim;
        let k = self.degree;
        let q = self.order() - 1;
        if k + 1 > n {
            return Form {
                dim: n,
                degree: k + 1,
                comps: Vec::new(),
            };
        }
        let partials: Vec<Form<Jet>> = (0..n).map(|i| self.partial(i)).collect();
        let zero = Jet::constant(n, q, 0.0);
        let comps = combinations(n, k + 1)
            .iter()
            .map(|idx| {
                let mut s = zero.clone();
                let mut rest = Vec::with_capacity(k);
                for j in 0..=k {
                    rest.clear();
                    rest.extend(idx.iter().enumerate().filter(|&(p, _)| p != j).map(|(_, &v)| v));
                    let c = &partials[idx[j]].comps[multi_index_rank(n, &rest)];
                    if j % 2 == 0 {
                        s += c;
                    } else {
                        s -= c;
                    }
                }
                s
            })
            .collect();
        Form {
            dim: n,
            degree: k + 1,
            comps,
        }
    }

    /// `∇_a σ` for every coordinate direction `a`, at the lower of the orders
    /// of `∂σ` and the Christoffel symbols.
    pub fn covariant_derivatives(&self, geo: &LocalGeometry) -> Vec<Form<Jet>> {
        let n = self.dim;
        let k = self.degree;
        if self.comps.is_empty() {
            return vec![self.clone(); n];
        }
        let q = (self.order() - 1).min(geo.christoffel[0].order());
        let base = self.truncate(q);
        let combos = combinations(n, k);
        (0..n)
            .map(|a| {
                let mut out = self.partial(a).truncate(q);
                if k == 0 {
                    return out;
                }
                let mut idx = vec![0; k];
                for (r, i) in combos.iter().enumerate() {
                    let mut corr = Jet::constant(n, q, 0.0);
                    for s in 0..k {
                        for p in 0..n {
                            let gam = geo.gamma(p, a, i[s]);
                            if gam.is_zero() {
                                continue;
                            }
                            idx.copy_from_slice(i);
                            idx[s] = p;
                            if let Some(c) = base.get_signed(&idx) {
                                corr += gam.truncate(q).mul_jet(&c);
                            }
                        }
                    }
                    out.comps[r] -= &corr;
                }
                out
            })
            .collect()
    }
}

/// `d*σ = −g^{ab} ∂_b ⌟ ∇_a σ` from precomputed covariant derivatives.
pub fn codifferential_from<T: Coeff>(nabla: &[Form<T>], ginv: &[T]) -> Result<Form<T>> {
    let n = nabla.len();
    let k = nabla[0].degree;
    if k == 0 {
        return Err(GeomError::InteriorOfScalar);
    }
    let template = &nabla[0].comps[0];
    let mut out = Form::zero(n, k - 1, template);
    let mut idx = Vec::with_capacity(k);
    for (r, j) in combinations(n, k - 1).iter().enumerate() {
        let mut s = template.zero_like();
        for a in 0..n {
            for b in 0..n {
                let w = &ginv[a * n + b];
                if w.is_zero() || j.contains(&b) {
                    continue;
                }
                idx.clear();
                idx.push(b);
                idx.extend_from_slice(j);
                if let Some(c) = nabla[a].get_signed(&idx) {
                    s.accumulate(&w.times(&c));
                }
            }
        }
        out.comps[r] = s.scaled(-1.0);
    }
    Ok(out)
}

/// `Σ_a X^a ∇_a σ`.
pub fn directional<T: Coeff>(nabla: &[Form<T>], x: &[T]) -> Form<T> {
    let mut out = nabla[0].times(&x[0]);
    for a in 1..nabla.len() {
        out = out.plus(&nabla[a].times(&x[a]));
    }
    out
}

/// A k-form field over a metric chart, with jet-evaluable components.
#[derive(Clone, Debug)]
pub struct FormField {
    pub label: String,
    pub degree: usize,
    pub metric: MetricField,
    /// `C(n, degree)` components on increasing multi-indices.
    pub components: Field,
}

impl FormField {
    pub fn new(label: impl Into<String>, metric: MetricField, degree: usize, components: Field) -> Result<Self> {
        let n = metric.dim;
        if components.dim() != n || components.len() != binomial(n, degree) {
            return Err(GeomError::DimensionMismatch {
                expected: binomial(n, degree),
                got: components.len(),
            });
        }
        Ok(FormField {
            label: label.into(),
            degree,
            metric,
            components,
        })
    }

    /// A constant-coefficient form.
    pub fn constant(label: impl Into<String>, metric: MetricField, degree: usize, comps: Vec<f64>) -> Result<Self> {
        let n = metric.dim;
        if degree > n {
            return Err(GeomError::DegreeOverflow { degree, dim: n });
        }
        FormField::new(label, metric, degree, Field::constant(n, comps))
    }

    pub fn dim(&self) -> usize {
        self.metric.dim
    }

    pub fn eval(&self, x: &[f64], order: usize) -> Result<Form<Jet>> {
        self.metric.domain.check(x)?;
        let comps = self.components.eval(x, order)?;
        Ok(Form {
            dim: self.dim(),
            degree: self.degree,
            comps,
        })
    }

    pub fn value(&self, x: &[f64]) -> Result<FormValue> {
        Ok(self.eval(x, 0)?.values())
    }

    /// `dσ` as a new field (evaluable up to order 2). For `degree = dim` the
    /// result is the trivially zero form with no components.
    pub fn exterior_derivative(&self) -> FormField {
        let inner = self.clone();
        let n = self.dim();
        let k = self.degree;
        let comps = Field::from_point_fn(n, binomial(n, k + 1), move |x, order| {
            if order >= crate::jet::MAX_ORDER {
                return Err(GeomError::InvalidOrder(order + 1));
            }
            Ok(inner.eval(x, order + 1)?.exterior_derivative().comps)
        });
        FormField {
            label: alloc::format!("d({})", self.label),
            degree: k + 1,
            metric: self.metric.clone(),
            components: comps,
        }
    }

    pub fn wedge(&self, other: &FormField) -> Result<FormField> {
        let n = self.dim();
        let deg = self.degree + other.degree;
        if deg > n {
            return Err(GeomError::DegreeOverflow { degree: deg, dim: n });
        }
        let (a, b) = (self.clone(), other.clone());
        let comps = Field::from_point_fn(n, binomial(n, deg), move |x, order| {
            Ok(a.eval(x, order)?.wedge(&b.eval(x, order)?)?.comps)
        });
        Ok(FormField {
            label: alloc::format!("{}∧{}", self.label, other.label),
            degree: deg,
            metric: self.metric.clone(),
            components: comps,
        })
    }

    /// `∇_a σ` values at `x` for all coordinate directions.
    pub fn covariant_derivatives(&self, x: &[f64]) -> Result<Vec<FormValue>> {
        let geo = self.metric.geometry(x, 1)?;
        let s = self.eval(x, 1)?;
        Ok(s.covariant_derivatives(&geo).iter().map(Form::values).collect())
    }

    pub fn covariant_derivative_form(&self, v: &[f64], x: &[f64]) -> Result<FormValue> {
        Ok(directional(&self.covariant_derivatives(x)?, v))
    }

    pub fn codifferential(&self, x: &[f64]) -> Result<FormValue> {
        let geo = self.metric.geometry(x, 1)?;
        let nabla: Vec<FormValue> = self
            .eval(x, 1)?
            .covariant_derivatives(&geo)
            .iter()
            .map(Form::values)
            .collect();
        codifferential_from(&nabla, &geo.inverse_values())
    }

    pub fn interior_product(&self, v: &[f64], x: &[f64]) -> Result<FormValue> {
        self.value(x)?.interior(v)
    }

    pub fn hodge_star(&self, x: &[f64], orientation: i32) -> Result<FormValue> {
        self.hodge_field(orientation).value(x)
    }

    /// `*σ` as a field, so that it can be differentiated further.
    pub fn hodge_field(&self, orientation: i32) -> FormField {
        let inner = self.clone();
        let n = self.dim();
        let k = self.degree;
        let comps = Field::from_point_fn(n, binomial(n, n - k), move |x, order| {
            let g = inner.metric.metric_jets(x, order)?;
            let ginv = linalg::inverse(&g, n)?;
            let sqrt_det = linalg::determinant(&g, n)?.sqrt()?;
            Ok(inner.eval(x, order)?.hodge(&ginv, &sqrt_det, orientation).comps)
        });
        FormField {
            label: alloc::format!("*{}", self.label),
            degree: n - k,
            metric: self.metric.clone(),
            components: comps,
        }
    }
}
