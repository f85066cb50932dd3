//! Catalogue of explicit charts, metrics, distinguished forms and canonical
//! umbilical embeddings.
//!
//! Every entry is validated when built: known scalar curvature and Einstein
//! constants are compared with the curvature module, the curvature span at
//! the chart centre is compared with the expected holonomy dimension, forms
//! flagged parallel are checked with `∇`, and canonical embeddings are
//! checked for umbilicity and their expected `λ`.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, PI};
use core::fmt;

use crate::error::{GeomError, Result};
use crate::field::{ChartDomain, Field, DEFAULT_SEED};
use crate::forms::{binomial, FormField};
use crate::cones::{cone_metric, cone_slice, sine_cone_join};
use crate::g2;
use crate::holonomy;
use crate::hypersurface::Embedding;
use crate::jet::Jet;
use crate::linalg;
use crate::riemann::{self, MetricField};

/// Largest admissible chart dimension.
pub const MAX_DIM: usize = 10;
/// Tolerance for load-time scalar validation.
pub const SCALAR_TOLERANCE: f64 = 1e-7;
/// Tolerance for pre-validated embedding umbilicity.
pub const EMBEDDING_TOLERANCE: f64 = 1e-9;
/// Tolerance for forms flagged parallel.
pub const PARALLEL_TOLERANCE: f64 = 1e-8;
/// Number of validation points per entry.
pub const VALIDATION_POINTS: usize = 4;

/// Catalogue names accepted by [`build`].
pub const NAMES: [&str; 9] = [
    "euclidean",
    "round_sphere",
    "flat_torus",
    "sasakian_sphere",
    "nearly_kahler_s6",
    "fubini_study_cp2",
    "product",
    "cone",
    "sine_join",
];

/// A parameter value: a number or a nested manifold.
#[derive(Clone, Debug, PartialEq)]
pub enum ParamValue {
    Number(f64),
    Manifold(ManifoldRequest),
}

/// A catalogue name with parameters, e.g. `cone(round_sphere(n=3))`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ManifoldRequest {
    pub name: String,
    pub params: BTreeMap<String, ParamValue>,
}

impl ManifoldRequest {
    pub fn new(name: impl Into<String>) -> Self {
        ManifoldRequest {
            name: name.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.into(), ParamValue::Number(value));
        self
    }

    pub fn with_manifold(mut self, key: &str, value: ManifoldRequest) -> Self {
        self.params.insert(key.into(), ParamValue::Manifold(value));
        self
    }

    /// Parse `name`, `name(k=v, …)` or `name(k=v …)`; positional arguments
    /// fill the entry's parameter names in order.
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser {
            s: text.as_bytes(),
            i: 0,
        };
        let r = p.request()?;
        p.skip_ws();
        if p.i != p.s.len() {
            return Err(p.error("trailing input"));
        }
        Ok(r)
    }

    fn number(&self, key: &str, default: Option<f64>) -> Result<f64> {
        match self.params.get(key) {
            Some(ParamValue::Number(v)) => Ok(*v),
            Some(ParamValue::Manifold(_)) => Err(GeomError::InvalidParameter(format!(
                "{}: parameter {key} must be a number",
                self.name
            ))),
            None => default.ok_or_else(|| {
                GeomError::InvalidParameter(format!("{}: missing parameter {key}", self.name))
            }),
        }
    }

    fn integer(&self, key: &str, default: Option<usize>) -> Result<usize> {
        let v = self.number(key, default.map(|d| d as f64))?;
        if !(v >= 0.0) || libm::fabs(v - libm::round(v)) > 0.0 {
            return Err(GeomError::InvalidParameter(format!(
                "{}: parameter {key} must be a non-negative integer, got {v}",
                self.name
            )));
        }
        Ok(v as usize)
    }

    fn manifold(&self, key: &str) -> Result<&ManifoldRequest> {
        match self.params.get(key) {
            Some(ParamValue::Manifold(m)) => Ok(m),
            _ => Err(GeomError::InvalidParameter(format!(
                "{}: parameter {key} must be a manifold",
                self.name
            ))),
        }
    }

    fn check_keys(&self) -> Result<()> {
        let allowed = parameter_names(&self.name)?;
        for k in self.params.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(GeomError::InvalidParameter(format!(
                    "{}: unknown parameter {k}",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for ManifoldRequest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if self.params.is_empty() {
            return Ok(());
        }
        f.write_str("(")?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match v {
                ParamValue::Number(x) => write!(f, "{k}={x}")?,
                ParamValue::Manifold(m) => write!(f, "{k}={m}")?,
            }
        }
        f.write_str(")")
    }
}

/// Parameter names of a catalogue entry, in positional order.
pub fn parameter_names(name: &str) -> Result<&'static [&'static str]> {
    Ok(match name {
        "euclidean" | "flat_torus" | "sasakian_sphere" => &["n"],
        "round_sphere" => &["n", "r"],
        "nearly_kahler_s6" | "fubini_study_cp2" => &[],
        "product" | "sine_join" => &["a", "b"],
        "cone" => &["base", "lo", "hi"],
        other => return Err(GeomError::UnknownManifold(other.to_string())),
    })
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> GeomError {
        GeomError::InvalidParameter(format!("manifold expression: {what} at byte {}", self.i))
    }

    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.i).copied()
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.i;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.i += 1;
            } else {
                break;
            }
        }
        if start == self.i || self.s[start].is_ascii_digit() {
            return Err(self.error("expected a name"));
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.i]).into_owned())
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.i;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || matches!(c, b'.' | b'-' | b'+' | b'e' | b'E') {
                self.i += 1;
            } else {
                break;
            }
        }
        let txt = core::str::from_utf8(&self.s[start..self.i]).map_err(|_| self.error("bad number"))?;
        txt.parse::<f64>().map_err(|_| self.error("bad number"))
    }

    fn value(&mut self) -> Result<ParamValue> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'-' || c == b'.' => Ok(ParamValue::Number(self.number()?)),
            Some(_) => Ok(ParamValue::Manifold(self.request()?)),
            None => Err(self.error("expected a value")),
        }
    }

    fn request(&mut self) -> Result<ManifoldRequest> {
        let name = self.ident()?;
        let names = parameter_names(&name)?;
        let mut req = ManifoldRequest::new(name);
        self.skip_ws();
        if self.peek() != Some(b'(') {
            // a bare name absorbs following `key=number` pairs it owns
            loop {
                let save = self.i;
                match self.ident() {
                    Ok(k) if names.contains(&k.as_str()) => {
                        self.skip_ws();
                        if self.peek() == Some(b'=') {
                            self.i += 1;
                            let v = self.number()?;
                            req.params.insert(k, ParamValue::Number(v));
                            continue;
                        }
                        self.i = save;
                        break;
                    }
                    _ => {
                        self.i = save;
                        break;
                    }
                }
            }
            return Ok(req);
        }
        self.i += 1;
        let mut positional = 0;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b')') => {
                    self.i += 1;
                    break;
                }
                Some(b',') => {
                    self.i += 1;
                    continue;
                }
                None => return Err(self.error("unclosed parenthesis")),
                _ => {}
            }
            // keyword argument if an identifier is followed by '='
            let save = self.i;
            let key = match self.ident() {
                Ok(k) => {
                    self.skip_ws();
                    if self.peek() == Some(b'=') {
                        self.i += 1;
                        Some(k)
                    } else {
                        self.i = save;
                        None
                    }
                }
                Err(_) => {
                    self.i = save;
                    None
                }
            };
            let key = match key {
                Some(k) => k,
                None => {
                    let k = names
                        .get(positional)
                        .ok_or_else(|| self.error("too many positional arguments"))?;
                    positional += 1;
                    (*k).to_string()
                }
            };
            let v = self.value()?;
            if req.params.insert(key.clone(), v).is_some() {
                return Err(self.error(&format!("duplicate parameter {key}")));
            }
        }
        req.check_keys()?;
        Ok(req)
    }
}

/// A named form field on a catalogue manifold.
#[derive(Clone, Debug)]
pub struct NamedForm {
    pub name: String,
    pub field: FormField,
    /// Whether the form is expected to be `∇`-parallel (validated at load).
    pub parallel: bool,
}

/// Values the curvature module must reproduce.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KnownScalars {
    pub scalar: Option<f64>,
    pub einstein: Option<f64>,
    pub holonomy_dim: Option<usize>,
}

/// A pre-validated umbilical embedding into the catalogue manifold.
#[derive(Clone, Debug)]
pub struct CanonicalEmbedding {
    pub name: String,
    pub embedding: Embedding,
    pub expected_lambda: f64,
}

/// An intrinsic special Killing pair `(γ, β)` with its constants, carried by
/// entries whose interesting form is not parallel.
#[derive(Clone, Debug)]
pub struct IntrinsicCandidate {
    pub name: String,
    pub gamma: FormField,
    pub beta: FormField,
    pub k: usize,
    pub lambda: f64,
}

/// A validated catalogue entry.
#[derive(Clone, Debug)]
pub struct ManifoldSpec {
    pub name: String,
    pub label: String,
    pub request: ManifoldRequest,
    pub metric: MetricField,
    pub orientation: i32,
    pub forms: Vec<NamedForm>,
    pub known: KnownScalars,
    /// Radius when the metric is a round sphere.
    pub round_radius: Option<f64>,
    pub embeddings: Vec<CanonicalEmbedding>,
    pub candidates: Vec<IntrinsicCandidate>,
    /// Base of a cone entry.
    pub cone_base: Option<Box<ManifoldSpec>>,
}

impl ManifoldSpec {
    pub fn dim(&self) -> usize {
        self.metric.dim
    }

    pub fn form(&self, name: &str) -> Option<&NamedForm> {
        self.forms.iter().find(|f| f.name == name)
    }

    pub fn parallel_forms(&self) -> impl Iterator<Item = &NamedForm> {
        self.forms.iter().filter(|f| f.parallel)
    }
}

/// Build and validate a catalogue entry.
pub fn build(req: &ManifoldRequest) -> Result<ManifoldSpec> {
    req.check_keys()?;
    let spec = match req.name.as_str() {
        "euclidean" => euclidean(req.integer("n", Some(4))?)?,
        "round_sphere" => round_sphere(req.integer("n", Some(4))?, req.number("r", Some(1.0))?)?,
        "flat_torus" => flat_torus(req.integer("n", Some(2))?)?,
        "sasakian_sphere" => sasakian_sphere(req.integer("n", Some(3))?)?,
        "nearly_kahler_s6" => nearly_kahler_s6()?,
        "fubini_study_cp2" => fubini_study_cp2()?,
        "product" => product(&build(req.manifold("a")?)?, &build(req.manifold("b")?)?)?,
        "cone" => cone(
            &build(req.manifold("base")?)?,
            req.number("lo", Some(0.5))?,
            req.number("hi", Some(2.0))?,
        )?,
        "sine_join" => sine_join(&build(req.manifold("a")?)?, &build(req.manifold("b")?)?)?,
        other => return Err(GeomError::UnknownManifold(other.to_string())),
    };
    let spec = ManifoldSpec {
        request: req.clone(),
        label: req.to_string(),
        ..spec
    };
    validate(&spec)?;
    Ok(spec)
}

/// Build from an expression such as `cone(round_sphere(n=3))`.
pub fn build_str(expr: &str) -> Result<ManifoldSpec> {
    build(&ManifoldRequest::parse(expr)?)
}

/// Canonical umbilical embeddings, or `Unsupported` when the entry has none.
pub fn canonical_umbilical_embeddings(spec: &ManifoldSpec) -> Result<Vec<Embedding>> {
    if spec.embeddings.is_empty() {
        return Err(GeomError::Unsupported(format!(
            "no umbilical canonical embedding in {}",
            spec.label
        )));
    }
    Ok(spec.embeddings.iter().map(|e| e.embedding.clone()).collect())
}

fn check_dim(name: &str, n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(GeomError::InvalidParameter(format!("{name}: dimension must be ≥ {min}")));
    }
    if n > MAX_DIM {
        return Err(GeomError::InvalidParameter(format!(
            "{name}: dimension {n} exceeds the limit {MAX_DIM}"
        )));
    }
    Ok(())
}

fn spec(name: &str, metric: MetricField) -> ManifoldSpec {
    ManifoldSpec {
        name: name.into(),
        label: name.into(),
        request: ManifoldRequest::new(name),
        metric,
        orientation: 1,
        forms: Vec::new(),
        known: KnownScalars::default(),
        round_radius: None,
        embeddings: Vec::new(),
        candidates: Vec::new(),
        cone_base: None,
    }
}

fn identity_metric(label: &str, domain: ChartDomain) -> Result<MetricField> {
    let n = domain.dim();
    let mut id = vec![0.0; n * n];
    for i in 0..n {
        id[i * n + i] = 1.0;
    }
    Ok(MetricField::new(label, domain, Field::constant(n, id))?.with_einstein(0.0))
}

/// `Σ_i u_i²` as a jet.
fn norm_sq(u: &[Jet]) -> Jet {
    let mut s = Jet::constant(u[0].nvars(), u[0].order(), 0.0);
    for ui in u {
        s += ui * ui;
    }
    s
}

/// Inverse stereographic projection `v ↦ (2v, |v|² − 1)/(1 + |v|²)` onto the
/// unit sphere, as jets.
pub fn inverse_stereographic(v: &[Jet]) -> Result<Vec<Jet>> {
    let s = norm_sq(v);
    let inv = s.add_scalar(1.0).recip()?;
    let mut out: Vec<Jet> = v.iter().map(|vi| vi.mul_jet(&inv).scale(2.0)).collect();
    out.push(s.add_scalar(-1.0).mul_jet(&inv));
    Ok(out)
}

/// The round metric `4r²/(1+|u|²)² δ` on the stereographic ball.
pub fn stereographic_metric(n: usize, r: f64, radius: f64) -> Result<MetricField> {
    let comps = Field::from_jet_map(n, n * n, move |u| {
        let s = norm_sq(u).add_scalar(1.0);
        let f = s.mul_jet(&s).recip()?.scale(4.0 * r * r);
        let mut out = vec![Jet::constant(n, u[0].order(), 0.0); n * n];
        for i in 0..n {
            out[i * n + i] = f.clone();
        }
        Ok(out)
    });
    let label = format!("round S^{n} (r={r})");
    Ok(MetricField::new(label, ChartDomain::ball(n, radius), comps)?.with_einstein((n as f64 - 1.0) / (r * r)))
}

/// Riemannian volume form `sqrt(det g) dx¹∧…∧dxⁿ`.
pub fn volume_form(metric: &MetricField) -> Result<FormField> {
    let n = metric.dim;
    let m = metric.clone();
    let comps = Field::from_point_fn(n, 1, move |x, order| {
        let g = m.metric_jets(x, order)?;
        Ok(vec![linalg::determinant(&g, n)?.sqrt()?])
    });
    FormField::new("vol", metric.clone(), n, comps)
}

/// The standard Kähler form `Σ_j dx^{2j}∧dx^{2j+1}` components.
pub fn flat_kahler_components(n: usize) -> Vec<f64> {
    let pairs = crate::forms::combinations(n, 2);
    pairs
        .iter()
        .map(|p| if p[0] % 2 == 0 && p[1] == p[0] + 1 { 1.0 } else { 0.0 })
        .collect()
}

/// Choose the orientation with `λ ≥ 0` at the domain centre.
pub(crate) fn canonical_orientation(e: Embedding) -> Result<Embedding> {
    let c = e.domain.center();
    let lam = e.jets(&c, 2)?.lambda.value();
    Ok(if lam < -1e-12 { e.flipped() } else { e })
}

fn unit_sphere_in_flat(ambient: &MetricField, radius: f64) -> Result<Embedding> {
    let n = ambient.dim - 1;
    let map = Field::from_jet_map(n, n + 1, inverse_stereographic);
    canonical_orientation(Embedding::new(
        format!("unit S^{n}"),
        ChartDomain::ball(n, radius),
        ambient.clone(),
        map,
        1,
    )?)
}

fn euclidean(n: usize) -> Result<ManifoldSpec> {
    check_dim("euclidean", n, 1)?;
    let metric = identity_metric(&format!("ℝ^{n}"), ChartDomain::ball(n, 3.0))?;
    let mut s = spec("euclidean", metric.clone());
    s.known = KnownScalars {
        scalar: Some(0.0),
        einstein: Some(0.0),
        holonomy_dim: Some(0),
    };
    s.forms.push(NamedForm {
        name: "vol".into(),
        field: FormField::constant("vol", metric.clone(), n, vec![1.0])?,
        parallel: true,
    });
    if n.is_multiple_of(2) {
        s.forms.push(NamedForm {
            name: "kahler".into(),
            field: FormField::constant("ω", metric.clone(), 2, flat_kahler_components(n))?,
            parallel: true,
        });
    }
    if n == 7 {
        s.forms.push(NamedForm {
            name: "g2".into(),
            field: FormField::constant("φ", metric.clone(), 3, g2::phi().comps)?,
            parallel: true,
        });
    }
    if n >= 2 {
        s.embeddings.push(CanonicalEmbedding {
            name: "unit_sphere".into(),
            embedding: unit_sphere_in_flat(&metric, 2.0)?,
            expected_lambda: 1.0,
        });
        let map = Field::from_jet_map(n - 1, n, move |u| {
            let mut v = u.to_vec();
            v.push(Jet::constant(n - 1, u[0].order(), 0.0));
            Ok(v)
        });
        s.embeddings.push(CanonicalEmbedding {
            name: "hyperplane".into(),
            embedding: Embedding::new("hyperplane", ChartDomain::ball(n - 1, 1.0), metric, map, 1)?,
            expected_lambda: 0.0,
        });
    }
    Ok(s)
}

/// Geodesic sphere of angular radius `rho` about the chart origin of the
/// stereographic round metric (radius `r`): `λ = cot ρ / r`.
pub fn geodesic_sphere(ambient: &MetricField, rho: f64, r: f64) -> Result<CanonicalEmbedding> {
    let n = ambient.dim - 1;
    let t = libm::tan(0.5 * rho);
    let map = Field::from_jet_map(n, n + 1, move |v| {
        Ok(inverse_stereographic(v)?.iter().map(|x| x.scale(t)).collect())
    });
    let e = Embedding::new(format!("geodesic sphere ρ={rho:.6}"), ChartDomain::ball(n, 2.0), ambient.clone(), map, 1)?;
    Ok(CanonicalEmbedding {
        name: format!("geodesic_sphere_{}", rho_name(rho)),
        embedding: canonical_orientation(e)?,
        expected_lambda: libm::cos(rho) / libm::sin(rho) / r,
    })
}

fn rho_name(rho: f64) -> String {
    for (v, s) in [(FRAC_PI_6, "pi_6"), (FRAC_PI_3, "pi_3"), (FRAC_PI_2, "pi_2")] {
        if libm::fabs(rho - v) < 1e-15 {
            return s.into();
        }
    }
    format!("{rho:.6}")
}

/// Geodesic sphere radii of the round catalogue entries.
pub const GEODESIC_RADII: [f64; 3] = [FRAC_PI_6, FRAC_PI_3, FRAC_PI_2];

fn round_sphere(n: usize, r: f64) -> Result<ManifoldSpec> {
    check_dim("round_sphere", n, 1)?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(GeomError::InvalidParameter(format!("round_sphere: radius must be positive, got {r}")));
    }
    let metric = stereographic_metric(n, r, 3.0)?;
    let nf = n as f64;
    let mut s = spec("round_sphere", metric.clone());
    s.known = KnownScalars {
        scalar: Some(nf * (nf - 1.0) / (r * r)),
        einstein: Some((nf - 1.0) / (r * r)),
        holonomy_dim: Some(n * (n - 1) / 2),
    };
    s.round_radius = Some(r);
    s.forms.push(NamedForm {
        name: "vol".into(),
        field: volume_form(&metric)?,
        parallel: true,
    });
    if n >= 2 {
        for rho in GEODESIC_RADII {
            s.embeddings.push(geodesic_sphere(&metric, rho, r)?);
        }
    }
    Ok(s)
}

fn flat_torus(n: usize) -> Result<ManifoldSpec> {
    check_dim("flat_torus", n, 1)?;
    let bounds: Vec<(f64, f64)> = (0..n).map(|_| (-PI, PI)).collect();
    let metric = identity_metric(&format!("T^{n}"), ChartDomain::boxed(&bounds))?;
    let mut s = spec("flat_torus", metric.clone());
    s.known = KnownScalars {
        scalar: Some(0.0),
        einstein: Some(0.0),
        holonomy_dim: Some(0),
    };
    s.forms.push(NamedForm {
        name: "vol".into(),
        field: FormField::constant("vol", metric.clone(), n, vec![1.0])?,
        parallel: true,
    });
    if n >= 2 {
        let mut c = vec![0.0; binomial(n, 2)];
        c[0] = 1.0;
        s.forms.push(NamedForm {
            name: "dx0^dx1".into(),
            field: FormField::constant("dx⁰∧dx¹", metric, 2, c)?,
            parallel: true,
        });
    }
    Ok(s)
}

/// Round unit `S^n` with the pair `(γ, β) = (i*(N⌟σ), i*σ)` of a constant
/// form `σ` on `ℝ^{n+1}`, using the outward normal (`λ = −1`). The
/// stereographic chart of the sphere and the embedding chart coincide, so the
/// pulled-back fields are re-homed on the catalogue metric.
fn sphere_with_restricted_form(
    name: &str,
    n: usize,
    sigma_comps: Vec<f64>,
    degree: usize,
    form_name: &str,
) -> Result<ManifoldSpec> {
    let mut s = round_sphere(n, 1.0)?;
    s.name = name.into();
    let flat = identity_metric(&format!("ℝ^{}", n + 1), ChartDomain::ball(n + 1, 3.0))?;
    let sigma = FormField::constant(form_name, flat.clone(), degree, sigma_comps)?;
    let outward = unit_sphere_in_flat(&flat, 3.0)?.flipped();
    let (gamma, beta) = outward.pullback_fields(&sigma)?;
    let gamma = FormField::new(form_name, s.metric.clone(), degree - 1, gamma.components)?;
    let beta = FormField::new(format!("i*{form_name}"), s.metric.clone(), degree, beta.components)?;
    s.forms.push(NamedForm {
        name: form_name.into(),
        field: gamma.clone(),
        parallel: false,
    });
    s.candidates.push(IntrinsicCandidate {
        name: form_name.into(),
        gamma,
        beta,
        k: degree,
        lambda: -1.0,
    });
    Ok(s)
}

fn sasakian_sphere(n: usize) -> Result<ManifoldSpec> {
    check_dim("sasakian_sphere", n, 3)?;
    if n.is_multiple_of(2) {
        return Err(GeomError::InvalidParameter(format!("sasakian_sphere: dimension must be odd, got {n}")));
    }
    sphere_with_restricted_form("sasakian_sphere", n, flat_kahler_components(n + 1), 2, "eta")
}

fn nearly_kahler_s6() -> Result<ManifoldSpec> {
    sphere_with_restricted_form("nearly_kahler_s6", 6, g2::phi().comps, 3, "omega")
}

/// Fubini–Study metric on `CP²` (holomorphic sectional curvature 4) in the
/// affine chart with real coordinates `(x₁, y₁, x₂, y₂)`.
pub fn fubini_study_metric(radius: f64) -> Result<MetricField> {
    let comps = Field::from_point_fn(4, 16, |p, order| fs_parts(p, order).map(|f| f.metric));
    Ok(MetricField::new("CP² Fubini–Study", ChartDomain::ball(4, radius), comps)?.with_einstein(6.0))
}

struct FsParts {
    metric: Vec<Jet>,
    kahler: Vec<Jet>,
}

fn fs_parts(p: &[f64], order: usize) -> Result<FsParts> {
    let c = Jet::coordinates(p, order);
    let (x, y) = ([&c[0], &c[2]], [&c[1], &c[3]]);
    let a = norm_sq(&c).add_scalar(1.0);
    let a2 = a.mul_jet(&a).recip()?;
    // h_jk = (A δ_jk − z̄_j z_k)/A²
    let re = |j: usize, k: usize| -> Jet {
        let mut v = -(x[j] * x[k] + y[j] * y[k]);
        if j == k {
            v += &a;
        }
        v.mul_jet(&a2)
    };
    let im = |j: usize, k: usize| -> Jet { -(x[j] * y[k] - y[j] * x[k]).mul_jet(&a2) };
    let mut g = vec![Jet::constant(4, order, 0.0); 16];
    for j in 0..2 {
        for k in 0..2 {
            let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
            let (r, i) = (re(j, k), im(j, k));
            g[xj * 4 + xk] = r.clone();
            g[yj * 4 + yk] = r;
            g[xj * 4 + yk] = i.clone();
            g[yj * 4 + xk] = -i;
        }
    }
    let kahler = vec![re(0, 0), -im(0, 1), re(0, 1), -re(0, 1), -im(0, 1), re(1, 1)];
    Ok(FsParts { metric: g, kahler })
}

fn fubini_study_cp2() -> Result<ManifoldSpec> {
    let metric = fubini_study_metric(3.0)?;
    let mut s = spec("fubini_study_cp2", metric.clone());
    s.known = KnownScalars {
        scalar: Some(24.0),
        einstein: Some(6.0),
        holonomy_dim: Some(4),
    };
    let kahler = Field::from_point_fn(4, 6, |p, order| fs_parts(p, order).map(|f| f.kahler));
    s.forms.push(NamedForm {
        name: "kahler".into(),
        field: FormField::new("ω_FS", metric.clone(), 2, kahler)?,
        parallel: true,
    });
    s.forms.push(NamedForm {
        name: "vol".into(),
        field: volume_form(&metric)?,
        parallel: true,
    });
    Ok(s)
}

/// Block-diagonal product metric in coordinates `(u₁, u₂)`.
pub fn product_metric(a: &MetricField, b: &MetricField) -> Result<MetricField> {
    let (p, q) = (a.dim, b.dim);
    let n = p + q;
    let (ga, gb) = (a.components.clone(), b.components.clone());
    let comps = Field::from_point_fn(n, n * n, move |x, order| {
        let ja = ga.eval(&x[..p], order)?;
        let jb = gb.eval(&x[p..], order)?;
        let mut out = vec![Jet::constant(n, order, 0.0); n * n];
        let amap: Vec<usize> = (0..p).collect();
        let bmap: Vec<usize> = (p..n).collect();
        for i in 0..p {
            for j in 0..p {
                out[i * n + j] = ja[i * p + j].reindex(n, &amap);
            }
        }
        for i in 0..q {
            for j in 0..q {
                out[(p + i) * n + p + j] = jb[i * q + j].reindex(n, &bmap);
            }
        }
        Ok(out)
    });
    let einstein = match (a.einstein, b.einstein) {
        (Some(x), Some(y)) if libm::fabs(x - y) < 1e-12 => Some(x),
        _ => None,
    };
    let mut m = MetricField::new(
        format!("{} × {}", a.label, b.label),
        a.domain.product(&b.domain),
        comps,
    )?;
    m.einstein = einstein;
    Ok(m)
}

/// Lift a form on one factor of a product chart (`offset` = index of its
/// first coordinate).
fn lift_factor_form(f: &FormField, metric: &MetricField, offset: usize) -> Result<FormField> {
    let n = metric.dim;
    let p = f.dim();
    let k = f.degree;
    let src = f.clone();
    let map: Vec<usize> = (offset..offset + p).collect();
    let combos_src = crate::forms::combinations(p, k);
    let comps = Field::from_point_fn(n, binomial(n, k), move |x, order| {
        let s = src.eval(&x[offset..offset + p], order)?;
        let mut out = vec![Jet::constant(n, order, 0.0); binomial(n, k)];
        for (i, idx) in combos_src.iter().enumerate() {
            let lifted: Vec<usize> = idx.iter().map(|a| a + offset).collect();
            out[crate::forms::multi_index_rank(n, &lifted)] = s.comps[i].reindex(n, &map);
        }
        Ok(out)
    });
    FormField::new(f.label.clone(), metric.clone(), k, comps)
}

fn product(a: &ManifoldSpec, b: &ManifoldSpec) -> Result<ManifoldSpec> {
    check_dim("product", a.dim() + b.dim(), 2)?;
    let metric = product_metric(&a.metric, &b.metric)?;
    let mut s = spec("product", metric.clone());
    s.known = KnownScalars {
        scalar: a.known.scalar.zip(b.known.scalar).map(|(x, y)| x + y),
        einstein: metric.einstein,
        holonomy_dim: a.known.holonomy_dim.zip(b.known.holonomy_dim).map(|(x, y)| x + y),
    };
    for (spec_f, offset, tag) in [(a, 0, "a"), (b, a.dim(), "b")] {
        if let Some(v) = spec_f.form("vol") {
            s.forms.push(NamedForm {
                name: format!("vol_{tag}"),
                field: lift_factor_form(&v.field, &metric, offset)?,
                parallel: true,
            });
        }
    }
    Ok(s)
}

/// Smallest admissible lower radial bound for catalogue cones.
pub const CONE_MIN_RADIUS: f64 = 0.1;

fn cone(base: &ManifoldSpec, lo: f64, hi: f64) -> Result<ManifoldSpec> {
    check_dim("cone", base.dim() + 1, 2)?;
    if lo < CONE_MIN_RADIUS {
        return Err(GeomError::InvalidParameter(format!(
            "cone: lower radius {lo} is below {CONE_MIN_RADIUS}"
        )));
    }
    let metric = cone_metric(&base.metric, lo, hi)?;
    let n = base.dim() as f64;
    let mut s = spec("cone", metric.clone());
    if base.known.einstein.is_some_and(|c| libm::fabs(c - (n - 1.0)) < 1e-12) && base.dim() >= 2 {
        s.metric.einstein = Some(0.0);
        s.known = KnownScalars {
            scalar: Some(0.0),
            einstein: Some(0.0),
            holonomy_dim: Some(0),
        };
    }
    if lo < 1.0 && hi > 1.0 {
        s.embeddings.push(CanonicalEmbedding {
            name: "slice_t1".into(),
            embedding: cone_slice(&s.metric, &base.metric.domain, 1.0)?,
            expected_lambda: 1.0,
        });
    }
    s.cone_base = Some(Box::new(base.clone()));
    Ok(s)
}

fn sine_join(a: &ManifoldSpec, b: &ManifoldSpec) -> Result<ManifoldSpec> {
    check_dim("sine_join", a.dim() + b.dim() + 1, 3)?;
    let metric = sine_cone_join(&a.metric, &b.metric)?;
    let mut s = spec("sine_join", metric);
    if a.round_radius == Some(1.0) && b.round_radius == Some(1.0) {
        let n = s.metric.dim;
        let nf = n as f64;
        s.metric.einstein = Some(nf - 1.0);
        s.known = KnownScalars {
            scalar: Some(nf * (nf - 1.0)),
            einstein: Some(nf - 1.0),
            holonomy_dim: Some(n * (n - 1) / 2),
        };
        s.round_radius = Some(1.0);
    }
    Ok(s)
}

/// Outcome of load-time validation for one entry.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub scalar_error: f64,
    pub einstein_error: f64,
    pub symmetry_error: f64,
    pub curvature_span: usize,
    pub parallel_error: f64,
    pub embedding_umbilicity: f64,
    pub embedding_lambda_error: f64,
}

/// Validation points of an entry (deterministic).
pub fn validation_points(spec: &ManifoldSpec) -> Vec<Vec<f64>> {
    let mut pts = vec![spec.metric.domain.center()];
    pts.extend(spec.metric.domain.sample(VALIDATION_POINTS - 1, DEFAULT_SEED));
    pts
}

/// Compare every known scalar, flagged-parallel form and canonical embedding
/// with direct computation.
pub fn validation_report(spec: &ManifoldSpec) -> Result<ValidationReport> {
    let mut r = ValidationReport::default();
    let pts = validation_points(spec);
    for x in &pts {
        let c = riemann::curvature(&spec.metric, x)?;
        if let Some(s) = spec.known.scalar {
            r.scalar_error = r.scalar_error.max(libm::fabs(c.scalar - s));
        }
        if let Some(e) = spec.known.einstein {
            let n = spec.dim();
            let mut worst: f64 = 0.0;
            for i in 0..n * n {
                worst = worst.max(libm::fabs(c.ricci[i] - e * c.metric[i]));
            }
            r.einstein_error = r.einstein_error.max(worst);
        }
        r.symmetry_error = r.symmetry_error.max(c.symmetry_residual());
        for f in spec.parallel_forms() {
            let nabla = f.field.covariant_derivatives(x)?;
            for d in &nabla {
                r.parallel_error = r.parallel_error.max(d.max_abs_value());
            }
        }
    }
    r.curvature_span = holonomy::curvature_span_dimension(&spec.metric, &spec.metric.domain.center(), false)?;
    for ce in &spec.embeddings {
        let e = &ce.embedding;
        let mut upts = vec![e.domain.center()];
        upts.extend(e.domain.sample(VALIDATION_POINTS - 1, DEFAULT_SEED));
        for u in &upts {
            let h = e.jets(u, 2)?;
            r.embedding_umbilicity = r.embedding_umbilicity.max(h.umbilicity()?);
            r.embedding_lambda_error = r
                .embedding_lambda_error
                .max(libm::fabs(h.lambda.value() - ce.expected_lambda));
        }
    }
    Ok(r)
}

fn validate(spec: &ManifoldSpec) -> Result<()> {
    let r = validation_report(spec)?;
    let fail = |what: &str, v: f64| {
        Err(GeomError::Validation(format!("{}: {what} off by {v:e}", spec.label)))
    };
    if r.scalar_error > SCALAR_TOLERANCE {
        return fail("scalar curvature", r.scalar_error);
    }
    if r.einstein_error > SCALAR_TOLERANCE {
        return fail("Einstein constant", r.einstein_error);
    }
    if r.parallel_error > PARALLEL_TOLERANCE {
        return fail("parallel form", r.parallel_error);
    }
    if r.embedding_umbilicity > EMBEDDING_TOLERANCE {
        return fail("embedding umbilicity", r.embedding_umbilicity);
    }
    if r.embedding_lambda_error > SCALAR_TOLERANCE {
        return fail("embedding λ", r.embedding_lambda_error);
    }
    if let Some(h) = spec.known.holonomy_dim {
        if r.curvature_span > h {
            return Err(GeomError::Validation(format!(
                "{}: curvature span {} exceeds the holonomy dimension {h}",
                spec.label, r.curvature_span
            )));
        }
    }
    Ok(())
}

/// The default instance of every catalogue entry, for listings and sweeps.
pub fn default_requests() -> Vec<ManifoldRequest> {
    vec![
        ManifoldRequest::new("euclidean").with("n", 4.0),
        ManifoldRequest::new("round_sphere").with("n", 4.0).with("r", 1.0),
        ManifoldRequest::new("flat_torus").with("n", 2.0),
        ManifoldRequest::new("sasakian_sphere").with("n", 3.0),
        ManifoldRequest::new("nearly_kahler_s6"),
        ManifoldRequest::new("fubini_study_cp2"),
        ManifoldRequest::new("product")
            .with_manifold("a", ManifoldRequest::new("round_sphere").with("n", 2.0))
            .with_manifold("b", ManifoldRequest::new("round_sphere").with("n", 2.0)),
        ManifoldRequest::new("cone").with_manifold("base", ManifoldRequest::new("round_sphere").with("n", 3.0)),
        ManifoldRequest::new("sine_join")
            .with_manifold("a", ManifoldRequest::new("round_sphere").with("n", 1.0))
            .with_manifold("b", ManifoldRequest::new("round_sphere").with("n", 1.0)),
    ]
}
