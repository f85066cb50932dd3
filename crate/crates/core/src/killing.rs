//! Residual checks for special Killing pairs `(γ, β)` on a hypersurface and
//! their lift to parallel forms on the metric cone.
//!
//! For a parallel `k`-form `σ` restricted to an umbilical hypersurface with
//! `II = λ g N`, `γ = i*(N⌟σ)` and `β = i*σ` satisfy
//!
//! - (i) `∇_X γ = (1/k) X⌟dγ`, (ii) `∇_X dγ = −kλ² X∧γ`,
//! - (iii) `∇_X β = −(1/(n−k+1)) X∧d*β`, (iv) `∇_X d*β = (n−k+1)λ² X⌟β`,
//! - `d*γ = 0`, `dβ = 0`, `dγ = −kλβ`, `d*β = −(n−k+1)λγ`.
//!
//! Residuals are `g`-norms of the defect forms along an orthonormal frame, so
//! they do not depend on the chart scale.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{GeomError, Result};
use crate::field::{ChartDomain, Field};
use crate::forms::{binomial, codifferential_from, combinations, multi_index_rank, Form, FormField, FormValue};
use crate::hypersurface::{Embedding, NormalFrame, UMBILIC_TOLERANCE};
use crate::jet::Jet;
use crate::linalg;
use crate::residual::{ResidualAccumulator, ResidualSummary};
use crate::riemann::{LocalGeometry, MetricField};

/// Below this `g`-norm a form counts as zero at a sample.
pub const ZERO_FORM_TOLERANCE: f64 = 1e-12;
/// `max ‖∇γ‖` above this makes `γ` non-parallel.
pub const NON_PARALLEL_THRESHOLD: f64 = 1e-6;

/// The identities checked for a candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Identity {
    GammaKilling,
    DGammaEigen,
    BetaConformal,
    CodiffBetaEigen,
    BetaClosed,
    GammaCoclosed,
    RelationDGamma,
    RelationCodiffBeta,
}

impl Identity {
    pub const ALL: [Identity; 8] = [
        Identity::GammaKilling,
        Identity::DGammaEigen,
        Identity::BetaConformal,
        Identity::CodiffBetaEigen,
        Identity::BetaClosed,
        Identity::GammaCoclosed,
        Identity::RelationDGamma,
        Identity::RelationCodiffBeta,
    ];

    /// Stable identifier used in reports.
    pub fn id(self) -> &'static str {
        match self {
            Identity::GammaKilling => "killing.gamma",
            Identity::DGammaEigen => "killing.dgamma",
            Identity::BetaConformal => "killing.beta",
            Identity::CodiffBetaEigen => "killing.codiff_beta",
            Identity::BetaClosed => "killing.beta_closed",
            Identity::GammaCoclosed => "killing.gamma_coclosed",
            Identity::RelationDGamma => "relation.dgamma",
            Identity::RelationCodiffBeta => "relation.codiff_beta",
        }
    }

    /// The identity written out.
    pub fn formula(self) -> &'static str {
        match self {
            Identity::GammaKilling => "∇_X γ = (1/k) X⌟dγ",
            Identity::DGammaEigen => "∇_X dγ = −kλ² X∧γ",
            Identity::BetaConformal => "∇_X β = −(1/(n−k+1)) X∧d*β",
            Identity::CodiffBetaEigen => "∇_X d*β = (n−k+1)λ² X⌟β",
            Identity::BetaClosed => "dβ = 0",
            Identity::GammaCoclosed => "d*γ = 0",
            Identity::RelationDGamma => "dγ = −kλβ",
            Identity::RelationCodiffBeta => "d*β = −(n−k+1)λγ",
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.formula())
    }
}

/// Where the forms of a candidate come from.
#[derive(Clone, Debug)]
pub enum CandidateSource {
    /// Explicit fields over `metric`.
    Fields { gamma: FormField, beta: FormField },
    /// `γ = i*(N⌟σ)`, `β = i*σ` for an ambient form `σ`.
    Restriction { embedding: Embedding, sigma: FormField },
}

/// A pair `(γ, β)` of degrees `(k−1, k)` with constant `λ`.
#[derive(Clone, Debug)]
pub struct KillingCandidate {
    pub label: String,
    pub source: CandidateSource,
    pub k: usize,
    pub lambda: f64,
    /// Metric of `M` (before `metric_scale`).
    pub metric: MetricField,
    /// `g ↦ metric_scale · g` applied at evaluation.
    pub metric_scale: f64,
    pub gamma_scale: f64,
    pub beta_scale: f64,
}

/// Jets of the candidate at one point: geometry at order 2 and both forms at
/// order 2.
#[derive(Clone, Debug)]
pub struct CandidateJets {
    pub geometry: LocalGeometry,
    pub gamma: Form<Jet>,
    pub beta: Form<Jet>,
}

impl KillingCandidate {
    pub fn from_fields(gamma: FormField, beta: FormField, k: usize, lambda: f64) -> Result<Self> {
        let n = gamma.dim();
        if beta.dim() != n {
            return Err(GeomError::DimensionMismatch { expected: n, got: beta.dim() });
        }
        check_degrees(gamma.degree, beta.degree, k, n)?;
        Ok(KillingCandidate {
            label: format!("({}, {})", gamma.label, beta.label),
            metric: gamma.metric.clone(),
            source: CandidateSource::Fields { gamma, beta },
            k,
            lambda,
            metric_scale: 1.0,
            gamma_scale: 1.0,
            beta_scale: 1.0,
        })
    }

    /// The pair induced by a parallel ambient form on an umbilical
    /// hypersurface; `λ` is read at the chart centre.
    pub fn from_embedding(embedding: &Embedding, sigma: &FormField) -> Result<Self> {
        let n = embedding.intrinsic_dim;
        let k = sigma.degree;
        if sigma.dim() != n + 1 || k < 1 || k > n + 1 {
            return Err(GeomError::DegreeOverflow { degree: k, dim: n + 1 });
        }
        let c = embedding.domain.center();
        let h = embedding.jets(&c, 2)?;
        let umb = h.umbilicity()?;
        if umb > UMBILIC_TOLERANCE {
            return Err(GeomError::NotUmbilical {
                point: c,
                residual: umb,
                tolerance: UMBILIC_TOLERANCE,
            });
        }
        Ok(KillingCandidate {
            label: format!("{} on {}", sigma.label, embedding.label),
            metric: embedding.induced_metric(),
            source: CandidateSource::Restriction {
                embedding: embedding.clone(),
                sigma: sigma.clone(),
            },
            k,
            lambda: h.lambda.value(),
            metric_scale: 1.0,
            gamma_scale: 1.0,
            beta_scale: 1.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.metric.dim
    }

    pub fn domain(&self) -> &ChartDomain {
        &self.metric.domain
    }

    /// Rescale the metric by `λ²` (so `λ² = 1`) and flip `γ` if needed so
    /// that `λ = −1`, the normalization under which the cone lift is
    /// parallel. Returns `None` for `λ = 0`.
    pub fn normalized_for_cone(&self) -> Option<(KillingCandidate, Normalization)> {
        let l = self.lambda;
        if !(libm::fabs(l) > 1e-12) {
            return None;
        }
        let c2 = l * l;
        let flipped = l > 0.0;
        let mut c = self.clone();
        c.metric_scale *= c2;
        c.beta_scale *= libm::fabs(l);
        if flipped {
            c.gamma_scale = -c.gamma_scale;
        }
        c.lambda = -1.0;
        Some((
            c,
            Normalization {
                metric_scale: c2,
                flipped,
            },
        ))
    }

    /// The normalized metric of `M`.
    pub fn scaled_metric(&self) -> MetricField {
        if self.metric_scale == 1.0 {
            self.metric.clone()
        } else {
            self.metric.rescaled(self.metric_scale)
        }
    }

    /// `γ` as a field over [`Self::scaled_metric`].
    pub fn gamma_field(&self) -> Result<FormField> {
        let (gamma, _) = self.base_fields()?;
        let s = self.gamma_scale;
        let n = self.dim();
        let comps = gamma.components.map_jets(binomial(n, gamma.degree), move |_, v| {
            Ok(v.iter().map(|j| j.scale(s)).collect())
        });
        FormField::new(gamma.label.clone(), self.scaled_metric(), gamma.degree, comps)
    }

    fn base_fields(&self) -> Result<(FormField, FormField)> {
        match &self.source {
            CandidateSource::Fields { gamma, beta } => Ok((gamma.clone(), beta.clone())),
            CandidateSource::Restriction { embedding, sigma } => embedding.pullback_fields(sigma),
        }
    }

    /// Geometry and both forms at `x`, jets of order 2.
    pub fn jets(&self, x: &[f64]) -> Result<CandidateJets> {
        let n = self.dim();
        let (g, gamma, beta) = match &self.source {
            CandidateSource::Fields { gamma, beta } => (
                self.metric.metric_jets(x, 2)?,
                gamma.eval(x, 2)?,
                beta.eval(x, 2)?,
            ),
            CandidateSource::Restriction { embedding, sigma } => {
                let xj = embedding.map_jets(x, 3)?;
                let frame = NormalFrame::from_map_jets(&embedding.ambient, x, &xj, embedding.orientation)?;
                let (gamma, beta) = frame.pullback(sigma, &xj)?;
                (frame.g, gamma, beta)
            }
        };
        let g: Vec<Jet> = g.iter().map(|v| v.scale(self.metric_scale)).collect();
        Ok(CandidateJets {
            geometry: LocalGeometry::from_metric_jets(x, n, g)?,
            gamma: gamma.scaled(self.gamma_scale),
            beta: beta.scaled(self.beta_scale),
        })
    }

    /// Residual of every identity at one point.
    pub fn point_residuals(&self, x: &[f64]) -> Result<PointResiduals> {
        let j = self.jets(x)?;
        point_residuals(&j, self.k, self.lambda)
    }
}

/// Rescaling applied by [`KillingCandidate::normalized_for_cone`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Normalization {
    pub metric_scale: f64,
    pub flipped: bool,
}

fn check_degrees(gamma: usize, beta: usize, k: usize, n: usize) -> Result<()> {
    if k < 1 || gamma + 1 != k || beta != k {
        return Err(GeomError::InvalidParameter(format!(
            "degree mismatch: deg γ = {gamma}, deg β = {beta}, k = {k}"
        )));
    }
    if k > n + 1 {
        return Err(GeomError::DegreeOverflow { degree: k, dim: n + 1 });
    }
    Ok(())
}

/// Per-point residual norms and the sizes used for degeneracy detection.
#[derive(Clone, Debug, PartialEq)]
pub struct PointResiduals {
    pub values: Vec<(Identity, f64)>,
    pub gamma_norm: f64,
    pub beta_norm: f64,
    /// `max_i ‖∇_{e_i} γ‖` over an orthonormal frame.
    pub nabla_gamma_norm: f64,
}

impl PointResiduals {
    pub fn get(&self, id: Identity) -> f64 {
        self.values.iter().find(|(i, _)| *i == id).map_or(0.0, |(_, v)| *v)
    }
}

fn norm(f: &FormValue, ginv: &[f64]) -> f64 {
    if f.comps.is_empty() {
        return 0.0;
    }
    if f.degree == 0 {
        return libm::fabs(f.comps[0]);
    }
    libm::sqrt(f.inner(f, ginv).max(0.0))
}

fn zero_form(n: usize, degree: usize) -> FormValue {
    Form {
        dim: n,
        degree,
        comps: vec![0.0; binomial(n, degree)],
    }
}

/// `X♭ ∧ σ`, zero when the degree overflows.
fn wedge_flat(x_flat: &FormValue, s: &FormValue) -> Result<FormValue> {
    let n = x_flat.dim;
    if s.degree + 1 > n {
        return Ok(zero_form(n, s.degree + 1));
    }
    x_flat.wedge(s)
}

fn interior(x: &[f64], s: &FormValue) -> Result<FormValue> {
    if s.degree == 0 || s.comps.is_empty() {
        return Ok(zero_form(s.dim, s.degree.saturating_sub(1)));
    }
    s.interior(x)
}

fn truncated(f: &Form<Jet>, order: usize) -> Form<Jet> {
    f.truncate(order)
}

fn codiff(nabla: &[Form<Jet>], ginv: &[Jet], n: usize, degree: usize) -> Result<Form<Jet>> {
    if degree == 0 || degree > n {
        let order = ginv[0].order();
        return Ok(Form {
            dim: n,
            degree: degree.saturating_sub(1),
            comps: vec![Jet::constant(n, order, 0.0); binomial(n, degree.saturating_sub(1))],
        });
    }
    codifferential_from(nabla, ginv)
}

/// Evaluate every identity from order-2 jets.
pub fn point_residuals(j: &CandidateJets, k: usize, lambda: f64) -> Result<PointResiduals> {
    let geo = &j.geometry;
    let n = geo.dim;
    let kf = k as f64;
    let m = (n + 1 - k) as f64;
    let g = geo.metric_values();
    let ginv = geo.inverse_values();
    let ginv1: Vec<Jet> = geo.ginv.iter().map(|v| v.truncate(1)).collect();
    let frame = linalg::orthonormal_frame(&g, n)?;

    let gamma = &j.gamma;
    let beta = &j.beta;
    let nabla_gamma = gamma.covariant_derivatives(geo); // order 1
    let dgamma = gamma.exterior_derivative(); // order 1
    let nabla_dgamma = dgamma.covariant_derivatives(geo); // order 0
    let nabla_beta = beta.covariant_derivatives(geo); // order 1
    let codiff_beta = codiff(&nabla_beta, &ginv1, n, beta.degree)?; // order 1
    let nabla_codiff_beta = codiff_beta.covariant_derivatives(geo); // order 0
    let nabla_gamma_v: Vec<FormValue> = nabla_gamma.iter().map(Form::values).collect();
    let codiff_gamma = if gamma.degree == 0 {
        zero_form(n, 0)
    } else {
        codifferential_from(&nabla_gamma_v, &ginv)?
    };
    let dbeta = if beta.degree < n { truncated(beta, 1).exterior_derivative().values() } else { zero_form(n, n + 1) };

    let gv = gamma.values();
    let bv = beta.values();
    let dgv = dgamma.values();
    let cbv = codiff_beta.values();

    let (mut r1, mut r2, mut r3, mut r4, mut ng): (f64, f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let dir = |forms: &[Form<Jet>], x: &[f64]| -> FormValue {
        let mut out = forms[0].values().scaled(x[0]);
        for a in 1..n {
            out = out.plus(&forms[a].values().scaled(x[a]));
        }
        out
    };
    for i in 0..n {
        let x: Vec<f64> = (0..n).map(|a| frame[(a, i)]).collect();
        let xf = Form::flat(&x, &g);
        let ng_i = dir(&nabla_gamma, &x);
        ng = ng.max(norm(&ng_i, &ginv));
        // (i)
        let d1 = ng_i.minus(&interior(&x, &dgv)?.scaled(1.0 / kf));
        r1 = r1.max(norm(&d1, &ginv));
        // (ii)
        if !dgv.comps.is_empty() {
            let d2 = dir(&nabla_dgamma, &x).plus(&wedge_flat(&xf, &gv)?.scaled(kf * lambda * lambda));
            r2 = r2.max(norm(&d2, &ginv));
        }
        // (iii) and (iv) are vacuous when n − k + 1 = 0
        if m > 0.0 {
            let d3 = dir(&nabla_beta, &x).plus(&wedge_flat(&xf, &cbv)?.scaled(1.0 / m));
            r3 = r3.max(norm(&d3, &ginv));
            let d4 = dir(&nabla_codiff_beta, &x).minus(&interior(&x, &bv)?.scaled(m * lambda * lambda));
            r4 = r4.max(norm(&d4, &ginv));
        }
    }
    let rel1 = if dgv.comps.is_empty() { 0.0 } else { norm(&dgv.plus(&bv.scaled(kf * lambda)), &ginv) };
    let rel2 = norm(&cbv.plus(&gv.scaled(m * lambda)), &ginv);
    Ok(PointResiduals {
        values: vec![
            (Identity::GammaKilling, r1),
            (Identity::DGammaEigen, r2),
            (Identity::BetaConformal, r3),
            (Identity::CodiffBetaEigen, r4),
            (Identity::BetaClosed, norm(&dbeta, &ginv)),
            (Identity::GammaCoclosed, norm(&codiff_gamma, &ginv)),
            (Identity::RelationDGamma, rel1),
            (Identity::RelationCodiffBeta, rel2),
        ],
        gamma_norm: norm(&gv, &ginv),
        beta_norm: norm(&bv, &ginv),
        nabla_gamma_norm: ng,
    })
}

/// Status of a candidate over a sample.
#[derive(Clone, Debug, PartialEq)]
pub enum Degeneracy {
    /// Both forms are nontrivial somewhere on the sample.
    None,
    GammaVanishes,
    BetaVanishes,
}

impl Degeneracy {
    pub fn is_degenerate(&self) -> bool {
        !matches!(self, Degeneracy::None)
    }

    pub fn reason(&self) -> Option<&'static str> {
        match self {
            Degeneracy::None => None,
            Degeneracy::GammaVanishes => Some("γ vanishes on every sample (σ has the normal in its kernel)"),
            Degeneracy::BetaVanishes => Some("β vanishes on every sample"),
        }
    }
}

/// Summaries of all identities over a sample.
#[derive(Clone, Debug, PartialEq)]
pub struct KillingResiduals {
    pub identities: Vec<(Identity, ResidualSummary)>,
    pub degeneracy: Degeneracy,
    pub gamma_norm_max: f64,
    pub beta_norm_max: f64,
    pub nabla_gamma_max: f64,
    /// Sample point realizing `nabla_gamma_max`.
    pub witness: Vec<f64>,
}

impl KillingResiduals {
    pub fn get(&self, id: Identity) -> ResidualSummary {
        self.identities
            .iter()
            .find(|(i, _)| *i == id)
            .map(|(_, s)| *s)
            .unwrap_or_default()
    }

    /// Largest residual over the given identities.
    pub fn max_over(&self, ids: &[Identity]) -> f64 {
        ids.iter().map(|&i| self.get(i).max).fold(0.0, f64::max)
    }

    /// All identities pass and the candidate is not degenerate.
    pub fn passes(&self, tolerance: f64) -> bool {
        !self.degeneracy.is_degenerate() && self.identities.iter().all(|(_, s)| s.passes(tolerance))
    }
}

/// Evaluate every identity over `sample`.
pub fn evaluate(c: &KillingCandidate, sample: &[Vec<f64>]) -> Result<KillingResiduals> {
    let mut acc: Vec<(Identity, ResidualAccumulator)> =
        Identity::ALL.iter().map(|&i| (i, ResidualAccumulator::default())).collect();
    let (mut gmax, mut bmax, mut nmax): (f64, f64, f64) = (0.0, 0.0, -1.0);
    let mut witness = Vec::new();
    for x in sample {
        let p = c.point_residuals(x)?;
        for (id, v) in &p.values {
            if let Some(slot) = acc.iter_mut().find(|(i, _)| i == id) {
                slot.1.push(*v);
            }
        }
        gmax = gmax.max(p.gamma_norm);
        bmax = bmax.max(p.beta_norm);
        if p.nabla_gamma_norm > nmax {
            nmax = p.nabla_gamma_norm;
            witness = x.clone();
        }
    }
    let degeneracy = if gmax < ZERO_FORM_TOLERANCE {
        Degeneracy::GammaVanishes
    } else if bmax < ZERO_FORM_TOLERANCE && c.k <= c.dim() {
        Degeneracy::BetaVanishes
    } else {
        Degeneracy::None
    };
    Ok(KillingResiduals {
        identities: acc.into_iter().map(|(i, a)| (i, a.finish())).collect(),
        degeneracy,
        gamma_norm_max: gmax,
        beta_norm_max: bmax,
        nabla_gamma_max: nmax.max(0.0),
        witness,
    })
}

/// The four special Killing identities plus closedness of `β` and
/// coclosedness of `γ`.
pub fn special_killing_residuals(c: &KillingCandidate, sample: &[Vec<f64>]) -> Result<KillingResiduals> {
    let mut r = evaluate(c, sample)?;
    r.identities
        .retain(|(i, _)| !matches!(i, Identity::RelationDGamma | Identity::RelationCodiffBeta));
    Ok(r)
}

/// Both relations `dγ = −kλβ` and `d*β = −(n−k+1)λγ`, merged.
pub fn relation_check(c: &KillingCandidate, sample: &[Vec<f64>]) -> Result<ResidualSummary> {
    let r = evaluate(c, sample)?;
    Ok(r.get(Identity::RelationDGamma).merge(&r.get(Identity::RelationCodiffBeta)))
}

/// Outcome of [`non_parallel_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct NonParallel {
    pub non_parallel: bool,
    pub max_nabla: f64,
    pub witness: Vec<f64>,
}

/// Whether `∇γ` exceeds [`NON_PARALLEL_THRESHOLD`] somewhere on the sample.
pub fn non_parallel_check(c: &KillingCandidate, sample: &[Vec<f64>]) -> Result<NonParallel> {
    let r = evaluate(c, sample)?;
    if r.gamma_norm_max < ZERO_FORM_TOLERANCE {
        return Err(GeomError::Degenerate(format!("γ vanishes on the sample of {}", c.label)));
    }
    Ok(NonParallel {
        non_parallel: r.nabla_gamma_max > NON_PARALLEL_THRESHOLD,
        max_nabla: r.nabla_gamma_max,
        witness: r.witness,
    })
}

/// Embed a form on the base chart into the cone chart `(u, t)` without
/// changing its components (pullback along the projection).
fn base_form_on_cone(psi: &Form<Jet>, n: usize) -> Form<Jet> {
    let m = n + 1;
    let order = psi.comps.first().map_or(0, Jet::order);
    let map: Vec<usize> = (0..n).collect();
    let mut out = Form {
        dim: m,
        degree: psi.degree,
        comps: vec![Jet::constant(m, order, 0.0); binomial(m, psi.degree)],
    };
    for (i, idx) in combinations(n, psi.degree).iter().enumerate() {
        out.comps[multi_index_rank(m, idx)] = psi.comps[i].reindex(m, &map);
    }
    out
}

/// `ψ̃ = (1/k) d(t^k ψ)` on the cone chart `(u, t)` over `cone`.
pub fn cone_lift(psi: &FormField, k: usize, cone: &MetricField) -> Result<FormField> {
    let n = psi.dim();
    if psi.degree + 1 != k {
        return Err(GeomError::InvalidParameter(format!(
            "cone lift: k = {k} but deg ψ = {}",
            psi.degree
        )));
    }
    if cone.dim != n + 1 {
        return Err(GeomError::DimensionMismatch { expected: n + 1, got: cone.dim });
    }
    let m = n + 1;
    let src = psi.clone();
    let comps = Field::from_point_fn(m, binomial(m, k), move |x, order| {
        if order >= crate::jet::MAX_ORDER {
            return Err(GeomError::InvalidOrder(order + 1));
        }
        let p = base_form_on_cone(&src.eval(&x[..n], order + 1)?, n);
        let t = Jet::variable(m, order + 1, n, x[n]);
        let tk = t.powi(k as i32)?;
        Ok(p.times(&tk).exterior_derivative().scaled(1.0 / k as f64).comps)
    });
    FormField::new(format!("lift({})", psi.label), cone.clone(), k, comps)
}

/// `t^{k−1} dt∧ψ + (1/k) t^k dψ` at one cone point, from `ψ` and `dψ`
/// directly (second route for [`cone_lift`]).
pub fn cone_lift_expanded(psi: &FormField, k: usize, x: &[f64]) -> Result<FormValue> {
    let n = psi.dim();
    let m = n + 1;
    let t = x[n];
    let p = psi.eval(&x[..n], 1)?;
    let dpsi = base_form_on_cone(&p.exterior_derivative(), n).values();
    let pv = base_form_on_cone(&p.truncate(0), n).values();
    let mut dt = zero_form(m, 1);
    dt.comps[n] = 1.0;
    let first = wedge_flat(&dt, &pv)?.scaled(libm::pow(t, k as f64 - 1.0));
    let second = if dpsi.comps.is_empty() {
        zero_form(m, k)
    } else {
        dpsi.scaled(libm::pow(t, k as f64) / k as f64)
    };
    Ok(first.plus(&second))
}

/// `max_i ‖∇_{e_i} σ‖_g` over an orthonormal frame, summarized over samples.
pub fn parallel_residual(sigma: &FormField, sample: &[Vec<f64>]) -> Result<ResidualSummary> {
    let n = sigma.dim();
    let mut acc = ResidualAccumulator::default();
    for x in sample {
        let g = sigma.metric.metric_values(x)?;
        let ginv = linalg::inverse(&g, n)?;
        let frame = linalg::orthonormal_frame(&g, n)?;
        let nabla = sigma.covariant_derivatives(x)?;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let mut d = nabla[0].scaled(frame[(0, i)]);
            for a in 1..n {
                d = d.plus(&nabla[a].scaled(frame[(a, i)]));
            }
            worst = worst.max(norm(&d, &ginv));
        }
        acc.push(worst);
    }
    Ok(acc.finish())
}

/// Pull a constant ambient form back through a map field at a point.
pub fn pullback_constant(sigma: &FormValue, map: &Field, x: &[f64]) -> Result<FormValue> {
    let src = map.dim();
    let jets = map.eval(x, 1)?;
    let jac: Vec<f64> = (0..jets.len() * src).map(|i| jets[i / src].d1(i % src)).collect();
    Ok(sigma.pullback(&jac, src))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::zoo;

    fn flat(n: usize) -> MetricField {
        let mut id = vec![0.0; n * n];
        for i in 0..n {
            id[i * n + i] = 1.0;
        }
        MetricField::new("flat", ChartDomain::ball(n, 3.0), Field::constant(n, id)).unwrap()
    }

    #[test]
    fn degree_mismatch_is_rejected() {
        let m = flat(2);
        let g = FormField::constant("g", m.clone(), 1, vec![1.0, 0.0]).unwrap();
        let b = FormField::constant("b", m, 1, vec![1.0, 0.0]).unwrap();
        assert!(KillingCandidate::from_fields(g, b, 2, 1.0).is_err());
    }

    #[test]
    fn sphere_two_form_in_r3() {
        let s = zoo::build_str("euclidean(n=3)").unwrap();
        let e = &s.embeddings[0].embedding;
        let sigma = FormField::constant("dx0^dx1", s.metric.clone(), 2, vec![1.0, 0.0, 0.0]).unwrap();
        let c = KillingCandidate::from_embedding(e, &sigma).unwrap();
        assert!((c.lambda - 1.0).abs() < 1e-12);
        let sample = e.domain.sample(5, 1);
        let r = evaluate(&c, &sample).unwrap();
        assert!(r.passes(1e-9), "{r:?}");
        let flipped = KillingCandidate::from_embedding(&e.flipped(), &sigma).unwrap();
        assert!(evaluate(&flipped, &sample).unwrap().passes(1e-9));
    }

    #[test]
    fn radial_kernel_is_degenerate() {
        // N = ±∂_2 on the plane x_2 = 0, so N⌟(dx0∧dx1) = 0
        let s = zoo::build_str("euclidean(n=3)").unwrap();
        let e = &s.embeddings[1].embedding;
        let sigma = FormField::constant("dx0^dx1", s.metric.clone(), 2, vec![1.0, 0.0, 0.0]).unwrap();
        let c = KillingCandidate::from_embedding(e, &sigma).unwrap();
        let r = evaluate(&c, &e.domain.sample(4, 2)).unwrap();
        assert_eq!(r.degeneracy, Degeneracy::GammaVanishes);
        assert!(!r.passes(1.0));
    }
}
