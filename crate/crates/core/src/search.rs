//! Derivative-free search for totally umbilical hypersurfaces inside
//! normal-graph families `x_θ(u) = x(u) + f_θ(u) N(u)`, `f_θ = Σ θ_i b_i`,
//! with Gaussian bumps `b_i` on the hypersurface chart.
//!
//! The objective is `mean(|Å|²) + var(λ)` over a fixed sample of chart
//! points. It is minimised with a Nelder–Mead simplex (reflection 1,
//! expansion 2, contraction 0.5, shrink 0.5) from a seeded random start.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_4;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GeomError, Result};
use crate::field::{halton, ChartDomain, Field};
use crate::hypersurface::{Embedding, HypersurfaceJets, NormalFrame};
use crate::jet::Jet;
use crate::linalg;
use crate::riemann::MetricField;
use crate::zoo::{self, inverse_stereographic};

/// Smallest admissible singular value of the differential of a family member.
pub const IMMERSION_SIGMA_MIN: f64 = 1e-3;

/// Objective value returned when a member fails to be an immersion.
pub const PENALTY: f64 = 1e6;

/// Largest supported number of family parameters.
pub const MAX_PARAMS: usize = 32;

/// Smallest supported evaluation budget.
pub const MIN_BUDGET: usize = 100;

pub const REFLECT: f64 = 1.0;
pub const EXPAND: f64 = 2.0;
pub const CONTRACT: f64 = 0.5;
pub const SHRINK: f64 = 0.5;

/// Radius of the chart ball holding samples and bump centres.
const SAMPLE_RADIUS: f64 = 1.5;
const CENTRE_RADIUS: f64 = 1.2;
const BUMP_WIDTH: f64 = 0.6;

/// Geodesic radius of the base sphere of the `CP²` probe (`|z| = tan ρ`).
pub const CP2_PROBE_RHO: f64 = FRAC_PI_4;

pub const FAMILY_NAMES: [&str; 3] = ["s3-in-r4", "equator-in-s4", "cp2-probe"];

/// A normal-graph family over a base embedding.
#[derive(Clone, Debug)]
pub struct HypersurfaceFamily {
    pub name: String,
    pub base: Embedding,
    /// Scalar fields (one component each) on the base chart.
    pub perturbation_basis: Vec<Field>,
    pub trust_radius: f64,
    /// Results carry no pass/fail meaning.
    pub exploratory: bool,
    pub samples: Vec<Vec<f64>>,
    cache: Vec<SampleCache>,
}

/// θ-independent jets at one sample point.
#[derive(Clone, Debug)]
struct SampleCache {
    u: Vec<f64>,
    x: Vec<Jet>,
    normal: Vec<Jet>,
    basis: Vec<Jet>,
}

/// Gaussian bump `exp(−|u − c|²/(2w²))`.
pub fn gaussian_bump(centre: Vec<f64>, width: f64) -> Field {
    let n = centre.len();
    let s = -0.5 / (width * width);
    Field::from_jet_map(n, 1, move |u| {
        let mut r2 = Jet::constant(n, u[0].order(), 0.0);
        for (ui, ci) in u.iter().zip(&centre) {
            let d = ui.add_scalar(-ci);
            r2 += &d * &d;
        }
        Ok(vec![r2.scale(s).exp()])
    })
}

/// `count` bumps centred on Halton points of the ball of radius `radius`.
pub fn bump_basis(dim: usize, count: usize, radius: f64, width: f64) -> Vec<Field> {
    let mut out = Vec::with_capacity(count);
    let mut index = 1u64;
    while out.len() < count {
        let c: Vec<f64> = halton(index, dim).iter().map(|t| radius * (2.0 * t - 1.0)).collect();
        index += 1;
        if c.iter().map(|v| v * v).sum::<f64>() < radius * radius {
            out.push(gaussian_bump(c, width));
        }
    }
    out
}

impl HypersurfaceFamily {
    pub fn new(
        name: impl Into<String>,
        base: Embedding,
        perturbation_basis: Vec<Field>,
        samples: Vec<Vec<f64>>,
        trust_radius: f64,
        exploratory: bool,
    ) -> Result<Self> {
        let n = base.intrinsic_dim;
        if perturbation_basis.is_empty() || perturbation_basis.len() > MAX_PARAMS {
            return Err(GeomError::InvalidParameter(format!(
                "param_dim must lie in 1..={MAX_PARAMS}, got {}",
                perturbation_basis.len()
            )));
        }
        if perturbation_basis.iter().any(|b| b.dim() != n || b.len() != 1) {
            return Err(GeomError::InvalidParameter("basis fields must be scalar fields on the base chart".into()));
        }
        if samples.len() < 2 {
            return Err(GeomError::InvalidParameter("at least two sample points are needed".into()));
        }
        if !(trust_radius > 0.0) {
            return Err(GeomError::InvalidParameter(format!("trust radius must be positive, got {trust_radius}")));
        }
        let mut cache = Vec::with_capacity(samples.len());
        for u in &samples {
            let x3 = base.map_jets(u, 3)?;
            let frame = NormalFrame::from_map_jets(&base.ambient, u, &x3, base.orientation)?;
            let basis = perturbation_basis
                .iter()
                .map(|b| Ok(b.eval(u, 2)?.remove(0)))
                .collect::<Result<Vec<_>>>()?;
            cache.push(SampleCache {
                u: u.clone(),
                x: x3.iter().map(|v| v.truncate(2)).collect(),
                normal: frame.normal,
                basis,
            });
        }
        Ok(HypersurfaceFamily {
            name: name.into(),
            base,
            perturbation_basis,
            trust_radius,
            exploratory,
            samples,
            cache,
        })
    }

    pub fn param_dim(&self) -> usize {
        self.perturbation_basis.len()
    }

    /// Built-in family by name, with `param_dim` bumps and `samples` points.
    pub fn by_name(name: &str, param_dim: usize, samples: usize, trust_radius: f64) -> Result<Self> {
        let (base, exploratory) = match name {
            "s3-in-r4" => (unit_sphere_base()?, false),
            "equator-in-s4" => (equator_base()?, false),
            "cp2-probe" => (cp2_sphere_base(CP2_PROBE_RHO)?, true),
            other => {
                return Err(GeomError::InvalidParameter(format!(
                    "unknown family `{other}` (expected one of {FAMILY_NAMES:?})"
                )))
            }
        };
        if param_dim == 0 || param_dim > MAX_PARAMS {
            return Err(GeomError::InvalidParameter(format!(
                "param_dim must lie in 1..={MAX_PARAMS}, got {param_dim}"
            )));
        }
        let n = base.intrinsic_dim;
        let basis = bump_basis(n, param_dim, CENTRE_RADIUS, BUMP_WIDTH);
        let pts = ChartDomain::ball(n, SAMPLE_RADIUS).sample(samples, 0);
        HypersurfaceFamily::new(name, base, basis, pts, trust_radius, exploratory)
    }

    /// The member `x_θ` as an embedding (jets up to order 2).
    pub fn member(&self, params: &[f64]) -> Result<Embedding> {
        self.check_params(params)?;
        let base = self.base.clone();
        let basis = self.perturbation_basis.clone();
        let theta = params.to_vec();
        let n = base.intrinsic_dim;
        let map = Field::from_point_fn(n, n + 1, move |u, order| {
            if order >= crate::jet::MAX_ORDER {
                return Err(GeomError::InvalidOrder(order + 1));
            }
            let x = base.map.eval(u, order + 1)?;
            let frame = NormalFrame::from_map_jets(&base.ambient, u, &x, base.orientation)?;
            let mut f = Jet::constant(n, order, 0.0);
            for (t, b) in theta.iter().zip(&basis) {
                f += b.eval(u, order)?[0].scale(*t);
            }
            Ok(x.iter()
                .zip(&frame.normal)
                .map(|(xm, nm)| xm.truncate(order) + f.mul_jet(nm))
                .collect())
        });
        Embedding::new(
            format!("{} member", self.name),
            self.base.domain.clone(),
            self.base.ambient.clone(),
            map,
            self.base.orientation,
        )
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_dim() {
            return Err(GeomError::DimensionMismatch {
                expected: self.param_dim(),
                got: params.len(),
            });
        }
        let norm = libm::sqrt(params.iter().map(|t| t * t).sum::<f64>());
        if !(norm <= self.trust_radius) {
            return Err(GeomError::InvalidParameter(format!(
                "‖θ‖ = {norm} exceeds the trust radius {}",
                self.trust_radius
            )));
        }
        Ok(())
    }

    fn member_jets(&self, c: &SampleCache, params: &[f64]) -> Result<HypersurfaceJets> {
        let n = self.base.intrinsic_dim;
        let mut f = Jet::constant(n, 2, 0.0);
        for (t, b) in params.iter().zip(&c.basis) {
            f += b.scale(*t);
        }
        let x: Vec<Jet> = c.x.iter().zip(&c.normal).map(|(xm, nm)| xm + &f.mul_jet(nm)).collect();
        HypersurfaceJets::from_map_jets(&self.base.ambient, &c.u, x, self.base.orientation)
    }

    /// `mean(|Å|²) + var(λ)` over the family's sample points.
    pub fn objective(&self, params: &[f64]) -> Result<ObjectiveValue> {
        self.check_params(params)?;
        let m = self.cache.len();
        let mut umb2 = 0.0;
        let mut lambdas = Vec::with_capacity(m);
        for (i, c) in self.cache.iter().enumerate() {
            let h = match self.member_jets(c, params) {
                Ok(h) => h,
                Err(GeomError::RankDeficient { sigma_min, .. }) => {
                    return Ok(ObjectiveValue::failure(i, sigma_min, false));
                }
                Err(GeomError::OutsideDomain { .. }) => {
                    return Ok(ObjectiveValue::failure(i, f64::NAN, true));
                }
                Err(e) => return Err(e),
            };
            let g = h.induced_metric_values();
            let sigma_min = libm::sqrt(linalg::symmetric_eigenvalues(&g, h.n())[0].max(0.0));
            if !(sigma_min > IMMERSION_SIGMA_MIN) {
                return Ok(ObjectiveValue::failure(i, sigma_min, false));
            }
            let u = h.umbilicity()?;
            umb2 += u * u;
            lambdas.push(h.lambda.value());
        }
        let mean = lambdas.iter().sum::<f64>() / m as f64;
        let var = lambdas.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / (m - 1) as f64;
        let umbilic_term = umb2 / m as f64;
        Ok(ObjectiveValue {
            total: umbilic_term + var,
            umbilic_term,
            lambda_variance: var,
            lambda_mean: mean,
            immersion_failure: None,
        })
    }
}

/// Unit `S³ ⊂ ℝ⁴` in the stereographic chart.
fn unit_sphere_base() -> Result<Embedding> {
    let spec = zoo::build_str("euclidean(n=4)")?;
    named_embedding(&spec, "unit_sphere")
}

/// Equator of the unit `S⁴` (geodesic sphere of radius `π/2`).
fn equator_base() -> Result<Embedding> {
    let spec = zoo::build_str("round_sphere(n=4)")?;
    named_embedding(&spec, "geodesic_sphere_pi_2")
}

fn named_embedding(spec: &zoo::ManifoldSpec, name: &str) -> Result<Embedding> {
    spec.embeddings
        .iter()
        .find(|e| e.name == name)
        .map(|e| e.embedding.clone())
        .ok_or_else(|| GeomError::Unsupported(format!("{} has no embedding `{name}`", spec.label)))
}

/// Geodesic sphere `|z| = tan ρ` about the origin of the affine chart of `CP²`.
pub fn cp2_sphere_base(rho: f64) -> Result<Embedding> {
    if !(rho > 0.0 && rho < 1.2) {
        return Err(GeomError::InvalidParameter(format!("geodesic radius {rho} outside (0, 1.2)")));
    }
    let ambient: MetricField = zoo::fubini_study_metric(3.0)?;
    let t = libm::tan(rho);
    let map = Field::from_jet_map(3, 4, move |v| Ok(inverse_stereographic(v)?.iter().map(|x| x.scale(t)).collect()));
    Embedding::new(format!("CP² geodesic sphere ρ={rho:.6}"), ChartDomain::ball(3, 2.0), ambient, map, 1)
}

/// Where and how a member failed to be an immersion.
#[derive(Clone, Debug, PartialEq)]
pub struct ImmersionFailure {
    pub sample: usize,
    /// `NaN` when the member left the ambient chart.
    pub sigma_min: f64,
    pub outside_ambient: bool,
}

/// Objective together with its two terms.
#[derive(Clone, Debug, PartialEq)]
pub struct ObjectiveValue {
    pub total: f64,
    pub umbilic_term: f64,
    pub lambda_variance: f64,
    pub lambda_mean: f64,
    pub immersion_failure: Option<ImmersionFailure>,
}

impl ObjectiveValue {
    fn failure(sample: usize, sigma_min: f64, outside_ambient: bool) -> Self {
        ObjectiveValue {
            total: PENALTY,
            umbilic_term: f64::NAN,
            lambda_variance: f64::NAN,
            lambda_mean: f64::NAN,
            immersion_failure: Some(ImmersionFailure {
                sample,
                sigma_min,
                outside_ambient,
            }),
        }
    }
}

/// Optimizer settings.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub family: String,
    pub param_dim: usize,
    pub budget: usize,
    pub seed: u64,
    /// Objective below which the verdict is `converged_to_umbilical`.
    pub converge_threshold: f64,
    pub trust_radius: f64,
    /// `‖θ‖` of the random start.
    pub start_norm: f64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    pub samples: usize,
}

impl SearchConfig {
    pub fn new(family: impl Into<String>, param_dim: usize) -> Self {
        SearchConfig {
            family: family.into(),
            param_dim,
            budget: 2000,
            seed: 1,
            converge_threshold: 1e-6,
            trust_radius: 1.0,
            start_norm: 0.2,
            initial_step: 0.05,
            samples: 24,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.param_dim == 0 || self.param_dim > MAX_PARAMS {
            return Err(GeomError::InvalidParameter(format!(
                "param_dim must lie in 1..={MAX_PARAMS}, got {}",
                self.param_dim
            )));
        }
        if self.budget < MIN_BUDGET {
            return Err(GeomError::InvalidParameter(format!(
                "budget must be at least {MIN_BUDGET}, got {}",
                self.budget
            )));
        }
        let positive = [
            ("converge_threshold", self.converge_threshold),
            ("trust_radius", self.trust_radius),
            ("initial_step", self.initial_step),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(GeomError::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.start_norm >= 0.0 && self.start_norm < self.trust_radius) {
            return Err(GeomError::InvalidParameter(format!(
                "start_norm must lie in [0, trust_radius), got {}",
                self.start_norm
            )));
        }
        if self.samples < 2 {
            return Err(GeomError::InvalidParameter("samples must be at least 2".into()));
        }
        Ok(())
    }

    /// Seeded start point with `‖θ‖ = start_norm`.
    pub fn start_point(&self) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        loop {
            let v: Vec<f64> = (0..self.param_dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = libm::sqrt(v.iter().map(|t| t * t).sum::<f64>());
            if norm > 1e-3 {
                return v.iter().map(|t| t * self.start_norm / norm).collect();
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    ConvergedToUmbilical,
    StalledAboveFloor,
    ImmersionFailure,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::ConvergedToUmbilical => "converged_to_umbilical",
            Verdict::StalledAboveFloor => "stalled_above_floor",
            Verdict::ImmersionFailure => "immersion_failure",
        }
    }
}

impl core::fmt::Display for Verdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub family: String,
    pub exploratory: bool,
    pub best_params: Vec<f64>,
    pub best_objective: f64,
    pub best_terms: ObjectiveValue,
    pub evaluations: usize,
    /// Best objective after each simplex iteration (entry 0: initial simplex).
    pub trace: Vec<f64>,
    pub immersion_failures: usize,
    pub budget_exhausted: bool,
    pub verdict: Verdict,
}

/// Outcome of a raw simplex run.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexRun {
    pub best: Vec<f64>,
    pub best_value: f64,
    pub evaluations: usize,
    pub trace: Vec<f64>,
    pub budget_exhausted: bool,
}

/// Nelder–Mead minimisation of `f` from `x0` with an axis-aligned initial
/// simplex of edge `step`. Stops when the budget is spent or the simplex has
/// collapsed in both value (`ftol`) and extent (`xtol`).
pub fn nelder_mead<F>(mut f: F, x0: &[f64], step: f64, budget: usize, ftol: f64, xtol: f64) -> SimplexRun
where
    F: FnMut(&[f64]) -> f64,
{
    let d = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let v0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    let sort = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    sort(&mut simplex);
    let mut trace = vec![simplex[0].1];
    let blend = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p + t * (q - p)).collect() };
    let mut exhausted = false;
    loop {
        let spread = simplex[d].1 - simplex[0].1;
        let extent = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| libm::fabs(a - b)).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread <= ftol && extent <= xtol {
            break;
        }
        if evals + 2 > budget {
            exhausted = true;
            break;
        }
        let mut centroid = vec![0.0; d];
        for (x, _) in &simplex[..d] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / d as f64;
            }
        }
        let worst = simplex[d].clone();
        let xr = blend(&centroid, &worst.0, -REFLECT);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = blend(&centroid, &xr, EXPAND);
            let fe = eval(&xe, &mut evals);
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let xc = blend(&centroid, &xr, CONTRACT);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = blend(&centroid, &worst.0, CONTRACT);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            };
            if fc < fr.min(worst.1) {
                simplex[d] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for i in 1..=d {
                    if evals >= budget {
                        exhausted = true;
                        break;
                    }
                    let x = blend(&best, &simplex[i].0, SHRINK);
                    let v = eval(&x, &mut evals);
                    simplex[i] = (x, v);
                }
            }
        }
        sort(&mut simplex);
        trace.push(simplex[0].1);
        if exhausted {
            break;
        }
    }
    SimplexRun {
        best: simplex[0].0.clone(),
        best_value: simplex[0].1,
        evaluations: evals,
        trace,
        budget_exhausted: exhausted,
    }
}

/// Objective value below which the simplex is considered collapsed.
const SIMPLEX_FTOL: f64 = 1e-20;
const SIMPLEX_XTOL: f64 = 1e-10;

/// Run the configured search on its built-in family.
pub fn run(config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    let family = HypersurfaceFamily::by_name(&config.family, config.param_dim, config.samples, config.trust_radius)?;
    optimize(&family, config)
}

/// Minimise the family objective from the configured start.
pub fn optimize(family: &HypersurfaceFamily, config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    if config.param_dim != family.param_dim() {
        return Err(GeomError::DimensionMismatch {
            expected: family.param_dim(),
            got: config.param_dim,
        });
    }
    let x0 = config.start_point();
    let mut failures = 0usize;
    let mut error = None;
    let run = nelder_mead(
        |x| {
            let norm = libm::sqrt(x.iter().map(|t| t * t).sum::<f64>());
            if norm > family.trust_radius {
                return PENALTY;
            }
            match family.objective(x) {
                Ok(v) => {
                    if v.immersion_failure.is_some() {
                        failures += 1;
                    }
                    v.total
                }
                Err(e) => {
                    error.get_or_insert(e);
                    PENALTY
                }
            }
        },
        &x0,
        config.initial_step,
        config.budget,
        SIMPLEX_FTOL,
        SIMPLEX_XTOL,
    );
    if let Some(e) = error {
        return Err(e);
    }
    let best_terms = family.objective(&run.best)?;
    let verdict = if run.best_value >= PENALTY {
        Verdict::ImmersionFailure
    } else if run.best_value < config.converge_threshold {
        Verdict::ConvergedToUmbilical
    } else {
        Verdict::StalledAboveFloor
    };
    Ok(SearchResult {
        family: family.name.clone(),
        exploratory: family.exploratory,
        best_params: run.best,
        best_objective: run.best_value,
        best_terms,
        evaluations: run.evaluations,
        trace: run.trace,
        immersion_failures: failures,
        budget_exhausted: run.budget_exhausted,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_minimises_a_quadratic() {
        let r = nelder_mead(
            |x| (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 0.5).powi(2),
            &[0.0, 0.0],
            0.1,
            1000,
            1e-20,
            1e-10,
        );
        assert!(r.best_value < 1e-12);
        assert!((r.best[0] - 1.0).abs() < 1e-6);
        assert!(r.evaluations <= 1000);
        assert_eq!(*r.trace.last().unwrap(), r.best_value);
    }

    #[test]
    fn simplex_respects_budget() {
        let r = nelder_mead(|x| x.iter().map(|v| v * v).sum(), &[1.0; 6], 0.1, 100, 0.0, 0.0);
        assert!(r.budget_exhausted);
        assert!(r.evaluations <= 100);
    }

    #[test]
    fn trace_is_monotone() {
        let r = nelder_mead(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            0.1,
            3000,
            1e-20,
            1e-12,
        );
        assert!(r.trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(r.best_value < 1e-8);
    }

    #[test]
    fn config_validation() {
        let mut c = SearchConfig::new("s3-in-r4", 8);
        assert!(c.validate().is_ok());
        c.budget = 50;
        assert!(c.validate().is_err());
        let mut c = SearchConfig::new("s3-in-r4", 33);
        assert!(c.validate().is_err());
        c.param_dim = 4;
        c.start_norm = 2.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn start_point_has_requested_norm_and_is_seeded() {
        let c = SearchConfig::new("s3-in-r4", 8);
        let p = c.start_point();
        let n = libm::sqrt(p.iter().map(|t| t * t).sum::<f64>());
        assert!((n - 0.2).abs() < 1e-15);
        assert_eq!(p, c.start_point());
        let mut d = c.clone();
        d.seed = 2;
        assert_ne!(p, d.start_point());
    }
}
