//! Verification suites, holonomy estimation and searches behind the CLI
//! commands.

use clap::ValueEnum;
use umbilic_core::cones::cone_metric;
use umbilic_core::field::DEFAULT_SEED;
use umbilic_core::holonomy::{default_loops, estimate_holonomy, DEFAULT_STEPS};
use umbilic_core::hypersurface::{
    codazzi_residual, einstein_lambda_check, gauss_residual, second_fundamental_form, umbilicity_residual,
};
use umbilic_core::killing::{cone_lift, evaluate, parallel_residual, KillingCandidate};
use umbilic_core::residual::{ResidualAccumulator, ResidualSummary};
use umbilic_core::search::{self, SearchConfig};
use umbilic_core::zoo::{self, CanonicalEmbedding, IntrinsicCandidate, ManifoldRequest, ManifoldSpec};
use umbilic_core::{GeomError, Result as GeomResult};

use crate::error::CliError;
use crate::input::ManifoldSpecFile;
use crate::report::{
    Environment, FixedFormsReport, HolonomyReport, ResidualRow, SearchReport, VerificationReport,
};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_SAMPLES: usize = 20;

/// Radial range of cones built for the cone suite.
const SUITE_CONE_RANGE: (f64, f64) = (0.5, 2.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Fundamental,
    Killing,
    Cone,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Fundamental => "fundamental",
            Suite::Killing => "killing",
            Suite::Cone => "cone",
            Suite::All => "all",
        }
    }
}

/// Command-line overrides of the run settings.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub tolerance: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

impl Overrides {
    /// Flags beat spec-file values, which beat built-in defaults.
    pub fn environment(&self, file: Option<&ManifoldSpecFile>) -> Result<Environment, CliError> {
        let mut overrides = Vec::new();
        let mut pick = |name: &str, flag: Option<String>, from_file: Option<String>| {
            if let Some(v) = flag {
                overrides.push(format!("{name}={v}"));
            } else if let Some(v) = from_file {
                overrides.push(format!("{name}={v} (spec file)"));
            }
        };
        pick("tolerance", self.tolerance.map(|v| v.to_string()), file.and_then(|f| f.tolerance).map(|v| v.to_string()));
        pick("samples", self.samples.map(|v| v.to_string()), file.and_then(|f| f.samples).map(|v| v.to_string()));
        pick("seed", self.seed.map(|v| v.to_string()), file.and_then(|f| f.seed).map(|v| v.to_string()));
        let tolerance = self.tolerance.or(file.and_then(|f| f.tolerance)).unwrap_or(DEFAULT_TOLERANCE);
        let samples = self.samples.or(file.and_then(|f| f.samples)).unwrap_or(DEFAULT_SAMPLES);
        let seed = self.seed.or(file.and_then(|f| f.seed)).unwrap_or(DEFAULT_SEED);
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(CliError::Input(format!("tolerance must be positive, got {tolerance}")));
        }
        if samples == 0 {
            return Err(CliError::Input("samples must be positive".into()));
        }
        Ok(Environment {
            seed,
            tolerance,
            samples,
            version: crate::VERSION.into(),
            overrides,
        })
    }
}

fn row(id: &str, anchor: &str, subject: &str, s: &ResidualSummary, tol: f64) -> ResidualRow {
    ResidualRow::new(id, anchor, subject, s.max, s.mean, s.count, tol)
}

/// Evaluate `f` or turn its error into a failing row.
fn row_or_error<F>(id: &str, anchor: &str, subject: &str, tol: f64, f: F) -> ResidualRow
where
    F: FnOnce() -> GeomResult<ResidualSummary>,
{
    match f() {
        Ok(s) => row(id, anchor, subject, &s, tol),
        Err(e) => ResidualRow::error(id, anchor, subject, tol, e.to_string()),
    }
}

const UMBILIC: &str = "II = λ g N";
const LAMBDA: &str = "λ = tr(g⁻¹II)/n equals the catalogue value";
const GAUSS: &str = "R̄(X,Y,Z,W) = R(X,Y,Z,W) + λ² g(X∧Y, Z∧W)";
const CODAZZI: &str = "R̄(X,Y,Z,N) = (dλ∧Z♭)(X,Y)";
const EINSTEIN: &str = "λ² = scal_g/(n(n−1)) − scal_ḡ/(n(n+1))";
const CONE_PARALLEL: &str = "∇ψ̃ = 0 for ψ̃ = (1/k) d(t^k ψ)";
const SLICE: &str = "t = 1 slice of the cone is umbilical with λ = 1";

/// A suite that does not apply to the manifold.
struct Inapplicable(String);

fn fundamental(spec: &ManifoldSpec, env: &Environment) -> Result<Vec<ResidualRow>, Inapplicable> {
    if spec.embeddings.is_empty() {
        return Err(Inapplicable("no umbilical canonical embedding".into()));
    }
    let tol = env.tolerance;
    let mut rows = Vec::new();
    for ce in &spec.embeddings {
        rows.extend(fundamental_rows(ce, env, tol));
    }
    Ok(rows)
}

fn fundamental_rows(ce: &CanonicalEmbedding, env: &Environment, tol: f64) -> Vec<ResidualRow> {
    let e = &ce.embedding;
    let sample = e.domain.sample(env.samples, env.seed);
    let name = ce.name.as_str();
    let over = |f: &dyn Fn(&[f64]) -> GeomResult<f64>| -> GeomResult<ResidualSummary> {
        let mut acc = ResidualAccumulator::default();
        for u in &sample {
            acc.push(f(u)?);
        }
        Ok(acc.finish())
    };
    let mut rows = vec![
        row_or_error("hypersurface.umbilicity", UMBILIC, name, tol, || over(&|u| umbilicity_residual(e, u))),
        row_or_error("hypersurface.lambda", LAMBDA, name, tol, || {
            over(&|u| Ok((second_fundamental_form(e, u)?.lambda_estimate - ce.expected_lambda).abs()))
        }),
        row_or_error("gauss", GAUSS, name, tol, || over(&|u| Ok(gauss_residual(e, u)?.max))),
        row_or_error("codazzi", CODAZZI, name, tol, || {
            over(&|u| {
                let c = codazzi_residual(e, u)?;
                Ok(c.codazzi.max.max(c.traced.max))
            })
        }),
    ];
    if e.intrinsic_dim >= 2 && e.ambient.einstein.is_some() {
        rows.push(row_or_error("einstein.lambda2", EINSTEIN, name, tol, || {
            Ok(einstein_lambda_check(e, &sample)?.formula)
        }));
    }
    rows
}

fn killing_rows(c: &KillingCandidate, subject: &str, sample: &[Vec<f64>], tol: f64) -> Vec<ResidualRow> {
    match evaluate(c, sample) {
        Ok(r) => r
            .identities
            .iter()
            .map(|(id, s)| {
                let mut row = row(id.id(), id.formula(), subject, s, tol);
                if let Some(reason) = r.degeneracy.reason() {
                    row.pass = false;
                    row.status = crate::report::RowStatus::Degenerate;
                    row.note = Some(reason.into());
                }
                row
            })
            .collect(),
        Err(e) => vec![ResidualRow::error("killing", "special Killing identities", subject, tol, e.to_string())],
    }
}

fn intrinsic(cand: &IntrinsicCandidate) -> GeomResult<KillingCandidate> {
    KillingCandidate::from_fields(cand.gamma.clone(), cand.beta.clone(), cand.k, cand.lambda)
}

fn killing(spec: &ManifoldSpec, env: &Environment) -> Result<Vec<ResidualRow>, Inapplicable> {
    let tol = env.tolerance;
    let forms: Vec<_> = spec.parallel_forms().collect();
    let mut rows = Vec::new();
    if !forms.is_empty() {
        for ce in &spec.embeddings {
            let sample = ce.embedding.domain.sample(env.samples, env.seed);
            for f in &forms {
                let subject = format!("{} / {}", ce.name, f.name);
                match KillingCandidate::from_embedding(&ce.embedding, &f.field) {
                    Ok(c) => rows.extend(killing_rows(&c, &subject, &sample, tol)),
                    Err(e) => rows.push(ResidualRow::error("killing", "restriction", &subject, tol, e.to_string())),
                }
            }
        }
    }
    for cand in &spec.candidates {
        let subject = format!("intrinsic / {}", cand.name);
        let sample = spec.metric.domain.sample(env.samples, env.seed);
        match intrinsic(cand) {
            Ok(c) => rows.extend(killing_rows(&c, &subject, &sample, tol)),
            Err(e) => rows.push(ResidualRow::error("killing", "candidate", &subject, tol, e.to_string())),
        }
    }
    if rows.is_empty() {
        return Err(Inapplicable(if spec.embeddings.is_empty() {
            "no umbilical canonical embedding".into()
        } else {
            "no parallel form to restrict".into()
        }));
    }
    Ok(rows)
}

fn cone(spec: &ManifoldSpec, env: &Environment) -> Result<Vec<ResidualRow>, Inapplicable> {
    let tol = env.tolerance;
    let (base, on_cone) = match &spec.cone_base {
        Some(b) => (b.as_ref(), true),
        None => (spec, false),
    };
    let mut rows = Vec::new();
    for cand in &base.candidates {
        let subject = format!("lift of {}", cand.name);
        let lifted = || -> GeomResult<ResidualSummary> {
            let (c, norm) = intrinsic(cand)?
                .normalized_for_cone()
                .ok_or_else(|| GeomError::Degenerate("λ = 0: no cone normalization".into()))?;
            let target = if on_cone && norm.metric_scale == 1.0 {
                spec.metric.clone()
            } else {
                cone_metric(&c.scaled_metric(), SUITE_CONE_RANGE.0, SUITE_CONE_RANGE.1)?
            };
            let lift = cone_lift(&c.gamma_field()?, c.k, &target)?;
            parallel_residual(&lift, &target.domain.sample(env.samples, env.seed))
        };
        rows.push(row_or_error("cone.lift_parallel", CONE_PARALLEL, &subject, tol, lifted));
    }
    if on_cone {
        for ce in spec.embeddings.iter().filter(|e| e.name == "slice_t1") {
            for mut r in fundamental_rows(ce, env, tol).into_iter().take(2) {
                r.anchor = format!("{SLICE}: {}", r.anchor);
                r.identity = format!("cone.slice.{}", r.identity.trim_start_matches("hypersurface."));
                rows.push(r);
            }
        }
    }
    if base.candidates.is_empty() {
        return Err(Inapplicable(format!("{} carries no special Killing candidate to lift", base.label)));
    }
    Ok(rows)
}

/// Run the selected suites. Single suites that do not apply produce a
/// degenerate row; under `all` they are skipped.
pub fn verify(
    req: &ManifoldRequest,
    file: Option<&ManifoldSpecFile>,
    suite: Suite,
    overrides: &Overrides,
) -> Result<VerificationReport, CliError> {
    let env = overrides.environment(file)?;
    let spec = zoo::build(req)?;
    type SuiteFn = fn(&ManifoldSpec, &Environment) -> Result<Vec<ResidualRow>, Inapplicable>;
    let selected: Vec<(Suite, SuiteFn)> = match suite {
        Suite::Fundamental => vec![(Suite::Fundamental, fundamental)],
        Suite::Killing => vec![(Suite::Killing, killing)],
        Suite::Cone => vec![(Suite::Cone, cone)],
        Suite::All => vec![(Suite::Fundamental, fundamental), (Suite::Killing, killing), (Suite::Cone, cone)],
    };
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (s, f) in &selected {
        match f(&spec, &env) {
            Ok(r) => rows.extend(r),
            Err(Inapplicable(msg)) => skipped.push((s.name(), msg)),
        }
    }
    let mut skipped_notes = Vec::new();
    if rows.is_empty() || selected.len() == 1 {
        for (name, msg) in skipped {
            rows.push(ResidualRow::degenerate(name, "suite not applicable", &spec.label, env.tolerance, msg));
        }
    } else {
        skipped_notes = skipped.into_iter().map(|(name, msg)| format!("{name}: {msg}")).collect();
    }
    Ok(VerificationReport::new(suite.name(), req.to_string(), spec.label.clone(), rows, skipped_notes, env))
}

pub fn holonomy(
    req: &ManifoldRequest,
    file: Option<&ManifoldSpecFile>,
    degrees: &[usize],
    steps: Option<usize>,
    overrides: &Overrides,
) -> Result<HolonomyReport, CliError> {
    let mut env = overrides.environment(file)?;
    let spec = zoo::build(req)?;
    let n = spec.dim();
    if let Some(&k) = degrees.iter().find(|&&k| k == 0 || k > n) {
        return Err(CliError::Input(format!("form degree {k} outside 1..={n}")));
    }
    let steps = steps.unwrap_or(DEFAULT_STEPS);
    let base = spec.metric.domain.center();
    let loops = default_loops(&spec.metric, &base, steps, env.seed)?;
    let h = estimate_holonomy(&spec.metric, &loops, degrees)?;
    env.samples = h.loop_count;
    env.tolerance = h.tolerance_used;
    Ok(HolonomyReport {
        schema_version: crate::SCHEMA_VERSION,
        manifold: req.to_string(),
        base_point: base,
        algebra_dim: h.algebra_dim,
        curvature_span: h.curvature_span,
        loop_count: h.loop_count,
        steps,
        isometry_error: h.isometry_error,
        tolerance_used: h.tolerance_used,
        fixed_forms: h
            .fixed_form_subspaces
            .iter()
            .map(|f| FixedFormsReport {
                degree: f.degree,
                dim: f.dim(),
                basis: f.basis.iter().map(|b| b.comps.clone()).collect(),
                nabla_residuals: f.nabla_residuals.clone(),
            })
            .collect(),
        environment: env,
    })
}

const EXPLORATORY_NOTE: &str = "exploratory: a search that stalls is data, not a proof that no umbilical hypersurface exists";

pub fn search(config: &SearchConfig, overrides: Vec<String>) -> Result<SearchReport, CliError> {
    let r = search::run(config)?;
    let finite = |v: f64| if v.is_finite() { Some(v) } else { None };
    Ok(SearchReport {
        schema_version: crate::SCHEMA_VERSION,
        family: r.family,
        exploratory: r.exploratory,
        note: if r.exploratory { EXPLORATORY_NOTE.into() } else { "positive control".into() },
        verdict: r.verdict.as_str().into(),
        best_objective: r.best_objective,
        umbilic_term: finite(r.best_terms.umbilic_term),
        lambda_variance: finite(r.best_terms.lambda_variance),
        lambda_mean: finite(r.best_terms.lambda_mean),
        best_params: r.best_params,
        evaluations: r.evaluations,
        budget: config.budget,
        budget_exhausted: r.budget_exhausted,
        immersion_failures: r.immersion_failures,
        seed: config.seed,
        param_dim: config.param_dim,
        converge_threshold: config.converge_threshold,
        trust_radius: config.trust_radius,
        trace: r.trace,
        version: crate::VERSION.into(),
        overrides,
    })
}

/// One line per catalogue entry: name, parameters, default dimension.
pub fn list_zoo() -> Result<Vec<ZooEntry>, CliError> {
    let mut out = Vec::new();
    for req in zoo::default_requests() {
        let spec = zoo::build(&req)?;
        out.push(ZooEntry {
            name: req.name.clone(),
            parameters: zoo::parameter_names(&req.name)?.iter().map(|s| s.to_string()).collect(),
            example: req.to_string(),
            dim: spec.dim(),
            forms: spec.forms.iter().map(|f| f.name.clone()).collect(),
            embeddings: spec.embeddings.iter().map(|e| e.name.clone()).collect(),
            holonomy_dim: spec.known.holonomy_dim,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ZooEntry {
    pub name: String,
    pub parameters: Vec<String>,
    pub example: String,
    pub dim: usize,
    pub forms: Vec<String>,
    pub embeddings: Vec<String>,
    pub holonomy_dim: Option<usize>,
}

pub fn zoo_markdown(entries: &[ZooEntry]) -> String {
    let mut s = String::from("| name | parameters | example | dim | forms | umbilical embeddings | holonomy dim |\n");
    s.push_str("|---|---|---|---|---|---|---|\n");
    for e in entries {
        s.push_str(&format!(
            "| {} | {} | `{}` | {} | {} | {} | {} |\n",
            e.name,
            e.parameters.join(", "),
            e.example,
            e.dim,
            e.forms.join(", "),
            e.embeddings.join(", "),
            e.holonomy_dim.map_or("?".into(), |d| d.to_string())
        ));
    }
    s
}
