//! Report types: canonical JSON (schema-versioned) and markdown tables.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::ExitStatus;

/// Run settings and the flags that overrode them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub seed: u64,
    pub tolerance: f64,
    pub samples: usize,
    pub version: String,
    pub overrides: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Pass,
    Fail,
    Degenerate,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Pass => "pass",
            RowStatus::Fail => "fail",
            RowStatus::Degenerate => "degenerate",
        }
    }

    pub fn exit(self) -> ExitStatus {
        match self {
            RowStatus::Pass => ExitStatus::Pass,
            RowStatus::Fail => ExitStatus::Failure,
            RowStatus::Degenerate => ExitStatus::Degenerate,
        }
    }
}

/// One identity checked on one subject (an embedding, a form or a pair).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub identity: String,
    /// The identity written out; the markdown table is keyed by it.
    pub anchor: String,
    pub subject: String,
    pub max: f64,
    pub mean: f64,
    pub count: usize,
    pub tolerance: f64,
    /// `max ≤ tolerance`.
    pub pass: bool,
    pub status: RowStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ResidualRow {
    pub fn new(identity: &str, anchor: &str, subject: &str, max: f64, mean: f64, count: usize, tolerance: f64) -> Self {
        let pass = max <= tolerance;
        ResidualRow {
            identity: identity.into(),
            anchor: anchor.into(),
            subject: subject.into(),
            max,
            mean,
            count,
            tolerance,
            pass,
            status: if pass { RowStatus::Pass } else { RowStatus::Fail },
            note: None,
        }
    }

    /// A row that could not be evaluated meaningfully.
    pub fn degenerate(identity: &str, anchor: &str, subject: &str, tolerance: f64, note: String) -> Self {
        ResidualRow {
            identity: identity.into(),
            anchor: anchor.into(),
            subject: subject.into(),
            max: 0.0,
            mean: 0.0,
            count: 0,
            tolerance,
            pass: false,
            status: RowStatus::Degenerate,
            note: Some(note),
        }
    }

    /// A row whose evaluation raised an error.
    pub fn error(identity: &str, anchor: &str, subject: &str, tolerance: f64, note: String) -> Self {
        ResidualRow {
            status: RowStatus::Fail,
            ..ResidualRow::degenerate(identity, anchor, subject, tolerance, note)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub suite: String,
    pub manifold: String,
    pub label: String,
    pub rows: Vec<ResidualRow>,
    /// Suites skipped because they do not apply to this manifold.
    pub skipped: Vec<String>,
    pub environment: Environment,
    pub status: String,
    pub exit_code: u8,
}

impl VerificationReport {
    pub fn new(
        suite: &str,
        manifold: String,
        label: String,
        rows: Vec<ResidualRow>,
        skipped: Vec<String>,
        environment: Environment,
    ) -> Self {
        let exit = if rows.is_empty() {
            ExitStatus::Degenerate
        } else {
            rows.iter().fold(ExitStatus::Pass, |s, r| s.combine(r.status.exit()))
        };
        let status = match exit {
            ExitStatus::Pass => "pass",
            ExitStatus::Failure => "fail",
            _ => "degenerate",
        };
        VerificationReport {
            schema_version: crate::SCHEMA_VERSION,
            suite: suite.into(),
            manifold,
            label,
            rows,
            skipped,
            environment,
            status: status.into(),
            exit_code: exit.code(),
        }
    }

    pub fn markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "## verify `{}` (suite {})\n", self.manifold, self.suite);
        let _ = writeln!(s, "| identity | id | subject | max | mean | n | tolerance | status |");
        let _ = writeln!(s, "|---|---|---|---|---|---|---|---|");
        for r in &self.rows {
            let status = match &r.note {
                Some(n) => format!("{}: {}", r.status.as_str(), n),
                None => r.status.as_str().to_string(),
            };
            let _ = writeln!(
                s,
                "| {} | `{}` | {} | {:.3e} | {:.3e} | {} | {:.1e} | {} |",
                r.anchor, r.identity, r.subject, r.max, r.mean, r.count, r.tolerance, status
            );
        }
        for k in &self.skipped {
            let _ = writeln!(s, "\nskipped: {k}");
        }
        let _ = writeln!(s, "\noverall: **{}** (exit {})", self.status, self.exit_code);
        write_environment(&mut s, &self.environment);
        s
    }
}

fn write_environment(s: &mut String, e: &Environment) {
    let overrides = if e.overrides.is_empty() { "none".to_string() } else { e.overrides.join(", ") };
    let _ = writeln!(
        s,
        "\nseed {}, tolerance {:.1e}, samples {}, version {}, overrides: {}",
        e.seed, e.tolerance, e.samples, e.version, overrides
    );
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedFormsReport {
    pub degree: usize,
    pub dim: usize,
    /// Coordinate components of an orthonormal basis.
    pub basis: Vec<Vec<f64>>,
    pub nabla_residuals: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolonomyReport {
    pub schema_version: u32,
    pub manifold: String,
    pub base_point: Vec<f64>,
    pub algebra_dim: usize,
    pub curvature_span: usize,
    pub loop_count: usize,
    pub steps: usize,
    pub isometry_error: f64,
    pub tolerance_used: f64,
    pub fixed_forms: Vec<FixedFormsReport>,
    pub environment: Environment,
}

impl HolonomyReport {
    pub fn markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "## holonomy `{}`\n", self.manifold);
        let _ = writeln!(s, "| quantity | value |");
        let _ = writeln!(s, "|---|---|");
        let _ = writeln!(s, "| algebra dimension | {} |", self.algebra_dim);
        let _ = writeln!(s, "| curvature span at base | {} |", self.curvature_span);
        let _ = writeln!(s, "| loops | {} ({} steps) |", self.loop_count, self.steps);
        let _ = writeln!(s, "| isometry error | {:.3e} |", self.isometry_error);
        for f in &self.fixed_forms {
            let worst = f.nabla_residuals.iter().cloned().fold(0.0, f64::max);
            let _ = writeln!(s, "| fixed {}-forms | dim {}, max ∇-residual {:.3e} |", f.degree, f.dim, worst);
        }
        write_environment(&mut s, &self.environment);
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub schema_version: u32,
    pub family: String,
    pub exploratory: bool,
    pub note: String,
    pub verdict: String,
    pub best_objective: f64,
    pub umbilic_term: Option<f64>,
    pub lambda_variance: Option<f64>,
    pub lambda_mean: Option<f64>,
    pub best_params: Vec<f64>,
    pub evaluations: usize,
    pub budget: usize,
    pub budget_exhausted: bool,
    pub immersion_failures: usize,
    pub seed: u64,
    pub param_dim: usize,
    pub converge_threshold: f64,
    pub trust_radius: f64,
    pub trace: Vec<f64>,
    pub version: String,
    pub overrides: Vec<String>,
}

impl SearchReport {
    pub fn markdown(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.3e}"));
        let mut s = String::new();
        let _ = writeln!(s, "## search `{}`\n", self.family);
        if self.exploratory {
            let _ = writeln!(s, "> {}\n", self.note);
        }
        let _ = writeln!(s, "| quantity | value |");
        let _ = writeln!(s, "|---|---|");
        let _ = writeln!(s, "| verdict | {} |", self.verdict);
        let _ = writeln!(s, "| best objective | {:.3e} |", self.best_objective);
        let _ = writeln!(s, "| mean umbilicity² | {} |", opt(self.umbilic_term));
        let _ = writeln!(s, "| variance of λ | {} |", opt(self.lambda_variance));
        let _ = writeln!(s, "| mean λ | {} |", opt(self.lambda_mean));
        let _ = writeln!(s, "| evaluations | {} of {} |", self.evaluations, self.budget);
        let _ = writeln!(s, "| iterations | {} |", self.trace.len());
        let _ = writeln!(s, "| immersion failures | {} |", self.immersion_failures);
        let _ = writeln!(s, "| seed | {} |", self.seed);
        s
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}
