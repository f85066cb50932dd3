//! Acceptance gate: one pass/fail line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use umbilic_core::cones::{product_cone_isometry_residual, sine_cone_join};
use umbilic_core::fd::{finite_difference_check, DEFAULT_STEP};
use umbilic_core::field::{ChartDomain, Field};
use umbilic_core::forms::{binomial, Form, FormField};
use umbilic_core::g2;
use umbilic_core::holonomy::{default_loops, estimate_holonomy, DEFAULT_STEPS};
use umbilic_core::hypersurface::{codazzi_residual, einstein_lambda_check, gauss_residual, Embedding};
use umbilic_core::jet::Jet;
use umbilic_core::killing::{cone_lift, evaluate, parallel_residual, pullback_constant, Degeneracy, KillingCandidate};
use umbilic_core::riemann::{curvature, sectional_curvature, MetricField};
use umbilic_core::search::{run, SearchConfig};
use umbilic_core::zoo::{self, build_str, inverse_stereographic, stereographic_metric};
use umbilic_core::{GeomError, Result};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn basis_form(metric: &MetricField, k: usize, i: usize) -> FormField {
    let mut c = vec![0.0; binomial(metric.dim, k)];
    c[i] = 1.0;
    FormField::constant(format!("e{k}_{i}"), metric.clone(), k, c).unwrap()
}

/// Unit spheres in flat space, every constant basis form.
fn calibration() -> Result<Outcome> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut degenerate = 0;
    for n in 2..=5 {
        let s = build_str(&format!("euclidean(n={})", n + 1))?;
        let e = &s.embeddings[0].embedding;
        let sample = e.domain.sample(50, 5);
        for k in 1..=n + 1 {
            for i in 0..binomial(n + 1, k) {
                let c = KillingCandidate::from_embedding(e, &basis_form(&s.metric, k, i))?;
                let r = evaluate(&c, &sample)?;
                worst = r.identities.iter().fold(worst, |m, (_, s)| m.max(s.max));
                degenerate += r.degeneracy.is_degenerate() as usize;
                count += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst < 1e-8 && degenerate == 0 && secs < 60.0,
        format!("{count} forms x 50 points, max residual {worst:.2e} (< 1e-8), {secs:.1} s (< 60 s)"),
    )
}

/// Geodesic spheres in the unit four-sphere.
fn gauss_codazzi() -> Result<Outcome> {
    let s = build_str("round_sphere(n=4)")?;
    let mut worst = [0.0f64; 4];
    let mut equality = f64::INFINITY;
    for ce in &s.embeddings {
        let e = &ce.embedding;
        let sample = e.domain.sample(10, 3);
        let rep = einstein_lambda_check(e, &sample)?;
        let rho = 1.0f64.atan2(ce.expected_lambda);
        worst[0] = worst[0].max((rep.lambda_mean - ce.expected_lambda).abs()).max(rep.lambda_spread);
        worst[3] = worst[3].max(rep.formula.max);
        for u in &sample {
            worst[1] = worst[1].max(gauss_residual(e, u)?.max);
            let c = codazzi_residual(e, u)?;
            worst[2] = worst[2].max(c.codazzi.max).max(c.traced.max);
        }
        if (rho - std::f64::consts::FRAC_PI_2).abs() < 1e-12 {
            equality = rep.inequality_margin.abs();
        }
    }
    outcome(
        worst.iter().all(|w| *w < 1e-7) && equality < 1e-7,
        format!(
            "lambda {:.1e}, gauss {:.1e}, codazzi {:.1e}, lambda^2 formula {:.1e}, equality at pi/2 {:.1e} (all < 1e-7)",
            worst[0], worst[1], worst[2], worst[3], equality
        ),
    )
}

/// `t·S(u)`: the cone chart onto flat space minus the origin.
fn polar_map(n: usize) -> Field {
    Field::from_jet_map(n + 1, n + 1, move |x: &[Jet]| {
        let p = inverse_stereographic(&x[..n])?;
        Ok(p.iter().map(|c| c.mul_jet(&x[n])).collect())
    })
}

fn lift_check(base: &str, form: &str, k: usize, flat: Form<f64>, points: usize) -> Result<(f64, f64)> {
    let s = build_str(base)?;
    let cone = build_str(&format!("cone({base})"))?;
    let lift = cone_lift(&s.form(form).unwrap().field, k, &cone.metric)?;
    let sample = cone.metric.domain.sample(points, 2);
    let parallel = parallel_residual(&lift, &sample)?.max;
    let map = polar_map(s.dim());
    let mut matching: f64 = 0.0;
    for x in &sample {
        let d = lift.value(x)?.minus(&pullback_constant(&flat, &map, x)?);
        matching = matching.max(d.max_abs_value());
    }
    Ok((parallel, matching))
}

fn cone_lift_criterion() -> Result<Outcome> {
    let kahler = Form { dim: 4, degree: 2, comps: zoo::flat_kahler_components(4) };
    let (pa, ma) = lift_check("sasakian_sphere(n=3)", "eta", 2, kahler, 10)?;
    let (pb, mb) = lift_check("nearly_kahler_s6", "omega", 3, g2::phi(), 4)?;
    outcome(
        pa < 1e-8 && ma < 1e-8 && pb < 1e-7 && mb < 1e-7,
        format!(
            "(a) contact form: nabla {pa:.1e}, vs flat Kahler {ma:.1e} (< 1e-8); (b) nearly Kahler: nabla {pb:.1e}, vs G2 3-form {mb:.1e} (< 1e-7)"
        ),
    )
}

fn product_cones() -> Result<Outcome> {
    let circle = stereographic_metric(1, 1.0, 3.0)?;
    let sphere = stereographic_metric(2, 1.0, 3.0)?;
    let line = MetricField::new("line", ChartDomain::interval(-2.0, 2.0), Field::constant(1, vec![1.0]))?;
    let mut iso: f64 = 0.0;
    for (g1, g2) in [(&circle, &circle), (&sphere, &line)] {
        let j = sine_cone_join(g1, g2)?;
        let sample = j.domain.product(&ChartDomain::interval(0.3, 3.0)).sample(50, 11);
        iso = iso.max(product_cone_isometry_residual(g1, g2, &sample)?.max);
    }
    let join = sine_cone_join(&circle, &circle)?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut sec: f64 = 0.0;
    for x in join.domain.sample(20, 3) {
        let k = curvature(&join, &x)?;
        for _ in 0..5 {
            let a: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            sec = sec.max((sectional_curvature(&k, &a, &b)? - 1.0).abs());
        }
    }
    outcome(
        iso < 1e-12 && sec < 1e-7,
        format!("isometry residual {iso:.1e} (< 1e-12, 2 pairs x 50), |K - 1| on S1*S1 {sec:.1e} (< 1e-7)"),
    )
}

fn holonomy() -> Result<Outcome> {
    let mut dims = Vec::new();
    let mut iso: f64 = 0.0;
    let mut fixed = (0, f64::INFINITY);
    for (name, degrees) in [("euclidean(n=4)", vec![]), ("round_sphere(n=4)", vec![]), ("fubini_study_cp2", vec![2])] {
        let s = build_str(name)?;
        let base = s.metric.domain.center();
        let loops = default_loops(&s.metric, &base, DEFAULT_STEPS, 1)?;
        let h = estimate_holonomy(&s.metric, &loops, &degrees)?;
        dims.push(h.algebra_dim);
        iso = iso.max(h.isometry_error);
        if let Some(f) = h.fixed_form_subspaces.first() {
            fixed = (f.dim(), f.nabla_residuals.iter().cloned().fold(0.0, f64::max));
        }
    }
    outcome(
        dims == [0, 6, 4] && fixed.0 == 1 && fixed.1 < 1e-5 && iso < 1e-6,
        format!(
            "dims {dims:?} (expected [0, 6, 4]), CP2 fixed 2-forms {} with nabla {:.1e} (< 1e-5), isometry {iso:.1e} (< 1e-6)",
            fixed.0, fixed.1
        ),
    )
}

/// Random expression in the coordinate jets, built from smooth bounded
/// primitives so that central differences stay well conditioned.
fn random_expression(rng: &mut ChaCha8Rng, x: &[Jet], depth: usize) -> Result<Jet> {
    if depth == 0 || rng.gen_bool(0.2) {
        let i = rng.gen_range(0..x.len());
        let c: f64 = rng.gen_range(-1.0..1.0);
        return Ok(x[i].scale(c).add_scalar(rng.gen_range(-0.5..0.5)));
    }
    let a = random_expression(rng, x, depth - 1)?;
    Ok(match rng.gen_range(0..9) {
        0 => &a + &random_expression(rng, x, depth - 1)?,
        1 => &a - &random_expression(rng, x, depth - 1)?,
        2 => &a * &random_expression(rng, x, depth - 1)?,
        3 => a.sin(),
        4 => a.cos(),
        5 => a.scale(0.5).exp(),
        6 => a.atan(),
        7 => (&a * &a).add_scalar(1.0).sqrt()?,
        _ => (&a * &a).add_scalar(1.0).recip()?,
    })
}

fn ad_integrity() -> Result<Outcome> {
    let (mut d1, mut d2): (f64, f64) = (0.0, 0.0);
    for seed in 0..100u64 {
        let dim = 1 + (seed % 4) as usize;
        let mut point_rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let x0: Vec<f64> = (0..dim).map(|_| point_rng.gen_range(-1.0..1.0)).collect();
        let r = finite_difference_check(
            |x| random_expression(&mut ChaCha8Rng::seed_from_u64(seed), x, 4),
            &x0,
            DEFAULT_STEP,
        )?;
        d1 = d1.max(r.d1.max);
        d2 = d2.max(r.d2.max);
    }
    let mut sym: f64 = 0.0;
    let mut entries = 0;
    for req in zoo::default_requests() {
        let s = zoo::build(&req)?;
        for x in zoo::validation_points(&s) {
            sym = sym.max(curvature(&s.metric, &x)?.symmetry_residual());
        }
        entries += 1;
    }
    outcome(
        d1 < 1e-6 && d2 < 1e-4 && sym < 1e-9,
        format!(
            "100 expressions: d1 {d1:.1e} (< 1e-6), d2 {d2:.1e} (< 1e-4); symmetries and Bianchi on {entries} entries {sym:.1e} (< 1e-9)"
        ),
    )
}

fn search_controls() -> Result<Outcome> {
    let mut worst = (0.0f64, 0usize);
    for family in ["s3-in-r4", "equator-in-s4"] {
        for seed in 1..=5 {
            let mut c = SearchConfig::new(family, 8);
            c.seed = seed;
            let r = run(&c)?;
            worst = (worst.0.max(r.best_objective), worst.1.max(r.evaluations));
        }
    }
    let probe = run(&SearchConfig::new("cp2-probe", 12))?;
    outcome(
        worst.0 < 1e-6 && worst.1 <= 2000 && !probe.trace.is_empty(),
        format!(
            "controls: worst objective {:.1e} (< 1e-6) within {} evaluations (<= 2000); CP2 probe (exploratory) floor {:.3e}, {} trace entries, verdict {}",
            worst.0,
            worst.1,
            probe.best_objective,
            probe.trace.len(),
            probe.verdict
        ),
    )
}

fn degeneracy() -> Result<Outcome> {
    let s = build_str("euclidean(n=4)")?;
    let plane = &s.embeddings[1].embedding;
    // dx0∧dx1 has the plane normal ∂₃ in its kernel
    let c = KillingCandidate::from_embedding(plane, &basis_form(&s.metric, 2, 0))?;
    let r = evaluate(&c, &plane.domain.sample(10, 1))?;
    let degenerate = r.degeneracy == Degeneracy::GammaVanishes && !r.passes(1e-8);
    let map = Field::from_jet_map(3, 4, |u: &[Jet]| Ok(vec![u[0].cos(), u[0].sin(), u[1].clone(), u[2].clone()]));
    let cyl = Embedding::new("cylinder", ChartDomain::boxed(&[(-1.0, 1.0); 3]), s.metric.clone(), map, 1)?;
    let refused = matches!(gauss_residual(&cyl, &[0.1, 0.2, 0.3]), Err(GeomError::NotUmbilical { .. }));
    outcome(
        degenerate && refused,
        format!("kernel-normal form reported degenerate: {degenerate}; non-umbilical gauss_residual refused: {refused}"),
    )
}

type Criterion = fn() -> Result<Outcome>;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 8] = [
        ("flat-ambient calibration", calibration),
        ("gauss/codazzi on geodesic spheres", gauss_codazzi),
        ("cone lift", cone_lift_criterion),
        ("product of cones", product_cones),
        ("holonomy estimates", holonomy),
        ("AD integrity", ad_integrity),
        ("search positive controls", search_controls),
        ("degeneracy handling", degeneracy),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match f() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += !pass as usize;
        println!(
            "criterion {} [{}] {name}: {detail} ({:.1} s)",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
