use proptest::prelude::*;
use umbilic_core::forms::{binomial, FormField};
use umbilic_core::killing::{
    cone_lift, cone_lift_expanded, evaluate, non_parallel_check, parallel_residual, pullback_constant,
    relation_check, special_killing_residuals, Identity, KillingCandidate,
};
use umbilic_core::field::Field;
use umbilic_core::zoo::{self, build_str, inverse_stereographic};
use umbilic_core::GeomError;

fn basis_form(spec: &zoo::ManifoldSpec, k: usize, i: usize) -> FormField {
    let n = spec.dim();
    let mut c = vec![0.0; binomial(n, k)];
    c[i] = 1.0;
    FormField::constant(format!("e{k}_{i}"), spec.metric.clone(), k, c).unwrap()
}

#[test]
fn flat_ambient_calibration_small() {
    for n in 2..=3 {
        let s = build_str(&format!("euclidean(n={})", n + 1)).unwrap();
        let e = &s.embeddings[0].embedding;
        let sample = e.domain.sample(6, 4);
        for k in 1..=n + 1 {
            for i in 0..binomial(n + 1, k) {
                let c = KillingCandidate::from_embedding(e, &basis_form(&s, k, i)).unwrap();
                let r = evaluate(&c, &sample).unwrap();
                for (id, sum) in &r.identities {
                    assert!(sum.max < 1e-9, "n={n} k={k} i={i} {id}: {sum:?}");
                }
                assert!(!r.degeneracy.is_degenerate());
            }
        }
    }
}

#[test]
fn sign_covariance_under_normal_flip() {
    let s = build_str("euclidean(n=4)").unwrap();
    let e = s.embeddings[0].embedding.flipped();
    let c = KillingCandidate::from_embedding(&e, &basis_form(&s, 2, 1)).unwrap();
    assert!((c.lambda + 1.0).abs() < 1e-12);
    assert!(relation_check(&c, &e.domain.sample(5, 1)).unwrap().max < 1e-9);
}

#[test]
fn volume_form_has_vanishing_beta_relation() {
    // k = n+1: β is a top-degree form on M and vanishes structurally, so dγ = 0
    let s = build_str("euclidean(n=3)").unwrap();
    let e = &s.embeddings[0].embedding;
    let c = KillingCandidate::from_embedding(e, &s.form("vol").unwrap().field).unwrap();
    let r = evaluate(&c, &e.domain.sample(5, 1)).unwrap();
    assert!(r.get(Identity::RelationDGamma).max < 1e-9);
    assert!(!r.degeneracy.is_degenerate());
}

#[test]
fn sasakian_contact_form_candidate() {
    let s = build_str("sasakian_sphere(n=3)").unwrap();
    let cand = &s.candidates[0];
    let c = KillingCandidate::from_fields(cand.gamma.clone(), cand.beta.clone(), cand.k, cand.lambda).unwrap();
    let sample = s.metric.domain.sample(8, 3);
    let r = special_killing_residuals(&c, &sample).unwrap();
    for (id, sum) in &r.identities {
        assert!(sum.max < 1e-8, "{id}: {sum:?}");
    }
    let np = non_parallel_check(&c, &sample).unwrap();
    assert!(np.non_parallel && !np.witness.is_empty());
}

#[test]
fn nearly_kahler_candidate_is_special_killing() {
    let s = build_str("nearly_kahler_s6").unwrap();
    let cand = &s.candidates[0];
    let c = KillingCandidate::from_fields(cand.gamma.clone(), cand.beta.clone(), 3, -1.0).unwrap();
    let sample = s.metric.domain.sample(3, 3);
    let r = evaluate(&c, &sample).unwrap();
    assert!(r.passes(1e-8), "{r:?}");
    assert!(non_parallel_check(&c, &sample).unwrap().non_parallel);
}

#[test]
fn parallel_torus_form_is_rejected_as_candidate() {
    let s = build_str("flat_torus(n=3)").unwrap();
    let m = s.metric.clone();
    let gamma = FormField::constant("dx0", m.clone(), 1, vec![1.0, 0.0, 0.0]).unwrap();
    let beta = FormField::constant("0", m, 2, vec![0.0; 3]).unwrap();
    let c = KillingCandidate::from_fields(gamma, beta, 2, 1.0).unwrap();
    let np = non_parallel_check(&c, &s.metric.domain.sample(5, 1)).unwrap();
    assert!(!np.non_parallel);
}

#[test]
fn zero_gamma_is_refused_by_non_parallel_check() {
    let s = build_str("euclidean(n=3)").unwrap();
    let e = &s.embeddings[1].embedding;
    let c = KillingCandidate::from_embedding(e, &basis_form(&s, 2, 0)).unwrap();
    assert!(matches!(non_parallel_check(&c, &e.domain.sample(3, 1)), Err(GeomError::Degenerate(_))));
}

#[test]
fn non_umbilical_restriction_is_refused() {
    use umbilic_core::hypersurface::Embedding;
    let s = build_str("euclidean(n=3)").unwrap();
    let map = Field::from_jet_map(2, 3, |u| Ok(vec![u[0].cos(), u[0].sin(), u[1].clone()]));
    let cyl = Embedding::new("cyl", umbilic_core::field::ChartDomain::boxed(&[(-1.0, 1.0), (-1.0, 1.0)]), s.metric.clone(), map, 1).unwrap();
    assert!(matches!(
        KillingCandidate::from_embedding(&cyl, &basis_form(&s, 2, 0)),
        Err(GeomError::NotUmbilical { .. })
    ));
}

#[test]
fn cone_lift_of_contact_form_is_flat_kahler_form() {
    let s = build_str("sasakian_sphere(n=3)").unwrap();
    let cone = build_str("cone(sasakian_sphere(n=3))").unwrap();
    let eta = &s.form("eta").unwrap().field;
    let lift = cone_lift(eta, 2, &cone.metric).unwrap();
    let sample = cone.metric.domain.sample(6, 2);
    assert!(parallel_residual(&lift, &sample).unwrap().max < 1e-8);
    let omega = umbilic_core::forms::Form { dim: 4, degree: 2, comps: zoo::flat_kahler_components(4) };
    let polar = Field::from_jet_map(4, 4, |x| {
        let p = inverse_stereographic(&x[..3])?;
        Ok(p.iter().map(|c| c.mul_jet(&x[3])).collect())
    });
    for x in &sample {
        let a = lift.value(x).unwrap();
        let b = pullback_constant(&omega, &polar, x).unwrap();
        assert!(a.minus(&b).max_abs_value() < 1e-8);
        let c = cone_lift_expanded(eta, 2, x).unwrap();
        assert!(a.minus(&c).max_abs_value() < 1e-12);
    }
}

#[test]
fn lift_degree_mismatch() {
    let s = build_str("sasakian_sphere(n=3)").unwrap();
    let cone = build_str("cone(sasakian_sphere(n=3))").unwrap();
    assert!(cone_lift(&s.form("eta").unwrap().field, 3, &cone.metric).is_err());
}

#[test]
fn normalization_rescales_lambda_two() {
    // sphere of radius 1/2 in ℝ⁴: λ = 2, rescaled metric 4g is the unit sphere
    use umbilic_core::hypersurface::Embedding;
    let s = build_str("euclidean(n=4)").unwrap();
    let map = Field::from_jet_map(3, 4, |v| Ok(inverse_stereographic(v)?.iter().map(|x| x.scale(0.5)).collect()));
    let e = Embedding::new("half sphere", umbilic_core::field::ChartDomain::ball(3, 2.0), s.metric.clone(), map, -1).unwrap();
    let sigma = FormField::constant("ω", s.metric.clone(), 2, zoo::flat_kahler_components(4)).unwrap();
    let c = KillingCandidate::from_embedding(&e, &sigma).unwrap();
    assert!((c.lambda.abs() - 2.0).abs() < 1e-10);
    let (nc, norm) = c.normalized_for_cone().unwrap();
    assert!((norm.metric_scale - 4.0).abs() < 1e-10);
    assert!(evaluate(&nc, &e.domain.sample(4, 1)).unwrap().passes(1e-8));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]
    #[test]
    fn residuals_vanish_for_linear_combinations(coeffs in proptest::collection::vec(-2.0f64..2.0, 6)) {
        let s = build_str("euclidean(n=4)").unwrap();
        let e = &s.embeddings[0].embedding;
        let sigma = FormField::constant("σ", s.metric.clone(), 2, coeffs.clone()).unwrap();
        let c = KillingCandidate::from_embedding(e, &sigma).unwrap();
        let r = evaluate(&c, &e.domain.sample(3, 7)).unwrap();
        let scale = coeffs.iter().map(|c| c.abs()).fold(1.0, f64::max);
        for (_, sum) in &r.identities {
            prop_assert!(sum.max < 1e-9 * scale);
        }
    }
}
