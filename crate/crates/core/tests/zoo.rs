use umbilic_core::forms::FormField;
use umbilic_core::linalg;
use umbilic_core::holonomy::curvature_span_dimension;
use umbilic_core::riemann::curvature;
use umbilic_core::zoo::{self, build, build_str, canonical_umbilical_embeddings, validation_report};
use umbilic_core::GeomError;

#[test]
fn every_default_entry_builds_and_validates() {
    for req in zoo::default_requests() {
        let spec = build(&req).unwrap_or_else(|e| panic!("{req}: {e}"));
        let r = validation_report(&spec).unwrap();
        assert!(r.symmetry_error < 1e-9, "{req}: {r:?}");
        if let Some(h) = spec.known.holonomy_dim {
            assert_eq!(r.curvature_span, h, "{req}");
        }
    }
}

#[test]
fn fubini_study_scalars_and_parallel_kahler_form() {
    let s = build_str("fubini_study_cp2").unwrap();
    let r = validation_report(&s).unwrap();
    assert!(r.scalar_error < 1e-7 && r.einstein_error < 1e-7, "{r:?}");
    assert!(r.parallel_error < 1e-8, "{r:?}");
    assert_eq!(r.curvature_span, 4);
    let w = s.form("kahler").unwrap();
    for x in s.metric.domain.sample(5, 3) {
        let nabla = w.field.covariant_derivatives(&x).unwrap();
        assert!(nabla.iter().all(|f| f.max_abs_value() < 1e-8));
    }
}

#[test]
fn nearly_kahler_form_is_not_closed() {
    let s = build_str("nearly_kahler_s6").unwrap();
    let w = &s.form("omega").unwrap().field;
    let dw = w.exterior_derivative();
    for x in s.metric.domain.sample(3, 5) {
        let ginv = linalg::inverse(&s.metric.metric_values(&x).unwrap(), 6).unwrap();
        let d = dw.value(&x).unwrap();
        assert!(d.inner(&d, &ginv).sqrt() > 0.1);
        // non-degenerate on the tangent space: ω³ ≠ 0
        let v = w.value(&x).unwrap();
        let top = v.wedge(&v).unwrap().wedge(&v).unwrap();
        assert!(top.inner(&top, &ginv).sqrt() > 1.0);
    }
}

#[test]
fn sasakian_contact_condition() {
    let s = build_str("sasakian_sphere(n=3)").unwrap();
    let eta: &FormField = &s.form("eta").unwrap().field;
    let eta_d = eta.wedge(&eta.exterior_derivative()).unwrap();
    for x in s.metric.domain.sample(20, 1) {
        assert!(eta_d.value(&x).unwrap().comps[0].abs() > 1e-6, "{x:?}");
    }
}

#[test]
fn round_sphere_geodesic_spheres() {
    let s = build_str("round_sphere(n=4, r=1)").unwrap();
    let names: Vec<_> = s.embeddings.iter().map(|e| e.name.as_str()).collect();
    assert_eq!(names, ["geodesic_sphere_pi_6", "geodesic_sphere_pi_3", "geodesic_sphere_pi_2"]);
    let e = &s.embeddings[0];
    assert!((e.expected_lambda - 3f64.sqrt()).abs() < 1e-14);
}

#[test]
fn cone_over_round_sphere_is_flat_with_unit_slice() {
    let s = build_str("cone(round_sphere(n=3))").unwrap();
    assert_eq!(s.known.scalar, Some(0.0));
    let e = &s.embeddings[0];
    assert_eq!(e.expected_lambda, 1.0);
    for x in s.metric.domain.sample(5, 2) {
        let c = curvature(&s.metric, &x).unwrap();
        assert!(c.riemann.iter().all(|v| v.abs() < 1e-8));
    }
}

#[test]
fn cone_over_torus_is_curved() {
    let s = build_str("cone(flat_torus(n=2))").unwrap();
    let c = curvature(&s.metric, &s.metric.domain.center()).unwrap();
    assert!(c.riemann.iter().any(|v| v.abs() > 0.1));
}

#[test]
fn join_of_two_and_one_sphere_is_einstein() {
    let s = build_str("sine_join(round_sphere(2), round_sphere(1))").unwrap();
    assert_eq!(s.known.einstein, Some(3.0));
    assert_eq!(curvature_span_dimension(&s.metric, &s.metric.domain.center(), false).unwrap(), 6);
}

#[test]
fn flat_torus_has_no_canonical_embedding() {
    let s = build_str("flat_torus").unwrap();
    assert!(matches!(canonical_umbilical_embeddings(&s), Err(GeomError::Unsupported(_))));
}

#[test]
fn euclidean_constant_forms_are_parallel() {
    let s = build_str("euclidean(n=7)").unwrap();
    for f in s.parallel_forms() {
        for x in s.metric.domain.sample(5, 9) {
            assert!(f.field.covariant_derivatives(&x).unwrap().iter().all(|d| d.max_abs_value() < 1e-12));
        }
    }
    assert!(s.form("g2").is_some());
}
