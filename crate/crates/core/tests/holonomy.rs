use core::f64::consts::{FRAC_PI_2, PI};
use nalgebra::DMatrix;
use umbilic_core::forms::FormValue;
use umbilic_core::holonomy::{
    curvature_span_dimension, default_loops, estimate_holonomy, exterior_power, loop_holonomy, parallel_transport,
    reverse_loop_error, transport_form, transport_form_direct, LoopSpec, Path, Segment, DEFAULT_STEPS,
};
use umbilic_core::killing::cone_lift;
use umbilic_core::zoo::{self, build, build_str, stereographic_metric};

#[test]
fn euclidean_has_trivial_holonomy_and_every_two_form_is_fixed() {
    let s = build_str("euclidean(n=4)").unwrap();
    let base = s.metric.domain.center();
    let loops = default_loops(&s.metric, &base, 64, 1).unwrap();
    let h = estimate_holonomy(&s.metric, &loops, &[2]).unwrap();
    assert_eq!(h.algebra_dim, 0);
    assert_eq!(h.fixed_form_subspaces[0].dim(), 6);
    assert!(h.loop_count >= 20);
}

#[test]
fn round_four_sphere_has_full_holonomy() {
    let s = build_str("round_sphere(n=4)").unwrap();
    let base = s.metric.domain.center();
    let loops = default_loops(&s.metric, &base, DEFAULT_STEPS, 1).unwrap();
    let h = estimate_holonomy(&s.metric, &loops, &[2, 4]).unwrap();
    assert_eq!(h.algebra_dim, 6);
    assert_eq!(h.fixed_form_subspaces[0].dim(), 0);
    assert_eq!(h.fixed_form_subspaces[1].dim(), 1);
    assert!(h.isometry_error < 1e-6);
}

#[test]
fn cp2_fixes_exactly_the_kahler_direction() {
    let s = build_str("fubini_study_cp2").unwrap();
    let base = s.metric.domain.center();
    let loops = default_loops(&s.metric, &base, DEFAULT_STEPS, 1).unwrap();
    let h = estimate_holonomy(&s.metric, &loops, &[2]).unwrap();
    assert_eq!(h.algebra_dim, 4);
    let fixed = &h.fixed_form_subspaces[0];
    assert_eq!(fixed.dim(), 1);
    assert!(fixed.nabla_residuals[0] < 1e-5, "{:?}", fixed.nabla_residuals);
    let w = s.form("kahler").unwrap().field.value(&base).unwrap();
    let f = &fixed.basis[0];
    let cos = dot(f, &w) / (dot(f, f) * dot(&w, &w)).sqrt();
    assert!((cos.abs() - 1.0).abs() < 1e-8, "{cos}");
}

fn dot(a: &FormValue, b: &FormValue) -> f64 {
    a.comps.iter().zip(&b.comps).map(|(x, y)| x * y).sum()
}

#[test]
fn spherical_excess_of_octant_triangle() {
    let m = stereographic_metric(2, 1.0, 3.0).unwrap();
    let arc = Segment::from_fn(|s| {
        let p = s * FRAC_PI_2;
        (vec![p.cos(), p.sin()], vec![-p.sin() * FRAC_PI_2, p.cos() * FRAC_PI_2])
    });
    let path = Path::new(
        vec![
            Segment::line(vec![0.0, 0.0], vec![1.0, 0.0]),
            arc,
            Segment::line(vec![0.0, 1.0], vec![0.0, 0.0]),
        ],
        2000,
    );
    let v = parallel_transport(&m, &path, &[1.0, 0.0]).unwrap();
    let angle = v[1].atan2(v[0]);
    assert!((angle - FRAC_PI_2).abs() < 1e-4, "{angle}");
    assert!(((v[0] * v[0] + v[1] * v[1]).sqrt() - 1.0).abs() < 1e-6);
}

#[test]
fn out_of_domain_curves_are_errors() {
    let m = stereographic_metric(2, 1.0, 3.0).unwrap();
    let path = Path::new(vec![Segment::line(vec![0.0, 0.0], vec![5.0, 0.0])], 64);
    assert!(parallel_transport(&m, &path, &[1.0, 0.0]).is_err());
}

#[test]
fn volume_form_is_transport_invariant_on_every_entry() {
    for req in zoo::default_requests() {
        let s = build(&req).unwrap();
        let Some(vol) = s.form("vol") else { continue };
        let base = s.metric.domain.center();
        let lp = &default_loops(&s.metric, &base, DEFAULT_STEPS, 3).unwrap()[0..1][0].clone();
        let v0 = vol.field.value(&base).unwrap();
        let v1 = transport_form(&s.metric, &lp.path, &v0).unwrap();
        assert!(v1.minus(&v0).max_abs_value() < 1e-6 * v0.max_abs_value(), "{req}");
    }
}

#[test]
fn reverse_loop_and_exterior_power_consistency() {
    let s = build_str("fubini_study_cp2").unwrap();
    let base = vec![0.2, -0.1, 0.3, 0.1];
    let loops = default_loops(&s.metric, &base, DEFAULT_STEPS, 5).unwrap();
    let last = loops.last().unwrap();
    assert!(reverse_loop_error(&s.metric, last).unwrap() < 1e-6);
    let sigma = FormValue { dim: 4, degree: 2, comps: vec![0.3, -1.0, 0.2, 0.5, 0.7, -0.4] };
    let a = transport_form(&s.metric, &last.path, &sigma).unwrap();
    let b = transport_form_direct(&s.metric, &last.path, &sigma).unwrap();
    assert!(a.minus(&b).max_abs_value() < 1e-8);
}

#[test]
fn exterior_power_is_multiplicative() {
    let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.5, -1.0, 0.3, 2.0, 0.1, 0.0, 1.5]);
    let b = DMatrix::from_row_slice(3, 3, &[0.2, 1.0, 0.0, 1.0, -0.3, 0.4, 2.0, 0.5, 1.0]);
    let lhs = exterior_power(&(&a * &b), 2);
    let rhs = exterior_power(&a, 2) * exterior_power(&b, 2);
    assert!((lhs - rhs).amax() < 1e-12);
    assert!((exterior_power(&a, 3)[(0, 0)] - a.determinant()).abs() < 1e-12);
}

#[test]
fn curvature_span_is_a_lower_bound_for_loop_holonomy() {
    for req in zoo::default_requests() {
        let s = build(&req).unwrap();
        let base = s.metric.domain.center();
        let span = curvature_span_dimension(&s.metric, &base, true).unwrap();
        let loops = default_loops(&s.metric, &base, 256, 1).unwrap();
        let h = estimate_holonomy(&s.metric, &loops, &[]).unwrap();
        assert!(span <= h.algebra_dim, "{req}: {span} > {}", h.algebra_dim);
    }
}

#[test]
fn sphere_span_with_derivatives_is_full() {
    let s = build_str("round_sphere(n=3)").unwrap();
    assert_eq!(curvature_span_dimension(&s.metric, &[0.3, 0.1, -0.2], true).unwrap(), 3);
}

#[test]
fn flat_cone_fixed_forms_contain_the_lifted_kahler_form() {
    let cone = build_str("cone(sasakian_sphere(n=3))").unwrap();
    let base_spec = cone.cone_base.as_ref().unwrap();
    let lift = cone_lift(&base_spec.form("eta").unwrap().field, 2, &cone.metric).unwrap();
    let base = cone.metric.domain.center();
    let loops = default_loops(&cone.metric, &base, 256, 2).unwrap();
    let h = estimate_holonomy(&cone.metric, &loops, &[2]).unwrap();
    assert_eq!(h.algebra_dim, 0);
    let fixed = &h.fixed_form_subspaces[0];
    assert_eq!(fixed.dim(), 6);
    // the lift lies in the span: least-squares residual vanishes
    let w = lift.value(&base).unwrap();
    let cols: Vec<f64> = fixed.basis.iter().flat_map(|f| f.comps.clone()).collect();
    let a = DMatrix::from_column_slice(6, fixed.dim(), &cols);
    let x = a.clone().svd(true, true).solve(&nalgebra::DVector::from_vec(w.comps.clone()), 1e-12).unwrap();
    let r = &a * x - nalgebra::DVector::from_vec(w.comps.clone());
    assert!(r.amax() < 1e-8);
}

#[test]
fn loops_must_share_a_base_point() {
    let s = build_str("round_sphere(n=2)").unwrap();
    let mut loops = default_loops(&s.metric, &[0.0, 0.0], 64, 1).unwrap();
    loops.extend(default_loops(&s.metric, &[0.5, 0.0], 64, 1).unwrap());
    assert!(estimate_holonomy(&s.metric, &loops, &[1]).is_err());
    let closed = LoopSpec::new(vec![0.0, 0.0], loops[0].path.clone()).unwrap();
    assert!((loop_holonomy(&s.metric, &closed).unwrap().determinant() - 1.0).abs() < 1e-9);
    let _ = PI;
}
