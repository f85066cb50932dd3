use umbilic_core::field::Field;
use umbilic_core::hypersurface::{umbilicity_residual, Embedding};
use umbilic_core::jet::Jet;
use umbilic_core::search::{run, HypersurfaceFamily, SearchConfig, Verdict, PENALTY};

fn family(name: &str, dim: usize) -> HypersurfaceFamily {
    HypersurfaceFamily::by_name(name, dim, 24, 1.0).unwrap()
}

#[test]
fn base_member_is_umbilical() {
    let f = family("s3-in-r4", 8);
    let v = f.objective(&[0.0; 8]).unwrap();
    assert!(v.total < 1e-18, "{v:?}");
    assert!((v.lambda_mean - 1.0).abs() < 1e-12);
    let e = family("equator-in-s4", 8).objective(&[0.0; 8]).unwrap();
    assert!(e.total < 1e-18 && e.lambda_mean.abs() < 1e-12, "{e:?}");
}

#[test]
fn single_bump_is_detected() {
    let f = family("s3-in-r4", 8);
    let mut p = [0.0; 8];
    p[0] = 0.1;
    let v = f.objective(&p).unwrap();
    assert!(v.total > 1e-4, "{v:?}");
    assert!(v.umbilic_term > 0.0 && v.lambda_variance > 0.0);
}

#[test]
fn cp2_geodesic_sphere_is_not_umbilical() {
    let f = family("cp2-probe", 12);
    assert!(f.exploratory);
    assert!(f.objective(&[0.0; 12]).unwrap().total > 0.1);
}

#[test]
fn member_embedding_matches_cached_objective_path() {
    let f = family("equator-in-s4", 8);
    let p = [0.05, -0.1, 0.02, 0.0, 0.07, 0.0, -0.03, 0.04];
    let e = f.member(&p).unwrap();
    let umb2: f64 = f
        .samples
        .iter()
        .map(|u| umbilicity_residual(&e, u).unwrap().powi(2))
        .sum::<f64>()
        / f.samples.len() as f64;
    let v = f.objective(&p).unwrap();
    assert!((umb2 - v.umbilic_term).abs() < 1e-12 * (1.0 + umb2), "{umb2} vs {}", v.umbilic_term);
}

#[test]
fn residual_is_invariant_under_reparametrisation() {
    let f = family("s3-in-r4", 8);
    let p = [0.1, 0.0, -0.05, 0.08, 0.0, 0.03, 0.0, -0.02];
    let e = f.member(&p).unwrap();
    // φ(w) = w + 0.1 (w₁², w₂ w₀, sin w₂)
    let phi = Field::from_jet_map(3, 3, |w: &[Jet]| {
        Ok(vec![
            &w[0] + &(&w[1] * &w[1]).scale(0.1),
            &w[1] + &(&w[2] * &w[0]).scale(0.1),
            &w[2] + &w[2].sin().scale(0.1),
        ])
    });
    let re = Embedding::new("reparametrised", e.domain.clone(), e.ambient.clone(), e.map.compose(&phi), e.orientation)
        .unwrap();
    for w in [[0.1, 0.2, -0.3], [0.5, -0.4, 0.2], [-0.6, 0.1, 0.7]] {
        let u: Vec<f64> = phi.values(&w).unwrap();
        let a = umbilicity_residual(&re, &w).unwrap();
        let b = umbilicity_residual(&e, &u).unwrap();
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
}

#[test]
fn trust_radius_and_dimension_are_enforced() {
    let f = family("s3-in-r4", 8);
    assert!(f.objective(&[0.5; 8]).is_err());
    assert!(f.objective(&[0.0; 7]).is_err());
    assert!(HypersurfaceFamily::by_name("hp2", 8, 24, 1.0).is_err());
    assert!(HypersurfaceFamily::by_name("s3-in-r4", 40, 24, 1.0).is_err());
}

#[test]
fn collapsed_members_are_penalised() {
    let f = HypersurfaceFamily::by_name("s3-in-r4", 1, 24, 100.0).unwrap();
    // pushed out of the ambient chart
    let v = f.objective(&[-30.0]).unwrap();
    assert_eq!(v.total, PENALTY);
    assert!(v.immersion_failure.unwrap().outside_ambient);
    // pulled through the centre: the sample nearest the bump centre degenerates
    let worst = (0..2000)
        .map(|i| 0.5 + i as f64 * 1e-3)
        .filter_map(|t| f.objective(&[t]).unwrap().immersion_failure)
        .next();
    let fail = worst.expect("no fold detected");
    assert!(!fail.outside_ambient && fail.sigma_min <= 1e-3);
}

fn positive_control(name: &str) {
    for seed in 1..=5 {
        let mut c = SearchConfig::new(name, 8);
        c.seed = seed;
        let r = run(&c).unwrap();
        assert_eq!(r.verdict, Verdict::ConvergedToUmbilical, "{name} seed {seed}: {}", r.best_objective);
        assert!(r.best_objective < 1e-6 && r.evaluations <= 2000);
        assert_eq!(r.best_objective, r.trace.iter().cloned().fold(f64::INFINITY, f64::min));
    }
}

#[test]
fn sphere_in_flat_space_is_found_from_five_seeds() {
    positive_control("s3-in-r4");
}

#[test]
fn equator_is_found_from_five_seeds() {
    positive_control("equator-in-s4");
    let r = run(&SearchConfig::new("equator-in-s4", 8)).unwrap();
    assert!(r.best_terms.lambda_mean.abs() < 1e-4, "{:?}", r.best_terms);
}

#[test]
fn searches_are_reproducible() {
    let mut c = SearchConfig::new("s3-in-r4", 4);
    c.budget = 300;
    assert_eq!(run(&c).unwrap(), run(&c).unwrap());
}

#[test]
fn cp2_probe_completes_with_a_trace() {
    let mut c = SearchConfig::new("cp2-probe", 12);
    c.budget = 600;
    let r = run(&c).unwrap();
    assert!(r.exploratory);
    assert!(!r.trace.is_empty() && r.best_objective.is_finite());
    assert!(r.trace.windows(2).all(|w| w[1] <= w[0]));
    println!("cp2 probe floor {:e} after {} evaluations ({})", r.best_objective, r.evaluations, r.verdict);
}
