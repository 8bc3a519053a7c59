//! Holonomy suite: the homomorphism law, conjugation covariance, agreement
//! between the algebraic holonomy and the numeric Wilson line on flat
//! scenarios, refinement convergence, and the flatness scanner.

mod common;

use common::{deformation_variants, random_word, scenario_for, standard_punctures, u1_scenario};
use holobundle::geometry::{loop_realizing_word, PlanePath, Point2};
use holobundle::holonomy::{
    connection_at, holonomy_of_loop, verify_flatness, wilson_line, wilson_line_adaptive,
    FluxScenario, GridSpec, HolonomyError, HolonomyMap,
};
use holobundle::liegroups::{exp, AlgebraElement, GroupElement, GroupTag};
use holobundle::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn holonomy_is_a_homomorphism_on_all_groups() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for tag in GroupTag::ALL {
        let scenario = scenario_for(tag, 3, &mut rng);
        let map = HolonomyMap::from_scenario(&scenario);
        let mut worst = 0.0f64;
        for _ in 0..250 {
            let w1 = random_word(&mut rng, 3, 16);
            let w2 = random_word(&mut rng, 3, 16);
            let joined = map.holonomy_of_word(&w1.concat(&w2).unwrap()).unwrap();
            let split = map
                .holonomy_of_word(&w1)
                .unwrap()
                .multiply(&map.holonomy_of_word(&w2).unwrap())
                .unwrap();
            worst = worst.max(joined.distance(&split).unwrap());
        }
        assert!(worst <= 1e-12, "{tag:?}: homomorphism defect {worst:.3e}");
    }
}

#[test]
fn conjugating_generator_images_conjugates_every_holonomy() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let scenario = scenario_for(GroupTag::Su2, 3, &mut rng);
    let map = HolonomyMap::from_scenario(&scenario);
    let h = holobundle::liegroups::random_element(GroupTag::Su2, &mut rng, 1.0);
    let conjugated_images: Vec<GroupElement> = (1..=3)
        .map(|k| {
            h.multiply(map.generator_image(k))
                .unwrap()
                .multiply(&h.inverse())
                .unwrap()
        })
        .collect();
    let conjugated = HolonomyMap::from_images(3, conjugated_images).unwrap();
    for _ in 0..200 {
        let w = random_word(&mut rng, 3, 20);
        let direct = conjugated.holonomy_of_word(&w).unwrap();
        let expected = h
            .multiply(&map.holonomy_of_word(&w).unwrap())
            .unwrap()
            .multiply(&h.inverse())
            .unwrap();
        assert!(direct.distance(&expected).unwrap() <= 1e-12);
    }
}

/// Independent quadrature oracle: the closed line integral of the abelian
/// connection around a puncture recovers the flux coefficient.
#[test]
fn abelian_line_integral_recovers_the_flux() {
    let alpha = 0.83;
    let scenario = u1_scenario(1, &[alpha]);
    let center = scenario.punctures()[0].position();
    let n = 20_000;
    let radius = 0.9;
    let mut integral = 0.0;
    for i in 0..n {
        let t0 = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
        let t1 = 2.0 * std::f64::consts::PI * (i + 1) as f64 / n as f64;
        let tm = 0.5 * (t0 + t1);
        let mid = Point2::new(center.x + radius * tm.cos(), center.y + radius * tm.sin());
        let (ax, ay) = connection_at(&scenario, mid).unwrap();
        let dx = radius * (t1.cos() - t0.cos());
        let dy = radius * (t1.sin() - t0.sin());
        integral += ax.matrix()[(0, 0)].im * dx + ay.matrix()[(0, 0)].im * dy;
    }
    assert!((integral - alpha).abs() <= 1e-6, "integral {integral}");
}

#[test]
fn wilson_line_matches_abelian_closed_form() {
    // small flux keeps the midpoint-rule constant inside the 1e-8 budget
    let alpha = 0.05;
    let scenario = u1_scenario(1, &[alpha]);
    let center = scenario.punctures()[0].position();
    let path = holobundle::geometry::circle_path(center, 1.0, 64, true);
    let w = wilson_line(&scenario, &path, 10_000).unwrap();
    let expected = Complex64::new(0.0, alpha).exp();
    assert!(
        (w.matrix()[(0, 0)] - expected).norm() <= 1e-8,
        "error {:.3e}",
        (w.matrix()[(0, 0)] - expected).norm()
    );
}

#[test]
fn single_vortex_path_ordering_collapses_to_the_exponential() {
    let scenario = common::su2_scenario(1, &[[1.1, -0.6, 0.4]]);
    let center = scenario.punctures()[0].position();
    let path = holobundle::geometry::circle_path(center, 1.2, 64, true);
    let w = wilson_line(&scenario, &path, 10_000).unwrap();
    let expected = exp(scenario.flux(1));
    let err = w.distance(&expected).unwrap();
    assert!(err <= 1e-6, "error {err:.3e}");

    // and the loop holonomy is the same element through classification
    let mut based = vec![scenario.basepoint()];
    based.extend_from_slice(path.vertices());
    based.push(scenario.basepoint());
    let based_path = PlanePath::closed(based).unwrap();
    let algebraic = holonomy_of_loop(&scenario, &based_path).unwrap();
    assert!(algebraic.distance(&expected).unwrap() <= 1e-13);
}

#[test]
fn holonomy_depends_only_on_the_homotopy_class() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let scenario = common::su2_scenario(
        2,
        &[[0.9, 0.2, -0.3], [-0.4, 1.0, 0.6]],
    );
    let word = holobundle::Word::parse(2, "c1 c2").unwrap();
    let base = loop_realizing_word(&word, scenario.punctures(), scenario.basepoint()).unwrap();
    let variants = deformation_variants(&base, scenario.punctures(), &mut rng);
    assert!(variants.len() >= 4);
    let reference = holonomy_of_loop(&scenario, &base).unwrap();
    for variant in &variants {
        let value = holonomy_of_loop(&scenario, variant).unwrap();
        assert!(value.distance(&reference).unwrap() <= 1e-12);
    }
}

#[test]
fn wilson_line_is_homotopy_invariant_on_flat_scenarios() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    // abelian two-flux scenario is flat; so is one non-abelian vortex
    let scenarios = vec![
        u1_scenario(2, &[0.7, -0.4]),
        common::su2_scenario(1, &[[0.8, 0.5, -0.2]]),
    ];
    for scenario in scenarios {
        assert!(scenario.is_flat());
        let word = holobundle::Word::parse(scenario.rank(), "c1").unwrap();
        let base =
            loop_realizing_word(&word, scenario.punctures(), scenario.basepoint()).unwrap();
        let exact = HolonomyMap::from_scenario(&scenario)
            .holonomy_of_word(&word)
            .unwrap();
        for variant in deformation_variants(&base, scenario.punctures(), &mut rng) {
            let w = wilson_line(&scenario, &variant, 20_000).unwrap();
            let err = w.distance(&exact).unwrap();
            assert!(err <= 1e-6, "deformation error {err:.3e}");
        }
    }
}

#[test]
fn refinement_converges_at_second_order() {
    let scenario = u1_scenario(1, &[1.0]);
    let center = scenario.punctures()[0].position();
    let path = holobundle::geometry::circle_path(center, 1.0, 64, true);
    let exact = Complex64::new(0.0, 1.0).exp();
    let mut points = Vec::new();
    for k in 0..5 {
        let steps = 500usize << k;
        let w = wilson_line(&scenario, &path, steps).unwrap();
        let err = (w.matrix()[(0, 0)] - exact).norm();
        points.push(((steps as f64).ln(), err.ln()));
    }
    // least-squares slope of ln(err) against ln(steps)
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    assert!(
        (slope + 2.0).abs() <= 0.3,
        "observed convergence slope {slope:.3}"
    );
}

#[test]
fn adaptive_refinement_converges_and_reports_failure() {
    let scenario = u1_scenario(1, &[1.0]);
    let center = scenario.punctures()[0].position();
    let path = holobundle::geometry::circle_path(center, 1.0, 48, true);
    let w = wilson_line_adaptive(&scenario, &path, 100, 1e-9, 12).unwrap();
    let exact = Complex64::new(0.0, 1.0).exp();
    assert!((w.matrix()[(0, 0)] - exact).norm() <= 1e-8);

    // one doubling cannot reach an unattainable tolerance
    let result = wilson_line_adaptive(&scenario, &path, 100, 1e-14, 1);
    assert!(matches!(result, Err(HolonomyError::NonConvergence { .. })));
}

#[test]
fn flatness_scan_clears_abelian_and_single_vortex_scenarios() {
    let u1 = u1_scenario(2, &[1.0, -0.7]);
    let report = verify_flatness(&u1, &GridSpec::covering(&u1, 0.8, 0.01)).unwrap();
    assert!(!report.non_flat);
    assert!(
        report.max_plaquette_deviation <= 1e-8,
        "abelian deviation {:.3e}",
        report.max_plaquette_deviation
    );

    let su2 = common::su2_scenario(1, &[[1.2, 0.8, -0.5]]);
    let report = verify_flatness(&su2, &GridSpec::covering(&su2, 0.8, 0.01)).unwrap();
    assert!(!report.non_flat);
    assert!(
        report.max_plaquette_deviation <= 1e-8,
        "single-vortex deviation {:.3e}",
        report.max_plaquette_deviation
    );
}

#[test]
fn flatness_scan_flags_non_commuting_fluxes() {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let scenario = common::su2_scenario(2, &[[2.0 * half_pi, 0.0, 0.0], [0.0, 2.0 * half_pi, 0.0]]);
    assert!(!scenario.is_flat());
    let report = verify_flatness(&scenario, &GridSpec::covering(&scenario, 0.5, 0.01)).unwrap();
    assert!(report.non_flat, "commutator flag not raised");
    assert!(
        report.max_plaquette_deviation > 1e-6,
        "curvature not observed: {:.3e}",
        report.max_plaquette_deviation
    );
    assert!(!report.commutator_norms.is_empty());
}

#[test]
fn scenario_validation_rejects_bad_configurations() {
    let fluxes = vec![AlgebraElement::zero(GroupTag::U1)];
    // basepoint on a cut ray
    let result = FluxScenario::new(
        vec![holobundle::Puncture::new(Point2::new(0.0, 0.0), 1)],
        Point2::new(0.0, -1.0),
        GroupTag::U1,
        fluxes.clone(),
    );
    assert!(matches!(result, Err(HolonomyError::Scenario(_))));

    // flux count disagrees with the rank
    let result = FluxScenario::new(
        standard_punctures(2),
        Point2::new(0.43, -3.1),
        GroupTag::U1,
        fluxes,
    );
    assert!(matches!(result, Err(HolonomyError::Scenario(_))));
}
