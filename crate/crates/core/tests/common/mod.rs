//! Shared fixtures for the integration suites: deterministic random loops in
//! generic position, standard puncture layouts, and scenario builders.

#![allow(dead_code)]

use holobundle::geometry::{check_generic, PlanePath, Point2, Puncture};
use holobundle::holonomy::FluxScenario;
use holobundle::liegroups::{AlgebraElement, GroupTag};
use holobundle::Complex64;
use rand::Rng;

/// Punctures with distinct x-coordinates on a fixed layout.
pub fn standard_punctures(rank: u32) -> Vec<Puncture> {
    let xs = [0.0, 1.37, -1.23, 2.61];
    let ys = [0.0, 0.41, -0.29, 0.17];
    (1..=rank)
        .map(|k| {
            Puncture::new(
                Point2::new(xs[(k - 1) as usize], ys[(k - 1) as usize]),
                k,
            )
        })
        .collect()
}

pub fn standard_basepoint() -> Point2 {
    Point2::new(0.43, -3.1)
}

/// A smooth star-shaped loop with a random center, radius profile, and
/// winding count, resampled until it is in generic position.
pub fn random_generic_loop(
    rng: &mut impl Rng,
    vertex_count: usize,
    punctures: &[Puncture],
) -> PlanePath {
    loop {
        let center = Point2::new(rng.random_range(-2.0..2.5), rng.random_range(-2.0..2.5));
        let base_radius = rng.random_range(0.4..2.4);
        let turns = if rng.random_bool(0.25) { 2 } else { 1 };
        let ccw = rng.random_bool(0.5);
        let harmonics: Vec<(f64, f64)> = (0..4)
            .map(|_| (rng.random_range(-0.08..0.08), rng.random_range(0.0..6.28)))
            .collect();
        let phase = rng.random_range(0.0..6.28);

        let mut vertices = Vec::with_capacity(vertex_count);
        for i in 0..vertex_count {
            let raw = turns as f64 * 2.0 * std::f64::consts::PI * i as f64 / vertex_count as f64;
            let theta = phase + if ccw { raw } else { -raw };
            let mut radius = base_radius;
            for (k, &(a, p)) in harmonics.iter().enumerate() {
                radius *= 1.0 + a * ((k + 1) as f64 * theta + p).cos();
            }
            vertices.push(Point2::new(
                center.x + radius * theta.cos(),
                center.y + radius * theta.sin(),
            ));
        }
        let Ok(path) = PlanePath::closed(vertices) else {
            continue;
        };
        if check_generic(&path, punctures).is_ok() {
            return path;
        }
    }
}

/// Smallest distance from the path to any puncture; the homotopy-preserving
/// jitter budget.
pub fn clearance(path: &PlanePath, punctures: &[Puncture]) -> f64 {
    punctures
        .iter()
        .map(|p| path.min_distance_to(&p.position()))
        .fold(f64::INFINITY, f64::min)
}

fn jittered(path: &PlanePath, rng: &mut impl Rng, amount: f64) -> PlanePath {
    let mut vertices: Vec<Point2> = path.vertices().to_vec();
    let last = vertices.len() - 1;
    for v in vertices.iter_mut().take(last).skip(1) {
        v.x += rng.random_range(-amount..amount);
        v.y += rng.random_range(-amount..amount);
    }
    vertices[last] = vertices[0];
    PlanePath::closed(vertices).unwrap()
}

/// Homotopic variants of a loop: refinements and vertex jitter well inside
/// the clearance budget. Five variants including the original.
pub fn deformation_variants(
    path: &PlanePath,
    punctures: &[Puncture],
    rng: &mut impl Rng,
) -> Vec<PlanePath> {
    let budget = 0.2 * clearance(path, punctures);
    let variants = vec![
        path.clone(),
        path.refined(2),
        path.refined(3),
        jittered(&path.refined(2), rng, budget),
        jittered(path, rng, budget * 0.5),
    ];
    variants
        .into_iter()
        .filter(|p| check_generic(p, punctures).is_ok())
        .collect()
}

pub fn u1_scenario(rank: u32, alphas: &[f64]) -> FluxScenario {
    let fluxes = alphas
        .iter()
        .map(|&a| AlgebraElement::from_real_coefficients(GroupTag::U1, &[a]).unwrap())
        .collect();
    FluxScenario::new(
        standard_punctures(rank),
        standard_basepoint(),
        GroupTag::U1,
        fluxes,
    )
    .unwrap()
}

pub fn su2_scenario(rank: u32, coefficient_rows: &[[f64; 3]]) -> FluxScenario {
    let fluxes = coefficient_rows
        .iter()
        .map(|row| AlgebraElement::from_real_coefficients(GroupTag::Su2, row).unwrap())
        .collect();
    FluxScenario::new(
        standard_punctures(rank),
        standard_basepoint(),
        GroupTag::Su2,
        fluxes,
    )
    .unwrap()
}

pub fn scenario_for(tag: GroupTag, rank: u32, rng: &mut impl Rng) -> FluxScenario {
    let scale = match tag {
        GroupTag::Sl2C => 0.3,
        _ => 1.0,
    };
    let fluxes = (0..rank)
        .map(|_| holobundle::liegroups::random_algebra(tag, rng, scale))
        .collect();
    FluxScenario::new(standard_punctures(rank), standard_basepoint(), tag, fluxes).unwrap()
}

pub fn random_word(rng: &mut impl Rng, rank: u32, max_len: usize) -> holobundle::Word {
    let len = rng.random_range(0..=max_len);
    let letters = (0..len).map(|_| {
        holobundle::Letter::new(rng.random_range(1..=rank), rng.random_bool(0.5))
    });
    holobundle::Word::reduce(rank, letters).unwrap()
}

/// Complex vector helper.
pub fn cvec(components: &[(f64, f64)]) -> nalgebra::DVector<Complex64> {
    nalgebra::DVector::from_iterator(
        components.len(),
        components.iter().map(|&(re, im)| Complex64::new(re, im)),
    )
}
