//! The holonomy homomorphism from loop classes into the structure group, its
//! numeric counterpart (the time-ordered Wilson line of the vortex-sum
//! connection), and flatness diagnostics.
//!
//! Normalization: the generator of puncture `k` maps to `exp(F_k)`, and the
//! connection carries `F_k / 2pi`, so one counterclockwise turn produces
//! exactly `exp(F_k)`. For several non-commuting fluxes the vortex-sum
//! connection is not flat; the homomorphism remains the definition of the
//! holonomy, and the Wilson line is only compared against it on flat
//! scenarios.

use rayon::prelude::*;
use thiserror::Error;

use crate::freegroup::{FreeGroupError, Word};
use crate::geometry::{self, GeometryError, PlanePath, Point2, Puncture};
use crate::liegroups::{exp, AlgebraElement, GroupElement, GroupTag, LieGroupError};

/// Minimum distance from a Wilson-line path to any puncture.
pub const WILSON_CLEARANCE: f64 = 1e-3;
/// Minimum distance from a connection evaluation point to any puncture.
pub const CONNECTION_CLEARANCE: f64 = 1e-6;
/// Commutator norm above which a multi-flux scenario is declared non-flat.
pub const FLATNESS_COMMUTATOR_TOL: f64 = 1e-12;
/// Wilson products are re-projected onto the group this often.
const REPROJECT_EVERY: usize = 1024;

#[derive(Debug, Error)]
pub enum HolonomyError {
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: u32, right: u32 },
    #[error("loop starts {distance:.3e} away from the scenario basepoint")]
    BasepointMismatch { distance: f64 },
    #[error("point within {distance:.3e} of puncture {label}; clearance is {required:.1e}")]
    PunctureProximity {
        label: u32,
        distance: f64,
        required: f64,
    },
    #[error("wilson line failed to converge; last refinement moved by {last_delta:.3e}")]
    NonConvergence { last_delta: f64 },
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    FreeGroup(#[from] FreeGroupError),
    #[error(transparent)]
    Lie(#[from] LieGroupError),
}

/// Everything defining an Aharonov-Bohm configuration: punctures, basepoint,
/// structure group, and one flux generator per puncture.
#[derive(Clone, Debug)]
pub struct FluxScenario {
    rank: u32,
    punctures: Vec<Puncture>,
    basepoint: Point2,
    group: GroupTag,
    fluxes: Vec<AlgebraElement>,
}

impl FluxScenario {
    pub fn new(
        punctures: Vec<Puncture>,
        basepoint: Point2,
        group: GroupTag,
        fluxes: Vec<AlgebraElement>,
    ) -> Result<Self, HolonomyError> {
        let rank = punctures.len() as u32;
        if rank == 0 {
            return Err(HolonomyError::Scenario("at least one puncture".into()));
        }
        let mut by_label = punctures.clone();
        by_label.sort_by_key(|p| p.label());
        for (i, p) in by_label.iter().enumerate() {
            if p.label() != (i + 1) as u32 {
                return Err(HolonomyError::Scenario(format!(
                    "puncture labels must be 1..={rank}, found {}",
                    p.label()
                )));
            }
        }
        for (i, a) in by_label.iter().enumerate() {
            for b in by_label.iter().skip(i + 1) {
                if (a.position().x - b.position().x).abs() <= 2.0 * geometry::GENERICITY_TOL {
                    return Err(HolonomyError::Scenario(format!(
                        "punctures {} and {} share an x-coordinate",
                        a.label(),
                        b.label()
                    )));
                }
            }
            if a.position().distance(&basepoint) <= geometry::GENERICITY_TOL {
                return Err(HolonomyError::Scenario(
                    "basepoint coincides with a puncture".into(),
                ));
            }
            if (a.position().x - basepoint.x).abs() <= geometry::GENERICITY_TOL
                && basepoint.y <= a.position().y
            {
                return Err(HolonomyError::Scenario(
                    "basepoint sits on a cut ray".into(),
                ));
            }
        }
        if fluxes.len() != rank as usize {
            return Err(HolonomyError::Scenario(format!(
                "need {rank} fluxes, got {}",
                fluxes.len()
            )));
        }
        for f in &fluxes {
            if f.tag() != group {
                return Err(HolonomyError::Lie(LieGroupError::TagMismatch {
                    left: f.tag(),
                    right: group,
                }));
            }
        }
        Ok(Self {
            rank,
            punctures: by_label,
            basepoint,
            group,
            fluxes,
        })
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn punctures(&self) -> &[Puncture] {
        &self.punctures
    }

    pub fn basepoint(&self) -> Point2 {
        self.basepoint
    }

    pub fn group(&self) -> GroupTag {
        self.group
    }

    pub fn fluxes(&self) -> &[AlgebraElement] {
        &self.fluxes
    }

    /// Flux generator of puncture `label` (1-based).
    pub fn flux(&self, label: u32) -> &AlgebraElement {
        &self.fluxes[(label - 1) as usize]
    }

    /// True when all flux generators commute pairwise or there is only one;
    /// exactly the scenarios where the vortex-sum connection is flat.
    pub fn is_flat(&self) -> bool {
        if self.rank == 1 {
            return true;
        }
        self.max_commutator_norm() <= FLATNESS_COMMUTATOR_TOL
    }

    pub fn max_commutator_norm(&self) -> f64 {
        let mut max = 0.0f64;
        for i in 0..self.fluxes.len() {
            for j in (i + 1)..self.fluxes.len() {
                let c = self.fluxes[i]
                    .commutator(&self.fluxes[j])
                    .expect("scenario fluxes share a tag");
                max = max.max(c.norm());
            }
        }
        max
    }
}

/// The homomorphism from loop words into the group: generator images and
/// their inverses, applied in word order.
#[derive(Clone, Debug)]
pub struct HolonomyMap {
    rank: u32,
    tag: GroupTag,
    images: Vec<GroupElement>,
    inverses: Vec<GroupElement>,
}

impl HolonomyMap {
    /// Generator images `exp(F_k)` from a scenario.
    pub fn from_scenario(scenario: &FluxScenario) -> Self {
        let images: Vec<GroupElement> = scenario.fluxes.iter().map(exp).collect();
        Self::from_images_unchecked(scenario.rank, scenario.group, images)
    }

    /// Explicit generator images; all tags must agree.
    pub fn from_images(rank: u32, images: Vec<GroupElement>) -> Result<Self, HolonomyError> {
        if images.len() != rank as usize || rank == 0 {
            return Err(HolonomyError::RankMismatch {
                left: rank,
                right: images.len() as u32,
            });
        }
        let tag = images[0].tag();
        for g in &images {
            if g.tag() != tag {
                return Err(HolonomyError::Lie(LieGroupError::TagMismatch {
                    left: g.tag(),
                    right: tag,
                }));
            }
        }
        Ok(Self::from_images_unchecked(rank, tag, images))
    }

    fn from_images_unchecked(rank: u32, tag: GroupTag, images: Vec<GroupElement>) -> Self {
        let inverses = images.iter().map(GroupElement::inverse).collect();
        Self {
            rank,
            tag,
            images,
            inverses,
        }
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn tag(&self) -> GroupTag {
        self.tag
    }

    pub fn generator_image(&self, label: u32) -> &GroupElement {
        &self.images[(label - 1) as usize]
    }

    /// Ordered product of generator images along the word.
    pub fn holonomy_of_word(&self, word: &Word) -> Result<GroupElement, HolonomyError> {
        if word.rank() != self.rank {
            return Err(HolonomyError::RankMismatch {
                left: self.rank,
                right: word.rank(),
            });
        }
        let mut acc = GroupElement::identity(self.tag);
        for letter in word.letters() {
            let factor = if letter.is_positive() {
                &self.images[(letter.index() - 1) as usize]
            } else {
                &self.inverses[(letter.index() - 1) as usize]
            };
            acc = acc.multiply(factor)?;
        }
        Ok(acc)
    }
}

/// Classifies the loop, then applies the holonomy homomorphism. The result
/// depends only on the homotopy class of the loop.
pub fn holonomy_of_loop(
    scenario: &FluxScenario,
    path: &PlanePath,
) -> Result<GroupElement, HolonomyError> {
    let start = path.vertices()[0];
    let distance = start.distance(&scenario.basepoint);
    if distance > 1e-9 {
        return Err(HolonomyError::BasepointMismatch { distance });
    }
    let word = geometry::word_of_loop(path, &scenario.punctures, scenario.rank)?;
    HolonomyMap::from_scenario(scenario).holonomy_of_word(&word)
}

/// The vortex-sum connection at `x`:
/// `A(x) = sum_k (F_k / 2pi) * (-(y - y_k), x - x_k) / r_k^2`,
/// returned as its two algebra-valued components.
pub fn connection_at(
    scenario: &FluxScenario,
    x: Point2,
) -> Result<(AlgebraElement, AlgebraElement), HolonomyError> {
    let mut ax = AlgebraElement::zero(scenario.group);
    let mut ay = AlgebraElement::zero(scenario.group);
    for p in &scenario.punctures {
        let dx = x.x - p.position().x;
        let dy = x.y - p.position().y;
        let r_sq = dx * dx + dy * dy;
        let r = r_sq.sqrt();
        if r < CONNECTION_CLEARANCE {
            return Err(HolonomyError::PunctureProximity {
                label: p.label(),
                distance: r,
                required: CONNECTION_CLEARANCE,
            });
        }
        let flux = scenario.flux(p.label());
        let two_pi = 2.0 * std::f64::consts::PI;
        ax = ax.add(&flux.scale(-dy / (two_pi * r_sq)))?;
        ay = ay.add(&flux.scale(dx / (two_pi * r_sq)))?;
    }
    Ok((ax, ay))
}

/// A gauge field as an evaluable map from points to connection components.
pub type FieldFn<'a> =
    dyn Fn(Point2) -> Result<(AlgebraElement, AlgebraElement), HolonomyError> + Sync + 'a;

fn check_clearance(path: &PlanePath, punctures: &[Puncture]) -> Result<(), HolonomyError> {
    for p in punctures {
        let mut min = f64::INFINITY;
        for (a, b) in path.segments() {
            let d = segment_distance(a, b, p.position());
            min = min.min(d);
        }
        if min < WILSON_CLEARANCE {
            return Err(HolonomyError::PunctureProximity {
                label: p.label(),
                distance: min,
                required: WILSON_CLEARANCE,
            });
        }
    }
    Ok(())
}

fn segment_distance(a: Point2, b: Point2, p: Point2) -> f64 {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let len_sq = dx * dx + dy * dy;
    if len_sq == 0.0 {
        return a.distance(&p);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len_sq).clamp(0.0, 1.0);
    Point2::new(a.x + t * dx, a.y + t * dy).distance(&p)
}

/// Time-ordered exponential of an arbitrary field along a path: the midpoint
/// product of `exp(A(mid) . dl)` over refined segments, later segments
/// multiplying on the left.
pub fn wilson_line_with_field(
    field: &FieldFn<'_>,
    tag: GroupTag,
    path: &PlanePath,
    steps: usize,
) -> Result<GroupElement, HolonomyError> {
    assert!(steps >= 1, "wilson line needs at least one step");
    let total_len = path.length();
    if total_len == 0.0 {
        return Ok(GroupElement::identity(tag));
    }
    let mut acc = GroupElement::identity(tag);
    let mut factors = 0usize;
    for (a, b) in path.segments() {
        let seg_len = a.distance(&b);
        if seg_len == 0.0 {
            continue;
        }
        let substeps = ((steps as f64 * seg_len / total_len).ceil() as usize).max(1);
        for i in 0..substeps {
            let t0 = i as f64 / substeps as f64;
            let t1 = (i + 1) as f64 / substeps as f64;
            let tm = 0.5 * (t0 + t1);
            let mid = Point2::new(a.x + tm * (b.x - a.x), a.y + tm * (b.y - a.y));
            let (ax, ay) = field(mid)?;
            let dl_x = (t1 - t0) * (b.x - a.x);
            let dl_y = (t1 - t0) * (b.y - a.y);
            let integrand = ax.scale(dl_x).add(&ay.scale(dl_y))?;
            acc = exp(&integrand).multiply(&acc)?;
            factors += 1;
            if factors % REPROJECT_EVERY == 0 {
                acc = acc.project();
            }
        }
    }
    Ok(acc.project())
}

/// Wilson line of the scenario's vortex-sum connection. The path must stay
/// clear of every puncture.
pub fn wilson_line(
    scenario: &FluxScenario,
    path: &PlanePath,
    steps: usize,
) -> Result<GroupElement, HolonomyError> {
    check_clearance(path, &scenario.punctures)?;
    let field = |x: Point2| connection_at(scenario, x);
    wilson_line_with_field(&field, scenario.group, path, steps)
}

/// Doubles the step count until two successive refinements agree within
/// `tol`; errors with the last delta when `max_doublings` is exhausted.
pub fn wilson_line_adaptive(
    scenario: &FluxScenario,
    path: &PlanePath,
    initial_steps: usize,
    tol: f64,
    max_doublings: u32,
) -> Result<GroupElement, HolonomyError> {
    let mut steps = initial_steps.max(1);
    let mut previous = wilson_line(scenario, path, steps)?;
    for _ in 0..max_doublings {
        steps *= 2;
        let refined = wilson_line(scenario, path, steps)?;
        let delta = refined.distance(&previous)?;
        if delta <= tol {
            return Ok(refined);
        }
        previous = refined;
    }
    let final_delta = wilson_line(scenario, path, steps * 2)?.distance(&previous)?;
    Err(HolonomyError::NonConvergence {
        last_delta: final_delta,
    })
}

/// Rectangular scan region for the plaquette sweep.
#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
    /// Side length of each square plaquette.
    pub plaquette_size: f64,
    /// Midpoint substeps per plaquette side.
    pub steps_per_side: usize,
    /// Plaquettes closer than this to a puncture are skipped.
    pub puncture_margin: f64,
}

impl GridSpec {
    /// A scan region covering all punctures with padding.
    pub fn covering(scenario: &FluxScenario, padding: f64, plaquette_size: f64) -> Self {
        let xs: Vec<f64> = scenario.punctures().iter().map(|p| p.position().x).collect();
        let ys: Vec<f64> = scenario.punctures().iter().map(|p| p.position().y).collect();
        let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
        let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // the margin keeps the integrand's curvature (growing as 1/r^3)
        // small enough for the midpoint rule to resolve plaquettes to 1e-8
        Self {
            x_min: min(&xs) - padding,
            y_min: min(&ys) - padding,
            x_max: max(&xs) + padding,
            y_max: max(&ys) + padding,
            plaquette_size,
            steps_per_side: 24,
            puncture_margin: 0.3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FlatnessReport {
    /// Largest distance of a plaquette Wilson loop from the identity.
    pub max_plaquette_deviation: f64,
    /// Center of the worst plaquette.
    pub worst_plaquette: Point2,
    /// Frobenius norms of all pairwise flux commutators.
    pub commutator_norms: Vec<(u32, u32, f64)>,
    /// Raised when any commutator exceeds tolerance and the rank is >= 2.
    pub non_flat: bool,
    pub plaquettes_evaluated: usize,
    pub plaquettes_skipped: usize,
}

/// Scans square plaquettes over the grid and reports the largest Wilson-loop
/// deviation from the identity together with the flux commutator table.
pub fn verify_flatness(
    scenario: &FluxScenario,
    grid: &GridSpec,
) -> Result<FlatnessReport, HolonomyError> {
    let a = grid.plaquette_size;
    let nx = (((grid.x_max - grid.x_min) / a).floor() as usize).max(1);
    let ny = (((grid.y_max - grid.y_min) / a).floor() as usize).max(1);

    let cells: Vec<(usize, usize)> = (0..nx)
        .flat_map(|i| (0..ny).map(move |j| (i, j)))
        .collect();
    let results: Vec<Option<(f64, Point2)>> = cells
        .par_iter()
        .map(|&(i, j)| {
            let x0 = grid.x_min + i as f64 * a;
            let y0 = grid.y_min + j as f64 * a;
            let center = Point2::new(x0 + 0.5 * a, y0 + 0.5 * a);
            let clear = scenario.punctures().iter().all(|p| {
                let d = p.position().distance(&center);
                d > grid.puncture_margin + a
            });
            if !clear {
                return None;
            }
            let corners = vec![
                Point2::new(x0, y0),
                Point2::new(x0 + a, y0),
                Point2::new(x0 + a, y0 + a),
                Point2::new(x0, y0 + a),
            ];
            let loop_path = PlanePath::closed(corners).expect("plaquette is a quadrilateral");
            let w = wilson_line(scenario, &loop_path, 4 * grid.steps_per_side).ok()?;
            let deviation = w
                .distance(&GroupElement::identity(scenario.group()))
                .expect("same tag");
            Some((deviation, center))
        })
        .collect();

    let mut max_dev = 0.0f64;
    let mut worst = Point2::new(f64::NAN, f64::NAN);
    let mut evaluated = 0usize;
    let mut skipped = 0usize;
    for r in results {
        match r {
            Some((dev, center)) => {
                evaluated += 1;
                if dev > max_dev {
                    max_dev = dev;
                    worst = center;
                }
            }
            None => skipped += 1,
        }
    }

    let mut commutator_norms = Vec::new();
    for i in 0..scenario.fluxes.len() {
        for j in (i + 1)..scenario.fluxes.len() {
            let norm = scenario.fluxes[i]
                .commutator(&scenario.fluxes[j])?
                .norm();
            commutator_norms.push(((i + 1) as u32, (j + 1) as u32, norm));
        }
    }
    let non_flat = scenario.rank >= 2
        && commutator_norms
            .iter()
            .any(|&(_, _, n)| n > FLATNESS_COMMUTATOR_TOL);

    Ok(FlatnessReport {
        max_plaquette_deviation: max_dev,
        worst_plaquette: worst,
        commutator_norms,
        non_flat,
        plaquettes_evaluated: evaluated,
        plaquettes_skipped: skipped,
    })
}
