//! Sections of the associated vector bundle: canonical representatives of
//! fiber classes, parallel transport of vectors along paths, the covariant
//! derivative `d + A`, and gauge transformations.
//!
//! Transport shares the Wilson-line convention: one counterclockwise loop
//! around puncture `k` acts on a vector by `exp(F_k)`.

use nalgebra::DVector;
use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::{PlanePath, Point2};
use crate::holonomy::{
    connection_at, wilson_line, wilson_line_with_field, FieldFn, FluxScenario, HolonomyError,
};
use crate::liegroups::{
    project_to_algebra, AlgebraElement, GroupElement, GroupTag, LieGroupError,
};

/// Finite-difference step for grid stencils and gauge derivatives.
pub const FD_STEP: f64 = 1e-4;
/// Grid lookups match points within this distance.
const GRID_MATCH_TOL: f64 = 1e-9;

pub type CVector = DVector<Complex64>;

#[derive(Debug, Error)]
pub enum SectionError {
    #[error("vector has dimension {got}, the representation needs {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("grid too sparse for the stencil: no sample at ({x}, {y})")]
    GridTooSparse { x: f64, y: f64 },
    #[error("grid points and values disagree in length")]
    ShapeMismatch,
    #[error("grid contains duplicate or non-finite points")]
    BadGrid,
    #[error(transparent)]
    Holonomy(#[from] HolonomyError),
    #[error(transparent)]
    Lie(#[from] LieGroupError),
}

/// A point of the associated bundle: base point, gauge factor, and fiber
/// vector, representing the class of `((x, g), z)`.
#[derive(Clone, Debug)]
pub struct FiberPoint {
    base: Point2,
    gauge: GroupElement,
    vector: CVector,
}

impl FiberPoint {
    pub fn new(base: Point2, gauge: GroupElement, vector: CVector) -> Result<Self, SectionError> {
        if vector.len() != gauge.dim() {
            return Err(SectionError::DimensionMismatch {
                expected: gauge.dim(),
                got: vector.len(),
            });
        }
        Ok(Self {
            base,
            gauge,
            vector,
        })
    }

    pub fn base(&self) -> Point2 {
        self.base
    }

    pub fn gauge(&self) -> &GroupElement {
        &self.gauge
    }

    pub fn vector(&self) -> &CVector {
        &self.vector
    }
}

/// Moves the gauge factor into the vector: `(x, g, z) -> (x, e, g z)`.
/// Idempotent, and equal on equivalent fiber points.
pub fn canonical_rep(p: &FiberPoint) -> FiberPoint {
    let vector = p.gauge.matrix() * &p.vector;
    FiberPoint {
        base: p.base,
        gauge: GroupElement::identity(p.gauge.tag()),
        vector,
    }
}

/// A section sampled on a finite grid, stored in the canonical gauge.
#[derive(Clone, Debug)]
pub struct SampledSection {
    dim: usize,
    points: Vec<Point2>,
    values: Vec<CVector>,
}

impl SampledSection {
    pub fn new(points: Vec<Point2>, values: Vec<CVector>) -> Result<Self, SectionError> {
        if points.len() != values.len() || values.is_empty() {
            return Err(SectionError::ShapeMismatch);
        }
        let dim = values[0].len();
        if values.iter().any(|v| v.len() != dim) {
            return Err(SectionError::ShapeMismatch);
        }
        for (i, p) in points.iter().enumerate() {
            if !(p.x.is_finite() && p.y.is_finite()) {
                return Err(SectionError::BadGrid);
            }
            for q in points.iter().skip(i + 1) {
                if p.distance(q) <= GRID_MATCH_TOL {
                    return Err(SectionError::BadGrid);
                }
            }
        }
        if values
            .iter()
            .any(|v| v.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())))
        {
            return Err(SectionError::BadGrid);
        }
        Ok(Self {
            dim,
            points,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn values(&self) -> &[CVector] {
        &self.values
    }

    pub fn value_at(&self, p: Point2) -> Option<&CVector> {
        self.points
            .iter()
            .position(|q| q.distance(&p) <= GRID_MATCH_TOL)
            .map(|i| &self.values[i])
    }
}

/// Transports `z0` along the path: `W(path) z0` with the Wilson-line product
/// of the scenario connection.
pub fn parallel_transport(
    scenario: &FluxScenario,
    z0: &CVector,
    path: &PlanePath,
    steps: usize,
) -> Result<CVector, SectionError> {
    let dim = scenario.group().dim();
    if z0.len() != dim {
        return Err(SectionError::DimensionMismatch {
            expected: dim,
            got: z0.len(),
        });
    }
    let w = wilson_line(scenario, path, steps)?;
    Ok(w.matrix() * z0)
}

/// Covariant derivative of an evaluable section along direction `v` at `x`:
/// central difference plus `(A . v) psi`.
pub fn covariant_derivative_fn(
    scenario: &FluxScenario,
    psi: &dyn Fn(Point2) -> CVector,
    v: (f64, f64),
    x: Point2,
    h: f64,
) -> Result<CVector, SectionError> {
    let forward = psi(Point2::new(x.x + h * v.0, x.y + h * v.1));
    let backward = psi(Point2::new(x.x - h * v.0, x.y - h * v.1));
    let here = psi(x);
    let dim = here.len();
    if forward.len() != dim || backward.len() != dim {
        return Err(SectionError::ShapeMismatch);
    }
    let derivative = (forward - backward) / Complex64::new(2.0 * h, 0.0);
    let (ax, ay) = connection_at(scenario, x)?;
    let a_dot_v = ax.scale(v.0).add(&ay.scale(v.1))?;
    Ok(derivative + a_dot_v.matrix() * here)
}

/// Covariant derivative on a sampled section; the stencil points
/// `x ± FD_STEP * v` and `x` must all lie on the grid.
pub fn covariant_derivative(
    scenario: &FluxScenario,
    section: &SampledSection,
    v: (f64, f64),
    x: Point2,
) -> Result<CVector, SectionError> {
    let lookup = |p: Point2| {
        section
            .value_at(p)
            .cloned()
            .ok_or(SectionError::GridTooSparse { x: p.x, y: p.y })
    };
    let forward = lookup(Point2::new(x.x + FD_STEP * v.0, x.y + FD_STEP * v.1))?;
    let backward = lookup(Point2::new(x.x - FD_STEP * v.0, x.y - FD_STEP * v.1))?;
    let here = lookup(x)?;
    let derivative = (forward - backward) / Complex64::new(2.0 * FD_STEP, 0.0);
    let (ax, ay) = connection_at(scenario, x)?;
    let a_dot_v = ax.scale(v.0).add(&ay.scale(v.1))?;
    Ok(derivative + a_dot_v.matrix() * here)
}

/// Pointwise gauge change of a sampled section: `psi'(x) = Lambda(x) psi(x)`.
pub fn gauge_transform_section(
    section: &SampledSection,
    lambda: &dyn Fn(Point2) -> GroupElement,
) -> SampledSection {
    let values = section
        .points
        .iter()
        .zip(&section.values)
        .map(|(p, z)| lambda(*p).matrix() * z)
        .collect();
    SampledSection {
        dim: section.dim,
        points: section.points.clone(),
        values,
    }
}

/// The gauge-transformed connection
/// `A' = Lambda A Lambda^-1 - (d Lambda) Lambda^-1`, with the derivative of
/// `Lambda` taken by central differences at step `h` and the result
/// projected back onto the algebra.
pub fn gauge_transformed_field<'a>(
    field: &'a FieldFn<'a>,
    tag: GroupTag,
    lambda: &'a (dyn Fn(Point2) -> GroupElement + Sync),
    h: f64,
) -> impl Fn(Point2) -> Result<(AlgebraElement, AlgebraElement), HolonomyError> + Sync + 'a {
    move |x: Point2| {
        let (ax, ay) = field(x)?;
        let at = lambda(x);
        let inv = at.inverse();
        let conjugated_x = ax.conjugate(&at)?;
        let conjugated_y = ay.conjugate(&at)?;
        let d_lambda = |dx: f64, dy: f64| {
            let plus = lambda(Point2::new(x.x + h * dx, x.y + h * dy));
            let minus = lambda(Point2::new(x.x - h * dx, x.y - h * dy));
            (plus.matrix() - minus.matrix()) / Complex64::new(2.0 * h, 0.0)
        };
        let inhomogeneous_x = project_to_algebra(tag, &(d_lambda(1.0, 0.0) * inv.matrix()));
        let inhomogeneous_y = project_to_algebra(tag, &(d_lambda(0.0, 1.0) * inv.matrix()));
        let new_x = AlgebraElement::new(tag, conjugated_x.matrix() - inhomogeneous_x)?;
        let new_y = AlgebraElement::new(tag, conjugated_y.matrix() - inhomogeneous_y)?;
        Ok((new_x, new_y))
    }
}

/// Wilson line of an arbitrary field; lets gauge covariance of loop
/// holonomies be checked against the transformed connection.
pub fn wilson_line_of_field(
    field: &FieldFn<'_>,
    tag: GroupTag,
    path: &PlanePath,
    steps: usize,
) -> Result<GroupElement, SectionError> {
    Ok(wilson_line_with_field(field, tag, path, steps)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{circle_path, Puncture};
    use crate::liegroups;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn su2_scenario() -> FluxScenario {
        let f = AlgebraElement::from_real_coefficients(GroupTag::Su2, &[0.9, 0.4, -0.2]).unwrap();
        FluxScenario::new(
            vec![Puncture::new(Point2::new(0.0, 0.0), 1)],
            Point2::new(0.07, -2.0),
            GroupTag::Su2,
            vec![f],
        )
        .unwrap()
    }

    #[test]
    fn canonical_rep_moves_gauge_into_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = liegroups::random_element(GroupTag::Su2, &mut rng, 1.0);
        let z = CVector::from_vec(vec![Complex64::new(1.0, 0.5), Complex64::new(-0.3, 0.2)]);
        let p = FiberPoint::new(Point2::new(1.0, 2.0), g.clone(), z.clone()).unwrap();
        let canonical = canonical_rep(&p);
        assert_eq!(canonical.vector(), &(g.matrix() * &z));
        // identity gauge leaves the vector unchanged
        let already = FiberPoint::new(
            Point2::new(1.0, 2.0),
            GroupElement::identity(GroupTag::Su2),
            z.clone(),
        )
        .unwrap();
        assert_eq!(canonical_rep(&already).vector(), &z);
    }

    #[test]
    fn canonical_rep_is_idempotent_and_class_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let g = liegroups::random_element(GroupTag::Su2, &mut rng, 1.2);
            let h = liegroups::random_element(GroupTag::Su2, &mut rng, 1.2);
            let z = CVector::from_vec(vec![
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            ]);
            let p = FiberPoint::new(Point2::new(0.0, 0.0), g.clone(), z.clone()).unwrap();
            let once = canonical_rep(&p);
            let twice = canonical_rep(&once);
            assert!((once.vector() - twice.vector()).norm() <= 1e-14);

            // same class through (g h, h^-1 z)
            let moved = FiberPoint::new(
                Point2::new(0.0, 0.0),
                g.multiply(&h).unwrap(),
                h.inverse().matrix() * &z,
            )
            .unwrap();
            let other = canonical_rep(&moved);
            assert!((once.vector() - other.vector()).norm() <= 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let g = GroupElement::identity(GroupTag::Su2);
        let z = CVector::from_vec(vec![Complex64::new(1.0, 0.0)]);
        assert!(matches!(
            FiberPoint::new(Point2::new(0.0, 0.0), g, z),
            Err(SectionError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn zero_flux_transport_is_identity() {
        let scenario = FluxScenario::new(
            vec![Puncture::new(Point2::new(0.0, 0.0), 1)],
            Point2::new(0.07, -2.0),
            GroupTag::Su2,
            vec![AlgebraElement::zero(GroupTag::Su2)],
        )
        .unwrap();
        let z0 = CVector::from_vec(vec![Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.9)]);
        let path = circle_path(Point2::new(0.1, 0.05), 1.0, 32, true);
        let z1 = parallel_transport(&scenario, &z0, &path, 200).unwrap();
        assert!((z1 - z0).norm() <= 1e-12);
    }

    #[test]
    fn transport_round_trip_returns_start() {
        let scenario = su2_scenario();
        let z0 = CVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)]);
        let path = PlanePath::open(vec![
            Point2::new(1.5, 0.0),
            Point2::new(1.2, 0.8),
            Point2::new(0.3, 1.4),
            Point2::new(-0.9, 0.7),
        ])
        .unwrap();
        let out = parallel_transport(&scenario, &z0, &path, 4000).unwrap();
        let back = parallel_transport(&scenario, &out, &path.reversed(), 4000).unwrap();
        assert!((back - z0).norm() <= 1e-8);
    }

    #[test]
    fn grid_stencil_errors_when_sparse() {
        let scenario = su2_scenario();
        let z = CVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let section = SampledSection::new(vec![Point2::new(1.0, 1.0)], vec![z]).unwrap();
        assert!(matches!(
            covariant_derivative(&scenario, &section, (1.0, 0.0), Point2::new(1.0, 1.0)),
            Err(SectionError::GridTooSparse { .. })
        ));
    }

    #[test]
    fn constant_section_zero_flux_has_zero_derivative() {
        let scenario = FluxScenario::new(
            vec![Puncture::new(Point2::new(0.0, 0.0), 1)],
            Point2::new(0.07, -2.0),
            GroupTag::U1,
            vec![AlgebraElement::zero(GroupTag::U1)],
        )
        .unwrap();
        let psi = |_: Point2| CVector::from_vec(vec![Complex64::new(0.7, -0.2)]);
        let d =
            covariant_derivative_fn(&scenario, &psi, (1.0, 0.5), Point2::new(2.0, 1.0), FD_STEP)
                .unwrap();
        assert!(d.norm() <= 1e-12);
    }
}
