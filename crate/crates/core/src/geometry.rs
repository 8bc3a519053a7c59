//! Classification of concrete planar loops around punctures.
//!
//! Each puncture carries a vertical cut ray pointing straight down. A loop's
//! homotopy class is read off from its ray crossings in path order, with a
//! left-to-right crossing counting as the positive generator of that
//! puncture, and then freely reduced. Winding numbers computed from turning
//! angles serve as the independent abelian oracle.

use thiserror::Error;

use crate::freegroup::{FreeGroupError, Letter, Word};

/// Tolerance for genericity checks, in plane units.
pub const GENERICITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

/// A removed point of the plane, labelled by its generator index (1-based).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Puncture {
    position: Point2,
    label: u32,
}

impl Puncture {
    pub fn new(position: Point2, label: u32) -> Self {
        assert!(label >= 1, "puncture labels are 1-based");
        Self { position, label }
    }

    pub fn position(&self) -> Point2 {
        self.position
    }

    pub fn label(&self) -> u32 {
        self.label
    }
}

/// A piecewise-linear path given by its vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanePath {
    vertices: Vec<Point2>,
    closed: bool,
}

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("path needs at least two vertices")]
    TooFewVertices,
    #[error("operation requires a closed path")]
    OpenPath,
    #[error("degenerate position: {0}")]
    DegeneratePosition(ViolationReport),
    #[error("winding sum around puncture {label} has residual {residual:.3} >= 0.25; path too coarse")]
    PathTooCoarse { label: u32, residual: f64 },
    #[error("bad puncture set: {0}")]
    PunctureSetup(String),
    #[error(transparent)]
    FreeGroup(#[from] FreeGroupError),
}

impl PlanePath {
    /// An open polyline.
    pub fn open(vertices: Vec<Point2>) -> Result<Self, GeometryError> {
        if vertices.len() < 2 {
            return Err(GeometryError::TooFewVertices);
        }
        Ok(Self {
            vertices,
            closed: false,
        })
    }

    /// A closed loop; the first vertex is appended when the input does not
    /// already end where it starts.
    pub fn closed(mut vertices: Vec<Point2>) -> Result<Self, GeometryError> {
        if vertices.len() < 2 {
            return Err(GeometryError::TooFewVertices);
        }
        let first = vertices[0];
        let last = *vertices.last().unwrap();
        if first.distance(&last) > 0.0 {
            vertices.push(first);
        }
        Ok(Self {
            vertices,
            closed: true,
        })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn reversed(&self) -> PlanePath {
        PlanePath {
            vertices: self.vertices.iter().rev().copied().collect(),
            closed: self.closed,
        }
    }

    /// Subdivides every segment into `parts` equal pieces.
    pub fn refined(&self, parts: usize) -> PlanePath {
        assert!(parts >= 1);
        let mut vertices = Vec::with_capacity(self.vertices.len() * parts);
        for (a, b) in self.segments() {
            for i in 0..parts {
                let t = i as f64 / parts as f64;
                vertices.push(Point2::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
            }
        }
        vertices.push(*self.vertices.last().unwrap());
        PlanePath {
            vertices,
            closed: self.closed,
        }
    }

    /// Joins two paths sharing an endpoint (used for based-loop products).
    pub fn followed_by(&self, other: &PlanePath) -> Result<PlanePath, GeometryError> {
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices[1..]);
        if self.closed || other.closed {
            PlanePath::closed(vertices)
        } else {
            PlanePath::open(vertices)
        }
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| a.distance(&b)).sum()
    }

    /// Smallest distance from the path to a point.
    pub fn min_distance_to(&self, p: &Point2) -> f64 {
        self.segments()
            .map(|(a, b)| segment_point_distance(a, b, *p))
            .fold(f64::INFINITY, f64::min)
    }
}

fn segment_point_distance(a: Point2, b: Point2, p: Point2) -> f64 {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let len_sq = dx * dx + dy * dy;
    if len_sq == 0.0 {
        return a.distance(&p);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len_sq).clamp(0.0, 1.0);
    Point2::new(a.x + t * dx, a.y + t * dy).distance(&p)
}

/// A vertex sitting on the downward cut ray of some puncture.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OnRayViolation {
    pub vertex: usize,
    pub puncture_label: u32,
}

/// A segment passing within tolerance of a puncture.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NearPunctureViolation {
    pub segment: usize,
    pub puncture_label: u32,
    pub distance: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ViolationReport {
    pub on_ray: Vec<OnRayViolation>,
    pub near_puncture: Vec<NearPunctureViolation>,
}

impl ViolationReport {
    pub fn is_ok(&self) -> bool {
        self.on_ray.is_empty() && self.near_puncture.is_empty()
    }
}

impl std::fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for v in &self.on_ray {
            write!(
                f,
                "[vertex {} on cut ray of puncture {}] ",
                v.vertex, v.puncture_label
            )?;
        }
        for v in &self.near_puncture {
            write!(
                f,
                "[segment {} within {:.3e} of puncture {}] ",
                v.segment, v.distance, v.puncture_label
            )?;
        }
        Ok(())
    }
}

fn validate_punctures(punctures: &[Puncture], rank: u32) -> Result<(), GeometryError> {
    let mut seen = vec![false; rank as usize];
    for p in punctures {
        if p.label() == 0 || p.label() > rank {
            return Err(GeometryError::PunctureSetup(format!(
                "label {} out of range for rank {rank}",
                p.label()
            )));
        }
        let idx = (p.label() - 1) as usize;
        if seen[idx] {
            return Err(GeometryError::PunctureSetup(format!(
                "duplicate label {}",
                p.label()
            )));
        }
        seen[idx] = true;
    }
    for (i, a) in punctures.iter().enumerate() {
        for b in punctures.iter().skip(i + 1) {
            if (a.position().x - b.position().x).abs() <= 2.0 * GENERICITY_TOL {
                return Err(GeometryError::PunctureSetup(format!(
                    "punctures {} and {} share an x-coordinate; apply prejitter_punctures",
                    a.label(),
                    b.label()
                )));
            }
        }
    }
    Ok(())
}

/// Reports every vertex on a cut ray and every segment passing within
/// tolerance of a puncture. Diagnostic; never errors.
pub fn check_generic(path: &PlanePath, punctures: &[Puncture]) -> ViolationReport {
    let mut report = ViolationReport::default();
    for (vi, v) in path.vertices().iter().enumerate() {
        for p in punctures {
            let b = p.position();
            if (v.x - b.x).abs() <= GENERICITY_TOL && v.y <= b.y + GENERICITY_TOL {
                report.on_ray.push(OnRayViolation {
                    vertex: vi,
                    puncture_label: p.label(),
                });
            }
        }
    }
    for (si, (a, b)) in path.segments().enumerate() {
        for p in punctures {
            let d = segment_point_distance(a, b, p.position());
            if d <= GENERICITY_TOL {
                report.near_puncture.push(NearPunctureViolation {
                    segment: si,
                    puncture_label: p.label(),
                    distance: d,
                });
            }
        }
    }
    report
}

/// The homotopy class of a closed loop as a reduced word in `F_rank`.
///
/// Crossings of the downward ray under puncture `k` emit `c_k` when the path
/// moves left to right (the counterclockwise sense around the puncture) and
/// `c_k^-1` otherwise, in path order.
pub fn word_of_loop(
    path: &PlanePath,
    punctures: &[Puncture],
    rank: u32,
) -> Result<Word, GeometryError> {
    if !path.is_closed() {
        return Err(GeometryError::OpenPath);
    }
    validate_punctures(punctures, rank)?;
    let report = check_generic(path, punctures);
    if !report.is_ok() {
        return Err(GeometryError::DegeneratePosition(report));
    }

    // (segment index, parameter along segment, letter)
    let mut crossings: Vec<(usize, f64, Letter)> = Vec::new();
    for (si, (a, b)) in path.segments().enumerate() {
        for p in punctures {
            let bx = p.position().x;
            let straddles = (a.x < bx && b.x > bx) || (a.x > bx && b.x < bx);
            if !straddles {
                continue;
            }
            let t = (bx - a.x) / (b.x - a.x);
            let y_cross = a.y + t * (b.y - a.y);
            if y_cross < p.position().y {
                crossings.push((si, t, Letter::new(p.label(), b.x > a.x)));
            }
        }
    }
    crossings.sort_by(|l, r| (l.0, l.1).partial_cmp(&(r.0, r.1)).unwrap());
    Ok(Word::reduce(rank, crossings.into_iter().map(|c| c.2))?)
}

/// Winding numbers of a closed path about each puncture, from summed turning
/// angles. Errors when the angle sum is farther than 0.25 turns from an
/// integer.
pub fn winding_numbers(
    path: &PlanePath,
    punctures: &[Puncture],
) -> Result<Vec<i64>, GeometryError> {
    if !path.is_closed() {
        return Err(GeometryError::OpenPath);
    }
    let mut report = ViolationReport::default();
    for (si, (a, b)) in path.segments().enumerate() {
        for p in punctures {
            let d = segment_point_distance(a, b, p.position());
            if d <= GENERICITY_TOL {
                report.near_puncture.push(NearPunctureViolation {
                    segment: si,
                    puncture_label: p.label(),
                    distance: d,
                });
            }
        }
    }
    if !report.is_ok() {
        return Err(GeometryError::DegeneratePosition(report));
    }

    let mut result = Vec::with_capacity(punctures.len());
    for p in punctures {
        let c = p.position();
        let mut total = 0.0f64;
        for (a, b) in path.segments() {
            let (ax, ay) = (a.x - c.x, a.y - c.y);
            let (bx, by) = (b.x - c.x, b.y - c.y);
            let cross = ax * by - ay * bx;
            let dot = ax * bx + ay * by;
            total += cross.atan2(dot);
        }
        let turns = total / (2.0 * std::f64::consts::PI);
        let nearest = turns.round();
        let residual = (turns - nearest).abs();
        // for exact polyline arithmetic the residual stays near roundoff;
        // this guards sampled or non-finite input (NaN fails the comparison)
        if !(residual < 0.25) {
            return Err(GeometryError::PathTooCoarse {
                label: p.label(),
                residual,
            });
        }
        result.push(nearest as i64);
    }
    Ok(result)
}

/// Nudges puncture x-coordinates apart until they are pairwise distinct;
/// use before scenario construction when punctures share a column.
pub fn prejitter_punctures(punctures: &[Puncture], min_separation: f64) -> Vec<Puncture> {
    let mut out: Vec<Puncture> = punctures.to_vec();
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..out.len() {
            for j in (i + 1)..out.len() {
                let dx = out[j].position().x - out[i].position().x;
                if dx.abs() < min_separation {
                    let pos = out[j].position();
                    out[j] = Puncture::new(
                        Point2::new(pos.x + min_separation * (1.0 + j as f64 * 0.5), pos.y),
                        out[j].label(),
                    );
                    changed = true;
                }
            }
        }
    }
    out
}

/// Builds a concrete based loop whose classification is exactly `word`.
///
/// Per letter the loop climbs above every puncture, crosses over to the
/// target circle's column, descends beside it, and wraps the puncture with a
/// small square (counterclockwise for a positive letter). Horizontal moves
/// happen strictly above the punctures where the downward cut rays cannot be
/// crossed, so each square contributes exactly its one letter.
pub fn loop_realizing_word(
    word: &Word,
    punctures: &[Puncture],
    basepoint: Point2,
) -> Result<PlanePath, GeometryError> {
    validate_punctures(punctures, word.rank())?;
    let position = |label: u32| {
        punctures
            .iter()
            .find(|p| p.label() == label)
            .expect("labels validated")
            .position()
    };
    // half-size of the wrap squares: stay well inside neighbor column gaps
    // (the basepoint carries no cut ray, so its column does not constrain)
    let mut min_gap = f64::INFINITY;
    let mut xs: Vec<f64> = punctures.iter().map(|p| p.position().x).collect();
    xs.sort_by(f64::total_cmp);
    for w in xs.windows(2) {
        min_gap = min_gap.min(w[1] - w[0]);
    }
    let offset = (0.33 * min_gap).min(0.45);
    if offset <= GENERICITY_TOL * 10.0 {
        return Err(GeometryError::PunctureSetup(
            "punctures too close together to route a wrap square".into(),
        ));
    }
    let y_high = punctures
        .iter()
        .map(|p| p.position().y)
        .fold(basepoint.y, f64::max)
        + 1.0;

    let mut vertices = vec![basepoint, Point2::new(basepoint.x, y_high)];
    for letter in word.letters() {
        let b = position(letter.index());
        let stem_x = b.x + offset;
        vertices.push(Point2::new(stem_x, y_high));
        vertices.push(Point2::new(stem_x, b.y - offset));
        let square = [
            Point2::new(stem_x, b.y + offset),
            Point2::new(b.x - offset, b.y + offset),
            Point2::new(b.x - offset, b.y - offset),
            Point2::new(stem_x, b.y - offset),
        ];
        if letter.is_positive() {
            // counterclockwise: up the right side, across the top, down,
            // and back under the puncture left to right
            vertices.extend(square);
        } else {
            vertices.extend(square.into_iter().rev().skip(1));
            vertices.push(Point2::new(stem_x, b.y - offset));
        }
        vertices.push(Point2::new(stem_x, y_high));
    }
    vertices.push(Point2::new(basepoint.x, y_high));
    PlanePath::closed(vertices)
}

/// Regular polygon approximating a circle; counterclockwise for positive
/// radius sweep, clockwise when `ccw` is false.
pub fn circle_path(center: Point2, radius: f64, vertices: usize, ccw: bool) -> PlanePath {
    assert!(vertices >= 3);
    let mut pts = Vec::with_capacity(vertices + 1);
    for i in 0..vertices {
        let raw = i as f64 / vertices as f64;
        let t = 2.0 * std::f64::consts::PI * if ccw { raw } else { -raw };
        // start at an angle that keeps vertices off the vertical axis
        let phase = t + 0.37;
        pts.push(Point2::new(
            center.x + radius * phase.cos(),
            center.y + radius * phase.sin(),
        ));
    }
    PlanePath::closed(pts).expect("polygon has enough vertices")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn puncture(x: f64, y: f64, label: u32) -> Puncture {
        Puncture::new(Point2::new(x, y), label)
    }

    #[test]
    fn ccw_circle_is_single_generator() {
        let punctures = [puncture(0.0, 0.0, 1)];
        let path = circle_path(Point2::new(0.0, 0.0), 1.0, 32, true);
        let word = word_of_loop(&path, &punctures, 1).unwrap();
        assert_eq!(word, Word::parse(1, "c1").unwrap());
    }

    #[test]
    fn cw_circle_is_inverse_generator() {
        let punctures = [puncture(0.0, 0.0, 1)];
        let path = circle_path(Point2::new(0.0, 0.0), 1.0, 32, false);
        let word = word_of_loop(&path, &punctures, 1).unwrap();
        assert_eq!(word, Word::parse(1, "c1^-1").unwrap());
    }

    #[test]
    fn figure_loop_reads_c1_c2() {
        let punctures = [puncture(0.0, 0.0, 1), puncture(2.0, 0.1, 2)];
        let left = circle_path(Point2::new(0.0, 0.0), 0.6, 24, true);
        let right = circle_path(Point2::new(2.0, 0.1), 0.6, 24, true);
        // connect through a shared basepoint below both punctures
        let base = Point2::new(1.0, -2.0);
        let mut vertices = vec![base];
        vertices.extend_from_slice(left.vertices());
        vertices.push(base);
        vertices.extend_from_slice(right.vertices());
        let path = PlanePath::closed(vertices).unwrap();
        let word = word_of_loop(&path, &punctures, 2).unwrap();
        assert_eq!(word, Word::parse(2, "c1 c2").unwrap());
        assert_eq!(winding_numbers(&path, &punctures).unwrap(), vec![1, 1]);
    }

    #[test]
    fn open_path_is_rejected() {
        let punctures = [puncture(0.0, 0.0, 1)];
        let path =
            PlanePath::open(vec![Point2::new(-1.0, -1.0), Point2::new(1.0, -1.0)]).unwrap();
        assert!(matches!(
            word_of_loop(&path, &punctures, 1),
            Err(GeometryError::OpenPath)
        ));
    }

    #[test]
    fn vertex_on_ray_is_flagged() {
        let punctures = [puncture(0.0, 1.0, 1)];
        let path = PlanePath::closed(vec![
            Point2::new(0.0, 0.0), // exactly below the puncture
            Point2::new(1.0, 0.3),
            Point2::new(-1.0, 0.4),
        ])
        .unwrap();
        let report = check_generic(&path, &punctures);
        // the closing vertex repeats the offending first vertex
        assert_eq!(
            report.on_ray,
            vec![
                OnRayViolation {
                    vertex: 0,
                    puncture_label: 1
                },
                OnRayViolation {
                    vertex: 3,
                    puncture_label: 1
                }
            ]
        );
        assert!(matches!(
            word_of_loop(&path, &punctures, 1),
            Err(GeometryError::DegeneratePosition(_))
        ));
    }

    #[test]
    fn offset_circle_passes_genericity() {
        let punctures = [puncture(0.0, 0.0, 1)];
        let path = circle_path(Point2::new(0.05, 0.02), 1.0, 48, true);
        assert!(check_generic(&path, &punctures).is_ok());
    }

    #[test]
    fn winding_counts_double_loop() {
        let punctures = [puncture(0.0, 0.0, 1)];
        let single = circle_path(Point2::new(0.0, 0.0), 1.0, 64, true);
        let mut twice = single.vertices().to_vec();
        twice.pop();
        let mut doubled = twice.clone();
        doubled.extend_from_slice(&twice);
        let path = PlanePath::closed(doubled).unwrap();
        assert_eq!(winding_numbers(&path, &punctures).unwrap(), vec![2]);
        let word = word_of_loop(&path, &punctures, 1).unwrap();
        assert_eq!(word.abelianize(), vec![2]);
    }

    #[test]
    fn winding_rejects_paths_through_punctures() {
        let punctures = [puncture(0.0, 0.0, 1)];
        let path = PlanePath::closed(vec![
            Point2::new(1e-10, 1e-11),
            Point2::new(1.0, 0.5),
            Point2::new(-1.0, 0.5),
        ])
        .unwrap();
        assert!(matches!(
            winding_numbers(&path, &punctures),
            Err(GeometryError::DegeneratePosition(_))
        ));
    }

    #[test]
    fn winding_flags_non_finite_input_as_coarse() {
        let punctures = [puncture(0.0, 0.0, 1)];
        let path = PlanePath::closed(vec![
            Point2::new(f64::NAN, 2.0),
            Point2::new(1.0, 2.0),
            Point2::new(1.0, 3.0),
        ])
        .unwrap();
        assert!(matches!(
            winding_numbers(&path, &punctures),
            Err(GeometryError::PathTooCoarse { .. })
        ));
    }

    #[test]
    fn shared_x_coordinates_rejected_and_jittered() {
        let punctures = [puncture(0.0, 0.0, 1), puncture(0.0, 2.0, 2)];
        let path = circle_path(Point2::new(0.3, 0.0), 0.2, 16, true);
        assert!(matches!(
            word_of_loop(&path, &punctures, 2),
            Err(GeometryError::PunctureSetup(_))
        ));
        let jittered = prejitter_punctures(&punctures, 1e-3);
        assert!((jittered[0].position().x - jittered[1].position().x).abs() >= 1e-3);
    }

    #[test]
    fn realized_loops_classify_back_to_their_words() {
        let punctures = [
            puncture(0.0, 0.0, 1),
            puncture(1.3, 0.4, 2),
            puncture(-1.1, -0.2, 3),
        ];
        let basepoint = Point2::new(0.4, -1.5);
        for text in ["e", "c1", "c2^-1", "c1 c2 c1^-1", "c3 c3 c1^-1 c2", "c2 c2"] {
            let word = Word::parse(3, text).unwrap();
            let path = loop_realizing_word(&word, &punctures, basepoint).unwrap();
            let back = word_of_loop(&path, &punctures, 3).unwrap();
            assert_eq!(back, word, "word {text}");
            assert_eq!(
                winding_numbers(&path, &punctures).unwrap(),
                word.abelianize()
            );
        }
    }

    #[test]
    fn jittered_violations_detected_at_tolerance() {
        let punctures = [puncture(0.5, 0.25, 1)];
        for k in 0..50 {
            let eps = 1e-10 * (k as f64 + 1.0) / 50.0;
            let path = PlanePath::closed(vec![
                Point2::new(0.5 + eps, -1.0), // on the ray within tolerance
                Point2::new(1.5, -1.2),
                Point2::new(1.5, 1.2),
            ])
            .unwrap();
            let report = check_generic(&path, &punctures);
            assert!(!report.is_ok(), "eps {eps:.2e} escaped detection");
        }
    }
}
