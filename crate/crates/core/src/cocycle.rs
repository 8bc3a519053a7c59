//! Transition cocycles on the two-arc cover of the wedge of `n` circles and
//! their constructive trivialization.
//!
//! The cover has sets `k+` and `k-` for each circle `k`. Two sets of the same
//! circle meet in the wedge point and one marked interior point; sets of
//! different circles meet in the wedge point only. A cocycle assigns a group
//! element to every ordered pair at each shared point, inverse-symmetric in
//! the pair and satisfying the triple relations at the wedge point. Because
//! the structure group is path connected, every valid cocycle is a
//! coboundary; `trivialize` constructs the witness maps and
//! `verify_trivialization` re-checks them independently.

use std::collections::BTreeMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::liegroups::{
    self, exp, log, AlgebraElement, GroupElement, GroupTag, LieGroupError,
};
use crate::wire::{matrix_from_data, matrix_to_data, MatrixData};

/// Acceptance tolerance for constructed trivializations.
pub const CONSTRUCTION_TOL: f64 = 1e-9;
/// Tolerance for cocycle relation residuals.
pub const VALIDATION_TOL: f64 = 1e-10;
/// Tolerance for exact algebraic identities (group action laws).
pub const ARITHMETIC_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum CocycleError {
    #[error("rank must be at least 1, got {0}")]
    InvalidRank(u32),
    #[error("cocycle fails validation with max residual {max_residual:.3e}")]
    Validation { max_residual: f64 },
    #[error("geodesic interpolation hit the branch cut even through a waypoint")]
    Interpolation,
    #[error("malformed cocycle data: {0}")]
    Shape(String),
    #[error("missing gauge constant for set {0}")]
    MissingLambda(CoverSet),
    #[error(transparent)]
    Lie(#[from] LieGroupError),
    #[error("serialization: {0}")]
    Serialization(String),
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Side {
    Plus,
    Minus,
}

/// One set of the cover: the `side` arc of circle `circle` (1-based).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CoverSet {
    pub circle: u32,
    pub side: Side,
}

impl CoverSet {
    pub fn plus(circle: u32) -> Self {
        Self {
            circle,
            side: Side::Plus,
        }
    }

    pub fn minus(circle: u32) -> Self {
        Self {
            circle,
            side: Side::Minus,
        }
    }

    pub fn parse(s: &str) -> Result<Self, CocycleError> {
        let (digits, side) = if let Some(d) = s.strip_suffix('+') {
            (d, Side::Plus)
        } else if let Some(d) = s.strip_suffix('-') {
            (d, Side::Minus)
        } else {
            return Err(CocycleError::Shape(format!("bad cover set '{s}'")));
        };
        let circle: u32 = digits
            .parse()
            .map_err(|_| CocycleError::Shape(format!("bad cover set '{s}'")))?;
        if circle == 0 {
            return Err(CocycleError::Shape("cover set circles are 1-based".into()));
        }
        Ok(Self { circle, side })
    }
}

impl fmt::Display for CoverSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.side {
            Side::Plus => '+',
            Side::Minus => '-',
        };
        write!(f, "{}{}", self.circle, side)
    }
}

/// How two cover sets meet.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Overlap {
    /// A set with itself; the transition function is the identity.
    Identity,
    /// Opposite arcs of the same circle: the wedge point and the marked point.
    SameCircle { circle: u32 },
    /// Arcs of different circles: the wedge point only.
    CrossCircle,
}

/// The symbolic cover of the wedge of `rank` circles.
#[derive(Clone, Copy, Debug)]
pub struct WedgeCover {
    rank: u32,
}

impl WedgeCover {
    pub fn new(rank: u32) -> Result<Self, CocycleError> {
        if rank < 1 {
            return Err(CocycleError::InvalidRank(rank));
        }
        Ok(Self { rank })
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn sets(&self) -> Vec<CoverSet> {
        (1..=self.rank)
            .flat_map(|k| [CoverSet::plus(k), CoverSet::minus(k)])
            .collect()
    }

    /// All ordered pairs of distinct sets; the carriers of nontrivial
    /// transition data.
    pub fn ordered_pairs(&self) -> Vec<(CoverSet, CoverSet)> {
        let sets = self.sets();
        let mut pairs = Vec::with_capacity(sets.len() * (sets.len() - 1));
        for &a in &sets {
            for &b in &sets {
                if a != b {
                    pairs.push((a, b));
                }
            }
        }
        pairs
    }

    pub fn overlap(&self, a: CoverSet, b: CoverSet) -> Overlap {
        if a == b {
            Overlap::Identity
        } else if a.circle == b.circle {
            Overlap::SameCircle { circle: a.circle }
        } else {
            Overlap::CrossCircle
        }
    }
}

/// Total number of transition functions on the cover, self-overlaps
/// included: `4 n^2`.
pub fn count_transition_functions(rank: u32) -> Result<u64, CocycleError> {
    if rank < 1 {
        return Err(CocycleError::InvalidRank(rank));
    }
    let n = rank as u64;
    Ok(4 * n * n)
}

/// Number of triple relations among the nontrivial transition functions:
/// `C(2n, 3) = n (2n-1) (2n-2) / 3`.
pub fn count_cocycle_relations(rank: u32) -> Result<u64, CocycleError> {
    if rank < 1 {
        return Err(CocycleError::InvalidRank(rank));
    }
    let n = rank as u64;
    Ok(n * (2 * n - 1) * (2 * n - 2) / 3)
}

/// Transition data on the wedge cover: a group element per ordered pair at
/// the wedge point, plus one per orientation of each same-circle pair at its
/// marked point.
#[derive(Clone, Debug)]
pub struct Cocycle {
    tag: GroupTag,
    rank: u32,
    at_wedge: BTreeMap<(CoverSet, CoverSet), GroupElement>,
    at_marked: BTreeMap<(CoverSet, CoverSet), GroupElement>,
}

impl Cocycle {
    /// Builds a cocycle from raw maps, checking shape only; relation
    /// integrity is the validator's concern.
    pub fn from_raw(
        tag: GroupTag,
        rank: u32,
        at_wedge: BTreeMap<(CoverSet, CoverSet), GroupElement>,
        at_marked: BTreeMap<(CoverSet, CoverSet), GroupElement>,
    ) -> Result<Self, CocycleError> {
        let cover = WedgeCover::new(rank)?;
        for pair in cover.ordered_pairs() {
            let value = at_wedge
                .get(&pair)
                .ok_or_else(|| CocycleError::Shape(format!("missing wedge value {}|{}", pair.0, pair.1)))?;
            if value.tag() != tag {
                return Err(LieGroupError::TagMismatch {
                    left: value.tag(),
                    right: tag,
                }
                .into());
            }
        }
        if at_wedge.len() != cover.ordered_pairs().len() {
            return Err(CocycleError::Shape("extra wedge-point entries".into()));
        }
        for k in 1..=rank {
            for pair in [
                (CoverSet::plus(k), CoverSet::minus(k)),
                (CoverSet::minus(k), CoverSet::plus(k)),
            ] {
                let value = at_marked.get(&pair).ok_or_else(|| {
                    CocycleError::Shape(format!("missing marked value {}|{}", pair.0, pair.1))
                })?;
                if value.tag() != tag {
                    return Err(LieGroupError::TagMismatch {
                        left: value.tag(),
                        right: tag,
                    }
                    .into());
                }
            }
        }
        if at_marked.len() != 2 * rank as usize {
            return Err(CocycleError::Shape("extra marked-point entries".into()));
        }
        Ok(Self {
            tag,
            rank,
            at_wedge,
            at_marked,
        })
    }

    /// Completes a cocycle from free data: per circle the wedge and marked
    /// values of `(k+, k-)`, and per circle `j >= 2` the wedge value of
    /// `(1+, j+)`. Every other pair is routed through `1+`, so all triple
    /// relations hold by construction.
    pub fn from_free_data(
        tag: GroupTag,
        wedge_same_circle: Vec<GroupElement>,
        marked_same_circle: Vec<GroupElement>,
        root_to_plus: Vec<GroupElement>,
    ) -> Result<Self, CocycleError> {
        let rank = wedge_same_circle.len() as u32;
        let cover = WedgeCover::new(rank)?;
        if marked_same_circle.len() != rank as usize
            || root_to_plus.len() != rank.saturating_sub(1) as usize
        {
            return Err(CocycleError::Shape(
                "free data lengths disagree with rank".into(),
            ));
        }

        // gauge potentials h with h(1+) = identity; every wedge value is
        // h(beta) h(alpha)^-1
        let mut h: BTreeMap<CoverSet, GroupElement> = BTreeMap::new();
        h.insert(CoverSet::plus(1), GroupElement::identity(tag));
        h.insert(CoverSet::minus(1), wedge_same_circle[0].inverse());
        for j in 2..=rank {
            let f = &root_to_plus[(j - 2) as usize];
            let h_plus = f.inverse();
            let h_minus = wedge_same_circle[(j - 1) as usize]
                .inverse()
                .multiply(&h_plus)?;
            h.insert(CoverSet::plus(j), h_plus);
            h.insert(CoverSet::minus(j), h_minus);
        }

        let mut at_wedge = BTreeMap::new();
        for (beta, alpha) in cover.ordered_pairs() {
            let value = h[&beta].multiply(&h[&alpha].inverse())?;
            at_wedge.insert((beta, alpha), value);
        }
        let mut at_marked = BTreeMap::new();
        for k in 1..=rank {
            let g = marked_same_circle[(k - 1) as usize].clone();
            at_marked.insert((CoverSet::minus(k), CoverSet::plus(k)), g.inverse());
            at_marked.insert((CoverSet::plus(k), CoverSet::minus(k)), g);
        }
        Self::from_raw(tag, rank, at_wedge, at_marked)
    }

    pub fn tag(&self) -> GroupTag {
        self.tag
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn cover(&self) -> WedgeCover {
        WedgeCover::new(self.rank).expect("rank validated at construction")
    }

    /// Value of the ordered pair at the wedge point.
    pub fn wedge_value(&self, beta: CoverSet, alpha: CoverSet) -> &GroupElement {
        &self.at_wedge[&(beta, alpha)]
    }

    /// Value of the ordered same-circle pair at its marked point.
    pub fn marked_value(&self, beta: CoverSet, alpha: CoverSet) -> &GroupElement {
        &self.at_marked[&(beta, alpha)]
    }

    pub fn wedge_values(&self) -> &BTreeMap<(CoverSet, CoverSet), GroupElement> {
        &self.at_wedge
    }

    pub fn marked_values(&self) -> &BTreeMap<(CoverSet, CoverSet), GroupElement> {
        &self.at_marked
    }

    pub fn to_file(&self) -> CocycleFile {
        let encode = |map: &BTreeMap<(CoverSet, CoverSet), GroupElement>| {
            map.iter()
                .map(|((b, a), g)| (format!("{b}|{a}"), matrix_to_data(g.matrix())))
                .collect()
        };
        CocycleFile {
            version: 1,
            group: self.tag.name().to_string(),
            rank: self.rank,
            at_wedge_point: encode(&self.at_wedge),
            at_marked_point: encode(&self.at_marked),
        }
    }

    pub fn from_file(file: &CocycleFile) -> Result<Self, CocycleError> {
        if file.version != 1 {
            return Err(CocycleError::Shape(format!(
                "unsupported cocycle schema version {}",
                file.version
            )));
        }
        let tag = GroupTag::parse(&file.group)?;
        let decode = |entries: &BTreeMap<String, MatrixData>| {
            let mut map = BTreeMap::new();
            for (key, data) in entries {
                let (b, a) = key
                    .split_once('|')
                    .ok_or_else(|| CocycleError::Shape(format!("bad pair key '{key}'")))?;
                let pair = (CoverSet::parse(b)?, CoverSet::parse(a)?);
                let matrix = matrix_from_data(data).map_err(CocycleError::Shape)?;
                map.insert(pair, GroupElement::new(tag, matrix)?);
            }
            Ok::<_, CocycleError>(map)
        };
        Self::from_raw(
            tag,
            file.rank,
            decode(&file.at_wedge_point)?,
            decode(&file.at_marked_point)?,
        )
    }
}

/// Serialized cocycle: complex entries as `[re, im]`, ordered pairs keyed
/// `"beta|alpha"`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleFile {
    pub version: u32,
    pub group: String,
    pub rank: u32,
    pub at_wedge_point: BTreeMap<String, MatrixData>,
    pub at_marked_point: BTreeMap<String, MatrixData>,
}

/// Deterministic random cocycle. All free data is drawn from bounded
/// algebra coefficients; SL(2, C) draws are kept small so sampled
/// trivialization maps respect the continuity budget.
pub fn random_cocycle(rank: u32, tag: GroupTag, seed: u64) -> Result<Cocycle, CocycleError> {
    if rank < 1 {
        return Err(CocycleError::InvalidRank(rank));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = match tag {
        GroupTag::Sl2C => 0.22,
        _ => 1.2,
    };
    let mut draw = || liegroups::random_element(tag, &mut rng, scale);
    let wedge: Vec<GroupElement> = (0..rank).map(|_| draw()).collect();
    let marked: Vec<GroupElement> = (0..rank).map(|_| draw()).collect();
    let cross: Vec<GroupElement> = (0..rank.saturating_sub(1)).map(|_| draw()).collect();
    Cocycle::from_free_data(tag, wedge, marked, cross)
}

/// One failed check found by the validator.
#[derive(Clone, Debug)]
pub enum CocycleViolation {
    /// `g(beta, alpha) * g(alpha, beta)` differs from the identity.
    Antisymmetry {
        pair: (CoverSet, CoverSet),
        at_marked_point: bool,
        residual: f64,
    },
    /// `g(gamma, beta) * g(beta, alpha)` differs from `g(gamma, alpha)`.
    Relation {
        triple: (CoverSet, CoverSet, CoverSet),
        residual: f64,
    },
}

impl fmt::Display for CocycleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CocycleViolation::Antisymmetry {
                pair,
                at_marked_point,
                residual,
            } => write!(
                f,
                "antisymmetry {}|{} at {} point: residual {residual:.3e}",
                pair.0,
                pair.1,
                if *at_marked_point { "marked" } else { "wedge" }
            ),
            CocycleViolation::Relation { triple, residual } => write!(
                f,
                "relation ({}, {}, {}): residual {residual:.3e}",
                triple.0, triple.1, triple.2
            ),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<CocycleViolation>,
    pub max_residual: f64,
    pub tolerance: f64,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks antisymmetry of every ordered pair at every shared point and every
/// triple relation at the wedge point. Diagnostic; never errors.
pub fn validate_cocycle(c: &Cocycle, tolerance: f64) -> ValidationReport {
    let cover = c.cover();
    let identity = GroupElement::identity(c.tag());
    let mut report = ValidationReport {
        tolerance,
        ..Default::default()
    };
    let mut record = |violation: Option<CocycleViolation>, residual: f64| {
        report.max_residual = report.max_residual.max(residual);
        if let Some(v) = violation {
            report.violations.push(v);
        }
    };

    let sets = cover.sets();
    for (i, &beta) in sets.iter().enumerate() {
        for &alpha in sets.iter().skip(i + 1) {
            let forward = c.wedge_value(beta, alpha);
            let backward = c.wedge_value(alpha, beta);
            let residual = forward
                .multiply(backward)
                .map(|p| p.distance(&identity).expect("same tag"))
                .unwrap_or(f64::INFINITY);
            let violation = (residual > tolerance).then_some(CocycleViolation::Antisymmetry {
                pair: (beta, alpha),
                at_marked_point: false,
                residual,
            });
            record(violation, residual);
        }
    }
    for k in 1..=c.rank() {
        let (p, m) = (CoverSet::plus(k), CoverSet::minus(k));
        let forward = c.marked_value(p, m);
        let backward = c.marked_value(m, p);
        let residual = forward
            .multiply(backward)
            .map(|x| x.distance(&identity).expect("same tag"))
            .unwrap_or(f64::INFINITY);
        let violation = (residual > tolerance).then_some(CocycleViolation::Antisymmetry {
            pair: (p, m),
            at_marked_point: true,
            residual,
        });
        record(violation, residual);
    }

    for (i, &gamma) in sets.iter().enumerate() {
        for (j, &beta) in sets.iter().enumerate().skip(i + 1) {
            for &alpha in sets.iter().skip(j + 1) {
                let left = c
                    .wedge_value(gamma, beta)
                    .multiply(c.wedge_value(beta, alpha));
                let residual = left
                    .map(|p| p.distance(c.wedge_value(gamma, alpha)).expect("same tag"))
                    .unwrap_or(f64::INFINITY);
                let violation = (residual > tolerance).then_some(CocycleViolation::Relation {
                    triple: (gamma, beta, alpha),
                    residual,
                });
                record(violation, residual);
            }
        }
    }
    report
}

/// Applies the per-set constant gauge change
/// `g'(beta, alpha) = lambda(beta) g(beta, alpha) lambda(alpha)^-1`
/// at every shared point. This is a group action and it preserves the
/// cocycle relations exactly.
pub fn apply_constant_lambda(
    c: &Cocycle,
    lambda: &BTreeMap<CoverSet, GroupElement>,
) -> Result<Cocycle, CocycleError> {
    let cover = c.cover();
    for set in cover.sets() {
        let value = lambda
            .get(&set)
            .ok_or(CocycleError::MissingLambda(set))?;
        if value.tag() != c.tag() {
            return Err(LieGroupError::TagMismatch {
                left: value.tag(),
                right: c.tag(),
            }
            .into());
        }
    }
    let translate = |map: &BTreeMap<(CoverSet, CoverSet), GroupElement>| {
        map.iter()
            .map(|(&(beta, alpha), g)| {
                let value = lambda[&beta]
                    .multiply(g)?
                    .multiply(&lambda[&alpha].inverse())?;
                Ok(((beta, alpha), value))
            })
            .collect::<Result<BTreeMap<_, _>, CocycleError>>()
    };
    Cocycle::from_raw(
        c.tag(),
        c.rank(),
        translate(&c.at_wedge)?,
        translate(&c.at_marked)?,
    )
}

/// A sampled candidate coboundary: one map `[0, 1] -> G` per cover set. The
/// wedge point sits at both ends of the parameter interval and the marked
/// point at its middle.
#[derive(Clone, Debug)]
pub struct Trivialization {
    tag: GroupTag,
    rank: u32,
    samples_per_set: usize,
    maps: BTreeMap<CoverSet, Vec<GroupElement>>,
}

impl Trivialization {
    pub fn tag(&self) -> GroupTag {
        self.tag
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn samples_per_set(&self) -> usize {
        self.samples_per_set
    }

    pub fn map(&self, set: CoverSet) -> &[GroupElement] {
        &self.maps[&set]
    }

    /// Sample indices carrying the wedge point.
    pub fn wedge_indices(&self) -> [usize; 2] {
        [0, self.samples_per_set - 1]
    }

    /// Sample index carrying the marked point.
    pub fn marked_index(&self) -> usize {
        (self.samples_per_set - 1) / 2
    }

    /// Continuity budget for consecutive samples.
    pub fn delta_max(&self) -> f64 {
        10.0 / self.samples_per_set as f64
    }

    pub fn from_raw(
        tag: GroupTag,
        rank: u32,
        samples_per_set: usize,
        maps: BTreeMap<CoverSet, Vec<GroupElement>>,
    ) -> Result<Self, CocycleError> {
        let cover = WedgeCover::new(rank)?;
        if samples_per_set < 3 || samples_per_set % 2 == 0 {
            return Err(CocycleError::Shape(
                "samples per set must be odd and at least 3".into(),
            ));
        }
        for set in cover.sets() {
            let samples = maps
                .get(&set)
                .ok_or_else(|| CocycleError::Shape(format!("missing map for set {set}")))?;
            if samples.len() != samples_per_set {
                return Err(CocycleError::Shape(format!(
                    "map for set {set} has {} samples, expected {samples_per_set}",
                    samples.len()
                )));
            }
            for g in samples {
                if g.tag() != tag {
                    return Err(LieGroupError::TagMismatch {
                        left: g.tag(),
                        right: tag,
                    }
                    .into());
                }
            }
        }
        Ok(Self {
            tag,
            rank,
            samples_per_set,
            maps,
        })
    }

    pub fn maps(&self) -> &BTreeMap<CoverSet, Vec<GroupElement>> {
        &self.maps
    }
}

/// Fixed interior waypoint offset for branch-cut retries.
fn interpolation_jitter(tag: GroupTag) -> AlgebraElement {
    let seeds = [0.47, -0.31, 0.19, 0.23, -0.41, 0.29, 0.37, -0.17];
    let coeffs: Vec<num_complex::Complex64> = (0..tag.basis_len())
        .map(|i| num_complex::Complex64::new(seeds[i % seeds.len()], 0.0))
        .collect();
    AlgebraElement::from_coefficients(tag, &coeffs).expect("jitter coefficients are valid")
}

/// Geodesic samples from `a` to `b` inclusive. When the direct logarithm
/// sits on the branch cut, the segment is retried once through an interior
/// waypoint; a second failure is a hard error.
fn geodesic_samples(
    a: &GroupElement,
    b: &GroupElement,
    count: usize,
) -> Result<Vec<GroupElement>, CocycleError> {
    assert!(count >= 2);
    match log(&a.inverse().multiply(b)?) {
        Ok(step) => Ok(direct_geodesic(a, b, &step, count)),
        Err(LieGroupError::BranchBoundary { .. }) => {
            let waypoint = a.multiply(&exp(&interpolation_jitter(a.tag())))?;
            let first_leg = log(&a.inverse().multiply(&waypoint)?)
                .map_err(|_| CocycleError::Interpolation)?;
            let second_leg = log(&waypoint.inverse().multiply(b)?)
                .map_err(|_| CocycleError::Interpolation)?;
            let half = count / 2 + 1;
            let mut samples = direct_geodesic(a, &waypoint, &first_leg, half);
            let rest = direct_geodesic(&waypoint, b, &second_leg, count - half + 1);
            samples.extend(rest.into_iter().skip(1));
            Ok(samples)
        }
        Err(e) => Err(e.into()),
    }
}

fn direct_geodesic(
    a: &GroupElement,
    b: &GroupElement,
    step: &AlgebraElement,
    count: usize,
) -> Vec<GroupElement> {
    let mut samples = Vec::with_capacity(count);
    samples.push(a.clone());
    for i in 1..count - 1 {
        let t = i as f64 / (count - 1) as f64;
        let value = a
            .multiply(&exp(&step.scale(t)))
            .expect("geodesic stays in the group");
        samples.push(value);
    }
    samples.push(b.clone());
    samples
}

/// Constructs a sampled coboundary for a valid cocycle.
///
/// Gauge constants at the wedge point are fixed by the spanning-tree choice
/// `Lambda(1+) = identity`, with every other set solved from its pair
/// relation against `1+`. The marked-point requirement is split evenly
/// between the two arcs of each circle, and each arc interpolates out and
/// back along group geodesics. `samples_per_set` is rounded up to an odd
/// count of at least 3.
pub fn trivialize(c: &Cocycle, samples_per_set: usize) -> Result<Trivialization, CocycleError> {
    let validation = validate_cocycle(c, VALIDATION_TOL);
    if !validation.is_ok() {
        return Err(CocycleError::Validation {
            max_residual: validation.max_residual,
        });
    }
    let samples = {
        let s = samples_per_set.max(3);
        if s % 2 == 0 {
            s + 1
        } else {
            s
        }
    };
    let half_count = (samples - 1) / 2 + 1;
    let root = CoverSet::plus(1);

    let mut anchors: BTreeMap<CoverSet, GroupElement> = BTreeMap::new();
    anchors.insert(root, GroupElement::identity(c.tag()));
    for set in c.cover().sets() {
        if set != root {
            anchors.insert(set, c.wedge_value(set, root).clone());
        }
    }

    let mut maps = BTreeMap::new();
    for k in 1..=c.rank() {
        let (plus, minus) = (CoverSet::plus(k), CoverSet::minus(k));
        let lambda_plus = anchors[&plus].clone();
        let lambda_minus = anchors[&minus].clone();
        let marked = c.marked_value(plus, minus);

        // split the marked-point discrepancy between the two arcs
        let discrepancy = lambda_plus
            .inverse()
            .multiply(marked)?
            .multiply(&lambda_minus)?;
        let (end_plus, end_minus) = match log(&discrepancy) {
            Ok(y) => {
                let end_plus = lambda_plus.multiply(&exp(&y.scale(0.5)))?;
                let end_minus = marked.inverse().multiply(&end_plus)?;
                (end_plus, end_minus)
            }
            Err(LieGroupError::BranchBoundary { .. }) => {
                // leave the minus arc anchored; the geodesic handles the cut
                (marked.multiply(&lambda_minus)?, lambda_minus.clone())
            }
            Err(e) => return Err(e.into()),
        };

        for (set, start, end) in [
            (plus, lambda_plus, end_plus),
            (minus, lambda_minus, end_minus),
        ] {
            let mut out = geodesic_samples(&start, &end, half_count)?;
            let back: Vec<GroupElement> = out.iter().rev().skip(1).cloned().collect();
            out.extend(back);
            maps.insert(set, out);
        }
    }

    Trivialization::from_raw(c.tag(), c.rank(), samples, maps)
}

#[derive(Clone, Debug)]
pub struct TrivializationReport {
    /// Largest coboundary residual over all pairs and shared points.
    pub max_overlap_residual: f64,
    /// Pair and point realizing the worst residual.
    pub worst_overlap: String,
    /// Largest distance between consecutive samples of any map.
    pub max_continuity_gap: f64,
    pub delta_max: f64,
    pub tolerance: f64,
    pub residual_ok: bool,
    pub continuity_ok: bool,
}

impl TrivializationReport {
    pub fn pass(&self) -> bool {
        self.residual_ok && self.continuity_ok
    }
}

/// Independently re-checks a trivialization against its cocycle: every
/// coboundary relation at every shared point, and the sampled continuity
/// bound.
pub fn verify_trivialization(
    c: &Cocycle,
    triv: &Trivialization,
    tolerance: f64,
) -> Result<TrivializationReport, CocycleError> {
    if triv.tag() != c.tag() || triv.rank() != c.rank() {
        return Err(CocycleError::Shape(
            "trivialization does not match the cocycle".into(),
        ));
    }
    let cover = c.cover();
    let mut max_residual = 0.0f64;
    let mut worst = String::from("none");
    let mut check = |residual: f64, label: String| {
        if residual > max_residual {
            max_residual = residual;
            worst = label;
        }
    };

    for (beta, alpha) in cover.ordered_pairs() {
        let expected = c.wedge_value(beta, alpha);
        for idx in triv.wedge_indices() {
            let actual = triv.map(beta)[idx].multiply(&triv.map(alpha)[idx].inverse())?;
            let residual = actual.distance(expected)?;
            check(residual, format!("{beta}|{alpha} at wedge point (sample {idx})"));
        }
        if let Overlap::SameCircle { .. } = cover.overlap(beta, alpha) {
            let idx = triv.marked_index();
            let expected = c.marked_value(beta, alpha);
            let actual = triv.map(beta)[idx].multiply(&triv.map(alpha)[idx].inverse())?;
            let residual = actual.distance(expected)?;
            check(residual, format!("{beta}|{alpha} at marked point"));
        }
    }

    let mut max_gap = 0.0f64;
    for set in cover.sets() {
        let samples = triv.map(set);
        for w in samples.windows(2) {
            max_gap = max_gap.max(w[0].distance(&w[1])?);
        }
    }

    let delta_max = triv.delta_max();
    Ok(TrivializationReport {
        max_overlap_residual: max_residual,
        worst_overlap: worst,
        max_continuity_gap: max_gap,
        delta_max,
        tolerance,
        residual_ok: max_residual <= tolerance,
        continuity_ok: max_gap <= delta_max,
    })
}

/// Self-contained certificate: the cocycle and its sampled coboundary.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub version: u32,
    pub cocycle: CocycleFile,
    pub samples_per_set: usize,
    pub maps: BTreeMap<String, Vec<MatrixData>>,
}

impl CertificateFile {
    pub fn build(c: &Cocycle, triv: &Trivialization) -> Self {
        Self {
            version: 1,
            cocycle: c.to_file(),
            samples_per_set: triv.samples_per_set(),
            maps: triv
                .maps()
                .iter()
                .map(|(set, samples)| {
                    (
                        set.to_string(),
                        samples.iter().map(|g| matrix_to_data(g.matrix())).collect(),
                    )
                })
                .collect(),
        }
    }

    pub fn decode(&self) -> Result<(Cocycle, Trivialization), CocycleError> {
        if self.version != 1 {
            return Err(CocycleError::Shape(format!(
                "unsupported certificate schema version {}",
                self.version
            )));
        }
        let cocycle = Cocycle::from_file(&self.cocycle)?;
        let mut maps = BTreeMap::new();
        for (key, samples) in &self.maps {
            let set = CoverSet::parse(key)?;
            let decoded = samples
                .iter()
                .map(|data| {
                    let m = matrix_from_data(data).map_err(CocycleError::Shape)?;
                    Ok(GroupElement::new(cocycle.tag(), m)?)
                })
                .collect::<Result<Vec<_>, CocycleError>>()?;
            maps.insert(set, decoded);
        }
        let triv = Trivialization::from_raw(
            cocycle.tag(),
            cocycle.rank(),
            self.samples_per_set,
            maps,
        )?;
        Ok((cocycle, triv))
    }
}
