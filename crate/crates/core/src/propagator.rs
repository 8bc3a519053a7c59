//! Homotopy-class-resolved propagator sums on a lattice.
//!
//! Random walks run from a source to a detector on a square lattice whose
//! puncture cells are excised with a one-cell margin. Each accepted walk is
//! closed up with a fixed reference return path and classified by its loop
//! word; the propagator is the class table contracted with holonomy factors.
//! Walk weights are uniform (combinatorial counting): the class
//! decomposition and the gauge factors carry the interference structure, not
//! the kinetic kernel.
//!
//! Sampling is deterministic and schedule-invariant: fixed-size batches own
//! ChaCha streams derived from the seed and detector cell, and merges are
//! commutative integer sums.

use std::collections::{BTreeMap, HashSet};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::freegroup::Word;
use crate::geometry::{self, GeometryError, PlanePath, Point2};
use crate::holonomy::{FluxScenario, HolonomyError, HolonomyMap};

/// Default cap on stored word length; longer classes land in the overflow
/// bucket.
pub const DEFAULT_WORD_CAP: usize = 8;
/// Walks per deterministic batch.
const BATCH_SIZE: u64 = 4096;
/// Exhaustive enumeration is limited to this many steps.
pub const MAX_ENUMERATION_STEPS: u32 = 16;
/// Minimum relative distance of a puncture from the nearest lattice column.
const COLUMN_CLEARANCE: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum PropagatorError {
    #[error("no accepted walks out of {sampled} samples")]
    InsufficientSamples { sampled: u64 },
    #[error("puncture {label} sits within {distance:.3e} of a lattice column; move the lattice or jitter the puncture")]
    LatticeAlignment { label: u32, distance: f64 },
    #[error("{what} lies in an excised puncture cell")]
    Blocked { what: &'static str },
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: u32, right: u32 },
    #[error("pattern variance {variance:.3e} too small for fringe extraction")]
    FlatPattern { variance: f64 },
    #[error("bad screen: {0}")]
    ScreenShape(String),
    #[error("exhaustive enumeration supports at most {MAX_ENUMERATION_STEPS} steps, got {got}")]
    EnumerationTooLarge { got: u32 },
    #[error("invalid ensemble: {0}")]
    Ensemble(String),
    #[error(transparent)]
    Holonomy(#[from] HolonomyError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A seeded lattice-walk sampling configuration over one scenario.
#[derive(Clone, Debug)]
pub struct WalkEnsemble {
    scenario: FluxScenario,
    source: Point2,
    steps: u32,
    samples: u64,
    seed: u64,
    spacing: f64,
    word_cap: usize,
    excised: HashSet<(i64, i64)>,
}

impl WalkEnsemble {
    pub fn new(
        scenario: FluxScenario,
        source: Point2,
        steps: u32,
        samples: u64,
        seed: u64,
        spacing: f64,
    ) -> Result<Self, PropagatorError> {
        if steps < 1 {
            return Err(PropagatorError::Ensemble("steps must be at least 1".into()));
        }
        if samples < 1 {
            return Err(PropagatorError::Ensemble(
                "samples must be at least 1".into(),
            ));
        }
        if !(spacing > 0.0) {
            return Err(PropagatorError::Ensemble("spacing must be positive".into()));
        }
        // punctures must sit away from lattice columns so walk vertices
        // stay off the cut rays
        for p in scenario.punctures() {
            let u = (p.position().x - source.x) / spacing;
            let offset = (u - u.round()).abs();
            if offset < COLUMN_CLEARANCE {
                return Err(PropagatorError::LatticeAlignment {
                    label: p.label(),
                    distance: offset * spacing,
                });
            }
        }
        let mut excised = HashSet::new();
        for p in scenario.punctures() {
            let ci = ((p.position().x - source.x) / spacing).round() as i64;
            let cj = ((p.position().y - source.y) / spacing).round() as i64;
            for di in -1..=1 {
                for dj in -1..=1 {
                    excised.insert((ci + di, cj + dj));
                }
            }
        }
        if excised.contains(&(0, 0)) {
            return Err(PropagatorError::Blocked { what: "source" });
        }
        Ok(Self {
            scenario,
            source,
            steps,
            samples,
            seed,
            spacing,
            word_cap: DEFAULT_WORD_CAP,
            excised,
        })
    }

    pub fn with_word_cap(mut self, cap: usize) -> Self {
        self.word_cap = cap;
        self
    }

    pub fn scenario(&self) -> &FluxScenario {
        &self.scenario
    }

    pub fn source(&self) -> Point2 {
        self.source
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn word_cap(&self) -> usize {
        self.word_cap
    }

    /// Nearest lattice cell to a world point.
    pub fn snap(&self, p: Point2) -> (i64, i64) {
        (
            ((p.x - self.source.x) / self.spacing).round() as i64,
            ((p.y - self.source.y) / self.spacing).round() as i64,
        )
    }

    pub fn world(&self, cell: (i64, i64)) -> Point2 {
        Point2::new(
            self.source.x + cell.0 as f64 * self.spacing,
            self.source.y + cell.1 as f64 * self.spacing,
        )
    }

    /// A priori bound on any winding number in the class table: the first
    /// passage is free, and each further wrap must circumnavigate an excised
    /// 3x3 block, which takes a 16-step lattice ring.
    pub fn winding_bound(&self) -> i64 {
        1 + self.steps as i64 / 16
    }

    fn reference_return_height(&self) -> f64 {
        let max_puncture_y = self
            .scenario
            .punctures()
            .iter()
            .map(|p| p.position().y)
            .fold(f64::NEG_INFINITY, f64::max);
        max_puncture_y + 2.0 * self.spacing
    }

    /// Closes a walk into a based loop with the fixed reference return:
    /// detector, straight up over every puncture, across, and back down to
    /// the source.
    fn classify_walk(&self, cells: &[(i64, i64)]) -> Result<Word, PropagatorError> {
        let y_top = self.reference_return_height();
        let detector = self.world(*cells.last().expect("walks are nonempty"));
        let mut vertices: Vec<Point2> = Vec::with_capacity(cells.len() + 3);
        vertices.extend(cells.iter().map(|&c| self.world(c)));
        vertices.push(Point2::new(detector.x, y_top));
        vertices.push(Point2::new(self.source.x, y_top));
        let path = PlanePath::closed(vertices)?;
        Ok(geometry::word_of_loop(
            &path,
            self.scenario.punctures(),
            self.scenario.rank(),
        )?)
    }
}

/// Per-class statistics of accepted walks at one detector. Amplitudes are
/// `count / accepted`; classes longer than the word cap are pooled in the
/// overflow bucket and excluded from assembly.
#[derive(Clone, Debug)]
pub struct ClassAmplitudeTable {
    rank: u32,
    counts: BTreeMap<Word, u64>,
    overflow: u64,
    accepted: u64,
    sampled: u64,
    word_cap: usize,
}

impl ClassAmplitudeTable {
    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn counts(&self) -> &BTreeMap<Word, u64> {
        &self.counts
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }

    pub fn sampled(&self) -> u64 {
        self.sampled
    }

    pub fn word_cap(&self) -> usize {
        self.word_cap
    }

    pub fn amplitude(&self, word: &Word) -> Complex64 {
        let count = self.counts.get(word).copied().unwrap_or(0);
        Complex64::new(count as f64 / self.accepted as f64, 0.0)
    }

    /// Fraction of accepted walks inside the stored classes.
    pub fn table_mass(&self) -> f64 {
        let stored: u64 = self.counts.values().sum();
        stored as f64 / self.accepted as f64
    }

    /// Fraction of accepted walks beyond the word cap.
    pub fn overflow_mass(&self) -> f64 {
        self.overflow as f64 / self.accepted as f64
    }

    /// Serializes as word string to `[re, im]` amplitude.
    pub fn to_json_map(&self) -> BTreeMap<String, [f64; 2]> {
        self.counts
            .iter()
            .map(|(w, _)| {
                let a = self.amplitude(w);
                (w.to_string(), [a.re, a.im])
            })
            .collect()
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn detector_salt(cell: (i64, i64)) -> u64 {
    splitmix64((cell.0 as u64).wrapping_mul(0x9E3779B97F4A7C15) ^ (cell.1 as u64))
}

#[derive(Default)]
struct Tally {
    counts: BTreeMap<Word, u64>,
    overflow: u64,
    accepted: u64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        for (w, c) in other.counts {
            *self.counts.entry(w).or_insert(0) += c;
        }
        self.overflow += other.overflow;
        self.accepted += other.accepted;
        self
    }
}

const STEP_DELTAS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Samples lattice walks to the detector and classifies the accepted ones.
/// Deterministic in the seed and independent of thread count.
pub fn sample_class_amplitudes(
    ensemble: &WalkEnsemble,
    detector: Point2,
) -> Result<ClassAmplitudeTable, PropagatorError> {
    let det_cell = ensemble.snap(detector);
    if ensemble.excised.contains(&det_cell) {
        return Err(PropagatorError::Blocked { what: "detector" });
    }
    // parity obstruction: a walk of T steps can only reach cells of the
    // same parity
    let parity = (det_cell.0 + det_cell.1).rem_euclid(2);
    if parity != (ensemble.steps as i64).rem_euclid(2) {
        return Err(PropagatorError::InsufficientSamples { sampled: 0 });
    }

    let salt = detector_salt(det_cell);
    let batches = ensemble.samples.div_ceil(BATCH_SIZE);
    let tally = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(ensemble.seed);
            rng.set_stream(salt.wrapping_add(batch));
            let walks_here = BATCH_SIZE.min(ensemble.samples - batch * BATCH_SIZE);
            let mut local = Tally::default();
            let mut cells: Vec<(i64, i64)> = Vec::with_capacity(ensemble.steps as usize + 1);
            for _ in 0..walks_here {
                cells.clear();
                cells.push((0, 0));
                let mut pos = (0i64, 0i64);
                let mut blocked = false;
                for _ in 0..ensemble.steps {
                    let delta = STEP_DELTAS[(rng.next_u32() & 3) as usize];
                    pos = (pos.0 + delta.0, pos.1 + delta.1);
                    blocked |= ensemble.excised.contains(&pos);
                    cells.push(pos);
                }
                if blocked || pos != det_cell {
                    continue;
                }
                let word = ensemble
                    .classify_walk(&cells)
                    .expect("lattice walks satisfy genericity by construction");
                local.accepted += 1;
                if word.len() > ensemble.word_cap {
                    local.overflow += 1;
                } else {
                    *local.counts.entry(word).or_insert(0) += 1;
                }
            }
            local
        })
        .reduce(Tally::default, Tally::merge);

    if tally.accepted == 0 {
        return Err(PropagatorError::InsufficientSamples {
            sampled: ensemble.samples,
        });
    }
    Ok(ClassAmplitudeTable {
        rank: ensemble.scenario.rank(),
        counts: tally.counts,
        overflow: tally.overflow,
        accepted: tally.accepted,
        sampled: ensemble.samples,
        word_cap: ensemble.word_cap,
    })
}

/// Exhaustively enumerates every accepted walk of the ensemble's length to
/// the detector; the exact distribution the sampler converges to.
pub fn enumerate_class_amplitudes(
    ensemble: &WalkEnsemble,
    detector: Point2,
) -> Result<ClassAmplitudeTable, PropagatorError> {
    if ensemble.steps > MAX_ENUMERATION_STEPS {
        return Err(PropagatorError::EnumerationTooLarge {
            got: ensemble.steps,
        });
    }
    let det_cell = ensemble.snap(detector);
    if ensemble.excised.contains(&det_cell) {
        return Err(PropagatorError::Blocked { what: "detector" });
    }
    let mut tally = Tally::default();
    let mut cells: Vec<(i64, i64)> = vec![(0, 0)];
    enumerate_rec(ensemble, det_cell, &mut cells, &mut tally)?;
    if tally.accepted == 0 {
        return Err(PropagatorError::InsufficientSamples { sampled: 0 });
    }
    Ok(ClassAmplitudeTable {
        rank: ensemble.scenario.rank(),
        counts: tally.counts,
        overflow: tally.overflow,
        accepted: tally.accepted,
        sampled: tally.accepted,
        word_cap: ensemble.word_cap,
    })
}

fn enumerate_rec(
    ensemble: &WalkEnsemble,
    det_cell: (i64, i64),
    cells: &mut Vec<(i64, i64)>,
    tally: &mut Tally,
) -> Result<(), PropagatorError> {
    let pos = *cells.last().unwrap();
    let remaining = ensemble.steps as i64 + 1 - cells.len() as i64;
    let manhattan = (det_cell.0 - pos.0).abs() + (det_cell.1 - pos.1).abs();
    if manhattan > remaining {
        return Ok(()); // unreachable in the remaining steps
    }
    if remaining == 0 {
        let word = ensemble.classify_walk(cells)?;
        tally.accepted += 1;
        if word.len() > ensemble.word_cap {
            tally.overflow += 1;
        } else {
            *tally.counts.entry(word).or_insert(0) += 1;
        }
        return Ok(());
    }
    for delta in STEP_DELTAS {
        let next = (pos.0 + delta.0, pos.1 + delta.1);
        if ensemble.excised.contains(&next) {
            continue;
        }
        cells.push(next);
        enumerate_rec(ensemble, det_cell, cells, tally)?;
        cells.pop();
    }
    Ok(())
}

/// Contracts the class table with holonomy factors:
/// `K = sum_w amplitude(w) phi(w)`. Overflow mass is excluded.
pub fn assemble_propagator(
    table: &ClassAmplitudeTable,
    map: &HolonomyMap,
) -> Result<DMatrix<Complex64>, PropagatorError> {
    if table.rank() != map.rank() {
        return Err(PropagatorError::RankMismatch {
            left: table.rank(),
            right: map.rank(),
        });
    }
    let dim = map.tag().dim();
    let mut k = DMatrix::<Complex64>::zeros(dim, dim);
    for (word, &count) in table.counts() {
        let factor = map.holonomy_of_word(word)?;
        k += factor.matrix() * Complex64::new(count as f64, 0.0);
    }
    Ok(k / Complex64::new(table.accepted as f64, 0.0))
}

/// Intensity (squared Frobenius norm of the assembled propagator) at every
/// screen point. Detectors are processed in parallel; per-detector streams
/// keep the result independent of scheduling.
pub fn interference_scan(
    ensemble: &WalkEnsemble,
    screen: &[Point2],
    map: &HolonomyMap,
) -> Result<Vec<f64>, PropagatorError> {
    screen
        .par_iter()
        .map(|&detector| {
            let table = sample_class_amplitudes(ensemble, detector)?;
            let k = assemble_propagator(&table, map)?;
            Ok(k.norm_squared())
        })
        .collect()
}

/// Cross-correlation peak offset between two intensity patterns on a shared
/// uniform screen, in screen coordinates, with parabolic subpixel
/// refinement. Antisymmetric under swapping the patterns.
pub fn fringe_shift(
    pattern: &[f64],
    baseline: &[f64],
    coords: &[f64],
) -> Result<f64, PropagatorError> {
    let n = pattern.len();
    if n < 4 || baseline.len() != n || coords.len() != n {
        return Err(PropagatorError::ScreenShape(
            "patterns and coordinates must share a length of at least 4".into(),
        ));
    }
    let spacing = coords[1] - coords[0];
    for w in coords.windows(2) {
        if ((w[1] - w[0]) - spacing).abs() > 1e-9 * spacing.abs().max(1.0) {
            return Err(PropagatorError::ScreenShape(
                "screen coordinates must be uniformly spaced".into(),
            ));
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let var = |v: &[f64], m: f64| v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64;
    let (ma, mb) = (mean(pattern), mean(baseline));
    let (va, vb) = (var(pattern, ma), var(baseline, mb));
    let scale = ma.abs().max(mb.abs()).max(1e-300);
    let threshold = 1e-16 * scale * scale;
    if va < threshold || vb < threshold {
        return Err(PropagatorError::FlatPattern {
            variance: va.min(vb),
        });
    }

    // circular cross-correlation over all lags
    let correlation: Vec<f64> = (0..n)
        .map(|lag| {
            (0..n)
                .map(|i| (pattern[(i + lag) % n] - ma) * (baseline[i] - mb))
                .sum::<f64>()
        })
        .collect();
    let signed = |lag: usize| {
        let l = lag as i64;
        if l > n as i64 / 2 {
            l - n as i64
        } else {
            l
        }
    };
    let best = (0..n)
        .max_by(|&a, &b| {
            correlation[a]
                .total_cmp(&correlation[b])
                .then(signed(b).abs().cmp(&signed(a).abs()))
                .then(signed(b).cmp(&signed(a)))
        })
        .unwrap();
    let prev = correlation[(best + n - 1) % n];
    let here = correlation[best];
    let next = correlation[(best + 1) % n];
    let denom = 2.0 * (2.0 * here - prev - next);
    let subpixel = if denom.abs() < 1e-300 {
        0.0
    } else {
        ((next - prev) / denom).clamp(-0.5, 0.5)
    };
    Ok((signed(best) as f64 + subpixel) * spacing)
}
