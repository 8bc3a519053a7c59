//! Matrix backends for the structure groups U(1), SU(2), SU(3) and SL(2, C).
//!
//! Group and algebra elements are validated against their membership
//! invariants on construction. Exponential and logarithm use
//! eigendecomposition for the normal (unitary) groups and scaling-and-squaring
//! with inverse scaling for SL(2, C), so that outputs stay on the group
//! manifold to roundoff. Every element also admits an explicit continuous
//! path to the identity, which the cocycle trivialization relies on.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

pub type CMatrix = DMatrix<Complex64>;

/// Group-membership tolerance for all backends.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// An eigenphase this close to the principal-branch cut is rejected by `log`.
pub const BRANCH_TOL: f64 = 1e-12;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error)]
pub enum LieGroupError {
    #[error("group tag mismatch: {left:?} vs {right:?}")]
    TagMismatch { left: GroupTag, right: GroupTag },
    #[error("matrix violates {tag:?} membership by {residual:.3e}")]
    Membership { tag: GroupTag, residual: f64 },
    #[error("matrix violates {tag:?} algebra membership by {residual:.3e}")]
    AlgebraMembership { tag: GroupTag, residual: f64 },
    #[error("principal branch boundary reached for {tag:?}; caller must pre-rotate")]
    BranchBoundary { tag: GroupTag },
    #[error("expected {expected}x{expected} matrix, got {rows}x{cols}")]
    DimensionMismatch {
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("{tag:?} takes {expected} basis coefficients, got {got}")]
    CoefficientCount {
        tag: GroupTag,
        expected: usize,
        got: usize,
    },
    #[error("unknown group tag '{0}'")]
    UnknownTag(String),
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum GroupTag {
    U1,
    Su2,
    Su3,
    Sl2C,
}

impl GroupTag {
    pub const ALL: [GroupTag; 4] = [GroupTag::U1, GroupTag::Su2, GroupTag::Su3, GroupTag::Sl2C];

    /// Dimension of the defining representation.
    pub fn dim(self) -> usize {
        match self {
            GroupTag::U1 => 1,
            GroupTag::Su2 | GroupTag::Sl2C => 2,
            GroupTag::Su3 => 3,
        }
    }

    pub fn is_unitary(self) -> bool {
        !matches!(self, GroupTag::Sl2C)
    }

    /// Number of coefficients against the documented algebra basis.
    pub fn basis_len(self) -> usize {
        match self {
            GroupTag::U1 => 1,
            GroupTag::Su2 | GroupTag::Sl2C => 3,
            GroupTag::Su3 => 8,
        }
    }

    /// Fixed algebra basis. U(1): `{i}`; SU(2): `i*sigma_j/2`; SU(3):
    /// `i*lambda_a/2`; SL(2, C): `i*sigma_j/2` taken with complex
    /// coefficients.
    pub fn basis(self) -> Vec<CMatrix> {
        match self {
            GroupTag::U1 => vec![CMatrix::from_row_slice(1, 1, &[I])],
            GroupTag::Su2 | GroupTag::Sl2C => pauli_matrices()
                .into_iter()
                .map(|s| s * (I * 0.5))
                .collect(),
            GroupTag::Su3 => gell_mann_matrices()
                .into_iter()
                .map(|l| l * (I * 0.5))
                .collect(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GroupTag::U1 => "u1",
            GroupTag::Su2 => "su2",
            GroupTag::Su3 => "su3",
            GroupTag::Sl2C => "sl2c",
        }
    }

    pub fn parse(s: &str) -> Result<Self, LieGroupError> {
        match s.to_ascii_lowercase().as_str() {
            "u1" | "u(1)" => Ok(GroupTag::U1),
            "su2" | "su(2)" => Ok(GroupTag::Su2),
            "su3" | "su(3)" => Ok(GroupTag::Su3),
            "sl2c" | "sl(2,c)" => Ok(GroupTag::Sl2C),
            other => Err(LieGroupError::UnknownTag(other.to_string())),
        }
    }
}

fn pauli_matrices() -> [CMatrix; 3] {
    let z = Complex64::new(0.0, 0.0);
    [
        CMatrix::from_row_slice(2, 2, &[z, ONE, ONE, z]),
        CMatrix::from_row_slice(2, 2, &[z, -I, I, z]),
        CMatrix::from_row_slice(2, 2, &[ONE, z, z, -ONE]),
    ]
}

fn gell_mann_matrices() -> [CMatrix; 8] {
    let z = Complex64::new(0.0, 0.0);
    let r = |x: f64| Complex64::new(x, 0.0);
    let s3 = 1.0 / 3f64.sqrt();
    [
        CMatrix::from_row_slice(3, 3, &[z, ONE, z, ONE, z, z, z, z, z]),
        CMatrix::from_row_slice(3, 3, &[z, -I, z, I, z, z, z, z, z]),
        CMatrix::from_row_slice(3, 3, &[ONE, z, z, z, -ONE, z, z, z, z]),
        CMatrix::from_row_slice(3, 3, &[z, z, ONE, z, z, z, ONE, z, z]),
        CMatrix::from_row_slice(3, 3, &[z, z, -I, z, z, z, I, z, z]),
        CMatrix::from_row_slice(3, 3, &[z, z, z, z, z, ONE, z, ONE, z]),
        CMatrix::from_row_slice(3, 3, &[z, z, z, z, z, -I, z, I, z]),
        CMatrix::from_row_slice(3, 3, &[r(s3), z, z, z, r(s3), z, z, z, r(-2.0 * s3)]),
    ]
}

fn identity_matrix(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

fn check_dim(tag: GroupTag, m: &CMatrix) -> Result<(), LieGroupError> {
    let d = tag.dim();
    if m.nrows() != d || m.ncols() != d {
        return Err(LieGroupError::DimensionMismatch {
            expected: d,
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

/// Frobenius-norm defect of the group-membership invariants.
pub fn membership_residual(tag: GroupTag, m: &CMatrix) -> f64 {
    let d = tag.dim();
    let det_defect = (det_small(m) - ONE).norm();
    match tag {
        GroupTag::U1 => (m[(0, 0)].norm() - 1.0).abs(),
        GroupTag::Su2 | GroupTag::Su3 => {
            let unitary_defect = (m.adjoint() * m - identity_matrix(d)).norm();
            unitary_defect.max(det_defect)
        }
        GroupTag::Sl2C => det_defect,
    }
}

/// Frobenius-norm defect of the algebra-membership invariants.
pub fn algebra_residual(tag: GroupTag, m: &CMatrix) -> f64 {
    match tag {
        GroupTag::U1 => m[(0, 0)].re.abs(),
        GroupTag::Su2 | GroupTag::Su3 => {
            let anti = (m.adjoint() + m).norm();
            anti.max(trace(m).norm())
        }
        GroupTag::Sl2C => trace(m).norm(),
    }
}

fn trace(m: &CMatrix) -> Complex64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

/// Determinant by cofactor expansion; all backends are at most 3x3.
fn det_small(m: &CMatrix) -> Complex64 {
    match m.nrows() {
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        3 => {
            m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
                - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
                + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
        }
        _ => m.determinant(),
    }
}

/// An element of the structure group in its defining matrix representation.
#[derive(Clone, Debug)]
pub struct GroupElement {
    tag: GroupTag,
    m: CMatrix,
}

impl GroupElement {
    pub fn new(tag: GroupTag, m: CMatrix) -> Result<Self, LieGroupError> {
        check_dim(tag, &m)?;
        let residual = membership_residual(tag, &m);
        if residual > MEMBERSHIP_TOL {
            return Err(LieGroupError::Membership { tag, residual });
        }
        Ok(Self { tag, m })
    }

    pub(crate) fn from_parts_unchecked(tag: GroupTag, m: CMatrix) -> Self {
        debug_assert!(membership_residual(tag, &m) <= 1e-6);
        Self { tag, m }
    }

    pub fn identity(tag: GroupTag) -> Self {
        Self {
            tag,
            m: identity_matrix(tag.dim()),
        }
    }

    pub fn tag(&self) -> GroupTag {
        self.tag
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.tag.dim()
    }

    fn check_tag(&self, other: &GroupElement) -> Result<(), LieGroupError> {
        if self.tag != other.tag {
            return Err(LieGroupError::TagMismatch {
                left: self.tag,
                right: other.tag,
            });
        }
        Ok(())
    }

    pub fn multiply(&self, other: &GroupElement) -> Result<GroupElement, LieGroupError> {
        self.check_tag(other)?;
        let m = &self.m * &other.m;
        let residual = membership_residual(self.tag, &m);
        if residual > MEMBERSHIP_TOL {
            return Err(LieGroupError::Membership {
                tag: self.tag,
                residual,
            });
        }
        Ok(GroupElement { tag: self.tag, m })
    }

    /// Conjugate transpose for the unitary groups; adjugate for SL(2, C).
    pub fn inverse(&self) -> GroupElement {
        let m = match self.tag {
            GroupTag::U1 | GroupTag::Su2 | GroupTag::Su3 => self.m.adjoint(),
            GroupTag::Sl2C => {
                let mut inv = CMatrix::zeros(2, 2);
                inv[(0, 0)] = self.m[(1, 1)];
                inv[(0, 1)] = -self.m[(0, 1)];
                inv[(1, 0)] = -self.m[(1, 0)];
                inv[(1, 1)] = self.m[(0, 0)];
                let det = det_small(&self.m);
                inv / det
            }
        };
        GroupElement { tag: self.tag, m }
    }

    /// Frobenius norm of the difference; zero iff equal.
    pub fn distance(&self, other: &GroupElement) -> Result<f64, LieGroupError> {
        self.check_tag(other)?;
        Ok((&self.m - &other.m).norm())
    }

    pub fn membership_defect(&self) -> f64 {
        membership_residual(self.tag, &self.m)
    }

    /// Re-projects onto the group manifold (polar projection plus
    /// determinant normalization); used to control drift in long products.
    pub fn project(&self) -> GroupElement {
        GroupElement {
            tag: self.tag,
            m: project_to_group(self.tag, &self.m),
        }
    }
}

/// An element of the Lie algebra of the structure group.
#[derive(Clone, Debug)]
pub struct AlgebraElement {
    tag: GroupTag,
    m: CMatrix,
}

impl AlgebraElement {
    pub fn new(tag: GroupTag, m: CMatrix) -> Result<Self, LieGroupError> {
        check_dim(tag, &m)?;
        let residual = algebra_residual(tag, &m);
        if residual > MEMBERSHIP_TOL {
            return Err(LieGroupError::AlgebraMembership { tag, residual });
        }
        Ok(Self { tag, m })
    }

    pub(crate) fn from_parts_unchecked(tag: GroupTag, m: CMatrix) -> Self {
        debug_assert!(algebra_residual(tag, &m) <= 1e-6);
        Self { tag, m }
    }

    pub fn zero(tag: GroupTag) -> Self {
        Self {
            tag,
            m: CMatrix::zeros(tag.dim(), tag.dim()),
        }
    }

    /// Builds an algebra element from coefficients against `tag.basis()`.
    /// The unitary groups require real coefficients; SL(2, C) accepts
    /// complex ones.
    pub fn from_coefficients(
        tag: GroupTag,
        coefficients: &[Complex64],
    ) -> Result<Self, LieGroupError> {
        if coefficients.len() != tag.basis_len() {
            return Err(LieGroupError::CoefficientCount {
                tag,
                expected: tag.basis_len(),
                got: coefficients.len(),
            });
        }
        let mut m = CMatrix::zeros(tag.dim(), tag.dim());
        for (c, b) in coefficients.iter().zip(tag.basis()) {
            m += b * *c;
        }
        Self::new(tag, m)
    }

    pub fn from_real_coefficients(tag: GroupTag, coefficients: &[f64]) -> Result<Self, LieGroupError> {
        let coeffs: Vec<Complex64> = coefficients.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_coefficients(tag, &coeffs)
    }

    /// Coefficients against `tag.basis()`, recovered through the trace
    /// pairing (the basis is orthogonal with norm-squared 1/2, scalar `i`
    /// excepted).
    pub fn coefficients(&self) -> Vec<Complex64> {
        self.tag
            .basis()
            .iter()
            .map(|b| {
                let pairing: Complex64 = trace(&(b.adjoint() * &self.m));
                let norm_sq: Complex64 = trace(&(b.adjoint() * b));
                pairing / norm_sq
            })
            .collect()
    }

    pub fn tag(&self) -> GroupTag {
        self.tag
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn norm(&self) -> f64 {
        self.m.norm()
    }

    pub fn scale(&self, factor: f64) -> AlgebraElement {
        AlgebraElement {
            tag: self.tag,
            m: &self.m * Complex64::new(factor, 0.0),
        }
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement, LieGroupError> {
        if self.tag != other.tag {
            return Err(LieGroupError::TagMismatch {
                left: self.tag,
                right: other.tag,
            });
        }
        Ok(AlgebraElement {
            tag: self.tag,
            m: &self.m + &other.m,
        })
    }

    /// `g X g^-1`; stays in the algebra.
    pub fn conjugate(&self, g: &GroupElement) -> Result<AlgebraElement, LieGroupError> {
        if self.tag != g.tag {
            return Err(LieGroupError::TagMismatch {
                left: self.tag,
                right: g.tag,
            });
        }
        let m = g.matrix() * &self.m * g.inverse().m;
        Ok(AlgebraElement {
            tag: self.tag,
            m: project_to_algebra(self.tag, &m),
        })
    }

    pub fn commutator(&self, other: &AlgebraElement) -> Result<AlgebraElement, LieGroupError> {
        if self.tag != other.tag {
            return Err(LieGroupError::TagMismatch {
                left: self.tag,
                right: other.tag,
            });
        }
        Ok(AlgebraElement {
            tag: self.tag,
            m: &self.m * &other.m - &other.m * &self.m,
        })
    }
}

/// Lie exponential. Eigendecomposition for the normal groups,
/// scaling-and-squaring for SL(2, C).
pub fn exp(x: &AlgebraElement) -> GroupElement {
    let m = match x.tag {
        GroupTag::U1 => {
            let mut m = CMatrix::zeros(1, 1);
            m[(0, 0)] = x.m[(0, 0)].exp();
            m
        }
        GroupTag::Su2 | GroupTag::Su3 => {
            // X = iH with H Hermitian; exp(X) = V diag(e^{i l}) V^H.
            let h = &x.m * (-I);
            let eig = nalgebra::SymmetricEigen::new(h);
            let phases =
                CMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(0.0, l).exp()));
            &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
        }
        GroupTag::Sl2C => {
            let g = exp_squaring(&x.m);
            // pin det back to one; exact in exact arithmetic for traceless input
            let det = det_small(&g);
            g / principal_sqrt(det)
        }
    };
    GroupElement::from_parts_unchecked(x.tag, m)
}

fn exp_squaring(x: &CMatrix) -> CMatrix {
    let norm = x.norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = x / Complex64::new(2f64.powi(squarings as i32), 0.0);
    let dim = x.nrows();
    let mut result = identity_matrix(dim);
    let mut term = identity_matrix(dim);
    for k in 1..=16 {
        term = &term * &scaled / Complex64::new(k as f64, 0.0);
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Principal Lie logarithm.
///
/// Unitary groups use eigenphases in `(-pi, pi]`; when the determinant
/// constraint forces the phase sum to `±2pi`, the extremal phase is shifted a
/// full turn so the result is traceless while `exp` still round-trips.
/// Errors with `BranchBoundary` when an eigenphase sits at the cut.
pub fn log(g: &GroupElement) -> Result<AlgebraElement, LieGroupError> {
    let m = match g.tag {
        GroupTag::U1 => {
            let theta = g.m[(0, 0)].arg();
            if theta.abs() > std::f64::consts::PI - BRANCH_TOL {
                return Err(LieGroupError::BranchBoundary { tag: g.tag });
            }
            let mut m = CMatrix::zeros(1, 1);
            m[(0, 0)] = Complex64::new(0.0, theta);
            m
        }
        GroupTag::Su2 | GroupTag::Su3 => unitary_log(g)?,
        GroupTag::Sl2C => sl2c_log(&g.m)?,
    };
    Ok(AlgebraElement::from_parts_unchecked(
        g.tag,
        project_to_algebra(g.tag, &m),
    ))
}

fn unitary_log(g: &GroupElement) -> Result<CMatrix, LieGroupError> {
    let d = g.dim();
    let (q, t) = g.m.clone().schur().unpack();
    // a unitary matrix is normal, so the Schur form is diagonal to roundoff
    let mut phases: Vec<f64> = (0..d).map(|i| t[(i, i)].arg()).collect();
    for &theta in &phases {
        if theta.abs() > std::f64::consts::PI - BRANCH_TOL {
            return Err(LieGroupError::BranchBoundary { tag: g.tag });
        }
    }
    // det = 1 makes the phase sum a multiple of 2pi; rebalance to zero
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut wraps = (phases.iter().sum::<f64>() / two_pi).round() as i64;
    while wraps > 0 {
        let i = (0..d)
            .max_by(|&a, &b| phases[a].total_cmp(&phases[b]))
            .unwrap();
        phases[i] -= two_pi;
        wraps -= 1;
    }
    while wraps < 0 {
        let i = (0..d)
            .min_by(|&a, &b| phases[a].total_cmp(&phases[b]))
            .unwrap();
        phases[i] += two_pi;
        wraps += 1;
    }
    let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        d,
        phases.iter().map(|&p| Complex64::new(0.0, p)),
    ));
    Ok(&q * diag * q.adjoint())
}

fn sl2c_log(m: &CMatrix) -> Result<CMatrix, LieGroupError> {
    // the principal log exists iff no eigenvalue lies on the negative real
    // axis; for det = 1 that happens exactly when tr is real and <= -2
    let t = trace(m);
    if t.im.abs() < BRANCH_TOL && t.re <= -2.0 + BRANCH_TOL {
        return Err(LieGroupError::BranchBoundary { tag: GroupTag::Sl2C });
    }
    let mut current = m.clone();
    let mut doublings = 0u32;
    while (&current - identity_matrix(2)).norm() > 0.25 {
        current = sqrt_2x2(&current);
        doublings += 1;
        if doublings > 64 {
            break;
        }
    }
    let e = &current - identity_matrix(2);
    let mut result = CMatrix::zeros(2, 2);
    let mut power = identity_matrix(2);
    for k in 1..=24 {
        power = &power * &e;
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        result += &power * Complex64::new(sign / k as f64, 0.0);
    }
    Ok(result * Complex64::new(2f64.powi(doublings as i32), 0.0))
}

/// Principal square root of a 2x2 matrix via Cayley-Hamilton:
/// `sqrt(M) = (M + sqrt(det) I) / sqrt(tr + 2 sqrt(det))`.
fn sqrt_2x2(m: &CMatrix) -> CMatrix {
    let delta = principal_sqrt(det_small(m));
    let denom = principal_sqrt(trace(m) + delta * 2.0);
    (m + identity_matrix(2) * delta) / denom
}

fn principal_sqrt(z: Complex64) -> Complex64 {
    z.sqrt()
}

/// Continuous path from `g` (at `t = 0`) to the identity (at `t = 1`).
///
/// Away from the branch cut this is the one-parameter curve
/// `exp((1 - t) log g)`. Branch-boundary elements are routed through a fixed
/// interior waypoint so the construction is total and deterministic.
pub fn path_to_identity(g: &GroupElement, t: f64) -> GroupElement {
    let t = t.clamp(0.0, 1.0);
    if let Ok(x) = log(g) {
        return exp(&x.scale(1.0 - t));
    }
    // split g = (g h^-1) h through a detuned waypoint
    for attempt in 1..=8 {
        let h = exp(&waypoint_jitter(g.tag, attempt));
        let a = match g.multiply(&h.inverse()) {
            Ok(a) => a,
            Err(_) => continue,
        };
        let (Ok(xa), Ok(xh)) = (log(&a), log(&h)) else {
            continue;
        };
        let value = if t <= 0.5 {
            exp(&xa.scale(1.0 - 2.0 * t)).multiply(&h)
        } else {
            Ok(exp(&xh.scale(2.0 - 2.0 * t)))
        };
        if let Ok(v) = value {
            return v;
        }
    }
    unreachable!("a generic waypoint always clears the branch cut");
}

/// Deterministic small algebra element used to detune branch-cut inputs.
fn waypoint_jitter(tag: GroupTag, attempt: u32) -> AlgebraElement {
    let scale = 0.4 + 0.13 * attempt as f64;
    let seeds = [0.71, -0.39, 0.53, 0.27, -0.61, 0.17, 0.43, -0.23];
    let coeffs: Vec<Complex64> = (0..tag.basis_len())
        .map(|i| Complex64::new(scale * seeds[(i + attempt as usize) % seeds.len()], 0.0))
        .collect();
    AlgebraElement::from_coefficients(tag, &coeffs).expect("jitter coefficients are valid")
}

/// Polar projection onto the group manifold with determinant normalization.
pub fn project_to_group(tag: GroupTag, m: &CMatrix) -> CMatrix {
    match tag {
        GroupTag::U1 => {
            let z = m[(0, 0)];
            let mut out = CMatrix::zeros(1, 1);
            out[(0, 0)] = if z.norm() == 0.0 { ONE } else { z / z.norm() };
            out
        }
        GroupTag::Su2 | GroupTag::Su3 => {
            let d = tag.dim();
            let svd = m.clone().svd(true, true);
            let u = svd.u.expect("svd requested u");
            let vt = svd.v_t.expect("svd requested v_t");
            let unitary = &u * &vt;
            // divide out the residual determinant phase
            let det = det_small(&unitary);
            let phase = det.arg() / d as f64;
            unitary * Complex64::new(0.0, -phase).exp()
        }
        GroupTag::Sl2C => {
            let det = det_small(m);
            m / principal_sqrt(det)
        }
    }
}

/// Nearest-algebra projection (anti-Hermitian/traceless parts as the tag
/// demands); used to clean finite-difference and roundoff defects.
pub fn project_to_algebra(tag: GroupTag, m: &CMatrix) -> CMatrix {
    match tag {
        GroupTag::U1 => {
            let mut out = CMatrix::zeros(1, 1);
            out[(0, 0)] = Complex64::new(0.0, m[(0, 0)].im);
            out
        }
        GroupTag::Su2 | GroupTag::Su3 => {
            let d = tag.dim();
            let anti = (m - m.adjoint()) * Complex64::new(0.5, 0.0);
            let tr = trace(&anti) / d as f64;
            anti - identity_matrix(d) * tr
        }
        GroupTag::Sl2C => {
            let tr = trace(m) / 2.0;
            m - identity_matrix(2) * tr
        }
    }
}

/// Random algebra element with basis coefficients uniform in
/// `[-scale, scale]` (complex for SL(2, C)).
pub fn random_algebra(tag: GroupTag, rng: &mut impl Rng, scale: f64) -> AlgebraElement {
    let coeffs: Vec<Complex64> = (0..tag.basis_len())
        .map(|_| {
            let re = rng.random_range(-scale..=scale);
            let im = if tag == GroupTag::Sl2C {
                rng.random_range(-scale..=scale)
            } else {
                0.0
            };
            Complex64::new(re, im)
        })
        .collect();
    AlgebraElement::from_coefficients(tag, &coeffs).expect("random coefficients are valid")
}

/// Random group element, `exp` of a random algebra element.
pub fn random_element(tag: GroupTag, rng: &mut impl Rng, scale: f64) -> GroupElement {
    exp(&random_algebra(tag, rng, scale))
}
