//! Holonomy and bundle machinery over the plane with `n` points removed.
//!
//! The library classifies planar loops into reduced words of the free group
//! `F_n`, evaluates abelian and non-abelian holonomies through matrix-group
//! backends, trivializes transition cocycles over the wedge of `n` circles,
//! lifts paths to the universal cover (the Cayley tree of `F_n`), transports
//! vectors in the associated bundle, and assembles interference patterns from
//! homotopy-class-resolved random-walk sums.

pub mod cocycle;
pub mod covering;
pub mod freegroup;
pub mod geometry;
pub mod holonomy;
pub mod liegroups;
pub mod propagator;
pub mod section;
pub mod wire;

pub use freegroup::{Letter, Word};
pub use geometry::{PlanePath, Point2, Puncture};
pub use holonomy::{FluxScenario, HolonomyMap};
pub use liegroups::{AlgebraElement, GroupElement, GroupTag};
pub use num_complex::Complex64;
