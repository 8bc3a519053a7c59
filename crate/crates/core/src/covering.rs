//! The universal cover of the wedge of `n` circles as the Cayley tree of
//! `F_n`, materialized lazily: a vertex is just its reduced word, so the
//! infinite tree never needs storage. Path lifting appends on the right,
//! deck transformations act on the left, and the fiber over the wedge point
//! is in bijection with the group itself.

use thiserror::Error;

use crate::freegroup::{FreeGroupError, Letter, Word};
use crate::holonomy::{HolonomyError, HolonomyMap};
use crate::liegroups::GroupElement;

/// Default cap on fiber enumeration size.
pub const DEFAULT_FIBER_CAP: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum CoveringError {
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: u32, right: u32 },
    #[error("fiber ball needs {needed} vertices, above the cap {cap}")]
    ResourceExceeded { needed: u128, cap: usize },
    #[error(transparent)]
    FreeGroup(#[from] FreeGroupError),
    #[error(transparent)]
    Holonomy(#[from] HolonomyError),
}

/// A point of the covering tree over the wedge point, labelled by a reduced
/// word; the root (empty word) is the chosen base lift.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TreeVertex {
    word: Word,
}

impl TreeVertex {
    pub fn root(rank: u32) -> Self {
        Self {
            word: Word::identity(rank),
        }
    }

    pub fn from_word(word: Word) -> Self {
        Self { word }
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn rank(&self) -> u32 {
        self.word.rank()
    }
}

impl std::fmt::Display for TreeVertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.word)
    }
}

/// An oriented edge of the tree: a vertex together with the letter read
/// while crossing the corresponding circle once.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TreeEdge {
    pub from: TreeVertex,
    pub letter: Letter,
}

impl TreeEdge {
    pub fn to(&self) -> TreeVertex {
        let word = self
            .from
            .word
            .concat(&Word::reduce(self.from.rank(), [self.letter]).expect("letter within rank"))
            .expect("equal ranks");
        TreeVertex::from_word(word)
    }
}

/// The `2n` edges leaving a vertex, in generator order.
pub fn edges_from(vertex: &TreeVertex) -> Vec<TreeEdge> {
    let rank = vertex.rank();
    let mut edges = Vec::with_capacity(2 * rank as usize);
    for index in 1..=rank {
        for positive in [true, false] {
            edges.push(TreeEdge {
                from: vertex.clone(),
                letter: Letter::new(index, positive),
            });
        }
    }
    edges
}

/// Lifts a loop word to the cover starting at `start`: the endpoint is the
/// vertex labelled by `start * w`, with backtracking collapsed.
pub fn lift_loop(word: &Word, start: &TreeVertex) -> Result<TreeVertex, CoveringError> {
    if word.rank() != start.rank() {
        return Err(CoveringError::RankMismatch {
            left: start.rank(),
            right: word.rank(),
        });
    }
    Ok(TreeVertex::from_word(start.word.concat(word)?))
}

/// The deck transformation of `g`: left translation of vertex labels. The
/// action is free and transitive on the fiber.
pub fn deck_transform(g: &Word, vertex: &TreeVertex) -> Result<TreeVertex, CoveringError> {
    if g.rank() != vertex.rank() {
        return Err(CoveringError::RankMismatch {
            left: vertex.rank(),
            right: g.rank(),
        });
    }
    Ok(TreeVertex::from_word(g.concat(&vertex.word)?))
}

/// Number of reduced words of length at most `radius`:
/// `1 + sum_{i=1..r} 2n (2n-1)^(i-1)`.
pub fn ball_size(rank: u32, radius: u32) -> u128 {
    let fan = 2 * rank as u128;
    let mut total = 1u128;
    let mut shell = fan;
    for _ in 1..=radius {
        total += shell;
        shell *= fan.saturating_sub(1);
    }
    total
}

/// All fiber vertices within tree distance `radius` of the root, ordered by
/// word length then lexicographically. Errors when the closed-form count
/// exceeds the cap.
pub fn fiber_ball(
    rank: u32,
    radius: u32,
    cap: Option<usize>,
) -> Result<Vec<TreeVertex>, CoveringError> {
    let cap = cap.unwrap_or(DEFAULT_FIBER_CAP);
    let needed = ball_size(rank, radius);
    if needed > cap as u128 {
        return Err(CoveringError::ResourceExceeded { needed, cap });
    }
    let mut result = vec![TreeVertex::root(rank)];
    let mut frontier = vec![TreeVertex::root(rank)];
    for _ in 0..radius {
        let mut next = Vec::with_capacity(frontier.len() * (2 * rank as usize));
        for vertex in &frontier {
            let last = vertex.word.letters().last().copied();
            for index in 1..=rank {
                for positive in [true, false] {
                    let letter = Letter::new(index, positive);
                    // skip the edge back toward the root
                    if last.is_some_and(|l| l == letter.inverse()) {
                        continue;
                    }
                    let mut letters = vertex.word.letters().to_vec();
                    letters.push(letter);
                    next.push(TreeVertex::from_word(
                        Word::reduce(rank, letters).expect("letters within rank"),
                    ));
                }
            }
        }
        result.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(result)
}

/// The holonomy of the fiber point: the composite that sends a vertex over
/// the wedge point to the group element of its word.
pub fn monodromy_holonomy(
    map: &HolonomyMap,
    end: &TreeVertex,
) -> Result<GroupElement, CoveringError> {
    if map.rank() != end.rank() {
        return Err(CoveringError::RankMismatch {
            left: map.rank(),
            right: end.rank(),
        });
    }
    Ok(map.holonomy_of_word(&end.word)?)
}
