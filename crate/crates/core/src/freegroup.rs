//! Exact arithmetic in the free group `F_n` on generators `c1..cn`.
//!
//! Words are kept in reduced normal form at all times: no letter is ever
//! adjacent to its inverse, and the empty word is the identity. Equality of
//! reduced letter sequences decides the word problem.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FreeGroupError {
    #[error("generator index {index} out of range for rank {rank}")]
    RankViolation { index: u32, rank: u32 },
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: u32, right: u32 },
    #[error("cannot parse word: {0}")]
    Parse(String),
}

/// A single generator or inverse generator, `c_k` or `c_k^-1`.
///
/// Ordering puts `c_k` before `c_k^-1` and lower indices first, which fixes
/// the lexicographic conventions used for canonical rotations and for
/// enumerating the covering tree.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Letter {
    index: u32,
    positive: bool,
}

impl Letter {
    /// `index` is 1-based; panics on index 0.
    pub fn new(index: u32, positive: bool) -> Self {
        assert!(index >= 1, "generator indices are 1-based");
        Self { index, positive }
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn sign(&self) -> i8 {
        if self.positive {
            1
        } else {
            -1
        }
    }

    pub fn inverse(self) -> Self {
        Self {
            index: self.index,
            positive: !self.positive,
        }
    }

    fn cancels(&self, other: &Letter) -> bool {
        self.index == other.index && self.positive != other.positive
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // c1 < c1^-1 < c2 < c2^-1 < ...
        (self.index, !self.positive).cmp(&(other.index, !other.positive))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "c{}", self.index)
        } else {
            write!(f, "c{}^-1", self.index)
        }
    }
}

/// A reduced word in `F_n`; the homotopy class of a based loop in the
/// `n`-punctured plane.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Word {
    rank: u32,
    letters: Vec<Letter>,
}

impl Word {
    /// The empty word, identity of `F_n`.
    pub fn identity(rank: u32) -> Self {
        Self {
            rank,
            letters: Vec::new(),
        }
    }

    /// The generator `c_index`.
    pub fn generator(rank: u32, index: u32) -> Result<Self, FreeGroupError> {
        Self::reduce(rank, [Letter::new(index, true)])
    }

    /// Freely reduces a letter sequence. Reduction is confluent, so the
    /// result does not depend on cancellation order.
    pub fn reduce(
        rank: u32,
        letters: impl IntoIterator<Item = Letter>,
    ) -> Result<Self, FreeGroupError> {
        let mut stack: Vec<Letter> = Vec::new();
        for letter in letters {
            if letter.index() == 0 || letter.index() > rank {
                return Err(FreeGroupError::RankViolation {
                    index: letter.index(),
                    rank,
                });
            }
            if stack.last().is_some_and(|top| top.cancels(&letter)) {
                stack.pop();
            } else {
                stack.push(letter);
            }
        }
        Ok(Self {
            rank,
            letters: stack,
        })
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    fn check_rank(&self, other: &Word) -> Result<(), FreeGroupError> {
        if self.rank != other.rank {
            return Err(FreeGroupError::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        Ok(())
    }

    /// Reduced product `self * other`.
    pub fn concat(&self, other: &Word) -> Result<Word, FreeGroupError> {
        self.check_rank(other)?;
        Word::reduce(
            self.rank,
            self.letters.iter().chain(other.letters.iter()).copied(),
        )
    }

    pub fn invert(&self) -> Word {
        Word {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Signed generator counts; the image of the word in `Z^n`.
    pub fn abelianize(&self) -> Vec<i64> {
        let mut counts = vec![0i64; self.rank as usize];
        for letter in &self.letters {
            counts[(letter.index() - 1) as usize] += i64::from(letter.sign());
        }
        counts
    }

    /// Cyclically reduced conjugacy representative: conjugating ends are
    /// cancelled, then the lexicographically least rotation is chosen.
    pub fn cyclic_reduce(&self) -> Word {
        let mut core = self.letters.clone();
        while core.len() >= 2 && core.first().unwrap().cancels(core.last().unwrap()) {
            core.pop();
            core.remove(0);
        }
        if core.len() <= 1 {
            return Word {
                rank: self.rank,
                letters: core,
            };
        }
        let best = (0..core.len())
            .map(|i| {
                let mut rot = core[i..].to_vec();
                rot.extend_from_slice(&core[..i]);
                rot
            })
            .min_by(|a, b| {
                a.iter()
                    .map(|l| (l.index(), !l.is_positive()))
                    .cmp(b.iter().map(|l| (l.index(), !l.is_positive())))
            })
            .unwrap();
        Word {
            rank: self.rank,
            letters: best,
        }
    }

    /// Parses the textual syntax: generators `c1..cN`, inverses `c1^-1`,
    /// concatenation by whitespace, identity spelled `e`.
    pub fn parse(rank: u32, text: &str) -> Result<Word, FreeGroupError> {
        let trimmed = text.trim();
        if trimmed == "e" || trimmed.is_empty() {
            return Ok(Word::identity(rank));
        }
        let mut letters = Vec::new();
        for token in trimmed.split_whitespace() {
            let (body, positive) = match token.strip_suffix("^-1") {
                Some(b) => (b, false),
                None => (token, true),
            };
            let index: u32 = body
                .strip_prefix('c')
                .and_then(|d| d.parse().ok())
                .filter(|&i| i >= 1)
                .ok_or_else(|| FreeGroupError::Parse(format!("bad token '{token}'")))?;
            letters.push(Letter::new(index, positive));
        }
        Word::reduce(rank, letters)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    /// Rank, then length, then lexicographic; the enumeration order of the
    /// covering tree.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.rank, self.letters.len(), &self.letters).cmp(&(
            other.rank,
            other.letters.len(),
            &other.letters,
        ))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        let mut first = true;
        for letter in &self.letters {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{letter}")?;
            first = false;
        }
        Ok(())
    }
}
