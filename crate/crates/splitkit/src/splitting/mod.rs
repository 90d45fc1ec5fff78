//! Splitting masks and splittings of an iteration matrix.
//!
//! A mask is an ordered tuple of nonzero 0/1 matrices that partition the
//! all-ones matrix entrywise. Applying a mask to a matrix and dropping the
//! parts that come out zero yields a splitting: an ordered tuple of nonzero
//! matrices with pairwise disjoint supports that sum to the original matrix.

mod io;
pub mod order;

pub use io::{parse_splitting_file, read_splitting_file, SplittingFile};
pub use order::{
    is_essential, is_maximal, is_potentially_optimal, refinement_step, refinement_via_telescoping,
    telescoping_chain, verify_refinement_chain, OrderWitness, ProductTolerance,
};

use crate::error::{Error, Result};
use crate::linalg::{hadamard, Matrix};

/// Ordered tuple of logical matrices partitioning the all-ones matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SplittingMask {
    n: usize,
    /// One bitset per part over the n*n cells, row-major.
    parts: Vec<Vec<bool>>,
}

impl SplittingMask {
    /// Validate the three mask conditions: no part empty, entries logical
    /// (guaranteed by the bitset encoding), parts summing to all-ones
    /// (equivalently: cells covered exactly once).
    pub fn new(n: usize, parts: Vec<Vec<bool>>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidMask("a mask needs at least one part".into()));
        }
        let mut covered = vec![false; n * n];
        for (p, part) in parts.iter().enumerate() {
            if part.len() != n * n {
                return Err(Error::InvalidMask(format!(
                    "part {} has {} cells, expected {}",
                    p + 1,
                    part.len(),
                    n * n
                )));
            }
            if !part.iter().any(|&b| b) {
                return Err(Error::InvalidMask(format!("part {} is all-zero", p + 1)));
            }
            for (cell, &b) in part.iter().enumerate() {
                if b {
                    if covered[cell] {
                        return Err(Error::InvalidMask(format!(
                            "cell ({}, {}) claimed twice",
                            cell / n + 1,
                            cell % n + 1
                        )));
                    }
                    covered[cell] = true;
                }
            }
        }
        if let Some(cell) = covered.iter().position(|&b| !b) {
            return Err(Error::InvalidMask(format!(
                "cell ({}, {}) unclaimed; parts must sum to the all-ones matrix",
                cell / n + 1,
                cell % n + 1
            )));
        }
        Ok(Self { n, parts })
    }

    /// Build from per-part matrices with entries in {0, 1}.
    pub fn from_matrices(parts: &[Matrix]) -> Result<Self> {
        let n = parts
            .first()
            .ok_or_else(|| Error::InvalidMask("a mask needs at least one part".into()))?
            .rows();
        let mut bits = Vec::with_capacity(parts.len());
        for (p, m) in parts.iter().enumerate() {
            if m.rows() != n || m.cols() != n {
                return Err(Error::InvalidMask(format!("part {} is not {n}x{n}", p + 1)));
            }
            let mut b = vec![false; n * n];
            for (cell, &v) in m.data().iter().enumerate() {
                if v == 1.0 {
                    b[cell] = true;
                } else if v != 0.0 {
                    return Err(Error::InvalidMask(format!(
                        "part {} has non-logical entry {v}",
                        p + 1
                    )));
                }
            }
            bits.push(b);
        }
        Self::new(n, bits)
    }

    /// The two-part triangular mask: upper-including-diagonal first, strict
    /// lower second. For n = 1 there is no strict lower part and the mask
    /// degenerates to a single all-ones part.
    pub fn upper_lower(n: usize) -> Self {
        let mut up = vec![false; n * n];
        let mut lo = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                if i <= j {
                    up[i * n + j] = true;
                } else {
                    lo[i * n + j] = true;
                }
            }
        }
        let parts = if n <= 1 { vec![up] } else { vec![up, lo] };
        Self { n, parts }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.parts.len()
    }

    pub fn part_matrix(&self, p: usize) -> Matrix {
        Matrix::from_fn(self.n, self.n, |i, j| {
            if self.parts[p][i * self.n + j] {
                1.0
            } else {
                0.0
            }
        })
    }

    /// Restrict `b` to this mask and drop the parts that come out zero,
    /// preserving the order of the remaining ones.
    pub fn apply(&self, b: &Matrix) -> Result<Splitting> {
        let masked: Vec<Matrix> = (0..self.parts.len())
            .map(|p| hadamard(&self.part_matrix(p), b))
            .collect::<Result<_>>()?;
        Splitting::from_parts_dropping_zeros(masked)
    }
}

/// Ordered tuple of nonzero matrices with pairwise disjoint supports that
/// sum to the matrix they split.
#[derive(Debug, Clone, PartialEq)]
pub struct Splitting {
    n: usize,
    parts: Vec<Matrix>,
}

impl Splitting {
    /// Validate the three splitting conditions directly: every part nonzero,
    /// supports pairwise disjoint (so the parts' sum is exact and Hadamard
    /// products vanish), square parts of equal size.
    pub fn new(parts: Vec<Matrix>) -> Result<Self> {
        let n = parts.first().ok_or(Error::EmptySplitting)?.rows();
        let mut support: Vec<bool> = vec![false; n * n];
        for (p, m) in parts.iter().enumerate() {
            if m.rows() != n || m.cols() != n {
                return Err(Error::InvalidSplitting(format!(
                    "part {} is not {n}x{n}",
                    p + 1
                )));
            }
            if m.is_zero() {
                return Err(Error::InvalidSplitting(format!("part {} is zero", p + 1)));
            }
            for (cell, &v) in m.data().iter().enumerate() {
                if v != 0.0 {
                    if support[cell] {
                        return Err(Error::InvalidSplitting(format!(
                            "parts overlap at ({}, {})",
                            cell / n + 1,
                            cell % n + 1
                        )));
                    }
                    support[cell] = true;
                }
            }
        }
        Ok(Self { n, parts })
    }

    /// Like [`Splitting::new`] but silently dropping zero parts first;
    /// errors only if every part vanishes.
    pub fn from_parts_dropping_zeros(parts: Vec<Matrix>) -> Result<Self> {
        let kept: Vec<Matrix> = parts.into_iter().filter(|m| !m.is_zero()).collect();
        if kept.is_empty() {
            return Err(Error::EmptySplitting);
        }
        Self::new(kept)
    }

    pub fn order(&self) -> usize {
        self.parts.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parts(&self) -> &[Matrix] {
        &self.parts
    }

    pub fn part(&self, p: usize) -> &Matrix {
        &self.parts[p]
    }

    /// The matrix this splitting decomposes; exact because supports are
    /// disjoint (no two nonzeros are ever added).
    pub fn source(&self) -> Matrix {
        let mut sum = Matrix::zeros(self.n, self.n);
        for m in &self.parts {
            sum = sum.add(m);
        }
        sum
    }

    pub fn same_source(&self, other: &Splitting) -> bool {
        self.n == other.n && self.source() == other.source()
    }

    /// Move the last part to the front, `times` times. Shifting `order()`
    /// times is the identity.
    pub fn cyclic_shift(&self, times: usize) -> Splitting {
        let mut parts = self.parts.clone();
        let d = parts.len();
        parts.rotate_right(times % d);
        Splitting { n: self.n, parts }
    }
}
