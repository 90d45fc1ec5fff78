//! Text description of a splitting's support sets.
//!
//! Line 1 holds `d n`; each following non-comment line lists one part as an
//! even number of whitespace-separated 1-based `i j` index pairs claiming
//! entry (i, j). The loader rejects out-of-range indices, duplicate claims
//! and diagonal claims. Combined with a matrix, every nonzero off-diagonal
//! entry must be claimed by exactly one part.

use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::splitting::Splitting;

/// Parsed description: per part, the claimed (row, col) cells, 0-based.
#[derive(Debug, Clone)]
pub struct SplittingFile {
    n: usize,
    parts: Vec<Vec<(usize, usize)>>,
}

impl SplittingFile {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.parts.len()
    }

    /// Restrict `b` to the claimed supports. Parts whose claimed entries are
    /// all zero in `b` are dropped; a nonzero unclaimed off-diagonal entry
    /// is an error because the parts could not sum back to `b`.
    pub fn apply(&self, b: &Matrix) -> Result<Splitting> {
        if b.rows() != self.n || b.cols() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: b.rows(),
            });
        }
        let mut claimed = vec![false; self.n * self.n];
        let mut parts = Vec::with_capacity(self.parts.len());
        for cells in &self.parts {
            let mut m = Matrix::zeros(self.n, self.n);
            for &(i, j) in cells {
                claimed[i * self.n + j] = true;
                m.set(i, j, b.at(i, j));
            }
            parts.push(m);
        }
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && b.at(i, j) != 0.0 && !claimed[i * self.n + j] {
                    return Err(Error::InvalidSplitting(format!(
                        "matrix entry ({}, {}) is nonzero but unclaimed",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Splitting::from_parts_dropping_zeros(parts)
    }
}

pub fn parse_splitting_file(text: &str) -> Result<SplittingFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(ln, l)| (ln + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (header_line, header) = lines.next().ok_or(Error::Parse {
        line: 0,
        message: "empty splitting file".into(),
    })?;
    let mut head = header.split_whitespace();
    let d: usize = head
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or(Error::Parse {
            line: header_line,
            message: "expected `d n` header".into(),
        })?;
    let n: usize = head
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or(Error::Parse {
            line: header_line,
            message: "expected `d n` header".into(),
        })?;
    if head.next().is_some() {
        return Err(Error::Parse {
            line: header_line,
            message: "trailing tokens after `d n` header".into(),
        });
    }
    let mut seen = vec![false; n * n];
    let mut parts = Vec::with_capacity(d);
    for _ in 0..d {
        let (line, text) = lines.next().ok_or(Error::Parse {
            line: 0,
            message: format!("expected {d} part lines"),
        })?;
        let nums: Vec<usize> = text
            .split_whitespace()
            .map(|t| {
                t.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("invalid index: {t}"),
                })
            })
            .collect::<Result<_>>()?;
        if nums.is_empty() || !nums.len().is_multiple_of(2) {
            return Err(Error::Parse {
                line,
                message: "each part line needs a positive even number of indices".into(),
            });
        }
        let mut cells = Vec::with_capacity(nums.len() / 2);
        for pair in nums.chunks(2) {
            let (i, j) = (pair[0], pair[1]);
            if i == 0 || j == 0 || i > n || j > n {
                return Err(Error::Parse {
                    line,
                    message: format!("index pair ({i}, {j}) out of range for n={n}"),
                });
            }
            if i == j {
                return Err(Error::Parse {
                    line,
                    message: format!("diagonal claim ({i}, {j}) rejected"),
                });
            }
            let cell = (i - 1) * n + (j - 1);
            if seen[cell] {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate claim ({i}, {j})"),
                });
            }
            seen[cell] = true;
            cells.push((i - 1, j - 1));
        }
        parts.push(cells);
    }
    if let Some((line, _)) = lines.next() {
        return Err(Error::Parse {
            line,
            message: "trailing content after the declared parts".into(),
        });
    }
    Ok(SplittingFile { n, parts })
}

pub fn read_splitting_file(path: impl AsRef<Path>) -> Result<SplittingFile> {
    parse_splitting_file(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_tu_style_description() {
        let text = "2 3\n1 2 1 3 2 3\n2 1 3 1 3 2\n";
        let f = parse_splitting_file(text).unwrap();
        assert_eq!((f.order(), f.n()), (2, 3));
        let b = Matrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { 1.0 + i as f64 });
        let s = f.apply(&b).unwrap();
        assert_eq!(s.part(0), &b.strict_upper());
        assert_eq!(s.part(1), &b.strict_lower());
    }

    #[test]
    fn rejects_duplicates_and_diagonal() {
        assert!(parse_splitting_file("2 3\n1 2 1 2\n2 1\n").is_err());
        assert!(parse_splitting_file("1 3\n1 1\n").is_err());
        assert!(parse_splitting_file("1 3\n4 1\n").is_err());
        assert!(parse_splitting_file("1 3\n1 2 3\n").is_err());
    }

    #[test]
    fn unclaimed_nonzero_entry_is_an_error() {
        let f = parse_splitting_file("1 2\n1 2\n").unwrap();
        let b = Matrix::from_fn(2, 2, |i, j| if i == j { 0.0 } else { 1.0 });
        assert!(f.apply(&b).is_err());
    }
}
