//! Constructors for every named method: the triangular splittings, their
//! block and alternating variants, the compacted alternating forms, the
//! classical fixed-point matrices, and row-selector (DoI) methods.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{backward_unit_solve, forward_unit_solve, Matrix, NormalizedSystem};
use crate::splitting::Splitting;

/// Every method name accepted on the command line (case-insensitive).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum NamedMethod {
    Jacobi,
    TU,
    TL,
    FGS,
    BGS,
    SGS,
    ModifiedSGS,
    FUTC,
    FLTC,
    FUTR,
    FLTR,
    FTC,
    FTR,
    TC22,
    TR22,
    AftcL,
    AftcU,
    AftrL,
    AftrU,
    AftcLCompact,
    AftcUCompact,
    AftrLCompact,
    AftrUCompact,
    Amks,
}

impl NamedMethod {
    pub const ALL: [NamedMethod; 24] = [
        NamedMethod::Jacobi,
        NamedMethod::TU,
        NamedMethod::TL,
        NamedMethod::FGS,
        NamedMethod::BGS,
        NamedMethod::SGS,
        NamedMethod::ModifiedSGS,
        NamedMethod::FUTC,
        NamedMethod::FLTC,
        NamedMethod::FUTR,
        NamedMethod::FLTR,
        NamedMethod::FTC,
        NamedMethod::FTR,
        NamedMethod::TC22,
        NamedMethod::TR22,
        NamedMethod::AftcL,
        NamedMethod::AftcU,
        NamedMethod::AftrL,
        NamedMethod::AftrU,
        NamedMethod::AftcLCompact,
        NamedMethod::AftcUCompact,
        NamedMethod::AftrLCompact,
        NamedMethod::AftrUCompact,
        NamedMethod::Amks,
    ];

    /// The methods compared in the experiment tables, in table order.
    pub const TABLE: [NamedMethod; 11] = [
        NamedMethod::Jacobi,
        NamedMethod::TU,
        NamedMethod::FGS,
        NamedMethod::BGS,
        NamedMethod::TC22,
        NamedMethod::TR22,
        NamedMethod::SGS,
        NamedMethod::AftcL,
        NamedMethod::AftcU,
        NamedMethod::AftrL,
        NamedMethod::AftrU,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            NamedMethod::Jacobi => "Jacobi",
            NamedMethod::TU => "TU",
            NamedMethod::TL => "TL",
            NamedMethod::FGS => "FGS",
            NamedMethod::BGS => "BGS",
            NamedMethod::SGS => "SGS",
            NamedMethod::ModifiedSGS => "ModifiedSGS",
            NamedMethod::FUTC => "FUTC",
            NamedMethod::FLTC => "FLTC",
            NamedMethod::FUTR => "FUTR",
            NamedMethod::FLTR => "FLTR",
            NamedMethod::FTC => "FTC",
            NamedMethod::FTR => "FTR",
            NamedMethod::TC22 => "TC22",
            NamedMethod::TR22 => "TR22",
            NamedMethod::AftcL => "AFTC_L",
            NamedMethod::AftcU => "AFTC_U",
            NamedMethod::AftrL => "AFTR_L",
            NamedMethod::AftrU => "AFTR_U",
            NamedMethod::AftcLCompact => "AFTC_L_compact",
            NamedMethod::AftcUCompact => "AFTC_U_compact",
            NamedMethod::AftrLCompact => "AFTR_L_compact",
            NamedMethod::AftrUCompact => "AFTR_U_compact",
            NamedMethod::Amks => "AMKS",
        }
    }

    /// Whether the method is defined by a fixed ordered splitting of the
    /// iteration matrix (as opposed to a classical or parameterized scheme).
    pub fn has_splitting_form(&self) -> bool {
        !matches!(
            self,
            NamedMethod::FGS
                | NamedMethod::BGS
                | NamedMethod::SGS
                | NamedMethod::ModifiedSGS
                | NamedMethod::Amks
        )
    }
}

impl fmt::Display for NamedMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        for m in NamedMethod::ALL {
            if m.name().to_ascii_lowercase() == lower {
                return Ok(m);
            }
        }
        // Friendly aliases for the sGS spelling family.
        match lower.as_str() {
            "t_u" => Ok(NamedMethod::TU),
            "t_l" => Ok(NamedMethod::TL),
            "fgs" | "forward-gs" => Ok(NamedMethod::FGS),
            "tc(2,2)" => Ok(NamedMethod::TC22),
            "tr(2,2)" => Ok(NamedMethod::TR22),
            _ => Err(Error::UnknownMethod(s.to_string())),
        }
    }
}

/// The block-boundary parameter used by the TC(2,2)/TR(2,2) and compacted
/// alternating splittings: n/2 - 1 for even n, (n-1)/2 for odd n.
pub fn nu(n: usize) -> usize {
    if n.is_multiple_of(2) {
        n / 2 - 1
    } else {
        (n - 1) / 2
    }
}

/// Column `j` (1-based, 2..=n) of the strict upper triangle, as a matrix.
pub fn upper_col(bj: &Matrix, j: usize) -> Matrix {
    let n = bj.rows();
    debug_assert!((2..=n).contains(&j));
    Matrix::from_fn(n, n, |i, h| {
        if h == j - 1 && i < j - 1 {
            bj.at(i, h)
        } else {
            0.0
        }
    })
}

/// Column `j` (1-based, 1..=n-1) of the strict lower triangle.
pub fn lower_col(bj: &Matrix, j: usize) -> Matrix {
    let n = bj.rows();
    debug_assert!((1..=n - 1).contains(&j));
    Matrix::from_fn(n, n, |i, h| {
        if h == j - 1 && i > j - 1 {
            bj.at(i, h)
        } else {
            0.0
        }
    })
}

/// Row `i` (1-based, 1..=n-1) of the strict upper triangle.
pub fn upper_row(bj: &Matrix, i: usize) -> Matrix {
    let n = bj.rows();
    debug_assert!((1..=n - 1).contains(&i));
    Matrix::from_fn(n, n, |h, j| {
        if h == i - 1 && j > i - 1 {
            bj.at(h, j)
        } else {
            0.0
        }
    })
}

/// Row `i` (1-based, 2..=n) of the strict lower triangle.
pub fn lower_row(bj: &Matrix, i: usize) -> Matrix {
    let n = bj.rows();
    debug_assert!((2..=n).contains(&i));
    Matrix::from_fn(n, n, |h, j| {
        if h == i - 1 && j < i - 1 {
            bj.at(h, j)
        } else {
            0.0
        }
    })
}

fn sum_range(parts: impl Iterator<Item = Matrix>, n: usize) -> Matrix {
    parts.fold(Matrix::zeros(n, n), |acc, m| acc.add(&m))
}

/// The ordered part list of a named splitting method, before zero parts are
/// dropped. Only methods with a fixed splitting form are accepted.
fn part_list(name: NamedMethod, bj: &Matrix) -> Result<Vec<Matrix>> {
    let n = bj.rows();
    let lower = bj.strict_lower();
    let upper = bj.strict_upper();
    let v = nu(n);
    let need = |min_n: usize| -> Result<()> {
        if n < min_n {
            Err(Error::TooSmall {
                method: name.to_string(),
                min_n,
                n,
            })
        } else {
            Ok(())
        }
    };
    let parts = match name {
        NamedMethod::Jacobi => vec![bj.clone()],
        NamedMethod::TU => {
            need(2)?;
            vec![upper, lower]
        }
        NamedMethod::TL => {
            need(2)?;
            vec![lower, upper]
        }
        NamedMethod::FUTC => {
            need(2)?;
            let mut p: Vec<Matrix> = (2..=n).rev().map(|j| upper_col(bj, j)).collect();
            p.push(lower);
            p
        }
        NamedMethod::FLTC => {
            need(2)?;
            let mut p: Vec<Matrix> = (1..n).map(|j| lower_col(bj, j)).collect();
            p.push(upper);
            p
        }
        NamedMethod::FUTR => {
            need(2)?;
            let mut p: Vec<Matrix> = (1..n).rev().map(|i| upper_row(bj, i)).collect();
            p.push(lower);
            p
        }
        NamedMethod::FLTR => {
            need(2)?;
            let mut p: Vec<Matrix> = (2..=n).map(|i| lower_row(bj, i)).collect();
            p.push(upper);
            p
        }
        NamedMethod::FTC => {
            need(2)?;
            let mut p: Vec<Matrix> = (1..n).map(|j| lower_col(bj, j)).collect();
            p.extend((2..=n).rev().map(|j| upper_col(bj, j)));
            p
        }
        NamedMethod::FTR => {
            need(2)?;
            let mut p: Vec<Matrix> = (2..=n).map(|i| lower_row(bj, i)).collect();
            p.extend((1..n).rev().map(|i| upper_row(bj, i)));
            p
        }
        NamedMethod::TC22 => {
            need(3)?;
            vec![
                sum_range((1..=v).map(|j| lower_col(bj, j)), n),
                sum_range((v + 1..=n - 1).map(|j| lower_col(bj, j)), n),
                sum_range((n - v + 1..=n).map(|j| upper_col(bj, j)), n),
                sum_range((2..=n - v).map(|j| upper_col(bj, j)), n),
            ]
        }
        NamedMethod::TR22 => {
            need(3)?;
            vec![
                sum_range((2..=n - v).map(|i| lower_row(bj, i)), n),
                sum_range((n - v + 1..=n).map(|i| lower_row(bj, i)), n),
                sum_range((v + 1..=n - 1).map(|i| upper_row(bj, i)), n),
                sum_range((1..=v).map(|i| upper_row(bj, i)), n),
            ]
        }
        NamedMethod::AftcL => {
            need(2)?;
            let mut p = Vec::with_capacity(2 * n - 2);
            for k in 1..n {
                p.push(lower_col(bj, k));
                p.push(upper_col(bj, n + 1 - k));
            }
            p
        }
        NamedMethod::AftcU => {
            need(2)?;
            let mut p = Vec::with_capacity(2 * n - 2);
            for k in 1..n {
                p.push(upper_col(bj, n + 1 - k));
                p.push(lower_col(bj, k));
            }
            p
        }
        NamedMethod::AftrL => {
            need(2)?;
            let mut p = Vec::with_capacity(2 * n - 2);
            for k in 1..n {
                p.push(lower_row(bj, k + 1));
                p.push(upper_row(bj, n - k));
            }
            p
        }
        NamedMethod::AftrU => {
            need(2)?;
            let mut p = Vec::with_capacity(2 * n - 2);
            for k in 1..n {
                p.push(upper_row(bj, n - k));
                p.push(lower_row(bj, k + 1));
            }
            p
        }
        NamedMethod::AftcLCompact => {
            need(2)?;
            let mut p = Vec::with_capacity(2 * n - 2 - v);
            for j in 1..n - v {
                p.push(lower_col(bj, j));
                p.push(upper_col(bj, n + 1 - j));
            }
            for j in n - v..n {
                p.push(lower_col(bj, j).add(&upper_col(bj, n + 1 - j)));
            }
            p
        }
        NamedMethod::AftcUCompact => {
            need(2)?;
            let mut p = Vec::with_capacity(2 * n - 2 - v);
            for j in 1..n - v {
                p.push(upper_col(bj, n + 1 - j));
                p.push(lower_col(bj, j));
            }
            for j in n - v..n {
                p.push(lower_col(bj, j).add(&upper_col(bj, n + 1 - j)));
            }
            p
        }
        NamedMethod::AftrLCompact => {
            need(2)?;
            let mut p = Vec::with_capacity(2 * n - 2 - v);
            for i in 2..=v + 1 {
                p.push(lower_row(bj, i).add(&upper_row(bj, n + 1 - i)));
            }
            for i in v + 2..=n {
                p.push(lower_row(bj, i));
                p.push(upper_row(bj, n + 1 - i));
            }
            p
        }
        NamedMethod::AftrUCompact => {
            need(2)?;
            let mut p = Vec::with_capacity(2 * n - 2 - v);
            for i in 2..=v + 1 {
                p.push(lower_row(bj, i).add(&upper_row(bj, n + 1 - i)));
            }
            for i in v + 2..=n {
                p.push(upper_row(bj, n + 1 - i));
                p.push(lower_row(bj, i));
            }
            p
        }
        other => return Err(Error::NoSplittingForm(other.to_string())),
    };
    Ok(parts)
}

/// Build the named splitting of the system's iteration matrix. Zero parts
/// (sparse sources) are dropped, so the effective order can be smaller than
/// the nominal one; the nominal orders on a dense matrix are `2n-2` for
/// FTC/FTR and the alternating forms, and `2n-2-nu` for the compacted ones.
pub fn build(name: NamedMethod, ns: &NormalizedSystem) -> Result<Splitting> {
    let bj = ns.jacobi_matrix();
    Splitting::from_parts_dropping_zeros(part_list(name, &bj)?)
}

/// Upper-row rows `i..=k` summed (used by tests and custom block methods).
pub fn upper_row_range(bj: &Matrix, lo: usize, hi: usize) -> Matrix {
    sum_range((lo..=hi).map(|i| upper_row(bj, i)), bj.rows())
}

pub fn lower_row_range(bj: &Matrix, lo: usize, hi: usize) -> Matrix {
    sum_range((lo..=hi).map(|i| lower_row(bj, i)), bj.rows())
}

pub fn upper_col_range(bj: &Matrix, lo: usize, hi: usize) -> Matrix {
    sum_range((lo..=hi).map(|j| upper_col(bj, j)), bj.rows())
}

pub fn lower_col_range(bj: &Matrix, lo: usize, hi: usize) -> Matrix {
    sum_range((lo..=hi).map(|j| lower_col(bj, j)), bj.rows())
}

/// The classical fixed-point iteration matrices, built with triangular
/// solves (never explicit inverses): Jacobi `L+U`, forward Gauss-Seidel
/// `(I-L)^{-1}U`, backward `(I-U)^{-1}L`, symmetric
/// `(I-U)^{-1}L(I-L)^{-1}U`.
pub fn classical_iteration_matrix(name: NamedMethod, ns: &NormalizedSystem) -> Result<Matrix> {
    let n = ns.n();
    let l = ns.lower();
    let u = ns.upper();
    let solve_cols = |solve: &dyn Fn(&[f64]) -> Vec<f64>, m: &Matrix| -> Matrix {
        let mut out = Matrix::zeros(n, n);
        for j in 0..n {
            let col: Vec<f64> = (0..n).map(|i| m.at(i, j)).collect();
            let x = solve(&col);
            for i in 0..n {
                out.set(i, j, x[i]);
            }
        }
        out
    };
    match name {
        NamedMethod::Jacobi => Ok(ns.jacobi_matrix()),
        NamedMethod::FGS => Ok(solve_cols(&|rhs| forward_unit_solve(l, rhs), u)),
        NamedMethod::BGS => Ok(solve_cols(&|rhs| backward_unit_solve(u, rhs), l)),
        NamedMethod::SGS => {
            let inner = solve_cols(&|rhs| forward_unit_solve(l, rhs), u);
            let linner = l.matmul(&inner);
            Ok(solve_cols(&|rhs| backward_unit_solve(u, rhs), &linner))
        }
        other => Err(Error::NoSplittingForm(other.to_string())),
    }
}

/// Decomposition of the identity: an ordered tuple of nonzero diagonal 0/1
/// selectors summing to the identity, represented by their index sets.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionOfIdentity {
    n: usize,
    parts: Vec<Vec<usize>>,
}

impl DecompositionOfIdentity {
    pub fn new(n: usize, parts: Vec<Vec<usize>>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidDoi("needs at least one selector".into()));
        }
        let mut covered = vec![false; n];
        for (p, sel) in parts.iter().enumerate() {
            if sel.is_empty() {
                return Err(Error::InvalidDoi(format!("selector {} is empty", p + 1)));
            }
            for &i in sel {
                if i >= n {
                    return Err(Error::InvalidDoi(format!(
                        "selector {} indexes row {} beyond n={}",
                        p + 1,
                        i + 1,
                        n
                    )));
                }
                if covered[i] {
                    return Err(Error::InvalidDoi(format!("row {} selected twice", i + 1)));
                }
                covered[i] = true;
            }
        }
        if let Some(i) = covered.iter().position(|&b| !b) {
            return Err(Error::InvalidDoi(format!("row {} unselected", i + 1)));
        }
        Ok(Self { n, parts })
    }

    /// One selector per row, ascending.
    pub fn per_row(n: usize) -> Self {
        Self {
            n,
            parts: (0..n).map(|i| vec![i]).collect(),
        }
    }

    /// `k` contiguous row blocks of near-equal size, ascending.
    pub fn contiguous_blocks(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidDoi(format!(
                "block count {k} must be in 1..={n}"
            )));
        }
        let mut parts = Vec::with_capacity(k);
        let mut start = 0;
        for b in 0..k {
            let end = (n * (b + 1)) / k;
            parts.push((start..end).collect());
            start = end;
        }
        Self::new(n, parts)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.parts.len()
    }

    pub fn selectors(&self) -> &[Vec<usize>] {
        &self.parts
    }
}

/// The splitting associated to a DoI: parts select whole rows of the
/// iteration matrix, in the DoI's order; all-zero row bands are dropped.
pub fn amks_splitting(doi: &DecompositionOfIdentity, ns: &NormalizedSystem) -> Result<Splitting> {
    if doi.n() != ns.n() {
        return Err(Error::DimensionMismatch {
            expected: ns.n(),
            got: doi.n(),
        });
    }
    let bj = ns.jacobi_matrix();
    let n = ns.n();
    let parts: Vec<Matrix> = doi
        .selectors()
        .iter()
        .map(|sel| {
            let mut m = Matrix::zeros(n, n);
            for &i in sel {
                for j in 0..n {
                    m.set(i, j, bj.at(i, j));
                }
            }
            m
        })
        .collect();
    Splitting::from_parts_dropping_zeros(parts)
}

/// The n-by-n product-form iteration matrix of the row-selector method:
/// factors `P_p B_J + I - P_p` applied in ascending p (rightmost factor
/// first). Kept for cross-validation against [`amks_splitting`].
pub fn amks_iteration_matrix(
    doi: &DecompositionOfIdentity,
    ns: &NormalizedSystem,
) -> Result<Matrix> {
    if doi.n() != ns.n() {
        return Err(Error::DimensionMismatch {
            expected: ns.n(),
            got: doi.n(),
        });
    }
    let bj = ns.jacobi_matrix();
    let n = ns.n();
    let mut product = Matrix::identity(n);
    for sel in doi.selectors() {
        let mut factor = Matrix::identity(n);
        for &i in sel {
            for j in 0..n {
                factor.set(i, j, bj.at(i, j));
            }
        }
        product = factor.matmul(&product);
    }
    Ok(product)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Vector;

    fn dense_ns(n: usize) -> NormalizedSystem {
        let bj = Matrix::from_fn(n, n, |i, j| {
            if i == j {
                0.0
            } else {
                0.1 + ((5 * i + 3 * j) % 9) as f64 * 0.1
            }
        });
        NormalizedSystem::from_jacobi(&bj, Vector::zeros(n)).unwrap()
    }

    #[test]
    fn method_names_parse_case_insensitively() {
        assert_eq!("aftc_l".parse::<NamedMethod>().unwrap(), NamedMethod::AftcL);
        assert_eq!(
            "AFTC_L_COMPACT".parse::<NamedMethod>().unwrap(),
            NamedMethod::AftcLCompact
        );
        assert_eq!("tc22".parse::<NamedMethod>().unwrap(), NamedMethod::TC22);
        assert!("mystery".parse::<NamedMethod>().is_err());
    }

    #[test]
    fn tu_and_tl_are_the_triangles() {
        let ns = dense_ns(5);
        let bj = ns.jacobi_matrix();
        let tu = build(NamedMethod::TU, &ns).unwrap();
        assert_eq!(tu.parts(), &[bj.strict_upper(), bj.strict_lower()]);
        let tl = build(NamedMethod::TL, &ns).unwrap();
        assert_eq!(tl.parts(), &[bj.strict_lower(), bj.strict_upper()]);
    }

    #[test]
    fn orders_match_the_nominal_counts_on_dense_sources() {
        let n = 7;
        let ns = dense_ns(n);
        let v = nu(n);
        let cases = [
            (NamedMethod::FUTC, n),
            (NamedMethod::FLTC, n),
            (NamedMethod::FUTR, n),
            (NamedMethod::FLTR, n),
            (NamedMethod::FTC, 2 * n - 2),
            (NamedMethod::FTR, 2 * n - 2),
            (NamedMethod::TC22, 4),
            (NamedMethod::TR22, 4),
            (NamedMethod::AftcL, 2 * n - 2),
            (NamedMethod::AftcU, 2 * n - 2),
            (NamedMethod::AftrL, 2 * n - 2),
            (NamedMethod::AftrU, 2 * n - 2),
            (NamedMethod::AftcLCompact, 2 * n - 2 - v),
            (NamedMethod::AftcUCompact, 2 * n - 2 - v),
            (NamedMethod::AftrLCompact, 2 * n - 2 - v),
            (NamedMethod::AftrUCompact, 2 * n - 2 - v),
        ];
        for (name, want) in cases {
            let s = build(name, &ns).unwrap();
            assert_eq!(s.order(), want, "{name}");
            assert_eq!(s.source(), ns.jacobi_matrix(), "{name} parts must sum back");
        }
    }

    #[test]
    fn column_and_row_sums_rebuild_the_triangles() {
        let ns = dense_ns(6);
        let bj = ns.jacobi_matrix();
        assert_eq!(upper_col_range(&bj, 2, 6), bj.strict_upper());
        assert_eq!(lower_col_range(&bj, 1, 5), bj.strict_lower());
        assert_eq!(upper_row_range(&bj, 1, 5), bj.strict_upper());
        assert_eq!(lower_row_range(&bj, 2, 6), bj.strict_lower());
    }

    #[test]
    fn structural_nilpotency_of_column_and_row_parts() {
        let ns = dense_ns(6);
        let bj = ns.jacobi_matrix();
        let n = 6;
        // Ascending products vanish; descending generally do not.
        for j in 2..=n {
            for k in 2..=j {
                assert_eq!(upper_col(&bj, j).matmul(&upper_col(&bj, k)).max_abs(), 0.0);
            }
        }
        for j in 1..n {
            for k in j..n {
                assert_eq!(lower_col(&bj, j).matmul(&lower_col(&bj, k)).max_abs(), 0.0);
            }
        }
        for i in 1..n {
            for l in 1..=i {
                assert_eq!(upper_row(&bj, i).matmul(&upper_row(&bj, l)).max_abs(), 0.0);
            }
        }
        for i in 2..=n {
            for l in i..=n {
                assert_eq!(lower_row(&bj, i).matmul(&lower_row(&bj, l)).max_abs(), 0.0);
            }
        }
        // Mixed products: both orderings vanish inside the stated ranges.
        for j in 2..n {
            for k in j..n {
                assert_eq!(upper_col(&bj, j).matmul(&lower_col(&bj, k)).max_abs(), 0.0);
                assert_eq!(lower_col(&bj, k).matmul(&upper_col(&bj, j)).max_abs(), 0.0);
            }
        }
        for l in 2..n {
            for i in l..n {
                assert_eq!(upper_row(&bj, i).matmul(&lower_row(&bj, l)).max_abs(), 0.0);
                assert_eq!(lower_row(&bj, l).matmul(&upper_row(&bj, i)).max_abs(), 0.0);
            }
        }
    }

    #[test]
    fn classical_matrices_satisfy_their_defining_equations() {
        let ns = dense_ns(5);
        let n = 5;
        let l = ns.lower();
        let u = ns.upper();
        let i = Matrix::identity(n);
        let fgs = classical_iteration_matrix(NamedMethod::FGS, &ns).unwrap();
        assert!(i.sub(l).matmul(&fgs).sub(u).max_abs() < 1e-13);
        let bgs = classical_iteration_matrix(NamedMethod::BGS, &ns).unwrap();
        assert!(i.sub(u).matmul(&bgs).sub(l).max_abs() < 1e-13);
        let sgs = classical_iteration_matrix(NamedMethod::SGS, &ns).unwrap();
        let expect = i.sub(u).matmul(&sgs); // should equal L (I-L)^{-1} U
        let inner = classical_iteration_matrix(NamedMethod::FGS, &ns).unwrap();
        assert!(expect.sub(&l.matmul(&inner)).max_abs() < 1e-13);
    }

    #[test]
    fn classical_names_have_no_splitting_form() {
        let ns = dense_ns(4);
        for name in [
            NamedMethod::FGS,
            NamedMethod::BGS,
            NamedMethod::SGS,
            NamedMethod::ModifiedSGS,
            NamedMethod::Amks,
        ] {
            assert!(!name.has_splitting_form());
            assert!(build(name, &ns).is_err());
        }
    }

    #[test]
    fn doi_validation_and_amks_parts() {
        let ns = dense_ns(4);
        assert!(DecompositionOfIdentity::new(3, vec![vec![0], vec![1]]).is_err());
        assert!(DecompositionOfIdentity::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(DecompositionOfIdentity::new(3, vec![vec![0, 1, 2], vec![]]).is_err());

        // Singleton DoI {I} reproduces the one-part splitting.
        let whole = DecompositionOfIdentity::new(4, vec![vec![0, 1, 2, 3]]).unwrap();
        let s = amks_splitting(&whole, &ns).unwrap();
        assert_eq!(s.order(), 1);
        assert_eq!(s.part(0), &ns.jacobi_matrix());
        assert_eq!(
            amks_iteration_matrix(&whole, &ns).unwrap(),
            ns.jacobi_matrix()
        );

        // Two-block DoI: parts are the row bands.
        let two = DecompositionOfIdentity::contiguous_blocks(4, 2).unwrap();
        let s = amks_splitting(&two, &ns).unwrap();
        assert_eq!(s.order(), 2);
        let bj = ns.jacobi_matrix();
        for i in 0..2 {
            for j in 0..4 {
                assert_eq!(s.part(0).at(i, j), bj.at(i, j));
                assert_eq!(s.part(1).at(i + 2, j), bj.at(i + 2, j));
            }
        }
    }

    #[test]
    fn optimality_classification_of_the_named_splittings() {
        use crate::splitting::{
            is_essential, is_maximal, is_potentially_optimal, ProductTolerance,
        };
        let ns = dense_ns(7);
        let tol = ProductTolerance::Exact;
        // Single-column/row parts make the full and alternating forms
        // maximal; only the compacted alternating forms and the full
        // two-triangle interleavings are also essential.
        for name in [NamedMethod::FTC, NamedMethod::FTR] {
            let s = build(name, &ns).unwrap();
            assert!(is_maximal(&s), "{name}");
            assert!(is_essential(&s, tol), "{name}");
            assert!(is_potentially_optimal(&s, tol), "{name}");
        }
        for name in [
            NamedMethod::AftcL,
            NamedMethod::AftcU,
            NamedMethod::AftrL,
            NamedMethod::AftrU,
        ] {
            let s = build(name, &ns).unwrap();
            assert!(is_maximal(&s), "{name}");
            assert!(!is_essential(&s, tol), "{name} should not be essential");
        }
        for name in [
            NamedMethod::AftcLCompact,
            NamedMethod::AftcUCompact,
            NamedMethod::AftrLCompact,
            NamedMethod::AftrUCompact,
        ] {
            let s = build(name, &ns).unwrap();
            assert!(is_potentially_optimal(&s, tol), "{name}");
        }
        // The one-part splitting of a dense source is essential but far
        // from maximal.
        let jac = build(NamedMethod::Jacobi, &ns).unwrap();
        assert!(is_essential(&jac, tol));
        assert!(!is_maximal(&jac));
    }

    #[test]
    fn per_row_amks_product_is_the_forward_gs_matrix() {
        let ns = dense_ns(5);
        let doi = DecompositionOfIdentity::per_row(5);
        let product = amks_iteration_matrix(&doi, &ns).unwrap();
        let fgs = classical_iteration_matrix(NamedMethod::FGS, &ns).unwrap();
        assert!(product.sub(&fgs).max_abs() < 1e-13);
    }
}
