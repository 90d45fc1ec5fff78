//! Dense real matrix/vector kernel.
//!
//! Storage is dense row-major `f64`; the problems this library targets stay
//! at desk scale, where correctness and order-theoretic checks dominate the
//! cost, not flops. Triangular extraction is always strict (the diagonal is
//! excluded). All types are immutable after construction and safe to share
//! across threads; every operation here is a pure function.

mod io;

pub use io::{
    format_matrix, format_vector, parse_matrix, parse_vector, read_matrix, read_vector,
    write_matrix, write_vector,
};

use crate::error::{Error, Result};

/// Dense row-major matrix of finite `f64` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::BadEntryCount {
                rows,
                cols,
                got: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0.0)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &x| m.max(x.abs()))
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let mut sums = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (j, s) in sums.iter_mut().enumerate() {
                *s += self.at(i, j).abs();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// Entrywise absolute value.
    pub fn abs(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.abs()).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.at(j, i))
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| s * x).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.at(i, k);
                if aik == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &o) in dst.iter_mut().zip(orow) {
                    *d += aik * o;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len(), "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Strictly lower triangular part (diagonal excluded).
    pub fn strict_lower(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            if i > j {
                self.at(i, j)
            } else {
                0.0
            }
        })
    }

    /// Strictly upper triangular part (diagonal excluded).
    pub fn strict_upper(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            if i < j {
                self.at(i, j)
            } else {
                0.0
            }
        })
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols))
            .map(|i| self.at(i, i))
            .collect()
    }
}

/// Entrywise (Hadamard) product of two same-shape matrices.
pub fn hadamard(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if (a.rows, a.cols) != (b.rows, b.cols) {
        return Err(Error::ShapeMismatch {
            left: format!("{}x{}", a.rows, a.cols),
            right: format!("{}x{}", b.rows, b.cols),
        });
    }
    Ok(Matrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(x, y)| x * y).collect(),
    })
}

/// Vector of finite `f64` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    data: Vec<f64>,
}

impl Vector {
    pub fn new(data: Vec<f64>) -> Result<Self> {
        if let Some(index) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { data })
    }

    pub fn zeros(n: usize) -> Self {
        Self { data: vec![0.0; n] }
    }

    pub fn ones(n: usize) -> Self {
        Self { data: vec![1.0; n] }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn inf_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &x| m.max(x.abs()))
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl From<Vec<f64>> for Vector {
    fn from(data: Vec<f64>) -> Self {
        Self { data }
    }
}

/// The problem `Ax = b`.
///
/// `A` must be square with nonzero diagonal; the diagonal condition is
/// checked by [`normalize`], which every solver path goes through.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    a: Matrix,
    b: Vector,
}

impl LinearSystem {
    pub fn new(a: Matrix, b: Vector) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.rows,
                cols: a.cols,
            });
        }
        if a.rows != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.rows,
                got: b.len(),
            });
        }
        Ok(Self { a, b })
    }

    pub fn n(&self) -> usize {
        self.a.rows
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Vector {
        &self.b
    }

    /// Infinity-norm residual `max_i |(Ax - b)_i|`.
    pub fn residual_inf(&self, x: &[f64]) -> f64 {
        let ax = self.a.matvec(x);
        ax.iter()
            .zip(self.b.as_slice())
            .fold(0.0, |m, (p, q)| m.max((p - q).abs()))
    }
}

/// Unit-diagonal reduction of a linear system.
///
/// Holds `L` (strictly lower), `U` (strictly upper) and `c` such that the
/// reduced problem is `x = (L+U)x + c`, together with the original diagonal
/// `scale`, so the original `A` and `b` can be rebuilt exactly as
/// `A = D(I - L - U)` and `b = Dc`.
#[derive(Debug, Clone)]
pub struct NormalizedSystem {
    lower: Matrix,
    upper: Matrix,
    c: Vector,
    scale: Vector,
}

impl NormalizedSystem {
    pub fn new(lower: Matrix, upper: Matrix, c: Vector, scale: Vector) -> Result<Self> {
        let n = c.len();
        for (name, m) in [("lower", &lower), ("upper", &upper)] {
            if !m.is_square() {
                return Err(Error::NotSquare {
                    rows: m.rows,
                    cols: m.cols,
                });
            }
            if m.rows != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: m.rows,
                });
            }
            let _ = name;
        }
        if scale.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: scale.len(),
            });
        }
        for i in 0..n {
            for j in i..n {
                if lower.at(i, j) != 0.0 {
                    return Err(Error::NotStrictlyTriangular {
                        triangle: "lower",
                        row: i + 1,
                        col: j + 1,
                    });
                }
            }
            for j in 0..=i {
                if upper.at(i, j) != 0.0 {
                    return Err(Error::NotStrictlyTriangular {
                        triangle: "upper",
                        row: i + 1,
                        col: j + 1,
                    });
                }
            }
            if scale[i] == 0.0 {
                return Err(Error::ZeroDiagonal { row: i + 1 });
            }
        }
        Ok(Self {
            lower,
            upper,
            c,
            scale,
        })
    }

    /// Build directly from an iteration matrix with zero diagonal, taking
    /// `scale = 1` (used for reduced problems given without an original `A`).
    pub fn from_jacobi(bj: &Matrix, c: Vector) -> Result<Self> {
        Self::new(
            bj.strict_lower(),
            bj.strict_upper(),
            c,
            Vector::ones(bj.rows()),
        )
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn lower(&self) -> &Matrix {
        &self.lower
    }

    pub fn upper(&self) -> &Matrix {
        &self.upper
    }

    pub fn c(&self) -> &Vector {
        &self.c
    }

    pub fn scale(&self) -> &Vector {
        &self.scale
    }

    /// The fixed-point iteration matrix `L + U` (exact zero diagonal).
    pub fn jacobi_matrix(&self) -> Matrix {
        self.lower.add(&self.upper)
    }

    /// Rebuild the original system `A = D(I - L - U)`, `b = Dc`.
    pub fn reconstruct(&self) -> LinearSystem {
        let n = self.n();
        let a = Matrix::from_fn(n, n, |i, j| {
            let e = if i == j { 1.0 } else { 0.0 };
            self.scale[i] * (e - self.lower.at(i, j) - self.upper.at(i, j))
        });
        let b = Vector::from(
            (0..n)
                .map(|i| self.scale[i] * self.c[i])
                .collect::<Vec<_>>(),
        );
        LinearSystem::new(a, b).expect("reconstructed system is square by construction")
    }
}

/// Reduce `Ax = b` to unit-diagonal form: `L = -D^{-1}C`, `U = -D^{-1}E`,
/// `c = D^{-1}b`, where `C`/`E` are the strict triangles of `A` and `D` its
/// diagonal. Rejects any zero diagonal entry, reporting the offending row.
pub fn normalize(sys: &LinearSystem) -> Result<NormalizedSystem> {
    let n = sys.n();
    let a = sys.a();
    let mut diag = Vec::with_capacity(n);
    for i in 0..n {
        let d = a.at(i, i);
        if d == 0.0 {
            return Err(Error::ZeroDiagonal { row: i + 1 });
        }
        diag.push(d);
    }
    let lower = Matrix::from_fn(n, n, |i, j| if i > j { -a.at(i, j) / diag[i] } else { 0.0 });
    let upper = Matrix::from_fn(n, n, |i, j| if i < j { -a.at(i, j) / diag[i] } else { 0.0 });
    let c = Vector::from((0..n).map(|i| sys.b()[i] / diag[i]).collect::<Vec<_>>());
    NormalizedSystem::new(lower, upper, c, Vector::from(diag))
}

/// Solve `(I - L)x = rhs` with `L` strictly lower triangular, by forward
/// substitution. Only the strictly-lower entries of `l` are read.
pub fn forward_unit_solve(l: &Matrix, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    debug_assert_eq!(l.rows(), n);
    let mut x = rhs.to_vec();
    for i in 0..n {
        let mut s = x[i];
        let row = l.row(i);
        for (j, xv) in x.iter().enumerate().take(i) {
            s += row[j] * xv;
        }
        x[i] = s;
    }
    x
}

/// Solve `(I - U)x = rhs` with `U` strictly upper triangular, by backward
/// substitution. Only the strictly-upper entries of `u` are read.
pub fn backward_unit_solve(u: &Matrix, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    debug_assert_eq!(u.rows(), n);
    let mut x = rhs.to_vec();
    for i in (0..n).rev() {
        let mut s = x[i];
        let row = u.row(i);
        for (j, xv) in x.iter().enumerate().skip(i + 1) {
            s += row[j] * xv;
        }
        x[i] = s;
    }
    x
}
