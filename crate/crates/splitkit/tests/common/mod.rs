//! Shared helpers for the integration suites: random test data, a direct
//! elimination oracle, and a dense eigenvector extractor. Oracles here stay
//! independent of the library's iteration paths.

#![allow(clippy::needless_range_loop)]
#![allow(dead_code)]

use num_complex::Complex64;
use splitkit::genmat::Rng;
use splitkit::linalg::Matrix;
use splitkit::splitting::Splitting;

/// Square matrix with zero diagonal and uniform off-diagonal entries on
/// [-scale, scale).
pub fn random_hollow(rng: &mut Rng, n: usize, scale: f64) -> Matrix {
    Matrix::from_fn(
        n,
        n,
        |i, j| {
            if i == j {
                0.0
            } else {
                scale * rng.symmetric()
            }
        },
    )
}

/// Nonnegative variant (entries on [0, scale)).
pub fn random_hollow_nonneg(rng: &mut Rng, n: usize, scale: f64) -> Matrix {
    Matrix::from_fn(
        n,
        n,
        |i, j| {
            if i == j {
                0.0
            } else {
                scale * rng.uniform()
            }
        },
    )
}

/// A splitting built from a uniformly random assignment of cells to `d`
/// candidate parts (zero parts dropped, so the order can come out lower).
pub fn random_splitting(rng: &mut Rng, b: &Matrix, d: usize) -> Splitting {
    let n = b.rows();
    loop {
        let mut parts = vec![Matrix::zeros(n, n); d];
        for i in 0..n {
            for j in 0..n {
                if b.at(i, j) != 0.0 {
                    let p = (rng.next_u64() % d as u64) as usize;
                    parts[p].set(i, j, b.at(i, j));
                }
            }
        }
        if let Ok(s) = Splitting::from_parts_dropping_zeros(parts) {
            return s;
        }
    }
}

/// Gaussian elimination with partial pivoting; the direct oracle for
/// iterative solves.
pub fn gauss_solve(a: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    assert_eq!(a.rows(), n);
    let mut m: Vec<f64> = a.data().to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&p, &q| {
                m[p * n + col]
                    .abs()
                    .partial_cmp(&m[q * n + col].abs())
                    .unwrap()
            })
            .unwrap();
        if pivot_row != col {
            for j in 0..n {
                m.swap(col * n + j, pivot_row * n + j);
            }
            x.swap(col, pivot_row);
        }
        let pivot = m[col * n + col];
        assert!(pivot != 0.0, "singular matrix in oracle");
        for row in col + 1..n {
            let f = m[row * n + col] / pivot;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                m[row * n + j] -= f * m[col * n + j];
            }
            x[row] -= f * x[col];
        }
    }
    for row in (0..n).rev() {
        let mut s = x[row];
        for j in row + 1..n {
            s -= m[row * n + j] * x[j];
        }
        x[row] = s / m[row * n + row];
    }
    x
}

fn complex_lu_solve(a: &mut [Complex64], x: &mut [Complex64], n: usize) {
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&p, &q| {
                a[p * n + col]
                    .norm()
                    .partial_cmp(&a[q * n + col].norm())
                    .unwrap()
            })
            .unwrap();
        if pivot_row != col {
            for j in 0..n {
                a.swap(col * n + j, pivot_row * n + j);
            }
            x.swap(col, pivot_row);
        }
        let pivot = a[col * n + col];
        if pivot.norm() == 0.0 {
            continue;
        }
        for row in col + 1..n {
            let f = a[row * n + col] / pivot;
            if f.norm() == 0.0 {
                continue;
            }
            for j in col..n {
                let v = a[col * n + j];
                a[row * n + j] -= f * v;
            }
            let xv = x[col];
            x[row] -= f * xv;
        }
    }
    for row in (0..n).rev() {
        let mut s = x[row];
        for j in row + 1..n {
            s -= a[row * n + j] * x[j];
        }
        let pivot = a[row * n + row];
        x[row] = if pivot.norm() > 0.0 {
            s / pivot
        } else {
            Complex64::new(1.0, 0.0)
        };
    }
}

/// Unit eigenvector for a computed eigenvalue of a real matrix, by two
/// passes of shifted inverse iteration in complex arithmetic.
pub fn dense_eigenvector(m: &Matrix, lambda: Complex64) -> Vec<Complex64> {
    let n = m.rows();
    let shift = lambda * (1.0 + 1e-11) + Complex64::new(1e-280, 1e-280);
    let mut x: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(0.7 + (i as f64 * 1.3).sin(), 0.2 + (i as f64 * 0.7).cos()))
        .collect();
    for _ in 0..3 {
        let mut a: Vec<Complex64> = (0..n * n)
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                let mut v = Complex64::new(m.at(i, j), 0.0);
                if i == j {
                    v -= shift;
                }
                v
            })
            .collect();
        complex_lu_solve(&mut a, &mut x, n);
        let norm: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm > 0.0);
        for z in x.iter_mut() {
            *z /= norm;
        }
    }
    x
}

/// Residual `||M x - lambda x||_2` of a complex eigenpair of a real matrix.
pub fn eigenpair_residual(m: &Matrix, lambda: Complex64, x: &[Complex64]) -> f64 {
    let n = m.rows();
    let mut out = 0.0f64;
    for i in 0..n {
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..n {
            s += m.at(i, j) * x[j];
        }
        s -= lambda * x[i];
        out += s.norm_sqr();
    }
    out.sqrt()
}
