//! Eigenvalues of a general real square matrix: balancing, Householder
//! reduction to upper Hessenberg form, then the implicit double-shift QR
//! iteration. Follows the classic Algol/EISPACK procedures (balanc, orthes,
//! hqr) as popularized by the JAMA port, eigenvalues only.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// All eigenvalues of `m`, in no particular order.
pub fn eigenvalues(m: &Matrix) -> Result<Vec<Complex64>> {
    assert!(m.is_square(), "eigenvalues need a square matrix");
    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = m.data().to_vec();
    balance(&mut h, n);
    hessenberg_reduce(&mut h, n);
    hqr_eigenvalues(&mut h, n)
}

/// Eigenvalues of a matrix already in upper Hessenberg form (used on the
/// small projected matrices of the Krylov estimator).
pub fn eigenvalues_hessenberg(mut h: Vec<f64>, n: usize) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    debug_assert_eq!(h.len(), n * n);
    hqr_eigenvalues(&mut h, n)
}

/// Diagonal similarity scaling so that row and column norms are balanced;
/// powers of two only, so no rounding is introduced.
fn balance(a: &mut [f64], n: usize) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j * n + i].abs();
                    r += a[i * n + j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                let mut c_scaled = c;
                while c_scaled < g {
                    f *= RADIX;
                    c_scaled *= sqrdx;
                }
                g = r * RADIX;
                while c_scaled > g {
                    f /= RADIX;
                    c_scaled /= sqrdx;
                }
                if (c_scaled + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        a[i * n + j] *= g;
                    }
                    for j in 0..n {
                        a[j * n + i] *= f;
                    }
                }
            }
        }
        if done {
            return;
        }
    }
}

/// Householder similarity reduction to upper Hessenberg form.
fn hessenberg_reduce(h: &mut [f64], n: usize) {
    if n < 3 {
        return;
    }
    let (low, high) = (0usize, n - 1);
    let mut ort = vec![0.0; n];
    for m in low + 1..high {
        let mut scale = 0.0;
        for i in m..=high {
            scale += h[i * n + m - 1].abs();
        }
        if scale == 0.0 {
            continue;
        }
        let mut hsum = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[i * n + m - 1] / scale;
            hsum += ort[i] * ort[i];
        }
        let mut g = hsum.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        hsum -= ort[m] * g;
        ort[m] -= g;
        // Apply the similarity transformation from both sides.
        for j in m..n {
            let mut f = 0.0;
            for i in (m..=high).rev() {
                f += ort[i] * h[i * n + j];
            }
            f /= hsum;
            for i in m..=high {
                h[i * n + j] -= f * ort[i];
            }
        }
        for i in 0..=high {
            let mut f = 0.0;
            for j in (m..=high).rev() {
                f += ort[j] * h[i * n + j];
            }
            f /= hsum;
            for j in m..=high {
                h[i * n + j] -= f * ort[j];
            }
        }
        h[m * n + m - 1] = scale * g;
    }
    // Zero out the entries below the first subdiagonal.
    for i in 2..n {
        for j in 0..i - 1 {
            h[i * n + j] = 0.0;
        }
    }
}

/// Implicit double-shift QR on an upper Hessenberg matrix; eigenvalues only.
fn hqr_eigenvalues(h: &mut [f64], nn: usize) -> Result<Vec<Complex64>> {
    let nn_i = nn as i64;
    let at = |h: &[f64], i: i64, j: i64| h[(i * nn_i + j) as usize];
    let eps = f64::EPSILON;
    let low: i64 = 0;
    let high: i64 = nn_i - 1;

    let mut wr = vec![0.0f64; nn];
    let mut wi = vec![0.0f64; nn];

    let mut norm = 0.0;
    for i in 0..nn_i {
        for j in (i - 1).max(0)..nn_i {
            norm += at(h, i, j).abs();
        }
    }
    if norm == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); nn]);
    }

    let mut n = high;
    let mut exshift = 0.0;
    let mut iter = 0usize;
    let mut total_iter = 0usize;
    let budget = 120 * nn.max(8);

    let (mut p, mut q, mut r, mut s, mut z);
    let (mut x, mut y, mut w);

    while n >= low {
        total_iter += 1;
        if total_iter > budget {
            return Err(Error::EigenFailure);
        }

        // Look for a single small subdiagonal element.
        let mut l = n;
        while l > low {
            s = at(h, l - 1, l - 1).abs() + at(h, l, l).abs();
            if s == 0.0 {
                s = norm;
            }
            if at(h, l, l - 1).abs() < eps * s {
                break;
            }
            l -= 1;
        }

        x = at(h, n, n);
        if l == n {
            // One real root.
            wr[n as usize] = x + exshift;
            wi[n as usize] = 0.0;
            n -= 1;
            iter = 0;
            continue;
        }
        y = at(h, n - 1, n - 1);
        w = at(h, n, n - 1) * at(h, n - 1, n);
        if l == n - 1 {
            // Two roots from the trailing 2x2 block.
            p = (y - x) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            x += exshift;
            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                wr[(n - 1) as usize] = x + z;
                wr[n as usize] = if z != 0.0 { x - w / z } else { x + z };
                wi[(n - 1) as usize] = 0.0;
                wi[n as usize] = 0.0;
            } else {
                wr[(n - 1) as usize] = x + p;
                wr[n as usize] = x + p;
                wi[(n - 1) as usize] = z;
                wi[n as usize] = -z;
            }
            n -= 2;
            iter = 0;
            continue;
        }

        // Form shift.
        if iter == 10 {
            // Wilkinson's ad hoc shift.
            exshift += x;
            for i in low..=n {
                h[(i * nn_i + i) as usize] -= x;
            }
            s = at(h, n, n - 1).abs() + at(h, n - 1, n - 2).abs();
            y = 0.75 * s;
            x = y;
            w = -0.4375 * s * s;
        }
        if iter == 30 {
            // MATLAB's ad hoc shift.
            s = (y - x) / 2.0;
            s = s * s + w;
            if s > 0.0 {
                s = s.sqrt();
                if y < x {
                    s = -s;
                }
                s = x - w / ((y - x) / 2.0 + s);
                for i in low..=n {
                    h[(i * nn_i + i) as usize] -= s;
                }
                exshift += s;
                x = 0.964;
                y = x;
                w = x;
            }
        }
        iter += 1;

        // Look for two consecutive small subdiagonal elements.
        let mut m = n - 2;
        p = 0.0;
        q = 0.0;
        r = 0.0;
        while m >= l {
            z = at(h, m, m);
            r = x - z;
            s = y - z;
            p = (r * s - w) / at(h, m + 1, m) + at(h, m, m + 1);
            q = at(h, m + 1, m + 1) - z - r - s;
            r = at(h, m + 2, m + 1);
            s = p.abs() + q.abs() + r.abs();
            p /= s;
            q /= s;
            r /= s;
            if m == l {
                break;
            }
            if at(h, m, m - 1).abs() * (q.abs() + r.abs())
                < eps
                    * (p.abs() * (at(h, m - 1, m - 1).abs() + z.abs() + at(h, m + 1, m + 1).abs()))
            {
                break;
            }
            m -= 1;
        }
        for i in m + 2..=n {
            h[(i * nn_i + i - 2) as usize] = 0.0;
            if i > m + 2 {
                h[(i * nn_i + i - 3) as usize] = 0.0;
            }
        }

        // Double QR step on rows l..=n and columns m..=n.
        for k in m..n {
            let notlast = k != n - 1;
            if k != m {
                p = at(h, k, k - 1);
                q = at(h, k + 1, k - 1);
                r = if notlast { at(h, k + 2, k - 1) } else { 0.0 };
                x = p.abs() + q.abs() + r.abs();
                if x == 0.0 {
                    continue;
                }
                p /= x;
                q /= x;
                r /= x;
            }
            s = (p * p + q * q + r * r).sqrt();
            if p < 0.0 {
                s = -s;
            }
            if s == 0.0 {
                continue;
            }
            if k != m {
                h[(k * nn_i + k - 1) as usize] = -s * x;
            } else if l != m {
                h[(k * nn_i + k - 1) as usize] = -at(h, k, k - 1);
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;

            // Row modification.
            for j in k..nn_i {
                let mut pp = at(h, k, j) + q * at(h, k + 1, j);
                if notlast {
                    pp += r * at(h, k + 2, j);
                    h[((k + 2) * nn_i + j) as usize] -= pp * z;
                }
                h[(k * nn_i + j) as usize] -= pp * x;
                h[((k + 1) * nn_i + j) as usize] -= pp * y;
            }
            // Column modification.
            for i in 0..=n.min(k + 3) {
                let mut pp = x * at(h, i, k) + y * at(h, i, k + 1);
                if notlast {
                    pp += z * at(h, i, k + 2);
                    h[(i * nn_i + k + 2) as usize] -= pp * r;
                }
                h[(i * nn_i + k) as usize] -= pp;
                h[(i * nn_i + k + 1) as usize] -= pp * q;
            }
        }
    }

    Ok(wr
        .into_iter()
        .zip(wi)
        .map(|(re, im)| Complex64::new(re, im))
        .collect())
}
