//! Spectral-radius and norm analysis of the block iteration operator.
//!
//! The operator of a splitting of order d acts on stacked dn-vectors as one
//! homogeneous sweep; it is never materialized during estimation unless its
//! dimension fits under the dense cap, in which case a dense eigensolve
//! serves as the oracle.

mod arnoldi;
pub(crate) mod eig;

pub use arnoldi::{dominant_modulus, growth_probe, KrylovOutcome};

use num_complex::Complex64;

use crate::engine::Scheme;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::splitting::Splitting;

/// Modulus below which an eigenvalue is treated as zero when comparing
/// nonzero spectra.
pub const NONZERO_EIGEN_CUTOFF: f64 = 1e-10;

/// The block iteration operator of a splitting, acting on dn-vectors.
#[derive(Debug, Clone)]
pub struct BlockOperator {
    scheme: Scheme,
    order: usize,
    n: usize,
}

impl BlockOperator {
    pub fn new(splitting: &Splitting) -> Self {
        Self {
            scheme: Scheme::new(splitting),
            order: splitting.order(),
            n: splitting.n(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.order * self.n
    }

    /// One homogeneous sweep of the stacked vector.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.scheme.apply_block(v)
    }

    /// The affine offset of the scheme for a given reduced right-hand side:
    /// stage p receives the previous stages' offsets passed through its
    /// part, starting from the plain offset.
    pub fn affine_offset(&self, c: &[f64]) -> Vec<f64> {
        debug_assert_eq!(c.len(), self.n);
        let mut state = crate::engine::BlockIterationState::zeros(self.order, self.n);
        self.scheme.sweep(&mut state, c);
        state.flatten()
    }

    /// Materialize the dn-by-dn matrix column by column.
    pub fn dense_matrix(&self, cap: usize) -> Result<Matrix> {
        let dim = self.dim();
        if dim > cap {
            return Err(Error::CapExceeded { dim, cap });
        }
        let mut out = Matrix::zeros(dim, dim);
        let mut e = vec![0.0; dim];
        for j in 0..dim {
            e[j] = 1.0;
            let col = self.apply(&e);
            e[j] = 0.0;
            for (i, &v) in col.iter().enumerate() {
                out.set(i, j, v);
            }
        }
        Ok(out)
    }

    /// Exact infinity norm: dense below the cap, otherwise exact row sums
    /// through transposed applies (one per row).
    pub fn inf_norm(&self, cap: usize) -> f64 {
        let dim = self.dim();
        if dim <= cap {
            if let Ok(m) = self.dense_matrix(cap) {
                return m.inf_norm();
            }
        }
        let mut best = 0.0f64;
        let mut e = vec![0.0; dim];
        for i in 0..dim {
            e[i] = 1.0;
            let row = self.scheme.apply_block_transposed(&e);
            e[i] = 0.0;
            best = best.max(row.iter().map(|x| x.abs()).sum());
        }
        best
    }
}

/// Which estimator produced a spectral report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralBackend {
    DenseQr,
    Krylov,
    PowerGrowth,
}

impl std::fmt::Display for SpectralBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SpectralBackend::DenseQr => "dense_qr",
            SpectralBackend::Krylov => "krylov",
            SpectralBackend::PowerGrowth => "power_growth",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub rho: f64,
    pub method: SpectralBackend,
    pub iterations: usize,
    pub residual_estimate: f64,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct SpectralConfig {
    /// Requested accuracy, relative to max(1, rho).
    pub tol: f64,
    /// Largest dimension handled by the dense eigensolver.
    pub dense_cap: usize,
    /// Krylov subspace size per restart.
    pub subspace: usize,
    pub max_restarts: usize,
    /// Seed for the deterministic probe vectors.
    pub seed: u64,
    /// Largest dimension on which the exact-annihilation probe runs.
    pub nilpotency_cap: usize,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            dense_cap: 600,
            subspace: 50,
            max_restarts: 100,
            seed: 0x5EED_0001,
            nilpotency_cap: 2048,
        }
    }
}

impl SpectralConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Spectral radius of the block operator: dense eigensolve below the cap,
/// restarted Krylov projection above it, with an exact-annihilation probe
/// that reports nilpotent operators as radius zero.
pub fn spectral_radius(op: &BlockOperator, cfg: &SpectralConfig) -> Result<SpectralReport> {
    radius_of_operator(&|v| op.apply(v), op.dim(), cfg)
}

/// Spectral radius of a plain square matrix under the same policy.
pub fn matrix_spectral_radius(m: &Matrix, cfg: &SpectralConfig) -> Result<SpectralReport> {
    assert!(m.is_square());
    radius_of_operator(&|v| m.matvec(v), m.rows(), cfg)
}

fn radius_of_operator(
    apply: &dyn Fn(&[f64]) -> Vec<f64>,
    dim: usize,
    cfg: &SpectralConfig,
) -> Result<SpectralReport> {
    if dim == 0 {
        return Err(Error::InvalidConfig("empty operator".into()));
    }
    if dim <= cfg.dense_cap {
        let mut m = Matrix::zeros(dim, dim);
        let mut e = vec![0.0; dim];
        for j in 0..dim {
            e[j] = 1.0;
            let col = apply(&e);
            e[j] = 0.0;
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        let eigs = eig::eigenvalues(&m)?;
        let rho = eigs.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
        return Ok(SpectralReport {
            rho,
            method: SpectralBackend::DenseQr,
            iterations: dim,
            residual_estimate: 0.0,
            converged: true,
        });
    }
    if dim <= cfg.nilpotency_cap {
        let (_, annihilated) = growth_probe(apply, dim, dim + 2, cfg.seed);
        if annihilated {
            return Ok(SpectralReport {
                rho: 0.0,
                method: SpectralBackend::PowerGrowth,
                iterations: dim + 2,
                residual_estimate: 0.0,
                converged: true,
            });
        }
    }
    let out = dominant_modulus(
        apply,
        dim,
        cfg.subspace,
        cfg.max_restarts,
        cfg.tol,
        cfg.seed,
    );
    Ok(SpectralReport {
        rho: out.rho,
        method: SpectralBackend::Krylov,
        iterations: out.applies,
        residual_estimate: out.residual,
        converged: out.converged,
    })
}

/// Eigenvalues of the dense block matrix with modulus above the cutoff,
/// sorted by decreasing modulus, ties by increasing angle.
pub fn nonzero_spectrum_dense(op: &BlockOperator, cap: usize) -> Result<Vec<Complex64>> {
    let m = op.dense_matrix(cap)?;
    nonzero_spectrum_of_matrix(&m)
}

/// The same filter and ordering applied to a plain matrix.
pub fn nonzero_spectrum_of_matrix(m: &Matrix) -> Result<Vec<Complex64>> {
    let mut eigs: Vec<Complex64> = eig::eigenvalues(m)?
        .into_iter()
        .filter(|z| z.norm() > NONZERO_EIGEN_CUTOFF)
        .collect();
    eigs.sort_by(|a, b| {
        b.norm()
            .partial_cmp(&a.norm())
            .unwrap()
            .then(a.arg().partial_cmp(&b.arg()).unwrap())
    });
    Ok(eigs)
}

/// Greedy nearest-match comparison of two nonzero spectra: sizes must agree
/// after rejecting moduli below the cutoff, and every matched pair must be
/// within `tol`.
pub fn spectra_match(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut pool: Vec<Complex64> = b.to_vec();
    for z in a {
        let Some((idx, dist)) = pool
            .iter()
            .enumerate()
            .map(|(i, w)| (i, (w - z).norm()))
            .min_by(|(_, x), (_, y)| x.partial_cmp(y).unwrap())
        else {
            return false;
        };
        if dist > tol {
            return false;
        }
        pool.swap_remove(idx);
    }
    true
}

/// Robust form for operators with defective zero eigenvalues: a computed
/// k-fold zero scatters into values of magnitude around eps^(1/k), far
/// above any fixed tiny cutoff, so size equality at the cutoff is not
/// attainable. Instead require symmetric containment: every eigenvalue of
/// either list with modulus above `floor` must have a partner in the other
/// (unfiltered) list within `tol`.
pub fn spectra_match_above(a: &[Complex64], b: &[Complex64], floor: f64, tol: f64) -> bool {
    let contained = |from: &[Complex64], into: &[Complex64]| {
        from.iter().filter(|z| z.norm() > floor).all(|z| {
            into.iter()
                .map(|w| (w - z).norm())
                .fold(f64::INFINITY, f64::min)
                <= tol
        })
    };
    contained(a, b) && contained(b, a)
}

/// All eigenvalues of a plain matrix (dense path), re-exported for tests
/// and reports.
pub fn eigenvalues_of_matrix(m: &Matrix) -> Result<Vec<Complex64>> {
    eig::eigenvalues(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build, NamedMethod};
    use crate::linalg::{NormalizedSystem, Vector};
    use crate::splitting::SplittingMask;

    fn ns_from(bj: &Matrix) -> NormalizedSystem {
        NormalizedSystem::from_jacobi(bj, Vector::zeros(bj.rows())).unwrap()
    }

    #[test]
    fn swap_example_block_matrix_is_exact() {
        let bj = Matrix::new(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let tu = SplittingMask::upper_lower(2).apply(&bj).unwrap();
        let op = BlockOperator::new(&tu);
        let m = op.dense_matrix(600).unwrap();
        let want = Matrix::new(
            4,
            4,
            vec![
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 1.0, 0.0, //
                0.0, 0.0, 1.0, 0.0, //
                0.0, 0.0, 1.0, 0.0,
            ],
        )
        .unwrap();
        assert_eq!(m, want);
        assert_eq!(m.inf_norm(), 1.0);
        assert_eq!(m.one_norm(), 3.0);
        assert_eq!(op.inf_norm(600), 1.0);
        // Matrix-free route agrees exactly.
        assert_eq!(op.inf_norm(0), 1.0);
    }

    #[test]
    fn order_one_operator_is_the_matrix_itself() {
        let bj = Matrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { (i + 2 * j) as f64 });
        let s = Splitting::new(vec![bj.clone()]).unwrap();
        let op = BlockOperator::new(&s);
        assert_eq!(op.dense_matrix(600).unwrap(), bj);
    }

    #[test]
    fn affine_offset_matches_stagewise_products() {
        let bj = Matrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { 0.2 + i as f64 * 0.1 });
        let ns = ns_from(&bj);
        let tu = build(NamedMethod::TU, &ns).unwrap();
        let op = BlockOperator::new(&tu);
        let c = vec![1.0, 2.0, -1.0];
        let offset = op.affine_offset(&c);
        // Offset stage 1 = c, stage 2 = (B1 + I)c.
        assert_eq!(&offset[..3], c.as_slice());
        let b1c = tu.part(0).matvec(&c);
        for i in 0..3 {
            assert!((offset[3 + i] - (b1c[i] + c[i])).abs() < 1e-15);
        }
    }

    #[test]
    fn strictly_triangular_single_part_has_zero_radius() {
        let u = Matrix::from_fn(5, 5, |i, j| if i < j { 1.5 } else { 0.0 });
        let s = Splitting::new(vec![u]).unwrap();
        let op = BlockOperator::new(&s);
        let cfg = SpectralConfig::default();
        let report = spectral_radius(&op, &cfg).unwrap();
        assert!(report.converged);
        assert!(report.rho < 1e-12);
        // The same via the nilpotency probe when forced off the dense path.
        let cfg = SpectralConfig {
            dense_cap: 1,
            ..SpectralConfig::default()
        };
        let report = spectral_radius(&op, &cfg).unwrap();
        assert_eq!(report.rho, 0.0);
        assert_eq!(report.method, SpectralBackend::PowerGrowth);
    }

    #[test]
    fn krylov_agrees_with_dense_oracle() {
        let n = 6;
        let bj = Matrix::from_fn(n, n, |i, j| {
            if i == j {
                0.0
            } else {
                0.35 * ((((i * 7 + j * 3) % 11) as f64) / 5.0 - 1.0)
            }
        });
        let ns = ns_from(&bj);
        for name in [NamedMethod::TU, NamedMethod::FTC, NamedMethod::AftcL] {
            let s = build(name, &ns).unwrap();
            let op = BlockOperator::new(&s);
            let dense = spectral_radius(&op, &SpectralConfig::default()).unwrap();
            assert_eq!(dense.method, SpectralBackend::DenseQr);
            let krylov_cfg = SpectralConfig {
                dense_cap: 1,
                nilpotency_cap: 0,
                subspace: 30,
                ..SpectralConfig::default()
            };
            let krylov = spectral_radius(&op, &krylov_cfg).unwrap();
            assert_eq!(krylov.method, SpectralBackend::Krylov);
            assert!(krylov.converged, "{name} krylov did not converge");
            assert!(
                (krylov.rho - dense.rho).abs() <= 1e-6 * dense.rho.max(1.0),
                "{name}: dense {} vs krylov {}",
                dense.rho,
                krylov.rho
            );
        }
    }

    #[test]
    fn fixed_point_direction_is_an_eigenvector_when_present() {
        // B_J = [[0,1],[1,0]] fixes w = (1,1); the stacked (w, w) is fixed
        // by any splitting's operator.
        let bj = Matrix::new(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let tu = SplittingMask::upper_lower(2).apply(&bj).unwrap();
        let op = BlockOperator::new(&tu);
        let out = op.apply(&[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(out, vec![1.0, 1.0, 1.0, 1.0]);
    }
}
