//! Execution of the d-stage iterative scheme, its two-step form, the
//! modified symmetric Gauss-Seidel iteration and the end-to-end solver.
//!
//! Stage p of a sweep consumes the already-updated stages 1..p-1 and the
//! stale stages p..d. A sweep is computed incrementally: the running sum is
//! corrected by one sparse part-application per stage, so a full sweep
//! costs one pass over the nonzeros of the split matrix plus stage
//! bookkeeping, never a pass per stage.

use crate::catalog::{self, DecompositionOfIdentity, NamedMethod};
use crate::error::{Error, Result};
use crate::linalg::{
    backward_unit_solve, forward_unit_solve, LinearSystem, Matrix, NormalizedSystem, Vector,
};
use crate::splitting::Splitting;

/// Norm threshold beyond which an iterate is declared divergent.
pub const DIVERGENCE_NORM: f64 = 1e100;

/// One matrix part in triplet form, for cheap repeated application.
#[derive(Debug, Clone)]
struct SparsePart {
    rows: Vec<u32>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SparsePart {
    fn from_matrix(m: &Matrix) -> Self {
        let mut rows = Vec::new();
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = m.at(i, j);
                if v != 0.0 {
                    rows.push(i as u32);
                    cols.push(j as u32);
                    vals.push(v);
                }
            }
        }
        Self { rows, cols, vals }
    }

    /// `out += M x`
    fn accumulate(&self, x: &[f64], out: &mut [f64]) {
        for ((&i, &j), &v) in self.rows.iter().zip(&self.cols).zip(&self.vals) {
            out[i as usize] += v * x[j as usize];
        }
    }

    /// `out += M (a - b)` evaluated entrywise, without forming `a - b`.
    fn accumulate_diff(&self, a: &[f64], b: &[f64], out: &mut [f64]) {
        for ((&i, &j), &v) in self.rows.iter().zip(&self.cols).zip(&self.vals) {
            out[i as usize] += v * (a[j as usize] - b[j as usize]);
        }
    }

    /// `out += M^T x`
    fn accumulate_transposed(&self, x: &[f64], out: &mut [f64]) {
        for ((&i, &j), &v) in self.rows.iter().zip(&self.cols).zip(&self.vals) {
            out[j as usize] += v * x[i as usize];
        }
    }
}

/// The d-tuple of stage vectors advanced by a scheme, with the iteration
/// counter and the previous last-stage vector needed by the two-step form.
#[derive(Debug, Clone)]
pub struct BlockIterationState {
    stages: Vec<Vector>,
    iteration: usize,
    previous_last: Option<Vector>,
}

impl BlockIterationState {
    pub fn zeros(order: usize, n: usize) -> Self {
        Self {
            stages: vec![Vector::zeros(n); order],
            iteration: 0,
            previous_last: None,
        }
    }

    pub fn from_stages(stages: Vec<Vector>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::InvalidConfig(
                "a state needs at least one stage".into(),
            ));
        }
        let n = stages[0].len();
        if stages.iter().any(|s| s.len() != n) {
            return Err(Error::InvalidConfig(
                "stage vectors must share a length".into(),
            ));
        }
        Ok(Self {
            stages,
            iteration: 0,
            previous_last: None,
        })
    }

    pub fn order(&self) -> usize {
        self.stages.len()
    }

    pub fn n(&self) -> usize {
        self.stages[0].len()
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn stage(&self, p: usize) -> &Vector {
        &self.stages[p]
    }

    pub fn stages(&self) -> &[Vector] {
        &self.stages
    }

    pub fn previous_last(&self) -> Option<&Vector> {
        self.previous_last.as_ref()
    }

    /// The stacked dn-vector (stage 1 first).
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.order() * self.n());
        for s in &self.stages {
            out.extend_from_slice(s.as_slice());
        }
        out
    }

    fn max_abs(&self) -> f64 {
        self.stages.iter().fold(0.0, |m, s| m.max(s.inf_norm()))
    }
}

/// A splitting compiled for repeated sweeping.
#[derive(Debug, Clone)]
pub struct Scheme {
    n: usize,
    parts: Vec<SparsePart>,
}

impl Scheme {
    pub fn new(splitting: &Splitting) -> Self {
        Self {
            n: splitting.n(),
            parts: splitting
                .parts()
                .iter()
                .map(SparsePart::from_matrix)
                .collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.parts.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// One full pass of the general scheme: stage p is rebuilt from the
    /// updated stages before it and the stale stages from p on, plus `c`.
    pub fn sweep(&self, state: &mut BlockIterationState, c: &[f64]) {
        let d = self.order();
        debug_assert_eq!(state.order(), d);
        debug_assert_eq!(state.n(), self.n);
        state.previous_last = Some(state.stages[d - 1].clone());
        let mut acc = c.to_vec();
        for (q, part) in self.parts.iter().enumerate() {
            part.accumulate(state.stages[q].as_slice(), &mut acc);
        }
        let mut scratch = Vector::zeros(self.n);
        for p in 0..d {
            scratch.as_mut_slice().copy_from_slice(&acc);
            if p < d - 1 {
                self.parts[p].accumulate_diff(
                    scratch.as_slice(),
                    state.stages[p].as_slice(),
                    &mut acc,
                );
            }
            std::mem::swap(&mut state.stages[p], &mut scratch);
        }
        state.iteration += 1;
    }

    /// The two-step form: each stage is the previous one corrected by a
    /// part applied to that stage's latest change. Equivalent to
    /// [`Scheme::sweep`] once the state has been advanced by at least one
    /// plain sweep (which records the previous last stage); the affine
    /// offset cancels in the differences, so no `c` is needed.
    pub fn sweep_two_step(&self, state: &mut BlockIterationState) -> Result<()> {
        let d = self.order();
        let prev_last = state
            .previous_last
            .take()
            .ok_or(Error::MissingPreviousState)?;
        let mut new_stages: Vec<Vector> = Vec::with_capacity(d);
        let mut first = state.stages[d - 1].clone();
        {
            let (head, tail) = (state.stages[d - 1].as_slice(), prev_last.as_slice());
            self.parts[d - 1].accumulate_diff(head, tail, first.as_mut_slice());
        }
        new_stages.push(first);
        for p in 1..d {
            let mut next = new_stages[p - 1].clone();
            self.parts[p - 1].accumulate_diff(
                new_stages[p - 1].as_slice(),
                state.stages[p - 1].as_slice(),
                next.as_mut_slice(),
            );
            new_stages.push(next);
        }
        state.previous_last = Some(state.stages[d - 1].clone());
        state.stages = new_stages;
        state.iteration += 1;
        Ok(())
    }

    /// One homogeneous sweep (`c = 0`) of the stacked dn-vector; the action
    /// of the block iteration operator.
    pub fn apply_block(&self, v: &[f64]) -> Vec<f64> {
        let d = self.order();
        let n = self.n;
        debug_assert_eq!(v.len(), d * n);
        let mut acc = vec![0.0; n];
        for (q, part) in self.parts.iter().enumerate() {
            part.accumulate(&v[q * n..(q + 1) * n], &mut acc);
        }
        let mut out = vec![0.0; d * n];
        for p in 0..d {
            out[p * n..(p + 1) * n].copy_from_slice(&acc);
            if p < d - 1 {
                self.parts[p].accumulate_diff(
                    &out[p * n..(p + 1) * n],
                    &v[p * n..(p + 1) * n],
                    &mut acc,
                );
            }
        }
        out
    }

    /// The transposed block action, used for exact row sums of the block
    /// operator: solves the reversed stage recursion with transposed parts,
    /// then applies the transposed upper block pattern.
    pub fn apply_block_transposed(&self, w: &[f64]) -> Vec<f64> {
        let d = self.order();
        let n = self.n;
        debug_assert_eq!(w.len(), d * n);
        // z_p = w_p + B_p^T (z_{p+1} + ... + z_d), from p = d down to 1.
        let mut z = vec![0.0; d * n];
        let mut suffix = vec![0.0; n];
        for p in (0..d).rev() {
            let mut zp = w[p * n..(p + 1) * n].to_vec();
            self.parts[p].accumulate_transposed(&suffix, &mut zp);
            for (s, &v) in suffix.iter_mut().zip(&zp) {
                *s += v;
            }
            z[p * n..(p + 1) * n].copy_from_slice(&zp);
        }
        // y_p = B_p^T (z_1 + ... + z_p).
        let mut out = vec![0.0; d * n];
        let mut prefix = vec![0.0; n];
        for p in 0..d {
            for (s, &v) in prefix.iter_mut().zip(&z[p * n..(p + 1) * n]) {
                *s += v;
            }
            self.parts[p].accumulate_transposed(&prefix, &mut out[p * n..(p + 1) * n]);
        }
        out
    }
}

/// The modified symmetric Gauss-Seidel iteration on the shifted variable
/// `z = U y`: two triangular solves per step and no matrix inverses.
#[derive(Debug, Clone)]
pub struct ModifiedSgs {
    lower: Matrix,
    upper: Matrix,
    c_sgs: Vec<f64>,
    u_c_sgs: Vec<f64>,
}

impl ModifiedSgs {
    pub fn new(ns: &NormalizedSystem) -> Self {
        let t = forward_unit_solve(ns.lower(), ns.c().as_slice());
        let c_sgs = backward_unit_solve(ns.upper(), &t);
        let u_c_sgs = ns.upper().matvec(&c_sgs);
        Self {
            lower: ns.lower().clone(),
            upper: ns.upper().clone(),
            c_sgs,
            u_c_sgs,
        }
    }

    /// `z0 = U y0`.
    pub fn seed(&self, y0: &[f64]) -> Vec<f64> {
        self.upper.matvec(y0)
    }

    /// One step `z -> B* z + U c_sgs` with
    /// `B* = [(I-U)^{-1} - I][(I-L)^{-1} - I]`.
    pub fn step(&self, z: &[f64]) -> Vec<f64> {
        let homog = self.apply_bstar(z);
        homog
            .iter()
            .zip(&self.u_c_sgs)
            .map(|(a, b)| a + b)
            .collect()
    }

    /// The homogeneous action `B* z`.
    pub fn apply_bstar(&self, z: &[f64]) -> Vec<f64> {
        let a = forward_unit_solve(&self.lower, z);
        let w: Vec<f64> = a.iter().zip(z).map(|(x, y)| x - y).collect();
        let b = backward_unit_solve(&self.upper, &w);
        b.iter().zip(&w).map(|(x, y)| x - y).collect()
    }

    /// Recover the symmetric Gauss-Seidel iterate from the z-variable:
    /// `y_{k+1} = (I-U)^{-1}[(I-L)^{-1} - I] z_k + c_sgs`.
    pub fn finish(&self, z: &[f64]) -> Vec<f64> {
        let a = forward_unit_solve(&self.lower, z);
        let w: Vec<f64> = a.iter().zip(z).map(|(x, y)| x - y).collect();
        let b = backward_unit_solve(&self.upper, &w);
        b.iter().zip(&self.c_sgs).map(|(x, y)| x + y).collect()
    }
}

/// How the solver advances from one approximation to the next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    GeneralScheme,
    TwoStep,
    ModifiedSgs,
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub tolerance: f64,
    pub max_iters: usize,
    pub mode: SolveMode,
}

impl SolveConfig {
    pub fn new(tolerance: f64, max_iters: usize, mode: SolveMode) -> Result<Self> {
        if tolerance.is_nan() || tolerance <= 0.0 {
            return Err(Error::InvalidConfig("tolerance must be positive".into()));
        }
        if max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        Ok(Self {
            tolerance,
            max_iters,
            mode,
        })
    }
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iters: 100_000,
            mode: SolveMode::GeneralScheme,
        }
    }
}

/// What to iterate: a cataloged method or an explicit splitting.
#[derive(Debug, Clone)]
pub enum Method {
    Named(NamedMethod),
    Splitting(Splitting),
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: Vector,
    pub iterations: usize,
    pub final_residual: f64,
    pub converged: bool,
}

struct ResidualTracker<'a> {
    sys: &'a LinearSystem,
    scale: f64,
    tolerance: f64,
}

impl<'a> ResidualTracker<'a> {
    fn new(sys: &'a LinearSystem, tolerance: f64) -> Self {
        let bnorm = sys.b().inf_norm();
        Self {
            sys,
            scale: if bnorm > 0.0 { bnorm } else { 1.0 },
            tolerance,
        }
    }

    fn check(&self, x: &[f64], iteration: usize) -> Result<Option<f64>> {
        let norm = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !norm.is_finite() || norm > DIVERGENCE_NORM {
            return Err(Error::Diverged { iteration, norm });
        }
        let rel = self.sys.residual_inf(x) / self.scale;
        Ok(if rel <= self.tolerance {
            Some(rel)
        } else {
            None
        })
    }

    fn relative(&self, x: &[f64]) -> f64 {
        self.sys.residual_inf(x) / self.scale
    }
}

/// Iterate until the relative residual on the original system drops below
/// the tolerance. The residual is measured against the original `A` and `b`
/// every sweep; the reported solution is in original coordinates (row
/// scaling leaves the solution vector unchanged). Divergence (a non-finite
/// or astronomically large iterate) is an error carrying the sweep index.
pub fn solve(sys: &LinearSystem, method: &Method, cfg: &SolveConfig) -> Result<SolveReport> {
    let _ = SolveConfig::new(cfg.tolerance, cfg.max_iters, cfg.mode)?;
    let ns = crate::linalg::normalize(sys)?;
    // A zero iteration matrix admits no splitting; every method degenerates
    // to the one-step update x = c.
    if ns.jacobi_matrix().is_zero() {
        let x = ns.c().clone();
        let tracker = ResidualTracker::new(sys, cfg.tolerance);
        let rel = tracker.relative(x.as_slice());
        return Ok(SolveReport {
            solution: x,
            iterations: 1,
            final_residual: rel,
            converged: rel <= cfg.tolerance,
        });
    }
    match (&cfg.mode, method) {
        (SolveMode::ModifiedSgs, _) | (_, Method::Named(NamedMethod::ModifiedSGS)) => {
            solve_modified_sgs(sys, &ns, cfg)
        }
        (SolveMode::TwoStep, Method::Named(name)) if !name.has_splitting_form() => {
            Err(Error::InvalidConfig(format!(
                "two-step mode needs a splitting-form method, got {name}"
            )))
        }
        (_, Method::Named(name)) if !name.has_splitting_form() => match name {
            NamedMethod::Amks => {
                solve_amks(sys, &ns, &DecompositionOfIdentity::per_row(ns.n()), cfg)
            }
            _ => solve_classical(sys, &ns, *name, cfg),
        },
        (_, Method::Named(name)) => {
            let splitting = catalog::build(*name, &ns)?;
            solve_splitting(sys, &ns, &splitting, cfg)
        }
        (_, Method::Splitting(splitting)) => {
            if splitting.n() != ns.n() {
                return Err(Error::DimensionMismatch {
                    expected: ns.n(),
                    got: splitting.n(),
                });
            }
            let bj = ns.jacobi_matrix();
            let drift = splitting.source().sub(&bj).max_abs();
            if drift > 1e-12 * bj.max_abs().max(1.0) {
                return Err(Error::SourceMismatch);
            }
            solve_splitting(sys, &ns, splitting, cfg)
        }
    }
}

fn solve_splitting(
    sys: &LinearSystem,
    ns: &NormalizedSystem,
    splitting: &Splitting,
    cfg: &SolveConfig,
) -> Result<SolveReport> {
    let scheme = Scheme::new(splitting);
    let mut state = BlockIterationState::zeros(scheme.order(), scheme.n());
    let tracker = ResidualTracker::new(sys, cfg.tolerance);
    let two_step = cfg.mode == SolveMode::TwoStep;
    for k in 1..=cfg.max_iters {
        if two_step && state.previous_last.is_some() {
            scheme.sweep_two_step(&mut state)?;
        } else {
            scheme.sweep(&mut state, ns.c().as_slice());
        }
        if !state.max_abs().is_finite() || state.max_abs() > DIVERGENCE_NORM {
            return Err(Error::Diverged {
                iteration: k,
                norm: state.max_abs(),
            });
        }
        let x = state.stage(state.order() - 1).as_slice();
        if let Some(rel) = tracker.check(x, k)? {
            return Ok(SolveReport {
                solution: state.stage(state.order() - 1).clone(),
                iterations: k,
                final_residual: rel,
                converged: true,
            });
        }
    }
    let last = state.stage(state.order() - 1).clone();
    let rel = tracker.relative(last.as_slice());
    Ok(SolveReport {
        solution: last,
        iterations: cfg.max_iters,
        final_residual: rel,
        converged: false,
    })
}

fn solve_classical(
    sys: &LinearSystem,
    ns: &NormalizedSystem,
    name: NamedMethod,
    cfg: &SolveConfig,
) -> Result<SolveReport> {
    let n = ns.n();
    let c = ns.c().as_slice();
    let tracker = ResidualTracker::new(sys, cfg.tolerance);
    let mut x = vec![0.0; n];
    for k in 1..=cfg.max_iters {
        x = match name {
            NamedMethod::FGS => {
                let mut rhs = ns.upper().matvec(&x);
                for (r, &ci) in rhs.iter_mut().zip(c) {
                    *r += ci;
                }
                forward_unit_solve(ns.lower(), &rhs)
            }
            NamedMethod::BGS => {
                let mut rhs = ns.lower().matvec(&x);
                for (r, &ci) in rhs.iter_mut().zip(c) {
                    *r += ci;
                }
                backward_unit_solve(ns.upper(), &rhs)
            }
            NamedMethod::SGS => {
                let mut rhs = ns.upper().matvec(&x);
                for (r, &ci) in rhs.iter_mut().zip(c) {
                    *r += ci;
                }
                let half = forward_unit_solve(ns.lower(), &rhs);
                let mut rhs = ns.lower().matvec(&half);
                for (r, &ci) in rhs.iter_mut().zip(c) {
                    *r += ci;
                }
                backward_unit_solve(ns.upper(), &rhs)
            }
            other => {
                return Err(Error::NoSplittingForm(other.to_string()));
            }
        };
        if let Some(rel) = tracker.check(&x, k)? {
            return Ok(SolveReport {
                solution: Vector::from(x),
                iterations: k,
                final_residual: rel,
                converged: true,
            });
        }
    }
    let rel = tracker.relative(&x);
    Ok(SolveReport {
        solution: Vector::from(x),
        iterations: cfg.max_iters,
        final_residual: rel,
        converged: false,
    })
}

/// Row-selector iteration: selectors are applied in order, each reading the
/// partially updated vector.
pub fn solve_amks(
    sys: &LinearSystem,
    ns: &NormalizedSystem,
    doi: &DecompositionOfIdentity,
    cfg: &SolveConfig,
) -> Result<SolveReport> {
    if doi.n() != ns.n() {
        return Err(Error::DimensionMismatch {
            expected: ns.n(),
            got: doi.n(),
        });
    }
    let bj = ns.jacobi_matrix();
    let c = ns.c().as_slice();
    let tracker = ResidualTracker::new(sys, cfg.tolerance);
    let mut x = vec![0.0; ns.n()];
    for k in 1..=cfg.max_iters {
        for sel in doi.selectors() {
            let updates: Vec<(usize, f64)> = sel
                .iter()
                .map(|&i| {
                    let row = bj.row(i);
                    let v: f64 = row.iter().zip(&x).map(|(a, b)| a * b).sum();
                    (i, v + c[i])
                })
                .collect();
            for (i, v) in updates {
                x[i] = v;
            }
        }
        if let Some(rel) = tracker.check(&x, k)? {
            return Ok(SolveReport {
                solution: Vector::from(x),
                iterations: k,
                final_residual: rel,
                converged: true,
            });
        }
    }
    let rel = tracker.relative(&x);
    Ok(SolveReport {
        solution: Vector::from(x),
        iterations: cfg.max_iters,
        final_residual: rel,
        converged: false,
    })
}

fn solve_modified_sgs(
    sys: &LinearSystem,
    ns: &NormalizedSystem,
    cfg: &SolveConfig,
) -> Result<SolveReport> {
    let msgs = ModifiedSgs::new(ns);
    let tracker = ResidualTracker::new(sys, cfg.tolerance);
    let mut z = msgs.seed(&vec![0.0; ns.n()]);
    for k in 1..=cfg.max_iters {
        z = msgs.step(&z);
        let znorm = z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !znorm.is_finite() || znorm > DIVERGENCE_NORM {
            return Err(Error::Diverged {
                iteration: k,
                norm: znorm,
            });
        }
        let y = msgs.finish(&z);
        if let Some(rel) = tracker.check(&y, k)? {
            return Ok(SolveReport {
                solution: Vector::from(y),
                iterations: k,
                final_residual: rel,
                converged: true,
            });
        }
    }
    let y = msgs.finish(&z);
    let rel = tracker.relative(&y);
    Ok(SolveReport {
        solution: Vector::from(y),
        iterations: cfg.max_iters,
        final_residual: rel,
        converged: false,
    })
}
