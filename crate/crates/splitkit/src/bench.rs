//! Experiment harness: N-trial sweeps over methods and matrix classes,
//! speedup statistics, the phi sweep, and comparisons against the bundled
//! reference tables.
//!
//! Trials run concurrently (capped by the `SPLITKIT_THREADS` environment
//! variable) with per-trial seeds derived as `seed + trial_index`;
//! aggregation walks the trial-indexed results with a pairwise summation
//! tree, so reports are byte-identical regardless of thread count.

use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::catalog::{self, NamedMethod};
use crate::engine::ModifiedSgs;
use crate::error::{Error, Result};
use crate::genmat::{bspline_matrix, generate, GeneratorConfig, MatrixClass, Rng};
use crate::linalg::{normalize, LinearSystem, Matrix, NormalizedSystem, Vector};
use crate::spectral::{
    matrix_spectral_radius, spectral_radius, BlockOperator, SpectralConfig, SpectralReport,
};

/// Asymptotic iteration-count ratio `log(rho_b) / log(rho_j)`; undefined
/// when either radius is nonpositive or the baseline radius is 1.
pub fn speedup(rho_b: f64, rho_j: f64) -> Option<f64> {
    if rho_b <= 0.0 || rho_j <= 0.0 || rho_j == 1.0 {
        return None;
    }
    Some(rho_b.ln() / rho_j.ln())
}

/// Pairwise summation: deterministic and accurate independent of how the
/// values were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

fn mean_and_population_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    (mean, (pairwise_sum(&sq) / n).sqrt())
}

/// Worker-thread count: `SPLITKIT_THREADS` if set, otherwise the available
/// parallelism.
pub fn thread_count() -> usize {
    std::env::var("SPLITKIT_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Index-ordered parallel map over `0..count`.
fn parallel_map<T, F>(count: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let threads = threads.clamp(1, count.max(1));
    if threads == 1 {
        return (0..count).map(f).collect();
    }
    let slots: Vec<Mutex<Option<T>>> = (0..count).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= count {
                    break;
                }
                let value = f(i);
                *slots[i].lock().unwrap() = Some(value);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("worker filled every slot"))
        .collect()
}

/// Spectral radius of a named method's iteration operator on a system.
pub fn method_spectral_radius(
    ns: &NormalizedSystem,
    method: NamedMethod,
    cfg: &SpectralConfig,
) -> Result<SpectralReport> {
    match method {
        NamedMethod::Jacobi => matrix_spectral_radius(&ns.jacobi_matrix(), cfg),
        NamedMethod::FGS | NamedMethod::BGS | NamedMethod::SGS => {
            let m = catalog::classical_iteration_matrix(method, ns)?;
            matrix_spectral_radius(&m, cfg)
        }
        NamedMethod::ModifiedSGS => {
            let msgs = ModifiedSgs::new(ns);
            let n = ns.n();
            let mut m = Matrix::zeros(n, n);
            let mut e = vec![0.0; n];
            for j in 0..n {
                e[j] = 1.0;
                let col = msgs.apply_bstar(&e);
                e[j] = 0.0;
                for (i, &v) in col.iter().enumerate() {
                    m.set(i, j, v);
                }
            }
            matrix_spectral_radius(&m, cfg)
        }
        NamedMethod::Amks => {
            let doi = catalog::DecompositionOfIdentity::per_row(ns.n());
            let m = catalog::amks_iteration_matrix(&doi, ns)?;
            matrix_spectral_radius(&m, cfg)
        }
        _ => {
            let splitting = catalog::build(method, ns)?;
            spectral_radius(&BlockOperator::new(&splitting), cfg)
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub class: MatrixClass,
    pub n: usize,
    pub phi: f64,
    pub trials: usize,
    pub seed: u64,
    pub methods: Vec<NamedMethod>,
    pub spectral: SpectralConfig,
}

impl ExperimentConfig {
    /// The published-table setup for a class, with Krylov estimation above
    /// plain-matrix size for speed.
    pub fn table_default(class: MatrixClass, seed: u64, trials: usize) -> Self {
        Self {
            class,
            n: 100,
            phi: 0.9,
            trials,
            seed,
            methods: NamedMethod::TABLE.to_vec(),
            spectral: bench_spectral_config(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("no methods selected".into()));
        }
        GeneratorConfig {
            n: self.n,
            phi: self.phi,
            seed: self.seed,
            class: self.class,
        }
        .validate()
    }
}

/// Spectral settings tuned for the harness: dense only at plain-matrix
/// size, modest Krylov subspace.
pub fn bench_spectral_config() -> SpectralConfig {
    SpectralConfig {
        tol: 1e-8,
        dense_cap: 128,
        subspace: 30,
        max_restarts: 200,
        ..SpectralConfig::default()
    }
}

#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub rho_baseline: Option<f64>,
    /// Per configured method: the converged estimate, or None if the
    /// spectral estimator failed to converge for this trial.
    pub rho: Vec<Option<f64>>,
}

#[derive(Debug, Clone)]
pub struct MethodStats {
    pub method: NamedMethod,
    pub mean_rho: f64,
    pub sd_rho: f64,
    pub mean_speedup: Option<f64>,
    pub sd_speedup: Option<f64>,
    /// Trials excluded because the estimator did not converge.
    pub excluded: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub stats: Vec<MethodStats>,
    pub trials: Vec<TrialRecord>,
}

/// Run the N-trial experiment: per trial, generate the matrix from the
/// derived seed, estimate every method's spectral radius, and aggregate
/// means and population standard deviations.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let methods = cfg.methods.clone();
    let trials = parallel_map(cfg.trials, thread_count(), |t| {
        let seed = cfg.seed.wrapping_add(t as u64);
        let sys = generate(&GeneratorConfig {
            n: cfg.n,
            phi: cfg.phi,
            seed,
            class: cfg.class,
        })?;
        let ns = normalize(&sys)?;
        let baseline = matrix_spectral_radius(&ns.jacobi_matrix(), &cfg.spectral)?;
        let rho_baseline = baseline.converged.then_some(baseline.rho);
        let mut rho = Vec::with_capacity(methods.len());
        for &m in &methods {
            if m == NamedMethod::Jacobi {
                rho.push(rho_baseline);
                continue;
            }
            let rep = method_spectral_radius(&ns, m, &cfg.spectral)?;
            rho.push(rep.converged.then_some(rep.rho));
        }
        Ok::<TrialRecord, Error>(TrialRecord {
            trial: t,
            seed,
            rho_baseline,
            rho,
        })
    });
    let trials: Vec<TrialRecord> = trials.into_iter().collect::<Result<_>>()?;
    let mut stats = Vec::with_capacity(methods.len());
    for (mi, &method) in methods.iter().enumerate() {
        let mut rhos = Vec::new();
        let mut speedups = Vec::new();
        let mut excluded = 0usize;
        for rec in &trials {
            match rec.rho[mi] {
                Some(r) => {
                    rhos.push(r);
                    if method != NamedMethod::Jacobi {
                        if let Some(base) = rec.rho_baseline {
                            if let Some(sp) = speedup(r, base) {
                                speedups.push(sp);
                            }
                        }
                    }
                }
                None => excluded += 1,
            }
        }
        if rhos.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "every trial failed spectral estimation for {method}"
            )));
        }
        let (mean_rho, sd_rho) = mean_and_population_sd(&rhos);
        let (mean_speedup, sd_speedup) = if speedups.is_empty() {
            (None, None)
        } else {
            let (m, s) = mean_and_population_sd(&speedups);
            (Some(m), Some(s))
        };
        stats.push(MethodStats {
            method,
            mean_rho,
            sd_rho,
            mean_speedup,
            sd_speedup,
            excluded,
        });
    }
    Ok(ExperimentReport {
        config: cfg.clone(),
        stats,
        trials,
    })
}

/// The aggregate table as CSV, preceded by the resolved configuration so a
/// report can be replayed. Byte-deterministic for a given configuration.
pub fn experiment_csv(report: &ExperimentReport) -> String {
    use std::fmt::Write as _;
    let c = &report.config;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# splitkit experiment: class={} n={} phi={} trials={} seed={}",
        c.class.label(),
        c.n,
        c.phi,
        c.trials,
        c.seed
    );
    let _ = writeln!(
        out,
        "method,mean_rho,sd_rho,mean_speedup,sd_speedup,excluded"
    );
    for s in &report.stats {
        let sp = s
            .mean_speedup
            .map(|v| format!("{v:.6e}"))
            .unwrap_or_default();
        let sd = s.sd_speedup.map(|v| format!("{v:.6e}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{:.6e},{:.6e},{},{},{}",
            s.method, s.mean_rho, s.sd_rho, sp, sd, s.excluded
        );
    }
    out
}

/// Per-trial raw values as CSV.
pub fn trials_csv(report: &ExperimentReport) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let _ = write!(out, "trial,seed,rho_jacobi");
    for m in &report.config.methods {
        let _ = write!(out, ",{m}");
    }
    out.push('\n');
    for rec in &report.trials {
        let base = rec
            .rho_baseline
            .map(|v| format!("{v:.6e}"))
            .unwrap_or_default();
        let _ = write!(out, "{},{},{}", rec.trial, rec.seed, base);
        for r in &rec.rho {
            match r {
                Some(v) => {
                    let _ = write!(out, ",{v:.6e}");
                }
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone)]
pub struct PhiSweepConfig {
    pub n: usize,
    pub seed: u64,
    pub start: f64,
    pub step: f64,
    pub stop: f64,
    pub methods: Vec<NamedMethod>,
    pub spectral: SpectralConfig,
}

impl Default for PhiSweepConfig {
    fn default() -> Self {
        Self {
            n: 100,
            seed: 42,
            start: 1.0,
            step: 0.5,
            stop: 20.0,
            methods: vec![
                NamedMethod::TU,
                NamedMethod::FGS,
                NamedMethod::BGS,
                NamedMethod::SGS,
            ],
            spectral: bench_spectral_config(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PhiSweepRow {
    pub phi: f64,
    /// Per configured method: (rho, diverges) with diverges = rho > 1.
    pub rho: Vec<(f64, bool)>,
}

/// One nonpositive-class draw whose off-diagonals stay fixed while the
/// diagonal is rebuilt from the dominance rule at each grid value; the
/// baseline radius then equals phi exactly at every grid point.
pub fn run_phi_sweep(cfg: &PhiSweepConfig) -> Result<Vec<PhiSweepRow>> {
    if cfg.step.is_nan() || cfg.step <= 0.0 {
        return Err(Error::InvalidConfig("phi step must be positive".into()));
    }
    if cfg.n < 3 {
        return Err(Error::InvalidConfig("phi sweep needs n >= 3".into()));
    }
    // Fixed off-diagonal draw (nonpositive-class sign rule).
    let n = cfg.n;
    let mut rng = Rng::new(cfg.seed);
    let mut off = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                off.set(i, j, rng.symmetric().abs());
            }
        }
    }
    let mut grid = Vec::new();
    let mut phi = cfg.start;
    while phi <= cfg.stop + 1e-12 {
        grid.push(phi);
        phi += cfg.step;
    }
    let methods = cfg.methods.clone();
    let rows = parallel_map(grid.len(), thread_count(), |gi| {
        let phi = grid[gi];
        let mut a = off.clone();
        for i in 0..n {
            let row_sum: f64 = (0..n).filter(|&j| j != i).map(|j| a.at(i, j)).sum();
            a.set(i, i, row_sum / phi);
        }
        let ones = vec![1.0; n];
        let b = Vector::from(a.matvec(&ones));
        let sys = LinearSystem::new(a, b)?;
        let ns = normalize(&sys)?;
        let mut rho = Vec::with_capacity(methods.len());
        for &m in &methods {
            let rep = method_spectral_radius(&ns, m, &cfg.spectral)?;
            rho.push((rep.rho, rep.rho > 1.0));
        }
        Ok::<PhiSweepRow, Error>(PhiSweepRow { phi, rho })
    });
    rows.into_iter().collect()
}

pub fn phi_sweep_csv(cfg: &PhiSweepConfig, rows: &[PhiSweepRow]) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# splitkit phi sweep: n={} seed={} start={} step={} stop={}",
        cfg.n, cfg.seed, cfg.start, cfg.step, cfg.stop
    );
    let _ = write!(out, "phi");
    for m in &cfg.methods {
        let _ = write!(out, ",{m},{m}_diverges");
    }
    out.push('\n');
    for row in rows {
        let _ = write!(out, "{:.4}", row.phi);
        for (r, d) in &row.rho {
            let _ = write!(out, ",{r:.6e},{d}");
        }
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// Reference-table reproduction
// ---------------------------------------------------------------------------

/// A bundled reference table: per method, mean rho and speedup with their
/// published standard deviations (None where the table has no entry).
#[derive(Debug, Clone)]
pub struct ReferenceRow {
    pub method: NamedMethod,
    pub mean_rho: f64,
    pub sd_rho: f64,
    pub mean_speedup: Option<f64>,
    pub sd_speedup: Option<f64>,
}

fn parse_reference_table(text: &str) -> Vec<ReferenceRow> {
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("method") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let method = NamedMethod::from_str(fields[0]).expect("bundled table method name");
        let get = |i: usize| -> Option<f64> {
            fields
                .get(i)
                .and_then(|s| if s.is_empty() { None } else { s.parse().ok() })
        };
        rows.push(ReferenceRow {
            method,
            mean_rho: get(1).expect("mean rho"),
            sd_rho: get(2).unwrap_or(0.0),
            mean_speedup: get(3),
            sd_speedup: get(4),
        });
    }
    rows
}

pub fn reference_table(class: MatrixClass) -> Vec<ReferenceRow> {
    let text = match class {
        MatrixClass::Class1 => include_str!("../paper_tables/class1_phi09.csv"),
        MatrixClass::Class2 => include_str!("../paper_tables/class2_phi09.csv"),
        MatrixClass::Class3 => include_str!("../paper_tables/class3_phi09.csv"),
    };
    parse_reference_table(text)
}

/// The deterministic banded-matrix reference values: (method, rho).
pub fn bspline_reference() -> Vec<(NamedMethod, f64)> {
    include_str!("../paper_tables/bspline.csv")
        .lines()
        .filter(|l| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#') && !l.starts_with("method")
        })
        .map(|l| {
            let mut it = l.split(',');
            let m = NamedMethod::from_str(it.next().unwrap()).unwrap();
            let v: f64 = it.next().unwrap().parse().unwrap();
            (m, v)
        })
        .collect()
}

/// Absolute floor applied to reference bands that are implausibly tight for
/// comparison across random streams.
pub const STATISTICAL_BAND_FLOOR: f64 = 5e-3;

#[derive(Debug, Clone)]
pub struct CheckLine {
    pub label: String,
    pub got: f64,
    pub want: f64,
    pub band: f64,
    pub floored: bool,
    pub ok: bool,
}

impl CheckLine {
    fn new(label: String, got: f64, want: f64, band: f64, floored: bool) -> Self {
        let ok = (got - want).abs() <= band;
        Self {
            label,
            got,
            want,
            band,
            floored,
            ok,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReproduceOutcome {
    pub target: String,
    pub lines: Vec<CheckLine>,
    pub passed: bool,
}

/// Reproduce one statistical class table and compare every mean against the
/// reference within max(1 sd, the band floor).
pub fn reproduce_class_table(
    class: MatrixClass,
    seed: u64,
    trials: usize,
) -> Result<ReproduceOutcome> {
    let cfg = ExperimentConfig::table_default(class, seed, trials);
    let report = run_experiment(&cfg)?;
    let reference = reference_table(class);
    let mut lines = Vec::new();
    for want in &reference {
        let got = report
            .stats
            .iter()
            .find(|s| s.method == want.method)
            .ok_or_else(|| Error::InvalidConfig(format!("{} missing from run", want.method)))?;
        let band = want.sd_rho.max(STATISTICAL_BAND_FLOOR);
        lines.push(CheckLine::new(
            format!("{} mean_rho", want.method),
            got.mean_rho,
            want.mean_rho,
            band,
            want.sd_rho < STATISTICAL_BAND_FLOOR,
        ));
        if let (Some(sp_want), Some(sp_got)) = (want.mean_speedup, got.mean_speedup) {
            let sd = want.sd_speedup.unwrap_or(0.0);
            let band = sd.max(STATISTICAL_BAND_FLOOR);
            lines.push(CheckLine::new(
                format!("{} mean_speedup", want.method),
                sp_got,
                sp_want,
                band,
                sd < STATISTICAL_BAND_FLOOR,
            ));
        }
    }
    let passed = lines.iter().all(|l| l.ok);
    Ok(ReproduceOutcome {
        target: format!("{}-phi09", class.label()),
        lines,
        passed,
    })
}

/// The deterministic banded-matrix values: the five reference radii within
/// 1e-4 (1e-3 for the baseline), plus the stated coincidences within 1e-6.
pub fn reproduce_bspline() -> Result<ReproduceOutcome> {
    let sys = bspline_matrix(100)?;
    let ns = normalize(&sys)?;
    let cfg = bench_spectral_config();
    let mut lines = Vec::new();
    for (method, want) in bspline_reference() {
        let rep = method_spectral_radius(&ns, method, &cfg)?;
        let band = if method == NamedMethod::Jacobi {
            1e-3
        } else {
            1e-4
        };
        lines.push(CheckLine::new(
            format!("{method} rho"),
            rep.rho,
            want,
            band,
            false,
        ));
    }
    let pair = |a: NamedMethod, b: NamedMethod| -> Result<CheckLine> {
        let ra = method_spectral_radius(&ns, a, &cfg)?.rho;
        let rb = method_spectral_radius(&ns, b, &cfg)?.rho;
        Ok(CheckLine::new(
            format!("rho({a}) = rho({b})"),
            ra,
            rb,
            1e-6,
            false,
        ))
    };
    lines.push(pair(NamedMethod::FGS, NamedMethod::BGS)?);
    lines.push(pair(NamedMethod::TC22, NamedMethod::TR22)?);
    lines.push(pair(NamedMethod::AftcL, NamedMethod::AftcU)?);
    lines.push(pair(NamedMethod::AftcL, NamedMethod::AftrL)?);
    lines.push(pair(NamedMethod::AftcL, NamedMethod::AftrU)?);
    let passed = lines.iter().all(|l| l.ok);
    Ok(ReproduceOutcome {
        target: "bspline".into(),
        lines,
        passed,
    })
}

/// Qualitative phi-sweep checks on one pinned draw: at phi = 2 the
/// two-triangle method already diverges while the Gauss-Seidel family and
/// the alternating methods still converge, and the symmetric variant is the
/// last of the Gauss-Seidel family to cross radius 1.
pub fn reproduce_phi_sweep(seed: u64) -> Result<ReproduceOutcome> {
    let spectral = bench_spectral_config();
    let gs_cfg = PhiSweepConfig {
        seed,
        methods: vec![NamedMethod::FGS, NamedMethod::BGS, NamedMethod::SGS],
        ..PhiSweepConfig::default()
    };
    let rows = run_phi_sweep(&gs_cfg)?;
    let crossing = |mi: usize| -> f64 {
        rows.iter()
            .find(|r| r.rho[mi].0 > 1.0)
            .map(|r| r.phi)
            .unwrap_or(f64::INFINITY)
    };
    let (fgs_cross, bgs_cross, sgs_cross) = (crossing(0), crossing(1), crossing(2));

    // At phi = 2: one grid point, all methods of interest.
    let at2 = PhiSweepConfig {
        seed,
        start: 2.0,
        stop: 2.0,
        methods: vec![
            NamedMethod::TU,
            NamedMethod::FGS,
            NamedMethod::BGS,
            NamedMethod::SGS,
            NamedMethod::AftcL,
            NamedMethod::AftcU,
            NamedMethod::AftrL,
            NamedMethod::AftrU,
        ],
        spectral,
        ..PhiSweepConfig::default()
    };
    let row2 = run_phi_sweep(&at2)?.remove(0);
    let mut lines = Vec::new();
    let mut push_flag = |label: String, ok: bool, got: f64| {
        lines.push(CheckLine {
            label,
            got,
            want: f64::NAN,
            band: f64::NAN,
            floored: false,
            ok,
        });
    };
    push_flag(
        "phi=2.0: TU diverges".into(),
        row2.rho[0].0 > 1.0,
        row2.rho[0].0,
    );
    for (i, name) in at2.methods.iter().enumerate().skip(1) {
        push_flag(
            format!("phi=2.0: {name} converges"),
            row2.rho[i].0 < 1.0,
            row2.rho[i].0,
        );
    }
    push_flag(
        format!("SGS crosses last (fGS at {fgs_cross}, bGS at {bgs_cross}, sGS at {sgs_cross})"),
        sgs_cross >= fgs_cross && sgs_cross >= bgs_cross && sgs_cross.is_finite(),
        sgs_cross,
    );
    let passed = lines.iter().all(|l| l.ok);
    Ok(ReproduceOutcome {
        target: "phi-sweep".into(),
        lines,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn speedup_basic_identities() {
        assert_eq!(speedup(0.5, 0.5), Some(1.0));
        let two = speedup(0.25, 0.5).unwrap();
        assert!((two - 2.0).abs() < 1e-15);
        assert_eq!(speedup(0.5, 1.0), None);
        assert_eq!(speedup(0.0, 0.5), None);
        assert_eq!(speedup(-0.1, 0.5), None);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_smooth_data() {
        let xs: Vec<f64> = (0..1001).map(|i| (i as f64 * 0.37).sin()).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-9);
    }

    #[test]
    fn population_sd_matches_two_pass_oracle() {
        let xs = [0.2, 0.7, 0.9, 0.1, 0.4, 0.4];
        let (mean, sd) = mean_and_population_sd(&xs);
        let n = xs.len() as f64;
        let oracle_mean = xs.iter().sum::<f64>() / n;
        let oracle_sd = (xs.iter().map(|x| (x - oracle_mean).powi(2)).sum::<f64>() / n).sqrt();
        assert!((mean - oracle_mean).abs() < 1e-15);
        assert!((sd - oracle_sd).abs() < 1e-15);
        // N = 1 degenerates to sd = 0 by the formula.
        let (_, sd1) = mean_and_population_sd(&[3.2]);
        assert_eq!(sd1, 0.0);
    }

    #[test]
    fn small_experiment_is_deterministic_and_sane() {
        let cfg = ExperimentConfig {
            class: MatrixClass::Class2,
            n: 14,
            phi: 0.9,
            trials: 4,
            seed: 11,
            methods: vec![NamedMethod::Jacobi, NamedMethod::TU, NamedMethod::SGS],
            spectral: SpectralConfig::default(),
        };
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(experiment_csv(&a), experiment_csv(&b));
        assert_eq!(trials_csv(&a), trials_csv(&b));
        // Nonnegative class: baseline radius is phi with zero spread.
        let jacobi = &a.stats[0];
        assert!((jacobi.mean_rho - 0.9).abs() < 1e-10);
        assert!(jacobi.sd_rho < 1e-10);
        // Refined methods are strictly faster here.
        assert!(a.stats[1].mean_rho < 0.9);
        assert!(a.stats[2].mean_rho < a.stats[1].mean_rho);
        assert!(a.stats[2].mean_speedup.unwrap() > a.stats[1].mean_speedup.unwrap());
    }

    #[test]
    fn phi_sweep_csv_is_deterministic_and_flags_divergence() {
        let cfg = PhiSweepConfig {
            n: 10,
            seed: 9,
            start: 0.5,
            step: 1.0,
            stop: 2.5,
            methods: vec![NamedMethod::Jacobi, NamedMethod::SGS],
            spectral: SpectralConfig::default(),
        };
        let rows = run_phi_sweep(&cfg).unwrap();
        let a = phi_sweep_csv(&cfg, &rows);
        let b = phi_sweep_csv(&cfg, &run_phi_sweep(&cfg).unwrap());
        assert_eq!(a, b);
        assert!(a.lines().next().unwrap().starts_with("# splitkit phi sweep"));
        // The baseline radius is phi, so the flag flips past phi = 1.
        let last = rows.last().unwrap();
        assert!(last.rho[0].1, "baseline at phi=2.5 must be flagged");
        let first = rows.first().unwrap();
        assert!(!first.rho[0].1);
    }

    #[test]
    fn phi_sweep_baseline_tracks_phi() {
        let cfg = PhiSweepConfig {
            n: 12,
            seed: 3,
            start: 0.5,
            step: 0.5,
            stop: 2.0,
            methods: vec![NamedMethod::Jacobi, NamedMethod::FGS],
            spectral: SpectralConfig::default(),
        };
        let rows = run_phi_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 4);
        for row in &rows {
            assert!(
                (row.rho[0].0 - row.phi).abs() < 1e-8,
                "baseline rho {} != phi {}",
                row.rho[0].0,
                row.phi
            );
        }
    }

    #[test]
    fn reference_tables_parse() {
        for class in [
            MatrixClass::Class1,
            MatrixClass::Class2,
            MatrixClass::Class3,
        ] {
            let rows = reference_table(class);
            assert_eq!(rows.len(), 11);
            assert_eq!(rows[0].method, NamedMethod::Jacobi);
            assert!(rows[0].mean_speedup.is_none());
        }
        let b = bspline_reference();
        assert_eq!(b.len(), 6);
        assert!((b[0].1 - 1.2464).abs() < 1e-12);
    }
}
