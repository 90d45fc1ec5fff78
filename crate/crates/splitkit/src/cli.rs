//! Command-line interface: gen / solve / spectra / order / bench /
//! reproduce over the library.
//!
//! Machine output (CSV/JSON, key=value result lines) goes to stdout; the
//! resolved configuration and any logs go to stderr, so the two streams
//! never interleave. Exit codes: 0 success, 1 usage or input error, 2
//! numerical failure (divergence, non-convergence, failed reproduction).

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::bench::{self, bench_spectral_config, experiment_csv, trials_csv, ExperimentConfig};
use crate::catalog::{DecompositionOfIdentity, NamedMethod};
use crate::engine::{solve, Method, SolveConfig, SolveMode};
use crate::error::{Error, Result};
use crate::genmat::{bspline_matrix, generate, GeneratorConfig, MatrixClass};
use crate::linalg::{self, normalize, LinearSystem, Vector};
use crate::splitting::{
    is_essential, is_maximal, is_potentially_optimal, read_splitting_file, refinement_step,
    refinement_via_telescoping, ProductTolerance, Splitting,
};

#[derive(Parser, Debug)]
#[command(
    name = "splitkit",
    version,
    about = "Stationary iterative solvers from ordered matrix splittings",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a test matrix (and right-hand side) to the text format.
    Gen(GenArgs),
    /// Solve Ax = b with a chosen method.
    Solve(SolveArgs),
    /// Spectral radii of method iteration operators on a matrix.
    Spectra(SpectraArgs),
    /// Refinement-order and optimality verdicts for splittings.
    Order(OrderArgs),
    /// N-trial spectral-radius experiment over a random matrix class.
    Bench(BenchArgs),
    /// Re-run a bundled reference experiment and diff against its table.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Matrix family: 1, 2, 3 or bspline.
    #[arg(long)]
    class: String,
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Dominance parameter (ignored for bspline).
    #[arg(long, default_value_t = 0.9)]
    phi: f64,
    /// Stream seed (ignored for bspline).
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Matrix output path.
    #[arg(long)]
    out: PathBuf,
    /// Right-hand-side output path (defaults to OUT with a .rhs suffix).
    #[arg(long)]
    rhs_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    rhs: PathBuf,
    /// Method name (case-insensitive) or a splitting description file.
    #[arg(long)]
    method: String,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    /// general | two-step | modified-sgs
    #[arg(long, default_value = "general")]
    mode: String,
    /// Solution output path.
    #[arg(long, default_value = "solution.txt")]
    out: PathBuf,
    /// Row-block count for the AMKS method (default: one row per block).
    #[arg(long)]
    amks_blocks: Option<usize>,
}

#[derive(Args, Debug)]
struct SpectraArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// Comma-separated method names, or `all` for the full table set.
    #[arg(long)]
    method: String,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// csv | json
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args, Debug)]
struct OrderArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// Method name or splitting description file.
    #[arg(long)]
    a: String,
    /// Optional second method/splitting to compare against.
    #[arg(long)]
    b: Option<String>,
    /// exact | scaled: threshold for "product is nonzero" tests.
    #[arg(long, default_value = "exact")]
    product_tol: String,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Matrix family: 1, 2 or 3.
    #[arg(long)]
    class: String,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 0.9)]
    phi: f64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// `all` (the table set) or a comma-separated list of names.
    #[arg(long, default_value = "all")]
    methods: String,
    /// Report output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional per-trial raw-value CSV path.
    #[arg(long)]
    per_trial: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    /// class1-phi09 | class2-phi09 | class3-phi09 | bspline | phi-sweep
    target: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
}

/// Entry point shared by the binary and the CLI tests.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are successes; anything else is usage.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Spectra(a) => cmd_spectra(a),
        Command::Order(a) => cmd_order(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Reproduce(a) => cmd_reproduce(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Diverged { .. } | Error::EigenFailure => 2,
                _ => 1,
            }
        }
    }
}

fn cmd_gen(a: GenArgs) -> Result<i32> {
    eprintln!(
        "# gen class={} n={} phi={} seed={} out={}",
        a.class,
        a.n,
        a.phi,
        a.seed,
        a.out.display()
    );
    let sys = if a.class.eq_ignore_ascii_case("bspline") {
        bspline_matrix(a.n)?
    } else {
        generate(&GeneratorConfig {
            n: a.n,
            phi: a.phi,
            seed: a.seed,
            class: MatrixClass::from_str(&a.class)?,
        })?
    };
    linalg::write_matrix(&a.out, sys.a())?;
    let rhs_path = a.rhs_out.unwrap_or_else(|| {
        let mut p = a.out.clone();
        p.set_extension("rhs");
        p
    });
    linalg::write_vector(&rhs_path, sys.b())?;
    println!("matrix={} rhs={}", a.out.display(), rhs_path.display());
    Ok(0)
}

fn parse_mode(s: &str) -> Result<SolveMode> {
    match s.to_ascii_lowercase().as_str() {
        "general" | "general-scheme" => Ok(SolveMode::GeneralScheme),
        "two-step" => Ok(SolveMode::TwoStep),
        "modified-sgs" => Ok(SolveMode::ModifiedSgs),
        other => Err(Error::InvalidConfig(format!("unknown mode: {other}"))),
    }
}

/// A method argument is either a cataloged name or a path to a splitting
/// description file.
enum MethodArg {
    Named(NamedMethod),
    File(Splitting),
}

fn parse_method_arg(text: &str, sys_matrix: &crate::linalg::Matrix) -> Result<MethodArg> {
    if let Ok(name) = NamedMethod::from_str(text) {
        return Ok(MethodArg::Named(name));
    }
    let path = PathBuf::from(text);
    if path.exists() {
        let file = read_splitting_file(&path)?;
        let sys = LinearSystem::new(sys_matrix.clone(), Vector::zeros(sys_matrix.rows()))?;
        let ns = normalize(&sys)?;
        return Ok(MethodArg::File(file.apply(&ns.jacobi_matrix())?));
    }
    Err(Error::UnknownMethod(text.to_string()))
}

fn cmd_solve(a: SolveArgs) -> Result<i32> {
    eprintln!(
        "# solve matrix={} rhs={} method={} tol={} max-iters={} mode={} out={}",
        a.matrix.display(),
        a.rhs.display(),
        a.method,
        a.tol,
        a.max_iters,
        a.mode,
        a.out.display()
    );
    let m = linalg::read_matrix(&a.matrix)?;
    let b = linalg::read_vector(&a.rhs)?;
    let sys = LinearSystem::new(m, b)?;
    let cfg = SolveConfig::new(a.tol, a.max_iters, parse_mode(&a.mode)?)?;
    let method = match parse_method_arg(&a.method, sys.a())? {
        MethodArg::Named(NamedMethod::Amks) => {
            let ns = normalize(&sys)?;
            let doi = match a.amks_blocks {
                Some(k) => DecompositionOfIdentity::contiguous_blocks(ns.n(), k)?,
                None => DecompositionOfIdentity::per_row(ns.n()),
            };
            let report = crate::engine::solve_amks(&sys, &ns, &doi, &cfg)?;
            return finish_solve(&a.out, report);
        }
        MethodArg::Named(name) => Method::Named(name),
        MethodArg::File(splitting) => Method::Splitting(splitting),
    };
    let report = solve(&sys, &method, &cfg)?;
    finish_solve(&a.out, report)
}

fn finish_solve(out: &PathBuf, report: crate::engine::SolveReport) -> Result<i32> {
    linalg::write_vector(out, &report.solution)?;
    println!(
        "converged={} iterations={} residual={:.6e} solution={}",
        report.converged,
        report.iterations,
        report.final_residual,
        out.display()
    );
    Ok(if report.converged { 0 } else { 2 })
}

fn parse_method_list(text: &str) -> Result<Vec<NamedMethod>> {
    if text.eq_ignore_ascii_case("all") {
        return Ok(NamedMethod::TABLE.to_vec());
    }
    text.split(',')
        .map(|t| NamedMethod::from_str(t.trim()))
        .collect()
}

#[derive(serde::Serialize)]
struct SpectraRow {
    method: NamedMethod,
    rho: f64,
    backend: crate::spectral::SpectralBackend,
    iters: usize,
    converged: bool,
}

fn cmd_spectra(a: SpectraArgs) -> Result<i32> {
    eprintln!(
        "# spectra matrix={} method={} tol={} format={}",
        a.matrix.display(),
        a.method,
        a.tol,
        a.format
    );
    let m = linalg::read_matrix(&a.matrix)?;
    let n = m.rows();
    let sys = LinearSystem::new(m, Vector::zeros(n))?;
    let ns = normalize(&sys)?;
    let methods = parse_method_list(&a.method)?;
    let spectral = crate::spectral::SpectralConfig {
        tol: a.tol,
        ..bench_spectral_config()
    };
    let mut rows = Vec::with_capacity(methods.len());
    for name in methods {
        let rep = bench::method_spectral_radius(&ns, name, &spectral)?;
        rows.push(SpectraRow {
            method: name,
            rho: rep.rho,
            backend: rep.method,
            iters: rep.iterations,
            converged: rep.converged,
        });
    }
    match a.format.to_ascii_lowercase().as_str() {
        "csv" => {
            println!("method,rho,backend,iters,converged");
            for r in &rows {
                println!(
                    "{},{:.10e},{},{},{}",
                    r.method, r.rho, r.backend, r.iters, r.converged
                );
            }
        }
        "json" => {
            println!(
                "{}",
                serde_json::to_string_pretty(&rows)
                    .map_err(|e| Error::InvalidConfig(e.to_string()))?
            );
        }
        other => {
            return Err(Error::InvalidConfig(format!("unknown format: {other}")));
        }
    }
    Ok(0)
}

fn cmd_order(a: OrderArgs) -> Result<i32> {
    eprintln!(
        "# order matrix={} a={} b={:?} product-tol={}",
        a.matrix.display(),
        a.a,
        a.b,
        a.product_tol
    );
    let m = linalg::read_matrix(&a.matrix)?;
    let tol = match a.product_tol.to_ascii_lowercase().as_str() {
        "exact" => ProductTolerance::Exact,
        "scaled" => ProductTolerance::scaled(),
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown product tolerance: {other}"
            )))
        }
    };
    let sys = LinearSystem::new(m.clone(), Vector::zeros(m.rows()))?;
    let ns = normalize(&sys)?;
    let build_arg = |text: &str| -> Result<(String, Splitting)> {
        match parse_method_arg(text, &m)? {
            MethodArg::Named(name) => Ok((name.to_string(), crate::catalog::build(name, &ns)?)),
            MethodArg::File(s) => Ok((text.to_string(), s)),
        }
    };
    let (name_a, split_a) = build_arg(&a.a)?;
    let properties = |name: &str, s: &Splitting| {
        println!(
            "{name}: order={} essential={} maximal={} potentially_optimal={}",
            s.order(),
            is_essential(s, tol),
            is_maximal(s),
            is_potentially_optimal(s, tol)
        );
    };
    match &a.b {
        None => {
            properties(&name_a, &split_a);
            Ok(0)
        }
        Some(btext) => {
            let (name_b, split_b) = build_arg(btext)?;
            let verdict = order_verdict(&name_a, &split_a, &name_b, &split_b, tol)?;
            println!("{verdict}");
            properties(&name_a, &split_a);
            properties(&name_b, &split_b);
            Ok(0)
        }
    }
}

fn order_verdict(
    name_a: &str,
    a: &Splitting,
    name_b: &str,
    b: &Splitting,
    tol: ProductTolerance,
) -> Result<String> {
    if !a.same_source(b) {
        return Err(Error::SourceMismatch);
    }
    if a.order() == b.order() {
        return Ok(format!(
            "{name_a} and {name_b} are not comparable (equal order; the order is irreflexive)"
        ));
    }
    let (fine_name, fine, coarse_name, coarse) = if a.order() > b.order() {
        (name_a, a, name_b, b)
    } else {
        (name_b, b, name_a, a)
    };
    if fine.order() == coarse.order() + 1 {
        return Ok(match refinement_step(fine, coarse, tol)? {
            Some(w) => format!(
                "{fine_name} > {coarse_name} (witness r={}, s={}, split part index {})",
                w.coarse_shift, w.fine_shift, w.split_index
            ),
            None => {
                format!("{fine_name} and {coarse_name} are not comparable (no one-step witness)")
            }
        });
    }
    Ok(match refinement_via_telescoping(fine, coarse, tol)? {
        Some(chain) => format!(
            "{fine_name} > {coarse_name} (telescoping chain through {} intermediate order(s))",
            chain.len()
        ),
        None => {
            format!("{fine_name} and {coarse_name} are not comparable (no telescoping chain found)")
        }
    })
}

fn cmd_bench(a: BenchArgs) -> Result<i32> {
    eprintln!(
        "# bench class={} n={} phi={} trials={} seed={} methods={} threads={}",
        a.class,
        a.n,
        a.phi,
        a.trials,
        a.seed,
        a.methods,
        bench::thread_count()
    );
    let cfg = ExperimentConfig {
        class: MatrixClass::from_str(&a.class)?,
        n: a.n,
        phi: a.phi,
        trials: a.trials,
        seed: a.seed,
        methods: parse_method_list(&a.methods)?,
        spectral: bench_spectral_config(),
    };
    let report = bench::run_experiment(&cfg)?;
    let csv = experiment_csv(&report);
    match &a.out {
        Some(path) => {
            std::fs::write(path, &csv)?;
            println!("report={}", path.display());
        }
        None => print!("{csv}"),
    }
    if let Some(path) = &a.per_trial {
        std::fs::write(path, trials_csv(&report))?;
        eprintln!("# per-trial values written to {}", path.display());
    }
    Ok(0)
}

fn cmd_reproduce(a: ReproduceArgs) -> Result<i32> {
    eprintln!(
        "# reproduce target={} seed={} trials={}",
        a.target, a.seed, a.trials
    );
    let outcome = match a.target.to_ascii_lowercase().as_str() {
        "class1-phi09" => bench::reproduce_class_table(MatrixClass::Class1, a.seed, a.trials)?,
        "class2-phi09" => bench::reproduce_class_table(MatrixClass::Class2, a.seed, a.trials)?,
        "class3-phi09" => bench::reproduce_class_table(MatrixClass::Class3, a.seed, a.trials)?,
        "bspline" => bench::reproduce_bspline()?,
        "phi-sweep" => bench::reproduce_phi_sweep(a.seed)?,
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown reproduce target: {other} (expected class1-phi09, class2-phi09, class3-phi09, bspline, phi-sweep)"
            )))
        }
    };
    for line in &outcome.lines {
        let status = if line.ok { "PASS" } else { "FAIL" };
        if line.want.is_nan() {
            println!("{status} {} (value {:.6e})", line.label, line.got);
        } else {
            println!(
                "{status} {}: got {:.6e}, reference {:.6e}, band {:.1e}{}",
                status_pad(&line.label),
                line.got,
                line.want,
                line.band,
                if line.floored { " (floored)" } else { "" }
            );
        }
    }
    println!(
        "{}: {}",
        outcome.target,
        if outcome.passed { "PASS" } else { "FAIL" }
    );
    Ok(if outcome.passed { 0 } else { 2 })
}

fn status_pad(label: &str) -> String {
    format!("{label:<28}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_lists_parse() {
        assert_eq!(parse_method_list("all").unwrap().len(), 11);
        let l = parse_method_list("jacobi, tu,AFTC_L").unwrap();
        assert_eq!(
            l,
            vec![NamedMethod::Jacobi, NamedMethod::TU, NamedMethod::AftcL]
        );
        assert!(parse_method_list("nope").is_err());
    }

    #[test]
    fn modes_parse() {
        assert_eq!(parse_mode("general").unwrap(), SolveMode::GeneralScheme);
        assert_eq!(parse_mode("two-step").unwrap(), SolveMode::TwoStep);
        assert_eq!(parse_mode("modified-sgs").unwrap(), SolveMode::ModifiedSgs);
        assert!(parse_mode("??").is_err());
    }
}
