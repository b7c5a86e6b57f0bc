//! Command-line front end: load problem and certificate documents, run the
//! solver, dual methods, condition checks, and certificate verifiers, and
//! print human-readable reports or CSV traces.
//!
//! Exit codes: 0 on success, 1 when a requested verification reports a
//! false verdict, 2 on input errors, 3 on solver failures.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use haardual::certificates::{
    check_kkt, verify_farkas, verify_optimality, FeasParams, OptimalityCertificate,
};
use haardual::conditions::condition_report;
use haardual::duals::{
    dual_method, duality_report, finite_subproblem, sampled_indices, sup_dual_prefix, DualParams,
    DUAL_METHODS,
};
use haardual::io::{parse_certificate, parse_problem_file, ProblemFile};
use haardual::lp::{format_significant, solve_lp};
use haardual::oracle::dense_grid_value;
use haardual::{ConstraintGenerator, Error, IndexFamily, IndexValue, LPOutcome, LinearSIP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FALSE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

const SOLVE_CAVEAT: &str =
    "caveat: computed on the finite index sample above; sampling drops constraints, so the \
     sampled value is a lower bound for the full problem.";
const DUAL_CAVEAT: &str =
    "caveat: the family is restricted to the finite index sample above; the supremum over the \
     full family can only be larger.";
const CHECK_CAVEAT: &str =
    "caveat: every verdict above is relative to the finite index sample; it is evidence about \
     the full index set, not proof.";

#[derive(Parser)]
#[command(
    name = "haardual",
    version,
    about = "Dual bounds, certificates, and reverse-duality checks for linear semi-infinite programs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the primal restricted to a finite sample of the index set.
    Solve {
        /// Problem document.
        file: PathBuf,
        /// Grid size for interval index sets.
        #[arg(long, default_value_t = 1001)]
        grid: usize,
        /// Number of leading indices for countable index sets.
        #[arg(long, default_value_t = 50)]
        max_m: usize,
        /// Simplex pivot tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Supremum of the relaxed dual over one index family.
    Dual {
        /// Problem document.
        file: PathBuf,
        /// Index family: h1 (singletons), hn (prefixes), full (all finite subsets).
        #[arg(long)]
        family: String,
        /// Grid size for interval index sets.
        #[arg(long, default_value_t = 1001)]
        grid: usize,
        /// Number of leading indices for countable index sets.
        #[arg(long, default_value_t = 50)]
        max_m: usize,
        /// Residual tolerance accepting one index as dual-feasible (h1 only).
        #[arg(long, default_value_t = 1e-8)]
        eps_par: f64,
        /// Refine between grid points (h1 on interval index sets).
        #[arg(long)]
        refine: bool,
        /// Simplex pivot tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// CSV of primal and dual values of every prefix truncation.
    Trace {
        /// Problem document (countable or explicit index set).
        file: PathBuf,
        /// Longest prefix to trace.
        #[arg(long, default_value_t = 50)]
        max_m: usize,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Simplex pivot tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Reverse-duality condition report for one index family.
    Check {
        /// Problem document.
        file: PathBuf,
        /// Grid size for interval index sets.
        #[arg(long, default_value_t = 1001)]
        grid: usize,
        /// Number of leading indices for countable index sets.
        #[arg(long, default_value_t = 50)]
        max_m: usize,
        /// Family whose guarantee is requested: h1, hn, or full.
        #[arg(long, default_value = "full")]
        family: String,
        /// Simplex pivot tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Verify a certificate document against a problem.
    Verify {
        /// Problem document.
        file: PathBuf,
        /// Certificate document.
        #[arg(long)]
        cert: PathBuf,
        /// Verify this lower bound instead of the document's own alpha.
        #[arg(long)]
        alpha: Option<f64>,
        /// Grid size for the feasibility scan on interval index sets.
        #[arg(long, default_value_t = 1001)]
        grid: usize,
        /// Residual tolerance for all certificate checks.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Brute-force grid value of an interval problem.
    Oracle {
        /// Problem document (interval index set).
        file: PathBuf,
        /// Grid size.
        #[arg(long, default_value_t = 1001)]
        grid: usize,
    },
}

/// Parse `argv`, run the command, and write its report to `out`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_INPUT
                }
            };
        }
    };
    match dispatch(&cli.cmd) {
        Ok((report, code)) => {
            if out.write_all(report.as_bytes()).is_err() {
                return EXIT_INPUT;
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            match e {
                Error::SolverFailure(_) => EXIT_SOLVER,
                _ => EXIT_INPUT,
            }
        }
    }
}

fn dispatch(cmd: &Cmd) -> Result<(String, i32), Error> {
    match cmd {
        Cmd::Solve { file, grid, max_m, tol } => cmd_solve(file, *grid, *max_m, *tol),
        Cmd::Dual { file, family, grid, max_m, eps_par, refine, tol } => {
            cmd_dual(file, family, *grid, *max_m, *eps_par, *refine, *tol)
        }
        Cmd::Trace { file, max_m, out, tol } => cmd_trace(file, *max_m, out.as_deref(), *tol),
        Cmd::Check { file, grid, max_m, family, tol } => {
            cmd_check(file, *grid, *max_m, family, *tol)
        }
        Cmd::Verify { file, cert, alpha, grid, tol } => {
            cmd_verify(file, cert, *alpha, *grid, *tol)
        }
        Cmd::Oracle { file, grid } => cmd_oracle(file, *grid),
    }
}

fn fmt12(x: f64) -> String {
    format_significant(x, 12)
}

fn fmt_index(idx: &IndexValue) -> String {
    match idx {
        IndexValue::Real(t) => fmt12(*t),
        IndexValue::Natural(k) => k.to_string(),
        IndexValue::Position(i) => format!("#{}", i),
    }
}

fn fmt_point(x: &[f64]) -> String {
    x.iter().map(|&v| fmt12(v)).collect::<Vec<_>>().join(" ")
}

fn yn(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn read_to_string(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("{}: {}", path.display(), e)))
}

fn load_problem(path: &Path) -> Result<(ProblemFile, LinearSIP), Error> {
    let doc = parse_problem_file(&read_to_string(path)?)?;
    let p = doc.to_sip()?;
    Ok((doc, p))
}

fn push_header(s: &mut String, path: &Path, doc: &ProblemFile) {
    let _ = writeln!(s, "problem: {}", path.display());
    if let Some(name) = &doc.name {
        let _ = writeln!(s, "name: {}", name);
    }
    if let Some(notes) = &doc.notes {
        let _ = writeln!(s, "notes: {}", notes);
    }
}

fn describe_sample(p: &LinearSIP, size: usize) -> String {
    match &p.generator {
        ConstraintGenerator::IntervalPoly { lo, hi, .. } => {
            format!("{} grid points on [{}, {}]", size, fmt12(*lo), fmt12(*hi))
        }
        ConstraintGenerator::CountablePoly { .. } => format!("first {} natural indices", size),
        ConstraintGenerator::ExplicitFinite { .. } => format!("all {} explicit rows", size),
    }
}

fn family_for(name: &str) -> Result<IndexFamily, Error> {
    match name {
        "h1" => Ok(IndexFamily::Singletons),
        "hn" => Ok(IndexFamily::Prefixes),
        "full" => Ok(IndexFamily::AllFinite),
        other => Err(Error::InvalidArgument(format!(
            "unknown family '{}'; expected h1, hn, or full",
            other
        ))),
    }
}

fn cmd_solve(path: &Path, grid: usize, max_m: usize, tol: f64) -> Result<(String, i32), Error> {
    let (doc, p) = load_problem(path)?;
    let sample = sampled_indices(&p.generator, grid, max_m)?;
    let lp = finite_subproblem(&p, &sample)?;
    let mut s = String::new();
    push_header(&mut s, path, &doc);
    let _ = writeln!(s, "sample: {}", describe_sample(&p, sample.len()));
    match solve_lp(&lp, tol)? {
        LPOutcome::Optimal { x, value, .. } => {
            let _ = writeln!(s, "status: optimal");
            let _ = writeln!(s, "value: {}", fmt12(value));
            let _ = writeln!(s, "point: {}", fmt_point(&x));
        }
        LPOutcome::Unbounded => {
            let _ = writeln!(s, "status: unbounded");
            let _ = writeln!(s, "value: -inf");
        }
        LPOutcome::Infeasible => {
            let _ = writeln!(s, "status: infeasible");
            let _ = writeln!(s, "value: inf");
        }
    }
    let _ = writeln!(s, "{}", SOLVE_CAVEAT);
    Ok((s, EXIT_OK))
}

fn cmd_dual(
    path: &Path,
    family: &str,
    grid: usize,
    max_m: usize,
    eps_par: f64,
    refine: bool,
    tol: f64,
) -> Result<(String, i32), Error> {
    let method = dual_method(family).ok_or_else(|| {
        let names: Vec<&str> = DUAL_METHODS.iter().map(|m| m.name()).collect();
        Error::InvalidArgument(format!(
            "unknown family '{}'; expected one of: {}",
            family,
            names.join(", ")
        ))
    })?;
    let (doc, p) = load_problem(path)?;
    let params = DualParams { grid, max_m, eps_par, refine, tol };
    let solve = method.solve(&p, &params)?;

    let mut s = String::new();
    push_header(&mut s, path, &doc);
    let _ = writeln!(s, "family: {} ({})", method.family().describe(), method.describe());
    let _ = writeln!(s, "value: {}", solve.value);
    if let Some(idx) = &solve.best_index {
        let _ = writeln!(s, "best index: {}", fmt_index(idx));
    }
    if let Some(cert) = &solve.certificate {
        if cert.support.is_empty() {
            let _ = writeln!(s, "support: empty (the zero multiplier attains the value)");
        } else {
            let _ = writeln!(s, "support:");
            for (idx, l) in &cert.support {
                let _ = writeln!(s, "  index {} lambda {}", fmt_index(idx), fmt12(*l));
            }
        }
    }
    if let Some(last) = solve.trace.last() {
        let _ = writeln!(
            s,
            "prefix steps: {} (final primal {}, final dual {})",
            solve.trace.len(),
            last.primal,
            last.dual
        );
    }
    let _ = writeln!(s, "{}", DUAL_CAVEAT);
    Ok((s, EXIT_OK))
}

fn cmd_trace(
    path: &Path,
    max_m: usize,
    out_path: Option<&Path>,
    tol: f64,
) -> Result<(String, i32), Error> {
    let (_, p) = load_problem(path)?;
    let trace = sup_dual_prefix(&p, max_m, tol)?;
    let mut csv = String::from("m,primal,dual\n");
    for tp in &trace {
        let _ = writeln!(csv, "{},{},{}", tp.m, tp.primal, tp.dual);
    }
    match out_path {
        Some(dest) => {
            std::fs::write(dest, &csv)
                .map_err(|e| Error::InvalidArgument(format!("{}: {}", dest.display(), e)))?;
            Ok((format!("wrote {} rows to {}\n", trace.len(), dest.display()), EXIT_OK))
        }
        None => Ok((csv, EXIT_OK)),
    }
}

fn cmd_check(
    path: &Path,
    grid: usize,
    max_m: usize,
    family_name: &str,
    tol: f64,
) -> Result<(String, i32), Error> {
    let family = family_for(family_name)?;
    let (doc, p) = load_problem(path)?;
    let sample = sampled_indices(&p.generator, grid, max_m)?;
    let report = condition_report(&p, &sample, &family)?;

    let mut s = String::new();
    push_header(&mut s, path, &doc);
    let _ = writeln!(s, "sample: {}", describe_sample(&p, report.sample_size));
    let _ = writeln!(s, "strictly feasible point exists: {}", yn(report.slater));
    if let Some(w) = &report.slater_witness {
        let _ = writeln!(s, "  witness: {}", fmt_point(w));
    }
    let _ = writeln!(s, "recession cone is a subspace: {}", yn(report.recession_subspace));
    let _ = writeln!(
        s,
        "reflected recession cone stays inside the cone: {}",
        yn(report.reflection_subspace)
    );
    let _ = writeln!(
        s,
        "lifted generator cone is pointed with one half-line: {}",
        yn(report.pointed_halfline)
    );
    let _ = writeln!(s, "  that half-line is the vertical ray: {}", yn(report.vertical_ray));
    let _ = writeln!(
        s,
        "objective positive on nonzero recession directions in the data span: {}",
        yn(report.objective_on_recession)
    );
    let _ = writeln!(s, "constraints concave in the index: {}", yn(report.concave_in_index));
    let _ = writeln!(s, "family guarantees on this sample:");
    let _ = writeln!(s, "  singletons: {}", yn(report.singleton_family_ok));
    let _ = writeln!(s, "  prefixes: {}", yn(report.prefix_family_ok));
    let _ = writeln!(s, "  all finite subsets: {}", yn(report.all_finite_family_ok));
    let _ = writeln!(
        s,
        "requested family: {} -> {}",
        report.requested_family,
        yn(report.requested_family_ok)
    );

    let params = DualParams { grid, max_m, tol, ..DualParams::default() };
    let duality = duality_report(&p, &family, &params)?;
    let _ = writeln!(s, "sampled primal: {}", duality.primal);
    let _ = writeln!(s, "sampled dual ({}): {}", duality.family, duality.dual);
    match duality.gap {
        Some(g) => {
            let closed = if duality.gap_closed { " (closed)" } else { "" };
            let _ = writeln!(s, "gap: {}{}", g, closed);
        }
        None => {
            let _ = writeln!(
                s,
                "gap: indeterminate (both sides diverge; deliberately not reported as zero)"
            );
        }
    }
    let _ = writeln!(s, "{}", CHECK_CAVEAT);
    let code = if report.requested_family_ok { EXIT_OK } else { EXIT_VERIFICATION_FALSE };
    Ok((s, code))
}

fn cmd_verify(
    path: &Path,
    cert_path: &Path,
    alpha_flag: Option<f64>,
    grid: usize,
    tol: f64,
) -> Result<(String, i32), Error> {
    let (doc, p) = load_problem(path)?;
    let parsed = parse_certificate(&read_to_string(cert_path)?, &p)?;

    let mut s = String::new();
    push_header(&mut s, path, &doc);
    let _ = writeln!(s, "certificate: {}", cert_path.display());
    if let Some(notes) = &parsed.notes {
        let _ = writeln!(s, "notes: {}", notes);
    }
    let _ = writeln!(s, "support:");
    for (idx, l) in &parsed.cert.support {
        let _ = writeln!(s, "  index {} lambda {}", fmt_index(idx), fmt12(*l));
    }

    let mut bound = 0.0;
    for (idx, l) in &parsed.cert.support {
        let (_, b) = p.eval_constraint(idx)?;
        bound -= l * b;
    }
    let _ = writeln!(s, "certified bound: {}", fmt12(bound));

    let mut all_ok = true;
    let mut checked = false;

    if let Some(alpha) = alpha_flag.or(parsed.alpha) {
        checked = true;
        let ok = verify_farkas(&p, &parsed.cert, alpha, tol)?;
        all_ok &= ok;
        let _ = writeln!(s, "lower bound {} certified: {}", fmt12(alpha), yn(ok));
    }

    if let Some(point) = &parsed.point {
        checked = true;
        let feas = FeasParams { grid, refine: true };
        let oc = OptimalityCertificate { x_bar: point.clone(), cert: parsed.cert.clone() };
        let agg = verify_optimality(&p, &oc, tol, &feas)?;
        let kkt = check_kkt(&p, &oc, tol, &feas)?;
        all_ok &= agg.passed() && kkt.passed();
        let _ = writeln!(s, "optimality at point {}:", fmt_point(point));
        let _ = writeln!(
            s,
            "  stationarity: {} (residual {})",
            yn(agg.stationarity_ok),
            fmt12(agg.stationarity_residual)
        );
        let _ = writeln!(
            s,
            "  complementarity: {} (residual {})",
            yn(agg.complementarity_ok),
            fmt12(agg.complementarity_residual)
        );
        let _ = writeln!(
            s,
            "  per-multiplier slackness: {} (residual {})",
            yn(kkt.complementarity_ok),
            fmt12(kkt.complementarity_residual)
        );
        let _ = writeln!(
            s,
            "  feasibility: {} (margin {} at index {})",
            yn(agg.feasibility_ok),
            fmt12(agg.feasibility_margin),
            fmt_index(&agg.worst_index)
        );
    }

    if !checked {
        // Nothing else to hold the certificate against: confirm that the
        // multipliers are dual-feasible for the bound they themselves attain.
        let ok = verify_farkas(&p, &parsed.cert, bound, tol)?;
        all_ok &= ok;
        let _ = writeln!(s, "multipliers dual-feasible for that bound: {}", yn(ok));
    }

    let _ = writeln!(s, "verdict: {}", if all_ok { "pass" } else { "fail" });
    Ok((s, if all_ok { EXIT_OK } else { EXIT_VERIFICATION_FALSE }))
}

fn cmd_oracle(path: &Path, grid: usize) -> Result<(String, i32), Error> {
    let (doc, p) = load_problem(path)?;
    let value = dense_grid_value(&p, grid)?;
    let mut s = String::new();
    push_header(&mut s, path, &doc);
    let _ = writeln!(s, "grid: {} points", grid);
    let _ = writeln!(s, "value: {}", value);
    let _ = writeln!(s, "{}", SOLVE_CAVEAT);
    Ok((s, EXIT_OK))
}
