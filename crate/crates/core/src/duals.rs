//! Relaxed dual values over families of finite index subsets.
//!
//! For one finite subset `H` the dual value is the LP
//! `max -b'l` over `l >= 0` with `sum_t l_t a_t = -c`, and `-inf` when no
//! such multiplier vector exists. A family of subsets is aggregated by the
//! supremum over its members: singletons by a parametric scan of the index
//! sample, prefixes by walking truncations in index order, all finite
//! subsets by a single dual LP over the whole sample.

use crate::lp::{solve_dual_lp, solve_lp, DenseLP, ExtendedReal, LPOutcome, SOLVER_TOL};
use crate::model::{
    sample_interval, ConstraintGenerator, IndexFamily, IndexValue, LinearSIP,
};
use crate::Error;
use serde::{Deserialize, Serialize};

/// Multipliers at or below this are dropped from certificate supports.
const SUPPORT_TOL: f64 = 1e-12;
/// Width to which a residual bracket is narrowed during refinement.
const REFINE_WIDTH: f64 = 1e-10;
/// A finite duality gap at or below this magnitude counts as closed.
const GAP_TOL: f64 = 1e-6;

/// Finitely supported nonnegative multipliers: the data of a dual solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualCertificate {
    pub support: Vec<(IndexValue, f64)>,
}

/// One prefix step: values of the `m`-row truncation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub m: usize,
    /// `inf` of the truncated primal (`-inf` unbounded, `inf` infeasible).
    pub primal: ExtendedReal,
    /// `sup` of the truncated dual (`-inf` when no multiplier matches).
    pub dual: ExtendedReal,
}

/// Sampling and tolerance knobs shared by the dual methods.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualParams {
    /// Grid size used to sample interval index sets.
    pub grid: usize,
    /// Largest prefix length for countable index sets.
    pub max_m: usize,
    /// Residual tolerance accepting a single index as dual-feasible.
    pub eps_par: f64,
    /// Refine residual minima between grid points (interval generators).
    pub refine: bool,
    /// Simplex pivot/feasibility tolerance.
    pub tol: f64,
}

impl Default for DualParams {
    fn default() -> Self {
        DualParams {
            grid: 1001,
            max_m: 50,
            eps_par: 1e-8,
            refine: false,
            tol: SOLVER_TOL,
        }
    }
}

/// Outcome of one dual method: the family's supremum and its witnesses.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualSolve {
    pub value: ExtendedReal,
    /// Multipliers attaining the value, when it is finite.
    pub certificate: Option<DualCertificate>,
    /// Best single index (singleton method only).
    pub best_index: Option<IndexValue>,
    /// Per-prefix values (prefix method only).
    pub trace: Vec<TracePoint>,
}

/// The finite index sample a family is evaluated over: grid points for an
/// interval, `{1, ..., max_m}` for a countable set, every row position for
/// an explicit one.
pub fn sampled_indices(
    gen: &ConstraintGenerator,
    grid: usize,
    max_m: usize,
) -> Result<Vec<IndexValue>, Error> {
    match gen {
        ConstraintGenerator::ExplicitFinite { rows, .. } => {
            Ok((0..rows.len()).map(IndexValue::Position).collect())
        }
        ConstraintGenerator::IntervalPoly { lo, hi, .. } => sample_interval(*lo, *hi, grid),
        ConstraintGenerator::CountablePoly { .. } => {
            if max_m == 0 {
                return Err(Error::InvalidArgument(
                    "need at least one countable index".into(),
                ));
            }
            Ok((1..=max_m as u64).map(IndexValue::Natural).collect())
        }
    }
}

/// The LP `min c'x` over the rows of `h`, in the order given.
pub fn finite_subproblem(p: &LinearSIP, h: &[IndexValue]) -> Result<DenseLP, Error> {
    if h.is_empty() {
        return Err(Error::InvalidArgument(
            "finite subproblem needs a non-empty index subset".into(),
        ));
    }
    let mut rows = Vec::with_capacity(h.len());
    let mut rhs = Vec::with_capacity(h.len());
    for idx in h {
        let (a, b) = p.eval_constraint(idx)?;
        rows.push(a);
        rhs.push(b);
    }
    DenseLP::new(p.c.clone(), rows, rhs)
}

/// Dual value of the fixed subset `h`, with a certificate when finite.
///
/// `-inf` means no nonnegative multiplier combines the rows of `h` into
/// `-c`; `inf` means the multiplier set is nonempty and the bound grows
/// without limit (the truncated primal is then infeasible).
pub fn finite_dual(
    p: &LinearSIP,
    h: &[IndexValue],
    tol: f64,
) -> Result<(ExtendedReal, Option<DualCertificate>), Error> {
    let lp = finite_subproblem(p, h)?;
    match solve_dual_lp(&lp, tol)? {
        LPOutcome::Infeasible => Ok((ExtendedReal::MinusInf, None)),
        LPOutcome::Unbounded => Ok((ExtendedReal::PlusInf, None)),
        LPOutcome::Optimal { x, value, .. } => {
            let support: Vec<(IndexValue, f64)> = h
                .iter()
                .zip(x.iter())
                .filter(|(_, &l)| l > SUPPORT_TOL)
                .map(|(idx, &l)| (*idx, l))
                .collect();
            Ok((
                ExtendedReal::Finite(value),
                Some(DualCertificate { support }),
            ))
        }
    }
}

struct SingletonProbe {
    lambda: f64,
    residual: f64,
    value: ExtendedReal,
}

/// Best single multiplier for one row: `lambda` minimizing
/// `|lambda a + c|` over `lambda >= 0`, the residual at that minimizer, and
/// the dual value `-lambda b` the row would contribute if accepted.
fn singleton_probe(c: &[f64], a: &[f64], b: f64) -> SingletonProbe {
    let norm2: f64 = a.iter().map(|&v| v * v).sum();
    if norm2 == 0.0 {
        // A zero row leaves the objective term untouched; any multiplier is
        // stationary, so the value is driven by the sign of b alone.
        let residual = c.iter().map(|&v| v * v).sum::<f64>().sqrt();
        let value = if b < 0.0 {
            ExtendedReal::PlusInf
        } else {
            ExtendedReal::Finite(0.0)
        };
        return SingletonProbe { lambda: 0.0, residual, value };
    }
    let dot: f64 = a.iter().zip(c.iter()).map(|(&ai, &ci)| ai * ci).sum();
    let lambda = (-dot / norm2).max(0.0);
    let residual = a
        .iter()
        .zip(c.iter())
        .map(|(&ai, &ci)| {
            let r = lambda * ai + ci;
            r * r
        })
        .sum::<f64>()
        .sqrt();
    SingletonProbe {
        lambda,
        residual,
        value: ExtendedReal::Finite(-lambda * b),
    }
}

/// Golden-section minimizer of `f` on `[lo, hi]`, narrowed to
/// [`REFINE_WIDTH`]. Assumes `f` is unimodal on the bracket.
fn golden_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > REFINE_WIDTH {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// Supremum of the dual over singleton supports `{t}`, scanned over `grid`.
///
/// A single index contributes only when some `lambda >= 0` turns its row
/// into `-c`; numerically, when the residual of the best `lambda` is at
/// most `eps_par`. With `refine` set (interval generators only), local
/// minima of the residual between grid points are sharpened by
/// golden-section search before the acceptance test, so parallel indices
/// off the grid are still found. Returns the value, a certificate, and the
/// index attaining the supremum.
pub fn sup_dual_h1(
    p: &LinearSIP,
    grid: &[IndexValue],
    eps_par: f64,
    refine: bool,
) -> Result<(ExtendedReal, Option<DualCertificate>, Option<IndexValue>), Error> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty index sample".into()));
    }
    let mut best: Option<(ExtendedReal, IndexValue, f64)> = None;
    let mut consider = |value: ExtendedReal, idx: IndexValue, lambda: f64| {
        if best.as_ref().map_or(true, |(bv, _, _)| value > *bv) {
            best = Some((value, idx, lambda));
        }
    };

    let mut residuals = Vec::with_capacity(grid.len());
    for idx in grid {
        let (a, b) = p.eval_constraint(idx)?;
        let probe = singleton_probe(&p.c, &a, b);
        residuals.push(probe.residual);
        if probe.residual <= eps_par {
            consider(probe.value, *idx, probe.lambda);
        }
    }

    if refine {
        if let ConstraintGenerator::IntervalPoly { lo, hi, a: a_polys, b: b_poly } = &p.generator {
            let residual_at = |t: f64| {
                let t = t.clamp(*lo, *hi);
                let row: Vec<f64> = a_polys.iter().map(|p| p.eval(t)).collect();
                singleton_probe(&p.c, &row, b_poly.eval(t)).residual
            };
            let last = grid.len() - 1;
            for i in 0..=last {
                let left_ok = i == 0 || residuals[i] <= residuals[i - 1];
                let right_ok = i == last || residuals[i] <= residuals[i + 1];
                if !(left_ok && right_ok) || residuals[i] == 0.0 {
                    continue;
                }
                let bracket_lo = grid[i.saturating_sub(1)].as_f64();
                let bracket_hi = grid[(i + 1).min(last)].as_f64();
                if bracket_hi - bracket_lo <= REFINE_WIDTH {
                    continue;
                }
                let t = golden_min(residual_at, bracket_lo, bracket_hi).clamp(*lo, *hi);
                let (row, rhs) = p.eval_constraint(&IndexValue::Real(t))?;
                let probe = singleton_probe(&p.c, &row, rhs);
                if probe.residual <= eps_par {
                    consider(probe.value, IndexValue::Real(t), probe.lambda);
                }
            }
        }
    }

    Ok(match best {
        None => (ExtendedReal::MinusInf, None, None),
        Some((value, idx, lambda)) => {
            let certificate = value.is_finite().then(|| DualCertificate {
                support: vec![(idx, lambda)],
            });
            (value, certificate, Some(idx))
        }
    })
}

/// The canonical enumeration prefixes are taken along.
fn prefix_order(gen: &ConstraintGenerator, max_m: usize) -> Result<Vec<IndexValue>, Error> {
    match gen {
        ConstraintGenerator::CountablePoly { .. } => {
            Ok((1..=max_m as u64).map(IndexValue::Natural).collect())
        }
        ConstraintGenerator::ExplicitFinite { rows, .. } => {
            Ok((0..rows.len().min(max_m)).map(IndexValue::Position).collect())
        }
        ConstraintGenerator::IntervalPoly { .. } => Err(Error::Unsupported(
            "prefix truncation needs a countable or explicit index order".into(),
        )),
    }
}

/// Primal and dual values of every prefix truncation up to `max_m`.
///
/// The dual entries are non-decreasing in `m` (larger prefixes only add
/// multiplier room), so the family's supremum is the final entry.
pub fn sup_dual_prefix(p: &LinearSIP, max_m: usize, tol: f64) -> Result<Vec<TracePoint>, Error> {
    if max_m == 0 {
        return Err(Error::InvalidArgument("max_m must be at least 1".into()));
    }
    let order = prefix_order(&p.generator, max_m)?;
    let mut out = Vec::with_capacity(order.len());
    for m in 1..=order.len() {
        let h = &order[..m];
        let lp = finite_subproblem(p, h)?;
        let primal = match solve_lp(&lp, tol)? {
            LPOutcome::Optimal { value, .. } => ExtendedReal::Finite(value),
            LPOutcome::Unbounded => ExtendedReal::MinusInf,
            LPOutcome::Infeasible => ExtendedReal::PlusInf,
        };
        let (dual, _) = finite_dual(p, h, tol)?;
        out.push(TracePoint { m, primal, dual });
    }
    Ok(out)
}

/// Supremum of the dual over every finite subset of the sample.
///
/// Any finite subset embeds into the full sample with zero padding, so one
/// dual LP over all rows decides the family. A finite value comes with a
/// basic certificate whose support has at most `n` indices.
pub fn sup_dual_full(
    p: &LinearSIP,
    sampled_t: &[IndexValue],
    tol: f64,
) -> Result<(ExtendedReal, Option<DualCertificate>), Error> {
    finite_dual(p, sampled_t, tol)
}

/// A named strategy computing `sup` of the dual for one index family.
pub trait DualMethod: Sync {
    /// Registry key (`h1`, `hn`, `full`).
    fn name(&self) -> &'static str;
    /// The family the method aggregates over.
    fn family(&self) -> IndexFamily;
    /// One-line human description.
    fn describe(&self) -> &'static str;
    fn solve(&self, p: &LinearSIP, params: &DualParams) -> Result<DualSolve, Error>;
}

/// Singleton supports, scanned parametrically over the index sample.
pub struct SingletonMethod;

impl DualMethod for SingletonMethod {
    fn name(&self) -> &'static str {
        "h1"
    }

    fn family(&self) -> IndexFamily {
        IndexFamily::Singletons
    }

    fn describe(&self) -> &'static str {
        "supremum over singleton supports via a parametric multiplier scan"
    }

    fn solve(&self, p: &LinearSIP, params: &DualParams) -> Result<DualSolve, Error> {
        let grid = sampled_indices(&p.generator, params.grid, params.max_m)?;
        let (value, certificate, best_index) =
            sup_dual_h1(p, &grid, params.eps_par, params.refine)?;
        Ok(DualSolve {
            value,
            certificate,
            best_index,
            trace: Vec::new(),
        })
    }
}

/// Prefix truncations walked in index order.
pub struct PrefixMethod;

impl DualMethod for PrefixMethod {
    fn name(&self) -> &'static str {
        "hn"
    }

    fn family(&self) -> IndexFamily {
        IndexFamily::Prefixes
    }

    fn describe(&self) -> &'static str {
        "supremum over prefix truncations of the index order"
    }

    fn solve(&self, p: &LinearSIP, params: &DualParams) -> Result<DualSolve, Error> {
        let order = prefix_order(&p.generator, params.max_m)?;
        let trace = sup_dual_prefix(p, params.max_m, params.tol)?;
        let mut value = ExtendedReal::MinusInf;
        let mut best_m = None;
        for tp in &trace {
            if best_m.is_none() || tp.dual > value {
                value = tp.dual;
                best_m = Some(tp.m);
            }
        }
        let certificate = match best_m {
            Some(m) if value.is_finite() => finite_dual(p, &order[..m], params.tol)?.1,
            _ => None,
        };
        Ok(DualSolve {
            value,
            certificate,
            best_index: None,
            trace,
        })
    }
}

/// The whole sampled index set at once.
pub struct FullMethod;

impl DualMethod for FullMethod {
    fn name(&self) -> &'static str {
        "full"
    }

    fn family(&self) -> IndexFamily {
        IndexFamily::AllFinite
    }

    fn describe(&self) -> &'static str {
        "supremum over all finite subsets via one dual LP on the sample"
    }

    fn solve(&self, p: &LinearSIP, params: &DualParams) -> Result<DualSolve, Error> {
        let sampled = sampled_indices(&p.generator, params.grid, params.max_m)?;
        let (value, certificate) = sup_dual_full(p, &sampled, params.tol)?;
        Ok(DualSolve {
            value,
            certificate,
            best_index: None,
            trace: Vec::new(),
        })
    }
}

/// Every registered dual method, in CLI listing order.
pub static DUAL_METHODS: [&dyn DualMethod; 3] = [&SingletonMethod, &PrefixMethod, &FullMethod];

/// Look a method up by its registry key.
pub fn dual_method(name: &str) -> Option<&'static dyn DualMethod> {
    DUAL_METHODS.iter().copied().find(|m| m.name() == name)
}

/// Primal value, family dual value, and their gap on one sampled instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualityReport {
    pub family: String,
    pub sample_size: usize,
    /// Value of the primal LP over the full sample (a lower bound for the
    /// true infimum over the whole index set).
    pub primal: ExtendedReal,
    pub dual: ExtendedReal,
    /// `primal - dual`; `None` when both diverge the same way
    /// (indeterminate, deliberately never reported as zero).
    pub gap: Option<ExtendedReal>,
    pub gap_closed: bool,
    pub certificate: Option<DualCertificate>,
    pub best_index: Option<IndexValue>,
    pub trace: Vec<TracePoint>,
}

/// Compute the family's dual value next to the sampled primal value.
pub fn duality_report(
    p: &LinearSIP,
    family: &IndexFamily,
    params: &DualParams,
) -> Result<DualityReport, Error> {
    let sampled = sampled_indices(&p.generator, params.grid, params.max_m)?;
    let primal = match solve_lp(&finite_subproblem(p, &sampled)?, params.tol)? {
        LPOutcome::Optimal { value, .. } => ExtendedReal::Finite(value),
        LPOutcome::Unbounded => ExtendedReal::MinusInf,
        LPOutcome::Infeasible => ExtendedReal::PlusInf,
    };
    let solve = match family {
        IndexFamily::Singletons => SingletonMethod.solve(p, params)?,
        IndexFamily::Prefixes => PrefixMethod.solve(p, params)?,
        IndexFamily::AllFinite => FullMethod.solve(p, params)?,
        IndexFamily::Explicit(subsets) => {
            if subsets.is_empty() {
                return Err(Error::InvalidArgument(
                    "explicit family has no members".into(),
                ));
            }
            let mut value = ExtendedReal::MinusInf;
            let mut certificate = None;
            let mut first = true;
            for h in subsets {
                let (v, cert) = finite_dual(p, h, params.tol)?;
                if first || v > value {
                    value = v;
                    certificate = cert;
                    first = false;
                }
            }
            DualSolve {
                value,
                certificate,
                best_index: None,
                trace: Vec::new(),
            }
        }
    };
    let gap = primal.sub(&solve.value);
    let gap_closed = matches!(gap, Some(ExtendedReal::Finite(g)) if g.abs() <= GAP_TOL);
    Ok(DualityReport {
        family: family.describe().to_string(),
        sample_size: sampled.len(),
        primal,
        dual: solve.value,
        gap,
        gap_closed,
        certificate: solve.certificate,
        best_index: solve.best_index,
        trace: solve.trace,
    })
}
