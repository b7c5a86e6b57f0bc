//! Certificate verification: lower-bound (Farkas) certificates, optimality
//! certificates with complementary slackness, and feasibility of a point
//! over the whole index set.
//!
//! Verifiers only ever accept or reject; a failing certificate is reported
//! with its residuals, never adjusted.

use crate::duals::DualCertificate;
use crate::model::{sample_interval, ConstraintGenerator, IndexValue, LinearSIP, ScalarPoly};
use crate::Error;
use serde::{Deserialize, Serialize};

/// Default absolute tolerance on certificate residuals.
pub const CERT_TOL: f64 = 1e-8;
/// Width to which a derivative sign-change bracket is bisected.
const BRACKET_WIDTH: f64 = 1e-12;

/// A claimed primal minimizer together with the multipliers certifying it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalityCertificate {
    pub x_bar: Vec<f64>,
    pub cert: DualCertificate,
}

/// How a point fares against every (sampled) constraint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// Index attaining the largest constraint value.
    pub worst_index: IndexValue,
    /// `max_t a_t'x - b_t`; nonpositive (up to tolerance) means feasible.
    pub margin: f64,
}

/// Verdicts and residuals of an optimality-certificate check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub stationarity_ok: bool,
    pub complementarity_ok: bool,
    pub feasibility_ok: bool,
    /// `max_j |sum_t lambda_t a_t + c|_j` (infinite when a multiplier is
    /// negative, which invalidates the certificate outright).
    pub stationarity_residual: f64,
    pub complementarity_residual: f64,
    pub feasibility_margin: f64,
    pub worst_index: IndexValue,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.stationarity_ok && self.complementarity_ok && self.feasibility_ok
    }
}

/// Sampling knobs for feasibility checks. `grid` is the interval grid size
/// and doubles as the number of leading indices checked on countable sets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasParams {
    pub grid: usize,
    /// Sharpen interval maxima by bisecting the derivative's sign changes.
    pub refine: bool,
}

impl Default for FeasParams {
    fn default() -> Self {
        FeasParams { grid: 1001, refine: true }
    }
}

/// Does the certificate prove `c'x >= alpha` on the feasible set?
///
/// Accepts iff the multipliers are nonnegative, combine the rows into `-c`
/// within `tol` (infinity norm), and `-sum_t lambda_t b_t >= alpha - tol`.
pub fn verify_farkas(
    p: &LinearSIP,
    cert: &DualCertificate,
    alpha: f64,
    tol: f64,
) -> Result<bool, Error> {
    let mut combo = vec![0.0; p.n];
    let mut bound = 0.0;
    for (idx, l) in &cert.support {
        if *l < 0.0 {
            return Ok(false);
        }
        let (a, b) = p.eval_constraint(idx)?;
        for (acc, &ai) in combo.iter_mut().zip(a.iter()) {
            *acc += l * ai;
        }
        bound -= l * b;
    }
    let residual = combo
        .iter()
        .zip(p.c.iter())
        .map(|(&s, &c)| (s + c).abs())
        .fold(0.0, f64::max);
    Ok(residual <= tol && bound >= alpha - tol)
}

struct CertificateSums {
    valid: bool,
    combo: Vec<f64>,
    sum_lb: f64,
    /// Per-support complementarity products `lambda_t (a_t'x - b_t)`.
    products: Vec<f64>,
}

fn certificate_sums(
    p: &LinearSIP,
    cert: &DualCertificate,
    x: &[f64],
) -> Result<CertificateSums, Error> {
    let mut out = CertificateSums {
        valid: true,
        combo: vec![0.0; p.n],
        sum_lb: 0.0,
        products: Vec::with_capacity(cert.support.len()),
    };
    for (idx, l) in &cert.support {
        if *l < 0.0 {
            out.valid = false;
        }
        let (a, b) = p.eval_constraint(idx)?;
        let ax: f64 = a.iter().zip(x.iter()).map(|(&ai, &xi)| ai * xi).sum();
        for (acc, &ai) in out.combo.iter_mut().zip(a.iter()) {
            *acc += l * ai;
        }
        out.sum_lb += l * b;
        out.products.push(l * (ax - b));
    }
    Ok(out)
}

fn report_from(
    p: &LinearSIP,
    sums: &CertificateSums,
    x_bar: &[f64],
    complementarity_residual: f64,
    tol: f64,
    feas: &FeasParams,
) -> Result<VerificationReport, Error> {
    let stationarity_residual = if sums.valid {
        sums.combo
            .iter()
            .zip(p.c.iter())
            .map(|(&s, &c)| (s + c).abs())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let feasibility = check_feasibility(p, x_bar, tol, feas)?;
    Ok(VerificationReport {
        stationarity_ok: stationarity_residual <= tol,
        complementarity_ok: complementarity_residual <= tol,
        feasibility_ok: feasibility.feasible,
        stationarity_residual,
        complementarity_residual,
        feasibility_margin: feasibility.margin,
        worst_index: feasibility.worst_index,
    })
}

/// Check stationarity, aggregate complementary slackness
/// `|sum_t lambda_t b_t + c'x_bar| <= tol`, and feasibility of `x_bar`.
pub fn verify_optimality(
    p: &LinearSIP,
    oc: &OptimalityCertificate,
    tol: f64,
    feas: &FeasParams,
) -> Result<VerificationReport, Error> {
    if oc.x_bar.len() != p.n {
        return Err(Error::InvalidArgument(format!(
            "point has {} coordinates, problem has {}",
            oc.x_bar.len(),
            p.n
        )));
    }
    let sums = certificate_sums(p, &oc.cert, &oc.x_bar)?;
    let cx: f64 = p.c.iter().zip(oc.x_bar.iter()).map(|(&c, &x)| c * x).sum();
    report_from(p, &sums, &oc.x_bar, (sums.sum_lb + cx).abs(), tol, feas)
}

/// As [`verify_optimality`], but with complementarity enforced multiplier by
/// multiplier: `|lambda_t (a_t'x_bar - b_t)| <= tol` for every support
/// index. Stricter under cancellation between support terms.
pub fn check_kkt(
    p: &LinearSIP,
    oc: &OptimalityCertificate,
    tol: f64,
    feas: &FeasParams,
) -> Result<VerificationReport, Error> {
    if oc.x_bar.len() != p.n {
        return Err(Error::InvalidArgument(format!(
            "point has {} coordinates, problem has {}",
            oc.x_bar.len(),
            p.n
        )));
    }
    let sums = certificate_sums(p, &oc.cert, &oc.x_bar)?;
    let worst = sums.products.iter().map(|p| p.abs()).fold(0.0, f64::max);
    report_from(p, &sums, &oc.x_bar, worst, tol, feas)
}

/// Largest constraint value of `x` over the sampled index set.
///
/// For interval generators with `refine` set, the constraint value
/// `g(t) = a(t)'x - b(t)` is a polynomial; its interior maxima are pinned
/// down by bisecting sign changes of `g'` on a grid four times finer than
/// `params.grid`, so the reported margin does not depend on the maximizer
/// hitting a grid point.
pub fn check_feasibility(
    p: &LinearSIP,
    x: &[f64],
    tol: f64,
    params: &FeasParams,
) -> Result<FeasibilityReport, Error> {
    if x.len() != p.n {
        return Err(Error::InvalidArgument(format!(
            "point has {} coordinates, problem has {}",
            x.len(),
            p.n
        )));
    }
    let mut worst: Option<(f64, IndexValue)> = None;
    let mut note = |value: f64, idx: IndexValue| {
        if worst.map_or(true, |(w, _)| value > w) {
            worst = Some((value, idx));
        }
    };
    match &p.generator {
        ConstraintGenerator::ExplicitFinite { rows, .. } => {
            for (i, (a, b)) in rows.iter().enumerate() {
                let lhs: f64 = a.iter().zip(x.iter()).map(|(&ai, &xi)| ai * xi).sum();
                note(lhs - b, IndexValue::Position(i));
            }
        }
        ConstraintGenerator::CountablePoly { a, b } => {
            for k in 1..=params.grid.max(1) as u64 {
                let t = k as f64;
                let lhs: f64 = a.iter().zip(x.iter()).map(|(p, &xi)| p.eval(t) * xi).sum();
                note(lhs - b.eval(t), IndexValue::Natural(k));
            }
        }
        ConstraintGenerator::IntervalPoly { lo, hi, a, b } => {
            let g = constraint_poly(a, b, x);
            let gp = g.derivative();
            let fine = sample_interval(*lo, *hi, (4 * params.grid).max(8))?;
            let mut prev: Option<(f64, f64)> = None;
            for idx in &fine {
                let t = idx.as_f64();
                note(g.eval(t), IndexValue::Real(t));
                let slope = gp.eval(t);
                if params.refine {
                    if let Some((t0, s0)) = prev {
                        if s0 > 0.0 && slope < 0.0 {
                            // A local maximum sits between t0 and t.
                            let root = bisect_sign_change(&gp, t0, t, s0);
                            note(g.eval(root), IndexValue::Real(root));
                        }
                    }
                }
                prev = Some((t, slope));
            }
        }
    }
    let (margin, worst_index) = worst.expect("every generator yields at least one row");
    Ok(FeasibilityReport {
        feasible: margin <= tol,
        worst_index,
        margin,
    })
}

/// Coefficients of `t -> a(t)'x - b(t)`.
fn constraint_poly(a: &[ScalarPoly], b: &ScalarPoly, x: &[f64]) -> ScalarPoly {
    let len = a
        .iter()
        .map(|p| p.coeffs().len())
        .chain([b.coeffs().len()])
        .max()
        .unwrap_or(1);
    let mut coeffs = vec![0.0; len];
    for (p, &xi) in a.iter().zip(x.iter()) {
        for (acc, &c) in coeffs.iter_mut().zip(p.coeffs().iter()) {
            *acc += xi * c;
        }
    }
    for (acc, &c) in coeffs.iter_mut().zip(b.coeffs().iter()) {
        *acc -= c;
    }
    ScalarPoly::new(coeffs)
}

/// Root of `f` in `(lo, hi)` given `f(lo)` has sign `s0` and `f(hi)` the
/// opposite one.
fn bisect_sign_change(f: &ScalarPoly, mut lo: f64, mut hi: f64, s0: f64) -> f64 {
    while hi - lo > BRACKET_WIDTH {
        let mid = 0.5 * (lo + hi);
        let fm = f.eval(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (s0 > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ConstraintGenerator;

    fn band_sip(c1: f64, c2: f64) -> LinearSIP {
        LinearSIP::new(
            vec![c1, c2],
            ConstraintGenerator::IntervalPoly {
                lo: 0.0,
                hi: 1.0,
                a: vec![
                    ScalarPoly::new(vec![0.0, -1.0]),
                    ScalarPoly::new(vec![-1.0, 1.0]),
                ],
                b: ScalarPoly::new(vec![0.0, -1.0, 1.0]),
            },
        )
        .unwrap()
    }

    fn divergent_sip() -> LinearSIP {
        LinearSIP::new(
            vec![0.0, 1.0],
            ConstraintGenerator::CountablePoly {
                a: vec![
                    ScalarPoly::new(vec![-1.0]),
                    ScalarPoly::new(vec![0.0, -1.0, -1.0]),
                ],
                b: ScalarPoly::new(vec![-1.0, -2.0]),
            },
        )
        .unwrap()
    }

    fn midpoint_cert() -> DualCertificate {
        DualCertificate {
            support: vec![(IndexValue::Real(0.5), 2.0)],
        }
    }

    #[test]
    fn farkas_bound_at_the_dual_value() {
        let p = band_sip(1.0, 1.0);
        assert!(verify_farkas(&p, &midpoint_cert(), 0.5, CERT_TOL).unwrap());
        assert!(verify_farkas(&p, &midpoint_cert(), 0.4, CERT_TOL).unwrap());
        assert!(!verify_farkas(&p, &midpoint_cert(), 0.6, CERT_TOL).unwrap());
    }

    #[test]
    fn farkas_zero_objective_empty_support() {
        let p = band_sip(0.0, 0.0);
        let cert = DualCertificate { support: vec![] };
        assert!(verify_farkas(&p, &cert, 0.0, CERT_TOL).unwrap());
        assert!(!verify_farkas(&p, &cert, 1.0, CERT_TOL).unwrap());
    }

    #[test]
    fn farkas_rejects_negative_multipliers() {
        let p = band_sip(1.0, 1.0);
        let cert = DualCertificate {
            support: vec![(IndexValue::Real(0.5), -2.0)],
        };
        assert!(!verify_farkas(&p, &cert, -10.0, CERT_TOL).unwrap());
    }

    #[test]
    fn farkas_bounds_hold_on_feasible_points() {
        // Accepted certificate at alpha = 0.5, so c'x >= 0.5 - 2 tol for
        // every feasible x.
        let p = band_sip(1.0, 1.0);
        assert!(verify_farkas(&p, &midpoint_cert(), 0.5, CERT_TOL).unwrap());
        let feasible = [
            vec![0.25, 0.25],
            vec![1.0, 1.0],
            vec![0.5, 0.5],
            vec![1.0, 0.0],
            vec![0.09, 0.49],
        ];
        for x in &feasible {
            let feas = check_feasibility(&p, x, CERT_TOL, &FeasParams::default()).unwrap();
            assert!(feas.feasible, "intended feasible point {:?}", x);
            let cx: f64 = p.c.iter().zip(x.iter()).map(|(&c, &v)| c * v).sum();
            assert!(cx >= 0.5 - 2.0 * CERT_TOL);
        }
    }

    #[test]
    fn optimality_of_the_band_minimizer() {
        let p = band_sip(1.0, 1.0);
        let oc = OptimalityCertificate {
            x_bar: vec![0.25, 0.25],
            cert: midpoint_cert(),
        };
        let report = verify_optimality(&p, &oc, CERT_TOL, &FeasParams::default()).unwrap();
        assert!(report.passed(), "{:?}", report);
        assert!(report.stationarity_residual <= 1e-12);
        assert!(report.complementarity_residual <= 1e-12);
        assert!((report.worst_index.as_f64() - 0.5).abs() < 1e-6);

        let kkt = check_kkt(&p, &oc, CERT_TOL, &FeasParams::default()).unwrap();
        assert!(kkt.passed(), "{:?}", kkt);
    }

    #[test]
    fn feasible_point_with_wrong_value_fails_complementarity() {
        let p = band_sip(1.0, 1.0);
        let oc = OptimalityCertificate {
            x_bar: vec![1.0, 1.0],
            cert: midpoint_cert(),
        };
        let report = verify_optimality(&p, &oc, CERT_TOL, &FeasParams::default()).unwrap();
        assert!(report.stationarity_ok);
        assert!(report.feasibility_ok);
        assert!(!report.complementarity_ok);
        // c'x = 2 against a certified bound of 0.5.
        assert!((report.complementarity_residual - 1.5).abs() < 1e-9);
    }

    #[test]
    fn wrong_support_fails_complementarity_both_ways() {
        let p = band_sip(1.0, 1.0);
        let cert = DualCertificate {
            support: vec![(IndexValue::Real(0.0), 1.0), (IndexValue::Real(1.0), 1.0)],
        };
        let oc = OptimalityCertificate { x_bar: vec![0.25, 0.25], cert };
        let report = verify_optimality(&p, &oc, CERT_TOL, &FeasParams::default()).unwrap();
        assert!(report.stationarity_ok);
        assert!(!report.complementarity_ok);
        assert!((report.complementarity_residual - 0.5).abs() < 1e-9);

        // Per-multiplier form: each endpoint constraint is inactive at the
        // minimizer, value -0.25.
        let kkt = check_kkt(&p, &oc, CERT_TOL, &FeasParams::default()).unwrap();
        assert!(!kkt.complementarity_ok);
        assert!((kkt.complementarity_residual - 0.25).abs() < 1e-9);
    }

    #[test]
    fn empty_support_with_zero_objective_passes() {
        let p = band_sip(0.0, 0.0);
        let oc = OptimalityCertificate {
            x_bar: vec![1.0, 1.0],
            cert: DualCertificate { support: vec![] },
        };
        let report = check_kkt(&p, &oc, CERT_TOL, &FeasParams::default()).unwrap();
        assert!(report.passed(), "{:?}", report);
    }

    #[test]
    fn negative_multiplier_breaks_stationarity() {
        let p = band_sip(1.0, 1.0);
        let oc = OptimalityCertificate {
            x_bar: vec![0.25, 0.25],
            cert: DualCertificate {
                support: vec![(IndexValue::Real(0.5), -2.0)],
            },
        };
        let report = verify_optimality(&p, &oc, CERT_TOL, &FeasParams::default()).unwrap();
        assert!(!report.stationarity_ok);
        assert!(report.stationarity_residual.is_infinite());
    }

    #[test]
    fn margins_of_the_three_reference_points() {
        let p = band_sip(1.0, 1.0);
        let params = FeasParams::default();

        let active = check_feasibility(&p, &[0.25, 0.25], CERT_TOL, &params).unwrap();
        assert!(active.feasible);
        assert!(active.margin.abs() <= 1e-10, "margin {}", active.margin);
        assert!((active.worst_index.as_f64() - 0.5).abs() < 1e-6);

        let interior = check_feasibility(&p, &[1.0, 1.0], CERT_TOL, &params).unwrap();
        assert!(interior.feasible);
        assert!((interior.margin + 0.75).abs() < 1e-9);
        assert!((interior.worst_index.as_f64() - 0.5).abs() < 1e-5);

        let outside = check_feasibility(&p, &[0.0, 0.0], CERT_TOL, &params).unwrap();
        assert!(!outside.feasible);
        assert!((outside.margin - 0.25).abs() < 1e-9);
        assert!((outside.worst_index.as_f64() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn refined_margin_matches_a_brute_force_grid() {
        let p = band_sip(1.0, 1.0);
        let params = FeasParams { grid: 101, refine: true };
        for x in [[0.25, 0.25], [1.0, 1.0], [0.3, 0.7]] {
            let report = check_feasibility(&p, &x, CERT_TOL, &params).unwrap();
            let mut brute = f64::NEG_INFINITY;
            for i in 0..=1_000_000u32 {
                let t = i as f64 / 1e6;
                let g = -t * x[0] + (t - 1.0) * x[1] - (t * t - t);
                brute = brute.max(g);
            }
            assert!(
                (report.margin - brute).abs() <= 1e-9,
                "x = {:?}: refined {} vs brute {}",
                x,
                report.margin,
                brute
            );
            assert!(report.margin >= brute - 1e-12, "refinement must not undershoot");
        }
    }

    #[test]
    fn explicit_rows_use_positions() {
        let p = LinearSIP::new(
            vec![1.0, 1.0],
            ConstraintGenerator::explicit(vec![
                (vec![0.0, -1.0], 0.0),
                (vec![-0.5, -0.5], -0.25),
            ]),
        )
        .unwrap();
        let report =
            check_feasibility(&p, &[0.0, 0.0], CERT_TOL, &FeasParams::default()).unwrap();
        assert!(!report.feasible);
        assert_eq!(report.worst_index, IndexValue::Position(1));
        assert!((report.margin - 0.25).abs() < 1e-12);
    }

    #[test]
    fn countable_rows_scan_leading_indices() {
        let p = divergent_sip();
        let feasible = check_feasibility(&p, &[5.0, 1.0], CERT_TOL, &FeasParams::default())
            .unwrap();
        assert!(feasible.feasible);
        assert_eq!(feasible.worst_index, IndexValue::Natural(1));
        assert!((feasible.margin + 4.0).abs() < 1e-12);

        let infeasible = check_feasibility(
            &p,
            &[5.0, 0.0],
            CERT_TOL,
            &FeasParams { grid: 10, refine: true },
        )
        .unwrap();
        assert!(!infeasible.feasible);
        assert_eq!(infeasible.worst_index, IndexValue::Natural(10));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let p = band_sip(1.0, 1.0);
        assert!(matches!(
            check_feasibility(&p, &[0.0], CERT_TOL, &FeasParams::default()),
            Err(Error::InvalidArgument(_))
        ));
    }
}
