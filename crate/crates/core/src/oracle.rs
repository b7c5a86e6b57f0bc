//! Reference computations kept deliberately separate from the dual-family
//! solvers: a dense-grid primal value, a Farkas multiplier oracle running
//! through the primal simplex rather than the dual equality form, and a
//! seeded generator of small random instances for the property suites.

use crate::duals::DualCertificate;
use crate::lp::{solve_eq_form, solve_lp, DenseLP, EqOutcome, ExtendedReal, LPOutcome, SOLVER_TOL};
use crate::model::{sample_interval, ConstraintGenerator, IndexValue, LinearSIP};
use crate::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Multipliers above this enter an oracle certificate's support.
const SUPPORT_TOL: f64 = 1e-12;

/// Primal value of the problem restricted to a uniform grid over the
/// generator's interval: `Finite` optimum, `-inf` unbounded, `inf`
/// infeasible. Only interval generators have a grid to densify, and since
/// the grid keeps a subset of the constraints the result can only
/// underestimate the full value.
pub fn dense_grid_value(p: &LinearSIP, grid: usize) -> Result<ExtendedReal, Error> {
    let ConstraintGenerator::IntervalPoly { lo, hi, .. } = &p.generator else {
        return Err(Error::Unsupported(
            "dense grid evaluation needs an interval generator".into(),
        ));
    };
    let sample = sample_interval(*lo, *hi, grid)?;
    let mut rows = Vec::with_capacity(sample.len());
    let mut rhs = Vec::with_capacity(sample.len());
    for idx in &sample {
        let (a, b) = p.eval_constraint(idx)?;
        rows.push(a);
        rhs.push(b);
    }
    let lp = DenseLP::new(p.c.clone(), rows, rhs)?;
    Ok(match solve_lp(&lp, SOLVER_TOL)? {
        LPOutcome::Optimal { value, .. } => ExtendedReal::Finite(value),
        LPOutcome::Unbounded => ExtendedReal::MinusInf,
        LPOutcome::Infeasible => ExtendedReal::PlusInf,
    })
}

/// Does some multiplier vector over the sampled rows certify the bound
/// `c'x >= alpha`? Returns the certificate when one exists.
///
/// Runs the primal simplex and reads the row multipliers off the optimal
/// basis, a different code path from the dual equality form used by the
/// family solvers. An unbounded primal means no multipliers exist at all.
/// An infeasible primal leaves the multiplier set unbounded in value, so a
/// certificate is recovered from a capped multiplier LP instead.
pub fn farkas_oracle(
    p: &LinearSIP,
    sample: &[IndexValue],
    alpha: f64,
) -> Result<Option<DualCertificate>, Error> {
    if sample.is_empty() {
        return Err(Error::InvalidArgument(
            "the Farkas oracle needs a non-empty index sample".into(),
        ));
    }
    let mut rows = Vec::with_capacity(sample.len());
    let mut rhs = Vec::with_capacity(sample.len());
    for idx in sample {
        let (a, b) = p.eval_constraint(idx)?;
        rows.push(a);
        rhs.push(b);
    }
    let support_of = |lambda: &[f64]| -> DualCertificate {
        let support: Vec<(IndexValue, f64)> = sample
            .iter()
            .zip(lambda.iter())
            .filter(|(_, &l)| l > SUPPORT_TOL)
            .map(|(idx, &l)| (*idx, l))
            .collect();
        DualCertificate { support }
    };
    let lp = DenseLP::new(p.c.clone(), rows.clone(), rhs.clone())?;
    match solve_lp(&lp, SOLVER_TOL)? {
        LPOutcome::Optimal { duals, value, .. } => {
            Ok((value >= alpha - 1e-9).then(|| support_of(&duals)))
        }
        LPOutcome::Unbounded => Ok(None),
        LPOutcome::Infeasible => {
            // The bound -b'lambda is unbounded above whenever multipliers
            // exist. Cap it just beyond alpha and solve
            //   min b'lambda  s.t.  A'lambda = -c, -b'lambda + s = cap,
            // in equality form with lambda, s >= 0.
            let n = p.n;
            let m = sample.len();
            let cap = alpha.max(0.0) + 1.0;
            let width = m + 1;
            let mut mat = vec![0.0; (n + 1) * width];
            for (i, row) in rows.iter().enumerate() {
                for (j, &a) in row.iter().enumerate() {
                    mat[j * width + i] = a;
                }
                mat[n * width + i] = -rhs[i];
            }
            mat[n * width + m] = 1.0;
            let mut obj = rhs.clone();
            obj.push(0.0);
            let mut target: Vec<f64> = p.c.iter().map(|&v| -v).collect();
            target.push(cap);
            match solve_eq_form(&obj, &mat, n + 1, width, &target, SOLVER_TOL)? {
                EqOutcome::Infeasible => Ok(None),
                EqOutcome::Optimal { y, value, .. } => {
                    Ok((-value >= alpha - 1e-9).then(|| support_of(&y[..m])))
                }
                EqOutcome::Unbounded => Err(Error::SolverFailure(
                    "capped multiplier program cannot be unbounded".into(),
                )),
            }
        }
    }
}

/// Shape of a random finite instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InstanceParams {
    pub seed: u64,
    /// Number of variables, `1..=4`.
    pub n: usize,
    /// Number of random rows, `1..=10` (fence rows may be added on top).
    pub m: usize,
    /// Coefficients are integers in `-coeff_range..=coeff_range`.
    pub coeff_range: i64,
}

/// Seeded random finite LSIP with small integer data.
///
/// Right-hand sides are drawn from `-1..=coeff_range`, which keeps the
/// origin feasible often; half the instances are fenced into the box
/// `|x_j| <= coeff_range`, which makes bounded optima common while leaving
/// plenty of unbounded and infeasible cases. Identical specs produce
/// identical problems.
pub fn random_finite_lsip(params: &InstanceParams) -> Result<LinearSIP, Error> {
    if params.n == 0 || params.n > 4 || params.m == 0 || params.m > 10 {
        return Err(Error::InvalidArgument(format!(
            "instance shape n = {}, m = {} outside 1..=4 by 1..=10",
            params.n, params.m
        )));
    }
    if params.coeff_range < 1 {
        return Err(Error::InvalidArgument(
            "coefficient range must be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let r = params.coeff_range;
    let c: Vec<f64> = (0..params.n).map(|_| rng.random_range(-r..=r) as f64).collect();
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::with_capacity(params.m + 2 * params.n);
    for _ in 0..params.m {
        let a: Vec<f64> = (0..params.n).map(|_| rng.random_range(-r..=r) as f64).collect();
        let b = rng.random_range(-1..=r) as f64;
        rows.push((a, b));
    }
    if rng.random_range(0..2) == 1 {
        for j in 0..params.n {
            let mut up = vec![0.0; params.n];
            up[j] = 1.0;
            rows.push((up, r as f64));
            let mut down = vec![0.0; params.n];
            down[j] = -1.0;
            rows.push((down, r as f64));
        }
    }
    LinearSIP::new(c, ConstraintGenerator::explicit(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::verify_farkas;
    use crate::model::ScalarPoly;

    fn band_sip(c1: f64, c2: f64) -> LinearSIP {
        let gen = ConstraintGenerator::IntervalPoly {
            lo: 0.0,
            hi: 1.0,
            a: vec![
                ScalarPoly::new(vec![0.0, -1.0]),
                ScalarPoly::new(vec![-1.0, 1.0]),
            ],
            b: ScalarPoly::new(vec![0.0, -1.0, 1.0]),
        };
        LinearSIP::new(vec![c1, c2], gen).unwrap()
    }

    fn divergent_sip() -> LinearSIP {
        let gen = ConstraintGenerator::CountablePoly {
            a: vec![
                ScalarPoly::new(vec![-1.0]),
                ScalarPoly::new(vec![0.0, -1.0, -1.0]),
            ],
            b: ScalarPoly::new(vec![-1.0, -2.0]),
        };
        LinearSIP::new(vec![0.0, 1.0], gen).unwrap()
    }

    #[test]
    fn band_grid_values() {
        let p = band_sip(1.0, 1.0);
        let v = dense_grid_value(&p, 1001).unwrap().finite().unwrap();
        assert!((v - 0.5).abs() <= 1e-6, "value {}", v);
        // Just the endpoints: only x >= 0 remains and the optimum drops to 0.
        let v = dense_grid_value(&p, 2).unwrap().finite().unwrap();
        assert!(v.abs() <= 1e-9, "value {}", v);
    }

    #[test]
    fn grid_value_underestimates_with_offgrid_optimum() {
        // With c = (2, 1) the binding index is 2/3, strictly between grid
        // points: the grid value sits just below c1*c2/(c1+c2) = 2/3.
        let p = band_sip(2.0, 1.0);
        let v = dense_grid_value(&p, 1001).unwrap().finite().unwrap();
        assert!(v <= 2.0 / 3.0 + 1e-9, "value {}", v);
        assert!(v >= 2.0 / 3.0 - 1e-3, "value {}", v);
    }

    #[test]
    fn nested_grids_are_monotone() {
        // Doubling as 2N-1 keeps every old point, so each step only adds
        // constraints and the value cannot decrease.
        let p = band_sip(1.0, 1.0);
        let mut prev = f64::NEG_INFINITY;
        for grid in [11, 21, 41, 81] {
            let v = dense_grid_value(&p, grid).unwrap().finite().unwrap();
            assert!(v >= prev - 1e-9, "grid {}: {} < {}", grid, v, prev);
            prev = v;
        }
    }

    #[test]
    fn grid_needs_an_interval() {
        assert!(matches!(
            dense_grid_value(&divergent_sip(), 100),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn farkas_oracle_certificate_verifies() {
        let p = band_sip(1.0, 1.0);
        let sample = sample_interval(0.0, 1.0, 101).unwrap();
        let cert = farkas_oracle(&p, &sample, 0.5)
            .unwrap()
            .expect("the sampled dual reaches 0.5");
        assert!(verify_farkas(&p, &cert, 0.5, 1e-8).unwrap());
        // Past the dual value no certificate exists.
        assert!(farkas_oracle(&p, &sample, 0.6).unwrap().is_none());
    }

    #[test]
    fn farkas_oracle_none_without_multipliers() {
        // No nonnegative combination of the divergent rows matches -c, so
        // even an absurdly low bound has no certificate.
        let p = divergent_sip();
        let sample: Vec<IndexValue> = (1..=50).map(IndexValue::Natural).collect();
        assert!(farkas_oracle(&p, &sample, -1e6).unwrap().is_none());
    }

    #[test]
    fn farkas_oracle_on_clashing_rows() {
        // x1 <= -1 and -x1 <= 0 clash. With c = (1, 0) the bound runs away
        // and any alpha gets a certificate; with c = (0, 1) no multiplier
        // vector exists at all.
        let gen = ConstraintGenerator::explicit(vec![
            (vec![1.0, 0.0], -1.0),
            (vec![-1.0, 0.0], 0.0),
        ]);
        let sample = vec![IndexValue::Position(0), IndexValue::Position(1)];
        let runaway = LinearSIP::new(vec![1.0, 0.0], gen.clone()).unwrap();
        let cert = farkas_oracle(&runaway, &sample, 1000.0)
            .unwrap()
            .expect("clashing rows push the bound past any alpha");
        assert!(verify_farkas(&runaway, &cert, 1000.0, 1e-8).unwrap());

        let empty = LinearSIP::new(vec![0.0, 1.0], gen).unwrap();
        assert!(farkas_oracle(&empty, &sample, -1e6).unwrap().is_none());
    }

    #[test]
    fn instance_generator_is_deterministic() {
        let params = InstanceParams { seed: 42, n: 3, m: 6, coeff_range: 3 };
        let p1 = random_finite_lsip(&params).unwrap();
        let p2 = random_finite_lsip(&params).unwrap();
        assert_eq!(p1, p2);
        let other = random_finite_lsip(&InstanceParams { seed: 43, ..params }).unwrap();
        assert_ne!(p1, other);
    }

    #[test]
    fn instance_generator_shape_guard() {
        let bad_n = InstanceParams { seed: 0, n: 5, m: 3, coeff_range: 3 };
        assert!(matches!(random_finite_lsip(&bad_n), Err(Error::InvalidArgument(_))));
        let bad_m = InstanceParams { seed: 0, n: 2, m: 0, coeff_range: 3 };
        assert!(matches!(random_finite_lsip(&bad_m), Err(Error::InvalidArgument(_))));
        let bad_r = InstanceParams { seed: 0, n: 2, m: 3, coeff_range: 0 };
        assert!(matches!(random_finite_lsip(&bad_r), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn instance_statuses_are_mixed() {
        // The property suites need all three statuses to show up. Counted
        // once over seeds 0..100 and pinned loosely.
        let mut optimal = 0;
        let mut unbounded = 0;
        let mut infeasible = 0;
        for seed in 0..100u64 {
            let params = InstanceParams {
                seed,
                n: 2 + (seed % 3) as usize,
                m: 3 + (seed % 6) as usize,
                coeff_range: 3,
            };
            let p = random_finite_lsip(&params).unwrap();
            let rows: Vec<Vec<f64>> = match &p.generator {
                ConstraintGenerator::ExplicitFinite { rows, .. } => {
                    rows.iter().map(|(a, _)| a.clone()).collect()
                }
                _ => unreachable!(),
            };
            let rhs: Vec<f64> = match &p.generator {
                ConstraintGenerator::ExplicitFinite { rows, .. } => {
                    rows.iter().map(|(_, b)| *b).collect()
                }
                _ => unreachable!(),
            };
            let lp = DenseLP::new(p.c.clone(), rows, rhs).unwrap();
            match solve_lp(&lp, SOLVER_TOL).unwrap() {
                LPOutcome::Optimal { .. } => optimal += 1,
                LPOutcome::Unbounded => unbounded += 1,
                LPOutcome::Infeasible => infeasible += 1,
            }
        }
        assert!(optimal >= 30, "only {} optimal instances", optimal);
        assert!(unbounded >= 1, "no unbounded instances");
        assert!(infeasible >= 1, "no infeasible instances");
    }
}
