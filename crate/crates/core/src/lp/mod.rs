//! Finite linear programs: a dense two-phase simplex, a brute-force vertex
//! oracle for cross-checking it, and polyhedral cone probes.
//!
//! The primal form throughout is `min c'x` subject to `A x <= b` with `x`
//! free. The matching dual is `max -b'w` subject to `A'w = -c`, `w >= 0`,
//! so a dual solution is exactly a Farkas-style multiplier vector for the
//! rows.

mod cones;
mod simplex;

pub use cones::{
    cone_has_nonzero, cone_membership, cone_row_subspace_test, lineality_and_pointed,
    LinealityDecomposition,
};
pub(crate) use cones::orthonormal_extend;
pub(crate) use simplex::{solve_eq_form, EqOutcome};

use crate::Error;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Default pivot / feasibility tolerance of the simplex.
pub const SOLVER_TOL: f64 = 1e-9;
/// Default tolerance when comparing reported objective values.
pub const VALUE_TOL: f64 = 1e-7;

/// `min objective'x` subject to `rows[i]'x <= rhs[i]`, `x` free.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseLP {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

impl DenseLP {
    pub fn new(objective: Vec<f64>, rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self, Error> {
        if rows.len() != rhs.len() {
            return Err(Error::InvalidArgument(format!(
                "{} rows but {} right-hand sides",
                rows.len(),
                rhs.len()
            )));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != objective.len()) {
            return Err(Error::InvalidArgument(format!(
                "row {} has {} coefficients, objective has {}",
                bad,
                rows[bad].len(),
                objective.len()
            )));
        }
        Ok(DenseLP { objective, rows, rhs })
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }
}

/// Result of solving a finite LP.
#[derive(Clone, Debug, PartialEq)]
pub enum LPOutcome {
    Optimal {
        x: Vec<f64>,
        /// Row multipliers: `A'duals = -c`, `duals >= 0` for [`solve_lp`];
        /// a primal point for [`solve_dual_lp`]; empty for [`vertex_oracle`].
        duals: Vec<f64>,
        value: f64,
    },
    Unbounded,
    Infeasible,
}

impl LPOutcome {
    pub fn optimal_value(&self) -> Option<f64> {
        match self {
            LPOutcome::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }
}

/// Real line with both infinities. `Finite` values are assumed non-NaN.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ExtendedReal {
    MinusInf,
    Finite(f64),
    PlusInf,
}

impl ExtendedReal {
    pub fn finite(&self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    /// `self <= other + slack` in the extended order.
    pub fn le_with_slack(&self, other: &ExtendedReal, slack: f64) -> bool {
        use ExtendedReal::*;
        match (self, other) {
            (MinusInf, _) => true,
            (_, PlusInf) => true,
            (Finite(a), Finite(b)) => *a <= *b + slack,
            (Finite(_), MinusInf) => false,
            (PlusInf, _) => false,
        }
    }

    /// `self - other`; `None` when both operands are the same infinity
    /// (indeterminate, deliberately never reported as zero).
    pub fn sub(&self, other: &ExtendedReal) -> Option<ExtendedReal> {
        use ExtendedReal::*;
        match (self, other) {
            (PlusInf, PlusInf) | (MinusInf, MinusInf) => None,
            (PlusInf, _) | (_, MinusInf) => Some(PlusInf),
            (MinusInf, _) | (_, PlusInf) => Some(MinusInf),
            (Finite(a), Finite(b)) => Some(Finite(a - b)),
        }
    }

    /// Scale by a nonnegative multiplier with the convention `0 * inf = 0`.
    pub fn scale(&self, s: f64) -> ExtendedReal {
        use ExtendedReal::*;
        if s == 0.0 {
            return Finite(0.0);
        }
        debug_assert!(s > 0.0);
        match self {
            Finite(v) => Finite(s * v),
            PlusInf => PlusInf,
            MinusInf => MinusInf,
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use ExtendedReal::*;
        fn rank(v: &ExtendedReal) -> i8 {
            match v {
                MinusInf => -1,
                Finite(_) => 0,
                PlusInf => 1,
            }
        }
        match (self, other) {
            // Plain float order so that -0.0 == 0.0, consistent with the
            // derived PartialEq; NaN is excluded by the type's contract.
            (Finite(a), Finite(b)) => a.partial_cmp(b),
            (a, b) => Some(rank(a).cmp(&rank(b))),
        }
    }
}

/// Decimal with `sig` significant digits (possibly more for magnitudes at
/// the boundary of a decade); used for all reported values.
pub fn format_significant(x: f64, sig: u32) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - exp).max(0) as usize;
    format!("{:.*}", decimals, x)
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::MinusInf => write!(f, "-inf"),
            ExtendedReal::PlusInf => write!(f, "inf"),
            ExtendedReal::Finite(v) => write!(f, "{}", format_significant(*v, 12)),
        }
    }
}

/// Two-phase simplex on `min c'x`, `A x <= b`, `x` free.
///
/// Free variables are split into positive and negative parts and a slack is
/// added per row. Optimal outcomes carry row multipliers satisfying
/// `A'duals = -c`, `duals >= 0` and `-b'duals = value` within tolerance.
pub fn solve_lp(lp: &DenseLP, tol: f64) -> Result<LPOutcome, Error> {
    let n = lp.num_vars();
    let m = lp.num_rows();
    let k = 2 * n + m;
    let mut mat = vec![0.0; m * k];
    for (i, row) in lp.rows.iter().enumerate() {
        for (j, &a) in row.iter().enumerate() {
            mat[i * k + j] = a;
            mat[i * k + n + j] = -a;
        }
        mat[i * k + 2 * n + i] = 1.0;
    }
    let mut obj = vec![0.0; k];
    for (j, &c) in lp.objective.iter().enumerate() {
        obj[j] = c;
        obj[n + j] = -c;
    }
    match solve_eq_form(&obj, &mat, m, k, &lp.rhs, tol)? {
        EqOutcome::Infeasible => Ok(LPOutcome::Infeasible),
        EqOutcome::Unbounded => Ok(LPOutcome::Unbounded),
        EqOutcome::Optimal { y, row_duals, .. } => {
            let x: Vec<f64> = (0..n).map(|j| y[j] - y[n + j]).collect();
            let duals: Vec<f64> = row_duals.iter().map(|&p| (-p).max(0.0)).collect();
            let value = lp.objective.iter().zip(x.iter()).map(|(&c, &v)| c * v).sum();
            Ok(LPOutcome::Optimal { x, duals, value })
        }
    }
}

/// Simplex on the dual `max -b'w` subject to `A'w = -c`, `w >= 0`.
///
/// `Optimal.x` is the multiplier vector `w` and `Optimal.value = -b'w`;
/// `Optimal.duals` is a primal-feasible point recovered from the equality
/// multipliers. `Infeasible` means no multiplier vector matches `-c` at all;
/// `Unbounded` means the dual objective grows without bound (the primal is
/// then infeasible).
pub fn solve_dual_lp(lp: &DenseLP, tol: f64) -> Result<LPOutcome, Error> {
    let n = lp.num_vars();
    let m = lp.num_rows();
    // Equality form: min b'w s.t. (A')w = -c.
    let mut mat = vec![0.0; n * m];
    for (i, row) in lp.rows.iter().enumerate() {
        for (j, &a) in row.iter().enumerate() {
            mat[j * m + i] = a;
        }
    }
    let q: Vec<f64> = lp.objective.iter().map(|&c| -c).collect();
    match solve_eq_form(&lp.rhs, &mat, n, m, &q, tol)? {
        EqOutcome::Infeasible => Ok(LPOutcome::Infeasible),
        EqOutcome::Unbounded => Ok(LPOutcome::Unbounded),
        EqOutcome::Optimal { y, row_duals, value } => Ok(LPOutcome::Optimal {
            x: y,
            duals: row_duals,
            value: -value,
        }),
    }
}

const ORACLE_MAX_VARS: usize = 6;
const ORACLE_MAX_ROWS: usize = 12;
// Large enough to contain every basic point of small-integer data (Cramer
// bound ~1e4), small enough that scaled tolerances stay below the 1/det
// separation of such data.
const ORACLE_BOX: f64 = 1e5;

/// Brute-force reference solver: enumerates basic points of the constraint
/// set intersected with a large box, plus recession directions in the unit
/// box, and classifies the LP from those. Independent of the simplex code
/// path. Guarded to `n <= 6`, `m <= 12`; produces no multipliers.
pub fn vertex_oracle(lp: &DenseLP) -> Result<LPOutcome, Error> {
    let n = lp.num_vars();
    let m = lp.num_rows();
    if n == 0 || n > ORACLE_MAX_VARS || m > ORACLE_MAX_ROWS {
        return Err(Error::SizeGuard(format!(
            "vertex oracle handles 1 <= n <= {} and m <= {}, got n = {}, m = {}",
            ORACLE_MAX_VARS, ORACLE_MAX_ROWS, n, m
        )));
    }

    let boxed = |half: f64, rhs_rows: bool| -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut rows = lp.rows.clone();
        let mut rhs = if rhs_rows { lp.rhs.clone() } else { vec![0.0; m] };
        for j in 0..n {
            let mut up = vec![0.0; n];
            up[j] = 1.0;
            rows.push(up);
            rhs.push(half);
            let mut down = vec![0.0; n];
            down[j] = -1.0;
            rows.push(down);
            rhs.push(half);
        }
        (rows, rhs)
    };

    let (frows, frhs) = boxed(ORACLE_BOX, true);
    let feasible_best = enumerate_min(&frows, &frhs, &lp.objective);
    if feasible_best.is_none() {
        return Ok(LPOutcome::Infeasible);
    }

    // Unboundedness: a recession direction with negative objective. The
    // recession cone sliced by the unit box is a polytope containing zero,
    // so the minimum over its basic points is exact.
    let (rrows, rrhs) = boxed(1.0, false);
    let ray_scale = lp.objective.iter().fold(1.0f64, |acc, &c| acc.max(c.abs()));
    if let Some((ray_min, _)) = enumerate_min(&rrows, &rrhs, &lp.objective) {
        if ray_min < -1e-7 * ray_scale {
            return Ok(LPOutcome::Unbounded);
        }
    }

    let (value, x) = feasible_best.unwrap();
    Ok(LPOutcome::Optimal { x, duals: Vec::new(), value })
}

/// Minimum of `obj'x` over the basic feasible points of `rows x <= rhs`.
fn enumerate_min(rows: &[Vec<f64>], rhs: &[f64], obj: &[f64]) -> Option<(f64, Vec<f64>)> {
    let n = obj.len();
    let total = rows.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut combo: Vec<usize> = (0..n).collect();
    if total < n {
        return None;
    }
    loop {
        if let Some(x) = solve_active_set(rows, rhs, &combo, n) {
            let feasible = rows.iter().zip(rhs.iter()).all(|(row, &b)| {
                let lhs: f64 = row.iter().zip(x.iter()).map(|(&a, &v)| a * v).sum();
                let scale: f64 =
                    b.abs() + row.iter().zip(x.iter()).map(|(&a, &v)| (a * v).abs()).sum::<f64>();
                lhs <= b + 1e-6 + 1e-11 * scale
            });
            if feasible {
                let val: f64 = obj.iter().zip(x.iter()).map(|(&c, &v)| c * v).sum();
                if best.as_ref().map_or(true, |(bv, _)| val < *bv) {
                    best = Some((val, x));
                }
            }
        }
        // Next n-combination of row indices in lexicographic order.
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if combo[i] != i + total - n {
                break;
            }
            if i == 0 {
                return best;
            }
        }
        combo[i] += 1;
        for j in i + 1..n {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

/// Solve the square active-set system `rows[combo] x = rhs[combo]`.
fn solve_active_set(rows: &[Vec<f64>], rhs: &[f64], combo: &[usize], n: usize) -> Option<Vec<f64>> {
    let mut a = vec![0.0; n * n];
    let mut b = vec![0.0; n];
    let mut scale = 0.0f64;
    for (r, &idx) in combo.iter().enumerate() {
        for j in 0..n {
            a[r * n + j] = rows[idx][j];
            scale = scale.max(rows[idx][j].abs());
        }
        b[r] = rhs[idx];
    }
    if scale == 0.0 {
        return None;
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if a[piv * n + col].abs() <= 1e-9 * scale {
            return None;
        }
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            b.swap(col, piv);
        }
        let inv = 1.0 / a[col * n + col];
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r * n + col] * inv;
            if f != 0.0 {
                for j in col..n {
                    a[r * n + j] -= f * a[col * n + j];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|j| b[j] / a[j * n + j]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(obj: &[f64], rows: &[&[f64]], rhs: &[f64]) -> DenseLP {
        DenseLP::new(
            obj.to_vec(),
            rows.iter().map(|r| r.to_vec()).collect(),
            rhs.to_vec(),
        )
        .unwrap()
    }

    fn assert_optimal(outcome: &LPOutcome, value: f64) -> (Vec<f64>, Vec<f64>) {
        match outcome {
            LPOutcome::Optimal { x, duals, value: v } => {
                assert!((v - value).abs() < 1e-7, "value {} vs expected {}", v, value);
                (x.clone(), duals.clone())
            }
            other => panic!("expected optimal({}), got {:?}", value, other),
        }
    }

    #[test]
    fn nonnegativity_corner() {
        let p = lp(&[1.0, 1.0], &[&[-1.0, 0.0], &[0.0, -1.0]], &[0.0, 0.0]);
        let out = solve_lp(&p, SOLVER_TOL).unwrap();
        let (x, duals) = assert_optimal(&out, 0.0);
        assert!(x[0].abs() < 1e-9 && x[1].abs() < 1e-9);
        assert!((duals[0] - 1.0).abs() < 1e-9 && (duals[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unbounded_half_plane() {
        let p = lp(&[1.0], &[&[1.0]], &[0.0]);
        assert_eq!(solve_lp(&p, SOLVER_TOL).unwrap(), LPOutcome::Unbounded);
    }

    #[test]
    fn infeasible_pair() {
        let p = lp(&[0.0], &[&[1.0], &[-1.0]], &[-1.0, 0.0]);
        assert_eq!(solve_lp(&p, SOLVER_TOL).unwrap(), LPOutcome::Infeasible);
    }

    #[test]
    fn shifted_corner_exercises_phase_one() {
        // x1 >= 1, x2 >= 2 written as rows with negative rhs.
        let p = lp(
            &[1.0, 1.0],
            &[&[-1.0, 0.0], &[0.0, -1.0]],
            &[-1.0, -2.0],
        );
        let out = solve_lp(&p, SOLVER_TOL).unwrap();
        let (x, duals) = assert_optimal(&out, 3.0);
        assert!((x[0] - 1.0).abs() < 1e-9 && (x[1] - 2.0).abs() < 1e-9);
        assert!((duals[0] - 1.0).abs() < 1e-9 && (duals[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn duals_certify_the_value() {
        let p = lp(
            &[-1.0, -1.0],
            &[&[1.0, 0.0], &[0.0, 1.0], &[-1.0, 0.0], &[0.0, -1.0]],
            &[2.0, 3.0, 0.0, 0.0],
        );
        let out = solve_lp(&p, SOLVER_TOL).unwrap();
        let (x, duals) = assert_optimal(&out, -5.0);
        assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 3.0).abs() < 1e-9);
        // A'duals = -c and -b'duals = value.
        for j in 0..2 {
            let col: f64 = p.rows.iter().zip(duals.iter()).map(|(r, &l)| r[j] * l).sum();
            assert!((col - 1.0).abs() < 1e-8);
        }
        let bound: f64 = -p.rhs.iter().zip(duals.iter()).map(|(&b, &l)| b * l).sum::<f64>();
        assert!((bound + 5.0).abs() < 1e-8);
    }

    #[test]
    fn dual_lp_on_two_band_rows() {
        // Rows a_0 = (0,-1), a_1 = (-1,0) with b = 0, objective (1,1):
        // multipliers (1,1), dual value 0.
        let p = lp(&[1.0, 1.0], &[&[0.0, -1.0], &[-1.0, 0.0]], &[0.0, 0.0]);
        match solve_dual_lp(&p, SOLVER_TOL).unwrap() {
            LPOutcome::Optimal { x, value, duals } => {
                assert!((x[0] - 1.0).abs() < 1e-9 && (x[1] - 1.0).abs() < 1e-9);
                assert!(value.abs() < 1e-9);
                // The equality multipliers are a primal-feasible point.
                for (row, &b) in p.rows.iter().zip(p.rhs.iter()) {
                    let lhs: f64 = row.iter().zip(duals.iter()).map(|(&a, &v)| a * v).sum();
                    assert!(lhs <= b + 1e-8);
                }
            }
            other => panic!("expected optimal, got {:?}", other),
        }
    }

    #[test]
    fn dual_lp_midpoint_row() {
        let p = lp(&[1.0, 1.0], &[&[-0.5, -0.5]], &[-0.25]);
        match solve_dual_lp(&p, SOLVER_TOL).unwrap() {
            LPOutcome::Optimal { x, value, .. } => {
                assert!((x[0] - 2.0).abs() < 1e-9);
                assert!((value - 0.5).abs() < 1e-9);
            }
            other => panic!("expected optimal, got {:?}", other),
        }
    }

    #[test]
    fn dual_lp_infeasible_when_no_multiplier_matches() {
        // Rows (-1, -k(k+1)) can never combine to -c = (0, -1): the first
        // coordinate forces every multiplier to zero.
        let p = lp(&[0.0, 1.0], &[&[-1.0, -2.0], &[-1.0, -6.0]], &[-3.0, -5.0]);
        assert_eq!(solve_dual_lp(&p, SOLVER_TOL).unwrap(), LPOutcome::Infeasible);
    }

    #[test]
    fn dual_lp_with_dependent_equality_row() {
        // A' has a zero row matched by c_1 = 0: consistent but dependent.
        let p = lp(&[0.0, 1.0], &[&[0.0, -1.0]], &[0.0]);
        match solve_dual_lp(&p, SOLVER_TOL).unwrap() {
            LPOutcome::Optimal { x, value, .. } => {
                assert!((x[0] - 1.0).abs() < 1e-9);
                assert!(value.abs() < 1e-9);
            }
            other => panic!("expected optimal, got {:?}", other),
        }
    }

    #[test]
    fn oracle_agrees_on_the_three_statuses() {
        let corner = lp(&[1.0, 1.0], &[&[-1.0, 0.0], &[0.0, -1.0]], &[0.0, 0.0]);
        match vertex_oracle(&corner).unwrap() {
            LPOutcome::Optimal { value, .. } => assert!(value.abs() < 1e-7),
            other => panic!("expected optimal, got {:?}", other),
        }

        let unbounded = lp(&[1.0], &[&[1.0]], &[0.0]);
        assert_eq!(vertex_oracle(&unbounded).unwrap(), LPOutcome::Unbounded);

        let infeasible = lp(&[0.0], &[&[1.0], &[-1.0]], &[-1.0, 0.0]);
        assert_eq!(vertex_oracle(&infeasible).unwrap(), LPOutcome::Infeasible);
    }

    #[test]
    fn oracle_on_three_band_rows() {
        let p = lp(
            &[1.0, 1.0],
            &[&[0.0, -1.0], &[-0.5, -0.5], &[-1.0, 0.0]],
            &[0.0, -0.25, 0.0],
        );
        match vertex_oracle(&p).unwrap() {
            LPOutcome::Optimal { value, x, .. } => {
                assert!((value - 0.5).abs() < 1e-7);
                // Any optimal point works; it must be feasible.
                for (row, &b) in p.rows.iter().zip(p.rhs.iter()) {
                    let lhs: f64 = row.iter().zip(x.iter()).map(|(&a, &v)| a * v).sum();
                    assert!(lhs <= b + 1e-7);
                }
            }
            other => panic!("expected optimal, got {:?}", other),
        }
    }

    #[test]
    fn oracle_size_guard() {
        let p = lp(&[0.0; 7], &[], &[]);
        assert!(matches!(vertex_oracle(&p), Err(Error::SizeGuard(_))));
    }

    #[test]
    fn bounded_lp_without_vertices() {
        // min x1 s.t. x1 >= 0 in two variables: the optimal face is a line.
        let p = lp(&[1.0, 0.0], &[&[-1.0, 0.0]], &[0.0]);
        let out = solve_lp(&p, SOLVER_TOL).unwrap();
        assert_optimal(&out, 0.0);
        match vertex_oracle(&p).unwrap() {
            LPOutcome::Optimal { value, .. } => assert!(value.abs() < 1e-7),
            other => panic!("expected optimal, got {:?}", other),
        }
    }

    #[test]
    fn extended_real_order_and_arithmetic() {
        use ExtendedReal::*;
        assert!(MinusInf < Finite(-1e300));
        assert!(Finite(1e300) < PlusInf);
        assert!(MinusInf.le_with_slack(&MinusInf, 0.0));
        assert!(Finite(1.0).le_with_slack(&Finite(1.0 - 1e-9), 1e-8));
        assert!(!PlusInf.le_with_slack(&Finite(1e300), 0.0));

        assert_eq!(PlusInf.sub(&PlusInf), None);
        assert_eq!(MinusInf.sub(&MinusInf), None);
        assert_eq!(PlusInf.sub(&MinusInf), Some(PlusInf));
        assert_eq!(Finite(3.0).sub(&Finite(1.0)), Some(Finite(2.0)));
        assert_eq!(Finite(1.0).sub(&MinusInf), Some(PlusInf));

        // 0 * inf = 0 by convention.
        assert_eq!(PlusInf.scale(0.0), Finite(0.0));
        assert_eq!(MinusInf.scale(0.0), Finite(0.0));
        assert_eq!(MinusInf.scale(2.0), MinusInf);
        assert_eq!(Finite(2.0).scale(3.0), Finite(6.0));
    }

    #[test]
    fn display_formats() {
        assert_eq!(ExtendedReal::MinusInf.to_string(), "-inf");
        assert_eq!(ExtendedReal::PlusInf.to_string(), "inf");
        assert_eq!(ExtendedReal::Finite(0.5).to_string(), "0.500000000000");
        assert_eq!(ExtendedReal::Finite(0.0).to_string(), "0");
        assert_eq!(format_significant(-0.75, 12), "-0.750000000000");
        assert_eq!(format_significant(2.0, 3), "2.00");
    }
}
