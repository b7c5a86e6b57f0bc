//! Probes of polyhedral cones, phrased as small LPs over the simplex.
//!
//! Two complementary descriptions appear: cones cut out by inequality rows
//! (`{x : rows x <= 0}`) and cones spanned by generators
//! (`{sum mu_i g_i : mu >= 0}`). Keeping both probe paths independent lets
//! higher layers cross-check one against the other.

use super::{solve_eq_form, solve_lp, DenseLP, EqOutcome, LPOutcome};
use crate::Error;

/// Is `{x : rows x <= 0}` a linear subspace?
///
/// Equivalent to: for every row `r` the LP `min r'x` over the cone is
/// bounded (necessarily with value zero), i.e. the cone lies inside
/// `{rows x = 0}`. Since each `r'x` is nonpositive on the cone, their sum
/// vanishes identically exactly when every term does, so a single LP on the
/// summed objective decides all rows at once.
pub fn cone_row_subspace_test(rows: &[Vec<f64>], tol: f64) -> Result<bool, Error> {
    if rows.is_empty() {
        return Err(Error::InvalidArgument("no rows describe the cone".into()));
    }
    let mut obj = vec![0.0; rows[0].len()];
    for r in rows {
        for (o, &v) in obj.iter_mut().zip(r.iter()) {
            *o += v;
        }
    }
    let lp = DenseLP::new(obj, rows.to_vec(), vec![0.0; rows.len()])?;
    match solve_lp(&lp, tol)? {
        LPOutcome::Unbounded => Ok(false),
        LPOutcome::Optimal { .. } => Ok(true),
        LPOutcome::Infeasible => {
            // Zero is always feasible for a homogeneous system.
            Err(Error::SolverFailure(
                "homogeneous cone LP reported infeasible".into(),
            ))
        }
    }
}

/// A nonzero point of `{x : ineq x <= 0, eq x = 0}`, if one exists.
///
/// Probes `max +-x_j` normalised by `+-x_j <= 1` for each coordinate; a
/// homogeneous cone either caps every probe at zero or lets it reach one.
pub fn cone_has_nonzero(
    ineq: &[Vec<f64>],
    eq: &[Vec<f64>],
    tol: f64,
) -> Result<Option<Vec<f64>>, Error> {
    let n = ineq
        .first()
        .or_else(|| eq.first())
        .map(|r| r.len())
        .ok_or_else(|| Error::InvalidArgument("no rows describe the cone".into()))?;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(ineq.len() + 2 * eq.len() + 1);
    rows.extend_from_slice(ineq);
    for e in eq {
        rows.push(e.clone());
        rows.push(e.iter().map(|&v| -v).collect());
    }
    let base_rhs = vec![0.0; rows.len()];
    for j in 0..n {
        for sign in [1.0, -1.0] {
            let mut cap = vec![0.0; n];
            cap[j] = sign;
            let mut probe_rows = rows.clone();
            probe_rows.push(cap);
            let mut rhs = base_rhs.clone();
            rhs.push(1.0);
            // max sign * x_j  =  -min(-sign * x_j), bounded by the cap row.
            let obj: Vec<f64> = (0..n).map(|i| if i == j { -sign } else { 0.0 }).collect();
            let lp = DenseLP::new(obj, probe_rows, rhs)?;
            match solve_lp(&lp, tol)? {
                LPOutcome::Optimal { x, value, .. } => {
                    if -value > 1e-7 {
                        return Ok(Some(x));
                    }
                }
                other => {
                    return Err(Error::SolverFailure(format!(
                        "capped cone probe did not come back optimal: {:?}",
                        other
                    )))
                }
            }
        }
    }
    Ok(None)
}

/// Does `v` lie in the cone spanned by `generators`?
///
/// Feasibility of `sum mu_i g_i = v`, `mu >= 0`, decided by phase one of the
/// simplex on the equality system.
pub fn cone_membership(v: &[f64], generators: &[Vec<f64>], tol: f64) -> Result<bool, Error> {
    let d = v.len();
    let k = generators.len();
    if k == 0 {
        return Ok(v.iter().all(|&c| c.abs() <= tol));
    }
    if let Some(bad) = generators.iter().position(|g| g.len() != d) {
        return Err(Error::InvalidArgument(format!(
            "generator {} has dimension {}, point has {}",
            bad,
            generators[bad].len(),
            d
        )));
    }
    let mut mat = vec![0.0; d * k];
    for (col, g) in generators.iter().enumerate() {
        for (row, &val) in g.iter().enumerate() {
            mat[row * k + col] = val;
        }
    }
    let obj = vec![0.0; k];
    match solve_eq_form(&obj, &mat, d, k, v, tol)? {
        EqOutcome::Infeasible => Ok(false),
        EqOutcome::Optimal { .. } => Ok(true),
        EqOutcome::Unbounded => Err(Error::SolverFailure(
            "feasibility system with zero objective reported unbounded".into(),
        )),
    }
}

/// Lineality space and pointed part of a finitely generated cone.
#[derive(Clone, Debug, PartialEq)]
pub struct LinealityDecomposition {
    /// Orthonormal basis of the lineality space.
    pub lineality_basis: Vec<Vec<f64>>,
    /// Generators projected onto the orthogonal complement of the lineality
    /// space; these span the pointed part. Zero rows correspond to
    /// generators inside the lineality space.
    pub projected: Vec<Vec<f64>>,
}

/// Split `cone(generators)` into its lineality space and pointed part.
///
/// A generator `g` spans a line of the cone exactly when `-g` is also in the
/// cone; the lineality space is the span of those generators.
pub fn lineality_and_pointed(
    generators: &[Vec<f64>],
    tol: f64,
) -> Result<LinealityDecomposition, Error> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for g in generators {
        let neg: Vec<f64> = g.iter().map(|&v| -v).collect();
        if cone_membership(&neg, generators, tol)? {
            orthonormal_extend(&mut basis, g, 1e-10);
        }
    }
    let projected = generators
        .iter()
        .map(|g| project_out(g, &basis))
        .collect();
    Ok(LinealityDecomposition {
        lineality_basis: basis,
        projected,
    })
}

fn project_out(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut w = v.to_vec();
    for e in basis {
        let dot: f64 = w.iter().zip(e.iter()).map(|(&a, &b)| a * b).sum();
        for (wi, &ei) in w.iter_mut().zip(e.iter()) {
            *wi -= dot * ei;
        }
    }
    w
}

/// Gram-Schmidt step: extend `basis` by the component of `v` orthogonal to
/// it, unless that component is negligible. Returns whether it grew.
pub(crate) fn orthonormal_extend(basis: &mut Vec<Vec<f64>>, v: &[f64], drop_tol: f64) -> bool {
    let vnorm = v.iter().map(|&a| a * a).sum::<f64>().sqrt();
    // Two projection passes for numerical hygiene.
    let w = project_out(&project_out(v, basis), basis);
    let norm = w.iter().map(|&a| a * a).sum::<f64>().sqrt();
    if norm <= drop_tol * (1.0 + vnorm) {
        return false;
    }
    basis.push(w.iter().map(|&a| a / norm).collect());
    true
}
