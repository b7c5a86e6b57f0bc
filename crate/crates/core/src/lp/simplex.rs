//! Dense two-phase tableau simplex on equality standard form:
//! minimize `obj'y` subject to `mat y = rhs`, `y >= 0`.
//!
//! Rows with a negative right-hand side are negated up front. Each row gets
//! an artificial column; rows whose matrix already contains an exact unit
//! column start from that column instead, so systems with a feasible slack
//! basis skip phase one entirely. Pivoting uses Dantzig's rule and falls
//! back to Bland's rule permanently once a long run of degenerate pivots is
//! detected, which keeps termination guaranteed.

use crate::Error;

#[derive(Clone, Debug)]
pub(crate) enum EqOutcome {
    Optimal {
        y: Vec<f64>,
        /// Multipliers `p` of the equality rows, for the rows as given
        /// (before internal sign flips): `p' mat <= obj` and `p' rhs = value`.
        row_duals: Vec<f64>,
        value: f64,
    },
    Infeasible,
    Unbounded,
}

struct Tableau {
    m: usize,
    k: usize,
    width: usize, // k structural columns + m artificial columns
    tab: Vec<f64>,
    rhs: Vec<f64>,
    d: Vec<f64>, // reduced-cost row for the current phase
    basis: Vec<usize>,
    sigma: Vec<f64>, // +1 / -1 row sign applied during setup
    piv_row: Vec<f64>,
    bland: bool,
    degenerate_streak: usize,
    iterations: usize,
    max_iterations: usize,
    tol: f64,
}

impl Tableau {
    fn is_artificial(&self, col: usize) -> bool {
        col >= self.k
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let width = self.width;
        let piv = self.tab[r * width + j];
        let inv = 1.0 / piv;
        {
            let row = &mut self.tab[r * width..(r + 1) * width];
            for x in row.iter_mut() {
                *x *= inv;
            }
            row[j] = 1.0;
            self.piv_row.copy_from_slice(row);
        }
        self.rhs[r] *= inv;
        let piv_rhs = self.rhs[r];
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.tab[i * width + j];
            if f != 0.0 {
                let row = &mut self.tab[i * width..(i + 1) * width];
                for (x, &p) in row.iter_mut().zip(self.piv_row.iter()) {
                    *x -= f * p;
                }
                row[j] = 0.0;
                self.rhs[i] -= f * piv_rhs;
                if self.rhs[i] < 0.0 && self.rhs[i] > -1e-11 {
                    self.rhs[i] = 0.0;
                }
            }
        }
        let f = self.d[j];
        if f != 0.0 {
            for (x, &p) in self.d.iter_mut().zip(self.piv_row.iter()) {
                *x -= f * p;
            }
            self.d[j] = 0.0;
        }
        self.basis[r] = j;
    }

    /// Entering column for the current reduced costs, artificials barred.
    fn entering(&self) -> Option<usize> {
        if self.bland {
            (0..self.k).find(|&j| self.d[j] < -self.tol)
        } else {
            let mut best = None;
            let mut best_val = -self.tol;
            for j in 0..self.k {
                if self.d[j] < best_val {
                    best_val = self.d[j];
                    best = Some(j);
                }
            }
            best
        }
    }

    /// Standard ratio test; ties broken on the smallest basic variable.
    fn leaving(&self, j: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.m {
            let a = self.tab[i * self.width + j];
            if a > self.tol {
                let theta = self.rhs[i].max(0.0) / a;
                match best {
                    Some((bi, bt)) => {
                        if theta < bt - 1e-12
                            || (theta <= bt + 1e-12 && self.basis[i] < self.basis[bi])
                        {
                            best = Some((i, theta));
                        }
                    }
                    None => best = Some((i, theta)),
                }
            }
        }
        best.map(|(i, _)| i)
    }

    /// Row of a basic artificial sitting at zero that the entering column
    /// touches; pivoting there evicts the artificial without moving the
    /// current point.
    fn artificial_exit_row(&self, j: usize) -> Option<usize> {
        (0..self.m).find(|&i| {
            self.is_artificial(self.basis[i])
                && self.rhs[i].abs() <= self.tol
                && self.tab[i * self.width + j].abs() > self.tol
        })
    }

    fn step(&mut self, j: usize) -> Result<bool, Error> {
        self.iterations += 1;
        if self.iterations > self.max_iterations {
            return Err(Error::SolverFailure(format!(
                "simplex iteration limit ({}) reached",
                self.max_iterations
            )));
        }
        if let Some(r) = self.artificial_exit_row(j) {
            self.pivot(r, j);
            self.degenerate_streak += 1;
        } else {
            let r = match self.leaving(j) {
                Some(r) => r,
                None => return Ok(false), // column unbounded below
            };
            let theta = self.rhs[r].max(0.0) / self.tab[r * self.width + j];
            if theta <= 1e-12 {
                self.degenerate_streak += 1;
            } else {
                self.degenerate_streak = 0;
            }
            self.pivot(r, j);
        }
        if !self.bland && self.degenerate_streak > 50 + self.m {
            self.bland = true;
        }
        Ok(true)
    }

    /// Reduced costs `obj_j - p' col_j` for the given column costs, where
    /// `p' = cost_B B^-1` comes from the current basis.
    fn reset_costs(&mut self, col_cost: impl Fn(usize) -> f64) {
        let mut d = vec![0.0; self.width];
        for (j, slot) in d.iter_mut().enumerate() {
            *slot = col_cost(j);
        }
        for i in 0..self.m {
            let cb = col_cost(self.basis[i]);
            if cb != 0.0 {
                let row = &self.tab[i * self.width..(i + 1) * self.width];
                for (slot, &a) in d.iter_mut().zip(row.iter()) {
                    *slot -= cb * a;
                }
            }
        }
        self.d = d;
    }
}

pub(crate) fn solve_eq_form(
    obj: &[f64],
    mat: &[f64],
    m: usize,
    k: usize,
    rhs_in: &[f64],
    tol: f64,
) -> Result<EqOutcome, Error> {
    debug_assert_eq!(mat.len(), m * k);
    debug_assert_eq!(rhs_in.len(), m);
    debug_assert_eq!(obj.len(), k);
    let width = k + m;
    let mut tab = vec![0.0; m * width];
    let mut rhs = vec![0.0; m];
    let mut sigma = vec![1.0; m];
    for i in 0..m {
        let s = if rhs_in[i] < 0.0 { -1.0 } else { 1.0 };
        sigma[i] = s;
        rhs[i] = s * rhs_in[i];
        for j in 0..k {
            tab[i * width + j] = s * mat[i * k + j];
        }
        tab[i * width + k + i] = 1.0;
    }

    // Exact unit columns give a head start: those rows need no phase-one work.
    let mut basis = vec![usize::MAX; m];
    let mut col_used = vec![false; k];
    for i in 0..m {
        for j in 0..k {
            if col_used[j] || tab[i * width + j] != 1.0 {
                continue;
            }
            let is_unit = (0..m).all(|r| r == i || tab[r * width + j] == 0.0);
            if is_unit {
                basis[i] = j;
                col_used[j] = true;
                break;
            }
        }
        if basis[i] == usize::MAX {
            basis[i] = k + i;
        }
    }

    let mut t = Tableau {
        m,
        k,
        width,
        tab,
        rhs,
        d: Vec::new(),
        basis,
        sigma,
        piv_row: vec![0.0; width],
        bland: false,
        degenerate_streak: 0,
        iterations: 0,
        max_iterations: 2000 + 20 * (m + width),
        tol,
    };

    // Phase one: minimize the sum of basic artificials.
    let needs_phase_one = (0..m).any(|i| t.is_artificial(t.basis[i]));
    if needs_phase_one {
        let kk = t.k;
        t.reset_costs(|j| if j >= kk { 1.0 } else { 0.0 });
        loop {
            let j = match t.entering() {
                Some(j) => j,
                None => break,
            };
            if !t.step(j)? {
                // The phase-one objective is bounded below by zero; an
                // unbounded column here means the tableau lost coherence.
                return Err(Error::SolverFailure(
                    "phase one reported an unbounded direction".into(),
                ));
            }
        }
        let infeas: f64 = (0..m)
            .filter(|&i| t.is_artificial(t.basis[i]))
            .map(|i| t.rhs[i].max(0.0))
            .sum();
        let scale = rhs_in.iter().fold(1.0f64, |acc, &b| acc.max(b.abs()));
        if infeas > tol * scale {
            return Ok(EqOutcome::Infeasible);
        }
        // Evict artificials that linger in the basis at level zero. Rows
        // with no usable structural entry are dependent; their artificial
        // stays basic at zero and is harmless.
        for r in 0..m {
            if !t.is_artificial(t.basis[r]) {
                continue;
            }
            let j_opt = (0..k).find(|&j| t.tab[r * t.width + j].abs() > 1e-7);
            if let Some(j) = j_opt {
                t.pivot(r, j);
            }
        }
    }

    // Phase two.
    t.bland = false;
    t.degenerate_streak = 0;
    t.reset_costs(|j| if j < k { obj[j] } else { 0.0 });
    loop {
        let j = match t.entering() {
            Some(j) => j,
            None => break,
        };
        if !t.step(j)? {
            return Ok(EqOutcome::Unbounded);
        }
    }

    let mut y = vec![0.0; k];
    for i in 0..m {
        if t.basis[i] < k {
            y[t.basis[i]] = t.rhs[i].max(0.0);
        }
    }
    let value = obj.iter().zip(y.iter()).map(|(&c, &v)| c * v).sum();
    // Reduced cost of row i's artificial column is -p_i in the sign-flipped
    // system; undo the flip to report multipliers for the rows as given.
    let row_duals = (0..m).map(|i| -t.sigma[i] * t.d[k + i]).collect();
    Ok(EqOutcome::Optimal { y, row_duals, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(obj: &[f64], rows: &[&[f64]], rhs: &[f64]) -> EqOutcome {
        let k = obj.len();
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        solve_eq_form(obj, &flat, rows.len(), k, rhs, 1e-9).unwrap()
    }

    #[test]
    fn basic_equality_problem() {
        // min y1 + y2 s.t. y1 + y2 = 2, y1 - y2 = 0  =>  y = (1, 1).
        match solve(&[1.0, 1.0], &[&[1.0, 1.0], &[1.0, -1.0]], &[2.0, 0.0]) {
            EqOutcome::Optimal { y, value, .. } => {
                assert!((y[0] - 1.0).abs() < 1e-9 && (y[1] - 1.0).abs() < 1e-9);
                assert!((value - 2.0).abs() < 1e-9);
            }
            other => panic!("expected optimal, got {:?}", other),
        }
    }

    #[test]
    fn detects_infeasible_system() {
        // y1 = 1 and y1 = 2 cannot both hold.
        match solve(&[0.0], &[&[1.0], &[1.0]], &[1.0, 2.0]) {
            EqOutcome::Infeasible => {}
            other => panic!("expected infeasible, got {:?}", other),
        }
    }

    #[test]
    fn detects_unbounded_objective() {
        // min y1 - y2 s.t. y1 - y2 = 0: objective 0 on the feasible ray...
        // use min -y1 s.t. y1 - y2 = 0 instead, unbounded along (1, 1).
        match solve(&[-1.0, 0.0], &[&[1.0, -1.0]], &[0.0]) {
            EqOutcome::Unbounded => {}
            other => panic!("expected unbounded, got {:?}", other),
        }
    }

    #[test]
    fn negative_rhs_rows_are_flipped() {
        // min y1 s.t. -y1 = -3.
        match solve(&[1.0], &[&[-1.0]], &[-3.0]) {
            EqOutcome::Optimal { y, value, .. } => {
                assert!((y[0] - 3.0).abs() < 1e-9);
                assert!((value - 3.0).abs() < 1e-9);
            }
            other => panic!("expected optimal, got {:?}", other),
        }
    }

    #[test]
    fn dependent_rows_are_tolerated() {
        // Second row is twice the first; consistent, so still optimal.
        match solve(&[1.0, 0.0], &[&[1.0, 1.0], &[2.0, 2.0]], &[1.0, 2.0]) {
            EqOutcome::Optimal { y, value, .. } => {
                assert!((y[1] - 1.0).abs() < 1e-9);
                assert!(value.abs() < 1e-9);
            }
            other => panic!("expected optimal, got {:?}", other),
        }
    }

    #[test]
    fn row_duals_price_the_rhs() {
        // min 3 y1 + 2 y2 s.t. y1 + y2 = 4. Optimum picks y2, dual = 2.
        match solve(&[3.0, 2.0], &[&[1.0, 1.0]], &[4.0]) {
            EqOutcome::Optimal { row_duals, value, .. } => {
                assert!((value - 8.0).abs() < 1e-9);
                assert!((row_duals[0] - 2.0).abs() < 1e-9);
            }
            other => panic!("expected optimal, got {:?}", other),
        }
    }

    #[test]
    fn row_duals_follow_the_original_row_signs() {
        // Same problem written with a negated row: multiplier flips too.
        match solve(&[3.0, 2.0], &[&[-1.0, -1.0]], &[-4.0]) {
            EqOutcome::Optimal { row_duals, value, .. } => {
                assert!((value - 8.0).abs() < 1e-9);
                assert!((row_duals[0] + 2.0).abs() < 1e-9);
            }
            other => panic!("expected optimal, got {:?}", other),
        }
    }
}
