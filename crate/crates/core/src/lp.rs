//! Dense exact-rational linear programming.
//!
//! A two-phase primal simplex over `BigRational` with Bland's anti-cycling
//! rule: entering variable = lowest-index column with improving reduced cost,
//! leaving variable = lowest-index basic variable among the minimum ratios.
//! Everything is exact; optimal bases are reported together with the dual
//! multipliers read off the final tableau, and callers are expected to replay
//! feasibility and strong duality themselves before trusting a solution.
//!
//! The iteration counter is capped at `C(rows + columns, rows)` (the number
//! of possible bases); exceeding it is a hard internal error, which Bland's
//! rule makes unreachable.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowOp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct LpRow {
    pub coeffs: Vec<BigRational>,
    pub op: RowOp,
    pub rhs: BigRational,
}

/// A linear program over nonnegative variables.
#[derive(Debug, Clone)]
pub struct RationalLp {
    pub sense: Sense,
    pub objective: Vec<BigRational>,
    pub rows: Vec<LpRow>,
}

impl RationalLp {
    pub fn new(sense: Sense, objective: Vec<BigRational>) -> Self {
        RationalLp { sense, objective, rows: Vec::new() }
    }

    pub fn add_row(&mut self, coeffs: Vec<BigRational>, op: RowOp, rhs: BigRational) -> Result<()> {
        if coeffs.len() != self.objective.len() {
            return Err(Error::InvalidInput(format!(
                "row has {} coefficients, LP has {} variables",
                coeffs.len(),
                self.objective.len()
            )));
        }
        self.rows.push(LpRow { coeffs, op, rhs });
        Ok(())
    }
}

/// An optimal solution with the dual multipliers of the final basis.
///
/// `duals[i]` is the multiplier of original row `i`, signed so that for a
/// maximization problem `Σ_i duals[i]·row_i` dominates the objective
/// componentwise (and is dominated by it for minimization), with
/// `Σ_i duals[i]·rhs_i` equal to the optimal value, `duals[i] ≥ 0` on `≤`
/// rows of a maximization (resp. `≥` rows of a minimization), `≤ 0` on the
/// opposite inequalities, and free on equations.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub objective_value: BigRational,
    pub primal: Vec<BigRational>,
    pub duals: Vec<BigRational>,
    pub iterations: u64,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// rows × (ncols + 1); last column is the rhs.
    t: Vec<Vec<BigRational>>,
    /// Reduced-cost row: `c_j - z_j` per column, objective value (negated) at the end.
    obj: Vec<BigRational>,
    basis: Vec<usize>,
    ncols: usize,
    /// Columns barred from entering (artificials in phase 2).
    barred: Vec<bool>,
    iterations: u64,
    cap: BigUint,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let pivot = self.t[row][col].clone();
        for v in self.t[row].iter_mut() {
            if !v.is_zero() {
                *v /= &pivot;
            }
        }
        for r in 0..self.t.len() {
            if r == row || self.t[r][col].is_zero() {
                continue;
            }
            let factor = self.t[r][col].clone();
            for c in 0..=self.ncols {
                if self.t[row][c].is_zero() {
                    continue;
                }
                let delta = &factor * &self.t[row][c];
                self.t[r][c] -= delta;
            }
        }
        if !self.obj[col].is_zero() {
            let factor = self.obj[col].clone();
            for c in 0..=self.ncols {
                if self.t[row][c].is_zero() {
                    continue;
                }
                let delta = &factor * &self.t[row][c];
                self.obj[c] -= delta;
            }
        }
        self.basis[row] = col;
    }

    /// Runs Bland-rule pivots until optimality or unboundedness.
    fn run(&mut self) -> Result<bool> {
        loop {
            // Entering: lowest-index non-barred column with positive reduced cost.
            let mut entering = None;
            for j in 0..self.ncols {
                if !self.barred[j] && self.obj[j].is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                return Ok(true);
            };
            // Leaving: minimum ratio, ties broken by lowest basis index.
            let mut leaving: Option<(usize, BigRational)> = None;
            for r in 0..self.t.len() {
                if self.t[r][col].is_positive() {
                    let ratio = &self.t[r][self.ncols] / &self.t[r][col];
                    let better = match &leaving {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < *lratio || (ratio == *lratio && self.basis[r] < self.basis[*lr])
                        }
                    };
                    if better {
                        leaving = Some((r, ratio));
                    }
                }
            }
            let Some((row, _)) = leaving else {
                return Ok(false); // unbounded direction
            };
            self.pivot(row, col);
            self.iterations += 1;
            if BigUint::from(self.iterations) > self.cap {
                return Err(Error::VerificationFailed(format!(
                    "simplex exceeded the basis-count iteration cap after {} pivots",
                    self.iterations
                )));
            }
        }
    }
}

fn binomial(n: usize, k: usize) -> BigUint {
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Solves the LP exactly. Deterministic for fixed input.
pub fn solve(lp: &RationalLp) -> Result<LpOutcome> {
    let nvars = lp.objective.len();
    let nrows = lp.rows.len();

    // Internal form: maximize. Track row sign flips (rhs made nonnegative)
    // to restore dual signs at the end.
    let maximize = lp.sense == Sense::Maximize;
    let obj_sign = if maximize { BigRational::one() } else { -BigRational::one() };

    let mut row_coeffs: Vec<Vec<BigRational>> = Vec::with_capacity(nrows);
    let mut row_rhs: Vec<BigRational> = Vec::with_capacity(nrows);
    let mut row_ops: Vec<RowOp> = Vec::with_capacity(nrows);
    let mut flipped: Vec<bool> = Vec::with_capacity(nrows);
    for row in &lp.rows {
        if row.rhs.is_negative() {
            row_coeffs.push(row.coeffs.iter().map(|c| -c).collect());
            row_rhs.push(-&row.rhs);
            row_ops.push(match row.op {
                RowOp::Le => RowOp::Ge,
                RowOp::Ge => RowOp::Le,
                RowOp::Eq => RowOp::Eq,
            });
            flipped.push(true);
        } else {
            row_coeffs.push(row.coeffs.clone());
            row_rhs.push(row.rhs.clone());
            row_ops.push(row.op);
            flipped.push(false);
        }
    }

    // Column layout: structural | slacks/surplus (one per inequality) | artificials.
    let n_slack = row_ops.iter().filter(|op| **op != RowOp::Eq).count();
    let needs_artificial: Vec<bool> =
        row_ops.iter().map(|op| matches!(op, RowOp::Ge | RowOp::Eq)).collect();
    let n_art = needs_artificial.iter().filter(|b| **b).count();
    let ncols = nvars + n_slack + n_art;

    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(nrows);
    let mut basis = vec![usize::MAX; nrows];
    // Per original row: the column that started as ±e_i (for dual extraction).
    let mut unit_col = vec![(usize::MAX, false); nrows]; // (column, negated)
    {
        let mut slack_idx = 0;
        let mut art_idx = 0;
        for i in 0..nrows {
            let mut row = vec![BigRational::zero(); ncols + 1];
            row[..nvars].clone_from_slice(&row_coeffs[i]);
            match row_ops[i] {
                RowOp::Le => {
                    let col = nvars + slack_idx;
                    row[col] = BigRational::one();
                    basis[i] = col;
                    unit_col[i] = (col, false);
                    slack_idx += 1;
                }
                RowOp::Ge => {
                    let col = nvars + slack_idx;
                    row[col] = -BigRational::one();
                    unit_col[i] = (col, true);
                    slack_idx += 1;
                    let art = nvars + n_slack + art_idx;
                    row[art] = BigRational::one();
                    basis[i] = art;
                    art_idx += 1;
                }
                RowOp::Eq => {
                    let art = nvars + n_slack + art_idx;
                    row[art] = BigRational::one();
                    basis[i] = art;
                    unit_col[i] = (art, false);
                    art_idx += 1;
                }
            }
            row[ncols] = row_rhs[i].clone();
            t.push(row);
        }
    }

    let cap = binomial(ncols + nrows, nrows.min(ncols));
    let mut tab = Tableau {
        t,
        obj: vec![BigRational::zero(); ncols + 1],
        basis,
        ncols,
        barred: vec![false; ncols],
        iterations: 0,
        cap,
    };

    // Phase 1: maximize -Σ artificials, i.e. drive them to zero.
    if n_art > 0 {
        // Reduced costs start as c_j - z_j with c = 0 except -1 on
        // artificials, all of which are basic: add their rows back.
        for j in nvars + n_slack..ncols {
            tab.obj[j] = -BigRational::one();
        }
        for i in 0..nrows {
            if tab.basis[i] >= nvars + n_slack {
                for c in 0..=ncols {
                    let delta = tab.t[i][c].clone();
                    tab.obj[c] += delta;
                }
            }
        }
        let optimal = tab.run()?;
        debug_assert!(optimal, "phase 1 is bounded by construction");
        // obj[ncols] holds -(phase-1 value); feasible iff value is 0.
        if !tab.obj[ncols].is_zero() {
            return Ok(LpOutcome::Infeasible);
        }
        // Pivot remaining basic artificials out where possible.
        for i in 0..nrows {
            if tab.basis[i] >= nvars + n_slack {
                if let Some(col) = (0..nvars + n_slack).find(|&c| !tab.t[i][c].is_zero()) {
                    tab.pivot(i, col);
                }
                // Otherwise the row is redundant; the artificial stays basic at 0.
            }
        }
        for j in nvars + n_slack..ncols {
            tab.barred[j] = true;
        }
    }

    // Phase 2: real objective. Rebuild the reduced-cost row from scratch.
    for v in tab.obj.iter_mut() {
        *v = BigRational::zero();
    }
    let cost = |j: usize| -> BigRational {
        if j < nvars {
            &lp.objective[j] * &obj_sign
        } else {
            BigRational::zero()
        }
    };
    for j in 0..ncols {
        tab.obj[j] = cost(j);
    }
    for i in 0..nrows {
        let cb = cost(tab.basis[i]);
        if !cb.is_zero() {
            for c in 0..=ncols {
                let delta = &cb * &tab.t[i][c];
                tab.obj[c] -= delta;
            }
        }
    }
    let optimal = tab.run()?;
    if !optimal {
        return Ok(LpOutcome::Unbounded);
    }

    let mut primal = vec![BigRational::zero(); nvars];
    for i in 0..nrows {
        if tab.basis[i] < nvars {
            primal[tab.basis[i]] = tab.t[i][ncols].clone();
        }
    }
    let internal_value = -tab.obj[ncols].clone();
    let objective_value = &internal_value * &obj_sign;

    // Dual of internal row i: z_j of its original unit column, i.e.
    // cost(j) - obj[j]; negate if the unit column was -e_i, and negate again
    // if the row was sign-flipped during standardization. For a minimization
    // the internal problem was the negated objective, so flip once more.
    let mut duals = Vec::with_capacity(nrows);
    for i in 0..nrows {
        let (col, negated) = unit_col[i];
        let mut y = cost(col) - &tab.obj[col];
        if negated {
            y = -y;
        }
        if flipped[i] {
            y = -y;
        }
        duals.push(&y * &obj_sign);
    }

    Ok(LpOutcome::Optimal(LpSolution {
        objective_value,
        primal,
        duals,
        iterations: tab.iterations,
    }))
}

/// Replays weak-duality bookkeeping for a claimed optimal pair: primal
/// feasibility, dual feasibility with the documented sign conventions, and
/// exact equality of the two objective values. Returns an error naming the
/// first violated condition.
pub fn verify_solution(lp: &RationalLp, sol: &LpSolution) -> Result<()> {
    let nvars = lp.objective.len();
    if sol.primal.len() != nvars || sol.duals.len() != lp.rows.len() {
        return Err(Error::VerificationFailed("solution shape mismatch".into()));
    }
    if sol.primal.iter().any(|v| v.is_negative()) {
        return Err(Error::VerificationFailed("negative primal variable".into()));
    }
    for (i, row) in lp.rows.iter().enumerate() {
        let lhs: BigRational = row.coeffs.iter().zip(&sol.primal).map(|(c, x)| c * x).sum();
        let ok = match row.op {
            RowOp::Le => lhs <= row.rhs,
            RowOp::Ge => lhs >= row.rhs,
            RowOp::Eq => lhs == row.rhs,
        };
        if !ok {
            return Err(Error::VerificationFailed(format!("primal row {i} violated")));
        }
        let y = &sol.duals[i];
        let sign_ok = match (lp.sense, row.op) {
            (_, RowOp::Eq) => true,
            (Sense::Maximize, RowOp::Le) | (Sense::Minimize, RowOp::Ge) => !y.is_negative(),
            (Sense::Maximize, RowOp::Ge) | (Sense::Minimize, RowOp::Le) => !y.is_positive(),
        };
        if !sign_ok {
            return Err(Error::VerificationFailed(format!("dual sign on row {i}")));
        }
    }
    for j in 0..nvars {
        let combo: BigRational =
            lp.rows.iter().zip(&sol.duals).map(|(row, y)| &row.coeffs[j] * y).sum();
        let ok = match lp.sense {
            Sense::Maximize => combo >= lp.objective[j],
            Sense::Minimize => combo <= lp.objective[j],
        };
        if !ok {
            return Err(Error::VerificationFailed(format!("dual constraint on variable {j}")));
        }
    }
    let primal_value: BigRational = lp.objective.iter().zip(&sol.primal).map(|(c, x)| c * x).sum();
    if primal_value != sol.objective_value {
        return Err(Error::VerificationFailed("objective value mismatch".into()));
    }
    let dual_value: BigRational = lp.rows.iter().zip(&sol.duals).map(|(row, y)| &row.rhs * y).sum();
    if dual_value != sol.objective_value {
        return Err(Error::VerificationFailed("strong duality gap".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn lp_max(obj: Vec<BigRational>) -> RationalLp {
        RationalLp::new(Sense::Maximize, obj)
    }

    #[test]
    fn simple_max() {
        // max x + y s.t. x <= 2, y <= 3, x + y <= 4.
        let mut lp = lp_max(vec![rat_int(1), rat_int(1)]);
        lp.add_row(vec![rat_int(1), rat_int(0)], RowOp::Le, rat_int(2)).unwrap();
        lp.add_row(vec![rat_int(0), rat_int(1)], RowOp::Le, rat_int(3)).unwrap();
        lp.add_row(vec![rat_int(1), rat_int(1)], RowOp::Le, rat_int(4)).unwrap();
        let LpOutcome::Optimal(sol) = solve(&lp).unwrap() else { panic!("expected optimum") };
        assert_eq!(sol.objective_value, rat_int(4));
        verify_solution(&lp, &sol).unwrap();
    }

    #[test]
    fn min_with_ge_rows() {
        // min 3x + 2y s.t. x + y >= 2, x >= 1/2 -> optimum at x = 1/2, y = 3/2.
        let mut lp = RationalLp::new(Sense::Minimize, vec![rat_int(3), rat_int(2)]);
        lp.add_row(vec![rat_int(1), rat_int(1)], RowOp::Ge, rat_int(2)).unwrap();
        lp.add_row(vec![rat_int(1), rat_int(0)], RowOp::Ge, rat(1, 2)).unwrap();
        let LpOutcome::Optimal(sol) = solve(&lp).unwrap() else { panic!("expected optimum") };
        assert_eq!(sol.objective_value, rat(9, 2));
        assert_eq!(sol.primal, vec![rat(1, 2), rat(3, 2)]);
        verify_solution(&lp, &sol).unwrap();
    }

    #[test]
    fn equality_rows() {
        // max t s.t. y1 + y2 = 1, t - y1 <= 0, t - y2 <= 0 -> t = 1/2.
        let mut lp = lp_max(vec![rat_int(1), rat_int(0), rat_int(0)]);
        lp.add_row(vec![rat_int(0), rat_int(1), rat_int(1)], RowOp::Eq, rat_int(1)).unwrap();
        lp.add_row(vec![rat_int(1), rat_int(-1), rat_int(0)], RowOp::Le, rat_int(0)).unwrap();
        lp.add_row(vec![rat_int(1), rat_int(0), rat_int(-1)], RowOp::Le, rat_int(0)).unwrap();
        let LpOutcome::Optimal(sol) = solve(&lp).unwrap() else { panic!("expected optimum") };
        assert_eq!(sol.objective_value, rat(1, 2));
        verify_solution(&lp, &sol).unwrap();
    }

    #[test]
    fn infeasible_detected() {
        // x <= 1, x >= 2.
        let mut lp = lp_max(vec![rat_int(1)]);
        lp.add_row(vec![rat_int(1)], RowOp::Le, rat_int(1)).unwrap();
        lp.add_row(vec![rat_int(1)], RowOp::Ge, rat_int(2)).unwrap();
        assert!(matches!(solve(&lp).unwrap(), LpOutcome::Infeasible));
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = lp_max(vec![rat_int(1), rat_int(1)]);
        lp.add_row(vec![rat_int(1), rat_int(-1)], RowOp::Le, rat_int(1)).unwrap();
        assert!(matches!(solve(&lp).unwrap(), LpOutcome::Unbounded));
    }

    #[test]
    fn negative_rhs_standardization() {
        // min x s.t. -x <= -3  (i.e. x >= 3).
        let mut lp = RationalLp::new(Sense::Minimize, vec![rat_int(1)]);
        lp.add_row(vec![rat_int(-1)], RowOp::Le, rat_int(-3)).unwrap();
        let LpOutcome::Optimal(sol) = solve(&lp).unwrap() else { panic!("expected optimum") };
        assert_eq!(sol.objective_value, rat_int(3));
        verify_solution(&lp, &sol).unwrap();
    }

    #[test]
    fn degenerate_lp_terminates() {
        // Klee-Minty-ish degenerate rows; Bland must terminate.
        let mut lp = lp_max(vec![rat_int(2), rat_int(3), rat_int(1)]);
        lp.add_row(vec![rat_int(1), rat_int(1), rat_int(1)], RowOp::Le, rat_int(0)).unwrap();
        lp.add_row(vec![rat_int(1), rat_int(2), rat_int(0)], RowOp::Le, rat_int(0)).unwrap();
        lp.add_row(vec![rat_int(0), rat_int(1), rat_int(3)], RowOp::Le, rat_int(0)).unwrap();
        let LpOutcome::Optimal(sol) = solve(&lp).unwrap() else { panic!("expected optimum") };
        assert_eq!(sol.objective_value, rat_int(0));
        verify_solution(&lp, &sol).unwrap();
    }
}
