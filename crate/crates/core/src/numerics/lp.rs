//! Dense phase-1 simplex for `A x = b, x >= 0`.

use crate::error::{dimension, Result};
use crate::scalar::Scalar;

const MAX_PIVOTS: usize = 200_000;

#[derive(Clone, Debug, PartialEq)]
pub struct LinearFeasibilityProblem<T> {
    a: Vec<Vec<T>>,
    b: Vec<T>,
    n_vars: usize,
}

impl<T: Scalar> LinearFeasibilityProblem<T> {
    pub fn new(a: Vec<Vec<T>>, b: Vec<T>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(dimension(format!(
                "{} rows but {} right-hand sides",
                a.len(),
                b.len()
            )));
        }
        let n_vars = a.first().map_or(0, |r| r.len());
        for (k, row) in a.iter().enumerate() {
            if row.len() != n_vars {
                return Err(dimension(format!(
                    "row {k} has {} columns, expected {n_vars}",
                    row.len()
                )));
            }
            if row.iter().any(|x| !x.is_finite()) || !b[k].is_finite() {
                return Err(dimension(format!("row {k} has a non-finite entry")));
            }
        }
        Ok(LinearFeasibilityProblem { a, b, n_vars })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_rows(&self) -> usize {
        self.a.len()
    }

    /// Largest absolute violation of `A x = b`.
    pub fn residual(&self, x: &[T]) -> T {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, &bi)| {
                let lhs: T = row.iter().zip(x).map(|(&r, &v)| r * v).sum();
                (lhs - bi).abs()
            })
            .fold(T::zero(), T::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    /// Basic feasible solution.
    Feasible(Vec<T>),
    Infeasible {
        phase1_optimum: T,
    },
    Indeterminate {
        phase1_optimum: T,
        residual: T,
    },
}

impl<T: Scalar> LpOutcome<T> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpOutcome::Feasible(_))
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible { .. })
    }

    pub fn describe(&self) -> String {
        match self {
            LpOutcome::Feasible(_) => "feasible".into(),
            LpOutcome::Infeasible { phase1_optimum } => {
                format!("infeasible, phase-1 optimum {phase1_optimum}")
            }
            LpOutcome::Indeterminate {
                phase1_optimum,
                residual,
            } => {
                format!("indeterminate, phase-1 optimum {phase1_optimum}, residual {residual}")
            }
        }
    }
}

/// Phase-1 simplex with Bland's rule.
///
/// Feasible when the recovered point has residual below `1e-9`, infeasible when
/// the phase-1 optimum exceeds `1e-7`, indeterminate otherwise.
pub fn lp_feasible<T: Scalar>(problem: &LinearFeasibilityProblem<T>) -> Result<LpOutcome<T>> {
    let m = problem.n_rows();
    let n = problem.n_vars;
    let feas_tol = T::tol(1e-9);
    let infeas_tol = T::tol(1e-7);
    let pivot_eps = T::tol(1e-12);
    if m == 0 {
        return Ok(LpOutcome::Feasible(vec![T::zero(); n]));
    }
    let width = n + m + 1;
    let rhs = n + m;
    let mut tab: Vec<Vec<T>> = Vec::with_capacity(m);
    for (k, row) in problem.a.iter().enumerate() {
        let sign = if problem.b[k] < T::zero() {
            -T::one()
        } else {
            T::one()
        };
        let mut r = vec![T::zero(); width];
        for j in 0..n {
            r[j] = sign * row[j];
        }
        r[n + k] = T::one();
        r[rhs] = sign * problem.b[k];
        tab.push(r);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    // reduced costs of the phase-1 objective (sum of artificials)
    let mut cost = vec![T::zero(); width];
    for r in &tab {
        for j in 0..n {
            cost[j] = cost[j] - r[j];
        }
        cost[rhs] = cost[rhs] - r[rhs];
    }

    let mut pivots = 0;
    loop {
        let entering = (0..n + m).find(|&j| cost[j] < -pivot_eps);
        let Some(col) = entering else { break };
        let mut leave: Option<(usize, T)> = None;
        for (k, r) in tab.iter().enumerate() {
            if r[col] > pivot_eps {
                let ratio = r[rhs] / r[col];
                leave = match leave {
                    None => Some((k, ratio)),
                    Some((lk, lr)) => {
                        if ratio < lr - pivot_eps
                            || (ratio <= lr + pivot_eps && basis[k] < basis[lk])
                        {
                            Some((k, ratio))
                        } else {
                            Some((lk, lr))
                        }
                    }
                };
            }
        }
        let Some((prow, _)) = leave else {
            // unbounded direction cannot occur in phase 1; treat column as unusable
            cost[col] = T::zero();
            continue;
        };
        pivot(&mut tab, &mut cost, prow, col);
        basis[prow] = col;
        pivots += 1;
        if pivots > MAX_PIVOTS {
            break;
        }
    }

    let phase1 = (-cost[rhs]).max(T::zero());
    if phase1 > infeas_tol {
        return Ok(LpOutcome::Infeasible {
            phase1_optimum: phase1,
        });
    }
    let mut x = vec![T::zero(); n];
    for (k, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = tab[k][rhs].max(T::zero());
        }
    }
    let residual = problem.residual(&x);
    if residual < feas_tol {
        Ok(LpOutcome::Feasible(x))
    } else {
        Ok(LpOutcome::Indeterminate {
            phase1_optimum: phase1,
            residual,
        })
    }
}

fn pivot<T: Scalar>(tab: &mut [Vec<T>], cost: &mut [T], prow: usize, col: usize) {
    let p = tab[prow][col];
    for v in tab[prow].iter_mut() {
        *v = *v / p;
    }
    let pr = tab[prow].clone();
    for (k, r) in tab.iter_mut().enumerate() {
        if k == prow {
            continue;
        }
        let f = r[col];
        if f != T::zero() {
            for (v, &q) in r.iter_mut().zip(&pr) {
                *v = *v - f * q;
            }
        }
    }
    let f = cost[col];
    if f != T::zero() {
        for (v, &q) in cost.iter_mut().zip(&pr) {
            *v = *v - f * q;
        }
    }
}
