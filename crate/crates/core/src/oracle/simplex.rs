//! Dense two-phase simplex with Bland's rule.

#![allow(clippy::needless_range_loop)]

use nalgebra::DMatrix;

use crate::{Error, Result};

const PIVOT_TOL: f64 = 1e-10;
const FEASIBILITY_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 1_000_000;

/// Maximize `objective . x` subject to `eq_matrix x = eq_rhs` and
/// `bounds[j].0 <= x_j <= bounds[j].1`. Infinite bounds are allowed.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub eq_matrix: DMatrix<f64>,
    pub eq_rhs: Vec<f64>,
    pub bounds: Vec<(f64, f64)>,
}

impl LpProblem {
    /// All variables in `[0, inf)`.
    pub fn non_negative(objective: Vec<f64>, eq_matrix: DMatrix<f64>, eq_rhs: Vec<f64>) -> Self {
        let bounds = vec![(0.0, f64::INFINITY); objective.len()];
        Self {
            objective,
            eq_matrix,
            eq_rhs,
            bounds,
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        if self.eq_matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.eq_matrix.ncols(),
            });
        }
        if self.eq_matrix.nrows() != self.eq_rhs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.eq_matrix.nrows(),
                found: self.eq_rhs.len(),
            });
        }
        if self.bounds.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.bounds.len(),
            });
        }
        let finite = self.objective.iter().chain(&self.eq_rhs).chain(self.eq_matrix.iter());
        if finite.into_iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite LP data".into()));
        }
        for &(lo, hi) in &self.bounds {
            if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(Error::Numerical("invalid variable bound".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective_value: f64,
}

/// How an original variable maps onto standard-form columns.
#[derive(Debug, Clone, Copy)]
enum Column {
    /// `x = offset + sign * y`
    Single { col: usize, offset: f64, sign: f64 },
    /// `x = y+ - y-`
    Split { pos: usize, neg: usize },
}

struct Tableau {
    /// `rows x (cols + 1)`; the last column is the right-hand side.
    rows: Vec<Vec<f64>>,
    /// Reduced costs for minimization; the last entry is minus the objective.
    cost: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn cols(&self) -> usize {
        self.cost.len() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > MAX_PIVOTS {
            return Err(Error::Numerical("simplex pivot limit exceeded".into()));
        }
        let width = self.cost.len();
        let inv = 1.0 / self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v *= inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for k in 0..width {
                    row[k] -= f * pivot_row[k];
                }
                row[c] = 0.0;
            }
        }
        let f = self.cost[c];
        if f != 0.0 {
            for k in 0..width {
                self.cost[k] -= f * pivot_row[k];
            }
            self.cost[c] = 0.0;
        }
        self.basis[r] = c;
        Ok(())
    }

    /// Runs to optimality over the first `active` columns. Returns `false`
    /// when unbounded.
    fn optimize(&mut self, active: usize) -> Result<bool> {
        loop {
            let entering = (0..active).find(|&j| self.cost[j] < -PIVOT_TOL);
            let Some(c) = entering else {
                return Ok(true);
            };
            let rhs = self.cols();
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c] > PIVOT_TOL {
                    let ratio = row[rhs] / row[c];
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-15
                                || (ratio <= lr + 1e-15 && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, c)?,
            }
        }
    }
}

/// Solves the problem with a dense two-phase tableau.
pub fn simplex_solve(problem: &LpProblem) -> Result<LpSolution> {
    problem.validate()?;
    let n = problem.objective.len();
    let m = problem.eq_rhs.len();

    // standard form: A y = b, y >= 0
    let mut columns = Vec::with_capacity(n);
    let mut ncols = 0;
    let mut upper_rows: Vec<(usize, f64)> = Vec::new();
    for &(lo, hi) in &problem.bounds {
        if lo.is_finite() {
            columns.push(Column::Single {
                col: ncols,
                offset: lo,
                sign: 1.0,
            });
            if hi.is_finite() {
                upper_rows.push((ncols, hi - lo));
            }
            ncols += 1;
        } else if hi.is_finite() {
            columns.push(Column::Single {
                col: ncols,
                offset: hi,
                sign: -1.0,
            });
            ncols += 1;
        } else {
            columns.push(Column::Split {
                pos: ncols,
                neg: ncols + 1,
            });
            ncols += 2;
        }
    }
    let slack_start = ncols;
    ncols += upper_rows.len();
    let rows_total = m + upper_rows.len();

    let mut a = vec![vec![0.0; ncols]; rows_total];
    let mut b = vec![0.0; rows_total];
    let mut c = vec![0.0; ncols];
    for (j, col) in columns.iter().enumerate() {
        match *col {
            Column::Single { col, sign, .. } => {
                for i in 0..m {
                    a[i][col] = sign * problem.eq_matrix[(i, j)];
                }
                // minimize the negated objective
                c[col] = -sign * problem.objective[j];
            }
            Column::Split { pos, neg } => {
                for i in 0..m {
                    a[i][pos] = problem.eq_matrix[(i, j)];
                    a[i][neg] = -problem.eq_matrix[(i, j)];
                }
                c[pos] = -problem.objective[j];
                c[neg] = problem.objective[j];
            }
        }
    }
    for i in 0..m {
        let shift: f64 = columns
            .iter()
            .enumerate()
            .map(|(j, col)| match *col {
                Column::Single { offset, .. } => problem.eq_matrix[(i, j)] * offset,
                Column::Split { .. } => 0.0,
            })
            .sum();
        b[i] = problem.eq_rhs[i] - shift;
    }
    for (k, &(col, width)) in upper_rows.iter().enumerate() {
        a[m + k][col] = 1.0;
        a[m + k][slack_start + k] = 1.0;
        b[m + k] = width;
    }
    for i in 0..rows_total {
        if b[i] < 0.0 {
            b[i] = -b[i];
            for v in a[i].iter_mut() {
                *v = -*v;
            }
        }
    }

    // phase one with one artificial per row
    let width = ncols + rows_total + 1;
    let mut rows = Vec::with_capacity(rows_total);
    for i in 0..rows_total {
        let mut row = vec![0.0; width];
        row[..ncols].copy_from_slice(&a[i]);
        row[ncols + i] = 1.0;
        row[width - 1] = b[i];
        rows.push(row);
    }
    let mut cost = vec![0.0; width];
    for j in ncols..ncols + rows_total {
        cost[j] = 1.0;
    }
    for row in &rows {
        for k in 0..width {
            cost[k] -= row[k];
        }
    }
    for j in ncols..ncols + rows_total {
        cost[j] = 0.0;
    }
    let mut t = Tableau {
        rows,
        cost,
        basis: (ncols..ncols + rows_total).collect(),
        pivots: 0,
    };
    t.optimize(ncols)?;
    let scale = b.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    if -t.cost[width - 1] > FEASIBILITY_TOL * scale {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            values: Vec::new(),
            objective_value: f64::NAN,
        });
    }

    // drive artificials out of the basis, dropping redundant rows
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= ncols {
            match (0..ncols).find(|&j| t.rows[i][j].abs() > PIVOT_TOL) {
                Some(j) => {
                    t.pivot(i, j)?;
                    i += 1;
                }
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }
    for row in t.rows.iter_mut() {
        let rhs = row[width - 1];
        row.truncate(ncols);
        row.push(rhs);
    }
    let mut cost = c.clone();
    cost.push(0.0);
    for (r, &bj) in t.basis.iter().enumerate() {
        let cb = c[bj];
        if cb != 0.0 {
            for k in 0..=ncols {
                cost[k] -= cb * t.rows[r][k];
            }
        }
    }
    t.cost = cost;
    if !t.optimize(ncols)? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            values: Vec::new(),
            objective_value: f64::INFINITY,
        });
    }

    let mut y = vec![0.0; ncols];
    for (r, &bj) in t.basis.iter().enumerate() {
        y[bj] = t.rows[r][ncols];
    }
    let values: Vec<f64> = columns
        .iter()
        .map(|col| match *col {
            Column::Single { col, offset, sign } => offset + sign * y[col],
            Column::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    let objective_value = values
        .iter()
        .zip(&problem.objective)
        .map(|(x, c)| x * c)
        .sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        values,
        objective_value,
    })
}
