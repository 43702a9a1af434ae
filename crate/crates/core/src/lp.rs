//! Exact rational simplex with Bland's anti-cycling rule.
//!
//! Two entry points cover everything the analysis layer needs:
//! [`maximize`] for `max c·x  s.t.  A x <= b, x >= 0` with `b >= 0`
//! (slack basis start, used for the contextual fraction), and
//! [`feasibility`] for `A x = b, x >= 0` via phase-1 artificials (used
//! for hidden-variable decompositions and pinned-section systems).
//! Solutions carry exact dual data: an optimality certificate for
//! `maximize`, a Farkas certificate for infeasible systems. Both are
//! re-verified by direct arithmetic before being returned.

use num::{BigRational, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpError {
    Unbounded,
    BadInput(&'static str),
}

#[derive(Debug, Clone)]
pub struct Optimum {
    pub objective: BigRational,
    pub x: Vec<BigRational>,
    /// Dual prices for the `A x <= b` rows; verified to satisfy
    /// `y >= 0`, `Aᵀy >= c`, and `b·y = objective`.
    pub duals: Vec<BigRational>,
}

#[derive(Debug, Clone)]
pub enum Feasibility {
    Feasible(Vec<BigRational>),
    /// Farkas certificate `y` with `yᵀA >= 0` and `y·b < 0`.
    Infeasible(Vec<BigRational>),
}

struct Tableau {
    rows: Vec<Vec<BigRational>>, // m x (n + 1); last column is the rhs
    cost: Vec<BigRational>,      // n + 1; entries are z_j - c_j, last is the objective
    basis: Vec<usize>,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cost.len() - 1
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.rows[row][col].clone().recip();
        for v in self.rows[row].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..self.rows.len() {
            if r != row && !self.rows[r][col].is_zero() {
                let factor = self.rows[r][col].clone();
                for c in 0..self.rows[r].len() {
                    let v = &self.rows[r][c] - &factor * &self.rows[row][c];
                    self.rows[r][c] = v;
                }
            }
        }
        if !self.cost[col].is_zero() {
            let factor = self.cost[col].clone();
            for c in 0..self.cost.len() {
                let v = &self.cost[c] - &factor * &self.rows[row][c];
                self.cost[c] = v;
            }
        }
        self.basis[row] = col;
    }

    /// Runs primal simplex to optimality under Bland's rule.
    fn optimize(&mut self) -> Result<(), LpError> {
        let n = self.width();
        let rhs = n;
        loop {
            // Bland: first column with negative reduced cost.
            let Some(col) = (0..n).find(|&j| self.cost[j].is_negative()) else {
                return Ok(());
            };
            // Ratio test; ties broken by smallest basis variable index.
            let mut choice: Option<(usize, BigRational)> = None;
            for r in 0..self.rows.len() {
                if self.rows[r][col].is_positive() {
                    let ratio = &self.rows[r][rhs] / &self.rows[r][col];
                    let better = match &choice {
                        None => true,
                        Some((prev, best)) => {
                            ratio < *best || (ratio == *best && self.basis[r] < self.basis[*prev])
                        }
                    };
                    if better {
                        choice = Some((r, ratio));
                    }
                }
            }
            let Some((row, _)) = choice else {
                return Err(LpError::Unbounded);
            };
            self.pivot(row, col);
        }
    }

    fn solution(&self, vars: usize) -> Vec<BigRational> {
        let rhs = self.width();
        let mut x = vec![BigRational::zero(); vars];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < vars {
                x[b] = self.rows[r][rhs].clone();
            }
        }
        x
    }
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `max c·x  s.t.  A x <= b, x >= 0`, requiring `b >= 0` so the slack
/// basis is feasible from the start.
pub fn maximize(
    c: &[BigRational],
    a: &[Vec<BigRational>],
    b: &[BigRational],
) -> Result<Optimum, LpError> {
    let m = a.len();
    let n = c.len();
    if b.len() != m {
        return Err(LpError::BadInput("rhs length mismatch"));
    }
    if b.iter().any(|v| v.is_negative()) {
        return Err(LpError::BadInput("rhs must be nonnegative"));
    }
    let mut rows = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        if row.len() != n {
            return Err(LpError::BadInput("ragged matrix"));
        }
        let mut r: Vec<BigRational> = row.clone();
        for j in 0..m {
            r.push(if i == j {
                BigRational::from_integer(1.into())
            } else {
                BigRational::zero()
            });
        }
        r.push(b[i].clone());
        rows.push(r);
    }
    let mut cost: Vec<BigRational> = c.iter().map(|v| -v.clone()).collect();
    cost.extend(std::iter::repeat_n(BigRational::zero(), m + 1));
    let mut tableau = Tableau {
        rows,
        cost,
        basis: (n..n + m).collect(),
    };
    tableau.optimize()?;

    let x = tableau.solution(n);
    let objective = tableau.cost[n + m].clone();
    // Slack columns carry the dual prices (their original cost is zero).
    let duals: Vec<BigRational> = (0..m).map(|i| tableau.cost[n + i].clone()).collect();

    // Certificate checks, all exact.
    for (row, bound) in a.iter().zip(b) {
        assert!(dot(row, &x) <= *bound, "primal infeasible solution");
    }
    assert!(x.iter().all(|v| !v.is_negative()));
    assert_eq!(dot(c, &x), objective, "objective mismatch");
    assert!(duals.iter().all(|v| !v.is_negative()), "dual infeasible");
    for j in 0..n {
        let col_dual: BigRational = (0..m).map(|i| &a[i][j] * &duals[i]).sum();
        assert!(col_dual >= c[j], "dual constraint violated");
    }
    assert_eq!(dot(b, &duals), objective, "strong duality violated");

    Ok(Optimum {
        objective,
        x,
        duals,
    })
}

/// Feasibility of `A x = b, x >= 0` by phase-1 artificial variables.
pub fn feasibility(a: &[Vec<BigRational>], b: &[BigRational]) -> Result<Feasibility, LpError> {
    let m = a.len();
    if b.len() != m {
        return Err(LpError::BadInput("rhs length mismatch"));
    }
    let n = if m == 0 { 0 } else { a[0].len() };
    // Make the rhs nonnegative, remembering the flips for the certificate.
    let mut flips = vec![false; m];
    let mut rows = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        if row.len() != n {
            return Err(LpError::BadInput("ragged matrix"));
        }
        let flip = b[i].is_negative();
        flips[i] = flip;
        let mut r: Vec<BigRational> = row
            .iter()
            .map(|v| if flip { -v.clone() } else { v.clone() })
            .collect();
        for j in 0..m {
            r.push(if i == j {
                BigRational::from_integer(1.into())
            } else {
                BigRational::zero()
            });
        }
        r.push(if flip { -b[i].clone() } else { b[i].clone() });
        rows.push(r);
    }
    // Maximize -(sum of artificials). Reduced costs z_j - c_j with
    // c_basis = -1: z_j = -(column sum).
    let mut cost = vec![BigRational::zero(); n + m + 1];
    #[allow(clippy::needless_range_loop)]
    for j in 0..n {
        let col_sum: BigRational = rows.iter().map(|r| r[j].clone()).sum();
        cost[j] = -col_sum;
    }
    let rhs_sum: BigRational = rows.iter().map(|r| r[n + m].clone()).sum();
    cost[n + m] = -rhs_sum;
    let mut tableau = Tableau {
        rows,
        cost,
        basis: (n..n + m).collect(),
    };
    tableau.optimize()?;

    let objective = tableau.cost[n + m].clone();
    if objective.is_zero() {
        let x = tableau.solution(n);
        for (row, want) in a.iter().zip(b) {
            assert_eq!(dot(row, &x), *want, "feasible point fails equality");
        }
        assert!(x.iter().all(|v| !v.is_negative()));
        return Ok(Feasibility::Feasible(x));
    }

    // Farkas: y_i = (reduced cost of artificial i) + its cost (-1),
    // mapped back through the row flips.
    let one = BigRational::from_integer(1.into());
    let mut y: Vec<BigRational> = (0..m)
        .map(|i| &tableau.cost[n + i] - &one)
        .collect();
    for (i, flip) in flips.iter().enumerate() {
        if *flip {
            y[i] = -y[i].clone();
        }
    }
    #[allow(clippy::needless_range_loop)]
    for j in 0..n {
        let coord: BigRational = (0..m).map(|i| &a[i][j] * &y[i]).sum();
        assert!(!coord.is_negative(), "Farkas certificate fails yᵀA >= 0");
    }
    assert!(dot(b, &y).is_negative(), "Farkas certificate fails y·b < 0");
    Ok(Feasibility::Infeasible(y))
}
