//! Exact linear algebra: rational Gaussian elimination, integer linear
//! system solving through Smith reduction, and Fourier–Motzkin
//! feasibility. Everything runs on arbitrary-precision scalars.

#![allow(clippy::needless_range_loop)] // index loops split borrows in matrix code

use num::{BigInt, BigRational, Signed, Zero};

/// Row-reduces `[a | b]` and returns a particular solution of `a x = b`
/// if one exists: pivot columns are filled from the eliminated system,
/// free variables are set to zero. First-pivot choice keeps the result
/// deterministic and small-support.
pub fn gauss_solve(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = a.len();
    assert_eq!(rows, b.len(), "row count mismatch");
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            assert_eq!(row.len(), cols, "ragged matrix");
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut pivot_row = 0usize;
    for col in 0..cols {
        let Some(src) = (pivot_row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, src);
        let inv = m[pivot_row][col].clone().recip();
        for c in col..=cols {
            let v = &m[pivot_row][c] * &inv;
            m[pivot_row][c] = v;
        }
        for r in 0..rows {
            if r != pivot_row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..=cols {
                    let v = &m[r][c] - &factor * &m[pivot_row][c];
                    m[r][c] = v;
                }
            }
        }
        pivot_cols.push(col);
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }

    // Inconsistent row: 0 = nonzero.
    for r in pivot_row..rows {
        if !m[r][cols].is_zero() {
            return None;
        }
    }

    let mut x = vec![BigRational::zero(); cols];
    for (r, &col) in pivot_cols.iter().enumerate() {
        x[col] = m[r][cols].clone();
    }
    Some(x)
}

/// Rank of a rational matrix.
pub fn rank(a: &[Vec<BigRational>]) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut m = a.to_vec();
    let mut pivot_row = 0usize;
    for col in 0..cols {
        let Some(src) = (pivot_row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, src);
        let inv = m[pivot_row][col].clone().recip();
        for c in col..cols {
            let v = &m[pivot_row][c] * &inv;
            m[pivot_row][c] = v;
        }
        for r in 0..rows {
            if r != pivot_row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..cols {
                    let v = &m[r][c] - &factor * &m[pivot_row][c];
                    m[r][c] = v;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }
    pivot_row
}

/// Basis of the rational nullspace of `a`.
pub fn nullspace(a: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let rows = a.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = a[0].len();
    let mut m = a.to_vec();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut pivot_row = 0usize;
    for col in 0..cols {
        let Some(src) = (pivot_row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, src);
        let inv = m[pivot_row][col].clone().recip();
        for c in col..cols {
            let v = &m[pivot_row][c] * &inv;
            m[pivot_row][c] = v;
        }
        for r in 0..rows {
            if r != pivot_row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..cols {
                    let v = &m[r][c] - &factor * &m[pivot_row][c];
                    m[r][c] = v;
                }
            }
        }
        pivot_cols.push(col);
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![BigRational::zero(); cols];
        v[free] = BigRational::from(BigInt::from(1));
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -m[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Solves `a x = b` over the integers, if an integer solution exists.
///
/// Diagonalizes `a` by unimodular row and column operations (a Smith
/// reduction without the divisibility-chain normalization, which a
/// solver does not need) and back-substitutes with exact divisibility
/// checks.
pub fn solve_integer(a: &[Vec<BigInt>], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let rows = a.len();
    assert_eq!(rows, b.len(), "row count mismatch");
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m = a.to_vec();
    for row in &m {
        assert_eq!(row.len(), cols, "ragged matrix");
    }
    let mut rhs = b.to_vec();
    // Column transform accumulator: x = v * y.
    let mut v: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| if i == j { BigInt::from(1) } else { BigInt::zero() })
                .collect()
        })
        .collect();

    let dim = rows.min(cols);
    let mut k = 0usize;
    while k < dim {
        // Find the smallest nonzero entry in the remaining block.
        let mut pivot: Option<(usize, usize)> = None;
        for r in k..rows {
            for c in k..cols {
                if !m[r][c].is_zero()
                    && pivot
                        .map(|(pr, pc)| m[r][c].abs() < m[pr][pc].abs())
                        .unwrap_or(true)
                {
                    pivot = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = pivot else {
            break;
        };
        m.swap(k, pr);
        rhs.swap(k, pr);
        for row in m.iter_mut() {
            row.swap(k, pc);
        }
        // Column operations accumulate on the right: x = v y.
        for row in v.iter_mut() {
            row.swap(k, pc);
        }

        let mut clean = true;
        // Reduce column k by row operations.
        for r in (k + 1)..rows {
            if !m[r][k].is_zero() {
                let q = &m[r][k] / &m[k][k];
                if !q.is_zero() {
                    for c in k..cols {
                        let t = &m[r][c] - &q * &m[k][c];
                        m[r][c] = t;
                    }
                    let t = &rhs[r] - &q * &rhs[k];
                    rhs[r] = t;
                }
                if !m[r][k].is_zero() {
                    clean = false;
                }
            }
        }
        // Reduce row k by column operations (tracked in v).
        for c in (k + 1)..cols {
            if !m[k][c].is_zero() {
                let q = &m[k][c] / &m[k][k];
                if !q.is_zero() {
                    for r in k..rows {
                        let t = &m[r][c] - &q * &m[r][k];
                        m[r][c] = t;
                    }
                    for r in 0..cols {
                        let t = &v[r][c] - &q * &v[r][k];
                        v[r][c] = t;
                    }
                }
                if !m[k][c].is_zero() {
                    clean = false;
                }
            }
        }
        if clean {
            k += 1;
        }
    }

    // m is now diagonal on the leading block. Solve d_i y_i = rhs_i.
    let mut y = vec![BigInt::zero(); cols];
    for i in 0..rows {
        let d = if i < cols { m[i][i].clone() } else { BigInt::zero() };
        if d.is_zero() {
            if !rhs[i].is_zero() {
                return None;
            }
            continue;
        }
        let (q, r) = num::Integer::div_rem(&rhs[i], &d);
        if !r.is_zero() {
            return None;
        }
        y[i] = q;
    }
    // x = v y.
    let x: Vec<BigInt> = (0..cols)
        .map(|i| (0..cols).map(|j| &v[i][j] * &y[j]).sum())
        .collect();
    debug_assert!({
        let ok = a
            .iter()
            .zip(b)
            .all(|(row, want)| {
                let got: BigInt = row.iter().zip(&x).map(|(c, xi)| c * xi).sum();
                &got == want
            });
        ok
    });
    Some(x)
}

/// A system of linear inequalities `coeffs · t + constant >= 0`.
#[derive(Debug, Clone)]
pub struct Inequality {
    pub coeffs: Vec<BigRational>,
    pub constant: BigRational,
}

/// Canonical primitive-integer form of a halfspace, so that rows
/// differing by a positive scale collapse under deduplication.
/// `None` when the coefficients are all zero: the row is then either
/// redundant or an outright contradiction, resolved by the caller.
fn normalize_inequality(ineq: &Inequality) -> Option<(Vec<BigInt>, BigRational)> {
    if ineq.coeffs.iter().all(|c| c.is_zero()) {
        return None;
    }
    let mut denom_lcm = BigInt::from(1);
    for c in &ineq.coeffs {
        denom_lcm = num::Integer::lcm(&denom_lcm, c.denom());
    }
    let scaled: Vec<BigInt> = ineq
        .coeffs
        .iter()
        .map(|c| c.numer() * (&denom_lcm / c.denom()))
        .collect();
    let mut g = BigInt::zero();
    for v in &scaled {
        g = num::Integer::gcd(&g, v);
    }
    let coeffs: Vec<BigInt> = scaled.iter().map(|v| v / &g).collect();
    let constant = &ineq.constant * BigRational::new(denom_lcm, g);
    Some((coeffs, constant))
}

/// Fourier–Motzkin feasibility for small systems. Eliminates variables
/// one at a time (greedily choosing the variable with the fewest
/// lower×upper combinations), normalizing and pruning dominated rows at
/// every stage. Used as an independent oracle against the simplex.
pub fn fourier_motzkin_feasible(system: Vec<Inequality>, vars: usize) -> bool {
    // Canonical store: primitive coefficient vector -> tightest constant.
    let mut rows: std::collections::BTreeMap<Vec<BigInt>, BigRational> =
        std::collections::BTreeMap::new();
    let insert = |rows: &mut std::collections::BTreeMap<Vec<BigInt>, BigRational>,
                      ineq: &Inequality|
     -> bool {
        match normalize_inequality(ineq) {
            None => !ineq.constant.is_negative(),
            Some((coeffs, constant)) => {
                match rows.get_mut(&coeffs) {
                    Some(existing) => {
                        if constant < *existing {
                            *existing = constant;
                        }
                    }
                    None => {
                        rows.insert(coeffs, constant);
                    }
                }
                true
            }
        }
    };
    for ineq in &system {
        if !insert(&mut rows, ineq) {
            return false;
        }
    }

    let mut alive: Vec<usize> = (0..vars).collect();
    while !alive.is_empty() {
        // Pick the variable with the smallest lower×upper product.
        let (pick_pos, &var) = alive
            .iter()
            .enumerate()
            .min_by_key(|(_, &v)| {
                let pos = rows.keys().filter(|c| c[v].is_positive()).count();
                let neg = rows.keys().filter(|c| c[v].is_negative()).count();
                pos * neg
            })
            .expect("alive is nonempty");
        alive.remove(pick_pos);

        let mut lower: Vec<Inequality> = Vec::new();
        let mut upper: Vec<Inequality> = Vec::new();
        let mut keep: std::collections::BTreeMap<Vec<BigInt>, BigRational> =
            std::collections::BTreeMap::new();
        for (coeffs, constant) in std::mem::take(&mut rows) {
            let c = &coeffs[var];
            let ineq = Inequality {
                coeffs: coeffs.iter().map(|v| BigRational::from(v.clone())).collect(),
                constant,
            };
            if c.is_zero() {
                keep.insert(coeffs, ineq.constant);
            } else if c.is_positive() {
                lower.push(ineq);
            } else {
                upper.push(ineq);
            }
        }
        rows = keep;
        for lo in &lower {
            for up in &upper {
                let lc = lo.coeffs[var].clone();
                let uc = -up.coeffs[var].clone();
                let coeffs: Vec<BigRational> = lo
                    .coeffs
                    .iter()
                    .zip(&up.coeffs)
                    .map(|(l, u)| l / &lc + u / &uc)
                    .collect();
                let constant = &lo.constant / &lc + &up.constant / &uc;
                debug_assert!(coeffs[var].is_zero());
                if !insert(&mut rows, &Inequality { coeffs, constant }) {
                    return false;
                }
            }
        }
    }
    true
}

/// Feasibility of `{a x = b, x >= 0}` decided by zero-forcing presolve,
/// Gaussian parameterization of the affine solution set, and
/// Fourier–Motzkin on the nonnegativity constraints. Independent of the
/// simplex code path.
pub fn nonneg_solution_exists(a: &[Vec<BigRational>], b: &[BigRational]) -> bool {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    // Presolve: a zero-rhs row with coefficients of one sign forces
    // every variable it touches to zero.
    let mut forced = vec![false; cols];
    loop {
        let mut changed = false;
        for (row, rhs) in a.iter().zip(b) {
            if !rhs.is_zero() {
                continue;
            }
            let live: Vec<usize> = (0..cols)
                .filter(|&j| !forced[j] && !row[j].is_zero())
                .collect();
            let all_pos = live.iter().all(|&j| row[j].is_positive());
            let all_neg = live.iter().all(|&j| row[j].is_negative());
            if all_pos || all_neg {
                for &j in &live {
                    forced[j] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let live_cols: Vec<usize> = (0..cols).filter(|&j| !forced[j]).collect();
    let reduced: Vec<Vec<BigRational>> = a
        .iter()
        .map(|row| live_cols.iter().map(|&j| row[j].clone()).collect())
        .collect();

    let Some(particular) = gauss_solve(&reduced, b) else {
        return false;
    };
    let basis = nullspace(&reduced);
    if basis.is_empty() {
        return particular.iter().all(|x| !x.is_negative());
    }
    let n = particular.len();
    let system: Vec<Inequality> = (0..n)
        .map(|i| Inequality {
            coeffs: basis.iter().map(|v| v[i].clone()).collect(),
            constant: particular[i].clone(),
        })
        .collect();
    fourier_motzkin_feasible(system, basis.len())
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}
