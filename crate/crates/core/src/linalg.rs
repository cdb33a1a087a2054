//! Small dense linear algebra over [`Scalar`].
//!
//! Square systems are solved by fraction-free Gaussian elimination (Bareiss)
//! over the integers in exact mode — denominators are cleared per row first —
//! and by LU with partial pivoting in floating mode. Rank computations and
//! nullspace vectors use ordinary elimination with tolerance-aware pivoting
//! and are shared by the simplex engine and the Carathéodory reduction.

use num::bigint::BigInt;
use num::{Integer, One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Solves the square system `A x = b`.
///
/// Exact scalars go through [`solve_square_exact`]; floats through LU with
/// partial pivoting. Errors with [`Error::SingularSystem`] when `A` has no
/// inverse (up to tolerance in floating mode).
pub fn solve_square<S: Scalar>(a: &[Vec<S>], b: &[S]) -> Result<Vec<S>> {
    let n = a.len();
    if b.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "square solve wants {n}x{n} matrix with rhs of length {n}"
        )));
    }
    if S::EXACT {
        let a: Vec<Vec<Rational>> = a
            .iter()
            .map(|row| row.iter().map(|x| x.to_rational().expect("exact scalar")).collect())
            .collect();
        let b: Vec<Rational> = b.iter().map(|x| x.to_rational().expect("exact scalar")).collect();
        let x = solve_square_exact(&a, &b)?;
        Ok(x.iter().map(|q| S::from_rational(q)).collect())
    } else {
        lu_solve(a, b)
    }
}

/// Fraction-free Gaussian elimination for exact rational systems.
///
/// Each row of `[A | b]` is scaled by the lcm of its denominators, then the
/// integer matrix is reduced by the one-step Bareiss recurrence
/// `a'[i][j] = (a[k][k]·a[i][j] − a[i][k]·a[k][j]) / p` with `p` the previous
/// pivot, which keeps every intermediate value an integer. Back-substitution
/// happens over rationals.
pub fn solve_square_exact(a: &[Vec<Rational>], b: &[Rational]) -> Result<Vec<Rational>> {
    let n = a.len();
    // Clear denominators row by row; scaling a row of [A | b] by a nonzero
    // integer leaves the solution set unchanged.
    let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for (row, rhs) in a.iter().zip(b) {
        let mut lcm = BigInt::one();
        for q in row.iter().chain(std::iter::once(rhs)) {
            lcm = lcm.lcm(q.denom());
        }
        let scale = Rational::from_integer(lcm);
        let mut int_row: Vec<BigInt> = Vec::with_capacity(n + 1);
        for q in row.iter().chain(std::iter::once(rhs)) {
            let scaled = q * &scale;
            debug_assert!(scaled.denom().is_one());
            int_row.push(scaled.numer().clone());
        }
        m.push(int_row);
    }

    let mut prev_pivot = BigInt::one();
    for k in 0..n {
        // Row pivoting: first row with a nonzero entry in column k.
        let pivot_row = (k..n).find(|&i| !m[i][k].is_zero()).ok_or(Error::SingularSystem)?;
        m.swap(k, pivot_row);
        let pivot = m[k][k].clone();
        for i in k + 1..n {
            for j in k + 1..=n {
                let num = &pivot * &m[i][j] - &m[i][k] * &m[k][j];
                let (q, r) = num.div_rem(&prev_pivot);
                debug_assert!(r.is_zero(), "Bareiss division must be exact");
                m[i][j] = q;
            }
            m[i][k] = BigInt::zero();
        }
        prev_pivot = pivot;
    }

    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        if m[i][i].is_zero() {
            return Err(Error::SingularSystem);
        }
        let mut acc = Rational::from_integer(m[i][n].clone());
        for j in i + 1..n {
            acc -= Rational::from_integer(m[i][j].clone()) * &x[j];
        }
        x[i] = acc / Rational::from_integer(m[i][i].clone());
    }
    Ok(x)
}

/// LU solve with partial pivoting, generic over the scalar (used for floats).
fn lu_solve<S: Scalar>(a: &[Vec<S>], b: &[S]) -> Result<Vec<S>> {
    let n = a.len();
    let mut m: Vec<Vec<S>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    for k in 0..n {
        let pivot_row = (k..n)
            .max_by(|&i, &j| m[i][k].abs().cmp_total(&m[j][k].abs()))
            .ok_or(Error::SingularSystem)?;
        if m[pivot_row][k].is_zero_tol() {
            return Err(Error::SingularSystem);
        }
        m.swap(k, pivot_row);
        let pivot = m[k][k].clone();
        for i in k + 1..n {
            let factor = m[i][k].clone() / pivot.clone();
            if factor.is_zero() {
                continue;
            }
            for j in k..=n {
                m[i][j] = m[i][j].clone() - factor.clone() * m[k][j].clone();
            }
        }
    }

    let mut x = vec![S::zero(); n];
    for i in (0..n).rev() {
        if m[i][i].is_zero_tol() {
            return Err(Error::SingularSystem);
        }
        let mut acc = m[i][n].clone();
        for j in i + 1..n {
            acc = acc - m[i][j].clone() * x[j].clone();
        }
        x[i] = acc / m[i][i].clone();
    }
    Ok(x)
}

/// Row-reduces the augmented system `[A | b]` and reports which original rows
/// form a maximal independent set, plus whether the system is consistent
/// (no dependent row with a nonzero residual right-hand side).
pub fn independent_rows<S: Scalar>(a: &[Vec<S>], b: &[S]) -> Result<(Vec<usize>, bool)> {
    let m = a.len();
    if b.len() != m {
        return Err(Error::DimensionMismatch("rhs length must match row count".into()));
    }
    let n = a.first().map_or(0, |r| r.len());
    if a.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch("ragged matrix".into()));
    }
    let mut work: Vec<(usize, Vec<S>)> = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (row, rhs))| {
            let mut r = row.clone();
            r.push(rhs.clone());
            (i, r)
        })
        .collect();

    let mut kept = Vec::new();
    let mut rank = 0usize;
    for col in 0..n {
        let Some(pivot) = (rank..m).find(|&i| !work[i].1[col].is_zero_tol()) else {
            continue;
        };
        work.swap(rank, pivot);
        kept.push(work[rank].0);
        let pivot_val = work[rank].1[col].clone();
        for i in rank + 1..m {
            if work[i].1[col].is_zero_tol() {
                continue;
            }
            let factor = work[i].1[col].clone() / pivot_val.clone();
            for j in col..=n {
                work[i].1[j] = work[i].1[j].clone() - factor.clone() * work[rank].1[j].clone();
            }
        }
        rank += 1;
    }
    // Rows below the rank have zero coefficients; any nonzero rhs left there
    // makes the system inconsistent.
    let consistent = work[rank..].iter().all(|(_, row)| row[n].is_zero_tol());
    kept.sort_unstable();
    Ok((kept, consistent))
}

/// Rank of the matrix whose rows are `rows`.
pub fn rank<S: Scalar>(rows: &[Vec<S>]) -> Result<usize> {
    let zeros = vec![S::zero(); rows.len()];
    Ok(independent_rows(rows, &zeros)?.0.len())
}

/// True when the selected columns of `a` are linearly independent.
pub fn columns_independent<S: Scalar>(a: &[Vec<S>], cols: &[usize]) -> Result<bool> {
    let transposed: Vec<Vec<S>> = cols
        .iter()
        .map(|&j| a.iter().map(|row| row[j].clone()).collect())
        .collect();
    Ok(rank(&transposed)? == cols.len())
}

/// Finds a nontrivial vector `c` with `Σ c_i v_i = 0`, where the `v_i` are the
/// columns of `cols` (each of equal length). Returns `None` when the columns
/// are linearly independent. Deterministic: the first free column in the
/// echelon form gets coefficient one and the rest follow by back-substitution.
pub fn nullspace_vector<S: Scalar>(cols: &[Vec<S>]) -> Option<Vec<S>> {
    let k = cols.len();
    if k == 0 {
        return None;
    }
    let m = cols[0].len();
    debug_assert!(cols.iter().all(|c| c.len() == m));
    // Eliminate on the m x k matrix whose columns are the inputs.
    let mut a: Vec<Vec<S>> = (0..m)
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect();
    let mut pivot_col_of_row: Vec<usize> = Vec::new();
    let mut is_pivot_col = vec![false; k];
    let mut row = 0usize;
    for col in 0..k {
        let Some(p) = (row..m).find(|&i| !a[i][col].is_zero_tol()) else {
            continue;
        };
        a.swap(row, p);
        let pivot = a[row][col].clone();
        for i in 0..m {
            if i == row || a[i][col].is_zero_tol() {
                continue;
            }
            let factor = a[i][col].clone() / pivot.clone();
            for j in col..k {
                a[i][j] = a[i][j].clone() - factor.clone() * a[row][j].clone();
            }
        }
        pivot_col_of_row.push(col);
        is_pivot_col[col] = true;
        row += 1;
        if row == m {
            break;
        }
    }
    let free_col = (0..k).find(|&j| !is_pivot_col[j])?;
    let mut c = vec![S::zero(); k];
    c[free_col] = S::one();
    for (r, &pc) in pivot_col_of_row.iter().enumerate() {
        // Row r reads: a[r][pc]·c[pc] + a[r][free]·c[free] = 0 (all other
        // pivot columns were eliminated from row r).
        if !a[r][free_col].is_zero_tol() {
            c[pc] = -(a[r][free_col].clone() / a[r][pc].clone());
        }
    }
    debug_assert!({
        let residual: Vec<S> = (0..m)
            .map(|i| {
                let mut acc = S::zero();
                for (j, cj) in c.iter().enumerate() {
                    acc = acc + cols[j][i].clone() * cj.clone();
                }
                acc
            })
            .collect();
        residual.iter().all(|x| x.is_zero_tol())
    });
    Some(c)
}

/// `A x` for a dense matrix in row-major order.
pub fn mat_vec<S: Scalar>(a: &[Vec<S>], x: &[S]) -> Vec<S> {
    a.iter().map(|row| crate::scalar::dot(row, x)).collect()
}
