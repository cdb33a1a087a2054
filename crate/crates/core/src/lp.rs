//! Linear programming in standard equality form, `{x ≥ 0 : A x = b}`.
//!
//! A dense-tableau two-phase simplex with Bland's pivoting rule (smallest
//! eligible index enters; ratio ties leave by smallest basic variable), which
//! terminates without cycling in exact arithmetic. Redundant rows are removed
//! up front by exact rank reduction, so phase 1 always drives its artificial
//! variables out and the final basis is a genuine nonsingular column set —
//! that is what makes the exact dual solve downstream well-defined.
//!
//! Vertex enumeration walks every candidate basis (r-subsets of columns,
//! r the row rank), keeps the nonnegative basic solutions, and deduplicates;
//! on a bounded polytope this is exactly the vertex set. It is meant for the
//! small instances this crate verifies theorems on and refuses inputs past a
//! configurable size cap rather than degrade silently.

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Scalar;

/// Optimization sense for [`StandardLp`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Goal {
    Maximize,
    Minimize,
}

/// A linear program `opt c·x  s.t.  A x = b, x ≥ 0`.
#[derive(Debug, Clone)]
pub struct StandardLp<S: Scalar> {
    pub a: Vec<Vec<S>>,
    pub b: Vec<S>,
    pub c: Vec<S>,
    pub goal: Goal,
}

/// An optimal basic solution.
#[derive(Debug, Clone)]
pub struct BasicSolution<S: Scalar> {
    /// Optimal point, one value per variable.
    pub values: Vec<S>,
    /// Basis column indices, ascending; always a nonsingular column set of
    /// the row-reduced system.
    pub basis: Vec<usize>,
    /// Original row indices that survived redundancy elimination; the basis
    /// columns restricted to these rows form an invertible square matrix.
    pub kept_rows: Vec<usize>,
    /// Optimal objective value, in the requested sense.
    pub objective: S,
}

/// Outcome of an LP solve.
#[derive(Debug, Clone)]
pub enum LpOutcome<S: Scalar> {
    Optimal(BasicSolution<S>),
    Infeasible,
    Unbounded,
}

impl<S: Scalar> LpOutcome<S> {
    pub fn optimal(&self) -> Option<&BasicSolution<S>> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

/// Default variable-count cap for vertex enumeration; override with the
/// `ABSORBD_VERTEX_CAP` environment variable.
pub const DEFAULT_VERTEX_CAP: usize = 24;

/// The vertex-enumeration cap currently in force.
pub fn vertex_cap() -> usize {
    std::env::var("ABSORBD_VERTEX_CAP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_VERTEX_CAP)
}

/// Candidate-basis budget for vertex enumeration (`C(n, r)` must stay under
/// this, independently of the variable cap).
const BASIS_BUDGET: u128 = 5_000_000;

const MAX_PIVOTS: usize = 200_000;

struct Tableau<S: Scalar> {
    rows: Vec<Vec<S>>,
    rhs: Vec<S>,
    basis: Vec<usize>,
}

impl<S: Scalar> Tableau<S> {
    fn m(&self) -> usize {
        self.rows.len()
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let pv = self.rows[pr][pc].clone();
        for v in &mut self.rows[pr] {
            *v = v.clone() / pv.clone();
        }
        self.rhs[pr] = self.rhs[pr].clone() / pv;
        let prow = self.rows[pr].clone();
        let prhs = self.rhs[pr].clone();
        for i in 0..self.m() {
            if i == pr {
                continue;
            }
            let f = self.rows[i][pc].clone();
            if f.is_zero() {
                continue;
            }
            for (v, p) in self.rows[i].iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v = v.clone() - f.clone() * p.clone();
                }
            }
            self.rows[i][pc] = S::zero();
            self.rhs[i] = self.rhs[i].clone() - f * prhs.clone();
        }
        self.basis[pr] = pc;
    }

    /// Reduced cost of column `j` under `cost`:
    /// `c_j − Σ_i c_{basis(i)} · row_i(j)`.
    fn reduced_cost(&self, cost: &[S], j: usize) -> S {
        let mut rc = cost[j].clone();
        for (i, &bi) in self.basis.iter().enumerate() {
            if !cost[bi].is_zero() && !self.rows[i][j].is_zero() {
                rc = rc - cost[bi].clone() * self.rows[i][j].clone();
            }
        }
        rc
    }

    /// Minimizes `cost` over the current tableau with Bland's rule.
    /// Returns `false` when the problem is unbounded below.
    fn run(&mut self, cost: &[S], ncols: usize) -> Result<bool> {
        for _ in 0..MAX_PIVOTS {
            let mut entering = None;
            for j in 0..ncols {
                if self.basis.contains(&j) {
                    continue;
                }
                if self.reduced_cost(cost, j).is_negative_tol() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(pc) = entering else {
                return Ok(true);
            };
            let mut best: Option<(S, usize, usize)> = None;
            for i in 0..self.m() {
                if !self.rows[i][pc].is_positive_tol() {
                    continue;
                }
                let ratio = self.rhs[i].clone() / self.rows[i][pc].clone();
                let replace = match &best {
                    None => true,
                    Some((r, bvar, _)) => match ratio.cmp_total(r) {
                        std::cmp::Ordering::Less => true,
                        std::cmp::Ordering::Equal => self.basis[i] < *bvar,
                        std::cmp::Ordering::Greater => false,
                    },
                };
                if replace {
                    best = Some((ratio, self.basis[i], i));
                }
            }
            let Some((_, _, pr)) = best else {
                return Ok(false);
            };
            self.pivot(pr, pc);
        }
        Err(Error::Internal("simplex pivot budget exhausted".into()))
    }
}

impl<S: Scalar> StandardLp<S> {
    pub fn new(a: Vec<Vec<S>>, b: Vec<S>, c: Vec<S>, goal: Goal) -> Self {
        StandardLp { a, b, c, goal }
    }

    /// Two-phase simplex solve.
    pub fn solve(&self) -> Result<LpOutcome<S>> {
        let n = self.c.len();
        if self.a.len() != self.b.len() || self.a.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "LP with {} rows, {} rhs entries, {} objective entries",
                self.a.len(),
                self.b.len(),
                n
            )));
        }
        let (kept, consistent) = linalg::independent_rows(&self.a, &self.b)?;
        if !consistent {
            return Ok(LpOutcome::Infeasible);
        }
        let m = kept.len();
        // Phase-1 tableau over the row-reduced system, rhs made nonnegative.
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        for (art, &orig) in kept.iter().enumerate() {
            let flip = self.b[orig].is_negative_tol();
            let mut row: Vec<S> = self.a[orig]
                .iter()
                .map(|v| if flip { S::zero() - v.clone() } else { v.clone() })
                .collect();
            row.extend((0..m).map(|k| if k == art { S::one() } else { S::zero() }));
            rows.push(row);
            rhs.push(if flip {
                S::zero() - self.b[orig].clone()
            } else {
                self.b[orig].clone()
            });
        }
        let mut t = Tableau { rows, rhs, basis: (n..n + m).collect() };
        let mut phase1_cost = vec![S::zero(); n + m];
        for slot in phase1_cost.iter_mut().skip(n) {
            *slot = S::one();
        }
        if !t.run(&phase1_cost, n + m)? {
            return Err(Error::Internal("phase 1 unbounded".into()));
        }
        let infeasibility = t
            .basis
            .iter()
            .zip(&t.rhs)
            .filter(|&(&bv, _)| bv >= n)
            .fold(S::zero(), |acc, (_, v)| acc + v.clone());
        if !infeasibility.is_zero_tol() {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive leftover artificials out; full row rank guarantees a real
        // pivot column exists in any row still carrying one.
        for i in 0..t.m() {
            if t.basis[i] < n {
                continue;
            }
            let pc = (0..n)
                .find(|j| !t.basis.contains(j) && !t.rows[i][*j].is_zero_tol())
                .ok_or_else(|| Error::Internal("rank-reduced row lost its pivot".into()))?;
            t.pivot(i, pc);
        }
        for row in &mut t.rows {
            row.truncate(n);
        }
        // Phase 2 on the real columns, internally minimizing.
        let minimize = matches!(self.goal, Goal::Minimize);
        let phase2_cost: Vec<S> = self
            .c
            .iter()
            .map(|v| if minimize { v.clone() } else { S::zero() - v.clone() })
            .collect();
        if !t.run(&phase2_cost, n)? {
            return Ok(LpOutcome::Unbounded);
        }
        let mut values = vec![S::zero(); n];
        for (i, &bi) in t.basis.iter().enumerate() {
            values[bi] = if t.rhs[i].is_zero_tol() {
                S::zero()
            } else {
                t.rhs[i].clone()
            };
        }
        let objective = crate::scalar::dot(&self.c, &values);
        let mut basis = t.basis.clone();
        basis.sort_unstable();
        Ok(LpOutcome::Optimal(BasicSolution {
            values,
            basis,
            kept_rows: kept,
            objective,
        }))
    }
}

/// Exact dual variables for an optimal basis: solves `A_Bᵀ y = c_B` over the
/// kept rows and reports one multiplier per *original* row (zero on rows that
/// were removed as redundant — they are implied by the kept ones).
pub fn dual_solution<S: Scalar>(
    a: &[Vec<S>],
    c: &[S],
    sol: &BasicSolution<S>,
) -> Result<Vec<S>> {
    let r = sol.kept_rows.len();
    debug_assert_eq!(sol.basis.len(), r);
    let mut at = vec![vec![S::zero(); r]; r];
    for (col, &row) in sol.kept_rows.iter().enumerate() {
        for (ri, &j) in sol.basis.iter().enumerate() {
            at[ri][col] = a[row][j].clone();
        }
    }
    let cb: Vec<S> = sol.basis.iter().map(|&j| c[j].clone()).collect();
    let y_kept = linalg::solve_square(&at, &cb)?;
    let mut y = vec![S::zero(); a.len()];
    for (yi, &row) in y_kept.into_iter().zip(&sol.kept_rows) {
        y[row] = yi;
    }
    Ok(y)
}

/// Whether a feasible point of `{x ≥ 0 : A x = b}` is a vertex: true exactly
/// when the columns of `A` selected by the point's support are linearly
/// independent. Feasibility of `x` is the caller's responsibility.
pub fn is_extreme_point<S: Scalar>(a: &[Vec<S>], x: &[S]) -> Result<bool> {
    let support: Vec<usize> = x
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero_tol())
        .map(|(j, _)| j)
        .collect();
    if support.is_empty() {
        return Ok(true);
    }
    linalg::columns_independent(a, &support)
}

/// Any feasible point, or `None` when the system is infeasible.
pub fn feasible_point<S: Scalar>(a: &[Vec<S>], b: &[S]) -> Result<Option<Vec<S>>> {
    let n = a.first().map_or(0, |r| r.len());
    let lp = StandardLp::new(a.to_vec(), b.to_vec(), vec![S::zero(); n], Goal::Minimize);
    Ok(lp.solve()?.optimal().map(|s| s.values.clone()))
}

/// Maximizes total mass `Σ x_j`; used as a boundedness certificate before
/// vertex enumeration.
pub fn max_total_mass<S: Scalar>(a: &[Vec<S>], b: &[S]) -> Result<LpOutcome<S>> {
    let n = a.first().map_or(0, |r| r.len());
    StandardLp::new(a.to_vec(), b.to_vec(), vec![S::one(); n], Goal::Maximize).solve()
}

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for k in 0..r {
        acc = acc.saturating_mul((n - k) as u128) / (k as u128 + 1);
        if acc > BASIS_BUDGET {
            return u128::MAX;
        }
    }
    acc
}

/// Enumerates the vertices of the bounded polytope `{x ≥ 0 : A x = b}`.
///
/// Every size-`rank` column subset is tried as a basis; nonsingular ones with
/// a nonnegative basic solution contribute a vertex. The result is
/// deduplicated and sorted lexicographically, so equal polytopes enumerate
/// identically. Errors: [`Error::TooLarge`] past `cap` variables or past the
/// internal basis budget, [`Error::Unbounded`] when mass is unbounded (no
/// finite vertex list would describe the set).
pub fn enumerate_vertices<S: Scalar>(
    a: &[Vec<S>],
    b: &[S],
    cap: usize,
) -> Result<Vec<Vec<S>>> {
    let n = a.first().map_or(0, |r| r.len());
    if n > cap {
        return Err(Error::TooLarge { vars: n, cap });
    }
    let (kept, consistent) = linalg::independent_rows(a, b)?;
    if !consistent {
        return Ok(Vec::new());
    }
    if n == 0 {
        return Ok(vec![Vec::new()]);
    }
    match max_total_mass(a, b)? {
        LpOutcome::Infeasible => return Ok(Vec::new()),
        LpOutcome::Unbounded => return Err(Error::Unbounded),
        LpOutcome::Optimal(_) => {}
    }
    let r = kept.len();
    if binomial(n, r) > BASIS_BUDGET {
        return Err(Error::TooLarge { vars: n, cap });
    }
    let rows: Vec<&Vec<S>> = kept.iter().map(|&i| &a[i]).collect();
    let rhs: Vec<S> = kept.iter().map(|&i| b[i].clone()).collect();
    let mut vertices: Vec<Vec<S>> = Vec::new();
    let mut subset: Vec<usize> = (0..r).collect();
    loop {
        let mut ab = vec![vec![S::zero(); r]; r];
        for (col, &j) in subset.iter().enumerate() {
            for (i, row) in rows.iter().enumerate() {
                ab[i][col] = row[j].clone();
            }
        }
        if let Ok(xb) = linalg::solve_square(&ab, &rhs) {
            if xb.iter().all(|v| !v.is_negative_tol()) {
                let mut x = vec![S::zero(); n];
                for (v, &j) in xb.into_iter().zip(&subset) {
                    if !v.is_zero_tol() {
                        x[j] = v;
                    }
                }
                if !vertices.iter().any(|w| vec_eq_tol(w, &x)) {
                    vertices.push(x);
                }
            }
        }
        // Advance the r-subset odometer.
        let mut pos = r;
        loop {
            if pos == 0 {
                vertices.sort_by(|p, q| cmp_lex(p, q));
                return Ok(vertices);
            }
            pos -= 1;
            if subset[pos] < n - (r - pos) {
                subset[pos] += 1;
                for k in pos + 1..r {
                    subset[k] = subset[k - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Entry-wise equality up to the scalar's zero tolerance.
pub fn vec_eq_tol<S: Scalar>(p: &[S], q: &[S]) -> bool {
    p.len() == q.len()
        && p.iter()
            .zip(q)
            .all(|(x, y)| (x.clone() - y.clone()).is_zero_tol())
}

/// Lexicographic total order on equal-length vectors.
pub fn cmp_lex<S: Scalar>(p: &[S], q: &[S]) -> std::cmp::Ordering {
    for (x, y) in p.iter().zip(q) {
        match x.cmp_total(y) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn rv(vals: &[(i64, i64)]) -> Vec<Rational> {
        vals.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    #[test]
    fn maximizes_over_a_simplex() {
        let lp = StandardLp::new(
            vec![rv(&[(1, 1), (1, 1)])],
            rv(&[(1, 1)]),
            rv(&[(1, 1), (2, 1)]),
            Goal::Maximize,
        );
        let out = lp.solve().unwrap();
        let sol = out.optimal().expect("optimal");
        assert_eq!(sol.values, rv(&[(0, 1), (1, 1)]));
        assert_eq!(sol.objective, rat(2, 1));
        assert_eq!(sol.basis, vec![1]);
        assert_eq!(sol.kept_rows, vec![0]);
    }

    #[test]
    fn minimizes_over_a_simplex() {
        let lp = StandardLp::new(
            vec![rv(&[(1, 1), (1, 1)])],
            rv(&[(1, 1)]),
            rv(&[(1, 1), (2, 1)]),
            Goal::Minimize,
        );
        let sol = lp.solve().unwrap();
        let sol = sol.optimal().expect("optimal");
        assert_eq!(sol.values, rv(&[(1, 1), (0, 1)]));
        assert_eq!(sol.objective, rat(1, 1));
    }

    #[test]
    fn detects_infeasibility() {
        // x + y = −1 has no nonnegative solution.
        let lp = StandardLp::new(
            vec![rv(&[(1, 1), (1, 1)])],
            rv(&[(-1, 1)]),
            rv(&[(0, 1), (0, 1)]),
            Goal::Maximize,
        );
        assert!(matches!(lp.solve().unwrap(), LpOutcome::Infeasible));
        // Inconsistent duplicate rows.
        let lp = StandardLp::new(
            vec![rv(&[(1, 1), (1, 1)]), rv(&[(2, 1), (2, 1)])],
            rv(&[(1, 1), (3, 1)]),
            rv(&[(0, 1), (0, 1)]),
            Goal::Maximize,
        );
        assert!(matches!(lp.solve().unwrap(), LpOutcome::Infeasible));
    }

    #[test]
    fn detects_unboundedness() {
        // x − y = 0: the diagonal ray, objective x + y unbounded.
        let lp = StandardLp::new(
            vec![rv(&[(1, 1), (-1, 1)])],
            rv(&[(0, 1)]),
            rv(&[(1, 1), (1, 1)]),
            Goal::Maximize,
        );
        assert!(matches!(lp.solve().unwrap(), LpOutcome::Unbounded));
    }

    #[test]
    fn drops_redundant_rows() {
        let lp = StandardLp::new(
            vec![rv(&[(1, 1), (1, 1)]), rv(&[(2, 1), (2, 1)])],
            rv(&[(1, 1), (2, 1)]),
            rv(&[(3, 1), (1, 1)]),
            Goal::Maximize,
        );
        let sol = lp.solve().unwrap();
        let sol = sol.optimal().expect("optimal");
        assert_eq!(sol.values, rv(&[(1, 1), (0, 1)]));
        assert_eq!(sol.kept_rows, vec![0]);
        let y = dual_solution(&lp.a, &lp.c, sol).unwrap();
        assert_eq!(y, rv(&[(3, 1), (0, 1)]));
    }

    #[test]
    fn dual_certifies_optimality() {
        let a = vec![rv(&[(1, 1), (1, 1)])];
        let c = rv(&[(1, 1), (2, 1)]);
        let lp = StandardLp::new(a.clone(), rv(&[(1, 1)]), c.clone(), Goal::Maximize);
        let sol = lp.solve().unwrap();
        let sol = sol.optimal().unwrap();
        let y = dual_solution(&a, &c, sol).unwrap();
        assert_eq!(y, rv(&[(2, 1)]));
        // Max problem: every reduced cost c_j − y·A_j must be ≤ 0.
        for j in 0..2 {
            let rc = c[j].clone() - y[0].clone() * a[0][j].clone();
            assert!(rc <= rat(0, 1));
        }
    }

    #[test]
    fn enumerates_simplex_vertices() {
        let a = vec![rv(&[(1, 1), (1, 1), (1, 1)])];
        let b = rv(&[(1, 1)]);
        let v = enumerate_vertices(&a, &b, 24).unwrap();
        assert_eq!(
            v,
            vec![
                rv(&[(0, 1), (0, 1), (1, 1)]),
                rv(&[(0, 1), (1, 1), (0, 1)]),
                rv(&[(1, 1), (0, 1), (0, 1)]),
            ]
        );
    }

    #[test]
    fn enumerates_box_vertices() {
        // x ≤ 1, y ≤ 1 via slacks: 4 corners.
        let a = vec![
            rv(&[(1, 1), (0, 1), (1, 1), (0, 1)]),
            rv(&[(0, 1), (1, 1), (0, 1), (1, 1)]),
        ];
        let b = rv(&[(1, 1), (1, 1)]);
        let v = enumerate_vertices(&a, &b, 24).unwrap();
        assert_eq!(v.len(), 4);
        let corners: Vec<(Rational, Rational)> =
            v.iter().map(|x| (x[0].clone(), x[1].clone())).collect();
        for want in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert!(corners.contains(&(rat(want.0, 1), rat(want.1, 1))));
        }
    }

    #[test]
    fn vertex_enumeration_respects_caps_and_unboundedness() {
        let a = vec![rv(&[(1, 1), (-1, 1)])];
        let b = rv(&[(0, 1)]);
        assert!(matches!(
            enumerate_vertices(&a, &b, 24),
            Err(Error::Unbounded)
        ));
        let a = vec![rv(&[(1, 1), (1, 1), (1, 1)])];
        assert!(matches!(
            enumerate_vertices(&a, &rv(&[(1, 1)]), 2),
            Err(Error::TooLarge { vars: 3, cap: 2 })
        ));
    }

    #[test]
    fn empty_and_degenerate_polytopes() {
        // Infeasible: empty vertex list.
        let a = vec![rv(&[(1, 1)])];
        assert!(enumerate_vertices(&a, &rv(&[(-1, 1)]), 24)
            .unwrap()
            .is_empty());
        // Zero variables: the unique empty point.
        let v = enumerate_vertices::<Rational>(&[], &[], 24).unwrap();
        assert_eq!(v, vec![Vec::<Rational>::new()]);
        // Single point {x = 1}.
        let v = enumerate_vertices(&a, &rv(&[(1, 1)]), 24).unwrap();
        assert_eq!(v, vec![rv(&[(1, 1)])]);
    }

    #[test]
    fn extreme_point_test_uses_support_columns() {
        // Occupation-style row [1, 1/2]: vertices (1,0) and (0,2).
        let a = vec![rv(&[(1, 1), (1, 2)])];
        assert!(is_extreme_point(&a, &rv(&[(1, 1), (0, 1)])).unwrap());
        assert!(is_extreme_point(&a, &rv(&[(0, 1), (2, 1)])).unwrap());
        // Any strict mixture charges both columns, which are dependent in R¹.
        assert!(!is_extreme_point(&a, &rv(&[(1, 2), (1, 1)])).unwrap());
        // The zero point (empty support) is extreme whenever feasible.
        assert!(is_extreme_point(&a, &rv(&[(0, 1), (0, 1)])).unwrap());
    }

    #[test]
    fn finds_feasible_points() {
        let a = vec![rv(&[(1, 1), (1, 1)])];
        let x = feasible_point(&a, &rv(&[(1, 1)])).unwrap().unwrap();
        assert_eq!(x[0].clone() + x[1].clone(), rat(1, 1));
        assert!(feasible_point(&a, &rv(&[(-2, 1)])).unwrap().is_none());
    }

    #[test]
    fn float_mode_solves_too() {
        let lp = StandardLp::new(
            vec![vec![1.0, 1.0]],
            vec![1.0],
            vec![1.0, 2.0],
            Goal::Maximize,
        );
        let sol = lp.solve().unwrap();
        let sol = sol.optimal().unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-12);
        let v = enumerate_vertices(&[vec![1.0, 0.5]], &[1.0], 24).unwrap();
        assert_eq!(v.len(), 2);
        assert!((v[0][1] - 2.0).abs() < 1e-12);
        assert!((v[1][0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_ties_terminate() {
        // Degenerate vertex: multiple bases describe the same point; Bland's
        // rule must not cycle.
        let a = vec![
            rv(&[(1, 1), (1, 1), (1, 1), (0, 1)]),
            rv(&[(1, 1), (2, 1), (0, 1), (1, 1)]),
        ];
        let b = rv(&[(1, 1), (1, 1)]);
        let lp = StandardLp::new(
            a,
            b,
            rv(&[(1, 1), (1, 1), (0, 1), (0, 1)]),
            Goal::Maximize,
        );
        let sol = lp.solve().unwrap();
        assert!(sol.optimal().is_some());
    }
}
