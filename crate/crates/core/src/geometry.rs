//! The occupation polytope and its criterion-space image.
//!
//! For a uniformly absorbing model the achievable occupation measures are
//! exactly the nonnegative solutions of the flow-balance equations
//! `Σ_a μ(y,a) − Σ_{x,a} μ(x,a)·Q(y|x,a) = η(y)` over the reachable block —
//! a bounded polytope in equality form, here [`CharPolytope`]. Its vertices
//! are enumerable exactly, and the performance map `μ ↦ (Σ μ·r_i)_i` sends it
//! onto the achievable performance set, represented as a [`VPolytope`]
//! (finite generating points).
//!
//! Membership, hull-vertex, and relative-interior questions are all decided
//! by small exact LPs rather than floating-point geometric predicates:
//! a point is in the hull iff a convex-combination system is feasible, is a
//! hull vertex iff it is not in the hull of the remaining points, and is in
//! the relative interior iff some combination uses every generating point
//! with weight bounded away from zero (the max-min-weight LP has a positive
//! optimum). These reductions are dimension-independent and inherit the
//! exactness of the simplex engine.

use crate::error::{Error, Result};
use crate::lp::{self, Goal, LpOutcome, StandardLp};
use crate::model::{ModelSpec, ReachableBlock};
use crate::occupation::OccupationMeasure;
use crate::scalar::Scalar;

/// The occupation polytope `{μ ≥ 0 : flow balance}` in LP standard form,
/// with one variable per reachable state-action pair.
#[derive(Debug, Clone)]
pub struct CharPolytope<S: Scalar> {
    /// Variable order: `(state, action)` pairs, block order then declared
    /// action order.
    pub pairs: Vec<(usize, usize)>,
    /// Flow-balance matrix, one row per reachable state.
    pub a: Vec<Vec<S>>,
    /// Right-hand side: the initial distribution on the reachable block.
    pub b: Vec<S>,
}

impl<S: Scalar> CharPolytope<S> {
    /// Builds the flow-balance system of a model on its reachable block.
    pub fn build(spec: &ModelSpec, block: &ReachableBlock) -> Self {
        let mut pairs = Vec::new();
        for &x in &block.states {
            for a in 0..spec.num_actions(x) {
                pairs.push((x, a));
            }
        }
        let mut rows = Vec::with_capacity(block.len());
        let mut rhs = Vec::with_capacity(block.len());
        for &y in &block.states {
            let row = pairs
                .iter()
                .map(|&(x, a)| {
                    let outflow = if x == y { S::one() } else { S::zero() };
                    outflow - S::from_rational(&spec.kernel[x][a][y])
                })
                .collect();
            rows.push(row);
            rhs.push(S::from_rational(&spec.eta[y]));
        }
        CharPolytope { pairs, a: rows, b: rhs }
    }

    pub fn num_vars(&self) -> usize {
        self.pairs.len()
    }

    /// All vertices, as occupation measures, deduplicated and in a canonical
    /// order. `cap` bounds the variable count (see [`lp::vertex_cap`]).
    pub fn vertices(&self, cap: usize) -> Result<Vec<OccupationMeasure<S>>> {
        let dense = lp::enumerate_vertices(&self.a, &self.b, cap)?;
        Ok(dense
            .into_iter()
            .map(|x| OccupationMeasure::from_dense(&self.pairs, &x))
            .collect())
    }

    /// Dense coordinates of a measure in this polytope's variable order;
    /// errors if the measure charges a pair outside the reachable block.
    pub fn coords(&self, mu: &OccupationMeasure<S>) -> Result<Vec<S>> {
        let mut total_support = 0usize;
        for (&pair, v) in &mu.mass {
            if !v.is_zero_tol() {
                total_support += 1;
                if !self.pairs.contains(&pair) {
                    return Err(Error::InvalidInput(format!(
                        "measure charges pair ({}, {}) outside the reachable block",
                        pair.0, pair.1
                    )));
                }
            }
        }
        let dense = mu.to_dense(&self.pairs);
        debug_assert!(dense.iter().filter(|v| !v.is_zero_tol()).count() == total_support);
        Ok(dense)
    }

    /// Whether the measure satisfies flow balance and nonnegativity (i.e. is
    /// a point of the polytope).
    pub fn contains(&self, mu: &OccupationMeasure<S>) -> bool {
        let Ok(x) = self.coords(mu) else {
            return false;
        };
        if x.iter().any(|v| v.is_negative_tol()) {
            return false;
        }
        crate::linalg::mat_vec(&self.a, &x)
            .into_iter()
            .zip(&self.b)
            .all(|(lhs, rhs)| (lhs - rhs.clone()).is_zero_tol())
    }

    /// Whether the measure is a vertex: feasible with linearly independent
    /// support columns.
    pub fn is_vertex(&self, mu: &OccupationMeasure<S>) -> Result<bool> {
        if !self.contains(mu) {
            return Ok(false);
        }
        lp::is_extreme_point(&self.a, &self.coords(mu)?)
    }
}

/// Convenience wrapper: vertices of the occupation polytope of a model.
pub fn extreme_occupations<S: Scalar>(
    spec: &ModelSpec,
    block: &ReachableBlock,
    cap: usize,
) -> Result<Vec<OccupationMeasure<S>>> {
    CharPolytope::build(spec, block).vertices(cap)
}

/// A polytope presented by finitely many (not necessarily extreme)
/// generating points; the set is their convex hull.
#[derive(Debug, Clone)]
pub struct VPolytope<S: Scalar> {
    pub points: Vec<Vec<S>>,
}

impl<S: Scalar> VPolytope<S> {
    /// The performance image of a set of measures: one point per measure,
    /// duplicates retained (callers needing the vertex set reduce with
    /// [`hull_vertices`]).
    pub fn image_of<'a>(
        spec: &ModelSpec,
        measures: impl IntoIterator<Item = &'a OccupationMeasure<S>>,
    ) -> Self
    where
        S: 'a,
    {
        VPolytope {
            points: measures
                .into_iter()
                .map(|mu| mu.performance(spec))
                .collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim_ambient(&self) -> usize {
        self.points.first().map_or(0, |p| p.len())
    }
}

/// Whether `target` lies in the convex hull of `points`: feasibility of
/// `Σ λ_i p_i = target, Σ λ_i = 1, λ ≥ 0`.
pub fn is_in_hull<S: Scalar>(points: &[Vec<S>], target: &[S]) -> Result<bool> {
    if points.is_empty() {
        return Ok(false);
    }
    let d = target.len();
    let mut a = Vec::with_capacity(d + 1);
    for i in 0..d {
        a.push(points.iter().map(|p| p[i].clone()).collect());
    }
    a.push(vec![S::one(); points.len()]);
    let mut b: Vec<S> = target.to_vec();
    b.push(S::one());
    Ok(lp::feasible_point(&a, &b)?.is_some())
}

/// The hull vertices among `points`: after deduplication, exactly those
/// points not in the convex hull of the others. Returned sorted
/// lexicographically.
pub fn hull_vertices<S: Scalar>(points: &[Vec<S>]) -> Result<Vec<Vec<S>>> {
    let mut distinct: Vec<Vec<S>> = Vec::new();
    for p in points {
        if !distinct.iter().any(|q| lp::vec_eq_tol(q, p)) {
            distinct.push(p.clone());
        }
    }
    let mut vertices = Vec::new();
    for (i, p) in distinct.iter().enumerate() {
        let others: Vec<Vec<S>> = distinct
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, q)| q.clone())
            .collect();
        if !is_in_hull(&others, p)? {
            vertices.push(p.clone());
        }
    }
    vertices.sort_by(|p, q| lp::cmp_lex(p, q));
    Ok(vertices)
}

/// Whether `target` lies in the *relative interior* of the convex hull of
/// `points`: some representing combination gives every generating point
/// weight at least `t` for a positive `t`. Decided by maximizing that
/// uniform lower bound (`λ_i = t + u_i` with `t, u ≥ 0`) and checking the
/// optimum is strictly positive.
pub fn relative_interior_contains<S: Scalar>(
    points: &[Vec<S>],
    target: &[S],
) -> Result<bool> {
    if points.is_empty() {
        return Ok(false);
    }
    let k = points.len();
    let d = target.len();
    // Variables: t, u_1..u_k.
    let mut a = Vec::with_capacity(d + 1);
    for i in 0..d {
        let mut row = Vec::with_capacity(k + 1);
        row.push(
            points
                .iter()
                .fold(S::zero(), |acc, p| acc + p[i].clone()),
        );
        row.extend(points.iter().map(|p| p[i].clone()));
        a.push(row);
    }
    let mut sum_row = vec![S::one(); k + 1];
    sum_row[0] = S::from_int(k as i64);
    a.push(sum_row);
    let mut b: Vec<S> = target.to_vec();
    b.push(S::one());
    let mut c = vec![S::zero(); k + 1];
    c[0] = S::one();
    match StandardLp::new(a, b, c, Goal::Maximize).solve()? {
        LpOutcome::Optimal(sol) => Ok(sol.objective.is_positive_tol()),
        LpOutcome::Infeasible => Ok(false),
        LpOutcome::Unbounded => Err(Error::Internal(
            "bounded interiority program reported unbounded".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scalar::{rat, Rational};

    fn pts(vals: &[&[(i64, i64)]]) -> Vec<Vec<Rational>> {
        vals.iter()
            .map(|row| row.iter().map(|&(n, d)| rat(n, d)).collect())
            .collect()
    }

    #[test]
    fn flow_system_of_the_worked_example() {
        let spec = fixtures::twostate();
        let block = spec.require_uniformly_absorbing().unwrap();
        let poly: CharPolytope<Rational> = CharPolytope::build(&spec, &block);
        assert_eq!(poly.pairs, vec![(0, 0), (0, 1)]);
        assert_eq!(poly.a, vec![vec![rat(1, 1), rat(1, 2)]]);
        assert_eq!(poly.b, vec![rat(1, 1)]);
    }

    #[test]
    fn vertices_are_the_deterministic_measures() {
        let spec = fixtures::twostate();
        let block = spec.require_uniformly_absorbing().unwrap();
        let vertices: Vec<OccupationMeasure<Rational>> =
            extreme_occupations(&spec, &block, 24).unwrap();
        assert_eq!(vertices.len(), 2);
        // Sorted lexicographically in (μ(0,0), μ(0,1)): (0,2) then (1,0).
        assert_eq!(vertices[0].get(0, 1), rat(2, 1));
        assert_eq!(vertices[1].get(0, 0), rat(1, 1));
        let poly = CharPolytope::build(&spec, &block);
        for v in &vertices {
            assert!(poly.is_vertex(v).unwrap());
        }
        // The uniform mixture is inside but not a vertex.
        let sigma = crate::policy::StationaryPolicy {
            dist: vec![vec![rat(1, 2), rat(1, 2)], vec![rat(1, 1)]],
        };
        let mu = crate::occupation::occupation_of_stationary(&spec, &block, &sigma).unwrap();
        assert!(poly.contains(&mu));
        assert!(!poly.is_vertex(&mu).unwrap());
    }

    #[test]
    fn image_interval_of_the_worked_example() {
        let spec = fixtures::twostate();
        let block = spec.require_uniformly_absorbing().unwrap();
        let vertices: Vec<OccupationMeasure<Rational>> =
            extreme_occupations(&spec, &block, 24).unwrap();
        let image = VPolytope::image_of(&spec, &vertices);
        let hull = hull_vertices(&image.points).unwrap();
        assert_eq!(hull, pts(&[&[(4, 5)], &[(1, 1)]]));
        assert!(is_in_hull(&image.points, &[rat(14, 15)]).unwrap());
        assert!(!is_in_hull(&image.points, &[rat(2, 1)]).unwrap());
        assert!(relative_interior_contains(&image.points, &[rat(14, 15)]).unwrap());
        assert!(!relative_interior_contains(&image.points, &[rat(1, 1)]).unwrap());
        assert!(!relative_interior_contains(&image.points, &[rat(4, 5)]).unwrap());
        assert!(!relative_interior_contains(&image.points, &[rat(2, 1)]).unwrap());
    }

    #[test]
    fn products_of_segments_have_four_vertices() {
        let spec = fixtures::onestep();
        let block = spec.require_uniformly_absorbing().unwrap();
        let vertices: Vec<OccupationMeasure<Rational>> =
            extreme_occupations(&spec, &block, 24).unwrap();
        assert_eq!(vertices.len(), 4);
        // Each vertex is the measure of a deterministic policy.
        for det in crate::policy::enumerate_deterministic(&spec, 100).unwrap() {
            let mu = crate::occupation::occupation_of_stationary(
                &spec,
                &block,
                &det.to_stationary(&spec),
            )
            .unwrap();
            assert!(vertices.contains(&mu));
        }
        // Images in R¹: {2, 1/2, 5/4, −1/4}; the hull keeps the two ends.
        let image = VPolytope::image_of(&spec, &vertices);
        let hull = hull_vertices(&image.points).unwrap();
        assert_eq!(hull, pts(&[&[(-1, 4)], &[(2, 1)]]));
        // 5/4 is achievable and interior.
        assert!(relative_interior_contains(&image.points, &[rat(5, 4)]).unwrap());
    }

    #[test]
    fn empty_block_polytope_is_a_single_empty_point() {
        let spec = fixtures::eta_on_delta();
        let block = spec.require_uniformly_absorbing().unwrap();
        let poly: CharPolytope<Rational> = CharPolytope::build(&spec, &block);
        assert_eq!(poly.num_vars(), 0);
        let vertices = poly.vertices(24).unwrap();
        assert_eq!(vertices.len(), 1);
        assert!(vertices[0].mass.is_empty());
    }

    #[test]
    fn hull_helpers_handle_duplicates_and_interior_points() {
        let points = pts(&[&[(0, 1)], &[(1, 1)], &[(1, 1)], &[(1, 2)]]);
        assert_eq!(hull_vertices(&points).unwrap(), pts(&[&[(0, 1)], &[(1, 1)]]));
        assert!(relative_interior_contains(&points, &[rat(1, 2)]).unwrap());
        assert!(!relative_interior_contains(&points, &[rat(0, 1)]).unwrap());
        // A single point: hull = the point, relint = the point itself.
        let single = pts(&[&[(3, 7)]]);
        assert_eq!(hull_vertices(&single).unwrap(), single);
        assert!(relative_interior_contains(&single, &[rat(3, 7)]).unwrap());
        assert!(!relative_interior_contains(&single, &[rat(1, 2)]).unwrap());
        assert!(!is_in_hull::<Rational>(&[], &[rat(0, 1)]).unwrap());
    }

    #[test]
    fn two_dimensional_hull() {
        // Unit square corners plus center and an edge midpoint.
        let points = pts(&[
            &[(0, 1), (0, 1)],
            &[(1, 1), (0, 1)],
            &[(0, 1), (1, 1)],
            &[(1, 1), (1, 1)],
            &[(1, 2), (1, 2)],
            &[(1, 1), (1, 2)],
        ]);
        let hull = hull_vertices(&points).unwrap();
        assert_eq!(hull.len(), 4);
        assert!(relative_interior_contains(&points, &[rat(1, 2), rat(1, 2)]).unwrap());
        // Edge midpoint is in the hull but not the relative interior.
        assert!(is_in_hull(&points, &[rat(1, 1), rat(1, 2)]).unwrap());
        assert!(!relative_interior_contains(&points, &[rat(1, 1), rat(1, 2)]).unwrap());
        // A lower-dimensional hull: relint of a segment embedded in R².
        let seg = pts(&[&[(0, 1), (0, 1)], &[(1, 1), (1, 1)]]);
        assert!(relative_interior_contains(&seg, &[rat(1, 2), rat(1, 2)]).unwrap());
        assert!(!relative_interior_contains(&seg, &[rat(0, 1), rat(0, 1)]).unwrap());
    }
}
