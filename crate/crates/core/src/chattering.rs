//! Mixture construction: matching performance vectors with small mixtures of
//! deterministic behavior.
//!
//! The constructive heart of the crate. Three mechanisms combine:
//!
//! - **Carathéodory reduction** ([`caratheodory_reduce`]): a finitely
//!   supported distribution can be thinned to an affinely independent support
//!   — at most `dim + 1` points — without moving its barycenter, by walking
//!   affine dependencies and driving one weight to zero per step, exactly.
//! - **Vertex structure**: a vertex of the occupation polytope cut by `p`
//!   extra criterion rows randomizes at no state between more than `p + 1`
//!   actions, so its disintegration packs into a chattering policy of order
//!   `p + 1` ([`vertex_to_chattering`]), and the vertex itself is an exact
//!   convex combination of at most `p + 1` deterministic occupation measures
//!   ([`decompose_vertex`]).
//! - **Stage reduction** ([`stage_reduce`]): in an eventually-stationary
//!   Markov policy, any one stage kernel can be replaced by a per-state
//!   mixture of at most `2d + 1` actions without changing either the stage's
//!   expected reward vector or the total performance vector — reduce the
//!   per-state cloud `(r(x,a), Σ_y Q(y|x,a)·h(y))` in `R^{2d}`, where `h` is
//!   the exact tail value of the reward from the next stage on.
//!
//! [`match_performance`] strings these together: any achievable performance
//! vector (d criteria) is hit exactly by a chattering stationary policy of
//! order at most `d + 1`, found as a basic feasible point of the
//! target-constrained polytope. Every operation re-verifies its own
//! postcondition exactly and reports an invariant-violation error rather
//! than return a wrong object.

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::geometry::CharPolytope;
use crate::linalg;
use crate::lp;
use crate::model::{ModelSpec, ReachableBlock};
use crate::occupation::{self, OccupationMeasure};
use crate::policy::{
    pack_selectors, ChatteringPolicy, DeterministicPolicy, MarkovPolicy, StationaryPolicy,
};
use crate::scalar::{Rational, Scalar};

/// An exact convex decomposition of an occupation measure into deterministic
/// occupation measures: `target = Σ λ_i · μ_{φ_i}` with `λ > 0, Σλ = 1`.
#[derive(Debug, Clone)]
pub struct MixtureDecomposition<S: Scalar> {
    /// `(λ_i, φ_i, μ_{φ_i})`, all weights positive.
    pub components: Vec<(S, DeterministicPolicy, OccupationMeasure<S>)>,
    pub target: OccupationMeasure<S>,
}

impl<S: Scalar> MixtureDecomposition<S> {
    /// Re-verifies the defining invariants: positive weights summing to one
    /// and exact mixture equality.
    pub fn check(&self) -> Result<()> {
        let mut sum = S::zero();
        let mut mixed = OccupationMeasure::new();
        for (lambda, _, mu) in &self.components {
            if !lambda.is_positive_tol() {
                return Err(Error::Internal("non-positive mixture weight".into()));
            }
            sum = sum + lambda.clone();
            for (&pair, v) in &mu.mass {
                mixed.add(pair, lambda.clone() * v.clone());
            }
        }
        if !(sum - S::one()).is_zero_tol() {
            return Err(Error::Internal("mixture weights do not sum to one".into()));
        }
        if !mixed.eq_tol(&self.target) {
            return Err(Error::Internal("mixture does not reproduce its target".into()));
        }
        Ok(())
    }
}

/// Carathéodory reduction on indexed points: thins `(weights, points)` to an
/// affinely independent sub-support with the same weighted barycenter and
/// total weight, exactly. Returns `(original index, new weight)` pairs, at
/// most `affine rank + 1 ≤ dim + 1` of them, weights positive.
///
/// Each round finds an affine dependency among the active points, moves along
/// it until the first weight hits zero (ties: the smallest index is
/// eliminated, along with any weight that reaches zero simultaneously), and
/// repeats until the support is affinely independent.
pub fn caratheodory_indices<S: Scalar>(
    weights: &[S],
    points: &[Vec<S>],
) -> Result<Vec<(usize, S)>> {
    if weights.len() != points.len() {
        return Err(Error::DimensionMismatch(
            "one weight per point required".into(),
        ));
    }
    let mut active: Vec<(usize, S)> = weights
        .iter()
        .enumerate()
        .filter(|(_, w)| !w.is_zero_tol())
        .map(|(i, w)| (i, w.clone()))
        .collect();
    if active.iter().any(|(_, w)| w.is_negative_tol()) {
        return Err(Error::InvalidInput("negative weight".into()));
    }
    loop {
        if active.len() <= 1 {
            return Ok(active);
        }
        // Columns [point; 1]: a nullspace vector is an affine dependency.
        let cols: Vec<Vec<S>> = active
            .iter()
            .map(|(i, _)| {
                let mut v = points[*i].clone();
                v.push(S::one());
                v
            })
            .collect();
        let Some(dep) = linalg::nullspace_vector(&cols) else {
            return Ok(active);
        };
        let mut step: Option<(S, usize)> = None;
        for (j, d) in dep.iter().enumerate() {
            if !d.is_positive_tol() {
                continue;
            }
            let ratio = active[j].1.clone() / d.clone();
            let better = match &step {
                None => true,
                Some((best, _)) => ratio.cmp_total(best) == std::cmp::Ordering::Less,
            };
            if better {
                step = Some((ratio, j));
            }
        }
        let Some((t, _)) = step else {
            // Sum of dependency coefficients is zero, so a nonzero dependency
            // always has a positive entry; reaching here means the nullspace
            // vector was defective.
            return Err(Error::Internal("affine dependency with no positive entry".into()));
        };
        let mut next = Vec::with_capacity(active.len() - 1);
        for ((i, w), d) in active.into_iter().zip(dep) {
            let w = w - t.clone() * d;
            if !w.is_zero_tol() {
                next.push((i, w));
            }
        }
        active = next;
    }
}

/// Carathéodory reduction in the form "(weight, point) list in, subset out":
/// input weights must be positive and sum to one; the output is a sub-list
/// with fresh positive weights, the same barycenter exactly, and support at
/// most `dim + 1`.
pub fn caratheodory_reduce<S: Scalar>(items: &[(S, Vec<S>)]) -> Result<Vec<(S, Vec<S>)>> {
    let weights: Vec<S> = items.iter().map(|(w, _)| w.clone()).collect();
    let points: Vec<Vec<S>> = items.iter().map(|(_, p)| p.clone()).collect();
    if weights.iter().any(|w| !w.is_positive_tol()) {
        return Err(Error::InvalidInput("weights must be positive".into()));
    }
    let total = weights.iter().fold(S::zero(), |acc, w| acc + w.clone());
    if !(total - S::one()).is_zero_tol() {
        return Err(Error::InvalidInput("weights must sum to one".into()));
    }
    Ok(caratheodory_indices(&weights, &points)?
        .into_iter()
        .map(|(i, w)| (w, points[i].clone()))
        .collect())
}

/// Packs a vertex of the `p`-constrained occupation polytope into a
/// chattering policy of order at most `p + 1`, and verifies the policy's
/// occupation measure reproduces the vertex exactly.
///
/// The order bound is structural: at a vertex, no state's disintegration
/// randomizes between more than `p + 1` actions. A violation falsifies that
/// argument and surfaces as [`Error::OrderBoundViolated`].
pub fn vertex_to_chattering<S: Scalar>(
    spec: &ModelSpec,
    block: &ReachableBlock,
    vertex: &OccupationMeasure<S>,
    p: usize,
) -> Result<ChatteringPolicy> {
    let sigma = occupation::disintegrate(spec, vertex)?;
    let gamma = match pack_selectors(spec, &sigma, p + 1) {
        Ok(g) => g,
        Err(Error::SupportTooLarge { state, support, cap }) => {
            return Err(Error::OrderBoundViolated { state, support, bound: cap })
        }
        Err(e) => return Err(e),
    };
    let mu: OccupationMeasure<S> =
        occupation::occupation_of_stationary(spec, block, &gamma.as_stationary(spec))?;
    if !mu.eq_tol(vertex) {
        return Err(Error::Internal(
            "packed chattering policy does not reproduce the vertex measure".into(),
        ));
    }
    Ok(gamma)
}

/// Deterministic selectors compatible with a measure: every candidate picks a
/// charged action at charged states and θ elsewhere. Any exact convex
/// decomposition of the measure into deterministic occupation measures can be
/// rewritten over this set, because changing a selector at a state its own
/// trajectory never reaches does not change its measure.
fn support_selectors(
    spec: &ModelSpec,
    mu_support: &[Vec<usize>],
    cap: usize,
) -> Result<Vec<DeterministicPolicy>> {
    let mut count: usize = 1;
    for actions in mu_support {
        if !actions.is_empty() {
            count = count.saturating_mul(actions.len());
            if count > cap {
                return Err(Error::TooLarge { vars: count, cap });
            }
        }
    }
    let mut out = Vec::with_capacity(count);
    let mut pick = vec![0usize; spec.num_states()];
    loop {
        let choice: Vec<usize> = (0..spec.num_states())
            .map(|x| {
                if mu_support[x].is_empty() {
                    spec.theta(x)
                } else {
                    mu_support[x][pick[x]]
                }
            })
            .collect();
        out.push(DeterministicPolicy { choice });
        let mut x = spec.num_states();
        loop {
            if x == 0 {
                return Ok(out);
            }
            x -= 1;
            if mu_support[x].len() <= 1 {
                continue;
            }
            pick[x] += 1;
            if pick[x] < mu_support[x].len() {
                break;
            }
            pick[x] = 0;
        }
    }
}

const SELECTOR_CAP: usize = 20_000;

/// Decomposes a vertex of the `p`-constrained occupation polytope into an
/// exact convex combination of at most `bound = p + 1` deterministic
/// occupation measures.
///
/// Candidates are the selectors agreeing with the vertex's per-state
/// supports. One LP feasibility finds some representing combination; a
/// Carathéodory pass over the measure vectors then thins it to an affinely
/// independent sub-support. Every measure in any representation lies in the
/// minimal face of the polytope containing the vertex, whose dimension is at
/// most `p`, so the thinned support has at most `p + 1` components; more
/// would falsify the bound and reports [`Error::NoDecomposition`].
pub fn decompose_vertex<S: Scalar>(
    spec: &ModelSpec,
    block: &ReachableBlock,
    vertex: &OccupationMeasure<S>,
    bound: usize,
) -> Result<MixtureDecomposition<S>> {
    let support: Vec<Vec<usize>> = (0..spec.num_states())
        .map(|x| vertex.charged_actions(x))
        .collect();
    let selectors = support_selectors(spec, &support, SELECTOR_CAP)?;
    let measures: Vec<OccupationMeasure<S>> = selectors
        .iter()
        .map(|phi| occupation::occupation_of_stationary(spec, block, &phi.to_stationary(spec)))
        .collect::<Result<_>>()?;
    // Equality system: one row per pair charged anywhere, plus normalization.
    let mut pairs: Vec<(usize, usize)> = vertex.mass.keys().cloned().collect();
    for mu in &measures {
        for &pair in mu.mass.keys() {
            if !pairs.contains(&pair) {
                pairs.push(pair);
            }
        }
    }
    pairs.sort_unstable();
    let mut a: Vec<Vec<S>> = pairs
        .iter()
        .map(|&(x, act)| measures.iter().map(|mu| mu.get(x, act)).collect())
        .collect();
    a.push(vec![S::one(); measures.len()]);
    let mut b: Vec<S> = pairs.iter().map(|&(x, act)| vertex.get(x, act)).collect();
    b.push(S::one());
    let Some(lambda) = lp::feasible_point(&a, &b)? else {
        return Err(Error::NoDecomposition { bound });
    };
    // Thin to an affinely independent support among the measure vectors.
    let dense: Vec<Vec<S>> = measures.iter().map(|mu| mu.to_dense(&pairs)).collect();
    let reduced = caratheodory_indices(&lambda, &dense)?;
    if reduced.len() > bound {
        return Err(Error::NoDecomposition { bound });
    }
    let decomposition = MixtureDecomposition {
        components: reduced
            .into_iter()
            .map(|(j, w)| (w, selectors[j].clone(), measures[j].clone()))
            .collect(),
        target: vertex.clone(),
    };
    decomposition.check()?;
    Ok(decomposition)
}

/// Merges a mixture of deterministic policies into one chattering policy with
/// the same occupation measure: the selectors are the mixture's policies and
/// the weight of selector `i` at state `x` is its share of the mixed state
/// marginal, `β_i(x) = λ_i·m_i(x) / Σ_j λ_j·m_j(x)` (first selector at
/// uncharged states). Identical selectors are merged, so duplicate components
/// collapse. The result is verified to reproduce the mixed measure exactly.
pub fn mixture_to_stationary<S: Scalar>(
    spec: &ModelSpec,
    block: &ReachableBlock,
    mix: &MixtureDecomposition<S>,
) -> Result<ChatteringPolicy> {
    mix.check()?;
    // Merge duplicate selectors up front, summing their weights.
    let mut selectors: Vec<DeterministicPolicy> = Vec::new();
    let mut lambdas: Vec<Rational> = Vec::new();
    let mut marginals: Vec<Vec<Rational>> = Vec::new();
    for (lambda, phi, mu) in &mix.components {
        let lam = lambda
            .to_rational()
            .ok_or_else(|| Error::Internal("non-finite mixture weight".into()))?;
        let marg: Vec<Rational> = (0..spec.num_states())
            .map(|x| {
                mu.state_marginal(x)
                    .to_rational()
                    .ok_or_else(|| Error::Internal("non-finite marginal".into()))
            })
            .collect::<Result<_>>()?;
        if let Some(k) = selectors.iter().position(|s| s == phi) {
            lambdas[k] += lam;
        } else {
            selectors.push(phi.clone());
            lambdas.push(lam);
            marginals.push(marg);
        }
    }
    let order = selectors.len();
    let mut weights: Vec<Vec<Rational>> = Vec::with_capacity(spec.num_states());
    for x in 0..spec.num_states() {
        let mixed: Rational = (0..order)
            .map(|i| lambdas[i].clone() * marginals[i][x].clone())
            .fold(Rational::zero(), |acc, v| acc + v);
        let mut row = vec![Rational::zero(); order];
        if mixed.is_zero() {
            row[0] = Rational::one();
        } else {
            for i in 0..order {
                row[i] = lambdas[i].clone() * marginals[i][x].clone() / mixed.clone();
            }
        }
        weights.push(row);
    }
    let gamma = ChatteringPolicy { selectors, weights };
    gamma.check_for(spec)?;
    let mu: OccupationMeasure<S> =
        occupation::occupation_of_stationary(spec, block, &gamma.as_stationary(spec))?;
    if !mu.eq_tol(&mix.target) {
        return Err(Error::Internal(
            "merged chattering policy does not reproduce the mixture".into(),
        ));
    }
    Ok(gamma)
}

/// A performance-matched policy with its exact occupation measure.
#[derive(Debug, Clone)]
pub struct MatchedPolicy<S: Scalar> {
    pub policy: ChatteringPolicy,
    pub measure: OccupationMeasure<S>,
    /// The order bound the construction promises (`d + 1`).
    pub order_bound: usize,
}

/// Builds the target-constrained polytope `{μ ∈ O : μ(r) = target}`, takes
/// any basic feasible point (a vertex), and packs it into a chattering policy
/// of order at most `d + 1` whose performance equals `target` exactly.
/// [`Error::Unachievable`] signals the target is outside the achievable set.
pub fn match_performance<S: Scalar>(
    spec: &ModelSpec,
    block: &ReachableBlock,
    target: &[S],
) -> Result<MatchedPolicy<S>> {
    if target.len() != spec.d {
        return Err(Error::DimensionMismatch(format!(
            "target has {} entries, model has {} criteria",
            target.len(),
            spec.d
        )));
    }
    let poly = CharPolytope::build(spec, block);
    let mut a = poly.a.clone();
    for i in 0..spec.d {
        a.push(
            poly.pairs
                .iter()
                .map(|&(x, act)| S::from_rational(&spec.rewards[x][act][i]))
                .collect(),
        );
    }
    let mut b = poly.b.clone();
    b.extend(target.iter().cloned());
    let Some(values) = lp::feasible_point(&a, &b)? else {
        return Err(Error::Unachievable);
    };
    let vertex = OccupationMeasure::from_dense(&poly.pairs, &values);
    let policy = vertex_to_chattering(spec, block, &vertex, spec.d)?;
    let achieved = vertex.performance(spec);
    if !achieved
        .iter()
        .zip(target)
        .all(|(p, t)| (p.clone() - t.clone()).is_zero_tol())
    {
        return Err(Error::Internal(
            "matched vertex does not hit the requested performance".into(),
        ));
    }
    Ok(MatchedPolicy { policy, measure: vertex, order_bound: spec.d + 1 })
}

/// Replaces stage `t` of an eventually-stationary Markov policy by a
/// per-state mixture of at most `2d + 1` actions, preserving exactly both the
/// stage-`t` expected reward vector and the total performance vector.
///
/// Per reachable state the action cloud `(r(x,a), Σ_y Q(y|x,a)·h(y))` lives
/// in `R^{2d}` — `h` is the exact tail value of the reward from stage `t+1`
/// on — and Carathéodory reduction of the stage kernel over that cloud keeps
/// both the instantaneous and the continuation expectations unchanged.
/// Exact-rational throughout (policies carry exact weights).
pub fn stage_reduce(
    spec: &ModelSpec,
    pi: &MarkovPolicy,
    t: usize,
) -> Result<MarkovPolicy> {
    pi.check_for(spec)?;
    if t >= pi.stages.len() {
        return Err(Error::InvalidInput(format!(
            "stage {t} is outside the staged prefix (length {})",
            pi.stages.len()
        )));
    }
    let block = spec.require_uniformly_absorbing()?;
    let nu = stage_state_distribution(spec, &block, pi, t);
    let h = tail_values(spec, &block, pi, t + 1)?;
    let bound = 2 * spec.d + 1;

    let mut reduced_stage = pi.stages[t].clone();
    for &x in &block.states {
        let row = &pi.stages[t].dist[x];
        // Cloud: stage reward stacked with the expected continuation value.
        let points: Vec<Vec<Rational>> = (0..spec.num_actions(x))
            .map(|a| {
                let mut f: Vec<Rational> = spec.rewards[x][a].clone();
                for i in 0..spec.d {
                    let mut cont = Rational::zero();
                    for (j, &y) in block.states.iter().enumerate() {
                        let q = &spec.kernel[x][a][y];
                        if !q.is_zero() {
                            cont += q * h[j][i].clone();
                        }
                    }
                    f.push(cont);
                }
                f
            })
            .collect();
        let kept = caratheodory_indices(row, &points)?;
        let support = kept.len();
        if support > bound {
            return Err(Error::OrderBoundViolated {
                state: spec.states[x].clone(),
                support,
                bound,
            });
        }
        let mut new_row = vec![Rational::zero(); spec.num_actions(x)];
        for (a, w) in kept {
            new_row[a] = w;
        }
        reduced_stage.dist[x] = new_row;
    }
    let mut stages = pi.stages.clone();
    stages[t] = reduced_stage;
    let tilde = MarkovPolicy { stages, tail: pi.tail.clone() };

    // Postconditions, checked exactly: stage-t expected reward and total
    // performance are unchanged.
    let before = stage_expected_reward(spec, &block, &nu, &pi.stages[t]);
    let after = stage_expected_reward(spec, &block, &nu, &tilde.stages[t]);
    if before != after {
        return Err(Error::Internal(
            "stage reduction changed the stage expectation".into(),
        ));
    }
    let perf_before = occupation::occupation_of_markov::<Rational>(spec, &block, pi)?
        .performance(spec);
    let perf_after = occupation::occupation_of_markov::<Rational>(spec, &block, &tilde)?
        .performance(spec);
    if perf_before != perf_after {
        return Err(Error::Internal(
            "stage reduction changed the total performance".into(),
        ));
    }
    Ok(tilde)
}

/// Applies [`stage_reduce`] at every staged index in turn; the result is a
/// Markov policy whose every stage randomizes between at most `2d + 1`
/// actions per state, with the original performance vector.
pub fn reduce_all_stages(spec: &ModelSpec, pi: &MarkovPolicy) -> Result<MarkovPolicy> {
    let mut current = pi.clone();
    for t in 0..pi.stages.len() {
        current = stage_reduce(spec, &current, t)?;
    }
    Ok(current)
}

/// State distribution on the reachable block at the start of stage `t`
/// (block order): `P{X_t = x, T_Δ > t}` under the staged prefix.
pub fn stage_state_distribution(
    spec: &ModelSpec,
    block: &ReachableBlock,
    pi: &MarkovPolicy,
    t: usize,
) -> Vec<Rational> {
    let mut nu: Vec<Rational> = block.states.iter().map(|&x| spec.eta[x].clone()).collect();
    for stage in pi.stages.iter().take(t) {
        let mut next = vec![Rational::zero(); block.len()];
        for (i, &x) in block.states.iter().enumerate() {
            if nu[i].is_zero() {
                continue;
            }
            for a in 0..spec.num_actions(x) {
                let w = &stage.dist[x][a];
                if w.is_zero() {
                    continue;
                }
                for (j, &y) in block.states.iter().enumerate() {
                    let q = &spec.kernel[x][a][y];
                    if !q.is_zero() {
                        next[j] += nu[i].clone() * w * q;
                    }
                }
            }
        }
        nu = next;
    }
    nu
}

/// Exact tail values `h(y) = E[Σ_{j≥k} r(X_j,A_j) | X_k = y]` on the block,
/// for the future of `pi` from stage `k` on (remaining staged prefix followed
/// by the stationary tail).
fn tail_values(
    spec: &ModelSpec,
    block: &ReachableBlock,
    pi: &MarkovPolicy,
    k: usize,
) -> Result<Vec<Vec<Rational>>> {
    let n = block.len();
    // Stationary tail: solve (I − B_τ) v_i = g_τ,i per criterion.
    let mut ib = vec![vec![Rational::zero(); n]; n];
    let mut g_tail = vec![vec![Rational::zero(); spec.d]; n];
    for (i, &x) in block.states.iter().enumerate() {
        ib[i][i] = Rational::one();
        for a in 0..spec.num_actions(x) {
            let w = &pi.tail.dist[x][a];
            if w.is_zero() {
                continue;
            }
            for (j, &y) in block.states.iter().enumerate() {
                let q = &spec.kernel[x][a][y];
                if !q.is_zero() {
                    ib[i][j] -= w * q;
                }
            }
            for i_crit in 0..spec.d {
                g_tail[i][i_crit] += w * &spec.rewards[x][a][i_crit];
            }
        }
    }
    let mut v = vec![vec![Rational::zero(); spec.d]; n];
    for i_crit in 0..spec.d {
        let rhs: Vec<Rational> = g_tail.iter().map(|g| g[i_crit].clone()).collect();
        let col = linalg::solve_square(&ib, &rhs)?;
        for (vi, c) in v.iter_mut().zip(col) {
            vi[i_crit] = c;
        }
    }
    // Backward through the remaining staged prefix.
    for s in (k..pi.stages.len()).rev() {
        let stage = &pi.stages[s];
        let mut prev = vec![vec![Rational::zero(); spec.d]; n];
        for (i, &x) in block.states.iter().enumerate() {
            for a in 0..spec.num_actions(x) {
                let w = &stage.dist[x][a];
                if w.is_zero() {
                    continue;
                }
                for i_crit in 0..spec.d {
                    prev[i][i_crit] += w * &spec.rewards[x][a][i_crit];
                }
                for (j, &y) in block.states.iter().enumerate() {
                    let q = &spec.kernel[x][a][y];
                    if q.is_zero() {
                        continue;
                    }
                    for i_crit in 0..spec.d {
                        prev[i][i_crit] += w * q * v[j][i_crit].clone();
                    }
                }
            }
        }
        v = prev;
    }
    Ok(v)
}

/// `E[r(X_t, A_t); T_Δ > t]` for the full policy: the stage-`t` expected
/// reward vector, exact.
pub fn stage_expectation(
    spec: &ModelSpec,
    block: &ReachableBlock,
    pi: &MarkovPolicy,
    t: usize,
) -> Vec<Rational> {
    let nu = stage_state_distribution(spec, block, pi, t);
    let stage = if t < pi.stages.len() {
        &pi.stages[t]
    } else {
        &pi.tail
    };
    stage_expected_reward(spec, block, &nu, stage)
}

/// `E[r(X_t, A_t)]` for a stage kernel under the given state distribution.
fn stage_expected_reward(
    spec: &ModelSpec,
    block: &ReachableBlock,
    nu: &[Rational],
    stage: &StationaryPolicy,
) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); spec.d];
    for (i, &x) in block.states.iter().enumerate() {
        if nu[i].is_zero() {
            continue;
        }
        for a in 0..spec.num_actions(x) {
            let w = &stage.dist[x][a];
            if w.is_zero() {
                continue;
            }
            for (slot, r) in out.iter_mut().zip(&spec.rewards[x][a]) {
                *slot += nu[i].clone() * w * r;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scalar::rat;
    use proptest::prelude::*;

    fn uniform_twostate() -> StationaryPolicy {
        StationaryPolicy {
            dist: vec![vec![rat(1, 2), rat(1, 2)], vec![rat(1, 1)]],
        }
    }

    #[test]
    fn caratheodory_reduces_a_line_cloud() {
        let items = vec![
            (rat(1, 3), vec![rat(0, 1)]),
            (rat(1, 3), vec![rat(1, 1)]),
            (rat(1, 3), vec![rat(2, 1)]),
        ];
        let out = caratheodory_reduce(&items).unwrap();
        assert!(out.len() <= 2);
        let total: Rational = out.iter().map(|(w, _)| w.clone()).sum();
        assert_eq!(total, rat(1, 1));
        let barycenter: Rational = out.iter().map(|(w, p)| w.clone() * p[0].clone()).sum();
        assert_eq!(barycenter, rat(1, 1));
        assert!(out.iter().all(|(w, _)| w > &rat(0, 1)));
    }

    #[test]
    fn caratheodory_no_op_and_degenerate_cases() {
        // Already affinely independent: unchanged.
        let items = vec![
            (rat(1, 4), vec![rat(0, 1), rat(0, 1)]),
            (rat(3, 4), vec![rat(1, 1), rat(0, 1)]),
        ];
        assert_eq!(caratheodory_reduce(&items).unwrap(), items);
        // All points identical: collapses to a single unit weight.
        let items = vec![
            (rat(1, 2), vec![rat(5, 1)]),
            (rat(1, 4), vec![rat(5, 1)]),
            (rat(1, 4), vec![rat(5, 1)]),
        ];
        let out = caratheodory_reduce(&items).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].0, rat(1, 1));
        assert_eq!(out[0].1, vec![rat(5, 1)]);
    }

    #[test]
    fn caratheodory_rejects_bad_weights() {
        let items = vec![(rat(1, 2), vec![rat(0, 1)]), (rat(1, 4), vec![rat(1, 1)])];
        assert!(matches!(
            caratheodory_reduce(&items),
            Err(Error::InvalidInput(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn caratheodory_preserves_barycenters(
            dim in 1usize..=6,
            raw in proptest::collection::vec((1i64..=20, proptest::collection::vec(-12i64..=12, 6)), 2..10),
        ) {
            let total: i64 = raw.iter().map(|(w, _)| w).sum();
            let items: Vec<(Rational, Vec<Rational>)> = raw
                .iter()
                .map(|(w, p)| {
                    (rat(*w, total), p[..dim].iter().map(|&v| rat(v, 4)).collect())
                })
                .collect();
            let out = caratheodory_reduce(&items).unwrap();
            prop_assert!(out.len() <= dim + 1);
            let total_w: Rational = out.iter().map(|(w, _)| w.clone()).sum();
            prop_assert_eq!(total_w, rat(1, 1));
            for i in 0..dim {
                let before: Rational = items.iter().map(|(w, p)| w.clone() * p[i].clone()).sum();
                let after: Rational = out.iter().map(|(w, p)| w.clone() * p[i].clone()).sum();
                prop_assert_eq!(before, after);
            }
            // Outputs are a sub-multiset of the inputs.
            for (_, p) in &out {
                prop_assert!(items.iter().any(|(_, q)| q == p));
            }
        }
    }

    #[test]
    fn packs_the_uniform_vertex_of_the_constrained_polytope() {
        let spec = fixtures::twostate();
        let block = spec.require_uniformly_absorbing().unwrap();
        let vertex: OccupationMeasure<Rational> =
            occupation::occupation_of_stationary(&spec, &block, &uniform_twostate()).unwrap();
        let gamma = vertex_to_chattering(&spec, &block, &vertex, 1).unwrap();
        assert_eq!(gamma.order(), 2);
        assert_eq!(gamma.weights[0], vec![rat(1, 2), rat(1, 2)]);
        // Order cap p = 0 must refuse: the vertex randomizes at s0.
        assert!(matches!(
            vertex_to_chattering(&spec, &block, &vertex, 0),
            Err(Error::OrderBoundViolated { support: 2, bound: 1, .. })
        ));
    }

    #[test]
    fn decomposes_the_uniform_vertex() {
        let spec = fixtures::twostate();
        let block = spec.require_uniformly_absorbing().unwrap();
        let vertex: OccupationMeasure<Rational> =
            occupation::occupation_of_stationary(&spec, &block, &uniform_twostate()).unwrap();
        let mix = decompose_vertex(&spec, &block, &vertex, 2).unwrap();
        assert_eq!(mix.components.len(), 2);
        // λ = 2/3 on the quit selector, 1/3 on the loiter selector.
        let by_choice: Vec<(usize, Rational)> = mix
            .components
            .iter()
            .map(|(l, phi, _)| (phi.choice[0], l.clone()))
            .collect();
        assert!(by_choice.contains(&(0, rat(2, 3))));
        assert!(by_choice.contains(&(1, rat(1, 3))));
        mix.check().unwrap();
    }

    #[test]
    fn deterministic_vertices_decompose_trivially() {
        let spec = fixtures::twostate();
        let block = spec.require_uniformly_absorbing().unwrap();
        let det = DeterministicPolicy { choice: vec![1, 0] };
        let vertex: OccupationMeasure<Rational> =
            occupation::occupation_of_stationary(&spec, &block, &det.to_stationary(&spec))
                .unwrap();
        let mix = decompose_vertex(&spec, &block, &vertex, 1).unwrap();
        assert_eq!(mix.components.len(), 1);
        assert_eq!(mix.components[0].0, rat(1, 1));
        assert_eq!(mix.components[0].1, det);
    }

    #[test]
    fn merges_mixtures_into_chattering_policies() {
        let spec = fixtures::twostate();
        let block = spec.require_uniformly_absorbing().unwrap();
        let vertex: OccupationMeasure<Rational> =
            occupation::occupation_of_stationary(&spec, &block, &uniform_twostate()).unwrap();
        let mix = decompose_vertex(&spec, &block, &vertex, 2).unwrap();
        let gamma = mixture_to_stationary(&spec, &block, &mix).unwrap();
        // β(s0) = (2/3·1)/(4/3) = 1/2 on each selector.
        assert_eq!(gamma.order(), 2);
        assert_eq!(gamma.weights[0], vec![rat(1, 2), rat(1, 2)]);

        // Two copies of the same selector collapse to order 1.
        let det = DeterministicPolicy { choice: vec![0, 0] };
        let mu: OccupationMeasure<Rational> =
            occupation::occupation_of_stationary(&spec, &block, &det.to_stationary(&spec))
                .unwrap();
        let doubled = MixtureDecomposition {
            components: vec![
                (rat(1, 2), det.clone(), mu.clone()),
                (rat(1, 2), det.clone(), mu.clone()),
            ],
            target: mu,
        };
        let gamma = mixture_to_stationary(&spec, &block, &doubled).unwrap();
        assert_eq!(gamma.order(), 1);
        assert_eq!(gamma.selectors[0], det);
    }

    #[test]
    fn matches_the_mixture_only_performance() {
        let spec = fixtures::twostate();
        let block = spec.require_uniformly_absorbing().unwrap();
        let matched = match_performance(&spec, &block, &[rat(14, 15)]).unwrap();
        assert!(matched.policy.order() <= 2);
        assert_eq!(matched.measure.performance(&spec), vec![rat(14, 15)]);
        assert_eq!(matched.order_bound, 2);

        // Deterministic ends of the interval are matched too.
        for target in [rat(1, 1), rat(4, 5)] {
            let m = match_performance(&spec, &block, &[target.clone()]).unwrap();
            assert_eq!(m.measure.performance(&spec), vec![target]);
            assert!(m.policy.order() <= 2);
        }

        // Outside the image: unachievable.
        assert!(matches!(
            match_performance(&spec, &block, &[rat(2, 1)]),
            Err(Error::Unachievable)
        ));
    }

    #[test]
    fn stage_reduction_on_the_worked_example_is_a_no_op() {
        let spec = fixtures::twostate();
        let pi = MarkovPolicy {
            stages: vec![uniform_twostate()],
            tail: DeterministicPolicy { choice: vec![0, 0] }.to_stationary(&spec),
        };
        let tilde = stage_reduce(&spec, &pi, 0).unwrap();
        // Support 2 ≤ 2d+1 = 3 and the two cloud points are affinely
        // independent, so nothing changes.
        assert_eq!(tilde.stages[0], pi.stages[0]);
        assert_eq!(tilde.tail, pi.tail);
    }

    #[test]
    fn stage_reduction_thins_a_flat_cloud() {
        // Four actions straight to the absorbing state with collinear
        // rewards: the stage cloud is one-dimensional, so the uniform kernel
        // thins to at most two actions with the same expectations.
        let spec = crate::model::ModelBuilder::new(1)
            .state("s", false)
            .state("t", true)
            .action("s", "a0", &[("t", rat(1, 1))], &[rat(0, 1)])
            .action("s", "a1", &[("t", rat(1, 1))], &[rat(1, 1)])
            .action("s", "a2", &[("t", rat(1, 1))], &[rat(2, 1)])
            .action("s", "a3", &[("t", rat(1, 1))], &[rat(3, 1)])
            .eta(&[("s", rat(1, 1))])
            .build();
        let block = spec.require_uniformly_absorbing().unwrap();
        let uniform = StationaryPolicy {
            dist: vec![
                vec![rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)],
                vec![rat(1, 1)],
            ],
        };
        let pi = MarkovPolicy {
            stages: vec![uniform],
            tail: StationaryPolicy::theta(&spec),
        };
        let tilde = stage_reduce(&spec, &pi, 0).unwrap();
        let support = tilde.stages[0]
            .dist[0]
            .iter()
            .filter(|w| !w.is_zero())
            .count();
        assert!(support <= 2, "collinear cloud must thin to ≤ 2 actions");
        let perf = occupation::occupation_of_markov::<Rational>(&spec, &block, &tilde)
            .unwrap()
            .performance(&spec);
        assert_eq!(perf, vec![rat(3, 2)]);
    }

    #[test]
    fn iterated_stage_reduction_preserves_performance() {
        let spec = fixtures::twostate();
        let block = spec.require_uniformly_absorbing().unwrap();
        let mixed = StationaryPolicy {
            dist: vec![vec![rat(1, 3), rat(2, 3)], vec![rat(1, 1)]],
        };
        let pi = MarkovPolicy {
            stages: vec![uniform_twostate(), mixed, uniform_twostate()],
            tail: DeterministicPolicy { choice: vec![1, 0] }.to_stationary(&spec),
        };
        let before = occupation::occupation_of_markov::<Rational>(&spec, &block, &pi)
            .unwrap()
            .performance(&spec);
        let tilde = reduce_all_stages(&spec, &pi).unwrap();
        let after = occupation::occupation_of_markov::<Rational>(&spec, &block, &tilde)
            .unwrap()
            .performance(&spec);
        assert_eq!(before, after);
        for stage in &tilde.stages {
            for row in &stage.dist {
                assert!(row.iter().filter(|w| !w.is_zero()).count() <= 3);
            }
        }
    }

    #[test]
    fn stage_reduce_rejects_tail_indices() {
        let spec = fixtures::twostate();
        let pi = MarkovPolicy {
            stages: vec![uniform_twostate()],
            tail: StationaryPolicy::theta(&spec),
        };
        assert!(matches!(
            stage_reduce(&spec, &pi, 1),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            stage_reduce(&fixtures::selfloop(), &pi, 0),
            Err(Error::NotAbsorbing)
        ));
    }
}
