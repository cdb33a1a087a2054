//! Occupation measures: the expected-visit-count summary of a policy.
//!
//! The occupation measure of a policy charges each state-action pair with the
//! expected number of times the pair is used before absorption. Expected
//! total rewards are linear in it — `performance = Σ mass(x,a)·r(x,a)` — so
//! a policy's entire multi-criteria performance is read off its measure, and
//! the reachable performance set is the linear image of the measure set.
//!
//! Under uniform absorption the measure of a stationary policy solves the
//! linear system `m(I − B_σ) = η` on the block of states reachable from the
//! initial distribution (`B_σ` is the state-to-state kernel under `σ`); the
//! matrix is invertible there, so the solve is exact. Eventually-stationary
//! Markov policies propagate the state distribution forward through their
//! staged prefix and close with a stationary tail solve.
//!
//! Measures are stored sparsely and never hold (tolerance-)zero entries, so
//! structural equality is meaningful in exact mode. Conversely,
//! [`disintegrate`] recovers a stationary policy from any nonzero measure,
//! with the θ convention (first admissible action) at uncharged states;
//! renormalization happens in exact rational arithmetic even when the masses
//! come from a floating run, so emitted policies always validate exactly.

use std::collections::BTreeMap;

use num::Zero;

use crate::error::{Error, Result};
use crate::model::{ModelSpec, ReachableBlock};
use crate::policy::{MarkovPolicy, PolicyKind, StationaryPolicy};
use crate::linalg;
use crate::scalar::{Rational, Scalar};

/// Expected total rewards per criterion, in declared criterion order.
pub type PerformanceVector<S> = Vec<S>;

/// A finite measure on state-action pairs, stored sparsely.
///
/// Entries that are (tolerance-)zero are never stored, so two measures built
/// through this API compare equal iff they agree entry-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationMeasure<S: Scalar> {
    /// Mass per charged `(state, action)` index pair.
    pub mass: BTreeMap<(usize, usize), S>,
}

impl<S: Scalar> Default for OccupationMeasure<S> {
    fn default() -> Self {
        OccupationMeasure { mass: BTreeMap::new() }
    }
}

impl<S: Scalar> OccupationMeasure<S> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a measure from dense values aligned with `pairs`, dropping
    /// (tolerance-)zero entries.
    pub fn from_dense(pairs: &[(usize, usize)], values: &[S]) -> Self {
        let mut mass = BTreeMap::new();
        for (pair, v) in pairs.iter().zip(values) {
            if !v.is_zero_tol() {
                mass.insert(*pair, v.clone());
            }
        }
        OccupationMeasure { mass }
    }

    /// Dense values aligned with `pairs` (zero where uncharged).
    pub fn to_dense(&self, pairs: &[(usize, usize)]) -> Vec<S> {
        pairs
            .iter()
            .map(|p| self.mass.get(p).cloned().unwrap_or_else(S::zero))
            .collect()
    }

    /// Adds `v` to the pair's mass, dropping the entry if the result is
    /// (tolerance-)zero.
    pub fn add(&mut self, pair: (usize, usize), v: S) {
        if v.is_zero_tol() && !self.mass.contains_key(&pair) {
            return;
        }
        let entry = self.mass.entry(pair).or_insert_with(S::zero);
        *entry = entry.clone() + v;
        if entry.is_zero_tol() {
            self.mass.remove(&pair);
        }
    }

    pub fn get(&self, state: usize, action: usize) -> S {
        self.mass.get(&(state, action)).cloned().unwrap_or_else(S::zero)
    }

    /// Total mass at a state, summed over its actions.
    pub fn state_marginal(&self, state: usize) -> S {
        self.mass
            .range((state, 0)..(state + 1, 0))
            .fold(S::zero(), |acc, (_, v)| acc + v.clone())
    }

    /// Charged states, ascending.
    pub fn charged_states(&self) -> Vec<usize> {
        let mut states: Vec<usize> = self.mass.keys().map(|&(x, _)| x).collect();
        states.dedup();
        states
    }

    /// Actions charged at `state`, ascending.
    pub fn charged_actions(&self, state: usize) -> Vec<usize> {
        self.mass
            .range((state, 0)..(state + 1, 0))
            .map(|(&(_, a), _)| a)
            .collect()
    }

    /// Total mass; for the measure of a policy this equals the expected
    /// absorption time.
    pub fn total_mass(&self) -> S {
        self.mass.values().fold(S::zero(), |acc, v| acc + v.clone())
    }

    /// Expected total reward per criterion: `ρ_i = Σ mass(x,a)·r_i(x,a)`.
    pub fn performance(&self, spec: &ModelSpec) -> PerformanceVector<S> {
        let mut out = vec![S::zero(); spec.d];
        for (&(x, a), m) in &self.mass {
            for (i, slot) in out.iter_mut().enumerate() {
                let r = &spec.rewards[x][a][i];
                if !r.is_zero() {
                    *slot = slot.clone() + m.clone() * S::from_rational(r);
                }
            }
        }
        out
    }

    /// Residuals of the flow-balance equations, one per non-absorbed state in
    /// declared order:
    /// `res(y) = Σ_a mass(y,a) − η(y) − Σ_{(x,a)} mass(x,a)·Q(y|x,a)`.
    ///
    /// A measure is the occupation measure of some policy exactly when every
    /// residual vanishes and all masses are nonnegative.
    pub fn flow_residuals(&self, spec: &ModelSpec) -> Vec<S> {
        let live = spec.nondelta_states();
        let mut res: Vec<S> = live
            .iter()
            .map(|&y| self.state_marginal(y) - S::from_rational(&spec.eta[y]))
            .collect();
        for (&(x, a), m) in &self.mass {
            for (k, &y) in live.iter().enumerate() {
                let q = &spec.kernel[x][a][y];
                if !q.is_zero() {
                    res[k] = res[k].clone() - m.clone() * S::from_rational(q);
                }
            }
        }
        res
    }

    /// Largest absolute flow residual (zero for a genuine occupation
    /// measure).
    pub fn max_flow_residual(&self, spec: &ModelSpec) -> S {
        self.flow_residuals(spec)
            .into_iter()
            .map(|r| r.abs())
            .max_by(|a, b| a.cmp_total(b))
            .unwrap_or_else(S::zero)
    }

    /// Entry-wise equality up to the scalar's zero tolerance (plain equality
    /// in exact mode, since zero entries are never stored).
    pub fn eq_tol(&self, other: &Self) -> bool {
        self.mass
            .keys()
            .chain(other.mass.keys())
            .all(|&(x, a)| (self.get(x, a) - other.get(x, a)).is_zero_tol())
    }

    /// Converts entry-wise through exact rationals (floats are exact dyadic
    /// rationals, so float → exact is lossless).
    pub fn convert<T: Scalar>(&self) -> Result<OccupationMeasure<T>> {
        let mut mass = BTreeMap::new();
        for (&pair, v) in &self.mass {
            let q = v
                .to_rational()
                .ok_or_else(|| Error::Internal("non-finite mass".into()))?;
            let t = T::from_rational(&q);
            if !t.is_zero_tol() {
                mass.insert(pair, t);
            }
        }
        Ok(OccupationMeasure { mass })
    }
}

/// The `I − B_σ` matrix restricted to the reachable block, rows and columns
/// in block order.
fn absorbing_system<S: Scalar>(
    spec: &ModelSpec,
    block: &ReachableBlock,
    sigma: &StationaryPolicy,
) -> Vec<Vec<S>> {
    let n = block.len();
    let mut a = vec![vec![S::zero(); n]; n];
    for (i, &x) in block.states.iter().enumerate() {
        a[i][i] = S::one();
        for act in 0..spec.num_actions(x) {
            let w = &sigma.dist[x][act];
            if w.is_zero() {
                continue;
            }
            for (j, &y) in block.states.iter().enumerate() {
                let q = &spec.kernel[x][act][y];
                if !q.is_zero() {
                    a[i][j] = a[i][j].clone()
                        - S::from_rational(w) * S::from_rational(q);
                }
            }
        }
    }
    a
}

/// Expected visit counts per block state under `sigma`, starting from `nu`
/// (a sub-probability on the block): solves `m(I − B_σ) = ν` by transposing.
fn visit_counts<S: Scalar>(
    spec: &ModelSpec,
    block: &ReachableBlock,
    sigma: &StationaryPolicy,
    nu: &[S],
) -> Result<Vec<S>> {
    let a = absorbing_system::<S>(spec, block, sigma);
    let n = block.len();
    let mut at = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            at[j][i] = a[i][j].clone();
        }
    }
    linalg::solve_square(&at, nu)
}

/// The occupation measure of a stationary policy, computed exactly on the
/// reachable block. `block` must come from the same model (see
/// [`ModelSpec::require_uniformly_absorbing`]).
pub fn occupation_of_stationary<S: Scalar>(
    spec: &ModelSpec,
    block: &ReachableBlock,
    sigma: &StationaryPolicy,
) -> Result<OccupationMeasure<S>> {
    sigma.check_for(spec)?;
    let nu: Vec<S> = block
        .states
        .iter()
        .map(|&x| S::from_rational(&spec.eta[x]))
        .collect();
    let m = visit_counts(spec, block, sigma, &nu)?;
    let mut mu = OccupationMeasure::new();
    for (i, &x) in block.states.iter().enumerate() {
        for a in 0..spec.num_actions(x) {
            let w = &sigma.dist[x][a];
            if !w.is_zero() {
                mu.add((x, a), m[i].clone() * S::from_rational(w));
            }
        }
    }
    Ok(mu)
}

/// The occupation measure of an eventually-stationary Markov policy: the
/// staged prefix is accumulated by forward propagation of the state
/// distribution, the tail by a stationary solve from wherever the prefix
/// leaves the chain.
pub fn occupation_of_markov<S: Scalar>(
    spec: &ModelSpec,
    block: &ReachableBlock,
    pi: &MarkovPolicy,
) -> Result<OccupationMeasure<S>> {
    pi.check_for(spec)?;
    let mut nu: Vec<S> = block
        .states
        .iter()
        .map(|&x| S::from_rational(&spec.eta[x]))
        .collect();
    let mut mu = OccupationMeasure::new();
    for sigma in &pi.stages {
        let mut next = vec![S::zero(); block.len()];
        for (i, &x) in block.states.iter().enumerate() {
            if nu[i].is_zero_tol() {
                continue;
            }
            for a in 0..spec.num_actions(x) {
                let w = &sigma.dist[x][a];
                if w.is_zero() {
                    continue;
                }
                let used = nu[i].clone() * S::from_rational(w);
                for (j, &y) in block.states.iter().enumerate() {
                    let q = &spec.kernel[x][a][y];
                    if !q.is_zero() {
                        next[j] = next[j].clone() + used.clone() * S::from_rational(q);
                    }
                }
                mu.add((x, a), used);
            }
        }
        nu = next;
    }
    let m = visit_counts(spec, block, &pi.tail, &nu)?;
    for (i, &x) in block.states.iter().enumerate() {
        for a in 0..spec.num_actions(x) {
            let w = &pi.tail.dist[x][a];
            if !w.is_zero() {
                mu.add((x, a), m[i].clone() * S::from_rational(w));
            }
        }
    }
    Ok(mu)
}

/// The occupation measure of any stored policy form (chattering policies go
/// through their induced stationary policy — they share its measure).
pub fn occupation_of<S: Scalar>(
    spec: &ModelSpec,
    block: &ReachableBlock,
    policy: &PolicyKind,
) -> Result<OccupationMeasure<S>> {
    match policy {
        PolicyKind::Deterministic(p) => {
            occupation_of_stationary(spec, block, &p.to_stationary(spec))
        }
        PolicyKind::Stationary(p) => occupation_of_stationary(spec, block, p),
        PolicyKind::Chattering(p) => {
            p.check_for(spec)?;
            occupation_of_stationary(spec, block, &p.as_stationary(spec))
        }
        PolicyKind::Markov(p) => occupation_of_markov(spec, block, p),
    }
}

/// Recovers a stationary policy from a measure: `σ(a|x) = mass(x,a)/m(x)`
/// where the state marginal is positive, θ (first admissible action)
/// elsewhere. Division and renormalization run in exact rational arithmetic
/// regardless of scalar mode, so the result always validates exactly.
pub fn disintegrate<S: Scalar>(
    spec: &ModelSpec,
    mu: &OccupationMeasure<S>,
) -> Result<StationaryPolicy> {
    for (&(x, a), m) in &mu.mass {
        if x >= spec.num_states() || a >= spec.num_actions(x) {
            return Err(Error::InvalidInput(format!(
                "measure charges unknown pair ({x}, {a})"
            )));
        }
        if m.is_negative_tol() {
            return Err(Error::InvalidInput(format!(
                "measure has negative mass at ({}, {})",
                spec.states[x], spec.actions[x][a]
            )));
        }
    }
    let mut dist: Vec<Vec<Rational>> = Vec::with_capacity(spec.num_states());
    for x in 0..spec.num_states() {
        let charged = mu.charged_actions(x);
        let row = if charged.is_empty() {
            let mut row = vec![Rational::zero(); spec.num_actions(x)];
            row[spec.theta(x)] = num::One::one();
            row
        } else {
            let exact: Vec<(usize, Rational)> = charged
                .iter()
                .map(|&a| {
                    let q = mu
                        .get(x, a)
                        .to_rational()
                        .ok_or_else(|| Error::Internal("non-finite mass".into()))?;
                    Ok((a, q))
                })
                .collect::<Result<_>>()?;
            let marginal: Rational =
                exact.iter().fold(Rational::zero(), |acc, (_, q)| acc + q);
            let mut row = vec![Rational::zero(); spec.num_actions(x)];
            for (a, q) in exact {
                row[a] = q / marginal.clone();
            }
            row
        };
        dist.push(row);
    }
    let sigma = StationaryPolicy { dist };
    sigma.check_for(spec)?;
    Ok(sigma)
}

/// The support-restricted model: same states, kernel rows, rewards and
/// initial distribution, but each state's admissible set is cut down to the
/// support of `sigma` (declared order preserved). Returns the restricted
/// model together with `map[x][new_action] = old_action`.
pub fn restrict_to_support(
    spec: &ModelSpec,
    sigma: &StationaryPolicy,
) -> Result<(ModelSpec, Vec<Vec<usize>>)> {
    sigma.check_for(spec)?;
    let mut restricted = spec.clone();
    let mut map = Vec::with_capacity(spec.num_states());
    for x in 0..spec.num_states() {
        let keep = sigma.support(x);
        restricted.actions[x] = keep.iter().map(|&a| spec.actions[x][a].clone()).collect();
        restricted.kernel[x] = keep.iter().map(|&a| spec.kernel[x][a].clone()).collect();
        restricted.rewards[x] = keep.iter().map(|&a| spec.rewards[x][a].clone()).collect();
        map.push(keep);
    }
    restricted.require_valid()?;
    Ok((restricted, map))
}

/// Relabels a measure on a support-restricted model back to the original
/// action indices, using the map from [`restrict_to_support`].
pub fn lift_measure<S: Scalar>(
    mu: &OccupationMeasure<S>,
    map: &[Vec<usize>],
) -> OccupationMeasure<S> {
    let mut out = OccupationMeasure::new();
    for (&(x, a), m) in &mu.mass {
        out.add((x, map[x][a]), m.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::policy::DeterministicPolicy;
    use crate::scalar::rat;

    fn block_of(spec: &ModelSpec) -> ReachableBlock {
        spec.require_uniformly_absorbing().unwrap()
    }

    #[test]
    fn quit_policy_measure() {
        let spec = fixtures::twostate();
        let block = block_of(&spec);
        let sigma = DeterministicPolicy { choice: vec![0, 0] }.to_stationary(&spec);
        let mu: OccupationMeasure<Rational> =
            occupation_of_stationary(&spec, &block, &sigma).unwrap();
        assert_eq!(mu.mass.len(), 1);
        assert_eq!(mu.get(0, 0), rat(1, 1));
        assert_eq!(mu.performance(&spec), vec![rat(1, 1)]);
        assert_eq!(mu.total_mass(), rat(1, 1));
        assert!(mu.flow_residuals(&spec).iter().all(|r| r.is_zero()));
    }

    #[test]
    fn loiter_policy_measure() {
        let spec = fixtures::twostate();
        let block = block_of(&spec);
        let sigma = DeterministicPolicy { choice: vec![1, 0] }.to_stationary(&spec);
        let mu: OccupationMeasure<Rational> =
            occupation_of_stationary(&spec, &block, &sigma).unwrap();
        assert_eq!(mu.get(0, 1), rat(2, 1));
        assert_eq!(mu.performance(&spec), vec![rat(4, 5)]);
        assert_eq!(mu.total_mass(), rat(2, 1));
    }

    #[test]
    fn uniform_mixture_measure_and_roundtrip() {
        let spec = fixtures::twostate();
        let block = block_of(&spec);
        let sigma = StationaryPolicy {
            dist: vec![vec![rat(1, 2), rat(1, 2)], vec![rat(1, 1)]],
        };
        let mu: OccupationMeasure<Rational> =
            occupation_of_stationary(&spec, &block, &sigma).unwrap();
        assert_eq!(mu.get(0, 0), rat(2, 3));
        assert_eq!(mu.get(0, 1), rat(2, 3));
        assert_eq!(mu.performance(&spec), vec![rat(14, 15)]);
        assert_eq!(mu.total_mass(), rat(4, 3));
        assert!(mu.max_flow_residual(&spec).is_zero());
        assert_eq!(disintegrate(&spec, &mu).unwrap(), sigma);
    }

    #[test]
    fn markov_prefix_plus_tail() {
        let spec = fixtures::twostate();
        let block = block_of(&spec);
        let loiter = DeterministicPolicy { choice: vec![1, 0] }.to_stationary(&spec);
        let quit = DeterministicPolicy { choice: vec![0, 0] }.to_stationary(&spec);
        let pi = MarkovPolicy { stages: vec![loiter], tail: quit };
        let mu: OccupationMeasure<Rational> =
            occupation_of_markov(&spec, &block, &pi).unwrap();
        // Stage 0 charges (s0, a2) with the full unit; the half that survives
        // quits at stage 1: performance 2/5 + 1/2 = 9/10.
        assert_eq!(mu.get(0, 1), rat(1, 1));
        assert_eq!(mu.get(0, 0), rat(1, 2));
        assert_eq!(mu.performance(&spec), vec![rat(9, 10)]);
        assert!(mu.max_flow_residual(&spec).is_zero());
    }

    #[test]
    fn markov_with_no_stages_is_stationary() {
        let spec = fixtures::twostate();
        let block = block_of(&spec);
        let sigma = StationaryPolicy {
            dist: vec![vec![rat(1, 3), rat(2, 3)], vec![rat(1, 1)]],
        };
        let pi = MarkovPolicy { stages: vec![], tail: sigma.clone() };
        let via_markov: OccupationMeasure<Rational> =
            occupation_of_markov(&spec, &block, &pi).unwrap();
        let direct: OccupationMeasure<Rational> =
            occupation_of_stationary(&spec, &block, &sigma).unwrap();
        assert_eq!(via_markov, direct);
    }

    #[test]
    fn immediate_absorption_measure_is_eta_weighted() {
        let spec = fixtures::onestep();
        let block = block_of(&spec);
        let sigma = DeterministicPolicy { choice: vec![1, 0, 0] }.to_stationary(&spec);
        let mu: OccupationMeasure<Rational> =
            occupation_of_stationary(&spec, &block, &sigma).unwrap();
        assert_eq!(mu.get(0, 1), rat(1, 2));
        assert_eq!(mu.get(1, 0), rat(1, 2));
        // Performance: 1/2·(−1/2) + 1/2·3 = 5/4.
        assert_eq!(mu.performance(&spec), vec![rat(5, 4)]);
    }

    #[test]
    fn empty_block_gives_zero_measure() {
        let spec = fixtures::eta_on_delta();
        let block = block_of(&spec);
        assert!(block.is_empty());
        let sigma = StationaryPolicy::theta(&spec);
        let mu: OccupationMeasure<Rational> =
            occupation_of_stationary(&spec, &block, &sigma).unwrap();
        assert!(mu.mass.is_empty());
        assert_eq!(mu.performance(&spec), vec![rat(0, 1)]);
        // θ convention: disintegration of the zero measure is θ everywhere.
        assert_eq!(disintegrate(&spec, &mu).unwrap(), sigma);
    }

    #[test]
    fn float_mode_matches_exact_closely() {
        let spec = fixtures::twostate();
        let block = block_of(&spec);
        let sigma = StationaryPolicy {
            dist: vec![vec![rat(1, 2), rat(1, 2)], vec![rat(1, 1)]],
        };
        let mu: OccupationMeasure<f64> =
            occupation_of_stationary(&spec, &block, &sigma).unwrap();
        assert!((mu.get(0, 0) - 2.0 / 3.0).abs() < 1e-12);
        assert!((mu.performance(&spec)[0] - 14.0 / 15.0).abs() < 1e-12);
        // Disintegration renormalizes exactly even from floats.
        assert_eq!(disintegrate(&spec, &mu).unwrap(), sigma);
    }

    #[test]
    fn support_restriction_keeps_measure() {
        let spec = fixtures::twostate();
        let block = block_of(&spec);
        let sigma = StationaryPolicy {
            dist: vec![vec![rat(1, 4), rat(3, 4)], vec![rat(1, 1)]],
        };
        let mu: OccupationMeasure<Rational> =
            occupation_of_stationary(&spec, &block, &sigma).unwrap();
        let (restricted, map) = restrict_to_support(&spec, &sigma).unwrap();
        assert_eq!(restricted.num_actions(0), 2);
        assert_eq!(map[0], vec![0, 1]);
        assert_eq!(disintegrate(&spec, &mu).unwrap(), sigma);

        // Restrict a deterministic policy: only the kept action remains.
        let det = DeterministicPolicy { choice: vec![1, 0] }.to_stationary(&spec);
        let (restricted, map2) = restrict_to_support(&spec, &det).unwrap();
        assert_eq!(restricted.num_actions(0), 1);
        assert_eq!(restricted.actions[0], vec!["a2".to_string()]);
        assert_eq!(map2[0], vec![1]);
        let block_star = restricted.require_uniformly_absorbing().unwrap();
        let mu_star: OccupationMeasure<Rational> =
            occupation_of_stationary(&restricted, &block_star, &StationaryPolicy::theta(&restricted))
                .unwrap();
        let lifted = lift_measure(&mu_star, &map2);
        let direct: OccupationMeasure<Rational> =
            occupation_of_stationary(&spec, &block, &det).unwrap();
        assert_eq!(lifted, direct);
    }

    #[test]
    fn flow_residual_flags_fake_measures() {
        let spec = fixtures::twostate();
        let mut fake: OccupationMeasure<Rational> = OccupationMeasure::new();
        fake.add((0, 0), rat(3, 1));
        // Marginal 3 at s0, inflow η = 1: residual 2.
        assert_eq!(fake.max_flow_residual(&spec), rat(2, 1));
    }
}
