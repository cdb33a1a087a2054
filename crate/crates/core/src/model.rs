//! Finite absorbing decision models.
//!
//! A model is a finite state set with an absorbing subset Δ, per-state
//! admissible actions, an exact-rational transition kernel, an initial
//! distribution η, and a d-dimensional reward that vanishes on Δ. Absorbed
//! states never escape (every kernel row from Δ stays inside Δ) so the only
//! quantity of interest is what happens before the absorption time.
//!
//! The central classifier is [`ModelSpec::check_uniform_absorption`]: the
//! model is *uniformly absorbing* when the worst-case (over policies)
//! probability of surviving `t` steps outside Δ tends to zero. On finite
//! models this coincides with plain almost-sure absorption under every policy
//! (a finite-case fact, cross-checked in tests against brute-force policy
//! enumeration), and holds if and only if the max-over-actions survival
//! recursion drops below one within `|reachable Δ^c|` steps. States that no
//! policy can reach from the support of η are ignored throughout: no
//! strategic measure ever charges them.

use std::collections::VecDeque;
use std::fmt;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, Rational};

/// Synthetic action id attached to absorbed states declared without actions.
pub const DELTA_ACTION: &str = "a_delta";

/// A finite absorbing decision model.
///
/// Indices are positional: state `x` is `states[x]`, action `a` at `x` is
/// `actions[x][a]`, `kernel[x][a][y]` is the transition probability, and
/// `rewards[x][a]` is the d-dimensional reward. Declared order is load-bearing:
/// tie-breaking conventions (the θ selector, selector packing, inverse-CDF
/// sampling) all follow it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    /// State names, declared order.
    pub states: Vec<String>,
    /// Membership flags for the absorbing set Δ.
    pub delta: Vec<bool>,
    /// Admissible action names per state; nonempty after Δ-normalization.
    pub actions: Vec<Vec<String>>,
    /// `kernel[x][a][y]`: transition probability, exact.
    pub kernel: Vec<Vec<Vec<Rational>>>,
    /// Initial distribution over states.
    pub eta: Vec<Rational>,
    /// `rewards[x][a]`: d-dimensional reward vector, exact; zero on Δ.
    pub rewards: Vec<Vec<Vec<Rational>>>,
    /// Number of reward criteria (d ≥ 1).
    pub d: usize,
}

/// One structural defect found by [`ModelSpec::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// d must be at least one.
    NoCriteria,
    /// A state has an empty admissible action set.
    NoActions { state: String },
    /// A kernel row has a negative entry.
    NegativeKernelEntry { state: String, action: String, target: String },
    /// A kernel row does not sum to one.
    RowNotStochastic { state: String, action: String, sum: Rational },
    /// A kernel row from an absorbed state leaks mass outside Δ.
    DeltaEscape { state: String, action: String, escaping: Rational },
    /// A reward on Δ is nonzero.
    RewardNonzeroOnDelta { state: String, action: String },
    /// A reward vector has the wrong number of criteria.
    RewardDimension { state: String, action: String, got: usize },
    /// η has a negative entry.
    NegativeEta { state: String },
    /// η does not sum to one.
    EtaNotProbability { sum: Rational },
    /// Kernel/reward tables are misaligned with the action sets.
    ShapeMismatch { detail: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoCriteria => write!(f, "criterion count d must be at least 1"),
            Violation::NoActions { state } => {
                write!(f, "state {state} has no admissible actions")
            }
            Violation::NegativeKernelEntry { state, action, target } => {
                write!(f, "kernel({state}, {action}) has a negative probability of reaching {target}")
            }
            Violation::RowNotStochastic { state, action, sum } => {
                write!(f, "kernel({state}, {action}) sums to {} instead of 1", format_rational(sum))
            }
            Violation::DeltaEscape { state, action, escaping } => {
                write!(
                    f,
                    "absorbed state {state} leaks probability {} outside the absorbing set via {action}",
                    format_rational(escaping)
                )
            }
            Violation::RewardNonzeroOnDelta { state, action } => {
                write!(f, "reward at absorbed state {state}, action {action} is nonzero")
            }
            Violation::RewardDimension { state, action, got } => {
                write!(f, "reward at ({state}, {action}) has {got} entries, expected d")
            }
            Violation::NegativeEta { state } => {
                write!(f, "initial distribution has a negative mass at {state}")
            }
            Violation::EtaNotProbability { sum } => {
                write!(f, "initial distribution sums to {} instead of 1", format_rational(sum))
            }
            Violation::ShapeMismatch { detail } => write!(f, "shape mismatch: {detail}"),
        }
    }
}

/// Outcome of structural validation; an empty violation list means the model
/// is well-formed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationResult {
    pub violations: Vec<Violation>,
}

impl ValidationResult {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "- {v}")?;
        }
        Ok(())
    }
}

/// Why a model is (or is not) uniformly absorbing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AbsorptionCertificate {
    /// Worst-case survival over the reachable non-absorbed states falls to
    /// `rho < 1` within `horizon` steps; survival then decays geometrically,
    /// `w(k·horizon) ≤ rho^k`.
    Decay { horizon: usize, rho: Rational },
    /// A reachable cycle of (state, action) pairs whose kernel rows keep all
    /// probability inside the non-absorbed survivors: a policy looping here
    /// never absorbs.
    SureSurvivalCycle(Vec<(String, String)>),
}

/// Report of the uniform-absorption classifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbsorptionReport {
    pub uniformly_absorbing: bool,
    /// Non-absorbed states reachable from the support of η under some policy,
    /// declared order.
    pub reachable: Vec<String>,
    /// `survival_profile[t]` = max over reachable non-absorbed states of the
    /// best-case (over policies) probability of staying outside Δ for `t`
    /// more steps; computed for `t = 0 ..= |reachable|`.
    pub survival_profile: Vec<Rational>,
    pub certificate: AbsorptionCertificate,
}

impl AbsorptionReport {
    /// Upper bound on the expected absorption time under any policy, from any
    /// initial state: `Σ_t max-survival(t) ≤ (Σ_{s<T} w_s) / (1 − rho)`.
    ///
    /// Only defined for uniformly absorbing reports.
    pub fn expected_time_bound(&self) -> Option<Rational> {
        match &self.certificate {
            AbsorptionCertificate::Decay { horizon, rho } => {
                if self.reachable.is_empty() {
                    return Some(Rational::zero());
                }
                let partial: Rational = self.survival_profile[..*horizon]
                    .iter()
                    .cloned()
                    .sum();
                Some(partial / (Rational::one() - rho))
            }
            AbsorptionCertificate::SureSurvivalCycle(_) => None,
        }
    }
}

/// The non-absorbed states reachable from the support of η under some policy,
/// with a back-map from state index to block position.
#[derive(Debug, Clone)]
pub struct ReachableBlock {
    /// Model state indices in declared order.
    pub states: Vec<usize>,
    /// `pos[x]` is the position of state `x` within `states`, if reachable.
    pub pos: Vec<Option<usize>>,
}

impl ReachableBlock {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn contains(&self, state: usize) -> bool {
        self.pos[state].is_some()
    }
}

/// Incremental construction of a [`ModelSpec`] by name.
///
/// Declare all states first, then actions; targets named in transitions must
/// exist. Intended for fixtures, generators and tests, so unknown names
/// panic rather than error.
#[derive(Debug, Clone)]
pub struct ModelBuilder {
    spec: ModelSpec,
}

impl ModelBuilder {
    pub fn new(d: usize) -> Self {
        ModelBuilder {
            spec: ModelSpec {
                states: Vec::new(),
                delta: Vec::new(),
                actions: Vec::new(),
                kernel: Vec::new(),
                eta: Vec::new(),
                rewards: Vec::new(),
                d,
            },
        }
    }

    pub fn state(mut self, name: &str, absorbed: bool) -> Self {
        assert!(
            self.spec.state_index(name).is_none(),
            "duplicate state {name}"
        );
        self.spec.states.push(name.to_string());
        self.spec.delta.push(absorbed);
        self.spec.actions.push(Vec::new());
        self.spec.kernel.push(Vec::new());
        self.spec.rewards.push(Vec::new());
        self.spec.eta.push(Rational::zero());
        self
    }

    /// Adds an action with its kernel row (sparse, by target name) and reward.
    pub fn action(
        mut self,
        state: &str,
        action: &str,
        transitions: &[(&str, Rational)],
        reward: &[Rational],
    ) -> Self {
        let x = self.spec.state_index(state).expect("unknown state");
        let mut row = vec![Rational::zero(); self.spec.num_states()];
        for (target, p) in transitions {
            let y = self.spec.state_index(target).expect("unknown target state");
            row[y] += p;
        }
        self.spec.actions[x].push(action.to_string());
        self.spec.kernel[x].push(row);
        self.spec.rewards[x].push(reward.to_vec());
        self
    }

    /// Sets the initial distribution (sparse, by state name).
    pub fn eta(mut self, masses: &[(&str, Rational)]) -> Self {
        for (name, p) in masses {
            let x = self.spec.state_index(name).expect("unknown state");
            self.spec.eta[x] = p.clone();
        }
        self
    }

    /// Finishes construction, equipping absorbed states with the synthetic
    /// self-loop action where needed.
    pub fn build(mut self) -> ModelSpec {
        self.spec.normalize_delta();
        self.spec
    }
}

impl ModelSpec {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_actions(&self, state: usize) -> usize {
        self.actions[state].len()
    }

    pub fn is_delta(&self, state: usize) -> bool {
        self.delta[state]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn action_index(&self, state: usize, name: &str) -> Option<usize> {
        self.actions[state].iter().position(|a| a == name)
    }

    /// Non-absorbed state indices, declared order.
    pub fn nondelta_states(&self) -> Vec<usize> {
        (0..self.num_states()).filter(|&x| !self.delta[x]).collect()
    }

    /// The θ tie-breaking selector: the first declared action.
    pub fn theta(&self, _state: usize) -> usize {
        0
    }

    /// Equips absorbed states that declare no actions with the synthetic
    /// self-loop action [`DELTA_ACTION`] and a zero reward. Called by the
    /// loader; programmatic constructors may call it too.
    pub fn normalize_delta(&mut self) {
        for x in 0..self.num_states() {
            if self.delta[x] && self.actions[x].is_empty() {
                self.actions[x].push(DELTA_ACTION.to_string());
                let mut row = vec![Rational::zero(); self.num_states()];
                row[x] = Rational::one();
                self.kernel[x].push(row);
                self.rewards[x].push(vec![Rational::zero(); self.d]);
            }
        }
    }

    /// Structural validation. All defects are reported as data; nothing
    /// panics on malformed input.
    pub fn validate(&self) -> ValidationResult {
        let mut violations = Vec::new();
        let n = self.num_states();

        if self.d == 0 {
            violations.push(Violation::NoCriteria);
        }
        if self.delta.len() != n
            || self.actions.len() != n
            || self.kernel.len() != n
            || self.rewards.len() != n
            || self.eta.len() != n
        {
            violations.push(Violation::ShapeMismatch {
                detail: "per-state tables must all have one entry per state".into(),
            });
            return ValidationResult { violations };
        }

        for x in 0..n {
            let k = self.num_actions(x);
            if k == 0 {
                violations.push(Violation::NoActions { state: self.states[x].clone() });
            }
            if self.kernel[x].len() != k || self.rewards[x].len() != k {
                violations.push(Violation::ShapeMismatch {
                    detail: format!(
                        "state {} declares {k} actions but has {} kernel rows and {} reward rows",
                        self.states[x],
                        self.kernel[x].len(),
                        self.rewards[x].len()
                    ),
                });
                continue;
            }
            for a in 0..k {
                if self.kernel[x][a].len() != n {
                    violations.push(Violation::ShapeMismatch {
                        detail: format!(
                            "kernel({}, {}) has {} entries, expected one per state",
                            self.states[x],
                            self.actions[x][a],
                            self.kernel[x][a].len()
                        ),
                    });
                    continue;
                }
                let mut sum = Rational::zero();
                for y in 0..n {
                    let p = &self.kernel[x][a][y];
                    if p < &Rational::zero() {
                        violations.push(Violation::NegativeKernelEntry {
                            state: self.states[x].clone(),
                            action: self.actions[x][a].clone(),
                            target: self.states[y].clone(),
                        });
                    }
                    sum += p;
                }
                if !sum.is_one() {
                    violations.push(Violation::RowNotStochastic {
                        state: self.states[x].clone(),
                        action: self.actions[x][a].clone(),
                        sum,
                    });
                }
                if self.delta[x] {
                    let escaping: Rational = (0..n)
                        .filter(|&y| !self.delta[y])
                        .map(|y| self.kernel[x][a][y].clone())
                        .sum();
                    if !escaping.is_zero() {
                        violations.push(Violation::DeltaEscape {
                            state: self.states[x].clone(),
                            action: self.actions[x][a].clone(),
                            escaping,
                        });
                    }
                }
                if self.rewards[x][a].len() != self.d {
                    violations.push(Violation::RewardDimension {
                        state: self.states[x].clone(),
                        action: self.actions[x][a].clone(),
                        got: self.rewards[x][a].len(),
                    });
                } else if self.delta[x] && self.rewards[x][a].iter().any(|r| !r.is_zero()) {
                    violations.push(Violation::RewardNonzeroOnDelta {
                        state: self.states[x].clone(),
                        action: self.actions[x][a].clone(),
                    });
                }
            }
        }

        let mut eta_sum = Rational::zero();
        for x in 0..n {
            if self.eta[x] < Rational::zero() {
                violations.push(Violation::NegativeEta { state: self.states[x].clone() });
            }
            eta_sum += &self.eta[x];
        }
        if !eta_sum.is_one() {
            violations.push(Violation::EtaNotProbability { sum: eta_sum });
        }

        ValidationResult { violations }
    }

    /// Errors with [`Error::Unvalidated`] unless the model is well-formed.
    pub fn require_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_ok() {
            Ok(())
        } else {
            Err(Error::Unvalidated(v))
        }
    }

    /// Non-absorbed states reachable from the support of η under *some*
    /// policy, i.e. following positive-probability transitions of any action
    /// without entering Δ (once in Δ nothing escapes, so paths through Δ are
    /// irrelevant). Precondition: the model validates.
    pub fn reachable_block(&self) -> ReachableBlock {
        let n = self.num_states();
        let mut seen = vec![false; n];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for x in 0..n {
            if !self.delta[x] && self.eta[x] > Rational::zero() {
                seen[x] = true;
                queue.push_back(x);
            }
        }
        while let Some(x) = queue.pop_front() {
            for a in 0..self.num_actions(x) {
                for y in 0..n {
                    if !self.delta[y] && !seen[y] && self.kernel[x][a][y] > Rational::zero() {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
        }
        let states: Vec<usize> = (0..n).filter(|&x| seen[x]).collect();
        let mut pos = vec![None; n];
        for (i, &x) in states.iter().enumerate() {
            pos[x] = Some(i);
        }
        ReachableBlock { states, pos }
    }

    /// Classifies the model as uniformly absorbing or not, restricted to the
    /// states reachable from the support of η.
    ///
    /// The survival recursion `w_0 = 1`,
    /// `w_{t+1}(x) = max_a Σ_{y ∉ Δ} Q(y|x,a) · w_t(y)` computes the
    /// best-case probability (over all policies) of staying outside Δ for `t`
    /// steps. The set `{w_t = 1}` shrinks monotonically and stabilizes within
    /// `N = |reachable Δ^c|` steps, so the model is uniformly absorbing iff
    /// `w_N < 1` everywhere on the reachable block. On failure the stabilized
    /// survivor set contains a closed recurrent class under a survival
    /// selector; a cycle through it is returned as the witness.
    pub fn check_uniform_absorption(&self) -> Result<AbsorptionReport> {
        self.require_valid()?;
        let block = self.reachable_block();
        let n = block.len();
        if n == 0 {
            return Ok(AbsorptionReport {
                uniformly_absorbing: true,
                reachable: Vec::new(),
                survival_profile: vec![Rational::zero()],
                certificate: AbsorptionCertificate::Decay { horizon: 0, rho: Rational::zero() },
            });
        }

        let mut w = vec![Rational::one(); n];
        let mut profile = vec![Rational::one()];
        for _t in 1..=n {
            let mut next = vec![Rational::zero(); n];
            for (i, &x) in block.states.iter().enumerate() {
                let mut best = Rational::zero();
                for a in 0..self.num_actions(x) {
                    let mut surv = Rational::zero();
                    for (j, &y) in block.states.iter().enumerate() {
                        let p = &self.kernel[x][a][y];
                        if !p.is_zero() {
                            surv += p * &w[j];
                        }
                    }
                    if surv > best {
                        best = surv;
                    }
                }
                next[i] = best;
            }
            profile.push(next.iter().max().cloned().unwrap_or_else(Rational::zero));
            w = next;
        }

        let rho = profile[n].clone();
        if rho < Rational::one() {
            return Ok(AbsorptionReport {
                uniformly_absorbing: true,
                reachable: block.states.iter().map(|&x| self.states[x].clone()).collect(),
                survival_profile: profile,
                certificate: AbsorptionCertificate::Decay { horizon: n, rho },
            });
        }

        // Survivor set S = {w_N = 1}. For each x in S some action keeps all
        // probability inside S (a convex combination of sub-unit masses hits
        // one only if every support action does); following those actions
        // from the smallest survivor must revisit a state, giving a cycle.
        let survivors: Vec<usize> = (0..n)
            .filter(|&i| w[i].is_one())
            .map(|i| block.states[i])
            .collect();
        let in_survivors = |y: usize| survivors.contains(&y);
        let selector = |x: usize| -> (usize, usize) {
            for a in 0..self.num_actions(x) {
                let kept: Rational = survivors
                    .iter()
                    .map(|&y| self.kernel[x][a][y].clone())
                    .sum();
                if kept.is_one() {
                    let next = (0..self.num_states())
                        .find(|&y| in_survivors(y) && self.kernel[x][a][y] > Rational::zero())
                        .expect("survival action has support in the survivor set");
                    return (a, next);
                }
            }
            unreachable!("every survivor state has a survival action");
        };
        let mut path: Vec<(usize, usize)> = Vec::new();
        let mut visited_at: Vec<Option<usize>> = vec![None; self.num_states()];
        let mut x = survivors[0];
        let cycle = loop {
            if let Some(start) = visited_at[x] {
                break path[start..].to_vec();
            }
            visited_at[x] = Some(path.len());
            let (a, next) = selector(x);
            path.push((x, a));
            x = next;
        };
        Ok(AbsorptionReport {
            uniformly_absorbing: false,
            reachable: block.states.iter().map(|&x| self.states[x].clone()).collect(),
            survival_profile: profile,
            certificate: AbsorptionCertificate::SureSurvivalCycle(
                cycle
                    .into_iter()
                    .map(|(x, a)| (self.states[x].clone(), self.actions[x][a].clone()))
                    .collect(),
            ),
        })
    }

    /// Errors with [`Error::NotAbsorbing`] unless uniformly absorbing.
    pub fn require_uniformly_absorbing(&self) -> Result<ReachableBlock> {
        let report = self.check_uniform_absorption()?;
        if !report.uniformly_absorbing {
            return Err(Error::NotAbsorbing);
        }
        Ok(self.reachable_block())
    }
}
