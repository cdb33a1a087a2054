//! Policy classes and conversions.
//!
//! Four closed policy classes, all with exact-rational weights:
//!
//! - [`DeterministicPolicy`]: one action per state.
//! - [`StationaryPolicy`]: one distribution over admissible actions per state.
//! - [`ChatteringPolicy`]: a state-wise mixture of `order` deterministic
//!   selectors — "chattering" because the agent commits to one selector per
//!   state by an independent coin throw. Every chattering policy induces the
//!   stationary policy [`ChatteringPolicy::as_stationary`]; the point of the
//!   class is the *order bound*, which certifies how few deterministic modes
//!   suffice.
//! - [`MarkovPolicy`]: finitely many stage-indexed stationary policies
//!   followed by a stationary tail (the eventually-stationary form; fully
//!   general history dependence only exists behind the simulator's callback).
//!
//! Weight ties and degenerate assignments always resolve through declared
//! action order (the θ convention: first admissible action).

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::scalar::{Rational, Scalar};

/// One action per state, by positional index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DeterministicPolicy {
    pub choice: Vec<usize>,
}

/// A distribution over admissible actions per state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StationaryPolicy {
    /// `dist[x][a]` is the probability of action `a` at state `x`.
    pub dist: Vec<Vec<Rational>>,
}

/// A state-wise mixture of deterministic selectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChatteringPolicy {
    pub selectors: Vec<DeterministicPolicy>,
    /// `weights[x][i]` is the probability of following selector `i` at `x`;
    /// each row is a point of the `order`-simplex.
    pub weights: Vec<Vec<Rational>>,
}

/// Stage-indexed stationary policies followed by a stationary tail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovPolicy {
    pub stages: Vec<StationaryPolicy>,
    pub tail: StationaryPolicy,
}

/// Any stored policy form, as read from a policy file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolicyKind {
    Deterministic(DeterministicPolicy),
    Stationary(StationaryPolicy),
    Chattering(ChatteringPolicy),
    Markov(MarkovPolicy),
}

impl DeterministicPolicy {
    pub fn check_for(&self, spec: &ModelSpec) -> Result<()> {
        if self.choice.len() != spec.num_states() {
            return Err(Error::InvalidPolicy(format!(
                "selector covers {} states, model has {}",
                self.choice.len(),
                spec.num_states()
            )));
        }
        for (x, &a) in self.choice.iter().enumerate() {
            if a >= spec.num_actions(x) {
                return Err(Error::InvalidPolicy(format!(
                    "selector picks action #{a} at state {}, which has {} actions",
                    spec.states[x],
                    spec.num_actions(x)
                )));
            }
        }
        Ok(())
    }

    pub fn to_stationary(&self, spec: &ModelSpec) -> StationaryPolicy {
        let dist = self
            .choice
            .iter()
            .enumerate()
            .map(|(x, &a)| {
                let mut row = vec![Rational::zero(); spec.num_actions(x)];
                row[a] = Rational::one();
                row
            })
            .collect();
        StationaryPolicy { dist }
    }
}

impl StationaryPolicy {
    pub fn check_for(&self, spec: &ModelSpec) -> Result<()> {
        if self.dist.len() != spec.num_states() {
            return Err(Error::InvalidPolicy(format!(
                "policy covers {} states, model has {}",
                self.dist.len(),
                spec.num_states()
            )));
        }
        for (x, row) in self.dist.iter().enumerate() {
            if row.len() != spec.num_actions(x) {
                return Err(Error::InvalidPolicy(format!(
                    "policy row at state {} has {} entries, expected {}",
                    spec.states[x],
                    row.len(),
                    spec.num_actions(x)
                )));
            }
            let mut sum = Rational::zero();
            for p in row {
                if p < &Rational::zero() {
                    return Err(Error::InvalidPolicy(format!(
                        "negative action probability at state {}",
                        spec.states[x]
                    )));
                }
                sum += p;
            }
            if !sum.is_one() {
                return Err(Error::InvalidPolicy(format!(
                    "action probabilities at state {} sum to {}, expected 1",
                    spec.states[x], sum
                )));
            }
        }
        Ok(())
    }

    /// Indices of actions with positive probability at `x`, declared order.
    pub fn support(&self, x: usize) -> Vec<usize> {
        self.dist[x]
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(a, _)| a)
            .collect()
    }

    /// Point mass on the first admissible action of every state.
    pub fn theta(spec: &ModelSpec) -> StationaryPolicy {
        DeterministicPolicy { choice: vec![0; spec.num_states()] }.to_stationary(spec)
    }
}

impl ChatteringPolicy {
    /// Number of deterministic selectors mixed.
    pub fn order(&self) -> usize {
        self.selectors.len()
    }

    pub fn check_for(&self, spec: &ModelSpec) -> Result<()> {
        if self.selectors.is_empty() {
            return Err(Error::InvalidPolicy("chattering policy with no selectors".into()));
        }
        for sel in &self.selectors {
            sel.check_for(spec)?;
        }
        if self.weights.len() != spec.num_states() {
            return Err(Error::InvalidPolicy(format!(
                "selector weights cover {} states, model has {}",
                self.weights.len(),
                spec.num_states()
            )));
        }
        for (x, row) in self.weights.iter().enumerate() {
            if row.len() != self.order() {
                return Err(Error::InvalidPolicy(format!(
                    "weight row at state {} has {} entries, expected order {}",
                    spec.states[x],
                    row.len(),
                    self.order()
                )));
            }
            let mut sum = Rational::zero();
            for p in row {
                if p < &Rational::zero() {
                    return Err(Error::InvalidPolicy(format!(
                        "negative selector weight at state {}",
                        spec.states[x]
                    )));
                }
                sum += p;
            }
            if !sum.is_one() {
                return Err(Error::InvalidPolicy(format!(
                    "selector weights at state {} sum to {}, expected 1",
                    spec.states[x], sum
                )));
            }
        }
        Ok(())
    }

    /// The induced stationary policy: `σ(a|x) = Σ_{i: φ_i(x)=a} β_i(x)`.
    pub fn as_stationary(&self, spec: &ModelSpec) -> StationaryPolicy {
        let mut dist: Vec<Vec<Rational>> = (0..spec.num_states())
            .map(|x| vec![Rational::zero(); spec.num_actions(x)])
            .collect();
        for (i, sel) in self.selectors.iter().enumerate() {
            for x in 0..spec.num_states() {
                let w = &self.weights[x][i];
                if !w.is_zero() {
                    dist[x][sel.choice[x]] += w;
                }
            }
        }
        StationaryPolicy { dist }
    }
}

impl MarkovPolicy {
    pub fn check_for(&self, spec: &ModelSpec) -> Result<()> {
        for stage in &self.stages {
            stage.check_for(spec)?;
        }
        self.tail.check_for(spec)
    }

    /// The stationary policy in force at stage `t`.
    pub fn at_stage(&self, t: usize) -> &StationaryPolicy {
        self.stages.get(t).unwrap_or(&self.tail)
    }
}

impl PolicyKind {
    pub fn check_for(&self, spec: &ModelSpec) -> Result<()> {
        match self {
            PolicyKind::Deterministic(p) => p.check_for(spec),
            PolicyKind::Stationary(p) => p.check_for(spec),
            PolicyKind::Chattering(p) => p.check_for(spec),
            PolicyKind::Markov(p) => p.check_for(spec),
        }
    }
}

/// Packs a stationary policy into a chattering policy of order
/// `max(1, largest per-state support)`, refusing if that exceeds `cap`.
///
/// Selector `i` at state `x` picks the `i`-th supported action, clamped to
/// the last; its weight is the corresponding action probability (zero for the
/// clamped copies). States with empty rows cannot occur on validated input.
pub fn pack_selectors(
    spec: &ModelSpec,
    dist: &StationaryPolicy,
    cap: usize,
) -> Result<ChatteringPolicy> {
    dist.check_for(spec)?;
    let supports: Vec<Vec<usize>> = (0..spec.num_states()).map(|x| dist.support(x)).collect();
    let order = supports.iter().map(|s| s.len()).max().unwrap_or(0).max(1);
    if order > cap {
        let state = supports
            .iter()
            .position(|s| s.len() == order)
            .expect("some state attains the max support");
        return Err(Error::SupportTooLarge {
            state: spec.states[state].clone(),
            support: order,
            cap,
        });
    }
    let mut selectors = Vec::with_capacity(order);
    let mut weights: Vec<Vec<Rational>> =
        vec![Vec::with_capacity(order); spec.num_states()];
    for i in 0..order {
        let mut choice = Vec::with_capacity(spec.num_states());
        for (x, support) in supports.iter().enumerate() {
            let picked = support[i.min(support.len() - 1)];
            choice.push(picked);
            weights[x].push(if i < support.len() {
                dist.dist[x][picked].clone()
            } else {
                Rational::zero()
            });
        }
        selectors.push(DeterministicPolicy { choice });
    }
    Ok(ChatteringPolicy { selectors, weights })
}

/// The state-to-state transition matrix over non-absorbed states induced by a
/// stationary policy: `B[i][j] = Σ_a σ(a|x_i) Q(x_j|x_i, a)`, rows and columns
/// in declared order of non-absorbed states.
pub fn kernel_under(spec: &ModelSpec, sigma: &StationaryPolicy) -> Result<Vec<Vec<Rational>>> {
    sigma.check_for(spec)?;
    let live = spec.nondelta_states();
    let mut b = vec![vec![Rational::zero(); live.len()]; live.len()];
    for (i, &x) in live.iter().enumerate() {
        for a in 0..spec.num_actions(x) {
            let w = &sigma.dist[x][a];
            if w.is_zero() {
                continue;
            }
            for (j, &y) in live.iter().enumerate() {
                let p = &spec.kernel[x][a][y];
                if !p.is_zero() {
                    b[i][j] += w * p;
                }
            }
        }
    }
    Ok(b)
}

/// Enumerates every deterministic policy, varying only non-absorbed states
/// (absorbed states are pinned to θ — their action never matters). Errors
/// with [`Error::TooLarge`] when the count would exceed `cap`.
pub fn enumerate_deterministic(spec: &ModelSpec, cap: usize) -> Result<Vec<DeterministicPolicy>> {
    let live = spec.nondelta_states();
    let mut count: usize = 1;
    for &x in &live {
        count = count.saturating_mul(spec.num_actions(x));
        if count > cap {
            return Err(Error::TooLarge { vars: count, cap });
        }
    }
    let mut out = Vec::with_capacity(count);
    let mut choice: Vec<usize> = vec![0; spec.num_states()];
    loop {
        out.push(DeterministicPolicy { choice: choice.clone() });
        // Odometer increment over the live states, declared order.
        let mut pos = live.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            let x = live[pos];
            choice[x] += 1;
            if choice[x] < spec.num_actions(x) {
                break;
            }
            choice[x] = 0;
        }
    }
}

/// Converts an exact measure fraction into policy weights: `num / den` as a
/// reduced rational, where the scalars come from a possibly-floating run
/// (every finite float is an exact dyadic rational, so nothing is lost).
pub fn exact_ratio<S: Scalar>(num: &S, den: &S) -> Result<Rational> {
    let n = num
        .to_rational()
        .ok_or_else(|| Error::Internal("non-finite mass".into()))?;
    let d = den
        .to_rational()
        .ok_or_else(|| Error::Internal("non-finite marginal".into()))?;
    if d.is_zero() {
        return Err(Error::Internal("division by zero marginal".into()));
    }
    Ok(n / d)
}
