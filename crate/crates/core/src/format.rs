//! JSON file formats for models, policies, and occupation measures.
//!
//! Every number in a model or policy file is a *string* holding an exact
//! rational ("2/3", "0.25", "-7"); parsing is exact and emission reproduces
//! exact values, so objects written by one command are accepted by any other
//! without loss. States and actions are referred to by name.
//!
//! A model file has keys `states` (names in declared order), `delta` (names
//! of absorbing states), `actions` (name → action-name list), `kernel` (rows
//! `{x, a, to: {y: prob}}`), `eta` (name → mass), and `rewards` (rows
//! `{x, a, r: [..d..]}`). Reward rows may be omitted for zero-reward pairs;
//! the criterion count is inferred from the reward rows, or taken from the
//! optional `criteria` key when no row carries it. Absorbing states may omit
//! their action list — the loader equips them with the standard self-loop.
//! Field order is fixed by the serde structs; name maps are sorted, so
//! emission is deterministic.

use std::collections::BTreeMap;

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelSpec, ValidationResult, DELTA_ACTION};
use crate::occupation::OccupationMeasure;
use crate::policy::{
    ChatteringPolicy, DeterministicPolicy, MarkovPolicy, PolicyKind, StationaryPolicy,
};
use crate::scalar::{format_rational, parse_rational, Rational, Scalar};

#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    states: Vec<String>,
    #[serde(default)]
    delta: Vec<String>,
    #[serde(default)]
    actions: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    kernel: Vec<KernelRow>,
    #[serde(default)]
    eta: BTreeMap<String, String>,
    #[serde(default)]
    rewards: Vec<RewardRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    criteria: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct KernelRow {
    x: String,
    a: String,
    to: BTreeMap<String, String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RewardRow {
    x: String,
    a: String,
    r: Vec<String>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

/// Parses a model file. The result is validated structurally (shapes and
/// name references); probabilistic validity is checked by
/// [`ModelSpec::validate`], which this calls before returning.
pub fn model_from_json(text: &str) -> Result<ModelSpec> {
    let (spec, validation) = model_from_json_lenient(text)?;
    if !validation.is_ok() {
        return Err(Error::Unvalidated(validation));
    }
    Ok(spec)
}

/// Parses a model file but reports invariant violations as data instead of
/// failing, so callers can list them. Structural problems — malformed JSON,
/// unknown names, unparsable numbers, undetermined criterion count — are
/// still errors.
pub fn model_from_json_lenient(text: &str) -> Result<(ModelSpec, ValidationResult)> {
    let file: ModelFile =
        serde_json::from_str(text).map_err(|e| bad(format!("model JSON: {e}")))?;
    let mut states = Vec::with_capacity(file.states.len());
    for s in &file.states {
        if states.contains(s) {
            return Err(bad(format!("duplicate state {s:?}")));
        }
        states.push(s.clone());
    }
    let index_of = |name: &str| -> Result<usize> {
        states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| bad(format!("unknown state {name:?}")))
    };
    let n = states.len();
    let mut delta = vec![false; n];
    for name in &file.delta {
        delta[index_of(name)?] = true;
    }
    let mut actions = vec![Vec::new(); n];
    for (name, list) in &file.actions {
        let x = index_of(name)?;
        for a in list {
            if actions[x].contains(a) {
                return Err(bad(format!("duplicate action {a:?} at state {name:?}")));
            }
            actions[x].push(a.clone());
        }
    }
    let pair_of = |x_name: &str, a_name: &str| -> Result<(usize, usize)> {
        let x = index_of(x_name)?;
        let a = actions[x]
            .iter()
            .position(|a| a == a_name)
            .ok_or_else(|| bad(format!("undeclared action {a_name:?} at state {x_name:?}")))?;
        Ok((x, a))
    };
    let d = match (file.criteria, file.rewards.first()) {
        (Some(0), _) => return Err(bad("model needs at least one reward criterion")),
        (Some(d), _) => d,
        (None, Some(row)) => row.r.len(),
        (None, None) => {
            return Err(bad(
                "cannot infer the criterion count: no rewards rows and no criteria key",
            ))
        }
    };
    let mut kernel: Vec<Vec<Option<Vec<Rational>>>> =
        actions.iter().map(|list| vec![None; list.len()]).collect();
    for krow in &file.kernel {
        let (x, a) = pair_of(&krow.x, &krow.a)?;
        if kernel[x][a].is_some() {
            return Err(bad(format!("duplicate kernel row for ({:?}, {:?})", krow.x, krow.a)));
        }
        let mut row = vec![Rational::zero(); n];
        for (target, p) in &krow.to {
            row[index_of(target)?] += parse_rational(p)?;
        }
        kernel[x][a] = Some(row);
    }
    let mut rewards: Vec<Vec<Option<Vec<Rational>>>> =
        actions.iter().map(|list| vec![None; list.len()]).collect();
    for rrow in &file.rewards {
        let (x, a) = pair_of(&rrow.x, &rrow.a)?;
        if rewards[x][a].is_some() {
            return Err(bad(format!("duplicate rewards row for ({:?}, {:?})", rrow.x, rrow.a)));
        }
        if rrow.r.len() != d {
            return Err(bad(format!(
                "rewards row for ({:?}, {:?}) has {} entries, model has {} criteria",
                rrow.x,
                rrow.a,
                rrow.r.len(),
                d
            )));
        }
        rewards[x][a] =
            Some(rrow.r.iter().map(|t| parse_rational(t)).collect::<Result<_>>()?);
    }
    let kernel = kernel
        .into_iter()
        .enumerate()
        .map(|(x, rows)| {
            rows.into_iter()
                .enumerate()
                .map(|(a, row)| {
                    row.ok_or_else(|| {
                        bad(format!(
                            "no kernel row for ({:?}, {:?})",
                            states[x], actions[x][a]
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let rewards = rewards
        .into_iter()
        .map(|rows| {
            rows.into_iter()
                .map(|row| row.unwrap_or_else(|| vec![Rational::zero(); d]))
                .collect()
        })
        .collect();
    let mut eta = vec![Rational::zero(); n];
    for (name, p) in &file.eta {
        eta[index_of(name)?] = parse_rational(p)?;
    }
    let mut spec = ModelSpec {
        states,
        delta,
        actions,
        kernel,
        eta,
        rewards,
        d,
    };
    spec.normalize_delta();
    let validation = spec.validate();
    Ok((spec, validation))
}

/// Returns true when the state carries exactly the loader-synthesized
/// absorbing action (self-loop named [`DELTA_ACTION`], zero rewards) and can
/// therefore be emitted without an action list.
fn is_synthetic_delta(spec: &ModelSpec, x: usize) -> bool {
    spec.is_delta(x)
        && spec.actions[x] == [DELTA_ACTION.to_string()]
        && spec.rewards[x][0].iter().all(Zero::is_zero)
        && spec.kernel[x][0].iter().enumerate().all(|(y, p)| {
            if y == x {
                *p == Rational::from_integer(1.into())
            } else {
                p.is_zero()
            }
        })
}

/// Emits a model as pretty-printed JSON with exact rational strings.
/// Zero kernel, reward, and initial entries are dropped; absorbing states
/// holding only the synthetic self-loop are emitted without actions.
pub fn model_to_json(spec: &ModelSpec) -> String {
    let mut file = ModelFile {
        states: spec.states.clone(),
        delta: (0..spec.num_states())
            .filter(|&x| spec.is_delta(x))
            .map(|x| spec.states[x].clone())
            .collect(),
        actions: BTreeMap::new(),
        kernel: Vec::new(),
        eta: spec
            .eta
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(x, p)| (spec.states[x].clone(), format_rational(p)))
            .collect(),
        rewards: Vec::new(),
        criteria: Some(spec.d),
    };
    for x in 0..spec.num_states() {
        if is_synthetic_delta(spec, x) {
            continue;
        }
        file.actions
            .insert(spec.states[x].clone(), spec.actions[x].clone());
        for a in 0..spec.num_actions(x) {
            file.kernel.push(KernelRow {
                x: spec.states[x].clone(),
                a: spec.actions[x][a].clone(),
                to: spec.kernel[x][a]
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| !p.is_zero())
                    .map(|(y, p)| (spec.states[y].clone(), format_rational(p)))
                    .collect(),
            });
            if spec.rewards[x][a].iter().any(|r| !r.is_zero()) {
                file.rewards.push(RewardRow {
                    x: spec.states[x].clone(),
                    a: spec.actions[x][a].clone(),
                    r: spec.rewards[x][a].iter().map(format_rational).collect(),
                });
            }
        }
    }
    serde_json::to_string_pretty(&file).expect("model serialization cannot fail")
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum PolicyFile {
    Deterministic {
        choice: BTreeMap<String, String>,
    },
    Stationary {
        weights: BTreeMap<String, BTreeMap<String, String>>,
    },
    Chattering {
        selectors: Vec<BTreeMap<String, String>>,
        weights: BTreeMap<String, Vec<String>>,
    },
    Markov {
        stages: Vec<BTreeMap<String, BTreeMap<String, String>>>,
        tail: BTreeMap<String, BTreeMap<String, String>>,
    },
}

fn parse_choice(spec: &ModelSpec, map: &BTreeMap<String, String>) -> Result<DeterministicPolicy> {
    let mut choice = Vec::with_capacity(spec.num_states());
    for x in 0..spec.num_states() {
        let name = &spec.states[x];
        match map.get(name) {
            Some(a) => {
                choice.push(
                    spec.action_index(x, a)
                        .ok_or_else(|| bad(format!("unknown action {a:?} at state {name:?}")))?,
                );
            }
            None if spec.is_delta(x) => choice.push(spec.theta(x)),
            None => return Err(bad(format!("no action chosen at state {name:?}"))),
        }
    }
    Ok(DeterministicPolicy { choice })
}

fn emit_choice(spec: &ModelSpec, phi: &DeterministicPolicy) -> BTreeMap<String, String> {
    (0..spec.num_states())
        .filter(|&x| !spec.is_delta(x))
        .map(|x| {
            (
                spec.states[x].clone(),
                spec.actions[x][phi.choice[x]].clone(),
            )
        })
        .collect()
}

fn parse_stationary(
    spec: &ModelSpec,
    map: &BTreeMap<String, BTreeMap<String, String>>,
) -> Result<StationaryPolicy> {
    let mut dist = Vec::with_capacity(spec.num_states());
    for x in 0..spec.num_states() {
        let name = &spec.states[x];
        let mut row = vec![Rational::from_integer(0.into()); spec.num_actions(x)];
        match map.get(name) {
            Some(entries) => {
                for (a, w) in entries {
                    let ai = spec
                        .action_index(x, a)
                        .ok_or_else(|| bad(format!("unknown action {a:?} at state {name:?}")))?;
                    row[ai] = parse_rational(w)?;
                }
            }
            None if spec.is_delta(x) => row[spec.theta(x)] = Rational::from_integer(1.into()),
            None => return Err(bad(format!("no action weights at state {name:?}"))),
        }
        dist.push(row);
    }
    Ok(StationaryPolicy { dist })
}

fn emit_stationary(
    spec: &ModelSpec,
    st: &StationaryPolicy,
) -> BTreeMap<String, BTreeMap<String, String>> {
    (0..spec.num_states())
        .filter(|&x| !spec.is_delta(x))
        .map(|x| {
            (
                spec.states[x].clone(),
                st.dist[x]
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| !w.is_zero())
                    .map(|(a, w)| (spec.actions[x][a].clone(), format_rational(w)))
                    .collect(),
            )
        })
        .collect()
}

/// Parses a policy file against its model; the policy is validated for the
/// model before being returned.
pub fn policy_from_json(spec: &ModelSpec, text: &str) -> Result<PolicyKind> {
    let file: PolicyFile =
        serde_json::from_str(text).map_err(|e| bad(format!("policy JSON: {e}")))?;
    let kind = match &file {
        PolicyFile::Deterministic { choice } => {
            PolicyKind::Deterministic(parse_choice(spec, choice)?)
        }
        PolicyFile::Stationary { weights } => {
            PolicyKind::Stationary(parse_stationary(spec, weights)?)
        }
        PolicyFile::Chattering { selectors, weights } => {
            let sels: Vec<DeterministicPolicy> = selectors
                .iter()
                .map(|m| parse_choice(spec, m))
                .collect::<Result<_>>()?;
            let mut rows = Vec::with_capacity(spec.num_states());
            for x in 0..spec.num_states() {
                let name = &spec.states[x];
                match weights.get(name) {
                    Some(row) => {
                        if row.len() != sels.len() {
                            return Err(bad(format!(
                                "state {name:?} has {} selector weights, policy has {} selectors",
                                row.len(),
                                sels.len()
                            )));
                        }
                        rows.push(
                            row.iter()
                                .map(|w| parse_rational(w))
                                .collect::<Result<Vec<_>>>()?,
                        );
                    }
                    None => {
                        let mut row = vec![Rational::from_integer(0.into()); sels.len()];
                        row[0] = Rational::from_integer(1.into());
                        rows.push(row);
                    }
                }
            }
            PolicyKind::Chattering(ChatteringPolicy {
                selectors: sels,
                weights: rows,
            })
        }
        PolicyFile::Markov { stages, tail } => PolicyKind::Markov(MarkovPolicy {
            stages: stages
                .iter()
                .map(|m| parse_stationary(spec, m))
                .collect::<Result<_>>()?,
            tail: parse_stationary(spec, tail)?,
        }),
    };
    kind.check_for(spec)?;
    Ok(kind)
}

/// Emits a policy as pretty-printed JSON (exact rational weights).
pub fn policy_to_json(spec: &ModelSpec, policy: &PolicyKind) -> String {
    let file = match policy {
        PolicyKind::Deterministic(d) => PolicyFile::Deterministic {
            choice: emit_choice(spec, d),
        },
        PolicyKind::Stationary(st) => PolicyFile::Stationary {
            weights: emit_stationary(spec, st),
        },
        PolicyKind::Chattering(ch) => PolicyFile::Chattering {
            selectors: ch.selectors.iter().map(|s| emit_choice(spec, s)).collect(),
            weights: (0..spec.num_states())
                .filter(|&x| !spec.is_delta(x))
                .map(|x| {
                    (
                        spec.states[x].clone(),
                        ch.weights[x].iter().map(format_rational).collect(),
                    )
                })
                .collect(),
        },
        PolicyKind::Markov(mk) => PolicyFile::Markov {
            stages: mk
                .stages
                .iter()
                .map(|st| emit_stationary(spec, st))
                .collect(),
            tail: emit_stationary(spec, &mk.tail),
        },
    };
    serde_json::to_string_pretty(&file).expect("policy serialization cannot fail")
}

/// Parses a linear functional on state–action pairs from JSON of the shape
/// `{state: {action: coeff}}`; pairs not mentioned get coefficient zero.
/// The result has the kernel's shape and is suitable for custom criteria.
pub fn functional_from_json(spec: &ModelSpec, text: &str) -> Result<Vec<Vec<Rational>>> {
    let raw: BTreeMap<String, BTreeMap<String, String>> =
        serde_json::from_str(text).map_err(|e| bad(format!("functional JSON: {e}")))?;
    let mut g: Vec<Vec<Rational>> = (0..spec.num_states())
        .map(|x| vec![Rational::zero(); spec.num_actions(x)])
        .collect();
    for (sname, row) in &raw {
        let x = spec
            .state_index(sname)
            .ok_or_else(|| bad(format!("unknown state {sname:?}")))?;
        for (aname, coeff) in row {
            let a = spec
                .action_index(x, aname)
                .ok_or_else(|| bad(format!("unknown action {aname:?} at {sname:?}")))?;
            g[x][a] = parse_rational(coeff)?;
        }
    }
    Ok(g)
}

#[derive(Debug, Serialize, Deserialize)]
struct MeasureFile {
    mass: Vec<MeasureEntry>,
    /// Per-state totals, derived from `mass`; ignored when reading.
    #[serde(default)]
    marginal: Vec<MarginalEntry>,
    total_mass: String,
    performance: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MeasureEntry {
    state: String,
    action: String,
    mass: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct MarginalEntry {
    state: String,
    mass: String,
}

/// Emits an occupation measure with its headline statistics. Exact runs
/// produce exact fraction strings; floating runs produce decimal strings.
pub fn measure_to_json<S: Scalar>(spec: &ModelSpec, mu: &OccupationMeasure<S>) -> String {
    let file = MeasureFile {
        mass: mu
            .mass
            .iter()
            .map(|(&(x, a), v)| MeasureEntry {
                state: spec.states[x].clone(),
                action: spec.actions[x][a].clone(),
                mass: v.render(),
            })
            .collect(),
        marginal: mu
            .charged_states()
            .into_iter()
            .map(|x| MarginalEntry {
                state: spec.states[x].clone(),
                mass: mu.state_marginal(x).render(),
            })
            .collect(),
        total_mass: mu.total_mass().render(),
        performance: mu.performance(spec).iter().map(S::render).collect(),
    };
    serde_json::to_string_pretty(&file).expect("measure serialization cannot fail")
}

/// Parses an occupation measure file back into index space (exact mode).
/// Only the `mass` entries matter; the derived fields are recomputable.
pub fn measure_from_json(spec: &ModelSpec, text: &str) -> Result<OccupationMeasure<Rational>> {
    let file: MeasureFile =
        serde_json::from_str(text).map_err(|e| bad(format!("measure JSON: {e}")))?;
    let mut mu = OccupationMeasure::new();
    for e in &file.mass {
        let x = spec
            .state_index(&e.state)
            .ok_or_else(|| bad(format!("unknown state {:?}", e.state)))?;
        let a = spec
            .action_index(x, &e.action)
            .ok_or_else(|| bad(format!("unknown action {:?} at {:?}", e.action, e.state)))?;
        mu.add((x, a), parse_rational(&e.mass)?);
    }
    Ok(mu)
}
