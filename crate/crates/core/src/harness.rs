//! Random-instance generation and the verification suites that turn the
//! structural theorems into executable, exactly-checked claims.
//!
//! Generated models are uniformly absorbing *by construction*: every action
//! row routes at least an escape floor `δ₀ > 0` of its mass directly into the
//! absorbing set, so survival decays at least geometrically and the
//! absorption classifier certifies every release. All randomness flows from
//! one seeded ChaCha8 generator (one stream per trial), so suites are
//! reproducible run to run and machine to machine.
//!
//! Each suite checks an exact-arithmetic identity or set equality — there
//! are no tolerances in exact mode:
//!
//! | suite | claim |
//! |-------|-------|
//! | `extreme-points` | vertices of the occupation polytope = deterministic occupation measures |
//! | `constrained-vertices` | with `p` equality criteria, each vertex splits into ≤ p+1 deterministic measures and packs at order ≤ p+1 |
//! | `chattering-sufficiency` | any policy's performance is matched by a chattering policy of order ≤ d+1 |
//! | `stage-reduction` | one stage can be thinned to ≤ 2d+1 actions per state preserving stage and total expectations |
//! | `support-restriction` | a stationary policy's performance is in the relative interior of its support-model's image |
//! | `measure-separation` | stationary policies differing on a charged state have different occupation measures |
//! | `mixture-necessity` | the fixture point 14/15 is achievable but no deterministic policy achieves it |
//!
//! A failing trial serializes its model in full — a counterexample is a
//! release-blocking artifact, not a log line.

use num::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chattering::{
    decompose_vertex, match_performance, reduce_all_stages, stage_expectation, stage_reduce,
    vertex_to_chattering,
};
use crate::error::{Error, Result};
use crate::format;
use crate::geometry::{self, CharPolytope, VPolytope};
use crate::lp;
use crate::model::ModelSpec;
use crate::occupation::{self, OccupationMeasure};
use crate::policy::{
    enumerate_deterministic, ChatteringPolicy, DeterministicPolicy, MarkovPolicy, PolicyKind,
    StationaryPolicy,
};
use crate::scalar::{Rational, Scalar};

/// Random-model parameters. Ranges are inclusive.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    /// Number of non-absorbed states.
    pub states: (usize, usize),
    /// Actions per non-absorbed state.
    pub actions: (usize, usize),
    /// Reward criteria d.
    pub criteria: usize,
    /// Number of absorbing states.
    pub absorbing_states: usize,
    /// δ₀ ∈ (0,1]: minimum probability, per state–action pair, of jumping
    /// directly into the absorbing set. Forces uniform absorption.
    #[serde(with = "crate::scalar::serde_rational")]
    pub escape_floor: Rational,
    /// All generated probabilities and rewards are fractions with
    /// denominator at most this.
    pub denominator_bound: u32,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            states: (1, 3),
            actions: (1, 3),
            criteria: 1,
            absorbing_states: 1,
            escape_floor: Rational::new(1.into(), 4.into()),
            denominator_bound: 6,
        }
    }
}

impl GenConfig {
    fn check(&self) -> Result<()> {
        if self.states.0 == 0 || self.states.0 > self.states.1 {
            return Err(Error::InvalidInput("empty state-count range".into()));
        }
        if self.actions.0 == 0 || self.actions.0 > self.actions.1 {
            return Err(Error::InvalidInput("empty action-count range".into()));
        }
        if self.criteria == 0 {
            return Err(Error::InvalidInput("need at least one criterion".into()));
        }
        if self.absorbing_states == 0 {
            return Err(Error::InvalidInput("need at least one absorbing state".into()));
        }
        if !self.escape_floor.is_positive() || self.escape_floor > Rational::one() {
            return Err(Error::InvalidInput("escape floor must be in (0, 1]".into()));
        }
        if self.denominator_bound == 0 {
            return Err(Error::InvalidInput("denominator bound must be positive".into()));
        }
        Ok(())
    }
}

/// Splits `units` indistinguishable units over `bins` by independent uniform
/// assignment.
fn random_counts(rng: &mut ChaCha8Rng, units: u64, bins: usize) -> Vec<u64> {
    let mut counts = vec![0u64; bins];
    for _ in 0..units {
        counts[rng.gen_range(0..bins)] += 1;
    }
    counts
}

fn random_fraction_row(counts: &[u64], q: u64) -> Vec<Rational> {
    counts
        .iter()
        .map(|&k| Rational::new(k.into(), q.into()))
        .collect()
}

/// Draws one uniformly absorbing model. Same config ⇒ same model.
pub fn generate(cfg: &GenConfig) -> Result<ModelSpec> {
    cfg.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n_live = rng.gen_range(cfg.states.0..=cfg.states.1);
    let n_abs = cfg.absorbing_states;
    let n = n_live + n_abs;
    let d = cfg.criteria;
    let qmax = u64::from(cfg.denominator_bound);

    let mut states: Vec<String> = (0..n_live).map(|i| format!("s{i}")).collect();
    states.extend((0..n_abs).map(|j| format!("t{j}")));
    let delta: Vec<bool> = (0..n).map(|x| x >= n_live).collect();

    let mut actions = vec![Vec::new(); n];
    let mut kernel = vec![Vec::new(); n];
    let mut rewards = vec![Vec::new(); n];
    let floor_num = cfg.escape_floor.numer().clone();
    let floor_den = cfg.escape_floor.denom().clone();
    for x in 0..n_live {
        let n_act = rng.gen_range(cfg.actions.0..=cfg.actions.1);
        for a in 0..n_act {
            let q = rng.gen_range(1..=qmax);
            // Smallest k with k/q ≥ δ₀, i.e. ⌈δ₀·q⌉ units straight into Δ.
            let k_big = (&floor_num * q + &floor_den - 1u32) / &floor_den;
            let k: u64 = k_big.try_into().expect("escape units fit in u64");
            let mut counts = vec![0u64; n];
            for (j, c) in random_counts(&mut rng, k, n_abs).into_iter().enumerate() {
                counts[n_live + j] += c;
            }
            for (y, c) in random_counts(&mut rng, q - k, n).into_iter().enumerate() {
                counts[y] += c;
            }
            actions[x].push(format!("a{a}"));
            kernel[x].push(random_fraction_row(&counts, q));
            rewards[x].push(
                (0..d)
                    .map(|_| {
                        let den = rng.gen_range(1..=qmax);
                        let num = rng.gen_range(-i64::try_from(qmax).unwrap()..=qmax as i64);
                        Rational::new(num.into(), den.into())
                    })
                    .collect(),
            );
        }
    }

    let q = rng.gen_range(1..=qmax);
    let eta_counts = random_counts(&mut rng, q, n_live);
    let mut eta = random_fraction_row(&eta_counts, q);
    eta.resize(n, Rational::zero());

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
    spec.require_valid()?;
    let report = spec.check_uniform_absorption()?;
    if !report.uniformly_absorbing {
        return Err(Error::Internal(
            "generated model failed its absorption certificate".into(),
        ));
    }
    Ok(spec)
}

/// Uniform random deterministic selector.
pub fn random_deterministic(spec: &ModelSpec, rng: &mut ChaCha8Rng) -> DeterministicPolicy {
    DeterministicPolicy {
        choice: (0..spec.num_states())
            .map(|x| {
                if spec.is_delta(x) {
                    spec.theta(x)
                } else {
                    rng.gen_range(0..spec.num_actions(x))
                }
            })
            .collect(),
    }
}

/// Random stationary policy with exact fraction weights; every action
/// receives at least one weight unit, so the policy has full support.
pub fn random_stationary(
    spec: &ModelSpec,
    rng: &mut ChaCha8Rng,
    denominator_bound: u32,
    full_support: bool,
) -> StationaryPolicy {
    let dist = (0..spec.num_states())
        .map(|x| {
            let m = spec.num_actions(x);
            if spec.is_delta(x) {
                let mut row = vec![Rational::zero(); m];
                row[spec.theta(x)] = Rational::one();
                return row;
            }
            let extra = rng.gen_range(0..=u64::from(denominator_bound));
            let mut counts = random_counts(rng, extra, m);
            if full_support {
                for c in counts.iter_mut() {
                    *c += 1;
                }
            } else if counts.iter().all(|&c| c == 0) {
                counts[rng.gen_range(0..m)] = 1;
            }
            let q: u64 = counts.iter().sum();
            random_fraction_row(&counts, q)
        })
        .collect();
    StationaryPolicy { dist }
}

/// Random chattering policy: `order` random selectors with random positive
/// mixing weights.
pub fn random_chattering(
    spec: &ModelSpec,
    rng: &mut ChaCha8Rng,
    order: usize,
    denominator_bound: u32,
) -> ChatteringPolicy {
    let selectors: Vec<DeterministicPolicy> =
        (0..order).map(|_| random_deterministic(spec, rng)).collect();
    let weights = (0..spec.num_states())
        .map(|_| {
            let extra = rng.gen_range(0..=u64::from(denominator_bound));
            let mut counts = random_counts(rng, extra, order);
            for c in counts.iter_mut() {
                *c += 1;
            }
            let q: u64 = counts.iter().sum();
            random_fraction_row(&counts, q)
        })
        .collect();
    ChatteringPolicy { selectors, weights }
}

/// Random eventually-stationary Markov policy with `stages` staged steps.
pub fn random_markov(
    spec: &ModelSpec,
    rng: &mut ChaCha8Rng,
    stages: usize,
    denominator_bound: u32,
) -> MarkovPolicy {
    MarkovPolicy {
        stages: (0..stages)
            .map(|_| random_stationary(spec, rng, denominator_bound, false))
            .collect(),
        tail: random_stationary(spec, rng, denominator_bound, false),
    }
}

/// Random linear functional on state–action pairs, vanishing on absorbed
/// states.
pub fn random_functional(
    spec: &ModelSpec,
    rng: &mut ChaCha8Rng,
    denominator_bound: u32,
) -> Vec<Vec<Rational>> {
    (0..spec.num_states())
        .map(|x| {
            (0..spec.num_actions(x))
                .map(|_| {
                    if spec.is_delta(x) {
                        Rational::zero()
                    } else {
                        let den = rng.gen_range(1..=u64::from(denominator_bound));
                        let num = rng.gen_range(
                            -i64::from(denominator_bound)..=i64::from(denominator_bound),
                        );
                        Rational::new(num.into(), den.into())
                    }
                })
                .collect()
        })
        .collect()
}

/// Verification-run parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub gen: GenConfig,
    pub trials: usize,
    /// Variable cap for vertex enumeration; trials needing more are skipped.
    pub vertex_cap: usize,
    /// Linear functionals sampled per trial in the support-restriction
    /// suite.
    pub functional_samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            gen: GenConfig::default(),
            trials: 50,
            vertex_cap: lp::DEFAULT_VERTEX_CAP,
            functional_samples: 4,
        }
    }
}

/// A trial that falsified its suite's claim, with the offending model
/// serialized in full.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Counterexample {
    pub trial: usize,
    pub detail: String,
    pub model: String,
}

/// One suite's tally.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub trials: usize,
    pub passes: usize,
    /// Trials skipped because an enumeration cap would be exceeded.
    pub skips: usize,
    pub failures: Vec<Counterexample>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport {
            name: name.to_string(),
            trials: 0,
            passes: 0,
            skips: 0,
            failures: Vec::new(),
        }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, spec: &ModelSpec, trial: usize, outcome: Result<TrialOutcome>) {
        self.trials += 1;
        match outcome {
            Ok(TrialOutcome::Pass) => self.passes += 1,
            Ok(TrialOutcome::Skip) => self.skips += 1,
            Err(e) => self.failures.push(Counterexample {
                trial,
                detail: e.to_string(),
                model: format::model_to_json(spec),
            }),
        }
    }
}

/// Aggregated result of [`verify_theorems`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suites: Vec<SuiteReport>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::ok)
    }
}

enum TrialOutcome {
    Pass,
    Skip,
}

/// Suite names accepted by [`run_suite`], in report order.
pub const SUITES: &[&str] = &[
    "extreme-points",
    "constrained-vertices",
    "chattering-sufficiency",
    "stage-reduction",
    "support-restriction",
    "measure-separation",
    "mixture-necessity",
];

fn fail(detail: impl Into<String>) -> Result<TrialOutcome> {
    Err(Error::Internal(detail.into()))
}

/// Maps cap overflows to skips; anything else stays an error.
fn skip_on_cap(e: Error) -> Result<TrialOutcome> {
    match e {
        Error::TooLarge { .. } => Ok(TrialOutcome::Skip),
        other => Err(other),
    }
}

fn trial_model(cfg: &VerifyConfig, trial: usize, salt: u64) -> Result<ModelSpec> {
    let mut gen = cfg.gen.clone();
    // Distinct stream per (suite, trial) pair, stable across runs.
    gen.seed = cfg
        .gen
        .seed
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(salt)
        .wrapping_add(trial as u64);
    generate(&gen)
}

fn trial_rng(cfg: &VerifyConfig, trial: usize, salt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.gen.seed ^ salt);
    rng.set_stream(trial as u64);
    rng
}

/// Vertices of the occupation polytope equal the deterministic occupation
/// measures, as exact sets.
fn extreme_points_trial(
    spec: &ModelSpec,
    cfg: &VerifyConfig,
    _rng: &mut ChaCha8Rng,
) -> Result<TrialOutcome> {
    let block = spec.require_uniformly_absorbing()?;
    let vertices = match geometry::extreme_occupations::<Rational>(spec, &block, cfg.vertex_cap)
    {
        Ok(v) => v,
        Err(e) => return skip_on_cap(e),
    };
    let det_policies = match enumerate_deterministic(spec, 100_000) {
        Ok(p) => p,
        Err(e) => return skip_on_cap(e),
    };
    let mut det_measures: Vec<OccupationMeasure<Rational>> = Vec::new();
    for phi in det_policies {
        let mu = occupation::occupation_of_stationary(spec, &block, &phi.to_stationary(spec))?;
        if !det_measures.contains(&mu) {
            det_measures.push(mu);
        }
    }
    for v in &vertices {
        if !det_measures.contains(v) {
            return fail(format!(
                "polytope vertex is not a deterministic occupation measure: {v:?}"
            ));
        }
    }
    for mu in &det_measures {
        if !vertices.contains(mu) {
            return fail(format!(
                "deterministic occupation measure is not an enumerated vertex: {mu:?}"
            ));
        }
    }
    if vertices.len() != det_measures.len() {
        return fail("vertex count differs from deterministic measure count");
    }
    Ok(TrialOutcome::Pass)
}

/// Every vertex of the `p`-constrained polytope splits into at most `p+1`
/// deterministic measures and packs into a chattering policy of order at
/// most `p+1`, exactly.
fn constrained_vertices_trial(
    spec: &ModelSpec,
    cfg: &VerifyConfig,
    rng: &mut ChaCha8Rng,
) -> Result<TrialOutcome> {
    let block = spec.require_uniformly_absorbing()?;
    let p = 1 + rng.gen_range(0..2usize);
    // Feasible levels: evaluate random functionals at a random policy.
    let pi = random_stationary(spec, rng, cfg.gen.denominator_bound, false);
    let mu_pi: OccupationMeasure<Rational> =
        occupation::occupation_of_stationary(spec, &block, &pi)?;
    let functionals: Vec<Vec<Vec<Rational>>> = (0..p)
        .map(|_| random_functional(spec, rng, cfg.gen.denominator_bound))
        .collect();

    let poly = CharPolytope::<Rational>::build(spec, &block);
    let mut a = poly.a.clone();
    let mut b = poly.b.clone();
    for g in &functionals {
        a.push(poly.pairs.iter().map(|&(x, act)| g[x][act].clone()).collect());
        b.push(
            mu_pi
                .mass
                .iter()
                .map(|(&(x, act), m)| g[x][act].clone() * m)
                .fold(Rational::zero(), |acc, v| acc + v),
        );
    }
    let dense_vertices = match lp::enumerate_vertices(&a, &b, cfg.vertex_cap) {
        Ok(v) => v,
        Err(e) => return skip_on_cap(e),
    };
    if dense_vertices.is_empty() {
        return fail("constrained polytope lost its feasible point");
    }
    for values in &dense_vertices {
        let vertex = OccupationMeasure::from_dense(&poly.pairs, values);
        let mix = decompose_vertex(spec, &block, &vertex, p + 1)?;
        if mix.components.len() > p + 1 {
            return fail(format!(
                "decomposition used {} components with p = {p}",
                mix.components.len()
            ));
        }
        mix.check()?;
        let gamma = vertex_to_chattering(spec, &block, &vertex, p)?;
        if gamma.order() > p + 1 {
            return fail(format!(
                "chattering order {} exceeds p+1 = {}",
                gamma.order(),
                p + 1
            ));
        }
    }
    Ok(TrialOutcome::Pass)
}

/// Any policy's performance vector is matched exactly by a chattering
/// policy of order at most d+1.
fn chattering_sufficiency_trial(
    spec: &ModelSpec,
    cfg: &VerifyConfig,
    rng: &mut ChaCha8Rng,
) -> Result<TrialOutcome> {
    let block = spec.require_uniformly_absorbing()?;
    let qb = cfg.gen.denominator_bound;
    let policy = match rng.gen_range(0..3) {
        0 => PolicyKind::Stationary(random_stationary(spec, rng, qb, false)),
        1 => {
            let order = 1 + rng.gen_range(0..3);
            PolicyKind::Chattering(random_chattering(spec, rng, order, qb))
        }
        _ => {
            let stages = 1 + rng.gen_range(0..3);
            PolicyKind::Markov(random_markov(spec, rng, stages, qb))
        }
    };
    let target = occupation::occupation_of::<Rational>(spec, &block, &policy)?
        .performance(spec);
    let matched = match_performance(spec, &block, &target)?;
    if matched.policy.order() > spec.d + 1 {
        return fail(format!(
            "matched order {} exceeds d+1 = {}",
            matched.policy.order(),
            spec.d + 1
        ));
    }
    if matched.measure.performance(spec) != target {
        return fail("matched performance differs from the target");
    }
    Ok(TrialOutcome::Pass)
}

/// Stage reduction preserves the stage expectation and the total
/// performance exactly, with per-state support at most 2d+1; iterating over
/// all stages preserves the performance vector.
fn stage_reduction_trial(
    spec: &ModelSpec,
    cfg: &VerifyConfig,
    rng: &mut ChaCha8Rng,
) -> Result<TrialOutcome> {
    let block = spec.require_uniformly_absorbing()?;
    let qb = cfg.gen.denominator_bound;
    let n_stages = 1 + rng.gen_range(0..3usize);
    let pi = random_markov(spec, rng, n_stages, qb);
    let t = rng.gen_range(0..n_stages);

    let stage_before = stage_expectation(spec, &block, &pi, t);
    let perf_before = occupation::occupation_of_markov::<Rational>(spec, &block, &pi)?
        .performance(spec);
    let tilde = stage_reduce(spec, &pi, t)?;
    let stage_after = stage_expectation(spec, &block, &tilde, t);
    let perf_after = occupation::occupation_of_markov::<Rational>(spec, &block, &tilde)?
        .performance(spec);
    if stage_before != stage_after {
        return fail("stage expectation changed under stage reduction");
    }
    if perf_before != perf_after {
        return fail("total performance changed under stage reduction");
    }
    let bound = 2 * spec.d + 1;
    for &x in &block.states {
        let support = tilde.stages[t].dist[x].iter().filter(|w| !w.is_zero()).count();
        if support > bound {
            return fail(format!(
                "stage support {support} exceeds 2d+1 = {bound} at state {}",
                spec.states[x]
            ));
        }
    }
    let flat = reduce_all_stages(spec, &pi)?;
    let perf_flat = occupation::occupation_of_markov::<Rational>(spec, &block, &flat)?
        .performance(spec);
    if perf_flat != perf_before {
        return fail("iterated stage reduction changed the performance vector");
    }
    Ok(TrialOutcome::Pass)
}

/// A stationary policy's performance lies in the relative interior of its
/// support-restricted model's image; any sampled functional maximized there
/// is constant on the image.
fn support_restriction_trial(
    spec: &ModelSpec,
    cfg: &VerifyConfig,
    rng: &mut ChaCha8Rng,
) -> Result<TrialOutcome> {
    let block = spec.require_uniformly_absorbing()?;
    let sigma = random_stationary(spec, rng, cfg.gen.denominator_bound, false);
    let value: Vec<Rational> =
        occupation::occupation_of_stationary::<Rational>(spec, &block, &sigma)?
            .performance(spec);

    let (restricted, _map) = occupation::restrict_to_support(spec, &sigma)?;
    let r_block = restricted.require_uniformly_absorbing()?;
    let measures = match geometry::extreme_occupations::<Rational>(
        &restricted,
        &r_block,
        cfg.vertex_cap,
    ) {
        Ok(m) => m,
        Err(e) => return skip_on_cap(e),
    };
    let image = VPolytope::image_of(&restricted, &measures);
    if !geometry::relative_interior_contains(&image.points, &value)? {
        return fail(format!(
            "performance {value:?} is not in the relative interior of the restricted image"
        ));
    }
    for _ in 0..cfg.functional_samples {
        let c: Vec<Rational> = (0..spec.d)
            .map(|_| {
                let den = rng.gen_range(1..=u64::from(cfg.gen.denominator_bound));
                let num = rng.gen_range(
                    -i64::from(cfg.gen.denominator_bound)
                        ..=i64::from(cfg.gen.denominator_bound),
                );
                Rational::new(num.into(), den.into())
            })
            .collect();
        let at_value = crate::scalar::dot(&c, &value);
        let over_image: Vec<Rational> = image
            .points
            .iter()
            .map(|pt| crate::scalar::dot(&c, pt))
            .collect();
        let max = over_image.iter().max().cloned().unwrap_or_else(Rational::zero);
        let min = over_image.iter().min().cloned().unwrap_or_else(Rational::zero);
        if at_value == max && max != min {
            return fail(
                "a functional is maximized at an interior point but not constant on the image",
            );
        }
        if at_value > max {
            return fail("performance escaped its own image");
        }
    }
    Ok(TrialOutcome::Pass)
}

/// Stationary policies that differ at a state charged by the first one's
/// occupation measure have different occupation measures; differing only at
/// uncharged states leaves the measure unchanged.
fn measure_separation_trial(
    spec: &ModelSpec,
    cfg: &VerifyConfig,
    rng: &mut ChaCha8Rng,
) -> Result<TrialOutcome> {
    let block = spec.require_uniformly_absorbing()?;
    let sigma1 = random_stationary(spec, rng, cfg.gen.denominator_bound, false);
    let mu1: OccupationMeasure<Rational> =
        occupation::occupation_of_stationary(spec, &block, &sigma1)?;

    // Perturb at a charged state with at least two actions, if any.
    let candidates: Vec<usize> = (0..spec.num_states())
        .filter(|&x| {
            !spec.is_delta(x)
                && spec.num_actions(x) >= 2
                && mu1.state_marginal(x).is_positive_tol()
        })
        .collect();
    if let Some(&x) = candidates.first() {
        let mut sigma2 = sigma1.clone();
        // Move to a different row: a deterministic choice the current row is
        // not already equal to.
        let m = spec.num_actions(x);
        let mut row = vec![Rational::zero(); m];
        let target = (0..m)
            .find(|&a| sigma1.dist[x][a] != Rational::one())
            .expect("some action has weight < 1");
        row[target] = Rational::one();
        sigma2.dist[x] = row;
        let mu2: OccupationMeasure<Rational> =
            occupation::occupation_of_stationary(spec, &block, &sigma2)?;
        if mu1 == mu2 {
            return fail(format!(
                "distinct kernels at charged state {} share one occupation measure",
                spec.states[x]
            ));
        }
    }

    // Perturbing an unreachable state never moves the measure.
    let uncharged: Vec<usize> = (0..spec.num_states())
        .filter(|&x| {
            !spec.is_delta(x)
                && spec.num_actions(x) >= 2
                && mu1.state_marginal(x).is_zero_tol()
        })
        .collect();
    if let Some(&x) = uncharged.first() {
        let mut sigma2 = sigma1.clone();
        let m = spec.num_actions(x);
        let mut row = vec![Rational::zero(); m];
        row[m - 1] = Rational::one();
        sigma2.dist[x] = row;
        let mu2: OccupationMeasure<Rational> =
            occupation::occupation_of_stationary(spec, &block, &sigma2)?;
        if mu1 != mu2 {
            return fail("perturbing an uncharged state moved the occupation measure");
        }
    }
    Ok(TrialOutcome::Pass)
}

/// On the fixture, 14/15 is achievable (order-2 chattering) yet outside the
/// deterministic performance set {1, 4/5}: mixtures are genuinely needed in
/// finite models.
fn mixture_necessity_demo() -> Result<TrialOutcome> {
    let spec = crate::fixtures::twostate();
    let block = spec.require_uniformly_absorbing()?;
    let target = vec![Rational::new(14.into(), 15.into())];
    let matched = match_performance(&spec, &block, &target)?;
    if matched.policy.order() != 2 {
        return fail(format!(
            "fixture target needs order 2, got {}",
            matched.policy.order()
        ));
    }
    let det_values: Vec<Vec<Rational>> = enumerate_deterministic(&spec, 1_000)?
        .into_iter()
        .map(|phi| {
            occupation::occupation_of_stationary::<Rational>(
                &spec,
                &block,
                &phi.to_stationary(&spec),
            )
            .map(|mu| mu.performance(&spec))
        })
        .collect::<Result<_>>()?;
    if det_values.contains(&target) {
        return fail("a deterministic policy unexpectedly achieves 14/15");
    }
    let expected = [
        vec![Rational::one()],
        vec![Rational::new(4.into(), 5.into())],
    ];
    for v in &expected {
        if !det_values.contains(v) {
            return fail(format!("deterministic set lost the value {v:?}"));
        }
    }
    Ok(TrialOutcome::Pass)
}

/// Runs one named suite over `cfg.trials` generated instances.
pub fn run_suite(name: &str, cfg: &VerifyConfig) -> Result<SuiteReport> {
    let salt = match SUITES.iter().position(|s| *s == name) {
        Some(i) => i as u64 + 1,
        None => {
            return Err(Error::InvalidInput(format!(
                "unknown suite {name:?}; expected one of {SUITES:?}"
            )))
        }
    };
    let mut report = SuiteReport::new(name);
    if name == "mixture-necessity" {
        if cfg.trials > 0 {
            let spec = crate::fixtures::twostate();
            report.record(&spec, 0, mixture_necessity_demo());
        }
        return Ok(report);
    }
    for trial in 0..cfg.trials {
        let spec = trial_model(cfg, trial, salt)?;
        let mut rng = trial_rng(cfg, trial, salt);
        let outcome = match name {
            "extreme-points" => extreme_points_trial(&spec, cfg, &mut rng),
            "constrained-vertices" => constrained_vertices_trial(&spec, cfg, &mut rng),
            "chattering-sufficiency" => chattering_sufficiency_trial(&spec, cfg, &mut rng),
            "stage-reduction" => stage_reduction_trial(&spec, cfg, &mut rng),
            "support-restriction" => support_restriction_trial(&spec, cfg, &mut rng),
            "measure-separation" => measure_separation_trial(&spec, cfg, &mut rng),
            _ => unreachable!("suite list covered above"),
        };
        report.record(&spec, trial, outcome);
    }
    Ok(report)
}

/// Runs every suite.
pub fn verify_theorems(cfg: &VerifyConfig) -> Result<VerificationReport> {
    let suites = SUITES
        .iter()
        .map(|name| run_suite(name, cfg))
        .collect::<Result<_>>()?;
    Ok(VerificationReport { suites })
}
