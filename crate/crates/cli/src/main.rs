//! Command-line surface for the absorbing-model toolkit.
//!
//! Every subcommand reads JSON files, performs one computation, and prints a
//! single run report to stdout: the echoed command line, a SHA-256 hash of
//! all consumed inputs, the arithmetic mode, the result payload, and wall
//! time. Errors go to stderr as JSON with a machine-readable code. Exit
//! codes are a stable contract:
//!
//! * `0` — success (for `absorb-check`: the model is uniformly absorbing;
//!   for `validate`: no violations; for `verify`: every suite passed),
//! * `1` — usage errors (bad flags, bad constraint grammar),
//! * `2` — invalid input, infeasible systems, non-absorbing models,
//! * `3` — a mathematical guarantee the library promises was observed to
//!   fail (this should never happen; such a run is a bug report).
//!
//! Arithmetic is exact by default; `--mode float --eps 1e-9` runs the same
//! pipeline over floating point with the given zero tolerance. `verify` and
//! `reduce-stage` insist on exact mode. The `ABSORBD_VERTEX_CAP` environment
//! variable raises the vertex-enumeration size cap.

#![forbid(unsafe_code)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use absorbd_core::chattering::{match_performance, stage_reduce};
use absorbd_core::format;
use absorbd_core::geometry::CharPolytope;
use absorbd_core::harness::{run_suite, verify_theorems, GenConfig, VerifyConfig};
use absorbd_core::lp::{self, Goal};
use absorbd_core::model::AbsorptionCertificate;
use absorbd_core::montecarlo::{simulate, SimConfig};
use absorbd_core::occupation::{self, OccupationMeasure};
use absorbd_core::policy::PolicyKind;
use absorbd_core::scalar::{
    format_rational, parse_rational, parse_rational_vector, set_float_tolerance, Rational, Scalar,
};
use absorbd_core::solver::{self, Constraint, CriterionLhs, ProblemSpec, Relation};
use absorbd_core::{Error, ModelSpec};

#[derive(Parser)]
#[command(
    name = "absorbd",
    version,
    about = "Exact solver, policy constructor, and verifier for constrained absorbing decision models"
)]
struct Cli {
    /// Arithmetic mode; exact rationals unless floating point is requested.
    #[arg(long, value_enum, global = true, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Zero tolerance for float mode (ignored in exact mode).
    #[arg(long, global = true, default_value_t = 1e-9)]
    eps: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a model file and report every structural violation.
    Validate { model: PathBuf },
    /// Classify a model as uniformly absorbing, with a certificate either way.
    #[command(name = "absorb-check")]
    AbsorbCheck { model: PathBuf },
    /// Compute the occupation measure and performance of a policy.
    Occmeasure {
        model: PathBuf,
        #[arg(long)]
        policy: PathBuf,
    },
    /// Enumerate the vertices of the measure polytope, optionally sliced by
    /// equality constraints, with their disintegrated stationary policies.
    Vertices {
        model: PathBuf,
        /// Equality constraint `LHS=Q` with LHS one of `mass`, `r<i>`, or a
        /// functional JSON file path; repeatable.
        #[arg(long = "constraint")]
        constraints: Vec<String>,
    },
    /// List the extreme performance vectors and test optional target points.
    Image {
        model: PathBuf,
        /// Performance vector such as '[14/15]' to test for membership;
        /// repeatable.
        #[arg(long = "target")]
        targets: Vec<String>,
    },
    /// Construct a low-order mixed policy achieving a target performance.
    Match {
        model: PathBuf,
        /// Target performance vector, e.g. '[14/15]'.
        #[arg(long)]
        target: String,
    },
    /// Optimize a linear combination of criteria subject to constraints.
    Solve {
        model: PathBuf,
        /// Objective weights per criterion, e.g. '[1]' or '[1, -1/2]'.
        #[arg(long)]
        objective: String,
        #[arg(long, value_enum, default_value_t = GoalArg::Max)]
        goal: GoalArg,
        /// Constraint `LHS(=|<=|>=)Q` with LHS one of `mass`, `r<i>`, or a
        /// functional JSON file path; repeatable.
        #[arg(long = "constraint")]
        constraints: Vec<String>,
    },
    /// Shrink one stage of a Markov policy without changing any expectation.
    #[command(name = "reduce-stage")]
    ReduceStage {
        model: PathBuf,
        #[arg(long)]
        policy: PathBuf,
        /// Index of the staged step to reduce (0-based).
        #[arg(long)]
        stage: usize,
    },
    /// Estimate performance by seeded Monte Carlo episodes.
    Simulate {
        model: PathBuf,
        #[arg(long)]
        policy: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        episodes: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        horizon_cap: u64,
    },
    /// Run the randomized self-verification suites on generated instances.
    Verify {
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run a single named suite instead of all of them.
        #[arg(long)]
        suite: Option<String>,
        /// Criterion count of the generated instances.
        #[arg(long, default_value_t = 1)]
        criteria: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GoalArg {
    Max,
    Min,
}

/// Top-level report printed to stdout on success; field order is fixed.
#[derive(Serialize)]
struct RunReport {
    command: String,
    config_hash: String,
    mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps: Option<f64>,
    result: Value,
    elapsed_ms: f64,
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Core(e) if e.is_invariant_violation() => 3,
            Failure::Core(_) => 2,
        }
    }

    fn code(&self) -> &'static str {
        let Failure::Core(e) = self else {
            return "usage";
        };
        match e {
            Error::Unvalidated(_) => "unvalidated",
            Error::NotAbsorbing => "not-absorbing",
            Error::InvalidPolicy(_) => "invalid-policy",
            Error::DimensionMismatch(_) => "dimension-mismatch",
            Error::SingularSystem => "singular-system",
            Error::Unbounded => "unbounded",
            Error::Infeasible => "infeasible",
            Error::TooLarge { .. } => "too-large",
            Error::BadConstraint(_) => "bad-constraint",
            Error::SupportTooLarge { .. } => "support-too-large",
            Error::OrderBoundViolated { .. } => "order-bound-violated",
            Error::NoDecomposition { .. } => "no-decomposition",
            Error::Unachievable => "unachievable",
            Error::NotAVertex(_) => "not-a-vertex",
            Error::InvalidInput(_) => "invalid-input",
            Error::Internal(_) => "internal",
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

/// Accumulates a hash over everything a run consumed: the argument vector,
/// every file read, inline payloads, and relevant environment variables.
struct Session {
    hasher: Sha256,
}

impl Session {
    fn new(command: &str) -> Self {
        let mut s = Session { hasher: Sha256::new() };
        s.note("argv", command);
        if let Ok(cap) = std::env::var("ABSORBD_VERTEX_CAP") {
            s.note("ABSORBD_VERTEX_CAP", &cap);
        }
        s
    }

    fn note(&mut self, label: &str, text: &str) {
        self.hasher.update(label.as_bytes());
        self.hasher.update([0]);
        self.hasher.update(text.as_bytes());
        self.hasher.update([0]);
    }

    fn read_file(&mut self, path: &Path) -> Result<String, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Failure::Core(Error::InvalidInput(format!("{}: {e}", path.display())))
        })?;
        self.note(&path.display().to_string(), &text);
        Ok(text)
    }

    fn finish(self) -> String {
        self.hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return ExitCode::from(if ok { 0 } else { 1 });
        }
    };
    let started = Instant::now();
    let command = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let mut session = Session::new(&command);
    if cli.mode == Mode::Float {
        set_float_tolerance(cli.eps);
    }
    match dispatch(&cli, &mut session) {
        Ok((result, exit)) => {
            let report = RunReport {
                command,
                config_hash: session.finish(),
                mode: match cli.mode {
                    Mode::Exact => "exact",
                    Mode::Float => "float",
                },
                eps: (cli.mode == Mode::Float).then_some(cli.eps),
                result,
                elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
            };
            let text =
                serde_json::to_string_pretty(&report).expect("report serialization cannot fail");
            // Tolerate a closed pipe (e.g. `absorbd ... | head`).
            use std::io::Write;
            let _ = writeln!(std::io::stdout(), "{text}");
            ExitCode::from(exit)
        }
        Err(f) => {
            let exit = f.exit();
            eprintln!(
                "{}",
                json!({"error": f.message(), "code": f.code(), "exit": exit})
            );
            ExitCode::from(exit)
        }
    }
}

fn dispatch(cli: &Cli, session: &mut Session) -> Result<(Value, u8), Failure> {
    // Dispatch chooses the scalar type once; every numeric command runs the
    // same generic pipeline over exact rationals or floats.
    macro_rules! modal {
        ($f:ident($($arg:expr),*)) => {
            match cli.mode {
                Mode::Exact => $f::<Rational>($($arg),*),
                Mode::Float => $f::<f64>($($arg),*),
            }
        };
    }
    match &cli.command {
        Command::Validate { model } => cmd_validate(session, model),
        Command::AbsorbCheck { model } => cmd_absorb_check(session, model),
        Command::Occmeasure { model, policy } => modal!(cmd_occmeasure(session, model, policy)),
        Command::Vertices { model, constraints } => {
            modal!(cmd_vertices(session, model, constraints))
        }
        Command::Image { model, targets } => modal!(cmd_image(session, model, targets)),
        Command::Match { model, target } => modal!(cmd_match(session, model, target)),
        Command::Solve {
            model,
            objective,
            goal,
            constraints,
        } => modal!(cmd_solve(session, model, objective, *goal, constraints)),
        Command::ReduceStage {
            model,
            policy,
            stage,
        } => {
            if cli.mode == Mode::Float {
                return Err(Failure::Usage(
                    "reduce-stage runs in exact mode only".into(),
                ));
            }
            cmd_reduce_stage(session, model, policy, *stage)
        }
        Command::Simulate {
            model,
            policy,
            episodes,
            seed,
            horizon_cap,
        } => cmd_simulate(session, model, policy, *episodes, *seed, *horizon_cap),
        Command::Verify {
            trials,
            seed,
            suite,
            criteria,
        } => {
            if cli.mode == Mode::Float {
                return Err(Failure::Usage(
                    "verify runs in exact mode only: its claims are exact".into(),
                ));
            }
            cmd_verify(*trials, *seed, suite.as_deref(), *criteria)
        }
    }
}

fn load_model(session: &mut Session, path: &Path) -> Result<ModelSpec, Failure> {
    let text = session.read_file(path)?;
    Ok(format::model_from_json(&text)?)
}

fn load_policy(
    session: &mut Session,
    spec: &ModelSpec,
    path: &Path,
) -> Result<PolicyKind, Failure> {
    let text = session.read_file(path)?;
    Ok(format::policy_from_json(spec, &text)?)
}

fn embed(text: String) -> Value {
    serde_json::from_str(&text).expect("emitted JSON reparses")
}

fn measure_value<S: Scalar>(spec: &ModelSpec, mu: &OccupationMeasure<S>) -> Value {
    embed(format::measure_to_json(spec, mu))
}

fn policy_value(spec: &ModelSpec, policy: &PolicyKind) -> Value {
    embed(format::policy_to_json(spec, policy))
}

fn parse_vector<S: Scalar>(label: &str, text: &str) -> Result<Vec<S>, Failure> {
    let q = parse_rational_vector(text)
        .map_err(|e| Failure::Usage(format!("{label}: {e}")))?;
    Ok(q.iter().map(S::from_rational).collect())
}

/// Parses `LHS(=|<=|>=)Q` where LHS is `mass`, `r<i>`, or a path to a
/// functional JSON file.
fn parse_constraint(
    session: &mut Session,
    spec: &ModelSpec,
    text: &str,
    equality_only: bool,
) -> Result<Constraint, Failure> {
    let (lhs_text, relation, rhs_text) = if let Some(i) = text.find("<=") {
        (&text[..i], Relation::Le, &text[i + 2..])
    } else if let Some(i) = text.find(">=") {
        (&text[..i], Relation::Ge, &text[i + 2..])
    } else if let Some(i) = text.find('=') {
        (&text[..i], Relation::Eq, &text[i + 1..])
    } else {
        return Err(Failure::Usage(format!(
            "constraint {text:?} has no relation; expected LHS=Q, LHS<=Q, or LHS>=Q"
        )));
    };
    if equality_only && relation != Relation::Eq {
        return Err(Failure::Usage(format!(
            "constraint {text:?}: vertex enumeration supports equality constraints only"
        )));
    }
    let level = parse_rational(rhs_text.trim())
        .map_err(|e| Failure::Usage(format!("constraint {text:?}: {e}")))?;
    let lhs_text = lhs_text.trim();
    let lhs = if lhs_text == "mass" {
        CriterionLhs::Mass
    } else if let Some(idx) = lhs_text
        .strip_prefix('r')
        .and_then(|s| s.parse::<usize>().ok())
    {
        CriterionLhs::Reward(idx)
    } else {
        let g = session.read_file(Path::new(lhs_text))?;
        CriterionLhs::Custom(format::functional_from_json(spec, &g)?)
    };
    Ok(Constraint {
        lhs,
        relation,
        level,
    })
}

fn cmd_validate(session: &mut Session, model: &Path) -> Result<(Value, u8), Failure> {
    let text = session.read_file(model)?;
    let (spec, validation) = format::model_from_json_lenient(&text)?;
    let ok = validation.is_ok();
    let result = json!({
        "ok": ok,
        "states": spec.num_states(),
        "criteria": spec.d,
        "violations": validation
            .violations
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>(),
    });
    Ok((result, if ok { 0 } else { 2 }))
}

fn cmd_absorb_check(session: &mut Session, model: &Path) -> Result<(Value, u8), Failure> {
    let spec = load_model(session, model)?;
    let report = spec.check_uniform_absorption()?;
    let certificate = match &report.certificate {
        AbsorptionCertificate::Decay { horizon, rho } => json!({
            "type": "decay",
            "horizon": horizon,
            "rho": format_rational(rho),
        }),
        AbsorptionCertificate::SureSurvivalCycle(cycle) => json!({
            "type": "sure-survival-cycle",
            "cycle": cycle,
        }),
    };
    let result = json!({
        "uniformly_absorbing": report.uniformly_absorbing,
        "reachable": report.reachable,
        "survival_profile": report
            .survival_profile
            .iter()
            .map(format_rational)
            .collect::<Vec<_>>(),
        "certificate": certificate,
    });
    Ok((result, if report.uniformly_absorbing { 0 } else { 2 }))
}

fn cmd_occmeasure<S: Scalar>(
    session: &mut Session,
    model: &Path,
    policy: &Path,
) -> Result<(Value, u8), Failure> {
    let spec = load_model(session, model)?;
    let policy = load_policy(session, &spec, policy)?;
    let block = spec.require_uniformly_absorbing()?;
    let mu = occupation::occupation_of::<S>(&spec, &block, &policy)?;
    Ok((measure_value(&spec, &mu), 0))
}

fn cmd_vertices<S: Scalar>(
    session: &mut Session,
    model: &Path,
    constraints: &[String],
) -> Result<(Value, u8), Failure> {
    let spec = load_model(session, model)?;
    let block = spec.require_uniformly_absorbing()?;
    let parsed: Vec<Constraint> = constraints
        .iter()
        .map(|c| parse_constraint(session, &spec, c, true))
        .collect::<Result<_, _>>()?;
    for c in &parsed {
        if let CriterionLhs::Reward(i) = &c.lhs {
            if *i >= spec.d {
                return Err(Failure::Usage(format!(
                    "criterion r{i} does not exist (model has {} criteria)",
                    spec.d
                )));
            }
        }
    }
    let poly = CharPolytope::<S>::build(&spec, &block);
    let mut a = poly.a.clone();
    let mut b = poly.b.clone();
    for c in &parsed {
        let row: Vec<S> = poly
            .pairs
            .iter()
            .map(|&(x, xa)| {
                S::from_rational(&match &c.lhs {
                    CriterionLhs::Mass => Rational::from_integer(1.into()),
                    CriterionLhs::Reward(i) => spec.rewards[x][xa][*i].clone(),
                    CriterionLhs::Custom(g) => g[x][xa].clone(),
                })
            })
            .collect();
        a.push(row);
        b.push(S::from_rational(&c.level));
    }
    let coords = lp::enumerate_vertices(&a, &b, lp::vertex_cap())?;
    let vertices = coords
        .iter()
        .map(|v| {
            let mu = OccupationMeasure::from_dense(&poly.pairs, v);
            let sigma = occupation::disintegrate(&spec, &mu)?;
            Ok(json!({
                "measure": measure_value(&spec, &mu),
                "policy": policy_value(&spec, &PolicyKind::Stationary(sigma)),
            }))
        })
        .collect::<Result<Vec<Value>, Failure>>()?;
    let result = json!({
        "constraints": constraints,
        "count": vertices.len(),
        "vertices": vertices,
    });
    Ok((result, 0))
}

fn cmd_image<S: Scalar>(
    session: &mut Session,
    model: &Path,
    targets: &[String],
) -> Result<(Value, u8), Failure> {
    let spec = load_model(session, model)?;
    let parsed: Vec<Vec<S>> = targets
        .iter()
        .map(|t| parse_vector::<S>("target", t))
        .collect::<Result<_, _>>()?;
    let report = solver::image_report::<S>(&spec, &parsed, lp::vertex_cap())?;
    let result = json!({
        "dimension": spec.d,
        "vertices": report
            .vertices
            .iter()
            .map(|v| v.iter().map(S::render).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "targets": report
            .targets
            .iter()
            .map(|t| json!({
                "target": t.target.iter().map(S::render).collect::<Vec<_>>(),
                "member": t.member,
                "relative_interior": t.relative_interior,
            }))
            .collect::<Vec<_>>(),
    });
    Ok((result, 0))
}

fn cmd_match<S: Scalar>(
    session: &mut Session,
    model: &Path,
    target: &str,
) -> Result<(Value, u8), Failure> {
    let spec = load_model(session, model)?;
    session.note("target", target);
    let t = parse_vector::<S>("target", target)?;
    let block = spec.require_uniformly_absorbing()?;
    let matched = match_performance::<S>(&spec, &block, &t)?;
    let perf = matched.measure.performance(&spec);
    let residual = perf
        .iter()
        .zip(&t)
        .map(|(p, q)| (p.clone() - q.clone()).abs())
        .max_by(S::cmp_total)
        .unwrap_or_else(S::zero);
    let result = json!({
        "policy": policy_value(&spec, &PolicyKind::Chattering(matched.policy.clone())),
        "verification": {
            "performance": perf.iter().map(S::render).collect::<Vec<_>>(),
            "order": matched.policy.order(),
            "order_bound": matched.order_bound,
            "residual": residual.render(),
        },
    });
    Ok((result, 0))
}

fn cmd_solve<S: Scalar>(
    session: &mut Session,
    model: &Path,
    objective: &str,
    goal: GoalArg,
    constraints: &[String],
) -> Result<(Value, u8), Failure> {
    let spec = load_model(session, model)?;
    session.note("objective", objective);
    let objective_q = parse_rational_vector(objective)
        .map_err(|e| Failure::Usage(format!("objective: {e}")))?;
    let parsed: Vec<Constraint> = constraints
        .iter()
        .map(|c| parse_constraint(session, &spec, c, false))
        .collect::<Result<_, _>>()?;
    let block = spec.require_uniformly_absorbing()?;
    let problem = ProblemSpec {
        model: spec.clone(),
        objective: objective_q,
        goal: match goal {
            GoalArg::Max => Goal::Maximize,
            GoalArg::Min => Goal::Minimize,
        },
        constraints: parsed,
    };
    let sol = solver::solve_constrained::<S>(&problem)?;
    let result = json!({
        "value": sol.value.render(),
        "performance": sol.performance.iter().map(S::render).collect::<Vec<_>>(),
        "policy": policy_value(&spec, &PolicyKind::Chattering(sol.policy.clone())),
        "measure": measure_value(&spec, &sol.measure),
        "constraints": constraints
            .iter()
            .zip(sol.constraint_values.iter().zip(&sol.constraint_slacks))
            .map(|(text, (value, slack))| json!({
                "constraint": text,
                "value": value.render(),
                "slack": slack.render(),
            }))
            .collect::<Vec<_>>(),
        "tight_criteria": sol.tight_criteria,
        "order_bound": sol.order_bound,
        "dual": {
            "flow": block
                .states
                .iter()
                .zip(&sol.dual.flow_duals)
                .map(|(&x, y)| (spec.states[x].clone(), Value::String(y.render())))
                .collect::<serde_json::Map<String, Value>>(),
            "criteria": sol
                .dual
                .criterion_duals
                .iter()
                .map(S::render)
                .collect::<Vec<_>>(),
            "feasible": sol.dual.dual_feasible,
            "complementary": sol.dual.complementary,
        },
    });
    Ok((result, 0))
}

fn cmd_reduce_stage(
    session: &mut Session,
    model: &Path,
    policy: &Path,
    stage: usize,
) -> Result<(Value, u8), Failure> {
    let spec = load_model(session, model)?;
    let policy = load_policy(session, &spec, policy)?;
    let PolicyKind::Markov(pi) = policy else {
        return Err(Failure::Core(Error::InvalidInput(
            "reduce-stage needs a policy of type markov".into(),
        )));
    };
    let block = spec.require_uniformly_absorbing()?;
    let support = |p: &absorbd_core::policy::MarkovPolicy| -> usize {
        block
            .states
            .iter()
            .map(|&x| p.stages[stage].dist[x].iter().filter(|w| !w.is_zero_tol()).count())
            .max()
            .unwrap_or(0)
    };
    let before = support(&pi);
    let reduced = stage_reduce(&spec, &pi, stage)?;
    let after = support(&reduced);
    let mu = occupation::occupation_of::<Rational>(
        &spec,
        &block,
        &PolicyKind::Markov(reduced.clone()),
    )?;
    let result = json!({
        "stage": stage,
        "support": {"before": before, "after": after},
        "performance": mu
            .performance(&spec)
            .iter()
            .map(format_rational)
            .collect::<Vec<_>>(),
        "policy": policy_value(&spec, &PolicyKind::Markov(reduced)),
    });
    Ok((result, 0))
}

fn cmd_simulate(
    session: &mut Session,
    model: &Path,
    policy: &Path,
    episodes: u64,
    seed: u64,
    horizon_cap: u64,
) -> Result<(Value, u8), Failure> {
    let spec = load_model(session, model)?;
    let policy = load_policy(session, &spec, policy)?;
    let cfg = SimConfig {
        episodes,
        seed,
        horizon_cap,
    };
    let report = simulate(&spec, &policy, &cfg)?;
    let result = json!({
        "episodes": report.episodes,
        "seed": seed,
        "mean_performance": report.mean_performance,
        "se_performance": report.se_performance,
        "mean_absorption_time": report.mean_absorption_time,
        "se_absorption_time": report.se_absorption_time,
        "absorption_time_min": report.absorption_times.iter().min().copied().unwrap_or(0),
        "absorption_time_max": report.absorption_times.iter().max().copied().unwrap_or(0),
        "horizon_cap_hits": report.horizon_cap_hits,
        "mean_occupation": report
            .mean_occupation
            .iter()
            .map(|&(x, a, m)| json!({
                "state": spec.states[x],
                "action": spec.actions[x][a],
                "mean": m,
            }))
            .collect::<Vec<_>>(),
    });
    Ok((result, 0))
}

fn cmd_verify(
    trials: usize,
    seed: u64,
    suite: Option<&str>,
    criteria: usize,
) -> Result<(Value, u8), Failure> {
    let cfg = VerifyConfig {
        gen: GenConfig {
            seed,
            criteria,
            ..GenConfig::default()
        },
        trials,
        vertex_cap: lp::vertex_cap(),
        functional_samples: 4,
    };
    let (result, all_passed) = match suite {
        Some(name) => {
            let report = run_suite(name, &cfg)?;
            let ok = report.ok();
            (json!({"suites": [report], "all_passed": ok}), ok)
        }
        None => {
            let report = verify_theorems(&cfg)?;
            let ok = report.all_passed();
            (
                json!({"suites": report.suites, "all_passed": ok}),
                ok,
            )
        }
    };
    Ok((result, if all_passed { 0 } else { 3 }))
}
