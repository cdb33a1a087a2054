//! Constrained optimization front end: maximize (or minimize) a weighted
//! combination of the reward criteria over occupation measures, subject to
//! equality and inequality constraints on auxiliary criteria, and return an
//! optimal chattering policy with an exact dual certificate.
//!
//! The decision variable is the occupation measure itself. Flow-balance rows
//! pin the measure to the achievable polytope; each constraint adds one row
//! (inequalities through a slack variable). The optimum of a linear objective
//! sits at a basic feasible point, where the per-state action support is
//! bounded by one plus the number of *tight* criterion rows — slack variables
//! absorb non-tight inequalities, so those never inflate the chattering
//! order. An unbounded outcome is impossible on a uniformly absorbing model
//! (the polytope is bounded) and is reported as an internal error.

use num::Zero;

use crate::chattering::vertex_to_chattering;
use crate::error::{Error, Result};
use crate::geometry::{self, CharPolytope, VPolytope};
use crate::lp::{self, Goal, LpOutcome, StandardLp};
use crate::model::ModelSpec;
use crate::occupation::OccupationMeasure;
use crate::policy::ChatteringPolicy;
use crate::scalar::{Rational, Scalar};

/// Left-hand side of a constraint: a function of state–action pairs,
/// integrated against the occupation measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CriterionLhs {
    /// The constant 1 off the absorbing set: integrates to the total mass,
    /// i.e. the expected absorption time.
    Mass,
    /// Reward criterion `i` of the model.
    Reward(usize),
    /// An arbitrary function `g[x][a]`, required to vanish on absorbed
    /// states.
    Custom(Vec<Vec<Rational>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

/// One constraint `⟨lhs, μ⟩ relation level`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub lhs: CriterionLhs,
    pub relation: Relation,
    pub level: Rational,
}

/// A constrained optimization problem over one model's occupation measures.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub model: ModelSpec,
    /// Objective weights, one per reward criterion: the objective is
    /// `Σ_i objective[i] · μ(r_i)`.
    pub objective: Vec<Rational>,
    pub goal: Goal,
    pub constraints: Vec<Constraint>,
}

impl ProblemSpec {
    /// Structural validation: the objective has one weight per criterion,
    /// referenced criteria exist, and custom functions have the kernel's
    /// shape and vanish on absorbed states.
    pub fn validate(&self) -> Result<()> {
        self.model.require_valid()?;
        if self.objective.len() != self.model.d {
            return Err(Error::DimensionMismatch(format!(
                "objective has {} weights, model has {} criteria",
                self.objective.len(),
                self.model.d
            )));
        }
        for (k, c) in self.constraints.iter().enumerate() {
            match &c.lhs {
                CriterionLhs::Mass => {}
                CriterionLhs::Reward(i) => {
                    if *i >= self.model.d {
                        return Err(Error::BadConstraint(format!(
                            "constraint {k} references criterion {i}, model has {}",
                            self.model.d
                        )));
                    }
                }
                CriterionLhs::Custom(g) => {
                    if g.len() != self.model.num_states()
                        || g.iter()
                            .enumerate()
                            .any(|(x, row)| row.len() != self.model.num_actions(x))
                    {
                        return Err(Error::BadConstraint(format!(
                            "constraint {k}: function shape does not match the action sets"
                        )));
                    }
                    for (x, row) in g.iter().enumerate() {
                        if self.model.is_delta(x) && row.iter().any(|v| !v.is_zero()) {
                            return Err(Error::BadConstraint(format!(
                                "constraint {k}: function must vanish on absorbed states"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Evaluates a constraint's function at one state–action pair.
    fn lhs_at(&self, lhs: &CriterionLhs, x: usize, a: usize) -> Rational {
        match lhs {
            CriterionLhs::Mass => {
                if self.model.is_delta(x) {
                    Rational::zero()
                } else {
                    Rational::from_integer(1.into())
                }
            }
            CriterionLhs::Reward(i) => self.model.rewards[x][a][*i].clone(),
            CriterionLhs::Custom(g) => g[x][a].clone(),
        }
    }
}

/// Exact optimality certificate at the returned basis.
#[derive(Debug, Clone)]
pub struct DualReport<S: Scalar> {
    /// Multiplier per flow-balance row (one per reachable state).
    pub flow_duals: Vec<S>,
    /// Multiplier per constraint row, in declaration order.
    pub criterion_duals: Vec<S>,
    /// Reduced cost per variable (measure entries first, then slacks).
    pub reduced_costs: Vec<S>,
    /// Every reduced cost points the right way for the goal.
    pub dual_feasible: bool,
    /// Every positive variable has zero reduced cost.
    pub complementary: bool,
}

/// An optimal constrained policy with its certificate.
#[derive(Debug, Clone)]
pub struct Solution<S: Scalar> {
    pub policy: ChatteringPolicy,
    pub measure: OccupationMeasure<S>,
    /// Optimal objective value, in the requested sense.
    pub value: S,
    /// Full performance vector of the optimal measure.
    pub performance: Vec<S>,
    /// `⟨lhs_k, μ⟩` per constraint.
    pub constraint_values: Vec<S>,
    /// Distance to the level per constraint (zero when tight; always zero
    /// for equalities).
    pub constraint_slacks: Vec<S>,
    /// Criterion rows tight at the optimum (equalities plus binding
    /// inequalities); the chattering order is at most this plus one.
    pub tight_criteria: usize,
    pub order_bound: usize,
    pub dual: DualReport<S>,
}

/// Solves the constrained problem and packs the optimal basic point into a
/// chattering policy of order at most `tight criterion rows + 1`.
pub fn solve_constrained<S: Scalar>(p: &ProblemSpec) -> Result<Solution<S>> {
    p.validate()?;
    let spec = &p.model;
    let block = spec.require_uniformly_absorbing()?;
    let poly = CharPolytope::<S>::build(spec, &block);
    let n_mu = poly.pairs.len();
    let slack_of: Vec<Option<usize>> = {
        let mut next = 0usize;
        p.constraints
            .iter()
            .map(|c| match c.relation {
                Relation::Eq => None,
                Relation::Le | Relation::Ge => {
                    let s = next;
                    next += 1;
                    Some(s)
                }
            })
            .collect()
    };
    let n_slack = slack_of.iter().flatten().count();
    let n = n_mu + n_slack;

    let mut a: Vec<Vec<S>> = poly
        .a
        .iter()
        .map(|row| {
            let mut r = row.clone();
            r.resize(n, S::zero());
            r
        })
        .collect();
    let mut b = poly.b.clone();
    for (c, slack) in p.constraints.iter().zip(&slack_of) {
        let mut row = vec![S::zero(); n];
        for (j, &(x, act)) in poly.pairs.iter().enumerate() {
            let v = p.lhs_at(&c.lhs, x, act);
            if !v.is_zero() {
                row[j] = S::from_rational(&v);
            }
        }
        if let Some(s) = slack {
            row[n_mu + s] = match c.relation {
                Relation::Le => S::one(),
                Relation::Ge => S::zero() - S::one(),
                Relation::Eq => unreachable!(),
            };
        }
        a.push(row);
        b.push(S::from_rational(&c.level));
    }

    let mut cost = vec![S::zero(); n];
    for (j, &(x, act)) in poly.pairs.iter().enumerate() {
        let mut v = S::zero();
        for (w, r) in p.objective.iter().zip(&spec.rewards[x][act]) {
            let term = w * r;
            if !term.is_zero() {
                v = v + S::from_rational(&term);
            }
        }
        cost[j] = v;
    }

    let sol = match StandardLp::new(a.clone(), b, cost.clone(), p.goal).solve()? {
        LpOutcome::Optimal(s) => s,
        LpOutcome::Infeasible => return Err(Error::Infeasible),
        LpOutcome::Unbounded => {
            return Err(Error::Internal(
                "objective unbounded on an absorbing model".into(),
            ))
        }
    };

    let measure = OccupationMeasure::from_dense(&poly.pairs, &sol.values[..n_mu]);
    let mut constraint_values = Vec::with_capacity(p.constraints.len());
    let mut constraint_slacks = Vec::with_capacity(p.constraints.len());
    let mut tight = 0usize;
    for c in &p.constraints {
        let mut v = S::zero();
        for (&(x, act), m) in &measure.mass {
            let g = p.lhs_at(&c.lhs, x, act);
            if !g.is_zero() {
                v = v + S::from_rational(&g) * m.clone();
            }
        }
        let level = S::from_rational(&c.level);
        let slack = match c.relation {
            Relation::Eq | Relation::Le => level - v.clone(),
            Relation::Ge => v.clone() - level,
        };
        if slack.is_negative_tol() {
            return Err(Error::Internal(
                "optimal point violates a constraint".into(),
            ));
        }
        if slack.is_zero_tol() {
            tight += 1;
        }
        constraint_values.push(v);
        constraint_slacks.push(slack);
    }

    let policy = vertex_to_chattering(spec, &block, &measure, tight)?;
    let performance = measure.performance(spec);
    let value = p
        .objective
        .iter()
        .zip(&performance)
        .fold(S::zero(), |acc, (w, v)| {
            acc + S::from_rational(w) * v.clone()
        });
    if !(value.clone() - sol.objective.clone()).is_zero_tol() {
        return Err(Error::Internal(
            "objective mismatch between basis and measure".into(),
        ));
    }

    let y = lp::dual_solution(&a, &cost, &sol)?;
    let reduced_costs: Vec<S> = (0..n)
        .map(|j| {
            let mut dot = S::zero();
            for (row, yi) in a.iter().zip(&y) {
                if !yi.is_zero_tol() && !row[j].is_zero_tol() {
                    dot = dot + yi.clone() * row[j].clone();
                }
            }
            cost[j].clone() - dot
        })
        .collect();
    let dual_feasible = reduced_costs.iter().all(|rc| match p.goal {
        Goal::Maximize => !rc.is_positive_tol(),
        Goal::Minimize => !rc.is_negative_tol(),
    });
    let complementary = sol
        .values
        .iter()
        .zip(&reduced_costs)
        .all(|(x, rc)| x.is_zero_tol() || rc.is_zero_tol());
    let n_flow = poly.a.len();
    let dual = DualReport {
        flow_duals: y[..n_flow].to_vec(),
        criterion_duals: y[n_flow..].to_vec(),
        reduced_costs,
        dual_feasible,
        complementary,
    };

    Ok(Solution {
        policy,
        measure,
        value,
        performance,
        constraint_values,
        constraint_slacks,
        tight_criteria: tight,
        order_bound: tight + 1,
        dual,
    })
}

/// Membership report for one target performance vector.
#[derive(Debug, Clone)]
pub struct TargetReport<S: Scalar> {
    pub target: Vec<S>,
    /// Target lies in the achievable set.
    pub member: bool,
    /// Target lies in the relative interior of the achievable set.
    pub relative_interior: bool,
}

/// The achievable-performance polytope with membership flags for targets.
#[derive(Debug, Clone)]
pub struct ImageReport<S: Scalar> {
    /// Extreme points of the performance image, lexicographically sorted.
    pub vertices: Vec<Vec<S>>,
    pub targets: Vec<TargetReport<S>>,
}

/// Enumerates the performance image (vertex enumeration under `cap`
/// variables) and classifies each target: member of the image, and member of
/// its relative interior.
pub fn image_report<S: Scalar>(
    spec: &ModelSpec,
    targets: &[Vec<S>],
    cap: usize,
) -> Result<ImageReport<S>> {
    spec.require_valid()?;
    let block = spec.require_uniformly_absorbing()?;
    let measures = geometry::extreme_occupations::<S>(spec, &block, cap)?;
    let image = VPolytope::image_of(spec, &measures);
    let vertices = geometry::hull_vertices(&image.points)?;
    let mut reports = Vec::with_capacity(targets.len());
    for t in targets {
        if t.len() != spec.d {
            return Err(Error::DimensionMismatch(format!(
                "target has {} entries, model has {} criteria",
                t.len(),
                spec.d
            )));
        }
        let member = geometry::is_in_hull(&vertices, t)?;
        let relative_interior = if member {
            geometry::relative_interior_contains(&vertices, t)?
        } else {
            false
        };
        reports.push(TargetReport {
            target: t.clone(),
            member,
            relative_interior,
        });
    }
    Ok(ImageReport {
        vertices,
        targets: reports,
    })
}
