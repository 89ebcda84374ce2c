//! Path-flow equilibria with affine edge costs `fixed + slope · flow`.
//!
//! Demand `Q` is split over a fixed list of paths. In equal-cost mode every
//! path must carry the same cost (flows may go negative). In nonnegative mode
//! flows are non-negative, used paths share the common cost and unused paths
//! cost at least as much (Wardrop conditions).

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::exactmath::{render_linear_form, solve_linear_system, LinearSystem, Rational, SolveError};

/// Largest path count accepted by support enumeration.
pub const MAX_SUPPORT_PATHS: usize = 16;

pub type EdgeId = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowEdge {
    pub id: EdgeId,
    pub fixed: Rational,
    pub slope: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowProblemError {
    #[error("duplicate edge id {0}")]
    DuplicateEdge(EdgeId),
    #[error("path {path} references unknown edge {edge}")]
    UnknownEdge { path: usize, edge: EdgeId },
    #[error("path {path} uses edge {edge} twice")]
    RepeatedEdge { path: usize, edge: EdgeId },
    #[error("path {0} is empty")]
    EmptyPath(usize),
    #[error("paths {0} and {1} are identical")]
    DuplicatePath(usize, usize),
    #[error("problem has no paths")]
    NoPaths,
    #[error("demand {0} is negative")]
    NegativeDemand(Rational),
}

/// Paths are numbered from 1 in messages and reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowProblem {
    edges: Vec<FlowEdge>,
    paths: Vec<Vec<EdgeId>>,
    demand: Rational,
    index: HashMap<EdgeId, usize>,
}

impl FlowProblem {
    pub fn new(edges: Vec<FlowEdge>, paths: Vec<Vec<EdgeId>>, demand: Rational) -> Result<Self, FlowProblemError> {
        let mut index = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            if index.insert(e.id, i).is_some() {
                return Err(FlowProblemError::DuplicateEdge(e.id));
            }
        }
        if paths.is_empty() {
            return Err(FlowProblemError::NoPaths);
        }
        for (p, path) in paths.iter().enumerate() {
            if path.is_empty() {
                return Err(FlowProblemError::EmptyPath(p + 1));
            }
            let mut seen = HashSet::new();
            for &edge in path {
                if !index.contains_key(&edge) {
                    return Err(FlowProblemError::UnknownEdge { path: p + 1, edge });
                }
                if !seen.insert(edge) {
                    return Err(FlowProblemError::RepeatedEdge { path: p + 1, edge });
                }
            }
            if let Some(q) = paths[..p].iter().position(|other| other == path) {
                return Err(FlowProblemError::DuplicatePath(q + 1, p + 1));
            }
        }
        if demand.is_negative() {
            return Err(FlowProblemError::NegativeDemand(demand));
        }
        Ok(FlowProblem { edges, paths, demand, index })
    }

    pub fn edges(&self) -> &[FlowEdge] {
        &self.edges
    }

    pub fn paths(&self) -> &[Vec<EdgeId>] {
        &self.paths
    }

    pub fn demand(&self) -> &Rational {
        &self.demand
    }

    pub fn path_count(&self) -> usize {
        self.paths.len()
    }

    pub fn edge(&self, id: EdgeId) -> &FlowEdge {
        &self.edges[self.index[&id]]
    }

    /// Same problem with paths reordered so that new path `i` is old path `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let paths = order.iter().map(|&i| self.paths[i].clone()).collect();
        FlowProblem::new(self.edges.clone(), paths, self.demand.clone()).expect("permutation of a valid problem")
    }
}

/// Path costs as affine forms: `cost_i = constants[i] + Σ_j coefficients[i][j] · x_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCosts {
    pub constants: Vec<Rational>,
    pub coefficients: Vec<Vec<Rational>>,
}

impl PathCosts {
    pub fn evaluate(&self, flows: &[Rational]) -> Vec<Rational> {
        self.constants
            .iter()
            .zip(&self.coefficients)
            .map(|(k, row)| k + &row.iter().zip(flows).map(|(c, x)| c * x).sum::<Rational>())
            .collect()
    }

    /// `11x_1 + 10x_2 + 20` style rendering of path `i`.
    pub fn render(&self, i: usize) -> String {
        render_linear_form(&self.coefficients[i], Some(&self.constants[i]))
    }
}

pub fn path_cost_coefficients(problem: &FlowProblem) -> PathCosts {
    let k = problem.path_count();
    let sets: Vec<HashSet<EdgeId>> = problem.paths.iter().map(|p| p.iter().copied().collect()).collect();
    let constants = problem.paths.iter().map(|p| p.iter().map(|&e| &problem.edge(e).fixed).sum()).collect();
    let coefficients = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| problem.paths[i].iter().filter(|e| sets[j].contains(e)).map(|&e| &problem.edge(e).slope).sum())
                .collect()
        })
        .collect();
    PathCosts { constants, coefficients }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EquilibriumMode {
    #[default]
    EqualCost,
    Nonnegative,
}

impl fmt::Display for EquilibriumMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EquilibriumMode::EqualCost => "equal-cost",
            EquilibriumMode::Nonnegative => "nonnegative",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumResult {
    pub flows: Vec<Rational>,
    pub common_cost: Rational,
    pub mode: EquilibriumMode,
    /// Zero-based indices of the paths held at the common cost.
    pub support: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquilibriumError {
    #[error("equal-cost system has no unique solution ({cause}):\n{system}")]
    Singular { cause: SolveError, system: LinearSystem },
    #[error("no support satisfies the nonnegative equilibrium conditions")]
    NoFeasibleSupport,
    #[error("{paths} paths exceed the support enumeration limit of {MAX_SUPPORT_PATHS}")]
    TooManyPaths { paths: usize },
}

/// Stacked equal-cost system over the paths in `support` (zero-based, in
/// order): `cost(first) − cost(other) = 0` for each other path, then the
/// demand row. Unknowns are the support flows, in support order.
pub fn equal_cost_system(costs: &PathCosts, support: &[usize], demand: &Rational) -> LinearSystem {
    let first = support[0];
    let mut a = Vec::with_capacity(support.len());
    let mut b = Vec::with_capacity(support.len());
    for &other in &support[1..] {
        a.push(support.iter().map(|&j| &costs.coefficients[first][j] - &costs.coefficients[other][j]).collect());
        b.push(&costs.constants[other] - &costs.constants[first]);
    }
    a.push(vec![Rational::one(); support.len()]);
    b.push(demand.clone());
    LinearSystem::new(a, b).expect("stacked system is square")
}

fn solve_on_support(
    problem: &FlowProblem,
    costs: &PathCosts,
    support: &[usize],
) -> Result<(Vec<Rational>, Rational), EquilibriumError> {
    let system = equal_cost_system(costs, support, &problem.demand);
    let sub = solve_linear_system(&system).map_err(|cause| EquilibriumError::Singular { cause, system })?;
    let mut flows = vec![Rational::zero(); problem.path_count()];
    for (&p, x) in support.iter().zip(sub) {
        flows[p] = x;
    }
    let common = costs.evaluate(&flows).swap_remove(support[0]);
    Ok((flows, common))
}

pub fn solve_equilibrium(problem: &FlowProblem, mode: EquilibriumMode) -> Result<EquilibriumResult, EquilibriumError> {
    let costs = path_cost_coefficients(problem);
    let k = problem.path_count();
    match mode {
        EquilibriumMode::EqualCost => {
            let support: Vec<usize> = (0..k).collect();
            let (flows, common_cost) = solve_on_support(problem, &costs, &support)?;
            Ok(EquilibriumResult { flows, common_cost, mode, support })
        }
        EquilibriumMode::Nonnegative => {
            if k > MAX_SUPPORT_PATHS {
                return Err(EquilibriumError::TooManyPaths { paths: k });
            }
            for mask in 1u32..(1u32 << k) {
                let support: Vec<usize> = (0..k).filter(|&p| mask & (1 << p) != 0).collect();
                let Ok((flows, common_cost)) = solve_on_support(problem, &costs, &support) else {
                    continue;
                };
                if flows.iter().any(Rational::is_negative) {
                    continue;
                }
                let path_costs = costs.evaluate(&flows);
                let complementary = (0..k).filter(|p| mask & (1 << p) == 0).all(|p| path_costs[p] >= common_cost);
                if complementary {
                    return Ok(EquilibriumResult { flows, common_cost, mode, support });
                }
            }
            Err(EquilibriumError::NoFeasibleSupport)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DimensionMismatch {
        expected: usize,
        got: usize,
    },
    DemandMismatch {
        total: Rational,
        demand: Rational,
    },
    /// Path (one-based) whose cost differs from the common cost.
    UnequalCost {
        path: usize,
        cost: Rational,
        common: Rational,
    },
    NegativeFlow {
        path: usize,
        flow: Rational,
    },
    FlowOutsideSupport {
        path: usize,
        flow: Rational,
    },
    CheaperUnusedPath {
        path: usize,
        cost: Rational,
        common: Rational,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimensionMismatch { expected, got } => write!(f, "expected {expected} flows, got {got}"),
            Violation::DemandMismatch { total, demand } => write!(f, "flows sum to {total}, demand is {demand}"),
            Violation::UnequalCost { path, cost, common } => {
                write!(f, "path {path} costs {cost}, common cost is {common}")
            }
            Violation::NegativeFlow { path, flow } => write!(f, "path {path} has negative flow {flow}"),
            Violation::FlowOutsideSupport { path, flow } => {
                write!(f, "path {path} carries {flow} but is outside the support")
            }
            Violation::CheaperUnusedPath { path, cost, common } => {
                write!(f, "unused path {path} costs {cost} < common cost {common}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumReport {
    /// Recomputed cost of every path.
    pub path_costs: Vec<Rational>,
    pub total_flow: Rational,
    pub violations: Vec<Violation>,
}

impl EquilibriumReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Cost of every path at the given flows, summed edge by edge.
pub fn evaluate_path_costs(problem: &FlowProblem, flows: &[Rational]) -> Vec<Rational> {
    let mut edge_flow: HashMap<EdgeId, Rational> = HashMap::new();
    for (path, x) in problem.paths.iter().zip(flows) {
        for &e in path {
            *edge_flow.entry(e).or_insert_with(Rational::zero) += x;
        }
    }
    problem
        .paths
        .iter()
        .map(|path| {
            path.iter()
                .map(|&e| {
                    let edge = problem.edge(e);
                    &edge.fixed + &(&edge.slope * &edge_flow[&e])
                })
                .sum()
        })
        .collect()
}

/// Independent check of a result's equilibrium conditions by substitution.
pub fn verify_equilibrium(problem: &FlowProblem, result: &EquilibriumResult) -> EquilibriumReport {
    let k = problem.path_count();
    let mut violations = Vec::new();
    if result.flows.len() != k {
        violations.push(Violation::DimensionMismatch { expected: k, got: result.flows.len() });
        return EquilibriumReport { path_costs: vec![], total_flow: Rational::zero(), violations };
    }
    let path_costs = evaluate_path_costs(problem, &result.flows);
    let total_flow: Rational = result.flows.iter().sum();
    if total_flow != problem.demand {
        violations.push(Violation::DemandMismatch { total: total_flow.clone(), demand: problem.demand.clone() });
    }
    let common = &result.common_cost;
    match result.mode {
        EquilibriumMode::EqualCost => {
            for (p, c) in path_costs.iter().enumerate() {
                if c != common {
                    violations.push(Violation::UnequalCost { path: p + 1, cost: c.clone(), common: common.clone() });
                }
            }
        }
        EquilibriumMode::Nonnegative => {
            for (p, (x, c)) in result.flows.iter().zip(&path_costs).enumerate() {
                if x.is_negative() {
                    violations.push(Violation::NegativeFlow { path: p + 1, flow: x.clone() });
                }
                let in_support = result.support.contains(&p);
                if in_support && c != common {
                    violations.push(Violation::UnequalCost { path: p + 1, cost: c.clone(), common: common.clone() });
                }
                if !in_support && !x.is_zero() {
                    violations.push(Violation::FlowOutsideSupport { path: p + 1, flow: x.clone() });
                }
                if !in_support && c < common {
                    violations.push(Violation::CheaperUnusedPath {
                        path: p + 1,
                        cost: c.clone(),
                        common: common.clone(),
                    });
                }
            }
        }
    }
    EquilibriumReport { path_costs, total_flow, violations }
}
