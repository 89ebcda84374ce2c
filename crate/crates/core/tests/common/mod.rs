//! Shared fixtures, oracles, generators and property checks for the
//! integration tests. Oracles here are written independently of the library
//! code they check.

#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use tradenet::apsp::floyd_all_pairs;
use tradenet::cli::{parse_flow_problem, parse_instance, InstanceDocument, ReplayDocument};
use tradenet::compromise::{solve_compromise, SelectionTie};
use tradenet::equilibrium::{
    solve_equilibrium, verify_equilibrium, EquilibriumError, EquilibriumMode, EquilibriumResult, FlowEdge, FlowProblem,
};
use tradenet::exactmath::{solve_linear_system, LinearSystem, SolveError};
use tradenet::market::{consumer_choice, income_matrix_from_costs, MarketOptions, PayoffMode, SiteCosts, SitePrice};
use tradenet::model::{
    cost_view, validate_instance, Consumer, CostRole, CostView, Edge, EdgeCost, Network, Producer, RawInstance,
};
use tradenet::{Instance, Rational};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

pub fn instance(name: &str) -> Instance {
    parse_instance(&fixture(name)).expect("fixture parses").0
}

pub fn replay(name: &str) -> ReplayDocument {
    ReplayDocument::from_json(&fixture(name)).expect("replay parses")
}

pub fn flow_problem(name: &str) -> FlowProblem {
    parse_flow_problem(&fixture(name)).expect("flow problem parses")
}

pub fn q(s: &str) -> Rational {
    s.parse().expect("rational literal")
}

pub fn qs(items: &[&str]) -> Vec<Rational> {
    items.iter().map(|s| q(s)).collect()
}

pub fn ints(row: &[i64]) -> Vec<Rational> {
    row.iter().map(|&v| Rational::from(v)).collect()
}

// ---------------------------------------------------------------------------
// Oracles

/// Shortest simple-path weight by exhaustive DFS from `src`, for every node.
pub fn all_simple_path_minima(n: usize, edges: &[(usize, usize, i64)], src: usize) -> Vec<Option<i64>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v, w) in edges {
        adj[u].push((v, w));
        adj[v].push((u, w));
    }
    let mut best = vec![None; n];
    let mut on_path = vec![false; n];
    fn walk(u: usize, cost: i64, adj: &[Vec<(usize, i64)>], on_path: &mut [bool], best: &mut [Option<i64>]) {
        if best[u].is_none_or(|b| cost < b) {
            best[u] = Some(cost);
        }
        on_path[u] = true;
        for &(v, w) in &adj[u] {
            if !on_path[v] {
                walk(v, cost + w, adj, on_path, best);
            }
        }
        on_path[u] = false;
    }
    walk(src, 0, &adj, &mut on_path, &mut best);
    best
}

/// Direct min-max regret scan: `(first row with the smallest worst shortfall, value)`.
pub fn minmax_oracle(incomes: &[Vec<Rational>]) -> (usize, Rational) {
    let cols = incomes[0].len();
    let ideal: Vec<Rational> = (0..cols).map(|j| incomes.iter().map(|r| r[j].clone()).max().unwrap()).collect();
    let mut best: Option<(usize, Rational)> = None;
    for (s, row) in incomes.iter().enumerate() {
        let worst = row.iter().zip(&ideal).map(|(v, m)| m - v).max().unwrap();
        if best.as_ref().is_none_or(|(_, b)| worst < *b) {
            best = Some((s, worst));
        }
    }
    best.unwrap()
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant(a: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    if n == 0 {
        return Rational::one();
    }
    if n == 1 {
        return a[0][0].clone();
    }
    let mut det = Rational::zero();
    for j in 0..n {
        if a[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Rational>> = a[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| v.clone()).collect())
            .collect();
        let term = &a[0][j] * &determinant(&minor);
        det = if j % 2 == 0 { det + term } else { det - term };
    }
    det
}

/// Cramer's rule; `None` when the matrix is singular.
pub fn cramer(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let det = determinant(a);
    if det.is_zero() {
        return None;
    }
    Some(
        (0..a.len())
            .map(|j| {
                let replaced: Vec<Vec<Rational>> = a
                    .iter()
                    .zip(b)
                    .map(|(row, bi)| {
                        let mut row = row.clone();
                        row[j] = bi.clone();
                        row
                    })
                    .collect();
                determinant(&replaced) / det.clone()
            })
            .collect(),
    )
}

/// Path costs at `flows`, accumulated per edge.
pub fn oracle_path_costs(problem: &FlowProblem, flows: &[Rational]) -> Vec<Rational> {
    let mut load: HashMap<u32, Rational> = HashMap::new();
    for (path, x) in problem.paths().iter().zip(flows) {
        for e in path {
            let entry = load.entry(*e).or_insert_with(Rational::zero);
            *entry = entry.clone() + x.clone();
        }
    }
    let cost_of: HashMap<u32, &FlowEdge> = problem.edges().iter().map(|e| (e.id, e)).collect();
    problem
        .paths()
        .iter()
        .map(|path| {
            path.iter()
                .map(|e| cost_of[e].fixed.clone() + cost_of[e].slope.clone() * load[e].clone())
                .fold(Rational::zero(), |a, b| a + b)
        })
        .collect()
}

/// A nonnegative equilibrium found by the oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleEquilibrium {
    pub support: Vec<usize>,
    pub flows: Vec<Rational>,
    pub cost: Rational,
}

/// Every support whose equal-cost solution is nonnegative and no cheaper
/// than any unused path. Each support's flows are found by Cramer's rule on
/// `cost(p) = t` for `p` in the support plus the demand row, with unknowns
/// `(x_support..., t)`.
pub fn support_enumeration_oracle(problem: &FlowProblem) -> Vec<OracleEquilibrium> {
    let k = problem.path_count();
    let mut found = Vec::new();
    for mask in 1usize..(1 << k) {
        let support: Vec<usize> = (0..k).filter(|p| mask >> p & 1 == 1).collect();
        let m = support.len();
        // Cost of path p is affine in the flows; probe it with unit vectors.
        let zero = vec![Rational::zero(); k];
        let base = oracle_path_costs(problem, &zero);
        let mut a = Vec::new();
        let mut b = Vec::new();
        for &p in &support {
            let mut row: Vec<Rational> = support
                .iter()
                .map(|&j| {
                    let mut unit = zero.clone();
                    unit[j] = Rational::one();
                    oracle_path_costs(problem, &unit)[p].clone() - base[p].clone()
                })
                .collect();
            row.push(-Rational::one());
            a.push(row);
            b.push(-base[p].clone());
        }
        let mut demand_row = vec![Rational::one(); m];
        demand_row.push(Rational::zero());
        a.push(demand_row);
        b.push(problem.demand().clone());
        let Some(sol) = cramer(&a, &b) else { continue };
        let mut flows = zero.clone();
        for (i, &p) in support.iter().enumerate() {
            flows[p] = sol[i].clone();
        }
        let cost = sol[m].clone();
        if flows.iter().any(Rational::is_negative) {
            continue;
        }
        let costs = oracle_path_costs(problem, &flows);
        if (0..k).filter(|p| !support.contains(p)).all(|p| costs[p] >= cost) {
            found.push(OracleEquilibrium { support, flows, cost });
        }
    }
    found
}

/// Builds a linear system from rows `[a | b]`.
pub fn system(rows: &[Vec<Rational>]) -> LinearSystem {
    let n = rows.len();
    let a = rows.iter().map(|r| r[..n].to_vec()).collect();
    let b = rows.iter().map(|r| r[n].clone()).collect();
    LinearSystem::new(a, b).expect("square")
}

// ---------------------------------------------------------------------------
// Generators

/// `(n, edges)`: a random spanning tree plus extra edges, weights in 0..=20.
/// Parallel edges may appear; the lighter one is the effective edge.
pub fn connected_graph(max_n: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize, i64)>)> {
    (2..=max_n).prop_flat_map(|n| {
        let tree = proptest::collection::vec((any::<prop::sample::Index>(), 0i64..=20), n - 1);
        let extra = proptest::collection::vec((0..n, 0..n, 0i64..=20), 0..=n);
        (Just(n), tree, extra).prop_map(|(n, tree, extra)| {
            let mut edges: Vec<(usize, usize, i64)> =
                tree.into_iter().enumerate().map(|(i, (p, w))| (i + 1, p.index(i + 1), w)).collect();
            edges.extend(extra.into_iter().filter(|(u, v, _)| u != v));
            (n, edges)
        })
    })
}

/// Graph that may be disconnected.
pub fn any_graph(max_n: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize, i64)>)> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n, 0i64..=20), 0..=2 * n)
            .prop_map(move |es| (n, es.into_iter().filter(|(u, v, _)| u != v).collect()))
    })
}

pub fn view_of(n: usize, edges: &[(usize, usize, i64)]) -> CostView {
    CostView::from_edges(n, edges)
}

/// Small validated market instance on a connected graph. Producers, sites
/// and consumers are drawn from a node permutation so sites never sit on
/// producers.
pub fn market_instance() -> impl Strategy<Value = Instance> {
    (5usize..=8)
        .prop_flat_map(|n| {
            let tree = proptest::collection::vec(
                (any::<prop::sample::Index>(), 0u64..=10, 0u64..=5, 0u64..=10, 0u64..=5),
                n - 1,
            );
            let perm = Just((0..n).collect::<Vec<_>>()).prop_shuffle();
            (
                Just(n),
                tree,
                perm,
                1usize..=2,
                2usize..=3,
                proptest::collection::vec((0..n, 1u64..=3), 1..=4),
                proptest::collection::vec(1u64..=5, 2),
                prop_oneof![Just("0"), Just("1"), Just("1/2")],
                1usize..=2,
            )
        })
        .prop_map(|(n, tree, perm, producers, sites, consumers, prices, markup, retailers)| {
            let edges = tree
                .into_iter()
                .enumerate()
                .map(|(i, (p, a, b, c, d))| Edge {
                    u: i + 1,
                    v: p.index(i + 1),
                    cost: EdgeCost::new(a, b, c, d),
                    capacity: None,
                })
                .collect();
            let raw = RawInstance {
                network: Network { node_count: n, edges },
                producers: perm[..producers]
                    .iter()
                    .zip(&prices)
                    .map(|(&node, &unit_price)| Producer { node, unit_price })
                    .collect(),
                consumers: consumers.into_iter().map(|(node, demand)| Consumer { node, demand }).collect(),
                candidate_sites: perm[producers..producers + sites].to_vec(),
                retailer_count: retailers.min(sites),
                markup_rate: markup.parse().unwrap(),
            };
            validate_instance(raw).expect("generated instance is valid")
        })
}

/// Small rational in `[-20, 20]` with denominator up to 6.
pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-120i64..=120, 1i64..=6).prop_map(|(p, d)| Rational::new(p, d).unwrap())
}

pub fn rational_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
    (1..=max_rows, 1..=max_cols)
        .prop_flat_map(|(r, c)| proptest::collection::vec(proptest::collection::vec(small_rational(), c), r))
}

/// Random flow problem: up to 6 edges, up to 4 distinct paths, fixed costs
/// in 0..=20, slopes in 1..=10, demand in 0..=10.
pub fn flow_problem_strategy() -> impl Strategy<Value = FlowProblem> {
    (2usize..=6, 1usize..=4)
        .prop_flat_map(|(m, k)| {
            let edges = proptest::collection::vec((0i64..=20, 1i64..=10), m);
            let paths = proptest::collection::btree_set(1u32..(1 << m), k.min((1 << m) - 1));
            (Just(m), edges, paths, 0i64..=10)
        })
        .prop_map(|(m, edges, paths, demand)| {
            let edges = edges
                .into_iter()
                .enumerate()
                .map(|(i, (a, b))| FlowEdge { id: i as u32 + 1, fixed: a.into(), slope: b.into() })
                .collect();
            let paths = paths
                .into_iter()
                .map(|mask| (0..m as u32).filter(|e| mask >> e & 1 == 1).map(|e| e + 1).collect())
                .collect();
            FlowProblem::new(edges, paths, demand.into()).expect("generated problem is valid")
        })
}

// ---------------------------------------------------------------------------
// Property checks, shared by the proptest suites and the acceptance runner.

pub type Check = Result<(), TestCaseError>;

pub fn check_floyd_matches_oracle((n, edges): (usize, Vec<(usize, usize, i64)>)) -> Check {
    let m = floyd_all_pairs(&view_of(n, &edges)).unwrap();
    for s in 0..n {
        let oracle = all_simple_path_minima(n, &edges, s);
        for (t, expected) in oracle.iter().enumerate() {
            prop_assert_eq!(m.get(s, t), *expected, "pair ({}, {})", s, t);
        }
    }
    Ok(())
}

pub fn check_matrix_invariants((n, edges): (usize, Vec<(usize, usize, i64)>)) -> Check {
    let m = floyd_all_pairs(&view_of(n, &edges)).unwrap();
    for i in 0..n {
        prop_assert_eq!(m.get(i, i), Some(0));
        for j in 0..n {
            prop_assert_eq!(m.get(i, j), m.get(j, i));
            for k in 0..n {
                if let (Some(a), Some(b)) = (m.get(i, k), m.get(k, j)) {
                    let d = m.get(i, j);
                    prop_assert!(d.is_some_and(|d| d <= a + b), "triangle {} {} {}", i, k, j);
                }
            }
        }
    }
    Ok(())
}

pub fn check_edge_monotonicity((n, edges): (usize, Vec<(usize, usize, i64)>), extra: (usize, usize, i64)) -> Check {
    let (u, v, w) = (extra.0 % n, extra.1 % n, extra.2);
    prop_assume!(u != v);
    let before = floyd_all_pairs(&view_of(n, &edges)).unwrap();
    let mut more = edges.clone();
    more.push((u, v, w));
    let after = floyd_all_pairs(&view_of(n, &more)).unwrap();
    for i in 0..n {
        for j in 0..n {
            if let Some(b) = before.get(i, j) {
                prop_assert!(after.get(i, j).is_some_and(|a| a <= b));
            }
        }
    }
    Ok(())
}

fn site_costs(instance: &Instance) -> SiteCosts {
    let r = floyd_all_pairs(&cost_view(instance.network(), CostRole::Retailer)).unwrap();
    let c = floyd_all_pairs(&cost_view(instance.network(), CostRole::Consumer)).unwrap();
    SiteCosts::from_matrices(instance, &r, &c)
}

/// Incomes add up to what consumers pay, and units add up to served demand.
pub fn check_income_partition(instance: Instance) -> Check {
    let costs = site_costs(&instance);
    let revenue = income_matrix_from_costs(&instance, &costs, MarketOptions::default()).unwrap();
    let units =
        income_matrix_from_costs(&instance, &costs, MarketOptions { payoff: PayoffMode::Units, ..Default::default() })
            .unwrap();
    let sites = instance.candidate_sites();
    let factor = Rational::one() + instance.markup_rate().clone();
    let price_at = |k: usize| {
        let base = costs.producer_base.iter().filter_map(|row| row[k]).min().unwrap();
        factor.clone() * Rational::from(base)
    };
    for (s, situation) in revenue.situations.iter().enumerate() {
        let mut paid = Rational::zero();
        let mut served = 0u64;
        for (consumer, dist) in instance.consumers().iter().zip(&costs.consumer_dist) {
            let best = situation
                .sites
                .iter()
                .filter_map(|site| {
                    let k = sites.iter().position(|x| x == site).unwrap();
                    dist[k].map(|d| (price_at(k) + Rational::from(d), price_at(k), *site))
                })
                .min();
            if let Some((_, price, _)) = best {
                paid += price * Rational::from(consumer.demand);
                served += consumer.demand;
            }
        }
        let total: Rational = revenue.incomes[s].iter().sum();
        prop_assert_eq!(total, paid);
        let total_units: Rational = units.incomes[s].iter().sum();
        prop_assert_eq!(total_units, Rational::from(served));
    }
    Ok(())
}

fn sp(site: usize, price: Rational) -> SitePrice {
    SitePrice { site, producer: 0, base_cost: 0, price }
}

/// A site that is cheaper and no farther wins every consumer.
pub fn check_dominance(prices: Vec<i64>, dists: Vec<Vec<i64>>, winner: prop::sample::Index, cut: i64) -> Check {
    let k = prices.len();
    let w = winner.index(k);
    let mut prices = prices;
    let cheapest_other = prices.iter().enumerate().filter(|&(i, _)| i != w).map(|(_, &p)| p).min().unwrap();
    prices[w] = cheapest_other - cut;
    let placed_prices: Vec<SitePrice> =
        prices.iter().enumerate().map(|(i, &p)| sp(100 - i, Rational::from(p))).collect();
    let placed: Vec<(usize, &SitePrice)> = placed_prices.iter().enumerate().collect();
    for mut row in dists {
        row.truncate(k);
        row.resize(k, 0);
        let nearest_other = row.iter().enumerate().filter(|&(i, _)| i != w).map(|(_, &d)| d).min().unwrap();
        row[w] = row[w].min(nearest_other);
        let d: Vec<Option<i64>> = row.into_iter().map(Some).collect();
        for tie in [tradenet::market::ConsumerTiePolicy::LowerPrice, tradenet::market::ConsumerTiePolicy::LowerSiteId] {
            prop_assert_eq!(consumer_choice(&placed, &d, tie), Some(w));
        }
    }
    Ok(())
}

/// Scaling prices and consumer distances by `c` scales incomes by `c`.
pub fn check_income_scaling(instance: Instance, c: u64) -> Check {
    let costs = site_costs(&instance);
    let base = income_matrix_from_costs(&instance, &costs, MarketOptions::default()).unwrap();
    let mut raw = instance.as_raw().clone();
    for p in &mut raw.producers {
        p.unit_price *= c;
    }
    let scaled_instance = validate_instance(raw).unwrap();
    let scale = |t: &[Vec<Option<i64>>]| -> Vec<Vec<Option<i64>>> {
        t.iter().map(|r| r.iter().map(|v| v.map(|v| v * c as i64)).collect()).collect()
    };
    let scaled_costs =
        SiteCosts { producer_base: scale(&costs.producer_base), consumer_dist: scale(&costs.consumer_dist) };
    let scaled = income_matrix_from_costs(&scaled_instance, &scaled_costs, MarketOptions::default()).unwrap();
    let units = MarketOptions { payoff: PayoffMode::Units, ..Default::default() };
    let base_units = income_matrix_from_costs(&instance, &costs, units).unwrap();
    let scaled_units = income_matrix_from_costs(&scaled_instance, &scaled_costs, units).unwrap();
    let factor = Rational::from(c);
    for (a, b) in base.incomes.iter().zip(&scaled.incomes) {
        for (x, y) in a.iter().zip(b) {
            prop_assert_eq!(x.clone() * factor.clone(), y.clone());
        }
    }
    // Same buyers everywhere: unit counts are unchanged.
    prop_assert_eq!(base_units.incomes, scaled_units.incomes);
    Ok(())
}

pub fn check_translation_invariance(incomes: Vec<Vec<Rational>>, shifts: Vec<Rational>) -> Check {
    let shifted: Vec<Vec<Rational>> =
        incomes.iter().map(|row| row.iter().zip(shifts.iter().cycle()).map(|(v, c)| v + c).collect()).collect();
    let a = solve_compromise(&incomes, SelectionTie::FirstInOrder).unwrap();
    let b = solve_compromise(&shifted, SelectionTie::FirstInOrder).unwrap();
    prop_assert_eq!(&a.residuals, &b.residuals);
    prop_assert_eq!(a.selected, b.selected);
    prop_assert_eq!(&a.value, &b.value);
    Ok(())
}

pub fn check_scaling_invariance(incomes: Vec<Vec<Rational>>, factor: Rational) -> Check {
    prop_assume!(!factor.is_zero());
    let factor = factor.abs();
    let scaled: Vec<Vec<Rational>> = incomes.iter().map(|row| row.iter().map(|v| v * &factor).collect()).collect();
    let a = solve_compromise(&incomes, SelectionTie::FirstInOrder).unwrap();
    let b = solve_compromise(&scaled, SelectionTie::FirstInOrder).unwrap();
    prop_assert_eq!(a.selected, b.selected);
    prop_assert_eq!(&a.value * &factor, b.value);
    for (x, y) in a.ideal.iter().zip(&b.ideal) {
        prop_assert_eq!(x * &factor, y.clone());
    }
    for (ra, rb) in a.residuals.iter().zip(&b.residuals) {
        for (x, y) in ra.iter().zip(rb) {
            prop_assert_eq!(x * &factor, y.clone());
        }
    }
    Ok(())
}

pub fn check_compromise_oracle(incomes: Vec<Vec<Rational>>) -> Check {
    let r = solve_compromise(&incomes, SelectionTie::FirstInOrder).unwrap();
    let (s, v) = minmax_oracle(&incomes);
    prop_assert_eq!(r.selected, s);
    prop_assert_eq!(r.value, v);
    Ok(())
}

/// A row attaining every column maximum is selected with value 0.
pub fn check_ideal_row_selected(mut incomes: Vec<Vec<Rational>>, at: prop::sample::Index) -> Check {
    let cols = incomes[0].len();
    let ideal: Vec<Rational> = (0..cols).map(|j| incomes.iter().map(|r| r[j].clone()).max().unwrap()).collect();
    let row = at.index(incomes.len());
    incomes[row] = ideal;
    let r = solve_compromise(&incomes, SelectionTie::FirstInOrder).unwrap();
    prop_assert!(r.value.is_zero());
    prop_assert!(r.selected <= row);
    prop_assert!(r.residuals[r.selected].iter().all(Rational::is_zero));
    Ok(())
}

pub fn check_linear_residual(rows: Vec<Vec<Rational>>) -> Check {
    let sys = system(&rows);
    let a: Vec<Vec<Rational>> = sys.coefficients().to_vec();
    match solve_linear_system(&sys) {
        Ok(x) => {
            prop_assert!(!determinant(&a).is_zero());
            // a·x − b computed here, not by the library.
            for (row, bi) in a.iter().zip(sys.rhs()) {
                let lhs: Rational = row.iter().zip(&x).map(|(c, v)| c * v).sum();
                prop_assert_eq!(lhs, bi.clone());
            }
            prop_assert!(sys.residual(&x).iter().all(Rational::is_zero));
        }
        Err(SolveError::Singular { .. }) | Err(SolveError::Inconsistent) => {
            prop_assert!(determinant(&a).is_zero());
        }
        Err(e) => return Err(TestCaseError::fail(format!("unexpected {e}"))),
    }
    Ok(())
}

pub fn check_rational_roundtrip(r: Rational) -> Check {
    prop_assert_eq!(r.to_string().parse::<Rational>().unwrap(), r.clone());
    prop_assert_eq!(r.to_mixed_string().parse::<Rational>().unwrap(), r.clone());
    let json = serde_json::to_string(&r).unwrap();
    prop_assert_eq!(serde_json::from_str::<Rational>(&json).unwrap(), r);
    Ok(())
}

pub fn check_rational_order(a: Rational, b: Rational) -> Check {
    let lhs = a.numer() * b.denom();
    let rhs = b.numer() * a.denom();
    prop_assert_eq!(a.cmp(&b), lhs.cmp(&rhs));
    prop_assert_eq!(a == b, lhs == rhs);
    Ok(())
}

fn solved(problem: &FlowProblem, mode: EquilibriumMode) -> Option<EquilibriumResult> {
    match solve_equilibrium(problem, mode) {
        Ok(r) => Some(r),
        Err(EquilibriumError::Singular { .. }) | Err(EquilibriumError::NoFeasibleSupport) => None,
        Err(e) => panic!("unexpected solver error: {e}"),
    }
}

/// The checker accepts solver output and rejects every one-coordinate
/// perturbation by ±1/1000.
pub fn check_verifier(problem: FlowProblem) -> Check {
    let eps = Rational::new(1, 1000).unwrap();
    for mode in [EquilibriumMode::EqualCost, EquilibriumMode::Nonnegative] {
        let Some(result) = solved(&problem, mode) else { continue };
        let report = verify_equilibrium(&problem, &result);
        prop_assert!(report.is_ok(), "{:?}", report.violations);
        for i in 0..result.flows.len() {
            for delta in [eps.clone(), -eps.clone()] {
                let mut bad = result.clone();
                bad.flows[i] = &bad.flows[i] + &delta;
                prop_assert!(!verify_equilibrium(&problem, &bad).is_ok(), "perturbed path {} accepted", i + 1);
            }
        }
    }
    Ok(())
}

pub fn check_conservation(problem: FlowProblem) -> Check {
    for mode in [EquilibriumMode::EqualCost, EquilibriumMode::Nonnegative] {
        if let Some(r) = solved(&problem, mode) {
            let total: Rational = r.flows.iter().sum();
            prop_assert_eq!(&total, problem.demand());
        }
    }
    Ok(())
}

/// Equal-cost flows follow a path permutation; nonnegative equilibria keep
/// their common cost.
pub fn check_permutation_symmetry(problem: FlowProblem, order: Vec<usize>) -> Check {
    let k = problem.path_count();
    let mut order: Vec<usize> = order.into_iter().filter(|&i| i < k).collect();
    for i in 0..k {
        if !order.contains(&i) {
            order.push(i);
        }
    }
    let permuted = problem.permuted(&order);
    if let Some(a) = solved(&problem, EquilibriumMode::EqualCost) {
        let b = solved(&permuted, EquilibriumMode::EqualCost).expect("permuted system is solvable too");
        for (new, &old) in order.iter().enumerate() {
            prop_assert_eq!(&b.flows[new], &a.flows[old]);
        }
        prop_assert_eq!(a.common_cost, b.common_cost);
    }
    let a = solved(&problem, EquilibriumMode::Nonnegative);
    let b = solved(&permuted, EquilibriumMode::Nonnegative);
    prop_assert_eq!(a.map(|r| r.common_cost), b.map(|r| r.common_cost));
    Ok(())
}

/// Nonnegative results are Wardrop equilibria and agree with the oracle.
pub fn check_nonnegative_against_oracle(problem: FlowProblem) -> Check {
    let oracle = support_enumeration_oracle(&problem);
    match solved(&problem, EquilibriumMode::Nonnegative) {
        Some(r) => {
            let costs = oracle_path_costs(&problem, &r.flows);
            prop_assert!(r.flows.iter().all(|x| !x.is_negative()));
            for (p, x) in r.flows.iter().enumerate() {
                if !x.is_zero() {
                    prop_assert_eq!(&costs[p], &r.common_cost);
                }
                prop_assert!(costs[p] >= r.common_cost);
            }
            prop_assert!(!oracle.is_empty());
            // Strictly increasing edge costs make the equilibrium cost unique.
            for o in &oracle {
                prop_assert_eq!(&o.cost, &r.common_cost);
            }
            prop_assert!(oracle.iter().any(|o| o.flows == r.flows));
        }
        None => prop_assert!(oracle.is_empty(), "oracle found {:?}", oracle),
    }
    Ok(())
}

pub fn check_instance_roundtrip(instance: Instance) -> Check {
    let doc = InstanceDocument::from_instance(&instance);
    let text = doc.to_json();
    let (back, back_doc) = parse_instance(&text).unwrap();
    prop_assert_eq!(&back, &instance);
    prop_assert_eq!(&back_doc, &doc);
    prop_assert_eq!(back_doc.to_json(), text);
    Ok(())
}
