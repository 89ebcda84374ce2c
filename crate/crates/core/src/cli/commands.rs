//! Command pipelines behind the `tradenet` subcommands.

use thiserror::Error;

use super::documents::{DocumentError, ReplayDocument};
use super::report::{distance_cell, node_label, Report, Section};
use crate::apsp::{floyd_all_pairs, ApspError, CostMatrix};
use crate::compromise::{solve_income_matrix, CompromiseError, CompromiseResult, SelectionTie};
use crate::equilibrium::{
    equal_cost_system, path_cost_coefficients, solve_equilibrium, verify_equilibrium, EquilibriumError,
    EquilibriumMode, EquilibriumReport, EquilibriumResult, FlowProblem, PathCosts,
};
use crate::exactmath::{render_linear_form_over, LinearSystem};
use crate::market::{income_matrix_from_costs, CostConvention, IncomeMatrix, MarketError, MarketOptions, SiteCosts};
use crate::model::{cost_view, CostRole, Instance, NodeId};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Solver(_) => 2,
        }
    }
}

impl From<DocumentError> for CliError {
    fn from(e: DocumentError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<MarketError> for CliError {
    fn from(e: MarketError) -> Self {
        match e {
            MarketError::DimensionMismatch { .. } => CliError::Input(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

impl From<CompromiseError> for CliError {
    fn from(e: CompromiseError) -> Self {
        CliError::Solver(e.to_string())
    }
}

impl From<ApspError> for CliError {
    fn from(e: ApspError) -> Self {
        CliError::Solver(e.to_string())
    }
}

impl From<EquilibriumError> for CliError {
    fn from(e: EquilibriumError) -> Self {
        CliError::Solver(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SituationTie {
    #[default]
    First,
    LowestSites,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CompromiseOptions {
    pub market: MarketOptions,
    pub display: CostConvention,
    pub tie: SituationTie,
}

fn convention_name(c: CostConvention) -> &'static str {
    match c {
        CostConvention::LPlusD => "l-plus-d",
        CostConvention::D => "d",
    }
}

/// One disagreeing entry between a supplied table and the recomputed one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffEntry {
    pub table: &'static str,
    pub row: NodeId,
    pub col: NodeId,
    pub replay: Option<i64>,
    pub recomputed: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableDiff {
    pub table: &'static str,
    pub convention: Option<CostConvention>,
    pub compared: usize,
    pub mismatches: Vec<DiffEntry>,
}

fn diff_table(
    table: &'static str,
    convention: Option<CostConvention>,
    rows: &[NodeId],
    cols: &[NodeId],
    replay: &[Vec<Option<i64>>],
    recomputed: &[Vec<Option<i64>>],
) -> TableDiff {
    let mut mismatches = Vec::new();
    let mut compared = 0;
    for (i, (a, b)) in replay.iter().zip(recomputed).enumerate() {
        for (j, (x, y)) in a.iter().zip(b).enumerate() {
            compared += 1;
            if x != y {
                mismatches.push(DiffEntry { table, row: rows[i], col: cols[j], replay: *x, recomputed: *y });
            }
        }
    }
    TableDiff { table, convention, compared, mismatches }
}

/// Retailer and consumer all-pairs matrices for an instance.
pub fn recompute_matrices(instance: &Instance) -> Result<(CostMatrix, CostMatrix), ApspError> {
    let retailer = floyd_all_pairs(&cost_view(instance.network(), CostRole::Retailer))?;
    let consumer = floyd_all_pairs(&cost_view(instance.network(), CostRole::Consumer))?;
    Ok((retailer, consumer))
}

#[derive(Debug, Clone)]
pub struct CompromiseRun {
    pub instance: Instance,
    /// Tables the pipeline ran on (replayed where supplied).
    pub costs: SiteCosts,
    pub recomputed: SiteCosts,
    pub incomes: IncomeMatrix,
    pub result: CompromiseResult,
    pub diffs: Vec<TableDiff>,
    pub options: CompromiseOptions,
    pub replayed: bool,
}

pub fn compromise_pipeline(
    instance: &Instance,
    replay: Option<&ReplayDocument>,
    options: CompromiseOptions,
) -> Result<CompromiseRun, CliError> {
    let (retailer, consumer) = recompute_matrices(instance)?;
    let recomputed = SiteCosts::from_matrices(instance, &retailer, &consumer);
    let mut costs = recomputed.clone();
    let mut diffs = Vec::new();
    let sites = instance.candidate_sites();

    if let Some(replay) = replay {
        replay.check_dimensions(instance)?;
        if let Some(t) = &replay.producer_site {
            let convention: CostConvention = t.convention.into();
            let replayed = SiteCosts::from_tables(instance, t.values.clone(), convention, costs.consumer_dist.clone())?;
            costs.producer_base = replayed.producer_base;
            let nodes: Vec<NodeId> = instance.producers().iter().map(|p| p.node).collect();
            diffs.push(diff_table(
                "producer_site",
                Some(convention),
                &nodes,
                sites,
                &t.values,
                &recomputed.producer_table(instance, convention),
            ));
        }
        if let Some(t) = &replay.consumer_site {
            costs.consumer_dist = t.values.clone();
            let nodes: Vec<NodeId> = instance.consumers().iter().map(|c| c.node).collect();
            diffs.push(diff_table("consumer_site", None, &nodes, sites, &t.values, &recomputed.consumer_dist));
        }
    }

    let incomes = income_matrix_from_costs(instance, &costs, options.market)?;
    let keys: Vec<Vec<NodeId>> = incomes.situations.iter().map(|s| s.sites.clone()).collect();
    let tie = match options.tie {
        SituationTie::First => SelectionTie::FirstInOrder,
        SituationTie::LowestSites => SelectionTie::LowestKey(&keys),
    };
    let result = solve_income_matrix(&incomes, tie)?;
    Ok(CompromiseRun {
        instance: instance.clone(),
        costs,
        recomputed,
        incomes,
        result,
        diffs,
        options,
        replayed: replay.is_some(),
    })
}

fn site_header(first: &str, sites: &[NodeId]) -> Vec<String> {
    std::iter::once(first.to_string()).chain(sites.iter().map(|&s| node_label(s))).collect()
}

fn retailer_header(first: &str, n: usize) -> Vec<String> {
    std::iter::once(first.to_string()).chain((1..=n).map(|j| format!("R_{j}"))).collect()
}

impl CompromiseRun {
    pub fn report(&self) -> Report {
        let inst = &self.instance;
        let sites = inst.candidate_sites();
        let n = inst.retailer_count();
        let mut sections = Vec::new();

        sections.push(
            Section::new("settings", vec!["key".into(), "value".into()])
                .row(vec!["markup".into(), inst.markup_rate().to_string()])
                .row(vec!["display".into(), convention_name(self.options.display).into()])
                .row(vec![
                    "payoff".into(),
                    match self.options.market.payoff {
                        crate::market::PayoffMode::Revenue => "revenue".into(),
                        crate::market::PayoffMode::Units => "units".into(),
                    },
                ])
                .row(vec!["distances".into(), if self.replayed { "replay".into() } else { "recomputed".into() }]),
        );

        let mut producer_site = Section::new("producer_site_costs", site_header("producer", sites));
        for (p, row) in inst.producers().iter().zip(self.costs.producer_table(inst, self.options.display)) {
            producer_site.push(std::iter::once(node_label(p.node)).chain(row.into_iter().map(distance_cell)).collect());
        }
        sections.push(producer_site);

        let mut prices = Section::new("prices", site_header("producer", sites));
        for (p, row) in inst.producers().iter().zip(self.costs.price_table(inst.markup_rate())) {
            prices.push(
                std::iter::once(node_label(p.node))
                    .chain(row.into_iter().map(|v| v.map_or_else(|| "-".into(), |v| v.to_string())))
                    .collect(),
            );
        }
        sections.push(prices);

        let mut site_prices =
            Section::new("site_prices", vec!["site".into(), "producer".into(), "base_cost".into(), "price".into()]);
        for sp in &self.incomes.site_prices {
            site_prices.push(vec![
                node_label(sp.site),
                node_label(inst.producers()[sp.producer].node),
                sp.base_cost.to_string(),
                sp.price.to_string(),
            ]);
        }
        sections.push(site_prices);

        let mut consumer_site = Section::new("consumer_site_costs", site_header("consumer", sites));
        for (c, row) in inst.consumers().iter().zip(&self.costs.consumer_dist) {
            consumer_site
                .push(std::iter::once(node_label(c.node)).chain(row.iter().map(|&d| distance_cell(d))).collect());
        }
        sections.push(consumer_site);

        let situation_labels: Vec<String> = self.incomes.situations.iter().map(ToString::to_string).collect();
        let mut incomes = Section::new(
            "incomes",
            std::iter::once("retailer".to_string()).chain(situation_labels.iter().cloned()).collect(),
        );
        for j in 0..n {
            incomes.push(
                std::iter::once((j + 1).to_string())
                    .chain(self.incomes.incomes.iter().map(|row| row[j].to_string()))
                    .collect(),
            );
        }
        sections.push(incomes);

        sections.push(
            Section::new("ideal", retailer_header("vector", n)).row(
                std::iter::once("M".to_string()).chain(self.result.ideal.iter().map(ToString::to_string)).collect(),
            ),
        );

        let mut residuals = Section::new("residuals", retailer_header("situation", n));
        for (label, row) in situation_labels.iter().zip(&self.result.residuals) {
            residuals.push(std::iter::once(label.clone()).chain(row.iter().map(ToString::to_string)).collect());
        }
        sections.push(residuals);

        let mut row_max = Section::new("row_max", vec!["situation".into(), "delta".into()]);
        for (label, d) in situation_labels.iter().zip(&self.result.row_max) {
            row_max.push(vec![label.clone(), d.to_string()]);
        }
        sections.push(row_max);

        let sel = self.result.selected;
        let placement: Vec<String> = self.incomes.situations[sel].sites.iter().map(|&s| node_label(s)).collect();
        let row: Vec<String> = self.result.residuals[sel].iter().map(ToString::to_string).collect();
        sections.push(
            Section::new(
                "selection",
                vec!["index".into(), "situation".into(), "placement".into(), "value".into(), "residual_row".into()],
            )
            .row(vec![
                (sel + 1).to_string(),
                situation_labels[sel].clone(),
                placement.join(" "),
                self.result.value.to_string(),
                format!("({})", row.join(",")),
            ]),
        );

        if !self.incomes.unserved.is_empty() {
            let mut unserved = Section::new("unserved", vec!["situation".into(), "consumer".into()]);
            for u in &self.incomes.unserved {
                unserved.push(vec![situation_labels[u.situation].clone(), node_label(u.consumer)]);
            }
            sections.push(unserved);
        }

        if !self.diffs.is_empty() {
            let mut summary = Section::new(
                "distance_diff_summary",
                vec!["table".into(), "convention".into(), "compared".into(), "mismatches".into()],
            );
            let mut entries = Section::new(
                "distance_diff",
                vec!["table".into(), "row".into(), "col".into(), "replay".into(), "recomputed".into()],
            );
            for d in &self.diffs {
                summary.push(vec![
                    d.table.into(),
                    d.convention.map_or("-", convention_name).into(),
                    d.compared.to_string(),
                    d.mismatches.len().to_string(),
                ]);
                for m in &d.mismatches {
                    entries.push(vec![
                        m.table.into(),
                        node_label(m.row),
                        node_label(m.col),
                        distance_cell(m.replay),
                        distance_cell(m.recomputed),
                    ]);
                }
            }
            sections.push(summary);
            sections.push(entries);
        }

        Report { sections }
    }
}

pub fn run_compromise(
    instance: &Instance,
    replay: Option<&ReplayDocument>,
    options: CompromiseOptions,
) -> Result<Report, CliError> {
    Ok(compromise_pipeline(instance, replay, options)?.report())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Retailer,
    Consumer,
}

/// Producers × sites (retailer metric) or consumers × sites (consumer metric).
pub fn run_distances(instance: &Instance, metric: Metric, display: CostConvention) -> Result<Report, CliError> {
    let (retailer, consumer) = recompute_matrices(instance)?;
    let costs = SiteCosts::from_matrices(instance, &retailer, &consumer);
    let sites = instance.candidate_sites();
    let mut section;
    match metric {
        Metric::Retailer => {
            section = Section::new("producer_site_costs", site_header("producer", sites));
            for (p, row) in instance.producers().iter().zip(costs.producer_table(instance, display)) {
                section.push(std::iter::once(node_label(p.node)).chain(row.into_iter().map(distance_cell)).collect());
            }
        }
        Metric::Consumer => {
            section = Section::new("consumer_site_costs", site_header("consumer", sites));
            for (c, row) in instance.consumers().iter().zip(&costs.consumer_dist) {
                section
                    .push(std::iter::once(node_label(c.node)).chain(row.iter().map(|&d| distance_cell(d))).collect());
            }
        }
    }
    let settings = Section::new("settings", vec!["key".into(), "value".into()])
        .row(vec![
            "metric".into(),
            match metric {
                Metric::Retailer => "retailer".into(),
                Metric::Consumer => "consumer".into(),
            },
        ])
        .row(vec!["display".into(), convention_name(display).into()]);
    Ok(Report { sections: vec![settings, section] })
}

#[derive(Debug, Clone)]
pub struct EquilibriumRun {
    pub problem: FlowProblem,
    pub costs: PathCosts,
    pub system: LinearSystem,
    pub result: EquilibriumResult,
    pub verification: EquilibriumReport,
}

pub fn equilibrium_pipeline(problem: &FlowProblem, mode: EquilibriumMode) -> Result<EquilibriumRun, CliError> {
    let costs = path_cost_coefficients(problem);
    let result = solve_equilibrium(problem, mode)?;
    let system = equal_cost_system(&costs, &result.support, problem.demand());
    let verification = verify_equilibrium(problem, &result);
    Ok(EquilibriumRun { problem: problem.clone(), costs, system, result, verification })
}

impl EquilibriumRun {
    pub fn report(&self) -> Report {
        let mut sections = Vec::new();
        sections.push(
            Section::new("settings", vec!["key".into(), "value".into()])
                .row(vec!["mode".into(), self.result.mode.to_string()])
                .row(vec!["demand".into(), self.problem.demand().to_string()]),
        );

        let mut forms = Section::new("path_costs", vec!["path".into(), "edges".into(), "cost".into()]);
        for (i, path) in self.problem.paths().iter().enumerate() {
            let edges: Vec<String> = path.iter().map(ToString::to_string).collect();
            forms.push(vec![(i + 1).to_string(), edges.join("-"), self.costs.render(i)]);
        }
        sections.push(forms);

        let vars: Vec<usize> = self.result.support.iter().map(|p| p + 1).collect();
        let mut system = Section::new("system", vec!["equation".into()]);
        for (row, rhs) in self.system.coefficients().iter().zip(self.system.rhs()) {
            system.push(vec![format!("{} = {}", render_linear_form_over(row, &vars, None), rhs)]);
        }
        sections.push(system);

        let mut flows = Section::new("flows", vec!["path".into(), "flow".into(), "mixed".into()]);
        for (i, x) in self.result.flows.iter().enumerate() {
            flows.push(vec![(i + 1).to_string(), x.to_string(), x.to_mixed_string()]);
        }
        sections.push(flows);

        sections.push(
            Section::new("common_cost", vec!["value".into(), "mixed".into()])
                .row(vec![self.result.common_cost.to_string(), self.result.common_cost.to_mixed_string()]),
        );

        let mut check = Section::new("verification", vec!["path".into(), "cost".into(), "in_support".into()]);
        for (i, c) in self.verification.path_costs.iter().enumerate() {
            check.push(vec![
                (i + 1).to_string(),
                c.to_string(),
                if self.result.support.contains(&i) { "yes".into() } else { "no".into() },
            ]);
        }
        sections.push(check);

        let mut status = Section::new("verification_status", vec!["check".into(), "result".into()]);
        status.push(vec!["total_flow".into(), self.verification.total_flow.to_string()]);
        if self.verification.is_ok() {
            status.push(vec!["status".into(), "ok".into()]);
        } else {
            status.push(vec!["status".into(), "violated".into()]);
            for v in &self.verification.violations {
                status.push(vec!["violation".into(), v.to_string()]);
            }
        }
        sections.push(status);

        Report { sections }
    }
}

pub fn run_equilibrium(problem: &FlowProblem, mode: EquilibriumMode) -> Result<Report, CliError> {
    Ok(equilibrium_pipeline(problem, mode)?.report())
}
