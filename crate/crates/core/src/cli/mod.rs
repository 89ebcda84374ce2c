//! File formats, reports and command pipelines for the `tradenet` binary.

mod commands;
mod documents;
mod report;

pub use commands::{
    compromise_pipeline, equilibrium_pipeline, recompute_matrices, run_compromise, run_distances, run_equilibrium,
    CliError, CompromiseOptions, CompromiseRun, DiffEntry, EquilibriumRun, Metric, SituationTie, TableDiff,
};
pub use documents::{
    detect_kind, parse_flow_problem, parse_instance, ConsumerRecord, ConsumerSiteTable, ConventionSetting,
    DocumentError, DocumentKind, EdgeRecord, FlowEdgeRecord, FlowProblemDocument, InstanceDocument, PayoffSetting,
    ProducerRecord, ProducerSiteTable, ReplayDocument,
};
pub use report::{distance_cell, node_label, OutputFormat, Report, Section};
