//! JSON document schemas for instances, replay tables and flow problems.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equilibrium::{EdgeId, FlowEdge, FlowProblem, FlowProblemError};
use crate::exactmath::Rational;
use crate::market::{CostConvention, PayoffMode};
use crate::model::{
    validate_instance, Consumer, Edge, EdgeCost, Instance, Network, NodeId, Producer, RawInstance, ValidationErrors,
};

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("schema violation at line {line}, column {column}: {message}")]
    Schema { line: usize, column: usize, message: String },
    #[error("schema violation: {0}")]
    Field(String),
    #[error("invalid instance: {0}")]
    Instance(#[from] ValidationErrors),
    #[error("invalid flow problem: {0}")]
    FlowProblem(#[from] FlowProblemError),
}

impl From<serde_json::Error> for DocumentError {
    fn from(e: serde_json::Error) -> Self {
        let (line, column, message) = (e.line(), e.column(), e.to_string());
        match e.classify() {
            serde_json::error::Category::Data => DocumentError::Schema { line, column, message },
            _ => DocumentError::Syntax { line, column, message },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PayoffSetting {
    #[default]
    Revenue,
    Units,
}

impl From<PayoffSetting> for PayoffMode {
    fn from(p: PayoffSetting) -> Self {
        match p {
            PayoffSetting::Revenue => PayoffMode::Revenue,
            PayoffSetting::Units => PayoffMode::Units,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ConventionSetting {
    #[default]
    #[serde(rename = "l-plus-d")]
    LPlusD,
    #[serde(rename = "d")]
    D,
}

impl From<ConventionSetting> for CostConvention {
    fn from(c: ConventionSetting) -> Self {
        match c {
            ConventionSetting::LPlusD => CostConvention::LPlusD,
            ConventionSetting::D => CostConvention::D,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub u: NodeId,
    pub v: NodeId,
    pub ca_transport: u64,
    pub ca_corruption: u64,
    pub cb_transport: u64,
    pub cb_corruption: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProducerRecord {
    pub node: NodeId,
    pub unit_price: u64,
}

fn unit_demand() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsumerRecord {
    pub node: NodeId,
    #[serde(default = "unit_demand")]
    pub demand: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
    pub node_count: usize,
    pub edges: Vec<EdgeRecord>,
    pub producers: Vec<ProducerRecord>,
    pub consumers: Vec<ConsumerRecord>,
    pub candidate_sites: Vec<NodeId>,
    pub retailer_count: usize,
    pub markup: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payoff_mode: Option<PayoffSetting>,
}

impl InstanceDocument {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        let doc: InstanceDocument = serde_json::from_str(text)?;
        if doc.markup.is_negative() {
            return Err(DocumentError::Field(format!("markup must be non-negative, got {}", doc.markup)));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn to_raw(&self) -> RawInstance {
        RawInstance {
            network: Network {
                node_count: self.node_count,
                edges: self
                    .edges
                    .iter()
                    .map(|e| Edge {
                        u: e.u,
                        v: e.v,
                        cost: EdgeCost::new(e.ca_transport, e.ca_corruption, e.cb_transport, e.cb_corruption),
                        capacity: e.capacity,
                    })
                    .collect(),
            },
            producers: self.producers.iter().map(|p| Producer { node: p.node, unit_price: p.unit_price }).collect(),
            consumers: self.consumers.iter().map(|c| Consumer { node: c.node, demand: c.demand }).collect(),
            candidate_sites: self.candidate_sites.clone(),
            retailer_count: self.retailer_count,
            markup_rate: self.markup.clone(),
        }
    }

    pub fn from_instance(instance: &Instance) -> Self {
        let raw = instance.as_raw();
        InstanceDocument {
            comment: None,
            node_count: raw.network.node_count,
            edges: raw
                .network
                .edges
                .iter()
                .map(|e| EdgeRecord {
                    u: e.u,
                    v: e.v,
                    ca_transport: e.cost.transport_retailer,
                    ca_corruption: e.cost.corruption_retailer,
                    cb_transport: e.cost.transport_consumer,
                    cb_corruption: e.cost.corruption_consumer,
                    capacity: e.capacity,
                })
                .collect(),
            producers: raw
                .producers
                .iter()
                .map(|p| ProducerRecord { node: p.node, unit_price: p.unit_price })
                .collect(),
            consumers: raw.consumers.iter().map(|c| ConsumerRecord { node: c.node, demand: c.demand }).collect(),
            candidate_sites: raw.candidate_sites.clone(),
            retailer_count: raw.retailer_count,
            markup: raw.markup_rate.clone(),
            payoff_mode: None,
        }
    }
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<(Instance, InstanceDocument), DocumentError> {
    let doc = InstanceDocument::from_json(text)?;
    let instance = validate_instance(doc.to_raw())?;
    Ok((instance, doc))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProducerSiteTable {
    #[serde(default)]
    pub convention: ConventionSetting,
    pub values: Vec<Vec<Option<i64>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsumerSiteTable {
    pub values: Vec<Vec<Option<i64>>>,
}

/// Externally supplied distance tables that replace recomputed ones.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplayDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub producer_site: Option<ProducerSiteTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consumer_site: Option<ConsumerSiteTable>,
}

impl ReplayDocument {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    /// Checks table shapes against an instance (producers/consumers × sites).
    pub fn check_dimensions(&self, instance: &Instance) -> Result<(), DocumentError> {
        let cols = instance.candidate_sites().len();
        let check = |name: &str, values: &[Vec<Option<i64>>], rows: usize| {
            if values.len() != rows || values.iter().any(|r| r.len() != cols) {
                Err(DocumentError::Field(format!("{name} must be {rows}x{cols} (rows × candidate sites)")))
            } else {
                Ok(())
            }
        };
        if let Some(t) = &self.producer_site {
            check("producer_site", &t.values, instance.producers().len())?;
        }
        if let Some(t) = &self.consumer_site {
            check("consumer_site", &t.values, instance.consumers().len())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowEdgeRecord {
    pub id: EdgeId,
    pub fixed: Rational,
    pub slope: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowProblemDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
    pub edges: Vec<FlowEdgeRecord>,
    pub paths: Vec<Vec<EdgeId>>,
    pub demand: Rational,
}

impl FlowProblemDocument {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn to_problem(&self) -> Result<FlowProblem, DocumentError> {
        let edges =
            self.edges.iter().map(|e| FlowEdge { id: e.id, fixed: e.fixed.clone(), slope: e.slope.clone() }).collect();
        Ok(FlowProblem::new(edges, self.paths.clone(), self.demand.clone())?)
    }

    pub fn from_problem(problem: &FlowProblem) -> Self {
        FlowProblemDocument {
            comment: None,
            edges: problem
                .edges()
                .iter()
                .map(|e| FlowEdgeRecord { id: e.id, fixed: e.fixed.clone(), slope: e.slope.clone() })
                .collect(),
            paths: problem.paths().to_vec(),
            demand: problem.demand().clone(),
        }
    }
}

pub fn parse_flow_problem(text: &str) -> Result<FlowProblem, DocumentError> {
    FlowProblemDocument::from_json(text)?.to_problem()
}

/// Kind of document, guessed from its top-level keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DocumentKind {
    Instance,
    FlowProblem,
    Replay,
}

pub fn detect_kind(text: &str) -> Result<DocumentKind, DocumentError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let obj = value.as_object().ok_or_else(|| DocumentError::Field("top level must be an object".into()))?;
    if obj.contains_key("node_count") {
        Ok(DocumentKind::Instance)
    } else if obj.contains_key("paths") {
        Ok(DocumentKind::FlowProblem)
    } else if obj.contains_key("producer_site") || obj.contains_key("consumer_site") || obj.is_empty() {
        Ok(DocumentKind::Replay)
    } else {
        Err(DocumentError::Field(
            "unrecognized document: expected node_count (instance), paths (flow problem) or producer_site/consumer_site (replay)".into(),
        ))
    }
}
