//! Trading network instance types and validation.

use std::collections::HashSet;
use std::fmt;

use crate::exactmath::Rational;

pub type NodeId = usize;

/// Per-edge cost components for both agent classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct EdgeCost {
    pub transport_retailer: u64,
    pub corruption_retailer: u64,
    pub transport_consumer: u64,
    pub corruption_consumer: u64,
}

impl EdgeCost {
    pub fn new(
        transport_retailer: u64,
        corruption_retailer: u64,
        transport_consumer: u64,
        corruption_consumer: u64,
    ) -> Self {
        EdgeCost { transport_retailer, corruption_retailer, transport_consumer, corruption_consumer }
    }

    pub fn total_retailer(&self) -> u64 {
        self.transport_retailer + self.corruption_retailer
    }

    pub fn total_consumer(&self) -> u64 {
        self.transport_consumer + self.corruption_consumer
    }

    pub fn total(&self, role: CostRole) -> u64 {
        match role {
            CostRole::Retailer => self.total_retailer(),
            CostRole::Consumer => self.total_consumer(),
        }
    }
}

/// Which agent class pays the edge costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CostRole {
    Retailer,
    Consumer,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub cost: EdgeCost,
    /// Flow capacity. Stored, never consulted.
    pub capacity: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    pub node_count: usize,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Producer {
    pub node: NodeId,
    pub unit_price: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Consumer {
    pub node: NodeId,
    pub demand: u64,
}

impl Consumer {
    pub fn unit(node: NodeId) -> Self {
        Consumer { node, demand: 1 }
    }
}

/// Unchecked instance data, as read from a document or built by hand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawInstance {
    pub network: Network,
    pub producers: Vec<Producer>,
    pub consumers: Vec<Consumer>,
    pub candidate_sites: Vec<NodeId>,
    pub retailer_count: usize,
    pub markup_rate: Rational,
}

/// A validated instance. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    raw: RawInstance,
}

impl Instance {
    pub fn network(&self) -> &Network {
        &self.raw.network
    }

    pub fn producers(&self) -> &[Producer] {
        &self.raw.producers
    }

    pub fn consumers(&self) -> &[Consumer] {
        &self.raw.consumers
    }

    pub fn candidate_sites(&self) -> &[NodeId] {
        &self.raw.candidate_sites
    }

    pub fn retailer_count(&self) -> usize {
        self.raw.retailer_count
    }

    pub fn markup_rate(&self) -> &Rational {
        &self.raw.markup_rate
    }

    pub fn as_raw(&self) -> &RawInstance {
        &self.raw
    }

    pub fn into_raw(self) -> RawInstance {
        self.raw
    }

    pub fn total_demand(&self) -> u64 {
        self.raw.consumers.iter().map(|c| c.demand).sum()
    }
}

/// Ordered placement: `sites[j]` is the delivery point of retailer `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Situation {
    pub sites: Vec<NodeId>,
}

impl fmt::Display for Situation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sites.iter().map(|s| s.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidationError {
    #[error("network must have at least one node")]
    EmptyNetwork,
    #[error("{context}: node {node} out of range (node_count {node_count})")]
    NodeOutOfRange { context: &'static str, node: NodeId, node_count: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge {{{0},{1}}}")]
    DuplicateEdge(NodeId, NodeId),
    #[error("duplicate site {0}")]
    DuplicateSite(NodeId),
    #[error("candidate site {0} is colocated with a producer")]
    SiteColocatedWithProducer(NodeId),
    #[error("candidate site list is empty")]
    EmptyCandidateSet,
    #[error("retailer_count must be positive")]
    NoRetailers,
    #[error("retailer_count {retailers} exceeds the {sites} candidate sites")]
    TooManyRetailers { retailers: usize, sites: usize },
    #[error("consumer at node {0} has zero demand")]
    ZeroDemand(NodeId),
    #[error("markup rate {0} is negative")]
    NegativeMarkup(Rational),
}

/// All problems found in one validation pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationErrors(pub Vec<ValidationError>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msgs: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        f.write_str(&msgs.join("; "))
    }
}

impl std::error::Error for ValidationErrors {}

pub fn validate_instance(raw: RawInstance) -> Result<Instance, ValidationErrors> {
    let mut errors = Vec::new();
    let n = raw.network.node_count;
    if n == 0 {
        errors.push(ValidationError::EmptyNetwork);
    }
    let in_range = |context: &'static str, node: NodeId, errors: &mut Vec<ValidationError>| {
        if node >= n {
            errors.push(ValidationError::NodeOutOfRange { context, node, node_count: n });
            false
        } else {
            true
        }
    };

    let mut seen_edges = HashSet::new();
    for e in &raw.network.edges {
        let ok_u = in_range("edge", e.u, &mut errors);
        let ok_v = in_range("edge", e.v, &mut errors);
        if !(ok_u && ok_v) {
            continue;
        }
        if e.u == e.v {
            errors.push(ValidationError::SelfLoop(e.u));
        } else if !seen_edges.insert((e.u.min(e.v), e.u.max(e.v))) {
            errors.push(ValidationError::DuplicateEdge(e.u, e.v));
        }
    }

    for p in &raw.producers {
        in_range("producer", p.node, &mut errors);
    }
    for c in &raw.consumers {
        in_range("consumer", c.node, &mut errors);
        if c.demand == 0 {
            errors.push(ValidationError::ZeroDemand(c.node));
        }
    }

    let producer_nodes: HashSet<NodeId> = raw.producers.iter().map(|p| p.node).collect();
    let mut seen_sites = HashSet::new();
    for &s in &raw.candidate_sites {
        in_range("candidate site", s, &mut errors);
        if !seen_sites.insert(s) {
            errors.push(ValidationError::DuplicateSite(s));
        }
        if producer_nodes.contains(&s) {
            errors.push(ValidationError::SiteColocatedWithProducer(s));
        }
    }
    if raw.candidate_sites.is_empty() {
        errors.push(ValidationError::EmptyCandidateSet);
    }
    if raw.retailer_count == 0 {
        errors.push(ValidationError::NoRetailers);
    } else if raw.retailer_count > seen_sites.len() && !raw.candidate_sites.is_empty() {
        errors.push(ValidationError::TooManyRetailers { retailers: raw.retailer_count, sites: seen_sites.len() });
    }
    if raw.markup_rate.is_negative() {
        errors.push(ValidationError::NegativeMarkup(raw.markup_rate.clone()));
    }

    if errors.is_empty() {
        Ok(Instance { raw })
    } else {
        Err(ValidationErrors(errors))
    }
}

/// Symmetric one-hop weight table. `None` off the diagonal means no edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostView {
    n: usize,
    weights: Vec<Option<i64>>,
}

impl CostView {
    /// Empty view: only the zero diagonal is present.
    pub fn empty(n: usize) -> Self {
        let mut weights = vec![None; n * n];
        for v in 0..n {
            weights[v * n + v] = Some(0);
        }
        CostView { n, weights }
    }

    /// Builds a view from `(u, v, w)` triples. Parallel edges keep the cheaper
    /// weight. Panics if a node id is out of range.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId, i64)]) -> Self {
        let mut view = CostView::empty(n);
        for &(u, v, w) in edges {
            view.add_edge(u, v, w);
        }
        view
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId, w: i64) {
        assert!(u < self.n && v < self.n, "edge ({u},{v}) out of range for {} nodes", self.n);
        if u == v {
            return;
        }
        for (a, b) in [(u, v), (v, u)] {
            let slot = &mut self.weights[a * self.n + b];
            *slot = Some(slot.map_or(w, |old| old.min(w)));
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn weight(&self, u: NodeId, v: NodeId) -> Option<i64> {
        self.weights[u * self.n + v]
    }

    pub fn neighbors(&self, u: NodeId) -> impl Iterator<Item = (NodeId, i64)> + '_ {
        (0..self.n).filter(move |&v| v != u).filter_map(move |v| self.weight(u, v).map(|w| (v, w)))
    }
}

pub fn cost_view(network: &Network, role: CostRole) -> CostView {
    let mut view = CostView::empty(network.node_count);
    for e in &network.edges {
        let w = i64::try_from(e.cost.total(role)).expect("edge cost exceeds i64");
        view.add_edge(e.u, e.v, w);
    }
    view
}
