//! Delivery-point placement on trading networks with separate retailer and
//! consumer edge costs, chosen by the compromise (minimax-regret) rule, plus
//! exact path-flow equilibria for subnetworks with affine congestion costs.
//!
//! All arithmetic is exact: distances are integers, prices, incomes and
//! flows are arbitrary-precision rationals.

pub mod apsp;
pub mod cli;
pub mod compromise;
pub mod equilibrium;
pub mod exactmath;
pub mod market;
pub mod model;

pub use exactmath::Rational;
pub use model::{Instance, NodeId};
