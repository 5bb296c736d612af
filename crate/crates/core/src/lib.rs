//! Link prediction for evolving networks.
//!
//! * [`graph`]: weighted simple graphs, edge-list IO, traversal and network statistics
//! * [`similarity`]: the weighted local indices WCN, WAA, WRA, WLP and the
//!   structure-dependent WSD index
//! * [`drift`]: position-drift dynamics that rewrite edge weights from
//!   neighbor attractiveness and interaction recency
//! * [`eval`]: splits, link deletion, AUC/precision and the experiment runner

pub mod drift;
pub mod error;
pub mod eval;
pub mod graph;
pub mod similarity;
pub mod util;

pub use error::{Error, Result};
