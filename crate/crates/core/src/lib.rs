//! Coded caching for two-dimensional caching-aided ultra-dense networks.
//!
//! Users on a cyclic `K1 x K2` grid of cache nodes are classified by which
//! nodes they can reach ([`geometry`]). Delivery runs the Maddah-Ali/Niesen
//! scheme once per user sub-type ([`scheme_a`]), or compresses each
//! sub-type's signals with an MDS code that exploits what users can rebuild
//! from their caches ([`scheme_b`]). [`analysis`] evaluates the closed-form
//! loads the simulations are checked against.

pub mod analysis;
pub mod combinatorics;
pub mod demand;
pub mod error;
pub mod geometry;
pub mod gf;
pub mod mds;
pub mod mn;
pub mod report;
pub mod scheme_a;
pub mod scheme_b;

pub use error::{Error, Result};
pub use geometry::{GridConfig, NodeId, Regime, UserClass, UserSpec, UserType};
pub use demand::DemandMap;
pub use report::{LoadReport, Scheme};
