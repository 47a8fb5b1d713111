//! Minimum (weighted, inexact) flow decomposition on DAGs, with strict and
//! adjustable robust variants.

pub mod adjustable;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod instances;
pub mod io;
pub mod mcf;
pub mod milp;
pub mod poly;
pub mod robust;
pub mod scenario_gen;

pub use error::{Error, Result};
pub use graph::{
    EdgeBounds, EdgeId, FlowAssignment, Graph, InexactBounds, Path, Scenario, UpperBound,
    WeightedDecomposition,
};
