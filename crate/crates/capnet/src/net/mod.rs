//! Exact electrical-network computations: spanning-tree polynomials,
//! Kirchhoff voltage, discrete capacity, the dual current problem, and
//! graph simplification.

pub mod blocks;
pub mod file;
pub mod graph;
pub mod solve;
pub mod tree;

pub use blocks::{
    biconnected_components, deletion_bounds, prune_irrelevant_blocks, BlockCutTree,
    DeletionBounds, PrunedNetwork,
};
pub use graph::{
    graph_laplacian, weighted_laplacian, AdmittanceVector, Edge, GraphError, LogAdmittance,
    OrientedGraph,
};
pub use solve::{
    capacity, capacity_log, current_divergence, dual_current, kirchhoff_voltage, NetworkSolution,
    SolveError,
};
pub use tree::{
    capacity_exact, tree_polynomial_det, tree_polynomial_enum, tree_polynomial_enum_int,
    tree_polynomial_enum_rational, ENUM_VERTEX_BOUND,
};
