//! Weighted consensus division of graphical cakes.
//!
//! A cake is a metric graph: every edge is an interval, glued to other
//! edges at vertices. Given two agents with piecewise-constant value
//! densities and an entitlement split `(t, 1 - t)`, the divider produces a
//! division both agents agree is exact, while keeping the number of
//! connected pieces per agent within class-specific bounds (1 on circles, 2
//! on intervals and stars, `h + 1` on trees of height `h`, `r + 2` on
//! connected graphs of radius `r`, and `s + 2r + 4` in total on graphs with
//! `s` components).
//!
//! The pipeline: classify the cake, reduce non-tree graphs to trees by
//! re-hanging cycle edges, trace the result onto the unit circle, run a
//! moving-knife sweep there, and push the winning cut back through the
//! reduction onto the original cake.

pub mod cake;
pub mod consensus;
pub mod divider;
pub mod error;
pub mod oracle;
pub mod reduction;
pub mod tracing;
pub mod valuation;

pub use cake::{
    canonicalize_piece, count_agent_pieces, count_connected_pieces, validate_division, CakeClass,
    Division, Edge, EdgeId, GraphCake, GraphMetrics, PointOnCake, SubInterval, VertexId,
};
pub use consensus::{
    build_knife_path, kappa, objective, solve_consensus, CircleValuation, CutPair, KnifePath,
    PathSegment, SegmentKind, SolverConfig,
};
pub use divider::{
    component_ownership, divide, piece_bound, ComponentOwnership, DivisionReport, TheoremCase,
};
pub use error::{Error, Result};
pub use oracle::{
    best_match, brute_force_two_cut, generate_instance, oracle_threshold, scan, Instance,
    InstanceSpec, OracleMatch, ScanPoint,
};
pub use reduction::{
    edge_spanning_forest, edge_spanning_tree, EdgeSpanningForest, EdgeSpanningTree,
};
pub use tracing::{Direction, Side, Tracing, Traversal};
pub use valuation::{consensus_check, residuals, DensitySegment, Entitlement, Valuation};
