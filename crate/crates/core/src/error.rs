//! Error type shared across the crate.
//!
//! Every validation failure names the offending entity (edge, vertex,
//! segment) so callers can surface actionable messages without having to
//! re-inspect the input themselves.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("cake has no edges")]
    EmptyCake,

    #[error("duplicate vertex name {0:?}")]
    DuplicateVertex(String),

    #[error("duplicate edge name {0:?}")]
    DuplicateEdge(String),

    #[error("edge {edge:?} references unknown vertex {vertex:?}")]
    UnknownVertex { edge: String, vertex: String },

    #[error("edge {edge:?} has non-positive length {length}")]
    NonPositiveLength { edge: String, length: f64 },

    #[error("vertex {0:?} has no incident edges")]
    IsolatedVertex(String),

    #[error("adjacency list for vertex {vertex:?} is not a permutation of its incident edges: {reason}")]
    BadAdjacency { vertex: String, reason: String },

    #[error("unknown vertex {0:?}")]
    NoSuchVertex(String),

    #[error("unknown edge {0:?}")]
    NoSuchEdge(String),

    #[error("valuation segment [{lo}, {hi}] on edge {edge:?} lies outside [0, {length}]")]
    SegmentOutOfBounds {
        edge: String,
        lo: f64,
        hi: f64,
        length: f64,
    },

    #[error("valuation segments on edge {edge:?} overlap near offset {at}")]
    SegmentOverlap { edge: String, at: f64 },

    #[error("valuation segment on edge {edge:?} has negative density {density}")]
    NegativeDensity { edge: String, density: f64 },

    #[error("valuation has zero total mass; cannot normalize")]
    ZeroTotalMass,

    #[error("valuation is not normalized: total mass {total} differs from 1")]
    NotNormalized { total: f64 },

    #[error("entitlement t = {0} outside [0, 1]")]
    EntitlementRange(f64),

    #[error("subinterval [{lo}, {hi}] on edge {edge:?} is invalid (edge length {length})")]
    InvalidSubInterval {
        edge: String,
        lo: f64,
        hi: f64,
        length: f64,
    },

    #[error("division leaves edge {edge:?} uncovered near offset {at} (gap of length {gap:.3e})")]
    DivisionGap { edge: String, at: f64, gap: f64 },

    #[error("division pieces overlap on edge {edge:?} near offset {at} (overlap of length {overlap:.3e})")]
    DivisionOverlap { edge: String, at: f64, overlap: f64 },

    #[error("component containing vertex {0:?} is not a tree")]
    NotATree(String),

    #[error("cake is not a single circle (expected exactly one self-loop edge)")]
    NotACircle,

    #[error("cake is not a path")]
    NotAPath,

    #[error("cake is not connected ({components} components)")]
    NotConnected { components: usize },

    #[error("tracing does not cover the cake: {reason}")]
    BadTracing { reason: String },

    #[error("circle valuation is malformed: {0}")]
    BadCircleValuation(String),

    #[error(
        "solver exhausted grid resolution {grid} without locating a consensus cut \
         (best residuals: A {residual_a:.3e}, B {residual_b:.3e})"
    )]
    ResolutionExhausted {
        grid: usize,
        /// Best candidate cut found, as (c, kappa) on the unit circle.
        best: (f64, f64),
        residual_a: f64,
        residual_b: f64,
    },

    #[error("instance generator cannot satisfy the request: {0}")]
    UnsatisfiableInstance(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
