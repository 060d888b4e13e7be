//! The end-to-end divider: classify, reduce, trace, sweep, push back.
//!
//! Piece-count guarantees by cake class (entitlements are arbitrary):
//!
//! | class           | bound                              |
//! |-----------------|------------------------------------|
//! | circle          | 1 piece per agent                  |
//! | interval, star  | 2 pieces per agent                 |
//! | tree            | `h + 1` per agent (center height)  |
//! | connected graph | `r + 2` per agent (radius)         |
//! | general graph   | `s + 2r + 4` total (`s` components)|
//!
//! Intervals are handled as circles without identifying the endpoints: the
//! sweep may wrap past the end of the path, in which case one agent's piece
//! arrives in two parts. Connected graphs go through the edge-spanning tree
//! (height at most `r + 1`); disconnected cakes concatenate their re-hung
//! components into one forest tracing, and the two cut points then land in
//! at most two components, leaving the rest whole.

use crate::cake::{
    count_agent_pieces, count_connected_pieces, CakeClass, Division, GraphCake, GraphMetrics,
    PointOnCake, SubInterval,
};
use crate::consensus::{solve_consensus, CutPair, SolverConfig};
use crate::error::Result;
use crate::reduction::{edge_spanning_forest, EdgeSpanningForest};
use crate::tracing::{Side, Tracing};
use crate::valuation::{residuals, Entitlement, Valuation};

/// Which case of the star / general-graph analysis a division landed in,
/// judged by where the two cut points fell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremCase {
    /// No cuts (degenerate entitlement) or a class without case analysis.
    None,
    /// Star: both cuts on the same arm.
    StarSameArm,
    /// Star: cuts on two different arms.
    StarTwoArms,
    /// General graph: both cuts in the same component.
    GeneralSameComponent,
    /// General graph: cuts in two different components.
    GeneralTwoComponents,
}

impl TheoremCase {
    pub fn as_str(self) -> &'static str {
        match self {
            TheoremCase::None => "none",
            TheoremCase::StarSameArm => "star-i",
            TheoremCase::StarTwoArms => "star-ii",
            TheoremCase::GeneralSameComponent => "general-i",
            TheoremCase::GeneralTwoComponents => "general-ii",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "none" => TheoremCase::None,
            "star-i" => TheoremCase::StarSameArm,
            "star-ii" => TheoremCase::StarTwoArms,
            "general-i" => TheoremCase::GeneralSameComponent,
            "general-ii" => TheoremCase::GeneralTwoComponents,
            _ => return None,
        })
    }
}

/// Everything `divide` establishes about one instance.
#[derive(Debug, Clone)]
pub struct DivisionReport {
    pub division: Division,
    /// The winning cut on the traced circle.
    pub cut: CutPair,
    /// Images of the cut points on the cake: empty for degenerate
    /// entitlements, otherwise `[c, kappa]`.
    pub cuts: Vec<PointOnCake>,
    pub class: CakeClass,
    pub metrics: GraphMetrics,
    pub pieces_a: usize,
    pub pieces_b: usize,
    /// Piece bound for this class: per agent, except for general graphs
    /// where it bounds the two agents' total.
    pub bound: usize,
    pub theorem_case: TheoremCase,
    /// `|v_A(piece A) - t|`, re-integrated on the original cake.
    pub residual_a: f64,
    /// `|v_B(piece A) - t|`, re-integrated on the original cake.
    pub residual_b: f64,
    pub t: f64,
    pub tol: f64,
}

impl DivisionReport {
    /// Checks the class bound (per agent, or total for general graphs).
    pub fn bound_holds(&self) -> bool {
        match self.class {
            CakeClass::GeneralGraph => self.pieces_a + self.pieces_b <= self.bound,
            _ => self.pieces_a <= self.bound && self.pieces_b <= self.bound,
        }
    }
}

/// Routes a cake to its tracing: direct for paths, cycles, stars and
/// trees; through an edge-spanning forest for everything else.
pub(crate) fn route(cake: &GraphCake) -> Result<(Option<EdgeSpanningForest>, Tracing)> {
    match cake.classify() {
        CakeClass::Interval => Ok((None, Tracing::path(cake)?)),
        CakeClass::Circle => Ok((None, Tracing::circle(cake)?)),
        CakeClass::Star => Ok((None, Tracing::star(cake)?)),
        CakeClass::Tree => {
            let center = cake.metrics().centers[0];
            Ok((None, Tracing::tree(cake, center)?))
        }
        CakeClass::ConnectedGraph | CakeClass::GeneralGraph => {
            let f = edge_spanning_forest(cake)?;
            let parts: Vec<Tracing> = f
                .roots
                .iter()
                .map(|&root| Tracing::tree(&f.forest, root))
                .collect::<Result<_>>()?;
            let tracing = Tracing::concat(&f.forest, &parts)?;
            Ok((Some(f), tracing))
        }
    }
}

/// Piece bound guaranteed for a cake with the given class and metrics.
pub fn piece_bound(class: CakeClass, metrics: &GraphMetrics) -> usize {
    match class {
        CakeClass::Circle => 1,
        CakeClass::Interval | CakeClass::Star => 2,
        CakeClass::Tree => metrics.tree_height.unwrap_or(metrics.radius) + 1,
        CakeClass::ConnectedGraph => metrics.radius + 2,
        CakeClass::GeneralGraph => metrics.components + 2 * metrics.radius + 4,
    }
}

/// Computes a weighted consensus division with connected-piece guarantees.
///
/// Both valuations must be normalized. The solver is run at `tol / 2` so
/// that the residuals reported here — re-integrated independently on the
/// original cake — stay within `tol`.
pub fn divide(
    cake: &GraphCake,
    va: &Valuation,
    vb: &Valuation,
    t: Entitlement,
    tol: f64,
    config: SolverConfig,
) -> Result<DivisionReport> {
    va.ensure_normalized(1e-9)?;
    vb.ensure_normalized(1e-9)?;
    let class = cake.classify();
    let metrics = cake.metrics();

    let (forest, tracing) = route(cake)?;
    let work: &GraphCake = forest.as_ref().map(|f| &f.forest).unwrap_or(cake);

    let cva = tracing.pullback(work, va)?;
    let cvb = tracing.pullback(work, vb)?;
    let cut = solve_consensus(&cva, &cvb, t, tol / 2.0, config)?;

    let division_work = tracing.pushforward_division(work, cut.c, cut.arc_len);
    let division = match &forest {
        Some(f) => f.merge_division(cake, &division_work),
        None => division_work,
    };

    let (pieces_a, pieces_b) = count_agent_pieces(cake, &division)?;
    let (residual_a, residual_b) = residuals(cake, va, vb, &division, t)?;

    let degenerate = t.get() <= 0.0 || t.get() >= 1.0;
    let cuts = if degenerate {
        Vec::new()
    } else {
        vec![
            tracing.point_at(work, cut.c, Side::Forward),
            tracing.point_at(work, cut.c + cut.arc_len, Side::Backward),
        ]
    };
    let theorem_case = classify_case(cake, class, &cuts);

    Ok(DivisionReport {
        division,
        cut,
        cuts,
        bound: piece_bound(class, &metrics),
        class,
        metrics,
        pieces_a,
        pieces_b,
        theorem_case,
        residual_a,
        residual_b,
        t: t.get(),
        tol,
    })
}

fn classify_case(cake: &GraphCake, class: CakeClass, cuts: &[PointOnCake]) -> TheoremCase {
    let [c, k] = cuts else {
        return TheoremCase::None;
    };
    match class {
        CakeClass::Star => {
            if c.edge == k.edge {
                TheoremCase::StarSameArm
            } else {
                TheoremCase::StarTwoArms
            }
        }
        CakeClass::GeneralGraph => {
            let comps = cake.components();
            let comp_of = |p: &PointOnCake| {
                comps
                    .iter()
                    .position(|comp| comp.edges.contains(&p.edge))
                    .expect("every edge lies in a component")
            };
            if comp_of(c) == comp_of(k) {
                TheoremCase::GeneralSameComponent
            } else {
                TheoremCase::GeneralTwoComponents
            }
        }
        _ => TheoremCase::None,
    }
}

/// How one component of the cake is shared between the agents.
#[derive(Debug, Clone, Copy)]
pub struct ComponentOwnership {
    pub component: usize,
    pub length_a: f64,
    pub length_b: f64,
    pub pieces_a: usize,
    pub pieces_b: usize,
}

impl ComponentOwnership {
    /// True when both agents hold a positive share of the component.
    pub fn is_partial(&self, eps: f64) -> bool {
        self.length_a > eps && self.length_b > eps
    }
}

/// Per-component ownership breakdown of a division.
pub fn component_ownership(cake: &GraphCake, division: &Division) -> Vec<ComponentOwnership> {
    let comps = cake.components();
    let mut comp_of_edge = vec![0usize; cake.edge_count()];
    for (k, comp) in comps.iter().enumerate() {
        for &e in &comp.edges {
            comp_of_edge[e.0] = k;
        }
    }
    let select = |piece: &[SubInterval], k: usize| -> Vec<SubInterval> {
        piece
            .iter()
            .filter(|s| comp_of_edge[s.edge.0] == k)
            .copied()
            .collect()
    };
    (0..comps.len())
        .map(|k| {
            let a = select(&division.a, k);
            let b = select(&division.b, k);
            ComponentOwnership {
                component: k,
                length_a: a.iter().map(SubInterval::len).sum(),
                length_b: b.iter().map(SubInterval::len).sum(),
                pieces_a: count_connected_pieces(cake, &a),
                pieces_b: count_connected_pieces(cake, &b),
            }
        })
        .collect()
}
