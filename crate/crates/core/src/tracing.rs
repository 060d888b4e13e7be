//! Tracings: length-preserving identifications of a cake with the unit
//! circle (or an initial segment of it).
//!
//! A tracing walks every edge of its component exactly once and lays the
//! traversals end to end on `[0, 1]`, scaling by total length. Trees are
//! traced depth-first from a root, taking the leftmost (first in adjacency
//! order) untraced edge each time; pausing such a trace at any point leaves
//! the traced part connected. Tracings of disjoint components concatenate
//! into a tracing of a forest.
//!
//! `pullback` transports a valuation through the identification onto the
//! circle; `pushforward_*` map circle arcs back to unions of subintervals.

use crate::cake::{Division, EdgeId, GraphCake, PointOnCake, SubInterval, VertexId};
use crate::consensus::CircleValuation;
use crate::error::{Error, Result};
use crate::valuation::{DensitySegment, Valuation};

/// Direction in which a traversal walks its edge. `Forward` runs from the
/// edge's `u` endpoint (offset 0) to `v` (offset `length`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// One edge walked in a fixed direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Traversal {
    pub edge: EdgeId,
    pub direction: Direction,
}

/// Which side of a breakpoint a circle parameter belongs to when it falls
/// exactly on a traversal boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Forward,
    Backward,
}

/// An ordered, directed walk over a set of edges, identified with `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Tracing {
    traversals: Vec<Traversal>,
    /// `breakpoints[k]` is the circle parameter where traversal `k` begins;
    /// the final entry is exactly 1.
    breakpoints: Vec<f64>,
    start: VertexId,
    total_length: f64,
}

impl Tracing {
    fn from_traversals(cake: &GraphCake, start: VertexId, traversals: Vec<Traversal>) -> Self {
        let total_length: f64 = traversals
            .iter()
            .map(|t| cake.edge(t.edge).length)
            .sum();
        let mut breakpoints = Vec::with_capacity(traversals.len() + 1);
        let mut acc = 0.0;
        breakpoints.push(0.0);
        for t in &traversals {
            acc += cake.edge(t.edge).length;
            breakpoints.push(acc / total_length);
        }
        *breakpoints.last_mut().expect("at least one traversal") = 1.0;
        Tracing {
            traversals,
            breakpoints,
            start,
            total_length,
        }
    }

    /// Depth-first tracing of the tree component containing `root`,
    /// following adjacency order. Fails if the component contains a cycle
    /// (including self-loops and parallel edges).
    pub fn tree(cake: &GraphCake, root: VertexId) -> Result<Self> {
        let mut visited = vec![false; cake.vertex_count()];
        let mut traced = vec![false; cake.edge_count()];
        let mut traversals = Vec::new();
        visited[root.0] = true;
        let mut stack: Vec<(VertexId, usize)> = vec![(root, 0)];
        while let Some(top) = stack.last_mut() {
            let (x, i) = (top.0, top.1);
            top.1 += 1;
            let adj = cake.adjacency(x);
            if i >= adj.len() {
                stack.pop();
                continue;
            }
            let e = adj[i];
            if traced[e.0] {
                continue;
            }
            let w = cake.other_endpoint(e, x);
            if visited[w.0] {
                return Err(Error::NotATree(cake.vertex_name(w).to_string()));
            }
            traced[e.0] = true;
            visited[w.0] = true;
            let direction = if cake.edge(e).u == x {
                Direction::Forward
            } else {
                Direction::Backward
            };
            traversals.push(Traversal { edge: e, direction });
            stack.push((w, 0));
        }
        if traversals.is_empty() {
            return Err(Error::BadTracing {
                reason: format!(
                    "vertex {:?} has no incident edges to trace",
                    cake.vertex_name(root)
                ),
            });
        }
        Ok(Self::from_traversals(cake, root, traversals))
    }

    /// Tracing of a star from its hub; arms follow adjacency order.
    pub fn star(cake: &GraphCake) -> Result<Self> {
        let hub = (0..cake.vertex_count())
            .map(VertexId)
            .find(|&v| cake.degree(v) == cake.edge_count())
            .ok_or_else(|| Error::BadTracing {
                reason: "cake is not a star (no hub vertex)".to_string(),
            })?;
        Self::tree(cake, hub)
    }

    /// Tracing of a path cake from its lowest-id endpoint.
    pub fn path(cake: &GraphCake) -> Result<Self> {
        let end = (0..cake.vertex_count())
            .map(VertexId)
            .find(|&v| cake.degree(v) == 1)
            .ok_or(Error::NotAPath)?;
        let tracing = Self::tree(cake, end)?;
        if tracing.traversals.len() != cake.edge_count() {
            return Err(Error::NotAPath);
        }
        Ok(tracing)
    }

    /// Tracing of a circle cake — a single closed cycle, whether one
    /// self-loop or many edges — walked once around from vertex 0.
    pub fn circle(cake: &GraphCake) -> Result<Self> {
        let nv = cake.vertex_count();
        let ne = cake.edge_count();
        let degrees_ok = (0..nv).all(|v| cake.degree(VertexId(v)) == 2);
        if ne != nv || !degrees_ok {
            return Err(Error::NotACircle);
        }
        let start = VertexId(0);
        let mut used = vec![false; ne];
        let mut traversals = Vec::with_capacity(ne);
        let mut at = start;
        while let Some(&e) = cake.adjacency(at).iter().find(|&&e| !used[e.0]) {
            used[e.0] = true;
            let direction = if cake.edge(e).u == at {
                Direction::Forward
            } else {
                Direction::Backward
            };
            traversals.push(Traversal { edge: e, direction });
            at = cake.other_endpoint(e, at);
        }
        if traversals.len() != ne || at != start {
            return Err(Error::NotACircle);
        }
        Ok(Self::from_traversals(cake, start, traversals))
    }

    /// Concatenates tracings of pairwise disjoint components, in the given
    /// order, into one tracing (of a forest).
    pub fn concat(cake: &GraphCake, parts: &[Tracing]) -> Result<Self> {
        let mut seen = vec![false; cake.edge_count()];
        let mut traversals = Vec::new();
        for part in parts {
            for t in &part.traversals {
                if seen[t.edge.0] {
                    return Err(Error::BadTracing {
                        reason: format!(
                            "edge {:?} appears in more than one part",
                            cake.edge(t.edge).name
                        ),
                    });
                }
                seen[t.edge.0] = true;
                traversals.push(*t);
            }
        }
        if traversals.is_empty() {
            return Err(Error::BadTracing {
                reason: "no traversals to concatenate".to_string(),
            });
        }
        let start = parts[0].start;
        Ok(Self::from_traversals(cake, start, traversals))
    }

    pub fn traversals(&self) -> &[Traversal] {
        &self.traversals
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn start(&self) -> VertexId {
        self.start
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    /// Transports a valuation through the tracing onto the unit circle.
    /// Requires the tracing to cover every edge of the cake exactly once,
    /// so that mass is preserved.
    pub fn pullback(&self, cake: &GraphCake, valuation: &Valuation) -> Result<CircleValuation> {
        let mut count = vec![0usize; cake.edge_count()];
        for t in &self.traversals {
            count[t.edge.0] += 1;
        }
        if let Some(i) = count.iter().position(|&c| c != 1) {
            return Err(Error::BadTracing {
                reason: format!(
                    "edge {:?} is traversed {} times (expected exactly once)",
                    cake.edges()[i].name,
                    count[i]
                ),
            });
        }
        let mut segments = Vec::new();
        for (k, t) in self.traversals.iter().enumerate() {
            let (b0, b1) = (self.breakpoints[k], self.breakpoints[k + 1]);
            let delta = b1 - b0;
            let len = cake.edge(t.edge).length;
            let scale = len / delta;
            let map = |offset: f64| b0 + (offset / len) * delta;
            match t.direction {
                Direction::Forward => {
                    for seg in valuation.segments(t.edge.0) {
                        segments.push(DensitySegment::new(
                            map(seg.lo),
                            map(seg.hi),
                            seg.density * scale,
                        ));
                    }
                }
                Direction::Backward => {
                    for seg in valuation.segments(t.edge.0).iter().rev() {
                        segments.push(DensitySegment::new(
                            map(len - seg.hi),
                            map(len - seg.lo),
                            seg.density * scale,
                        ));
                    }
                }
            }
        }
        CircleValuation::new(segments)
    }

    /// Maps a circle parameter range `[lo, hi]` (no wrap-around) to the
    /// subintervals it covers.
    pub fn pushforward_range(&self, cake: &GraphCake, lo: f64, hi: f64) -> Vec<SubInterval> {
        debug_assert!((0.0..=1.0 + 1e-12).contains(&lo) && lo <= hi && hi <= 1.0 + 1e-12);
        let mut out = Vec::new();
        for (k, t) in self.traversals.iter().enumerate() {
            let (b0, b1) = (self.breakpoints[k], self.breakpoints[k + 1]);
            let (xlo, xhi) = (lo.max(b0), hi.min(b1));
            if xhi <= xlo {
                continue;
            }
            let delta = b1 - b0;
            let len = cake.edge(t.edge).length;
            let frac_lo = (xlo - b0) / delta;
            let frac_hi = (xhi - b0) / delta;
            let sub = match t.direction {
                Direction::Forward => SubInterval::new(t.edge, frac_lo * len, frac_hi * len),
                Direction::Backward => {
                    SubInterval::new(t.edge, (1.0 - frac_hi) * len, (1.0 - frac_lo) * len)
                }
            };
            out.push(sub);
        }
        out
    }

    /// Maps the arc `[c, c + arc_len]` (wrapping around 1) to agent A and
    /// its complement to agent B.
    pub fn pushforward_division(&self, cake: &GraphCake, c: f64, arc_len: f64) -> Division {
        debug_assert!((0.0..1.0 + 1e-12).contains(&c));
        debug_assert!((0.0..=1.0 + 1e-12).contains(&arc_len));
        let kappa = c + arc_len;
        let mut a = Vec::new();
        let mut b = Vec::new();
        if kappa <= 1.0 {
            a.extend(self.pushforward_range(cake, c, kappa));
            b.extend(self.pushforward_range(cake, kappa, 1.0));
            b.extend(self.pushforward_range(cake, 0.0, c));
        } else {
            a.extend(self.pushforward_range(cake, c, 1.0));
            a.extend(self.pushforward_range(cake, 0.0, kappa - 1.0));
            b.extend(self.pushforward_range(cake, kappa - 1.0, c));
        }
        Division::canonical(cake, a, b)
    }

    /// Splits the cake at tracing parameter `x`: A receives the traced part
    /// `[0, x]`, B the untraced remainder.
    pub fn traced_split(&self, cake: &GraphCake, x: f64) -> Division {
        let x = x.clamp(0.0, 1.0);
        Division::canonical(
            cake,
            self.pushforward_range(cake, 0.0, x),
            self.pushforward_range(cake, x, 1.0),
        )
    }

    /// The point of the cake at circle parameter `x`. When `x` lies exactly
    /// on a traversal boundary, `side` picks the traversal that begins
    /// (`Forward`) or ends (`Backward`) there.
    pub fn point_at(&self, cake: &GraphCake, x: f64, side: Side) -> PointOnCake {
        let n = self.traversals.len();
        let mut x = x;
        // Normalize the parameter into [0, 1] with the wrap the side implies.
        if x >= 1.0 {
            x -= 1.0;
        }
        if x <= 0.0 && side == Side::Backward {
            x += 1.0;
        }
        let k = match side {
            Side::Forward => {
                // Last k with breakpoints[k] <= x.
                self.breakpoints[..n].partition_point(|&b| b <= x).max(1) - 1
            }
            Side::Backward => {
                // Last k with breakpoints[k] < x.
                self.breakpoints[..n].partition_point(|&b| b < x).max(1) - 1
            }
        };
        let t = self.traversals[k];
        let (b0, b1) = (self.breakpoints[k], self.breakpoints[k + 1]);
        let frac = ((x - b0) / (b1 - b0)).clamp(0.0, 1.0);
        let len = cake.edge(t.edge).length;
        let offset = match t.direction {
            Direction::Forward => frac * len,
            Direction::Backward => (1.0 - frac) * len,
        };
        PointOnCake {
            edge: t.edge,
            offset,
        }
    }
}
