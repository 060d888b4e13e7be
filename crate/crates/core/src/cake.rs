//! Cake model: metric multigraphs, their classification, and divisions.
//!
//! A graphical cake is a finite multigraph whose edges carry positive
//! lengths; each edge is identified with the interval `[0, length]`. Pieces
//! are finite unions of closed subintervals of edges, and two subintervals
//! count as connected when they meet at a shared vertex (a subinterval
//! touches a vertex only through an endpoint of its edge). Self-loops and
//! parallel edges are allowed; isolated vertices are not.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Index of a vertex in a [`GraphCake`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

/// Index of an edge in a [`GraphCake`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

/// An edge of the cake graph. `u` and `v` follow the declared orientation:
/// offset 0 sits at `u`, offset `length` at `v`.
#[derive(Debug, Clone)]
pub struct Edge {
    pub name: String,
    pub u: VertexId,
    pub v: VertexId,
    pub length: f64,
}

/// Snap tolerance for canonical subinterval endpoints, scaled by edge length.
pub(crate) const SNAP_EPS: f64 = 1e-12;

/// Tolerance for division coverage/overlap checks, scaled by edge length.
pub(crate) const DIVISION_EPS: f64 = 1e-9;

/// A metric multigraph with named vertices and edges.
///
/// Adjacency lists fix the "leftmost edge" order used by the tracing
/// algorithms: by default edges appear in declaration order, but callers may
/// override the order per vertex. Self-loops appear once in their vertex's
/// list.
#[derive(Debug, Clone)]
pub struct GraphCake {
    vertex_names: Vec<String>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<EdgeId>>,
    total_length: f64,
}

impl GraphCake {
    /// Builds a cake from vertex names and `(edge name, u, v, length)`
    /// tuples. Rejects empty graphs, duplicate names, unknown endpoints,
    /// non-positive lengths, and isolated vertices.
    pub fn new<S, T>(vertices: Vec<S>, edge_list: Vec<(T, T, T, f64)>) -> Result<Self>
    where
        S: Into<String>,
        T: Into<String>,
    {
        let vertex_names: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let mut index: HashMap<String, VertexId> = HashMap::new();
        for (i, name) in vertex_names.iter().enumerate() {
            if index.insert(name.clone(), VertexId(i)).is_some() {
                return Err(Error::DuplicateVertex(name.clone()));
            }
        }
        if edge_list.is_empty() {
            return Err(Error::EmptyCake);
        }

        let mut edges = Vec::with_capacity(edge_list.len());
        let mut seen_edges: HashMap<String, ()> = HashMap::new();
        for (name, u, v, length) in edge_list {
            let name: String = name.into();
            let (u, v): (String, String) = (u.into(), v.into());
            if seen_edges.insert(name.clone(), ()).is_some() {
                return Err(Error::DuplicateEdge(name));
            }
            let lookup = |w: &String| {
                index.get(w).copied().ok_or_else(|| Error::UnknownVertex {
                    edge: name.clone(),
                    vertex: w.clone(),
                })
            };
            let (u, v) = (lookup(&u)?, lookup(&v)?);
            if length <= 0.0 || !length.is_finite() {
                return Err(Error::NonPositiveLength { edge: name, length });
            }
            edges.push(Edge { name, u, v, length });
        }

        let mut adjacency = vec![Vec::new(); vertex_names.len()];
        for (i, e) in edges.iter().enumerate() {
            adjacency[e.u.0].push(EdgeId(i));
            if e.v != e.u {
                adjacency[e.v.0].push(EdgeId(i));
            }
        }
        for (i, adj) in adjacency.iter().enumerate() {
            if adj.is_empty() {
                return Err(Error::IsolatedVertex(vertex_names[i].clone()));
            }
        }

        let total_length = edges.iter().map(|e| e.length).sum();
        Ok(GraphCake {
            vertex_names,
            edges,
            adjacency,
            total_length,
        })
    }

    /// Overrides the incidence order at `vertex`. The new order must be a
    /// permutation of the edges incident to `vertex` (self-loops listed
    /// once).
    pub fn set_adjacency(&mut self, vertex: &str, order: &[&str]) -> Result<()> {
        let v = self
            .vertex_id(vertex)
            .ok_or_else(|| Error::NoSuchVertex(vertex.to_string()))?;
        let mut new_order = Vec::with_capacity(order.len());
        for name in order {
            let e = self
                .edge_id(name)
                .ok_or_else(|| Error::NoSuchEdge(name.to_string()))?;
            new_order.push(e);
        }
        let mut expected = self.adjacency[v.0].clone();
        let mut given = new_order.clone();
        expected.sort();
        given.sort();
        if expected != given {
            return Err(Error::BadAdjacency {
                vertex: vertex.to_string(),
                reason: format!(
                    "expected a permutation of {:?}",
                    expected
                        .iter()
                        .map(|e| self.edges[e.0].name.as_str())
                        .collect::<Vec<_>>()
                ),
            });
        }
        self.adjacency[v.0] = new_order;
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.0]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.vertex_names
            .iter()
            .position(|n| n == name)
            .map(VertexId)
    }

    pub fn edge_id(&self, name: &str) -> Option<EdgeId> {
        self.edges.iter().position(|e| e.name == name).map(EdgeId)
    }

    /// Incident edges at `v` in leftmost-first order.
    pub fn adjacency(&self, v: VertexId) -> &[EdgeId] {
        &self.adjacency[v.0]
    }

    /// The endpoint of `e` opposite to `x` (returns `x` for a self-loop).
    pub fn other_endpoint(&self, e: EdgeId, x: VertexId) -> VertexId {
        let edge = &self.edges[e.0];
        if edge.u == x {
            edge.v
        } else {
            edge.u
        }
    }

    /// Graph-theoretic degree (self-loops count twice).
    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v.0]
            .iter()
            .map(|&e| {
                let edge = &self.edges[e.0];
                if edge.u == edge.v {
                    2
                } else {
                    1
                }
            })
            .sum()
    }

    /// Connected components, ordered by their smallest vertex id.
    pub fn components(&self) -> Vec<Component> {
        let mut uf = UnionFind::new(self.vertex_count());
        for e in &self.edges {
            uf.union(e.u.0, e.v.0);
        }
        let mut by_root: HashMap<usize, usize> = HashMap::new();
        let mut comps: Vec<Component> = Vec::new();
        for v in 0..self.vertex_count() {
            let root = uf.find(v);
            let idx = *by_root.entry(root).or_insert_with(|| {
                comps.push(Component {
                    vertices: Vec::new(),
                    edges: Vec::new(),
                    center: VertexId(v),
                    radius: 0,
                });
                comps.len() - 1
            });
            comps[idx].vertices.push(VertexId(v));
        }
        for (i, e) in self.edges.iter().enumerate() {
            let root = uf.find(e.u.0);
            comps[by_root[&root]].edges.push(EdgeId(i));
        }
        for comp in &mut comps {
            let (center, radius) = self.component_center(&comp.vertices);
            comp.center = center;
            comp.radius = radius;
        }
        comps
    }

    /// Hop-count eccentricities inside one component; returns the center
    /// (lowest vertex id among minimizers) and the radius.
    fn component_center(&self, vertices: &[VertexId]) -> (VertexId, usize) {
        let mut best = (vertices[0], usize::MAX);
        for &src in vertices {
            let ecc = self.eccentricity(src, vertices);
            if ecc < best.1 {
                best = (src, ecc);
            }
        }
        (best.0, best.1)
    }

    fn eccentricity(&self, src: VertexId, vertices: &[VertexId]) -> usize {
        let mut dist: Vec<Option<usize>> = vec![None; self.vertex_count()];
        dist[src.0] = Some(0);
        let mut queue = std::collections::VecDeque::from([src]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x.0].expect("queued vertices have distances");
            for &e in self.adjacency(x) {
                let w = self.other_endpoint(e, x);
                if dist[w.0].is_none() {
                    dist[w.0] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        vertices
            .iter()
            .filter_map(|v| dist[v.0])
            .max()
            .unwrap_or(0)
    }

    /// Structural class of the cake, used to route the divider.
    pub fn classify(&self) -> CakeClass {
        if self.components().len() > 1 {
            return CakeClass::GeneralGraph;
        }
        let ne = self.edges.len();
        let nv = self.vertex_count();
        // Classification is up to homeomorphism: a connected graph with
        // maximum degree two is a path or a single cycle, regardless of how
        // many edges subdivide it.
        let max_degree_two = (0..nv).all(|v| self.degree(VertexId(v)) <= 2);
        if ne == nv && max_degree_two {
            return CakeClass::Circle;
        }
        if ne == nv - 1 {
            if max_degree_two {
                return CakeClass::Interval;
            }
            // Connected and acyclic, hence a tree. A star has a single hub.
            let hubs = (0..nv)
                .filter(|&v| self.degree(VertexId(v)) >= 2)
                .count();
            if hubs == 1 {
                return CakeClass::Star;
            }
            return CakeClass::Tree;
        }
        CakeClass::ConnectedGraph
    }

    /// Summary statistics used for bound computation and reporting.
    pub fn metrics(&self) -> GraphMetrics {
        let comps = self.components();
        let radius = comps.iter().map(|c| c.radius).max().unwrap_or(0);
        let class = self.classify();
        let acyclic_connected =
            comps.len() == 1 && self.edges.len() == self.vertex_count() - 1;
        GraphMetrics {
            components: comps.len(),
            radius,
            tree_height: if acyclic_connected { Some(radius) } else { None },
            star_arms: if class == CakeClass::Star {
                Some(self.edges.len())
            } else {
                None
            },
            centers: comps.iter().map(|c| c.center).collect(),
        }
    }
}

/// Structural class of a cake graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CakeClass {
    Interval,
    Circle,
    Star,
    Tree,
    ConnectedGraph,
    GeneralGraph,
}

impl CakeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            CakeClass::Interval => "interval",
            CakeClass::Circle => "circle",
            CakeClass::Star => "star",
            CakeClass::Tree => "tree",
            CakeClass::ConnectedGraph => "connected-graph",
            CakeClass::GeneralGraph => "general-graph",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "interval" => CakeClass::Interval,
            "circle" => CakeClass::Circle,
            "star" => CakeClass::Star,
            "tree" => CakeClass::Tree,
            "connected-graph" => CakeClass::ConnectedGraph,
            "general-graph" => CakeClass::GeneralGraph,
            _ => return None,
        })
    }
}

/// One connected component: vertex/edge sets plus its hop-count center.
#[derive(Debug, Clone)]
pub struct Component {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    pub center: VertexId,
    pub radius: usize,
}

/// Graph statistics: component count `s`, radius `r`, and when applicable
/// the center-rooted tree height `h` and the number of star arms `l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphMetrics {
    pub components: usize,
    pub radius: usize,
    pub tree_height: Option<usize>,
    pub star_arms: Option<usize>,
    pub centers: Vec<VertexId>,
}

/// A closed subinterval `[lo, hi]` of one edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubInterval {
    pub edge: EdgeId,
    pub lo: f64,
    pub hi: f64,
}

impl SubInterval {
    pub fn new(edge: EdgeId, lo: f64, hi: f64) -> Self {
        SubInterval { edge, lo, hi }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }
}

/// A point on the cake, as an offset along one edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointOnCake {
    pub edge: EdgeId,
    pub offset: f64,
}

/// An allocation of the whole cake to agents A and B.
#[derive(Debug, Clone, Default)]
pub struct Division {
    pub a: Vec<SubInterval>,
    pub b: Vec<SubInterval>,
}

impl Division {
    /// Builds a division in canonical form (endpoints snapped, zero-length
    /// subintervals dropped, touching subintervals merged per edge).
    pub fn canonical(cake: &GraphCake, a: Vec<SubInterval>, b: Vec<SubInterval>) -> Self {
        Division {
            a: canonicalize_piece(cake, &a),
            b: canonicalize_piece(cake, &b),
        }
    }
}

/// Canonical form of a piece: endpoints within `1e-12` (scaled by edge
/// length) of a vertex snap to it, zero-length subintervals are dropped, and
/// overlapping or touching subintervals on the same edge merge.
pub fn canonicalize_piece(cake: &GraphCake, piece: &[SubInterval]) -> Vec<SubInterval> {
    let mut subs: Vec<SubInterval> = piece
        .iter()
        .filter_map(|s| {
            let len = cake.edge(s.edge).length;
            let eps = SNAP_EPS * len.max(1.0);
            let snap = |x: f64| {
                if x.abs() <= eps {
                    0.0
                } else if (x - len).abs() <= eps {
                    len
                } else {
                    x.clamp(0.0, len)
                }
            };
            let (lo, hi) = (snap(s.lo), snap(s.hi));
            if hi - lo <= eps {
                None
            } else {
                Some(SubInterval::new(s.edge, lo, hi))
            }
        })
        .collect();
    subs.sort_by(|x, y| {
        (x.edge, x.lo)
            .partial_cmp(&(y.edge, y.lo))
            .expect("subinterval endpoints are finite")
    });
    let mut merged: Vec<SubInterval> = Vec::with_capacity(subs.len());
    for s in subs {
        let eps = SNAP_EPS * cake.edge(s.edge).length.max(1.0);
        match merged.last_mut() {
            Some(last) if last.edge == s.edge && s.lo <= last.hi + eps => {
                last.hi = last.hi.max(s.hi);
            }
            _ => merged.push(s),
        }
    }
    merged
}

/// Checks that a division is well formed: every subinterval lies on its
/// edge, and the two pieces together cover each edge exactly, overlapping at
/// most in finitely many points (tolerance `1e-9` scaled by edge length).
pub fn validate_division(cake: &GraphCake, division: &Division) -> Result<()> {
    for s in division.a.iter().chain(&division.b) {
        let edge = cake
            .edges()
            .get(s.edge.0)
            .ok_or_else(|| Error::NoSuchEdge(format!("#{}", s.edge.0)))?;
        let eps = DIVISION_EPS * edge.length.max(1.0);
        if !s.lo.is_finite() || !s.hi.is_finite() || s.lo < -eps || s.hi > edge.length + eps || s.lo > s.hi + eps {
            return Err(Error::InvalidSubInterval {
                edge: edge.name.clone(),
                lo: s.lo,
                hi: s.hi,
                length: edge.length,
            });
        }
    }
    let a = canonicalize_piece(cake, &division.a);
    let b = canonicalize_piece(cake, &division.b);
    for (ei, edge) in cake.edges().iter().enumerate() {
        let eps = DIVISION_EPS * edge.length.max(1.0);
        let mut ivs: Vec<(f64, f64)> = a
            .iter()
            .chain(&b)
            .filter(|s| s.edge.0 == ei)
            .map(|s| (s.lo, s.hi))
            .collect();
        ivs.sort_by(|x, y| x.partial_cmp(y).expect("finite endpoints"));
        let mut cover_end = 0.0_f64;
        let mut sum = 0.0_f64;
        let mut union = 0.0_f64;
        let mut overlap_at = None;
        for &(lo, hi) in &ivs {
            if lo > cover_end + eps {
                return Err(Error::DivisionGap {
                    edge: edge.name.clone(),
                    at: cover_end,
                    gap: lo - cover_end,
                });
            }
            if lo < cover_end - eps && overlap_at.is_none() {
                overlap_at = Some(lo);
            }
            sum += hi - lo;
            union += (hi - lo.max(cover_end)).max(0.0);
            cover_end = cover_end.max(hi);
        }
        if cover_end < edge.length - eps {
            return Err(Error::DivisionGap {
                edge: edge.name.clone(),
                at: cover_end,
                gap: edge.length - cover_end,
            });
        }
        if sum - union > eps {
            return Err(Error::DivisionOverlap {
                edge: edge.name.clone(),
                at: overlap_at.unwrap_or(0.0),
                overlap: sum - union,
            });
        }
    }
    Ok(())
}

/// Counts the connected pieces of a (not necessarily covering) union of
/// subintervals. Subintervals connect along their edge and through shared
/// vertices; contact with a vertex requires a subinterval endpoint to sit
/// exactly at that vertex after canonicalization.
pub fn count_connected_pieces(cake: &GraphCake, piece: &[SubInterval]) -> usize {
    let subs = canonicalize_piece(cake, piece);
    if subs.is_empty() {
        return 0;
    }
    let mut uf = UnionFind::new(subs.len());
    for v in 0..cake.vertex_count() {
        let v = VertexId(v);
        let mut touching: Option<usize> = None;
        for (i, s) in subs.iter().enumerate() {
            let edge = cake.edge(s.edge);
            let touches =
                (s.lo == 0.0 && edge.u == v) || (s.hi == edge.length && edge.v == v);
            if touches {
                if let Some(first) = touching {
                    uf.union(first, i);
                } else {
                    touching = Some(i);
                }
            }
        }
    }
    (0..subs.len()).filter(|&i| uf.find(i) == i).count()
}

/// Counts connected pieces for both agents of a validated division.
pub fn count_agent_pieces(cake: &GraphCake, division: &Division) -> Result<(usize, usize)> {
    validate_division(cake, division)?;
    Ok((
        count_connected_pieces(cake, &division.a),
        count_connected_pieces(cake, &division.b),
    ))
}

/// Plain union-find with path halving; no rank, components stay tiny.
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}
