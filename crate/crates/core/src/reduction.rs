//! Reduction of arbitrary graph cakes to trees and forests.
//!
//! Cycles block tree tracing, so each component is re-hung from its center:
//! a BFS spanning tree keeps its edges as they are, and every non-tree edge
//! is detached from one endpoint and given a fresh leaf vertex instead. The
//! endpoint that stays is the one closer to the center (ties to the smaller
//! vertex id); for self-loops the `v` side is detached. Edge ids, names,
//! lengths, and tuple orientation are preserved, so a subinterval of the
//! reduced cake is, byte for byte, a subinterval of the original: divisions
//! merge back by reinterpretation.
//!
//! The resulting tree rooted at the center has height at most `radius + 1`,
//! which is what the piece-count bounds for connected and disconnected
//! graphs rest on.

use crate::cake::{Division, GraphCake, VertexId};
use crate::error::{Error, Result};

/// A single component re-hung as a tree.
#[derive(Debug, Clone)]
pub struct EdgeSpanningTree {
    pub tree: GraphCake,
    pub root: VertexId,
    /// Height of `tree` rooted at `root` (edges on the longest root-leaf path).
    pub height: usize,
    /// `(fresh leaf in the tree, vertex it replaces in the original)`.
    pub split_map: Vec<(VertexId, VertexId)>,
}

/// Every component of a cake re-hung as a tree, sharing one vertex/edge
/// namespace. Components keep their order (by smallest vertex id).
#[derive(Debug, Clone)]
pub struct EdgeSpanningForest {
    pub forest: GraphCake,
    /// Root (original center) of each component.
    pub roots: Vec<VertexId>,
    /// Height of each component's tree.
    pub heights: Vec<usize>,
    /// `(fresh leaf in the forest, vertex it replaces in the original)`.
    pub split_map: Vec<(VertexId, VertexId)>,
}

impl EdgeSpanningForest {
    /// Reinterprets a division of the forest as a division of the original
    /// cake. Edge ids and offsets coincide by construction; this only
    /// re-canonicalizes against the original.
    pub fn merge_division(&self, original: &GraphCake, division: &Division) -> Division {
        debug_assert_eq!(original.edge_count(), self.forest.edge_count());
        Division::canonical(original, division.a.clone(), division.b.clone())
    }
}

/// Re-hangs every component of `cake` from its center.
pub fn edge_spanning_forest(cake: &GraphCake) -> Result<EdgeSpanningForest> {
    let comps = cake.components();
    let nv = cake.vertex_count();

    // BFS forest from all centers at once; components do not interact.
    let mut depth: Vec<Option<usize>> = vec![None; nv];
    let mut is_tree_edge = vec![false; cake.edge_count()];
    for comp in &comps {
        let mut queue = std::collections::VecDeque::from([comp.center]);
        depth[comp.center.0] = Some(0);
        while let Some(x) = queue.pop_front() {
            let d = depth[x.0].expect("queued vertices have depths");
            for &e in cake.adjacency(x) {
                let w = cake.other_endpoint(e, x);
                if depth[w.0].is_none() {
                    depth[w.0] = Some(d + 1);
                    is_tree_edge[e.0] = true;
                    queue.push_back(w);
                }
            }
        }
    }

    // Fresh leaves for the detached side of every non-tree edge.
    let mut vertex_names: Vec<String> = cake.vertex_names().to_vec();
    let mut split_map = Vec::new();
    let mut edge_tuples = Vec::with_capacity(cake.edge_count());
    let mut leaf_depths = Vec::new();
    for (i, edge) in cake.edges().iter().enumerate() {
        let (mut u, mut v) = (edge.u, edge.v);
        if !is_tree_edge[i] {
            let (du, dv) = (
                depth[u.0].expect("no isolated vertices"),
                depth[v.0].expect("no isolated vertices"),
            );
            // Keep the endpoint nearer the center; detach the other. For
            // self-loops and depth ties, the `u` side (or smaller id) stays.
            let keep_u = du < dv || (du == dv && u.0 <= v.0);
            let (kept, detached) = if keep_u { (u, v) } else { (v, u) };
            let fresh = VertexId(vertex_names.len());
            vertex_names.push(format!(
                "{}~{}",
                cake.vertex_name(detached),
                split_map.len()
            ));
            split_map.push((fresh, detached));
            leaf_depths.push(depth[kept.0].expect("kept endpoint has a depth") + 1);
            if keep_u {
                v = fresh;
            } else {
                u = fresh;
            }
        }
        edge_tuples.push((
            edge.name.clone(),
            vertex_names[u.0].clone(),
            vertex_names[v.0].clone(),
            edge.length,
        ));
    }

    let mut forest = GraphCake::new(vertex_names.clone(), edge_tuples)?;
    // Preserve any adjacency-order overrides from the original: keep each
    // surviving incidence in its old position.
    for (v, name) in vertex_names.iter().enumerate().take(nv) {
        let vid = VertexId(v);
        let order: Vec<&str> = cake
            .adjacency(vid)
            .iter()
            .filter(|&&e| {
                let fe = &forest.edges()[e.0];
                fe.u == vid || fe.v == vid
            })
            .map(|&e| cake.edges()[e.0].name.as_str())
            .collect();
        if !order.is_empty() {
            forest.set_adjacency(name, &order)?;
        }
    }

    // Heights: deepest original vertex or fresh leaf per component.
    let comp_of = {
        let mut map = vec![usize::MAX; nv];
        for (k, comp) in comps.iter().enumerate() {
            for &v in &comp.vertices {
                map[v.0] = k;
            }
        }
        map
    };
    let mut heights = vec![0usize; comps.len()];
    for v in 0..nv {
        let k = comp_of[v];
        heights[k] = heights[k].max(depth[v].expect("no isolated vertices"));
    }
    for (j, &(_, detached)) in split_map.iter().enumerate() {
        let k = comp_of[detached.0];
        heights[k] = heights[k].max(leaf_depths[j]);
    }

    Ok(EdgeSpanningForest {
        forest,
        roots: comps.iter().map(|c| c.center).collect(),
        heights,
        split_map,
    })
}

/// Re-hangs a connected cake from its center. Fails on disconnected cakes.
pub fn edge_spanning_tree(cake: &GraphCake) -> Result<EdgeSpanningTree> {
    let forest = edge_spanning_forest(cake)?;
    if forest.roots.len() != 1 {
        return Err(Error::NotConnected {
            components: forest.roots.len(),
        });
    }
    Ok(EdgeSpanningTree {
        tree: forest.forest,
        root: forest.roots[0],
        height: forest.heights[0],
        split_map: forest.split_map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cake::{CakeClass, EdgeId, SubInterval};
    use crate::tracing::{Direction, Tracing};

    #[test]
    fn triangle_rehangs_the_far_edge() {
        let cake = GraphCake::new(
            vec!["a", "b", "c"],
            vec![
                ("e1", "a", "b", 1.0),
                ("e2", "b", "c", 1.0),
                ("e3", "c", "a", 1.0),
            ],
        )
        .unwrap();
        let est = edge_spanning_tree(&cake).unwrap();
        assert_eq!(est.root, cake.vertex_id("a").unwrap());
        // e1 and e3 are BFS edges; e2 ties at depth 1 and keeps b.
        assert_eq!(est.split_map.len(), 1);
        let (fresh, orig) = est.split_map[0];
        assert_eq!(orig, cake.vertex_id("c").unwrap());
        let t = &est.tree;
        assert_eq!(t.edges()[1].u, cake.vertex_id("b").unwrap());
        assert_eq!(t.edges()[1].v, fresh);
        // Edge ids, names, lengths, and the e3 orientation are untouched.
        assert_eq!(t.edges()[2].u, cake.vertex_id("c").unwrap());
        assert_eq!(t.edges()[2].v, cake.vertex_id("a").unwrap());
        assert_eq!(est.height, 2, "one BFS level plus the re-hung leaf");
        // The cycle is gone: what remains is the path c-a-b-c~0.
        assert_eq!(t.classify(), CakeClass::Interval);

        // The tree traces depth-first: down e1, out the re-hung e2, then e3
        // backward (it was declared pointing into the root).
        let tr = Tracing::tree(t, est.root).unwrap();
        let walk: Vec<(usize, Direction)> = tr
            .traversals()
            .iter()
            .map(|t| (t.edge.0, t.direction))
            .collect();
        assert_eq!(
            walk,
            vec![
                (0, Direction::Forward),
                (1, Direction::Forward),
                (2, Direction::Backward),
            ]
        );
    }

    #[test]
    fn self_loops_detach_their_v_side() {
        let cake = GraphCake::new(
            vec!["a", "b"],
            vec![("loop", "a", "a", 2.0), ("p", "a", "b", 1.0)],
        )
        .unwrap();
        let est = edge_spanning_tree(&cake).unwrap();
        let t = &est.tree;
        assert_eq!(t.vertex_count(), 3);
        assert_eq!(t.edges()[0].u, cake.vertex_id("a").unwrap());
        assert_eq!(t.edges()[0].v, est.split_map[0].0);
        assert_eq!(est.split_map[0].1, cake.vertex_id("a").unwrap());
        assert_eq!(est.height, 1);
        assert_eq!(t.classify(), CakeClass::Interval, "a two-arm star");
    }

    #[test]
    fn parallel_edges_become_extra_arms() {
        let cake = GraphCake::new(
            vec!["a", "b"],
            vec![
                ("e1", "a", "b", 1.0),
                ("e2", "a", "b", 1.0),
                ("e3", "b", "a", 1.0),
            ],
        )
        .unwrap();
        let est = edge_spanning_tree(&cake).unwrap();
        let t = &est.tree;
        // e1 spans; e2 and e3 each hang a fresh leaf off the nearer vertex.
        assert_eq!(est.split_map.len(), 2);
        assert_eq!(t.classify(), CakeClass::Star);
        assert_eq!(est.height, 1);
        // e3 was declared (b, a): the a side is kept, so the fresh vertex
        // replaces u and offset `length` still sits at a.
        assert_eq!(t.edges()[2].v, cake.vertex_id("a").unwrap());
        assert_eq!(est.split_map[1].1, cake.vertex_id("b").unwrap());
    }

    #[test]
    fn forests_reduce_components_independently() {
        let cake = GraphCake::new(
            vec!["a", "b", "c", "x", "y"],
            vec![
                ("e1", "a", "b", 1.0),
                ("e2", "b", "c", 1.0),
                ("e3", "c", "a", 1.0),
                ("f1", "x", "y", 1.0),
                ("f2", "y", "x", 1.0),
            ],
        )
        .unwrap();
        let forest = edge_spanning_forest(&cake).unwrap();
        assert_eq!(forest.roots.len(), 2);
        assert_eq!(forest.heights, vec![2, 1]);
        assert_eq!(forest.split_map.len(), 2);
        assert_eq!(forest.forest.edge_count(), cake.edge_count());
        // All original vertices keep their ids.
        for v in 0..cake.vertex_count() {
            assert_eq!(
                forest.forest.vertex_name(VertexId(v)),
                cake.vertex_name(VertexId(v))
            );
        }

        let err = edge_spanning_tree(&cake).unwrap_err();
        assert!(matches!(err, Error::NotConnected { components: 2 }));
    }

    #[test]
    fn trees_pass_through_unchanged() {
        let cake = GraphCake::new(
            vec!["R", "u", "v"],
            vec![("a", "R", "u", 1.0), ("b", "R", "v", 2.0)],
        )
        .unwrap();
        let est = edge_spanning_tree(&cake).unwrap();
        assert!(est.split_map.is_empty());
        assert_eq!(est.tree.vertex_count(), cake.vertex_count());
        assert_eq!(est.height, 1);
    }

    #[test]
    fn merge_is_reinterpretation() {
        let cake = GraphCake::new(
            vec!["a", "b", "c"],
            vec![
                ("e1", "a", "b", 1.0),
                ("e2", "b", "c", 1.0),
                ("e3", "c", "a", 1.0),
            ],
        )
        .unwrap();
        let forest = edge_spanning_forest(&cake).unwrap();
        let division = Division {
            a: vec![SubInterval::new(EdgeId(1), 0.0, 0.5)],
            b: vec![
                SubInterval::new(EdgeId(0), 0.0, 1.0),
                SubInterval::new(EdgeId(1), 0.5, 1.0),
                SubInterval::new(EdgeId(2), 0.0, 1.0),
            ],
        };
        let merged = forest.merge_division(&cake, &division);
        assert_eq!(merged.a, division.a);
        assert_eq!(merged.b.len(), 3);
    }
}
