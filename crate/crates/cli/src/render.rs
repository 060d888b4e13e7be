//! Deterministic SVG pictures of divided cakes.
//!
//! Layouts by class: intervals run left to right, circles are rings with
//! vertices at their true arc positions, stars are radial around the hub,
//! trees hang from the center, and anything else gets one ring per
//! component, side by side. Edges are polylines colored by owner per
//! subinterval (agent A pink, agent B purple); cut points are black dots.
//! Identical inputs produce identical bytes.

use std::fmt::Write as _;

use consensus_cake::{CakeClass, Division, EdgeId, GraphCake, PointOnCake, VertexId};

const COLOR_A: &str = "#e91e63";
const COLOR_B: &str = "#673ab7";
const COLOR_EDGE: &str = "#bbbbbb";
const SAMPLES_PER_EDGE: usize = 24;

pub fn render_svg(cake: &GraphCake, division: &Division, cuts: &[PointOnCake]) -> String {
    let pos = layout(cake);
    let curves: Vec<Vec<(f64, f64)>> = (0..cake.edge_count())
        .map(|e| edge_curve(cake, &pos, EdgeId(e)))
        .collect();

    let mut min = (f64::INFINITY, f64::INFINITY);
    let mut max = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pos.iter().chain(curves.iter().flatten()) {
        min = (min.0.min(p.0), min.1.min(p.1));
        max = (max.0.max(p.0), max.1.max(p.1));
    }
    let margin = 40.0;
    let (x0, y0) = (min.0 - margin, min.1 - margin);
    let (w, h) = (max.0 - min.0 + 2.0 * margin, max.1 - min.1 + 2.0 * margin);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{x0:.4} {y0:.4} {w:.4} {h:.4}">"#
    );

    // Faint full edges underneath, so unallocated slivers stay visible.
    for curve in &curves {
        let _ = writeln!(
            svg,
            r#"  <polyline fill="none" stroke="{COLOR_EDGE}" stroke-width="1.5" points="{}"/>"#,
            points_attr(curve)
        );
    }
    // Owner-colored subintervals.
    for (piece, color) in [(&division.a, COLOR_A), (&division.b, COLOR_B)] {
        for sub in piece {
            let len = cake.edge(sub.edge).length;
            let part = sample_curve(&curves[sub.edge.0], sub.lo / len, sub.hi / len);
            let _ = writeln!(
                svg,
                r#"  <polyline fill="none" stroke="{color}" stroke-width="5" stroke-linecap="round" points="{}"/>"#,
                points_attr(&part)
            );
        }
    }
    // Cut markers.
    for cut in cuts {
        let len = cake.edge(cut.edge).length;
        let p = curve_point(&curves[cut.edge.0], cut.offset / len);
        let _ = writeln!(
            svg,
            r##"  <circle cx="{:.4}" cy="{:.4}" r="4" fill="#111111"/>"##,
            p.0, p.1
        );
    }
    // Vertices and labels.
    for (v, p) in pos.iter().enumerate() {
        let _ = writeln!(
            svg,
            r##"  <circle cx="{:.4}" cy="{:.4}" r="3" fill="#333333"/>"##,
            p.0, p.1
        );
        let _ = writeln!(
            svg,
            r##"  <text x="{:.4}" y="{:.4}" font-family="monospace" font-size="10" fill="#333333">{}</text>"##,
            p.0 + 5.0,
            p.1 - 5.0,
            escape(cake.vertex_name(VertexId(v)))
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn points_attr(points: &[(f64, f64)]) -> String {
    let mut out = String::new();
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{:.4},{:.4}", p.0, p.1);
    }
    out
}

/// Positions every vertex; class picks the shape.
fn layout(cake: &GraphCake) -> Vec<(f64, f64)> {
    match cake.classify() {
        CakeClass::Interval => path_layout(cake),
        CakeClass::Circle => ring_by_arc_layout(cake),
        CakeClass::Star => star_layout(cake),
        CakeClass::Tree => tree_layout(cake),
        _ => component_rings_layout(cake),
    }
}

fn path_layout(cake: &GraphCake) -> Vec<(f64, f64)> {
    let scale = 420.0 / cake.total_length();
    let mut pos = vec![(0.0, 0.0); cake.vertex_count()];
    let start = (0..cake.vertex_count())
        .map(VertexId)
        .find(|&v| cake.degree(v) == 1)
        .unwrap_or(VertexId(0));
    let mut at = start;
    let mut x = 0.0;
    let mut used = vec![false; cake.edge_count()];
    pos[at.0] = (0.0, 0.0);
    while let Some(&e) = cake.adjacency(at).iter().find(|&&e| !used[e.0]) {
        used[e.0] = true;
        x += cake.edge(e).length * scale;
        at = cake.other_endpoint(e, at);
        pos[at.0] = (x, 0.0);
    }
    pos
}

fn ring_by_arc_layout(cake: &GraphCake) -> Vec<(f64, f64)> {
    let total = cake.total_length();
    let r = 150.0;
    let mut pos = vec![(0.0, 0.0); cake.vertex_count()];
    let mut at = VertexId(0);
    let mut walked = 0.0;
    let mut used = vec![false; cake.edge_count()];
    loop {
        let angle = std::f64::consts::TAU * walked / total - std::f64::consts::FRAC_PI_2;
        pos[at.0] = (r * angle.cos(), r * angle.sin());
        let Some(&e) = cake.adjacency(at).iter().find(|&&e| !used[e.0]) else {
            break;
        };
        used[e.0] = true;
        walked += cake.edge(e).length;
        at = cake.other_endpoint(e, at);
    }
    pos
}

fn star_layout(cake: &GraphCake) -> Vec<(f64, f64)> {
    let hub = (0..cake.vertex_count())
        .map(VertexId)
        .max_by_key(|&v| cake.degree(v))
        .expect("cake is non-empty");
    let mut pos = vec![(0.0, 0.0); cake.vertex_count()];
    let arms = cake.adjacency(hub);
    for (i, &e) in arms.iter().enumerate() {
        let angle =
            std::f64::consts::TAU * i as f64 / arms.len() as f64 - std::f64::consts::FRAC_PI_2;
        let r = 60.0 + 60.0 * cake.edge(e).length;
        let leaf = cake.other_endpoint(e, hub);
        pos[leaf.0] = (r * angle.cos(), r * angle.sin());
    }
    pos
}

fn tree_layout(cake: &GraphCake) -> Vec<(f64, f64)> {
    let root = cake.metrics().centers[0];
    let n = cake.vertex_count();
    let mut x = vec![0.0f64; n];
    let mut depth = vec![0usize; n];
    let mut leaf_count = 0.0f64;
    // Iterative post-order: leaves take successive x slots, parents center
    // over their children.
    let mut visited = vec![false; n];
    let mut stack = vec![(root, usize::MAX, false)];
    while let Some((v, parent, processed)) = stack.pop() {
        if processed {
            let children: Vec<VertexId> = cake
                .adjacency(v)
                .iter()
                .map(|&e| cake.other_endpoint(e, v))
                .filter(|w| w.0 != parent)
                .collect();
            if children.is_empty() {
                x[v.0] = leaf_count;
                leaf_count += 1.0;
            } else {
                x[v.0] =
                    children.iter().map(|w| x[w.0]).sum::<f64>() / children.len() as f64;
            }
            continue;
        }
        if visited[v.0] {
            continue;
        }
        visited[v.0] = true;
        stack.push((v, parent, true));
        for &e in cake.adjacency(v).iter().rev() {
            let w = cake.other_endpoint(e, v);
            if w.0 != parent && !visited[w.0] {
                depth[w.0] = depth[v.0] + 1;
                stack.push((w, v.0, false));
            }
        }
    }
    (0..n).map(|v| (x[v] * 90.0, depth[v] as f64 * 80.0)).collect()
}

fn component_rings_layout(cake: &GraphCake) -> Vec<(f64, f64)> {
    let comps = cake.components();
    let mut pos = vec![(0.0, 0.0); cake.vertex_count()];
    let mut offset_x = 0.0;
    for comp in &comps {
        let k = comp.vertices.len();
        let r = 40.0 + 18.0 * k as f64;
        for (i, &v) in comp.vertices.iter().enumerate() {
            let angle = std::f64::consts::TAU * i as f64 / k as f64 - std::f64::consts::FRAC_PI_2;
            pos[v.0] = (offset_x + r + r * angle.cos(), r * angle.sin());
        }
        offset_x += 2.0 * r + 60.0;
    }
    pos
}

/// Samples an edge as a polyline from `u` to `v`. Self-loops become small
/// circles next to the vertex; repeated parallel edges bow outward.
fn edge_curve(cake: &GraphCake, pos: &[(f64, f64)], edge: EdgeId) -> Vec<(f64, f64)> {
    let e = cake.edge(edge);
    // How many earlier edges join the same endpoints (for bowing).
    let dup = cake.edges()[..edge.0]
        .iter()
        .filter(|o| (o.u, o.v) == (e.u, e.v) || (o.v, o.u) == (e.u, e.v))
        .count();
    let (pu, pv) = (pos[e.u.0], pos[e.v.0]);
    if e.u == e.v {
        let r = 16.0 + 10.0 * dup as f64;
        let center = (pu.0, pu.1 - r);
        return (0..=SAMPLES_PER_EDGE)
            .map(|i| {
                let th = std::f64::consts::FRAC_PI_2
                    + std::f64::consts::TAU * i as f64 / SAMPLES_PER_EDGE as f64;
                (center.0 + r * th.cos(), center.1 + r * th.sin())
            })
            .collect();
    }
    if dup == 0 {
        return vec![pu, pv];
    }
    // Quadratic bow perpendicular to the chord, alternating sides.
    let side = if dup % 2 == 1 { 1.0 } else { -1.0 };
    let bulge = side * (10.0 + 14.0 * dup.div_ceil(2) as f64);
    let d = (pv.0 - pu.0, pv.1 - pu.1);
    let norm = (d.0 * d.0 + d.1 * d.1).sqrt().max(1e-9);
    let perp = (-d.1 / norm, d.0 / norm);
    let mid = (
        0.5 * (pu.0 + pv.0) + bulge * perp.0,
        0.5 * (pu.1 + pv.1) + bulge * perp.1,
    );
    (0..=SAMPLES_PER_EDGE)
        .map(|i| {
            let s = i as f64 / SAMPLES_PER_EDGE as f64;
            let a = 1.0 - s;
            (
                a * a * pu.0 + 2.0 * a * s * mid.0 + s * s * pv.0,
                a * a * pu.1 + 2.0 * a * s * mid.1 + s * s * pv.1,
            )
        })
        .collect()
}

/// Point at arc-length fraction `f` along a polyline.
fn curve_point(curve: &[(f64, f64)], f: f64) -> (f64, f64) {
    let f = f.clamp(0.0, 1.0);
    let seg_len: Vec<f64> = curve
        .windows(2)
        .map(|w| ((w[1].0 - w[0].0).powi(2) + (w[1].1 - w[0].1).powi(2)).sqrt())
        .collect();
    let total: f64 = seg_len.iter().sum();
    let mut target = f * total;
    for (i, &l) in seg_len.iter().enumerate() {
        if target <= l || i + 1 == seg_len.len() {
            let s = if l > 0.0 { (target / l).clamp(0.0, 1.0) } else { 0.0 };
            return (
                curve[i].0 + s * (curve[i + 1].0 - curve[i].0),
                curve[i].1 + s * (curve[i + 1].1 - curve[i].1),
            );
        }
        target -= l;
    }
    *curve.last().expect("non-empty curve")
}

/// Sub-polyline between arc-length fractions `f0` and `f1`.
fn sample_curve(curve: &[(f64, f64)], f0: f64, f1: f64) -> Vec<(f64, f64)> {
    let steps = SAMPLES_PER_EDGE.max(2);
    (0..=steps)
        .map(|i| {
            let f = f0 + (f1 - f0) * i as f64 / steps as f64;
            curve_point(curve, f)
        })
        .collect()
}
