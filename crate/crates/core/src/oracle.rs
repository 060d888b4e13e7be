//! Seeded random instances and a brute-force cross-check for the divider.
//!
//! The brute force deliberately avoids the moving-knife machinery: for each
//! start `c` on a grid it finds the arc length that gives agent A exactly
//! `t` by bisecting on A's measure — integrated piece-by-piece on the
//! original cake — and then prices the same arc for B. Agreement between
//! this scan and the knife sweep is what the derived test values rest on.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cake::{CakeClass, Division, GraphCake, PointOnCake};
use crate::divider::route;
use crate::error::{Error, Result};
use crate::tracing::Side;
use crate::valuation::{residuals, DensitySegment, Entitlement, Valuation};

/// Shape and difficulty knobs for one random instance.
#[derive(Debug, Clone)]
pub struct InstanceSpec {
    pub class: CakeClass,
    pub seed: u64,
    /// Most density pieces per edge and agent.
    pub max_segments: usize,
    /// Edges on an interval cake.
    pub path_edges: usize,
    /// Edges on a circle cake (1 means a self-loop).
    pub cycle_edges: usize,
    /// Arms of a star cake (at least 3; fewer is a path).
    pub star_arms: usize,
    /// Exact center height of a tree cake (at least 2; height-1 trees are
    /// stars).
    pub tree_height: usize,
    /// Components of a general-graph cake (at least 2).
    pub components: usize,
    /// Entitlement range to draw `t` from.
    pub t_range: (f64, f64),
    /// Give agent A a guaranteed zero-density stretch, so the knife path
    /// exercises its plateau segments.
    pub force_plateaus: bool,
}

impl InstanceSpec {
    pub fn new(class: CakeClass, seed: u64) -> Self {
        InstanceSpec {
            class,
            seed,
            max_segments: 4,
            path_edges: 2,
            cycle_edges: 3,
            star_arms: 4,
            tree_height: 3,
            components: 2,
            t_range: (0.05, 0.95),
            force_plateaus: false,
        }
    }
}

/// A generated cake with two normalized valuations and an entitlement.
#[derive(Debug, Clone)]
pub struct Instance {
    pub cake: GraphCake,
    pub va: Valuation,
    pub vb: Valuation,
    pub t: Entitlement,
}

/// Builds the instance a spec describes. The same spec always yields the
/// same instance.
pub fn generate_instance(spec: &InstanceSpec) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let cake = generate_cake(spec, &mut rng)?;
    debug_assert_eq!(cake.classify(), spec.class);
    let va = random_valuation(&cake, &mut rng, spec.max_segments, spec.force_plateaus)?;
    let vb = random_valuation(&cake, &mut rng, spec.max_segments, false)?;
    let (lo, hi) = spec.t_range;
    let t = Entitlement::new(rng.gen_range(lo..=hi))?;
    Ok(Instance { cake, va, vb, t })
}

fn generate_cake(spec: &InstanceSpec, rng: &mut ChaCha8Rng) -> Result<GraphCake> {
    let len = |rng: &mut ChaCha8Rng| rng.gen_range(0.5..2.0);
    match spec.class {
        CakeClass::Interval => {
            let n = spec.path_edges.max(1);
            let vertices: Vec<String> = (0..=n).map(|i| format!("p{i}")).collect();
            let edges = (0..n)
                .map(|i| (format!("e{i}"), format!("p{i}"), format!("p{}", i + 1), len(rng)))
                .collect();
            GraphCake::new(vertices, edges)
        }
        CakeClass::Circle => {
            let n = spec.cycle_edges.max(1);
            let vertices: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
            let edges = (0..n)
                .map(|i| {
                    (
                        format!("e{i}"),
                        format!("p{i}"),
                        format!("p{}", (i + 1) % n),
                        len(rng),
                    )
                })
                .collect();
            GraphCake::new(vertices, edges)
        }
        CakeClass::Star => {
            let n = spec.star_arms.max(3);
            let mut vertices = vec!["hub".to_string()];
            vertices.extend((0..n).map(|i| format!("w{i}")));
            let edges = (0..n)
                .map(|i| (format!("e{i}"), "hub".to_string(), format!("w{i}"), len(rng)))
                .collect();
            GraphCake::new(vertices, edges)
        }
        CakeClass::Tree => {
            // A spine of 2h edges pins the radius to exactly h; pendants at
            // depth less than h from the center cannot disturb it.
            let h = spec.tree_height.max(2);
            let mut vertices: Vec<String> = (0..=2 * h).map(|i| format!("p{i}")).collect();
            let mut edges: Vec<(String, String, String, f64)> = (0..2 * h)
                .map(|i| (format!("e{i}"), format!("p{i}"), format!("p{}", i + 1), len(rng)))
                .collect();
            let pendants = 1 + rng.gen_range(0..3);
            for k in 0..pendants {
                let d = rng.gen_range(0..h) as i64;
                let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
                let at = (h as i64 + sign * d) as usize;
                let name = format!("q{k}");
                edges.push((format!("x{k}"), format!("p{at}"), name.clone(), len(rng)));
                vertices.push(name);
            }
            GraphCake::new(vertices, edges)
        }
        CakeClass::ConnectedGraph => {
            // Random tree plus chords; a guaranteed branching keeps the
            // chords from closing the whole cake into a bare cycle.
            let nv = 5 + rng.gen_range(0..3);
            let vertices: Vec<String> = (0..nv).map(|i| format!("p{i}")).collect();
            let mut edges: Vec<(String, String, String, f64)> = (1..nv)
                .map(|i| {
                    // Three children on p0 pin its degree above two, so no
                    // chord placement can turn the cake into a bare cycle.
                    let parent = if i <= 3 { 0 } else { rng.gen_range(0..i) };
                    (format!("e{i}"), format!("p{parent}"), format!("p{i}"), len(rng))
                })
                .collect();
            let chords = 1 + rng.gen_range(0..3);
            for k in 0..chords {
                let u = rng.gen_range(0..nv);
                let v = rng.gen_range(0..nv);
                edges.push((format!("c{k}"), format!("p{u}"), format!("p{v}"), len(rng)));
            }
            GraphCake::new(vertices, edges)
        }
        CakeClass::GeneralGraph => {
            let s = spec.components.max(2);
            let mut vertices = Vec::new();
            let mut edges = Vec::new();
            for k in 0..s {
                let p = |v: &str| format!("g{k}_{v}");
                match rng.gen_range(0..3) {
                    0 => {
                        vertices.extend([p("a"), p("b")]);
                        edges.push((p("e"), p("a"), p("b"), len(rng)));
                    }
                    1 => {
                        vertices.extend([p("hub"), p("w0"), p("w1"), p("w2")]);
                        for i in 0..3 {
                            edges.push((p(&format!("e{i}")), p("hub"), p(&format!("w{i}")), len(rng)));
                        }
                    }
                    _ => {
                        vertices.extend([p("a"), p("b"), p("c")]);
                        edges.push((p("e0"), p("a"), p("b"), len(rng)));
                        edges.push((p("e1"), p("b"), p("c"), len(rng)));
                        edges.push((p("e2"), p("c"), p("a"), len(rng)));
                    }
                }
            }
            GraphCake::new(vertices, edges)
        }
    }
}

fn random_valuation(
    cake: &GraphCake,
    rng: &mut ChaCha8Rng,
    max_segments: usize,
    force_plateau: bool,
) -> Result<Valuation> {
    let ne = cake.edge_count();
    let plateau_edge = if force_plateau { rng.gen_range(0..ne) } else { ne };
    let mut per_edge = Vec::with_capacity(ne);
    for e in 0..ne {
        let len = cake.edge(crate::cake::EdgeId(e)).length;
        let mut segs = Vec::new();
        if e == plateau_edge {
            // A third of the edge with no value at all.
            segs.push(DensitySegment::new(0.0, len / 3.0, rng.gen_range(0.2..3.0)));
            segs.push(DensitySegment::new(2.0 * len / 3.0, len, rng.gen_range(0.2..3.0)));
        } else {
            let n = rng.gen_range(1..=max_segments.max(1));
            let mut cuts: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.0..len)).collect();
            cuts.push(0.0);
            cuts.push(len);
            cuts.sort_by(f64::total_cmp);
            for w in cuts.windows(2) {
                if w[1] - w[0] < 1e-9 {
                    continue;
                }
                let density = if rng.gen_bool(0.35) {
                    0.0
                } else {
                    rng.gen_range(0.2..3.0)
                };
                segs.push(DensitySegment::new(w[0], w[1], density));
            }
        }
        per_edge.push(segs);
    }
    if per_edge
        .iter()
        .flatten()
        .all(|s| s.density == 0.0 || s.hi - s.lo <= 0.0)
    {
        per_edge[0] = vec![DensitySegment::new(
            0.0,
            cake.edge(crate::cake::EdgeId(0)).length,
            1.0,
        )];
    }
    Valuation::new(cake, per_edge)?.normalize()
}

/// One grid point of the brute-force scan: the arc from `c` that is worth
/// exactly `t` to agent A, priced for agent B.
#[derive(Debug, Clone)]
pub struct ScanPoint {
    /// Arc start on the traced circle.
    pub c: f64,
    /// Arc length that makes A's value exactly `t`.
    pub arc_len: f64,
    /// Arc end, `(c + arc_len) mod 1`.
    pub kappa: f64,
    /// `|v_B(arc) - t|`.
    pub residual_b: f64,
    /// Cut points on the cake, `[start, end]`.
    pub cuts: [PointOnCake; 2],
}

/// A brute-force consensus division, re-checked on the original cake.
#[derive(Debug, Clone)]
pub struct OracleMatch {
    pub point: ScanPoint,
    pub division: Division,
    pub pieces_a: usize,
    pub pieces_b: usize,
    pub residual_a: f64,
    pub residual_b: f64,
}

/// Sweeps `grid` arc starts around the circle, solving for the A-exact arc
/// at each by bisection on measure.
pub fn scan(
    cake: &GraphCake,
    va: &Valuation,
    vb: &Valuation,
    t: Entitlement,
    grid: usize,
) -> Result<Vec<ScanPoint>> {
    if grid == 0 {
        return Err(Error::BadTracing {
            reason: "oracle grid must be positive".to_string(),
        });
    }
    va.ensure_normalized(1e-9)?;
    vb.ensure_normalized(1e-9)?;
    let (forest, tracing) = route(cake)?;
    let work = forest.as_ref().map(|f| &f.forest).unwrap_or(cake);

    let arc_value = |valuation: &Valuation, c: f64, l: f64| -> Result<f64> {
        let mut subs = if c + l <= 1.0 {
            tracing.pushforward_range(work, c, c + l)
        } else {
            tracing.pushforward_range(work, c, 1.0)
        };
        if c + l > 1.0 {
            subs.extend(tracing.pushforward_range(work, 0.0, c + l - 1.0));
        }
        // Subintervals of the forest name the same edges at the same
        // offsets as the original cake, so they can be priced directly.
        valuation.value_of_piece(cake, &subs)
    };

    let mut points = Vec::with_capacity(grid);
    for i in 0..grid {
        let c = i as f64 / grid as f64;
        // A's arc measure grows continuously from 0 to 1 in the length.
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if arc_value(va, c, mid)? < t.get() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let arc_len = hi;
        let kappa = (c + arc_len) % 1.0;
        let residual_b = (arc_value(vb, c, arc_len)? - t.get()).abs();
        points.push(ScanPoint {
            c,
            arc_len,
            kappa,
            residual_b,
            cuts: [
                tracing.point_at(work, c, Side::Forward),
                tracing.point_at(work, c + arc_len, Side::Backward),
            ],
        });
    }
    Ok(points)
}

fn materialize(
    cake: &GraphCake,
    va: &Valuation,
    vb: &Valuation,
    t: Entitlement,
    point: ScanPoint,
) -> Result<OracleMatch> {
    let (forest, tracing) = route(cake)?;
    let work = forest.as_ref().map(|f| &f.forest).unwrap_or(cake);
    let division_work = tracing.pushforward_division(work, point.c, point.arc_len);
    let division = match &forest {
        Some(f) => f.merge_division(cake, &division_work),
        None => division_work,
    };
    let (pieces_a, pieces_b) = crate::cake::count_agent_pieces(cake, &division)?;
    let (residual_a, residual_b) = residuals(cake, va, vb, &division, t)?;
    Ok(OracleMatch {
        point,
        division,
        pieces_a,
        pieces_b,
        residual_a,
        residual_b,
    })
}

/// Runs [`scan`] and materializes the division at the best grid point.
pub fn best_match(
    cake: &GraphCake,
    va: &Valuation,
    vb: &Valuation,
    t: Entitlement,
    grid: usize,
) -> Result<OracleMatch> {
    let points = scan(cake, va, vb, t, grid)?;
    let point = points
        .into_iter()
        .min_by(|p, q| p.residual_b.total_cmp(&q.residual_b))
        .expect("grid is positive");
    materialize(cake, va, vb, t, point)
}

/// The grid-agreement tolerance at resolution `step`: moving a cut by one
/// grid cell moves either agent's value by at most `step * maxDensity` on
/// the traced circle, so a true consensus cut prices within
/// `2 * step * maxDensity` of some grid pair.
pub fn oracle_threshold(
    cake: &GraphCake,
    va: &Valuation,
    vb: &Valuation,
    step: f64,
) -> Result<f64> {
    let (forest, tracing) = route(cake)?;
    let work = forest.as_ref().map(|f| &f.forest).unwrap_or(cake);
    let cva = tracing.pullback(work, va)?;
    let cvb = tracing.pullback(work, vb)?;
    Ok(2.0 * step * cva.max_density().max(cvb.max_density()))
}

/// Every near-consensus two-cut division at resolution `step`: grid starts
/// whose A-exact arc prices within [`oracle_threshold`] of `t` for B.
pub fn brute_force_two_cut(
    cake: &GraphCake,
    va: &Valuation,
    vb: &Valuation,
    t: Entitlement,
    step: f64,
) -> Result<Vec<OracleMatch>> {
    if !(step > 0.0 && step < 1.0) {
        return Err(Error::BadTracing {
            reason: format!("oracle step {step} out of range"),
        });
    }
    let threshold = oracle_threshold(cake, va, vb, step)?;
    let grid = (1.0 / step).round() as usize;
    let points = scan(cake, va, vb, t, grid)?;
    points
        .into_iter()
        .filter(|p| p.residual_b <= threshold)
        .map(|p| materialize(cake, va, vb, t, p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cake::count_agent_pieces;
    use crate::consensus::SolverConfig;
    use crate::divider::divide;

    fn ent(t: f64) -> Entitlement {
        Entitlement::new(t).unwrap()
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = InstanceSpec::new(CakeClass::Tree, 7);
        let one = generate_instance(&spec).unwrap();
        let two = generate_instance(&spec).unwrap();
        assert_eq!(format!("{one:?}"), format!("{two:?}"));
        let other = generate_instance(&InstanceSpec::new(CakeClass::Tree, 8)).unwrap();
        assert_ne!(format!("{one:?}"), format!("{other:?}"));
    }

    #[test]
    fn generated_instances_match_their_spec() {
        for class in [
            CakeClass::Interval,
            CakeClass::Circle,
            CakeClass::Star,
            CakeClass::Tree,
            CakeClass::ConnectedGraph,
            CakeClass::GeneralGraph,
        ] {
            for seed in 0..12 {
                let spec = InstanceSpec::new(class, seed);
                let inst = generate_instance(&spec).unwrap();
                assert_eq!(inst.cake.classify(), class, "seed {seed}");
                assert!((inst.va.total() - 1.0).abs() < 1e-9);
                assert!((inst.vb.total() - 1.0).abs() < 1e-9);
                let t = inst.t.get();
                assert!((0.05..=0.95).contains(&t));
            }
        }
    }

    #[test]
    fn tree_instances_have_the_requested_height() {
        for h in 2..5 {
            let mut spec = InstanceSpec::new(CakeClass::Tree, 100 + h as u64);
            spec.tree_height = h;
            let inst = generate_instance(&spec).unwrap();
            assert_eq!(inst.cake.metrics().tree_height, Some(h));
        }
    }

    #[test]
    fn general_instances_have_the_requested_components() {
        for s in 2..5 {
            let mut spec = InstanceSpec::new(CakeClass::GeneralGraph, 40 + s as u64);
            spec.components = s;
            let inst = generate_instance(&spec).unwrap();
            assert_eq!(inst.cake.metrics().components, s);
        }
    }

    #[test]
    fn forced_plateaus_leave_a_gap_in_va() {
        let mut spec = InstanceSpec::new(CakeClass::Interval, 3);
        spec.force_plateaus = true;
        let inst = generate_instance(&spec).unwrap();
        let has_gap = (0..inst.cake.edge_count())
            .any(|e| inst.va.segments(e).iter().any(|s| s.density == 0.0));
        assert!(has_gap);
    }

    #[test]
    fn oracle_agrees_with_the_solver_on_random_instances() {
        for (class, seed) in [
            (CakeClass::Interval, 11),
            (CakeClass::Circle, 12),
            (CakeClass::Star, 13),
            (CakeClass::Tree, 14),
            (CakeClass::ConnectedGraph, 15),
            (CakeClass::GeneralGraph, 16),
        ] {
            let inst = generate_instance(&InstanceSpec::new(class, seed)).unwrap();
            let report = divide(
                &inst.cake,
                &inst.va,
                &inst.vb,
                inst.t,
                1e-9,
                SolverConfig::default(),
            )
            .unwrap();
            let oracle = best_match(&inst.cake, &inst.va, &inst.vb, inst.t, 2000).unwrap();
            // Both must hit consensus; the oracle at grid resolution, the
            // solver at full tolerance.
            assert!(
                report.residual_a <= 1e-9 && report.residual_b <= 1e-9,
                "{class:?} seed {seed}: solver residuals {} / {}",
                report.residual_a,
                report.residual_b,
            );
            assert!(
                oracle.residual_a <= 1e-2 && oracle.residual_b <= 1e-2,
                "{class:?}: oracle residuals {} / {}",
                oracle.residual_a,
                oracle.residual_b,
            );
            let (pa, pb) = count_agent_pieces(&inst.cake, &oracle.division).unwrap();
            assert!(pa <= report.bound.max(report.pieces_a));
            let _ = pb;
        }
    }

    /// The sharp star: every A-exact arc spans two arms, so no consensus
    /// division can avoid splitting both agents.
    #[test]
    fn sharp_star_scan_never_finds_a_same_arm_cut() {
        let cake = GraphCake::new(
            vec!["R", "w1", "w2", "w3"],
            vec![
                ("e1", "R", "w1", 1.0),
                ("e2", "R", "w2", 1.0),
                ("e3", "R", "w3", 1.0),
            ],
        )
        .unwrap();
        let outer = vec![DensitySegment::new(0.5, 1.0, 2.0 / 3.0)];
        let inner = vec![DensitySegment::new(0.0, 0.5, 2.0 / 3.0)];
        let va = Valuation::new(&cake, vec![outer.clone(), outer.clone(), outer]).unwrap();
        let vb = Valuation::new(&cake, vec![inner.clone(), inner.clone(), inner]).unwrap();

        let points = scan(&cake, &va, &vb, ent(0.5), 600).unwrap();
        assert!(points.iter().all(|p| p.cuts[0].edge != p.cuts[1].edge));

        // The true consensus cuts sit at circle positions 1/12, 5/12, 9/12;
        // 600 divides 12, so the scan hits them exactly.
        let best = best_match(&cake, &va, &vb, ent(0.5), 600).unwrap();
        assert!(best.residual_a <= 1e-9 && best.residual_b <= 1e-9);
        assert!((best.point.c - 1.0 / 12.0).abs() < 1e-12, "c = {}", best.point.c);
        assert_eq!((best.pieces_a, best.pieces_b), (2, 2));

        // Every near-consensus pair splits both agents: there is no
        // (1, <=2) division to be found at any resolution.
        for step in [1e-2, 1e-3] {
            let matches = brute_force_two_cut(&cake, &va, &vb, ent(0.5), step).unwrap();
            assert!(!matches.is_empty(), "step {step} finds the true cuts");
            assert!(matches
                .iter()
                .all(|m| (m.pieces_a, m.pieces_b) == (2, 2)));
        }
    }
}
