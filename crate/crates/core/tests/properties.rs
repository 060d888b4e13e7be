//! Randomized invariants: measure preservation along the whole pipeline,
//! piece bounds per cake class, and the tracing lemma on trees.

use consensus_cake::*;
use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CLASSES: [CakeClass; 6] = [
    CakeClass::Interval,
    CakeClass::Circle,
    CakeClass::Star,
    CakeClass::Tree,
    CakeClass::ConnectedGraph,
    CakeClass::GeneralGraph,
];

fn instance(class: CakeClass, seed: u64, plateaus: bool) -> Instance {
    let mut spec = InstanceSpec::new(class, seed);
    spec.force_plateaus = plateaus;
    generate_instance(&spec).unwrap()
}

/// Builds a circle valuation from proptest-chosen weights: widths are
/// normalized to partition [0, 1], and some pieces are worthless.
fn circle_valuation(raw: &[(f64, f64)]) -> CircleValuation {
    let total_w: f64 = raw.iter().map(|(w, _)| w).sum();
    let mut segments = Vec::new();
    let mut lo = 0.0;
    for (i, &(w, d)) in raw.iter().enumerate() {
        let hi = if i + 1 == raw.len() { 1.0 } else { lo + w / total_w };
        // Keep at least one piece valuable so the mass is positive.
        let density = if i == 0 { d.max(0.05) } else { d };
        segments.push(DensitySegment::new(lo, hi, density));
        lo = hi;
    }
    CircleValuation::new(segments).unwrap()
}

proptest! {
    #[test]
    fn quantile_inverts_the_cdf(
        raw in proptest::collection::vec(
            (0.05f64..1.0, prop_oneof![Just(0.0), 0.05f64..4.0]),
            1..8,
        ),
        y in 1e-6f64..1.0,
    ) {
        let v = circle_valuation(&raw);
        let x = v.quantile(y);
        prop_assert!((0.0..=1.0).contains(&x));
        prop_assert!((v.cdf(x) - y).abs() <= 1e-12, "cdf(quantile({y})) = {}", v.cdf(x));
    }

    #[test]
    fn quantile_is_monotone(
        raw in proptest::collection::vec(
            (0.05f64..1.0, prop_oneof![Just(0.0), 0.05f64..4.0]),
            1..8,
        ),
        y1 in 1e-6f64..1.0,
        y2 in 1e-6f64..1.0,
    ) {
        let v = circle_valuation(&raw);
        let (lo, hi) = if y1 <= y2 { (y1, y2) } else { (y2, y1) };
        prop_assert!(v.quantile(lo) <= v.quantile(hi));
    }

    #[test]
    fn piece_values_are_additive(
        cut in 0.0f64..1.0,
        lo in 0.0f64..0.5,
        span in 0.1f64..0.5,
        seed in 0u64..1000,
    ) {
        let inst = instance(CakeClass::Interval, seed, false);
        let edge = EdgeId(0);
        let len = inst.cake.edge(edge).length;
        let (a, b) = (lo * len, (lo + span).min(1.0) * len);
        let m = a + (b - a) * cut;
        let whole = inst.va
            .value_of_piece(&inst.cake, &[SubInterval::new(edge, a, b)])
            .unwrap();
        let left = inst.va
            .value_of_piece(&inst.cake, &[SubInterval::new(edge, a, m)])
            .unwrap();
        let right = inst.va
            .value_of_piece(&inst.cake, &[SubInterval::new(edge, m, b)])
            .unwrap();
        prop_assert!((left + right - whole).abs() <= 1e-12);
    }
}

/// The tracing pulls a cake valuation back to the circle without creating
/// or destroying mass, on any window.
#[test]
fn pullback_preserves_measure_on_windows() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for (class, seeds) in [
        (CakeClass::Interval, 0..10u64),
        (CakeClass::Circle, 0..10),
        (CakeClass::Star, 0..10),
        (CakeClass::Tree, 0..10),
    ] {
        for seed in seeds {
            let inst = instance(class, seed, false);
            let tracing = match class {
                CakeClass::Interval => Tracing::path(&inst.cake).unwrap(),
                CakeClass::Circle => Tracing::circle(&inst.cake).unwrap(),
                CakeClass::Star => Tracing::star(&inst.cake).unwrap(),
                _ => Tracing::tree(&inst.cake, inst.cake.metrics().centers[0]).unwrap(),
            };
            let cva = tracing.pullback(&inst.cake, &inst.va).unwrap();
            for _ in 0..20 {
                let a: f64 = rng.gen_range(0.0..1.0);
                let b: f64 = rng.gen_range(0.0..1.0);
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                let subs = tracing.pushforward_range(&inst.cake, lo, hi);
                let direct = inst.va.value_of_piece(&inst.cake, &subs).unwrap();
                let on_circle = cva.cdf(hi) - cva.cdf(lo);
                assert!(
                    (direct - on_circle).abs() <= 1e-10,
                    "{class:?} seed {seed}: window [{lo}, {hi}] {direct} vs {on_circle}"
                );
            }
        }
    }
}

/// Pausing a tree tracing anywhere leaves the traced part connected and
/// the untraced part in at most height-plus-one pieces.
#[test]
fn tree_tracing_lemma_holds_everywhere() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..15 {
        let mut spec = InstanceSpec::new(CakeClass::Tree, seed);
        spec.tree_height = 2 + (seed % 3) as usize;
        let inst = generate_instance(&spec).unwrap();
        let h = inst.cake.metrics().tree_height.unwrap();
        let tracing = Tracing::tree(&inst.cake, inst.cake.metrics().centers[0]).unwrap();
        for i in 0..40 {
            let x: f64 = if i < 8 {
                [0.0, 1e-9, 0.25, 0.5, 0.75, 1.0 - 1e-9, 1.0, 0.999][i]
            } else {
                rng.gen_range(0.0..1.0)
            };
            let division = tracing.traced_split(&inst.cake, x);
            let traced = count_connected_pieces(&inst.cake, &division.a);
            let untraced = count_connected_pieces(&inst.cake, &division.b);
            assert!(traced <= 1, "seed {seed}, x = {x}: traced in {traced} pieces");
            assert!(
                untraced <= h + 1,
                "seed {seed}, x = {x}: untraced in {untraced} > {} pieces",
                h + 1
            );
        }
    }
}

/// Re-hanging a graph as a forest keeps every edge's identity and pins the
/// height at radius plus one or less.
#[test]
fn edge_spanning_forest_invariants() {
    for class in [CakeClass::ConnectedGraph, CakeClass::GeneralGraph] {
        for seed in 0..25 {
            let inst = instance(class, seed, false);
            let cake = &inst.cake;
            let forest = edge_spanning_forest(cake).unwrap();
            let comps = cake.components();
            assert_eq!(forest.roots.len(), comps.len());
            for (k, comp) in comps.iter().enumerate() {
                assert!(
                    forest.heights[k] <= comp.radius + 1,
                    "{class:?} seed {seed}: height {} vs radius {}",
                    forest.heights[k],
                    comp.radius
                );
            }
            assert_eq!(forest.forest.edge_count(), cake.edge_count());
            for e in 0..cake.edge_count() {
                let (old, new) = (cake.edge(EdgeId(e)), forest.forest.edge(EdgeId(e)));
                assert_eq!(old.name, new.name);
                assert_eq!(old.length, new.length);
            }
            // Each re-hung component is a tree.
            let fc = forest.forest.components();
            for comp in &fc {
                assert_eq!(comp.edges.len(), comp.vertices.len() - 1);
            }
        }
    }
}

/// The full pipeline respects consensus and piece bounds on every class.
#[test]
fn divide_meets_consensus_and_bounds() {
    for class in CLASSES {
        for seed in 0..30 {
            let inst = instance(class, seed, seed % 2 == 0);
            let report = divide(
                &inst.cake,
                &inst.va,
                &inst.vb,
                inst.t,
                1e-9,
                SolverConfig::default(),
            )
            .unwrap_or_else(|e| panic!("{class:?} seed {seed}: {e}"));
            validate_division(&inst.cake, &report.division)
                .unwrap_or_else(|e| panic!("{class:?} seed {seed}: {e}"));
            assert!(
                report.residual_a <= 1e-9 && report.residual_b <= 1e-9,
                "{class:?} seed {seed}: residuals {} / {}",
                report.residual_a,
                report.residual_b
            );
            assert!(
                consensus_check(&inst.cake, &inst.va, &inst.vb, &report.division, inst.t, 1e-9)
                    .unwrap()
            );
            assert!(
                report.bound_holds(),
                "{class:?} seed {seed}: pieces ({}, {}) vs bound {}",
                report.pieces_a,
                report.pieces_b,
                report.bound
            );
        }
    }
}

/// Swapping the agents and complementing the entitlement is still a valid
/// consensus problem; the divisions may differ, the guarantees may not.
#[test]
fn entitlement_complement_symmetry() {
    for class in CLASSES {
        for seed in 40..55 {
            let inst = instance(class, seed, false);
            let complement = Entitlement::new(1.0 - inst.t.get()).unwrap();
            for (va, vb, t) in [(&inst.va, &inst.vb, inst.t), (&inst.vb, &inst.va, complement)] {
                let report = divide(&inst.cake, va, vb, t, 1e-9, SolverConfig::default())
                    .unwrap_or_else(|e| panic!("{class:?} seed {seed}, t = {}: {e}", t.get()));
                assert!(
                    consensus_check(&inst.cake, va, vb, &report.division, t, 1e-9).unwrap(),
                    "{class:?} seed {seed}, t = {}",
                    t.get()
                );
                assert!(
                    report.bound_holds(),
                    "{class:?} seed {seed}, t = {}: pieces ({}, {}) vs bound {}",
                    t.get(),
                    report.pieces_a,
                    report.pieces_b,
                    report.bound
                );
            }
        }
    }
}

/// On disconnected cakes the two cuts touch at most two components, and
/// the per-case counts of wholly assigned components hold.
#[test]
fn general_graphs_leave_components_whole() {
    for seed in 0..40 {
        let mut spec = InstanceSpec::new(CakeClass::GeneralGraph, seed);
        spec.components = 2 + (seed % 3) as usize;
        let inst = generate_instance(&spec).unwrap();
        let s = inst.cake.metrics().components;
        let report = divide(
            &inst.cake,
            &inst.va,
            &inst.vb,
            inst.t,
            1e-9,
            SolverConfig::default(),
        )
        .unwrap();
        let ownership = component_ownership(&inst.cake, &report.division);
        assert_eq!(ownership.len(), s);
        let partial = ownership.iter().filter(|o| o.is_partial(1e-9)).count();
        let whole = s - partial;
        match report.theorem_case {
            TheoremCase::GeneralSameComponent => {
                assert!(partial <= 1, "seed {seed}: {partial} partial components");
                assert!(whole >= s - 1);
            }
            TheoremCase::GeneralTwoComponents => {
                assert!(partial <= 2, "seed {seed}: {partial} partial components");
                assert!(whole >= s - 2);
            }
            other => panic!("seed {seed}: unexpected case {other:?}"),
        }
        // Total bound, and the sharper per-case component structure.
        assert!(report.pieces_a + report.pieces_b <= s + 2 * report.metrics.radius + 4);
    }
}

/// Identical inputs give identical reports.
#[test]
fn divide_is_deterministic() {
    let inst = instance(CakeClass::ConnectedGraph, 21, true);
    let run = || {
        let r = divide(
            &inst.cake,
            &inst.va,
            &inst.vb,
            inst.t,
            1e-9,
            SolverConfig::default(),
        )
        .unwrap();
        format!("{r:?}")
    };
    assert_eq!(run(), run());
}
