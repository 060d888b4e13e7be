//! Shared fixtures for the criterion benches in `benches/`.

use consensus_cake::{generate_instance, CakeClass, Instance, InstanceSpec};

/// One mid-sized instance per cake class, seeds pinned so timings compare
/// across runs and checkouts.
pub fn representative() -> Vec<(&'static str, Instance)> {
    [
        CakeClass::Interval,
        CakeClass::Circle,
        CakeClass::Star,
        CakeClass::Tree,
        CakeClass::ConnectedGraph,
        CakeClass::GeneralGraph,
    ]
    .into_iter()
    .map(|class| {
        let mut spec = InstanceSpec::new(class, 2024);
        spec.max_segments = 5;
        let inst = generate_instance(&spec).expect("fixture generates");
        (class.as_str(), inst)
    })
    .collect()
}
