//! Seeded instances shared by the benchmarks.

use layercake::io::generate_instance;
use layercake::rational::rat;
use layercake::{Instance, LayeredCake, Protocol, Valuation};

/// `(protocol, n, m)` shapes benchmarked on random instances.
pub const SHAPES: [(Protocol, usize, usize); 6] = [
    (Protocol::Exact2x2, 2, 2),
    (Protocol::CutChoose2, 2, 2),
    (Protocol::Prop3x3, 3, 3),
    (Protocol::Prop3n, 6, 3),
    (Protocol::Prop, 8, 8),
    (Protocol::Prop, 12, 12),
];

pub fn random(n: usize, m: usize, cells: usize, count: u64) -> Vec<Instance> {
    (0..count).map(|seed| generate_instance(seed, n, m, cells)).collect()
}

/// Three agents on two layers, two of them sharing a valuation.
pub fn shared_triples(cells: usize, count: u64) -> Vec<Instance> {
    (0..count)
        .map(|seed| {
            let base = generate_instance(seed, 2, 2, cells);
            let shared = base.agent(0).clone();
            Instance::new(base.cake().clone(), vec![shared.clone(), shared, base.agent(1).clone()]).unwrap()
        })
        .collect()
}

pub fn uniform(n: usize, m: usize) -> Instance {
    let cake = LayeredCake::unit(m);
    let v = Valuation::uniform(&cake, &vec![rat(1, m as i64); m]).unwrap();
    Instance::new(cake, vec![v; n]).unwrap()
}
