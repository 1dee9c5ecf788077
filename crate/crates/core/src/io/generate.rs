//! Seeded random step-density instances.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Interval, LayeredCake};
use crate::rational::{int, zero, Rational};
use crate::valuation::{Instance, StepDensity, Valuation};

/// Raw breakpoints are drawn from this many lattice steps per cell.
const STEPS_PER_CELL: u64 = 8;
const MAX_WEIGHT: i64 = 9;

/// Deterministic RNG for a seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_density<R: Rng>(rng: &mut R, layer: &Interval, cells: usize) -> StepDensity {
    if layer.is_degenerate() {
        return StepDensity::new(vec![layer.lo().clone()], vec![]).expect("single breakpoint");
    }
    let cells = cells.max(1);
    let steps = STEPS_PER_CELL * cells as u64;
    let mut cuts: Vec<usize> = sample(rng, steps as usize - 1, cells - 1)
        .into_iter()
        .map(|k| k + 1)
        .collect();
    cuts.sort_unstable();
    let scale = int(steps as i64);
    let len = layer.length();
    let mut bps = vec![layer.lo().clone()];
    bps.extend(cuts.iter().map(|&k| layer.lo() + &len * int(k as i64) / &scale));
    bps.push(layer.hi().clone());
    // one cell in four is empty, to exercise flat stretches
    let values = (0..cells)
        .map(|_| {
            if rng.gen_ratio(1, 4) {
                zero()
            } else {
                int(rng.gen_range(1..=MAX_WEIGHT))
            }
        })
        .collect();
    StepDensity::new(bps, values).expect("generated density is valid")
}

/// A valuation on `cake` with `cells` cells per layer, scaled to total 1.
/// Layers of positive length always carry some value overall.
pub fn random_valuation<R: Rng>(rng: &mut R, cake: &LayeredCake, cells: usize) -> Valuation {
    let mut densities: Vec<StepDensity> = cake.layers().iter().map(|l| random_density(rng, l, cells)).collect();
    let raw: Rational = densities.iter().fold(zero(), |a, d| a + d.total());
    let raw = if raw == zero() {
        // everything drew zero: fall back to uniform on the first proper layer
        let l = cake
            .layers()
            .iter()
            .position(|l| !l.is_degenerate())
            .expect("cake has a proper layer");
        densities[l] = StepDensity::uniform(&cake.layers()[l], int(1)).expect("proper layer");
        int(1)
    } else {
        raw
    };
    Valuation::new(
        densities
            .into_iter()
            .map(|d| {
                let v = d.values().iter().map(|x| x / &raw).collect();
                StepDensity::new(d.breakpoints().to_vec(), v).expect("scaling keeps validity")
            })
            .collect(),
    )
}

/// `n` agents on `m` unit layers, `cells` cells per layer. A pure function
/// of its arguments.
pub fn generate_instance(seed: u64, n: usize, m: usize, cells: usize) -> Instance {
    let mut r = rng(seed);
    let cake = LayeredCake::unit(m.max(1));
    let agents = (0..n.max(1)).map(|_| random_valuation(&mut r, &cake, cells)).collect();
    Instance::new(cake, agents).expect("generated instance is normalized")
}
