#![allow(dead_code)]

use layercake::cuts::MergedCake;
use layercake::io::random_valuation;
use layercake::rational::{int, rat};
use layercake::{Instance, Interval, LayeredCake, LayeredPiece, Piece, Rational, Valuation};
use rand::seq::SliceRandom;
use rand::Rng;

/// Lattice used for random cake layers and piece endpoints.
pub const LATTICE: i64 = 24;

pub fn lattice<R: Rng>(rng: &mut R) -> Rational {
    rat(rng.gen_range(0..=LATTICE), LATTICE)
}

/// Layers are random proper subintervals of `[0, 1]` on the lattice.
pub fn random_cake<R: Rng>(rng: &mut R, m: usize) -> LayeredCake {
    let layers = (0..m)
        .map(|_| loop {
            let (a, b) = (lattice(rng), lattice(rng));
            if a < b {
                break Interval::new(a, b).unwrap();
            }
        })
        .collect();
    LayeredCake::new(layers).unwrap()
}

pub fn random_instance<R: Rng>(rng: &mut R, cake: &LayeredCake, n: usize, cells: usize) -> Instance {
    let agents = (0..n).map(|_| random_valuation(rng, cake, cells)).collect();
    Instance::new(cake.clone(), agents).unwrap()
}

pub fn random_agent<R: Rng>(rng: &mut R, cake: &LayeredCake) -> Valuation {
    let cells = rng.gen_range(1..=6);
    random_valuation(rng, cake, cells)
}

/// Up to two random intervals per layer, inside the layer.
pub fn random_piece<R: Rng>(rng: &mut R, cake: &LayeredCake) -> LayeredPiece {
    let per_layer = cake
        .layers()
        .iter()
        .map(|layer| {
            let k = rng.gen_range(0..=2);
            let raw = (0..k)
                .filter_map(|_| {
                    let (a, b) = (lattice(rng), lattice(rng));
                    let (a, b) = if a <= b { (a, b) } else { (b, a) };
                    layer.clip(&a, &b)
                })
                .collect();
            Piece::normalize(raw)
        })
        .collect();
    LayeredPiece::new(per_layer)
}

/// A contiguous piece of `cake` whose layers sit on disjoint stretches of
/// the x-axis, in a random layer order.
pub fn random_staircase<R: Rng>(rng: &mut R, cake: &LayeredCake) -> LayeredPiece {
    let m = cake.m();
    let mut points: Vec<Rational> = (0..2 * m).map(|_| lattice(rng)).collect();
    points.sort();
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    let parts = order.iter().enumerate().filter_map(|(k, &l)| {
        if rng.gen_ratio(1, 5) {
            return None;
        }
        cake.layers()[l]
            .clip(&points[2 * k], &points[2 * k + 1])
            .map(|iv| (l, iv))
    });
    LayeredPiece::from_parts(m, parts)
}

/// A random staircase on a merged cake.
pub fn random_merged_piece<R: Rng>(rng: &mut R, merged: &MergedCake) -> LayeredPiece {
    random_staircase(rng, &merged.cake)
}

pub fn third() -> Rational {
    rat(1, 3)
}

pub fn share(n: usize) -> Rational {
    int(1) / int(n as i64)
}
