mod common;

use common::*;
use layercake::cuts::{diagonal_cut, merge, two_knife_cut, DiagonalShape, Side};
use layercake::io::generate::rng;
use layercake::io::{generate_instance, load_instance, save_instance};
use layercake::query::{cut_short, eval_short, total_value};
use layercake::rational::{int, rat, zero};
use layercake::switching::PreferenceMargin;
use layercake::verify::riemann_value;
use layercake::{fairness_report, Instance, LayeredPiece, MultiAllocation, Piece};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>(), m in 1usize..4) {
        let mut r = rng(seed);
        let cake = random_cake(&mut r, m);
        let p = random_piece(&mut r, &cake);
        for piece in p.layers() {
            let again = Piece::normalize(piece.intervals().to_vec());
            prop_assert_eq!(&again, piece);
        }
    }

    #[test]
    fn diagonal_cut_partitions_the_cake(seed in any::<u64>(), m in 1usize..7) {
        let mut r = rng(seed);
        let cake = random_cake(&mut r, m);
        let v = random_agent(&mut r, &cake);
        let x = lattice(&mut r);
        let cut = diagonal_cut(&cake, &x);
        let a = MultiAllocation::new(cake.clone(), vec![cut.lr.clone(), cut.rl.clone()]).unwrap();
        prop_assert!(a.is_complete() && a.is_contiguous());
        // with three or more layers a diagonal piece stacks layers over the same stretch
        if m <= 2 {
            prop_assert!(a.is_feasible());
        }
        prop_assert_eq!(v.value(&cut.lr) + v.value(&cut.rl), v.total());
        let shape = DiagonalShape::for_layers(m);
        prop_assert_eq!(shape.lr_value(&v, &x), v.value(&cut.lr));
    }

    #[test]
    fn two_knives_partition_the_cake(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cake = random_cake(&mut r, 2);
        let (a, b) = (lattice(&mut r), lattice(&mut r));
        let (x, y) = if a <= b { (a, b) } else { (b, a) };
        let t = two_knife_cut(&cake, &x, &y).unwrap();
        let alloc = MultiAllocation::new(cake, vec![t.tlr, t.trl]).unwrap();
        prop_assert!(alloc.is_complete() && alloc.is_feasible());
    }

    #[test]
    fn cut_inverts_eval(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cake = random_cake(&mut r, 2);
        let v = random_agent(&mut r, &cake);
        let layer = r.gen_range(0..2);
        let span = &cake.layers()[layer];
        let x = span.lo().clone();
        let available = v.layer(layer).total().clone();
        let p = &available * rat(r.gen_range(0..=8), 8);
        let y = cut_short(&v, layer, &x, &p).unwrap();
        prop_assert_eq!(eval_short(&v, layer, &x, &y).unwrap(), p);
    }

    #[test]
    fn merge_lift_round_trip(seed in any::<u64>(), m in 2usize..9) {
        let mut r = rng(seed);
        let cake = random_cake(&mut r, m);
        let x = lattice(&mut r);
        let side = if r.gen() { Side::Lr } else { Side::Rl };
        let merged = merge(&cake, &x, side).unwrap();
        let v = random_agent(&mut r, &cake);
        // the merged cake carries exactly the value of the diagonal piece
        let shape = DiagonalShape::for_layers(m);
        let piece = match side { Side::Lr => shape.lr(&cake, &x), Side::Rl => shape.rl(&cake, &x) };
        prop_assert_eq!(merged.transport(&v).total(), v.value(&piece));
        prop_assert_eq!(merged.footprint(), piece);
        let staircase = random_staircase(&mut r, &merged.cake);
        let lifted = merged.lift_piece(&staircase).unwrap();
        prop_assert!(lifted.is_contiguous() && lifted.is_non_overlapping());
        prop_assert_eq!(merged.transport(&v).value(&staircase), v.value(&lifted));
        // on a two-layer merge, a diagonal cut lifts to a partition of the piece
        if merged.m() == 2 {
            let sub = diagonal_cut(&merged.cake, &lattice(&mut r));
            let a = MultiAllocation::new(merged.cake.clone(), vec![sub.lr, sub.rl]).unwrap();
            let lifted = merged.lift_allocation(&a).unwrap();
            prop_assert!(lifted.is_contiguous() && lifted.is_feasible());
            prop_assert_eq!(lifted.piece(0).union(lifted.piece(1)), merged.footprint());
        }
    }

    #[test]
    fn oracle_agrees_with_queries(seed in any::<u64>(), m in 1usize..5, res in 1u32..50) {
        let mut r = rng(seed);
        let cake = random_cake(&mut r, m);
        let v = random_agent(&mut r, &cake);
        let p = random_piece(&mut r, &cake);
        prop_assert_eq!(riemann_value(&v, &p, res), total_value(&v, &p));
        prop_assert_eq!(riemann_value(&v, &cake.whole(), res), v.total());
    }

    #[test]
    fn margins_are_antisymmetric(seed in any::<u64>(), m in 1usize..6) {
        let mut r = rng(seed);
        let cake = random_cake(&mut r, m);
        let v = random_agent(&mut r, &cake);
        let d = PreferenceMargin::new(0, &v, &DiagonalShape::for_layers(m));
        prop_assert_eq!(d.at(&zero()), -d.at(&int(1)));
    }

    #[test]
    fn fairness_implications(seed in any::<u64>(), n in 2usize..5, m in 1usize..4) {
        let mut r = rng(seed);
        let inst = generate_instance(r.gen(), n, m, r.gen_range(1..4));
        // a random complete allocation: consecutive stretches per layer
        let pieces = random_partition(&mut r, &inst, n);
        let a = MultiAllocation::new(inst.cake().clone(), pieces).unwrap();
        prop_assert!(a.is_complete());
        let rep = fairness_report(&inst, &a).unwrap();
        if rep.exact {
            prop_assert!(rep.equitable && rep.proportional);
        }
        if rep.envy_free {
            prop_assert!(rep.proportional);
        }
        for i in 0..n {
            prop_assert_eq!(rep.values.row_sum(i), inst.agent(i).total());
        }
    }

    #[test]
    fn documents_round_trip(seed in any::<u64>(), n in 1usize..4, m in 1usize..4, cells in 1usize..5) {
        let inst = generate_instance(seed, n, m, cells);
        let text = save_instance(&inst);
        let back = load_instance(text.as_bytes()).unwrap();
        prop_assert_eq!(save_instance(&back), text);
        prop_assert_eq!(back, inst);
    }
}

fn random_partition<R: Rng>(r: &mut R, inst: &Instance, n: usize) -> Vec<LayeredPiece> {
    let m = inst.m();
    let mut parts: Vec<Vec<(usize, layercake::Interval)>> = vec![Vec::new(); n];
    for (l, layer) in inst.cake().layers().iter().enumerate() {
        let mut cuts: Vec<_> = (0..n - 1).map(|_| lattice(r)).collect();
        cuts.push(layer.lo().clone());
        cuts.push(layer.hi().clone());
        cuts.sort();
        let mut owners: Vec<usize> = (0..n).collect();
        owners.shuffle(r);
        for (k, w) in cuts.windows(2).enumerate() {
            if let Some(iv) = layer.clip(&w[0], &w[1]) {
                parts[owners[k % n]].push((l, iv));
            }
        }
    }
    parts.into_iter().map(|p| LayeredPiece::from_parts(m, p)).collect()
}
