//! Proportional division for three agents on three layers.

use super::two::cut_and_choose;
use super::{require, Certificate, Ctx, Problem, Protocol, ProtocolResult};
use crate::cuts::{DiagonalShape, MergedCake, Segment};
use crate::error::{Error, Result};
use crate::model::LayeredPiece;
use crate::rational::{one, zero, Rational};
use crate::switching::switching_point_for;
use crate::valuation::Instance;

/// The ordered layer pair `(p, q)` with `V(L_p) >= share >= V(L_q)` that
/// the most agents satisfy, and the lowest agent satisfying it.
fn choose_pair(layer_values: &[Vec<Rational>], shares: &[Rational]) -> (usize, usize, usize) {
    let fits = |i: usize, p: usize, q: usize| layer_values[i][p] >= shares[i] && shares[i] >= layer_values[i][q];
    let mut best = (0, 1, 0);
    let mut best_count = 0;
    for p in 0..3 {
        for q in (0..3).filter(|&q| q != p) {
            let count = (0..shares.len()).filter(|&i| fits(i, p, q)).count();
            if count > best_count {
                best_count = count;
                let cutter = (0..shares.len()).find(|&i| fits(i, p, q)).unwrap();
                best = (p, q, cutter);
            }
        }
    }
    best
}

pub(crate) fn solve_3x3(p: &Problem, ctx: &mut Ctx) -> Result<Vec<LayeredPiece>> {
    debug_assert_eq!((p.n(), p.m()), (3, 3));
    let shares: Vec<Rational> = (0..3).map(|i| p.share(i)).collect();
    let layer_values: Vec<Vec<Rational>> = (0..3)
        .map(|i| {
            ctx.session.tally(p.ids[i]).short_eval += 3;
            (0..3).map(|l| p.agents[i].layer_value(l)).collect()
        })
        .collect();
    let (lp, lq, cutter) = choose_pair(&layer_values, &shares);
    let lr = (0..3).find(|&l| l != lp && l != lq).unwrap();
    let v = &p.agents[cutter];
    let layers = p.cake.layers();

    // P1: the pair diagonal worth one share to the cutter, cut at the
    // middle of the leftmost stretch where it is worth exactly that
    let pair = DiagonalShape::pair(3, lp, lq);
    let y = pair.profile(v).leftmost_midpoint(&shares[cutter])?;
    ctx.session.tally(p.ids[cutter]).long_cut += 1;
    let first = pair.lr(&p.cake, &y);
    ctx.note("y", &y);

    // P2, P3: split the rest, chained as (L_q ∩ [0,y] | L_p ∩ [y,1]) over L_r
    let mut chain = Vec::new();
    if let Some(iv) = layers[lq].clip(&zero(), &y) {
        chain.push(Segment { layer: lq, span: iv });
    }
    if let Some(iv) = layers[lp].clip(&y, &one()) {
        chain.push(Segment { layer: lp, span: iv });
    }
    let bottom = vec![Segment {
        layer: lr,
        span: layers[lr].clone(),
    }];
    let rest = MergedCake::from_chains(&p.cake, vec![chain, bottom], &y)?;
    let z = switching_point_for(&rest.transport(v), &DiagonalShape::for_layers(2))?;
    ctx.session.tally(p.ids[cutter]).long_cut += 1;
    ctx.note("z", &z);
    let shape = DiagonalShape::for_layers(2);
    let pieces = [
        first,
        rest.lift_piece(&shape.lr(&rest.cake, &z))?,
        rest.lift_piece(&shape.rl(&rest.cake, &z))?,
    ];
    ctx.audit.lifts += 2;
    for piece in &pieces {
        if p.agents[cutter].value(piece) != shares[cutter] {
            return Err(Error::Internal("cutter's pieces are not equal shares".into()));
        }
    }

    let others: Vec<usize> = (0..3).filter(|&i| i != cutter).collect();
    let ok: Vec<[bool; 3]> = others
        .iter()
        .map(|&i| {
            let mut row = [false; 3];
            for (j, piece) in pieces.iter().enumerate() {
                row[j] = ctx.value(p, i, piece) >= shares[i];
            }
            row
        })
        .collect();

    let mut out = vec![LayeredPiece::empty(3); 3];
    for a in 0..3 {
        for b in (0..3).filter(|&b| b != a) {
            if ok[0][a] && ok[1][b] {
                let c = 3 - a - b;
                out[others[0]] = pieces[a].clone();
                out[others[1]] = pieces[b].clone();
                out[cutter] = pieces[c].clone();
                return Ok(out);
            }
        }
    }

    // Both non-cutters accept only the same piece r.
    let r = (0..3)
        .find(|&j| ok[0][j] && ok[1][j])
        .ok_or_else(|| Error::Internal("no acceptable piece".into()))?;
    let taken = match r {
        0 if z <= y => 1,
        0 => 2,
        _ => 0,
    };
    let union = (0..3)
        .filter(|&j| j != taken)
        .fold(LayeredPiece::empty(3), |u, j| u.union(&pieces[j]));
    let merged = MergedCake::from_union(&p.cake, &union, 2)
        .ok_or_else(|| Error::Internal("leftover pieces do not form a two-layer cake".into()))?;
    let sub = Problem {
        cake: merged.cake.clone(),
        agents: others.iter().map(|&i| merged.transport(&p.agents[i])).collect(),
        ids: others.iter().map(|&i| p.ids[i]).collect(),
    };
    ctx.enter();
    let (_, sub_pieces) = cut_and_choose(&sub, ctx)?;
    ctx.check_level(&sub.cake, &sub_pieces)?;
    ctx.leave();
    for (k, &i) in others.iter().enumerate() {
        out[i] = merged.lift_piece(&sub_pieces[k])?;
        ctx.audit.lifts += 1;
    }
    out[cutter] = pieces[taken].clone();
    Ok(out)
}

/// Proportional, contiguous division for three agents on three layers.
pub fn proportional_3x3(inst: &Instance) -> Result<ProtocolResult> {
    require(inst, Some(3), Some(3), "three-layer proportional division")?;
    let p = Problem::top(inst);
    let mut ctx = Ctx::new(3);
    let pieces = solve_3x3(&p, &mut ctx)?;
    ctx.finish(Protocol::Prop3x3, inst.cake(), pieces, Certificate::Proportional, true)
}
