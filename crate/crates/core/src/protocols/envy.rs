//! Envy-free division for three agents on two layers when two agents share
//! a valuation.

use super::{require, Certificate, Ctx, Problem, Protocol, ProtocolResult};
use crate::cuts::{diagonal_cut, DiagonalShape};
use crate::error::{Error, Result};
use crate::model::{Interval, LayeredCake, LayeredPiece};
use crate::rational::{int, rat, Rational};
use crate::switching::switching_point_for;
use crate::valuation::{Instance, Valuation};

/// The lowest pair of agents with identical valuations.
pub fn shared_pair(inst: &Instance) -> Option<(usize, usize)> {
    let n = inst.n();
    (0..n)
        .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
        .find(|&(p, q)| inst.agent(p).same_measure(inst.agent(q)))
}

/// Runs the construction with the sharers at `p, q` and the chooser at `r`.
fn construct(p: &Problem, sharers: (usize, usize), r: usize, ctx: &mut Ctx) -> Result<Vec<LayeredPiece>> {
    let (sp, sq) = sharers;
    let v = &p.agents[sp];
    let id = p.ids[sp];
    let cake = &p.cake;
    let (l1, l2) = (&cake.layers()[0], &cake.layers()[1]);

    let x = switching_point_for(v, &DiagonalShape::for_layers(2))?;
    ctx.session.tally(id).long_cut += 1;
    let a = v.layer(0).cumulative(&x);
    ctx.session.tally(id).short_eval += 1;
    let third = v.total() / int(3);
    let y = ctx.session.cut_short(id, v, 0, l1.lo(), &(rat(2, 3) * &a))?;
    let z_target = &third - rat(2, 3) * &a;
    ctx.session.tally(id).short_cut += 1;
    let z = v.layer(1).cut_until(1, l2.hi(), &z_target)?;
    ctx.note("x", &x);
    ctx.note("y", &y);
    ctx.note("z", &z);

    let first = LayeredPiece::from_parts(
        2,
        [(0, l1.clip(l1.lo(), &y)), (1, l2.clip(&z, l2.hi()))]
            .into_iter()
            .filter_map(|(l, iv)| iv.map(|iv| (l, iv))),
    );
    let rest = LayeredCake::new(vec![
        Interval::new(y.clone(), l1.hi().clone())?,
        Interval::new(l2.lo().clone(), z.clone())?,
    ])?;
    let w = v.restrict_to(&rest);
    let c = switching_point_for(&w, &DiagonalShape::for_layers(2))?;
    ctx.session.tally(id).long_cut += 1;
    ctx.note("c", &c);
    let cut = diagonal_cut(&rest, &c);
    let pieces = [first, cut.lr, cut.rl];

    for piece in &pieces {
        if v.value(piece) != third {
            return Err(Error::Internal("sharer's pieces are not equal thirds".into()));
        }
    }
    let values: Vec<Rational> = pieces.iter().map(|piece| ctx.value(p, r, piece)).collect();
    let best = (0..3).fold(0, |b, j| if values[j] > values[b] { j } else { b });
    let mut out = vec![LayeredPiece::empty(2); 3];
    let mut rest_pieces = (0..3).filter(|&j| j != best);
    out[r] = pieces[best].clone();
    out[sp] = pieces[rest_pieces.next().unwrap()].clone();
    out[sq] = pieces[rest_pieces.next().unwrap()].clone();
    Ok(out)
}

/// Agents 1 and 2 hold `shared`, agent 3 holds `chooser`.
pub fn envy_free_3x2(cake: &LayeredCake, shared: &Valuation, chooser: &Valuation) -> Result<ProtocolResult> {
    let inst = Instance::new(cake.clone(), vec![shared.clone(), shared.clone(), chooser.clone()])?;
    run(&inst, (0, 1), 2)
}

/// Finds the two agents who share a valuation and runs the construction.
pub fn envy_free_3x2_instance(inst: &Instance) -> Result<ProtocolResult> {
    require(inst, Some(3), Some(2), "envy-free division")?;
    let (sp, sq) = shared_pair(inst)
        .ok_or_else(|| Error::Precondition("envy-free division needs two agents with the same valuation".into()))?;
    let r = (0..3).find(|&i| i != sp && i != sq).unwrap();
    run(inst, (sp, sq), r)
}

fn run(inst: &Instance, sharers: (usize, usize), r: usize) -> Result<ProtocolResult> {
    require(inst, Some(3), Some(2), "envy-free division")?;
    let p = Problem::top(inst);
    let mut ctx = Ctx::new(3);
    let pieces = construct(&p, sharers, r, &mut ctx)?;
    ctx.finish(Protocol::EnvyFree3x2, inst.cake(), pieces, Certificate::EnvyFree, true)
}
