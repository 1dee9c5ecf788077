//! Trimming, majority halving and the recursive proportional dispatcher.

use super::proportional::solve_3x3;
use super::two::cut_and_choose;
use super::{require, Certificate, Ctx, Problem, Protocol, ProtocolResult};
use crate::cuts::{merge, DiagonalShape, Side};
use crate::error::{Error, Result};
use crate::model::{Interval, LayeredCake, LayeredPiece};
use crate::rational::Rational;
use crate::switching::majority_split;
use crate::valuation::Instance;

/// One agent's trimming mark on the chosen layer; `None` when the layer is
/// worth less than the agent's share.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TrimMark {
    pub agent: usize,
    pub mark: Option<Rational>,
}

/// Outcome of one trimming round.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Trim {
    pub layer: usize,
    pub marks: Vec<TrimMark>,
    pub recipient: usize,
    pub piece: LayeredPiece,
    pub remainder: LayeredCake,
}

/// Every agent marks the least point `y` on each layer with
/// `V(L ∩ [lo, y]) = V(cake) / n`; the layer with most marks is trimmed at
/// its lowest mark.
pub(crate) fn trim(p: &Problem, ctx: &mut Ctx) -> Result<(Trim, Problem)> {
    let n = p.n();
    let m = p.m();
    let shares: Vec<Rational> = (0..n).map(|i| p.share(i)).collect();
    let mut marks = vec![vec![None; m]; n];
    for i in 0..n {
        let v = &p.agents[i];
        for (l, mark) in marks[i].iter_mut().enumerate() {
            ctx.session.tally(p.ids[i]).short_eval += 1;
            if v.layer_value(l) >= shares[i] {
                let lo = p.cake.layers()[l].lo();
                *mark = Some(ctx.session.cut_short(p.ids[i], v, l, lo, &shares[i])?);
            }
        }
    }
    let counts: Vec<usize> = (0..m)
        .map(|l| (0..n).filter(|&i| marks[i][l].is_some()).count())
        .collect();
    let layer = (0..m).fold(0, |b, l| if counts[l] > counts[b] { l } else { b });
    if counts[layer] == 0 {
        return Err(Error::Internal("no agent can mark any layer".into()));
    }
    let recipient = (0..n)
        .filter(|&i| marks[i][layer].is_some())
        .fold(None, |best: Option<usize>, i| match best {
            Some(b) if marks[b][layer] <= marks[i][layer] => Some(b),
            _ => Some(i),
        })
        .unwrap();
    let y = marks[recipient][layer].clone().unwrap();
    let band = &p.cake.layers()[layer];
    let piece = LayeredPiece::from_parts(m, band.clip(band.lo(), &y).map(|iv| (layer, iv)));
    let remainder = p.cake.with_layer(layer, Interval::new(y, band.hi().clone())?);
    let keep: Vec<usize> = (0..n).filter(|&i| i != recipient).collect();
    let rest = Problem {
        agents: keep.iter().map(|&i| p.agents[i].restrict_to(&remainder)).collect(),
        ids: keep.iter().map(|&i| p.ids[i]).collect(),
        cake: remainder.clone(),
    };
    let t = Trim {
        layer,
        marks: (0..n)
            .map(|i| TrimMark {
                agent: p.ids[i],
                mark: marks[i][layer].clone(),
            })
            .collect(),
        recipient,
        piece,
        remainder,
    };
    Ok((t, rest))
}

/// One trimming round on an instance; `recipient` indexes the instance.
pub fn trim_step(inst: &Instance) -> Result<Trim> {
    if inst.n() < 2 {
        return Err(Error::Precondition("trimming needs at least two agents".into()));
    }
    let p = Problem::top(inst);
    let mut ctx = Ctx::new(inst.n());
    trim(&p, &mut ctx).map(|(t, _)| t)
}

/// `m = 2^a * 3^b` with `b <= 1`.
pub fn is_supported_shape(m: usize) -> bool {
    let mut k = m;
    if k == 0 {
        return false;
    }
    while k.is_multiple_of(2) {
        k /= 2;
    }
    k == 1 || k == 3
}

/// Trims one agent off, solves the rest, and puts the trimmed piece back.
fn trim_then(p: &Problem, ctx: &mut Ctx) -> Result<Vec<LayeredPiece>> {
    let (t, rest) = trim(p, ctx)?;
    let sub = solve(&rest, ctx)?;
    let mut out = Vec::with_capacity(p.n());
    let mut it = sub.into_iter();
    for i in 0..p.n() {
        if i == t.recipient {
            out.push(t.piece.clone());
        } else {
            out.push(it.next().unwrap());
        }
    }
    Ok(out)
}

/// Splits the agents at a majority switching point and solves each half on
/// the merge of its diagonal piece.
fn halve(p: &Problem, ctx: &mut Ctx) -> Result<Vec<LayeredPiece>> {
    let shape = DiagonalShape::for_layers(p.m());
    let split = majority_split(&p.agents, &shape)?;
    for &id in &p.ids {
        let t = ctx.session.tally(id);
        t.long_cut += 1;
        t.long_eval += 1;
    }
    let mut out = vec![LayeredPiece::empty(p.m()); p.n()];
    for (group, side) in [(&split.group_lr, Side::Lr), (&split.group_rl, Side::Rl)] {
        let merged = merge(&p.cake, &split.x, side)?;
        let sub = Problem {
            cake: merged.cake.clone(),
            agents: group.iter().map(|&i| merged.transport(&p.agents[i])).collect(),
            ids: group.iter().map(|&i| p.ids[i]).collect(),
        };
        let pieces = solve(&sub, ctx)?;
        for (k, &i) in group.iter().enumerate() {
            out[i] = merged.lift_piece(&pieces[k])?;
            ctx.audit.lifts += 1;
        }
    }
    Ok(out)
}

fn three_layers(p: &Problem, ctx: &mut Ctx) -> Result<Vec<LayeredPiece>> {
    match p.n() {
        3 => solve_3x3(p, ctx),
        n if n % 2 == 1 => trim_then(p, ctx),
        _ => halve(p, ctx),
    }
}

/// Proportional, contiguous division of the problem; checks the result
/// before handing it to the caller.
pub(crate) fn solve(p: &Problem, ctx: &mut Ctx) -> Result<Vec<LayeredPiece>> {
    let (n, m) = (p.n(), p.m());
    if !is_supported_shape(m) {
        return Err(Error::UnsupportedShape { m });
    }
    if n < m {
        return Err(Error::Precondition(format!(
            "{n} agents for {m} layers; need at least as many agents"
        )));
    }
    ctx.enter();
    let pieces = match (m, n) {
        (_, 1) => Ok(vec![p.cake.whole()]),
        (3, _) => three_layers(p, ctx),
        (2, 2) => cut_and_choose(p, ctx).map(|(_, pieces)| pieces),
        _ if n > m => trim_then(p, ctx),
        _ => halve(p, ctx),
    }?;
    ctx.check_level(&p.cake, &pieces)?;
    ctx.leave();
    Ok(pieces)
}

/// Three layers, any `n >= 3`.
pub fn proportional_3layer_n(inst: &Instance) -> Result<ProtocolResult> {
    require(inst, None, Some(3), "three-layer proportional division")?;
    if inst.n() < 3 {
        return Err(Error::Precondition("three layers need at least three agents".into()));
    }
    let p = Problem::top(inst);
    let mut ctx = Ctx::new(inst.n());
    let pieces = solve(&p, &mut ctx)?;
    ctx.finish(Protocol::Prop3n, inst.cake(), pieces, Certificate::Proportional, true)
}

/// `m = 2^a * 3^b` with `b <= 1` layers and `n >= m` agents.
pub fn proportional_recursive(inst: &Instance) -> Result<ProtocolResult> {
    let p = Problem::top(inst);
    let mut ctx = Ctx::new(inst.n());
    let pieces = solve(&p, &mut ctx)?;
    ctx.finish(Protocol::Prop, inst.cake(), pieces, Certificate::Proportional, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{one, rat, zero};
    use crate::valuation::Valuation;

    fn uniform_inst(n: usize, m: usize) -> Instance {
        let cake = LayeredCake::unit(m);
        let w = vec![rat(1, m as i64); m];
        let v = Valuation::uniform(&cake, &w).unwrap();
        Instance::new(cake, vec![v; n]).unwrap()
    }

    fn check(inst: &Instance, r: &ProtocolResult) {
        let a = &r.allocation;
        assert!(a.is_contiguous() && a.is_feasible() && a.is_complete());
        let share = rat(1, inst.n() as i64);
        for i in 0..inst.n() {
            assert!(inst.agent(i).value(a.piece(i)) >= share, "agent {i}");
        }
    }

    #[test]
    fn supported_shapes() {
        let ok: Vec<usize> = (1..=25).filter(|&m| is_supported_shape(m)).collect();
        assert_eq!(ok, vec![1, 2, 3, 4, 6, 8, 12, 16, 24]);
    }

    #[test]
    fn trim_uniform_five_three() {
        let t = trim_step(&uniform_inst(5, 3)).unwrap();
        assert_eq!(t.layer, 0);
        assert_eq!(t.recipient, 0);
        assert!(t.marks.iter().all(|m| m.mark == Some(rat(3, 5))));
        assert_eq!(
            t.piece,
            LayeredPiece::from_parts(3, vec![(0, Interval::new(zero(), rat(3, 5)).unwrap())])
        );
    }

    #[test]
    fn trim_abstainer_is_protected() {
        let cake = LayeredCake::unit(2);
        let a = Valuation::uniform(&cake, &[one(), zero()]).unwrap();
        let b = Valuation::uniform(&cake, &[zero(), one()]).unwrap();
        let inst = Instance::new(cake, vec![a, b.clone(), b]).unwrap();
        let t = trim_step(&inst).unwrap();
        // layer 2 has two marks, agent 1 abstains there
        assert_eq!(t.layer, 1);
        assert_eq!(t.marks[0].mark, None);
        assert_eq!(inst.agent(0).value(&t.piece), zero());
    }

    #[test]
    fn trim_minimal_mark_wins() {
        let cake = LayeredCake::unit(2);
        let a = Valuation::uniform(&cake, &[rat(1, 2), rat(1, 2)]).unwrap();
        let b = Valuation::uniform(&cake, &[one(), zero()]).unwrap();
        let inst = Instance::new(cake, vec![a.clone(), b]).unwrap();
        let t = trim_step(&inst).unwrap();
        assert_eq!(t.layer, 0);
        assert_eq!(t.marks[0].mark, Some(one()));
        assert_eq!(t.marks[1].mark, Some(rat(1, 2)));
        assert_eq!(t.recipient, 1);
        assert!(a.value(&t.piece) <= rat(1, 2));
    }

    #[test]
    fn four_uniform_on_three_layers() {
        let inst = uniform_inst(4, 3);
        let r = proportional_3layer_n(&inst).unwrap();
        check(&inst, &r);
        for i in 0..4 {
            assert_eq!(inst.agent(i).value(r.allocation.piece(i)), rat(1, 4));
        }
    }

    #[test]
    fn five_uniform_on_three_layers() {
        let inst = uniform_inst(5, 3);
        let r = proportional_3layer_n(&inst).unwrap();
        check(&inst, &r);
        assert_eq!(
            r.allocation.piece(0),
            &LayeredPiece::from_parts(3, vec![(0, Interval::new(zero(), rat(3, 5)).unwrap())])
        );
    }

    #[test]
    fn dispatcher_covers_small_shapes() {
        for m in [1usize, 2, 3, 4, 6] {
            for n in m..=m + 2 {
                let inst = uniform_inst(n, m);
                let r = proportional_recursive(&inst).unwrap();
                check(&inst, &r);
                assert!(r.audit.levels >= 1);
            }
        }
    }

    #[test]
    fn single_layer_is_last_diminisher() {
        let inst = uniform_inst(4, 1);
        let r = proportional_recursive(&inst).unwrap();
        check(&inst, &r);
        for i in 0..4 {
            assert_eq!(r.allocation.piece(i).layer(0).measure(), rat(1, 4));
        }
    }

    #[test]
    fn unsupported_shapes() {
        for m in [5usize, 9, 25] {
            let r = proportional_recursive(&uniform_inst(m, m));
            assert_eq!(r.unwrap_err(), Error::UnsupportedShape { m });
        }
    }

    #[test]
    fn too_few_agents() {
        assert!(matches!(
            proportional_recursive(&uniform_inst(3, 4)),
            Err(Error::Precondition(_))
        ));
    }
}
