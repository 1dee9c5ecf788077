//! Two agents on two layers: cut-and-choose and the two-knife exact division.

use super::{require, Certificate, Ctx, Problem, Protocol, ProtocolResult};
use crate::cuts::{diagonal_cut, two_knife_cut, DiagonalShape};
use crate::error::{Error, Result};
use crate::model::LayeredPiece;
use crate::rational::{int, one, signum, zero, Rational};
use crate::switching::switching_point_for;
use crate::valuation::{Instance, Valuation};

/// Agent 0 cuts at its switching point, agent 1 takes the diagonal piece it
/// weakly prefers (`LR` on a tie).
pub(crate) fn cut_and_choose(p: &Problem, ctx: &mut Ctx) -> Result<(Rational, Vec<LayeredPiece>)> {
    debug_assert_eq!((p.n(), p.m()), (2, 2));
    let x = switching_point_for(&p.agents[0], &DiagonalShape::for_layers(2))?;
    ctx.session.tally(p.ids[0]).long_cut += 1;
    let cut = diagonal_cut(&p.cake, &x);
    let lr = ctx.value(p, 1, &cut.lr);
    let rl = ctx.value(p, 1, &cut.rl);
    let pieces = if lr >= rl {
        vec![cut.rl, cut.lr]
    } else {
        vec![cut.lr, cut.rl]
    };
    Ok((x, pieces))
}

pub fn cut_and_choose_2(inst: &Instance) -> Result<ProtocolResult> {
    require(inst, Some(2), Some(2), "cut-and-choose")?;
    let p = Problem::top(inst);
    let mut ctx = Ctx::new(2);
    let (x, pieces) = cut_and_choose(&p, &mut ctx)?;
    ctx.note("x", &x);
    ctx.finish(
        Protocol::CutChoose2,
        inst.cake(),
        pieces,
        Certificate::Proportional,
        true,
    )
}

/// `V(TLR(x, y)) = A(x) + B(y)` splits into a part in each knife.
struct Separable {
    a: Vec<Rational>,
    b: Vec<Rational>,
    half: Rational,
}

impl Separable {
    fn new(v: &Valuation, grid: &[Rational]) -> Self {
        let (l1, l2) = (v.layer(0), v.layer(1));
        let t1 = l1.total();
        let a = grid.iter().map(|x| l1.cumulative(x) - l2.cumulative(x)).collect();
        let b = grid.iter().map(|y| l2.cumulative(y) + t1 - l1.cumulative(y)).collect();
        Separable {
            a,
            b,
            half: v.total() / int(2),
        }
    }

    /// `V(TLR) - V/2` at grid vertex `(i, j)`.
    fn at(&self, (i, j): (usize, usize)) -> Rational {
        &self.a[i] + &self.b[j] - &self.half
    }
}

struct Vertex {
    x: Rational,
    y: Rational,
    h: Rational,
    f: Rational,
}

fn lerp(a: &Rational, b: &Rational, t: &Rational) -> Rational {
    a + (b - a) * t
}

/// Points of the triangle boundary where `g` vanishes; each point carries
/// both function values so the caller can filter on the other one.
fn boundary_zeros(tri: &[Vertex; 3], g: impl Fn(&Vertex) -> &Rational) -> Vec<Vertex> {
    let mut out = Vec::new();
    for k in 0..3 {
        let (p, q) = (&tri[k], &tri[(k + 1) % 3]);
        let (gp, gq) = (g(p), g(q));
        if signum(gp) == 0 {
            out.push(Vertex {
                x: p.x.clone(),
                y: p.y.clone(),
                h: p.h.clone(),
                f: p.f.clone(),
            });
        } else if signum(gp) * signum(gq) < 0 {
            let t = gp / (gp - gq);
            out.push(Vertex {
                x: lerp(&p.x, &q.x, &t),
                y: lerp(&p.y, &q.y, &t),
                h: lerp(&p.h, &q.h, &t),
                f: lerp(&p.f, &q.f, &t),
            });
        }
    }
    out
}

fn same_strict_sign(vals: [&Rational; 3]) -> bool {
    let s = vals.map(signum);
    (s[0] > 0 && s[1] > 0 && s[2] > 0) || (s[0] < 0 && s[1] < 0 && s[2] < 0)
}

/// Lexicographically least point of the triangle where `h = f = 0`.
fn solve_triangle(tri: &[Vertex; 3]) -> Option<(Rational, Rational)> {
    if same_strict_sign([&tri[0].h, &tri[1].h, &tri[2].h]) || same_strict_sign([&tri[0].f, &tri[1].f, &tri[2].f]) {
        return None;
    }
    let h_zero = tri.iter().all(|v| signum(&v.h) == 0);
    let f_zero = tri.iter().all(|v| signum(&v.f) == 0);
    let points: Vec<(Rational, Rational)> = match (h_zero, f_zero) {
        (true, true) => tri.iter().map(|v| (v.x.clone(), v.y.clone())).collect(),
        (true, false) => boundary_zeros(tri, |v| &v.f).into_iter().map(|v| (v.x, v.y)).collect(),
        (false, true) => boundary_zeros(tri, |v| &v.h).into_iter().map(|v| (v.x, v.y)).collect(),
        (false, false) => {
            let (hs, ht) = (&tri[1].h - &tri[0].h, &tri[2].h - &tri[0].h);
            let (fs, ft) = (&tri[1].f - &tri[0].f, &tri[2].f - &tri[0].f);
            let det = &hs * &ft - &ht * &fs;
            if signum(&det) != 0 {
                let (h0, f0) = (&tri[0].h, &tri[0].f);
                let s = (&ht * f0 - h0 * &ft) / &det;
                let t = (h0 * &fs - &hs * f0) / &det;
                if signum(&s) < 0 || signum(&t) < 0 || &s + &t > one() {
                    return None;
                }
                let x = &tri[0].x + &s * (&tri[1].x - &tri[0].x) + &t * (&tri[2].x - &tri[0].x);
                let y = &tri[0].y + &s * (&tri[1].y - &tri[0].y) + &t * (&tri[2].y - &tri[0].y);
                vec![(x, y)]
            } else {
                // parallel zero lines: common points only if they coincide
                boundary_zeros(tri, |v| &v.h)
                    .into_iter()
                    .filter(|v| signum(&v.f) == 0)
                    .map(|v| (v.x, v.y))
                    .collect()
            }
        }
    };
    points.into_iter().min()
}

/// Lexicographically least `(x, y)` with `x <= y` where both agents value
/// `TLR(x, y)` at half their total.
///
/// Both values are affine on every triangle of the breakpoint grid cut by
/// the diagonal, so each triangle is solved in closed form.
pub(crate) fn two_knife_point(p: &Problem, ctx: &mut Ctx) -> Result<(Rational, Rational)> {
    let mut grid = vec![zero(), one()];
    for v in &p.agents {
        for d in v.densities() {
            grid.extend(d.breakpoints().iter().cloned());
        }
    }
    grid.sort();
    grid.dedup();
    let s1 = Separable::new(&p.agents[0], &grid);
    let s2 = Separable::new(&p.agents[1], &grid);
    for &id in &p.ids {
        // two cumulative evaluations per grid point
        ctx.session.tally(id).short_eval += 2 * grid.len() as u64;
    }
    let vertex = |i: usize, j: usize| Vertex {
        x: grid[i].clone(),
        y: grid[j].clone(),
        h: s1.at((i, j)),
        f: s2.at((i, j)),
    };
    let mut best: Option<(Rational, Rational)> = None;
    let k = grid.len();
    for (i, gi) in grid.iter().enumerate().take(k.saturating_sub(1)) {
        if best.as_ref().is_some_and(|(bx, _)| bx < gi) {
            break;
        }
        for j in i..k - 1 {
            let tris: Vec<[Vertex; 3]> = if j == i {
                vec![[vertex(i, i), vertex(i, i + 1), vertex(i + 1, i + 1)]]
            } else {
                vec![
                    [vertex(i, j), vertex(i + 1, j), vertex(i, j + 1)],
                    [vertex(i + 1, j), vertex(i + 1, j + 1), vertex(i, j + 1)],
                ]
            };
            for tri in &tris {
                if let Some(pt) = solve_triangle(tri) {
                    if best.as_ref().is_none_or(|b| &pt < b) {
                        best = Some(pt);
                    }
                }
            }
        }
    }
    best.ok_or_else(|| Error::PathTrace("no two-knife position splits both agents evenly".into()))
}

/// Exact division for two agents on two layers: agent 1 receives
/// `TLR(x, y)`, agent 2 receives `TRL(x, y)`, and both agents value each
/// piece at exactly one half.
pub fn exact_2x2(inst: &Instance) -> Result<ProtocolResult> {
    require(inst, Some(2), Some(2), "exact division")?;
    let p = Problem::top(inst);
    let mut ctx = Ctx::new(2);
    let (x, y) = two_knife_point(&p, &mut ctx)?;
    let pieces = two_knife_cut(&p.cake, &x, &y)?;
    for i in 0..2 {
        let half = p.agents[i].total() / int(2);
        if p.agents[i].value(&pieces.tlr) != half {
            return Err(Error::Internal("two-knife point is not exact".into()));
        }
    }
    ctx.note("x", &x);
    ctx.note("y", &y);
    ctx.finish(
        Protocol::Exact2x2,
        inst.cake(),
        vec![pieces.tlr, pieces.trl],
        Certificate::Exact,
        false,
    )
}
