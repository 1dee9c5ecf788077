//! Evaluation and cut queries, with per-agent tallies.
//!
//! Short queries act on one layer, long queries on the diagonal piece
//! `LR(x)` of the whole cake. The free functions answer queries directly;
//! [`QuerySession`] answers the same queries and counts them.

use serde::{Deserialize, Serialize};

use crate::cuts::DiagonalShape;
use crate::error::{Error, Result};
use crate::model::{LayeredCake, LayeredPiece};
use crate::rational::Rational;
use crate::valuation::Valuation;

fn check_span(v: &Valuation, layer: usize, x: &Rational, y: &Rational) -> Result<()> {
    if layer >= v.m() {
        return Err(Error::NoSuchLayer { layer, m: v.m() });
    }
    if x > y {
        return Err(Error::InvertedInterval {
            lo: x.clone(),
            hi: y.clone(),
        });
    }
    let d = v.layer(layer);
    if x < d.lo() || y > d.hi() {
        return Err(Error::OutsideLayer {
            layer,
            lo: x.clone(),
            hi: y.clone(),
        });
    }
    Ok(())
}

/// `V_il([x, y])`.
pub fn eval_short(v: &Valuation, layer: usize, x: &Rational, y: &Rational) -> Result<Rational> {
    check_span(v, layer, x, y)?;
    Ok(v.layer(layer).value_between(x, y))
}

/// Least `y >= x` with `V_il([x, y]) = p`.
pub fn cut_short(v: &Valuation, layer: usize, x: &Rational, p: &Rational) -> Result<Rational> {
    check_span(v, layer, x, x)?;
    v.layer(layer).cut_from(layer, x, p)
}

/// `V_i(LR(x))` for the cake's diagonal.
pub fn eval_long(v: &Valuation, cake: &LayeredCake, x: &Rational) -> Rational {
    DiagonalShape::for_layers(cake.m()).lr_value(v, x)
}

/// Least `x` with `V_i(LR(x)) = p`.
pub fn cut_long(v: &Valuation, cake: &LayeredCake, p: &Rational) -> Result<Rational> {
    DiagonalShape::for_layers(cake.m()).profile(v).least_solution(p)
}

pub fn total_value(v: &Valuation, piece: &LayeredPiece) -> Rational {
    v.value(piece)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct QueryCounts {
    pub short_eval: u64,
    pub short_cut: u64,
    pub long_eval: u64,
    pub long_cut: u64,
}

impl QueryCounts {
    pub fn total(&self) -> u64 {
        self.short_eval + self.short_cut + self.long_eval + self.long_cut
    }
}

/// Counting proxy for one protocol run. Agent indices are those of the
/// top-level instance, also when the run works on a merged or trimmed cake.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuerySession {
    counts: Vec<QueryCounts>,
}

impl QuerySession {
    pub fn new(n: usize) -> Self {
        QuerySession {
            counts: vec![QueryCounts::default(); n],
        }
    }

    pub fn counts(&self) -> &[QueryCounts] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(QueryCounts::total).sum()
    }

    pub fn eval_short(
        &mut self,
        agent: usize,
        v: &Valuation,
        layer: usize,
        x: &Rational,
        y: &Rational,
    ) -> Result<Rational> {
        self.counts[agent].short_eval += 1;
        eval_short(v, layer, x, y)
    }

    pub fn cut_short(
        &mut self,
        agent: usize,
        v: &Valuation,
        layer: usize,
        x: &Rational,
        p: &Rational,
    ) -> Result<Rational> {
        self.counts[agent].short_cut += 1;
        cut_short(v, layer, x, p)
    }

    pub fn eval_long(&mut self, agent: usize, v: &Valuation, cake: &LayeredCake, x: &Rational) -> Rational {
        self.counts[agent].long_eval += 1;
        eval_long(v, cake, x)
    }

    pub fn cut_long(&mut self, agent: usize, v: &Valuation, cake: &LayeredCake, p: &Rational) -> Result<Rational> {
        self.counts[agent].long_cut += 1;
        cut_long(v, cake, p)
    }

    /// Value of a layered piece: one short evaluation per interval.
    pub fn value(&mut self, agent: usize, v: &Valuation, piece: &LayeredPiece) -> Rational {
        self.counts[agent].short_eval += piece.parts().count() as u64;
        v.value(piece)
    }

    pub(crate) fn tally(&mut self, agent: usize) -> &mut QueryCounts {
        &mut self.counts[agent]
    }
}
