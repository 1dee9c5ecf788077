//! Intervals, pieces, layered cakes and allocations, plus the structural
//! predicates (contiguity, non-overlap, completeness) that every protocol and
//! verifier relies on.
//!
//! Intervals are closed. Two intervals that share only an endpoint are
//! treated as disjoint everywhere in this module: all set operations are
//! measured, never pointwise.

use std::fmt;

use crate::error::{Error, Result};
use crate::rational::{self, one, zero, Rational};

/// A closed subinterval `[lo, hi]` of `[0, 1]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvertedInterval { lo, hi });
        }
        if lo < zero() || hi > one() {
            return Err(Error::OutOfUnit { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    /// Builds an interval whose bounds the caller already knows are ordered
    /// and inside `[0, 1]`.
    pub(crate) fn span(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi, "span [{lo}, {hi}] inverted");
        Interval { lo, hi }
    }

    pub fn unit() -> Self {
        Interval::span(zero(), one())
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// Zero-length intervals carry no measure and are never stored in pieces.
    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    /// `self ∩ [lo, hi]` when that intersection has positive length.
    pub fn clip(&self, lo: &Rational, hi: &Rational) -> Option<Interval> {
        let a = rational::max(&self.lo, lo);
        let b = rational::min(&self.hi, hi);
        (a < b).then(|| Interval::span(a, b))
    }

    pub fn meet(&self, other: &Interval) -> Option<Interval> {
        self.clip(&other.lo, &other.hi)
    }

    pub fn contains_point(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A finite union of disjoint intervals of one layer, in normal form:
/// sorted, positive-length members, and a positive gap between neighbours.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Piece {
    intervals: Vec<Interval>,
}

impl Piece {
    pub fn empty() -> Self {
        Piece::default()
    }

    pub fn single(iv: Interval) -> Self {
        if iv.is_degenerate() {
            Piece::empty()
        } else {
            Piece { intervals: vec![iv] }
        }
    }

    /// Sorts, merges abutting or overlapping members and drops zero-length
    /// ones. The union (and therefore every measure) is unchanged.
    pub fn normalize(raw: Vec<Interval>) -> Piece {
        let mut ivs: Vec<Interval> = raw.into_iter().filter(|iv| !iv.is_degenerate()).collect();
        ivs.sort();
        let mut out: Vec<Interval> = Vec::with_capacity(ivs.len());
        for iv in ivs {
            match out.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => out.push(iv),
            }
        }
        Piece { intervals: out }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_contiguous(&self) -> bool {
        self.intervals.len() <= 1
    }

    pub fn measure(&self) -> Rational {
        self.intervals.iter().fold(zero(), |acc, iv| acc + iv.length())
    }

    pub fn union(&self, other: &Piece) -> Piece {
        let mut all = self.intervals.clone();
        all.extend(other.intervals.iter().cloned());
        Piece::normalize(all)
    }

    /// Measure of `self ∩ other`.
    pub fn overlap(&self, other: &Piece) -> Rational {
        let mut total = zero();
        for a in &self.intervals {
            for b in &other.intervals {
                if let Some(c) = a.meet(b) {
                    total += c.length();
                }
            }
        }
        total
    }

    /// `self ∩ [lo, hi]`.
    pub fn clip(&self, lo: &Rational, hi: &Rational) -> Piece {
        Piece {
            intervals: self.intervals.iter().filter_map(|iv| iv.clip(lo, hi)).collect(),
        }
    }

    pub fn within(&self, bound: &Interval) -> bool {
        self.intervals.iter().all(|iv| bound.contains(iv))
    }
}

impl fmt::Debug for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "∅");
        }
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{iv:?}")?;
        }
        Ok(())
    }
}

/// An ordered tuple of layers, each a subinterval of `[0, 1]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LayeredCake {
    layers: Vec<Interval>,
}

impl LayeredCake {
    pub fn new(layers: Vec<Interval>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Dimension("a cake needs at least one layer".into()));
        }
        Ok(LayeredCake { layers })
    }

    /// `m` copies of `[0, 1]`.
    pub fn unit(m: usize) -> Self {
        assert!(m >= 1, "a cake needs at least one layer");
        LayeredCake {
            layers: vec![Interval::unit(); m],
        }
    }

    pub fn m(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Interval] {
        &self.layers
    }

    pub fn layer(&self, l: usize) -> Result<&Interval> {
        self.layers.get(l).ok_or(Error::NoSuchLayer {
            layer: l,
            m: self.layers.len(),
        })
    }

    /// The piece holding every layer in full.
    pub fn whole(&self) -> LayeredPiece {
        LayeredPiece {
            per_layer: self.layers.iter().cloned().map(Piece::single).collect(),
        }
    }

    /// Replaces layer `l` by `iv`.
    pub(crate) fn with_layer(&self, l: usize, iv: Interval) -> LayeredCake {
        let mut layers = self.layers.clone();
        layers[l] = iv;
        LayeredCake { layers }
    }
}

impl fmt::Debug for LayeredCake {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.layers).finish()
    }
}

/// One piece per layer, all owned by the same agent.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LayeredPiece {
    per_layer: Vec<Piece>,
}

impl LayeredPiece {
    pub fn new(per_layer: Vec<Piece>) -> Self {
        LayeredPiece { per_layer }
    }

    pub fn empty(m: usize) -> Self {
        LayeredPiece {
            per_layer: vec![Piece::empty(); m],
        }
    }

    /// Collects `(layer, interval)` parts into a normalized layered piece.
    pub fn from_parts(m: usize, parts: impl IntoIterator<Item = (usize, Interval)>) -> Self {
        let mut raw: Vec<Vec<Interval>> = vec![Vec::new(); m];
        for (l, iv) in parts {
            raw[l].push(iv);
        }
        LayeredPiece {
            per_layer: raw.into_iter().map(Piece::normalize).collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.per_layer.len()
    }

    pub fn layers(&self) -> &[Piece] {
        &self.per_layer
    }

    pub fn layer(&self, l: usize) -> &Piece {
        &self.per_layer[l]
    }

    pub fn is_empty(&self) -> bool {
        self.per_layer.iter().all(Piece::is_empty)
    }

    /// Every layer holds at most one interval.
    pub fn is_contiguous(&self) -> bool {
        self.per_layer.iter().all(Piece::is_contiguous)
    }

    /// No two intervals on different layers overlap in positive measure;
    /// a single shared endpoint is allowed.
    pub fn is_non_overlapping(&self) -> bool {
        let mut all: Vec<&Interval> = self.per_layer.iter().flat_map(|p| p.intervals.iter()).collect();
        all.sort();
        let mut reach: Option<&Rational> = None;
        for iv in all {
            if let Some(r) = reach {
                if &iv.lo < r {
                    return false;
                }
            }
            if reach.is_none_or(|r| &iv.hi > r) {
                reach = Some(&iv.hi);
            }
        }
        true
    }

    pub fn union(&self, other: &LayeredPiece) -> LayeredPiece {
        LayeredPiece {
            per_layer: self
                .per_layer
                .iter()
                .zip(&other.per_layer)
                .map(|(a, b)| a.union(b))
                .collect(),
        }
    }

    /// Iterates `(layer, interval)` over all parts.
    pub fn parts(&self) -> impl Iterator<Item = (usize, &Interval)> {
        self.per_layer
            .iter()
            .enumerate()
            .flat_map(|(l, p)| p.intervals.iter().map(move |iv| (l, iv)))
    }

    pub fn within(&self, cake: &LayeredCake) -> bool {
        self.m() == cake.m() && self.per_layer.iter().zip(cake.layers()).all(|(p, l)| p.within(l))
    }
}

impl fmt::Debug for LayeredPiece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.per_layer).finish()
    }
}

/// Layered pieces indexed by agent, over one cake.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiAllocation {
    cake: LayeredCake,
    pieces: Vec<LayeredPiece>,
}

impl MultiAllocation {
    pub fn new(cake: LayeredCake, pieces: Vec<LayeredPiece>) -> Result<Self> {
        if let Some(bad) = pieces.iter().position(|p| p.m() != cake.m()) {
            return Err(Error::Dimension(format!(
                "piece of agent {bad} has {} layers, cake has {}",
                pieces[bad].m(),
                cake.m()
            )));
        }
        Ok(MultiAllocation { cake, pieces })
    }

    pub fn cake(&self) -> &LayeredCake {
        &self.cake
    }

    pub fn pieces(&self) -> &[LayeredPiece] {
        &self.pieces
    }

    pub fn piece(&self, agent: usize) -> &LayeredPiece {
        &self.pieces[agent]
    }

    pub fn n(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_contiguous(&self) -> bool {
        self.pieces.iter().all(LayeredPiece::is_contiguous)
    }

    /// Every agent's piece is non-overlapping.
    pub fn is_feasible(&self) -> bool {
        self.pieces.iter().all(LayeredPiece::is_non_overlapping)
    }

    /// On every layer the agents' pieces tile the layer exactly: their union
    /// is the layer and their lengths add up to its length.
    pub fn is_complete(&self) -> bool {
        self.cake.layers().iter().enumerate().all(|(l, layer)| {
            let mut union = Piece::empty();
            let mut total = zero();
            for p in &self.pieces {
                union = union.union(&p.per_layer[l]);
                total += p.per_layer[l].measure();
            }
            total == layer.length() && union == Piece::single(layer.clone())
        })
    }
}

/// Free-function forms of the structural predicates.
pub fn normalize_piece(raw: Vec<Interval>) -> Result<Piece> {
    for iv in &raw {
        if iv.lo > iv.hi {
            return Err(Error::InvertedInterval {
                lo: iv.lo.clone(),
                hi: iv.hi.clone(),
            });
        }
    }
    Ok(Piece::normalize(raw))
}

pub fn is_contiguous(p: &LayeredPiece) -> bool {
    p.is_contiguous()
}

pub fn is_non_overlapping(p: &LayeredPiece) -> bool {
    p.is_non_overlapping()
}

pub fn is_complete(a: &MultiAllocation) -> bool {
    a.is_complete()
}
