//! Diagonal and two-knife cuts, merges of diagonal pieces into cakes with
//! fewer layers, and lifting of allocations from a merged cake back to the
//! cake it came from.
//!
//! A merged cake shares the x-axis of its parent: a virtual layer is an
//! ordered chain of parent segments that are disjoint in x, so a point `t`
//! on a virtual layer is the point `t` on whichever parent layer owns that
//! stretch. The [`LayerMap`] is the only record of that ownership. Stretches
//! of a virtual layer owned by nobody (gaps between segments) carry zero
//! density and are dropped on lifting.

use crate::error::{Error, Result};
use crate::model::{Interval, LayeredCake, LayeredPiece, MultiAllocation};
use crate::pwl::PiecewiseLinear;
use crate::rational::{one, zero, Rational};
use crate::valuation::{StepDensity, Valuation};

/// Which layers take `[0, x]` in `LR(x)` (the top group) and which take
/// `[x, 1]` (the bottom group). `RL(x)` swaps the two.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiagonalShape {
    m: usize,
    top: Vec<usize>,
    bottom: Vec<usize>,
}

impl DiagonalShape {
    /// Even `m`: the first half is on top. Odd `m = 2k + 1`: the first
    /// `k + 1` layers are on top, the remaining `k` below.
    pub fn for_layers(m: usize) -> Self {
        let split = m.div_ceil(2);
        DiagonalShape {
            m,
            top: (0..split).collect(),
            bottom: (split..m).collect(),
        }
    }

    /// The two-layer diagonal over the ordered pair `(upper, lower)`; all
    /// other layers belong to neither side.
    pub fn pair(m: usize, upper: usize, lower: usize) -> Self {
        DiagonalShape {
            m,
            top: vec![upper],
            bottom: vec![lower],
        }
    }

    pub fn top(&self) -> &[usize] {
        &self.top
    }

    pub fn bottom(&self) -> &[usize] {
        &self.bottom
    }

    fn build(&self, cake: &LayeredCake, x: &Rational, side: Side) -> LayeredPiece {
        let (left, right) = match side {
            Side::Lr => (&self.top, &self.bottom),
            Side::Rl => (&self.bottom, &self.top),
        };
        let layers = cake.layers();
        let parts = left
            .iter()
            .filter_map(|&l| layers[l].clip(&zero(), x).map(|iv| (l, iv)))
            .chain(
                right
                    .iter()
                    .filter_map(|&l| layers[l].clip(x, &one()).map(|iv| (l, iv))),
            );
        LayeredPiece::from_parts(self.m, parts)
    }

    pub fn lr(&self, cake: &LayeredCake, x: &Rational) -> LayeredPiece {
        self.build(cake, x, Side::Lr)
    }

    pub fn rl(&self, cake: &LayeredCake, x: &Rational) -> LayeredPiece {
        self.build(cake, x, Side::Rl)
    }

    /// `V(LR(x))` straight from the cumulative distributions.
    pub fn lr_value(&self, v: &Valuation, x: &Rational) -> Rational {
        let mut s = zero();
        for &l in &self.top {
            s += v.layer(l).cumulative(x);
        }
        for &l in &self.bottom {
            let d = v.layer(l);
            s += d.total() - d.cumulative(x);
        }
        s
    }

    /// Total value of the layers this diagonal covers.
    pub fn covered_value(&self, v: &Valuation) -> Rational {
        self.top
            .iter()
            .chain(&self.bottom)
            .fold(zero(), |acc, &l| acc + v.layer(l).total())
    }

    /// `x ↦ V(LR(x))` on `[0, 1]` as an exact piecewise-linear function.
    pub fn profile(&self, v: &Valuation) -> PiecewiseLinear {
        let mut xs = vec![zero(), one()];
        for &l in self.top.iter().chain(&self.bottom) {
            xs.extend(v.layer(l).breakpoints().iter().cloned());
        }
        PiecewiseLinear::sample(xs, |x| self.lr_value(v, x))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Side {
    Lr,
    Rl,
}

/// The two diagonal pieces produced by one vertical cut.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiagonalCut {
    pub x: Rational,
    pub lr: LayeredPiece,
    pub rl: LayeredPiece,
}

pub fn diagonal_cut(cake: &LayeredCake, x: &Rational) -> DiagonalCut {
    let shape = DiagonalShape::for_layers(cake.m());
    DiagonalCut {
        x: x.clone(),
        lr: shape.lr(cake, x),
        rl: shape.rl(cake, x),
    }
}

/// The pieces cut from a two-layer cake by knives at `x <= y`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TwoKnifePieces {
    pub x: Rational,
    pub y: Rational,
    pub tlr: LayeredPiece,
    pub trl: LayeredPiece,
}

/// `TLR = L1∩[0,x] ∪ L2∩[x,y] ∪ L1∩[y,1]`, `TRL` its complement.
pub fn two_knife_cut(cake: &LayeredCake, x: &Rational, y: &Rational) -> Result<TwoKnifePieces> {
    if cake.m() != 2 {
        return Err(Error::Precondition(format!(
            "two knives need 2 layers, got {}",
            cake.m()
        )));
    }
    if x > y {
        return Err(Error::InvertedInterval {
            lo: x.clone(),
            hi: y.clone(),
        });
    }
    let (l1, l2) = (&cake.layers()[0], &cake.layers()[1]);
    let bands = [(zero(), x.clone()), (x.clone(), y.clone()), (y.clone(), one())];
    let mut tlr = Vec::new();
    let mut trl = Vec::new();
    for (k, (a, b)) in bands.iter().enumerate() {
        let (mine, theirs) = if k == 1 { (1, 0) } else { (0, 1) };
        let layer = |i: usize| if i == 0 { l1 } else { l2 };
        if let Some(iv) = layer(mine).clip(a, b) {
            tlr.push((mine, iv));
        }
        if let Some(iv) = layer(theirs).clip(a, b) {
            trl.push((theirs, iv));
        }
    }
    Ok(TwoKnifePieces {
        x: x.clone(),
        y: y.clone(),
        tlr: LayeredPiece::from_parts(2, tlr),
        trl: LayeredPiece::from_parts(2, trl),
    })
}

/// A stretch of a parent layer that belongs to a virtual layer.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Segment {
    pub layer: usize,
    pub span: Interval,
}

/// For each virtual layer, its parent segments from left to right.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LayerMap {
    pub layers: Vec<Vec<Segment>>,
}

/// A cake assembled from parent segments, with the map back to the parent.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MergedCake {
    pub cake: LayeredCake,
    pub map: LayerMap,
    pub parent: LayeredCake,
}

impl MergedCake {
    /// Assembles virtual layers from chains of parent segments.
    ///
    /// Each chain must be sorted and disjoint in x, and a parent layer may
    /// appear in at most one segment overall; together these make every
    /// lift contiguous per parent layer. An empty chain becomes the
    /// zero-length layer `[anchor, anchor]`.
    pub fn from_chains(parent: &LayeredCake, chains: Vec<Vec<Segment>>, anchor: &Rational) -> Result<Self> {
        let mut used = vec![false; parent.m()];
        let mut layers = Vec::with_capacity(chains.len());
        let mut map = Vec::with_capacity(chains.len());
        for chain in chains {
            let chain: Vec<Segment> = chain.into_iter().filter(|s| !s.span.is_degenerate()).collect();
            for w in chain.windows(2) {
                if w[0].span.hi() > w[1].span.lo() {
                    return Err(Error::Internal("chain segments overlap".into()));
                }
            }
            for s in &chain {
                let parent_layer = parent.layer(s.layer)?;
                if used[s.layer] {
                    return Err(Error::Internal(format!("parent layer {} used twice", s.layer)));
                }
                if !parent_layer.contains(&s.span) {
                    return Err(Error::Internal(format!(
                        "segment {:?} leaves layer {}",
                        s.span, s.layer
                    )));
                }
                used[s.layer] = true;
            }
            let hull = match (chain.first(), chain.last()) {
                (Some(a), Some(b)) => Interval::span(a.span.lo().clone(), b.span.hi().clone()),
                _ => Interval::span(anchor.clone(), anchor.clone()),
            };
            layers.push(hull);
            map.push(chain);
        }
        Ok(MergedCake {
            cake: LayeredCake::new(layers)?,
            map: LayerMap { layers: map },
            parent: parent.clone(),
        })
    }

    /// Splits the union of some layered pieces into at most `chains`
    /// virtual layers. Returns `None` when some parent layer holds more
    /// than one interval or the segments need more chains.
    pub fn from_union(parent: &LayeredCake, union: &LayeredPiece, chains: usize) -> Option<Self> {
        if !union.is_contiguous() {
            return None;
        }
        let mut segs: Vec<Segment> = union
            .parts()
            .map(|(l, iv)| Segment {
                layer: l,
                span: iv.clone(),
            })
            .collect();
        segs.sort_by(|a, b| (a.span.lo(), a.span.hi(), a.layer).cmp(&(b.span.lo(), b.span.hi(), b.layer)));
        let mut out: Vec<Vec<Segment>> = Vec::new();
        for s in segs {
            match out
                .iter_mut()
                .find(|c| c.last().is_some_and(|t| t.span.hi() <= s.span.lo()))
            {
                Some(c) => c.push(s),
                None => out.push(vec![s]),
            }
        }
        if out.len() > chains {
            return None;
        }
        out.resize(chains, Vec::new());
        MergedCake::from_chains(parent, out, &zero()).ok()
    }

    pub fn m(&self) -> usize {
        self.cake.m()
    }

    /// A valuation on the parent cake, seen on the virtual layers.
    pub fn transport(&self, v: &Valuation) -> Valuation {
        let densities = self
            .map
            .layers
            .iter()
            .zip(self.cake.layers())
            .map(|(chain, hull)| {
                if chain.is_empty() {
                    return StepDensity::uniform(hull, zero()).expect("empty layer");
                }
                let mut bps = vec![hull.lo().clone()];
                let mut vals = Vec::new();
                for s in chain {
                    if bps.last().unwrap() < s.span.lo() {
                        vals.push(zero());
                        bps.push(s.span.lo().clone());
                    }
                    let piece = v.layer(s.layer).restrict(s.span.lo(), s.span.hi());
                    bps.extend(piece.breakpoints()[1..].iter().cloned());
                    vals.extend(piece.values().iter().cloned());
                }
                StepDensity::new(bps, vals).expect("spliced density")
            })
            .collect();
        Valuation::new(densities)
    }

    /// Maps a contiguous, non-overlapping piece of the merged cake to the
    /// parent cake, checking that the result is contiguous and
    /// non-overlapping there too.
    pub fn lift_piece(&self, piece: &LayeredPiece) -> Result<LayeredPiece> {
        if piece.m() != self.m() {
            return Err(Error::Dimension(format!(
                "piece has {} layers, merged cake has {}",
                piece.m(),
                self.m()
            )));
        }
        if !piece.is_contiguous() || !piece.is_non_overlapping() {
            return Err(Error::NotLiftable);
        }
        let mut parts = Vec::new();
        for (vl, iv) in piece.parts() {
            for s in &self.map.layers[vl] {
                if let Some(c) = iv.meet(&s.span) {
                    parts.push((s.layer, c));
                }
            }
        }
        let lifted = LayeredPiece::from_parts(self.parent.m(), parts);
        if !lifted.is_contiguous() || !lifted.is_non_overlapping() {
            return Err(Error::LiftViolation);
        }
        Ok(lifted)
    }

    /// Lifts every agent's piece of an allocation of the merged cake.
    pub fn lift_allocation(&self, a: &MultiAllocation) -> Result<MultiAllocation> {
        if a.cake() != &self.cake {
            return Err(Error::Dimension("allocation is not over this merged cake".into()));
        }
        let pieces = a.pieces().iter().map(|p| self.lift_piece(p)).collect::<Result<_>>()?;
        MultiAllocation::new(self.parent.clone(), pieces)
    }

    /// The whole merged cake as a piece of the parent.
    pub fn footprint(&self) -> LayeredPiece {
        LayeredPiece::from_parts(
            self.parent.m(),
            self.map.layers.iter().flatten().map(|s| (s.layer, s.span.clone())),
        )
    }
}

fn chain(parent: &LayeredCake, left: usize, right: Option<usize>, x: &Rational) -> Vec<Segment> {
    let layers = parent.layers();
    let mut out = Vec::new();
    if let Some(iv) = layers[left].clip(&zero(), x) {
        out.push(Segment { layer: left, span: iv });
    }
    if let Some(r) = right {
        if let Some(iv) = layers[r].clip(x, &one()) {
            out.push(Segment { layer: r, span: iv });
        }
    }
    out
}

fn chain_rl(parent: &LayeredCake, upper: usize, lower: Option<usize>, x: &Rational) -> Vec<Segment> {
    let layers = parent.layers();
    let mut out = Vec::new();
    if let Some(l) = lower {
        if let Some(iv) = layers[l].clip(&zero(), x) {
            out.push(Segment { layer: l, span: iv });
        }
    }
    if let Some(iv) = layers[upper].clip(x, &one()) {
        out.push(Segment { layer: upper, span: iv });
    }
    out
}

/// Merge of a diagonal piece of an even-layered cake: virtual layer `l`
/// pairs parent layers `l` and `l + m/2`.
pub fn merge_even(cake: &LayeredCake, x: &Rational, side: Side) -> Result<MergedCake> {
    let m = cake.m();
    if !m.is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "merge_even needs an even layer count, got {m}"
        )));
    }
    let h = m / 2;
    let chains = (0..h)
        .map(|l| match side {
            Side::Lr => chain(cake, l, Some(l + h), x),
            Side::Rl => chain_rl(cake, l, Some(l + h), x),
        })
        .collect();
    MergedCake::from_chains(cake, chains, x)
}

/// Merge of a diagonal piece of an odd-layered cake `m = 2k + 1`: virtual
/// layer 1 is layer 1 alone, virtual layer `l` pairs layers `l` and `k + l`.
pub fn merge_odd(cake: &LayeredCake, x: &Rational, side: Side) -> Result<MergedCake> {
    let m = cake.m();
    if m % 2 != 1 {
        return Err(Error::Precondition(format!(
            "merge_odd needs an odd layer count, got {m}"
        )));
    }
    let k = m / 2;
    let chains = (0..=k)
        .map(|l| {
            let partner = (l > 0).then_some(k + l);
            match side {
                Side::Lr => chain(cake, l, partner, x),
                Side::Rl => chain_rl(cake, l, partner, x),
            }
        })
        .collect();
    MergedCake::from_chains(cake, chains, x)
}

/// Merge of `LR(x)` or `RL(x)` for any layer count.
pub fn merge(cake: &LayeredCake, x: &Rational, side: Side) -> Result<MergedCake> {
    if cake.m().is_multiple_of(2) {
        merge_even(cake, x, side)
    } else {
        merge_odd(cake, x, side)
    }
}
