//! Piecewise-constant densities, additive valuations and instances.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{Interval, LayeredCake, LayeredPiece};
use crate::rational::{self, one, zero, Rational};

/// A step density on one layer: `values[k]` holds on
/// `[breakpoints[k], breakpoints[k + 1]]`.
///
/// A zero-length layer is represented by a single breakpoint and no cells.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StepDensity {
    breakpoints: Vec<Rational>,
    values: Vec<Rational>,
    // cumulative value at each breakpoint
    cum: Vec<Rational>,
}

impl StepDensity {
    pub fn new(breakpoints: Vec<Rational>, values: Vec<Rational>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::InvalidDensity("no breakpoints".into()));
        }
        if breakpoints.len() != values.len() + 1 {
            return Err(Error::InvalidDensity(format!(
                "{} breakpoints for {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidDensity("breakpoints must strictly increase".into()));
        }
        if let Some(v) = values.iter().find(|v| v.is_negative()) {
            return Err(Error::InvalidDensity(format!("negative density {v}")));
        }
        let mut cum = Vec::with_capacity(breakpoints.len());
        cum.push(zero());
        for (k, v) in values.iter().enumerate() {
            let next = &cum[k] + v * (&breakpoints[k + 1] - &breakpoints[k]);
            cum.push(next);
        }
        Ok(StepDensity {
            breakpoints,
            values,
            cum,
        })
    }

    /// Constant density on `layer` whose integral is `total`.
    pub fn uniform(layer: &Interval, total: Rational) -> Result<Self> {
        if layer.is_degenerate() {
            if !total.is_zero() {
                return Err(Error::InvalidDensity("positive value on an empty layer".into()));
            }
            return StepDensity::new(vec![layer.lo().clone()], vec![]);
        }
        let d = total / layer.length();
        StepDensity::new(vec![layer.lo().clone(), layer.hi().clone()], vec![d])
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn lo(&self) -> &Rational {
        &self.breakpoints[0]
    }

    pub fn hi(&self) -> &Rational {
        self.breakpoints.last().expect("non-empty breakpoints")
    }

    pub fn span(&self) -> Interval {
        Interval::span(self.lo().clone(), self.hi().clone())
    }

    pub fn total(&self) -> &Rational {
        self.cum.last().expect("non-empty cumulative")
    }

    pub fn max_density(&self) -> Rational {
        self.values.iter().cloned().fold(zero(), |a, b| rational::max(&a, &b))
    }

    /// Index of the cell containing `t`, for `lo <= t < hi`.
    fn cell_of(&self, t: &Rational) -> usize {
        self.breakpoints.partition_point(|b| b <= t) - 1
    }

    /// `V([lo, t])`, with `t` clamped into the layer.
    pub fn cumulative(&self, t: &Rational) -> Rational {
        if t <= self.lo() {
            return zero();
        }
        if t >= self.hi() {
            return self.total().clone();
        }
        let k = self.cell_of(t);
        &self.cum[k] + &self.values[k] * (t - &self.breakpoints[k])
    }

    /// Value of `layer ∩ [a, b]`; zero when `a >= b`.
    pub fn value_between(&self, a: &Rational, b: &Rational) -> Rational {
        if a >= b {
            return zero();
        }
        self.cumulative(b) - self.cumulative(a)
    }

    /// Least `y >= x` with `V([x, y]) = p`.
    pub fn cut_from(&self, layer: usize, x: &Rational, p: &Rational) -> Result<Rational> {
        let base = self.cumulative(x);
        let available = self.total() - &base;
        if p > &available {
            return Err(Error::InsufficientValue {
                layer,
                requested: p.clone(),
                available,
            });
        }
        let target = base + p;
        if p.is_zero() {
            return Ok(x.clone());
        }
        // First breakpoint right of x whose cumulative reaches the target.
        let start = self.breakpoints.partition_point(|b| b <= x);
        let j = start + self.cum[start..].partition_point(|c| c < &target);
        let left = rational::max(&self.breakpoints[j - 1], x);
        let v = &self.values[j - 1];
        Ok(&left + (target - self.cumulative(&left)) / v)
    }

    /// Greatest `z <= y` with `V([z, y]) = p`.
    pub fn cut_until(&self, layer: usize, y: &Rational, p: &Rational) -> Result<Rational> {
        let top = self.cumulative(y);
        if p > &top {
            return Err(Error::InsufficientValue {
                layer,
                requested: p.clone(),
                available: top,
            });
        }
        if p.is_zero() {
            return Ok(y.clone());
        }
        let target = top - p;
        // Last breakpoint left of y whose cumulative stays at or below target.
        let end = self.breakpoints.partition_point(|b| b < y);
        let j = self.cum[..end].partition_point(|c| c <= &target) - 1;
        let v = &self.values[j];
        Ok(&self.breakpoints[j] + (target - &self.cum[j]) / v)
    }

    /// The density restricted to `[a, b]`, which must lie inside the layer.
    pub fn restrict(&self, a: &Rational, b: &Rational) -> StepDensity {
        debug_assert!(self.lo() <= a && a <= b && b <= self.hi());
        if a == b {
            return StepDensity::new(vec![a.clone()], vec![]).expect("single breakpoint");
        }
        let mut bps = vec![a.clone()];
        let mut vals = Vec::new();
        for k in 0..self.values.len() {
            let (l, r) = (&self.breakpoints[k], &self.breakpoints[k + 1]);
            if r <= a || l >= b {
                continue;
            }
            vals.push(self.values[k].clone());
            bps.push(rational::min(r, b));
        }
        StepDensity::new(bps, vals).expect("restriction of a valid density")
    }

    /// Merges neighbouring cells with equal values.
    pub fn canonical(&self) -> StepDensity {
        let mut bps = vec![self.lo().clone()];
        let mut vals: Vec<Rational> = Vec::new();
        for k in 0..self.values.len() {
            if vals.last() == Some(&self.values[k]) {
                *bps.last_mut().unwrap() = self.breakpoints[k + 1].clone();
            } else {
                vals.push(self.values[k].clone());
                bps.push(self.breakpoints[k + 1].clone());
            }
        }
        StepDensity::new(bps, vals).expect("canonical form of a valid density")
    }
}

impl std::fmt::Debug for StepDensity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Step{{")?;
        for (k, v) in self.values.iter().enumerate() {
            write!(f, " [{}, {}]: {}", self.breakpoints[k], self.breakpoints[k + 1], v)?;
        }
        write!(f, " }}")
    }
}

/// One agent's preferences: a step density per layer.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Valuation {
    densities: Vec<StepDensity>,
}

impl Valuation {
    pub fn new(densities: Vec<StepDensity>) -> Self {
        Valuation { densities }
    }

    /// Uniform density on every layer with the given per-layer totals.
    pub fn uniform(cake: &LayeredCake, weights: &[Rational]) -> Result<Self> {
        if weights.len() != cake.m() {
            return Err(Error::Dimension(format!(
                "{} weights for {} layers",
                weights.len(),
                cake.m()
            )));
        }
        let densities = cake
            .layers()
            .iter()
            .zip(weights)
            .map(|(l, w)| StepDensity::uniform(l, w.clone()))
            .collect::<Result<_>>()?;
        Ok(Valuation { densities })
    }

    pub fn m(&self) -> usize {
        self.densities.len()
    }

    pub fn densities(&self) -> &[StepDensity] {
        &self.densities
    }

    pub fn layer(&self, l: usize) -> &StepDensity {
        &self.densities[l]
    }

    pub fn total(&self) -> Rational {
        self.densities.iter().fold(zero(), |acc, d| acc + d.total())
    }

    pub fn layer_value(&self, l: usize) -> Rational {
        self.densities[l].total().clone()
    }

    /// Exact value of a layered piece (additive over layers and intervals).
    pub fn value(&self, piece: &LayeredPiece) -> Rational {
        piece.parts().fold(zero(), |acc, (l, iv)| {
            acc + self.densities[l].value_between(iv.lo(), iv.hi())
        })
    }

    /// The valuation seen from a cake whose layers are subintervals of the
    /// current layers (after trimming).
    pub fn restrict_to(&self, cake: &LayeredCake) -> Valuation {
        Valuation {
            densities: self
                .densities
                .iter()
                .zip(cake.layers())
                .map(|(d, l)| d.restrict(l.lo(), l.hi()))
                .collect(),
        }
    }

    /// True when both valuations assign the same value to every piece.
    pub fn same_measure(&self, other: &Valuation) -> bool {
        self.m() == other.m()
            && self
                .densities
                .iter()
                .zip(&other.densities)
                .all(|(a, b)| a.canonical() == b.canonical())
    }

    pub(crate) fn fits(&self, cake: &LayeredCake) -> bool {
        self.m() == cake.m() && self.densities.iter().zip(cake.layers()).all(|(d, l)| &d.span() == l)
    }
}

/// A cake together with the agents' normalized valuations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Instance {
    cake: LayeredCake,
    agents: Vec<Valuation>,
}

impl Instance {
    /// Validates that every valuation covers every layer and sums to one.
    pub fn new(cake: LayeredCake, agents: Vec<Valuation>) -> Result<Self> {
        if agents.is_empty() {
            return Err(Error::Dimension("an instance needs at least one agent".into()));
        }
        for (i, v) in agents.iter().enumerate() {
            if !v.fits(&cake) {
                return Err(Error::Dimension(format!(
                    "agent {i}'s densities do not match the layers"
                )));
            }
            let total = v.total();
            if total != one() {
                return Err(Error::NotNormalized { agent: i, total });
            }
        }
        Ok(Instance { cake, agents })
    }

    pub fn cake(&self) -> &LayeredCake {
        &self.cake
    }

    pub fn agents(&self) -> &[Valuation] {
        &self.agents
    }

    pub fn agent(&self, i: usize) -> &Valuation {
        &self.agents[i]
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn m(&self) -> usize {
        self.cake.m()
    }
}
