//! Individual and majority switching points.

use crate::cuts::DiagonalShape;
use crate::error::{Error, Result};
use crate::model::LayeredCake;
use crate::pwl::{Component, PiecewiseLinear};
use crate::rational::{int, one, signum, zero, Rational};
use crate::valuation::{Instance, Valuation};

/// `d(x) = V(LR(x)) - V(RL(x))` for one agent.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PreferenceMargin {
    pub agent: usize,
    pub margin: PiecewiseLinear,
}

impl PreferenceMargin {
    pub fn new(agent: usize, v: &Valuation, shape: &DiagonalShape) -> Self {
        let total = shape.covered_value(v);
        let xs = shape.profile(v).breakpoints().to_vec();
        let margin = PiecewiseLinear::sample(xs, |x| int(2) * shape.lr_value(v, x) - &total);
        PreferenceMargin { agent, margin }
    }

    pub fn at(&self, x: &Rational) -> Rational {
        self.margin.eval(x)
    }

    pub fn zeros(&self) -> Vec<Component> {
        self.margin.solutions(&zero())
    }
}

/// Switching point over the diagonal `shape`: the midpoint of the leftmost
/// maximal solution component of `V(LR(x)) = V/2`.
pub fn switching_point_for(v: &Valuation, shape: &DiagonalShape) -> Result<Rational> {
    let half = shape.covered_value(v) / int(2);
    shape
        .profile(v)
        .leftmost_midpoint(&half)
        .map_err(|_| Error::Internal("switching point missing".into()))
}

/// Switching point over the cake's own diagonal.
pub fn switching_point(v: &Valuation, cake: &LayeredCake) -> Result<Rational> {
    switching_point_for(v, &DiagonalShape::for_layers(cake.m()))
}

/// A point where half the agents weakly prefer each diagonal piece.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MajoritySplit {
    pub x: Rational,
    pub group_lr: Vec<usize>,
    pub group_rl: Vec<usize>,
}

/// Scans the zero sets of all margins (plus 0 and 1) left to right and
/// takes the first point where neither strict side has more than `n/2`
/// agents. Indifferent agents fill `group_lr` first, by index.
pub fn majority_split(agents: &[Valuation], shape: &DiagonalShape) -> Result<MajoritySplit> {
    let n = agents.len();
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::OddAgentCount(n));
    }
    let margins: Vec<PreferenceMargin> = agents
        .iter()
        .enumerate()
        .map(|(i, v)| PreferenceMargin::new(i, v, shape))
        .collect();
    let mut candidates = vec![zero(), one()];
    for d in &margins {
        for c in d.zeros() {
            candidates.push(c.lo);
            candidates.push(c.hi);
        }
    }
    candidates.sort();
    candidates.dedup();
    let half = n / 2;
    for x in &candidates {
        let signs: Vec<i8> = margins.iter().map(|d| signum(&d.at(x))).collect();
        let pos = signs.iter().filter(|&&s| s > 0).count();
        let neg = signs.iter().filter(|&&s| s < 0).count();
        if pos > half || neg > half {
            continue;
        }
        let mut group_lr: Vec<usize> = (0..n).filter(|&i| signs[i] > 0).collect();
        let mut group_rl: Vec<usize> = (0..n).filter(|&i| signs[i] < 0).collect();
        for i in (0..n).filter(|&i| signs[i] == 0) {
            if group_lr.len() < half {
                group_lr.push(i);
            } else {
                group_rl.push(i);
            }
        }
        group_lr.sort_unstable();
        group_rl.sort_unstable();
        return Ok(MajoritySplit {
            x: x.clone(),
            group_lr,
            group_rl,
        });
    }
    Err(Error::NoMajorityPoint {
        candidates: candidates.len(),
    })
}

/// Majority switching point of an instance over its cake's diagonal.
pub fn majority_switching_point(inst: &Instance) -> Result<MajoritySplit> {
    majority_split(inst.agents(), &DiagonalShape::for_layers(inst.m()))
}
