//! Continuous piecewise-linear functions with exact rational breakpoints.

use crate::error::{Error, Result};
use crate::rational::{self, signum, Rational};

/// A continuous function given by its values at strictly increasing
/// breakpoints and linear in between.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PiecewiseLinear {
    xs: Vec<Rational>,
    ys: Vec<Rational>,
}

/// A maximal connected piece of a solution set; `lo == hi` for an isolated
/// root.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Component {
    pub lo: Rational,
    pub hi: Rational,
}

impl Component {
    pub fn midpoint(&self) -> Rational {
        rational::midpoint(&self.lo, &self.hi)
    }
}

impl PiecewiseLinear {
    /// Samples `f` at the sorted, deduplicated breakpoints.
    pub fn sample(mut xs: Vec<Rational>, f: impl Fn(&Rational) -> Rational) -> Self {
        xs.sort();
        xs.dedup();
        assert!(!xs.is_empty(), "a piecewise-linear function needs a breakpoint");
        let ys = xs.iter().map(&f).collect();
        PiecewiseLinear { xs, ys }
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.xs
    }

    pub fn values(&self) -> &[Rational] {
        &self.ys
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let n = self.xs.len();
        if x <= &self.xs[0] {
            return self.ys[0].clone();
        }
        if x >= &self.xs[n - 1] {
            return self.ys[n - 1].clone();
        }
        let k = self.xs.partition_point(|b| b <= x) - 1;
        let (x0, x1) = (&self.xs[k], &self.xs[k + 1]);
        let (y0, y1) = (&self.ys[k], &self.ys[k + 1]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// The solution set of `f(x) = target`, as sorted maximal components.
    pub fn solutions(&self, target: &Rational) -> Vec<Component> {
        let h: Vec<Rational> = self.ys.iter().map(|y| y - target).collect();
        let mut raw: Vec<Component> = Vec::new();
        let mut push = |lo: Rational, hi: Rational| match raw.last_mut() {
            Some(last) if last.hi >= lo => {
                if hi > last.hi {
                    last.hi = hi;
                }
            }
            _ => raw.push(Component { lo, hi }),
        };
        for k in 0..self.xs.len() {
            if signum(&h[k]) == 0 {
                push(self.xs[k].clone(), self.xs[k].clone());
            }
            if k + 1 == self.xs.len() {
                break;
            }
            let (s0, s1) = (signum(&h[k]), signum(&h[k + 1]));
            if s0 == 0 && s1 == 0 {
                push(self.xs[k].clone(), self.xs[k + 1].clone());
            } else if s0 * s1 < 0 {
                let (x0, x1) = (&self.xs[k], &self.xs[k + 1]);
                let root = x0 + (x1 - x0) * &h[k] / (&h[k] - &h[k + 1]);
                push(root.clone(), root);
            }
        }
        raw
    }

    /// Least `x` with `f(x) = target`.
    pub fn least_solution(&self, target: &Rational) -> Result<Rational> {
        self.solutions(target)
            .into_iter()
            .next()
            .map(|c| c.lo)
            .ok_or_else(|| Error::UnattainableTarget { target: target.clone() })
    }

    /// Midpoint of the leftmost maximal solution component; an isolated
    /// root is its own midpoint.
    pub fn leftmost_midpoint(&self, target: &Rational) -> Result<Rational> {
        self.solutions(target)
            .into_iter()
            .next()
            .map(|c| c.midpoint())
            .ok_or_else(|| Error::UnattainableTarget { target: target.clone() })
    }
}
