//! Independent checking of allocations.
//!
//! The integration oracle here walks the raw breakpoints of each density
//! itself, right to left, and never touches the cumulative tables or the
//! query layer.

use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::model::{Interval, LayeredPiece, MultiAllocation};
use crate::protocols::{Certificate, ProtocolResult};
use crate::rational::{abs, format, half, int, parse, zero, Rational};
use crate::valuation::{Instance, StepDensity, Valuation};

/// `entries[i][j] = V_i(P_j)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ValueMatrix {
    pub entries: Vec<Vec<Rational>>,
}

impl ValueMatrix {
    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i][j]
    }

    pub fn own(&self, i: usize) -> &Rational {
        &self.entries[i][i]
    }

    pub fn row_sum(&self, i: usize) -> Rational {
        self.entries[i].iter().fold(zero(), |a, b| a + b)
    }
}

impl Serialize for ValueMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.n()))?;
        for row in &self.entries {
            let row: Vec<String> = row.iter().map(format).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for ValueMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<Vec<String>>::deserialize(d)?;
        let entries = raw
            .iter()
            .map(|row| row.iter().map(|s| parse(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Ok(ValueMatrix { entries })
    }
}

pub fn value_matrix(inst: &Instance, a: &MultiAllocation) -> Result<ValueMatrix> {
    if a.n() != inst.n() {
        return Err(Error::Dimension(format!("{} pieces for {} agents", a.n(), inst.n())));
    }
    if a.cake() != inst.cake() {
        return Err(Error::Dimension("allocation is over a different cake".into()));
    }
    let entries = inst
        .agents()
        .iter()
        .map(|v| a.pieces().iter().map(|p| v.value(p)).collect())
        .collect();
    Ok(ValueMatrix { entries })
}

#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct Structural {
    pub feasible: bool,
    pub contiguous: bool,
    pub complete: bool,
}

/// Every violation, not just the first.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct Witnesses {
    /// Agents below their share.
    pub proportional: Vec<usize>,
    /// `(i, j)` with `V_i(P_j) > V_i(P_i)`.
    pub envy: Vec<(usize, usize)>,
    /// `(i, j)`, `i < j`, with `V_i(P_i) != V_j(P_j)`.
    pub equitable: Vec<(usize, usize)>,
    /// `(i, j)` with `V_i(P_j) != 1/n`.
    pub exact: Vec<(usize, usize)>,
    /// Agents holding two layers over the same stretch.
    pub overlapping: Vec<usize>,
    /// `(agent, layer)` pairs with more than one interval.
    pub split: Vec<(usize, usize)>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FairnessReport {
    pub proportional: bool,
    pub envy_free: bool,
    pub equitable: bool,
    pub exact: bool,
    pub structural: Structural,
    pub witnesses: Witnesses,
    pub values: ValueMatrix,
}

impl FairnessReport {
    pub fn satisfies(&self, c: Certificate) -> bool {
        match c {
            Certificate::Exact => self.exact,
            Certificate::EnvyFree => self.envy_free,
            Certificate::Proportional => self.proportional,
        }
    }

    /// Whether the report backs every claim the protocol made.
    pub fn confirms(&self, r: &ProtocolResult) -> bool {
        self.satisfies(r.certificate)
            && self.structural.feasible
            && self.structural.complete
            && (!r.contiguous || self.structural.contiguous)
    }
}

pub fn fairness_report(inst: &Instance, a: &MultiAllocation) -> Result<FairnessReport> {
    let values = value_matrix(inst, a)?;
    let n = values.n();
    let mut w = Witnesses::default();
    let nn = int(n as i64);
    for i in 0..n {
        if values.own(i) < &(inst.agent(i).total() / &nn) {
            w.proportional.push(i);
        }
        for j in 0..n {
            if values.get(i, j) > values.own(i) {
                w.envy.push((i, j));
            }
            if i < j && values.own(i) != values.own(j) {
                w.equitable.push((i, j));
            }
            if values.get(i, j) != &(inst.agent(i).total() / &nn) {
                w.exact.push((i, j));
            }
        }
        let piece = a.piece(i);
        if !piece.is_non_overlapping() {
            w.overlapping.push(i);
        }
        for (l, p) in piece.layers().iter().enumerate() {
            if !p.is_contiguous() {
                w.split.push((i, l));
            }
        }
    }
    Ok(FairnessReport {
        proportional: w.proportional.is_empty(),
        envy_free: w.envy.is_empty(),
        equitable: w.equitable.is_empty(),
        exact: w.exact.is_empty(),
        structural: Structural {
            feasible: w.overlapping.is_empty(),
            contiguous: w.split.is_empty(),
            complete: a.is_complete(),
        },
        witnesses: w,
        values,
    })
}

/// Density at an interior point of a cell; zero outside the layer.
fn density_at(d: &StepDensity, t: &Rational) -> Rational {
    let b = d.breakpoints();
    for k in (0..d.values().len()).rev() {
        if &b[k] < t && t < &b[k + 1] {
            return d.values()[k].clone();
        }
    }
    zero()
}

fn riemann_interval(d: &StepDensity, iv: &Interval, resolution: u32) -> Rational {
    let r = int(resolution as i64);
    let mut grid: Vec<Rational> = (0..=resolution).map(|k| int(k as i64) / &r).collect();
    grid.extend(d.breakpoints().iter().cloned());
    grid.push(iv.lo().clone());
    grid.push(iv.hi().clone());
    grid.retain(|t| iv.contains_point(t));
    grid.sort();
    grid.dedup();
    let mut sum = zero();
    for w in grid.windows(2).rev() {
        let mid = (&w[0] + &w[1]) * half();
        sum += density_at(d, &mid) * (&w[1] - &w[0]);
    }
    sum
}

/// Midpoint Riemann sum of `v` over `p` on the `1/resolution` grid refined
/// by every density breakpoint and piece endpoint.
pub fn riemann_value(v: &Valuation, p: &LayeredPiece, resolution: u32) -> Rational {
    let resolution = resolution.max(1);
    let mut sum = zero();
    for (l, iv) in p.parts().collect::<Vec<_>>().into_iter().rev() {
        sum += riemann_interval(v.layer(l), iv, resolution);
    }
    sum
}

/// [`riemann_value`] for agent `agent` of `inst`.
pub fn riemann_oracle(inst: &Instance, agent: usize, p: &LayeredPiece, resolution: u32) -> Rational {
    riemann_value(inst.agent(agent), p, resolution)
}

pub const MAX_ORACLE_GRID: u32 = 64;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GridOptimum {
    /// Least `|V_1(TLR) - 1/2| + |V_2(TLR) - 1/2|` on the grid.
    pub deficiency: Rational,
    /// Lexicographically least grid pair attaining it.
    pub x: Rational,
    pub y: Rational,
}

/// `V([0, t])` on each point of the `1/grid` lattice, by cell overlap.
fn lattice_mass(d: &StepDensity, grid: u32) -> Vec<Rational> {
    let g = int(grid as i64);
    let b = d.breakpoints();
    (0..=grid)
        .map(|k| {
            let t = int(k as i64) / &g;
            let mut s = zero();
            for c in (0..d.values().len()).rev() {
                if b[c] < t {
                    let right = if b[c + 1] < t { b[c + 1].clone() } else { t.clone() };
                    s += &d.values()[c] * (right - &b[c]);
                }
            }
            s
        })
        .collect()
}

/// Enumerates every two-knife pair `x <= y` on the `1/grid` lattice.
pub fn exhaustive_2x2_oracle(inst: &Instance, grid: u32) -> Result<GridOptimum> {
    if inst.n() != 2 || inst.m() != 2 {
        return Err(Error::Precondition(format!(
            "the grid oracle needs 2 agents on 2 layers, got {} on {}",
            inst.n(),
            inst.m()
        )));
    }
    if grid == 0 {
        return Err(Error::Precondition("the grid needs at least one step".into()));
    }
    if grid > MAX_ORACLE_GRID {
        return Err(Error::GridTooLarge(grid));
    }
    let tables: Vec<[Vec<Rational>; 2]> = inst
        .agents()
        .iter()
        .map(|v| [lattice_mass(v.layer(0), grid), lattice_mass(v.layer(1), grid)])
        .collect();
    let targets: Vec<Rational> = inst.agents().iter().map(|v| v.total() * half()).collect();
    let g = int(grid as i64);
    let mut best: Option<(Rational, usize, usize)> = None;
    for x in 0..=grid as usize {
        for y in x..=grid as usize {
            let mut dev = zero();
            for (t, target) in tables.iter().zip(&targets) {
                let l1_top = &t[0][grid as usize];
                let tlr = &t[0][x] + (&t[1][y] - &t[1][x]) + (l1_top - &t[0][y]);
                dev += abs(&(tlr - target));
            }
            if best.as_ref().is_none_or(|(b, _, _)| &dev < b) {
                best = Some((dev, x, y));
            }
        }
    }
    let (deficiency, x, y) = best.expect("grid has at least one pair");
    Ok(GridOptimum {
        deficiency,
        x: int(x as i64) / &g,
        y: int(y as i64) / &g,
    })
}

/// Whole-cake sanity for the oracle: every agent's total, by Riemann sum.
pub fn riemann_totals(inst: &Instance, resolution: u32) -> Vec<Rational> {
    let whole = inst.cake().whole();
    inst.agents()
        .iter()
        .map(|v| riemann_value(v, &whole, resolution))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LayeredCake;
    use crate::protocols::{exact_2x2, proportional_3x3};
    use crate::rational::{one, rat};

    fn iv(a: Rational, b: Rational) -> Interval {
        Interval::new(a, b).unwrap()
    }

    fn uniform(cake: &LayeredCake, w: &[Rational]) -> Valuation {
        Valuation::uniform(cake, w).unwrap()
    }

    fn golden() -> Instance {
        let cake = LayeredCake::unit(2);
        let v1 = uniform(&cake, &[rat(3, 4), rat(1, 4)]);
        let v2 = Valuation::new(vec![
            StepDensity::new(vec![zero(), rat(1, 2), one()], vec![one(), zero()]).unwrap(),
            StepDensity::new(vec![zero(), rat(1, 2), one()], vec![zero(), one()]).unwrap(),
        ]);
        Instance::new(cake, vec![v1, v2]).unwrap()
    }

    #[test]
    fn layer_per_agent_matrix() {
        let cake = LayeredCake::unit(2);
        let v = uniform(&cake, &[half(), half()]);
        let inst = Instance::new(cake.clone(), vec![v.clone(), v]).unwrap();
        let a = MultiAllocation::new(
            cake,
            vec![
                LayeredPiece::from_parts(2, [(0, Interval::unit())]),
                LayeredPiece::from_parts(2, [(1, Interval::unit())]),
            ],
        )
        .unwrap();
        let m = value_matrix(&inst, &a).unwrap();
        assert_eq!(m.entries, vec![vec![half(), half()], vec![half(), half()]]);
        assert_eq!(m.row_sum(0), one());
        let r = fairness_report(&inst, &a).unwrap();
        assert!(r.exact && r.envy_free && r.proportional && r.equitable);
        assert!(r.structural.feasible && r.structural.contiguous && r.structural.complete);
    }

    #[test]
    fn everything_to_one_agent() {
        let cake = LayeredCake::unit(2);
        let v = uniform(&cake, &[half(), half()]);
        let inst = Instance::new(cake.clone(), vec![v.clone(), v.clone(), v]).unwrap();
        let a = MultiAllocation::new(
            cake.clone(),
            vec![LayeredPiece::empty(2), cake.whole(), LayeredPiece::empty(2)],
        )
        .unwrap();
        let r = fairness_report(&inst, &a).unwrap();
        assert!(!r.proportional);
        assert_eq!(r.witnesses.proportional, vec![0, 2]);
        assert_eq!(r.witnesses.envy, vec![(0, 1), (2, 1)]);
        // the whole cake overlaps itself across layers
        assert_eq!(r.witnesses.overlapping, vec![1]);
    }

    #[test]
    fn dimension_mismatch() {
        let cake = LayeredCake::unit(1);
        let v = uniform(&cake, &[one()]);
        let inst = Instance::new(cake.clone(), vec![v.clone(), v]).unwrap();
        let a = MultiAllocation::new(cake.clone(), vec![cake.whole()]).unwrap();
        assert!(matches!(value_matrix(&inst, &a), Err(Error::Dimension(_))));
    }

    #[test]
    fn certificates_hold_on_protocol_output() {
        let inst = golden();
        let r = exact_2x2(&inst).unwrap();
        let rep = fairness_report(&inst, &r.allocation).unwrap();
        assert!(rep.exact && rep.envy_free && rep.proportional && rep.confirms(&r));

        let cake = LayeredCake::unit(3);
        let v = uniform(&cake, &[rat(1, 3), rat(1, 3), rat(1, 3)]);
        let inst = Instance::new(cake, vec![v.clone(), v.clone(), v]).unwrap();
        let r = proportional_3x3(&inst).unwrap();
        let rep = fairness_report(&inst, &r.allocation).unwrap();
        assert!(rep.proportional && rep.exact && rep.confirms(&r));
    }

    #[test]
    fn riemann_matches_worked_value() {
        let cake = LayeredCake::unit(2);
        let v = uniform(&cake, &[rat(3, 4), rat(1, 4)]);
        let p = LayeredPiece::from_parts(2, [(0, iv(zero(), rat(1, 3))), (1, iv(rat(2, 3), one()))]);
        for res in [1, 2, 7, 100] {
            assert_eq!(riemann_value(&v, &p, res), rat(1, 3));
        }
        let inst = golden();
        assert_eq!(riemann_totals(&inst, 3), vec![one(), one()]);
    }

    #[test]
    fn riemann_handles_offset_layers() {
        let v = Valuation::new(vec![StepDensity::new(
            vec![rat(1, 5), rat(1, 3), rat(4, 5)],
            vec![rat(3, 2), rat(12, 7)],
        )
        .unwrap()]);
        let p = LayeredPiece::from_parts(1, [(0, iv(rat(1, 4), rat(1, 2)))]);
        assert_eq!(riemann_value(&v, &p, 5), v.value(&p));
    }

    #[test]
    fn grid_oracle_examples() {
        let cake = LayeredCake::unit(2);
        let u = uniform(&cake, &[half(), half()]);
        let inst = Instance::new(cake, vec![u.clone(), u]).unwrap();
        let o = exhaustive_2x2_oracle(&inst, 8).unwrap();
        assert_eq!((o.deficiency, o.x, o.y), (zero(), zero(), zero()));

        let o = exhaustive_2x2_oracle(&golden(), 16).unwrap();
        assert_eq!(o.deficiency, zero());
        assert_eq!((o.x, o.y), (rat(1, 4), rat(3, 4)));

        assert!(matches!(
            exhaustive_2x2_oracle(&golden(), 65),
            Err(Error::GridTooLarge(65))
        ));
    }
}
