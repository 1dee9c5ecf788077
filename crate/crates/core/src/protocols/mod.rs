//! The division protocols and the recursive dispatcher.
//!
//! Every protocol works on a [`Problem`]: a cake, the valuations of the
//! agents still in play (not necessarily summing to one), and their indices
//! in the top-level instance. Shares are measured against each agent's
//! value of the current cake, so sub-problems on merged or trimmed cakes
//! need no renormalization.

mod envy;
mod proportional;
mod recursive;
mod two;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{LayeredCake, LayeredPiece, MultiAllocation};
use crate::query::{QueryCounts, QuerySession};
use crate::rational::{int, Rational};
use crate::valuation::{Instance, Valuation};

pub use envy::{envy_free_3x2, envy_free_3x2_instance, shared_pair};
pub use proportional::proportional_3x3;
pub use recursive::{is_supported_shape, proportional_3layer_n, proportional_recursive, trim_step, Trim, TrimMark};
pub use two::{cut_and_choose_2, exact_2x2};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    Exact,
    EnvyFree,
    Proportional,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Certificate::Exact => "exact",
            Certificate::EnvyFree => "envy-free",
            Certificate::Proportional => "proportional",
        })
    }
}

/// Protocol selectors as used on the command line.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Protocol {
    Exact2x2,
    EnvyFree3x2,
    Prop3x3,
    Prop3n,
    Prop,
    CutChoose2,
}

impl Protocol {
    pub const ALL: [Protocol; 6] = [
        Protocol::Exact2x2,
        Protocol::EnvyFree3x2,
        Protocol::Prop3x3,
        Protocol::Prop3n,
        Protocol::Prop,
        Protocol::CutChoose2,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Protocol::Exact2x2 => "exact2x2",
            Protocol::EnvyFree3x2 => "ef3x2",
            Protocol::Prop3x3 => "prop3x3",
            Protocol::Prop3n => "prop3n",
            Protocol::Prop => "prop",
            Protocol::CutChoose2 => "cutchoose2",
        }
    }

    pub fn run(&self, inst: &Instance) -> Result<ProtocolResult> {
        match self {
            Protocol::Exact2x2 => exact_2x2(inst),
            Protocol::EnvyFree3x2 => envy_free_3x2_instance(inst),
            Protocol::Prop3x3 => proportional_3x3(inst),
            Protocol::Prop3n => proportional_3layer_n(inst),
            Protocol::Prop => proportional_recursive(inst),
            Protocol::CutChoose2 => cut_and_choose_2(inst),
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.id() == s)
            .ok_or_else(|| format!("unknown protocol {s:?}"))
    }
}

/// Structural checks made while a protocol recurses.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct Audit {
    /// Pieces mapped from a merged cake back to its parent.
    pub lifts: usize,
    /// Sub-allocations checked for contiguity, non-overlap and completeness.
    pub levels: usize,
    pub max_depth: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProtocolResult {
    pub protocol: Protocol,
    pub allocation: MultiAllocation,
    pub queries: Vec<QueryCounts>,
    pub certificate: Certificate,
    /// Whether the protocol promises one interval per agent and layer.
    pub contiguous: bool,
    pub audit: Audit,
    /// Named cut positions, in the order the protocol fixed them.
    pub cuts: Vec<(String, Rational)>,
}

impl ProtocolResult {
    pub fn cut(&self, name: &str) -> Option<&Rational> {
        self.cuts.iter().find(|(k, _)| k == name).map(|(_, v)| v)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Problem {
    pub cake: LayeredCake,
    pub agents: Vec<Valuation>,
    pub ids: Vec<usize>,
}

impl Problem {
    pub fn top(inst: &Instance) -> Self {
        Problem {
            cake: inst.cake().clone(),
            agents: inst.agents().to_vec(),
            ids: (0..inst.n()).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn m(&self) -> usize {
        self.cake.m()
    }

    /// `V_i(cake) / n`.
    pub fn share(&self, i: usize) -> Rational {
        self.agents[i].total() / int(self.n() as i64)
    }
}

pub(crate) struct Ctx {
    pub session: QuerySession,
    pub audit: Audit,
    pub cuts: Vec<(String, Rational)>,
    depth: usize,
}

impl Ctx {
    pub fn new(n: usize) -> Self {
        Ctx {
            session: QuerySession::new(n),
            audit: Audit::default(),
            cuts: Vec::new(),
            depth: 0,
        }
    }

    /// Records a cut made by the top-level protocol; nested calls stay quiet.
    pub fn note(&mut self, name: &str, x: &Rational) {
        if self.depth > 1 {
            return;
        }
        self.cuts.push((name.to_string(), x.clone()));
    }

    pub fn value(&mut self, p: &Problem, i: usize, piece: &LayeredPiece) -> Rational {
        self.session.value(p.ids[i], &p.agents[i], piece)
    }

    pub fn enter(&mut self) {
        self.depth += 1;
        self.audit.max_depth = self.audit.max_depth.max(self.depth);
    }

    pub fn leave(&mut self) {
        self.depth -= 1;
    }

    /// Checks that a sub-allocation tiles its cake with contiguous,
    /// non-overlapping pieces.
    pub fn check_level(&mut self, cake: &LayeredCake, pieces: &[LayeredPiece]) -> Result<()> {
        let a = MultiAllocation::new(cake.clone(), pieces.to_vec())?;
        if !a.is_contiguous() || !a.is_feasible() {
            return Err(Error::LiftViolation);
        }
        if !a.is_complete() {
            return Err(Error::Internal("sub-allocation leaves cake unassigned".into()));
        }
        self.audit.levels += 1;
        Ok(())
    }

    pub fn finish(
        self,
        protocol: Protocol,
        cake: &LayeredCake,
        pieces: Vec<LayeredPiece>,
        certificate: Certificate,
        contiguous: bool,
    ) -> Result<ProtocolResult> {
        Ok(ProtocolResult {
            protocol,
            allocation: MultiAllocation::new(cake.clone(), pieces)?,
            queries: self.session.counts().to_vec(),
            certificate,
            contiguous,
            audit: self.audit,
            cuts: self.cuts,
        })
    }
}

pub(crate) fn require(inst: &Instance, n: Option<usize>, m: Option<usize>, what: &str) -> Result<()> {
    let bad_n = n.is_some_and(|n| inst.n() != n);
    let bad_m = m.is_some_and(|m| inst.m() != m);
    if bad_n || bad_m {
        return Err(Error::Precondition(format!(
            "{what} needs {} agents on {} layers, got {} on {}",
            n.map_or("any".to_string(), |n| n.to_string()),
            m.map_or("any".to_string(), |m| m.to_string()),
            inst.n(),
            inst.m()
        )));
    }
    Ok(())
}
