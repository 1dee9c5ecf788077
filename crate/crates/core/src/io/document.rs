//! JSON documents for instances and allocations. Rationals are written as
//! reduced `"p/q"` strings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Interval, LayeredCake, LayeredPiece, MultiAllocation, Piece};
use crate::protocols::{Certificate, ProtocolResult};
use crate::query::QueryCounts;
use crate::rational::{format, one, parse};
use crate::valuation::{Instance, StepDensity, Valuation};
use crate::verify::FairnessReport;

pub const INSTANCE_VERSION: &str = "layercake-instance/1";
pub const ALLOCATION_VERSION: &str = "layercake-allocation/1";

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct IntervalDoc {
    pub lo: String,
    pub hi: String,
}

impl IntervalDoc {
    fn from_interval(iv: &Interval) -> Self {
        IntervalDoc {
            lo: format(iv.lo()),
            hi: format(iv.hi()),
        }
    }

    fn to_interval(&self) -> Result<Interval> {
        Interval::new(parse(&self.lo)?, parse(&self.hi)?)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DensityDoc {
    pub breakpoints: Vec<String>,
    pub values: Vec<String>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub version: String,
    pub layers: Vec<IntervalDoc>,
    /// `agents[i][l]` is agent `i`'s density on layer `l`.
    pub agents: Vec<Vec<DensityDoc>>,
}

impl InstanceDocument {
    pub fn from_instance(inst: &Instance) -> Self {
        InstanceDocument {
            version: INSTANCE_VERSION.to_string(),
            layers: inst.cake().layers().iter().map(IntervalDoc::from_interval).collect(),
            agents: inst
                .agents()
                .iter()
                .map(|v| {
                    v.densities()
                        .iter()
                        .map(|d| DensityDoc {
                            breakpoints: d.breakpoints().iter().map(format).collect(),
                            values: d.values().iter().map(format).collect(),
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_instance(&self) -> Result<Instance> {
        check_version(&self.version, INSTANCE_VERSION)?;
        let layers = self
            .layers
            .iter()
            .map(IntervalDoc::to_interval)
            .collect::<Result<Vec<_>>>()?;
        let cake = LayeredCake::new(layers)?;
        let mut agents = Vec::with_capacity(self.agents.len());
        for (i, doc) in self.agents.iter().enumerate() {
            let bad = |reason: String| Error::InvalidAgent { agent: i, reason };
            if doc.len() != cake.m() {
                return Err(bad(format!("{} densities for {} layers", doc.len(), cake.m())));
            }
            let mut densities = Vec::with_capacity(doc.len());
            for (l, d) in doc.iter().enumerate() {
                let nums = |xs: &[String]| xs.iter().map(|s| parse(s)).collect::<Result<Vec<_>>>();
                let density = nums(&d.breakpoints)
                    .and_then(|b| Ok((b, nums(&d.values)?)))
                    .and_then(|(b, v)| StepDensity::new(b, v))
                    .map_err(|e| bad(format!("layer {l}: {e}")))?;
                if &density.span() != cake.layer(l)? {
                    return Err(bad(format!("layer {l}: density does not span the layer")));
                }
                densities.push(density);
            }
            let v = Valuation::new(densities);
            let total = v.total();
            if total != one() {
                return Err(Error::NotNormalized { agent: i, total });
            }
            agents.push(v);
        }
        Instance::new(cake, agents)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CutDoc {
    pub name: String,
    pub at: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AllocationDocument {
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cuts: Vec<CutDoc>,
    /// One entry per agent, present only when queries were counted.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub queries: Vec<QueryCounts>,
    /// `pieces[i][l]` lists agent `i`'s intervals on layer `l`.
    pub pieces: Vec<Vec<Vec<IntervalDoc>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<FairnessReport>,
}

impl AllocationDocument {
    pub fn from_allocation(a: &MultiAllocation) -> Self {
        AllocationDocument {
            version: ALLOCATION_VERSION.to_string(),
            protocol: None,
            certificate: None,
            cuts: Vec::new(),
            queries: Vec::new(),
            pieces: a
                .pieces()
                .iter()
                .map(|p| {
                    p.layers()
                        .iter()
                        .map(|piece| piece.intervals().iter().map(IntervalDoc::from_interval).collect())
                        .collect()
                })
                .collect(),
            report: None,
        }
    }

    pub fn from_result(r: &ProtocolResult, count_queries: bool) -> Self {
        let mut doc = AllocationDocument::from_allocation(&r.allocation);
        doc.protocol = Some(r.protocol.id().to_string());
        doc.certificate = Some(r.certificate);
        doc.cuts = r
            .cuts
            .iter()
            .map(|(name, x)| CutDoc {
                name: name.clone(),
                at: format(x),
            })
            .collect();
        if count_queries {
            doc.queries = r.queries.clone();
        }
        doc
    }

    pub fn to_allocation(&self, cake: &LayeredCake) -> Result<MultiAllocation> {
        check_version(&self.version, ALLOCATION_VERSION)?;
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for (i, agent) in self.pieces.iter().enumerate() {
            if agent.len() != cake.m() {
                return Err(Error::InvalidAgent {
                    agent: i,
                    reason: format!("{} layers in piece, cake has {}", agent.len(), cake.m()),
                });
            }
            let per_layer = agent
                .iter()
                .map(|ivs| {
                    let raw = ivs.iter().map(IntervalDoc::to_interval).collect::<Result<Vec<_>>>()?;
                    Ok(Piece::normalize(raw))
                })
                .collect::<Result<Vec<_>>>()?;
            pieces.push(LayeredPiece::new(per_layer));
        }
        MultiAllocation::new(cake.clone(), pieces)
    }
}

fn check_version(found: &str, expected: &str) -> Result<()> {
    if found != expected {
        return Err(Error::Document(format!("version {found:?}, expected {expected:?}")));
    }
    Ok(())
}

fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents always serialize");
    s.push('\n');
    s
}

fn from_json<'a, T: Deserialize<'a>>(bytes: &'a [u8]) -> Result<T> {
    serde_json::from_slice(bytes).map_err(|e| Error::Document(e.to_string()))
}

pub fn load_instance(bytes: &[u8]) -> Result<Instance> {
    from_json::<InstanceDocument>(bytes)?.to_instance()
}

pub fn save_instance(inst: &Instance) -> String {
    to_json(&InstanceDocument::from_instance(inst))
}

pub fn load_allocation(bytes: &[u8]) -> Result<AllocationDocument> {
    from_json(bytes)
}

pub fn save_allocation(doc: &AllocationDocument) -> String {
    to_json(doc)
}
