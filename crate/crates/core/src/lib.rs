//! Exact multi-layered cake cutting.
//!
//! A cake is a stack of layers, each a subinterval of `[0, 1]`. Agents
//! value the layers through step densities, and an allocation hands every
//! agent one piece per layer such that no agent holds two layers over the
//! same stretch of the x-axis. All arithmetic is exact.

#![allow(clippy::result_large_err)]

pub mod cuts;
pub mod error;
pub mod io;
pub mod model;
pub mod protocols;
pub mod pwl;
pub mod query;
pub mod rational;
pub mod switching;
pub mod valuation;
pub mod verify;

pub use error::{Error, Result};
pub use model::{Interval, LayeredCake, LayeredPiece, MultiAllocation, Piece};
pub use protocols::{Certificate, Protocol, ProtocolResult};
pub use rational::Rational;
pub use valuation::{Instance, StepDensity, Valuation};
pub use verify::{fairness_report, value_matrix, FairnessReport, ValueMatrix};
