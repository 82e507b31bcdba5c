//! Online strategic classification on manipulation graphs.
//!
//! Agents best-respond to a revealed classifier by moving to a positively
//! labeled neighbor. The crate provides the graph substrate, explicit finite
//! hypothesis classes with Littlestone dimension and SOA, realizable learners
//! (Uniform-Mix, Expert-Mix), agnostic learners (FTRL with a log-barrier,
//! EXP3, explore-then-Hedge), lower-bound adversaries, and a seeded trial
//! harness that checks per-round invariants from the god view.

pub mod adversary;
pub mod agnostic;
pub mod error;
pub mod graph;
pub mod harness;
pub mod hypothesis;
pub mod learner;
pub mod realizable;

pub use error::{Error, Result};
pub use graph::{BestResponseOutcome, ManipulationGraph, VertexId};
pub use hypothesis::{Hypothesis, HypothesisClass, Label};
pub use learner::{Atom, AtomKind, ClassifierDistribution, InvariantLog, Learner};
