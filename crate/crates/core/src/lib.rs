//! Simulator and experiment harness for active de-anonymization attacks on
//! random user/group membership graphs.
//!
//! An attacker holds a noisy copy of a bipartite membership graph and
//! identifies a hidden victim by asking group-membership questions (answered
//! through a noisy channel) and user-identity questions (answered exactly).
//! The strategies in [`strategies`] differ in how they turn answers into an
//! ordered list of suspects; [`experiments`] estimates their expected query
//! counts and checks them against closed forms and an exact oracle.

pub mod channels;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod oracle;
pub mod strategies;
pub mod typicality;

pub use channels::{build_joint, mutual_information_uy, BinaryChannel, JointUYZ};
pub use error::{Error, Result};
pub use experiments::{run_cell, CellConfig, CellResult, NoiseModel, ReportRecord};
pub use graph::{generate_graph, observe_noisy, BipartiteGraph, GraphNoiseParams};
pub use oracle::{AttackSession, Query};
pub use strategies::{run_strategy, AttackOutcome, Strategy, StrategyParams};
