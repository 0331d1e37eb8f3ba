//! Exact string and graph isomorphism built on permutation-group algorithms,
//! following Luks-style group-theoretic divide and conquer, with local
//! certificates for the giant case.

pub mod action;
pub mod aggregation;
pub mod certs;
pub mod config;
pub mod error;
pub mod graph;
pub mod instances;
pub mod johnson;
pub mod perm;
pub mod string_iso;

pub use error::{Error, Result};
pub use perm::{Giant, Perm, PermGroup, StabChain, TrackedHom};
pub use string_iso::{ColoredString, IsoCoset, Solver, SolverConfig};
