//! String isomorphism: `Iso_G(x, y)` as a coset, with the recursive solver.

mod coset;
mod giant;
mod solver;
mod string;

pub use coset::{iso_cosets_union, IsoCoset};
pub use giant::giant_coset_iso;
pub use solver::{binomial, brute_force, johnson_parameters, within_quota, Solver, SolverConfig};
pub use string::{ColoredString, Window};

