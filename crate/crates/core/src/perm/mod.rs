//! Permutations, stabilizer chains, groups and tracked homomorphisms.

mod chain;
mod group;
mod hom;
#[allow(clippy::module_inception)]
mod perm;

pub use chain::StabChain;
pub use group::{alt_gens, factorial, sym_gens, Giant, PermGroup};
pub use hom::TrackedHom;
pub use perm::Perm;
