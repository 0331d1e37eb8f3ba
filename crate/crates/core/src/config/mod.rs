//! Relational and partition structures, coherent configurations and the tools built on them.

mod design;
mod partition;
mod scheme;
mod structure;
mod twins;
mod wl;

pub use design::{design_outcome_for_tuple, design_tuple_search, for_each_tuple, DesignOutcome};
pub use partition::{validate_colored_partition, ColoredPartition};
pub use scheme::{is_johnson, johnson_scheme, k_subsets, JohnsonMatch, JohnsonScheme};
pub use structure::{structure_aut, structure_iso, PartitionStructure, RelationalStructure};
pub use twins::{digraph_symmetry_defect_check, symmetry_defect, twin_classes_of_group, twin_classes_of_structure};
pub use wl::{constituent_biregularity, orbital_configuration, same_coloring, wl2_refine, CoherentConfiguration};
