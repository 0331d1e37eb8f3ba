//! Aggregation of local certificates into canonical structures on Γ, and the reductions
//! those structures allow.

mod cases;
mod effect;
mod pipeline;

pub use cases::{
    aggregate, case1_partition, reduce_with_certificates, Reduction, case2a_reduce, case2b_structures, case3_structures, resolve, Aggregation, Case,
    CaseOutcome, CaseStats, CertificateTable,
};
pub use effect::{
    effect_of_structures, individualize, individualize_partition, partition_aut, partition_iso, Branch, Structure,
};
pub use pipeline::{cert_size, kary_from_subsets};
