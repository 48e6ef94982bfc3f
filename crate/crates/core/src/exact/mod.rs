//! Exact optimum by enumerating set partitions, and an integer-program
//! exporter for external solvers.

mod enumerate;
mod lp;
mod oracle;

pub use enumerate::{enumerate_partitions, partition_count, stirling2, PartitionIterator};
pub use lp::{export_ip_model, IpModel, IpSize, LinearConstraint, Relation, VariableBound};
pub use oracle::{exact_optimum, ExactOptions};
