//! Sets, multisets, partitions, and the Möbius functions of the subset,
//! partition, and even-partition posets.
//!
//! Multiset partitions are partitions of *positions*: `{i, i, j}` has five
//! partitions, two of which read `{{i}, {i, j}}`. Enumeration order is
//! lexicographic on the block encoding (blocks sorted by their first
//! position, each block sorted), so results are stable across runs.

mod mobius;
mod monomial;
mod partition;
mod subsets;
mod transport;

pub use mobius::{
    double_factorial, factorial, mobius_even_partition, mobius_partition, mobius_subset,
    nu_sequence, partition_block_weight,
};
pub use monomial::{symmetric_difference, MonomialIndex};
pub use partition::{
    enumerate_partitions, enumerate_position_partitions, Partition, PartitionConstraint,
};
pub use subsets::{binomial, for_each_subset, subsets_of_size, SubsetIndexer};
pub use transport::{enumerate_transport_plans, TransportPlan};
