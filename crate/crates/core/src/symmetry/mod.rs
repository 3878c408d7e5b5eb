//! Local symmetries: interchangeable variables inside a single factor and the
//! histogram encoding that stores one potential per orbit.

mod compact;
mod histogram;
mod partition;

pub use compact::{
    check_symmetric, compact_lookup, compact_multiply, compact_sum_out, decode, encode,
    encode_unchecked, CompactFactor, SymGroup,
};
pub use histogram::{compact_domain_size, compositions, hist_rank, hist_unrank, Histogram};
pub use partition::{
    detect_symmetries, propagate_multiply, propagate_sum_out, propagate_symmetries_schematic,
    SchematicOp, SymmetryPartition,
};
