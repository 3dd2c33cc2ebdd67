//! Exact computations by dynamic programming over the auxiliary walk.

mod area;
mod cache;
mod kernel;
mod partition;
mod pattern;
mod renewal;
mod sampler;
mod table;

pub use area::{AreaDp, AreaMode, AREA_DP_LIMIT};
pub use cache::{cache_file_name, cached_walk_area_table, load_table, save_table, CacheHeader};
pub use partition::{
    excess_partition, excess_partitions, extension_law, extension_laws, ExtensionLaw, ENGINE_LIMIT,
};
pub use pattern::{
    constrained_partitions, extended_constants, extended_constants_auto, pattern_partition,
    pattern_partitions, RegenerativeConstants, TAIL_TOLERANCE,
};
pub use renewal::{crit_renewal, excursion_law, tau_law, CriticalRenewal, WalkStart, RENEWAL_LIMIT};
pub use sampler::{
    exact_sampler, mixture_epsilon, mixture_sampler, ExactSampler, MixtureSampler,
};
pub use table::{
    walk_area_table, walk_area_table_with_budget, Constraint, DpTable, Layer, DEFAULT_CELL_BUDGET,
};
