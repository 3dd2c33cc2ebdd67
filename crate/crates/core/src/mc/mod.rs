//! Random samplers driven by reproducible streams.

mod excursions;
mod increments;
mod perfect;
mod rng;
mod tilted;

pub use excursions::{critical_excursions, write_excursions_csv, ExcursionRecord};
pub use increments::{sample_increment, sample_tilted_increment, TwoSidedGeometric};
pub use perfect::{lifetime_sample, perfect_critical_sample, PerfectSample};
pub use rng::{replicate, RngStream};
pub use tilted::{
    conditioned_bead_sample, tilted_walk_sample, BeadWindow, ConditionedBead, ConditionedWalk, TiltedWalk,
};
