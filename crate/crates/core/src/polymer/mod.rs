//! Configurations of the partially directed walk and their combinatorics.
//!
//! A configuration of length `L` is a family of `N` signed vertical
//! stretches `l_1, …, l_N` with `Σ|l_n| + N = L`. Consecutive stretches of
//! opposite sign interact through [`wedge`].

mod decompose;
mod enumerate;
mod geometry;
mod io;
mod path;
mod walk;

pub use decompose::{decompose_beads, decompose_patterns, Pattern, PatternDecomposition};
pub use enumerate::{
    enumerate_z, for_each_path, Enumeration, MAX_ENUMERATION_LENGTH,
};
pub use geometry::{geometry, PathGeometry};
pub use io::{parse_path_line, read_paths, read_sample_records, write_paths, SampleRecord};
pub use path::{hamiltonian, hamiltonian_via_moduli, wedge, PolymerPath};
pub use walk::{from_aux_walk, to_aux_walk, AuxWalk};
