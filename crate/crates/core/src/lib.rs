//! Exact and Monte Carlo computations for the interacting partially directed
//! self-avoiding walk (IPDSAW).
//!
//! The crate is organised bottom-up:
//!
//! * [`polymer`]: configurations, the Hamiltonian, the walk transform and
//!   geometric decompositions, plus a brute-force enumeration oracle;
//! * [`thermo`]: closed-form and numerically solved thermodynamic quantities;
//! * [`exact`]: dynamic programming over the auxiliary walk;
//! * [`mc`]: random samplers;
//! * [`experiments`]: estimators and the named experiment registry.

pub mod error;
pub mod exact;
pub mod experiments;
pub mod mc;
pub mod numerics;
pub mod polymer;
pub mod thermo;

pub use error::{Error, Result};
