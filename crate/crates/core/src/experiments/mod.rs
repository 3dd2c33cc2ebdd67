//! Statistical estimators and the registry of named experiments.

mod acceptance;
mod estimators;
mod registry;
mod report;

pub use acceptance::{run_acceptance, AcceptanceResult, ACCEPTANCE_IDS, QUICK_IDS};
pub use estimators::{
    chi2, cross_cov, emp_cov, ks, ks_weighted, linear_fit, loglog_slope, mean_se, sup_dist, total_variation,
    ChiSquare, CovEstimate, Estimate, LinearFit,
};
pub use registry::{run, ExperimentParams, EXPERIMENTS};
pub use report::{Criterion, Curve, ExperimentReport, Measurement, ReferenceKind, Tolerance};
